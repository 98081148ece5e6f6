// Sparse recovery from evaluations at powers of a high-order element.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ecla/ff.hpp"
#include "ecla/mat.hpp"

namespace ecla {

struct SparseColumn {
  std::vector<std::pair<std::size_t, Elem>> entries;  // row index, nonzero value
  bool operator==(const SparseColumn&) const = default;
};

using RecoveryOutcome = std::vector<std::optional<SparseColumn>>;

/// Shortest connection polynomial 1 + c1 x + ... + cL x^L generating `seq`.
std::vector<Elem> berlekamp_massey(const Field& f, std::span<const Elem> seq);

/// Recovers e with at most s nonzeros at indices < tab.size() from
/// evals[i] = sum_j e_j theta^(ij), i < evals.size() (normally 2s).
/// Returns nullopt when no consistent s-sparse vector is found; a returned
/// column always reproduces every evaluation.
std::optional<SparseColumn> interpolate_column(const Field& f, std::span<const Elem> evals, std::size_t s,
                                               const PowTable& tab);

/// Column-wise interpolate_column over the rows of G.
RecoveryOutcome batch_interpolate(const Field& f, ConstMatView g, std::size_t s, const PowTable& tab);

}  // namespace ecla
