// Corrected solutions of X·A = B from candidate factors and intermediates.
#pragma once

#include <cstdint>
#include <optional>

#include "ecla/croutec.hpp"
#include "ecla/mat.hpp"
#include "ecla/report.hpp"
#include "ecla/trsmec.hpp"

namespace ecla {

struct SolveOptions {
  std::uint64_t seed = 0;
  std::optional<unsigned> lambda;
  std::size_t leaf_size = 1;
  /// Y and X are recomputed directly when m <= max(1, n^exponent).
  /// A negative exponent disables the shortcut.
  double shortcut_exponent = 0.125;
};

bool small_rhs_shortcut(std::size_t m, std::size_t n, double exponent);

/// Corrects L\U (n×n), Y (m×n, Y·U = B) and X (m×n, X·L = Y) in place.
CorrectionReport solve_small_rhs(const Field& f, const Mat& a, const Mat& b, PackedLU& lu, Mat& y, Mat& x,
                                 double epsilon, const SolveOptions& opt = {});

/// Corrects L\U, R (n×n, R = U⁻¹) and X (m×n, X·L = B·R) in place.
CorrectionReport solve_large_rhs(const Field& f, const Mat& a, const Mat& b, PackedLU& lu, Mat& r, Mat& x,
                                 double epsilon, const SolveOptions& opt = {});

/// Corrects R in place so that R·U = I.
CorrectionReport tr_inv_ec(const Field& f, MatView r, const TriView& u, const TrsmEcParams& params);

}  // namespace ecla
