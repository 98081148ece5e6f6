// Error-correcting triangular solves against an unevaluated right-hand side.
//
// Each routine takes a candidate R (arbitrarily corrupted) and fixes it in
// place so that, with probability at least 1 - epsilon,
//   upper_right: R·U = H      lower_right: R·L = H
//   lower_left:  L·R = H      upper_left:  U·R = H
// The cost depends on the number of wrong entries rather than on recomputing R.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "ecla/blackbox.hpp"
#include "ecla/mat.hpp"
#include "ecla/report.hpp"

namespace ecla {

/// The loop exceeded its iteration limit. Only happens after a failed
/// Freivalds check, so with probability at most epsilon.
class MonteCarloAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Where corrections are reported: element pointers inside R are translated to
/// (row, col) of a row-major matrix starting at `base` with leading dimension `ld`.
struct RecordFrame {
  const Elem* base = nullptr;
  std::ptrdiff_t ld = 0;
  std::string target = "R";
};

struct TrsmEcParams {
  double epsilon = 0.05;
  std::uint64_t seed = 0;
  std::optional<unsigned> lambda;  // overrides the computed projection height
  std::optional<RecordFrame> frame;
  std::string target = "R";  // used when no frame is given
  /// Compare every pass against the dense residual and count the erroneous
  /// columns the projection missed. Costs a full product per pass; tests only.
  bool audit = false;
};

/// Smallest lambda >= 1 with q^lambda >= 3 n' log2(n') / epsilon, n' = max(n, 2).
unsigned freivalds_lambda(std::uint64_t q, std::size_t n, double epsilon);

/// Abort threshold on Freivalds passes for an m×n candidate.
std::size_t iteration_limit(std::size_t m, std::size_t n);

CorrectionReport trsm_ec_upper_right(const Field& f, MatView r, const BlackboxRHS& h, const TriView& u,
                                     const TrsmEcParams& params);
CorrectionReport trsm_ec_lower_right(const Field& f, MatView r, const BlackboxRHS& h, const TriView& l,
                                     const TrsmEcParams& params);
CorrectionReport trsm_ec_lower_left(const Field& f, MatView r, const BlackboxRHS& h, const TriView& l,
                                    const TrsmEcParams& params);
CorrectionReport trsm_ec_upper_left(const Field& f, MatView r, const BlackboxRHS& h, const TriView& u,
                                    const TrsmEcParams& params);

/// Checks the defining identity densely. Exact; meant for tests and --verify.
bool trsm_identity_holds(const Field& f, Side side, ConstMatView r, const BlackboxRHS& h, const TriView& t);

namespace detail {
/// The shared loop: corrects R (m×n) so that R·T = H with T upper or lower.
CorrectionReport trsm_ec_right(const Field& f, MatView r, const BlackboxRHS& h, const TriView& t,
                               const TrsmEcParams& params, const std::string& variant);
}  // namespace detail

}  // namespace ecla
