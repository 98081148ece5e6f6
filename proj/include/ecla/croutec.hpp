// Recursive Crout LU and its error-correcting counterpart, plus the
// rectangular and rank-deficient wrappers.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecla/mat.hpp"
#include "ecla/report.hpp"

namespace ecla {

/// A zero pivot where the factorization required an invertible leading block.
class GrpViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Region {
  std::size_t row = 0, col = 0, rows = 0, cols = 0;
  bool empty() const { return rows == 0 || cols == 0; }
  bool overlaps(const Region& o) const {
    return !empty() && !o.empty() && row < o.row + o.rows && o.row < row + rows && col < o.col + o.cols &&
           o.col < col + cols;
  }
};

/// One step of the recursion: which block of M it wrote and which it read.
struct CroutTraceEntry {
  std::size_t depth = 0;
  std::string step;  // base, u23, l32
  Region target;
  std::vector<Region> reads;
  double epsilon = 0;
};

struct CroutOptions {
  std::uint64_t seed = 0;
  std::size_t leaf_size = 1;
  std::optional<unsigned> lambda;  // forwarded to every TrsmEC call
  std::vector<CroutTraceEntry>* trace = nullptr;
};

/// Unpivoted recursive Crout factorization of a GRP invertible matrix.
PackedLU crout_reference(const Mat& a, std::size_t leaf_size = 1);

/// Overwrites the candidate L\U in `m` with the LU factors of `a`
/// (correct with probability >= 1 - epsilon).
CorrectionReport crout_ec(const Field& f, PackedLU& m, const Mat& a, double epsilon, const CroutOptions& opt = {});

/// `m` is the m×n buffer [L\U1 U2] for a with m <= n.
CorrectionReport rect_ec(const Field& f, Mat& m, const Mat& a, double epsilon, const CroutOptions& opt = {});

struct RankResult {
  std::size_t rank = 0;
  Mat l;  // m×r unit lower trapezoidal
  Mat u;  // r×n upper trapezoidal
  CorrectionReport report;
};

/// `m` is an m×n buffer holding the candidate L (strictly below the
/// diagonal) and U (on and above it). Entries outside the rank-shaped
/// factors are ignored.
RankResult rank_deficient_ec(const Field& f, Mat& m, const Mat& a, double epsilon, const CroutOptions& opt = {});

/// Brute-force check that the leading principal minors 1..rank are nonzero
/// and the later ones vanish. Cubic per minor; tests only.
bool has_generic_rank_profile(const Mat& a);

}  // namespace ecla
