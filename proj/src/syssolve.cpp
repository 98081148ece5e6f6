#include "ecla/syssolve.hpp"

#include <chrono>
#include <cmath>

#include "ecla/blackbox.hpp"

namespace ecla {

namespace {

TrsmEcParams stage_params(double eps, Rng& rng, const SolveOptions& opt, const char* target) {
  TrsmEcParams p;
  p.epsilon = eps;
  p.seed = rng();
  p.lambda = opt.lambda;
  p.target = target;
  return p;
}

// Records the entries a direct recomputation changed.
void record_diff(CorrectionReport& rep, const char* target, const Mat& before, const Mat& after) {
  for (std::size_t i = 0; i < after.rows(); ++i)
    for (std::size_t j = 0; j < after.cols(); ++j)
      if (before(i, j) != after(i, j)) rep.corrections.push_back({target, i, j, before(i, j), after(i, j)});
}

void check_solve_shapes(const Mat& a, const Mat& b, const PackedLU& lu, const Mat& mid, const Mat& x, std::size_t mid_rows) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.cols() != n || lu.size() != n || x.rows() != b.rows() || x.cols() != n ||
      mid.rows() != mid_rows || mid.cols() != n)
    throw std::invalid_argument("system solve: dimension mismatch");
}

}  // namespace

bool small_rhs_shortcut(std::size_t m, std::size_t n, double exponent) {
  if (exponent < 0) return false;
  return static_cast<double>(m) <= std::max(1.0, std::pow(static_cast<double>(n), exponent));
}

CorrectionReport tr_inv_ec(const Field& f, MatView r, const TriView& u, const TrsmEcParams& params) {
  if (u.tri != Triangle::Upper) throw std::invalid_argument("tr_inv_ec: expected an upper triangle");
  if (r.rows() != u.size() || r.cols() != u.size()) throw std::invalid_argument("tr_inv_ec: dimension mismatch");
  CorrectionReport rep = detail::trsm_ec_right(f, r, BlackboxRHS::identity(u.size()), u, params, "tr_inv");
  rep.operation = "tr_inv_ec";
  return rep;
}

CorrectionReport solve_small_rhs(const Field& f, const Mat& a, const Mat& b, PackedLU& lu, Mat& y, Mat& x,
                                 double epsilon, const SolveOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  check_solve_shapes(a, b, lu, y, x, b.rows());
  Rng rng(opt.seed);
  CroutOptions co;
  co.seed = rng();
  co.lambda = opt.lambda;
  co.leaf_size = opt.leaf_size;
  CorrectionReport rep = crout_ec(f, lu, a, epsilon / 3, co);

  const TriView l = lu.lower_view(), u = lu.upper_view();
  if (small_rhs_shortcut(b.rows(), a.rows(), opt.shortcut_exponent)) {
    Mat ny = b;
    trsm(f, Side::Right, u, ny.view());
    Mat nx = ny;
    trsm(f, Side::Right, l, nx.view());
    record_diff(rep, "Y", y, ny);
    record_diff(rep, "X", x, nx);
    y = std::move(ny);
    x = std::move(nx);
    rep.notes.push_back("small right-hand side: Y and X recomputed by triangular solves");
  } else {
    rep.absorb(trsm_ec_upper_right(f, y.view(), BlackboxRHS::dense(b.view()), u, stage_params(epsilon / 3, rng, opt, "Y")));
    rep.absorb(trsm_ec_lower_right(f, x.view(), BlackboxRHS::dense(y.view()), l, stage_params(epsilon / 3, rng, opt, "X")));
  }
  rep.operation = "solve_small_rhs";
  rep.seed = opt.seed;
  rep.epsilon = epsilon;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

CorrectionReport solve_large_rhs(const Field& f, const Mat& a, const Mat& b, PackedLU& lu, Mat& r, Mat& x,
                                 double epsilon, const SolveOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  check_solve_shapes(a, b, lu, r, x, a.rows());
  Rng rng(opt.seed);
  CroutOptions co;
  co.seed = rng();
  co.lambda = opt.lambda;
  co.leaf_size = opt.leaf_size;
  CorrectionReport rep = crout_ec(f, lu, a, epsilon / 3, co);

  rep.absorb(tr_inv_ec(f, r.view(), lu.upper_view(), stage_params(epsilon / 3, rng, opt, "R")));
  rep.absorb(trsm_ec_lower_right(f, x.view(), BlackboxRHS::product(b.view(), r.view()), lu.lower_view(),
                                 stage_params(epsilon / 3, rng, opt, "X")));
  rep.operation = "solve_large_rhs";
  rep.seed = opt.seed;
  rep.epsilon = epsilon;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace ecla
