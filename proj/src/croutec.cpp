#include "ecla/croutec.hpp"

#include <chrono>

#include "ecla/blackbox.hpp"
#include "ecla/trsmec.hpp"

namespace ecla {

namespace {

// Recursion over a square leading block of a (possibly wider) buffer.
// Returns the index of the first zero pivot, if any.
class CroutRunner {
 public:
  CroutRunner(const Field& f, MatView m, ConstMatView a, const Elem* frame_base, std::ptrdiff_t frame_ld,
              bool correct, const CroutOptions& opt)
      : f_(f), m_(m), a_(a), base_(frame_base), ld_(frame_ld), correct_(correct), opt_(opt), rng_(opt.seed) {}

  std::optional<std::size_t> run(std::size_t o, std::size_t nr, double eps, std::size_t depth) {
    if (nr == 0) return std::nullopt;
    if (nr <= std::max<std::size_t>(opt_.leaf_size, 1)) return leaf(o, nr, depth);
    const std::size_t n2 = (nr + 1) / 2, n3 = nr / 2;
    if (auto z = run(o, n2, eps / 4, depth + 1)) return z;

    const TriView l22{m_.block(o, o, n2, n2), Triangle::Lower, Diag::Unit};
    const TriView u22{m_.block(o, o, n2, n2), Triangle::Upper, Diag::NonUnit};
    const ConstMatView l21 = m_.block(o, 0, n2, o), u13 = m_.block(0, o + n2, o, n3);
    const ConstMatView l31 = m_.block(o + n2, 0, n3, o), u12 = m_.block(0, o, o, n2);
    MatView u23 = m_.block(o, o + n2, n2, n3), l32 = m_.block(o + n2, o, n3, n2);

    trace(depth, "u23", {o, o + n2, n2, n3}, {{o, 0, n2, o}, {0, o + n2, o, n3}, {o, o, n2, n2}}, eps / 4);
    trace(depth, "l32", {o + n2, o, n3, n2}, {{o + n2, 0, n3, o}, {0, o, o, n2}, {o, o, n2, n2}}, eps / 4);
    if (correct_) {
      const auto h23 = BlackboxRHS::difference(a_.block(o, o + n2, n2, n3), l21, u13);
      report_.absorb(trsm_ec_lower_left(f_, u23, h23, l22, params(eps / 4)));
      const auto h32 = BlackboxRHS::difference(a_.block(o + n2, o, n3, n2), l31, u12);
      report_.absorb(trsm_ec_upper_right(f_, l32, h32, u22, params(eps / 4)));
    } else {
      copy_into(u23, a_.block(o, o + n2, n2, n3));
      multiply_accumulate(f_, u23, l21, u13);
      trsm(f_, Side::Left, l22, u23);
      copy_into(l32, a_.block(o + n2, o, n3, n2));
      multiply_accumulate(f_, l32, l31, u12);
      trsm(f_, Side::Right, u22, l32);
    }
    return run(o + n2, n3, eps / 4, depth + 1);
  }

  CorrectionReport& report() { return report_; }

 private:
  std::optional<std::size_t> leaf(std::size_t o, std::size_t nr, std::size_t depth) {
    trace(depth, "base", {o, o, nr, nr}, {{o, 0, nr, o}, {0, o, o, nr}}, 0);
    MatView blk = m_.block(o, o, nr, nr);
    std::optional<Mat> before;
    if (correct_) before = Mat::from_view(f_, blk);
    copy_into(blk, a_.block(o, o, nr, nr));
    multiply_accumulate(f_, blk, m_.block(o, 0, nr, o), m_.block(0, o, o, nr));
    // Unpivoted elimination inside the leaf; a no-op loop when nr = 1.
    for (std::size_t i = 0; i < nr; ++i) {
      if (blk(i, i) == 0) return o + i;
      const Elem inv = f_.inv(blk(i, i));
      for (std::size_t r = i + 1; r < nr; ++r) {
        const Elem l = f_.mul(blk(r, i), inv);
        blk(r, i) = l;
        for (std::size_t c = i + 1; c < nr; ++c) blk(r, c) = f_.sub(blk(r, c), f_.mul(l, blk(i, c)));
      }
    }
    if (before) record_changes(*before, blk);
    return std::nullopt;
  }

  // The leaf is recomputed outright; report the entries that changed.
  void record_changes(const Mat& before, ConstMatView after) {
    for (std::size_t i = 0; i < after.rows(); ++i)
      for (std::size_t j = 0; j < after.cols(); ++j) {
        if (before(i, j) == after(i, j)) continue;
        const std::ptrdiff_t off = &after(i, j) - base_;
        report_.corrections.push_back({"LU", static_cast<std::size_t>(off / ld_), static_cast<std::size_t>(off % ld_),
                                       before(i, j), after(i, j)});
      }
  }

  TrsmEcParams params(double eps) {
    TrsmEcParams p;
    p.epsilon = eps;
    p.seed = rng_();
    p.lambda = opt_.lambda;
    p.frame = RecordFrame{base_, ld_, "LU"};
    return p;
  }

  void trace(std::size_t depth, const char* step, Region target, std::vector<Region> reads, double eps) {
    if (!opt_.trace) return;
    opt_.trace->push_back({depth, step, target, std::move(reads), eps});
  }

  const Field& f_;
  MatView m_;
  ConstMatView a_;
  const Elem* base_;
  std::ptrdiff_t ld_;
  bool correct_;
  const CroutOptions& opt_;
  Rng rng_;
  CorrectionReport report_;
};

void label_lu(CorrectionReport& rep) {
  for (auto& c : rep.corrections)
    if (c.target == "LU") c.target = c.row > c.col ? "L" : "U";
  for (auto& c : rep.calls)
    if (c.target == "LU") c.target = c.variant == "lower_left" ? "U" : "L";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void check_epsilon(double eps) {
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("epsilon must lie in (0, 1)");
}

}  // namespace

PackedLU crout_reference(const Mat& a, std::size_t leaf_size) {
  if (a.rows() != a.cols()) throw std::invalid_argument("crout_reference: matrix must be square");
  Mat m(a.field(), a.rows(), a.cols());
  CroutOptions opt;
  opt.leaf_size = leaf_size;
  CroutRunner run(a.field(), m.view(), a.view(), m.view().data(), static_cast<std::ptrdiff_t>(m.cols()), false,
                  opt);
  if (auto z = run.run(0, a.rows(), 0.5, 0))
    throw GrpViolation("crout_reference: zero pivot at index " + std::to_string(*z));
  return PackedLU(std::move(m));
}

CorrectionReport crout_ec(const Field& f, PackedLU& m, const Mat& a, double epsilon, const CroutOptions& opt) {
  check_epsilon(epsilon);
  const auto t0 = std::chrono::steady_clock::now();
  Mat& buf = m.packed();
  if (a.rows() != a.cols() || buf.rows() != a.rows() || buf.cols() != a.cols())
    throw std::invalid_argument("crout_ec: dimension mismatch");
  CroutRunner run(f, buf.view(), a.view(), buf.view().data(), static_cast<std::ptrdiff_t>(buf.cols()), true, opt);
  auto z = run.run(0, a.rows(), epsilon, 0);
  CorrectionReport rep = std::move(run.report());
  if (z) throw GrpViolation("crout_ec: zero pivot at index " + std::to_string(*z));
  label_lu(rep);
  rep.operation = "crout_ec";
  rep.seed = opt.seed;
  rep.epsilon = epsilon;
  rep.seconds = seconds_since(t0);
  return rep;
}

CorrectionReport rect_ec(const Field& f, Mat& m, const Mat& a, double epsilon, const CroutOptions& opt) {
  check_epsilon(epsilon);
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t rows = a.rows(), cols = a.cols();
  if (rows > cols || m.rows() != rows || m.cols() != cols) throw std::invalid_argument("rect_ec: dimension mismatch");
  const Elem* base = m.view().data();
  const auto ld = static_cast<std::ptrdiff_t>(cols);

  CroutRunner run(f, m.block(0, 0, rows, rows), a.block(0, 0, rows, rows), base, ld, true, opt);
  if (auto z = run.run(0, rows, epsilon / 2, 0))
    throw GrpViolation("rect_ec: zero pivot at index " + std::to_string(*z));
  CorrectionReport rep = std::move(run.report());

  TrsmEcParams p;
  p.epsilon = epsilon / 2;
  p.seed = opt.seed ^ 0x5245435432ULL;
  p.lambda = opt.lambda;
  p.frame = RecordFrame{base, ld, "LU"};
  const auto h = BlackboxRHS::dense(a.block(0, rows, rows, cols - rows));
  const TriView l1{m.block(0, 0, rows, rows), Triangle::Lower, Diag::Unit};
  rep.absorb(trsm_ec_lower_left(f, m.block(0, rows, rows, cols - rows), h, l1, p));

  label_lu(rep);
  rep.operation = "rect_ec";
  rep.seed = opt.seed;
  rep.epsilon = epsilon;
  rep.seconds = seconds_since(t0);
  return rep;
}

RankResult rank_deficient_ec(const Field& f, Mat& m, const Mat& a, double epsilon, const CroutOptions& opt) {
  check_epsilon(epsilon);
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t rows = a.rows(), cols = a.cols(), d = std::min(rows, cols);
  if (m.rows() != rows || m.cols() != cols) throw std::invalid_argument("rank_deficient_ec: dimension mismatch");
  const Elem* base = m.view().data();
  const auto ld = static_cast<std::ptrdiff_t>(cols);

  CroutRunner run(f, m.block(0, 0, d, d), a.block(0, 0, d, d), base, ld, true, opt);
  const std::size_t r = run.run(0, d, epsilon / 3, 0).value_or(d);
  RankResult res{r, Mat(f, rows, r), Mat(f, r, cols), std::move(run.report())};

  const TriView l11{m.block(0, 0, r, r), Triangle::Lower, Diag::Unit};
  const TriView u11{m.block(0, 0, r, r), Triangle::Upper, Diag::NonUnit};
  TrsmEcParams p;
  p.epsilon = epsilon / 3;
  p.lambda = opt.lambda;
  p.frame = RecordFrame{base, ld, "LU"};
  p.seed = opt.seed ^ 0x524b31ULL;
  res.report.absorb(trsm_ec_lower_left(f, m.block(0, r, r, cols - r), BlackboxRHS::dense(a.block(0, r, r, cols - r)),
                                       l11, p));
  p.seed = opt.seed ^ 0x524b32ULL;
  res.report.absorb(trsm_ec_upper_right(f, m.block(r, 0, rows - r, r),
                                        BlackboxRHS::dense(a.block(r, 0, rows - r, r)), u11, p));

  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < std::min(i + 1, r); ++j) res.l(i, j) = i == j ? 1 : m(i, j);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i; j < cols; ++j) res.u(i, j) = m(i, j);

  label_lu(res.report);
  res.report.operation = "rank_deficient_ec";
  res.report.seed = opt.seed;
  res.report.epsilon = epsilon;
  res.report.rank = r;
  if (r < d) res.report.notes.push_back("entries outside the rank-" + std::to_string(r) + " factors were ignored");
  res.report.seconds = seconds_since(t0);
  return res;
}

bool has_generic_rank_profile(const Mat& a) {
  const Field& f = a.field();
  Mat s = a;
  const std::size_t d = std::min(a.rows(), a.cols());
  std::size_t i = 0;
  for (; i < d; ++i) {
    if (s(i, i) == 0) break;
    const Elem inv = f.inv(s(i, i));
    for (std::size_t r = i + 1; r < a.rows(); ++r) {
      const Elem l = f.mul(s(r, i), inv);
      for (std::size_t c = i; c < a.cols(); ++c) s(r, c) = f.sub(s(r, c), f.mul(l, s(i, c)));
    }
  }
  for (std::size_t r = i; r < a.rows(); ++r)
    for (std::size_t c = i; c < a.cols(); ++c)
      if (s(r, c) != 0) return false;
  return true;
}

}  // namespace ecla
