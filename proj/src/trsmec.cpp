#include "ecla/trsmec.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "ecla/sparseint.hpp"

namespace ecla {

unsigned freivalds_lambda(std::uint64_t q, std::size_t n, double epsilon) {
  if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  const double np = static_cast<double>(std::max<std::size_t>(n, 2));
  const double target = 3.0 * np * std::log2(np) / epsilon;
  unsigned lambda = 1;
  long double pw = static_cast<long double>(q);
  while (pw < target) {
    pw *= static_cast<long double>(q);
    ++lambda;
  }
  return lambda;
}

std::size_t iteration_limit(std::size_t m, std::size_t n) {
  const double np = static_cast<double>(std::max<std::size_t>(n, 2));
  const double mn = std::max(static_cast<double>(m) * static_cast<double>(n), 2.0);
  return static_cast<std::size_t>(3.0 * std::log2(np) + 2.0 * std::log2(mn) + 8.0);
}

namespace {

// T·P: the columns J of the triangular matrix, with implicit entries filled in.
Mat tri_select_cols(const Field& f, const TriView& t, const ColSelection& j) {
  Mat out(f, t.size(), j.size());
  for (std::size_t c = 0; c < j.size(); ++c) {
    const std::size_t col = j[c];
    if (t.tri == Triangle::Upper)
      for (std::size_t i = 0; i <= col; ++i) out(i, c) = t.at(i, col);
    else
      for (std::size_t i = col; i < t.size(); ++i) out(i, c) = t.at(i, col);
  }
  return out;
}

struct Core {
  const Field& base;
  MatView r;
  const BlackboxRHS& h;
  const TriView& t;
  const TrsmEcParams& params;
  bool transposed;
  CorrectionReport report;

  std::pair<std::size_t, std::size_t> position(std::size_t i, std::size_t j) const {
    if (params.frame) {
      const std::ptrdiff_t off = &r(i, j) - params.frame->base;
      return {static_cast<std::size_t>(off / params.frame->ld), static_cast<std::size_t>(off % params.frame->ld)};
    }
    if (transposed) return {j, i};
    return {i, j};
  }

  void run(const std::string& variant);
};

void Core::run(const std::string& variant) {
  const std::size_t m = r.rows(), n = r.cols();
  TrsmCallStats st;
  st.variant = variant;
  st.target = params.frame ? params.frame->target : params.target;
  st.m = m;
  st.n = n;
  st.ell = h.inner();
  st.epsilon = params.epsilon;
  st.seed = params.seed;
  report.operation = "trsm_ec_" + variant;
  report.seed = params.seed;
  report.epsilon = params.epsilon;
  report.epsilon_spent = params.epsilon;
  if (m == 0 || n == 0) {
    report.calls.push_back(st);
    return;
  }
  if (h.rows() != m || h.cols() != n || t.size() != n)
    throw std::invalid_argument("trsm_ec: dimension mismatch");

  Field fld = base;
  if (m >= base.cardinality()) {
    fld = Field::extend_for(base, m);
    st.extended = true;
    st.field_degree = fld.degree() / base.degree();
  }
  const Field& F = fld;
  st.lambda = params.lambda ? *params.lambda : freivalds_lambda(F.cardinality(), n, params.epsilon);
  const std::size_t limit = iteration_limit(m, n);

  Rng rng(params.seed);
  std::optional<PowTable> tab;
  std::size_t k = 1, kp = 0, cprev = 2 * n;
  // Pending correction E, stored by column.
  std::vector<std::vector<std::pair<std::size_t, Elem>>> ecol(n);
  std::vector<std::size_t> pending;
  std::optional<Mat> audit_sol;  // H·T⁻¹, the exact solution
  if (params.audit) {
    audit_sol = h.evaluate(F);
    trsm(F, Side::Right, t, audit_sol->view());
  }

  for (;;) {
    if (++st.iterations > limit) {
      report.calls.push_back(st);
      throw MonteCarloAbort("trsm_ec_" + variant + ": no convergence after " + std::to_string(limit) +
                            " passes");
    }
    Mat w = Mat::random(F, st.lambda, m, rng);
    Mat x = h.project_left(F, w.view());
    trsm(F, Side::Right, t, x.view());
    multiply_accumulate(F, x.view(), w.view(), r, true);
    for (std::size_t j : pending)
      for (auto [i, v] : ecol[j])
        for (std::size_t a = 0; a < st.lambda; ++a) x(a, j) = F.sub(x(a, j), F.mul(w(a, i), v));
    const ColSelection cols = col_support(x.view());
    const std::size_t c = cols.size();
    if (st.iterations == 1) st.initial_columns = c;
    if (audit_sol) {
      Mat d = *audit_sol;
      sub_into(F, d.view(), r);
      for (std::size_t j : pending)
        for (auto [i, v] : ecol[j]) d(i, j) = F.sub(d(i, j), v);
      if (col_support(d.view()).size() != c) ++st.freivalds_misses;
    }

    for (std::size_t j : cols) ecol[j].clear();
    for (std::size_t j : pending) {
      for (auto [i, v] : ecol[j]) {
        const Elem old = r(i, j);
        r(i, j) = base.add(old, v);
        auto [pi, pj] = position(i, j);
        report.corrections.push_back({st.target, pi, pj, old, r(i, j)});
        ++kp;
      }
      ecol[j].clear();
    }
    pending.clear();

    if (2 * c > cprev) k = std::max(2 * k, c);
    k = std::max(k, kp);
    cprev = c;
    if (c == 0) break;
    ++st.rounds;

    const std::size_t s = std::clamp<std::size_t>((2 * (k - kp) + c - 1) / c, 1, m);
    if (!tab) tab = PowTable::with_order_at_least(F, m);
    Mat g = h.project_vandermonde_selected(F, *tab, 2 * s, cols);
    Mat vr = vandermonde_apply(F, *tab, 2 * s, r);
    Mat tp = tri_select_cols(F, t, cols);
    multiply_accumulate(F, g.view(), vr.view(), tp.view(), true);
    Mat tj = select_rows_cols(F, t, cols);
    trsm(F, Side::Right, TriView{tj.view(), t.tri, Diag::NonUnit}, g.view());

    const RecoveryOutcome rec = batch_interpolate(F, g.view(), s, *tab);
    for (std::size_t a = 0; a < c; ++a) {
      if (!rec[a]) continue;
      const auto& entries = rec[a]->entries;
      if (st.extended &&
          !std::all_of(entries.begin(), entries.end(), [&](const auto& e) { return base.coerce(e.second).has_value(); }))
        continue;
      ecol[cols[a]] = entries;
      pending.push_back(cols[a]);
    }
  }
  st.corrected = kp;
  st.final_k = k;
  report.calls.push_back(st);
}

CorrectionReport run_core(const Field& f, MatView r, const BlackboxRHS& h, const TriView& t,
                          const TrsmEcParams& params, const std::string& variant, bool transposed) {
  Core core{f, r, h, t, params, transposed, {}};
  core.run(variant);
  return std::move(core.report);
}

}  // namespace

namespace detail {
CorrectionReport trsm_ec_right(const Field& f, MatView r, const BlackboxRHS& h, const TriView& t,
                               const TrsmEcParams& params, const std::string& variant) {
  return run_core(f, r, h, t, params, variant, false);
}
}  // namespace detail

CorrectionReport trsm_ec_upper_right(const Field& f, MatView r, const BlackboxRHS& h, const TriView& u,
                                     const TrsmEcParams& params) {
  if (u.tri != Triangle::Upper) throw std::invalid_argument("trsm_ec_upper_right: expected an upper triangle");
  return run_core(f, r, h, u, params, "upper_right", false);
}

CorrectionReport trsm_ec_lower_right(const Field& f, MatView r, const BlackboxRHS& h, const TriView& l,
                                     const TrsmEcParams& params) {
  if (l.tri != Triangle::Lower) throw std::invalid_argument("trsm_ec_lower_right: expected a lower triangle");
  return run_core(f, r, h, l, params, "lower_right", false);
}

// L·R = H  <=>  Rᵀ·Lᵀ = Hᵀ with Lᵀ upper.
CorrectionReport trsm_ec_lower_left(const Field& f, MatView r, const BlackboxRHS& h, const TriView& l,
                                    const TrsmEcParams& params) {
  if (l.tri != Triangle::Lower) throw std::invalid_argument("trsm_ec_lower_left: expected a lower triangle");
  const BlackboxRHS ht = h.transposed();
  const TriView lt = l.transposed();
  auto rep = run_core(f, r.transposed(), ht, lt, params, "lower_left", true);
  return rep;
}

CorrectionReport trsm_ec_upper_left(const Field& f, MatView r, const BlackboxRHS& h, const TriView& u,
                                    const TrsmEcParams& params) {
  if (u.tri != Triangle::Upper) throw std::invalid_argument("trsm_ec_upper_left: expected an upper triangle");
  const BlackboxRHS ht = h.transposed();
  const TriView ut = u.transposed();
  return run_core(f, r.transposed(), ht, ut, params, "upper_left", true);
}

bool trsm_identity_holds(const Field& f, Side side, ConstMatView r, const BlackboxRHS& h, const TriView& t) {
  const Mat tm = materialize(f, t);
  const Mat lhs = side == Side::Right ? multiply(f, r, tm.view()) : multiply(f, tm.view(), r);
  const Mat rhs = h.evaluate(f);
  return lhs.rows() == rhs.rows() && lhs.cols() == rhs.cols() && lhs.storage() == rhs.storage();
}

}  // namespace ecla
