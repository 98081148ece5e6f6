#include "ecla/sparseint.hpp"

#include <algorithm>

namespace ecla {

std::vector<Elem> berlekamp_massey(const Field& f, std::span<const Elem> seq) {
  std::vector<Elem> c{1}, b{1};
  std::size_t len = 0, shift = 1;
  Elem bd = 1;
  for (std::size_t n = 0; n < seq.size(); ++n) {
    Elem d = seq[n];
    for (std::size_t i = 1; i <= len && i < c.size(); ++i) d = f.add(d, f.mul(c[i], seq[n - i]));
    if (d == 0) {
      ++shift;
      continue;
    }
    const Elem coef = f.div(d, bd);
    std::vector<Elem> prev = c;
    if (c.size() < b.size() + shift) c.resize(b.size() + shift, 0);
    for (std::size_t i = 0; i < b.size(); ++i) c[i + shift] = f.sub(c[i + shift], f.mul(coef, b[i]));
    if (2 * len <= n) {
      len = n + 1 - len;
      b = std::move(prev);
      bd = d;
      shift = 1;
    } else {
      ++shift;
    }
  }
  c.resize(len + 1, 0);
  return c;
}

std::optional<SparseColumn> interpolate_column(const Field& f, std::span<const Elem> evals, std::size_t s,
                                               const PowTable& tab) {
  SparseColumn out;
  if (std::all_of(evals.begin(), evals.end(), [](Elem e) { return e == 0; })) return out;
  if (s == 0) return std::nullopt;

  const std::vector<Elem> conn = berlekamp_massey(f, evals);
  const std::size_t len = conn.size() - 1;
  if (len == 0 || len > s || conn[len] == 0) return std::nullopt;

  // Locator x^L + c1 x^(L-1) + ... + cL, low degree first.
  std::vector<Elem> loc(len + 1);
  for (std::size_t i = 0; i <= len; ++i) loc[i] = conn[len - i];

  std::vector<std::size_t> idx;
  std::vector<Elem> roots;
  if (len == 1) {
    const Elem root = f.neg(loc[0]);
    auto j = tab.dlog(root);
    if (!j) return std::nullopt;
    idx.push_back(*j);
    roots.push_back(root);
  } else {
    auto& scans = op_counters().scan;
    for (std::size_t j = 0; j < tab.size() && roots.size() < len; ++j) {
      const Elem x = tab.power(j);
      Elem acc = loc[len];
      for (std::size_t i = len; i-- > 0;) acc = f.add(f.mul(acc, x), loc[i]);
      ++scans;
      if (acc == 0) {
        idx.push_back(j);
        roots.push_back(x);
      }
    }
    if (roots.size() != len) return std::nullopt;
  }

  // v_t = (sum_i q_{t,i} g_i) / Q_t(b_t) with Q_t = loc / (x - b_t).
  std::vector<Elem> quot(len);
  for (std::size_t t = 0; t < len; ++t) {
    Elem carry = loc[len];
    for (std::size_t i = len; i-- > 0;) {
      quot[i] = carry;
      carry = f.add(loc[i], f.mul(carry, roots[t]));
    }
    Elem num = 0, den = 0, pw = 1;
    for (std::size_t i = 0; i < len; ++i) {
      num = f.add(num, f.mul(quot[i], evals[i]));
      den = f.add(den, f.mul(quot[i], pw));
      pw = f.mul(pw, roots[t]);
    }
    if (den == 0 || num == 0) return std::nullopt;
    out.entries.emplace_back(idx[t], f.div(num, den));
  }

  std::vector<Elem> pw(len, 1);
  for (std::size_t i = 0; i < evals.size(); ++i) {
    Elem acc = 0;
    for (std::size_t t = 0; t < len; ++t) {
      acc = f.add(acc, f.mul(out.entries[t].second, pw[t]));
      pw[t] = f.mul(pw[t], roots[t]);
    }
    if (acc != evals[i]) return std::nullopt;
  }
  std::sort(out.entries.begin(), out.entries.end());
  return out;
}

RecoveryOutcome batch_interpolate(const Field& f, ConstMatView g, std::size_t s, const PowTable& tab) {
  RecoveryOutcome out;
  out.reserve(g.cols());
  std::vector<Elem> col(g.rows());
  for (std::size_t t = 0; t < g.cols(); ++t) {
    for (std::size_t i = 0; i < g.rows(); ++i) col[i] = g(i, t);
    out.push_back(interpolate_column(f, col, s, tab));
  }
  return out;
}

}  // namespace ecla
