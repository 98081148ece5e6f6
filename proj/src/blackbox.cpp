#include "ecla/blackbox.hpp"

#include <stdexcept>

namespace ecla {

Mat vandermonde_apply(const Field& f, const PowTable& tab, std::size_t nrows, ConstMatView m,
                      const ColSelection* cols) {
  const std::size_t c = cols ? cols->size() : m.cols();
  if (m.rows() > tab.size()) throw std::invalid_argument("vandermonde_apply: power table too short");
  Mat out(f, nrows, c);
  if (nrows == 0 || c == 0) return out;

  std::vector<Elem> row(c);
  const std::uint64_t lim = f.lazy_terms();
  const std::uint64_t p = f.characteristic();
  std::vector<std::uint64_t> acc;
  if (lim) acc.assign(nrows * c, 0);
  std::uint64_t pending = 0;

  for (std::size_t r = 0; r < m.rows(); ++r) {
    bool any = false;
    for (std::size_t t = 0; t < c; ++t) {
      row[t] = m(r, cols ? (*cols)[t] : t);
      any |= row[t] != 0;
    }
    if (!any) continue;
    const Elem step = tab.power(r);
    Elem pw = 1;
    if (lim) {
      if (pending == lim) {
        for (auto& v : acc) v %= p;
        pending = 0;
      }
      for (std::size_t i = 0; i < nrows; ++i) {
        std::uint64_t* dst = &acc[i * c];
        for (std::size_t t = 0; t < c; ++t) dst[t] += pw * row[t];
        pw = f.mul(pw, step);
      }
      op_counters().mul += static_cast<std::uint64_t>(nrows) * c;
      ++pending;
    } else {
      for (std::size_t i = 0; i < nrows; ++i) {
        for (std::size_t t = 0; t < c; ++t)
          if (row[t] != 0) out(i, t) = f.add(out(i, t), f.mul(pw, row[t]));
        pw = f.mul(pw, step);
      }
    }
  }
  if (lim)
    for (std::size_t i = 0; i < nrows; ++i)
      for (std::size_t t = 0; t < c; ++t) out(i, t) = acc[i * c + t] % p;
  return out;
}

Mat vandermonde_matrix(const Field& f, const PowTable& tab, std::size_t nrows, std::size_t m) {
  Mat v(f, nrows, m);
  for (std::size_t j = 0; j < m; ++j) {
    Elem pw = 1;
    for (std::size_t i = 0; i < nrows; ++i) {
      v(i, j) = pw;
      pw = f.mul(pw, tab.power(j));
    }
  }
  return v;
}

BlackboxRHS BlackboxRHS::dense(ConstMatView c) {
  BlackboxRHS h;
  h.rows_ = c.rows();
  h.cols_ = c.cols();
  h.base_ = Base::Dense;
  h.c_ = c;
  return h;
}

BlackboxRHS BlackboxRHS::difference(ConstMatView c, ConstMatView a, ConstMatView b) {
  if (a.rows() != c.rows() || b.cols() != c.cols() || a.cols() != b.rows())
    throw std::invalid_argument("blackbox: inconsistent dimensions for C - A*B");
  BlackboxRHS h = dense(c);
  h.has_product_ = a.cols() > 0;
  h.subtract_ = true;
  h.a_ = a;
  h.b_ = b;
  return h;
}

BlackboxRHS BlackboxRHS::product(ConstMatView a, ConstMatView b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("blackbox: inconsistent dimensions for A*B");
  BlackboxRHS h;
  h.rows_ = a.rows();
  h.cols_ = b.cols();
  h.base_ = Base::Zero;
  h.has_product_ = a.cols() > 0;
  h.subtract_ = false;
  h.a_ = a;
  h.b_ = b;
  return h;
}

BlackboxRHS BlackboxRHS::identity(std::size_t n) {
  BlackboxRHS h;
  h.rows_ = n;
  h.cols_ = n;
  h.base_ = Base::Identity;
  return h;
}

BlackboxRHS BlackboxRHS::transposed() const {
  BlackboxRHS h = *this;
  h.rows_ = cols_;
  h.cols_ = rows_;
  if (base_ == Base::Dense) h.c_ = c_.transposed();
  if (has_product_) {
    h.a_ = b_.transposed();
    h.b_ = a_.transposed();
  }
  return h;
}

void BlackboxRHS::apply_product(const Field& f, Mat& out, const Mat& left_times_a, const ColSelection* j) const {
  if (!has_product_) return;
  if (j) {
    Mat bp = select_cols(f, b_, *j);
    multiply_accumulate(f, out.view(), left_times_a.view(), bp.view(), subtract_);
  } else {
    multiply_accumulate(f, out.view(), left_times_a.view(), b_, subtract_);
  }
}

Mat BlackboxRHS::project_left(const Field& f, ConstMatView w) const {
  if (w.cols() != rows_) throw std::invalid_argument("project_left: dimension mismatch");
  Mat out(f, w.rows(), cols_);
  if (base_ == Base::Dense) out = multiply(f, w, c_);
  if (base_ == Base::Identity) copy_into(out.view(), w);
  if (has_product_) apply_product(f, out, multiply(f, w, a_), nullptr);
  return out;
}

Mat BlackboxRHS::project_left_selected(const Field& f, ConstMatView w, const ColSelection& j) const {
  if (w.cols() != rows_) throw std::invalid_argument("project_left_selected: dimension mismatch");
  Mat out(f, w.rows(), j.size());
  if (base_ == Base::Dense) {
    Mat cp = select_cols(f, c_, j);
    out = multiply(f, w, cp.view());
  }
  if (base_ == Base::Identity)
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t t = 0; t < j.size(); ++t) out(i, t) = w(i, j[t]);
  if (has_product_) apply_product(f, out, multiply(f, w, a_), &j);
  return out;
}

Mat BlackboxRHS::project_vandermonde_selected(const Field& f, const PowTable& tab, std::size_t nrows,
                                              const ColSelection& j) const {
  Mat out(f, nrows, j.size());
  if (base_ == Base::Dense) out = vandermonde_apply(f, tab, nrows, c_, &j);
  if (base_ == Base::Identity) {
    // V·P has entries θ^{i·j_t}.
    for (std::size_t t = 0; t < j.size(); ++t) {
      Elem pw = 1;
      for (std::size_t i = 0; i < nrows; ++i) {
        out(i, t) = pw;
        pw = f.mul(pw, tab.power(j[t]));
      }
    }
  }
  if (has_product_) apply_product(f, out, vandermonde_apply(f, tab, nrows, a_), &j);
  return out;
}

Mat BlackboxRHS::evaluate(const Field& f) const {
  Mat out(f, rows_, cols_);
  if (base_ == Base::Dense) copy_into(out.view(), c_);
  if (base_ == Base::Identity)
    for (std::size_t i = 0; i < rows_; ++i) out(i, i) = 1;
  if (has_product_) multiply_accumulate(f, out.view(), a_, b_, subtract_);
  return out;
}

}  // namespace ecla
