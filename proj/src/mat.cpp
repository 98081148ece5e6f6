#include "ecla/mat.hpp"

#include <algorithm>
#include <atomic>

namespace ecla {

namespace {

std::atomic<std::size_t> g_strassen_threshold{64};

constexpr std::size_t kTrsmLeaf = 32;
constexpr std::size_t kInnerBlock = 256;
constexpr std::size_t kThinRows = 8;

void check_product_dims(ConstMatView a, ConstMatView b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: inner dimensions differ");
}

// out (m×n, row-major, zero-initialized) = a·b.
void classical_product(const Field& f, ConstMatView a, ConstMatView b, Elem* out) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (m == 0 || n == 0 || k == 0) return;
  const std::uint64_t lim = f.lazy_terms();

  if (lim == 0) {
    // Exact path: extension fields and p >= 2^32.
    for (std::size_t i = 0; i < m; ++i) {
      Elem* crow = out + i * n;
      for (std::size_t kk = 0; kk < k; ++kk) {
        const Elem aik = a(i, kk);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < n; ++j) crow[j] = f.add(crow[j], f.mul(aik, b(kk, j)));
      }
    }
    return;
  }

  op_counters().mul += static_cast<std::uint64_t>(m) * k * n;
  const std::uint64_t p = f.characteristic();
  if (!b.row_contiguous() && b.col_contiguous() && a.row_contiguous()) {
    // Dot-product order for a column-major right operand.
    for (std::size_t i = 0; i < m; ++i) {
      const Elem* arow = a.row_ptr(i);
      for (std::size_t j = 0; j < n; ++j) {
        const Elem* bcol = &b(0, j);
        std::uint64_t acc = 0;
        std::uint64_t cnt = 0;
        for (std::size_t kk = 0; kk < k; ++kk) {
          acc += arow[kk] * bcol[kk];
          if (++cnt == lim) {
            acc %= p;
            cnt = 0;
          }
        }
        out[i * n + j] = acc % p;
      }
    }
    return;
  }

  std::vector<Elem> packed;
  const Elem* bdata;
  std::size_t bld;
  if (b.row_contiguous()) {
    bdata = b.data();
    bld = static_cast<std::size_t>(b.row_stride());
  } else {
    packed.resize(k * n);
    for (std::size_t kk = 0; kk < k; ++kk)
      for (std::size_t j = 0; j < n; ++j) packed[kk * n + j] = b(kk, j);
    bdata = packed.data();
    bld = n;
  }
  const std::size_t kb = static_cast<std::size_t>(std::min<std::uint64_t>(kInnerBlock, lim));
  std::uint64_t cnt = 0;
  for (std::size_t k0 = 0; k0 < k; k0 += kb) {
    const std::size_t k1 = std::min(k, k0 + kb);
    if (cnt + (k1 - k0) > lim) {
      for (std::size_t t = 0; t < m * n; ++t) out[t] %= p;
      cnt = 0;
    }
    if (m <= kThinRows) {
      // Few output rows: stream each row of b once.
      for (std::size_t kk = k0; kk < k1; ++kk) {
        const Elem* __restrict brow = bdata + kk * bld;
        for (std::size_t i = 0; i < m; ++i) {
          const Elem aik = a(i, kk);
          if (aik == 0) continue;
          Elem* __restrict crow = out + i * n;
          for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
      }
    } else {
      for (std::size_t i = 0; i < m; ++i) {
        Elem* __restrict crow = out + i * n;
        for (std::size_t kk = k0; kk < k1; ++kk) {
          const Elem aik = a(i, kk);
          if (aik == 0) continue;
          const Elem* __restrict brow = bdata + kk * bld;
          for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
      }
    }
    cnt += k1 - k0;
  }
  for (std::size_t t = 0; t < m * n; ++t) out[t] %= p;
}

void classical_into(const Field& f, MatView c, ConstMatView a, ConstMatView b) {
  if (c.row_contiguous() && c.row_stride() == static_cast<std::ptrdiff_t>(c.cols())) {
    std::fill(c.data(), c.data() + c.rows() * c.cols(), Elem{0});
    classical_product(f, a, b, c.data());
    return;
  }
  std::vector<Elem> tmp(c.rows() * c.cols(), 0);
  classical_product(f, a, b, tmp.data());
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) c(i, j) = tmp[i * c.cols() + j];
}

Mat sum_of(const Field& f, ConstMatView a, ConstMatView b) {
  Mat r(f, a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = f.add(a(i, j), b(i, j));
  return r;
}

Mat diff_of(const Field& f, ConstMatView a, ConstMatView b) {
  Mat r(f, a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = f.sub(a(i, j), b(i, j));
  return r;
}

// c = a·b, overwriting c.
void strassen_into(const Field& f, MatView c, ConstMatView a, ConstMatView b, std::size_t thr) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (std::min({m, k, n}) < std::max<std::size_t>(thr, 2)) {
    classical_into(f, c, a, b);
    return;
  }
  const std::size_t mh = m / 2, kh = k / 2, nh = n / 2;
  auto A11 = a.block(0, 0, mh, kh), A12 = a.block(0, kh, mh, kh);
  auto A21 = a.block(mh, 0, mh, kh), A22 = a.block(mh, kh, mh, kh);
  auto B11 = b.block(0, 0, kh, nh), B12 = b.block(0, nh, kh, nh);
  auto B21 = b.block(kh, 0, kh, nh), B22 = b.block(kh, nh, kh, nh);

  auto product = [&](const Mat& x, const Mat& y) {
    Mat r(f, x.rows(), y.cols());
    strassen_into(f, r.view(), x.view(), y.view(), thr);
    return r;
  };
  auto product_v = [&](ConstMatView x, ConstMatView y) {
    Mat r(f, x.rows(), y.cols());
    strassen_into(f, r.view(), x, y, thr);
    return r;
  };

  Mat M1 = product(sum_of(f, A11, A22), sum_of(f, B11, B22));
  Mat M2 = product_v(sum_of(f, A21, A22).view(), B11);
  Mat M3 = product_v(A11, diff_of(f, B12, B22).view());
  Mat M4 = product_v(A22, diff_of(f, B21, B11).view());
  Mat M5 = product_v(sum_of(f, A11, A12).view(), B22);
  Mat M6 = product(diff_of(f, A21, A11), sum_of(f, B11, B12));
  Mat M7 = product(diff_of(f, A12, A22), sum_of(f, B21, B22));

  for (std::size_t i = 0; i < mh; ++i) {
    for (std::size_t j = 0; j < nh; ++j) {
      c(i, j) = f.add(f.sub(f.add(M1(i, j), M4(i, j)), M5(i, j)), M7(i, j));
      c(i, j + nh) = f.add(M3(i, j), M5(i, j));
      c(i + mh, j) = f.add(M2(i, j), M4(i, j));
      c(i + mh, j + nh) = f.add(f.add(f.sub(M1(i, j), M2(i, j)), M3(i, j)), M6(i, j));
    }
  }
  // Peel odd dimensions.
  if (k % 2) {
    multiply_accumulate(f, c.block(0, 0, 2 * mh, 2 * nh), a.block(0, k - 1, 2 * mh, 1),
                        b.block(k - 1, 0, 1, 2 * nh), false);
  }
  if (n % 2) classical_into(f, c.block(0, n - 1, m, 1), a, b.block(0, n - 1, k, 1));
  if (m % 2) classical_into(f, c.block(m - 1, 0, 1, 2 * nh), a.block(m - 1, 0, 1, k), b.block(0, 0, k, 2 * nh));
}

std::vector<Elem> diagonal_inverses(const Field& f, const TriView& t) {
  std::vector<Elem> d(t.size(), 1);
  if (t.diag == Diag::Unit) return d;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Elem v = t.m(i, i);
    if (v == 0) throw SingularMatrix("triangular solve: zero on the diagonal");
    d[i] = f.inv(v);
  }
  return d;
}

void trsm_right_base(const Field& f, const TriView& t, MatView x) {
  const std::size_t n = t.size();
  const auto dinv = diagonal_inverses(f, t);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    if (t.tri == Triangle::Upper) {
      for (std::size_t j = 0; j < n; ++j) {
        Elem v = x(r, j);
        if (v == 0) continue;
        v = f.mul(v, dinv[j]);
        x(r, j) = v;
        for (std::size_t j2 = j + 1; j2 < n; ++j2) x(r, j2) = f.sub(x(r, j2), f.mul(v, t.m(j, j2)));
      }
    } else {
      for (std::size_t j = n; j-- > 0;) {
        Elem v = x(r, j);
        if (v == 0) continue;
        v = f.mul(v, dinv[j]);
        x(r, j) = v;
        for (std::size_t j2 = 0; j2 < j; ++j2) x(r, j2) = f.sub(x(r, j2), f.mul(v, t.m(j, j2)));
      }
    }
  }
}

void trsm_left_base(const Field& f, const TriView& t, MatView x) {
  const std::size_t n = t.size();
  const auto dinv = diagonal_inverses(f, t);
  const std::size_t c = x.cols();
  auto eliminate = [&](std::size_t i, std::size_t i2) {
    const Elem coef = t.m(i, i2);
    if (coef == 0) return;
    for (std::size_t j = 0; j < c; ++j) {
      const Elem v = x(i2, j);
      if (v != 0) x(i, j) = f.sub(x(i, j), f.mul(coef, v));
    }
  };
  auto scale = [&](std::size_t i) {
    if (dinv[i] == 1) return;
    for (std::size_t j = 0; j < c; ++j) x(i, j) = f.mul(x(i, j), dinv[i]);
  };
  if (t.tri == Triangle::Lower) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t i2 = 0; i2 < i; ++i2) eliminate(i, i2);
      scale(i);
    }
  } else {
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t i2 = i + 1; i2 < n; ++i2) eliminate(i, i2);
      scale(i);
    }
  }
}

void trsm_right(const Field& f, const TriView& t, MatView x) {
  const std::size_t n = t.size();
  if (n == 0 || x.rows() == 0) return;
  if (n <= kTrsmLeaf) {
    trsm_right_base(f, t, x);
    return;
  }
  const std::size_t n1 = n / 2, n2 = n - n1, r = x.rows();
  auto x1 = x.block(0, 0, r, n1);
  auto x2 = x.block(0, n1, r, n2);
  if (t.tri == Triangle::Upper) {
    trsm_right(f, t.block(0, n1), x1);
    multiply_accumulate(f, x2, x1, t.m.block(0, n1, n1, n2));
    trsm_right(f, t.block(n1, n2), x2);
  } else {
    trsm_right(f, t.block(n1, n2), x2);
    multiply_accumulate(f, x1, x2, t.m.block(n1, 0, n2, n1));
    trsm_right(f, t.block(0, n1), x1);
  }
}

void trsm_left(const Field& f, const TriView& t, MatView x) {
  const std::size_t n = t.size();
  if (n == 0 || x.cols() == 0) return;
  if (n <= kTrsmLeaf) {
    trsm_left_base(f, t, x);
    return;
  }
  const std::size_t n1 = n / 2, n2 = n - n1, c = x.cols();
  auto x1 = x.block(0, 0, n1, c);
  auto x2 = x.block(n1, 0, n2, c);
  if (t.tri == Triangle::Lower) {
    trsm_left(f, t.block(0, n1), x1);
    multiply_accumulate(f, x2, t.m.block(n1, 0, n2, n1), x1);
    trsm_left(f, t.block(n1, n2), x2);
  } else {
    trsm_left(f, t.block(n1, n2), x2);
    multiply_accumulate(f, x1, t.m.block(0, n1, n1, n2), x2);
    trsm_left(f, t.block(0, n1), x1);
  }
}

}  // namespace

std::size_t strassen_threshold() { return g_strassen_threshold.load(std::memory_order_relaxed); }
void set_strassen_threshold(std::size_t t) { g_strassen_threshold.store(t, std::memory_order_relaxed); }

Mat Mat::identity(const Field& f, std::size_t n) {
  Mat m(f, n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

Mat Mat::random(const Field& f, std::size_t rows, std::size_t cols, Rng& rng) {
  Mat m(f, rows, cols);
  for (auto& v : m.storage()) v = f.sample(rng);
  return m;
}

Mat Mat::from_rows(const Field& f, std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  Mat m(f, r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw std::invalid_argument("from_rows: ragged rows");
    std::size_t j = 0;
    for (auto v : row) m(i, j++) = f.from_int(v);
    ++i;
  }
  return m;
}

Mat Mat::from_view(const Field& f, ConstMatView v) {
  Mat m(f, v.rows(), v.cols());
  copy_into(m.view(), v);
  return m;
}

ColSelection::ColSelection(std::vector<std::size_t> idx) : idx_(std::move(idx)) {
  for (std::size_t t = 1; t < idx_.size(); ++t)
    if (idx_[t] <= idx_[t - 1]) throw std::invalid_argument("column selection must be strictly increasing");
}

ColSelection ColSelection::all(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t j = 0; j < n; ++j) idx[j] = j;
  return ColSelection(std::move(idx));
}

PackedLU::PackedLU(Mat packed) : m_(std::move(packed)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("packed LU must be square");
}

PackedLU PackedLU::pack(const Mat& L, const Mat& U) {
  const std::size_t n = L.rows();
  if (L.cols() != n || U.rows() != n || U.cols() != n) throw std::invalid_argument("pack: shape mismatch");
  Mat m(L.field(), n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = i > j ? L(i, j) : U(i, j);
  return PackedLU(std::move(m));
}

Mat PackedLU::lower() const { return materialize(field(), lower_view()); }
Mat PackedLU::upper() const { return materialize(field(), upper_view()); }

Mat multiply(const Mat& a, const Mat& b) {
  if (!(a.field() == b.field())) throw std::invalid_argument("multiply: operands over different fields");
  return multiply(a.field(), a.view(), b.view());
}

Mat multiply(const Field& f, ConstMatView a, ConstMatView b) {
  check_product_dims(a, b);
  Mat c(f, a.rows(), b.cols());
  strassen_into(f, c.view(), a, b, strassen_threshold());
  return c;
}

Mat multiply_classical(const Field& f, ConstMatView a, ConstMatView b) {
  check_product_dims(a, b);
  Mat c(f, a.rows(), b.cols());
  classical_product(f, a, b, c.storage().data());
  return c;
}

void multiply_accumulate(const Field& f, MatView c, ConstMatView a, ConstMatView b, bool subtract) {
  check_product_dims(a, b);
  if (c.rows() != a.rows() || c.cols() != b.cols()) throw std::invalid_argument("multiply_accumulate: shape mismatch");
  if (c.empty() || a.cols() == 0) return;
  Mat t = multiply(f, a, b);
  if (subtract)
    sub_into(f, c, t.view());
  else
    add_into(f, c, t.view());
}

void add_into(const Field& f, MatView c, ConstMatView a) {
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) c(i, j) = f.add(c(i, j), a(i, j));
}

void sub_into(const Field& f, MatView c, ConstMatView a) {
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) c(i, j) = f.sub(c(i, j), a(i, j));
}

void copy_into(MatView dst, ConstMatView src) {
  if (dst.rows() != src.rows() || dst.cols() != src.cols()) throw std::invalid_argument("copy: shape mismatch");
  for (std::size_t i = 0; i < dst.rows(); ++i)
    for (std::size_t j = 0; j < dst.cols(); ++j) dst(i, j) = src(i, j);
}

Mat transpose(const Mat& a) { return Mat::from_view(a.field(), a.view().transposed()); }

Mat add(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("add: shape mismatch");
  Mat r = a;
  add_into(a.field(), r.view(), b.view());
  return r;
}

Mat sub(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("sub: shape mismatch");
  Mat r = a;
  sub_into(a.field(), r.view(), b.view());
  return r;
}

void trsm(const Field& f, Side side, const TriView& t, MatView b) {
  if (t.m.rows() != t.m.cols()) throw std::invalid_argument("trsm: triangular operand must be square");
  if (side == Side::Right) {
    if (b.cols() != t.size()) throw std::invalid_argument("trsm: right operand dimension mismatch");
    trsm_right(f, t, b);
  } else {
    if (b.rows() != t.size()) throw std::invalid_argument("trsm: left operand dimension mismatch");
    trsm_left(f, t, b);
  }
}

ColSelection col_support(ConstMatView m) {
  std::vector<char> hit(m.cols(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0) hit[j] = 1;
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < m.cols(); ++j)
    if (hit[j]) idx.push_back(j);
  return ColSelection(std::move(idx));
}

std::size_t nnz(ConstMatView m) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) count += m(i, j) != 0;
  return count;
}

Mat select_cols(const Field& f, ConstMatView m, const ColSelection& j) {
  Mat r(f, m.rows(), j.size());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t t = 0; t < j.size(); ++t) r(i, t) = m(i, j[t]);
  return r;
}

Mat select_rows_cols(const Field& f, const TriView& t, const ColSelection& j) {
  Mat r(f, j.size(), j.size());
  for (std::size_t a = 0; a < j.size(); ++a)
    for (std::size_t b = 0; b < j.size(); ++b) r(a, b) = t.at(j[a], j[b]);
  return r;
}

Mat scatter_cols(const Mat& s, const ColSelection& j, std::size_t n) {
  if (j.size() != s.cols()) throw std::invalid_argument("scatter_cols: selection size mismatch");
  Mat r(s.field(), s.rows(), n);
  for (std::size_t t = 0; t < j.size(); ++t) {
    if (j[t] >= n) throw std::out_of_range("scatter_cols: index out of range");
    for (std::size_t i = 0; i < s.rows(); ++i) r(i, j[t]) = s(i, t);
  }
  return r;
}

bool is_upper_triangular(ConstMatView m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < std::min(i, m.cols()); ++j)
      if (m(i, j) != 0) return false;
  return true;
}

bool is_unit_lower_triangular(ConstMatView m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j)
      if (m(i, j) != (i == j ? 1u : 0u)) return false;
  return true;
}

Mat materialize(const Field& f, const TriView& t) {
  const std::size_t n = t.size();
  Mat r(f, n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) = t.at(i, j);
  return r;
}

}  // namespace ecla
