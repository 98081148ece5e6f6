// Dense matrices over a Field, strided views, triangular views, and the
// kernels the correction algorithms are built from.
#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "ecla/ff.hpp"

namespace ecla {

class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Strided rectangular window over element storage. Views never own memory;
/// writes through a MatView alias the parent matrix.
template <class T>
class BasicView {
 public:
  BasicView() = default;
  BasicView(T* data, std::size_t rows, std::size_t cols, std::ptrdiff_t row_stride, std::ptrdiff_t col_stride)
      : data_(data), rows_(rows), cols_(cols), rs_(row_stride), cs_(col_stride) {}

  // MatView -> ConstMatView
  template <class U, class = std::enable_if_t<std::is_same_v<T, const U>>>
  BasicView(const BasicView<U>& o)  // NOLINT(google-explicit-constructor)
      : data_(o.data()), rows_(o.rows()), cols_(o.cols()), rs_(o.row_stride()), cs_(o.col_stride()) {}

  T& operator()(std::size_t i, std::size_t j) const {
    return data_[static_cast<std::ptrdiff_t>(i) * rs_ + static_cast<std::ptrdiff_t>(j) * cs_];
  }
  T* row_ptr(std::size_t i) const { return data_ + static_cast<std::ptrdiff_t>(i) * rs_; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::ptrdiff_t row_stride() const { return rs_; }
  std::ptrdiff_t col_stride() const { return cs_; }
  T* data() const { return data_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }
  bool row_contiguous() const { return cs_ == 1 || cols_ <= 1; }
  bool col_contiguous() const { return rs_ == 1 || rows_ <= 1; }

  BasicView block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw std::out_of_range("view block out of bounds");
    if (nr == 0 || nc == 0) return BasicView(data_, nr, nc, rs_, cs_);
    return BasicView(&(*this)(r0, c0), nr, nc, rs_, cs_);
  }
  BasicView transposed() const { return BasicView(data_, cols_, rows_, cs_, rs_); }

 private:
  T* data_ = nullptr;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::ptrdiff_t rs_ = 0;
  std::ptrdiff_t cs_ = 1;
};

using MatView = BasicView<Elem>;
using ConstMatView = BasicView<const Elem>;

/// Owning row-major matrix.
class Mat {
 public:
  Mat(Field field, std::size_t rows, std::size_t cols)
      : field_(std::move(field)), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  static Mat identity(const Field& f, std::size_t n);
  static Mat random(const Field& f, std::size_t rows, std::size_t cols, Rng& rng);
  /// Entries are reduced into the prime subfield.
  static Mat from_rows(const Field& f, std::initializer_list<std::initializer_list<std::int64_t>> rows);
  static Mat from_view(const Field& f, ConstMatView v);

  const Field& field() const { return field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Elem& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  Elem operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  MatView view() { return MatView(data_.data(), rows_, cols_, static_cast<std::ptrdiff_t>(cols_), 1); }
  ConstMatView view() const {
    return ConstMatView(data_.data(), rows_, cols_, static_cast<std::ptrdiff_t>(cols_), 1);
  }
  MatView block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) {
    return view().block(r0, c0, nr, nc);
  }
  ConstMatView block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    return view().block(r0, c0, nr, nc);
  }

  std::vector<Elem>& storage() { return data_; }
  const std::vector<Elem>& storage() const { return data_; }

  /// Re-tag the storage with another field (used to move between a prime
  /// field and an extension, whose element encodings coincide on the subfield).
  void rebind(const Field& f) { field_ = f; }

  bool operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && field_ == o.field_ && data_ == o.data_;
  }

 private:
  Field field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Elem> data_;
};

enum class Triangle { Upper, Lower };
enum class Diag { NonUnit, Unit };
enum class Side { Left, Right };

/// A square view read as a triangular matrix. Entries on the other side of the
/// diagonal are ignored (read as zero), and a Unit diagonal reads as one
/// whatever is stored there, so a packed L\U buffer yields both factors.
struct TriView {
  ConstMatView m;
  Triangle tri = Triangle::Upper;
  Diag diag = Diag::NonUnit;

  std::size_t size() const { return m.rows(); }
  Elem at(std::size_t i, std::size_t j) const {
    if (i == j) return diag == Diag::Unit ? Elem{1} : m(i, i);
    if (tri == Triangle::Upper ? i < j : i > j) return m(i, j);
    return 0;
  }
  TriView block(std::size_t o, std::size_t n) const { return {m.block(o, o, n, n), tri, diag}; }
  TriView transposed() const {
    return {m.transposed(), tri == Triangle::Upper ? Triangle::Lower : Triangle::Upper, diag};
  }
};

/// Strictly increasing column indices; acts as the selector [e_j1 ... e_jc].
class ColSelection {
 public:
  ColSelection() = default;
  explicit ColSelection(std::vector<std::size_t> idx);
  static ColSelection all(std::size_t n);

  std::size_t size() const { return idx_.size(); }
  bool empty() const { return idx_.empty(); }
  std::size_t operator[](std::size_t t) const { return idx_[t]; }
  const std::vector<std::size_t>& indices() const { return idx_; }
  auto begin() const { return idx_.begin(); }
  auto end() const { return idx_.end(); }
  bool operator==(const ColSelection&) const = default;

 private:
  std::vector<std::size_t> idx_;
};

/// Square buffer holding L strictly below the diagonal (unit diagonal implied)
/// and U on and above it.
class PackedLU {
 public:
  explicit PackedLU(Mat packed);
  static PackedLU pack(const Mat& L, const Mat& U);

  std::size_t size() const { return m_.rows(); }
  const Field& field() const { return m_.field(); }
  Mat& packed() { return m_; }
  const Mat& packed() const { return m_; }
  Mat lower() const;
  Mat upper() const;
  TriView lower_view() const { return {m_.view(), Triangle::Lower, Diag::Unit}; }
  TriView upper_view() const { return {m_.view(), Triangle::Upper, Diag::NonUnit}; }
  bool operator==(const PackedLU& o) const { return m_ == o.m_; }

 private:
  Mat m_;
};

// Strassen recursion is used while every dimension is at least this large.
std::size_t strassen_threshold();
void set_strassen_threshold(std::size_t t);

/// A·B. Uses Strassen (odd dimensions peeled) above the threshold.
Mat multiply(const Mat& a, const Mat& b);
Mat multiply(const Field& f, ConstMatView a, ConstMatView b);
/// Classical product, for oracle comparisons.
Mat multiply_classical(const Field& f, ConstMatView a, ConstMatView b);

/// c ← c − a·b, or c ← c + a·b when `subtract` is false.
void multiply_accumulate(const Field& f, MatView c, ConstMatView a, ConstMatView b, bool subtract = true);

void add_into(const Field& f, MatView c, ConstMatView a);  // c ← c + a
void sub_into(const Field& f, MatView c, ConstMatView a);  // c ← c − a
void copy_into(MatView dst, ConstMatView src);
Mat transpose(const Mat& a);
Mat add(const Mat& a, const Mat& b);
Mat sub(const Mat& a, const Mat& b);

/// In-place triangular solve: Right gives B ← B·T⁻¹, Left gives B ← T⁻¹·B.
/// Throws SingularMatrix on a zero diagonal entry of a non-unit T.
void trsm(const Field& f, Side side, const TriView& t, MatView b);

ColSelection col_support(ConstMatView m);
std::size_t nnz(ConstMatView m);

/// M·P: the columns J of M.
Mat select_cols(const Field& f, ConstMatView m, const ColSelection& j);
/// Pᵀ·T·P: principal submatrix on J, materialized with explicit diagonal.
Mat select_rows_cols(const Field& f, const TriView& t, const ColSelection& j);
/// S·Pᵀ: an m×n matrix with the columns of S at positions J.
Mat scatter_cols(const Mat& s, const ColSelection& j, std::size_t n);

bool is_upper_triangular(ConstMatView m);
bool is_unit_lower_triangular(ConstMatView m);
Mat materialize(const Field& f, const TriView& t);

}  // namespace ecla
