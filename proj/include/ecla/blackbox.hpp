// Unevaluated right-hand sides H = [C] ± A·B.
#pragma once

#include <cstddef>
#include <optional>

#include "ecla/ff.hpp"
#include "ecla/mat.hpp"

namespace ecla {

/// V·M (or V·M·P when `cols` is given) for the Vandermonde V = (θ^{ir}),
/// 0 <= i < nrows, computed row by row with running powers; V is never formed.
/// Rows of M that are zero on the selected columns are skipped.
Mat vandermonde_apply(const Field& f, const PowTable& tab, std::size_t nrows, ConstMatView m,
                      const ColSelection* cols = nullptr);

/// The explicit nrows×m Vandermonde matrix. Test oracle only.
Mat vandermonde_matrix(const Field& f, const PowTable& tab, std::size_t nrows, std::size_t m);

/// H = base + sign·A·B where base is absent, a dense C, or the identity, and
/// the product term is optional. Holds views only; the operands must outlive it.
class BlackboxRHS {
 public:
  enum class Base { Zero, Dense, Identity };

  /// H = C
  static BlackboxRHS dense(ConstMatView c);
  /// H = C − A·B
  static BlackboxRHS difference(ConstMatView c, ConstMatView a, ConstMatView b);
  /// H = A·B
  static BlackboxRHS product(ConstMatView a, ConstMatView b);
  /// H = I (n×n)
  static BlackboxRHS identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  /// Inner dimension of the product term; zero when there is none.
  std::size_t inner() const { return has_product_ ? a_.cols() : 0; }
  Base base() const { return base_; }
  bool has_product() const { return has_product_; }

  /// Hᵀ, expressed over transposed views of the same operands.
  BlackboxRHS transposed() const;

  /// W·H = W·C ∓ (W·A)·B.
  Mat project_left(const Field& f, ConstMatView w) const;
  /// W·H·P for an arbitrary dense W.
  Mat project_left_selected(const Field& f, ConstMatView w, const ColSelection& j) const;
  /// V·H·P with the Vandermonde V of `nrows` rows on the powers in `tab`.
  Mat project_vandermonde_selected(const Field& f, const PowTable& tab, std::size_t nrows,
                                   const ColSelection& j) const;
  /// Dense H. Used by verification and tests.
  Mat evaluate(const Field& f) const;

 private:
  BlackboxRHS() = default;
  void apply_product(const Field& f, Mat& out, const Mat& left_times_a, const ColSelection* j) const;

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Base base_ = Base::Zero;
  ConstMatView c_;
  bool has_product_ = false;
  bool subtract_ = true;
  ConstMatView a_;
  ConstMatView b_;
};

}  // namespace ecla
