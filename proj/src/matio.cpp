#include "ecla/matio.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace ecla {

namespace {

template <class T>
T expect(std::istream& in, const char* what) {
  T v{};
  if (!(in >> v)) throw FormatError(std::string("matrix file: expected ") + what);
  return v;
}

}  // namespace

void write_matrix(std::ostream& out, const Mat& m, MatLayout layout) {
  const Field& f = m.field();
  const std::size_t count = nnz(m.view());
  if (layout == MatLayout::Auto) layout = count * 3 < m.rows() * m.cols() ? MatLayout::Sparse : MatLayout::Dense;
  out << "field " << f.characteristic() << ' ' << f.degree() << '\n';
  if (layout == MatLayout::Dense) {
    out << "dense " << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if (j) out << ' ';
        out << f.format(m(i, j));
      }
      out << '\n';
    }
    return;
  }
  out << "sparse " << m.rows() << ' ' << m.cols() << ' ' << count << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0) out << i << ' ' << j << ' ' << f.format(m(i, j)) << '\n';
}

namespace {

Mat read_matrix_impl(std::istream& in) {
  if (expect<std::string>(in, "'field'") != "field") throw FormatError("matrix file: missing field header");
  const auto p = expect<std::uint64_t>(in, "characteristic");
  const auto nu = expect<unsigned>(in, "extension degree");
  const Field base = Field::prime(p);
  const Field f = nu == 1 ? base : Field::extension(base, nu);

  const auto kind = expect<std::string>(in, "'dense' or 'sparse'");
  const auto rows = expect<std::size_t>(in, "row count");
  const auto cols = expect<std::size_t>(in, "column count");
  Mat m(f, rows, cols);
  if (kind == "dense") {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = f.parse(expect<std::string>(in, "matrix entry"));
  } else if (kind == "sparse") {
    const auto k = expect<std::size_t>(in, "entry count");
    for (std::size_t t = 0; t < k; ++t) {
      const auto i = expect<std::size_t>(in, "row index");
      const auto j = expect<std::size_t>(in, "column index");
      if (i >= rows || j >= cols) throw FormatError("matrix file: sparse index out of range");
      m(i, j) = f.parse(expect<std::string>(in, "matrix entry"));
    }
  } else {
    throw FormatError("matrix file: unknown layout '" + kind + "'");
  }
  return m;
}

}  // namespace

Mat read_matrix(std::istream& in) {
  try {
    return read_matrix_impl(in);
  } catch (const FieldError& e) {
    throw FormatError(std::string("matrix file: ") + e.what());
  }
}

void save_matrix(const std::filesystem::path& path, const Mat& m, MatLayout layout) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  write_matrix(out, m, layout);
}

Mat load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path.string());
  return read_matrix(in);
}

}  // namespace ecla
