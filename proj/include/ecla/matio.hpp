// Matrix text format:
//
//   field <p> <nu>
//   dense <m> <n>            followed by m whitespace-separated rows, or
//   sparse <m> <n> <k>       followed by k lines "<row> <col> <value>" (0-indexed)
//
// Extension elements are written as comma-separated coefficients c0,c1,...
#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "ecla/mat.hpp"

namespace ecla {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MatLayout { Auto, Dense, Sparse };

void write_matrix(std::ostream& out, const Mat& m, MatLayout layout = MatLayout::Auto);
Mat read_matrix(std::istream& in);

void save_matrix(const std::filesystem::path& path, const Mat& m, MatLayout layout = MatLayout::Auto);
Mat load_matrix(const std::filesystem::path& path);

}  // namespace ecla
