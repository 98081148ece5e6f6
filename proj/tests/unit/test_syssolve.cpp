#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "ecla/syssolve.hpp"

using namespace ecla;

namespace {

struct System {
  Mat l, u, a, b, y, x, r;  // A = L·U, Y·U = B, X·L = Y, R = U⁻¹
};

System make_system(const Field& f, std::size_t n, std::size_t m, Rng& rng) {
  Mat l = Mat::identity(f, n), u(f, n, n);
  for (std::size_t i = 0; i < n; ++i) {
    u(i, i) = f.sample_nonzero(rng);
    for (std::size_t j = i + 1; j < n; ++j) {
      u(i, j) = f.sample(rng);
      l(j, i) = f.sample(rng);
    }
  }
  Mat x = Mat::random(f, m, n, rng);
  Mat y = multiply(x, l);
  Mat b = multiply(y, u);
  // U⁻¹ by back-substitution column by column: solve U·r = e_j.
  Mat r(f, n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j + 1; i-- > 0;) {
      Elem s = i == j ? 1 : 0;
      for (std::size_t t = i + 1; t <= j; ++t) s = f.sub(s, f.mul(u(i, t), r(t, j)));
      r(i, j) = f.div(s, u(i, i));
    }
  Mat a = multiply(l, u);
  return {std::move(l), std::move(u), std::move(a), std::move(b), std::move(y), std::move(x), std::move(r)};
}

void corrupt(const Field& f, Mat& m, std::size_t k, Rng& rng) {
  std::set<std::pair<std::size_t, std::size_t>> pos;
  while (pos.size() < std::min(k, m.rows() * m.cols())) pos.insert({rng() % m.rows(), rng() % m.cols()});
  for (auto [i, j] : pos) m(i, j) = f.add(m(i, j), f.sample_nonzero(rng));
}

}  // namespace

TEST_CASE("shortcut threshold") {
  CHECK(small_rhs_shortcut(1, 4, 0.125));
  CHECK_FALSE(small_rhs_shortcut(2, 64, 0.125));  // 64^(1/8) ≈ 1.68
  CHECK(small_rhs_shortcut(2, 256, 0.125));
  CHECK_FALSE(small_rhs_shortcut(1, 4, -1));
}

TEST_CASE("zero right-hand side gives zero solution") {
  const Field f = Field::prime(65537);
  Rng rng(1);
  System s = make_system(f, 12, 3, rng);
  const Mat zero(f, 3, 12);
  PackedLU lu = PackedLU::pack(s.l, s.u);
  corrupt(f, lu.packed(), 10, rng);
  Mat y = Mat::random(f, 3, 12, rng), x = Mat::random(f, 3, 12, rng), r = s.r;
  corrupt(f, r, 5, rng);
  solve_small_rhs(f, s.a, zero, lu, y, x, 0.05, {.seed = 2});
  CHECK(x == zero);
  CHECK(y == zero);
  x = Mat::random(f, 3, 12, rng);
  PackedLU lu2 = PackedLU::pack(s.l, s.u);
  solve_large_rhs(f, s.a, zero, lu2, r, x, 0.05, {.seed = 3});
  CHECK(x == zero);
  CHECK(r == s.r);
}

TEST_CASE("GF(5) hand system") {
  const Field f5 = Field::prime(5);
  const Mat a = Mat::from_rows(f5, {{2, 1}, {4, 4}});
  const Mat b = Mat::from_rows(f5, {{1, 0}});
  for (double expo : {0.125, -1.0}) {
    PackedLU lu = PackedLU::pack(Mat::identity(f5, 2), Mat::from_rows(f5, {{2, 1}, {0, 2}}));
    Mat y(f5, 1, 2), x(f5, 1, 2);
    solve_small_rhs(f5, a, b, lu, y, x, 0.05, {.shortcut_exponent = expo});
    CHECK(x == Mat::from_rows(f5, {{1, 1}}));
    CHECK(multiply(x, a) == b);
  }
  PackedLU lu = PackedLU::pack(Mat::identity(f5, 2), Mat::from_rows(f5, {{2, 1}, {0, 2}}));
  Mat r(f5, 2, 2), x(f5, 1, 2);
  solve_large_rhs(f5, a, b, lu, r, x, 0.05);
  CHECK(x == Mat::from_rows(f5, {{1, 1}}));
  CHECK(multiply(r, lu.upper()) == Mat::identity(f5, 2));
}

TEST_CASE("small right-hand side suite n=64, m=8") {
  const Field f = Field::prime(65537);
  Rng rng(4);
  int exact = 0;
  for (int t = 0; t < 25; ++t) {
    System s = make_system(f, 64, 8, rng);
    PackedLU lu = PackedLU::pack(s.l, s.u);
    Mat y = s.y, x = s.x;
    corrupt(f, lu.packed(), 30, rng);
    corrupt(f, y, 20, rng);
    corrupt(f, x, 20, rng);
    const auto rep = solve_small_rhs(f, s.a, s.b, lu, y, x, 0.05, {.seed = rng()});
    exact += x == s.x && y == s.y && lu.lower() == s.l && lu.upper() == s.u;
    CHECK(rep.epsilon_spent <= 0.05 + 1e-12);
    CHECK(rep.corrected_count() == 70);
    std::set<std::string> targets;
    for (const auto& c : rep.corrections) targets.insert(c.target);
    CHECK(targets == std::set<std::string>{"L", "U", "Y", "X"});
  }
  CHECK(exact == 25);
}

TEST_CASE("small right-hand side with the direct shortcut") {
  const Field f = Field::prime(65537);
  Rng rng(5);
  System s = make_system(f, 64, 1, rng);
  PackedLU lu = PackedLU::pack(s.l, s.u);
  Mat y = s.y, x = s.x;
  corrupt(f, lu.packed(), 9, rng);
  corrupt(f, y, 4, rng);
  corrupt(f, x, 4, rng);
  const auto rep = solve_small_rhs(f, s.a, s.b, lu, y, x, 0.05, {.seed = 6});
  CHECK(x == s.x);
  CHECK(y == s.y);
  CHECK(rep.corrected_count() == 17);
  CHECK_FALSE(rep.notes.empty());
}

TEST_CASE("large right-hand side suite n=32, m=256") {
  const Field f = Field::prime(65537);
  Rng rng(7);
  int exact = 0;
  for (int t = 0; t < 25; ++t) {
    System s = make_system(f, 32, 256, rng);
    PackedLU lu = PackedLU::pack(s.l, s.u);
    Mat r = s.r, x = s.x;
    corrupt(f, lu.packed(), 20, rng);
    corrupt(f, r, 20, rng);
    corrupt(f, x, 50, rng);
    const auto rep = solve_large_rhs(f, s.a, s.b, lu, r, x, 0.05, {.seed = rng()});
    exact += x == s.x && r == s.r;
    CHECK(multiply(x, s.a) == s.b);
    CHECK(rep.corrected_count() == 90);
    CHECK(rep.epsilon_spent <= 0.05 + 1e-12);
  }
  CHECK(exact == 25);
}

TEST_CASE("triangular inverse examples") {
  const Field f7 = Field::prime(7);
  const Mat u = Mat::from_rows(f7, {{1, 2}, {0, 3}});
  Mat r = Mat::from_rows(f7, {{1, 0}, {0, 5}});
  const auto rep = tr_inv_ec(f7, r.view(), {u.view(), Triangle::Upper, Diag::NonUnit}, {});
  CHECK(r == Mat::from_rows(f7, {{1, 4}, {0, 5}}));
  CHECK(multiply(u, r) == Mat::identity(f7, 2));
  CHECK(rep.corrected_count() == 1);

  Mat ok = Mat::from_rows(f7, {{1, 4}, {0, 5}});
  CHECK(tr_inv_ec(f7, ok.view(), {u.view(), Triangle::Upper, Diag::NonUnit}, {}).corrections.empty());
}

TEST_CASE("triangular inverse suite and identity-blackbox oracle") {
  Rng rng(8);
  for (const Field& f : {Field::prime(65537), Field::prime(2), Field::prime(7)})
    for (std::size_t k : {1, 16, 200}) {
      for (int t = 0; t < 6; ++t) {
        const std::size_t n = f.cardinality() == 65537 ? 64 : 32;
        System s = make_system(f, n, 1, rng);
        Mat r = s.r;
        corrupt(f, r, k, rng);
        Mat oracle = r;
        const std::uint64_t seed = rng();
        const TriView uv{s.u.view(), Triangle::Upper, Diag::NonUnit};
        tr_inv_ec(f, r.view(), uv, {.seed = seed});
        CHECK(r == s.r);
        const Mat id = Mat::identity(f, n);
        trsm_ec_upper_right(f, oracle.view(), BlackboxRHS::dense(id.view()), uv, {.seed = seed});
        CHECK(oracle == r);
      }
    }
}
