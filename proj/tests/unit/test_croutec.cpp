#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "ecla/croutec.hpp"

using namespace ecla;

namespace {

struct Grp {
  Mat l, u, a;
};

// A = L0·U0 with L0 unit lower and U0 upper with nonzero diagonal (m×r and r×n).
Grp make_grp(const Field& f, std::size_t m, std::size_t n, std::size_t r, Rng& rng) {
  Mat l(f, m, r), u(f, r, n);
  for (std::size_t j = 0; j < r; ++j) {
    l(j, j) = 1;
    for (std::size_t i = j + 1; i < m; ++i) l(i, j) = f.sample(rng);
    u(j, j) = f.sample_nonzero(rng);
    for (std::size_t c = j + 1; c < n; ++c) u(j, c) = f.sample(rng);
  }
  Mat a = multiply(l, u);
  return {std::move(l), std::move(u), std::move(a)};
}

// Adds nonzero noise at k distinct positions of the buffer.
std::set<std::pair<std::size_t, std::size_t>> corrupt(const Field& f, Mat& m, std::size_t k, Rng& rng) {
  std::set<std::pair<std::size_t, std::size_t>> pos;
  while (pos.size() < std::min(k, m.rows() * m.cols())) pos.insert({rng() % m.rows(), rng() % m.cols()});
  for (auto [i, j] : pos) m(i, j) = f.add(m(i, j), f.sample_nonzero(rng));
  return pos;
}

// Recursive Laplace-free determinant by Gaussian elimination over the field.
Elem det(const Field& f, Mat a) {
  const std::size_t n = a.rows();
  Elem d = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(c, j));
      d = f.neg(d);
    }
    d = f.mul(d, a(c, c));
    const Elem inv = f.inv(a(c, c));
    for (std::size_t r = c + 1; r < n; ++r) {
      const Elem t = f.mul(a(r, c), inv);
      for (std::size_t j = c; j < n; ++j) a(r, j) = f.sub(a(r, j), f.mul(t, a(c, j)));
    }
  }
  return d;
}

}  // namespace

TEST_CASE("reference Crout examples") {
  const Field f5 = Field::prime(5);
  const PackedLU lu = crout_reference(Mat::from_rows(f5, {{2, 1}, {4, 4}}));
  CHECK(lu.lower() == Mat::from_rows(f5, {{1, 0}, {2, 1}}));
  CHECK(lu.upper() == Mat::from_rows(f5, {{2, 1}, {0, 2}}));

  const Field f = Field::prime(65537);
  const PackedLU id = crout_reference(Mat::identity(f, 9));
  CHECK(id.lower() == Mat::identity(f, 9));
  CHECK(id.upper() == Mat::identity(f, 9));

  CHECK(crout_reference(Mat(f, 0, 0)).size() == 0);
  CHECK_THROWS_AS(crout_reference(Mat::from_rows(f5, {{0, 1}, {1, 0}})), GrpViolation);
  CHECK_THROWS_AS(crout_reference(Mat::from_rows(f5, {{1, 2}, {2, 4}})), GrpViolation);
}

TEST_CASE("reference Crout reproduces the generating factors") {
  Rng rng(1);
  for (const Field& f : {Field::prime(65537), Field::prime(2), Field::prime(7)})
    for (std::size_t n : {1, 2, 3, 17, 64, 128}) {
      const Grp g = make_grp(f, n, n, n, rng);
      for (std::size_t leaf : {1, 5, 32}) {
        const PackedLU lu = crout_reference(g.a, leaf);
        CHECK(lu.lower() == g.l);
        CHECK(lu.upper() == g.u);
      }
    }
}

TEST_CASE("generic rank profile oracle") {
  Rng rng(2);
  const Field f = Field::prime(7);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng() % 8;
    const Mat a = Mat::random(f, n, n, rng);
    bool all_minors = true;
    for (std::size_t k = 1; k <= n; ++k) all_minors &= det(f, Mat::from_view(f, a.block(0, 0, k, k))) != 0;
    if (all_minors) {
      CHECK(has_generic_rank_profile(a));
      CHECK_NOTHROW(crout_reference(a));
    } else {
      CHECK_THROWS_AS(crout_reference(a), GrpViolation);
    }
  }
}

TEST_CASE("crout_ec leaves correct factors untouched") {
  const Field f = Field::prime(65537);
  Rng rng(3);
  const Grp g = make_grp(f, 40, 40, 40, rng);
  PackedLU m = PackedLU::pack(g.l, g.u);
  const PackedLU before = m;
  const auto rep = crout_ec(f, m, g.a, 0.05, {.seed = 1});
  CHECK(m == before);
  CHECK(rep.corrections.empty());
  for (const auto& c : rep.calls) CHECK(c.iterations == 1);
}

TEST_CASE("crout_ec GF(5) example") {
  const Field f5 = Field::prime(5);
  const Mat a = Mat::from_rows(f5, {{2, 1}, {4, 4}});
  PackedLU m = PackedLU::pack(Mat::identity(f5, 2), Mat::from_rows(f5, {{2, 1}, {0, 2}}));
  const auto rep = crout_ec(f5, m, a, 0.05);
  CHECK(m.lower() == Mat::from_rows(f5, {{1, 0}, {2, 1}}));
  CHECK(m.upper() == Mat::from_rows(f5, {{2, 1}, {0, 2}}));
  REQUIRE(rep.corrections.size() == 1);
  CHECK(rep.corrections[0] == Correction{"L", 1, 0, 0, 2});
}

TEST_CASE("crout_ec random suite n=64") {
  const Field f = Field::prime(65537);
  Rng rng(4);
  for (std::size_t k : {1, 8, 64, 512}) {
    int exact = 0;
    for (int t = 0; t < 25; ++t) {
      const Grp g = make_grp(f, 64, 64, 64, rng);
      PackedLU m = PackedLU::pack(g.l, g.u);
      const auto pos = corrupt(f, m.packed(), k, rng);
      const auto rep = crout_ec(f, m, g.a, 0.05, {.seed = rng()});
      exact += m == crout_reference(g.a);
      CHECK(rep.corrected_count() == pos.size());
      std::set<std::pair<std::size_t, std::size_t>> got;
      for (const auto& c : rep.corrections) {
        got.insert({c.row, c.col});
        CHECK(c.target == (c.row > c.col ? "L" : "U"));
      }
      CHECK(got == pos);
      CHECK(rep.epsilon_spent <= 0.05 + 1e-12);
    }
    CHECK(exact == 25);
  }
}

TEST_CASE("crout_ec over small fields and leaf sizes") {
  Rng rng(5);
  for (const Field& f : {Field::prime(2), Field::prime(7), Field::extension(Field::prime(2), 6)})
    for (std::size_t leaf : {1, 4, 16}) {
      const Grp g = make_grp(f, 48, 48, 48, rng);
      PackedLU m = PackedLU::pack(g.l, g.u);
      corrupt(f, m.packed(), 60, rng);
      crout_ec(f, m, g.a, 0.05, {.seed = rng(), .leaf_size = leaf});
      CHECK(m.lower() == g.l);
      CHECK(m.upper() == g.u);
    }
}

TEST_CASE("extension inputs too small for the solve are rejected") {
  const Field f = Field::extension(Field::prime(2), 2);
  Rng rng(9);
  const Grp g = make_grp(f, 16, 16, 16, rng);
  PackedLU m = PackedLU::pack(g.l, g.u);
  corrupt(f, m.packed(), 10, rng);
  CHECK_THROWS_AS(crout_ec(f, m, g.a, 0.05), FieldError);
}

TEST_CASE("recursion steps write disjoint blocks and never read what they write") {
  const Field f = Field::prime(65537);
  Rng rng(6);
  for (std::size_t n : {1, 2, 7, 33}) {
    const Grp g = make_grp(f, n, n, n, rng);
    PackedLU m = PackedLU::pack(g.l, g.u);
    corrupt(f, m.packed(), n, rng);
    std::vector<CroutTraceEntry> trace;
    const double eps = 0.1;
    const auto rep = crout_ec(f, m, g.a, eps, {.seed = 2, .trace = &trace});
    CHECK(m.lower() == g.l);

    std::vector<int> cover(n * n, 0);
    double budget = 0;
    for (const auto& e : trace) {
      for (std::size_t i = 0; i < e.target.rows; ++i)
        for (std::size_t j = 0; j < e.target.cols; ++j) ++cover[(e.target.row + i) * n + e.target.col + j];
      for (const auto& r : e.reads) CHECK_FALSE(r.overlaps(e.target));
      budget += e.epsilon;
    }
    for (int c : cover) CHECK(c == 1);
    for (std::size_t a = 0; a < trace.size(); ++a)
      for (std::size_t b = a + 1; b < trace.size(); ++b)
        if (trace[a].depth == trace[b].depth) CHECK_FALSE(trace[a].target.overlaps(trace[b].target));
    CHECK(budget <= eps + 1e-12);
    CHECK(rep.epsilon_spent == doctest::Approx(budget));
  }
}

TEST_CASE("rect_ec") {
  const Field f5 = Field::prime(5);
  const Mat a = Mat::from_rows(f5, {{2, 1, 3}, {4, 4, 1}});
  Mat m = Mat::from_rows(f5, {{2, 1, 1}, {2, 2, 4}});
  rect_ec(f5, m, a, 0.05);
  // Forward substitution: L·U2 = A2 with L = [[1,0],[2,1]] gives U2 = [3, 1 - 2·3] = [3, 0].
  CHECK(m == Mat::from_rows(f5, {{2, 1, 3}, {2, 2, 0}}));

  const Field f = Field::prime(65537);
  Rng rng(7);
  for (int t = 0; t < 25; ++t) {
    const Grp g = make_grp(f, 32, 64, 32, rng);
    Mat buf = g.u;
    for (std::size_t i = 0; i < 32; ++i)
      for (std::size_t j = 0; j < i; ++j) buf(i, j) = g.l(i, j);
    const Mat truth = buf;
    corrupt(f, buf, 1 + rng() % 100, rng);
    const auto rep = rect_ec(f, buf, g.a, 0.05, {.seed = rng()});
    CHECK(buf == truth);
    CHECK(rep.epsilon_spent <= 0.05 + 1e-12);
  }

  // Square input is plain crout_ec.
  const Grp sq = make_grp(f, 10, 10, 10, rng);
  Mat buf = PackedLU::pack(sq.l, sq.u).packed();
  corrupt(f, buf, 5, rng);
  rect_ec(f, buf, sq.a, 0.05);
  CHECK(buf == PackedLU::pack(sq.l, sq.u).packed());
}

TEST_CASE("rank_deficient_ec") {
  const Field f5 = Field::prime(5);
  {
    Mat m(f5, 3, 4);
    m(1, 0) = 2;
    const auto res = rank_deficient_ec(f5, m, Mat(f5, 3, 4), 0.05);
    CHECK(res.rank == 0);
    CHECK(res.l.rows() == 3);
    CHECK(res.l.cols() == 0);
    CHECK(res.u.rows() == 0);
  }
  {
    Mat m = Mat::from_rows(f5, {{1, 0}, {0, 3}});
    const auto res = rank_deficient_ec(f5, m, Mat::from_rows(f5, {{1, 2}, {2, 4}}), 0.05);
    CHECK(res.rank == 1);
    CHECK(res.l == Mat::from_rows(f5, {{1}, {2}}));
    CHECK(res.u == Mat::from_rows(f5, {{1, 2}}));
    CHECK(res.report.rank == std::optional<std::size_t>(1));
  }

  const Field f = Field::prime(65537);
  Rng rng(8);
  for (auto [m, n] : std::vector<std::pair<std::size_t, std::size_t>>{{64, 96}, {40, 24}, {32, 32}})
    for (std::size_t r : {std::size_t{1}, std::min(m, n) / 2, std::min(m, n) - 1}) {
      for (int t = 0; t < 5; ++t) {
        const Grp g = make_grp(f, m, n, r, rng);
        if (m <= 40) CHECK(has_generic_rank_profile(g.a));
        Mat buf(f, m, n);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            if (i < r && j >= i) buf(i, j) = g.u(i, j);
            if (j < r && i > j) buf(i, j) = g.l(i, j);
          }
        corrupt(f, buf, 1 + rng() % 40, rng);
        const auto res = rank_deficient_ec(f, buf, g.a, 0.05, {.seed = rng()});
        CHECK(res.rank == r);
        CHECK(res.l == g.l);
        CHECK(res.u == g.u);
        CHECK(multiply(res.l, res.u) == g.a);
      }
    }
}
