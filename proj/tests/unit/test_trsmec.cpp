#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "ecla/trsmec.hpp"

using namespace ecla;

namespace {

Mat random_triangular(const Field& f, std::size_t n, Triangle tri, Rng& rng) {
  Mat t(f, n, n);
  for (std::size_t i = 0; i < n; ++i) {
    t(i, i) = f.sample_nonzero(rng);
    for (std::size_t j = i + 1; j < n; ++j) (tri == Triangle::Upper ? t(i, j) : t(j, i)) = f.sample(rng);
  }
  return t;
}

struct Instance {
  Mat t, truth, c, a, b, r;
  std::set<std::pair<std::size_t, std::size_t>> errors;
};

// Builds a solvable instance for the given variant, with H = C − A·B and k
// corrupted entries in R.
Instance make_instance(const Field& f, const std::string& variant, std::size_t m, std::size_t n, std::size_t ell,
                       std::size_t k, Rng& rng) {
  const bool right = variant.ends_with("right");
  const Triangle tri = variant.starts_with("upper") ? Triangle::Upper : Triangle::Lower;
  const std::size_t tn = right ? n : m;
  Instance in{random_triangular(f, tn, tri, rng), Mat::random(f, m, n, rng), Mat(f, m, n),
              Mat::random(f, m, ell, rng), Mat::random(f, ell, n, rng), Mat(f, m, n), {}};
  const Mat rt = right ? multiply(in.truth, in.t) : multiply(in.t, in.truth);
  in.c = add(rt, multiply(in.a, in.b));
  in.r = in.truth;
  while (in.errors.size() < k) in.errors.insert({rng() % m, rng() % n});
  for (auto [i, j] : in.errors) in.r(i, j) = f.add(in.r(i, j), f.sample_nonzero(rng));
  return in;
}

CorrectionReport run(const Field& f, const std::string& variant, Instance& in, const TrsmEcParams& p) {
  const auto h = BlackboxRHS::difference(in.c.view(), in.a.view(), in.b.view());
  const TriView t{in.t.view(), variant.starts_with("upper") ? Triangle::Upper : Triangle::Lower, Diag::NonUnit};
  if (variant == "upper_right") return trsm_ec_upper_right(f, in.r.view(), h, t, p);
  if (variant == "lower_right") return trsm_ec_lower_right(f, in.r.view(), h, t, p);
  if (variant == "lower_left") return trsm_ec_lower_left(f, in.r.view(), h, t, p);
  return trsm_ec_upper_left(f, in.r.view(), h, t, p);
}

std::size_t ceil_log2(std::size_t x) {
  std::size_t r = 0;
  while ((std::size_t{1} << r) < x) ++r;
  return r;
}

const std::vector<std::string> kVariants{"upper_right", "lower_right", "lower_left", "upper_left"};

}  // namespace

TEST_CASE("lambda formula") {
  CHECK(freivalds_lambda(65537, 256, std::ldexp(1.0, -20)) == 3);
  CHECK(freivalds_lambda(65537, 2, 0.5) == 1);
  // 3·32·5/0.25 = 1920 <= 2^11
  CHECK(freivalds_lambda(2, 32, 0.25) == 11);
  for (std::uint64_t q : {2ULL, 7ULL, 65537ULL, (1ULL << 61) - 1})
    for (std::size_t n : {1, 2, 64, 1000})
      for (double eps : {0.9, 0.05, 1e-9}) {
        const unsigned lam = freivalds_lambda(q, n, eps);
        const double nn = std::max<double>(n, 2);
        const double target = 3 * nn * std::log2(nn) / eps;
        CHECK(lam >= 1);
        CHECK(lam * std::log2(static_cast<double>(q)) >= std::log2(target) - 1e-9);
        if (lam > 1) CHECK((lam - 1) * std::log2(static_cast<double>(q)) < std::log2(target));
      }
}

TEST_CASE("iteration limit") {
  CHECK(iteration_limit(1, 1) == 3 * 1 + 2 * 1 + 8);
  CHECK(iteration_limit(32, 64) == 18 + 22 + 8);
}

TEST_CASE("correct input takes one pass") {
  const Field f = Field::prime(65537);
  Rng rng(1);
  for (const auto& v : kVariants) {
    Instance in = make_instance(f, v, 12, 20, 5, 0, rng);
    const auto rep = run(f, v, in, {.seed = 3});
    CHECK(in.r == in.truth);
    REQUIRE(rep.calls.size() == 1);
    CHECK(rep.calls[0].iterations == 1);
    CHECK(rep.calls[0].rounds == 0);
    CHECK(rep.corrections.empty());
  }
}

TEST_CASE("hand example over GF(7)") {
  const Field f = Field::prime(7);
  const Mat u = Mat::from_rows(f, {{1, 2}, {0, 3}});
  const Mat c = Mat::from_rows(f, {{1, 0}});
  Mat r = Mat::from_rows(f, {{1, 0}});
  const auto rep =
      trsm_ec_upper_right(f, r.view(), BlackboxRHS::dense(c.view()), {u.view(), Triangle::Upper, Diag::NonUnit}, {});
  CHECK(r == Mat::from_rows(f, {{1, 4}}));
  REQUIRE(rep.corrections.size() == 1);
  CHECK(rep.corrections[0] == Correction{"R", 0, 1, 0, 4});
  CHECK_FALSE(rep.calls[0].extended);

  // Mirrored: Uᵀ·Rᵀ = Cᵀ.
  const Mat ut = transpose(u), ct = transpose(c);
  Mat rt = Mat::from_rows(f, {{1}, {0}});
  trsm_ec_lower_left(f, rt.view(), BlackboxRHS::dense(ct.view()), {ut.view(), Triangle::Lower, Diag::NonUnit}, {});
  CHECK(rt == Mat::from_rows(f, {{1}, {4}}));
}

TEST_CASE("random suite n=64, m=32, ell=16") {
  const Field f = Field::prime(65537);
  Rng rng(7);
  for (std::size_t k : {1, 7, 50}) {
    int exact = 0;
    for (int t = 0; t < 50; ++t) {
      Instance in = make_instance(f, "upper_right", 32, 64, 16, k, rng);
      const auto rep = run(f, "upper_right", in, {.epsilon = 0.05, .seed = rng()});
      exact += in.r == in.truth;
      CHECK(rep.corrected_count() == k);
    }
    CHECK(exact == 50);
  }
}

TEST_CASE("all variants correct and report the injected positions") {
  const Field f = Field::prime(65537);
  Rng rng(8);
  for (const auto& v : kVariants)
    for (auto [m, n, ell, k] : std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>>{
             {64, 64, 0, 40}, {10, 33, 4, 9}, {33, 10, 7, 30}, {1, 50, 3, 5}, {50, 1, 2, 5}}) {
      Instance in = make_instance(f, v, m, n, ell, k, rng);
      const auto rep = run(f, v, in, {.seed = rng(), .target = "Q"});
      CHECK(in.r == in.truth);
      std::set<std::pair<std::size_t, std::size_t>> got;
      for (const auto& c : rep.corrections) {
        CHECK(c.target == "Q");
        CHECK(c.new_value == in.truth(c.row, c.col));
        got.insert({c.row, c.col});
      }
      CHECK(got == in.errors);
      CHECK(rep.calls[0].variant == v);
      CHECK(rep.epsilon_spent == doctest::Approx(0.05));
      const auto h = BlackboxRHS::difference(in.c.view(), in.a.view(), in.b.view());
      const TriView t{in.t.view(), v.starts_with("upper") ? Triangle::Upper : Triangle::Lower, Diag::NonUnit};
      CHECK(trsm_identity_holds(f, v.ends_with("right") ? Side::Right : Side::Left, in.r.view(), h, t));
    }
}

TEST_CASE("identity triangle recovers dense H") {
  const Field f = Field::prime(65537);
  Rng rng(9);
  const Mat id = Mat::identity(f, 6);
  const Mat c = Mat::random(f, 6, 5, rng), a = Mat::random(f, 6, 2, rng), b = Mat::random(f, 2, 5, rng);
  const auto h = BlackboxRHS::difference(c.view(), a.view(), b.view());
  Mat r = Mat::random(f, 6, 5, rng);
  trsm_ec_lower_left(f, r.view(), h, {id.view(), Triangle::Lower, Diag::NonUnit}, {.seed = 4});
  CHECK(r == h.evaluate(f));
}

TEST_CASE("implicit unit diagonal is honored") {
  const Field f = Field::prime(65537);
  Rng rng(10);
  Mat packed = Mat::random(f, 20, 20, rng);
  const TriView l{packed.view(), Triangle::Lower, Diag::Unit};
  const Mat truth = Mat::random(f, 20, 7, rng);
  const Mat c = multiply(materialize(f, l), truth);
  Mat r = truth;
  for (std::size_t i = 0; i < 20; i += 3) r(i, i % 7) = f.add(r(i, i % 7), 1);
  trsm_ec_lower_left(f, r.view(), BlackboxRHS::dense(c.view()), l, {.seed = 2});
  CHECK(r == truth);
}

TEST_CASE("field extension over GF(2)") {
  const Field f = Field::prime(2);
  Rng rng(11);
  for (int t = 0; t < 10; ++t) {
    Instance in = make_instance(f, "upper_right", 100, 40, 3, 30, rng);
    const auto rep = run(f, "upper_right", in, {.seed = rng()});
    REQUIRE(rep.calls.size() == 1);
    CHECK(rep.calls[0].extended);
    CHECK(rep.calls[0].field_degree == 7);
    CHECK(in.r == in.truth);
    for (const auto& c : rep.corrections) CHECK(c.new_value < 2);
  }
}

TEST_CASE("iteration count stays within the logarithmic bound") {
  Rng rng(12);
  for (const Field& f : {Field::prime(65537), Field::prime(7)})
    for (const auto& v : kVariants)
      for (std::size_t k : {1, 3, 17, 100, 600}) {
        const std::size_t m = 30 + rng() % 40, n = 30 + rng() % 40;
        Instance in = make_instance(f, v, m, n, 8, std::min(k, m * n), rng);
        const auto rep = run(f, v, in, {.seed = rng(), .audit = true});
        REQUIRE(in.r == in.truth);
        const auto& st = rep.calls[0];
        if (st.freivalds_misses > 0) continue;
        const std::size_t bound = ceil_log2(std::max<std::size_t>(st.initial_columns, 1)) +
                                  ceil_log2(std::max<std::size_t>(in.errors.size(), 1)) + 1;
        CHECK(st.rounds <= bound);
        CHECK(st.iterations == st.rounds + 1);
        CHECK(st.iterations <= iteration_limit(m, n));
      }
}

TEST_CASE("failure rate at epsilon 0.25") {
  const Field f = Field::prime(2);
  Rng rng(13);
  int failures = 0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    Instance in = make_instance(f, "upper_right", 4, 32, 2, 1 + rng() % 40, rng);
    try {
      run(f, "upper_right", in, {.epsilon = 0.25, .seed = rng()});
      failures += !(in.r == in.truth);
    } catch (const MonteCarloAbort&) {
      ++failures;
    }
  }
  CHECK(failures <= trials * (0.25 + 3 * std::sqrt(0.25 * 0.75 / trials)));
}

TEST_CASE("tiny projection height can fail but never silently claims the identity") {
  const Field f = Field::prime(2);
  Rng rng(14);
  int aborted = 0, wrong = 0;
  for (int t = 0; t < 200; ++t) {
    Instance in = make_instance(f, "upper_right", 1, 8, 0, 3, rng);
    try {
      run(f, "upper_right", in, {.epsilon = 0.9, .seed = rng(), .lambda = 1u});
      if (!(in.r == in.truth)) {
        ++wrong;
        const auto h = BlackboxRHS::difference(in.c.view(), in.a.view(), in.b.view());
        CHECK_FALSE(trsm_identity_holds(f, Side::Right, in.r.view(), h, {in.t.view(), Triangle::Upper, Diag::NonUnit}));
      }
    } catch (const MonteCarloAbort&) {
      ++aborted;
    }
  }
  CHECK(aborted + wrong > 0);
}

TEST_CASE("audit counts missed columns") {
  Rng rng(16);
  const Field f65537 = Field::prime(65537);
  for (int t = 0; t < 20; ++t) {
    Instance in = make_instance(f65537, "lower_left", 20, 25, 3, 1 + rng() % 60, rng);
    const auto rep = run(f65537, "lower_left", in, {.seed = rng(), .audit = true});
    CHECK(rep.calls[0].freivalds_misses == 0);
  }
  // One projection row over GF(2) misses an erroneous column half the time.
  const Field f2 = Field::prime(2);
  std::size_t misses = 0;
  for (int t = 0; t < 50; ++t) {
    Instance in = make_instance(f2, "upper_right", 1, 16, 0, 4, rng);
    try {
      misses += run(f2, "upper_right", in, {.epsilon = 0.9, .seed = rng(), .lambda = 1u, .audit = true})
                    .calls[0]
                    .freivalds_misses;
    } catch (const MonteCarloAbort&) {
    }
  }
  CHECK(misses > 0);
}

TEST_CASE("empty dimensions") {
  const Field f = Field::prime(7);
  Mat r(f, 0, 5), c(f, 0, 5);
  const Mat u = Mat::identity(f, 5);
  const auto rep = trsm_ec_upper_right(f, r.view(), BlackboxRHS::dense(c.view()), {u.view()}, {});
  CHECK(rep.corrections.empty());
  Mat r2(f, 3, 0), c2(f, 3, 0);
  const Mat u0(f, 0, 0);
  CHECK_NOTHROW(trsm_ec_upper_right(f, r2.view(), BlackboxRHS::dense(c2.view()), {u0.view()}, {}));
}

TEST_CASE("wrong triangle kind is rejected") {
  const Field f = Field::prime(7);
  const Mat u = Mat::identity(f, 3);
  Mat r(f, 2, 3), c(f, 2, 3);
  CHECK_THROWS(trsm_ec_upper_right(f, r.view(), BlackboxRHS::dense(c.view()), {u.view(), Triangle::Lower}, {}));
}

TEST_CASE("runs are reproducible from the seed") {
  const Field f = Field::prime(65537);
  Rng rng(15);
  Instance a = make_instance(f, "lower_right", 20, 30, 4, 25, rng);
  Instance b = a;
  const auto ra = run(f, "lower_right", a, {.seed = 99});
  const auto rb = run(f, "lower_right", b, {.seed = 99});
  CHECK(ra.calls == rb.calls);
  CHECK(ra.corrections == rb.corrections);
}
