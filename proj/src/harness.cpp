#include "ecla/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ecla/croutec.hpp"
#include "ecla/matio.hpp"
#include "ecla/syssolve.hpp"
#include "ecla/trsmec.hpp"

namespace ecla {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kWorkloads = {"lu", "rect", "rankdef", "solve-small", "solve-large", "trinv", "trsm"};
const std::vector<std::string> kVariants = {"upper_right", "lower_right", "lower_left", "upper_left"};

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t lim = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    const std::uint64_t v = rng();
    if (v < lim) return v % bound;
  }
}

Mat random_unit_lower(const Field& f, std::size_t rows, std::size_t cols, Rng& rng) {
  Mat l(f, rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < std::min(i + 1, cols); ++j) l(i, j) = i == j ? 1 : f.sample(rng);
  return l;
}

Mat random_upper(const Field& f, std::size_t rows, std::size_t cols, Rng& rng) {
  Mat u(f, rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = i; j < cols; ++j) u(i, j) = i == j ? f.sample_nonzero(rng) : f.sample(rng);
  return u;
}

enum class Shape { Full, StrictLower, Upper };

struct CandidateRegion {
  std::string name;
  Shape shape;
};

std::vector<CandidateRegion> regions(const std::string& w) {
  if (w == "lu" || w == "rect" || w == "rankdef") return {{"L", Shape::StrictLower}, {"U", Shape::Upper}};
  if (w == "solve-small")
    return {{"L", Shape::StrictLower}, {"U", Shape::Upper}, {"Y", Shape::Full}, {"X", Shape::Full}};
  if (w == "solve-large")
    return {{"L", Shape::StrictLower}, {"U", Shape::Upper}, {"R", Shape::Upper}, {"X", Shape::Full}};
  if (w == "trinv") return {{"R", Shape::Upper}};
  return {{"R", Shape::Full}};
}

bool legal(Shape s, std::size_t i, std::size_t j) {
  switch (s) {
    case Shape::Full: return true;
    case Shape::StrictLower: return i > j;
    case Shape::Upper: return i <= j;
  }
  return false;
}

std::size_t count_legal(Shape s, std::size_t rows, std::size_t cols) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (s == Shape::Full) c += cols;
    else if (s == Shape::StrictLower) c += std::min(i, cols);
    else c += i < cols ? cols - i : 0;
  }
  return c;
}

bool same(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a.storage() == b.storage();
}

Mat pack_factors(const Field& f, const Mat& l, const Mat& u, std::size_t rows, std::size_t cols) {
  Mat m(f, rows, cols);
  for (std::size_t i = 0; i < l.rows() && i < rows; ++i)
    for (std::size_t j = 0; j < std::min(i, l.cols()); ++j) m(i, j) = l(i, j);
  for (std::size_t i = 0; i < u.rows() && i < rows; ++i)
    for (std::size_t j = i; j < u.cols() && j < cols; ++j) m(i, j) = u(i, j);
  return m;
}

Mat extract_lower(const Field& f, const Mat& m, std::size_t rows, std::size_t cols) {
  Mat l(f, rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < std::min(i + 1, cols); ++j) l(i, j) = i == j ? 1 : m(i, j);
  return l;
}

Mat extract_upper(const Field& f, const Mat& m, std::size_t rows, std::size_t cols) {
  Mat u(f, rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = i; j < cols; ++j) u(i, j) = m(i, j);
  return u;
}

Mat inverse_upper(const Field& f, const Mat& u) {
  Mat r = Mat::identity(f, u.rows());
  trsm(f, Side::Right, TriView{u.view(), Triangle::Upper, Diag::NonUnit}, r.view());
  return r;
}

bool unit_lower_trapezoid(const Mat& l) {
  for (std::size_t i = 0; i < l.rows(); ++i)
    for (std::size_t j = 0; j < l.cols(); ++j) {
      if (i == j && l(i, j) != 1) return false;
      if (j > i && l(i, j) != 0) return false;
    }
  return true;
}

bool upper_trapezoid_nonsingular(const Mat& u) {
  for (std::size_t i = 0; i < u.rows(); ++i) {
    if (i >= u.cols() || u(i, i) == 0) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (u(i, j) != 0) return false;
  }
  return true;
}

std::pair<Triangle, Side> variant_kind(const std::string& v) {
  if (v == "upper_right") return {Triangle::Upper, Side::Right};
  if (v == "lower_right") return {Triangle::Lower, Side::Right};
  if (v == "lower_left") return {Triangle::Lower, Side::Left};
  if (v == "upper_left") return {Triangle::Upper, Side::Left};
  throw std::invalid_argument("unknown trsm variant: " + v);
}

const Mat& get(const MatSet& s, const std::string& name) {
  auto it = s.find(name);
  if (it == s.end()) throw std::invalid_argument("missing matrix " + name);
  return it->second;
}

template <class T>
T parse_value(const std::string& s, const std::string& key) {
  std::istringstream is(s);
  T v{};
  if (!(is >> v) || !is.eof()) throw std::invalid_argument("scenario: bad value for " + key + ": " + s);
  return v;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2;
}

}  // namespace

Field Scenario::field() const {
  const Field base = Field::prime(p);
  return nu == 1 ? base : Field::extension(base, nu);
}

Scenario Scenario::normalized() const {
  Scenario s = *this;
  if (std::find(kWorkloads.begin(), kWorkloads.end(), s.workload) == kWorkloads.end())
    throw std::invalid_argument("unknown workload: " + s.workload);
  if (s.n == 0) throw std::invalid_argument("n must be positive");
  if (!(s.epsilon > 0 && s.epsilon < 1)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (s.nu == 0) throw std::invalid_argument("extension degree must be positive");
  if (s.workload == "lu" || s.workload == "trinv") s.m = s.n;
  if (s.workload == "rect") {
    if (s.m == 0) s.m = std::max<std::size_t>(1, s.n / 2);
    if (s.m > s.n) throw std::invalid_argument("rect needs m <= n");
  }
  if (s.m == 0) s.m = s.n;
  if (s.workload == "rankdef") {
    if (s.rank == 0) s.rank = std::min(s.m, s.n) / 2;
    if (s.rank > std::min(s.m, s.n)) throw std::invalid_argument("rank exceeds min(m, n)");
  } else {
    s.rank = 0;
  }
  if (s.workload == "trsm") {
    if (std::find(kVariants.begin(), kVariants.end(), s.variant) == kVariants.end())
      throw std::invalid_argument("unknown trsm variant: " + s.variant);
  } else {
    s.ell = 0;
    s.variant = "upper_right";
  }
  return s;
}

std::string Scenario::serialize() const {
  std::ostringstream os;
  os << "workload=" << workload << '\n'
     << "p=" << p << '\n'
     << "nu=" << nu << '\n'
     << "n=" << n << '\n'
     << "m=" << m << '\n'
     << "rank=" << rank << '\n'
     << "ell=" << ell << '\n'
     << "variant=" << variant << '\n'
     << "errors=" << errors << '\n';
  char buf[32];
  const auto end = std::to_chars(buf, buf + sizeof buf, epsilon).ptr;
  os << "epsilon=" << std::string_view(buf, end - buf) << '\n' << "seed=" << seed << '\n';
  return os.str();
}

Scenario Scenario::parse(std::string_view text) {
  Scenario s;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("scenario: missing '=' in " + line);
    const std::string k = line.substr(0, eq), v = line.substr(eq + 1);
    if (k == "workload") s.workload = v;
    else if (k == "p") s.p = parse_value<std::uint64_t>(v, k);
    else if (k == "nu") s.nu = parse_value<unsigned>(v, k);
    else if (k == "n") s.n = parse_value<std::size_t>(v, k);
    else if (k == "m") s.m = parse_value<std::size_t>(v, k);
    else if (k == "rank") s.rank = parse_value<std::size_t>(v, k);
    else if (k == "ell") s.ell = parse_value<std::size_t>(v, k);
    else if (k == "variant") s.variant = v;
    else if (k == "errors") s.errors = parse_value<std::size_t>(v, k);
    else if (k == "epsilon") s.epsilon = parse_value<double>(v, k);
    else if (k == "seed") s.seed = parse_value<std::uint64_t>(v, k);
    else throw std::invalid_argument("scenario: unknown key " + k);
  }
  return s;
}

std::vector<std::string> candidate_names(const std::string& workload) {
  std::vector<std::string> out;
  for (const auto& r : regions(workload)) out.push_back(r.name);
  return out;
}

namespace {

// Shape of each candidate for a normalized scenario.
std::pair<std::size_t, std::size_t> candidate_shape(const Scenario& s, const std::string& name) {
  const std::string& w = s.workload;
  if (w == "lu") return {s.n, s.n};
  if (w == "rect") return name == "L" ? std::pair{s.m, s.m} : std::pair{s.m, s.n};
  if (w == "rankdef") return name == "L" ? std::pair{s.m, s.rank} : std::pair{s.rank, s.n};
  if (w == "solve-small" || w == "solve-large") {
    if (name == "Y" || name == "X") return {s.m, s.n};
    return {s.n, s.n};
  }
  if (w == "trinv") return {s.n, s.n};
  return {s.m, s.n};
}

}  // namespace

std::size_t legal_positions(const Scenario& sc) {
  const Scenario s = sc.normalized();
  std::size_t total = 0;
  for (const auto& r : regions(s.workload)) {
    auto [rows, cols] = candidate_shape(s, r.name);
    total += count_legal(r.shape, rows, cols);
  }
  return total;
}

Instance generate(const Scenario& sc) {
  Instance inst;
  inst.scenario = sc.normalized();
  const Scenario& s = inst.scenario;
  const Field f = s.field();
  Rng rng(s.seed);
  MatSet& op = inst.operands;
  MatSet& tr = inst.truth;

  if (s.workload == "lu" || s.workload == "rect" || s.workload == "rankdef") {
    const std::size_t inner = s.workload == "rankdef" ? s.rank : s.m;
    Mat l = random_unit_lower(f, s.m, inner, rng);
    Mat u = random_upper(f, inner, s.n, rng);
    op.emplace("A", multiply(l, u));
    tr.emplace("L", std::move(l));
    tr.emplace("U", std::move(u));
  } else if (s.workload == "solve-small" || s.workload == "solve-large") {
    Mat l = random_unit_lower(f, s.n, s.n, rng);
    Mat u = random_upper(f, s.n, s.n, rng);
    Mat a = multiply(l, u);
    Mat x = Mat::random(f, s.m, s.n, rng);
    op.emplace("B", multiply(x, a));
    if (s.workload == "solve-small") tr.emplace("Y", multiply(x, l));
    else tr.emplace("R", inverse_upper(f, u));
    op.emplace("A", std::move(a));
    tr.emplace("L", std::move(l));
    tr.emplace("U", std::move(u));
    tr.emplace("X", std::move(x));
  } else if (s.workload == "trinv") {
    Mat u = random_upper(f, s.n, s.n, rng);
    tr.emplace("R", inverse_upper(f, u));
    op.emplace("U", std::move(u));
  } else {
    auto [tri, side] = variant_kind(s.variant);
    const std::size_t tn = side == Side::Right ? s.n : s.m;
    Mat t = tri == Triangle::Upper ? random_upper(f, tn, tn, rng) : transpose(random_upper(f, tn, tn, rng));
    Mat r = Mat::random(f, s.m, s.n, rng);
    Mat a = Mat::random(f, s.m, s.ell, rng);
    Mat b = Mat::random(f, s.ell, s.n, rng);
    Mat c = side == Side::Right ? multiply(r, t) : multiply(t, r);
    multiply_accumulate(f, c.view(), a.view(), b.view(), false);
    op.emplace("T", std::move(t));
    op.emplace("C", std::move(c));
    op.emplace("A", std::move(a));
    op.emplace("B", std::move(b));
    tr.emplace("R", std::move(r));
  }

  // Corruption: k distinct legal positions, each perturbed by a nonzero value.
  struct Pos {
    std::size_t cand, i, j;
  };
  const auto regs = regions(s.workload);
  std::vector<Pos> all;
  for (std::size_t c = 0; c < regs.size(); ++c) {
    auto [rows, cols] = candidate_shape(s, regs[c].name);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        if (legal(regs[c].shape, i, j)) all.push_back({c, i, j});
  }
  if (s.errors > all.size())
    throw std::invalid_argument("requested " + std::to_string(s.errors) + " errors but only " +
                                std::to_string(all.size()) + " positions are legal");
  // Partial Fisher-Yates.
  for (std::size_t t = 0; t < s.errors; ++t) std::swap(all[t], all[t + uniform_below(rng, all.size() - t)]);

  inst.corrupted = tr;
  for (std::size_t t = 0; t < s.errors; ++t) {
    const Pos& p = all[t];
    Mat& m = inst.corrupted.at(regs[p.cand].name);
    m(p.i, p.j) = f.add(m(p.i, p.j), f.sample_nonzero(rng));
  }
  return inst;
}

void save_set(const MatSet& set, const fs::path& dir, std::string_view suffix) {
  for (const auto& [name, m] : set) save_matrix(dir / (name + std::string(suffix) + ".mat"), m);
}

MatSet load_set(const std::string& workload, const fs::path& dir, std::string_view suffix) {
  MatSet out;
  for (const auto& name : candidate_names(workload))
    out.emplace(name, load_matrix(dir / (name + std::string(suffix) + ".mat")));
  return out;
}

void save_instance(const Instance& inst, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream(dir / "scenario.txt") << inst.scenario.serialize();
  save_set(inst.operands, dir, "");
  save_set(inst.truth, dir, "_true");
  save_set(inst.corrupted, dir, "_hat");
}

Instance load_instance(const fs::path& dir) {
  std::ifstream in(dir / "scenario.txt");
  if (!in) throw std::runtime_error("cannot read " + (dir / "scenario.txt").string());
  std::stringstream ss;
  ss << in.rdbuf();
  Instance inst;
  inst.scenario = Scenario::parse(ss.str()).normalized();
  const std::string& w = inst.scenario.workload;
  std::vector<std::string> ops;
  if (w == "lu" || w == "rect" || w == "rankdef") ops = {"A"};
  else if (w == "solve-small" || w == "solve-large") ops = {"A", "B"};
  else if (w == "trinv") ops = {"U"};
  else ops = {"T", "C", "A", "B"};
  for (const auto& name : ops) inst.operands.emplace(name, load_matrix(dir / (name + ".mat")));
  inst.truth = load_set(w, dir, "_true");
  inst.corrupted = load_set(w, dir, "_hat");
  return inst;
}

bool verify_set(const Instance& inst, const MatSet& set, std::string* why) {
  const Scenario& s = inst.scenario;
  const Field f = s.field();
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  try {
    const std::string& w = s.workload;
    if (w == "lu" || w == "rect" || w == "rankdef") {
      const Mat& l = get(set, "L");
      const Mat& u = get(set, "U");
      if (l.rows() != s.m || u.cols() != s.n || l.cols() != u.rows()) return fail("factor shapes are inconsistent");
      if (w == "rankdef" && l.cols() != s.rank)
        return fail("rank " + std::to_string(l.cols()) + " differs from " + std::to_string(s.rank));
      if (w != "rankdef" && l.cols() != s.m) return fail("factor shapes are inconsistent");
      if (!unit_lower_trapezoid(l)) return fail("L is not unit lower triangular");
      if (!upper_trapezoid_nonsingular(u)) return fail("U is not upper triangular with nonzero diagonal");
      if (!same(multiply(l, u), get(inst.operands, "A"))) return fail("L*U != A");
      return true;
    }
    if (w == "solve-small" || w == "solve-large") {
      const Mat& l = get(set, "L");
      const Mat& u = get(set, "U");
      const Mat& x = get(set, "X");
      const Mat& a = get(inst.operands, "A");
      const Mat& b = get(inst.operands, "B");
      if (!unit_lower_trapezoid(l) || l.rows() != s.n || l.cols() != s.n) return fail("L is not unit lower triangular");
      if (!upper_trapezoid_nonsingular(u) || u.rows() != s.n || u.cols() != s.n)
        return fail("U is not upper triangular with nonzero diagonal");
      if (!same(multiply(l, u), a)) return fail("L*U != A");
      if (w == "solve-small") {
        if (!same(multiply(get(set, "Y"), u), b)) return fail("Y*U != B");
        if (!same(multiply(x, l), get(set, "Y"))) return fail("X*L != Y");
      } else {
        const Mat& r = get(set, "R");
        if (!same(multiply(r, u), Mat::identity(f, s.n))) return fail("R*U != I");
        if (!same(multiply(x, l), multiply(b, r))) return fail("X*L != B*R");
      }
      if (!same(multiply(x, a), b)) return fail("X*A != B");
      return true;
    }
    if (w == "trinv") {
      if (!same(multiply(get(set, "R"), get(inst.operands, "U")), Mat::identity(f, s.n))) return fail("R*U != I");
      return true;
    }
    auto [tri, side] = variant_kind(s.variant);
    const Mat& t = get(inst.operands, "T");
    const Mat& r = get(set, "R");
    Mat lhs = side == Side::Right ? multiply(r, t) : multiply(t, r);
    Mat rhs = get(inst.operands, "C");
    multiply_accumulate(f, rhs.view(), get(inst.operands, "A").view(), get(inst.operands, "B").view());
    if (!same(lhs, rhs)) return fail(side == Side::Right ? "R*T != C - A*B" : "T*R != C - A*B");
    return true;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

CorrectOutcome correct_instance(const Instance& inst, const CorrectSettings& st) {
  const Scenario& s = inst.scenario;
  const Field f = s.field();
  const double eps = st.epsilon.value_or(s.epsilon);
  const std::uint64_t seed = st.seed.value_or(s.seed);
  const MatSet& hat = inst.corrupted;
  CorrectOutcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const std::string& w = s.workload;

  CroutOptions co;
  co.seed = seed;
  co.lambda = st.lambda;
  co.leaf_size = st.leaf_size;
  SolveOptions so;
  so.seed = seed;
  so.lambda = st.lambda;
  so.leaf_size = st.leaf_size;
  TrsmEcParams tp;
  tp.epsilon = eps;
  tp.seed = seed;
  tp.lambda = st.lambda;
  tp.target = "R";

  try {
    if (w == "lu") {
      PackedLU lu = PackedLU::pack(get(hat, "L"), get(hat, "U"));
      out.report = crout_ec(f, lu, get(inst.operands, "A"), eps, co);
      out.corrected.emplace("L", lu.lower());
      out.corrected.emplace("U", lu.upper());
    } else if (w == "rect") {
      Mat m = pack_factors(f, get(hat, "L"), get(hat, "U"), s.m, s.n);
      out.report = rect_ec(f, m, get(inst.operands, "A"), eps, co);
      out.corrected.emplace("L", extract_lower(f, m, s.m, s.m));
      out.corrected.emplace("U", extract_upper(f, m, s.m, s.n));
    } else if (w == "rankdef") {
      Mat m = pack_factors(f, get(hat, "L"), get(hat, "U"), s.m, s.n);
      RankResult rr = rank_deficient_ec(f, m, get(inst.operands, "A"), eps, co);
      out.report = std::move(rr.report);
      out.corrected.emplace("L", std::move(rr.l));
      out.corrected.emplace("U", std::move(rr.u));
    } else if (w == "solve-small" || w == "solve-large") {
      PackedLU lu = PackedLU::pack(get(hat, "L"), get(hat, "U"));
      Mat x = get(hat, "X");
      if (w == "solve-small") {
        Mat y = get(hat, "Y");
        out.report = solve_small_rhs(f, get(inst.operands, "A"), get(inst.operands, "B"), lu, y, x, eps, so);
        out.corrected.emplace("Y", std::move(y));
      } else {
        Mat r = get(hat, "R");
        out.report = solve_large_rhs(f, get(inst.operands, "A"), get(inst.operands, "B"), lu, r, x, eps, so);
        out.corrected.emplace("R", std::move(r));
      }
      out.corrected.emplace("L", lu.lower());
      out.corrected.emplace("U", lu.upper());
      out.corrected.emplace("X", std::move(x));
    } else if (w == "trinv") {
      Mat r = get(hat, "R");
      const Mat& u = get(inst.operands, "U");
      out.report = tr_inv_ec(f, r.view(), TriView{u.view(), Triangle::Upper, Diag::NonUnit}, tp);
      out.corrected.emplace("R", std::move(r));
    } else {
      Mat r = get(hat, "R");
      const Mat& t = get(inst.operands, "T");
      auto [tri, side] = variant_kind(s.variant);
      const TriView tv{t.view(), tri, Diag::NonUnit};
      const auto h = BlackboxRHS::difference(get(inst.operands, "C").view(), get(inst.operands, "A").view(),
                                             get(inst.operands, "B").view());
      if (s.variant == "upper_right") out.report = trsm_ec_upper_right(f, r.view(), h, tv, tp);
      else if (s.variant == "lower_right") out.report = trsm_ec_lower_right(f, r.view(), h, tv, tp);
      else if (s.variant == "lower_left") out.report = trsm_ec_lower_left(f, r.view(), h, tv, tp);
      else out.report = trsm_ec_upper_left(f, r.view(), h, tv, tp);
      out.corrected.emplace("R", std::move(r));
    }
  } catch (const std::runtime_error& e) {
    // MonteCarloAbort, or a zero pivot that a generated (GRP) input can only
    // produce after a missed check.
    if (!dynamic_cast<const MonteCarloAbort*>(&e) && !dynamic_cast<const GrpViolation*>(&e)) throw;
    out.aborted = true;
    out.abort_message = e.what();
    out.report.operation = w;
    out.report.verification = "fail";
    out.report.notes.push_back(std::string("aborted: ") + e.what());
  }
  out.report.seed = seed;
  out.report.epsilon = eps;
  out.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (st.verify && !out.aborted) {
    std::string why;
    const bool ok = verify_set(inst, out.corrected, &why);
    out.report.verification = ok ? "pass" : "fail";
    if (!ok) out.report.notes.push_back("verification failed: " + why);
  }
  return out;
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  std::vector<BenchRow> rows;
  const std::vector<std::size_t> sizes = cfg.sizes.empty() ? std::vector{cfg.base.n} : cfg.sizes;
  const std::vector<std::size_t> errs = cfg.errors.empty() ? std::vector{cfg.base.errors} : cfg.errors;
  for (std::size_t n : sizes) {
    for (std::size_t k : errs) {
      BenchRow row;
      row.scenario = cfg.base;
      row.scenario.n = n;
      row.scenario.errors = k;
      row.scenario = row.scenario.normalized();
      std::vector<double> secs, ref, muls, scans, iters;
      for (std::size_t rep = 0; rep < std::max<std::size_t>(cfg.repeats, 1); ++rep) {
        Scenario sc = row.scenario;
        sc.seed = cfg.base.seed + 1000003ULL * rep;
        const Instance inst = generate(sc);
        reset_op_counters();
        CorrectSettings st;
        st.verify = false;
        const auto t0 = std::chrono::steady_clock::now();
        CorrectOutcome out = correct_instance(inst, st);
        secs.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        muls.push_back(static_cast<double>(op_counters().mul));
        scans.push_back(static_cast<double>(op_counters().scan));
        iters.push_back(static_cast<double>(out.report.total_iterations()));
        ++row.runs;
        if (out.aborted) ++row.aborted;
        else if (verify_set(inst, out.corrected)) ++row.verified;
        if (cfg.reference && sc.workload == "lu") {
          const auto r0 = std::chrono::steady_clock::now();
          (void)crout_reference(get(inst.operands, "A"));
          ref.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - r0).count());
        }
      }
      row.median_seconds = median(secs);
      row.median_reference_seconds = median(ref);
      row.median_mul_ops = static_cast<std::uint64_t>(median(muls));
      row.median_scan_ops = static_cast<std::uint64_t>(median(scans));
      row.median_iterations = median(iters);
      rows.push_back(row);
    }
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "workload,p,nu,n,m,k,epsilon,runs,verified,aborted,median_seconds,median_reference_seconds,"
        "median_mul_ops,median_scan_ops,median_iterations,interp_method\n";
  for (const auto& r : rows) {
    const Scenario& s = r.scenario;
    os << s.workload << ',' << s.p << ',' << s.nu << ',' << s.n << ',' << s.m << ',' << s.errors << ','
       << s.epsilon << ',' << r.runs << ',' << r.verified << ',' << r.aborted << ',' << r.median_seconds << ','
       << r.median_reference_seconds << ',' << r.median_mul_ops << ',' << r.median_scan_ops << ','
       << r.median_iterations << ",chien_scan\n";
  }
  return os.str();
}

}  // namespace ecla
