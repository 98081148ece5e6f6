#include "ecla/ff.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <map>
#include <mutex>
#include <utility>

namespace ecla {

namespace {

thread_local OpCounters tl_counters;

std::uint64_t mulmod64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod64(r, a, m);
    a = mulmod64(a, a, m);
    e >>= 1;
  }
  return r;
}

// Polynomials over GF(p), low degree first, no trailing zeros (zero = empty).
using Poly = std::vector<std::uint64_t>;

void trim(Poly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

Poly poly_mod(Poly a, const Poly& m, std::uint64_t p) {
  trim(a);
  const std::size_t dm = m.size() - 1;
  const std::uint64_t lead_inv = powmod64(m.back(), p - 2, p);
  while (a.size() >= m.size()) {
    const std::uint64_t factor = mulmod64(a.back(), lead_inv, p);
    const std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i) {
      const std::uint64_t t = mulmod64(factor, m[i], p);
      auto& slot = a[shift + i];
      slot = slot >= t ? slot - t : slot + (p - t);
    }
    trim(a);
  }
  return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& m, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      r[i + j] = (r[i + j] + mulmod64(a[i], b[j], p)) % p;
  return poly_mod(std::move(r), m, p);
}

Poly poly_powmod(Poly base, std::uint64_t e, const Poly& m, std::uint64_t p) {
  Poly r{1};
  base = poly_mod(std::move(base), m, p);
  while (e) {
    if (e & 1) r = poly_mulmod(r, base, m, p);
    base = poly_mulmod(base, base, m, p);
    e >>= 1;
  }
  return r;
}

Poly poly_sub(Poly a, const Poly& b, std::uint64_t p) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = a[i] >= b[i] ? a[i] - b[i] : a[i] + (p - b[i]);
  trim(a);
  return a;
}

Poly poly_gcd(Poly a, Poly b, std::uint64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// gcd(x^(p^i) - x, f) = 1 for all 1 <= i <= deg/2.
bool is_irreducible(const Poly& f, std::uint64_t p) {
  const std::size_t deg = f.size() - 1;
  if (deg <= 1) return deg == 1;
  const Poly x{0, 1};
  Poly xp = x;
  for (std::size_t i = 1; i <= deg / 2; ++i) {
    xp = poly_powmod(xp, p, f, p);
    Poly g = poly_gcd(f, poly_sub(xp, x, p), p);
    if (g.size() != 1) return false;
  }
  return true;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

constexpr std::uint64_t kTableLimit = std::uint64_t{1} << 22;
constexpr std::uint32_t kNoZech = std::numeric_limits<std::uint32_t>::max();

}  // namespace

OpCounters& op_counters() { return tl_counters; }
void reset_op_counters() { tl_counters = OpCounters{}; }

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t sp : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % sp == 0) return n == sp;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace detail {

struct ExtTables {
  std::uint64_t p = 0;
  std::uint64_t q = 0;
  unsigned nu = 0;
  Poly modulus;
  // Log/antilog and Zech tables, present when q <= kTableLimit.
  bool tabled = false;
  std::vector<std::uint32_t> exp;  // length 2(q-1)
  std::vector<std::uint32_t> log;  // length q
  std::vector<std::uint32_t> zech;  // log(1 + g^i), kNoZech when 1 + g^i = 0

  Poly unpack(Elem a) const {
    Poly c(nu);
    for (unsigned i = 0; i < nu; ++i) {
      c[i] = a % p;
      a /= p;
    }
    trim(c);
    return c;
  }
  Elem pack(const Poly& c) const {
    Elem v = 0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * p + c[i];
    return v;
  }
  Elem poly_mul(Elem a, Elem b) const { return pack(poly_mulmod(unpack(a), unpack(b), modulus, p)); }
};

}  // namespace detail

namespace {

std::shared_ptr<const detail::ExtTables> build_ext(std::uint64_t p, unsigned nu) {
  auto t = std::make_shared<detail::ExtTables>();
  t->p = p;
  t->nu = nu;
  t->q = 1;
  for (unsigned i = 0; i < nu; ++i) {
    if (t->q > (std::uint64_t{1} << 62) / p) throw FieldError("extension field too large for a 64-bit element");
    t->q *= p;
  }
  // Monic candidates in lexicographic order of (c_{nu-1}, ..., c_0).
  for (std::uint64_t code = 0; code < t->q; ++code) {
    Poly f(nu + 1);
    std::uint64_t v = code;
    for (unsigned i = 0; i < nu; ++i) {
      f[i] = v % p;
      v /= p;
    }
    f[nu] = 1;
    if (f[0] == 0) continue;
    if (is_irreducible(f, p)) {
      t->modulus = std::move(f);
      break;
    }
  }
  if (t->modulus.empty()) throw FieldError("no irreducible polynomial found");

  if (t->q <= kTableLimit) {
    const std::uint64_t order = t->q - 1;
    const auto factors = prime_factors(order);
    Elem gen = 0;
    for (Elem g = 2; g < t->q && gen == 0; ++g) {
      bool ok = true;
      for (auto r : factors) {
        if (t->pack(poly_powmod(t->unpack(g), order / r, t->modulus, p)) == 1) {
          ok = false;
          break;
        }
      }
      if (ok) gen = g;
    }
    if (gen == 0) throw FieldError("no primitive element found");
    t->exp.resize(2 * order);
    t->log.assign(t->q, 0);
    Elem x = 1;
    for (std::uint64_t i = 0; i < order; ++i) {
      t->exp[i] = static_cast<std::uint32_t>(x);
      t->exp[i + order] = static_cast<std::uint32_t>(x);
      t->log[x] = static_cast<std::uint32_t>(i);
      x = t->poly_mul(x, gen);
    }
    t->zech.resize(order);
    for (std::uint64_t i = 0; i < order; ++i) {
      const Elem y = t->exp[i];
      const Elem plus_one = y - (y % p) + ((y % p) + 1) % p;
      t->zech[i] = plus_one == 0 ? kNoZech : t->log[plus_one];
    }
    t->tabled = true;
  }
  return t;
}

std::shared_ptr<const detail::ExtTables> cached_ext(std::uint64_t p, unsigned nu) {
  static std::mutex mu;
  static std::map<std::pair<std::uint64_t, unsigned>, std::shared_ptr<const detail::ExtTables>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{p, nu}];
  if (!slot) slot = build_ext(p, nu);
  return slot;
}

}  // namespace

Field Field::prime(std::uint64_t p) {
  if (p >= (std::uint64_t{1} << 62)) throw FieldError("characteristic must be below 2^62");
  if (!is_prime(p)) throw FieldError("characteristic " + std::to_string(p) + " is not prime");
  Field f;
  f.p_ = p;
  f.q_ = p;
  f.nu_ = 1;
  if (p < (std::uint64_t{1} << 32)) {
    const std::uint64_t pm = p - 1;
    f.lazy_terms_ = (std::numeric_limits<std::uint64_t>::max() - pm) / (pm * pm);
  }
  return f;
}

Field Field::extension(const Field& base, unsigned degree) {
  if (!base.is_prime_field()) throw FieldError("extensions are built over prime fields only");
  if (degree == 0) throw FieldError("extension degree must be positive");
  if (degree == 1) return base;
  Field f;
  f.p_ = base.p_;
  f.nu_ = degree;
  f.ext_ = cached_ext(base.p_, degree);
  f.q_ = f.ext_->q;
  return f;
}

unsigned Field::degree_for(std::uint64_t q, std::size_t m) {
  unsigned nu = 1;
  unsigned __int128 power = q;
  while (power <= m) {
    power *= q;
    ++nu;
  }
  return nu;
}

Field Field::extend_for(const Field& base, std::size_t m) {
  if (m < base.q_) throw FieldError("extension requested although the field is large enough");
  return extension(base, degree_for(base.q_, m));
}

const std::vector<std::uint64_t>& Field::modulus() const {
  static const std::vector<std::uint64_t> none;
  return ext_ ? ext_->modulus : none;
}

Elem Field::from_int(std::int64_t v) const {
  const auto p = static_cast<std::int64_t>(p_);
  std::int64_t r = v % p;
  if (r < 0) r += p;
  return static_cast<Elem>(r);
}

Elem Field::ext_add(Elem a, Elem b) const {
  if (p_ == 2) return a ^ b;
  const auto& t = *ext_;
  if (t.tabled) {
    if (a == 0) return b;
    if (b == 0) return a;
    const std::uint64_t order = q_ - 1;
    const std::uint32_t la = t.log[a];
    const std::uint32_t lb = t.log[b];
    const std::uint64_t d = lb >= la ? lb - la : lb + order - la;
    const std::uint32_t z = t.zech[d];
    if (z == kNoZech) return 0;
    return t.exp[la + z];
  }
  Elem r = 0;
  Elem scale = 1;
  for (unsigned i = 0; i < nu_; ++i) {
    const std::uint64_t s = (a % p_ + b % p_) % p_;
    r += s * scale;
    scale *= p_;
    a /= p_;
    b /= p_;
  }
  return r;
}

Elem Field::ext_neg(Elem a) const {
  if (p_ == 2 || a == 0) return a;
  const auto& t = *ext_;
  if (t.tabled) return t.exp[t.log[a] + (q_ - 1) / 2];
  Elem r = 0;
  Elem scale = 1;
  for (unsigned i = 0; i < nu_; ++i) {
    const std::uint64_t c = a % p_;
    r += (c == 0 ? 0 : p_ - c) * scale;
    scale *= p_;
    a /= p_;
  }
  return r;
}

Elem Field::ext_mul(Elem a, Elem b) const {
  if (a == 0 || b == 0) return 0;
  const auto& t = *ext_;
  if (t.tabled) return t.exp[t.log[a] + t.log[b]];
  return t.poly_mul(a, b);
}

Elem Field::inv(Elem a) const {
  if (a == 0) throw FieldError("inverse of zero");
  if (nu_ == 1) return powmod64(a, p_ - 2, p_);
  const auto& t = *ext_;
  if (t.tabled) return t.exp[(q_ - 1 - t.log[a]) % (q_ - 1)];
  return pow(a, q_ - 2);
}

Elem Field::pow(Elem a, std::uint64_t e) const {
  Elem r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

std::vector<std::uint64_t> Field::coefficients(Elem a) const {
  std::vector<std::uint64_t> c(nu_);
  for (unsigned i = 0; i < nu_; ++i) {
    c[i] = a % p_;
    a /= p_;
  }
  return c;
}

Elem Field::from_coefficients(std::span<const std::uint64_t> c) const {
  if (c.size() > nu_) throw FieldError("too many coefficients for field degree");
  Elem v = 0;
  for (std::size_t i = c.size(); i-- > 0;) {
    if (c[i] >= p_) throw FieldError("coefficient out of range");
    v = v * p_ + c[i];
  }
  return v;
}

Elem Field::sample(Rng& rng) const {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % q_;
  for (;;) {
    const std::uint64_t x = rng();
    if (x < limit) return x % q_;
  }
}

Elem Field::sample_nonzero(Rng& rng) const {
  for (;;) {
    const Elem x = sample(rng);
    if (x != 0) return x;
  }
}

std::string Field::format(Elem a) const {
  if (nu_ == 1) return std::to_string(a);
  std::string out;
  for (unsigned i = 0; i < nu_; ++i) {
    if (i) out += ',';
    out += std::to_string(a % p_);
    a /= p_;
  }
  return out;
}

Elem Field::parse(std::string_view text) const {
  std::vector<std::uint64_t> coeffs;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto piece = text.substr(pos, end - pos);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
    if (ec != std::errc{} || ptr != piece.data() + piece.size() || piece.empty())
      throw FieldError("malformed field element '" + std::string(text) + "'");
    if (v >= p_) throw FieldError("field element '" + std::string(text) + "' out of range");
    coeffs.push_back(v);
    pos = end + 1;
  }
  if (nu_ == 1 && coeffs.size() != 1) throw FieldError("expected a residue, got '" + std::string(text) + "'");
  if (nu_ > 1 && coeffs.size() != nu_ && coeffs.size() != 1)
    throw FieldError("expected " + std::to_string(nu_) + " coefficients, got '" + std::string(text) + "'");
  return from_coefficients(coeffs);
}

bool has_order_at_least(const Field& f, Elem theta, std::size_t m) {
  if (theta == 0 || theta >= f.cardinality()) return false;
  Elem x = 1;
  for (std::size_t j = 1; j < m; ++j) {
    x = f.mul(x, theta);
    if (x == 1) return false;
  }
  return true;
}

PowTable PowTable::build(const Field& f, Elem theta, std::size_t m) {
  if (theta == 0 || theta >= f.cardinality()) throw FieldError("theta must be a nonzero field element");
  PowTable t;
  t.theta_ = theta;
  t.powers_.reserve(m);
  t.dlog_.reserve(m);
  Elem x = 1;
  for (std::size_t j = 0; j < m; ++j) {
    if (j > 0) {
      x = f.mul(x, theta);
      if (x == 1) throw FieldError("theta has multiplicative order " + std::to_string(j) + " < " + std::to_string(m));
    }
    t.powers_.push_back(x);
    t.dlog_.emplace(x, j);
  }
  return t;
}

PowTable PowTable::with_order_at_least(const Field& f, std::size_t m) {
  const std::uint64_t q = f.cardinality();
  if (q <= m) throw FieldError("field too small for an element of order >= " + std::to_string(m));
  if (m <= 1) return build(f, 1, m);
  const Elem last_small = std::min<Elem>(q - 1, 65);
  for (Elem c = 2; c <= last_small; ++c)
    if (has_order_at_least(f, c, m)) return build(f, c, m);
  Rng rng(0x7e7a5eedULL);
  for (int tries = 0; tries < 256; ++tries) {
    const Elem c = f.sample_nonzero(rng);
    if (has_order_at_least(f, c, m)) return build(f, c, m);
  }
  for (Elem c = last_small + 1; c < q; ++c)
    if (has_order_at_least(f, c, m)) return build(f, c, m);
  throw FieldError("no element of sufficient order");
}

}  // namespace ecla
