// Finite fields GF(p) and GF(p^nu) with a single-word element representation.
//
// Elements are stored as 64-bit integers. In a prime field the integer is the
// residue in [0, p). In an extension field it packs the coefficient vector of
// the polynomial representative in base p, c0 + c1*p + ... + c{nu-1}*p^(nu-1),
// so every element lies in [0, q) and elements of the prime subfield keep the
// same integer value after embedding.
#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ecla {

using Elem = std::uint64_t;
using Rng = std::mt19937_64;

class FieldError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thread-local instrumentation. `mul` counts field multiplications, including
/// those done in bulk by the matrix kernels; `scan` counts locator evaluations
/// performed by the root scan of sparse recovery.
struct OpCounters {
  std::uint64_t mul = 0;
  std::uint64_t scan = 0;
};
OpCounters& op_counters();
void reset_op_counters();

bool is_prime(std::uint64_t n);

namespace detail {
struct ExtTables;
}

/// A finite field context. Cheap to copy; immutable after construction.
class Field {
 public:
  /// GF(p). Throws FieldError unless p is prime and p < 2^62.
  static Field prime(std::uint64_t p);

  /// GF(p^degree) over the prime field `base`, using the lexicographically
  /// first monic irreducible polynomial of that degree as modulus.
  static Field extension(const Field& base, unsigned degree);

  /// Smallest nu with q^nu > m, i.e. nu = ceil(log_q(m + 1)).
  static unsigned degree_for(std::uint64_t q, std::size_t m);

  /// Extension of `base` large enough to hold m distinct powers of an element.
  /// Requires m >= #base and a prime base field.
  static Field extend_for(const Field& base, std::size_t m);

  std::uint64_t characteristic() const { return p_; }
  unsigned degree() const { return nu_; }
  std::uint64_t cardinality() const { return q_; }
  bool is_prime_field() const { return nu_ == 1; }
  /// Monic modulus, low degree first (length nu+1); empty for prime fields.
  const std::vector<std::uint64_t>& modulus() const;

  bool operator==(const Field& o) const { return p_ == o.p_ && nu_ == o.nu_; }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  Elem from_int(std::int64_t v) const;

  Elem add(Elem a, Elem b) const {
    if (nu_ == 1) {
      Elem s = a + b;
      return s >= p_ ? s - p_ : s;
    }
    return ext_add(a, b);
  }
  Elem neg(Elem a) const {
    if (nu_ == 1) return a == 0 ? 0 : p_ - a;
    return ext_neg(a);
  }
  Elem sub(Elem a, Elem b) const {
    if (nu_ == 1) return a >= b ? a - b : a + (p_ - b);
    return ext_add(a, ext_neg(b));
  }
  Elem mul(Elem a, Elem b) const {
    ++op_counters().mul;
    if (nu_ == 1) {
      if (p_ < (std::uint64_t{1} << 32)) return (a * b) % p_;
      return static_cast<Elem>((static_cast<unsigned __int128>(a) * b) % p_);
    }
    return ext_mul(a, b);
  }
  /// Throws FieldError on zero.
  Elem inv(Elem a) const;
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  Elem pow(Elem a, std::uint64_t e) const;

  /// Membership in the prime subfield (the image of the embedding).
  bool in_prime_subfield(Elem a) const { return a < p_; }
  /// Embedding of an element of the prime subfield; identity on representation.
  Elem embed(Elem base_elem) const { return base_elem; }
  /// Partial inverse of embed: nullopt on elements outside the prime subfield.
  std::optional<Elem> coerce(Elem a) const {
    if (a < p_) return a;
    return std::nullopt;
  }

  std::vector<std::uint64_t> coefficients(Elem a) const;
  Elem from_coefficients(std::span<const std::uint64_t> c) const;

  Elem sample(Rng& rng) const;
  Elem sample_nonzero(Rng& rng) const;

  /// Decimal residue, or `c0,c1,...` for extension elements.
  std::string format(Elem a) const;
  Elem parse(std::string_view text) const;

  /// Number of products (each < p^2) that can be summed into an accumulator
  /// already holding a value < p without overflowing 64 bits. Zero when lazy
  /// accumulation is unavailable (extension fields or p >= 2^32).
  std::uint64_t lazy_terms() const { return lazy_terms_; }

 private:
  Field() = default;
  Elem ext_add(Elem a, Elem b) const;
  Elem ext_neg(Elem a) const;
  Elem ext_mul(Elem a, Elem b) const;

  std::uint64_t p_ = 2;
  std::uint64_t q_ = 2;
  unsigned nu_ = 1;
  std::uint64_t lazy_terms_ = 0;
  std::shared_ptr<const detail::ExtTables> ext_;
};

/// Powers theta^0 .. theta^(m-1) of an element of order >= m, with a discrete
/// log lookup back to the exponent.
class PowTable {
 public:
  /// Validates that theta has order >= m; throws FieldError otherwise.
  static PowTable build(const Field& f, Elem theta, std::size_t m);

  /// Picks theta by trying 2, 3, ... in canonical order, then random draws,
  /// then an exhaustive scan. Requires #f > m.
  static PowTable with_order_at_least(const Field& f, std::size_t m);

  Elem theta() const { return theta_; }
  std::size_t size() const { return powers_.size(); }
  Elem power(std::size_t j) const { return powers_[j]; }
  std::span<const Elem> powers() const { return powers_; }
  std::optional<std::size_t> dlog(Elem x) const {
    auto it = dlog_.find(x);
    if (it == dlog_.end()) return std::nullopt;
    return it->second;
  }

 private:
  Elem theta_ = 1;
  std::vector<Elem> powers_;
  std::unordered_map<Elem, std::size_t> dlog_;
};

/// Element order-at-least test used by PowTable; exposed for tests.
bool has_order_at_least(const Field& f, Elem theta, std::size_t m);

}  // namespace ecla
