// Sparse Laurent polynomials with arbitrary-precision integer coefficients.
//
// A LaurentPolynomial lives in Z[x_1^{+-1}, ..., x_N^{+-1}] where N is its
// arity (cluster variables followed by frozen variables). Terms are kept in
// ascending lexicographic order of exponent vectors with no zero
// coefficients, so structural equality is polynomial equality.
//
// Canonical text form (used by golden files and the CLI):
//
//   poly    := "0" | term ( (" + " | " - ") term )*
//   term    := coeff | [coeff "*"] factor ("*" factor)*
//   factor  := "x" index [ "^" signed-int ]      exponent omitted when 1
//   coeff   := unsigned-int                      omitted when 1
//
// The first term carries a leading "-" when negative. Terms appear in
// ascending lexicographic order of their exponent vectors; zero exponents
// are not printed. Example: "x1^-1 + x1^-1*x2".
#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace clusterdv {

using BigInt = mpz_class;

/// Upper bound on n + m (mutable plus frozen variables).
inline constexpr std::size_t kMaxVars = 16;

struct ArityMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotDivisible : std::domain_error {
  using std::domain_error::domain_error;
};

struct ZeroPolynomial : std::domain_error {
  using std::domain_error::domain_error;
};

/// Raised when a polynomial (or a seed) grows past the configured cap.
/// Not a mathematical failure; callers report it separately.
struct ResourceExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Limits {
  std::size_t max_terms = 200'000;       // per polynomial
  std::size_t max_seed_terms = 1'000'000; // summed over a seed's cluster
  /// Term-by-term coefficient products a single multiplication or division
  /// may perform. Dense operands can stay under max_terms while costing
  /// minutes, so this is checked before the work is done.
  std::uint64_t max_work = 500'000;
};

/// Largest exponent magnitude a stored polynomial may carry. Products and
/// quotients that would leave this range raise ResourceExceeded.
inline constexpr std::int32_t kMaxExponent = 8191;

/// Exponent vector packed as kMaxVars biased 16-bit lanes, variable 0 in the
/// most significant lane, so lexicographic order is word order. Lanes past
/// the arity hold exponent zero.
class ExponentVector {
 public:
  static constexpr std::size_t kWords = kMaxVars / 4;
  static constexpr std::uint64_t kBias = 0x4000;
  static constexpr std::uint64_t kBiasWord = 0x4000'4000'4000'4000ULL;

  ExponentVector() { words_.fill(kBiasWord); }

  static ExponentVector unit(std::size_t i, std::int32_t power = 1) {
    ExponentVector e;
    e.set(i, power);
    return e;
  }

  std::int32_t operator[](std::size_t i) const {
    return static_cast<std::int32_t>((words_[i / 4] >> shift(i)) & 0xFFFF) -
           static_cast<std::int32_t>(kBias);
  }

  /// Throws std::out_of_range when |value| > kMaxExponent.
  void set(std::size_t i, std::int32_t value) {
    if (i >= kMaxVars) throw std::out_of_range("exponent index out of range");
    if (value > kMaxExponent || value < -kMaxExponent) {
      throw std::out_of_range("exponent " + std::to_string(value) + " out of range");
    }
    auto& w = words_[i / 4];
    w &= ~(std::uint64_t{0xFFFF} << shift(i));
    w |= (static_cast<std::uint64_t>(value + static_cast<std::int32_t>(kBias)) << shift(i));
  }

  // Lane-wise arithmetic; callers keep results within +-kMaxExponent so
  // no lane carries or borrows.
  ExponentVector& operator+=(const ExponentVector& o) {
    for (std::size_t w = 0; w < kWords; ++w) words_[w] = words_[w] + o.words_[w] - kBiasWord;
    return *this;
  }
  ExponentVector& operator-=(const ExponentVector& o) {
    for (std::size_t w = 0; w < kWords; ++w) words_[w] = words_[w] + kBiasWord - o.words_[w];
    return *this;
  }
  friend ExponentVector operator+(ExponentVector a, const ExponentVector& b) { return a += b; }
  friend ExponentVector operator-(ExponentVector a, const ExponentVector& b) { return a -= b; }

  friend bool operator==(const ExponentVector&, const ExponentVector&) = default;
  friend std::strong_ordering operator<=>(const ExponentVector& a, const ExponentVector& b) {
    for (std::size_t w = 0; w < kWords; ++w) {
      if (a.words_[w] != b.words_[w]) return a.words_[w] <=> b.words_[w];
    }
    return std::strong_ordering::equal;
  }

  std::size_t hash() const {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (auto w : words_) {
      h ^= w;
      h *= 0xBF58476D1CE4E5B9ULL;
      h ^= h >> 31;
    }
    return static_cast<std::size_t>(h);
  }

  std::vector<std::int32_t> to_vector(std::size_t arity) const {
    std::vector<std::int32_t> v(arity);
    for (std::size_t i = 0; i < arity; ++i) v[i] = (*this)[i];
    return v;
  }

 private:
  static constexpr unsigned shift(std::size_t i) { return static_cast<unsigned>(48 - 16 * (i % 4)); }
  std::array<std::uint64_t, kWords> words_;
};

struct Term {
  ExponentVector exponents;
  BigInt coeff;
  friend bool operator==(const Term&, const Term&) = default;
};

class LaurentPolynomial {
 public:
  LaurentPolynomial() = default;
  explicit LaurentPolynomial(std::size_t arity);

  static LaurentPolynomial zero(std::size_t arity) { return LaurentPolynomial(arity); }
  static LaurentPolynomial constant(std::size_t arity, BigInt c);
  static LaurentPolynomial monomial(std::size_t arity, const ExponentVector& e, BigInt c = 1);
  /// The variable x_{i+1} (0-based index i).
  static LaurentPolynomial variable(std::size_t arity, std::size_t i);

  /// Builds from arbitrary terms: sorts, merges duplicates, drops zeros.
  static LaurentPolynomial from_terms(std::size_t arity, std::vector<Term> terms);
  /// Adopts terms that are already ascending, distinct and nonzero.
  static LaurentPolynomial from_sorted_terms(std::size_t arity, std::vector<Term> terms);

  std::size_t arity() const { return arity_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }

  /// True iff this is a single monomial with coefficient one.
  bool is_unit_monomial() const { return terms_.size() == 1 && terms_.front().coeff == 1; }

  friend bool operator==(const LaurentPolynomial&, const LaurentPolynomial&) = default;

  LaurentPolynomial operator-() const;

 private:
  std::size_t arity_ = 0;
  std::vector<Term> terms_;  // ascending lex, nonzero coefficients
};

LaurentPolynomial lp_add(const LaurentPolynomial& a, const LaurentPolynomial& b,
                         const Limits& limits = {});
LaurentPolynomial lp_sub(const LaurentPolynomial& a, const LaurentPolynomial& b,
                         const Limits& limits = {});
LaurentPolynomial lp_mul(const LaurentPolynomial& a, const LaurentPolynomial& b,
                         const Limits& limits = {});
LaurentPolynomial lp_pow(const LaurentPolynomial& a, unsigned exponent, const Limits& limits = {});

/// Exact quotient num / den by leading-term elimination in lexicographic
/// order. Throws NotDivisible as soon as a remainder term is provably
/// outside the quotient's Newton box or a coefficient does not divide.
LaurentPolynomial lp_div_exact(const LaurentPolynomial& num, const LaurentPolynomial& den,
                               const Limits& limits = {});

/// Componentwise minimum over all exponent vectors. Throws ZeroPolynomial.
ExponentVector lp_min_exponents(const LaurentPolynomial& p);
ExponentVector lp_max_exponents(const LaurentPolynomial& p);

bool lp_coeffs_nonnegative(const LaurentPolynomial& p);

inline LaurentPolynomial operator+(const LaurentPolynomial& a, const LaurentPolynomial& b) {
  return lp_add(a, b);
}
inline LaurentPolynomial operator-(const LaurentPolynomial& a, const LaurentPolynomial& b) {
  return lp_sub(a, b);
}
inline LaurentPolynomial operator*(const LaurentPolynomial& a, const LaurentPolynomial& b) {
  return lp_mul(a, b);
}

std::string to_string(const LaurentPolynomial& p);

/// Inverse of to_string. Accepts any term order and repeated monomials;
/// tolerates missing spaces around "+"/"-".
LaurentPolynomial parse_laurent(std::string_view text, std::size_t arity);

}  // namespace clusterdv
