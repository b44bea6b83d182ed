#include "clusterdv/laurent.hpp"

#include <algorithm>
#include <cctype>
#include <queue>
#include <sstream>

namespace clusterdv {

namespace {

void require_same_arity(const LaurentPolynomial& a, const LaurentPolynomial& b, const char* op) {
  if (a.arity() != b.arity()) {
    std::ostringstream os;
    os << op << ": arity mismatch (" << a.arity() << " vs " << b.arity() << ")";
    throw ArityMismatch(os.str());
  }
}

void require_arity(std::size_t arity) {
  if (arity > kMaxVars) {
    throw std::invalid_argument("arity " + std::to_string(arity) + " exceeds " +
                                std::to_string(kMaxVars));
  }
}

void check_cap(std::size_t size, const Limits& limits, const char* op) {
  if (size > limits.max_terms) {
    throw ResourceExceeded(std::string(op) + ": more than " + std::to_string(limits.max_terms) +
                           " terms");
  }
}

void check_work(std::uint64_t work, const Limits& limits, const char* op) {
  if (work > limits.max_work) {
    throw ResourceExceeded(std::string(op) + ": more than " + std::to_string(limits.max_work) +
                           " term products");
  }
}

// Heap entry for the product of the i-th and j-th terms (counted from the
// top of each operand).
struct HeapEntry {
  ExponentVector exponents;
  std::uint32_t i;
  std::uint32_t j;
};

struct HeapLess {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    return a.exponents < b.exponents;
  }
};

using ProductHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapLess>;

// Reversed view over an ascending term vector.
struct Descending {
  const std::vector<Term>& t;
  const Term& operator[](std::size_t k) const { return t[t.size() - 1 - k]; }
  std::size_t size() const { return t.size(); }
};

}  // namespace

LaurentPolynomial::LaurentPolynomial(std::size_t arity) : arity_(arity) { require_arity(arity); }

LaurentPolynomial LaurentPolynomial::constant(std::size_t arity, BigInt c) {
  return monomial(arity, ExponentVector{}, std::move(c));
}

LaurentPolynomial LaurentPolynomial::monomial(std::size_t arity, const ExponentVector& e,
                                              BigInt c) {
  LaurentPolynomial p(arity);
  if (c != 0) p.terms_.push_back({e, std::move(c)});
  return p;
}

LaurentPolynomial LaurentPolynomial::variable(std::size_t arity, std::size_t i) {
  if (i >= arity) throw std::out_of_range("variable index out of range");
  return monomial(arity, ExponentVector::unit(i));
}

LaurentPolynomial LaurentPolynomial::from_terms(std::size_t arity, std::vector<Term> terms) {
  LaurentPolynomial p(arity);
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.exponents < b.exponents; });
  for (auto& t : terms) {
    for (std::size_t k = arity; k < kMaxVars; ++k) {
      if (t.exponents[k] != 0) throw std::invalid_argument("exponent beyond arity");
    }
    if (!p.terms_.empty() && p.terms_.back().exponents == t.exponents) {
      p.terms_.back().coeff += t.coeff;
    } else {
      p.terms_.push_back(std::move(t));
    }
  }
  std::erase_if(p.terms_, [](const Term& t) { return t.coeff == 0; });
  return p;
}

LaurentPolynomial LaurentPolynomial::from_sorted_terms(std::size_t arity, std::vector<Term> terms) {
  LaurentPolynomial p(arity);
  p.terms_ = std::move(terms);
  return p;
}

LaurentPolynomial LaurentPolynomial::operator-() const {
  LaurentPolynomial r = *this;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

namespace {

LaurentPolynomial merge(const LaurentPolynomial& a, const LaurentPolynomial& b, bool negate_b,
                        const Limits& limits, const char* op) {
  require_same_arity(a, b, op);
  const auto& x = a.terms();
  const auto& y = b.terms();
  std::vector<Term> out;
  out.reserve(x.size() + y.size());
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i].exponents < y[j].exponents)) {
      out.push_back(x[i++]);
    } else if (i == x.size() || y[j].exponents < x[i].exponents) {
      out.push_back(y[j++]);
      if (negate_b) out.back().coeff = -out.back().coeff;
    } else {
      BigInt c;
      if (negate_b) {
        mpz_sub(c.get_mpz_t(), x[i].coeff.get_mpz_t(), y[j].coeff.get_mpz_t());
      } else {
        mpz_add(c.get_mpz_t(), x[i].coeff.get_mpz_t(), y[j].coeff.get_mpz_t());
      }
      if (c != 0) out.push_back({x[i].exponents, std::move(c)});
      ++i;
      ++j;
    }
  }
  check_cap(out.size(), limits, op);
  return LaurentPolynomial::from_sorted_terms(a.arity(), std::move(out));
}

}  // namespace

LaurentPolynomial lp_add(const LaurentPolynomial& a, const LaurentPolynomial& b,
                         const Limits& limits) {
  return merge(a, b, false, limits, "lp_add");
}

LaurentPolynomial lp_sub(const LaurentPolynomial& a, const LaurentPolynomial& b,
                         const Limits& limits) {
  return merge(a, b, true, limits, "lp_sub");
}

namespace {

void check_exponent_range(const ExponentVector& lo, const ExponentVector& hi, std::size_t arity,
                          const char* op) {
  for (std::size_t k = 0; k < arity; ++k) {
    if (lo[k] < -kMaxExponent || hi[k] > kMaxExponent) {
      throw ResourceExceeded(std::string(op) + ": exponent range exceeded");
    }
  }
}

// Open-addressing accumulator keyed by exponent vector.
class TermAccumulator {
 public:
  TermAccumulator(std::size_t expected, const Limits& limits) : limits_(limits) {
    std::size_t cap = 16;
    while (cap < 2 * expected) cap <<= 1;
    slots_.assign(cap, 0);
    terms_.reserve(expected);
  }

  void add_product(const ExponentVector& e, const BigInt& a, const BigInt& b) {
    std::size_t mask = slots_.size() - 1;
    std::size_t pos = e.hash() & mask;
    while (true) {
      const std::uint32_t slot = slots_[pos];
      if (slot == 0) break;
      Term& t = terms_[slot - 1];
      if (t.exponents == e) {
        mpz_addmul(t.coeff.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        return;
      }
      pos = (pos + 1) & mask;
    }
    terms_.push_back({e, BigInt()});
    mpz_mul(terms_.back().coeff.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    check_cap(terms_.size(), limits_, "lp_mul");
    slots_[pos] = static_cast<std::uint32_t>(terms_.size());
    if (2 * terms_.size() > slots_.size()) grow();
  }

  std::vector<Term> take_sorted() {
    std::erase_if(terms_, [](const Term& t) { return t.coeff == 0; });
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& x, const Term& y) { return x.exponents < y.exponents; });
    return std::move(terms_);
  }

 private:
  void grow() {
    slots_.assign(slots_.size() * 2, 0);
    const std::size_t mask = slots_.size() - 1;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      std::size_t pos = terms_[i].exponents.hash() & mask;
      while (slots_[pos] != 0) pos = (pos + 1) & mask;
      slots_[pos] = static_cast<std::uint32_t>(i + 1);
    }
  }

  const Limits& limits_;
  std::vector<std::uint32_t> slots_;
  std::vector<Term> terms_;
};

}  // namespace

LaurentPolynomial lp_mul(const LaurentPolynomial& a, const LaurentPolynomial& b,
                         const Limits& limits) {
  require_same_arity(a, b, "lp_mul");
  const std::size_t arity = a.arity();
  if (a.is_zero() || b.is_zero()) return LaurentPolynomial::zero(arity);
  check_exponent_range(lp_min_exponents(a) + lp_min_exponents(b),
                       lp_max_exponents(a) + lp_max_exponents(b), arity, "lp_mul");

  const auto& small = a.size() <= b.size() ? a.terms() : b.terms();
  const auto& large = a.size() <= b.size() ? b.terms() : a.terms();
  if (small.size() == 1) {
    // A monomial factor preserves the order.
    std::vector<Term> out;
    out.reserve(large.size());
    for (const auto& t : large) {
      out.push_back({t.exponents + small[0].exponents, BigInt(t.coeff * small[0].coeff)});
    }
    return LaurentPolynomial::from_sorted_terms(arity, std::move(out));
  }

  check_work(std::uint64_t{small.size()} * large.size(), limits, "lp_mul");
  TermAccumulator acc(std::max(large.size(), std::size_t{64}), limits);
  for (const auto& s : small) {
    for (const auto& l : large) acc.add_product(s.exponents + l.exponents, s.coeff, l.coeff);
  }
  return LaurentPolynomial::from_sorted_terms(arity, acc.take_sorted());
}

namespace {

// a * a using each unordered pair of terms once.
LaurentPolynomial square(const LaurentPolynomial& a, const Limits& limits) {
  const auto& t = a.terms();
  check_work(std::uint64_t{t.size()} * (t.size() + 1) / 2, limits, "lp_pow");
  TermAccumulator acc(std::max(2 * t.size(), std::size_t{64}), limits);
  BigInt two_c;
  for (std::size_t i = 0; i < t.size(); ++i) {
    acc.add_product(t[i].exponents + t[i].exponents, t[i].coeff, t[i].coeff);
    mpz_mul_2exp(two_c.get_mpz_t(), t[i].coeff.get_mpz_t(), 1);
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      acc.add_product(t[i].exponents + t[j].exponents, two_c, t[j].coeff);
    }
  }
  return LaurentPolynomial::from_sorted_terms(a.arity(), acc.take_sorted());
}

}  // namespace

LaurentPolynomial lp_pow(const LaurentPolynomial& a, unsigned exponent, const Limits& limits) {
  if (exponent == 0) return LaurentPolynomial::constant(a.arity(), 1);
  if (exponent == 1 || a.size() <= 1) {
    LaurentPolynomial result = a;
    for (unsigned k = 1; k < exponent; ++k) result = lp_mul(result, a, limits);
    return result;
  }
  ExponentVector lo = lp_min_exponents(a), hi = lp_max_exponents(a);
  for (std::size_t k = 0; k < a.arity(); ++k) {
    const std::int64_t l = std::int64_t{lo[k]} * exponent, h = std::int64_t{hi[k]} * exponent;
    if (l < -kMaxExponent || h > kMaxExponent) throw ResourceExceeded("lp_pow: exponent range exceeded");
  }
  // Binary powering; squares are the expensive steps.
  LaurentPolynomial result = LaurentPolynomial::constant(a.arity(), 1);
  LaurentPolynomial base = a;
  while (true) {
    if (exponent & 1U) result = lp_mul(result, base, limits);
    exponent >>= 1U;
    if (exponent == 0) break;
    base = square(base, limits);
  }
  return result;
}

LaurentPolynomial lp_div_exact(const LaurentPolynomial& num, const LaurentPolynomial& den,
                               const Limits& limits) {
  require_same_arity(num, den, "lp_div_exact");
  if (den.is_zero()) throw std::domain_error("lp_div_exact: division by zero");
  const std::size_t arity = num.arity();
  if (num.is_zero()) return LaurentPolynomial::zero(arity);

  Descending n{num.terms()};
  Descending d{den.terms()};
  const Term& lead = d[0];

  // Newton polytopes add under multiplication, so every quotient exponent
  // lies in this box.
  const ExponentVector lo = lp_min_exponents(num) - lp_min_exponents(den);
  const ExponentVector hi = lp_max_exponents(num) - lp_max_exponents(den);
  for (std::size_t k = 0; k < arity; ++k) {
    if (lo[k] > hi[k]) throw NotDivisible("lp_div_exact: Newton box is empty");
  }
  auto in_box = [&](const ExponentVector& e) {
    for (std::size_t k = 0; k < arity; ++k) {
      if (e[k] < lo[k] || e[k] > hi[k]) return false;
    }
    return true;
  };

  std::vector<Term> quotient;  // descending while building
  ProductHeap heap;
  std::size_t next = 0;
  BigInt acc, q, r;
  while (next < n.size() || !heap.empty()) {
    ExponentVector current;
    if (heap.empty() || (next < n.size() && heap.top().exponents < n[next].exponents)) {
      current = n[next].exponents;
    } else {
      current = heap.top().exponents;
    }
    acc = 0;
    if (next < n.size() && n[next].exponents == current) acc = n[next++].coeff;
    // Subtract every already-committed quotient term times den at `current`.
    while (!heap.empty() && heap.top().exponents == current) {
      const HeapEntry e = heap.top();
      heap.pop();
      mpz_submul(acc.get_mpz_t(), quotient[e.i].coeff.get_mpz_t(), d[e.j].coeff.get_mpz_t());
      if (e.j + 1 < d.size()) {
        heap.push({quotient[e.i].exponents + d[e.j + 1].exponents, e.i, e.j + 1});
      }
    }
    if (acc == 0) continue;

    ExponentVector qe = current - lead.exponents;
    if (!in_box(qe)) throw NotDivisible("lp_div_exact: nonzero remainder");
    mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), acc.get_mpz_t(), lead.coeff.get_mpz_t());
    if (r != 0) throw NotDivisible("lp_div_exact: coefficient does not divide");
    quotient.push_back({qe, q});
    check_cap(quotient.size(), limits, "lp_div_exact");
    check_work(std::uint64_t{quotient.size()} * d.size(), limits, "lp_div_exact");
    if (d.size() > 1) {
      heap.push({qe + d[1].exponents, static_cast<std::uint32_t>(quotient.size() - 1), 1});
    }
  }
  std::reverse(quotient.begin(), quotient.end());
  return LaurentPolynomial::from_sorted_terms(arity, std::move(quotient));
}

ExponentVector lp_min_exponents(const LaurentPolynomial& p) {
  if (p.is_zero()) throw ZeroPolynomial("lp_min_exponents: zero polynomial");
  ExponentVector e = p.terms().front().exponents;
  for (const auto& t : p.terms()) {
    for (std::size_t k = 0; k < p.arity(); ++k) {
      if (t.exponents[k] < e[k]) e.set(k, t.exponents[k]);
    }
  }
  return e;
}

ExponentVector lp_max_exponents(const LaurentPolynomial& p) {
  if (p.is_zero()) throw ZeroPolynomial("lp_max_exponents: zero polynomial");
  ExponentVector e = p.terms().front().exponents;
  for (const auto& t : p.terms()) {
    for (std::size_t k = 0; k < p.arity(); ++k) {
      if (t.exponents[k] > e[k]) e.set(k, t.exponents[k]);
    }
  }
  return e;
}

bool lp_coeffs_nonnegative(const LaurentPolynomial& p) {
  return std::all_of(p.terms().begin(), p.terms().end(),
                     [](const Term& t) { return t.coeff > 0; });
}

std::string to_string(const LaurentPolynomial& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : p.terms()) {
    const bool negative = t.coeff < 0;
    if (first) {
      if (negative) os << '-';
    } else {
      os << (negative ? " - " : " + ");
    }
    first = false;
    const BigInt magnitude = abs(t.coeff);
    bool wrote = false;
    if (magnitude != 1) {
      os << magnitude;
      wrote = true;
    }
    for (std::size_t k = 0; k < p.arity(); ++k) {
      const auto a = t.exponents[k];
      if (a == 0) continue;
      if (wrote) os << '*';
      os << 'x' << (k + 1);
      if (a != 1) os << '^' << a;
      wrote = true;
    }
    if (!wrote) os << '1';
  }
  return os.str();
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::size_t arity) : s_(text), arity_(arity) {}

  LaurentPolynomial parse() {
    std::vector<Term> terms;
    skip();
    if (done()) fail("empty input");
    bool negative = false;
    if (peek() == '-' || peek() == '+') {
      negative = get() == '-';
      skip();
    }
    while (true) {
      Term t = term();
      if (negative) t.coeff = -t.coeff;
      terms.push_back(std::move(t));
      skip();
      if (done()) break;
      const char c = get();
      if (c != '+' && c != '-') fail("expected '+' or '-'");
      negative = c == '-';
      skip();
    }
    return LaurentPolynomial::from_terms(arity_, std::move(terms));
  }

 private:
  Term term() {
    Term t{ExponentVector{}, 1};
    std::vector<long> powers(arity_, 0);
    while (true) {
      skip();
      if (done()) fail("expected factor");
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        t.coeff *= BigInt(digits(), 10);
      } else if (peek() == 'x') {
        get();
        const long idx = small();
        if (idx < 1 || static_cast<std::size_t>(idx) > arity_) fail("variable index out of range");
        long power = 1;
        skip();
        if (!done() && peek() == '^') {
          get();
          skip();
          bool neg = false;
          if (!done() && (peek() == '-' || peek() == '+')) neg = get() == '-';
          power = small();
          if (neg) power = -power;
        }
        powers[static_cast<std::size_t>(idx - 1)] += power;
      } else {
        fail("unexpected character");
      }
      skip();
      if (done() || peek() != '*') break;
      get();
    }
    for (std::size_t k = 0; k < arity_; ++k) {
      if (powers[k] > kMaxExponent || powers[k] < -kMaxExponent) fail("exponent out of range");
      t.exponents.set(k, static_cast<std::int32_t>(powers[k]));
    }
    return t;
  }

  long small() {
    const std::string d = digits();
    if (d.size() > 9) fail("number too large");
    return std::stol(d);
  }

  std::string digits() {
    std::size_t start = pos_;
    while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) fail("expected digits");
    return std::string(s_.substr(start, pos_ - start));
  }

  void skip() {
    while (!done() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  char get() { return s_[pos_++]; }

  [[noreturn]] void fail(const char* what) const {
    throw ParseError(std::string("parse_laurent: ") + what + " at offset " + std::to_string(pos_));
  }

  std::string_view s_;
  std::size_t arity_;
  std::size_t pos_ = 0;
};

}  // namespace

LaurentPolynomial parse_laurent(std::string_view text, std::size_t arity) {
  require_arity(arity);
  std::string_view trimmed = text;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) {
    trimmed.remove_prefix(1);
  }
  if (trimmed == "0") return LaurentPolynomial::zero(arity);
  return Parser(text, arity).parse();
}

}  // namespace clusterdv
