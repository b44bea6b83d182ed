#include "clusterdv/seed.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace clusterdv {

namespace {

std::string entry(Eigen::Index i, Eigen::Index j) {
  return "B[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]";
}

}  // namespace

bool is_skew_symmetric(const IntMatrix& b) {
  return b.rows() == b.cols() && b == -b.transpose();
}

std::optional<IntVector> find_symmetrizer(const IntMatrix& b, std::string* why) {
  auto fail = [&](std::string msg) -> std::optional<IntVector> {
    if (why) *why = std::move(msg);
    return std::nullopt;
  };
  const Eigen::Index n = b.rows();
  if (b.cols() != n) return fail("exchange matrix is not square");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (b(i, i) != 0) return fail(entry(i, i) + " is nonzero on the diagonal");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const bool ok = (b(i, j) == 0 && b(j, i) == 0) || (b(i, j) > 0 && b(j, i) < 0) ||
                      (b(i, j) < 0 && b(j, i) > 0);
      if (!ok) return fail(entry(i, j) + " and " + entry(j, i) + " do not have opposite signs");
    }
  }

  // s_j / s_i = -b_ij / b_ji along nonzero entries; propagate as fractions.
  std::vector<Integer> num(static_cast<std::size_t>(n), 0), den(static_cast<std::size_t>(n), 0);
  for (Eigen::Index start = 0; start < n; ++start) {
    if (num[start] != 0) continue;
    num[start] = 1;
    den[start] = 1;
    std::vector<Eigen::Index> stack{start};
    while (!stack.empty()) {
      const Eigen::Index i = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (b(i, j) == 0) continue;
        Integer nj = num[i] * b(i, j);
        Integer dj = den[i] * -b(j, i);
        if (dj < 0) {
          nj = -nj;
          dj = -dj;
        }
        const Integer g = std::gcd(nj, dj);
        nj /= g;
        dj /= g;
        if (num[j] == 0) {
          num[j] = nj;
          den[j] = dj;
          stack.push_back(j);
        } else if (num[j] != nj || den[j] != dj) {
          return fail(entry(i, j) + " is inconsistent with a diagonal symmetrizer");
        }
      }
    }
  }
  Integer l = 1;
  for (auto d : den) l = std::lcm(l, d);
  IntVector s(n);
  Integer g = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i) = num[i] * (l / den[i]);
    g = std::gcd(g, s(i));
  }
  if (g > 1) s /= g;
  return s;
}

ExchangeMatrix::ExchangeMatrix(IntMatrix exchange, IntMatrix coefficients) {
  const Eigen::Index n = exchange.rows();
  if (n < 1 || n > kMaxRank) {
    throw InvalidMatrix("rank n = " + std::to_string(n) + " outside supported range [1, " +
                        std::to_string(kMaxRank) + "]");
  }
  if (exchange.cols() != n) throw InvalidMatrix("exchange matrix B must be square");
  if (coefficients.size() == 0) coefficients.resize(0, n);
  if (coefficients.cols() != n) {
    throw InvalidMatrix("coefficient matrix C must have n = " + std::to_string(n) + " columns");
  }
  if (static_cast<std::size_t>(n + coefficients.rows()) > kMaxVars) {
    throw InvalidMatrix("n + m exceeds " + std::to_string(kMaxVars));
  }
  std::string why;
  auto s = find_symmetrizer(exchange, &why);
  if (!s) throw InvalidMatrix("not skew-symmetrizable: " + why);
  symmetrizer_ = std::move(*s);
  skew_symmetric_ = is_skew_symmetric(exchange);
  extended_.resize(n + coefficients.rows(), n);
  extended_ << exchange, coefficients;
}

ExchangeMatrix ExchangeMatrix::with_preset(IntMatrix exchange, CoefficientPreset preset) {
  const Eigen::Index n = exchange.rows();
  if (preset == CoefficientPreset::principal) {
    return ExchangeMatrix(std::move(exchange), IntMatrix::Identity(n, n));
  }
  return ExchangeMatrix(std::move(exchange));
}

std::vector<TropicalElement> ExchangeMatrix::coefficients() const {
  std::vector<TropicalElement> y;
  const IntMatrix c = coefficient_rows();
  for (Eigen::Index j = 0; j < rank(); ++j) y.emplace_back(IntVector(c.col(j)));
  return y;
}

ExchangeMatrix matrix_mutate(const ExchangeMatrix& matrix, Eigen::Index k) {
  const Eigen::Index n = matrix.rank();
  if (k < 0 || k >= n) throw IndexOutOfRange("matrix_mutate: direction out of range");
  const IntMatrix& b = matrix.extended();
  ExchangeMatrix out = matrix;
  IntMatrix& r = out.extended_;
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == k || j == k) {
        r(i, j) = -b(i, j);
      } else {
        r(i, j) = b(i, j) + b(i, k) * positive_part(-b(k, j)) + positive_part(b(i, k)) * b(k, j);
      }
    }
  }
  return out;
}

bool is_acyclic(const IntMatrix& b) {
  // Kahn's algorithm on the sign-pattern digraph.
  const Eigen::Index n = b.rows();
  std::vector<int> indegree(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (b(i, j) > 0) ++indegree[j];
  std::vector<Eigen::Index> ready;
  for (Eigen::Index j = 0; j < n; ++j)
    if (indegree[j] == 0) ready.push_back(j);
  Eigen::Index removed = 0;
  while (!ready.empty()) {
    const Eigen::Index i = ready.back();
    ready.pop_back();
    ++removed;
    for (Eigen::Index j = 0; j < n; ++j)
      if (b(i, j) > 0 && --indegree[j] == 0) ready.push_back(j);
  }
  return removed == n;
}

// --- MutationWalk -----------------------------------------------------------

MutationWalk::MutationWalk(std::vector<int> directions) : directions_(std::move(directions)) {
  for (std::size_t i = 0; i < directions_.size(); ++i) {
    if (directions_[i] < 0) throw InvalidWalk("walk has a negative direction");
    if (i > 0 && directions_[i] == directions_[i - 1]) {
      throw InvalidWalk("walk not reduced: direction " + std::to_string(directions_[i] + 1) +
                        " repeated at step " + std::to_string(i + 1));
    }
  }
}

MutationWalk MutationWalk::parse(std::string_view text, int rank) {
  std::vector<int> dirs;
  std::string s(text);
  std::erase_if(s, [](char c) { return c == ' ' || c == '\t'; });
  if (!s.empty()) {
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty() || !std::all_of(item.begin(), item.end(), ::isdigit)) {
        throw InvalidWalk("walk: malformed direction '" + item + "'");
      }
      const int k = item.size() > 9 ? 0 : std::stoi(item);
      if (k < 1 || k > rank) {
        throw InvalidWalk("walk: direction " + item + " outside 1.." + std::to_string(rank));
      }
      dirs.push_back(k - 1);
    }
    if (s.back() == ',') throw InvalidWalk("walk: trailing comma");
  }
  return MutationWalk(std::move(dirs));
}

void MutationWalk::check_rank(int rank) const {
  for (int k : directions_) {
    if (k >= rank) throw IndexOutOfRange("walk direction " + std::to_string(k + 1) + " exceeds rank");
  }
}

MutationWalk MutationWalk::prefix(std::size_t length) const {
  MutationWalk w;
  w.directions_.assign(directions_.begin(),
                       directions_.begin() + static_cast<std::ptrdiff_t>(std::min(length, size())));
  return w;
}

MutationWalk MutationWalk::reversed() const {
  MutationWalk w = *this;
  std::reverse(w.directions_.begin(), w.directions_.end());
  return w;
}

MutationWalk MutationWalk::step(int k) const {
  MutationWalk w = *this;
  if (!w.directions_.empty() && w.directions_.back() == k) {
    w.directions_.pop_back();
  } else {
    w.directions_.push_back(k);
  }
  return w;
}

std::string MutationWalk::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < directions_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(directions_[i] + 1);
  }
  return s;
}

std::vector<int> MutationWalk::one_based() const {
  std::vector<int> v = directions_;
  for (auto& k : v) ++k;
  return v;
}

// --- Seed -------------------------------------------------------------------

Seed::Seed(ExchangeMatrix matrix, std::vector<VarPtr> vars, MutationWalk path)
    : matrix_(std::move(matrix)), vars_(std::move(vars)), path_(std::move(path)) {
  if (static_cast<Eigen::Index>(vars_.size()) != matrix_.rank()) {
    throw std::invalid_argument("seed: need one expansion per mutable direction");
  }
}

Seed Seed::root(ExchangeMatrix matrix) {
  std::vector<VarPtr> vars;
  for (Eigen::Index l = 0; l < matrix.rank(); ++l) {
    vars.push_back(std::make_shared<const LaurentPolynomial>(
        LaurentPolynomial::variable(matrix.arity(), static_cast<std::size_t>(l))));
  }
  return Seed(std::move(matrix), std::move(vars), MutationWalk{});
}

std::size_t Seed::total_terms() const {
  std::size_t total = 0;
  for (const auto& v : vars_) total += v->size();
  return total;
}

bool operator==(const Seed& a, const Seed& b) {
  if (!(a.matrix_ == b.matrix_) || a.vars_.size() != b.vars_.size()) return false;
  for (std::size_t l = 0; l < a.vars_.size(); ++l) {
    if (a.vars_[l] != b.vars_[l] && !(*a.vars_[l] == *b.vars_[l])) return false;
  }
  return true;
}

Seed seed_mutate(const Seed& seed, Eigen::Index k, const Limits& limits) {
  const Eigen::Index n = seed.rank();
  if (k < 0 || k >= n) throw IndexOutOfRange("seed_mutate: direction out of range");
  const IntMatrix& b = seed.matrix().extended();
  const std::size_t arity = seed.arity();

  // Frozen variables are plain monomials in every expansion.
  ExponentVector frozen_pos, frozen_neg;
  for (Eigen::Index r = n; r < b.rows(); ++r) {
    frozen_pos.set(static_cast<std::size_t>(r), static_cast<std::int32_t>(positive_part(b(r, k))));
    frozen_neg.set(static_cast<std::size_t>(r), static_cast<std::int32_t>(positive_part(-b(r, k))));
  }
  LaurentPolynomial pos = LaurentPolynomial::monomial(arity, frozen_pos);
  LaurentPolynomial neg = LaurentPolynomial::monomial(arity, frozen_neg);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Integer e = b(j, k);
    if (e > 0) {
      pos = lp_mul(pos, lp_pow(seed.var(j), static_cast<unsigned>(e), limits), limits);
    } else if (e < 0) {
      neg = lp_mul(neg, lp_pow(seed.var(j), static_cast<unsigned>(-e), limits), limits);
    }
  }
  const LaurentPolynomial numerator = lp_add(pos, neg, limits);
  auto fresh = std::make_shared<const LaurentPolynomial>(lp_div_exact(numerator, seed.var(k), limits));

  std::vector<Seed::VarPtr> vars = seed.vars();
  vars[static_cast<std::size_t>(k)] = std::move(fresh);
  Seed out(matrix_mutate(seed.matrix(), k), std::move(vars), seed.path().step(static_cast<int>(k)));
  if (out.total_terms() > limits.max_seed_terms) {
    throw ResourceExceeded("seed exceeds " + std::to_string(limits.max_seed_terms) + " terms");
  }
  return out;
}

Seed apply_walk(const Seed& start, const MutationWalk& walk, const Limits& limits,
                const std::function<void(const Seed&)>& visit) {
  walk.check_rank(static_cast<int>(start.rank()));
  Seed s = start;
  if (visit) visit(s);
  for (int k : walk.directions()) {
    s = seed_mutate(s, k, limits);
    if (visit) visit(s);
  }
  return s;
}

Seed permute_positions(const Seed& seed, const std::vector<Eigen::Index>& perm) {
  const Eigen::Index n = seed.rank();
  if (static_cast<Eigen::Index>(perm.size()) != n) throw std::invalid_argument("bad permutation");
  const IntMatrix& b = seed.matrix().extended();
  IntMatrix top(n, n), c(seed.matrix().frozen(), n);
  std::vector<Seed::VarPtr> vars;
  for (Eigen::Index a = 0; a < n; ++a) {
    vars.push_back(seed.vars()[static_cast<std::size_t>(perm[a])]);
    for (Eigen::Index bcol = 0; bcol < n; ++bcol) top(a, bcol) = b(perm[a], perm[bcol]);
    for (Eigen::Index r = 0; r < c.rows(); ++r) c(r, a) = b(n + r, perm[a]);
  }
  return Seed(ExchangeMatrix(std::move(top), std::move(c)), std::move(vars), seed.path());
}

SeedKey seed_key(const Seed& seed) {
  const Eigen::Index n = seed.rank();
  std::vector<std::string> text;
  for (Eigen::Index l = 0; l < n; ++l) text.push_back(to_string(seed.var(l)));
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return text[a] < text[b]; });
  const IntMatrix& b = seed.matrix().extended();
  std::ostringstream os;
  for (auto p : perm) os << text[p] << ';';
  os << '|';
  for (Eigen::Index r = 0; r < b.rows(); ++r) {
    const Eigen::Index row = r < n ? perm[r] : r;
    for (Eigen::Index a = 0; a < n; ++a) os << b(row, perm[a]) << ',';
  }
  return SeedKey{os.str()};
}

// --- JSON -------------------------------------------------------------------

namespace {

IntMatrix rows_from_json(const nlohmann::json& j, const char* name, Eigen::Index cols) {
  if (!j.is_array()) throw InvalidMatrix(std::string(name) + " must be an array of rows");
  IntMatrix m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidMatrix(std::string(name) + " row " + std::to_string(i + 1) + " must have " +
                          std::to_string(cols) + " entries");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!row[c].is_number_integer()) {
        throw InvalidMatrix(std::string(name) + "[" + std::to_string(i + 1) + "][" +
                            std::to_string(c + 1) + "] is not an integer");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c].get<Integer>();
    }
  }
  return m;
}

nlohmann::json rows_to_json(const IntMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ExchangeMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidMatrix("matrix JSON must be an object");
  if (!j.contains("n") || !j["n"].is_number_integer()) throw InvalidMatrix("missing integer field n");
  const auto n = j["n"].get<Integer>();
  if (n < 1 || n > kMaxRank) {
    throw InvalidMatrix("n = " + std::to_string(n) + " outside supported range [1, " +
                        std::to_string(kMaxRank) + "]");
  }
  if (!j.contains("B")) throw InvalidMatrix("missing field B");
  IntMatrix b = rows_from_json(j["B"], "B", n);
  if (b.rows() != n) throw InvalidMatrix("B must have n = " + std::to_string(n) + " rows");

  const nlohmann::json coeffs = j.value("coeffs", nlohmann::json("trivial"));
  if (coeffs.is_string()) {
    const auto name = coeffs.get<std::string>();
    if (name == "trivial") return ExchangeMatrix::with_preset(std::move(b), CoefficientPreset::trivial);
    if (name == "principal") {
      return ExchangeMatrix::with_preset(std::move(b), CoefficientPreset::principal);
    }
    throw InvalidMatrix("coeffs must be \"trivial\", \"principal\" or {\"C\": [...]}");
  }
  if (coeffs.is_object() && coeffs.contains("C")) {
    return ExchangeMatrix(std::move(b), rows_from_json(coeffs["C"], "C", n));
  }
  throw InvalidMatrix("coeffs must be \"trivial\", \"principal\" or {\"C\": [...]}");
}

nlohmann::json matrix_to_json(const ExchangeMatrix& m) {
  const Eigen::Index n = m.rank();
  nlohmann::json j;
  j["n"] = n;
  j["B"] = rows_to_json(m.exchange());
  const IntMatrix c = m.coefficient_rows();
  if (c.rows() == 0) {
    j["coeffs"] = "trivial";
  } else if (c.rows() == n && c == IntMatrix::Identity(n, n)) {
    j["coeffs"] = "principal";
  } else {
    j["coeffs"] = {{"C", rows_to_json(c)}};
  }
  return j;
}

ExchangeMatrix load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidMatrix("cannot open matrix file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidMatrix(path + ": " + e.what());
  }
  return matrix_from_json(j);
}

nlohmann::json to_json(const IntVector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace clusterdv
