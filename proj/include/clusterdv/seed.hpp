// Exchange matrices, reduced mutation walks and seeds of geometric type.
//
// An ExchangeMatrix is the extended (n + m) x n integer matrix whose top
// n x n block B is skew-symmetrizable and whose bottom m rows C encode the
// tropical coefficients y_j = prod_i u_i^{c_ij}. A Seed stores, next to its
// matrix, the Laurent expansion of each of its n cluster variables in the
// root cluster x_1..x_n and the frozen variables x_{n+1}..x_{n+m}.
//
// Directions are 0-based in the API and 1-based in every text/JSON form.
#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "clusterdv/laurent.hpp"
#include "clusterdv/tropical.hpp"
#include "clusterdv/types.hpp"

namespace clusterdv {

inline constexpr Eigen::Index kMaxRank = 6;

struct InvalidMatrix : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidWalk : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class CoefficientPreset { trivial, principal };

/// Positive integer diagonal S (as a vector, primitive) with SB
/// skew-symmetric, or nullopt. On failure `why` names the offending entry.
std::optional<IntVector> find_symmetrizer(const IntMatrix& exchange, std::string* why = nullptr);

bool is_skew_symmetric(const IntMatrix& exchange);

class ExchangeMatrix {
 public:
  ExchangeMatrix() = default;
  /// `exchange` is n x n, `coefficients` is m x n (m may be zero).
  explicit ExchangeMatrix(IntMatrix exchange, IntMatrix coefficients = IntMatrix(0, 0));

  static ExchangeMatrix with_preset(IntMatrix exchange, CoefficientPreset preset);

  Eigen::Index rank() const { return extended_.cols(); }
  Eigen::Index frozen() const { return extended_.rows() - extended_.cols(); }
  std::size_t arity() const { return static_cast<std::size_t>(extended_.rows()); }

  const IntMatrix& extended() const { return extended_; }
  IntMatrix exchange() const { return extended_.topRows(rank()); }
  IntMatrix coefficient_rows() const { return extended_.bottomRows(frozen()); }
  const IntVector& symmetrizer() const { return symmetrizer_; }
  bool skew_symmetric() const { return skew_symmetric_; }

  Integer operator()(Eigen::Index i, Eigen::Index j) const { return extended_(i, j); }

  /// y_j = prod_i u_i^{c_ij}, read off column j of the coefficient rows.
  std::vector<TropicalElement> coefficients() const;

  friend bool operator==(const ExchangeMatrix& a, const ExchangeMatrix& b) {
    return a.extended_.rows() == b.extended_.rows() && a.extended_.cols() == b.extended_.cols() &&
           a.extended_ == b.extended_;
  }

 private:
  friend ExchangeMatrix matrix_mutate(const ExchangeMatrix&, Eigen::Index);
  IntMatrix extended_;
  IntVector symmetrizer_;
  bool skew_symmetric_ = true;
};

/// b'_ij = -b_ij if i == k or j == k, else b_ij + b_ik [-b_kj]_+ + [b_ik]_+ b_kj,
/// over all n + m rows.
ExchangeMatrix matrix_mutate(const ExchangeMatrix& matrix, Eigen::Index k);

/// Sign-pattern digraph (edge i -> j iff b_ij > 0) has no oriented cycle.
bool is_acyclic(const IntMatrix& exchange);
inline bool is_acyclic(const ExchangeMatrix& m) { return is_acyclic(m.exchange()); }

/// Non-backtracking direction sequence; a path in the n-regular tree.
class MutationWalk {
 public:
  MutationWalk() = default;
  /// 0-based directions; throws InvalidWalk on an immediate repeat or a
  /// negative entry.
  explicit MutationWalk(std::vector<int> directions);

  /// Parses "1,2,1" (1-based, empty string allowed) and checks k <= n.
  static MutationWalk parse(std::string_view text, int rank);

  const std::vector<int>& directions() const { return directions_; }
  std::size_t size() const { return directions_.size(); }
  bool empty() const { return directions_.empty(); }
  int operator[](std::size_t i) const { return directions_[i]; }
  int back() const { return directions_.back(); }

  /// Throws IndexOutOfRange when some direction is >= rank.
  void check_rank(int rank) const;

  MutationWalk prefix(std::size_t length) const;
  MutationWalk reversed() const;
  /// The walk followed by one more step; steps back instead when k
  /// undoes the last direction.
  MutationWalk step(int k) const;

  std::string to_string() const;          // "1,2,1"
  std::vector<int> one_based() const;

  friend bool operator==(const MutationWalk&, const MutationWalk&) = default;

 private:
  std::vector<int> directions_;
};

class Seed {
 public:
  using VarPtr = std::shared_ptr<const LaurentPolynomial>;

  Seed() = default;
  Seed(ExchangeMatrix matrix, std::vector<VarPtr> vars, MutationWalk path);

  /// Initial seed: vars[l] is the monomial x_{l+1}.
  static Seed root(ExchangeMatrix matrix);

  const ExchangeMatrix& matrix() const { return matrix_; }
  Eigen::Index rank() const { return matrix_.rank(); }
  std::size_t arity() const { return matrix_.arity(); }
  const LaurentPolynomial& var(Eigen::Index l) const { return *vars_[static_cast<std::size_t>(l)]; }
  const std::vector<VarPtr>& vars() const { return vars_; }
  /// Reduced walk from the root to this seed.
  const MutationWalk& path() const { return path_; }
  std::size_t total_terms() const;

  /// Equality as seeds: same matrix, same expansions in the same positions.
  friend bool operator==(const Seed& a, const Seed& b);

 private:
  ExchangeMatrix matrix_;
  std::vector<VarPtr> vars_;
  MutationWalk path_;
};

/// Mutation in direction k (0-based). The new variable is
///   (prod_j x_j^{[b_jk]_+} + prod_j x_j^{[-b_jk]_+}) / x_k
/// with j ranging over mutable and frozen rows, computed by exact division.
/// Throws NotDivisible (never expected) or ResourceExceeded.
Seed seed_mutate(const Seed& seed, Eigen::Index k, const Limits& limits = {});

/// Left-to-right composition of seed_mutate. The optional visitor sees
/// every intermediate seed including the start.
Seed apply_walk(const Seed& start, const MutationWalk& walk, const Limits& limits = {},
                const std::function<void(const Seed&)>& visit = {});

/// Canonical form invariant under relabeling cluster positions.
struct SeedKey {
  std::string text;
  friend bool operator==(const SeedKey&, const SeedKey&) = default;
  friend auto operator<=>(const SeedKey&, const SeedKey&) = default;
};

SeedKey seed_key(const Seed& seed);

/// Seed with positions relabeled: new position a holds old position perm[a].
Seed permute_positions(const Seed& seed, const std::vector<Eigen::Index>& perm);

/// Matrix JSON: {"n": int, "B": [[...]], "coeffs": "trivial" | "principal" | {"C": [[...]]}}
ExchangeMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const ExchangeMatrix& m);
ExchangeMatrix load_matrix_file(const std::string& path);

nlohmann::json to_json(const IntVector& v);

}  // namespace clusterdv

template <>
struct std::hash<clusterdv::SeedKey> {
  std::size_t operator()(const clusterdv::SeedKey& k) const noexcept {
    return std::hash<std::string>{}(k.text);
  }
};
