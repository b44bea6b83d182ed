// Walk generation, the per-walk invariant suite, bounded distance search
// and campaign drivers.
//
// A trial follows one reduced walk t_0 - t_1 - ... - t_D from an initial
// seed. For every vertex t_f it re-roots at t_f (a fresh initial seed with
// the matrix of t_f) and expands every cluster variable met along the walk
// in the cluster x_{t_f} by forward mutation. On each such frame it checks:
//
//   laurent                 every exchange divides exactly
//   coefficient_positivity  every expansion has positive coefficients
//                           (skew-symmetric matrices only)
//   route_agreement         d-vectors read off expansions equal the
//                           recurrence d-vectors
//   neighbor_invariance     across the edge t_{f-1} -k- t_f, a variable's
//                           d-vectors agree off component k
//   dvector_positivity      z in x_{t_f} has d = -e_l, otherwise d >= 0
//   involution              mu_k mu_k is the identity on the last edge
//
// For skew-symmetrizable (non skew-symmetric) matrices d-vector positivity
// failures are recorded as findings rather than violations.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "clusterdv/dvector.hpp"
#include "clusterdv/seed.hpp"

namespace clusterdv {

/// Portable generator: std::mt19937_64 (bit-exact across standard
/// libraries) with our own bounded sampling, since the standard
/// distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [lo, hi] by rejection.
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; derives independent per-trial seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

enum class MatrixMode { skew_symmetric, skew_symmetrizable };

/// Random exchange matrix. Skew-symmetric mode draws b_ij in
/// [-b_max, b_max] above the diagonal and mirrors it. Skew-symmetrizable
/// mode draws S = diag(s_i), s_i in [1, 3], and a skew-symmetric A with
/// a_ij a multiple of lcm(s_i, s_j), returning S^{-1} A; it falls back to
/// skew-symmetric mode if no integral candidate appears.
IntMatrix gen_matrix(int rank, int b_max, MatrixMode mode, Rng& rng);
IntMatrix gen_matrix(int rank, int b_max, MatrixMode mode, std::uint64_t seed);

/// Uniformly random reduced walk of the given length.
MutationWalk random_walk(int rank, int length, Rng& rng);

/// n (n-1)^{D-1} for D >= 1, 1 for D = 0.
std::uint64_t walk_count(int rank, int depth);

/// Every reduced walk of length exactly `depth` (or <= depth when
/// include_shorter), in lexicographic order of directions.
void for_each_walk(int rank, int depth, bool include_shorter,
                   const std::function<void(const MutationWalk&)>& visit);
std::vector<MutationWalk> enumerate_walks(int rank, int depth, bool include_shorter = false);

/// All skew-symmetric n x n matrices with entries in [-b_max, b_max].
std::vector<IntMatrix> enumerate_skew_symmetric(int rank, int b_max);

enum class CheckStatus { pass, violation, resource_exceeded, skipped };
std::string to_string(CheckStatus s);

inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{
      "laurent",           "coefficient_positivity", "route_agreement",
      "neighbor_invariance", "dvector_positivity",   "involution"};
  return names;
}

struct CheckOptions {
  Limits limits;
  bool record_timings = false;
  /// Test-only fault: perturbs the first recurrence step of the root
  /// frame by +1 in component 1.
  bool inject_recurrence_fault = false;
};

/// Enough to replay a failing value through the CLI: mutate
/// `reference_matrix` along `vertex_path` and read position `position`.
struct Witness {
  std::string check;
  std::string detail;
  ExchangeMatrix reference_matrix;
  MutationWalk root_to_reference;
  MutationWalk vertex_path;
  int position = 0;  // 0-based
  std::string expansion;
  std::optional<DVector> dvec_expansion;
  std::optional<DVector> dvec_recurrence;
  std::optional<DVector> dvec_neighbor;
};

struct TrialReport {
  std::size_t index = 0;
  std::optional<std::uint64_t> rng_seed;
  ExchangeMatrix matrix;
  MutationWalk walk;
  std::map<std::string, CheckStatus> checks;
  CheckStatus status = CheckStatus::pass;
  std::optional<Witness> witness;
  std::vector<Witness> findings;
  std::size_t max_terms = 0;
  std::string note;
  std::optional<double> seconds;
};

/// Runs every check along `walk` from `root`, which must be an initial
/// seed. Never throws for mathematical or resource failures; they end up
/// in the report.
TrialReport run_check_suite(const Seed& root, const MutationWalk& walk,
                            const CheckOptions& options = {});

struct DistanceResult {
  std::optional<int> distance;  // nullopt: not found within the bound
  int bound = 0;
  std::size_t seeds_visited = 0;
};

/// Least tree distance from the seed at the end of `t_walk` to a seed whose
/// cluster contains z (expansions w.r.t. the root of `root`), searching
/// breadth-first up to `bound` with SeedKey deduplication. Throws
/// ResourceExceeded.
DistanceResult bfs_distance(const Seed& root, const LaurentPolynomial& z,
                            const MutationWalk& t_walk, int bound, const Limits& limits = {});

struct Summary {
  std::size_t pass = 0;
  std::size_t violations = 0;
  std::size_t resource_exceeded = 0;
  std::size_t findings = 0;
};

struct CampaignReport {
  nlohmann::json config;
  std::vector<TrialReport> trials;
  Summary summary;
  std::optional<double> wall_time;
};

struct FuzzConfig {
  int rank = 3;
  int b_max = 2;
  int depth = 6;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  MatrixMode mode = MatrixMode::skew_symmetric;
  CoefficientPreset coefficients = CoefficientPreset::trivial;
};

struct RunOptions {
  CheckOptions check;
  unsigned threads = 1;
};

/// Checks every reduced walk of length exactly `depth` from the initial
/// seed of `matrix` (shorter walks are prefixes and get checked on the way).
CampaignReport run_exhaustive(const ExchangeMatrix& matrix, int depth, const RunOptions& options = {});

/// Trial i draws its matrix and walk from Rng(mix_seed(seed, i)).
CampaignReport run_fuzz(const FuzzConfig& config, const RunOptions& options = {});

Summary summarize(const std::vector<TrialReport>& trials);

}  // namespace clusterdv
