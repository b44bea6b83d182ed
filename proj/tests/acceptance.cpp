// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [--quick]
//
// --quick shrinks the campaigns behind criteria 2-5 and 8 (for smoke runs);
// the numbers printed say which sizes were used.

#include <chrono>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "clusterdv/dvector.hpp"
#include "clusterdv/explorer.hpp"
#include "clusterdv/report.hpp"
#include "clusterdv/tropical.hpp"

using namespace clusterdv;

namespace {

// Pinned bounds. Every comparison below is exact; the only tolerances are
// wall-clock limits.
constexpr double kOracleSeconds = 1.0;
constexpr double kCampaignSeconds = 600.0;
constexpr int kSweepBMax = 2;
constexpr int kSweepDepth = 6;
constexpr int kFuzzBMax = 2;
constexpr std::size_t kFuzzTrials = 500;
constexpr std::uint64_t kFuzzSeed = 42;
constexpr int kRandomCases = 300;  // criteria 6 and 7, at least 200 each
constexpr int kMarkovDepths[] = {9, 10};

struct FuzzPlan {
  int rank;
  int depth;
};
constexpr FuzzPlan kFuzzPlans[] = {{3, 7}, {4, 7}};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void verdict(int n, bool ok, const std::string& what) {
  std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << n << ": " << what << std::endl;
  failures += !ok;
}

IntMatrix from_rows(const nlohmann::json& rows) {
  IntMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j].get<Integer>();
  return m;
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(in);
}

// --- 1 -----------------------------------------------------------------------

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string why;
  const auto fixtures = load_json(CLUSTERDV_FIXTURE_DIR "/expansions.json");
  const nlohmann::json* a2 = nullptr;
  for (const auto& c : fixtures["cases"])
    if (c["name"] == "A2") a2 = &c;
  if (!a2) {
    verdict(1, false, "A2 fixture missing");
    return;
  }
  const ExchangeMatrix m(from_rows((*a2)["B"]));
  const Seed root = Seed::root(m);

  // Along (1,2,1) the new variable at step j is compared to the fixture,
  // which was computed by rational-function simplification.
  const auto walk = MutationWalk::parse("1,2,1", 2);
  Seed s = root;
  for (std::size_t j = 0; j < walk.size(); ++j) {
    s = seed_mutate(s, walk[j]);
    const auto& want = (*a2)["vertices"][j + 1];
    const auto pos = static_cast<Eigen::Index>(walk[j]);
    const std::string got = to_string(s.var(pos));
    if (got != want["vars"][static_cast<std::size_t>(pos)]) {
      ok = false;
      why = "expansion at step " + std::to_string(j + 1) + " is " + got;
    }
    const DVector d = dvec_from_expansion(s.var(pos), 2);
    const DVector r = dvec_along_walk(2, m, walk.prefix(j + 1))[static_cast<std::size_t>(pos)];
    DVector expected(2);
    expected << want["dvectors"][static_cast<std::size_t>(pos)][0].get<Integer>(),
        want["dvectors"][static_cast<std::size_t>(pos)][1].get<Integer>();
    if (d != expected || r != expected) {
      ok = false;
      why = "d-vector at step " + std::to_string(j + 1);
    }
  }
  // Hand values for the three new variables, independent of the fixture file.
  const std::vector<std::string> hand{"x1^-1 + x1^-1*x2", "x1^-1*x2^-1 + x1^-1 + x2^-1", "x2^-1 + x1*x2^-1"};
  const std::vector<std::vector<Integer>> hand_d{{1, 0}, {1, 1}, {0, 1}};
  s = root;
  for (std::size_t j = 0; j < walk.size(); ++j) {
    s = seed_mutate(s, walk[j]);
    const auto& v = s.var(walk[j]);
    const DVector d = dvec_from_expansion(v, 2);
    if (v != parse_laurent(hand[j], 2) || d(0) != hand_d[j][0] || d(1) != hand_d[j][1]) {
      ok = false;
      why = "hand value at step " + std::to_string(j + 1);
    }
  }
  const Seed pentagon = apply_walk(root, MutationWalk::parse("1,2,1,2,1", 2));
  if (!(pentagon == permute_positions(root, {1, 0}))) {
    ok = false;
    why = "(1,2,1,2,1) does not return the swapped root";
  }
  const double t = seconds_since(t0);
  if (t >= kOracleSeconds) {
    ok = false;
    why = "took " + std::to_string(t) + " s";
  }
  std::ostringstream msg;
  msg << "rank-2 oracle, exact expansions and d-vectors along (1,2,1), pentagon = swapped root, " << t << " s < "
      << kOracleSeconds << " s" << (why.empty() ? "" : " [" + why + "]");
  verdict(1, ok, msg.str());
}

// --- 2-5 ---------------------------------------------------------------------

struct Tally {
  std::size_t trials = 0;
  std::size_t pass = 0;
  std::size_t resource_exceeded = 0;
  std::map<std::string, std::size_t> violations;
  std::size_t positivity_checked = 0;
  std::vector<Witness> witnesses;

  void add(const CampaignReport& r) {
    for (const auto& t : r.trials) {
      ++trials;
      pass += t.status == CheckStatus::pass;
      resource_exceeded += t.status == CheckStatus::resource_exceeded;
      for (const auto& [name, s] : t.checks) {
        if (s == CheckStatus::violation) ++violations[name];
        if (name == "dvector_positivity" && s == CheckStatus::pass) ++positivity_checked;
      }
      if (t.witness) witnesses.push_back(*t.witness);
    }
  }
  std::size_t count(const std::string& name) const {
    auto it = violations.find(name);
    return it == violations.end() ? 0 : it->second;
  }
};

struct Campaigns {
  Tally tally;
  double seconds = 0;
  std::string description;
  CampaignReport headline_fuzz;
  bool quick = false;
};

Campaigns run_campaigns(bool quick) {
  Campaigns c;
  c.quick = quick;
  const auto t0 = std::chrono::steady_clock::now();
  RunOptions options;
  options.threads = std::max(1u, std::thread::hardware_concurrency());
  const int sweep_depth = quick ? 4 : kSweepDepth;
  std::size_t matrices = 0;
  for (int n = 2; n <= 3; ++n) {
    for (const auto& b : enumerate_skew_symmetric(n, kSweepBMax)) {
      c.tally.add(run_exhaustive(ExchangeMatrix(b), sweep_depth, options));
      ++matrices;
    }
  }
  std::ostringstream d;
  d << "sweep of " << matrices << " matrices (n=2,3, |b|<=" << kSweepBMax << ", depth " << sweep_depth << ")";
  for (const auto& plan : kFuzzPlans) {
    FuzzConfig f;
    f.rank = plan.rank;
    f.b_max = kFuzzBMax;
    f.depth = quick ? plan.depth - 2 : plan.depth;
    f.trials = quick ? kFuzzTrials / 10 : kFuzzTrials;
    f.seed = kFuzzSeed;
    auto r = run_fuzz(f, options);
    c.tally.add(r);
    d << " + fuzz n=" << f.rank << " depth " << f.depth << " x" << f.trials;
    if (&plan == &kFuzzPlans[0]) c.headline_fuzz = std::move(r);
  }
  c.seconds = seconds_since(t0);
  d << ": " << c.tally.trials << " walks, " << c.tally.pass << " pass, " << c.tally.resource_exceeded
    << " resource_exceeded, " << c.seconds << " s";
  c.description = d.str();
  return c;
}

// A violation must come with a witness that the plain API reproduces.
bool witnesses_replay(const Tally& t) {
  for (const auto& w : t.witnesses) {
    try {
      const Seed s = apply_walk(Seed::root(w.reference_matrix), w.vertex_path);
      if (to_string(s.var(w.position)) != w.expansion) return false;
    } catch (const std::exception&) {
      return false;
    }
  }
  return true;
}

void criteria_2_to_5(const Campaigns& c) {
  const auto& t = c.tally;
  const bool replay = witnesses_replay(t);
  const bool in_time = c.seconds < kCampaignSeconds;
  const std::string timing = in_time ? "" : " [over " + std::to_string(static_cast<int>(kCampaignSeconds)) + " s]";
  auto line = [&](const char* check) {
    return std::string(check) + " violations=" + std::to_string(t.count(check));
  };
  verdict(2, t.count("route_agreement") == 0 && in_time && replay,
          "route agreement, " + line("route_agreement") + "; " + c.description + timing);
  verdict(3, t.count("dvector_positivity") == 0 && replay,
          "d-vector positivity, " + line("dvector_positivity") + " over " + std::to_string(t.positivity_checked) +
              " fully checked walks");
  verdict(4, t.count("neighbor_invariance") == 0 && replay, "neighbor invariance, " + line("neighbor_invariance"));
  verdict(5, t.count("coefficient_positivity") == 0 && t.count("laurent") == 0 && replay,
          "positive Laurent, " + line("coefficient_positivity") + ", " + line("laurent"));
}

// --- 6, 7 ----------------------------------------------------------------------

void criterion_6() {
  Rng rng(6006);
  int cases = 0, bad = 0;
  for (int i = 0; i < kRandomCases; ++i) {
    const int n = static_cast<int>(rng.uniform(1, 5));
    const int m = static_cast<int>(rng.uniform(1, 4));
    const auto mode = i % 2 ? MatrixMode::skew_symmetric : MatrixMode::skew_symmetrizable;
    const IntMatrix b = gen_matrix(n, 3, mode, rng);
    IntMatrix c(m, n);
    for (int r = 0; r < m; ++r)
      for (int j = 0; j < n; ++j) c(r, j) = rng.uniform(-3, 3);
    const ExchangeMatrix em(b, c);
    const auto k = static_cast<Eigen::Index>(rng.uniform(0, n - 1));
    bad += y_mutate(em.coefficients(), b, k) != matrix_mutate(em, k).coefficients();
    ++cases;
  }
  verdict(6, bad == 0 && cases >= 200,
          "tropical y-mutation equals extended-matrix mutation on " + std::to_string(cases) + " random (B, C, k), " +
              std::to_string(bad) + " mismatches");
}

void criterion_7() {
  Rng rng(7007);
  int cases = 0, bad = 0, skipped = 0;
  for (int i = 0; i < kRandomCases; ++i) {
    const int n = static_cast<int>(rng.uniform(2, 4));
    const auto mode = i % 3 ? MatrixMode::skew_symmetric : MatrixMode::skew_symmetrizable;
    const auto preset = i % 2 ? CoefficientPreset::principal : CoefficientPreset::trivial;
    const ExchangeMatrix m = ExchangeMatrix::with_preset(gen_matrix(n, 2, mode, rng), preset);
    const MutationWalk w = random_walk(n, static_cast<int>(rng.uniform(0, 4)), rng);
    const auto k = static_cast<Eigen::Index>(rng.uniform(0, n - 1));
    try {
      const Seed s = apply_walk(Seed::root(m), w);
      const Seed back = seed_mutate(seed_mutate(s, k), k);
      const bool same = back.matrix() == s.matrix() && back.matrix().coefficients() == s.matrix().coefficients() &&
                        back == s;
      bad += !same;
      ++cases;
    } catch (const ResourceExceeded&) {
      ++skipped;
    }
  }
  verdict(7, bad == 0 && cases >= 200,
          "mu_k mu_k = id on matrix, y and expansions for " + std::to_string(cases) + " random seeds, " +
              std::to_string(bad) + " mismatches" + (skipped ? ", " + std::to_string(skipped) + " over budget" : ""));
}

// --- 8 -------------------------------------------------------------------------

void criterion_8(const Campaigns& c) {
  // Same invocation again, on one thread this time, plus an exhaustive run.
  const auto& first = c.headline_fuzz;
  FuzzConfig f;
  f.rank = first.config["rank"].get<int>();
  f.b_max = first.config["bmax"].get<int>();
  f.depth = first.config["depth"].get<int>();
  f.trials = first.config["trials"].get<std::size_t>();
  f.seed = first.config["seed"].get<std::uint64_t>();
  const auto again = run_fuzz(f);
  bool ok = render(first, OutputFormat::json) == render(again, OutputFormat::json) &&
            render(first, OutputFormat::tsv) == render(again, OutputFormat::tsv);

  IntMatrix markov(3, 3);
  markov << 0, 2, -2, -2, 0, 2, 2, -2, 0;
  RunOptions many;
  many.threads = 4;
  ok = ok && render(run_exhaustive(ExchangeMatrix(markov), 5), OutputFormat::json) ==
                 render(run_exhaustive(ExchangeMatrix(markov), 5, many), OutputFormat::json);

  std::string golden_note;
  if (!c.quick) {
    const std::string path = CLUSTERDV_GOLDEN_DIR "/fuzz_r3_b2_d7_t500_s42.json";
    try {
      const auto golden = load_json(path);
      const bool same = nlohmann::json(to_json(first)) == golden;
      ok = ok && same;
      golden_note = same ? ", matches committed golden report" : ", differs from committed golden report";
    } catch (const std::exception& e) {
      ok = false;
      golden_note = std::string(", ") + e.what();
    }
  }
  verdict(8, ok, "fixed-seed fuzz and exhaustive reports are byte-identical across runs and thread counts" +
                     golden_note);
}

// --- 9 -------------------------------------------------------------------------

void criterion_9() {
  IntMatrix markov(3, 3);
  markov << 0, 2, -2, -2, 0, 2, 2, -2, 0;
  const Limits defaults;
  bool ok = true;
  std::ostringstream msg;
  msg << "Markov walk 1,2,3,... under default caps (terms " << defaults.max_terms << ", term products "
      << defaults.max_work << ")";
  for (int depth : kMarkovDepths) {
    std::vector<int> dirs;
    for (int i = 0; i < depth; ++i) dirs.push_back(i % 3);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto r = run_check_suite(Seed::root(ExchangeMatrix(markov)), MutationWalk(dirs));
      bool violation = false;
      for (const auto& [name, s] : r.checks) violation |= s == CheckStatus::violation;
      ok = ok && r.status == CheckStatus::resource_exceeded && !violation && !r.witness;
      msg << "; depth " << depth << ": " << to_string(r.status) << (r.note.empty() ? "" : " (" + r.note + ")");
    } catch (const std::exception& e) {
      ok = false;
      msg << "; depth " << depth << " threw: " << e.what();
    }
    msg << ", " << seconds_since(t0) << " s";
  }
  verdict(9, ok, msg.str());
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
  try {
    criterion_1();
    const Campaigns c = run_campaigns(quick);
    criteria_2_to_5(c);
    criterion_6();
    criterion_7();
    criterion_8(c);
    criterion_9();
  } catch (const std::exception& e) {
    std::cout << "FAIL  acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  return failures ? 1 : 0;
}
