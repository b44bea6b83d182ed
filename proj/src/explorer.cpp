#include "clusterdv/explorer.hpp"

#include <atomic>
#include <chrono>
#include <mutex>
#include <numeric>
#include <thread>
#include <unordered_set>

namespace clusterdv {

std::int64_t Rng::uniform(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("Rng::uniform: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next());  // full 64-bit range
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t r;
  do {
    r = next();
  } while (r >= limit);
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + r % span);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// --- generators ---------------------------------------------------------------

namespace {

void check_rank_arg(int rank) {
  if (rank < 1 || rank > kMaxRank) {
    throw std::invalid_argument("rank must be between 1 and " + std::to_string(kMaxRank));
  }
}

IntMatrix random_skew_symmetric(int n, int b_max, Rng& rng) {
  IntMatrix b = IntMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      b(i, j) = rng.uniform(-b_max, b_max);
      b(j, i) = -b(i, j);
    }
  }
  return b;
}

}  // namespace

IntMatrix gen_matrix(int rank, int b_max, MatrixMode mode, Rng& rng) {
  check_rank_arg(rank);
  if (b_max < 0) throw std::invalid_argument("b_max must be nonnegative");
  if (mode == MatrixMode::skew_symmetric) return random_skew_symmetric(rank, b_max, rng);

  // B = S^{-1} A with A skew-symmetric and s_i | a_ij, so SB = A. Redraw a
  // bounded number of times looking for a matrix that is not skew-symmetric.
  IntMatrix b;
  for (int attempt = 0; attempt < 64; ++attempt) {
    IntVector s(rank);
    for (int i = 0; i < rank; ++i) s(i) = rng.uniform(1, 3);
    b = IntMatrix::Zero(rank, rank);
    for (int i = 0; i < rank; ++i) {
      for (int j = i + 1; j < rank; ++j) {
        const Integer l = std::lcm(s(i), s(j));
        const Integer r_max = b_max * std::min(s(i), s(j)) / l;
        const Integer a = l * rng.uniform(-r_max, r_max);
        b(i, j) = a / s(i);
        b(j, i) = -a / s(j);
      }
    }
    if (!is_skew_symmetric(b)) return b;
  }
  return b;
}

IntMatrix gen_matrix(int rank, int b_max, MatrixMode mode, std::uint64_t seed) {
  Rng rng(seed);
  return gen_matrix(rank, b_max, mode, rng);
}

MutationWalk random_walk(int rank, int length, Rng& rng) {
  check_rank_arg(rank);
  if (length < 0) throw std::invalid_argument("walk length must be nonnegative");
  if (rank == 1 && length > 1) throw InvalidWalk("rank 1 admits no reduced walk longer than 1");
  std::vector<int> dirs;
  for (int i = 0; i < length; ++i) {
    if (dirs.empty()) {
      dirs.push_back(static_cast<int>(rng.uniform(0, rank - 1)));
    } else {
      int k = static_cast<int>(rng.uniform(0, rank - 2));
      if (k >= dirs.back()) ++k;
      dirs.push_back(k);
    }
  }
  return MutationWalk(std::move(dirs));
}

std::uint64_t walk_count(int rank, int depth) {
  if (depth == 0) return 1;
  std::uint64_t c = static_cast<std::uint64_t>(rank);
  for (int i = 1; i < depth; ++i) c *= static_cast<std::uint64_t>(rank - 1);
  return c;
}

void for_each_walk(int rank, int depth, bool include_shorter,
                   const std::function<void(const MutationWalk&)>& visit) {
  check_rank_arg(rank);
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  std::vector<int> dirs;
  std::function<void()> rec = [&]() {
    const auto len = static_cast<int>(dirs.size());
    if (len == depth || include_shorter) visit(MutationWalk(dirs));
    if (len == depth) return;
    for (int k = 0; k < rank; ++k) {
      if (!dirs.empty() && dirs.back() == k) continue;
      dirs.push_back(k);
      rec();
      dirs.pop_back();
    }
  };
  rec();
}

std::vector<MutationWalk> enumerate_walks(int rank, int depth, bool include_shorter) {
  std::vector<MutationWalk> out;
  for_each_walk(rank, depth, include_shorter, [&](const MutationWalk& w) { out.push_back(w); });
  return out;
}

std::vector<IntMatrix> enumerate_skew_symmetric(int rank, int b_max) {
  check_rank_arg(rank);
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < rank; ++i) {
    for (int j = i + 1; j < rank; ++j) slots.emplace_back(i, j);
  }
  std::vector<IntMatrix> out;
  IntMatrix b = IntMatrix::Zero(rank, rank);
  std::function<void(std::size_t)> rec = [&](std::size_t s) {
    if (s == slots.size()) {
      out.push_back(b);
      return;
    }
    const auto [i, j] = slots[s];
    for (int v = -b_max; v <= b_max; ++v) {
      b(i, j) = v;
      b(j, i) = -v;
      rec(s + 1);
    }
  };
  rec(0);
  return out;
}

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::violation: return "violation";
    case CheckStatus::resource_exceeded: return "resource_exceeded";
    case CheckStatus::skipped: return "skipped";
  }
  return "?";
}

// --- check suite ------------------------------------------------------------------

namespace {

// Directions from vertex `from` to vertex `to` along the walk.
MutationWalk subpath(const MutationWalk& walk, std::size_t from, std::size_t to) {
  std::vector<int> dirs;
  if (to >= from) {
    for (std::size_t i = from; i < to; ++i) dirs.push_back(walk[i]);
  } else {
    for (std::size_t i = from; i > to; --i) dirs.push_back(walk[i - 1]);
  }
  return MutationWalk(std::move(dirs));
}

class Suite {
 public:
  Suite(const Seed& root, const MutationWalk& walk, const CheckOptions& options, TrialReport& report)
      : walk_(walk), options_(options), report_(report), n_(root.rank()), depth_(walk.size()) {
    mats_.push_back(root.matrix());
    for (std::size_t i = 0; i < depth_; ++i) mats_.push_back(matrix_mutate(mats_.back(), walk_[i]));
    // Variable id l < n is root position l; id n + j - 1 is born at step j.
    std::vector<std::size_t> ids(static_cast<std::size_t>(n_));
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    home_vertex_.assign(ids.size(), 0);
    home_position_.resize(ids.size());
    std::iota(home_position_.begin(), home_position_.end(), 0);
    for (std::size_t j = 1; j <= depth_; ++j) {
      ids[static_cast<std::size_t>(walk_[j - 1])] = static_cast<std::size_t>(n_) + j - 1;
      home_vertex_.push_back(j);
      home_position_.push_back(walk_[j - 1]);
    }
    for (const auto& name : check_names()) report_.checks[name] = CheckStatus::pass;
    if (!root.matrix().skew_symmetric()) report_.checks["coefficient_positivity"] = CheckStatus::skipped;
    if (depth_ == 0) {
      report_.checks["neighbor_invariance"] = CheckStatus::skipped;
      report_.checks["involution"] = CheckStatus::skipped;
    }
  }

  void run() {
    std::vector<DVector> previous;
    for (std::size_t f = 0; f <= depth_; ++f) {
      std::vector<DVector> current;
      if (!frame(f, current)) return;
      if (f > 0) compare_neighbors(f, previous, current);
      previous = std::move(current);
    }
    frame_ = 0;
    vertex_ = depth_;
    if (depth_ > 0) involution();
  }

  // Where the suite was when it stopped.
  std::size_t frame() const { return frame_; }
  std::size_t vertex() const { return vertex_; }

 private:
  Eigen::Index position_of(std::size_t id) const { return home_position_[id]; }

  void fail(const std::string& check, Witness w) {
    report_.checks[check] = CheckStatus::violation;
    report_.status = CheckStatus::violation;
    if (!report_.witness) report_.witness = std::move(w);
  }

  Witness witness(const std::string& check, std::size_t frame, std::size_t vertex, Eigen::Index position,
                  std::string detail) const {
    Witness w;
    w.check = check;
    w.detail = std::move(detail);
    w.reference_matrix = mats_[frame];
    w.root_to_reference = walk_.prefix(frame);
    w.vertex_path = subpath(walk_, frame, vertex);
    w.position = static_cast<int>(position);
    return w;
  }

  // Expansions and recurrence d-vectors of every walk variable, rooted at
  // vertex f. Returns false when the trial cannot continue.
  bool frame(std::size_t f, std::vector<DVector>& exp_d) {
    std::vector<Seed> seeds(depth_ + 1);
    std::vector<std::vector<DVector>> rec(depth_ + 1);
    seeds[f] = Seed::root(mats_[f]);
    rec[f] = initial_dvectors(n_);
    auto track = [&](const Seed& s) {
      for (const auto& v : s.vars()) report_.max_terms = std::max(report_.max_terms, v->size());
    };

    auto step = [&](std::size_t from, std::size_t to, int k) {
      frame_ = f;
      vertex_ = to;
      try {
        seeds[to] = seed_mutate(seeds[from], k, options_.limits);
      } catch (const NotDivisible& e) {
        Witness w = witness("laurent", f, from, k, std::string("exchange did not divide: ") + e.what());
        w.expansion = to_string(seeds[from].var(k));
        fail("laurent", std::move(w));
        return false;
      }
      track(seeds[to]);
      if (seeds[to].matrix() != mats_[to]) throw std::logic_error("frame matrices diverged");
      rec[to] = rec[from];
      auto& d = rec[to][static_cast<std::size_t>(k)];
      d = dvec_recurrence_step(rec[from], mats_[from].extended(), k);
      if (options_.inject_recurrence_fault && f == 0 && to == 1) d(0) += 1;
      return true;
    };
    for (std::size_t i = f; i > 0; --i) {
      if (!step(i, i - 1, walk_[i - 1])) return false;
    }
    for (std::size_t i = f; i < depth_; ++i) {
      if (!step(i, i + 1, walk_[i])) return false;
    }

    const std::size_t ids = static_cast<std::size_t>(n_) + depth_;
    exp_d.assign(ids, DVector());
    for (std::size_t id = 0; id < ids; ++id) {
      const std::size_t v = home_vertex_[id];
      const Eigen::Index l = position_of(id);
      const LaurentPolynomial& z = seeds[v].var(l);
      const DVector& dr = rec[v][static_cast<std::size_t>(l)];
      exp_d[id] = dvec_from_expansion(z, n_);
      const DVector& de = exp_d[id];
      auto annotated = [&](const std::string& check, std::string detail) {
        Witness w = witness(check, f, v, l, std::move(detail));
        w.expansion = to_string(z);
        w.dvec_expansion = de;
        w.dvec_recurrence = dr;
        return w;
      };

      if (report_.checks["coefficient_positivity"] != CheckStatus::skipped && !lp_coeffs_nonnegative(z)) {
        fail("coefficient_positivity", annotated("coefficient_positivity", "negative coefficient"));
      }
      if (de != dr) {
        fail("route_agreement", annotated("route_agreement", "expansion and recurrence disagree"));
      }

      // Membership in x_{t_f}: the expansion is one of the root variables.
      std::optional<Eigen::Index> member;
      for (Eigen::Index m = 0; m < n_; ++m) {
        if (z == seeds[f].var(m)) member = m;
      }
      bool ok;
      std::string detail;
      if (member) {
        const DVector want = -DVector::Unit(n_, *member);
        ok = de == want && dr == want;
        detail = "cluster variable x" + std::to_string(*member + 1) + " must have d = -e" +
                 std::to_string(*member + 1);
      } else {
        ok = is_nonnegative(de) && is_nonnegative(dr);
        detail = "non-member with a negative d-vector entry";
      }
      if (!ok) {
        if (mats_[f].skew_symmetric() || member) {
          fail("dvector_positivity", annotated("dvector_positivity", detail));
        } else if (report_.findings.size() < kMaxFindings) {
          report_.findings.push_back(annotated("dvector_positivity", detail));
        }
      }
    }
    return true;
  }

  // Across t_{f-1} -k- t_f every d-vector keeps all components except k.
  void compare_neighbors(std::size_t f, const std::vector<DVector>& before, const std::vector<DVector>& after) {
    const int k = walk_[f - 1];
    for (std::size_t id = 0; id < before.size(); ++id) {
      DVector a = before[id], b = after[id];
      a(k) = 0;
      b(k) = 0;
      if (a == b) continue;
      Witness w = witness("neighbor_invariance", f, home_vertex_[id], position_of(id),
                          "d-vectors differ off component " + std::to_string(k + 1) +
                              " between neighboring references");
      w.dvec_expansion = after[id];
      w.dvec_neighbor = before[id];
      fail("neighbor_invariance", std::move(w));
    }
  }

  void involution() {
    const Seed root = Seed::root(mats_.front());
    const Seed before = apply_walk(root, walk_.prefix(depth_ - 1), options_.limits);
    const Seed after = seed_mutate(before, walk_.back(), options_.limits);
    const Seed back = seed_mutate(after, walk_.back(), options_.limits);
    const ExchangeMatrix& b = before.matrix();
    const auto y = b.coefficients();
    const auto y_back = y_mutate(y_mutate(y, b.exchange(), walk_.back()),
                                 after.matrix().exchange(), walk_.back());
    if (!(back == before) || y_back != y || after.matrix().coefficients() != y_mutate(y, b.exchange(), walk_.back())) {
      fail("involution", witness("involution", 0, depth_ - 1, walk_.back(),
                                 "mutating twice in direction " + std::to_string(walk_.back() + 1) +
                                     " did not return the seed"));
    }
  }

  static constexpr std::size_t kMaxFindings = 8;

  const MutationWalk& walk_;
  const CheckOptions& options_;
  TrialReport& report_;
  Eigen::Index n_;
  std::size_t depth_;
  std::vector<ExchangeMatrix> mats_;
  std::vector<std::size_t> home_vertex_;
  std::vector<Eigen::Index> home_position_;
  std::size_t frame_ = 0;
  std::size_t vertex_ = 0;
};

bool is_initial(const Seed& s) {
  for (Eigen::Index l = 0; l < s.rank(); ++l) {
    if (s.var(l) != LaurentPolynomial::variable(s.arity(), static_cast<std::size_t>(l))) return false;
  }
  return true;
}

// `blocked_prefix` receives the walk length after which the root frame ran
// out of resources; any walk with that prefix stops at the same point.
TrialReport run_suite(const Seed& root, const MutationWalk& walk, const CheckOptions& options,
                      std::optional<std::size_t>* blocked_prefix) {
  if (!is_initial(root)) throw std::invalid_argument("run_check_suite: root must be an initial seed");
  walk.check_rank(static_cast<int>(root.rank()));
  const auto start = std::chrono::steady_clock::now();
  TrialReport report;
  report.matrix = root.matrix();
  report.walk = walk;
  Suite suite(root, walk, options, report);
  try {
    suite.run();
  } catch (const ResourceExceeded& e) {
    report.note = e.what();
    for (auto& [name, status] : report.checks) {
      if (status == CheckStatus::pass) status = CheckStatus::resource_exceeded;
    }
    if (report.status != CheckStatus::violation) report.status = CheckStatus::resource_exceeded;
    if (blocked_prefix && suite.frame() == 0 && suite.vertex() < walk.size()) *blocked_prefix = suite.vertex();
  }
  if (options.record_timings) {
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return report;
}

}  // namespace

TrialReport run_check_suite(const Seed& root, const MutationWalk& walk, const CheckOptions& options) {
  return run_suite(root, walk, options, nullptr);
}

// --- distance ------------------------------------------------------------------

DistanceResult bfs_distance(const Seed& root, const LaurentPolynomial& z, const MutationWalk& t_walk,
                            int bound, const Limits& limits) {
  if (bound < 0) throw std::invalid_argument("bound must be nonnegative");
  if (z.arity() != root.arity()) throw ArityMismatch("bfs_distance: z has the wrong arity");
  DistanceResult result;
  result.bound = bound;
  auto contains = [&](const Seed& s) {
    for (const auto& v : s.vars()) {
      if (*v == z) return true;
    }
    return false;
  };
  struct Node {
    Seed seed;
    int arrived = -1;
  };
  std::vector<Node> level{{apply_walk(root, t_walk, limits), -1}};
  std::unordered_set<SeedKey> seen{seed_key(level.front().seed)};
  for (int d = 0;; ++d) {
    result.seeds_visited += level.size();
    for (const auto& node : level) {
      if (contains(node.seed)) {
        result.distance = d;
        return result;
      }
    }
    if (d == bound) return result;
    std::vector<Node> next;
    for (const auto& node : level) {
      for (int k = 0; k < node.seed.rank(); ++k) {
        if (k == node.arrived) continue;
        Seed s = seed_mutate(node.seed, k, limits);
        if (seen.insert(seed_key(s)).second) next.push_back({std::move(s), k});
      }
    }
    if (next.empty()) return result;
    level = std::move(next);
  }
}

// --- campaigns -------------------------------------------------------------------

Summary summarize(const std::vector<TrialReport>& trials) {
  Summary s;
  for (const auto& t : trials) {
    switch (t.status) {
      case CheckStatus::pass: ++s.pass; break;
      case CheckStatus::violation: ++s.violations; break;
      case CheckStatus::resource_exceeded: ++s.resource_exceeded; break;
      case CheckStatus::skipped: break;
    }
    s.findings += t.findings.size();
  }
  return s;
}

namespace {

void run_parallel(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < count;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

const char* mode_name(MatrixMode m) {
  return m == MatrixMode::skew_symmetric ? "skew-symmetric" : "skew-symmetrizable";
}

const char* preset_name(CoefficientPreset p) {
  return p == CoefficientPreset::trivial ? "trivial" : "principal";
}

}  // namespace

CampaignReport run_exhaustive(const ExchangeMatrix& matrix, int depth, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const auto walks = enumerate_walks(static_cast<int>(matrix.rank()), depth);
  CampaignReport report;
  report.config = {{"method", "exhaustive"},
                   {"matrix", matrix_to_json(matrix)},
                   {"depth", depth},
                   {"term_cap", options.check.limits.max_terms},
                   {"work_cap", options.check.limits.max_work}};
  report.trials.resize(walks.size());
  const Seed root = Seed::root(matrix);
  // Walks come in lexicographic order, so a prefix that blew up in the root
  // frame usually has more walks right behind it.
  std::map<std::vector<int>, TrialReport> blocked;
  std::mutex blocked_mutex;
  run_parallel(walks.size(), options.threads, [&](std::size_t i) {
    const auto& dirs = walks[i].directions();
    std::optional<TrialReport> cached;
    {
      std::lock_guard lock(blocked_mutex);
      for (std::size_t len = 1; len <= dirs.size() && !cached; ++len) {
        auto it = blocked.find(std::vector<int>(dirs.begin(), dirs.begin() + static_cast<std::ptrdiff_t>(len)));
        if (it != blocked.end()) cached = it->second;
      }
    }
    auto& t = report.trials[i];
    if (cached && !options.check.record_timings) {
      t = std::move(*cached);
      t.walk = walks[i];
    } else {
      std::optional<std::size_t> prefix;
      t = run_suite(root, walks[i], options.check, &prefix);
      if (prefix) {
        std::lock_guard lock(blocked_mutex);
        blocked.emplace(std::vector<int>(dirs.begin(), dirs.begin() + static_cast<std::ptrdiff_t>(*prefix)), t);
      }
    }
    t.index = i;
  });
  report.summary = summarize(report.trials);
  if (options.check.record_timings) {
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return report;
}

CampaignReport run_fuzz(const FuzzConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  check_rank_arg(config.rank);
  CampaignReport report;
  report.config = {{"method", "fuzz"},
                   {"rank", config.rank},
                   {"bmax", config.b_max},
                   {"depth", config.depth},
                   {"trials", config.trials},
                   {"seed", config.seed},
                   {"mode", mode_name(config.mode)},
                   {"coeffs", preset_name(config.coefficients)},
                   {"term_cap", options.check.limits.max_terms},
                   {"work_cap", options.check.limits.max_work}};
  report.trials.resize(config.trials);
  run_parallel(config.trials, options.threads, [&](std::size_t i) {
    const std::uint64_t trial_seed = mix_seed(config.seed, i);
    Rng rng(trial_seed);
    const IntMatrix b = gen_matrix(config.rank, config.b_max, config.mode, rng);
    const MutationWalk walk = random_walk(config.rank, config.depth, rng);
    auto& t = report.trials[i];
    t = run_check_suite(Seed::root(ExchangeMatrix::with_preset(b, config.coefficients)), walk, options.check);
    t.index = i;
    t.rng_seed = trial_seed;
  });
  report.summary = summarize(report.trials);
  if (options.check.record_timings) {
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return report;
}

}  // namespace clusterdv
