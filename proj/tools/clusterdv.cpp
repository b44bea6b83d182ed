// clusterdv: seed mutation, d-vectors, invariant checking and distance queries.
//
// Exit codes: 0 ok, 1 violation (or `dvec --method both` mismatch), 2 bad
// input, 3 resource limit hit.

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "clusterdv/dvector.hpp"
#include "clusterdv/explorer.hpp"
#include "clusterdv/report.hpp"
#include "clusterdv/seed.hpp"

namespace {

using namespace clusterdv;
using ojson = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitResource = 3;

struct BadInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string matrix;
  std::string coeffs;
  std::string path;
  std::string output;
  std::string format;
  std::size_t term_cap = Limits{}.max_terms;
  std::uint64_t work_cap = Limits{}.max_work;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool timings = false;

  // dvec
  std::string method = "both";
  // check / fuzz
  int depth = 6;
  bool allow_symmetrizable = false;
  int rank = 3;
  int bmax = 2;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::string mode = "skew-symmetric";
  // dist
  std::string z_path;
  int z_pos = 1;
  int bound = 3;

  Limits limits() const {
    Limits l;
    l.max_terms = term_cap;
    l.max_work = work_cap;
    return l;
  }
};

std::optional<CoefficientPreset> preset_from(const std::string& name) {
  if (name.empty()) return std::nullopt;
  if (name == "trivial") return CoefficientPreset::trivial;
  if (name == "principal") return CoefficientPreset::principal;
  throw BadInput("unknown coefficient preset '" + name + "'");
}

// --matrix takes a file name, or inline JSON when the argument starts with '{'.
ExchangeMatrix load_matrix(const Config& c) {
  if (c.matrix.empty()) throw BadInput("--matrix is required");
  ExchangeMatrix m;
  if (c.matrix.front() == '{') {
    try {
      m = matrix_from_json(nlohmann::json::parse(c.matrix));
    } catch (const nlohmann::json::exception& e) {
      throw BadInput(std::string("--matrix: ") + e.what());
    }
  } else {
    m = load_matrix_file(c.matrix);
  }
  if (auto preset = preset_from(c.coeffs)) m = ExchangeMatrix::with_preset(m.exchange(), *preset);
  return m;
}

void emit(const Config& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(c.output, std::ios::binary);
  if (!out) throw BadInput("cannot write " + c.output);
  out << text;
}

std::string format_or(const Config& c, const char* fallback) { return c.format.empty() ? fallback : c.format; }

std::string tropical_text(const TropicalElement& y) {
  std::string s;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const Integer e = y.exponents()(i);
    if (e == 0) continue;
    if (!s.empty()) s += '*';
    s += "u" + std::to_string(i + 1);
    if (e != 1) s += "^" + std::to_string(e);
  }
  return s.empty() ? "1" : s;
}

std::string vec_text(const IntVector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v(i));
  return s + ")";
}

ojson vec_json(const IntVector& v) { return ojson::parse(to_json(v).dump()); }

// --- mutate -----------------------------------------------------------------------

int cmd_mutate(const Config& c) {
  const ExchangeMatrix m = load_matrix(c);
  const MutationWalk walk = MutationWalk::parse(c.path, static_cast<int>(m.rank()));
  const Seed s = apply_walk(Seed::root(m), walk, c.limits());
  const auto y = s.matrix().coefficients();
  const auto format = parse_format(format_or(c, "pretty"));
  std::ostringstream os;
  if (format == OutputFormat::json) {
    ojson j;
    j["path"] = walk.one_based();
    j["matrix"] = ojson::parse(matrix_to_json(s.matrix()).dump());
    ojson ys = ojson::array();
    for (const auto& e : y) ys.push_back(vec_json(e.exponents()));
    j["y"] = ys;
    ojson vars = ojson::array();
    for (Eigen::Index l = 0; l < s.rank(); ++l) vars.push_back(to_string(s.var(l)));
    j["vars"] = vars;
    os << j.dump(2) << '\n';
  } else if (format == OutputFormat::tsv) {
    os << "position\ty\texpansion\n";
    for (Eigen::Index l = 0; l < s.rank(); ++l) {
      os << l + 1 << '\t' << tropical_text(y[static_cast<std::size_t>(l)]) << '\t' << to_string(s.var(l)) << '\n';
    }
  } else {
    os << "path [" << walk.to_string() << "]\n";
    const IntMatrix& b = s.matrix().extended();
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      os << (r == 0 ? "B = [" : "     ") << '[';
      for (Eigen::Index col = 0; col < b.cols(); ++col) os << (col ? ", " : "") << b(r, col);
      os << ']' << (r + 1 == b.rows() ? "]" : "") << '\n';
    }
    for (std::size_t l = 0; l < y.size(); ++l) os << "y" << l + 1 << " = " << tropical_text(y[l]) << '\n';
    for (Eigen::Index l = 0; l < s.rank(); ++l) os << "x" << l + 1 << " = " << to_string(s.var(l)) << '\n';
  }
  emit(c, os.str());
  return kExitOk;
}

// --- dvec -------------------------------------------------------------------------

int cmd_dvec(const Config& c) {
  const ExchangeMatrix m = load_matrix(c);
  const MutationWalk walk = MutationWalk::parse(c.path, static_cast<int>(m.rank()));
  const bool want_expansion = c.method == "expansion" || c.method == "both";
  const bool want_recurrence = c.method == "recurrence" || c.method == "both";
  if (!want_expansion && !want_recurrence) throw BadInput("unknown method '" + c.method + "'");
  const Eigen::Index n = m.rank();

  std::vector<DVector> from_expansion, from_recurrence;
  if (want_recurrence) from_recurrence = dvec_along_walk(n, m, walk);
  if (want_expansion) {
    const Seed s = apply_walk(Seed::root(m), walk, c.limits());
    for (Eigen::Index l = 0; l < n; ++l) from_expansion.push_back(dvec_from_expansion(s.var(l), n));
  }
  const bool both = want_expansion && want_recurrence;
  const bool match = !both || from_expansion == from_recurrence;

  const auto format = parse_format(format_or(c, "pretty"));
  std::ostringstream os;
  if (format == OutputFormat::json) {
    ojson j;
    j["path"] = walk.one_based();
    j["method"] = c.method;
    ojson rows = ojson::array();
    for (Eigen::Index l = 0; l < n; ++l) {
      ojson r;
      r["position"] = l + 1;
      if (want_expansion) r["expansion"] = vec_json(from_expansion[static_cast<std::size_t>(l)]);
      if (want_recurrence) r["recurrence"] = vec_json(from_recurrence[static_cast<std::size_t>(l)]);
      if (both) r["match"] = from_expansion[static_cast<std::size_t>(l)] == from_recurrence[static_cast<std::size_t>(l)];
      rows.push_back(r);
    }
    j["dvectors"] = rows;
    if (both) j["match"] = match;
    os << j.dump(2) << '\n';
  } else if (format == OutputFormat::tsv) {
    os << "position";
    if (want_expansion) os << "\texpansion";
    if (want_recurrence) os << "\trecurrence";
    if (both) os << "\tmatch";
    os << '\n';
    for (Eigen::Index l = 0; l < n; ++l) {
      const auto i = static_cast<std::size_t>(l);
      os << l + 1;
      if (want_expansion) os << '\t' << vec_text(from_expansion[i]);
      if (want_recurrence) os << '\t' << vec_text(from_recurrence[i]);
      if (both) os << '\t' << (from_expansion[i] == from_recurrence[i] ? "true" : "false");
      os << '\n';
    }
  } else {
    for (Eigen::Index l = 0; l < n; ++l) {
      const auto i = static_cast<std::size_t>(l);
      os << "position " << l + 1 << ": ";
      if (!both) {
        os << vec_text(want_expansion ? from_expansion[i] : from_recurrence[i]) << '\n';
      } else if (from_expansion[i] == from_recurrence[i]) {
        os << vec_text(from_expansion[i]) << ", match=true\n";
      } else {
        os << "expansion " << vec_text(from_expansion[i]) << " recurrence " << vec_text(from_recurrence[i])
           << ", match=false\n";
      }
    }
  }
  emit(c, os.str());
  return match ? kExitOk : kExitViolation;
}

// --- check / fuzz -------------------------------------------------------------------

RunOptions run_options(const Config& c) {
  RunOptions o;
  o.check.limits = c.limits();
  o.check.record_timings = c.timings;
  o.threads = c.threads;
  return o;
}

int campaign_exit(const CampaignReport& r, const Config& c) {
  const auto format = parse_format(format_or(c, "json"));
  emit(c, render(r, format));
  if (!c.output.empty()) std::cout << summary_line(r.summary) << '\n';
  if (r.summary.violations > 0) {
    // Witnesses go to stderr in readable form whatever the report format is.
    CampaignReport failing;
    failing.summary = r.summary;
    for (const auto& t : r.trials) {
      if (t.status == CheckStatus::violation) failing.trials.push_back(t);
    }
    std::cerr << render(failing, OutputFormat::pretty);
    return kExitViolation;
  }
  if (!r.trials.empty() && r.summary.resource_exceeded == r.trials.size()) return kExitResource;
  return kExitOk;
}

int cmd_check(const Config& c) {
  const ExchangeMatrix m = load_matrix(c);
  if (!m.skew_symmetric() && !c.allow_symmetrizable) {
    throw BadInput("exchange matrix is not skew-symmetric (pass --allow-symmetrizable to check it anyway)");
  }
  return campaign_exit(run_exhaustive(m, c.depth, run_options(c)), c);
}

int cmd_fuzz(const Config& c) {
  FuzzConfig f;
  f.rank = c.rank;
  f.b_max = c.bmax;
  f.depth = c.depth;
  f.trials = c.trials;
  f.seed = c.seed;
  if (c.mode == "skew-symmetric" || c.mode == "skew") {
    f.mode = MatrixMode::skew_symmetric;
  } else if (c.mode == "symmetrizable" || c.mode == "skew-symmetrizable") {
    f.mode = MatrixMode::skew_symmetrizable;
  } else {
    throw BadInput("unknown mode '" + c.mode + "'");
  }
  if (auto preset = preset_from(c.coeffs)) f.coefficients = *preset;
  if (f.rank == 1 && f.depth > 1) throw BadInput("rank 1 admits no reduced walk longer than 1");
  return campaign_exit(run_fuzz(f, run_options(c)), c);
}

// --- dist ---------------------------------------------------------------------------

int cmd_dist(const Config& c) {
  const ExchangeMatrix m = load_matrix(c);
  const int n = static_cast<int>(m.rank());
  const MutationWalk z_walk = MutationWalk::parse(c.z_path, n);
  const MutationWalk t_walk = MutationWalk::parse(c.path, n);
  if (c.z_pos < 1 || c.z_pos > n) throw BadInput("--z-pos must be between 1 and " + std::to_string(n));
  const Seed root = Seed::root(m);
  const LaurentPolynomial z = apply_walk(root, z_walk, c.limits()).var(c.z_pos - 1);
  const DistanceResult d = bfs_distance(root, z, t_walk, c.bound, c.limits());

  const auto format = parse_format(format_or(c, "pretty"));
  std::ostringstream os;
  if (format == OutputFormat::json) {
    ojson j;
    j["z"] = to_string(z);
    j["t_path"] = t_walk.one_based();
    j["distance"] = d.distance ? ojson(*d.distance) : ojson(nullptr);
    j["bound"] = d.bound;
    j["seeds_visited"] = d.seeds_visited;
    os << j.dump(2) << '\n';
  } else if (d.distance) {
    os << *d.distance << '\n';
  } else {
    os << "unknown(bound=" << d.bound << ")\n";
  }
  emit(c, os.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact cluster-algebra mutation and denominator-vector checks"};
  app.require_subcommand(1);
  Config c;

  auto matrix_opts = [&](CLI::App* sub) {
    sub->add_option("--matrix", c.matrix, "Matrix JSON file (or inline JSON)")->required();
    sub->add_option("--coeffs", c.coeffs, "Coefficient preset overriding the file")
        ->check(CLI::IsMember({"trivial", "principal"}));
  };
  auto common = [&](CLI::App* sub) {
    sub->add_option("--term-cap", c.term_cap, "Largest polynomial, in terms")
        ->envname("CLUSTERDV_TERM_CAP")
        ->check(CLI::PositiveNumber);
    sub->add_option("--work-cap", c.work_cap, "Most term products per multiplication or division")
        ->envname("CLUSTERDV_WORK_CAP")
        ->check(CLI::PositiveNumber);
    sub->add_option("--output,-o", c.output, "Write output here instead of stdout");
    sub->add_option("--format", c.format, "json | tsv | pretty")->check(CLI::IsMember({"json", "tsv", "pretty"}));
  };
  auto campaign = [&](CLI::App* sub) {
    sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--timings", c.timings, "Record wall-clock times (makes reports non-reproducible)");
  };

  auto* mutate = app.add_subcommand("mutate", "Mutate the initial seed along a walk");
  matrix_opts(mutate);
  mutate->add_option("--path", c.path, "Walk, e.g. 1,2,1");
  common(mutate);

  auto* dvec = app.add_subcommand("dvec", "d-vectors at the end of a walk");
  matrix_opts(dvec);
  dvec->add_option("--path", c.path, "Walk, e.g. 1,2,1");
  dvec->add_option("--method", c.method, "expansion | recurrence | both")
      ->check(CLI::IsMember({"expansion", "recurrence", "both"}));
  common(dvec);

  auto* check = app.add_subcommand("check", "Check every reduced walk up to a depth");
  matrix_opts(check);
  check->add_option("--depth", c.depth, "Walk length")->check(CLI::NonNegativeNumber);
  check->add_flag("--allow-symmetrizable", c.allow_symmetrizable, "Accept skew-symmetrizable matrices");
  common(check);
  campaign(check);

  auto* fuzz = app.add_subcommand("fuzz", "Random matrices and walks");
  fuzz->add_option("--rank", c.rank, "n")->check(CLI::Range(1, static_cast<int>(kMaxRank)));
  fuzz->add_option("--bmax", c.bmax, "Entry bound")->check(CLI::PositiveNumber);
  fuzz->add_option("--depth", c.depth, "Walk length")->check(CLI::NonNegativeNumber);
  fuzz->add_option("--trials", c.trials, "Number of trials")->check(CLI::PositiveNumber);
  fuzz->add_option("--seed", c.seed, "RNG seed");
  fuzz->add_option("--mode", c.mode, "skew-symmetric | symmetrizable")
      ->check(CLI::IsMember({"skew", "skew-symmetric", "symmetrizable", "skew-symmetrizable"}));
  fuzz->add_option("--coeffs", c.coeffs, "Coefficient preset")->check(CLI::IsMember({"trivial", "principal"}));
  common(fuzz);
  campaign(fuzz);

  auto* dist = app.add_subcommand("dist", "Bounded distance from a seed to a cluster variable");
  matrix_opts(dist);
  dist->add_option("--z-path", c.z_path, "Walk defining z");
  dist->add_option("--z-pos", c.z_pos, "Position of z at the end of --z-path (1-based)");
  dist->add_option("--path", c.path, "Walk to the seed t");
  dist->add_option("--bound", c.bound, "Search depth")->check(CLI::NonNegativeNumber);
  common(dist);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  try {
    if (*mutate) return cmd_mutate(c);
    if (*dvec) return cmd_dvec(c);
    if (*check) return cmd_check(c);
    if (*fuzz) return cmd_fuzz(c);
    if (*dist) return cmd_dist(c);
  } catch (const ResourceExceeded& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kExitResource;
  } catch (const NotDivisible& e) {
    std::cerr << "violation: " << e.what() << '\n';
    return kExitViolation;
  } catch (const std::invalid_argument& e) {  // InvalidMatrix, InvalidWalk, ParseError, ...
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const BadInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitBadInput;
}
