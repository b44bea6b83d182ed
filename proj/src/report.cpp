#include "clusterdv/report.hpp"

#include <sstream>

namespace clusterdv {

namespace {

using ojson = nlohmann::ordered_json;

ojson vec(const IntVector& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ojson opt_vec(const std::optional<DVector>& v) { return v ? vec(*v) : ojson(nullptr); }

std::string vec_text(const IntVector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v(i));
  return s + ")";
}

}  // namespace

OutputFormat parse_format(const std::string& name) {
  if (name == "json") return OutputFormat::json;
  if (name == "tsv") return OutputFormat::tsv;
  if (name == "pretty") return OutputFormat::pretty;
  throw std::invalid_argument("unknown format '" + name + "'");
}

ojson to_json(const Witness& w) {
  ojson j;
  j["check"] = w.check;
  j["detail"] = w.detail;
  j["reference"] = {{"matrix", ojson::parse(matrix_to_json(w.reference_matrix).dump())},
                    {"path_from_root", w.root_to_reference.one_based()}};
  j["path"] = w.vertex_path.one_based();
  j["position"] = w.position + 1;
  j["expansion"] = w.expansion;
  j["dvec_expansion"] = opt_vec(w.dvec_expansion);
  j["dvec_recurrence"] = opt_vec(w.dvec_recurrence);
  if (w.dvec_neighbor) j["dvec_neighbor"] = vec(*w.dvec_neighbor);
  return j;
}

ojson to_json(const TrialReport& t) {
  ojson j;
  j["index"] = t.index;
  j["rng_seed"] = t.rng_seed ? ojson(*t.rng_seed) : ojson(nullptr);
  j["matrix"] = ojson::parse(matrix_to_json(t.matrix).dump());
  j["walk"] = t.walk.one_based();
  j["status"] = to_string(t.status);
  ojson checks;
  for (const auto& name : check_names()) {
    auto it = t.checks.find(name);
    checks[name] = it == t.checks.end() ? "skipped" : to_string(it->second);
  }
  j["checks"] = checks;
  j["max_terms"] = t.max_terms;
  if (!t.note.empty()) j["note"] = t.note;
  j["witness"] = t.witness ? to_json(*t.witness) : ojson(nullptr);
  ojson findings = ojson::array();
  for (const auto& f : t.findings) findings.push_back(to_json(f));
  j["findings"] = findings;
  j["seconds"] = t.seconds ? ojson(*t.seconds) : ojson(nullptr);
  return j;
}

ojson to_json(const Summary& s) {
  return {{"pass", s.pass},
          {"violations", s.violations},
          {"resource_exceeded", s.resource_exceeded},
          {"findings", s.findings}};
}

ojson to_json(const CampaignReport& r) {
  ojson j;
  j["config"] = ojson::parse(r.config.dump());
  ojson trials = ojson::array();
  for (const auto& t : r.trials) trials.push_back(to_json(t));
  j["trials"] = trials;
  j["summary"] = to_json(r.summary);
  j["wall_time"] = r.wall_time ? ojson(*r.wall_time) : ojson(nullptr);
  return j;
}

std::string summary_line(const Summary& s) {
  return "pass=" + std::to_string(s.pass) + " violations=" + std::to_string(s.violations) +
         " resource_exceeded=" + std::to_string(s.resource_exceeded) +
         " findings=" + std::to_string(s.findings);
}

std::string render(const CampaignReport& r, OutputFormat format) {
  std::ostringstream os;
  switch (format) {
    case OutputFormat::json:
      os << to_json(r).dump(2) << '\n';
      break;
    case OutputFormat::tsv:
      os << "index\trng_seed\tstatus\twalk\tmax_terms";
      for (const auto& name : check_names()) os << '\t' << name;
      os << "\tfindings\n";
      for (const auto& t : r.trials) {
        os << t.index << '\t' << (t.rng_seed ? std::to_string(*t.rng_seed) : "-") << '\t'
           << to_string(t.status) << '\t' << t.walk.to_string() << '\t' << t.max_terms;
        for (const auto& name : check_names()) {
          auto it = t.checks.find(name);
          os << '\t' << (it == t.checks.end() ? "skipped" : to_string(it->second));
        }
        os << '\t' << t.findings.size() << '\n';
      }
      break;
    case OutputFormat::pretty:
      os << r.trials.size() << " trials: " << summary_line(r.summary) << '\n';
      for (const auto& t : r.trials) {
        if (t.status == CheckStatus::pass && t.findings.empty()) continue;
        os << "trial " << t.index << " walk [" << t.walk.to_string() << "]: " << to_string(t.status);
        if (!t.note.empty()) os << " (" << t.note << ")";
        os << '\n';
        auto show = [&](const Witness& w, const char* label) {
          os << "  " << label << ' ' << w.check << ": " << w.detail << '\n'
             << "    reference path [" << w.root_to_reference.to_string() << "], then ["
             << w.vertex_path.to_string() << "], position " << w.position + 1 << '\n';
          if (!w.expansion.empty()) os << "    expansion " << w.expansion << '\n';
          if (w.dvec_expansion) os << "    d (expansion)  " << vec_text(*w.dvec_expansion) << '\n';
          if (w.dvec_recurrence) os << "    d (recurrence) " << vec_text(*w.dvec_recurrence) << '\n';
          if (w.dvec_neighbor) os << "    d (neighbor)   " << vec_text(*w.dvec_neighbor) << '\n';
        };
        if (t.witness) show(*t.witness, "witness");
        for (const auto& f : t.findings) show(f, "finding");
      }
      if (r.wall_time) os << "wall time " << *r.wall_time << " s\n";
      break;
  }
  return os.str();
}

}  // namespace clusterdv
