// Serialization of trial and campaign reports.
//
// JSON is the stable interchange format. Keys are emitted in a fixed order
// and timings are null unless they were recorded, so a fixed-seed campaign
// serializes to the same bytes on every run.
#pragma once

#include <string>

#include <json.hpp>

#include "clusterdv/explorer.hpp"

namespace clusterdv {

enum class OutputFormat { json, tsv, pretty };

OutputFormat parse_format(const std::string& name);

nlohmann::ordered_json to_json(const Witness& w);
nlohmann::ordered_json to_json(const TrialReport& t);
nlohmann::ordered_json to_json(const Summary& s);
nlohmann::ordered_json to_json(const CampaignReport& r);

/// Renders a campaign in the requested format, newline-terminated.
std::string render(const CampaignReport& r, OutputFormat format);

/// One line: "pass=... violations=... resource_exceeded=... findings=...".
std::string summary_line(const Summary& s);

}  // namespace clusterdv
