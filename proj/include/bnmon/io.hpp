#pragma once

// File formats.
//
// Network JSON:
//   {"variables": [{"name": "A", "states": ["a0", "a1"]}, ...],
//    "parents":   {"B": ["A"], ...},
//    "cpts":      {"A": [[0.5, 0.5]], "B": [[0.9, 0.1], [0.1, 0.9]]}}
// Unknown keys are rejected. CPT rows follow the parent-configuration order
// of NetworkModel. Probabilities are written with 17 significant digits.
//
// Observation CSV: header of variable names (any order, any subset), then
// one row of state labels per case; "?" or an empty field marks a missing
// value.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bnmon/monitor.hpp"
#include "bnmon/network.hpp"
#include "bnmon/simulation.hpp"

namespace bnmon::io {

// Locale-independent decimal text. 17 significant digits when `exact`,
// else the shortest string that round-trips.
std::string format_double(double v, bool exact = false);

NetworkModel parse_network_json(std::string_view text);
NetworkModel read_network_file(const std::string& path);

// Same format with "cpts" optional; any CPTs present are still checked for
// shape. Missing CPTs are filled uniformly.
NetworkModel parse_structure_json(std::string_view text);
NetworkModel read_structure_file(const std::string& path);
std::string network_to_json(const NetworkModel& model);
void write_network_file(const std::string& path, const NetworkModel& model);

struct ObservationSet {
  std::vector<Observation> rows;
  bool any_missing = false;
};

ObservationSet parse_observations_csv(std::string_view text, const NetworkModel& model);
ObservationSet read_observations_file(const std::string& path, const NetworkModel& model);
std::string observations_to_csv(const NetworkModel& model, const std::vector<Observation>& rows);

// TestReport as an object with exactly its documented fields; infinities
// serialise as "inf" / "-inf".
nlohmann::ordered_json report_to_json(const TestReport& report);

struct ReportMetadata {
  std::string model_path;
  std::string observations_path;
  TestConfig config;
};

nlohmann::ordered_json report_document(const TestReport& report, const ReportMetadata& meta);

nlohmann::ordered_json sim_result_to_json(const SimResult& result);
nlohmann::ordered_json clt_to_json(const CltDiagnostic& clt);
std::string sim_result_to_csv(const SimResult& result);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace bnmon::io
