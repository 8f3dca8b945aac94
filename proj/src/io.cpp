#include "bnmon/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bnmon/error.hpp"

namespace bnmon::io {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kToolVersion = "bnmon 0.3.0";

std::string format_double(double v, bool exact) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = exact ? std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17)
                         : std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write failed for '" + path + "'");
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw Error("unknown key '" + key + "' in " + where);
  }
}

const json& require_key(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw Error("missing key '" + std::string(key) + "' in " + where);
  return *it;
}

}  // namespace

namespace {

NetworkModel parse_network(std::string_view text, bool require_cpts) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed network JSON: ") + e.what());
  }
  reject_unknown_keys(doc, {"variables", "parents", "cpts"}, "network");

  const json& vars_json = require_key(doc, "variables", "network");
  if (!vars_json.is_array()) throw Error("'variables' must be an array");
  std::vector<Variable> variables;
  for (std::size_t i = 0; i < vars_json.size(); ++i) {
    const json& v = vars_json[i];
    const std::string where = "variables[" + std::to_string(i) + "]";
    reject_unknown_keys(v, {"name", "states"}, where);
    const json& name = require_key(v, "name", where);
    const json& states = require_key(v, "states", where);
    if (!name.is_string()) throw Error(where + ".name must be a string");
    if (!states.is_array()) throw Error(where + ".states must be an array");
    Variable var;
    var.name = name.get<std::string>();
    for (const auto& s : states) {
      if (!s.is_string()) throw Error(where + ".states must hold strings");
      var.states.push_back(s.get<std::string>());
    }
    variables.push_back(std::move(var));
  }

  auto index_of = [&](const std::string& name) -> std::size_t {
    for (std::size_t r = 0; r < variables.size(); ++r) {
      if (variables[r].name == name) return r;
    }
    throw Error("unknown variable '" + name + "'");
  };

  std::vector<std::vector<std::size_t>> parents(variables.size());
  if (const auto it = doc.find("parents"); it != doc.end()) {
    if (!it->is_object()) throw Error("'parents' must be an object");
    for (const auto& [child, list] : it->items()) {
      const std::size_t r = index_of(child);
      if (!list.is_array()) throw Error("parents of '" + child + "' must be an array");
      for (const auto& p : list) {
        if (!p.is_string()) throw Error("parents of '" + child + "' must be names");
        parents[r].push_back(index_of(p.get<std::string>()));
      }
    }
  }

  std::vector<std::vector<double>> cpts(variables.size());
  std::vector<bool> seen(variables.size(), false);
  const json empty_cpts = json::object();
  const json& cpts_json = require_cpts || doc.contains("cpts") ? require_key(doc, "cpts", "network") : empty_cpts;
  if (!cpts_json.is_object()) throw Error("'cpts' must be an object");
  for (const auto& [name, rows] : cpts_json.items()) {
    const std::size_t r = index_of(name);
    seen[r] = true;
    if (!rows.is_array()) throw Error("CPT of '" + name + "' must be an array of rows");
    for (std::size_t row = 0; row < rows.size(); ++row) {
      const json& entries = rows[row];
      if (!entries.is_array()) throw Error("CPT of '" + name + "' row " + std::to_string(row) + " must be an array");
      if (entries.size() != variables[r].cardinality()) {
        throw Error("CPT of '" + name + "' row " + std::to_string(row) + " has " + std::to_string(entries.size()) +
                    " entries, expected " + std::to_string(variables[r].cardinality()));
      }
      for (const auto& q : entries) {
        if (!q.is_number()) throw Error("CPT of '" + name + "' holds a non-number");
        cpts[r].push_back(q.get<double>());
      }
    }
  }
  for (std::size_t r = 0; r < variables.size(); ++r) {
    if (seen[r]) continue;
    if (require_cpts) throw Error("missing CPT for '" + variables[r].name + "'");
    std::size_t rows = 1;
    for (std::size_t p : parents[r]) rows *= variables[p].cardinality();
    const std::size_t t = variables[r].cardinality();
    cpts[r].assign(rows * t, t == 0 ? 0.0 : 1.0 / static_cast<double>(t));
  }
  return NetworkModel(std::move(variables), std::move(parents), std::move(cpts));
}

}  // namespace

NetworkModel parse_network_json(std::string_view text) { return parse_network(text, true); }
NetworkModel parse_structure_json(std::string_view text) { return parse_network(text, false); }

NetworkModel read_network_file(const std::string& path) { return parse_network_json(read_text_file(path)); }
NetworkModel read_structure_file(const std::string& path) { return parse_structure_json(read_text_file(path)); }

std::string network_to_json(const NetworkModel& model) {
  std::ostringstream out;
  auto quote = [](const std::string& s) { return json(s).dump(); };
  out << "{\n  \"variables\": [";
  for (std::size_t r = 0; r < model.size(); ++r) {
    const Variable& v = model.variable(r);
    out << (r ? "," : "") << "\n    {\"name\": " << quote(v.name) << ", \"states\": [";
    for (std::size_t k = 0; k < v.states.size(); ++k) out << (k ? ", " : "") << quote(v.states[k]);
    out << "]}";
  }
  out << "\n  ],\n  \"parents\": {";
  for (std::size_t r = 0; r < model.size(); ++r) {
    out << (r ? "," : "") << "\n    " << quote(model.variable(r).name) << ": [";
    const auto& pa = model.parents(r);
    for (std::size_t j = 0; j < pa.size(); ++j) out << (j ? ", " : "") << quote(model.variable(pa[j]).name);
    out << "]";
  }
  out << "\n  },\n  \"cpts\": {";
  for (std::size_t r = 0; r < model.size(); ++r) {
    const std::size_t t = model.cardinality(r);
    const auto& cpt = model.cpt(r);
    out << (r ? "," : "") << "\n    " << quote(model.variable(r).name) << ": [";
    for (std::size_t row = 0; t > 0 && row * t < cpt.size(); ++row) {
      out << (row ? ", " : "") << "[";
      for (std::size_t k = 0; k < t && row * t + k < cpt.size(); ++k) {
        out << (k ? ", " : "") << format_double(cpt[row * t + k], true);
      }
      out << "]";
    }
    out << "]";
  }
  out << "\n  }\n}\n";
  return out.str();
}

void write_network_file(const std::string& path, const NetworkModel& model) {
  write_text_file(path, network_to_json(model));
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    std::string_view f = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.remove_suffix(1);
    fields.emplace_back(f);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

ObservationSet parse_observations_csv(std::string_view text, const NetworkModel& model) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw Error("observation file has no header");

  const auto header = split_csv_line(lines[0]);
  std::vector<std::size_t> column_var;
  std::set<std::size_t> used;
  for (const auto& name : header) {
    const auto r = model.index_of(name);
    if (!r) throw Error("observation header names unknown variable '" + name + "'");
    if (!used.insert(*r).second) throw Error("observation header repeats variable '" + name + "'");
    column_var.push_back(*r);
  }

  ObservationSet out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string row_name = "row " + std::to_string(li);
    const auto fields = split_csv_line(lines[li]);
    if (fields.size() != header.size()) {
      throw Error(row_name + ": expected " + std::to_string(header.size()) + " fields, found " +
                  std::to_string(fields.size()));
    }
    Observation x = Observation::empty(model.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string& label = fields[c];
      if (label.empty() || label == "?") continue;
      const Variable& v = model.variable(column_var[c]);
      const auto k = v.state_index(label);
      if (!k) throw Error(row_name + ", column " + v.name + ": unknown state '" + label + "'");
      x.values[column_var[c]] = static_cast<int>(*k);
    }
    if (x.observed_count() == 0) throw Error(row_name + ": every field is missing");
    out.any_missing = out.any_missing || !x.complete();
    out.rows.push_back(std::move(x));
  }
  return out;
}

ObservationSet read_observations_file(const std::string& path, const NetworkModel& model) {
  return parse_observations_csv(read_text_file(path), model);
}

std::string observations_to_csv(const NetworkModel& model, const std::vector<Observation>& rows) {
  std::string out;
  for (std::size_t r = 0; r < model.size(); ++r) {
    out += (r ? "," : "");
    out += model.variable(r).name;
  }
  out += '\n';
  for (const auto& x : rows) {
    for (std::size_t r = 0; r < model.size(); ++r) {
      if (r) out += ',';
      out += x.observed(r) ? model.variable(r).states[static_cast<std::size_t>(x.values[r])] : "?";
    }
    out += '\n';
  }
  return out;
}

namespace {

ordered_json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

ordered_json report_to_json(const TestReport& report) {
  ordered_json j;
  j["n"] = report.n;
  j["y_bar"] = number(report.y_bar);
  j["s"] = number(report.s);
  j["mu_p"] = number(report.mu_p);
  j["w"] = number(report.w);
  j["signed_z"] = number(report.signed_z);
  j["z_alpha"] = number(report.z_alpha);
  j["reject"] = report.reject;
  j["interval"] = ordered_json::array({number(report.interval_low), number(report.interval_high)});
  ordered_json cells = ordered_json::array();
  for (const auto& c : report.per_variable) {
    ordered_json e;
    e["variable"] = c.variable;
    e["value"] = c.value;
    e["n"] = c.n;
    e["w"] = number(c.w);
    e["reject"] = c.reject;
    cells.push_back(std::move(e));
  }
  j["per_variable"] = std::move(cells);
  ordered_json summary = ordered_json::array();
  for (const auto& v : report.variable_summary) {
    ordered_json e;
    e["variable"] = v.variable;
    e["max_w"] = number(v.max_w);
    e["reject"] = v.reject;
    summary.push_back(std::move(e));
  }
  j["variable_summary"] = std::move(summary);
  ordered_json sugg = ordered_json::array();
  for (const auto& s : report.suggestions) {
    ordered_json e;
    e["variable"] = s.variable;
    e["max_w"] = number(s.max_w);
    e["message"] = s.message;
    sugg.push_back(std::move(e));
  }
  j["suggestions"] = std::move(sugg);
  j["heuristic"] = report.heuristic;
  return j;
}

ordered_json report_document(const TestReport& report, const ReportMetadata& meta) {
  ordered_json doc;
  doc["report"] = report_to_json(report);
  ordered_json m;
  m["model_path"] = meta.model_path;
  m["observations_path"] = meta.observations_path;
  ordered_json cfg;
  cfg["alpha"] = meta.config.alpha;
  cfg["min_n"] = meta.config.min_n;
  cfg["bonferroni"] = meta.config.bonferroni;
  m["config"] = std::move(cfg);
  m["tool_version"] = kToolVersion;
  m["interval_label"] = "approximate posterior credible interval";
  m["notes"] = report.notes;
  doc["metadata"] = std::move(m);
  return doc;
}

ordered_json sim_result_to_json(const SimResult& result) {
  ordered_json j;
  j["seed"] = result.seed;
  j["n"] = result.n;
  j["reps"] = result.reps;
  j["rejection_rate_global"] = result.rejection_rate_global;
  ordered_json rates = ordered_json::array();
  for (const auto& v : result.variable_rates) {
    ordered_json e;
    e["variable"] = v.variable;
    e["rate"] = v.rate;
    rates.push_back(std::move(e));
  }
  j["variable_rates"] = std::move(rates);
  j["signed_z_mean"] = number(result.signed_z_mean);
  j["signed_z_std"] = number(result.signed_z_std);
  j["finite_reps"] = result.finite_reps;
  ordered_json w = ordered_json::array();
  for (const auto& o : result.outcomes) w.push_back(number(o.w));
  j["w"] = std::move(w);
  return j;
}

ordered_json clt_to_json(const CltDiagnostic& clt) {
  ordered_json j;
  j["mean"] = clt.mean;
  j["std"] = clt.stddev;
  j["cdf_distance"] = clt.cdf_distance;
  j["reps"] = clt.reps;
  return j;
}

std::string sim_result_to_csv(const SimResult& result) {
  std::string out = "rep_index,W,signed_z,reject";
  for (const auto& v : result.variable_rates) out += ",max_w_" + v.variable;
  out += '\n';
  for (std::size_t i = 0; i < result.outcomes.size(); ++i) {
    const auto& o = result.outcomes[i];
    out += std::to_string(i) + ',' + format_double(o.w) + ',' + format_double(o.signed_z) + ',' +
           (o.reject ? "1" : "0");
    for (double w : o.variable_max_w) out += ',' + format_double(w);
    out += '\n';
  }
  return out;
}

}  // namespace bnmon::io
