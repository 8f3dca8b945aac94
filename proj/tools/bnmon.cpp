// bnmon: command-line front end.
//
// Exit codes: 0 success / model not rejected, 2 input error, 3 the global
// test rejected the model.

#include <charconv>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bnmon/error.hpp"
#include "bnmon/io.hpp"
#include "bnmon/monitor.hpp"
#include "bnmon/network.hpp"
#include "bnmon/scoring.hpp"
#include "bnmon/simulation.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kRejected = 3;

using bnmon::io::format_double;

std::string fixed9(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 9);
  return std::string(buf, res.ptr);
}

int cmd_validate(const std::string& net_path) {
  const auto model = bnmon::io::read_network_file(net_path);
  const auto violations = bnmon::validate(model);
  for (const auto& v : violations) std::cout << v << '\n';
  return violations.empty() ? kOk : kInputError;
}

int cmd_entropy(const std::string& net_path, const std::string& conditional) {
  const auto model = bnmon::io::read_network_file(net_path);
  bnmon::require_valid(model);
  if (conditional.empty()) {
    std::cout << fixed9(bnmon::negative_entropy(model)) << '\n';
    return kOk;
  }
  const auto eq = conditional.find('=');
  if (eq == std::string::npos) throw bnmon::Error("--conditional expects VAR=VALUE");
  const std::size_t r = model.require_index(conditional.substr(0, eq));
  const std::string label = conditional.substr(eq + 1);
  const auto q = model.variable(r).state_index(label);
  if (!q) throw bnmon::Error("unknown state '" + label + "' of " + model.variable(r).name);
  std::cout << fixed9(bnmon::conditional_negative_entropy(model, r, *q)) << '\n';
  return kOk;
}

void print_report_table(const bnmon::TestReport& rep) {
  auto b = [](bool v) { return v ? "true" : "false"; };
  std::cout << "n: " << rep.n << '\n'
            << "y_bar: " << format_double(rep.y_bar) << '\n'
            << "s: " << format_double(rep.s) << '\n'
            << "mu_p: " << format_double(rep.mu_p) << '\n'
            << "w: " << format_double(rep.w) << '\n'
            << "signed_z: " << format_double(rep.signed_z) << '\n'
            << "z_alpha: " << format_double(rep.z_alpha) << '\n'
            << "reject: " << b(rep.reject) << '\n'
            << "interval: [" << format_double(rep.interval_low) << ", " << format_double(rep.interval_high)
            << "] (approximate posterior credible interval)\n"
            << "heuristic: " << b(rep.heuristic) << '\n';
  std::cout << "per_variable:\n";
  for (const auto& c : rep.per_variable) {
    std::cout << "  " << c.variable << '=' << c.value << " n=" << c.n << " w=" << format_double(c.w)
              << " reject=" << b(c.reject) << '\n';
  }
  std::cout << "variable_summary:\n";
  for (const auto& v : rep.variable_summary) {
    std::cout << "  " << v.variable << " max_w=" << format_double(v.max_w) << " reject=" << b(v.reject) << '\n';
  }
  std::cout << "suggestions:\n";
  for (const auto& s : rep.suggestions) std::cout << "  " << s.message << '\n';
  if (!rep.notes.empty()) {
    std::cout << "notes:\n";
    for (const auto& n : rep.notes) std::cout << "  " << n << '\n';
  }
}

int cmd_monitor(const std::string& net_path, const std::string& obs_path, const bnmon::TestConfig& config,
                bool json) {
  config.validate();
  const auto model = bnmon::io::read_network_file(net_path);
  bnmon::require_valid(model);
  const auto data = bnmon::io::read_observations_file(obs_path, model);
  const bnmon::ScoredModel scored(model);
  bnmon::MonitorState state(scored);
  for (const auto& x : data.rows) bnmon::update(state, scored, x);
  const auto rep = bnmon::report(state, config);
  if (json) {
    std::cout << bnmon::io::report_document(rep, {net_path, obs_path, config}).dump(2) << '\n';
  } else {
    print_report_table(rep);
  }
  return rep.reject ? kRejected : kOk;
}

struct SimulateArgs {
  std::string kind;
  std::string true_path;
  std::string model_path;
  std::string structure_path;
  std::size_t n = 1000;
  std::size_t reps = 1000;
  double alpha = 0.05;
  std::uint64_t min_n = 30;
  bool bonferroni = false;
  std::uint64_t seed = 1;
  double missing_rate = 0.0;
  double pseudocount = 1.0;
  std::size_t threads = 0;
  std::string csv_path;
};

int cmd_simulate(const SimulateArgs& a) {
  bnmon::ScenarioSpec spec;
  spec.true_model = bnmon::io::read_network_file(a.true_path);
  spec.n = a.n;
  spec.reps = a.reps;
  spec.config = {a.alpha, a.min_n, a.bonferroni};
  spec.seed = a.seed;
  spec.missing_rate = a.missing_rate;
  spec.pseudocount = a.pseudocount;
  spec.threads = a.threads;

  if (a.kind == "level") {
    spec.scored_model = spec.true_model;
  } else if (a.kind == "power") {
    if (a.model_path.empty()) throw bnmon::Error("power simulation needs --model");
    spec.scored_model = bnmon::io::read_network_file(a.model_path);
  } else {
    if (a.structure_path.empty()) throw bnmon::Error("structure simulation needs --structure");
    spec.structure = bnmon::io::read_structure_file(a.structure_path);
  }

  nlohmann::ordered_json out;
  out["scenario"] = a.kind;
  if (a.kind == "structure") {
    const auto contrast = bnmon::structure_contrast(spec);
    out["result"] = bnmon::io::sim_result_to_json(contrast.result);
    nlohmann::ordered_json s;
    s["global_rate"] = contrast.result.rejection_rate_global;
    s["best_variable"] = contrast.best_variable;
    s["best_conditional_rate"] = contrast.best_conditional_rate;
    s["gap"] = contrast.gap;
    out["structure"] = std::move(s);
    if (!a.csv_path.empty()) bnmon::io::write_text_file(a.csv_path, bnmon::io::sim_result_to_csv(contrast.result));
  } else {
    const auto result = bnmon::run(spec);
    out["result"] = bnmon::io::sim_result_to_json(result);
    if (a.kind == "level") {
      if (bnmon::log_score_variance(spec.true_model) > 1e-15) {
        out["clt"] = bnmon::io::clt_to_json(bnmon::clt_summary(result));
      } else {
        out["clt"] = nullptr;
      }
    }
    if (!a.csv_path.empty()) bnmon::io::write_text_file(a.csv_path, bnmon::io::sim_result_to_csv(result));
  }
  std::cout << out.dump(2) << '\n';
  return kOk;
}

int cmd_sample(const std::string& net_path, std::size_t n, std::uint64_t seed, double missing_rate,
               std::uint64_t mask_seed, const std::string& out_path) {
  const auto model = bnmon::io::read_network_file(net_path);
  bnmon::require_valid(model);
  const auto rows = bnmon::sample(model, n, seed, missing_rate, mask_seed);
  const auto csv = bnmon::io::observations_to_csv(model, rows);
  if (out_path.empty() || out_path == "-") {
    std::cout << csv;
  } else {
    bnmon::io::write_text_file(out_path, csv);
  }
  return kOk;
}

int cmd_project(const std::string& structure_path, const std::string& obs_path, double pseudocount,
                const std::string& out_path) {
  const auto structure = bnmon::io::read_structure_file(structure_path);
  const auto data = bnmon::io::read_observations_file(obs_path, structure);
  if (data.any_missing) throw bnmon::Error("projection needs complete observations");
  const auto fitted = bnmon::ml_project(structure, data.rows, pseudocount);
  const auto text = bnmon::io::network_to_json(fitted);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    bnmon::io::write_text_file(out_path, text);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-adequacy diagnostics for discrete Bayesian networks"};
  app.require_subcommand(1);

  std::string net_path;
  auto* validate = app.add_subcommand("validate", "Check a network file; exit 2 when invalid");
  validate->add_option("network", net_path, "Network JSON")->required();

  std::string conditional;
  auto* entropy = app.add_subcommand("entropy", "Print the model's negative entropy mu_p");
  entropy->add_option("network", net_path, "Network JSON")->required();
  entropy->add_option("--conditional", conditional, "Condition on VAR=VALUE");

  std::string obs_path;
  bnmon::TestConfig config;
  bool json = false;
  auto* monitor = app.add_subcommand("monitor", "Score observations and test model adequacy");
  monitor->add_option("network", net_path, "Network JSON")->required();
  monitor->add_option("observations", obs_path, "Observation CSV")->required();
  monitor->add_option("--alpha", config.alpha, "Two-sided test level")->capture_default_str();
  monitor->add_option("--min-n", config.min_n, "Minimum observations before testing")->capture_default_str();
  monitor->add_flag("--bonferroni", config.bonferroni, "Bonferroni-correct the conditional tests");
  monitor->add_flag("--json", json, "Emit the report as JSON");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo level, power and structure experiments");
  simulate->add_option("kind", sim.kind, "level | power | structure")
      ->required()
      ->check(CLI::IsMember({"level", "power", "structure"}));
  simulate->add_option("--true", sim.true_path, "Generating network JSON")->required();
  auto* model_opt = simulate->add_option("--model", sim.model_path, "Fixed scored network (power)");
  auto* structure_opt = simulate->add_option("--structure", sim.structure_path, "Structure to ML-project (structure)");
  model_opt->excludes(structure_opt);
  simulate->add_option("--n", sim.n, "Observations per replication")->capture_default_str();
  simulate->add_option("--reps", sim.reps, "Replications")->capture_default_str();
  simulate->add_option("--alpha", sim.alpha, "Two-sided test level")->capture_default_str();
  simulate->add_option("--min-n", sim.min_n, "Minimum observations before testing")->capture_default_str();
  simulate->add_flag("--bonferroni", sim.bonferroni, "Bonferroni-correct the conditional tests");
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--missing-rate", sim.missing_rate, "Per-field masking probability")->capture_default_str();
  simulate->add_option("--pseudocount", sim.pseudocount, "Smoothing for projection")->capture_default_str();
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = all cores)")->capture_default_str();
  simulate->add_option("--csv", sim.csv_path, "Write one row per replication to this file");

  std::size_t n = 1000;
  std::uint64_t seed = 1;
  std::uint64_t mask_seed = 2;
  double missing_rate = 0.0;
  std::string out_path;
  auto* sample = app.add_subcommand("sample", "Draw observations from a network");
  sample->add_option("network", net_path, "Network JSON")->required();
  sample->add_option("--n", n, "Number of cases")->capture_default_str();
  sample->add_option("--seed", seed, "Sampling seed")->capture_default_str();
  sample->add_option("--missing-rate", missing_rate, "Per-field masking probability")->capture_default_str();
  sample->add_option("--mask-seed", mask_seed, "Masking seed")->capture_default_str();
  sample->add_option("-o,--out", out_path, "Output CSV (default stdout)");

  std::string structure_path;
  double pseudocount = 1.0;
  auto* project = app.add_subcommand("project", "Fit a structure's CPTs to complete observations");
  project->add_option("structure", structure_path, "Structure JSON (CPTs optional)")->required();
  project->add_option("observations", obs_path, "Observation CSV")->required();
  project->add_option("--pseudocount", pseudocount, "Additive smoothing")->capture_default_str();
  project->add_option("-o,--out", out_path, "Output network JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*validate) return cmd_validate(net_path);
    if (*entropy) return cmd_entropy(net_path, conditional);
    if (*monitor) return cmd_monitor(net_path, obs_path, config, json);
    if (*simulate) return cmd_simulate(sim);
    if (*sample) return cmd_sample(net_path, n, seed, missing_rate, mask_seed, out_path);
    if (*project) return cmd_project(structure_path, obs_path, pseudocount, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
