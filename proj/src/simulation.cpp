#include "bnmon/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "bnmon/error.hpp"
#include "bnmon/normal.hpp"
#include "bnmon/random.hpp"
#include "bnmon/scoring.hpp"

namespace bnmon {
namespace {

RepOutcome run_replication(const ScenarioSpec& spec, const ScoredModel* fixed, std::size_t rep) {
  std::vector<Observation> data = sample(spec.true_model, spec.n, derive_key(spec.seed, 2 * rep));
  std::optional<ScoredModel> projected;
  const ScoredModel* scored = fixed;
  if (scored == nullptr) {
    projected.emplace(ml_project(*spec.structure, data, spec.pseudocount));
    scored = &*projected;
  }
  if (spec.missing_rate > 0.0) apply_mask(data, spec.missing_rate, derive_key(spec.seed, 2 * rep + 1));

  MonitorState state(*scored);
  for (const auto& x : data) update(state, *scored, x);
  const TestReport rep_report = report(state, spec.config);

  RepOutcome out;
  out.w = rep_report.w;
  out.signed_z = rep_report.signed_z;
  out.reject = rep_report.reject;
  for (const auto& v : rep_report.variable_summary) {
    out.variable_max_w.push_back(v.max_w);
    out.variable_reject.push_back(v.reject);
  }
  return out;
}

}  // namespace

void ScenarioSpec::validate() const {
  require_valid(true_model);
  if (scored_model.has_value() == structure.has_value()) {
    throw Error("scenario needs exactly one of a scored model or a structure to project");
  }
  const NetworkModel& other = scored_model ? *scored_model : *structure;
  if (!true_model.same_variables(other)) throw Error("true and scored models have different variables or states");
  if (scored_model) require_valid(*scored_model);
  if (structure) (void)structure->topological_order();
  if (reps < 1) throw Error("reps must be at least 1");
  config.validate();
  if (n < config.min_n) throw Error("n must be at least min_n");
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) throw Error("missing rate must lie in [0, 1)");
  if (structure && !(pseudocount > 0.0)) throw Error("projection needs a positive pseudocount");
}

SimResult run(const ScenarioSpec& spec) {
  spec.validate();
  std::optional<ScoredModel> fixed;
  if (spec.scored_model) fixed.emplace(*spec.scored_model);

  std::vector<RepOutcome> outcomes(spec.reps);
  std::size_t threads = spec.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : spec.threads;
  threads = std::min(threads, spec.reps);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::size_t error_rep = spec.reps;
  auto worker = [&] {
    for (;;) {
      const std::size_t rep = next.fetch_add(1);
      if (rep >= spec.reps) return;
      try {
        outcomes[rep] = run_replication(spec, fixed ? &*fixed : nullptr, rep);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (rep < error_rep) {
          error_rep = rep;
          first_error = std::current_exception();
        }
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (first_error) {
    try {
      std::rethrow_exception(first_error);
    } catch (const std::exception& e) {
      throw Error("replication " + std::to_string(error_rep) + ": " + e.what());
    }
  }

  // Aggregate in replication order so the result is independent of scheduling.
  SimResult result;
  result.seed = spec.seed;
  result.n = spec.n;
  result.reps = spec.reps;
  const std::size_t s = spec.true_model.size();
  std::vector<std::size_t> var_rejects(s, 0);
  std::size_t global_rejects = 0;
  ScoreAccumulator z;
  for (const auto& o : outcomes) {
    global_rejects += o.reject ? 1 : 0;
    for (std::size_t r = 0; r < s; ++r) var_rejects[r] += o.variable_reject[r] ? 1 : 0;
    if (std::isfinite(o.signed_z)) z.add(o.signed_z);
  }
  const double m = static_cast<double>(spec.reps);
  result.rejection_rate_global = static_cast<double>(global_rejects) / m;
  for (std::size_t r = 0; r < s; ++r) {
    result.variable_rates.push_back({spec.true_model.variable(r).name, static_cast<double>(var_rejects[r]) / m});
  }
  result.signed_z_mean = z.mean;
  result.signed_z_std = z.stddev();
  result.finite_reps = z.n;
  result.outcomes = std::move(outcomes);
  return result;
}

StructureContrast structure_contrast(const ScenarioSpec& spec) {
  if (!spec.structure) throw Error("structure contrast needs a structure to project");
  StructureContrast out;
  out.result = run(spec);
  for (const auto& v : out.result.variable_rates) {
    if (out.best_variable.empty() || v.rate > out.best_conditional_rate) {
      out.best_variable = v.variable;
      out.best_conditional_rate = v.rate;
    }
  }
  out.gap = out.best_conditional_rate - out.result.rejection_rate_global;
  return out;
}

double log_score_variance(const NetworkModel& model) {
  const JointTable joint = enumerate_joint(model);
  double mean = 0.0;
  for (double p : joint.probabilities) mean += p * std::log(p);
  double var = 0.0;
  for (double p : joint.probabilities) {
    const double d = std::log(p) - mean;
    var += p * d * d;
  }
  return var;
}

CltDiagnostic clt_summary(const SimResult& result) {
  std::vector<double> z;
  for (const auto& o : result.outcomes) {
    if (std::isfinite(o.signed_z)) z.push_back(o.signed_z);
  }
  CltDiagnostic d;
  d.reps = z.size();
  d.mean = result.signed_z_mean;
  d.stddev = result.signed_z_std;
  std::sort(z.begin(), z.end());
  const double m = static_cast<double>(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double phi = normal_cdf(z[i]);
    d.cdf_distance = std::max({d.cdf_distance, std::abs(static_cast<double>(i + 1) / m - phi),
                               std::abs(phi - static_cast<double>(i) / m)});
  }
  return d;
}

CltDiagnostic clt_diagnostic(const ScenarioSpec& spec) {
  if (!spec.scored_model || !(*spec.scored_model == spec.true_model)) {
    throw Error("normality diagnostic needs the scored model to equal the true model");
  }
  if (!(log_score_variance(spec.true_model) > 1e-15)) {
    throw Error("zero-variance scenario: every log score is identical (fair-coin degeneracy), so S = 0");
  }
  return clt_summary(run(spec));
}

}  // namespace bnmon
