#pragma once

// Monte Carlo harness for the monitor's statistics: level and power of the
// global test, conditional-vs-global contrast under structural error, and a
// descriptive check of the normal approximation of the standardised mean.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bnmon/monitor.hpp"
#include "bnmon/network.hpp"

namespace bnmon {

struct ScenarioSpec {
  NetworkModel true_model;
  // Fixed scored model p. When absent, `structure` is ML-projected on each
  // replication's own sample.
  std::optional<NetworkModel> scored_model;
  std::optional<NetworkModel> structure;
  std::size_t n = 1000;
  std::size_t reps = 100;
  TestConfig config;
  std::uint64_t seed = 1;
  double missing_rate = 0.0;
  double pseudocount = 1.0;
  // Worker threads; 0 picks hardware concurrency. Results never depend on it.
  std::size_t threads = 0;

  void validate() const;
};

struct RepOutcome {
  double w = 0.0;
  double signed_z = 0.0;
  bool reject = false;
  std::vector<double> variable_max_w;
  std::vector<bool> variable_reject;
};

struct VariableRate {
  std::string variable;
  double rate = 0.0;
};

struct SimResult {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t reps = 0;
  double rejection_rate_global = 0.0;
  std::vector<VariableRate> variable_rates;
  // Over replications with a finite signed_z.
  double signed_z_mean = 0.0;
  double signed_z_std = 0.0;
  std::size_t finite_reps = 0;
  std::vector<RepOutcome> outcomes;
};

struct StructureContrast {
  SimResult result;
  std::string best_variable;
  double best_conditional_rate = 0.0;
  // best_conditional_rate - rejection_rate_global
  double gap = 0.0;
};

struct CltDiagnostic {
  double mean = 0.0;
  double stddev = 0.0;
  // sup |F_empirical - Phi| over the sorted signed_z sample.
  double cdf_distance = 0.0;
  std::size_t reps = 0;
};

// Replication seeds: sampling uses derive_key(seed, 2 * rep) and masking
// derive_key(seed, 2 * rep + 1).
SimResult run(const ScenarioSpec& spec);

StructureContrast structure_contrast(const ScenarioSpec& spec);

CltDiagnostic clt_diagnostic(const ScenarioSpec& spec);
CltDiagnostic clt_summary(const SimResult& result);

// Variance of ln p(X) under p itself, by enumeration.
double log_score_variance(const NetworkModel& model);

}  // namespace bnmon
