#pragma once

// Streaming model-adequacy monitor.
//
// Every ingested observation contributes its log score to a global
// accumulator and, for each observed variable r with value q, a conditional
// score to the (r, q) accumulator. A report compares each running mean with
// the model's own expectation (mu_p or mu_{p|q}) in units of its standard
// error:
//
//   W = |Ybar - mu_p| / (S / sqrt(n))
//
// and flags W above the two-sided normal critical value.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "bnmon/network.hpp"
#include "bnmon/scoring.hpp"

namespace bnmon {

// Welford running mean / sum of squared deviations. Mergeable, so
// accumulators from disjoint streams can be combined in any grouping.
struct ScoreAccumulator {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double value);
  void merge(const ScoreAccumulator& other);
  // Sample variance with the n - 1 divisor; 0 when n < 2.
  double variance() const;
  double stddev() const;
};

struct TestConfig {
  double alpha = 0.05;
  std::uint64_t min_n = 30;
  bool bonferroni = false;

  void validate() const;
};

class MonitorState {
 public:
  explicit MonitorState(const ScoredModel& scored);

  const ScoreAccumulator& global() const { return global_; }
  const ScoreAccumulator& conditional(std::size_t r, std::size_t state) const { return cond_[offset_[r] + state]; }
  double mu_p() const { return mu_p_; }
  double mu_conditional(std::size_t r, std::size_t state) const { return mu_cond_[offset_[r] + state]; }
  bool heuristic_mode() const { return heuristic_; }
  const std::vector<Variable>& variables() const { return variables_; }

  // Combine with a state accumulated on another stream for the same model.
  void merge(const MonitorState& other);

 private:
  friend void update(MonitorState& state, const ScoredModel& scored, const Observation& x);

  std::vector<Variable> variables_;
  std::vector<std::size_t> offset_;
  ScoreAccumulator global_;
  std::vector<ScoreAccumulator> cond_;
  double mu_p_ = 0.0;
  std::vector<double> mu_cond_;
  bool heuristic_ = false;
};

// Ingest one observation. Complete observations use exact scores; partial
// ones use expected scores and switch the state into heuristic mode.
void update(MonitorState& state, const ScoredModel& scored, const Observation& x);

struct CellTest {
  std::string variable;
  std::string value;
  std::uint64_t n = 0;
  double w = 0.0;
  bool reject = false;
};

struct VariableSummary {
  std::string variable;
  double max_w = 0.0;  // over cells with n >= min_n
  bool reject = false;
};

struct Suggestion {
  std::string variable;
  double max_w = 0.0;
  std::string message;
};

struct TestReport {
  std::uint64_t n = 0;
  double y_bar = 0.0;
  double s = 0.0;
  double mu_p = 0.0;
  double w = 0.0;
  double signed_z = 0.0;
  double z_alpha = 0.0;
  bool reject = false;
  double interval_low = 0.0;
  double interval_high = 0.0;
  std::vector<CellTest> per_variable;
  std::vector<VariableSummary> variable_summary;
  std::vector<Suggestion> suggestions;
  bool heuristic = false;
  // Human-readable remarks (zero-variance streams, heuristic regime).
  std::vector<std::string> notes;
};

// Standardised deviation (mean - target) / (S / sqrt(n)) with the
// zero-variance limits: 0 when |mean - target| <= 1e-12, else +/-infinity.
double standardized_deviation(const ScoreAccumulator& acc, double target);

TestReport report(const MonitorState& state, const TestConfig& config);

// Variables with a rejecting conditional cell, by descending max W (ties by
// declaration order).
std::vector<Suggestion> suggest(const TestReport& report);

}  // namespace bnmon
