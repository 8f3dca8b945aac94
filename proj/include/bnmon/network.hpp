#pragma once

// Discrete Bayesian networks: representation, validation, the brute-force
// joint table, ancestral sampling and maximum-likelihood CPT fitting.
//
// Conventions used throughout the library:
//   * logarithms are natural;
//   * a CPT is stored flat, one row per parent configuration. Rows are in
//     mixed-radix order of the parent list with the first-listed parent
//     varying slowest; entry (row, state) lives at row * cardinality + state;
//   * joint cells are indexed in mixed radix over the declared variable
//     order, first-declared variable varying slowest.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bnmon {

struct Variable {
  std::string name;
  std::vector<std::string> states;

  std::size_t cardinality() const { return states.size(); }
  std::optional<std::size_t> state_index(const std::string& label) const;

  friend bool operator==(const Variable&, const Variable&) = default;
};

// One (possibly partial) categorical observation. values[r] is the state
// index of variable r or kMissing.
struct Observation {
  static constexpr int kMissing = -1;

  std::vector<int> values;

  Observation() = default;
  explicit Observation(std::vector<int> v) : values(std::move(v)) {}
  static Observation empty(std::size_t variable_count) {
    return Observation(std::vector<int>(variable_count, kMissing));
  }

  bool observed(std::size_t r) const { return values[r] != kMissing; }
  bool complete() const;
  std::size_t observed_count() const;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// Evidence for propagation uses the same representation as an observation.
using EvidenceSet = Observation;

class NetworkModel {
 public:
  NetworkModel() = default;

  // No validation happens here; call validate() to collect violations.
  NetworkModel(std::vector<Variable> variables, std::vector<std::vector<std::size_t>> parents,
               std::vector<std::vector<double>> cpts);

  std::size_t size() const { return variables_.size(); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(std::size_t r) const { return variables_[r]; }
  std::size_t cardinality(std::size_t r) const { return variables_[r].cardinality(); }
  const std::vector<std::size_t>& parents(std::size_t r) const { return parents_[r]; }
  const std::vector<double>& cpt(std::size_t r) const { return cpts_[r]; }
  std::vector<double>& mutable_cpt(std::size_t r) { return cpts_[r]; }

  std::optional<std::size_t> index_of(const std::string& name) const;
  std::size_t require_index(const std::string& name) const;

  // Number of parent configurations of variable r.
  std::size_t row_count(std::size_t r) const;
  // CPT row selected by the parents' values in a (complete enough) observation.
  std::size_t row_of(std::size_t r, const Observation& x) const;
  double probability(std::size_t r, std::size_t row, std::size_t state) const {
    return cpts_[r][row * cardinality(r) + state];
  }

  // Total number of joint cells t = t_1 * ... * t_s, saturating at SIZE_MAX.
  std::size_t cell_count() const;

  // Topological order, ties by declaration index. Throws on cycles.
  std::vector<std::size_t> topological_order() const;

  // Same variables, states and parent sets.
  bool same_structure(const NetworkModel& other) const;
  bool same_variables(const NetworkModel& other) const;

  friend bool operator==(const NetworkModel&, const NetworkModel&) = default;

 private:
  std::vector<Variable> variables_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<double>> cpts_;
};

struct JointTable {
  std::vector<double> probabilities;
};

constexpr std::size_t kDefaultJointCap = std::size_t{1} << 20;
constexpr double kRowSumTolerance = 1e-9;

// Every invariant violation, each with a locus. Empty means valid.
std::vector<std::string> validate(const NetworkModel& model);

// Throws bnmon::Error listing the violations when the model is invalid.
void require_valid(const NetworkModel& model);

std::size_t cell_index(const NetworkModel& model, const Observation& x);
Observation cell_assignment(const NetworkModel& model, std::size_t cell);

double joint_probability(const NetworkModel& model, const Observation& x);

JointTable enumerate_joint(const NetworkModel& model, std::size_t cap = kDefaultJointCap);

// Ancestral sampling of n complete cases; case i draws from the stream
// derive_key(seed, i). When missing_rate > 0 each field is then masked
// independently using mask_seed (see apply_mask).
std::vector<Observation> sample(const NetworkModel& model, std::size_t n, std::uint64_t seed,
                                double missing_rate = 0.0, std::uint64_t mask_seed = 0);

// Hide each field with probability missing_rate. A mask hiding every
// variable of a case is redrawn, so every case keeps at least one value.
void apply_mask(std::vector<Observation>& data, double missing_rate, std::uint64_t mask_seed);

// Fit the CPTs of `structure` to complete data by smoothed relative
// frequency: (count + pseudocount) / (row total + pseudocount * t_r).
NetworkModel ml_project(const NetworkModel& structure, const std::vector<Observation>& data,
                        double pseudocount);

}  // namespace bnmon
