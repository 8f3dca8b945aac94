#pragma once

// Logarithmic scores and negative entropies.
//
// Sign convention: a score is ln p(x) <= 0 and the "negative entropy"
// mu_p = sum_k p_k ln p_k < 0 is the model's expected score under itself.

#include <cstddef>
#include <vector>

#include "bnmon/junction_tree.hpp"
#include "bnmon/network.hpp"

namespace bnmon {

enum class ScoreKind { kComplete, kExpected, kConditional };

struct ScoreValue {
  double value = 0.0;
  ScoreKind kind = ScoreKind::kComplete;
};

// A validated model together with everything the monitor reuses per
// observation: log CPTs, the prior-calibrated tree, single-variable
// marginals, mu_p and, per (variable, state), the absorbed conditional tree
// and its negative entropy. Immutable once constructed.
class ScoredModel {
 public:
  explicit ScoredModel(NetworkModel model);

  const NetworkModel& model() const { return model_; }
  const CliqueTree& tree() const { return tree_; }
  const CliqueTree& prior() const { return prior_; }
  const std::vector<double>& log_cpt(std::size_t r) const { return log_cpts_[r]; }

  double negative_entropy() const { return mu_p_; }
  double marginal(std::size_t r, std::size_t state) const { return marginals_[offset_[r] + state]; }

  // Flat index of the (variable, state) cell; cells are ordered by
  // variable then state.
  std::size_t cell(std::size_t r, std::size_t state) const { return offset_[r] + state; }
  std::size_t cell_count() const { return marginals_.size(); }

  double conditional_negative_entropy(std::size_t r, std::size_t state) const { return mu_cond_[cell(r, state)]; }
  const CliqueTree& conditional_tree(std::size_t r, std::size_t state) const { return absorbed_[cell(r, state)]; }
  const TreeLogTables& conditional_logs(std::size_t r, std::size_t state) const { return absorbed_logs_[cell(r, state)]; }

 private:
  NetworkModel model_;
  CliqueTree tree_;
  CliqueTree prior_;
  std::vector<std::vector<double>> log_cpts_;
  std::vector<std::size_t> offset_;
  std::vector<double> marginals_;
  double mu_p_ = 0.0;
  std::vector<double> mu_cond_;
  std::vector<CliqueTree> absorbed_;
  std::vector<TreeLogTables> absorbed_logs_;
};

ScoreValue log_score(const NetworkModel& model, const Observation& x);
ScoreValue log_score(const ScoredModel& scored, const Observation& x);

// E[ln p(X*) | x] via family posteriors: sum over families of
// P(family config | x) * ln cpt entry.
ScoreValue expected_log_score(const NetworkModel& model, const CliqueTree& tree, const Observation& x);
ScoreValue expected_log_score(const ScoredModel& scored, const Observation& x);

// ln of x's remaining variables under p(. | Q_r = x_r):
// log_score(x) - ln P(Q_r = x_r).
ScoreValue conditional_log_score(const NetworkModel& model, const Observation& x, std::size_t r);
ScoreValue conditional_log_score(const ScoredModel& scored, const Observation& x, std::size_t r);

// Expected conditional score for a partial x with Q_r observed, computed on
// the absorbed tree with x's other values as evidence.
ScoreValue expected_conditional_log_score(const ScoredModel& scored, const Observation& x, std::size_t r);

// mu_p from clique and separator marginals of a calibrated prior tree.
double negative_entropy(const NetworkModel& model, const CliqueTree& calibrated);
double negative_entropy(const NetworkModel& model);

// mu_{p|q_r}: negative entropy of the tree after absorbing Q_r = state.
double conditional_negative_entropy(const NetworkModel& model, std::size_t r, std::size_t state);

// mu = sum_x pi(x) ln p(x), decomposed over the scored model's families
// using family marginals of the true model.
double cross_mean(const NetworkModel& true_model, const NetworkModel& scored_model);

}  // namespace bnmon
