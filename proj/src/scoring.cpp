#include "bnmon/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "bnmon/error.hpp"
#include "bnmon/kernels.hpp"

namespace bnmon {
namespace {

void require_assignment_shape(const NetworkModel& model, const Observation& x) {
  if (x.values.size() != model.size()) {
    throw Error("observation has " + std::to_string(x.values.size()) + " fields, model has " +
                std::to_string(model.size()) + " variables");
  }
  for (std::size_t r = 0; r < model.size(); ++r) {
    if (x.observed(r) && (x.values[r] < 0 || static_cast<std::size_t>(x.values[r]) >= model.cardinality(r))) {
      throw Error("state index out of range for " + model.variable(r).name);
    }
  }
}

void require_complete(const NetworkModel& model, const Observation& x) {
  require_assignment_shape(model, x);
  if (!x.complete()) throw Error("observation incomplete; use expected_log_score for partial observations");
}

std::vector<std::size_t> family_sorted(const NetworkModel& model, std::size_t r) {
  std::vector<std::size_t> fam = model.parents(r);
  fam.push_back(r);
  std::sort(fam.begin(), fam.end());
  return fam;
}

}  // namespace

ScoredModel::ScoredModel(NetworkModel model)
    : model_(std::move(model)), tree_(build_clique_tree(model_)), prior_(calibrate(tree_, {}).tree) {
  const std::size_t s = model_.size();
  log_cpts_.resize(s);
  offset_.resize(s);
  std::size_t cells = 0;
  for (std::size_t r = 0; r < s; ++r) {
    log_cpts_[r].resize(model_.cpt(r).size());
    std::transform(model_.cpt(r).begin(), model_.cpt(r).end(), log_cpts_[r].begin(),
                   [](double q) { return std::log(q); });
    offset_[r] = cells;
    cells += model_.cardinality(r);
  }
  mu_p_ = bnmon::negative_entropy(prior_);
  marginals_.resize(cells);
  mu_cond_.resize(cells);
  absorbed_.reserve(cells);
  absorbed_logs_.reserve(cells);
  for (std::size_t r = 0; r < s; ++r) {
    const Factor m = bnmon::marginal(prior_, {r});
    for (std::size_t q = 0; q < model_.cardinality(r); ++q) {
      marginals_[offset_[r] + q] = m[q];
      absorbed_.push_back(absorb(tree_, r, q));
      mu_cond_[offset_[r] + q] = bnmon::negative_entropy(absorbed_.back());
      absorbed_logs_.push_back(log_tables(absorbed_.back()));
    }
  }
}

ScoreValue log_score(const NetworkModel& model, const Observation& x) {
  require_complete(model, x);
  return {std::log(joint_probability(model, x)), ScoreKind::kComplete};
}

ScoreValue log_score(const ScoredModel& scored, const Observation& x) {
  const NetworkModel& model = scored.model();
  require_complete(model, x);
  double y = 0.0;
  for (std::size_t r = 0; r < model.size(); ++r) {
    y += scored.log_cpt(r)[model.row_of(r, x) * model.cardinality(r) + static_cast<std::size_t>(x.values[r])];
  }
  return {y, ScoreKind::kComplete};
}

ScoreValue expected_log_score(const NetworkModel& model, const CliqueTree& tree, const Observation& x) {
  require_assignment_shape(model, x);
  if (x.observed_count() == 0) throw Error("no evidence");
  const auto post = family_posteriors(model, tree, x);
  double y = 0.0;
  for (std::size_t r = 0; r < model.size(); ++r) {
    std::vector<double> logs(model.cpt(r).size());
    std::transform(model.cpt(r).begin(), model.cpt(r).end(), logs.begin(), [](double q) { return std::log(q); });
    y += kernels::dot(post[r], logs);
  }
  return {y, ScoreKind::kExpected};
}

ScoreValue expected_log_score(const ScoredModel& scored, const Observation& x) {
  const NetworkModel& model = scored.model();
  require_assignment_shape(model, x);
  if (x.observed_count() == 0) throw Error("no evidence");
  const auto post = family_posteriors(model, scored.tree(), x);
  double y = 0.0;
  for (std::size_t r = 0; r < model.size(); ++r) y += kernels::dot(post[r], scored.log_cpt(r));
  return {y, ScoreKind::kExpected};
}

ScoreValue conditional_log_score(const NetworkModel& model, const Observation& x, std::size_t r) {
  require_complete(model, x);
  if (r >= model.size()) throw Error("variable index out of range");
  const CliqueTree prior = calibrate(build_clique_tree(model), {}).tree;
  const double pq = marginal(prior, {r})[static_cast<std::size_t>(x.values[r])];
  return {std::log(joint_probability(model, x)) - std::log(pq), ScoreKind::kConditional};
}

ScoreValue conditional_log_score(const ScoredModel& scored, const Observation& x, std::size_t r) {
  if (r >= scored.model().size()) throw Error("variable index out of range");
  const double y = log_score(scored, x).value;
  return {y - std::log(scored.marginal(r, static_cast<std::size_t>(x.values[r]))), ScoreKind::kConditional};
}

ScoreValue expected_conditional_log_score(const ScoredModel& scored, const Observation& x, std::size_t r) {
  require_assignment_shape(scored.model(), x);
  if (r >= scored.model().size() || !x.observed(r)) throw Error("conditioning variable not observed");
  const auto q = static_cast<std::size_t>(x.values[r]);
  return {expected_log_density(scored.conditional_tree(r, q), scored.conditional_logs(r, q), x),
          ScoreKind::kConditional};
}

double negative_entropy(const NetworkModel& model, const CliqueTree& calibrated) {
  if (calibrated.variable_count() != model.size()) throw Error("tree was not built from this model");
  return negative_entropy(calibrated);
}

double negative_entropy(const NetworkModel& model) {
  return negative_entropy(calibrate(build_clique_tree(model), {}).tree);
}

double conditional_negative_entropy(const NetworkModel& model, std::size_t r, std::size_t state) {
  if (r >= model.size()) throw Error("variable index out of range");
  if (state >= model.cardinality(r)) throw Error("state index out of range for " + model.variable(r).name);
  return negative_entropy(absorb(build_clique_tree(model), r, state));
}

double cross_mean(const NetworkModel& true_model, const NetworkModel& scored_model) {
  if (!true_model.same_variables(scored_model)) throw Error("variable mismatch between true and scored models");
  require_valid(scored_model);
  const CliqueTree truth = calibrate(build_clique_tree(true_model), {}).tree;

  double mu = 0.0;
  for (std::size_t r = 0; r < scored_model.size(); ++r) {
    const auto fam = family_sorted(scored_model, r);
    std::vector<double> fam_marginal;
    if (truth.find_clique(fam) != CliqueTree::npos) {
      fam_marginal = marginal(truth, fam).values_in_order([&] {
        std::vector<std::size_t> order = scored_model.parents(r);
        order.push_back(r);
        return order;
      }());
    } else {
      // Family spans several cliques of the true tree: enumerate its
      // configurations through evidence probabilities.
      std::vector<std::size_t> order = scored_model.parents(r);
      order.push_back(r);
      std::size_t cells = 1;
      for (std::size_t v : order) cells *= true_model.cardinality(v);
      fam_marginal.resize(cells);
      EvidenceSet ev = EvidenceSet::empty(true_model.size());
      for (std::size_t k = 0; k < cells; ++k) {
        std::size_t rem = k;
        for (std::size_t j = order.size(); j-- > 0;) {
          ev.values[order[j]] = static_cast<int>(rem % true_model.cardinality(order[j]));
          rem /= true_model.cardinality(order[j]);
        }
        fam_marginal[k] = calibrate(truth, ev).evidence_probability;
      }
    }
    std::vector<double> logs(scored_model.cpt(r).size());
    std::transform(scored_model.cpt(r).begin(), scored_model.cpt(r).end(), logs.begin(),
                   [](double q) { return std::log(q); });
    mu += kernels::dot(fam_marginal, logs);
  }
  return mu;
}

}  // namespace bnmon
