#include "bnmon/monitor.hpp"

#include <algorithm>
#include <cmath>

#include "bnmon/error.hpp"
#include "bnmon/normal.hpp"

namespace bnmon {

void ScoreAccumulator::add(double value) {
  ++n;
  const double delta = value - mean;
  mean += delta / static_cast<double>(n);
  m2 += delta * (value - mean);
}

void ScoreAccumulator::merge(const ScoreAccumulator& other) {
  if (other.n == 0) return;
  if (n == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n);
  const double nb = static_cast<double>(other.n);
  const double total = na + nb;
  const double delta = other.mean - mean;
  mean += delta * nb / total;
  m2 += other.m2 + delta * delta * na * nb / total;
  n += other.n;
}

double ScoreAccumulator::variance() const { return n < 2 ? 0.0 : std::max(m2, 0.0) / static_cast<double>(n - 1); }

double ScoreAccumulator::stddev() const { return std::sqrt(variance()); }

void TestConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 0.5)) throw Error("alpha must lie in (0, 0.5)");
  if (min_n < 2) throw Error("min_n must be at least 2");
}

MonitorState::MonitorState(const ScoredModel& scored)
    : variables_(scored.model().variables()), mu_p_(scored.negative_entropy()) {
  offset_.resize(variables_.size());
  std::size_t cells = 0;
  for (std::size_t r = 0; r < variables_.size(); ++r) {
    offset_[r] = cells;
    cells += variables_[r].cardinality();
  }
  cond_.resize(cells);
  mu_cond_.resize(cells);
  for (std::size_t r = 0; r < variables_.size(); ++r) {
    for (std::size_t q = 0; q < variables_[r].cardinality(); ++q) {
      mu_cond_[offset_[r] + q] = scored.conditional_negative_entropy(r, q);
    }
  }
}

void MonitorState::merge(const MonitorState& other) {
  if (other.cond_.size() != cond_.size()) throw Error("cannot merge monitor states of different models");
  global_.merge(other.global_);
  for (std::size_t c = 0; c < cond_.size(); ++c) cond_[c].merge(other.cond_[c]);
  heuristic_ = heuristic_ || other.heuristic_;
}

void update(MonitorState& state, const ScoredModel& scored, const Observation& x) {
  if (x.values.size() != state.variables_.size()) throw Error("observation does not match the model");
  if (x.observed_count() == 0) throw Error("no evidence");
  const std::size_t s = x.values.size();
  if (x.complete()) {
    const double y = log_score(scored, x).value;
    state.global_.add(y);
    for (std::size_t r = 0; r < s; ++r) {
      const auto q = static_cast<std::size_t>(x.values[r]);
      state.cond_[state.offset_[r] + q].add(y - std::log(scored.marginal(r, q)));
    }
    return;
  }
  state.heuristic_ = true;
  state.global_.add(expected_log_score(scored, x).value);
  for (std::size_t r = 0; r < s; ++r) {
    if (!x.observed(r)) continue;
    const auto q = static_cast<std::size_t>(x.values[r]);
    state.cond_[state.offset_[r] + q].add(expected_conditional_log_score(scored, x, r).value);
  }
}

double standardized_deviation(const ScoreAccumulator& acc, double target) {
  const double diff = acc.mean - target;
  const double s = acc.stddev();
  if (acc.n == 0) return 0.0;
  if (!(s > 0.0)) {
    if (std::abs(diff) <= 1e-12) return 0.0;
    return diff > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  }
  return diff / (s / std::sqrt(static_cast<double>(acc.n)));
}

TestReport report(const MonitorState& state, const TestConfig& config) {
  config.validate();
  TestReport rep;
  const ScoreAccumulator& g = state.global();
  rep.n = g.n;
  rep.y_bar = g.mean;
  rep.s = g.stddev();
  rep.mu_p = state.mu_p();
  rep.signed_z = standardized_deviation(g, rep.mu_p);
  rep.w = std::abs(rep.signed_z);
  rep.z_alpha = two_sided_critical_value(config.alpha);
  rep.reject = rep.n >= config.min_n && rep.w > rep.z_alpha;
  const double half = rep.n == 0 ? 0.0 : rep.z_alpha * rep.s / std::sqrt(static_cast<double>(rep.n));
  rep.interval_low = rep.y_bar - half;
  rep.interval_high = rep.y_bar + half;
  rep.heuristic = state.heuristic_mode();

  if (rep.n > 0 && rep.s == 0.0 && std::isinf(rep.w)) rep.notes.push_back("zero-variance stream");
  if (rep.n > 0 && rep.n < config.min_n) {
    rep.notes.push_back("fewer than " + std::to_string(config.min_n) + " observations; no test performed");
  }
  if (rep.heuristic) {
    rep.notes.push_back("incomplete observations present; statistics are heuristic indicators");
  }

  const auto& vars = state.variables();
  std::size_t tested = 0;
  for (std::size_t r = 0; r < vars.size(); ++r) {
    for (std::size_t q = 0; q < vars[r].cardinality(); ++q) {
      tested += state.conditional(r, q).n >= config.min_n ? 1 : 0;
    }
  }
  const double z_cond = config.bonferroni && tested > 0
                            ? two_sided_critical_value(config.alpha / static_cast<double>(tested))
                            : rep.z_alpha;

  for (std::size_t r = 0; r < vars.size(); ++r) {
    VariableSummary summary{vars[r].name, 0.0, false};
    for (std::size_t q = 0; q < vars[r].cardinality(); ++q) {
      const ScoreAccumulator& acc = state.conditional(r, q);
      if (acc.n == 0) continue;
      CellTest cell;
      cell.variable = vars[r].name;
      cell.value = vars[r].states[q];
      cell.n = acc.n;
      cell.w = std::abs(standardized_deviation(acc, state.mu_conditional(r, q)));
      cell.reject = acc.n >= config.min_n && cell.w > z_cond;
      if (acc.n >= config.min_n) summary.max_w = std::max(summary.max_w, cell.w);
      summary.reject = summary.reject || cell.reject;
      rep.per_variable.push_back(std::move(cell));
    }
    rep.variable_summary.push_back(std::move(summary));
  }
  rep.suggestions = suggest(rep);
  return rep;
}

std::vector<Suggestion> suggest(const TestReport& report) {
  std::vector<Suggestion> out;
  for (const auto& v : report.variable_summary) {
    if (!v.reject) continue;
    out.push_back({v.variable, v.max_w, "consider an arc between " + v.variable + " and another node"});
  }
  std::stable_sort(out.begin(), out.end(), [](const Suggestion& a, const Suggestion& b) { return a.max_w > b.max_w; });
  return out;
}

}  // namespace bnmon
