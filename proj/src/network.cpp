#include "bnmon/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "bnmon/error.hpp"
#include "bnmon/random.hpp"

namespace bnmon {

std::optional<std::size_t> Variable::state_index(const std::string& label) const {
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k] == label) return k;
  }
  return std::nullopt;
}

bool Observation::complete() const {
  return std::none_of(values.begin(), values.end(), [](int v) { return v == kMissing; });
}

std::size_t Observation::observed_count() const {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](int v) { return v != kMissing; }));
}

NetworkModel::NetworkModel(std::vector<Variable> variables,
                           std::vector<std::vector<std::size_t>> parents,
                           std::vector<std::vector<double>> cpts)
    : variables_(std::move(variables)), parents_(std::move(parents)), cpts_(std::move(cpts)) {
  parents_.resize(variables_.size());
  cpts_.resize(variables_.size());
}

std::optional<std::size_t> NetworkModel::index_of(const std::string& name) const {
  for (std::size_t r = 0; r < variables_.size(); ++r) {
    if (variables_[r].name == name) return r;
  }
  return std::nullopt;
}

std::size_t NetworkModel::require_index(const std::string& name) const {
  if (auto r = index_of(name)) return *r;
  throw Error("unknown variable '" + name + "'");
}

std::size_t NetworkModel::row_count(std::size_t r) const {
  std::size_t rows = 1;
  for (std::size_t p : parents_[r]) rows *= p < size() ? cardinality(p) : 1;
  return rows;
}

std::size_t NetworkModel::row_of(std::size_t r, const Observation& x) const {
  std::size_t row = 0;
  for (std::size_t p : parents_[r]) {
    if (!x.observed(p)) throw Error("parent '" + variables_[p].name + "' unobserved");
    row = row * cardinality(p) + static_cast<std::size_t>(x.values[p]);
  }
  return row;
}

std::size_t NetworkModel::cell_count() const {
  std::size_t t = 1;
  for (const auto& v : variables_) {
    const std::size_t c = std::max<std::size_t>(v.cardinality(), 1);
    if (t > std::numeric_limits<std::size_t>::max() / c) return std::numeric_limits<std::size_t>::max();
    t *= c;
  }
  return t;
}

std::vector<std::size_t> NetworkModel::topological_order() const {
  const std::size_t s = size();
  std::vector<std::size_t> pending(s, 0);
  std::vector<std::vector<std::size_t>> children(s);
  for (std::size_t r = 0; r < s; ++r) {
    for (std::size_t p : parents_[r]) {
      if (p >= s) throw Error("parent index out of range for '" + variables_[r].name + "'");
      children[p].push_back(r);
      ++pending[r];
    }
  }
  std::set<std::size_t> ready;
  for (std::size_t r = 0; r < s; ++r) {
    if (pending[r] == 0) ready.insert(r);
  }
  std::vector<std::size_t> order;
  order.reserve(s);
  while (!ready.empty()) {
    const std::size_t r = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(r);
    for (std::size_t c : children[r]) {
      if (--pending[c] == 0) ready.insert(c);
    }
  }
  if (order.size() != s) throw Error("parent relation contains a cycle");
  return order;
}

bool NetworkModel::same_variables(const NetworkModel& other) const {
  if (size() != other.size()) return false;
  for (std::size_t r = 0; r < size(); ++r) {
    if (variables_[r].name != other.variables_[r].name ||
        variables_[r].states != other.variables_[r].states) {
      return false;
    }
  }
  return true;
}

bool NetworkModel::same_structure(const NetworkModel& other) const {
  return same_variables(other) && parents_ == other.parents_;
}

std::vector<std::string> validate(const NetworkModel& model) {
  std::vector<std::string> out;
  const std::size_t s = model.size();
  std::set<std::string> names;
  for (std::size_t r = 0; r < s; ++r) {
    const Variable& v = model.variable(r);
    if (v.name.empty()) out.push_back("empty name for variable " + std::to_string(r));
    if (!names.insert(v.name).second) out.push_back("duplicate variable name '" + v.name + "'");
    if (v.cardinality() < 2) out.push_back("variable " + v.name + " has fewer than 2 states");
    std::set<std::string> labels;
    for (const auto& label : v.states) {
      if (!labels.insert(label).second) out.push_back("duplicate state '" + label + "' in " + v.name);
    }
  }

  bool parents_ok = true;
  for (std::size_t r = 0; r < s; ++r) {
    const auto& pa = model.parents(r);
    std::set<std::size_t> seen;
    for (std::size_t p : pa) {
      if (p >= s) {
        out.push_back("unknown parent of " + model.variable(r).name);
        parents_ok = false;
      } else if (p == r) {
        out.push_back("variable " + model.variable(r).name + " is its own parent");
        parents_ok = false;
      } else if (!seen.insert(p).second) {
        out.push_back("duplicate parent " + model.variable(p).name + " of " + model.variable(r).name);
      }
    }
  }
  if (parents_ok) {
    try {
      (void)model.topological_order();
    } catch (const Error&) {
      out.push_back("parent relation contains a cycle");
    }
  }

  for (std::size_t r = 0; r < s; ++r) {
    const Variable& v = model.variable(r);
    const std::size_t t = v.cardinality();
    const auto& cpt = model.cpt(r);
    const std::size_t rows = model.row_count(r);
    if (t == 0 || cpt.size() != rows * t) {
      out.push_back("CPT of " + v.name + " has " + std::to_string(cpt.size()) + " entries, expected " +
                    std::to_string(rows) + " rows of " + std::to_string(t));
      continue;
    }
    for (std::size_t row = 0; row < rows; ++row) {
      double total = 0.0;
      for (std::size_t k = 0; k < t; ++k) {
        const double q = cpt[row * t + k];
        const std::string locus = v.name + " row " + std::to_string(row) + " state " + v.states[k];
        if (!std::isfinite(q)) {
          out.push_back("non-finite entry at " + locus);
        } else if (q < 0.0) {
          out.push_back("negative entry at " + locus);
        } else if (q == 0.0) {
          out.push_back("zero entry at " + locus);
        }
        total += q;
      }
      if (!(std::abs(total - 1.0) <= kRowSumTolerance)) {
        out.push_back("row sum ≠ 1 at " + v.name + " row " + std::to_string(row));
      }
    }
  }
  return out;
}

void require_valid(const NetworkModel& model) {
  const auto violations = validate(model);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid network:";
  for (const auto& v : violations) msg << "\n  " << v;
  throw Error(msg.str());
}

std::size_t cell_index(const NetworkModel& model, const Observation& x) {
  if (x.values.size() != model.size() || !x.complete()) throw Error("observation incomplete");
  std::size_t cell = 0;
  for (std::size_t r = 0; r < model.size(); ++r) {
    cell = cell * model.cardinality(r) + static_cast<std::size_t>(x.values[r]);
  }
  return cell;
}

Observation cell_assignment(const NetworkModel& model, std::size_t cell) {
  Observation x = Observation::empty(model.size());
  for (std::size_t r = model.size(); r-- > 0;) {
    const std::size_t t = model.cardinality(r);
    x.values[r] = static_cast<int>(cell % t);
    cell /= t;
  }
  return x;
}

double joint_probability(const NetworkModel& model, const Observation& x) {
  if (x.values.size() != model.size() || !x.complete()) throw Error("observation incomplete");
  double p = 1.0;
  for (std::size_t r = 0; r < model.size(); ++r) {
    p *= model.probability(r, model.row_of(r, x), static_cast<std::size_t>(x.values[r]));
  }
  return p;
}

JointTable enumerate_joint(const NetworkModel& model, std::size_t cap) {
  const std::size_t t = model.cell_count();
  if (t > cap) {
    throw Error("joint table has " + std::to_string(t) + " cells, above the cap of " + std::to_string(cap));
  }
  JointTable table;
  table.probabilities.resize(t);
  Observation x = Observation::empty(model.size());
  std::fill(x.values.begin(), x.values.end(), 0);
  for (std::size_t k = 0; k < t; ++k) {
    table.probabilities[k] = joint_probability(model, x);
    // Odometer increment, last variable fastest.
    for (std::size_t r = model.size(); r-- > 0;) {
      if (++x.values[r] < static_cast<int>(model.cardinality(r))) break;
      x.values[r] = 0;
    }
  }
  return table;
}

namespace {

std::size_t draw_categorical(CounterRng& rng, const double* probs, std::size_t t) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < t; ++k) {
    acc += probs[k];
    if (u < acc) return k;
  }
  return t - 1;
}

}  // namespace

std::vector<Observation> sample(const NetworkModel& model, std::size_t n, std::uint64_t seed,
                                double missing_rate, std::uint64_t mask_seed) {
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) throw Error("missing rate must lie in [0, 1)");
  const auto order = model.topological_order();
  std::vector<Observation> out(n, Observation::empty(model.size()));
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(derive_key(seed, i));
    Observation& x = out[i];
    for (std::size_t r : order) {
      const std::size_t t = model.cardinality(r);
      const double* row = model.cpt(r).data() + model.row_of(r, x) * t;
      x.values[r] = static_cast<int>(draw_categorical(rng, row, t));
    }
  }
  if (missing_rate > 0.0) apply_mask(out, missing_rate, mask_seed);
  return out;
}

void apply_mask(std::vector<Observation>& data, double missing_rate, std::uint64_t mask_seed) {
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) throw Error("missing rate must lie in [0, 1)");
  if (missing_rate == 0.0) return;
  std::vector<bool> hide;
  for (std::size_t i = 0; i < data.size(); ++i) {
    Observation& x = data[i];
    const std::size_t s = x.values.size();
    if (s == 0) continue;
    CounterRng rng(derive_key(mask_seed, i));
    hide.assign(s, false);
    for (;;) {
      std::size_t hidden = 0;
      for (std::size_t r = 0; r < s; ++r) {
        hide[r] = rng.uniform() < missing_rate;
        hidden += hide[r] ? 1 : 0;
      }
      if (hidden < s) break;
    }
    for (std::size_t r = 0; r < s; ++r) {
      if (hide[r]) x.values[r] = Observation::kMissing;
    }
  }
}

NetworkModel ml_project(const NetworkModel& structure, const std::vector<Observation>& data,
                        double pseudocount) {
  if (data.empty()) throw Error("ml_project needs at least one observation");
  if (!(pseudocount >= 0.0) || !std::isfinite(pseudocount)) throw Error("pseudocount must be nonnegative");
  (void)structure.topological_order();

  const std::size_t s = structure.size();
  std::vector<std::vector<double>> counts(s);
  for (std::size_t r = 0; r < s; ++r) counts[r].assign(structure.row_count(r) * structure.cardinality(r), 0.0);

  for (std::size_t i = 0; i < data.size(); ++i) {
    const Observation& x = data[i];
    if (x.values.size() != s || !x.complete()) {
      throw Error("ml_project requires complete observations (case " + std::to_string(i) + ")");
    }
    for (std::size_t r = 0; r < s; ++r) {
      counts[r][structure.row_of(r, x) * structure.cardinality(r) + static_cast<std::size_t>(x.values[r])] += 1.0;
    }
  }

  std::vector<std::vector<double>> cpts(s);
  for (std::size_t r = 0; r < s; ++r) {
    const std::size_t t = structure.cardinality(r);
    const std::size_t rows = structure.row_count(r);
    cpts[r].resize(rows * t);
    for (std::size_t row = 0; row < rows; ++row) {
      double total = 0.0;
      bool any_zero = false;
      for (std::size_t k = 0; k < t; ++k) {
        total += counts[r][row * t + k];
        any_zero = any_zero || counts[r][row * t + k] == 0.0;
      }
      if (pseudocount == 0.0 && total == 0.0) {
        throw Error("unsupported parent configuration: " + structure.variable(r).name + " row " +
                    std::to_string(row) + " has no data");
      }
      if (pseudocount == 0.0 && any_zero) {
        throw Error("zero count in " + structure.variable(r).name + " row " + std::to_string(row) +
                    " needs a positive pseudocount");
      }
      const double denom = total + pseudocount * static_cast<double>(t);
      for (std::size_t k = 0; k < t; ++k) {
        cpts[r][row * t + k] = (counts[r][row * t + k] + pseudocount) / denom;
      }
    }
  }

  std::vector<std::vector<std::size_t>> parents(s);
  for (std::size_t r = 0; r < s; ++r) parents[r] = structure.parents(r);
  return NetworkModel(structure.variables(), std::move(parents), std::move(cpts));
}

}  // namespace bnmon
