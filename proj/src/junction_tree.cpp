#include "bnmon/junction_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bnmon/error.hpp"
#include "bnmon/kernels.hpp"

namespace bnmon {
namespace {

using Graph = std::vector<std::vector<char>>;

Graph moral_graph(const NetworkModel& model) {
  const std::size_t s = model.size();
  Graph g(s, std::vector<char>(s, 0));
  auto link = [&](std::size_t a, std::size_t b) {
    if (a != b) g[a][b] = g[b][a] = 1;
  };
  for (std::size_t r = 0; r < s; ++r) {
    const auto& pa = model.parents(r);
    for (std::size_t i = 0; i < pa.size(); ++i) {
      link(r, pa[i]);
      for (std::size_t j = i + 1; j < pa.size(); ++j) link(pa[i], pa[j]);
    }
  }
  return g;
}

// Cliques produced by min-fill elimination, non-maximal ones dropped.
std::vector<std::vector<std::size_t>> eliminate(Graph g) {
  const std::size_t s = g.size();
  std::vector<bool> gone(s, false);
  std::vector<std::vector<std::size_t>> cliques;
  for (std::size_t step = 0; step < s; ++step) {
    std::size_t best = CliqueTree::npos;
    std::size_t best_fill = 0;
    for (std::size_t v = 0; v < s; ++v) {
      if (gone[v]) continue;
      std::vector<std::size_t> nb;
      for (std::size_t u = 0; u < s; ++u) {
        if (!gone[u] && g[v][u]) nb.push_back(u);
      }
      std::size_t fill = 0;
      for (std::size_t i = 0; i < nb.size(); ++i) {
        for (std::size_t j = i + 1; j < nb.size(); ++j) fill += g[nb[i]][nb[j]] ? 0 : 1;
      }
      if (best == CliqueTree::npos || fill < best_fill) {
        best = v;
        best_fill = fill;
      }
    }
    std::vector<std::size_t> clique{best};
    for (std::size_t u = 0; u < s; ++u) {
      if (!gone[u] && g[best][u]) clique.push_back(u);
    }
    for (std::size_t i = 1; i < clique.size(); ++i) {
      for (std::size_t j = i + 1; j < clique.size(); ++j) g[clique[i]][clique[j]] = g[clique[j]][clique[i]] = 1;
    }
    gone[best] = true;
    std::sort(clique.begin(), clique.end());
    const bool subsumed = std::any_of(cliques.begin(), cliques.end(), [&](const auto& c) {
      return std::includes(c.begin(), c.end(), clique.begin(), clique.end());
    });
    if (!subsumed) cliques.push_back(std::move(clique));
  }
  return cliques;
}

std::vector<std::size_t> intersect(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::size_t> cards_of(const std::vector<std::size_t>& vars, const std::vector<std::size_t>& all) {
  std::vector<std::size_t> out;
  out.reserve(vars.size());
  for (std::size_t v : vars) out.push_back(all[v]);
  return out;
}

std::size_t find_root(const std::vector<Factor>& cliques) {
  std::size_t root = CliqueTree::npos;
  std::size_t lowest = CliqueTree::npos;
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    if (cliques[c].vars().empty()) continue;
    if (cliques[c].vars().front() < lowest) {
      lowest = cliques[c].vars().front();
      root = c;
    }
  }
  return root == CliqueTree::npos && !cliques.empty() ? 0 : root;
}

Factor ratio(const Factor& num, const Factor& den) {
  Factor out(num.vars(), num.cards(), 0.0);
  kernels::divide_safe(out.values(), num.values(), den.values());
  return out;
}

}  // namespace

std::vector<std::size_t> CliqueTree::present_variables() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < present_.size(); ++v) {
    if (present_[v]) out.push_back(v);
  }
  return out;
}

std::size_t CliqueTree::find_clique(const std::vector<std::size_t>& vars) const {
  for (std::size_t c = 0; c < cliques_.size(); ++c) {
    if (cliques_[c].covers(vars)) return c;
  }
  return npos;
}

double CliqueTree::density(const Observation& x) const {
  double d = 1.0;
  for (const auto& c : cliques_) d *= c.at(x.values);
  for (const auto& s : separators_) {
    const double v = s.table.at(x.values);
    d = v == 0.0 ? 0.0 : d / v;
  }
  return d;
}

void CliqueTree::rebuild_schedule() {
  for (auto& sep : separators_) {
    sep.map_a = cliques_[sep.a].index_map(sep.table.vars(), sep.table.cards());
    sep.map_b = cliques_[sep.b].index_map(sep.table.vars(), sep.table.cards());
  }
  root_ = find_root(cliques_);
  order_.clear();
  parent_sep_.assign(cliques_.size(), npos);
  if (cliques_.empty()) return;

  std::vector<std::vector<std::size_t>> adjacent(cliques_.size());
  for (std::size_t e = 0; e < separators_.size(); ++e) {
    adjacent[separators_[e].a].push_back(e);
    adjacent[separators_[e].b].push_back(e);
  }
  std::vector<bool> seen(cliques_.size(), false);
  std::vector<std::size_t> stack{root_};
  seen[root_] = true;
  while (!stack.empty()) {
    const std::size_t c = stack.back();
    stack.pop_back();
    order_.push_back(c);
    // Reverse so the lowest separator index is visited first.
    for (auto it = adjacent[c].rbegin(); it != adjacent[c].rend(); ++it) {
      const auto& sep = separators_[*it];
      const std::size_t other = sep.a == c ? sep.b : sep.a;
      if (seen[other]) continue;
      seen[other] = true;
      parent_sep_[other] = *it;
      stack.push_back(other);
    }
  }
  if (order_.size() != cliques_.size()) throw Error("clique graph is not connected");
}

CliqueTree build_clique_tree(const NetworkModel& model) {
  require_valid(model);
  const std::size_t s = model.size();
  CliqueTree tree;
  tree.cards_.resize(s);
  for (std::size_t r = 0; r < s; ++r) tree.cards_[r] = model.cardinality(r);
  tree.present_.assign(s, true);

  const auto sets = eliminate(moral_graph(model));
  for (const auto& vars : sets) tree.cliques_.emplace_back(vars, cards_of(vars, tree.cards_), 1.0);

  // Maximum-weight spanning tree on separator size. Kruskal with a stable
  // sort keeps ties in (i, j) order; zero-weight edges join components.
  struct Edge {
    std::size_t i, j, weight;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) edges.push_back({i, j, intersect(sets[i], sets[j]).size()});
  }
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.weight > y.weight; });
  std::vector<std::size_t> comp(sets.size());
  std::iota(comp.begin(), comp.end(), 0);
  auto find = [&](std::size_t x) {
    while (comp[x] != x) x = comp[x] = comp[comp[x]];
    return x;
  };
  for (const Edge& e : edges) {
    const std::size_t a = find(e.i);
    const std::size_t b = find(e.j);
    if (a == b) continue;
    comp[b] = a;
    const auto sv = intersect(sets[e.i], sets[e.j]);
    CliqueTree::Separator sep;
    sep.a = e.i;
    sep.b = e.j;
    sep.table = Factor(sv, cards_of(sv, tree.cards_), 1.0);
    tree.separators_.push_back(std::move(sep));
  }

  // Load each CPT into the first clique holding its family.
  tree.family_clique_.assign(s, CliqueTree::npos);
  tree.family_map_.resize(s);
  tree.family_order_.resize(s);
  for (std::size_t r = 0; r < s; ++r) {
    std::vector<std::size_t> fam = model.parents(r);
    fam.push_back(r);
    tree.family_order_[r] = fam;
    std::vector<std::size_t> sorted_fam = fam;
    std::sort(sorted_fam.begin(), sorted_fam.end());
    const std::size_t c = tree.find_clique(sorted_fam);
    if (c == CliqueTree::npos) throw Error("internal: family of " + model.variable(r).name + " not covered");
    tree.family_clique_[r] = c;

    Factor cpt(sorted_fam, cards_of(sorted_fam, tree.cards_), 0.0);
    // Fill by walking the CPT layout (parents..., child) and mapping into
    // the sorted layout.
    Factor probe(sorted_fam, cards_of(sorted_fam, tree.cards_), 0.0);
    std::vector<double> positions(probe.size());
    std::iota(positions.begin(), positions.end(), 0.0);
    std::copy(positions.begin(), positions.end(), probe.values().begin());
    const auto cpt_layout = probe.values_in_order(fam);
    for (std::size_t k = 0; k < cpt_layout.size(); ++k) {
      cpt[static_cast<std::size_t>(cpt_layout[k])] = model.cpt(r)[k];
    }
    tree.cliques_[c].multiply(cpt);
    tree.family_map_[r] = tree.cliques_[c].index_map(cpt.vars(), cpt.cards());
  }

  tree.rebuild_schedule();
  return tree;
}

struct Propagator {
  static Calibration run(const CliqueTree& input, const EvidenceSet& evidence) {
    Calibration out{input, 1.0, 0.0};
    CliqueTree& t = out.tree;
    if (!evidence.values.empty() && evidence.values.size() != t.cards_.size()) {
      throw Error("evidence has " + std::to_string(evidence.values.size()) + " entries, expected " +
                  std::to_string(t.cards_.size()));
    }
    for (std::size_t v = 0; v < evidence.values.size(); ++v) {
      if (!evidence.observed(v) || !t.present_[v]) continue;
      if (static_cast<std::size_t>(evidence.values[v]) >= t.cards_[v]) throw Error("evidence state out of range");
      for (auto& c : t.cliques_) c.restrict_to(v, static_cast<std::size_t>(evidence.values[v]));
    }
    if (t.cliques_.empty()) {
      t.calibrated_ = true;
      return out;
    }

    double log_z = 0.0;
    auto absorb_norm = [&](double z) {
      if (!(z > 0.0) || !std::isfinite(z)) throw UnderflowError();
      log_z += std::log(z);
    };

    // Collect towards the root.
    for (auto it = t.order_.rbegin(); it != t.order_.rend(); ++it) {
      const std::size_t child = *it;
      if (child == t.root_) continue;
      auto& sep = t.separators_[t.parent_sep_[child]];
      const bool child_is_a = sep.a == child;
      const std::size_t parent = child_is_a ? sep.b : sep.a;
      Factor msg = t.cliques_[child].marginalize(sep.table.vars(), child_is_a ? sep.map_a : sep.map_b);
      const double z = msg.total();
      absorb_norm(z);
      kernels::scale(msg.values(), 1.0 / z);
      kernels::scale(t.cliques_[child].values(), 1.0 / z);
      t.cliques_[parent].multiply(ratio(msg, sep.table), child_is_a ? sep.map_b : sep.map_a);
      sep.table = std::move(msg);
    }
    absorb_norm(t.cliques_[t.root_].normalize());

    // Distribute from the root.
    for (std::size_t child : t.order_) {
      if (child == t.root_) continue;
      auto& sep = t.separators_[t.parent_sep_[child]];
      const bool child_is_a = sep.a == child;
      const std::size_t parent = child_is_a ? sep.b : sep.a;
      Factor msg = t.cliques_[parent].marginalize(sep.table.vars(), child_is_a ? sep.map_b : sep.map_a);
      t.cliques_[child].multiply(ratio(msg, sep.table), child_is_a ? sep.map_a : sep.map_b);
      sep.table = std::move(msg);
    }

    t.calibrated_ = true;
    out.log_evidence_probability = log_z;
    out.evidence_probability = std::exp(log_z);
    return out;
  }
};

Calibration calibrate(const CliqueTree& tree, const EvidenceSet& evidence) {
  return Propagator::run(tree, evidence);
}

Factor marginal(const CliqueTree& calibrated, const std::vector<std::size_t>& vars) {
  if (!calibrated.calibrated()) throw Error("marginal requires a calibrated tree");
  std::vector<std::size_t> sorted = vars;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const std::size_t c = calibrated.find_clique(sorted);
  if (c == CliqueTree::npos) throw Error("not in any clique");
  Factor m = calibrated.cliques()[c].marginalize(sorted);
  m.normalize();
  return m;
}

std::vector<std::vector<double>> family_posteriors(const NetworkModel& model, const CliqueTree& tree,
                                                   const EvidenceSet& evidence) {
  if (tree.family_clique_.size() != model.size()) throw Error("tree was not built from this model");
  const Calibration cal = calibrate(tree, evidence);
  const CliqueTree& t = cal.tree;
  std::vector<std::vector<double>> out(model.size());
  for (std::size_t r = 0; r < model.size(); ++r) {
    const Factor& clique = t.cliques_[t.family_clique_[r]];
    std::vector<std::size_t> sorted = t.family_order_[r];
    std::sort(sorted.begin(), sorted.end());
    const Factor fam = clique.marginalize(sorted, t.family_map_[r]);
    out[r] = fam.values_in_order(t.family_order_[r]);
  }
  return out;
}

CliqueTree absorb(const CliqueTree& tree, std::size_t var, std::size_t value) {
  if (var >= tree.variable_count() || !tree.present(var)) throw Error("absorb: variable not in tree");
  if (value >= tree.cardinalities()[var]) throw Error("absorb: state out of range");
  EvidenceSet evidence = EvidenceSet::empty(tree.variable_count());
  evidence.values[var] = static_cast<int>(value);
  CliqueTree t = calibrate(tree, evidence).tree;

  for (auto& c : t.cliques_) {
    if (c.contains(var)) c = c.slice(var, value);
  }
  for (auto& s : t.separators_) {
    if (s.table.contains(var)) s.table = s.table.slice(var, value);
  }

  // Drop cliques left without variables, splicing their neighbours together
  // through empty separators. Their tables (and adjacent separators) hold
  // exactly 1 after slicing a normalised posterior.
  for (;;) {
    std::size_t dead = CliqueTree::npos;
    for (std::size_t c = 0; c < t.cliques_.size(); ++c) {
      if (t.cliques_[c].vars().empty()) {
        dead = c;
        break;
      }
    }
    if (dead == CliqueTree::npos) break;
    std::vector<std::size_t> neighbours;
    std::vector<CliqueTree::Separator> kept;
    for (auto& s : t.separators_) {
      if (s.a == dead) {
        neighbours.push_back(s.b);
      } else if (s.b == dead) {
        neighbours.push_back(s.a);
      } else {
        kept.push_back(std::move(s));
      }
    }
    for (std::size_t j = 1; j < neighbours.size(); ++j) {
      CliqueTree::Separator s;
      s.a = neighbours[0];
      s.b = neighbours[j];
      kept.push_back(std::move(s));
    }
    for (auto& s : kept) {
      if (s.a > dead) --s.a;
      if (s.b > dead) --s.b;
    }
    t.separators_ = std::move(kept);
    t.cliques_.erase(t.cliques_.begin() + static_cast<std::ptrdiff_t>(dead));
  }

  t.present_[var] = false;
  t.family_clique_.clear();
  t.family_map_.clear();
  t.family_order_.clear();
  t.rebuild_schedule();
  t.calibrated_ = true;
  return t;
}

double negative_entropy(const CliqueTree& calibrated) {
  if (!calibrated.calibrated()) throw Error("entropy requires a calibrated tree");
  double h = 0.0;
  for (const auto& c : calibrated.cliques()) h += c.xlogx_sum();
  for (const auto& s : calibrated.separators()) h -= s.table.xlogx_sum();
  return h;
}

TreeLogTables log_tables(const CliqueTree& calibrated) {
  TreeLogTables logs;
  auto logged = [](const Factor& f) {
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] > 0.0 ? std::log(f[i]) : 0.0;
    return out;
  };
  for (const auto& c : calibrated.cliques()) logs.cliques.push_back(logged(c));
  for (const auto& s : calibrated.separators()) logs.separators.push_back(logged(s.table));
  return logs;
}

double expected_log_density(const CliqueTree& calibrated, const TreeLogTables& logs, const EvidenceSet& evidence) {
  const Calibration post = calibrate(calibrated, evidence);
  double e = 0.0;
  for (std::size_t c = 0; c < post.tree.cliques().size(); ++c) {
    e += kernels::dot(post.tree.cliques()[c].values(), logs.cliques[c]);
  }
  for (std::size_t s = 0; s < post.tree.separators().size(); ++s) {
    e -= kernels::dot(post.tree.separators()[s].table.values(), logs.separators[s]);
  }
  return e;
}

}  // namespace bnmon
