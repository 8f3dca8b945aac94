#pragma once

// Exact inference on clique trees (Lauritzen-Spiegelhalter / Hugin style
// propagation over a triangulated moral graph).
//
// A tree represents the distribution prod(clique tables) / prod(separator
// tables). Trees are immutable values: calibrate() and absorb() return new
// trees, so a built tree can be shared freely between threads.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "bnmon/factor.hpp"
#include "bnmon/network.hpp"

namespace bnmon {

class CliqueTree {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  struct Separator {
    std::size_t a = 0;
    std::size_t b = 0;
    Factor table;
    std::vector<std::uint32_t> map_a;  // cells of clique a -> separator cell
    std::vector<std::uint32_t> map_b;
  };

  CliqueTree() = default;

  const std::vector<Factor>& cliques() const { return cliques_; }
  const std::vector<Separator>& separators() const { return separators_; }
  bool calibrated() const { return calibrated_; }

  // Cardinalities of every variable of the originating model, including
  // variables no longer present after absorption.
  const std::vector<std::size_t>& cardinalities() const { return cards_; }
  std::size_t variable_count() const { return cards_.size(); }
  bool present(std::size_t var) const { return present_[var]; }
  std::vector<std::size_t> present_variables() const;

  std::size_t root() const { return root_; }
  // Clique holding the family of variable r, or npos (absorbed trees).
  std::size_t family_clique(std::size_t r) const { return r < family_clique_.size() ? family_clique_[r] : npos; }
  // First clique covering all of `vars`, or npos.
  std::size_t find_clique(const std::vector<std::size_t>& vars) const;

  // Value of prod(cliques)/prod(separators) at a full assignment of the
  // present variables.
  double density(const Observation& x) const;

 private:
  friend CliqueTree build_clique_tree(const NetworkModel& model);
  friend struct Propagator;
  friend CliqueTree absorb(const CliqueTree& tree, std::size_t var, std::size_t value);
  friend std::vector<std::vector<double>> family_posteriors(const NetworkModel& model, const CliqueTree& tree,
                                                            const EvidenceSet& evidence);

  void rebuild_schedule();

  std::vector<std::size_t> cards_;
  std::vector<bool> present_;
  std::vector<Factor> cliques_;
  std::vector<Separator> separators_;
  std::vector<std::size_t> family_clique_;
  std::vector<std::vector<std::uint32_t>> family_map_;
  std::vector<std::vector<std::size_t>> family_order_;  // parents..., child
  // Preorder from the root and, per clique, the separator towards its parent.
  std::vector<std::size_t> order_;
  std::vector<std::size_t> parent_sep_;
  std::size_t root_ = npos;
  bool calibrated_ = false;
};

struct Calibration {
  CliqueTree tree;
  double evidence_probability = 1.0;
  double log_evidence_probability = 0.0;
};

// Moralize, triangulate by min-fill (ties to the lowest declaration index),
// join maximal cliques by a maximum-weight spanning tree and load the CPTs.
CliqueTree build_clique_tree(const NetworkModel& model);

// Two-pass propagation (collect to the root, then distribute) after entering
// evidence. Evidence on variables absent from the tree is ignored. Messages
// are renormalised as they travel; the returned log evidence probability
// accumulates the normalisers. Throws UnderflowError if mass vanishes.
Calibration calibrate(const CliqueTree& tree, const EvidenceSet& evidence);

// Exact (posterior) marginal over `vars`, which must share a clique.
Factor marginal(const CliqueTree& calibrated, const std::vector<std::size_t>& vars);

// Per variable r, P(Q_r, pa(Q_r) | evidence) laid out like r's CPT.
std::vector<std::vector<double>> family_posteriors(const NetworkModel& model, const CliqueTree& tree,
                                                   const EvidenceSet& evidence);

// Enter Q_var = value, calibrate, and keep only the matching slice of every
// table. The result is a calibrated tree without `var` representing the
// conditional distribution given the evidence.
CliqueTree absorb(const CliqueTree& tree, std::size_t var, std::size_t value);

// sum m ln m over cliques minus the same over separators. For a calibrated
// tree without evidence this is sum_x p(x) ln p(x).
double negative_entropy(const CliqueTree& calibrated);

// Natural logs of every clique and separator table of a calibrated tree.
struct TreeLogTables {
  std::vector<std::vector<double>> cliques;
  std::vector<std::vector<double>> separators;
};
TreeLogTables log_tables(const CliqueTree& calibrated);

// E[ln density(X) | evidence] where density is the tree's own distribution:
// the posterior-weighted sum of the log clique tables minus the log
// separator tables.
double expected_log_density(const CliqueTree& calibrated, const TreeLogTables& logs,
                            const EvidenceSet& evidence);

}  // namespace bnmon
