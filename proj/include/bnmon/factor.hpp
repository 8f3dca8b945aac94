#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bnmon {

// Dense non-negative table over a set of variables identified by their
// declaration index. Variables are kept in ascending order and cells use
// mixed radix with the first variable varying slowest, matching the joint
// cell convention of NetworkModel.
class Factor {
 public:
  // Table over no variables holding a single value.
  explicit Factor(double value = 1.0) : values_{value} {}
  Factor(std::vector<std::size_t> vars, std::vector<std::size_t> cards, double fill = 1.0);

  const std::vector<std::size_t>& vars() const { return vars_; }
  const std::vector<std::size_t>& cards() const { return cards_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool contains(std::size_t var) const;
  bool covers(std::span<const std::size_t> vars) const;

  // Position in `sub` of every cell of this table; sub's vars must be a
  // subset of ours.
  std::vector<std::uint32_t> index_map(const std::vector<std::size_t>& sub_vars,
                                       const std::vector<std::size_t>& sub_cards) const;

  Factor marginalize(const std::vector<std::size_t>& keep) const;
  Factor marginalize(const std::vector<std::size_t>& keep, std::span<const std::uint32_t> map) const;

  // this *= other, broadcasting other over the variables it lacks.
  void multiply(const Factor& other);
  void multiply(const Factor& other, std::span<const std::uint32_t> map);

  // Zero every cell where var != state.
  void restrict_to(std::size_t var, std::size_t state);

  // Table over vars minus `var`, holding the cells where var == state.
  Factor slice(std::size_t var, std::size_t state) const;

  double total() const;
  // Divides by the total and returns it.
  double normalize();
  // Sum of m ln m over cells, with 0 ln 0 = 0.
  double xlogx_sum() const;

  // Value at an assignment given per declared variable (missing entries of
  // variables outside this table are ignored).
  double at(std::span<const int> assignment) const;

  // Reorder cells so that `order` (a permutation of vars()) varies in the
  // given mixed-radix order. Returns the raw values in that layout.
  std::vector<double> values_in_order(const std::vector<std::size_t>& order) const;

 private:
  std::vector<std::size_t> vars_;
  std::vector<std::size_t> cards_;
  std::vector<double> values_;
};

}  // namespace bnmon
