#include "bnmon/factor.hpp"

#include <algorithm>
#include <cmath>

#include "bnmon/error.hpp"
#include "bnmon/kernels.hpp"

namespace bnmon {
namespace {

// Stride of each of `vars` in a table laid out over (sub_vars, sub_cards);
// zero for variables absent from sub.
std::vector<std::size_t> strides_in(const std::vector<std::size_t>& vars,
                                    const std::vector<std::size_t>& sub_vars,
                                    const std::vector<std::size_t>& sub_cards) {
  std::vector<std::size_t> sub_stride(sub_vars.size());
  std::size_t stride = 1;
  for (std::size_t j = sub_vars.size(); j-- > 0;) {
    sub_stride[j] = stride;
    stride *= sub_cards[j];
  }
  std::vector<std::size_t> out(vars.size(), 0);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto it = std::lower_bound(sub_vars.begin(), sub_vars.end(), vars[i]);
    if (it != sub_vars.end() && *it == vars[i]) out[i] = sub_stride[static_cast<std::size_t>(it - sub_vars.begin())];
  }
  return out;
}

}  // namespace

Factor::Factor(std::vector<std::size_t> vars, std::vector<std::size_t> cards, double fill)
    : vars_(std::move(vars)), cards_(std::move(cards)) {
  if (vars_.size() != cards_.size()) throw Error("factor variables and cardinalities differ in length");
  if (!std::is_sorted(vars_.begin(), vars_.end()) ||
      std::adjacent_find(vars_.begin(), vars_.end()) != vars_.end()) {
    throw Error("factor variables must be strictly ascending");
  }
  std::size_t n = 1;
  for (std::size_t c : cards_) n *= c;
  values_.assign(n, fill);
}

bool Factor::contains(std::size_t var) const { return std::binary_search(vars_.begin(), vars_.end(), var); }

bool Factor::covers(std::span<const std::size_t> vars) const {
  return std::all_of(vars.begin(), vars.end(), [&](std::size_t v) { return contains(v); });
}

std::vector<std::uint32_t> Factor::index_map(const std::vector<std::size_t>& sub_vars,
                                             const std::vector<std::size_t>& sub_cards) const {
  const auto stride = strides_in(vars_, sub_vars, sub_cards);
  std::vector<std::uint32_t> map(values_.size());
  std::vector<std::size_t> digit(vars_.size(), 0);
  std::size_t sub = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    map[i] = static_cast<std::uint32_t>(sub);
    for (std::size_t d = vars_.size(); d-- > 0;) {
      if (++digit[d] < cards_[d]) {
        sub += stride[d];
        break;
      }
      sub -= stride[d] * (cards_[d] - 1);
      digit[d] = 0;
    }
  }
  return map;
}

Factor Factor::marginalize(const std::vector<std::size_t>& keep) const {
  std::vector<std::size_t> sub_vars(keep);
  std::sort(sub_vars.begin(), sub_vars.end());
  std::vector<std::size_t> sub_cards;
  for (std::size_t v : sub_vars) {
    const auto it = std::lower_bound(vars_.begin(), vars_.end(), v);
    if (it == vars_.end() || *it != v) throw Error("marginalize: variable not in table");
    sub_cards.push_back(cards_[static_cast<std::size_t>(it - vars_.begin())]);
  }
  const auto map = index_map(sub_vars, sub_cards);
  return marginalize(sub_vars, map);
}

Factor Factor::marginalize(const std::vector<std::size_t>& keep, std::span<const std::uint32_t> map) const {
  std::vector<std::size_t> sub_cards;
  for (std::size_t v : keep) {
    const auto it = std::lower_bound(vars_.begin(), vars_.end(), v);
    sub_cards.push_back(cards_[static_cast<std::size_t>(it - vars_.begin())]);
  }
  Factor out(keep, std::move(sub_cards), 0.0);
  for (std::size_t i = 0; i < values_.size(); ++i) out.values_[map[i]] += values_[i];
  return out;
}

void Factor::multiply(const Factor& other) {
  const auto map = index_map(other.vars_, other.cards_);
  multiply(other, map);
}

void Factor::multiply(const Factor& other, std::span<const std::uint32_t> map) {
  kernels::multiply_gather(values_, other.values_, map);
}

void Factor::restrict_to(std::size_t var, std::size_t state) {
  const auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
  if (it == vars_.end() || *it != var) return;
  const std::size_t d = static_cast<std::size_t>(it - vars_.begin());
  std::size_t inner = 1;
  for (std::size_t j = d + 1; j < vars_.size(); ++j) inner *= cards_[j];
  const std::size_t card = cards_[d];
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if ((i / inner) % card != state) values_[i] = 0.0;
  }
}

Factor Factor::slice(std::size_t var, std::size_t state) const {
  const auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
  if (it == vars_.end() || *it != var) throw Error("slice: variable not in table");
  const std::size_t d = static_cast<std::size_t>(it - vars_.begin());
  std::vector<std::size_t> vars = vars_;
  std::vector<std::size_t> cards = cards_;
  vars.erase(vars.begin() + static_cast<std::ptrdiff_t>(d));
  cards.erase(cards.begin() + static_cast<std::ptrdiff_t>(d));
  Factor out(std::move(vars), std::move(cards), 0.0);
  std::size_t inner = 1;
  for (std::size_t j = d + 1; j < vars_.size(); ++j) inner *= cards_[j];
  const std::size_t card = cards_[d];
  const std::size_t outer = values_.size() / (inner * card);
  for (std::size_t o = 0; o < outer; ++o) {
    const double* src = values_.data() + (o * card + state) * inner;
    std::copy(src, src + inner, out.values_.data() + o * inner);
  }
  return out;
}

double Factor::total() const { return kernels::sum(values_); }

double Factor::normalize() {
  const double z = total();
  if (z > 0.0) kernels::scale(values_, 1.0 / z);
  return z;
}

double Factor::xlogx_sum() const {
  double s = 0.0;
  for (double m : values_) {
    if (m > 0.0) s += m * std::log(m);
  }
  return s;
}

double Factor::at(std::span<const int> assignment) const {
  std::size_t idx = 0;
  for (std::size_t d = 0; d < vars_.size(); ++d) {
    const int v = assignment[vars_[d]];
    if (v < 0) throw Error("factor lookup with unassigned variable");
    idx = idx * cards_[d] + static_cast<std::size_t>(v);
  }
  return values_[idx];
}

std::vector<double> Factor::values_in_order(const std::vector<std::size_t>& order) const {
  std::vector<std::size_t> order_cards;
  for (std::size_t v : order) {
    const auto it = std::lower_bound(vars_.begin(), vars_.end(), v);
    if (it == vars_.end() || *it != v) throw Error("values_in_order: variable not in table");
    order_cards.push_back(cards_[static_cast<std::size_t>(it - vars_.begin())]);
  }
  if (order.size() != vars_.size()) throw Error("values_in_order: order is not a permutation");
  // For each of our cells, its position in the requested layout.
  std::vector<std::size_t> order_stride(order.size());
  std::size_t stride = 1;
  for (std::size_t j = order.size(); j-- > 0;) {
    order_stride[j] = stride;
    stride *= order_cards[j];
  }
  std::vector<std::size_t> stride_of_mine(vars_.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    const auto d = static_cast<std::size_t>(std::lower_bound(vars_.begin(), vars_.end(), order[j]) - vars_.begin());
    stride_of_mine[d] = order_stride[j];
  }
  std::vector<double> out(values_.size());
  std::vector<std::size_t> digit(vars_.size(), 0);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    out[pos] = values_[i];
    for (std::size_t d = vars_.size(); d-- > 0;) {
      if (++digit[d] < cards_[d]) {
        pos += stride_of_mine[d];
        break;
      }
      pos -= stride_of_mine[d] * (cards_[d] - 1);
      digit[d] = 0;
    }
  }
  return out;
}

}  // namespace bnmon
