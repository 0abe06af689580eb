#pragma once

// Lexicographic-sequential tree: the two concatenations and the node order.

#include <compare>
#include <utility>
#include <vector>

#include "uspt/model.hpp"

namespace uspt {

enum class Concat : std::uint8_t { I, S };

inline const char* to_string(Concat kind) { return kind == Concat::I ? "I" : "S"; }

/// Appends `item` to the last itemset. The item must be larger than every
/// item already there so each pattern has exactly one canonical spelling.
inline Pattern i_concatenate(const Pattern& t, ItemId item) {
  if (t.empty()) throw InvalidConcatenation("I-concatenation on empty pattern");
  if (item <= t.last_item())
    throw InvalidConcatenation("I-concatenation item must exceed the last itemset's items");
  Pattern out = t;
  out.push_same_itemset(item);
  return out;
}

inline Pattern s_concatenate(const Pattern& t, ItemId item) {
  if (t.empty()) throw InvalidConcatenation("S-concatenation on empty pattern");
  Pattern out = t;
  out.push_new_itemset(item);
  return out;
}

namespace detail {

struct Step {
  Concat kind;
  ItemId item;
};

/// The chain of concatenations that builds `t` from its first item.
inline std::vector<Step> construction_steps(const Pattern& t) {
  std::vector<Step> steps;
  steps.reserve(t.size());
  for (std::size_t k = 0; k < t.k(); ++k) {
    const auto& w = t.itemsets()[k];
    for (std::size_t j = 0; j < w.size(); ++j)
      steps.push_back({j == 0 ? Concat::S : Concat::I, w[j]});
  }
  return steps;
}

}  // namespace detail

/// Total order on patterns: fewer items first; otherwise compare the
/// construction chains step by step, an I-step before an S-step, then by the
/// appended item.
inline std::strong_ordering pattern_order(const Pattern& a, const Pattern& b) {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  const auto sa = detail::construction_steps(a);
  const auto sb = detail::construction_steps(b);
  for (std::size_t k = 0; k < sa.size(); ++k) {
    if (k > 0) {
      if (auto c = static_cast<int>(sa[k].kind) <=> static_cast<int>(sb[k].kind); c != 0) return c;
    }
    if (auto c = sa[k].item <=> sb[k].item; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

struct PatternLess {
  bool operator()(const Pattern& a, const Pattern& b) const { return pattern_order(a, b) < 0; }
};

}  // namespace uspt
