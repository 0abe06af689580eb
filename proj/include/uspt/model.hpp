#pragma once

// Core data model: items, quantitative sequences, patterns, and the exact
// utility computations over them.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace uspt {

/// Money in smallest currency units. All utility arithmetic is exact.
using Money = std::int64_t;
using ItemId = std::uint32_t;
using Quantity = std::int64_t;
/// 1-based flat position of an item occurrence inside a q-sequence.
using Position = std::uint32_t;

inline constexpr Money kMoneyMax = std::numeric_limits<Money>::max();

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownItem : public Error {
 public:
  explicit UnknownItem(ItemId item)
      : Error("unknown item id " + std::to_string(item)), item_(item) {}
  ItemId item() const noexcept { return item_; }

 private:
  ItemId item_;
};

class InvalidConcatenation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidData : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Symbols

/// Bijection between item display names and dense ids 0..size()-1.
class SymbolTable {
 public:
  SymbolTable() = default;

  /// Builds a table whose ids follow the canonical item order: non-negative
  /// integers first (numerically), then identifiers (lexicographically).
  static SymbolTable from_names(std::vector<std::string> names) {
    std::sort(names.begin(), names.end(), canonical_less);
    names.erase(std::unique(names.begin(), names.end()), names.end());
    SymbolTable table;
    for (auto& name : names) table.add(std::move(name));
    return table;
  }

  ItemId add(std::string name) {
    if (auto it = ids_.find(name); it != ids_.end()) return it->second;
    const auto id = static_cast<ItemId>(names_.size());
    ids_.emplace(name, id);
    names_.push_back(std::move(name));
    return id;
  }

  std::optional<ItemId> find(std::string_view name) const {
    if (auto it = ids_.find(std::string(name)); it != ids_.end()) return it->second;
    return std::nullopt;
  }

  ItemId id(std::string_view name) const {
    if (auto found = find(name)) return *found;
    throw Error("unknown item name '" + std::string(name) + "'");
  }

  const std::string& name(ItemId id) const {
    if (id >= names_.size()) throw UnknownItem(id);
    return names_[id];
  }

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  static bool is_number(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(),
                                     [](char c) { return c >= '0' && c <= '9'; });
  }

  static bool canonical_less(const std::string& a, const std::string& b) {
    const bool na = is_number(a), nb = is_number(b);
    if (na != nb) return na;
    if (na) {
      // Compare numerically without overflow: strip leading zeros, then
      // shorter is smaller.
      auto strip = [](std::string_view s) {
        const auto nz = s.find_first_not_of('0');
        return nz == std::string_view::npos ? std::string_view("0") : s.substr(nz);
      };
      const auto sa = strip(a), sb = strip(b);
      if (sa.size() != sb.size()) return sa.size() < sb.size();
      if (sa != sb) return sa < sb;
      return a < b;
    }
    return a < b;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, ItemId> ids_;
};

// ---------------------------------------------------------------------------
// Tables

/// External (unit) utility per item id.
struct UtilityTable {
  std::vector<Money> unit_utility;

  Money at(ItemId item) const {
    if (item >= unit_utility.size()) throw UnknownItem(item);
    return unit_utility[item];
  }
  bool covers(ItemId item) const noexcept { return item < unit_utility.size(); }
};

/// Individualized minimum utility threshold per item id.
struct MTable {
  std::vector<Money> mu;

  Money at(ItemId item) const {
    if (item >= mu.size()) throw UnknownItem(item);
    return mu[item];
  }
  bool covers(ItemId item) const noexcept { return item < mu.size(); }
};

// ---------------------------------------------------------------------------
// Quantitative data

struct ItemQuantity {
  ItemId item;
  Quantity quantity;
  friend bool operator==(const ItemQuantity&, const ItemQuantity&) = default;
};

/// A q-itemset. Items strictly increasing, quantities >= 1.
class QItemset {
 public:
  QItemset() = delete;
  explicit QItemset(std::vector<ItemQuantity> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw InvalidData("empty q-itemset");
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      if (entries_[k].quantity < 1) throw InvalidData("q-itemset quantity must be >= 1");
      if (k > 0 && entries_[k - 1].item >= entries_[k].item)
        throw InvalidData(entries_[k - 1].item == entries_[k].item
                              ? "duplicate item in q-itemset"
                              : "q-itemset items must be strictly increasing");
    }
  }

  std::span<const ItemQuantity> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const ItemQuantity& operator[](std::size_t k) const { return entries_[k]; }

  std::optional<Quantity> quantity_of(ItemId item) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), item,
                               [](const ItemQuantity& e, ItemId i) { return e.item < i; });
    if (it != entries_.end() && it->item == item) return it->quantity;
    return std::nullopt;
  }

  friend bool operator==(const QItemset&, const QItemset&) = default;

 private:
  std::vector<ItemQuantity> entries_;
};

class QSequence {
 public:
  QSequence(std::size_t sid, std::vector<QItemset> elements)
      : sid_(sid), elements_(std::move(elements)) {
    if (elements_.empty()) throw InvalidData("empty q-sequence");
    starts_.reserve(elements_.size());
    Position next = 1;
    for (const auto& e : elements_) {
      starts_.push_back(next);
      next += static_cast<Position>(e.size());
    }
    length_ = next - 1;
  }

  std::size_t sid() const noexcept { return sid_; }
  std::span<const QItemset> elements() const noexcept { return elements_; }
  const QItemset& element(std::size_t index0) const { return elements_.at(index0); }
  std::size_t element_count() const noexcept { return elements_.size(); }
  /// Total number of item occurrences.
  Position length() const noexcept { return length_; }
  /// Flat position of the first item of element `index0` (0-based element index).
  Position element_start(std::size_t index0) const { return starts_.at(index0); }

  friend bool operator==(const QSequence& a, const QSequence& b) {
    return a.sid_ == b.sid_ && a.elements_ == b.elements_;
  }

 private:
  std::size_t sid_;
  std::vector<QItemset> elements_;
  std::vector<Position> starts_;
  Position length_ = 0;
};

struct QSDatabase {
  std::vector<QSequence> sequences;

  std::size_t size() const noexcept { return sequences.size(); }
  bool empty() const noexcept { return sequences.empty(); }

  /// One past the largest item id in use (0 for an empty database).
  ItemId item_bound() const {
    ItemId bound = 0;
    for (const auto& s : sequences)
      for (const auto& e : s.elements())
        for (const auto& iq : e.entries()) bound = std::max(bound, iq.item + 1);
    return bound;
  }

  friend bool operator==(const QSDatabase&, const QSDatabase&) = default;
};

// ---------------------------------------------------------------------------
// Patterns

/// A sequence of itemsets without quantities.
class Pattern {
 public:
  Pattern() = default;  // the empty pattern; only useful as a builder seed
  explicit Pattern(std::vector<std::vector<ItemId>> itemsets) : itemsets_(std::move(itemsets)) {
    if (itemsets_.empty()) throw InvalidData("empty pattern");
    for (const auto& w : itemsets_) {
      if (w.empty()) throw InvalidData("pattern contains an empty itemset");
      for (std::size_t k = 1; k < w.size(); ++k)
        if (w[k - 1] >= w[k]) throw InvalidData("pattern itemset items must be strictly increasing");
    }
  }

  static Pattern single(ItemId item) { return Pattern(std::vector<std::vector<ItemId>>{{item}}); }

  const std::vector<std::vector<ItemId>>& itemsets() const noexcept { return itemsets_; }
  /// Number of itemsets.
  std::size_t k() const noexcept { return itemsets_.size(); }
  /// Number of items.
  std::size_t size() const noexcept {
    std::size_t n = 0;
    for (const auto& w : itemsets_) n += w.size();
    return n;
  }
  bool empty() const noexcept { return itemsets_.empty(); }
  ItemId last_item() const { return itemsets_.back().back(); }

  // Mutating builders used by the search; they skip the ordering checks.
  void push_same_itemset(ItemId item) { itemsets_.back().push_back(item); }
  void push_new_itemset(ItemId item) { itemsets_.push_back({item}); }
  void pop_item() {
    itemsets_.back().pop_back();
    if (itemsets_.back().empty()) itemsets_.pop_back();
  }

  friend bool operator==(const Pattern&, const Pattern&) = default;

 private:
  std::vector<std::vector<ItemId>> itemsets_;
};

/// One embedding of a pattern into a q-sequence.
struct Match {
  std::vector<Position> positions;        // one per pattern item, strictly increasing
  std::vector<std::size_t> element_ids;   // 1-based eid per pattern itemset
  friend bool operator==(const Match&, const Match&) = default;
};

// ---------------------------------------------------------------------------
// Utility computations

inline Money item_utility(ItemId item, Quantity quantity, const UtilityTable& utable) {
  if (quantity < 0) throw InvalidData("negative quantity");
  return quantity * utable.at(item);
}

inline Money qitemset_utility(const QItemset& v, const UtilityTable& utable) {
  Money total = 0;
  for (const auto& iq : v.entries()) total += item_utility(iq.item, iq.quantity, utable);
  return total;
}

inline Money qsequence_utility(const QSequence& s, const UtilityTable& utable) {
  Money total = 0;
  for (const auto& v : s.elements()) total += qitemset_utility(v, utable);
  return total;
}

inline Money database_utility(const QSDatabase& db, const UtilityTable& utable) {
  Money total = 0;
  for (const auto& s : db.sequences) total += qsequence_utility(s, utable);
  return total;
}

/// Minimum threshold over every item of the pattern.
inline Money miu(const Pattern& t, const MTable& mtable) {
  if (t.empty()) throw InvalidData("MIU of empty pattern");
  Money least = kMoneyMax;
  for (const auto& w : t.itemsets())
    for (ItemId i : w) least = std::min(least, mtable.at(i));
  return least;
}

namespace detail {

inline void collect_matches(const Pattern& t, const QSequence& s, std::size_t itemset_index,
                            std::size_t first_element, Match& current,
                            std::vector<Match>& out) {
  if (itemset_index == t.k()) {
    out.push_back(current);
    return;
  }
  const auto& w = t.itemsets()[itemset_index];
  for (std::size_t e = first_element; e < s.element_count(); ++e) {
    const auto& element = s.element(e);
    const auto entries = element.entries();
    std::vector<Position> hit;
    hit.reserve(w.size());
    std::size_t cursor = 0;
    for (ItemId item : w) {
      while (cursor < entries.size() && entries[cursor].item < item) ++cursor;
      if (cursor == entries.size() || entries[cursor].item != item) break;
      hit.push_back(s.element_start(e) + static_cast<Position>(cursor));
    }
    if (hit.size() != w.size()) continue;
    current.positions.insert(current.positions.end(), hit.begin(), hit.end());
    current.element_ids.push_back(e + 1);
    collect_matches(t, s, itemset_index + 1, e + 1, current, out);
    current.positions.resize(current.positions.size() - hit.size());
    current.element_ids.pop_back();
  }
}

/// Quantity and item at a flat position.
inline const ItemQuantity& entry_at(const QSequence& s, Position p) {
  for (std::size_t e = 0; e < s.element_count(); ++e) {
    const auto start = s.element_start(e);
    if (p < start + s.element(e).size()) return s.element(e)[p - start];
  }
  throw std::out_of_range("position beyond sequence length");
}

}  // namespace detail

/// Every embedding of `t` in `s`, in lexicographic order of position vectors.
/// Exponential in the worst case; intended for oracle-scale inputs.
inline std::vector<Match> find_matches(const Pattern& t, const QSequence& s) {
  std::vector<Match> out;
  if (t.empty()) return out;
  Match current;
  detail::collect_matches(t, s, 0, 0, current, out);
  return out;
}

inline Money match_utility(const Match& m, const QSequence& s, const UtilityTable& utable) {
  Money total = 0;
  for (Position p : m.positions) {
    const auto& iq = detail::entry_at(s, p);
    total += item_utility(iq.item, iq.quantity, utable);
  }
  return total;
}

/// Containment test without enumerating embeddings (greedy earliest element).
inline bool contains(const QSequence& s, const Pattern& t) {
  std::size_t e = 0;
  for (const auto& w : t.itemsets()) {
    bool placed = false;
    for (; e < s.element_count() && !placed; ++e) {
      const auto& element = s.element(e);
      placed = std::all_of(w.begin(), w.end(),
                           [&](ItemId i) { return element.quantity_of(i).has_value(); });
    }
    if (!placed) return false;
  }
  return true;
}

/// Maximum match utility of `t` in `s`; nullopt when `t` is not contained.
inline std::optional<Money> pattern_utility_in_sequence(const Pattern& t, const QSequence& s,
                                                        const UtilityTable& utable) {
  std::optional<Money> best;
  for (const auto& m : find_matches(t, s)) {
    const Money u = match_utility(m, s, utable);
    if (!best || u > *best) best = u;
  }
  return best;
}

inline Money pattern_utility(const Pattern& t, const QSDatabase& db, const UtilityTable& utable) {
  Money total = 0;
  for (const auto& s : db.sequences)
    if (auto u = pattern_utility_in_sequence(t, s, utable)) total += *u;
  return total;
}

}  // namespace uspt
