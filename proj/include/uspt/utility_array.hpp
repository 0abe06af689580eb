#pragma once

// Utility-arrays and their pivot-based projections.
//
// A utility-array flattens one q-sequence into records indexed by 1-based
// position. A projection of pattern t keeps, for every sequence containing t,
// the concatenation points of t (pivots) together with the best utility of a
// match of t ending at each pivot. Parent arrays are never copied.

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "uspt/lstree.hpp"
#include "uspt/model.hpp"

namespace uspt {

/// Sentinel for an absent next_pos / next_eid.
inline constexpr Position kNoPosition = 0;

struct UARecord {
  std::uint32_t eid;   // 1-based element index
  ItemId item;
  Money u;             // utility of this occurrence (0 once removed)
  Money ru;            // utility strictly after this position
  Position next_pos;   // next occurrence of the same item, or kNoPosition
  Position next_eid;   // first position of element eid+1, or kNoPosition

  friend bool operator==(const UARecord&, const UARecord&) = default;
};

class UtilityArray {
 public:
  UtilityArray() = default;

  std::size_t sid() const noexcept { return sid_; }
  Position length() const noexcept { return static_cast<Position>(records_.size()); }
  const UARecord& at(Position p) const { return records_[p - 1]; }
  std::span<const UARecord> records() const noexcept { return records_; }

  /// Minimal position holding `item`, or kNoPosition.
  Position first_occurrence(ItemId item) const {
    auto it = std::lower_bound(first_.begin(), first_.end(), item,
                               [](const auto& e, ItemId i) { return e.first < i; });
    return it != first_.end() && it->first == item ? it->second : kNoPosition;
  }

  /// Distinct items with their first positions, ordered by item id.
  std::span<const std::pair<ItemId, Position>> first_occurrences() const noexcept { return first_; }

  /// Last position of the element holding `p`.
  Position element_end(Position p) const {
    const Position next = at(p).next_eid;
    return next == kNoPosition ? length() : next - 1;
  }

  bool live(Position p) const { return live_[p - 1]; }

  /// Sum of utilities of all live positions.
  Money utility() const noexcept { return records_.empty() ? 0 : records_.front().ru + records_.front().u; }

  /// Tombstones every occurrence of an item flagged in `removed` and rebuilds
  /// the remaining utilities. Positions and links are unchanged.
  void remove_items(const std::vector<bool>& removed) {
    bool touched = false;
    for (std::size_t k = 0; k < records_.size(); ++k) {
      const ItemId i = records_[k].item;
      if (live_[k] && i < removed.size() && removed[i]) {
        live_[k] = false;
        records_[k].u = 0;
        touched = true;
      }
    }
    if (touched) rebuild_remaining();
  }

  friend UtilityArray build_utility_array(const QSequence& s, const UtilityTable& utable);

 private:
  void rebuild_remaining() {
    Money suffix = 0;
    for (std::size_t k = records_.size(); k-- > 0;) {
      records_[k].ru = suffix;
      suffix += records_[k].u;
    }
  }

  std::size_t sid_ = 0;
  std::vector<UARecord> records_;
  std::vector<bool> live_;
  std::vector<std::pair<ItemId, Position>> first_;
};

inline UtilityArray build_utility_array(const QSequence& s, const UtilityTable& utable) {
  UtilityArray ua;
  ua.sid_ = s.sid();
  ua.records_.reserve(s.length());
  for (std::size_t e = 0; e < s.element_count(); ++e) {
    const Position next_eid =
        e + 1 < s.element_count() ? s.element_start(e + 1) : kNoPosition;
    for (const auto& iq : s.element(e).entries())
      ua.records_.push_back({static_cast<std::uint32_t>(e + 1), iq.item,
                             item_utility(iq.item, iq.quantity, utable), 0, kNoPosition,
                             next_eid});
  }
  ua.live_.assign(ua.records_.size(), true);
  ua.rebuild_remaining();

  // next_pos links and first occurrences, one backward sweep.
  std::vector<std::pair<ItemId, Position>> last_seen;  // item -> most recent (later) position
  for (Position p = ua.length(); p >= 1; --p) {
    auto& rec = ua.records_[p - 1];
    auto it = std::find_if(last_seen.begin(), last_seen.end(),
                           [&](const auto& e) { return e.first == rec.item; });
    if (it == last_seen.end()) {
      last_seen.emplace_back(rec.item, p);
    } else {
      rec.next_pos = it->second;
      it->second = p;
    }
  }
  std::sort(last_seen.begin(), last_seen.end());
  ua.first_ = std::move(last_seen);
  return ua;
}

inline std::vector<UtilityArray> build_utility_arrays(const QSDatabase& db,
                                                      const UtilityTable& utable) {
  std::vector<UtilityArray> arrays;
  arrays.reserve(db.size());
  for (const auto& s : db.sequences) arrays.push_back(build_utility_array(s, utable));
  return arrays;
}

// ---------------------------------------------------------------------------
// Projections

struct Pivot {
  Position pos;
  Money acc;  // best utility of a match ending at pos
  friend bool operator==(const Pivot&, const Pivot&) = default;
};

class ProjectedDB {
 public:
  struct Entry {
    std::uint32_t array_index;
    std::uint32_t begin;
    std::uint32_t end;
  };

  std::span<const Entry> entries() const noexcept { return entries_; }
  std::span<const Pivot> pivots(const Entry& e) const noexcept {
    return std::span<const Pivot>(pivots_).subspan(e.begin, e.end - e.begin);
  }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t sequence_count() const noexcept { return entries_.size(); }
  std::size_t pivot_count() const noexcept { return pivots_.size(); }
  std::size_t bytes() const noexcept {
    return entries_.capacity() * sizeof(Entry) + pivots_.capacity() * sizeof(Pivot);
  }

  /// Pivots of the sequence backed by array `array_index`, empty if absent.
  std::span<const Pivot> pivots_for(std::uint32_t array_index) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), array_index,
                               [](const Entry& e, std::uint32_t i) { return e.array_index < i; });
    if (it == entries_.end() || it->array_index != array_index) return {};
    return pivots(*it);
  }

  // Builder interface.
  void open(std::uint32_t array_index) {
    entries_.push_back({array_index, static_cast<std::uint32_t>(pivots_.size()),
                        static_cast<std::uint32_t>(pivots_.size())});
  }
  void add(Pivot p) {
    pivots_.push_back(p);
    entries_.back().end = static_cast<std::uint32_t>(pivots_.size());
  }
  void close() {
    if (entries_.back().begin == entries_.back().end) entries_.pop_back();
  }

 private:
  std::vector<Entry> entries_;
  std::vector<Pivot> pivots_;
};

/// Projection of the 1-sequence <item>.
inline ProjectedDB project_single(std::span<const UtilityArray> arrays, ItemId item) {
  ProjectedDB out;
  for (std::uint32_t a = 0; a < arrays.size(); ++a) {
    const auto& ua = arrays[a];
    Position p = ua.first_occurrence(item);
    if (p == kNoPosition || !ua.live(p)) continue;
    out.open(a);
    for (; p != kNoPosition; p = ua.at(p).next_pos) out.add({p, ua.at(p).u});
    out.close();
  }
  return out;
}

/// Projection of t (+) item from the projection of t.
inline ProjectedDB project(const ProjectedDB& parent, std::span<const UtilityArray> arrays,
                           ItemId item, Concat kind) {
  ProjectedDB out;
  for (const auto& entry : parent.entries()) {
    const auto& ua = arrays[entry.array_index];
    const auto pivots = parent.pivots(entry);
    Position q = ua.first_occurrence(item);
    if (q == kNoPosition || !ua.live(q)) continue;
    out.open(entry.array_index);
    std::size_t k = 0;
    if (kind == Concat::I) {
      // At most one pivot per element: the one holding the prefix's last item.
      for (; q != kNoPosition; q = ua.at(q).next_pos) {
        const auto eq = ua.at(q).eid;
        while (k < pivots.size() && ua.at(pivots[k].pos).eid < eq) ++k;
        if (k == pivots.size()) break;
        if (ua.at(pivots[k].pos).eid == eq && pivots[k].pos < q)
          out.add({q, pivots[k].acc + ua.at(q).u});
      }
    } else {
      Money best = -1;
      for (; q != kNoPosition; q = ua.at(q).next_pos) {
        const auto eq = ua.at(q).eid;
        while (k < pivots.size() && ua.at(pivots[k].pos).eid < eq) {
          best = std::max(best, pivots[k].acc);
          ++k;
        }
        if (best >= 0) out.add({q, best + ua.at(q).u});
      }
    }
    out.close();
  }
  return out;
}

/// Projection of an arbitrary pattern by successive concatenation.
inline ProjectedDB project_pattern(std::span<const UtilityArray> arrays, const Pattern& t) {
  if (t.empty()) throw InvalidData("projection of empty pattern");
  ProjectedDB pdb = project_single(arrays, t.itemsets()[0][0]);
  for (std::size_t k = 0; k < t.k(); ++k) {
    const auto& w = t.itemsets()[k];
    for (std::size_t j = (k == 0 ? 1 : 0); j < w.size(); ++j)
      pdb = project(pdb, arrays, w[j], j == 0 ? Concat::S : Concat::I);
  }
  return pdb;
}

// Per-sequence quantities over one projection entry.

inline Money utility_in_entry(std::span<const Pivot> pivots) {
  Money best = 0;
  for (const auto& p : pivots) best = std::max(best, p.acc);
  return best;
}

inline Money peu_in_entry(std::span<const Pivot> pivots, const UtilityArray& ua) {
  Money best = 0;
  for (const auto& p : pivots) best = std::max(best, p.acc + ua.at(p.pos).ru);
  return best;
}

inline Money seu_in_entry(std::span<const Pivot> pivots, const UtilityArray& ua) {
  return utility_in_entry(pivots) + ua.at(pivots.front().pos).ru;
}

inline Money pattern_utility_from_projection(const ProjectedDB& pdb) {
  Money total = 0;
  for (const auto& e : pdb.entries()) total += utility_in_entry(pdb.pivots(e));
  return total;
}

inline Money peu_from_projection(const ProjectedDB& pdb, std::span<const UtilityArray> arrays) {
  Money total = 0;
  for (const auto& e : pdb.entries()) total += peu_in_entry(pdb.pivots(e), arrays[e.array_index]);
  return total;
}

inline Money seu_from_projection(const ProjectedDB& pdb, std::span<const UtilityArray> arrays) {
  Money total = 0;
  for (const auto& e : pdb.entries()) total += seu_in_entry(pdb.pivots(e), arrays[e.array_index]);
  return total;
}

/// Sum of (live) sequence utilities over the sequences of the projection.
inline Money swu_from_projection(const ProjectedDB& pdb, std::span<const UtilityArray> arrays) {
  Money total = 0;
  for (const auto& e : pdb.entries()) total += arrays[e.array_index].utility();
  return total;
}

}  // namespace uspt
