#pragma once

// High-utility sequential pattern search with individualized thresholds.
//
// The search walks the LS-tree depth first from every promising 1-sequence.
// Each node carries a projection (see utility_array.hpp) from which its
// utility and upper bounds are read off without rescanning the database.
// Pruning is always a comparison of an upper bound on utility against PMIU,
// the least threshold any extension of the node could still be held to.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "uspt/lstree.hpp"
#include "uspt/model.hpp"
#include "uspt/utility_array.hpp"

namespace uspt {

/// USPT1: no SWU item removal, no candidate pruning.
/// USPT2: SWU item removal, no candidate pruning.
/// USPT:  both.
enum class Variant : std::uint8_t { USPT1, USPT2, USPT };
enum class NodeBound : std::uint8_t { PEU, SEU };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::USPT1: return "uspt1";
    case Variant::USPT2: return "uspt2";
    case Variant::USPT: return "uspt";
  }
  return "?";
}

inline const char* to_string(NodeBound b) { return b == NodeBound::PEU ? "peu" : "seu"; }

/// All quantities of one candidate pattern.
struct Bounds {
  Money swu = 0;
  Money seu = 0;
  Money peu = 0;
  Money pmiu = 0;
  Money miu = 0;
  Money utility = 0;
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// One extension item seen while scanning a prefix's projection.
struct CandidateItem {
  ItemId item;
  Concat kind;
  Money extension_peu;  // PEU of the would-be child
  Money item_peu;       // PEU of the 1-sequence <item>
  bool pruned;
};

/// Hooks into the traversal, for tracing and property checks. Setting an
/// observer forces a single-threaded search.
class SearchObserver {
 public:
  virtual ~SearchObserver() = default;
  virtual void on_candidates(const Pattern& /*prefix*/, const Bounds& /*prefix_bounds*/,
                             std::span<const CandidateItem> /*candidates*/) {}
  /// Called for every node whose projection was built. `parent` is null for
  /// 1-sequences.
  virtual void on_node(const Pattern& /*node*/, const Bounds& /*bounds*/,
                       const Bounds* /*parent*/, bool /*is_husp*/, bool /*expanded*/) {}
};

struct MiningConfig {
  Variant variant = Variant::USPT;
  NodeBound node_bound = NodeBound::PEU;
  std::optional<std::size_t> max_pattern_length;
  bool collect_stats = true;
  unsigned threads = 1;
  SearchObserver* observer = nullptr;
};

struct MiningStats {
  std::uint64_t candidates_visited = 0;
  std::uint64_t husps_found = 0;
  std::chrono::nanoseconds wall_time{0};
  std::size_t peak_memory_estimate = 0;            // bytes
  std::vector<std::uint64_t> candidates_per_depth;  // index = pattern size
  std::size_t items_prefiltered = 0;
  std::size_t items_removed = 0;
};

struct Husp {
  Pattern pattern;
  Money utility;
  Money miu;
  friend bool operator==(const Husp&, const Husp&) = default;
};

struct MiningResult {
  std::vector<Husp> husps;  // sorted by pattern_order
  MiningStats stats;
};

/// Per 1-sequence figures after the database filters ran.
struct ItemSummary {
  ItemId item;
  Bounds bounds;
};

/// Sum of utilities of the sequences containing `t`.
inline Money swu(const Pattern& t, const QSDatabase& db, const UtilityTable& utable) {
  Money total = 0;
  for (const auto& s : db.sequences)
    if (contains(s, t)) total += qsequence_utility(s, utable);
  return total;
}

/// Least mu over the items of `t` and every live item after a start point.
inline Money pmiu(const Pattern& t, const ProjectedDB& projection,
                  std::span<const UtilityArray> arrays, const MTable& mtable) {
  Money least = miu(t, mtable);
  for (const auto& e : projection.entries()) {
    const auto& ua = arrays[e.array_index];
    for (Position p = projection.pivots(e).front().pos + 1; p <= ua.length(); ++p)
      if (ua.live(p)) least = std::min(least, mtable.at(ua.at(p).item));
  }
  return least;
}

namespace detail {

inline void validate_tables(const QSDatabase& db, const UtilityTable& utable, const MTable& mtable) {
  for (const auto& s : db.sequences)
    for (const auto& e : s.elements())
      for (const auto& iq : e.entries()) {
        if (!utable.covers(iq.item))
          throw ConfigError("utility table has no entry for item " + std::to_string(iq.item));
        if (!mtable.covers(iq.item))
          throw ConfigError("M-table has no entry for item " + std::to_string(iq.item));
        if (utable.at(iq.item) < 0)
          throw ConfigError("negative unit utility for item " + std::to_string(iq.item));
        if (mtable.at(iq.item) < 0)
          throw ConfigError("negative threshold for item " + std::to_string(iq.item));
      }
}

/// Drops every item whose SWU is below the smallest threshold in use.
inline QSDatabase prefilter(const QSDatabase& db, const UtilityTable& utable, const MTable& mtable,
                            std::size_t& dropped) {
  const ItemId bound = db.item_bound();
  std::vector<Money> item_swu(bound, 0);
  std::vector<char> present(bound, 0);
  Money global_min = kMoneyMax;
  std::vector<ItemId> distinct;
  for (const auto& s : db.sequences) {
    const Money us = qsequence_utility(s, utable);
    distinct.clear();
    for (const auto& e : s.elements())
      for (const auto& iq : e.entries()) distinct.push_back(iq.item);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (ItemId i : distinct) {
      item_swu[i] += us;
      present[i] = 1;
      global_min = std::min(global_min, mtable.at(i));
    }
  }
  std::vector<char> keep(bound, 0);
  dropped = 0;
  for (ItemId i = 0; i < bound; ++i) {
    if (!present[i]) continue;
    keep[i] = item_swu[i] >= global_min;
    if (!keep[i]) ++dropped;
  }
  if (dropped == 0) return db;

  QSDatabase out;
  for (const auto& s : db.sequences) {
    std::vector<QItemset> elements;
    for (const auto& e : s.elements()) {
      std::vector<ItemQuantity> kept;
      for (const auto& iq : e.entries())
        if (keep[iq.item]) kept.push_back(iq);
      if (!kept.empty()) elements.emplace_back(std::move(kept));
    }
    if (!elements.empty()) out.sequences.emplace_back(s.sid(), std::move(elements));
  }
  return out;
}

/// Immutable state shared by every search task.
struct SearchContext {
  const MTable* mtable = nullptr;
  const MiningConfig* config = nullptr;
  std::vector<UtilityArray> arrays;
  // rest_min[offsets[a] + p] = least mu over live positions after p (p in 0..len)
  std::vector<Money> rest_min;
  std::vector<std::size_t> offsets;
  std::vector<ItemSummary> singles;  // live 1-sequences in item order
  std::vector<Money> item_peu;       // indexed by item id
  ItemId item_bound = 0;
  std::size_t items_prefiltered = 0;
  std::size_t items_removed = 0;

  Money rest_min_after(std::uint32_t array_index, Position p) const {
    return rest_min[offsets[array_index] + p];
  }

  std::size_t bytes() const {
    std::size_t total = rest_min.capacity() * sizeof(Money);
    for (const auto& ua : arrays) total += ua.length() * (sizeof(UARecord) + 1);
    return total;
  }

  Bounds bounds_of(const ProjectedDB& pdb, Money node_miu) const {
    Bounds b;
    b.miu = node_miu;
    b.pmiu = node_miu;
    for (const auto& e : pdb.entries()) {
      const auto pivots = pdb.pivots(e);
      const auto& ua = arrays[e.array_index];
      const Money u = utility_in_entry(pivots);
      b.utility += u;
      b.peu += peu_in_entry(pivots, ua);
      b.seu += u + ua.at(pivots.front().pos).ru;
      b.swu += ua.utility();
      b.pmiu = std::min(b.pmiu, rest_min_after(e.array_index, pivots.front().pos));
    }
    return b;
  }
};

inline SearchContext prepare(const QSDatabase& raw, const UtilityTable& utable,
                             const MTable& mtable, const MiningConfig& config) {
  validate_tables(raw, utable, mtable);
  SearchContext ctx;
  ctx.mtable = &mtable;
  ctx.config = &config;

  const QSDatabase db = prefilter(raw, utable, mtable, ctx.items_prefiltered);
  ctx.arrays = build_utility_arrays(db, utable);
  ctx.item_bound = raw.item_bound();

  if (config.variant != Variant::USPT1) {
    // An item can only appear in patterns whose items all co-occur with it in
    // some sequence, so the least mu over those co-occurring items is a floor
    // on the threshold of every pattern containing it.
    std::vector<Money> item_swu(ctx.item_bound, 0);
    std::vector<Money> floor(ctx.item_bound, kMoneyMax);
    for (const auto& ua : ctx.arrays) {
      Money least = kMoneyMax;
      for (const auto& [item, pos] : ua.first_occurrences()) least = std::min(least, mtable.at(item));
      for (const auto& [item, pos] : ua.first_occurrences()) {
        item_swu[item] += ua.utility();
        floor[item] = std::min(floor[item], least);
      }
    }
    std::vector<bool> removed(ctx.item_bound, false);
    for (ItemId i = 0; i < ctx.item_bound; ++i)
      if (floor[i] != kMoneyMax && item_swu[i] < floor[i]) {
        removed[i] = true;
        ++ctx.items_removed;
      }
    if (ctx.items_removed > 0)
      for (auto& ua : ctx.arrays) ua.remove_items(removed);
  }

  ctx.offsets.reserve(ctx.arrays.size());
  for (const auto& ua : ctx.arrays) {
    ctx.offsets.push_back(ctx.rest_min.size());
    const std::size_t base = ctx.rest_min.size();
    ctx.rest_min.resize(base + ua.length() + 1, kMoneyMax);
    for (Position p = ua.length(); p >= 1; --p) {
      Money here = ctx.rest_min[base + p];
      if (ua.live(p)) here = std::min(here, mtable.at(ua.at(p).item));
      ctx.rest_min[base + p - 1] = here;
    }
  }

  ctx.item_peu.assign(ctx.item_bound, 0);
  for (ItemId i = 0; i < ctx.item_bound; ++i) {
    const ProjectedDB pdb = project_single(ctx.arrays, i);
    if (pdb.empty()) continue;
    const Bounds b = ctx.bounds_of(pdb, mtable.at(i));
    ctx.item_peu[i] = b.peu;
    ctx.singles.push_back({i, b});
  }
  return ctx;
}

/// Depth-first search over one or more top-level subtrees. Owns its
/// projection stack, scratch buffers, output and stats.
class Searcher {
 public:
  explicit Searcher(const SearchContext& ctx)
      : ctx_(ctx),
        config_(*ctx.config),
        mtable_(*ctx.mtable),
        puk_(config_.variant == Variant::USPT),
        i_local_(ctx.item_bound, -1),
        s_local_(ctx.item_bound, -1),
        i_sum_(ctx.item_bound, -1),
        s_sum_(ctx.item_bound, -1) {}

  void run_single(const ItemSummary& single) {
    const ProjectedDB pdb = project_single(ctx_.arrays, single.item);
    track_alloc(pdb.bytes());
    current_ = Pattern::single(single.item);
    count_node(1);
    const Bounds& b = single.bounds;
    const bool is_husp = b.utility >= b.miu;
    if (is_husp) emit(b);
    // 1-sequences are expanded on SWU, as in the top-level loop.
    const bool expand = b.swu >= b.pmiu && can_grow();
    if (config_.observer) config_.observer->on_node(current_, b, nullptr, is_husp, expand);
    if (expand) span_search(pdb, b);
    track_free(pdb.bytes());
  }

  std::vector<Husp>& husps() { return husps_; }
  MiningStats& stats() { return stats_; }

 private:
  bool can_grow() const {
    return !config_.max_pattern_length || current_.size() < *config_.max_pattern_length;
  }

  void count_node(std::size_t depth) {
    ++stats_.candidates_visited;
    if (config_.collect_stats) {
      if (stats_.candidates_per_depth.size() <= depth) stats_.candidates_per_depth.resize(depth + 1, 0);
      ++stats_.candidates_per_depth[depth];
    }
  }

  void emit(const Bounds& b) {
    husps_.push_back({current_, b.utility, b.miu});
    ++stats_.husps_found;
  }

  void track_alloc(std::size_t bytes) {
    if (!config_.collect_stats) return;
    live_bytes_ += bytes;
    stats_.peak_memory_estimate = std::max(stats_.peak_memory_estimate, live_bytes_);
  }
  void track_free(std::size_t bytes) {
    if (config_.collect_stats) live_bytes_ -= bytes;
  }

  // Records, per item, the best would-be-child PEU within one sequence.
  static void note(std::vector<Money>& local, std::vector<ItemId>& touched, ItemId x, Money v) {
    if (local[x] < 0) touched.push_back(x);
    local[x] = std::max(local[x], v);
  }

  static void fold(std::vector<Money>& local, std::vector<ItemId>& touched,
                   std::vector<Money>& sum, std::vector<ItemId>& sum_touched) {
    for (ItemId x : touched) {
      if (sum[x] < 0) {
        sum[x] = 0;
        sum_touched.push_back(x);
      }
      sum[x] += local[x];
      local[x] = -1;
    }
    touched.clear();
  }

  std::vector<CandidateItem> collect(std::vector<Money>& sum, std::vector<ItemId>& touched,
                                     Concat kind, Money prefix_pmiu) {
    std::sort(touched.begin(), touched.end());
    std::vector<CandidateItem> out;
    out.reserve(touched.size());
    for (ItemId x : touched) {
      const bool pruned = puk_ && sum[x] < prefix_pmiu;
      out.push_back({x, kind, sum[x], ctx_.item_peu[x], pruned});
      sum[x] = -1;
    }
    touched.clear();
    return out;
  }

  void span_search(const ProjectedDB& pdb, const Bounds& prefix) {
    // One pass over the projection gathers both candidate sets and the PEU
    // each extension would have.
    std::vector<ItemId> i_touched, s_touched, i_sum_touched, s_sum_touched;
    for (const auto& entry : pdb.entries()) {
      const auto& ua = ctx_.arrays[entry.array_index];
      const auto pivots = pdb.pivots(entry);
      for (const auto& pv : pivots) {
        const Position end = ua.element_end(pv.pos);
        for (Position q = pv.pos + 1; q <= end; ++q) {
          if (!ua.live(q)) continue;
          const auto& r = ua.at(q);
          note(i_local_, i_touched, r.item, pv.acc + r.u + r.ru);
        }
      }
      const Position first = ua.at(pivots.front().pos).next_eid;
      if (first != kNoPosition) {
        std::size_t k = 0;
        Money best = -1;
        for (Position q = first; q <= ua.length(); ++q) {
          const auto& r = ua.at(q);
          while (k < pivots.size() && ua.at(pivots[k].pos).eid < r.eid) best = std::max(best, pivots[k++].acc);
          if (!ua.live(q)) continue;
          note(s_local_, s_touched, r.item, best + r.u + r.ru);
        }
      }
      fold(i_local_, i_touched, i_sum_, i_sum_touched);
      fold(s_local_, s_touched, s_sum_, s_sum_touched);
    }
    const auto i_items = collect(i_sum_, i_sum_touched, Concat::I, prefix.pmiu);
    const auto s_items = collect(s_sum_, s_sum_touched, Concat::S, prefix.pmiu);

    if (config_.observer) {
      std::vector<CandidateItem> all(i_items);
      all.insert(all.end(), s_items.begin(), s_items.end());
      config_.observer->on_candidates(current_, prefix, all);
    }

    for (const auto& c : i_items)
      if (!c.pruned) visit_child(pdb, prefix, c.item, Concat::I);
    for (const auto& c : s_items)
      if (!c.pruned) visit_child(pdb, prefix, c.item, Concat::S);
  }

  void visit_child(const ProjectedDB& parent, const Bounds& parent_bounds, ItemId item, Concat kind) {
    ProjectedDB child = project(parent, ctx_.arrays, item, kind);
    if (child.empty()) return;
    track_alloc(child.bytes());
    if (kind == Concat::I) current_.push_same_itemset(item);
    else current_.push_new_itemset(item);
    count_node(current_.size());

    const Bounds b = ctx_.bounds_of(child, std::min(parent_bounds.miu, mtable_.at(item)));
    const bool is_husp = b.utility >= b.miu;
    if (is_husp) emit(b);
    const Money bound = config_.node_bound == NodeBound::PEU ? b.peu : b.seu;
    const bool expand = bound >= b.pmiu && can_grow();
    if (config_.observer) config_.observer->on_node(current_, b, &parent_bounds, is_husp, expand);
    if (expand) span_search(child, b);

    current_.pop_item();
    track_free(child.bytes());
  }

  const SearchContext& ctx_;
  const MiningConfig& config_;
  const MTable& mtable_;
  const bool puk_;
  Pattern current_;
  std::vector<Husp> husps_;
  MiningStats stats_;
  std::size_t live_bytes_ = 0;
  std::vector<Money> i_local_, s_local_, i_sum_, s_sum_;
};

}  // namespace detail

/// 1-sequence figures (SWU, PMIU, u, MIU, SEU, PEU) for every live item.
inline std::vector<ItemSummary> one_sequence_table(const QSDatabase& db, const UtilityTable& utable,
                                                   const MTable& mtable,
                                                   const MiningConfig& config = {}) {
  return detail::prepare(db, utable, mtable, config).singles;
}

/// Discovers every pattern t with u(t) >= MIU(t).
inline MiningResult mine(const QSDatabase& db, const UtilityTable& utable, const MTable& mtable,
                         const MiningConfig& config = {}) {
  const auto started = std::chrono::steady_clock::now();
  const detail::SearchContext ctx = detail::prepare(db, utable, mtable, config);

  MiningResult result;
  const unsigned threads =
      config.observer ? 1u : std::max(1u, std::min<unsigned>(config.threads, ctx.singles.size()));
  if (threads <= 1) {
    detail::Searcher searcher(ctx);
    for (const auto& single : ctx.singles) searcher.run_single(single);
    result.husps = std::move(searcher.husps());
    result.stats = std::move(searcher.stats());
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex merge;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        detail::Searcher searcher(ctx);
        for (std::size_t k; (k = next.fetch_add(1)) < ctx.singles.size();)
          searcher.run_single(ctx.singles[k]);
        std::lock_guard lock(merge);
        auto& out = searcher.husps();
        result.husps.insert(result.husps.end(), std::make_move_iterator(out.begin()),
                            std::make_move_iterator(out.end()));
        const auto& s = searcher.stats();
        result.stats.candidates_visited += s.candidates_visited;
        result.stats.husps_found += s.husps_found;
        result.stats.peak_memory_estimate += s.peak_memory_estimate;
        if (result.stats.candidates_per_depth.size() < s.candidates_per_depth.size())
          result.stats.candidates_per_depth.resize(s.candidates_per_depth.size(), 0);
        for (std::size_t d = 0; d < s.candidates_per_depth.size(); ++d)
          result.stats.candidates_per_depth[d] += s.candidates_per_depth[d];
      });
    }
    for (auto& th : pool) th.join();
  }

  std::sort(result.husps.begin(), result.husps.end(),
            [](const Husp& a, const Husp& b) { return pattern_order(a.pattern, b.pattern) < 0; });
  result.stats.peak_memory_estimate += ctx.bytes();
  result.stats.items_prefiltered = ctx.items_prefiltered;
  result.stats.items_removed = ctx.items_removed;
  result.stats.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::steady_clock::now() - started);
  return result;
}

}  // namespace uspt
