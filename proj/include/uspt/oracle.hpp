#pragma once

// Brute-force reference: enumerate the LS-tree without any utility pruning
// and evaluate every pattern from its explicit embeddings.

#include <algorithm>
#include <cmath>
#include <vector>

#include "uspt/lstree.hpp"
#include "uspt/miner.hpp"
#include "uspt/model.hpp"

namespace uspt {

class EnumerationTooLarge : public Error {
 public:
  using Error::Error;
};

inline constexpr double kOracleNodeLimit = 1e7;

/// Upper bound on the number of distinct patterns of at most `max_len` items
/// contained in the database: a contained pattern is fixed by the set of
/// positions of one of its embeddings.
inline double estimate_pattern_count(const QSDatabase& db, std::size_t max_len) {
  double total = 0;
  for (const auto& s : db.sequences) {
    const std::size_t n = s.length();
    double binom = 1;
    for (std::size_t k = 1; k <= std::min(n, max_len); ++k) {
      binom = binom * static_cast<double>(n - k + 1) / static_cast<double>(k);
      total += binom;
    }
  }
  return total;
}

namespace detail {

/// Sum of utilities at positions strictly after `p`, by direct scan.
inline Money utility_after(const QSequence& s, Position p, const UtilityTable& utable) {
  Money total = 0;
  for (Position q = p + 1; q <= s.length(); ++q) {
    const auto& iq = entry_at(s, q);
    total += item_utility(iq.item, iq.quantity, utable);
  }
  return total;
}

class BruteForce {
 public:
  BruteForce(const QSDatabase& db, const UtilityTable& utable, const MTable& mtable,
             std::size_t max_len)
      : db_(db), utable_(utable), mtable_(mtable), max_len_(max_len) {
    for (ItemId i = 0; i < db.item_bound(); ++i) items_.push_back(i);
  }

  std::vector<Husp> run() {
    for (ItemId i : items_) visit(Pattern::single(i));
    std::sort(out_.begin(), out_.end(),
              [](const Husp& a, const Husp& b) { return pattern_order(a.pattern, b.pattern) < 0; });
    return std::move(out_);
  }

 private:
  void visit(const Pattern& t) {
    bool occurs = false;
    Money u = 0;
    for (const auto& s : db_.sequences)
      if (auto us = pattern_utility_in_sequence(t, s, utable_)) {
        occurs = true;
        u += *us;
      }
    if (!occurs) return;
    const Money threshold = miu(t, mtable_);
    if (u >= threshold) out_.push_back({t, u, threshold});
    if (t.size() >= max_len_) return;
    for (ItemId i : items_)
      if (i > t.last_item()) visit(i_concatenate(t, i));
    for (ItemId i : items_) visit(s_concatenate(t, i));
  }

  const QSDatabase& db_;
  const UtilityTable& utable_;
  const MTable& mtable_;
  std::size_t max_len_;
  std::vector<ItemId> items_;
  std::vector<Husp> out_;
};

}  // namespace detail

/// Every pattern of at most `max_len` items with u(t) >= MIU(t).
inline std::vector<Husp> brute_force_mine(const QSDatabase& db, const UtilityTable& utable,
                                          const MTable& mtable, std::size_t max_len) {
  detail::validate_tables(db, utable, mtable);
  if (estimate_pattern_count(db, max_len) > kOracleNodeLimit)
    throw EnumerationTooLarge("pattern enumeration would exceed 1e7 nodes");
  return detail::BruteForce(db, utable, mtable, max_len).run();
}

/// SWU, SEU, PEU and utility of `t` from explicit match lists. PMIU and MIU
/// are filled when an M-table is supplied.
inline Bounds brute_force_bounds(const Pattern& t, const QSDatabase& db, const UtilityTable& utable,
                                 const MTable* mtable = nullptr) {
  Bounds b;
  Money least = mtable ? miu(t, *mtable) : 0;
  for (const auto& s : db.sequences) {
    const auto matches = find_matches(t, s);
    if (matches.empty()) continue;
    Money best = 0, best_ext = 0;
    Position start = s.length();
    for (const auto& m : matches) {
      const Money mu = match_utility(m, s, utable);
      const Position end = m.positions.back();
      best = std::max(best, mu);
      best_ext = std::max(best_ext, mu + detail::utility_after(s, end, utable));
      start = std::min(start, end);
    }
    b.utility += best;
    b.peu += best_ext;
    b.seu += best + detail::utility_after(s, start, utable);
    b.swu += qsequence_utility(s, utable);
    if (mtable)
      for (Position q = start + 1; q <= s.length(); ++q)
        least = std::min(least, mtable->at(detail::entry_at(s, q).item));
  }
  if (mtable) {
    b.miu = miu(t, *mtable);
    b.pmiu = least;
  }
  return b;
}

}  // namespace uspt
