#pragma once

// Shared test helpers: fixture loading, seeded random instances and a naive
// embedding enumerator that does not share code with the library.

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "uspt/uspt.hpp"

namespace uspt::testing {

inline std::string data_path(const std::string& name) { return std::string(USPT_DATA_DIR) + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Instance {
  SymbolTable symbols;
  QSDatabase db;
  UtilityTable utable;
  MTable mtable;
};

inline Instance running_example() {
  Instance x;
  Dataset ds = load_dataset(data_path("running_example.qsd"), data_path("running_example.ut"));
  std::ifstream in(data_path("running_example.mt"));
  x.mtable = mtable_from_values(parse_value_table(in), ds.symbols);
  x.symbols = std::move(ds.symbols);
  x.db = std::move(ds.db);
  x.utable = std::move(ds.utable);
  return x;
}

inline Pattern pat(const Instance& x, std::string_view text) { return parse_pattern(text, x.symbols); }

struct RandomShape {
  std::size_t max_sequences = 20;
  std::size_t n_items = 6;
  std::size_t max_length = 8;   // item occurrences per sequence
  std::size_t max_element = 3;  // items per element
  Quantity max_quantity = 5;
  Money max_unit = 10;
  // Thresholds drawn uniformly from [lo, hi] times u(QSD).
  double mu_lo = 0.02;
  double mu_hi = 0.4;
};

/// Seeded random database with a random M-table. Items are named "1".."n".
inline Instance random_instance(std::uint64_t seed, const RandomShape& shape = {}) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](auto lo, auto hi) {
    return std::uniform_int_distribution<decltype(hi)>(lo, hi)(rng);
  };
  Instance x;
  for (std::size_t i = 1; i <= shape.n_items; ++i) x.symbols.add(std::to_string(i));
  for (std::size_t i = 0; i < shape.n_items; ++i) x.utable.unit_utility.push_back(uniform(Money{1}, shape.max_unit));

  const std::size_t n_seq = uniform(std::size_t{1}, shape.max_sequences);
  for (std::size_t s = 0; s < n_seq; ++s) {
    const std::size_t length = uniform(std::size_t{1}, shape.max_length);
    std::vector<QItemset> elements;
    std::size_t used = 0;
    while (used < length) {
      const std::size_t k = std::min(uniform(std::size_t{1}, shape.max_element), length - used);
      std::vector<ItemId> items(shape.n_items);
      for (std::size_t i = 0; i < items.size(); ++i) items[i] = static_cast<ItemId>(i);
      std::shuffle(items.begin(), items.end(), rng);
      items.resize(std::min(k, items.size()));
      std::sort(items.begin(), items.end());
      std::vector<ItemQuantity> entries;
      for (ItemId i : items) entries.push_back({i, uniform(Quantity{1}, shape.max_quantity)});
      used += entries.size();
      elements.emplace_back(std::move(entries));
    }
    x.db.sequences.emplace_back(s + 1, std::move(elements));
  }

  const double total = static_cast<double>(database_utility(x.db, x.utable));
  std::uniform_real_distribution<double> frac(shape.mu_lo, shape.mu_hi);
  for (std::size_t i = 0; i < shape.n_items; ++i)
    x.mtable.mu.push_back(static_cast<Money>(std::llround(frac(rng) * total)));
  return x;
}

// ---------------------------------------------------------------------------
// Naive embeddings: choose increasing positions over the flattened sequence
// and check the itemset structure directly.

struct Flat {
  std::size_t eid;
  ItemId item;
  Money u;
};

inline std::vector<Flat> flatten(const QSequence& s, const UtilityTable& ut) {
  std::vector<Flat> out;
  for (std::size_t e = 0; e < s.element_count(); ++e)
    for (const auto& iq : s.element(e).entries()) out.push_back({e + 1, iq.item, iq.quantity * ut.unit_utility[iq.item]});
  return out;
}

struct NaiveMatch {
  std::vector<std::size_t> idx;  // 0-based flat indices
  Money utility;
};

inline std::vector<NaiveMatch> naive_matches(const Pattern& t, const QSequence& s, const UtilityTable& ut) {
  const auto flat = flatten(s, ut);
  std::vector<ItemId> items;
  std::vector<std::size_t> group;  // itemset index per pattern item
  for (std::size_t k = 0; k < t.k(); ++k)
    for (ItemId i : t.itemsets()[k]) {
      items.push_back(i);
      group.push_back(k);
    }
  std::vector<NaiveMatch> out;
  std::vector<std::size_t> chosen;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    if (chosen.size() == items.size()) {
      Money u = 0;
      for (std::size_t k = 0; k < chosen.size(); ++k) {
        if (flat[chosen[k]].item != items[k]) return;
        if (k > 0) {
          const bool same = group[k] == group[k - 1];
          const auto e0 = flat[chosen[k - 1]].eid, e1 = flat[chosen[k]].eid;
          if (same ? e0 != e1 : e0 >= e1) return;
        }
        u += flat[chosen[k]].u;
      }
      out.push_back({chosen, u});
      return;
    }
    for (std::size_t p = from; p < flat.size(); ++p) {
      if (flat[p].item != items[chosen.size()]) continue;
      chosen.push_back(p);
      self(self, p + 1);
      chosen.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

/// Bounds evaluated straight from the definitions on the raw database.
inline Bounds naive_bounds(const Pattern& t, const QSDatabase& db, const UtilityTable& ut, const MTable& mt) {
  Bounds b;
  b.miu = kMoneyMax;
  for (const auto& w : t.itemsets())
    for (ItemId i : w) b.miu = std::min(b.miu, mt.mu[i]);
  b.pmiu = b.miu;
  for (const auto& s : db.sequences) {
    const auto matches = naive_matches(t, s, ut);
    if (matches.empty()) continue;
    const auto flat = flatten(s, ut);
    auto after = [&](std::size_t idx) {
      Money r = 0;
      for (std::size_t q = idx + 1; q < flat.size(); ++q) r += flat[q].u;
      return r;
    };
    Money best = 0, best_ext = 0;
    std::size_t start = flat.size();
    for (const auto& m : matches) {
      best = std::max(best, m.utility);
      best_ext = std::max(best_ext, m.utility + after(m.idx.back()));
      start = std::min(start, m.idx.back());
    }
    b.utility += best;
    b.peu += best_ext;
    b.seu += best + after(start);
    for (const auto& f : flat) b.swu += f.u;
    for (std::size_t q = start + 1; q < flat.size(); ++q) b.pmiu = std::min(b.pmiu, mt.mu[flat[q].item]);
  }
  return b;
}

/// A random pattern contained in some sequence of `db`, built from a random
/// subset of one sequence's positions.
inline Pattern random_contained_pattern(const QSDatabase& db, std::mt19937_64& rng, std::size_t max_size) {
  const auto& s = db.sequences[std::uniform_int_distribution<std::size_t>(0, db.size() - 1)(rng)];
  std::vector<std::pair<std::size_t, ItemId>> occ;  // (eid, item)
  for (std::size_t e = 0; e < s.element_count(); ++e)
    for (const auto& iq : s.element(e).entries()) occ.emplace_back(e, iq.item);
  const std::size_t size = std::uniform_int_distribution<std::size_t>(1, std::min(max_size, occ.size()))(rng);
  std::vector<std::size_t> idx(occ.size());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(size);
  std::sort(idx.begin(), idx.end());
  std::vector<std::vector<ItemId>> itemsets;
  std::size_t last_eid = static_cast<std::size_t>(-1);
  for (std::size_t k : idx) {
    if (occ[k].first != last_eid) itemsets.emplace_back();
    itemsets.back().push_back(occ[k].second);
    last_eid = occ[k].first;
  }
  return Pattern(std::move(itemsets));
}

/// The pattern with its last item dropped, or nullopt for a 1-sequence.
inline std::optional<Pattern> parent_of(const Pattern& t) {
  if (t.size() <= 1) return std::nullopt;
  Pattern p = t;
  p.pop_item();
  return p;
}

inline std::vector<std::pair<std::string, Money>> as_rows(const std::vector<Husp>& h, const SymbolTable& sy) {
  std::vector<std::pair<std::string, Money>> rows;
  for (const auto& x : h) rows.emplace_back(format_pattern(x.pattern, sy), x.utility);
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace uspt::testing
