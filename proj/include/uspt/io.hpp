#pragma once

// File formats, threshold generation and synthetic data.
//
// Dataset lines:   a[3] b[2] -1 a[2] b[3] c[1] -1 d[3] -2 [SUtility:N]
// Value tables:    ITEM VALUE per line, '#' starts a comment.
// Result TSV:      pattern<TAB>utility<TAB>miu, patterns spelled [b],[c e].

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "uspt/miner.hpp"
#include "uspt/model.hpp"

namespace uspt {

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class SUtilityMismatch : public ParseError {
 public:
  SUtilityMismatch(std::size_t line, std::size_t column, Money declared, Money computed)
      : ParseError(line, column,
                   "SUtility:" + std::to_string(declared) + " does not match computed utility " +
                       std::to_string(computed)),
        declared_(declared),
        computed_(computed) {}
  Money declared() const noexcept { return declared_; }
  Money computed() const noexcept { return computed_; }

 private:
  Money declared_;
  Money computed_;
};

using ValueTable = std::map<std::string, Money>;

/// A parsed dataset with its interned symbols and per-id unit utilities.
struct Dataset {
  SymbolTable symbols;
  QSDatabase db;
  UtilityTable utable;
};

namespace detail {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

inline std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && (line[k] == ' ' || line[k] == '\t')) ++k;
    const std::size_t begin = k;
    while (k < line.size() && line[k] != ' ' && line[k] != '\t') ++k;
    if (k > begin) out.push_back({line.substr(begin, k - begin), begin + 1});
  }
  return out;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
  if (!head(s.front())) return false;
  return std::all_of(s.begin() + 1, s.end(), tail);
}

inline bool is_item_name(std::string_view s) {
  return SymbolTable::is_number(s) || is_identifier(s);
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  if (s.empty() || !SymbolTable::is_number(s)) return std::nullopt;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

struct RawSequence {
  std::size_t line;
  std::vector<std::vector<std::pair<std::string, Quantity>>> elements;
  std::vector<std::vector<std::size_t>> columns;
  std::optional<Money> sutility;
  std::size_t sutility_column = 0;
};

inline RawSequence parse_sequence_line(std::string_view line, std::size_t line_no) {
  RawSequence raw{line_no, {}, {}, std::nullopt, 0};
  std::vector<std::pair<std::string, Quantity>> element;
  std::vector<std::size_t> columns;
  bool ended = false;
  const auto tokens = tokenize(line);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const auto& tok = tokens[t];
    if (ended) {
      constexpr std::string_view kTag = "SUtility:";
      if (raw.sutility || tok.text.substr(0, kTag.size()) != kTag)
        throw ParseError(line_no, tok.column, "unexpected token after -2");
      auto v = parse_int(tok.text.substr(kTag.size()));
      if (!v) throw ParseError(line_no, tok.column, "malformed SUtility value");
      raw.sutility = *v;
      raw.sutility_column = tok.column;
      continue;
    }
    if (tok.text == "-1" || tok.text == "-2") {
      if (!element.empty()) {
        raw.elements.push_back(std::move(element));
        raw.columns.push_back(std::move(columns));
        element.clear();
        columns.clear();
      } else if (tok.text == "-1") {
        // SPMF files close every element with -1, so "-1 -2" is accepted.
        const bool before_end = t + 1 < tokens.size() && tokens[t + 1].text == "-2";
        if (!before_end || raw.elements.empty())
          throw ParseError(line_no, tok.column, "empty element");
      }
      if (tok.text == "-2") {
        if (raw.elements.empty()) throw ParseError(line_no, tok.column, "empty sequence");
        ended = true;
      }
      continue;
    }
    const auto open = tok.text.find('[');
    if (open == std::string_view::npos || tok.text.back() != ']')
      throw ParseError(line_no, tok.column, "expected ITEM[QTY], -1 or -2");
    const auto name = tok.text.substr(0, open);
    if (!is_item_name(name)) throw ParseError(line_no, tok.column, "malformed item name");
    const auto qty = parse_int(tok.text.substr(open + 1, tok.text.size() - open - 2));
    if (!qty || *qty < 1) throw ParseError(line_no, tok.column + open + 1, "quantity must be a positive integer");
    for (const auto& [seen, q] : element)
      if (seen == name)
        throw ParseError(line_no, tok.column, "duplicate item '" + std::string(name) + "' in element");
    element.emplace_back(std::string(name), *qty);
    columns.push_back(tok.column);
  }
  if (!ended) throw ParseError(line_no, line.size() + 1, "missing -2 at end of sequence");
  return raw;
}

inline bool skippable(std::string_view line) {
  const auto k = line.find_first_not_of(" \t");
  return k == std::string_view::npos || line[k] == '#' || line[k] == '@' || line[k] == '%';
}

inline Money round_half_up(double x) { return static_cast<Money>(std::floor(x + 0.5)); }

}  // namespace detail

/// Parses `ITEM VALUE` lines.
inline ValueTable parse_value_table(std::istream& in) {
  ValueTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto tokens = detail::tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 2) throw ParseError(line_no, tokens.front().column, "expected ITEM VALUE");
    if (!detail::is_item_name(tokens[0].text))
      throw ParseError(line_no, tokens[0].column, "malformed item name");
    const auto value = detail::parse_int(tokens[1].text);
    if (!value) throw ParseError(line_no, tokens[1].column, "value must be a non-negative integer");
    if (!table.emplace(std::string(tokens[0].text), *value).second)
      throw ParseError(line_no, tokens[0].column, "duplicate item '" + std::string(tokens[0].text) + "'");
  }
  return table;
}

/// Parses a dataset and binds it to the unit utilities. SUtility annotations
/// are checked against the recomputed sequence utility.
inline Dataset parse_dataset(std::istream& in, const ValueTable& unit_utilities) {
  std::vector<detail::RawSequence> raws;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (detail::skippable(line)) continue;
    raws.push_back(detail::parse_sequence_line(line, line_no));
  }

  std::vector<std::string> names;
  for (const auto& raw : raws)
    for (const auto& element : raw.elements)
      for (const auto& [name, q] : element) names.push_back(name);

  Dataset out;
  out.symbols = SymbolTable::from_names(std::move(names));
  out.utable.unit_utility.resize(out.symbols.size());
  for (ItemId i = 0; i < out.symbols.size(); ++i) {
    auto it = unit_utilities.find(out.symbols.name(i));
    if (it == unit_utilities.end())
      throw ConfigError("utility table has no entry for item '" + out.symbols.name(i) + "'");
    out.utable.unit_utility[i] = it->second;
  }

  std::size_t sid = 0;
  for (const auto& raw : raws) {
    std::vector<QItemset> elements;
    for (const auto& element : raw.elements) {
      std::vector<ItemQuantity> entries;
      for (const auto& [name, q] : element) entries.push_back({out.symbols.id(name), q});
      std::sort(entries.begin(), entries.end(),
                [](const ItemQuantity& a, const ItemQuantity& b) { return a.item < b.item; });
      elements.emplace_back(std::move(entries));
    }
    QSequence s(++sid, std::move(elements));
    if (raw.sutility) {
      const Money computed = qsequence_utility(s, out.utable);
      if (computed != *raw.sutility)
        throw SUtilityMismatch(raw.line, raw.sutility_column, *raw.sutility, computed);
    }
    out.db.sequences.push_back(std::move(s));
  }
  return out;
}

inline Dataset load_dataset(const std::string& data_path, const std::string& utility_path) {
  std::ifstream ut(utility_path);
  if (!ut) throw Error("cannot open " + utility_path);
  const ValueTable utilities = parse_value_table(ut);
  std::ifstream data(data_path);
  if (!data) throw Error("cannot open " + data_path);
  return parse_dataset(data, utilities);
}

/// Canonical dataset text. SUtility is emitted when `utable` is given.
inline void write_dataset(std::ostream& out, const QSDatabase& db, const SymbolTable& symbols,
                          const UtilityTable* utable = nullptr) {
  for (const auto& s : db.sequences) {
    bool first_token = true;
    auto sep = [&] {
      if (!first_token) out << ' ';
      first_token = false;
    };
    for (std::size_t e = 0; e < s.element_count(); ++e) {
      if (e > 0) {
        sep();
        out << "-1";
      }
      for (const auto& iq : s.element(e).entries()) {
        sep();
        out << symbols.name(iq.item) << '[' << iq.quantity << ']';
      }
    }
    out << " -2";
    if (utable) out << " SUtility:" << qsequence_utility(s, *utable);
    out << '\n';
  }
}

inline void write_value_table(std::ostream& out, const std::vector<Money>& values,
                              const SymbolTable& symbols) {
  for (ItemId i = 0; i < values.size(); ++i) out << symbols.name(i) << ' ' << values[i] << '\n';
}

/// M-table for the interned items; every item must be listed.
inline MTable mtable_from_values(const ValueTable& values, const SymbolTable& symbols) {
  MTable m;
  m.mu.resize(symbols.size());
  for (ItemId i = 0; i < symbols.size(); ++i) {
    auto it = values.find(symbols.name(i));
    if (it == values.end()) throw ConfigError("M-table has no entry for item '" + symbols.name(i) + "'");
    m.mu[i] = it->second;
  }
  return m;
}

/// Total utility of each item over all of its occurrences.
inline std::vector<Money> item_total_utilities(const QSDatabase& db, const UtilityTable& utable) {
  std::vector<Money> totals(utable.unit_utility.size(), 0);
  for (const auto& s : db.sequences)
    for (const auto& e : s.elements())
      for (const auto& iq : e.entries()) {
        if (iq.item >= totals.size()) totals.resize(iq.item + 1, 0);
        totals[iq.item] += item_utility(iq.item, iq.quantity, utable);
      }
  return totals;
}

/// mu(i) = max(round(beta * u(i)), round(lmu_fraction * u(QSD))), with u(i)
/// the item's total utility in the database. Rounding is half-up.
inline MTable generate_mtable(const QSDatabase& db, const UtilityTable& utable, double beta,
                              double lmu_fraction) {
  if (!(beta >= 0)) throw ConfigError("beta must be >= 0");
  if (!(lmu_fraction >= 0 && lmu_fraction <= 1)) throw ConfigError("LMU fraction must lie in [0, 1]");
  const Money lmu = detail::round_half_up(lmu_fraction * static_cast<double>(database_utility(db, utable)));
  const auto totals = item_total_utilities(db, utable);
  MTable m;
  m.mu.resize(std::max(totals.size(), utable.unit_utility.size()), lmu);
  for (ItemId i = 0; i < totals.size(); ++i)
    m.mu[i] = std::max(detail::round_half_up(beta * static_cast<double>(totals[i])), lmu);
  return m;
}

// ---------------------------------------------------------------------------
// Synthetic data

struct GenParams {
  std::size_t n_sequences = 1000;
  std::size_t n_items = 100;
  std::size_t max_elements = 8;
  std::size_t max_itemset = 4;
  Quantity min_quantity = 1;
  Quantity max_quantity = 5;
  double log_mean = 3.0;   // of the underlying normal
  double log_sigma = 1.0;
  std::uint64_t seed = 42;

  void validate() const {
    if (n_items == 0 || max_elements == 0 || max_itemset == 0)
      throw ConfigError("item count, elements and itemset size must be positive");
    if (max_itemset > n_items) throw ConfigError("itemset size exceeds item count");
    if (min_quantity < 1 || max_quantity < min_quantity) throw ConfigError("bad quantity range");
    if (!(log_sigma >= 0)) throw ConfigError("log-normal sigma must be >= 0");
  }
};

struct SyntheticData {
  std::string dataset;        // dataset file text, with SUtility annotations
  std::string utility_table;  // value table text
};

/// Reproducible synthetic database: uniform quantities, log-normal unit
/// utilities clamped to [1, 1000]. Items are named 1..n_items.
inline SyntheticData generate_synthetic(const GenParams& params) {
  params.validate();
  std::mt19937_64 rng(params.seed);
  std::lognormal_distribution<double> price(params.log_mean, params.log_sigma);
  std::vector<Money> unit(params.n_items);
  for (auto& u : unit) u = std::clamp<Money>(detail::round_half_up(price(rng)), 1, 1000);

  std::uniform_int_distribution<std::size_t> n_elements(1, params.max_elements);
  std::uniform_int_distribution<std::size_t> n_in_element(1, params.max_itemset);
  std::uniform_int_distribution<ItemId> item(0, static_cast<ItemId>(params.n_items - 1));
  std::uniform_int_distribution<Quantity> quantity(params.min_quantity, params.max_quantity);

  std::ostringstream data;
  std::vector<ItemId> picked;
  for (std::size_t s = 0; s < params.n_sequences; ++s) {
    const std::size_t ne = n_elements(rng);
    Money total = 0;
    for (std::size_t e = 0; e < ne; ++e) {
      const std::size_t k = n_in_element(rng);
      picked.clear();
      while (picked.size() < k) {
        const ItemId i = item(rng);
        if (std::find(picked.begin(), picked.end(), i) == picked.end()) picked.push_back(i);
      }
      std::sort(picked.begin(), picked.end());
      if (e > 0) data << "-1 ";
      for (ItemId i : picked) {
        const Quantity q = quantity(rng);
        total += q * unit[i];
        data << (i + 1) << '[' << q << "] ";
      }
    }
    data << "-2 SUtility:" << total << '\n';
  }

  std::ostringstream table;
  for (std::size_t i = 0; i < params.n_items; ++i) table << (i + 1) << ' ' << unit[i] << '\n';
  return {data.str(), table.str()};
}

// ---------------------------------------------------------------------------
// Results

enum class ResultFormat : std::uint8_t { TSV, JSON };

inline std::string format_pattern(const Pattern& t, const SymbolTable& symbols) {
  std::string out;
  for (std::size_t k = 0; k < t.k(); ++k) {
    if (k > 0) out += ',';
    out += '[';
    const auto& w = t.itemsets()[k];
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (j > 0) out += ' ';
      out += symbols.name(w[j]);
    }
    out += ']';
  }
  return out;
}

inline Pattern parse_pattern(std::string_view text, const SymbolTable& symbols) {
  std::vector<std::vector<ItemId>> itemsets;
  std::size_t k = 0;
  while (k < text.size()) {
    if (text[k] != '[') throw Error("malformed pattern '" + std::string(text) + "'");
    const auto close = text.find(']', k);
    if (close == std::string_view::npos) throw Error("unterminated itemset in '" + std::string(text) + "'");
    std::vector<ItemId> w;
    for (const auto& tok : detail::tokenize(text.substr(k + 1, close - k - 1)))
      w.push_back(symbols.id(tok.text));
    itemsets.push_back(std::move(w));
    k = close + 1;
    if (k < text.size()) {
      if (text[k] != ',') throw Error("malformed pattern '" + std::string(text) + "'");
      ++k;
    }
  }
  return Pattern(std::move(itemsets));
}

inline nlohmann::json stats_to_json(const MiningStats& stats) {
  return {
      {"candidates_visited", stats.candidates_visited},
      {"husps_found", stats.husps_found},
      {"wall_time_ms", std::chrono::duration<double, std::milli>(stats.wall_time).count()},
      {"peak_memory_estimate_bytes", stats.peak_memory_estimate},
      {"candidates_per_depth", stats.candidates_per_depth},
      {"items_prefiltered", stats.items_prefiltered},
      {"items_removed", stats.items_removed},
  };
}

inline void write_results(std::ostream& out, const std::vector<Husp>& husps,
                          const SymbolTable& symbols, ResultFormat format,
                          const MiningStats* stats = nullptr) {
  if (format == ResultFormat::TSV) {
    out << "pattern\tutility\tmiu\n";
    for (const auto& h : husps)
      out << format_pattern(h.pattern, symbols) << '\t' << h.utility << '\t' << h.miu << '\n';
    return;
  }
  nlohmann::json doc;
  doc["husps"] = nlohmann::json::array();
  for (const auto& h : husps) {
    nlohmann::json itemsets = nlohmann::json::array();
    for (const auto& w : h.pattern.itemsets()) {
      nlohmann::json names = nlohmann::json::array();
      for (ItemId i : w) names.push_back(symbols.name(i));
      itemsets.push_back(std::move(names));
    }
    doc["husps"].push_back({{"pattern", format_pattern(h.pattern, symbols)},
                            {"itemsets", std::move(itemsets)},
                            {"utility", h.utility},
                            {"miu", h.miu}});
  }
  if (stats) doc["stats"] = stats_to_json(*stats);
  out << doc.dump(2) << '\n';
}

/// Reads back a TSV result file.
inline std::vector<Husp> parse_results(std::istream& in, const SymbolTable& symbols) {
  std::vector<Husp> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line_no == 1) {
      if (line != "pattern\tutility\tmiu") throw ParseError(1, 1, "missing result header");
      continue;
    }
    if (line.empty()) continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) throw ParseError(line_no, 1, "expected three tab-separated columns");
    const std::string_view view(line);
    const auto utility = detail::parse_int(view.substr(tab1 + 1, tab2 - tab1 - 1));
    const auto threshold = detail::parse_int(view.substr(tab2 + 1));
    if (!utility || !threshold) throw ParseError(line_no, tab1 + 2, "malformed number");
    try {
      out.push_back({parse_pattern(view.substr(0, tab1), symbols), *utility, *threshold});
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, 1, e.what());
    }
  }
  return out;
}

}  // namespace uspt
