#pragma once

// Command-line front end: mine, oracle, gen, bench.
//
// Exit codes: 0 ok, 1 oracle check mismatch, 2 bad flags, 3 unreadable or
// malformed input, 4 inconsistent tables, 5 enumeration too large.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uspt/uspt.hpp"

namespace uspt::cli {

enum ExitCode : int {
  kOk = 0,
  kMismatch = 1,
  kBadFlags = 2,
  kBadInput = 3,
  kBadConfig = 4,
  kTooLarge = 5,
};

class UsageError : public Error {
 public:
  using Error::Error;
};

struct DataFlags {
  std::string data;
  std::string utility_table;
  std::string mtable;
  std::optional<double> beta;
  std::optional<double> lmu;

  void add_to(CLI::App& app, bool require_threshold = true) {
    app.add_option("--data", data, "Dataset file")->required();
    app.add_option("--utility-table", utility_table, "Unit utility table")->required();
    auto* mt = app.add_option("--mtable", mtable, "M-table file (ITEM VALUE per line)");
    auto* b = app.add_option("--beta", beta, "Threshold factor on item total utility");
    auto* l = app.add_option("--lmu", lmu, "Least minimum utility as a fraction of u(QSD)");
    mt->excludes(b)->excludes(l);
    if (require_threshold) threshold_required_ = true;
  }

  /// Loads the data and resolves the M-table from whichever flags were given.
  std::pair<Dataset, MTable> load() const {
    Dataset ds = load_dataset(data, utility_table);
    if (!mtable.empty()) {
      std::ifstream in(mtable);
      if (!in) throw Error("cannot open " + mtable);
      return {std::move(ds), mtable_from_values(parse_value_table(in), ds.symbols)};
    }
    if (!beta || !lmu) {
      if (threshold_required_) throw UsageError("give --mtable, or both --beta and --lmu");
      return {std::move(ds), MTable{}};
    }
    MTable m = generate_mtable(ds.db, ds.utable, *beta, *lmu);
    return {std::move(ds), std::move(m)};
  }

 private:
  bool threshold_required_ = false;
};

inline const std::map<std::string, Variant> kVariants{
    {"uspt1", Variant::USPT1}, {"uspt2", Variant::USPT2}, {"uspt", Variant::USPT}};
inline const std::map<std::string, NodeBound> kBounds{{"peu", NodeBound::PEU}, {"seu", NodeBound::SEU}};
inline const std::map<std::string, ResultFormat> kFormats{{"tsv", ResultFormat::TSV},
                                                          {"json", ResultFormat::JSON}};

/// Writes to --out when given, else to `fallback`.
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error("cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

inline void print_stats(std::ostream& err, const MiningStats& s) {
  err << "candidates: " << s.candidates_visited << '\n'
      << "husps: " << s.husps_found << '\n'
      << "time_ms: " << std::chrono::duration<double, std::milli>(s.wall_time).count() << '\n'
      << "peak_memory_estimate_bytes: " << s.peak_memory_estimate << '\n'
      << "peak_rss_bytes: " << peak_rss_bytes() << '\n';
}

inline std::vector<double> parse_sweep(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError("malformed sweep value '" + part + "'");
    }
  }
  if (values.empty()) throw UsageError("empty sweep");
  return values;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"High-utility sequential pattern mining with individualized thresholds", "uspt"};
  app.require_subcommand(1);

  // mine
  auto* mine_cmd = app.add_subcommand("mine", "Mine all patterns with u(t) >= MIU(t)");
  DataFlags mine_data;
  mine_data.add_to(*mine_cmd);
  std::string variant_name = "uspt", bound_name = "peu", format_name = "tsv", out_path;
  bool show_stats = false;
  unsigned threads = 1;
  std::optional<std::size_t> max_len;
  mine_cmd->add_option("--variant", variant_name, "uspt1 | uspt2 | uspt")
      ->check(CLI::IsMember({"uspt1", "uspt2", "uspt"}));
  mine_cmd->add_option("--node-bound", bound_name, "peu | seu")->check(CLI::IsMember({"peu", "seu"}));
  mine_cmd->add_option("--out", out_path, "Result file (default stdout)");
  mine_cmd->add_option("--format", format_name, "tsv | json")->check(CLI::IsMember({"tsv", "json"}));
  mine_cmd->add_flag("--stats", show_stats, "Print search statistics to stderr");
  mine_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  mine_cmd->add_option("--max-len", max_len, "Cap on pattern size")->check(CLI::PositiveNumber);

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force reference miner");
  DataFlags oracle_data;
  oracle_data.add_to(*oracle_cmd);
  std::size_t oracle_max_len = 0;
  std::string check_path, oracle_out, oracle_format = "tsv";
  oracle_cmd->add_option("--max-len", oracle_max_len, "Largest pattern size enumerated")
      ->required()
      ->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--check", check_path, "Compare against a TSV result file");
  oracle_cmd->add_option("--out", oracle_out, "Result file (default stdout)");
  oracle_cmd->add_option("--format", oracle_format, "tsv | json")->check(CLI::IsMember({"tsv", "json"}));

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset and utility table");
  GenParams gen;
  std::string gen_data, gen_utility;
  gen_cmd->add_option("--sequences", gen.n_sequences, "Number of sequences");
  gen_cmd->add_option("--items", gen.n_items, "Number of distinct items");
  gen_cmd->add_option("--max-elements", gen.max_elements, "Maximum elements per sequence");
  gen_cmd->add_option("--max-itemset", gen.max_itemset, "Maximum items per element");
  gen_cmd->add_option("--min-qty", gen.min_quantity, "Smallest quantity");
  gen_cmd->add_option("--max-qty", gen.max_quantity, "Largest quantity");
  gen_cmd->add_option("--log-mean", gen.log_mean, "Mean of log unit utility");
  gen_cmd->add_option("--log-sigma", gen.log_sigma, "Sigma of log unit utility");
  gen_cmd->add_option("--seed", gen.seed, "RNG seed")->required();
  gen_cmd->add_option("--out-data", gen_data, "Dataset output file")->required();
  gen_cmd->add_option("--out-utility", gen_utility, "Utility table output file")->required();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Sweep thresholds across variants");
  DataFlags bench_data;
  bench_data.add_to(*bench_cmd, false);
  std::string lmu_sweep, beta_sweep, bench_variants = "uspt1,uspt2,uspt", bench_bound = "peu";
  std::string bench_out;
  unsigned bench_threads = 1;
  auto* ls = bench_cmd->add_option("--lmu-sweep", lmu_sweep, "Comma-separated LMU fractions");
  auto* bs = bench_cmd->add_option("--beta-sweep", beta_sweep, "Comma-separated beta values");
  ls->excludes(bs);
  bench_cmd->add_option("--variants", bench_variants, "Comma-separated variants");
  bench_cmd->add_option("--node-bound", bench_bound, "peu | seu")->check(CLI::IsMember({"peu", "seu"}));
  bench_cmd->add_option("--threads", bench_threads, "Worker threads")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", bench_out, "Result file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadFlags;
  }

  try {
    if (*mine_cmd) {
      auto [ds, mtable] = mine_data.load();
      MiningConfig config;
      config.variant = kVariants.at(variant_name);
      config.node_bound = kBounds.at(bound_name);
      config.threads = threads;
      config.max_pattern_length = max_len;
      const MiningResult result = mine(ds.db, ds.utable, mtable, config);
      OutputTarget target(out_path, out);
      write_results(target.stream(), result.husps, ds.symbols, kFormats.at(format_name), &result.stats);
      if (show_stats) print_stats(err, result.stats);
      return kOk;
    }

    if (*oracle_cmd) {
      auto [ds, mtable] = oracle_data.load();
      const auto husps = brute_force_mine(ds.db, ds.utable, mtable, oracle_max_len);
      if (check_path.empty()) {
        OutputTarget target(oracle_out, out);
        write_results(target.stream(), husps, ds.symbols, kFormats.at(oracle_format));
        return kOk;
      }
      if (!oracle_out.empty()) {
        OutputTarget target(oracle_out, out);
        write_results(target.stream(), husps, ds.symbols, kFormats.at(oracle_format));
      }
      std::ifstream in(check_path);
      if (!in) throw Error("cannot open " + check_path);
      const auto claimed = parse_results(in, ds.symbols);
      std::map<std::string, const Husp*> expected, got;
      for (const auto& h : husps) expected[format_pattern(h.pattern, ds.symbols)] = &h;
      for (const auto& h : claimed) got[format_pattern(h.pattern, ds.symbols)] = &h;
      std::size_t differences = 0;
      for (const auto& [name, h] : expected) {
        auto it = got.find(name);
        if (it == got.end()) {
          out << "missing\t" << name << '\t' << h->utility << '\t' << h->miu << '\n';
          ++differences;
        } else if (!(*it->second == *h)) {
          out << "differs\t" << name << "\texpected " << h->utility << '\t' << h->miu << "\tgot "
              << it->second->utility << '\t' << it->second->miu << '\n';
          ++differences;
        }
      }
      for (const auto& [name, h] : got)
        if (!expected.contains(name)) {
          out << "unexpected\t" << name << '\t' << h->utility << '\t' << h->miu << '\n';
          ++differences;
        }
      if (differences > 0) {
        err << differences << " difference(s) against oracle\n";
        return kMismatch;
      }
      out << "match: " << husps.size() << " patterns\n";
      return kOk;
    }

    if (*gen_cmd) {
      try {
        gen.validate();
      } catch (const ConfigError& e) {
        throw UsageError(e.what());
      }
      const SyntheticData synthetic = generate_synthetic(gen);
      std::ofstream data(gen_data), table(gen_utility);
      if (!data || !table) throw Error("cannot write generator output");
      data << synthetic.dataset;
      table << synthetic.utility_table;
      return kOk;
    }

    if (*bench_cmd) {
      auto [ds, fixed] = bench_data.load();
      std::vector<Variant> variants;
      std::stringstream vs(bench_variants);
      for (std::string v; std::getline(vs, v, ',');) {
        auto it = kVariants.find(v);
        if (it == kVariants.end()) throw UsageError("unknown variant '" + v + "'");
        variants.push_back(it->second);
      }
      struct Point {
        std::string beta, lmu;
        MTable mtable;
      };
      std::vector<Point> points;
      if (!lmu_sweep.empty() || !beta_sweep.empty()) {
        if (!bench_data.mtable.empty()) throw UsageError("--mtable cannot be combined with a sweep");
        const bool over_lmu = !lmu_sweep.empty();
        for (double x : parse_sweep(over_lmu ? lmu_sweep : beta_sweep)) {
          const double beta = over_lmu ? bench_data.beta.value_or(0.0) : x;
          const double lmu = over_lmu ? x : bench_data.lmu.value_or(0.0);
          std::ostringstream b, l;
          b << beta;
          l << lmu;
          points.push_back({b.str(), l.str(), generate_mtable(ds.db, ds.utable, beta, lmu)});
        }
      } else if (!fixed.mu.empty()) {
        std::ostringstream b, l;
        if (bench_data.beta) b << *bench_data.beta; else b << '-';
        if (bench_data.lmu) l << *bench_data.lmu; else l << '-';
        points.push_back({b.str(), l.str(), fixed});
      } else {
        throw UsageError("give --lmu-sweep, --beta-sweep, --mtable, or --beta with --lmu");
      }

      OutputTarget target(bench_out, out);
      auto& o = target.stream();
      o << "variant\tbeta\tlmu\truntime_ms\tcandidates\thusps\tpeak_memory_bytes\n";
      for (Variant v : variants)
        for (const auto& p : points) {
          MiningConfig config;
          config.variant = v;
          config.node_bound = kBounds.at(bench_bound);
          config.threads = bench_threads;
          const auto result = mine(ds.db, ds.utable, p.mtable, config);
          o << to_string(v) << '\t' << p.beta << '\t' << p.lmu << '\t'
            << std::chrono::duration<double, std::milli>(result.stats.wall_time).count() << '\t'
            << result.stats.candidates_visited << '\t' << result.stats.husps_found << '\t'
            << result.stats.peak_memory_estimate << '\n';
        }
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kBadFlags;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kBadInput;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const EnumerationTooLarge& e) {
    err << "error: " << e.what() << '\n';
    return kTooLarge;
  } catch (const InvalidData& e) {
    err << "invalid data: " << e.what() << '\n';
    return kBadInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }
  return kBadFlags;
}

}  // namespace uspt::cli
