#include "errortree/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <thread>

#include "errortree/errors.hpp"
#include "errortree/input.hpp"
#include "errortree/oracle.hpp"
#include "errortree/persistence.hpp"
#include "errortree/query.hpp"
#include "errortree/workload.hpp"

namespace errortree {

namespace {

using json = nlohmann::json;
using clock_type = std::chrono::steady_clock;

struct RunConfig {
  std::string input;
  std::string index;
  std::string mode = "dictionary";
  std::string metric;
  std::optional<std::uint32_t> k;
  std::optional<std::uint32_t> m;
  std::string pattern;
  std::string patterns_file;
  std::string alphabet = "dna";
  /// Wildcard character for query patterns; empty means the index alphabet's.
  std::string wildcard;
  std::uint64_t seed = 1;
  std::size_t samples = 100;
  bool json = false;
  bool all_errors = false;
  bool oracle = true;
  unsigned threads = 1;
};

double ms_since(clock_type::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

IndexMode parse_mode(const std::string& s) { return s == "text" ? IndexMode::text : IndexMode::dictionary; }
const char* mode_name(IndexMode m) { return m == IndexMode::text ? "text" : "dictionary"; }

ErrorTree build_from_config(const RunConfig& cfg, double& build_ms) {
  const Alphabet alphabet = Alphabet::by_name(cfg.alphabet);
  BuildOptions opt;
  opt.mode = parse_mode(cfg.mode);
  opt.k = cfg.k.value_or(1);
  opt.indels = cfg.metric == "edit";
  if (opt.mode == IndexMode::text) {
    if (!cfg.m) throw ParameterError("text mode needs --m");
    opt.m = *cfg.m;
  } else if (cfg.m) {
    throw ParameterError("--m only applies to text mode");
  }
  const auto data = read_input(cfg.input, opt.mode, alphabet);
  const auto t0 = clock_type::now();
  ErrorTree et = build_index(alphabet, data, opt);
  build_ms = ms_since(t0);
  return et;
}

json stats_json(const ErrorTree& et) {
  const TableStats s = stats(et);
  json j;
  j["mode"] = mode_name(et.mode);
  j["alphabet"] = et.alphabet.name();
  j["k"] = et.k;
  j["m"] = et.m;
  j["indels"] = et.indels;
  j["sequences"] = s.sequences;
  j["total_length"] = s.total_length;
  j["kst_nodes"] = s.kst_nodes;
  j["trie_nodes"] = s.trie_nodes;
  j["trie_leaves"] = s.trie_leaves;
  for (std::size_t kind = 0; kind < kTableKinds; ++kind) j["entries"][kind_name(static_cast<TableKind>(kind))] = s.entries[kind];
  j["total_entries"] = s.total_entries;
  j["table_bytes"] = s.table_bytes;
  j["tree_bytes"] = s.tree_bytes;
  // entries / (N log N (log n)^(k-1) / k!), logs base sigma.
  const double sigma = static_cast<double>(et.alphabet.size());
  const double big_n = static_cast<double>(et.mode == IndexMode::text ? s.total_length : s.sequences);
  const double n = static_cast<double>(s.total_length);
  double denom = 0;
  if (et.k > 0 && big_n > 1 && n > 1) {
    denom = big_n * std::log(big_n) / std::log(sigma) * std::pow(std::log(n) / std::log(sigma), et.k - 1) /
            std::tgamma(et.k + 1.0);
  }
  j["growth_ratio"] = denom > 0 ? static_cast<double>(s.total_entries) / denom : 0.0;
  return j;
}

void print_kv(std::ostream& out, const json& j) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.value().is_object()) {
      for (auto in = it.value().begin(); in != it.value().end(); ++in) out << it.key() << '.' << in.key() << '=' << in.value().dump() << '\n';
    } else if (it.value().is_string()) {
      out << it.key() << '=' << it.value().get<std::string>() << '\n';
    } else {
      out << it.key() << '=' << it.value().dump() << '\n';
    }
  }
}

int cmd_build(const RunConfig& cfg, std::ostream& out) {
  double build_ms = 0;
  ErrorTree et = build_from_config(cfg, build_ms);
  const std::size_t bytes = save(et, cfg.index);
  const TableStats s = stats(et);
  json j;
  j["index"] = cfg.index;
  j["mode"] = mode_name(et.mode);
  j["k"] = et.k;
  j["indels"] = et.indels;
  j["sequences"] = s.sequences;
  j["kst_nodes"] = s.kst_nodes;
  j["trie_nodes"] = s.trie_nodes;
  j["total_entries"] = s.total_entries;
  j["bytes"] = bytes;
  j["build_ms"] = std::round(build_ms * 1000) / 1000;
  if (cfg.json) {
    out << j.dump() << '\n';
  } else {
    out << "built " << mode_name(et.mode) << " index " << cfg.index << ": sequences=" << s.sequences
        << " kst_nodes=" << s.kst_nodes << " trie_nodes=" << s.trie_nodes << " entries=" << s.total_entries
        << " bytes=" << bytes << " build_ms=" << j["build_ms"].dump() << '\n';
  }
  return 0;
}

Metric metric_for(const RunConfig& cfg, const ErrorTree& et) {
  if (!cfg.metric.empty()) return parse_metric(cfg.metric);
  return et.indels ? Metric::edit : Metric::hamming;
}

int cmd_query(const RunConfig& cfg, std::ostream& out) {
  const ErrorTree et = load(cfg.index);
  const Metric metric = metric_for(cfg, et);
  const std::uint32_t k = cfg.k.value_or(et.k);
  std::vector<std::string> patterns;
  if (!cfg.pattern.empty())
    patterns.push_back(cfg.pattern);
  else
    patterns = read_lines(cfg.patterns_file);
  QueryOptions opt;
  opt.all_errors = cfg.all_errors;
  const char wildcard = metric != Metric::wildcard ? '\0' : cfg.wildcard.empty() ? et.alphabet.wildcard() : cfg.wildcard[0];

  std::vector<std::vector<MatchResult>> results(patterns.size());
  std::vector<std::exception_ptr> failures(patterns.size());
  auto work = [&](std::size_t first, std::size_t step) {
    for (std::size_t i = first; i < patterns.size(); i += step) {
      try {
        results[i] = query(et, metric, et.alphabet.encode_pattern(patterns[i], wildcard), k, opt);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(patterns.size())));
  if (threads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  const bool many = patterns.size() > 1;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    if (many && !cfg.json) out << "# " << patterns[i] << '\n';
    for (const auto& r : results[i]) {
      if (cfg.json) {
        json j;
        if (many) j["pattern"] = patterns[i];
        j[et.mode == IndexMode::text ? "position" : "subject"] = r.subject;
        j["distance"] = r.distance;
        j["kind"] = metric_name(r.kind);
        out << j.dump() << '\n';
      } else {
        out << r.subject << '\t' << r.distance << '\t' << metric_name(r.kind) << '\n';
      }
    }
  }
  return 0;
}

std::string render(const Alphabet& alphabet, const std::vector<Symbol>& p) {
  std::string s;
  for (Symbol c : p) s += c == kWildcard ? alphabet.wildcard() : alphabet.symbol(c);
  return s;
}

std::string render_results(const std::vector<MatchResult>& rs) {
  std::string s = "{";
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(rs[i].subject) + ":" + std::to_string(rs[i].distance);
  }
  return s + "}";
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const ErrorTree et = load(cfg.index);
  const Metric metric = metric_for(cfg, et);
  const std::uint32_t k = cfg.k.value_or(et.k);
  if (k > et.k) throw CapabilityError("k exceeds the index budget");
  Rng rng(cfg.seed);
  const auto patterns = sample_patterns(rng, et, metric, k, cfg.samples);
  const auto data = index_data(et);
  QueryOptions opt;
  opt.all_errors = cfg.all_errors;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const auto got = query(et, metric, patterns[i], k, opt);
    const auto want = scan(et.mode, metric, data, patterns[i], k, opt);
    if (got != want) {
      if (cfg.json) {
        json j{{"status", "DIVERGENCE"}, {"sample", i},        {"pattern", render(et.alphabet, patterns[i])},
               {"metric", metric_name(metric)}, {"k", k}, {"index", render_results(got)}, {"oracle", render_results(want)}};
        out << j.dump() << '\n';
      } else {
        out << "DIVERGENCE sample=" << i << " pattern=" << render(et.alphabet, patterns[i])
            << " metric=" << metric_name(metric) << " k=" << k << " index=" << render_results(got)
            << " oracle=" << render_results(want) << '\n';
      }
      return static_cast<int>(ErrorClass::divergence);
    }
  }
  if (cfg.json)
    out << json{{"status", "PASS"}, {"samples", patterns.size()}, {"metric", metric_name(metric)}, {"k", k}, {"seed", cfg.seed}}.dump()
        << '\n';
  else
    out << "PASS samples=" << patterns.size() << " metric=" << metric_name(metric) << " k=" << k
        << " seed=" << cfg.seed << '\n';
  return 0;
}

int cmd_stats(const RunConfig& cfg, std::ostream& out) {
  const ErrorTree et = load(cfg.index);
  const json j = stats_json(et);
  if (cfg.json)
    out << j.dump() << '\n';
  else
    print_kv(out, j);
  return 0;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  ErrorTree et;
  std::string target;
  if (!cfg.input.empty()) {
    double build_ms = 0;
    et = build_from_config(cfg, build_ms);
    target = cfg.input;
    err << "build_ms=" << build_ms << '\n';
  } else {
    const auto t0 = clock_type::now();
    et = load(cfg.index);
    target = cfg.index;
    err << "load_ms=" << ms_since(t0) << '\n';
  }
  const Metric metric = metric_for(cfg, et);
  const std::uint32_t k = cfg.k.value_or(et.k);
  if (k > et.k) throw CapabilityError("k exceeds the index budget");
  Rng rng(cfg.seed);
  const auto patterns = sample_patterns(rng, et, metric, k, cfg.samples);
  out << bench_csv_header() << '\n';
  if (patterns.empty()) return 0;
  const BenchRow row = run_bench(et, metric, k, patterns, target, cfg.oracle);
  out << bench_csv_row(row) << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Error-tree index for approximate string matching", "errortree"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) { sub->add_flag("--json", cfg.json, "JSON-lines output"); };
  auto add_k = [&](CLI::App* sub) { sub->add_option("--k", cfg.k, "Error budget")->check(CLI::Range(0u, 16u)); };
  auto add_metric = [&](CLI::App* sub) {
    sub->add_option("--metric", cfg.metric, "hamming | edit | wildcard")
        ->check(CLI::IsMember({"hamming", "edit", "wildcard"}));
  };
  auto add_build = [&](CLI::App* sub, bool input_required) {
    auto* in = sub->add_option("--input", cfg.input, "Dictionary (one string per line) or text (raw or FASTA)");
    if (input_required) in->required();
    sub->add_option("--mode", cfg.mode, "dictionary | text")->check(CLI::IsMember({"dictionary", "text"}));
    sub->add_option("--m", cfg.m, "Pattern length (text mode)")->check(CLI::Range(1u, 1u << 20));
    sub->add_option("--alphabet", cfg.alphabet, "dna | ascii")->check(CLI::IsMember({"dna", "ascii"}));
    return in;
  };

  auto* build = app.add_subcommand("build", "Build an index file");
  add_build(build, true);
  build->add_option("--index", cfg.index, "Output index path")->required();
  add_metric(build);
  add_k(build);
  add_common(build);

  auto* query_cmd = app.add_subcommand("query", "Query an index");
  query_cmd->add_option("--index", cfg.index, "Index path")->required();
  auto* pat = query_cmd->add_option("--pattern", cfg.pattern, "Pattern");
  auto* pfile = query_cmd->add_option("--patterns-file", cfg.patterns_file, "One pattern per line");
  pat->excludes(pfile);
  pfile->excludes(pat);
  add_metric(query_cmd);
  add_k(query_cmd);
  query_cmd->add_flag("--all-errors", cfg.all_errors, "Wildcard queries: spend leftover budget on substitutions");
  query_cmd->add_option("--wildcard", cfg.wildcard, "Wildcard character (default: the index alphabet's)")
      ->check([](const std::string& v) { return v.size() == 1 ? std::string() : std::string("expected one character"); });
  query_cmd->add_option("--threads", cfg.threads, "Concurrent query workers")->check(CLI::Range(1u, 256u));
  add_common(query_cmd);

  auto* verify = app.add_subcommand("verify", "Cross-check random queries against the brute-force scan");
  verify->add_option("--index", cfg.index, "Index path")->required();
  add_metric(verify);
  add_k(verify);
  verify->add_option("--samples", cfg.samples, "Number of patterns");
  verify->add_option("--seed", cfg.seed, "Random seed");
  verify->add_flag("--all-errors", cfg.all_errors, "Wildcard queries: spend leftover budget on substitutions");
  add_common(verify);

  auto* stats_cmd = app.add_subcommand("stats", "Print index statistics");
  stats_cmd->add_option("--index", cfg.index, "Index path")->required();
  add_common(stats_cmd);

  auto* bench = app.add_subcommand("bench", "Time query batches (CSV on stdout)");
  auto* bench_in = add_build(bench, false);
  auto* bench_idx = bench->add_option("--index", cfg.index, "Index path");
  bench_in->excludes(bench_idx);
  bench_idx->excludes(bench_in);
  add_metric(bench);
  add_k(bench);
  bench->add_option("--samples", cfg.samples, "Number of queries");
  bench->add_option("--seed", cfg.seed, "Random seed");
  bench->add_flag("!--no-oracle", cfg.oracle, "Skip timing the brute-force scan");
  add_common(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorClass::input);
  }

  try {
    if (*query_cmd && cfg.pattern.empty() && cfg.patterns_file.empty())
      throw ParameterError("query needs --pattern or --patterns-file");
    if (*bench && cfg.input.empty() && cfg.index.empty()) throw ParameterError("bench needs --input or --index");
    if (*build) return cmd_build(cfg, out);
    if (*query_cmd) return cmd_query(cfg, out);
    if (*verify) return cmd_verify(cfg, out);
    if (*stats_cmd) return cmd_stats(cfg, out);
    if (*bench) return cmd_bench(cfg, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return static_cast<int>(ErrorClass::internal);
  }
  return static_cast<int>(ErrorClass::internal);
}

}  // namespace errortree
