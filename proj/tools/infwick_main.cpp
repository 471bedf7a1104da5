#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "infwick/cumulants.hpp"
#include "infwick/harness.hpp"
#include "infwick/perms.hpp"
#include "infwick/prng.hpp"
#include "infwick/rmt.hpp"
#include "infwick/wick.hpp"

namespace {

using namespace infwick;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

// Word tokens: id, t, s (sampled sigma), st (t s t), u (sampled tau), ut.
std::vector<EntryPermutation> parse_word_tokens(const std::string& word, int n,
                                                std::uint64_t seed) {
  std::vector<EntryPermutation> letters;
  EntryPermutation sigma = sample_uniform(n, prng_detail::mix(seed ^ 0x73696761ULL));
  EntryPermutation tau = sample_uniform(n, prng_detail::mix(seed ^ 0x74617531ULL));
  for (const auto& tok : split(word, ',')) {
    if (tok == "id") {
      letters.push_back(EntryPermutation::identity(n));
    } else if (tok == "t") {
      letters.push_back(EntryPermutation::transpose(n));
    } else if (tok == "s") {
      letters.push_back(sigma);
    } else if (tok == "st") {
      letters.push_back(EntryPermutation::transpose_conjugate(sigma));
    } else if (tok == "u") {
      letters.push_back(tau);
    } else if (tok == "ut") {
      letters.push_back(EntryPermutation::transpose_conjugate(tau));
    } else {
      throw CLI::ValidationError("word", "unknown letter token '" + tok + "'");
    }
  }
  if (letters.empty()) throw CLI::ValidationError("word", "empty word");
  return letters;
}

int cmd_run(const std::string& preset, const std::string& config_path, std::uint64_t seed,
            bool seed_set, const std::string& out, long long samples, const std::string& n_csv,
            int jobs) {
  ExperimentConfig config;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open config " << config_path << "\n";
      return 2;
    }
    nlohmann::json j;
    in >> j;
    config = ExperimentConfig::from_json(j);
  }
  if (!preset.empty()) config.preset = preset;
  if (seed_set) config.seed = seed;
  if (!out.empty()) config.out_dir = out;
  if (samples > 0) config.samples = samples;
  if (jobs > 0) config.jobs = jobs;
  if (!n_csv.empty()) {
    config.n_list.clear();
    for (const auto& tok : split(n_csv, ',')) config.n_list.push_back(std::stoi(tok));
  }
  if (config.preset.empty()) {
    std::cerr << "no preset given (use --preset or a config file)\n";
    return 2;
  }

  ExperimentReport report;
  try {
    report = run_preset(config);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  const auto paths = emit_tables(report, config.out_dir);
  for (const auto& c : report.criteria) {
    std::printf("[%s] %s: %s (threshold: %s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.observed.c_str(), c.threshold.c_str());
  }
  for (const auto& p : paths) std::printf("wrote %s\n", p.c_str());
  return report.all_pass() ? 0 : 1;
}

int cmd_wick(const std::string& word, int n, std::uint64_t seed) {
  WickWord w(parse_word_tokens(word, n, seed));
  std::printf("# schema=v1\n");
  std::printf("pairing,count,v_numerator,v_denominator,class\n");
  Rational total = 0;
  for (const auto& pc : pairing_contributions(w)) {
    total += pc.v_value;
    std::string cls = "-";
    if (pc.cls) cls = std::to_string(static_cast<int>(*pc.cls));
    std::printf("%s,%lld,%s,%s,%s\n", pc.pairing.to_string().c_str(), pc.admissible_count,
                boost::multiprecision::numerator(pc.v_value).str().c_str(),
                boost::multiprecision::denominator(pc.v_value).str().c_str(), cls.c_str());
  }
  std::printf("total,%s\n", rational_to_string(total).c_str());
  return 0;
}

int cmd_stats(const std::string& kind, int n, std::uint64_t seed, const std::string& perm_csv) {
  // Permutation tokens: id, t, u (fresh uniform draw from the seed stream).
  std::vector<EntryPermutation> perms;
  int draw = 0;
  for (const auto& tok : split(perm_csv, ',')) {
    if (tok == "id") {
      perms.push_back(EntryPermutation::identity(n));
    } else if (tok == "t") {
      perms.push_back(EntryPermutation::transpose(n));
    } else if (tok == "u") {
      perms.push_back(sample_uniform(n, prng_detail::mix(seed + 1000003ULL * ++draw)));
    } else {
      throw CLI::ValidationError("perms", "unknown permutation token '" + tok + "'");
    }
  }

  StatReport report;
  if (kind == "transpose-fixed" || kind == "row-sup") {
    const EntryPermutation s = perms.empty() ? sample_uniform(n, seed) : perms.front();
    report = kind == "transpose-fixed" ? stat_transpose_fixed(s) : stat_row_sup(s);
  } else if (kind == "quad-cycle" || kind == "hex") {
    while (perms.size() < 4) {
      perms.push_back(sample_uniform(n, prng_detail::mix(seed + 1000003ULL * ++draw)));
    }
    report = kind == "quad-cycle" ? stat_quad_cycle(perms[0], perms[1], perms[2], perms[3])
                                  : stat_hex(perms[0], perms[1], perms[2], perms[3]);
  } else {
    static const std::map<std::string, std::pair<LemmaStat, std::size_t>> kinds = {
        {"L33ii", {LemmaStat::L33ii, 2}}, {"L42i", {LemmaStat::L42i, 2}},
        {"L42ii", {LemmaStat::L42ii, 2}}, {"L43i", {LemmaStat::L43i, 1}},
        {"L43ii", {LemmaStat::L43ii, 1}}, {"L44i", {LemmaStat::L44i, 2}},
        {"L44ii", {LemmaStat::L44ii, 3}}, {"L45", {LemmaStat::L45, 4}},
    };
    const auto it = kinds.find(kind);
    if (it == kinds.end()) {
      std::cerr << "unknown statistic kind '" << kind << "'\n";
      return 2;
    }
    while (perms.size() < it->second.second) {
      perms.push_back(sample_uniform(n, prng_detail::mix(seed + 1000003ULL * ++draw)));
    }
    report = stat_lemma_family(it->second.first, perms).report;
  }
  report.seed = seed;
  std::printf("# schema=v1\n");
  std::printf("kind,N,seed,raw,exponent,normalized\n");
  std::printf("%s\n", report.csv_row().c_str());
  return 0;
}

int cmd_partitions(int pairs_m, int nc_n, bool noncrossing_only) {
  if (pairs_m > 0) {
    const auto all = enumerate_pair_partitions(pairs_m);
    long long shown = 0;
    for (const auto& p : all) {
      if (noncrossing_only && !is_noncrossing(p)) continue;
      std::printf("%s\n", p.to_string().c_str());
      ++shown;
    }
    std::printf("count,%lld\n", shown);
  }
  if (nc_n > 0) {
    const auto all = enumerate_nc(nc_n);
    for (const auto& p : all) std::printf("%s\n", p.to_string().c_str());
    std::printf("count,%zu\n", all.size());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moments and infinitesimal moments of words in entry-permuted Gaussian matrices"};
  app.require_subcommand(1);

  std::string preset, config_path, out, n_csv, word = "id,t", kind = "transpose-fixed";
  std::string perm_csv;
  std::uint64_t seed = infwick::kDefaultSeed;
  long long samples = 0;
  int n = 8, jobs = 0, pairs_m = 0, nc_n = 0;
  bool noncrossing_only = false;

  auto* run = app.add_subcommand("run", "Run an experiment preset and write its reports");
  run->add_option("--preset", preset,
                  "transpose-cumulants | random-perm-null | inf-freeness | lemma-stats | "
                  "exact-vs-mc | lemma24-audit");
  run->add_option("--config", config_path, "JSON config file (flags override it)");
  auto* seed_opt = run->add_option("--seed", seed, "PRNG seed");
  run->add_option("--out", out, "output directory");
  run->add_option("--samples", samples, "Monte Carlo samples per size");
  run->add_option("--n", n_csv, "comma-separated matrix sizes");
  run->add_option("--jobs", jobs, "worker threads");

  auto* wick = app.add_subcommand("wick", "Per-pairing exact contributions for a word");
  wick->add_option("--word", word, "letters: id,t,s,st,u,ut (comma separated)");
  wick->add_option("--n", n, "matrix side length")->required();
  wick->add_option("--seed", seed, "seed for sampled letters (s, st, u, ut)");

  auto* stats = app.add_subcommand("stats", "Coincidence-count statistics");
  stats->add_option("--kind", kind,
                    "transpose-fixed | row-sup | quad-cycle | hex | L33ii | L42i | L42ii | "
                    "L43i | L43ii | L44i | L44ii | L45");
  stats->add_option("--n", n, "matrix side length")->required();
  stats->add_option("--seed", seed, "PRNG seed");
  stats->add_option("--perms", perm_csv, "permutation tokens: id, t, u (uniform draw)");

  auto* partitions = app.add_subcommand("partitions", "Enumerate pairings / NC partitions");
  partitions->add_option("--pairs", pairs_m, "list pair partitions of this many points");
  partitions->add_option("--nc", nc_n, "list non-crossing partitions of this many points");
  partitions->add_flag("--noncrossing-only", noncrossing_only, "filter pairings to non-crossing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) {
      return cmd_run(preset, config_path, seed, seed_opt->count() > 0, out, samples, n_csv, jobs);
    }
    if (wick->parsed()) return cmd_wick(word, n, seed);
    if (stats->parsed()) return cmd_stats(kind, n, seed, perm_csv);
    if (partitions->parsed()) return cmd_partitions(pairs_m, nc_n, noncrossing_only);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 2;
}
