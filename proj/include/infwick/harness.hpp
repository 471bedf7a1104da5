#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace infwick {

inline constexpr std::uint64_t kDefaultSeed = 1;

// Preset names: transpose-cumulants, random-perm-null, inf-freeness,
// lemma-stats, exact-vs-mc, lemma24-audit.
struct ExperimentConfig {
  std::string preset;
  std::vector<int> n_list;     // empty -> preset default
  std::uint64_t seed = kDefaultSeed;
  long long samples = 0;       // 0 -> preset default
  int max_degree = 0;          // 0 -> preset default
  int stat_seeds = 50;
  std::string out_dir = "out";
  int jobs = 0;                // 0 -> hardware concurrency

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string observed;
  std::string threshold;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct ExperimentReport {
  std::string preset;
  ExperimentConfig config;
  std::vector<CriterionResult> criteria;
  std::vector<Table> tables;

  bool all_pass() const;
  nlohmann::json summary_json() const;
};

ExperimentReport run_preset(const ExperimentConfig& config);

// Writes <out_dir>/<preset>/<table>.csv plus summary.json; deterministic
// bytes for a fixed config. Returns the written paths.
std::vector<std::string> emit_tables(const ExperimentReport& report, const std::string& out_dir);

}  // namespace infwick
