#include <doctest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "infwick/harness.hpp"

using namespace infwick;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config json round trip") {
  ExperimentConfig c;
  c.preset = "exact-vs-mc";
  c.n_list = {8};
  c.seed = 9;
  c.samples = 500;
  c.jobs = 2;
  const ExperimentConfig back = ExperimentConfig::from_json(c.to_json());
  CHECK(back.preset == c.preset);
  CHECK(back.n_list == c.n_list);
  CHECK(back.seed == c.seed);
  CHECK(back.samples == c.samples);
  CHECK(back.jobs == c.jobs);
}

TEST_CASE("unknown preset is a usage error") {
  ExperimentConfig c;
  c.preset = "foo";
  CHECK_THROWS_AS(run_preset(c), std::invalid_argument);
}

TEST_CASE("transpose-cumulants preset passes and emits deterministic bytes") {
  ExperimentConfig c;
  c.preset = "transpose-cumulants";
  c.n_list = {2, 3, 4};
  const ExperimentReport report = run_preset(c);
  CHECK(report.all_pass());

  const auto paths1 = emit_tables(report, "build_test_out/a");
  const auto paths2 = emit_tables(report, "build_test_out/b");
  REQUIRE(paths1.size() == paths2.size());
  for (std::size_t k = 0; k < paths1.size(); ++k) {
    CHECK(slurp(paths1[k]) == slurp(paths2[k]));
    // Tables carry the schema header line.
    if (paths1[k].ends_with(".csv")) {
      CHECK(slurp(paths1[k]).rfind("# schema=v1\n", 0) == 0);
    }
  }
  // A rerun of the same config produces byte-identical files.
  const auto paths3 = emit_tables(run_preset(c), "build_test_out/c");
  for (std::size_t k = 0; k < paths1.size(); ++k) {
    CHECK(slurp(paths1[k]) == slurp(paths3[k]));
  }
}

TEST_CASE("lemma24 audit preset passes") {
  ExperimentConfig c;
  c.preset = "lemma24-audit";
  const ExperimentReport report = run_preset(c);
  CHECK(report.all_pass());
  REQUIRE(report.criteria.size() == 1);
  CHECK(report.criteria.front().name == "restricted-exponent-monotonicity");
}

TEST_CASE("exact-vs-mc preset at reduced size") {
  ExperimentConfig c;
  c.preset = "exact-vs-mc";
  c.n_list = {8};
  c.samples = 2500;
  c.max_degree = 4;
  const ExperimentReport report = run_preset(c);
  CHECK(report.all_pass());
}

TEST_CASE("random-perm-null preset at reduced sample count") {
  // The sizes stay at the preset default: with one fixed draw per size the
  // squared-copy moment carries a deterministic bias of order 1/N^2, which
  // only drops inside the 3 sigma band from N = 32 on.
  ExperimentConfig c;
  c.preset = "random-perm-null";
  c.samples = 600;
  const ExperimentReport report = run_preset(c);
  CHECK(report.all_pass());
}
