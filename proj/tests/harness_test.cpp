#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ncsched/harness.hpp"

using namespace ncsched;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ncsched_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Json small_config(const fs::path& out) {
  return Json{{"seed", 5},
              {"users", 3},
              {"loss", {0.2, 0.3}},
              {"gamma", 0.9},
              {"scheme", "notte"},
              {"policies", {"uncoded", "sg", "rule:greedy"}},
              {"evaluation", {{"slots", 20000}, {"seeds", 2}}},
              {"out", out.string()}};
}

}  // namespace

TEST_CASE("config errors name their field") {
  Json j = small_config("x");
  j.erase("seed");
  CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j), doctest::Contains("seed"), Error);

  j = small_config("x");
  j["scheme"] = "agg1";
  CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j).validate(), doctest::Contains("tte"), Error);

  j = small_config("x");
  j["scheme"] = "bogus";
  CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j), doctest::Contains("scheme"), Error);

  j = small_config("x");
  j["loss"] = "high";
  CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j), doctest::Contains("loss"), Error);

  j = small_config("x");
  j["loss"] = Json::array({Json::array({0.1, 0.2})});
  CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j).validate(), doctest::Contains("loss"), Error);

  j = small_config("x");
  j["policies"] = {"msg"};
  CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j).validate(), doctest::Contains("policies"), Error);

  j = small_config("x");
  j["policy_slots"] = {{"sg", 1000}};
  CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j).validate(), doctest::Contains("allow_mixed_budgets"), Error);
  j["allow_mixed_budgets"] = true;
  CHECK_NOTHROW(ExperimentConfig::from_json(j).validate());

  j = small_config("x");
  j["schedule"] = {{"phase_slots", 0}};
  CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j).validate(), doctest::Contains("phase_slots"), Error);
}

TEST_CASE("config JSON round trip") {
  const auto c = ExperimentConfig::from_json(small_config("rt"));
  CHECK(c.sweep().size() == 2);
  CHECK(c.sweep()[1] == std::vector<double>(3, 0.3));
  const auto again = ExperimentConfig::from_json(c.to_json());
  CHECK(again.to_json() == c.to_json());
}

TEST_CASE("policy sources") {
  CHECK(PolicySource::parse("learn").kind == SourceKind::Learn);
  CHECK(PolicySource::parse("sg").baseline == BaselineId::SemiGreedy);
  CHECK(PolicySource::parse("rule:threshold:3").name == "threshold:3");
  CHECK(PolicySource::parse("file:a.csv").kind == SourceKind::File);
  CHECK_THROWS_AS(PolicySource::parse("best"), Error);
}

TEST_CASE("loss presets keep the mean") {
  const auto pts = loss_preset("equal-mean-0.3", 5);
  REQUIRE(pts.size() > 1);
  for (const auto& p : pts) {
    double mean = 0.0;
    for (double x : p) mean += x / 5.0;
    CHECK(mean == doctest::Approx(0.3));
  }
  CHECK_THROWS_AS(loss_preset("nope", 5), Error);
}

TEST_CASE("diff of aggregated policies") {
  const Aggregation agg(Scheme::NoTte, 5);
  const Policy sg = semi_greedy_policy(agg);
  CHECK(diff_policies(sg, sg, agg).empty());
  const auto d = diff_policies(sg, greedy_policy(agg), agg);
  CHECK_FALSE(d.empty());
  for (const auto& x : d) {
    CHECK(agg.state(x.state).empty > 0);
    CHECK(agg.state(x.state).clique >= 2);
  }
  const Aggregation other(Scheme::NoTte, 4);
  CHECK_THROWS_AS(diff_policies(sg, semi_greedy_policy(other), agg), Error);
}

TEST_CASE("policy CSV round trip") {
  const fs::path dir = scratch("csv");
  for (const auto& agg : {Aggregation(Scheme::NoTte, 5), Aggregation(Scheme::AggII, 4, 3), Aggregation(Scheme::OneD, 4)}) {
    const Policy p = greedy_policy(agg);
    write_policy_csv(dir / "p.csv", agg, p);
    CHECK(read_policy_csv(dir / "p.csv", agg) == p);
  }
  CHECK_THROWS_AS(read_policy_csv(dir / "missing.csv", Aggregation(Scheme::OneD, 4)), Error);
}

TEST_CASE("experiment run is reproducible and writes its files") {
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  Json ja = small_config(a), jb = small_config(b);
  const Report ra = run_experiment(ExperimentConfig::from_json(ja));
  const Report rb = run_experiment(ExperimentConfig::from_json(jb));
  for (const char* f : {"policy.csv", "value.csv", "throughput.csv", "report.json"}) CHECK(fs::exists(a / f));
  REQUIRE(ra.results.size() == 6);
  for (std::size_t i = 0; i < ra.results.size(); ++i) {
    CHECK(ra.results[i].throughput.per_seed == rb.results[i].throughput.per_seed);
    CHECK(ra.results[i].seed == rb.results[i].seed);
  }
  const auto* un = ra.find("uncoded", 0);
  REQUIRE(un != nullptr);
  CHECK(un->throughput.mean == doctest::Approx(0.8).epsilon(0.03));
  const auto report = Json::parse(std::ifstream(a / "report.json"));
  CHECK(report.contains("config"));
  CHECK(report["config"]["seed"] == 5);
}
