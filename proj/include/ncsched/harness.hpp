#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncsched/baselines.hpp"
#include "ncsched/learning.hpp"
#include "ncsched/oracle.hpp"

namespace ncsched {

using Json = nlohmann::ordered_json;

struct EvaluationSettings {
  long long slots = 200000;
  int seeds = 5;
  /// Discounted-return estimate; 0 episodes disables it.
  int episodes = 0;
  long long horizon = 2000;
};

enum class SourceKind { Learn, Baseline, File, Named };

/// Where the actions of one compared policy come from.
struct PolicySource {
  SourceKind kind = SourceKind::Learn;
  BaselineId baseline = BaselineId::Uncoded;
  /// Policy CSV path (File) or rule name (Named: sg, msg, greedy, threshold:<m>).
  std::string name;
  /// Per-policy slot budget; must equal the global one unless mixing is allowed.
  std::optional<long long> slots;

  std::string label() const;
  /// learn | uncoded|greedy|sg|msg|random | rule:<name> | file:<path>
  static PolicySource parse(const std::string& spec);
};

struct ExperimentConfig {
  ChannelConfig channel;
  Scheme scheme = Scheme::NoTte;
  /// One loss vector per sweep point. Empty means the single point channel.loss.
  std::vector<std::vector<double>> points;
  std::vector<PolicySource> policies;
  LearningSchedule schedule;
  EvaluationSettings evaluation;
  std::filesystem::path out_dir = "out";
  /// Any of csv, json.
  std::vector<std::string> formats{"csv", "json"};
  bool allow_mixed_budgets = false;

  /// Throws InvalidArgument with a field-prefixed message.
  void validate() const;
  std::vector<std::vector<double>> sweep() const;
  Aggregation aggregation() const;

  static ExperimentConfig from_json(const Json& j);
  Json to_json() const;
};

/// Named differentiated-loss sweeps over `users` users: every profile has
/// mean `mean` and increasing spread. Known names: equal-mean-0.3.
std::vector<std::vector<double>> loss_preset(const std::string& name, int users);

/// Aggregated-state rule by name: sg, msg, greedy, threshold:<m>.
Policy named_policy(const Aggregation& agg, const std::string& name);
/// NoTte/OneD: clique when its size is at least 2, else EmptyLine when
/// feasible. AggI/AggII: the same on the clique component.
Policy greedy_policy(const Aggregation& agg);

struct PointResult {
  std::size_t point = 0;
  std::vector<double> loss;
  std::string policy;
  std::uint64_t seed = 0;
  EvalResult throughput;
  std::optional<EvalResult> discounted;
  /// Aggregated policy and values for learned, named and file sources.
  std::optional<Policy> table;
  std::optional<ValueFunction> value;
  /// Learning summary.
  int phases = 0;
  long long learn_slots = 0;
  std::string stop_rule;
};

struct Report {
  ExperimentConfig config;
  std::vector<PointResult> results;

  const PointResult* find(const std::string& policy, std::size_t point) const;
  Json to_json() const;
  /// Writes policy.csv, value.csv, throughput.csv and report.json per `formats`.
  void write(const std::filesystem::path& dir) const;
};

Report run_experiment(const ExperimentConfig& config);

struct Disagreement {
  int state = 0;
  std::string description;
  Action a;
  Action b;
};

/// Throws SchemeMismatch when the policies belong to different aggregations.
std::vector<Disagreement> diff_policies(const Policy& a, const Policy& b, const Aggregation& agg);

/// One row per state: state_id, components, action.
void write_policy_csv(const std::filesystem::path& path, const Aggregation& agg, const Policy& policy);
/// Reads the last action column of a policy CSV written by this harness.
Policy read_policy_csv(const std::filesystem::path& path, const Aggregation& agg, const std::string& column = "");

Json to_json(const InducedValueReport& r, const Aggregation& agg);
Json to_json(const EvalResult& r);
Json to_json(const MonotoneCheck& c);

}  // namespace ncsched
