#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ncsched/aggregation.hpp"

namespace ncsched {

/// Action per aggregated-state index of one aggregation.
struct Policy {
  Scheme scheme = Scheme::NoTte;
  int users = 0;
  int lifetime = 0;
  std::vector<Action> actions;

  int size() const noexcept { return static_cast<int>(actions.size()); }
  Action operator[](int index) const { return actions.at(static_cast<std::size_t>(index)); }
  bool operator==(const Policy&) const = default;

  /// Throws SchemeMismatch or InfeasibleAction.
  void validate(const Aggregation& agg) const;
  bool matches(const Aggregation& agg) const noexcept;
};

enum class Criterion { Discounted, AverageCost };

struct ValueFunction {
  Criterion criterion = Criterion::Discounted;
  double gamma = 0.0;
  std::vector<double> values;
  /// Long-run reward per slot, average-cost criterion only.
  double gain = 0.0;
};

/// First feasible action of each state.
Action default_action(const Aggregation& agg, int index);
Policy make_policy(const Aggregation& agg, const std::function<Action(const AggregatedState&)>& rule);
/// EmptyLine whenever feasible, otherwise the clique action.
Policy semi_greedy_policy(const Aggregation& agg);
/// OneD: clique iff L >= threshold (feasibility permitting).
Policy threshold_policy(const Aggregation& agg, int threshold);
/// AggII rendering of the modified semi-greedy rule: clique with the oldest
/// line when F=1, else empty line, else the global maximal clique.
Policy msg_policy(const Aggregation& agg);

/// Every deterministic policy over the aggregation, in lexicographic order of
/// feasible-action choices. Throws TooLarge past `limit`.
std::vector<Policy> all_policies(const Aggregation& agg, std::size_t limit = 1u << 16);

std::string policy_string(const Policy& p);

}  // namespace ncsched
