#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ncsched/oracle_kernels.hpp"
#include "ncsched/tabular.hpp"

namespace ncsched {

struct ExactOutcome {
  DetailedState next;
  double probability = 0.0;
  /// probability x expected reward.
  double reward_mass = 0.0;
};

/// Exact successor law of one slot, marginalized over receptions and over the
/// realization of the abstract action. Outcomes are merged by state and listed
/// in order of first appearance.
std::vector<ExactOutcome> exact_transition(const Aggregation& agg, const DetailedState& s, Action a,
                                           const std::vector<double>& loss,
                                           StorageRule rule = StorageRule::Accumulate);

/// Detailed states in a closed communicating class, by Tarjan's algorithm.
std::vector<bool> recurrent_states(const Chain& chain);
/// Detailed states reachable from `start` along positive-probability edges.
std::vector<bool> reachable_states(const Chain& chain, int start);

/// Exact induced MDP of a policy: aggregated transitions and constructed
/// rewards weighted by the policy's conditional stationary law.
struct InducedModel {
  TabularMdp mdp{1};
  /// Conditional weight p(s | class of s) per detailed state.
  std::vector<double> weights;
  /// Stationary mass of each aggregated state from the empty matrix.
  std::vector<double> mass;
  /// Aggregated states weighted uniformly for lack of stationary mass.
  std::vector<bool> uniform_fallback;
  /// r_hat[s][a][s'] for available pairs, 0 where the successor is impossible.
  std::vector<std::vector<std::vector<double>>> reward_hat;
  /// Detailed limiting distribution from the empty matrix.
  std::vector<double> stationary;
};

InducedModel induced_model_exact(const DetailedModel& model, const Aggregation& agg, const Policy& policy,
                                 Kernel kernel = Kernel::Parallel);

struct InducedValueReport {
  Policy policy;
  double gamma = 0.0;
  /// max over aggregated states of |V_hat - V_bar|.
  double max_gap = 0.0;
  int worst_state = -1;
  /// Same maximum over states carrying stationary mass.
  double max_gap_recurrent = 0.0;
  /// Successor-class law and expected reward constant on every weighted fiber.
  bool lumpable = false;
  /// The same, restricted to classes carrying stationary mass.
  bool lumpable_recurrent = false;
  /// |sum_c mass(c) V_hat(c) - sum_s pi(s) V(s)|, zero for every policy.
  double stationary_gap = 0.0;
  double gain_detailed = 0.0;
  double gain_induced = 0.0;
  std::vector<double> v_hat;
  std::vector<double> v_bar;
  std::vector<int> uniform_fallback_states;

  double gain_gap() const;
};

InducedValueReport verify_induced_values(const DetailedModel& model, const Aggregation& agg, const Policy& policy, double gamma,
                         Kernel kernel = Kernel::Parallel);

enum class OptimizeMethod { Exhaustive, PolicyIteration };

struct OptimalResult {
  ValueFunction value;
  Policy policy;
  bool converged = true;
  int iterations = 0;
  /// Exhaustive only: objective of every candidate, in all_policies order.
  std::vector<std::pair<Policy, double>> table;
  /// Exhaustive only: policies within the tie tolerance of the best.
  std::vector<Policy> optima;
};

/// Average cost ranks policies by their gain from the empty matrix.
/// Discounted ranks by the fiber-uniform value of the empty matrix's class,
/// then by the sum over classes. Ties prefer fewer switches along the
/// clique component, then enumeration order.
OptimalResult exact_optimal(const DetailedModel& model, const Aggregation& agg, Criterion criterion, double gamma,
                            OptimizeMethod method = OptimizeMethod::Exhaustive, Kernel kernel = Kernel::Parallel);

/// Number of action changes along the ordered states of a OneD policy.
int switch_count(const Policy& policy);
/// OneD: action 2 below some L, action 1 from there on.
bool is_threshold(const Policy& policy);

struct MonotoneCheck {
  std::string axis;
  std::map<std::string, int> fixed;
  bool nondecreasing = true;
  std::vector<int> states;  // ordered along the axis
  std::vector<double> values;
  int violations = 0;
  double worst = 0.0;  // largest step against the expected direction
};

/// Scans V along `axis` over states matching `fixed`.
MonotoneCheck monotone_along(const Aggregation& agg, const std::vector<double>& values, const std::string& axis,
                             const std::map<std::string, int>& fixed, bool nondecreasing, double slack = 0.0);

struct SlopeBoundReport {
  /// Largest forward difference V(k+1) - V(k) along the clique component.
  double d = 0.0;
  /// min over k > i >= 1 of V(k) - V(k-i) + i along the clique component.
  double c_min = 0.0;
  bool monotone = true;
  int violations = 0;
  std::vector<MonotoneCheck> checks;
};

/// OneD: V nondecreasing in L. AggI: nondecreasing in C at fixed (F, E) and
/// nonincreasing in E at fixed (F, C). Other schemes: clique component only.
SlopeBoundReport verify_value_shape(const Aggregation& agg, const std::vector<double>& values, double slack = 0.0);

}  // namespace ncsched
