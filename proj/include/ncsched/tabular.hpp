#pragma once

#include <vector>

#include "ncsched/aggregation.hpp"

namespace ncsched {

struct Transition {
  int next = 0;
  double probability = 0.0;
};

struct ActionModel {
  bool available = false;
  /// Expected one-step reward.
  double reward = 0.0;
  std::vector<Transition> next;
};

/// Finite MDP over integer states with actions indexed by label.
class TabularMdp {
 public:
  explicit TabularMdp(int states);

  int states() const noexcept { return states_; }
  ActionModel& at(int s, Action a) { return rows_[slot(s, a)]; }
  const ActionModel& at(int s, Action a) const { return rows_[slot(s, a)]; }
  bool has_data(int s) const;

 private:
  std::size_t slot(int s, Action a) const;

  int states_;
  std::vector<ActionModel> rows_;
};

struct Solution {
  std::vector<double> values;
  std::vector<Action> actions;
  /// Sup-norm change per sweep.
  std::vector<double> residuals;
  int iterations = 0;
  bool converged = false;
  /// Average-cost solvers only.
  double gain = 0.0;
};

/// Bellman backups until the sup-norm change drops below `tol`. Unavailable
/// actions are skipped; a state with none keeps value 0 and `fallback[s]`.
/// Ties resolve to the lowest label.
Solution value_iteration(const TabularMdp& mdp, double gamma, double tol, int max_iterations,
                         const std::vector<Action>& fallback);

/// Relative value iteration on the lazy chain (P + I) / 2.
Solution relative_value_iteration(const TabularMdp& mdp, double tol, int max_iterations,
                                  const std::vector<Action>& fallback, int reference = 0);

/// Discounted value of a fixed policy.
std::vector<double> evaluate_policy(const TabularMdp& mdp, const std::vector<Action>& actions, double gamma,
                                    double tol = 1e-12, int max_iterations = 1000000);

/// Limiting distribution from `start` under a fixed policy (lazy power iteration).
std::vector<double> limiting_distribution(const TabularMdp& mdp, const std::vector<Action>& actions, int start,
                                          double tol = 1e-14, int max_iterations = 10000000);

/// Long-run reward per step from `start`.
double average_reward(const TabularMdp& mdp, const std::vector<Action>& actions, int start);

}  // namespace ncsched
