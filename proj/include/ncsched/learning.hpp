#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "ncsched/channel.hpp"
#include "ncsched/tabular.hpp"

namespace ncsched {

/// Visit counts n(s, a, s') and reward sums R(s, a, s') over aggregated indices.
class TransitionModel {
 public:
  TransitionModel() = default;
  explicit TransitionModel(int states);

  int states() const noexcept { return states_; }
  void record(int s, Action a, int next, double reward);
  void merge(const TransitionModel& other);

  long long count(int s, Action a, int next) const { return counts_[cell(s, a, next)]; }
  double reward_sum(int s, Action a, int next) const { return rewards_[cell(s, a, next)]; }
  long long visits(int s, Action a) const { return visits_[row(s, a)]; }
  long long visits(int s) const;

  /// 0 for an unvisited pair.
  double p_hat(int s, Action a, int next) const;
  /// Running mean reward of the transition, 0 when never seen.
  double r_hat(int s, Action a, int next) const;

  /// Empirical MDP restricted to visited feasible pairs.
  TabularMdp to_mdp(const Aggregation& agg) const;

  /// One line per visited (s, a): components, action, visits, reward sum and
  /// successor:count pairs.
  void write_checkpoint(std::ostream& os, const Aggregation& agg) const;

 private:
  std::size_t row(int s, Action a) const;
  std::size_t cell(int s, Action a, int next) const;

  int states_ = 0;
  std::vector<long long> counts_;
  std::vector<double> rewards_;
  std::vector<long long> visits_;
};

struct LearningSchedule {
  double epsilon0 = 1.0;
  double decay = 0.7;
  double epsilon_min = 0.05;
  long long phase_slots = 50000;
  int max_phases = 60;
  int min_phases = 10;
  /// Stop when the sup-norm change of V between phases drops below this.
  double stop_tol = 0.05;
  /// Alternative stop: greedy policy unchanged for this many phases in a row.
  int stable_phases = 4;
  /// Length of each episode within a phase; every episode starts from the
  /// currently least-visited aggregated state when seeding is on.
  long long episode_slots = 100;
  bool seeding = true;
  /// Seed from detailed states previously visited in the target class
  /// (reservoir of this size per class); the canonical member otherwise.
  int reservoir = 64;
  double vi_tol = 1e-6;
  int vi_max_iterations = 500000;

  double epsilon(int phase) const;
  void validate() const;
};

/// Plays the policy with probability 1 - epsilon, otherwise a uniformly drawn
/// feasible action.
class EpsilonGreedyController final : public Controller {
 public:
  EpsilonGreedyController(const Aggregation& agg, const Policy* policy, double epsilon);
  void set_epsilon(double epsilon) noexcept { epsilon_ = epsilon; }
  void set_policy(const Policy* policy) noexcept { policy_ = policy; }
  Decision decide(const DetailedState& s, Rng& rng) override;

 private:
  const Aggregation& agg_;
  const Policy* policy_;
  double epsilon_;
};

enum class StopRule { None, ValueConverged, PolicyStable };
const char* to_string(StopRule rule) noexcept;

struct PhaseRecord {
  int phase = 0;
  double epsilon = 0.0;
  int seed_state = -1;
  double sup_change = 0.0;
  bool policy_changed = true;
  std::vector<double> values;
};

struct LearningResult {
  ValueFunction value;
  Policy policy;
  TransitionModel model;
  std::vector<PhaseRecord> history;
  bool converged = false;
  StopRule stop_rule = StopRule::None;
  long long slots = 0;
};

/// Greedy solve of a learned model. Throws NoData on an empty model.
Solution solve_model(const TransitionModel& model, const Aggregation& agg, double gamma, double tol,
                     int max_iterations);

LearningResult algorithm_a(const ChannelConfig& config, const Aggregation& agg, const LearningSchedule& schedule);

enum class Direction { Ascending, Descending };

/// Enforces at most one switch along `component` (a name from
/// Aggregation::component_names) in every slice fixing the other components.
/// The action after the first switch overwrites later states where feasible.
/// Throws AmbiguousSlice on a slice with several switches unless allowed.
Policy threshold_accelerate(const Policy& policy, const Aggregation& agg, const std::string& component,
                            Direction direction = Direction::Ascending, bool allow_overwrite = false);

using ControllerFactory = std::function<std::unique_ptr<Controller>()>;

struct EvalResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<double> per_seed;
  std::vector<long long> delivered;
  long long slots = 0;
};

/// Packets decoded per slot over `n_seeds` independent runs started at `s0`.
/// Seeds run in parallel; seed i uses derive_seed(config.seed, i).
EvalResult average_cost_eval(const ControllerFactory& factory, const ChannelConfig& config, const DetailedState& s0,
                             long long n_slots, int n_seeds);

/// Mean discounted return from `s0`; each seed averages `episodes` runs of
/// `horizon` slots.
EvalResult discounted_value_estimate(const ControllerFactory& factory, const ChannelConfig& config,
                                     const DetailedState& s0, int episodes, long long horizon, int n_seeds);

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

}  // namespace ncsched
