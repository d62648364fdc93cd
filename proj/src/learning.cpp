#include "ncsched/learning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace ncsched {

TransitionModel::TransitionModel(int states) : states_(states) {
  if (states < 1) throw Error(ErrorCode::InvalidArgument, "model needs at least one state");
  const auto n = static_cast<std::size_t>(states);
  counts_.assign(n * kActionSlots * n, 0);
  rewards_.assign(n * kActionSlots * n, 0.0);
  visits_.assign(n * kActionSlots, 0);
}

std::size_t TransitionModel::row(int s, Action a) const {
  if (s < 0 || s >= states_) throw Error(ErrorCode::InvalidArgument, "state index out of range");
  return static_cast<std::size_t>(s) * kActionSlots + static_cast<std::size_t>(label(a));
}

std::size_t TransitionModel::cell(int s, Action a, int next) const {
  if (next < 0 || next >= states_) throw Error(ErrorCode::InvalidArgument, "successor index out of range");
  return row(s, a) * static_cast<std::size_t>(states_) + static_cast<std::size_t>(next);
}

void TransitionModel::record(int s, Action a, int next, double reward) {
  const std::size_t c = cell(s, a, next);
  ++counts_[c];
  rewards_[c] += reward;
  ++visits_[row(s, a)];
}

void TransitionModel::merge(const TransitionModel& other) {
  if (other.states_ != states_) throw Error(ErrorCode::InvalidArgument, "models differ in size");
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    counts_[i] += other.counts_[i];
    rewards_[i] += other.rewards_[i];
  }
  for (std::size_t i = 0; i < visits_.size(); ++i) visits_[i] += other.visits_[i];
}

long long TransitionModel::visits(int s) const {
  long long total = 0;
  for (Action a : kAllActions) total += visits(s, a);
  return total;
}

double TransitionModel::p_hat(int s, Action a, int next) const {
  const long long n = visits(s, a);
  return n == 0 ? 0.0 : static_cast<double>(count(s, a, next)) / static_cast<double>(n);
}

double TransitionModel::r_hat(int s, Action a, int next) const {
  const long long n = count(s, a, next);
  return n == 0 ? 0.0 : reward_sum(s, a, next) / static_cast<double>(n);
}

TabularMdp TransitionModel::to_mdp(const Aggregation& agg) const {
  if (agg.size() != states_) throw Error(ErrorCode::SchemeMismatch, "model and aggregation differ in size");
  TabularMdp mdp(states_);
  for (int s = 0; s < states_; ++s) {
    for (Action a : agg.feasible_actions(agg.state(s))) {
      const long long n = visits(s, a);
      if (n == 0) continue;
      ActionModel& m = mdp.at(s, a);
      m.available = true;
      double reward = 0.0;
      for (int t = 0; t < states_; ++t) {
        const long long c = count(s, a, t);
        if (c == 0) continue;
        m.next.push_back({t, static_cast<double>(c) / static_cast<double>(n)});
        reward += reward_sum(s, a, t);
      }
      m.reward = reward / static_cast<double>(n);
    }
  }
  return mdp;
}

void TransitionModel::write_checkpoint(std::ostream& os, const Aggregation& agg) const {
  os << "# state components action visits reward_sum successors(index:count)\n";
  for (int s = 0; s < states_; ++s) {
    for (Action a : kAllActions) {
      const long long n = visits(s, a);
      if (n == 0) continue;
      double reward = 0.0;
      for (int t = 0; t < states_; ++t) reward += reward_sum(s, a, t);
      os << s << ' ' << agg.describe(agg.state(s)) << ' ' << label(a) << ' ' << n << ' ' << reward;
      for (int t = 0; t < states_; ++t) {
        if (count(s, a, t) > 0) os << ' ' << t << ':' << count(s, a, t);
      }
      os << '\n';
    }
  }
}

// ---------------------------------------------------------------------------

double LearningSchedule::epsilon(int phase) const {
  return std::clamp(std::max(epsilon_min, epsilon0 * std::pow(decay, phase)), 0.0, 1.0);
}

void LearningSchedule::validate() const {
  if (!(epsilon0 >= 0.0 && epsilon0 <= 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon0: must lie in [0,1]");
  if (!(decay >= 0.0 && decay <= 1.0)) throw Error(ErrorCode::InvalidArgument, "decay: must lie in [0,1]");
  if (!(epsilon_min >= 0.0 && epsilon_min <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon_min: must lie in [0,1]");
  }
  if (phase_slots < 1) throw Error(ErrorCode::InvalidArgument, "phase_slots: must be >= 1");
  if (max_phases < 1) throw Error(ErrorCode::InvalidArgument, "max_phases: must be >= 1");
  if (episode_slots < 1) throw Error(ErrorCode::InvalidArgument, "episode_slots: must be >= 1");
  if (!(stop_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "stop_tol: must be > 0");
  if (reservoir < 0) throw Error(ErrorCode::InvalidArgument, "reservoir: must be >= 0");
}

EpsilonGreedyController::EpsilonGreedyController(const Aggregation& agg, const Policy* policy, double epsilon)
    : agg_(agg), policy_(policy), epsilon_(epsilon) {}

Decision EpsilonGreedyController::decide(const DetailedState& s, Rng& rng) {
  const int index = agg_.aggregate_index(s);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Action a;
  if (policy_ == nullptr || unit(rng) < epsilon_) {
    const auto actions = agg_.feasible_actions(agg_.state(index));
    std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
    a = actions[pick(rng)];
  } else {
    a = (*policy_)[index];
  }
  return {realize_action(agg_, s, a, rng), label(a)};
}

const char* to_string(StopRule rule) noexcept {
  switch (rule) {
    case StopRule::None: return "none";
    case StopRule::ValueConverged: return "value";
    case StopRule::PolicyStable: return "policy";
  }
  return "?";
}

Solution solve_model(const TransitionModel& model, const Aggregation& agg, double gamma, double tol,
                     int max_iterations) {
  std::vector<Action> fallback;
  for (int s = 0; s < agg.size(); ++s) fallback.push_back(default_action(agg, s));
  return value_iteration(model.to_mdp(agg), gamma, tol, max_iterations, fallback);
}

LearningResult algorithm_a(const ChannelConfig& config, const Aggregation& agg, const LearningSchedule& schedule) {
  config.validate();
  schedule.validate();
  if (config.tte() != uses_tte(agg.scheme()) || config.users != agg.users() ||
      (config.tte() && config.lifetime != agg.lifetime())) {
    throw Error(ErrorCode::SchemeMismatch, std::string("channel does not match scheme ") + to_string(agg.scheme()));
  }

  LearningResult result;
  result.model = TransitionModel(agg.size());
  result.value.criterion = Criterion::Discounted;
  result.value.gamma = config.gamma;
  result.value.values.assign(static_cast<std::size_t>(agg.size()), 0.0);
  result.policy = make_policy(agg, [&](const AggregatedState& s) { return agg.feasible_actions(s).front(); });

  Simulator sim(config);
  const Policy* current = nullptr;  // phase 0 plays the uniform restricted policy
  EpsilonGreedyController controller(agg, current, 1.0);
  EpisodeOptions options{true, &agg, {}};
  std::vector<std::vector<DetailedState>> pool(static_cast<std::size_t>(agg.size()));
  std::vector<long long> seen(static_cast<std::size_t>(agg.size()), 0);
  Rng pool_rng(derive_seed(config.seed, 0x5eed));
  if (schedule.reservoir > 0) {
    options.on_state = [&](const DetailedState& s, int idx) {
      auto& bucket = pool[static_cast<std::size_t>(idx)];
      const long long n = ++seen[static_cast<std::size_t>(idx)];
      if (static_cast<int>(bucket.size()) < schedule.reservoir) {
        bucket.push_back(s);
      } else {
        const auto j = std::uniform_int_distribution<long long>(0, n - 1)(pool_rng);
        if (j < schedule.reservoir) bucket[static_cast<std::size_t>(j)] = s;
      }
    };
  }
  DetailedState state = config.empty_state();
  int unchanged = 0;

  for (int k = 0; k < schedule.max_phases; ++k) {
    PhaseRecord rec;
    rec.phase = k;
    rec.epsilon = schedule.epsilon(k);
    controller.set_policy(current);
    controller.set_epsilon(rec.epsilon);

    const long long per_episode = schedule.episode_slots;
    long long remaining = schedule.phase_slots;
    while (remaining > 0) {
      const long long n = std::min(per_episode, remaining);
      if (schedule.seeding) {
        int least = 0;
        for (int s = 1; s < agg.size(); ++s) {
          if (result.model.visits(s) < result.model.visits(least)) least = s;
        }
        if (rec.seed_state < 0) rec.seed_state = least;
        const auto& bucket = pool[static_cast<std::size_t>(least)];
        if (bucket.empty()) {
          state = agg.seed_state(agg.state(least));
        } else {
          state = bucket[std::uniform_int_distribution<std::size_t>(0, bucket.size() - 1)(pool_rng)];
        }
      }
      Trace trace = run_episode(controller, sim, state, n, options);
      for (const auto& r : trace.records) {
        result.model.record(r.state, action_from_label(r.action), r.next_state, r.reward);
      }
      state = trace.final_state;
      remaining -= n;
      result.slots += n;
    }

    const Solution sol = solve_model(result.model, agg, config.gamma, schedule.vi_tol, schedule.vi_max_iterations);
    Policy next_policy = result.policy;
    next_policy.actions = sol.actions;
    rec.sup_change = 0.0;
    for (std::size_t i = 0; i < sol.values.size(); ++i) {
      rec.sup_change = std::max(rec.sup_change, std::abs(sol.values[i] - result.value.values[i]));
    }
    rec.policy_changed = k == 0 || next_policy != result.policy;
    rec.values = sol.values;
    unchanged = rec.policy_changed ? 0 : unchanged + 1;

    result.value.values = sol.values;
    result.policy = std::move(next_policy);
    current = &result.policy;
    result.history.push_back(std::move(rec));

    if (k + 1 >= schedule.min_phases) {
      if (result.history.back().sup_change < schedule.stop_tol) {
        result.converged = true;
        result.stop_rule = StopRule::ValueConverged;
        break;
      }
      if (unchanged >= schedule.stable_phases) {
        result.converged = true;
        result.stop_rule = StopRule::PolicyStable;
        break;
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

Policy threshold_accelerate(const Policy& policy, const Aggregation& agg, const std::string& component,
                            Direction direction, bool allow_overwrite) {
  policy.validate(agg);
  const auto names = agg.component_names();
  const auto it = std::find(names.begin(), names.end(), component);
  if (it == names.end()) {
    throw Error(ErrorCode::InvalidArgument, "component '" + component + "' is not part of " + to_string(agg.scheme()));
  }
  const auto axis = static_cast<std::size_t>(it - names.begin());

  // Slices keyed by the remaining components, each ordered along the axis.
  std::map<std::vector<int>, std::vector<std::pair<int, int>>> slices;
  for (int i = 0; i < agg.size(); ++i) {
    auto comps = agg.components(agg.state(i));
    const int position = comps[axis];
    comps.erase(comps.begin() + static_cast<std::ptrdiff_t>(axis));
    slices[comps].push_back({position, i});
  }

  Policy out = policy;
  for (auto& [key, members] : slices) {
    std::sort(members.begin(), members.end());
    if (direction == Direction::Descending) std::reverse(members.begin(), members.end());
    int switches = 0;
    for (std::size_t j = 1; j < members.size(); ++j) {
      if (policy[members[j].second] != policy[members[j - 1].second]) ++switches;
    }
    if (switches <= 1) continue;
    if (!allow_overwrite) {
      throw Error(ErrorCode::AmbiguousSlice, std::to_string(switches) + " switches along " + component +
                                                 " in the slice containing " +
                                                 agg.describe(agg.state(members.front().second)));
    }
    std::size_t first = 1;
    while (policy[members[first].second] == policy[members[first - 1].second]) ++first;
    const Action target = policy[members[first].second];
    for (std::size_t j = first + 1; j < members.size(); ++j) {
      const int idx = members[j].second;
      if (agg.feasible(idx, target)) out.actions[static_cast<std::size_t>(idx)] = target;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  // splitmix64 finalizer
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

void summarize(EvalResult& r) {
  const auto n = static_cast<double>(r.per_seed.size());
  if (r.per_seed.empty()) return;
  double sum = 0.0;
  for (double x : r.per_seed) sum += x;
  r.mean = sum / n;
  if (r.per_seed.size() > 1) {
    double ss = 0.0;
    for (double x : r.per_seed) ss += (x - r.mean) * (x - r.mean);
    r.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
}

}  // namespace

EvalResult average_cost_eval(const ControllerFactory& factory, const ChannelConfig& config, const DetailedState& s0,
                             long long n_slots, int n_seeds) {
  if (n_slots < 1 || n_seeds < 1) throw Error(ErrorCode::InvalidArgument, "evaluation needs slots and seeds >= 1");
  config.validate();
  EvalResult result;
  result.per_seed.assign(static_cast<std::size_t>(n_seeds), 0.0);
  std::vector<std::vector<long long>> delivered(static_cast<std::size_t>(n_seeds));

#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n_seeds; ++i) {
    ChannelConfig c = config;
    c.seed = derive_seed(config.seed, static_cast<std::uint64_t>(i));
    Simulator sim(c);
    auto controller = factory();
    const Trace t = run_episode(*controller, sim, s0, n_slots, EpisodeOptions{false, nullptr, {}});
    result.per_seed[static_cast<std::size_t>(i)] = *t.throughput();
    delivered[static_cast<std::size_t>(i)] = t.delivered;
  }

  result.delivered.assign(static_cast<std::size_t>(config.users), 0);
  for (const auto& d : delivered) {
    for (std::size_t u = 0; u < d.size(); ++u) result.delivered[u] += d[u];
  }
  result.slots = n_slots * n_seeds;
  summarize(result);
  return result;
}

EvalResult discounted_value_estimate(const ControllerFactory& factory, const ChannelConfig& config,
                                     const DetailedState& s0, int episodes, long long horizon, int n_seeds) {
  if (episodes < 1 || horizon < 1 || n_seeds < 1) {
    throw Error(ErrorCode::InvalidArgument, "episodes, horizon and seeds must be >= 1");
  }
  config.validate();
  EvalResult result;
  result.per_seed.assign(static_cast<std::size_t>(n_seeds), 0.0);

#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n_seeds; ++i) {
    ChannelConfig c = config;
    c.seed = derive_seed(config.seed, static_cast<std::uint64_t>(i));
    Simulator sim(c);
    double sum = 0.0;
    for (int e = 0; e < episodes; ++e) {
      auto controller = factory();
      sum += run_episode(*controller, sim, s0, horizon, EpisodeOptions{false, nullptr, {}}).discounted_return;
    }
    result.per_seed[static_cast<std::size_t>(i)] = sum / episodes;
  }
  result.slots = horizon * episodes * n_seeds;
  summarize(result);
  return result;
}

}  // namespace ncsched
