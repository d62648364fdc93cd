#include "ncsched/channel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace ncsched {

ChannelConfig ChannelConfig::uniform(int users, double p, int lifetime, double gamma, std::uint64_t seed) {
  ChannelConfig c;
  c.users = users;
  c.loss.assign(static_cast<std::size_t>(std::max(users, 0)), p);
  c.lifetime = lifetime;
  c.gamma = gamma;
  c.seed = seed;
  return c;
}

void ChannelConfig::validate() const {
  if (users < 2 || users > kMaxUsers) {
    throw Error(ErrorCode::InvalidArgument, "users: need 2 <= K <= " + std::to_string(kMaxUsers));
  }
  if (static_cast<int>(loss.size()) != users) {
    throw Error(ErrorCode::InvalidArgument, "loss: expected " + std::to_string(users) + " entries");
  }
  for (double p : loss) {
    if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "loss: every p_k must lie in [0,1)");
  }
  if (lifetime < 0 || lifetime > 255) throw Error(ErrorCode::InvalidArgument, "tte: must be in 1..255 when set");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw Error(ErrorCode::InvalidArgument, "gamma: must lie in [0,1)");
  if (!(loss_jitter >= 0.0 && loss_jitter < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "loss_jitter: must lie in [0,1)");
  }
}

DetailedState ChannelConfig::empty_state() const {
  return tte() ? DetailedState::tte(users, lifetime) : DetailedState::binary(users);
}

double ChannelConfig::mean_loss() const {
  if (loss.empty()) return 0.0;
  double sum = 0.0;
  for (double p : loss) sum += p;
  return sum / static_cast<double>(loss.size());
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Realization> uniform_over(const std::vector<UserSet>& sets) {
  std::vector<Realization> out;
  const double w = 1.0 / static_cast<double>(sets.size());
  for (UserSet c : sets) out.push_back({c, w});
  return out;
}

std::vector<Realization> singletons_of(UserSet pool) {
  std::vector<UserSet> sets;
  for (int u : members(pool)) sets.push_back(singleton(u));
  return uniform_over(sets);
}

// A user outside a uniformly drawn maximum clique, merged by combination.
std::vector<Realization> e_line_law(const DetailedState& s) {
  const auto cliques = maximum_cliques(s);
  const UserSet everyone = all_users(s.users());
  std::vector<double> mass(static_cast<std::size_t>(s.users()), 0.0);
  for (UserSet q : cliques) {
    const UserSet outside = everyone & ~q;
    const double w = 1.0 / static_cast<double>(cliques.size()) / static_cast<double>(set_size(outside));
    for (int u : members(outside)) mass[static_cast<std::size_t>(u)] += w;
  }
  std::vector<Realization> out;
  for (int u = 0; u < s.users(); ++u) {
    if (mass[static_cast<std::size_t>(u)] > 0.0) out.push_back({singleton(u), mass[static_cast<std::size_t>(u)]});
  }
  return out;
}

}  // namespace

std::vector<Realization> realization_law(const Aggregation& agg, const DetailedState& s, Action a) {
  const AggregatedState hat = agg.aggregate(s);
  if (!agg.feasible(hat, a)) {
    throw Error(ErrorCode::InfeasibleAction,
                "action " + std::to_string(label(a)) + " is infeasible in " + agg.describe(hat));
  }
  switch (a) {
    case Action::EmptyLine:
      if (agg.scheme() == Scheme::OneD) return e_line_law(s);
      return singletons_of(empty_rows(s));
    case Action::CliqueWithOldest:
      if (agg.scheme() == Scheme::AggI || agg.scheme() == Scheme::AggII) return uniform_over(oldest_cliques(s));
      return uniform_over(maximum_cliques(s));
    case Action::GlobalMaxClique:
      return uniform_over(maximum_cliques(s));
  }
  return {};
}

UserSet realize_action(const Aggregation& agg, const DetailedState& s, Action a, Rng& rng) {
  const auto law = realization_law(agg, s, a);
  if (law.size() == 1) return law.front().combo;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double x = unit(rng);
  for (const auto& r : law) {
    x -= r.probability;
    if (x < 0.0) return r.combo;
  }
  return law.back().combo;
}

// ---------------------------------------------------------------------------

PolicyController::PolicyController(const Aggregation& agg, Policy policy) : agg_(agg), policy_(std::move(policy)) {
  policy_.validate(agg_);
}

Decision PolicyController::decide(const DetailedState& s, Rng& rng) {
  const Action a = policy_[agg_.aggregate_index(s)];
  return {realize_action(agg_, s, a, rng), label(a)};
}

Simulator::Simulator(ChannelConfig config) : config_(std::move(config)), rng_(config_.seed) { config_.validate(); }

ReceptionVector Simulator::sample_reception() {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ReceptionVector rx{config_.users, 0};
  for (int u = 0; u < config_.users; ++u) {
    double p = config_.loss[static_cast<std::size_t>(u)];
    if (config_.loss_jitter > 0.0) {
      p = std::clamp(p + config_.loss_jitter * (2.0 * unit(rng_) - 1.0), 0.0, 0.999);
    }
    if (unit(rng_) >= p) rx.received |= singleton(u);
  }
  return rx;
}

StepResult Simulator::step(const DetailedState& s, UserSet combo) {
  const ReceptionVector rx = sample_reception();
  return {transmit(s, combo, rx, config_.storage), combo};
}

// ---------------------------------------------------------------------------

std::optional<double> Trace::throughput() const {
  if (slots == 0) return std::nullopt;
  return static_cast<double>(total_reward) / static_cast<double>(slots);
}

void Trace::write_csv(std::ostream& os) const {
  os << "slot,state_index,action,next_state_index,reward\n";
  for (const auto& r : records) {
    os << r.slot << ',' << r.state << ',' << r.action << ',' << r.next_state << ',' << r.reward << '\n';
  }
}

Trace run_episode(Controller& controller, Simulator& sim, const DetailedState& s0, long long n_slots,
                  const EpisodeOptions& options) {
  const int k = sim.config().users;
  Trace trace;
  trace.delivered.assign(static_cast<std::size_t>(k), 0);
  trace.nonempty_rows.assign(static_cast<std::size_t>(k + 1), 0);
  if (options.keep_records) trace.records.reserve(static_cast<std::size_t>(std::max(n_slots, 0LL)));

  const double gamma = sim.config().gamma;
  double discount = 1.0;
  DetailedState s = s0;
  int index = options.indexer ? options.indexer->aggregate_index(s) : -1;
  for (long long t = 0; t < n_slots; ++t) {
    ++trace.nonempty_rows[static_cast<std::size_t>(k - empty_lines(s))];
    const Decision d = controller.decide(s, sim.rng());
    StepResult step = sim.step(s, d.combo);
    const int reward = step.outcome.reward;
    for (int u : members(step.outcome.decoded)) ++trace.delivered[static_cast<std::size_t>(u)];
    trace.total_reward += reward;
    trace.discounted_return += discount * reward;
    discount *= gamma;
    s = std::move(step.outcome.next_state);
    const int next_index = options.indexer ? options.indexer->aggregate_index(s) : -1;
    if (options.keep_records) trace.records.push_back({t, index, d.action, next_index, reward});
    if (options.on_state) options.on_state(s, next_index);
    index = next_index;
  }
  trace.slots = std::max(n_slots, 0LL);
  trace.final_state = std::move(s);
  return trace;
}

}  // namespace ncsched
