#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ncsched/aggregation.hpp"
#include "ncsched/policy.hpp"

namespace ncsched {

struct ChannelConfig {
  int users = 5;
  /// Per-user loss probability p_k; reception succeeds with probability 1 - p_k.
  std::vector<double> loss;
  /// 0 disables TTE (binary storage).
  int lifetime = 0;
  double gamma = 0.99;
  std::uint64_t seed = 1;
  /// Half-width of a per-slot uniform perturbation of every p_k. 0 = off.
  double loss_jitter = 0.0;
  StorageRule storage = StorageRule::Accumulate;

  static ChannelConfig uniform(int users, double p, int lifetime = 0, double gamma = 0.99, std::uint64_t seed = 1);

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
  bool tte() const noexcept { return lifetime > 0; }
  DetailedState empty_state() const;
  double mean_loss() const;
};

/// One possible concrete combination of an abstract action.
struct Realization {
  UserSet combo = 0;
  double probability = 0.0;
};

/// Exact law of the combination realize_action draws. Throws InfeasibleAction.
std::vector<Realization> realization_law(const Aggregation& agg, const DetailedState& s, Action a);
UserSet realize_action(const Aggregation& agg, const DetailedState& s, Action a, Rng& rng);

struct Decision {
  UserSet combo = 0;
  /// Abstract label, or 0 when the controller acts on concrete sets only.
  int action = 0;
};

class Controller {
 public:
  virtual ~Controller() = default;
  virtual Decision decide(const DetailedState& s, Rng& rng) = 0;
  virtual void reset() {}
};

/// Applies a fixed policy over aggregated states.
class PolicyController final : public Controller {
 public:
  PolicyController(const Aggregation& agg, Policy policy);
  Decision decide(const DetailedState& s, Rng& rng) override;

 private:
  const Aggregation& agg_;
  Policy policy_;
};

struct StepResult {
  SlotOutcome outcome;
  UserSet combo = 0;
};

class Simulator {
 public:
  explicit Simulator(ChannelConfig config);

  const ChannelConfig& config() const noexcept { return config_; }
  Rng& rng() noexcept { return rng_; }
  void reseed(std::uint64_t seed) { rng_.seed(seed); }

  ReceptionVector sample_reception();
  StepResult step(const DetailedState& s, UserSet combo);

 private:
  ChannelConfig config_;
  Rng rng_;
};

struct TraceRecord {
  long long slot = 0;
  int state = -1;
  int action = 0;
  int next_state = -1;
  int reward = 0;
};

struct Trace {
  std::vector<TraceRecord> records;
  std::vector<long long> delivered;  // per user
  /// Slots spent with n non-empty rows, indexed by n.
  std::vector<long long> nonempty_rows;
  long long slots = 0;
  long long total_reward = 0;
  double discounted_return = 0.0;
  DetailedState final_state;

  /// Packets decoded per slot; absent for an empty trace.
  std::optional<double> throughput() const;
  void write_csv(std::ostream& os) const;
};

struct EpisodeOptions {
  bool keep_records = true;
  /// Aggregation used to index states in records; may be null.
  const Aggregation* indexer = nullptr;
  /// Called with every successor state and its index (-1 without indexer).
  std::function<void(const DetailedState&, int)> on_state;
};

Trace run_episode(Controller& controller, Simulator& sim, const DetailedState& s0, long long n_slots,
                  const EpisodeOptions& options = {});

}  // namespace ncsched
