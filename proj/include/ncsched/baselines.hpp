#pragma once

#include <string>

#include "ncsched/channel.hpp"

namespace ncsched {

enum class BaselineId { Uncoded, Greedy, SemiGreedy, ModifiedSemiGreedy, RandomRestricted };

const char* to_string(BaselineId id) noexcept;
/// Accepts uncoded|greedy|sg|msg|random.
BaselineId parse_baseline(const std::string& name);

/// Decision rules over detailed states. Labels in the returned Decision are
/// 1 for a clique, 2 for an empty line and 0 for plain round-robin.
class BaselineController final : public Controller {
 public:
  /// RandomRestricted needs `agg`; the other rules ignore it.
  explicit BaselineController(BaselineId id, const Aggregation* agg = nullptr);

  Decision decide(const DetailedState& s, Rng& rng) override;
  void reset() override { cursor_ = 0; }
  BaselineId id() const noexcept { return id_; }

 private:
  BaselineId id_;
  const Aggregation* agg_;
  int cursor_ = 0;
};

/// One-shot form of the rules; Uncoded uses and advances `cursor`.
Decision decide(BaselineId id, const DetailedState& s, Rng& rng, int& cursor, const Aggregation* agg = nullptr);

}  // namespace ncsched
