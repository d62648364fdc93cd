#include "ncsched/baselines.hpp"

namespace ncsched {

const char* to_string(BaselineId id) noexcept {
  switch (id) {
    case BaselineId::Uncoded: return "uncoded";
    case BaselineId::Greedy: return "greedy";
    case BaselineId::SemiGreedy: return "sg";
    case BaselineId::ModifiedSemiGreedy: return "msg";
    case BaselineId::RandomRestricted: return "random";
  }
  return "?";
}

BaselineId parse_baseline(const std::string& name) {
  if (name == "uncoded") return BaselineId::Uncoded;
  if (name == "greedy") return BaselineId::Greedy;
  if (name == "sg") return BaselineId::SemiGreedy;
  if (name == "msg") return BaselineId::ModifiedSemiGreedy;
  if (name == "random") return BaselineId::RandomRestricted;
  throw Error(ErrorCode::InvalidArgument, "unknown policy '" + name + "' (uncoded|greedy|sg|msg|random)");
}

namespace {

Decision semi_greedy(const DetailedState& s, Rng& rng) {
  const UserSet empty = empty_rows(s);
  if (empty != 0) return {singleton(pick_member(empty, rng)), 2};
  return {max_clique(s, rng), 1};
}

}  // namespace

Decision decide(BaselineId id, const DetailedState& s, Rng& rng, int& cursor, const Aggregation* agg) {
  const int k = s.users();
  switch (id) {
    case BaselineId::Uncoded: {
      const int u = cursor % k;
      cursor = (u + 1) % k;
      return {singleton(u), 0};
    }
    case BaselineId::Greedy: {
      if (max_clique_size(s) >= 2) return {max_clique(s, rng), 1};
      const UserSet empty = empty_rows(s);
      if (empty != 0) return {singleton(pick_member(empty, rng)), 2};
      return {singleton(pick_member(all_users(k), rng)), 1};
    }
    case BaselineId::SemiGreedy:
      return semi_greedy(s, rng);
    case BaselineId::ModifiedSemiGreedy: {
      if (!s.is_tte()) throw Error(ErrorCode::ModeMismatch, "MSG needs TTE-mode states");
      if (!s.all_empty() && oldest_lifetime(s) == 1) return {clique_with_oldest(s, rng).clique, 1};
      return semi_greedy(s, rng);
    }
    case BaselineId::RandomRestricted: {
      if (agg == nullptr) throw Error(ErrorCode::InvalidArgument, "random restricted policy needs an aggregation");
      const auto actions = agg->feasible_actions(agg->aggregate(s));
      std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
      const Action a = actions[pick(rng)];
      return {realize_action(*agg, s, a, rng), label(a)};
    }
  }
  return {};
}

BaselineController::BaselineController(BaselineId id, const Aggregation* agg) : id_(id), agg_(agg) {
  if (id == BaselineId::RandomRestricted && agg == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "random restricted policy needs an aggregation");
  }
}

Decision BaselineController::decide(const DetailedState& s, Rng& rng) { return ncsched::decide(id_, s, rng, cursor_, agg_); }

}  // namespace ncsched
