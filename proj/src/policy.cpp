#include "ncsched/policy.hpp"

namespace ncsched {

bool Policy::matches(const Aggregation& agg) const noexcept {
  return scheme == agg.scheme() && users == agg.users() && lifetime == agg.lifetime() && size() == agg.size();
}

void Policy::validate(const Aggregation& agg) const {
  if (!matches(agg)) {
    throw Error(ErrorCode::SchemeMismatch, std::string("policy built for ") + to_string(scheme) + " K=" +
                                               std::to_string(users) + " does not fit this aggregation");
  }
  for (int i = 0; i < size(); ++i) {
    if (!agg.feasible(i, actions[static_cast<std::size_t>(i)])) {
      throw Error(ErrorCode::InfeasibleAction, "action " + std::to_string(label(actions[static_cast<std::size_t>(i)])) +
                                                   " is infeasible in " + agg.describe(agg.state(i)));
    }
  }
}

Action default_action(const Aggregation& agg, int index) { return agg.feasible_actions(agg.state(index)).front(); }

Policy make_policy(const Aggregation& agg, const std::function<Action(const AggregatedState&)>& rule) {
  Policy p{agg.scheme(), agg.users(), agg.lifetime(), {}};
  p.actions.reserve(static_cast<std::size_t>(agg.size()));
  for (const auto& s : agg.states()) {
    Action a = rule(s);
    if (!agg.feasible(s, a)) a = agg.feasible_actions(s).front();
    p.actions.push_back(a);
  }
  return p;
}

Policy semi_greedy_policy(const Aggregation& agg) {
  return make_policy(agg, [&](const AggregatedState& s) {
    if (agg.feasible(s, Action::EmptyLine)) return Action::EmptyLine;
    return agg.scheme() == Scheme::AggII ? Action::GlobalMaxClique : Action::CliqueWithOldest;
  });
}

Policy threshold_policy(const Aggregation& agg, int threshold) {
  if (agg.scheme() != Scheme::OneD) throw Error(ErrorCode::SchemeMismatch, "threshold policies live on OneD");
  return make_policy(agg, [&](const AggregatedState& s) {
    return s.clique >= threshold ? Action::CliqueWithOldest : Action::EmptyLine;
  });
}

Policy msg_policy(const Aggregation& agg) {
  if (agg.scheme() != Scheme::AggII) throw Error(ErrorCode::SchemeMismatch, "MSG is expressed over AggII");
  return make_policy(agg, [](const AggregatedState& s) {
    if (s.oldest == 1) return Action::CliqueWithOldest;
    if (s.empty > 0) return Action::EmptyLine;
    return Action::GlobalMaxClique;
  });
}

std::vector<Policy> all_policies(const Aggregation& agg, std::size_t limit) {
  std::vector<std::vector<Action>> choices;
  std::size_t total = 1;
  for (const auto& s : agg.states()) {
    choices.push_back(agg.feasible_actions(s));
    total *= choices.back().size();
    if (total > limit) throw Error(ErrorCode::TooLarge, "more than " + std::to_string(limit) + " policies");
  }
  std::vector<Policy> out;
  out.reserve(total);
  std::vector<std::size_t> digit(choices.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    Policy p{agg.scheme(), agg.users(), agg.lifetime(), {}};
    for (std::size_t i = 0; i < choices.size(); ++i) p.actions.push_back(choices[i][digit[i]]);
    out.push_back(std::move(p));
    for (std::size_t i = choices.size(); i-- > 0;) {
      if (++digit[i] < choices[i].size()) break;
      digit[i] = 0;
    }
  }
  return out;
}

std::string policy_string(const Policy& p) {
  std::string out;
  for (Action a : p.actions) out += static_cast<char>('0' + label(a));
  return out;
}

}  // namespace ncsched
