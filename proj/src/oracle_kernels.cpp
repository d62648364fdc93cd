#include <algorithm>
#include <cmath>

#include "ncsched/oracle.hpp"

namespace ncsched {

std::vector<ExactOutcome> exact_transition(const Aggregation& agg, const DetailedState& s, Action a,
                                           const std::vector<double>& loss, StorageRule rule) {
  const int k = s.users();
  if (static_cast<int>(loss.size()) != k) throw Error(ErrorCode::InvalidArgument, "one loss value per user");
  std::vector<ExactOutcome> out;
  for (const Realization& r : realization_law(agg, s, a)) {
    // Receptions of non-members only matter for uncoded packets.
    const UserSet relevant = set_size(r.combo) > 1 ? r.combo : all_users(k);
    const auto who = members(relevant);
    const std::uint32_t patterns = 1u << who.size();
    for (std::uint32_t bits = 0; bits < patterns; ++bits) {
      double prob = r.probability;
      UserSet received = 0;
      for (std::size_t j = 0; j < who.size(); ++j) {
        const double p = loss[static_cast<std::size_t>(who[j])];
        if ((bits >> j) & 1u) {
          prob *= 1.0 - p;
          received |= singleton(who[j]);
        } else {
          prob *= p;
        }
      }
      if (prob == 0.0) continue;
      SlotOutcome o = transmit(s, r.combo, ReceptionVector{k, received}, rule);
      auto it = std::find_if(out.begin(), out.end(), [&](const ExactOutcome& e) { return e.next == o.next_state; });
      if (it == out.end()) {
        out.push_back({std::move(o.next_state), prob, prob * o.reward});
      } else {
        it->probability += prob;
        it->reward_mass += prob * o.reward;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

DetailedSpace::DetailedSpace(int users, bool allow_large) : users_(users), size_(0) {
  if (users < 2) throw Error(ErrorCode::InvalidArgument, "K must be >= 2");
  if (users > 5 || (users > 4 && !allow_large)) {
    throw Error(ErrorCode::TooLarge, "2^(K(K-1)) detailed states for K=" + std::to_string(users) +
                                         " exceed the enumeration guard");
  }
  size_ = 1 << (users * (users - 1));
}

DetailedState DetailedSpace::state(int index) const {
  DetailedState s = DetailedState::binary(users_);
  int b = 0;
  for (int i = 0; i < users_; ++i) {
    for (int j = 0; j < users_; ++j) {
      if (i == j) continue;
      if ((index >> b) & 1) s.set(i, j, 1);
      ++b;
    }
  }
  return s;
}

int DetailedSpace::index_of(const DetailedState& s) const {
  if (s.users() != users_ || s.is_tte()) throw Error(ErrorCode::ModeMismatch, "state is not in this binary space");
  int index = 0;
  int b = 0;
  for (int i = 0; i < users_; ++i) {
    for (int j = 0; j < users_; ++j) {
      if (i == j) continue;
      if (s.at(i, j) > 0) index |= 1 << b;
      ++b;
    }
  }
  return index;
}

double DetailedModel::expected_reward(int s, Action a) const {
  double r = 0.0;
  for (int e = row_ptr[row(s, a)]; e < row_ptr[row(s, a) + 1]; ++e) r += reward_mass[static_cast<std::size_t>(e)];
  return r;
}

namespace {

struct Entry {
  int next;
  double probability;
  double reward_mass;
};

}  // namespace

DetailedModel build_detailed_model(const DetailedSpace& space, const Aggregation& agg, const std::vector<double>& loss,
                                   StorageRule rule, Kernel kernel) {
  if (uses_tte(agg.scheme())) throw Error(ErrorCode::ModeMismatch, "exact enumeration covers binary schemes only");
  if (agg.users() != space.users()) throw Error(ErrorCode::InvalidArgument, "aggregation and space differ in K");
  const int n = space.size();
  DetailedModel model;
  model.users = space.users();
  model.scheme = agg.scheme();
  model.agg_index.assign(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<Entry>> rows(static_cast<std::size_t>(n) * kActionSlots);

  auto fill = [&](int s) {
    const DetailedState state = space.state(s);
    const int idx = agg.aggregate_index(state);
    model.agg_index[static_cast<std::size_t>(s)] = idx;
    for (Action a : agg.feasible_actions(agg.state(idx))) {
      auto& row = rows[model.row(s, a)];
      for (const ExactOutcome& o : exact_transition(agg, state, a, loss, rule)) {
        row.push_back({space.index_of(o.next), o.probability, o.reward_mass});
      }
      std::sort(row.begin(), row.end(), [](const Entry& x, const Entry& y) { return x.next < y.next; });
    }
  };

  if (kernel == Kernel::Parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (int s = 0; s < n; ++s) fill(s);
  } else {
    for (int s = 0; s < n; ++s) fill(s);
  }

  model.row_ptr.assign(rows.size() + 1, 0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    model.row_ptr[r + 1] = model.row_ptr[r] + static_cast<int>(rows[r].size());
  }
  model.next.reserve(static_cast<std::size_t>(model.row_ptr.back()));
  for (const auto& row : rows) {
    for (const Entry& e : row) {
      model.next.push_back(e.next);
      model.probability.push_back(e.probability);
      model.reward_mass.push_back(e.reward_mass);
    }
  }
  return model;
}

Chain policy_chain(const DetailedModel& model, const Policy& policy) {
  Chain chain;
  const int n = model.states();
  chain.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  chain.reward.assign(static_cast<std::size_t>(n), 0.0);
  for (int s = 0; s < n; ++s) {
    const Action a = policy[model.agg_index[static_cast<std::size_t>(s)]];
    const std::size_t r = model.row(s, a);
    if (!model.available(s, a)) {
      throw Error(ErrorCode::InfeasibleAction, "policy action has no transitions in detailed state " + std::to_string(s));
    }
    for (int e = model.row_ptr[r]; e < model.row_ptr[r + 1]; ++e) {
      const auto ue = static_cast<std::size_t>(e);
      chain.next.push_back(model.next[ue]);
      chain.probability.push_back(model.probability[ue]);
      chain.reward_mass.push_back(model.reward_mass[ue]);
      chain.reward[static_cast<std::size_t>(s)] += model.reward_mass[ue];
    }
    chain.row_ptr[static_cast<std::size_t>(s) + 1] = static_cast<int>(chain.next.size());
  }
  return chain;
}

std::vector<double> evaluate_discounted(const Chain& chain, double gamma, Kernel kernel, double tol) {
  const int n = chain.states();
  std::vector<double> v(static_cast<std::size_t>(n), 0.0), next(static_cast<std::size_t>(n), 0.0);
  for (int it = 0; it < 10000000; ++it) {
    double delta = 0.0;
    auto sweep = [&](int s) {
      double acc = 0.0;
      for (int e = chain.row_ptr[static_cast<std::size_t>(s)]; e < chain.row_ptr[static_cast<std::size_t>(s) + 1]; ++e) {
        acc += chain.probability[static_cast<std::size_t>(e)] * v[static_cast<std::size_t>(chain.next[static_cast<std::size_t>(e)])];
      }
      next[static_cast<std::size_t>(s)] = chain.reward[static_cast<std::size_t>(s)] + gamma * acc;
      return std::abs(next[static_cast<std::size_t>(s)] - v[static_cast<std::size_t>(s)]);
    };
    if (kernel == Kernel::Parallel) {
#pragma omp parallel for reduction(max : delta) schedule(static)
      for (int s = 0; s < n; ++s) delta = std::max(delta, sweep(s));
    } else {
      for (int s = 0; s < n; ++s) delta = std::max(delta, sweep(s));
    }
    v.swap(next);
    if (delta == 0.0 || delta * gamma < tol * (1.0 - gamma)) break;
  }
  return v;
}

std::vector<double> limiting_distribution(const Chain& chain, int start, Kernel kernel, double tol,
                                          int max_iterations) {
  const int n = chain.states();
  // Transpose so each destination pulls its inflow.
  std::vector<int> col_ptr(static_cast<std::size_t>(n) + 1, 0), src(chain.next.size());
  std::vector<double> w(chain.next.size());
  for (int t : chain.next) ++col_ptr[static_cast<std::size_t>(t) + 1];
  for (int j = 0; j < n; ++j) col_ptr[static_cast<std::size_t>(j) + 1] += col_ptr[static_cast<std::size_t>(j)];
  std::vector<int> fill(col_ptr.begin(), col_ptr.end() - 1);
  for (int s = 0; s < n; ++s) {
    for (int e = chain.row_ptr[static_cast<std::size_t>(s)]; e < chain.row_ptr[static_cast<std::size_t>(s) + 1]; ++e) {
      const auto slot = static_cast<std::size_t>(fill[static_cast<std::size_t>(chain.next[static_cast<std::size_t>(e)])]++);
      src[slot] = s;
      w[slot] = chain.probability[static_cast<std::size_t>(e)];
    }
  }

  std::vector<double> x(static_cast<std::size_t>(n), 0.0), next(static_cast<std::size_t>(n), 0.0);
  x.at(static_cast<std::size_t>(start)) = 1.0;
  for (int it = 0; it < max_iterations; ++it) {
    double delta = 0.0;
    auto pull = [&](int j) {
      double acc = 0.0;
      for (int e = col_ptr[static_cast<std::size_t>(j)]; e < col_ptr[static_cast<std::size_t>(j) + 1]; ++e) {
        acc += w[static_cast<std::size_t>(e)] * x[static_cast<std::size_t>(src[static_cast<std::size_t>(e)])];
      }
      next[static_cast<std::size_t>(j)] = 0.5 * (x[static_cast<std::size_t>(j)] + acc);
      return std::abs(next[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(j)]);
    };
    if (kernel == Kernel::Parallel) {
#pragma omp parallel for reduction(max : delta) schedule(static)
      for (int j = 0; j < n; ++j) delta = std::max(delta, pull(j));
    } else {
      for (int j = 0; j < n; ++j) delta = std::max(delta, pull(j));
    }
    x.swap(next);
    if (delta < tol) break;
  }
  return x;
}

}  // namespace ncsched
