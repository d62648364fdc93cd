#include "ncsched/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace ncsched {

std::vector<bool> reachable_states(const Chain& chain, int start) {
  const int n = chain.states();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<int> stack{start};
  seen.at(static_cast<std::size_t>(start)) = true;
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    for (int e = chain.row_ptr[static_cast<std::size_t>(s)]; e < chain.row_ptr[static_cast<std::size_t>(s) + 1]; ++e) {
      const int t = chain.next[static_cast<std::size_t>(e)];
      if (chain.probability[static_cast<std::size_t>(e)] > 0.0 && !seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = true;
        stack.push_back(t);
      }
    }
  }
  return seen;
}

std::vector<bool> recurrent_states(const Chain& chain) {
  const int n = chain.states();
  std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0),
      comp(static_cast<std::size_t>(n), -1);
  std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
  std::vector<int> stack;
  int counter = 0;
  int components = 0;

  // Iterative Tarjan: frames hold (vertex, next edge offset).
  std::vector<std::pair<int, int>> frames;
  for (int root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] >= 0) continue;
    frames.push_back({root, chain.row_ptr[static_cast<std::size_t>(root)]});
    index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = counter++;
    stack.push_back(root);
    on_stack[static_cast<std::size_t>(root)] = true;
    while (!frames.empty()) {
      auto& [v, e] = frames.back();
      const auto uv = static_cast<std::size_t>(v);
      if (e < chain.row_ptr[uv + 1]) {
        const int w = chain.next[static_cast<std::size_t>(e++)];
        const auto uw = static_cast<std::size_t>(w);
        if (index[uw] < 0) {
          index[uw] = low[uw] = counter++;
          stack.push_back(w);
          on_stack[uw] = true;
          frames.push_back({w, chain.row_ptr[uw]});
        } else if (on_stack[uw]) {
          low[uv] = std::min(low[uv], index[uw]);
        }
        continue;
      }
      if (low[uv] == index[uv]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = false;
          comp[static_cast<std::size_t>(w)] = components;
        } while (w != v);
        ++components;
      }
      const int finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        const auto up = static_cast<std::size_t>(frames.back().first);
        low[up] = std::min(low[up], low[static_cast<std::size_t>(finished)]);
      }
    }
  }

  std::vector<bool> closed(static_cast<std::size_t>(components), true);
  for (int s = 0; s < n; ++s) {
    for (int e = chain.row_ptr[static_cast<std::size_t>(s)]; e < chain.row_ptr[static_cast<std::size_t>(s) + 1]; ++e) {
      if (chain.probability[static_cast<std::size_t>(e)] <= 0.0) continue;
      if (comp[static_cast<std::size_t>(chain.next[static_cast<std::size_t>(e)])] != comp[static_cast<std::size_t>(s)]) {
        closed[static_cast<std::size_t>(comp[static_cast<std::size_t>(s)])] = false;
      }
    }
  }
  std::vector<bool> out(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) out[static_cast<std::size_t>(s)] = closed[static_cast<std::size_t>(comp[static_cast<std::size_t>(s)])];
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kMassFloor = 1e-10;

std::vector<std::vector<int>> fibers(const DetailedModel& model, const Aggregation& agg) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(agg.size()));
  for (int s = 0; s < model.states(); ++s) out[static_cast<std::size_t>(model.agg_index[static_cast<std::size_t>(s)])].push_back(s);
  return out;
}

std::vector<double> uniform_fiber_average(const DetailedModel& model, const Aggregation& agg,
                                          const std::vector<double>& v) {
  std::vector<double> sum(static_cast<std::size_t>(agg.size()), 0.0), count(static_cast<std::size_t>(agg.size()), 0.0);
  for (int s = 0; s < model.states(); ++s) {
    const auto c = static_cast<std::size_t>(model.agg_index[static_cast<std::size_t>(s)]);
    sum[c] += v[static_cast<std::size_t>(s)];
    count[c] += 1.0;
  }
  for (std::size_t c = 0; c < sum.size(); ++c) sum[c] = count[c] > 0 ? sum[c] / count[c] : 0.0;
  return sum;
}

}  // namespace

InducedModel induced_model_exact(const DetailedModel& model, const Aggregation& agg, const Policy& policy,
                                 Kernel kernel) {
  policy.validate(agg);
  if (model.scheme != agg.scheme() || model.users != agg.users()) {
    throw Error(ErrorCode::SchemeMismatch, "detailed model was built for another aggregation");
  }
  const int m = agg.size();
  const Chain chain = policy_chain(model, policy);

  InducedModel out;
  out.stationary = limiting_distribution(chain, 0, kernel);
  const double total = std::accumulate(out.stationary.begin(), out.stationary.end(), 0.0);
  if (!(total > 0.5)) throw Error(ErrorCode::DegeneratePolicy, "no recurrent class reached from the empty matrix");

  const auto fiber = fibers(model, agg);
  out.mass.assign(static_cast<std::size_t>(m), 0.0);
  for (int s = 0; s < model.states(); ++s) {
    out.mass[static_cast<std::size_t>(model.agg_index[static_cast<std::size_t>(s)])] += out.stationary[static_cast<std::size_t>(s)];
  }
  out.weights.assign(static_cast<std::size_t>(model.states()), 0.0);
  out.uniform_fallback.assign(static_cast<std::size_t>(m), false);
  for (int c = 0; c < m; ++c) {
    const auto& members = fiber[static_cast<std::size_t>(c)];
    const double mass = out.mass[static_cast<std::size_t>(c)];
    const bool fallback = mass < kMassFloor;
    out.uniform_fallback[static_cast<std::size_t>(c)] = fallback;
    for (int s : members) {
      out.weights[static_cast<std::size_t>(s)] =
          fallback ? 1.0 / static_cast<double>(members.size()) : out.stationary[static_cast<std::size_t>(s)] / mass;
    }
  }

  out.mdp = TabularMdp(m);
  out.reward_hat.assign(static_cast<std::size_t>(m),
                        std::vector<std::vector<double>>(kActionSlots, std::vector<double>(static_cast<std::size_t>(m), 0.0)));
  std::vector<double> prob(static_cast<std::size_t>(m)), rmass(static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c) {
    if (fiber[static_cast<std::size_t>(c)].empty()) continue;
    for (Action a : agg.feasible_actions(agg.state(c))) {
      std::fill(prob.begin(), prob.end(), 0.0);
      std::fill(rmass.begin(), rmass.end(), 0.0);
      for (int s : fiber[static_cast<std::size_t>(c)]) {
        const double w = out.weights[static_cast<std::size_t>(s)];
        if (w == 0.0) continue;
        const std::size_t r = model.row(s, a);
        for (int e = model.row_ptr[r]; e < model.row_ptr[r + 1]; ++e) {
          const auto t = static_cast<std::size_t>(model.agg_index[static_cast<std::size_t>(model.next[static_cast<std::size_t>(e)])]);
          prob[t] += w * model.probability[static_cast<std::size_t>(e)];
          rmass[t] += w * model.reward_mass[static_cast<std::size_t>(e)];
        }
      }
      ActionModel& am = out.mdp.at(c, a);
      am.available = true;
      for (int t = 0; t < m; ++t) {
        const auto ut = static_cast<std::size_t>(t);
        if (prob[ut] <= 0.0) continue;
        am.next.push_back({t, prob[ut]});
        am.reward += rmass[ut];
        out.reward_hat[static_cast<std::size_t>(c)][static_cast<std::size_t>(label(a))][ut] = rmass[ut] / prob[ut];
      }
    }
  }
  return out;
}

double InducedValueReport::gain_gap() const { return std::abs(gain_detailed - gain_induced); }

InducedValueReport verify_induced_values(const DetailedModel& model, const Aggregation& agg, const Policy& policy, double gamma,
                         Kernel kernel) {
  const InducedModel induced = induced_model_exact(model, agg, policy, kernel);
  const Chain chain = policy_chain(model, policy);
  const std::vector<double> v = evaluate_discounted(chain, gamma, kernel, 1e-13);
  const int m = agg.size();

  InducedValueReport rep;
  rep.policy = policy;
  rep.gamma = gamma;
  rep.v_bar.assign(static_cast<std::size_t>(m), 0.0);
  for (int s = 0; s < model.states(); ++s) {
    rep.v_bar[static_cast<std::size_t>(model.agg_index[static_cast<std::size_t>(s)])] +=
        induced.weights[static_cast<std::size_t>(s)] * v[static_cast<std::size_t>(s)];
  }
  rep.v_hat = evaluate_policy(induced.mdp, policy.actions, gamma, 1e-13);
  for (int c = 0; c < m; ++c) {
    const double gap = std::abs(rep.v_hat[static_cast<std::size_t>(c)] - rep.v_bar[static_cast<std::size_t>(c)]);
    if (gap > rep.max_gap || rep.worst_state < 0) {
      rep.max_gap = gap;
      rep.worst_state = c;
    }
    if (!induced.uniform_fallback[static_cast<std::size_t>(c)]) rep.max_gap_recurrent = std::max(rep.max_gap_recurrent, gap);
    if (induced.uniform_fallback[static_cast<std::size_t>(c)]) rep.uniform_fallback_states.push_back(c);
  }

  // Lumpability over each fiber's weighted support.
  rep.lumpable = true;
  rep.lumpable_recurrent = true;
  const auto fiber = fibers(model, agg);
  std::vector<double> ref(static_cast<std::size_t>(m)), row(static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c) {
    bool first = true;
    bool same = true;
    double ref_reward = 0.0;
    for (int s : fiber[static_cast<std::size_t>(c)]) {
      if (induced.weights[static_cast<std::size_t>(s)] <= 1e-9) continue;
      std::fill(row.begin(), row.end(), 0.0);
      for (int e = chain.row_ptr[static_cast<std::size_t>(s)]; e < chain.row_ptr[static_cast<std::size_t>(s) + 1]; ++e) {
        row[static_cast<std::size_t>(model.agg_index[static_cast<std::size_t>(chain.next[static_cast<std::size_t>(e)])])] +=
            chain.probability[static_cast<std::size_t>(e)];
      }
      const double r = chain.reward[static_cast<std::size_t>(s)];
      if (first) {
        ref = row;
        ref_reward = r;
        first = false;
        continue;
      }
      same = std::abs(r - ref_reward) < 1e-10;
      for (int t = 0; t < m && same; ++t) same = std::abs(row[static_cast<std::size_t>(t)] - ref[static_cast<std::size_t>(t)]) < 1e-10;
      if (!same) break;
    }
    if (!same) {
      rep.lumpable = false;
      if (!induced.uniform_fallback[static_cast<std::size_t>(c)]) rep.lumpable_recurrent = false;
    }
  }

  double weighted_hat = 0.0;
  double weighted_bar = 0.0;
  for (int c = 0; c < m; ++c) weighted_hat += induced.mass[static_cast<std::size_t>(c)] * rep.v_hat[static_cast<std::size_t>(c)];
  for (int s = 0; s < model.states(); ++s) weighted_bar += induced.stationary[static_cast<std::size_t>(s)] * v[static_cast<std::size_t>(s)];
  rep.stationary_gap = std::abs(weighted_hat - weighted_bar);

  for (int s = 0; s < model.states(); ++s) {
    rep.gain_detailed += induced.stationary[static_cast<std::size_t>(s)] * chain.reward[static_cast<std::size_t>(s)];
  }
  rep.gain_induced = average_reward(induced.mdp, policy.actions, agg.empty_matrix_index());
  return rep;
}

// ---------------------------------------------------------------------------

int switch_count(const Policy& policy) {
  int n = 0;
  for (int i = 1; i < policy.size(); ++i) n += policy[i] != policy[i - 1] ? 1 : 0;
  return n;
}

bool is_threshold(const Policy& policy) {
  if (policy.scheme != Scheme::OneD) throw Error(ErrorCode::SchemeMismatch, "threshold shape is defined on OneD");
  bool clique = false;
  for (Action a : policy.actions) {
    if (a == Action::CliqueWithOldest) clique = true;
    else if (clique) return false;
  }
  return true;
}

namespace {

double chain_gain(const Chain& chain, Kernel kernel) {
  const auto dist = limiting_distribution(chain, 0, kernel);
  double g = 0.0;
  for (int s = 0; s < chain.states(); ++s) g += dist[static_cast<std::size_t>(s)] * chain.reward[static_cast<std::size_t>(s)];
  return g;
}

// Greedy improvement that keeps the incumbent action on ties.
std::vector<Action> improve(const TabularMdp& mdp, const std::vector<double>& v, double gamma,
                            const std::vector<Action>& incumbent) {
  std::vector<Action> out = incumbent;
  for (int s = 0; s < mdp.states(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    double current = best;
    Action arg = incumbent[static_cast<std::size_t>(s)];
    for (Action a : kAllActions) {
      const ActionModel& m = mdp.at(s, a);
      if (!m.available) continue;
      double q = 0.0;
      for (const auto& t : m.next) q += t.probability * v[static_cast<std::size_t>(t.next)];
      q = m.reward + gamma * q;
      if (a == incumbent[static_cast<std::size_t>(s)]) current = q;
      if (q > best) {
        best = q;
        arg = a;
      }
    }
    if (current < best - 1e-9 * std::max(1.0, std::abs(best))) out[static_cast<std::size_t>(s)] = arg;
  }
  return out;
}

OptimalResult policy_iteration(const DetailedModel& model, const Aggregation& agg, Criterion criterion, double gamma,
                               Kernel kernel) {
  OptimalResult res;
  res.value.criterion = criterion;
  res.value.gamma = gamma;
  Policy pi = semi_greedy_policy(agg);
  std::set<std::vector<Action>> seen;
  res.converged = false;
  for (res.iterations = 1; res.iterations <= 100; ++res.iterations) {
    seen.insert(pi.actions);
    const InducedModel induced = induced_model_exact(model, agg, pi, kernel);
    Policy next = pi;
    if (criterion == Criterion::Discounted) {
      const Solution sol = value_iteration(induced.mdp, gamma, 1e-11, 10000000, pi.actions);
      next.actions = improve(induced.mdp, sol.values, gamma, pi.actions);
      res.value.values = evaluate_policy(induced.mdp, next.actions, gamma, 1e-12);
    } else {
      const Solution sol = relative_value_iteration(induced.mdp, 1e-11, 10000000, pi.actions, agg.empty_matrix_index());
      next.actions = improve(induced.mdp, sol.values, 1.0, pi.actions);
      res.value.values = sol.values;
      res.value.gain = chain_gain(policy_chain(model, next), kernel);
    }
    if (next.actions == pi.actions) {
      res.converged = true;
      pi = next;
      break;
    }
    if (seen.count(next.actions)) {
      pi = next;
      break;
    }
    pi = next;
  }
  res.policy = pi;
  return res;
}

}  // namespace

OptimalResult exact_optimal(const DetailedModel& model, const Aggregation& agg, Criterion criterion, double gamma,
                            OptimizeMethod method, Kernel kernel) {
  if (criterion == Criterion::Discounted && !(gamma >= 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "gamma must lie in [0,1)");
  }
  if (method == OptimizeMethod::PolicyIteration) return policy_iteration(model, agg, criterion, gamma, kernel);

  OptimalResult res;
  res.value.criterion = criterion;
  res.value.gamma = gamma;
  const auto candidates = all_policies(agg);
  const int start = agg.empty_matrix_index();

  struct Scored {
    double primary;
    double secondary;
    std::vector<double> values;
  };
  std::vector<Scored> scores;
  for (const Policy& p : candidates) {
    const Chain chain = policy_chain(model, p);
    Scored sc{0.0, 0.0, {}};
    if (criterion == Criterion::AverageCost) {
      sc.primary = chain_gain(chain, kernel);
    } else {
      sc.values = uniform_fiber_average(model, agg, evaluate_discounted(chain, gamma, kernel, 1e-12));
      sc.primary = sc.values[static_cast<std::size_t>(start)];
      sc.secondary = std::accumulate(sc.values.begin(), sc.values.end(), 0.0);
    }
    res.table.push_back({p, sc.primary});
    scores.push_back(std::move(sc));
  }

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& sc : scores) best = std::max(best, sc.primary);
  const double tie = 1e-9 * std::max(1.0, std::abs(best));
  std::size_t chosen = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (scores[i].primary < best - tie) continue;
    res.optima.push_back(candidates[i]);
    if (chosen == candidates.size()) {
      chosen = i;
      continue;
    }
    const bool oned = agg.scheme() == Scheme::OneD;
    const int sw_i = oned ? switch_count(candidates[i]) : 0;
    const int sw_c = oned ? switch_count(candidates[chosen]) : 0;
    if (criterion == Criterion::Discounted && scores[i].secondary > scores[chosen].secondary + tie) {
      chosen = i;
    } else if ((criterion == Criterion::AverageCost ||
                std::abs(scores[i].secondary - scores[chosen].secondary) <= tie) &&
               sw_i < sw_c) {
      chosen = i;
    }
  }

  res.policy = candidates[chosen];
  if (criterion == Criterion::AverageCost) {
    res.value.gain = scores[chosen].primary;
    const InducedModel induced = induced_model_exact(model, agg, res.policy, kernel);
    TabularMdp fixed(agg.size());
    for (int c = 0; c < agg.size(); ++c) fixed.at(c, res.policy[c]) = induced.mdp.at(c, res.policy[c]);
    res.value.values = relative_value_iteration(fixed, 1e-11, 10000000, res.policy.actions, start).values;
  } else {
    res.value.values = scores[chosen].values;
  }
  res.iterations = static_cast<int>(candidates.size());
  return res;
}

// ---------------------------------------------------------------------------

MonotoneCheck monotone_along(const Aggregation& agg, const std::vector<double>& values, const std::string& axis,
                             const std::map<std::string, int>& fixed, bool nondecreasing, double slack) {
  const auto names = agg.component_names();
  auto position = [&](const std::string& name) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw Error(ErrorCode::InvalidArgument, "unknown component '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
  };
  const std::size_t ax = position(axis);
  std::vector<std::pair<std::size_t, int>> filters;
  for (const auto& [name, value] : fixed) filters.push_back({position(name), value});

  MonotoneCheck out;
  out.axis = axis;
  out.fixed = fixed;
  out.nondecreasing = nondecreasing;
  std::vector<std::pair<int, int>> picked;
  for (int i = 0; i < agg.size(); ++i) {
    const auto comps = agg.components(agg.state(i));
    bool match = true;
    for (const auto& [p, v] : filters) match = match && comps[p] == v;
    if (match) picked.push_back({comps[ax], i});
  }
  std::sort(picked.begin(), picked.end());
  for (const auto& [pos, idx] : picked) {
    out.states.push_back(idx);
    out.values.push_back(values.at(static_cast<std::size_t>(idx)));
  }
  for (std::size_t j = 1; j < out.values.size(); ++j) {
    const double against = nondecreasing ? out.values[j - 1] - out.values[j] : out.values[j] - out.values[j - 1];
    out.worst = std::max(out.worst, against);
    if (against > slack) ++out.violations;
  }
  return out;
}

namespace {

void slope_terms(const std::vector<double>& v, SlopeBoundReport& rep, bool& first) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    const double diff = v[k] - v[k - 1];
    rep.d = first ? diff : std::max(rep.d, diff);
    first = false;
    for (std::size_t i = 1; i <= k; ++i) {
      const double c = v[k] - v[k - i] + static_cast<double>(i);
      rep.c_min = std::min(rep.c_min, c);
    }
  }
}

}  // namespace

SlopeBoundReport verify_value_shape(const Aggregation& agg, const std::vector<double>& values, double slack) {
  if (static_cast<int>(values.size()) != agg.size()) throw Error(ErrorCode::InvalidArgument, "one value per state");
  SlopeBoundReport rep;
  rep.c_min = std::numeric_limits<double>::infinity();
  bool first = true;
  const auto names = agg.component_names();
  const std::string clique_axis = agg.scheme() == Scheme::AggI ? "C" : "L";

  // Every slice that fixes the non-clique components.
  std::set<std::map<std::string, int>> slices;
  for (const auto& s : agg.states()) {
    const auto comps = agg.components(s);
    std::map<std::string, int> key;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] != clique_axis) key[names[i]] = comps[i];
    }
    slices.insert(key);
  }
  for (const auto& key : slices) {
    rep.checks.push_back(monotone_along(agg, values, clique_axis, key, true, slack));
    slope_terms(rep.checks.back().values, rep, first);
  }
  if (agg.scheme() == Scheme::AggI) {
    std::set<std::map<std::string, int>> by_fc;
    for (const auto& s : agg.states()) by_fc.insert({{"F", s.oldest}, {"C", s.clique}});
    for (const auto& key : by_fc) rep.checks.push_back(monotone_along(agg, values, "E", key, false, slack));
  }
  for (const auto& c : rep.checks) rep.violations += c.violations;
  rep.monotone = rep.violations == 0;
  if (std::isinf(rep.c_min)) rep.c_min = 0.0;
  return rep;
}

}  // namespace ncsched
