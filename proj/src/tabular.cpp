#include "ncsched/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ncsched {

TabularMdp::TabularMdp(int states) : states_(states) {
  if (states < 1) throw Error(ErrorCode::InvalidArgument, "MDP needs at least one state");
  rows_.resize(static_cast<std::size_t>(states) * kActionSlots);
}

std::size_t TabularMdp::slot(int s, Action a) const {
  if (s < 0 || s >= states_) throw Error(ErrorCode::InvalidArgument, "state index out of range");
  return static_cast<std::size_t>(s) * kActionSlots + static_cast<std::size_t>(label(a));
}

bool TabularMdp::has_data(int s) const {
  for (Action a : kAllActions) {
    if (at(s, a).available) return true;
  }
  return false;
}

namespace {

double q_value(const ActionModel& m, const std::vector<double>& v, double gamma) {
  double acc = 0.0;
  for (const auto& t : m.next) acc += t.probability * v[static_cast<std::size_t>(t.next)];
  return m.reward + gamma * acc;
}

// Greedy backup of one state; returns the value and writes the argmax.
double backup(const TabularMdp& mdp, int s, const std::vector<double>& v, double gamma, Action fallback,
              Action& chosen) {
  double best = -std::numeric_limits<double>::infinity();
  chosen = fallback;
  for (Action a : kAllActions) {
    const ActionModel& m = mdp.at(s, a);
    if (!m.available) continue;
    const double q = q_value(m, v, gamma);
    if (std::isinf(best) || q > best + 1e-12 * std::max(1.0, std::abs(best))) {
      best = q;
      chosen = a;
    }
  }
  return std::isinf(best) ? 0.0 : best;
}

void check_fallback(const TabularMdp& mdp, const std::vector<Action>& fallback) {
  if (static_cast<int>(fallback.size()) != mdp.states()) {
    throw Error(ErrorCode::InvalidArgument, "fallback policy size differs from the state count");
  }
}

}  // namespace

Solution value_iteration(const TabularMdp& mdp, double gamma, double tol, int max_iterations,
                         const std::vector<Action>& fallback) {
  check_fallback(mdp, fallback);
  bool any = false;
  for (int s = 0; s < mdp.states() && !any; ++s) any = mdp.has_data(s);
  if (!any) throw Error(ErrorCode::NoData, "the model has no visited state-action pair");

  const auto n = static_cast<std::size_t>(mdp.states());
  Solution sol;
  sol.values.assign(n, 0.0);
  sol.actions = fallback;
  std::vector<double> next(n, 0.0);
  for (sol.iterations = 0; sol.iterations < max_iterations;) {
    double delta = 0.0;
    for (int s = 0; s < mdp.states(); ++s) {
      Action a;
      next[static_cast<std::size_t>(s)] = backup(mdp, s, sol.values, gamma, fallback[static_cast<std::size_t>(s)], a);
      delta = std::max(delta, std::abs(next[static_cast<std::size_t>(s)] - sol.values[static_cast<std::size_t>(s)]));
    }
    sol.values.swap(next);
    ++sol.iterations;
    sol.residuals.push_back(delta);
    if (delta < tol) {
      sol.converged = true;
      break;
    }
  }
  for (int s = 0; s < mdp.states(); ++s) {
    backup(mdp, s, sol.values, gamma, fallback[static_cast<std::size_t>(s)], sol.actions[static_cast<std::size_t>(s)]);
  }
  return sol;
}

Solution relative_value_iteration(const TabularMdp& mdp, double tol, int max_iterations,
                                  const std::vector<Action>& fallback, int reference) {
  check_fallback(mdp, fallback);
  const auto n = static_cast<std::size_t>(mdp.states());
  Solution sol;
  sol.values.assign(n, 0.0);
  sol.actions = fallback;
  std::vector<double> next(n, 0.0);

  // Lazy operator: T h = max_a [ r/2 + (h + P h)/2 ].
  auto lazy_backup = [&](int s, const std::vector<double>& h, Action& chosen) {
    double best = -std::numeric_limits<double>::infinity();
    chosen = fallback[static_cast<std::size_t>(s)];
    for (Action a : kAllActions) {
      const ActionModel& m = mdp.at(s, a);
      if (!m.available) continue;
      const double q = 0.5 * (m.reward + h[static_cast<std::size_t>(s)] + q_value(ActionModel{true, 0.0, m.next}, h, 1.0));
      if (std::isinf(best) || q > best + 1e-12 * std::max(1.0, std::abs(best))) {
        best = q;
        chosen = a;
      }
    }
    return std::isinf(best) ? 0.5 * h[static_cast<std::size_t>(s)] : best;
  };

  double span = std::numeric_limits<double>::infinity();
  for (sol.iterations = 0; sol.iterations < max_iterations;) {
    Action unused;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int s = 0; s < mdp.states(); ++s) {
      next[static_cast<std::size_t>(s)] = lazy_backup(s, sol.values, unused);
      const double d = next[static_cast<std::size_t>(s)] - sol.values[static_cast<std::size_t>(s)];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    const double offset = next[static_cast<std::size_t>(reference)];
    for (auto& x : next) x -= offset;
    sol.values.swap(next);
    ++sol.iterations;
    span = hi - lo;
    sol.residuals.push_back(span);
    sol.gain = 2.0 * 0.5 * (hi + lo);
    if (span < tol) {
      sol.converged = true;
      break;
    }
  }
  for (int s = 0; s < mdp.states(); ++s) lazy_backup(s, sol.values, sol.actions[static_cast<std::size_t>(s)]);
  return sol;
}

std::vector<double> evaluate_policy(const TabularMdp& mdp, const std::vector<Action>& actions, double gamma,
                                    double tol, int max_iterations) {
  check_fallback(mdp, actions);
  const auto n = static_cast<std::size_t>(mdp.states());
  std::vector<double> v(n, 0.0), next(n, 0.0);
  for (int it = 0; it < max_iterations; ++it) {
    double delta = 0.0;
    for (int s = 0; s < mdp.states(); ++s) {
      const ActionModel& m = mdp.at(s, actions[static_cast<std::size_t>(s)]);
      next[static_cast<std::size_t>(s)] = m.available ? q_value(m, v, gamma) : 0.0;
      delta = std::max(delta, std::abs(next[static_cast<std::size_t>(s)] - v[static_cast<std::size_t>(s)]));
    }
    v.swap(next);
    if (delta * gamma < tol * (1.0 - gamma) || delta == 0.0) break;
  }
  return v;
}

std::vector<double> limiting_distribution(const TabularMdp& mdp, const std::vector<Action>& actions, int start,
                                          double tol, int max_iterations) {
  check_fallback(mdp, actions);
  const auto n = static_cast<std::size_t>(mdp.states());
  std::vector<double> x(n, 0.0), next(n, 0.0);
  x.at(static_cast<std::size_t>(start)) = 1.0;
  for (int it = 0; it < max_iterations; ++it) {
    for (std::size_t s = 0; s < n; ++s) next[s] = 0.5 * x[s];
    for (int s = 0; s < mdp.states(); ++s) {
      const double mass = x[static_cast<std::size_t>(s)];
      if (mass == 0.0) continue;
      const ActionModel& m = mdp.at(s, actions[static_cast<std::size_t>(s)]);
      if (!m.available) {
        next[static_cast<std::size_t>(s)] += 0.5 * mass;
        continue;
      }
      for (const auto& t : m.next) next[static_cast<std::size_t>(t.next)] += 0.5 * mass * t.probability;
    }
    double delta = 0.0;
    for (std::size_t s = 0; s < n; ++s) delta += std::abs(next[s] - x[s]);
    x.swap(next);
    if (delta < tol) break;
  }
  return x;
}

double average_reward(const TabularMdp& mdp, const std::vector<Action>& actions, int start) {
  const auto pi = limiting_distribution(mdp, actions, start);
  double g = 0.0;
  for (int s = 0; s < mdp.states(); ++s) {
    const ActionModel& m = mdp.at(s, actions[static_cast<std::size_t>(s)]);
    if (m.available) g += pi[static_cast<std::size_t>(s)] * m.reward;
  }
  return g;
}

}  // namespace ncsched
