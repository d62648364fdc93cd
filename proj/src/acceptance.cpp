#include "ncsched/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "ncsched/codec.hpp"

namespace ncsched {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double x, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

std::string sci(double x) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << x;
  return os.str();
}

CheckResult start(int id, const std::string& name, double budget) {
  CheckResult r;
  r.id = id;
  r.name = name;
  r.budget_seconds = budget;
  r.detail = Json::object();
  return r;
}

// Runtime budgets are part of every criterion.
void finish(CheckResult& r, Clock::time_point t0, bool ok) {
  r.seconds = since(t0);
  const bool in_time = r.budget_seconds <= 0.0 || r.seconds <= r.budget_seconds;
  if (!in_time) r.summary += "; over the " + num(r.budget_seconds) + " s budget";
  r.passed = ok && in_time;
  r.detail["seconds"] = r.seconds;
}

DetailedModel exact_model(const Aggregation& agg, double p) {
  return build_detailed_model(DetailedSpace(agg.users()), agg, std::vector<double>(static_cast<std::size_t>(agg.users()), p),
                              StorageRule::Accumulate, Kernel::Parallel);
}

}  // namespace

LearningSchedule LearnedSgCheck::default_schedule() {
  LearningSchedule s;
  s.phase_slots = 200000;
  s.min_phases = 20;
  s.stop_tol = 0.01;
  return s;
}

LearningSchedule TteOrderingCheck::default_schedule() { return LearnedSgCheck::default_schedule(); }

LearningSchedule ValueShapeCheck::default_schedule() { return LearnedSgCheck::default_schedule(); }

// ---------------------------------------------------------------------------

CheckResult check_uncoded(const UncodedCheck& c) {
  auto r = start(1, "uncoded baseline", 10.0);
  const auto t0 = Clock::now();
  const auto cfg = ChannelConfig::uniform(c.users, c.loss, 0, c.gamma, c.seed);
  const ControllerFactory factory = [] { return std::make_unique<BaselineController>(BaselineId::Uncoded); };
  const EvalResult thr = average_cost_eval(factory, cfg, cfg.empty_state(), c.slots, c.seeds);
  ChannelConfig dcfg = cfg;
  dcfg.seed = derive_seed(c.seed, 1);
  const EvalResult val = discounted_value_estimate(factory, dcfg, cfg.empty_state(), c.episodes, c.horizon, c.seeds);
  const double thr_ref = 1.0 - c.loss;
  const double val_ref = (1.0 - c.loss) / (1.0 - c.gamma);
  const bool ok = std::abs(thr.mean - thr_ref) <= c.throughput_tol && std::abs(val.mean - val_ref) <= c.value_tol;
  r.summary = "throughput " + num(thr.mean, 5) + " (target " + num(thr_ref) + " +- " + num(c.throughput_tol) +
              "), discounted " + num(val.mean, 5) + " (target " + num(val_ref) + " +- " + num(c.value_tol) + ")";
  r.detail["throughput"] = to_json(thr);
  r.detail["discounted"] = to_json(val);
  finish(r, t0, ok);
  return r;
}

CheckResult check_induced_values(const InducedValueCheck& c) {
  auto r = start(2, "induced-value identity (oracle)", 60.0);
  const auto t0 = Clock::now();
  const Aggregation agg(Scheme::NoTte, c.users);
  const DetailedModel model = exact_model(agg, c.loss);
  const int s0 = agg.empty_matrix_index();

  double exact_gap = 0.0;      // start-state gap over policies where the construction is exact
  double identity_gap = 0.0;   // stationary-weighted identity, every policy
  double gain_gap = 0.0;
  double worst_start = 0.0;
  int exact = 0;
  Json rows = Json::array();
  for (const Policy& p : all_policies(agg)) {
    const InducedValueReport rep = verify_induced_values(model, agg, p, c.gamma);
    const double start_gap = std::abs(rep.v_hat[static_cast<std::size_t>(s0)] - rep.v_bar[static_cast<std::size_t>(s0)]);
    worst_start = std::max(worst_start, start_gap);
    identity_gap = std::max(identity_gap, rep.stationary_gap);
    gain_gap = std::max(gain_gap, rep.gain_gap());
    if (rep.lumpable_recurrent) {
      ++exact;
      exact_gap = std::max(exact_gap, std::max(start_gap, rep.max_gap_recurrent));
    } else if (start_gap > c.tol || rep.max_gap_recurrent > c.tol) {
      r.findings.push_back("policy " + policy_string(p) + ": successor law not constant on recurrent fibers; |V_hat - V_bar| = " +
                           sci(start_gap) + " at the empty start, " + sci(rep.max_gap_recurrent) + " on recurrent classes (worst " +
                           (rep.worst_state >= 0 ? agg.describe(agg.state(rep.worst_state)) : std::string("-")) + ")");
    }
    Json row = to_json(rep, agg);
    row["start_gap"] = start_gap;
    rows.push_back(std::move(row));
  }
  const bool ok = exact > 0 && exact_gap <= c.tol && identity_gap <= c.tol && gain_gap <= c.tol;
  r.summary = "max start gap " + sci(worst_start) + " over " + std::to_string(rows.size()) + " policies; exact on " +
              std::to_string(exact) + " lumpable policies: " + sci(exact_gap) + "; stationary identity " + sci(identity_gap) +
              ", gain " + sci(gain_gap) + " (tol " + sci(c.tol) + "); " + std::to_string(r.findings.size()) + " findings";
  r.detail["policies"] = std::move(rows);
  finish(r, t0, ok);
  return r;
}

CheckResult check_learned_sg(const LearnedSgCheck& c) {
  auto r = start(3, "learned policy equals semi-greedy (no TTE)", 300.0 * static_cast<double>(c.losses.size()));
  const auto t0 = Clock::now();
  const Aggregation agg(Scheme::NoTte, c.users);
  const Policy sg = semi_greedy_policy(agg);
  bool ok = true;
  double slowest = 0.0;
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < c.losses.size(); ++i) {
    const auto t1 = Clock::now();
    const auto cfg = ChannelConfig::uniform(c.users, c.losses[i], 0, c.gamma, derive_seed(c.seed, i));
    const LearningResult lr = algorithm_a(cfg, agg, c.schedule);
    const auto diff = diff_policies(lr.policy, sg, agg);
    const double secs = since(t1);
    slowest = std::max(slowest, secs);
    ok = ok && diff.empty() && secs <= 300.0;
    std::string d = "p=" + num(c.losses[i]) + ": " + std::to_string(diff.size()) + " disagreements";
    Json jd = Json::array();
    for (const auto& x : diff) {
      d += " " + x.description + "->" + std::to_string(label(x.a));
      jd.push_back({{"state", x.description}, {"learned", label(x.a)}, {"semi_greedy", label(x.b)}});
    }
    parts.push_back(d);
    r.detail["runs"].push_back({{"loss", c.losses[i]},
                                {"policy", policy_string(lr.policy)},
                                {"disagreements", jd},
                                {"phases", lr.history.size()},
                                {"stop_rule", to_string(lr.stop_rule)},
                                {"slots", lr.slots},
                                {"seconds", secs}});
  }
  for (std::size_t i = 0; i < parts.size(); ++i) r.summary += (i ? "; " : "") + parts[i];
  r.summary += "; slowest " + num(slowest, 3) + " s";
  finish(r, t0, ok);
  return r;
}

CheckResult check_threshold(const ThresholdCheck& c) {
  auto r = start(4, "OneD average-cost optimum is a threshold", 60.0);
  const auto t0 = Clock::now();
  bool ok = true;
  int cases = 0;
  int unreachable_ties = 0;
  for (int k : c.users) {
    const Aggregation agg(Scheme::OneD, k);
    for (double p : c.losses) {
      const DetailedModel model = exact_model(agg, p);
      const OptimalResult opt = exact_optimal(model, agg, Criterion::AverageCost, 0.0);
      // A tied optimum may differ from the selected one only where the empty start never leads.
      const auto reach = [&](const Policy& p) { return reachable_states(policy_chain(model, p), 0); };
      bool all_threshold = is_threshold(opt.policy);
      Json optima = Json::array();
      for (const Policy& o : opt.optima) {
        bool same_play = true;
        if (!is_threshold(o)) {
          const auto seen = reach(o);
          for (int s = 0; s < model.states(); ++s) {
            const int c = model.agg_index[static_cast<std::size_t>(s)];
            if (seen[static_cast<std::size_t>(s)] && o[c] != opt.policy[c]) same_play = false;
          }
          if (same_play) ++unreachable_ties;
        }
        all_threshold = all_threshold && (is_threshold(o) || same_play);
        optima.push_back({{"policy", policy_string(o)}, {"threshold", is_threshold(o)}, {"same_play_from_empty", same_play}});
      }
      ok = ok && all_threshold;
      ++cases;
      r.detail["cases"].push_back({{"users", k}, {"loss", p}, {"optimum", policy_string(opt.policy)},
                                   {"optima", optima}, {"gain", opt.value.gain}, {"threshold", all_threshold}});
      if (!all_threshold) r.findings.push_back("K=" + std::to_string(k) + " p=" + num(p) + ": non-threshold optimum");
    }
  }
  r.summary = std::to_string(cases) + " cases, " + (ok ? "selected optimum single-switch" : "non-threshold optimum found") +
              "; " + std::to_string(unreachable_ties) + " tied non-threshold optima act identically from the empty start";
  finish(r, t0, ok);
  return r;
}

CheckResult check_binomial(const BinomialCheck& c) {
  auto r = start(5, "binomial clique-transmission law", 10.0);
  const auto t0 = Clock::now();
  const int k = c.users;
  const Aggregation agg(Scheme::NoTte, k);
  DetailedState full = DetailedState::binary(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i != j) full.set(i, j, 1);
    }
  }
  std::vector<double> target(static_cast<std::size_t>(k) + 1);
  for (int i = 0; i <= k; ++i) {
    target[static_cast<std::size_t>(i)] = std::tgamma(k + 1.0) / (std::tgamma(i + 1.0) * std::tgamma(k - i + 1.0)) *
                                          std::pow(c.loss, i) * std::pow(1.0 - c.loss, k - i);
  }

  // Failed members keep their rows; everyone else decodes.
  std::vector<double> exact(target.size(), 0.0);
  const std::vector<double> loss(static_cast<std::size_t>(k), c.loss);
  for (const auto& o : exact_transition(agg, full, Action::CliqueWithOldest, loss)) {
    exact[static_cast<std::size_t>(k - empty_lines(o.next))] += o.probability;
  }
  Simulator sim(ChannelConfig::uniform(k, c.loss, 0, 0.99, c.seed));
  std::vector<double> freq(target.size(), 0.0);
  for (long long n = 0; n < c.samples; ++n) {
    const UserSet combo = realize_action(agg, full, Action::CliqueWithOldest, sim.rng());
    const StepResult step = sim.step(full, combo);
    freq[static_cast<std::size_t>(k - empty_lines(step.outcome.next_state))] += 1.0;
  }
  double tv = 0.0;
  double exact_err = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    freq[i] /= static_cast<double>(c.samples);
    tv += 0.5 * std::abs(freq[i] - target[i]);
    exact_err = std::max(exact_err, std::abs(exact[i] - target[i]));
  }
  const bool ok = tv <= c.tv_tol && exact_err <= c.exact_tol;
  r.summary = "TV " + sci(tv) + " (tol " + num(c.tv_tol) + "), exact law error " + sci(exact_err) + " (tol " +
              sci(c.exact_tol) + ")";
  r.detail["target"] = target;
  r.detail["empirical"] = freq;
  r.detail["exact"] = exact;
  finish(r, t0, ok);
  return r;
}

CheckResult check_tte_ordering(const TteOrderingCheck& c) {
  auto r = start(6, "TTE policy ordering", 1200.0);
  const auto t0 = Clock::now();
  const Aggregation agg(Scheme::AggII, c.users, c.lifetime);
  bool ok = true;
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < c.losses.size(); ++i) {
    const double p = c.losses[i];
    ChannelConfig cfg = ChannelConfig::uniform(c.users, p, c.lifetime, c.gamma, derive_seed(c.seed, 2 * i));
    const LearningResult lr = algorithm_a(cfg, agg, c.schedule);
    // Common random numbers across the compared policies.
    cfg.seed = derive_seed(c.seed, 2 * i + 1);
    const Policy learned = lr.policy;
    auto eval = [&](const ControllerFactory& f) { return average_cost_eval(f, cfg, cfg.empty_state(), c.slots, c.seeds); };
    const EvalResult t_learn = eval([&] { return std::make_unique<PolicyController>(agg, learned); });
    const EvalResult t_msg = eval([] { return std::make_unique<BaselineController>(BaselineId::ModifiedSemiGreedy); });
    const EvalResult t_sg = eval([] { return std::make_unique<BaselineController>(BaselineId::SemiGreedy); });
    const EvalResult t_unc = eval([] { return std::make_unique<BaselineController>(BaselineId::Uncoded); });

    const bool a = t_learn.mean >= t_msg.mean - c.learned_slack;
    const bool b = p < c.msg_margin_from || t_msg.mean > t_unc.mean + c.msg_margin;
    const bool d = c.users < c.lifetime || std::abs(t_sg.mean - t_unc.mean) <= c.sg_band;
    ok = ok && a && b && d;
    parts.push_back("p=" + num(p) + ": learned " + num(t_learn.mean, 4) + " msg " + num(t_msg.mean, 4) + " sg " +
                    num(t_sg.mean, 4) + " uncoded " + num(t_unc.mean, 4) + (a && b && d ? "" : " [violated]"));
    r.detail["points"].push_back({{"loss", p},
                                  {"learned_policy", policy_string(learned)},
                                  {"learned", to_json(t_learn)},
                                  {"msg", to_json(t_msg)},
                                  {"sg", to_json(t_sg)},
                                  {"uncoded", to_json(t_unc)},
                                  {"learned_ge_msg", a},
                                  {"msg_gt_uncoded", b},
                                  {"sg_near_uncoded", d}});
  }
  for (std::size_t i = 0; i < parts.size(); ++i) r.summary += (i ? "; " : "") + parts[i];
  finish(r, t0, ok);
  return r;
}

CheckResult check_value_shape(const ValueShapeCheck& c, bool learned) {
  auto r = start(7, "value-function shape", 600.0);
  const auto t0 = Clock::now();
  bool ok = true;
  if (learned) {
    const Aggregation agg(Scheme::AggI, c.users, c.lifetime);
    const auto cfg = ChannelConfig::uniform(c.users, c.loss, c.lifetime, c.gamma, c.seed);
    const LearningResult lr = algorithm_a(cfg, agg, c.schedule);
    const double slack = c.schedule.stop_tol;
    std::vector<MonotoneCheck> checks;
    for (int e : {0, 1}) checks.push_back(monotone_along(agg, lr.value.values, "C", {{"F", 2}, {"E", e}}, true, slack));
    checks.push_back(monotone_along(agg, lr.value.values, "E", {{"F", 2}, {"C", 2}}, false, slack));
    int violations = 0;
    for (const auto& m : checks) {
      violations += m.violations;
      if (m.states.size() < 2) {
        ok = false;
        r.findings.push_back("slice along " + m.axis + " has fewer than two states");
      }
      r.detail["learned"].push_back(to_json(m));
    }
    ok = ok && violations == 0;
    r.summary = "learned AggI: " + std::to_string(violations) + " violations beyond slack " + num(slack) + " in " +
                std::to_string(checks.size()) + " slices";
  }
  int exact_violations = 0;
  const Aggregation oned(Scheme::OneD, c.exact_users);
  for (double p : c.exact_losses) {
    const DetailedModel model = exact_model(oned, p);
    const OptimalResult opt = exact_optimal(model, oned, Criterion::Discounted, c.gamma);
    const MonotoneCheck m = monotone_along(oned, opt.value.values, "L", {}, true, 0.0);
    exact_violations += m.violations;
    Json jm = to_json(m);
    jm["loss"] = p;
    jm["policy"] = policy_string(opt.policy);
    r.detail["exact"].push_back(std::move(jm));
  }
  ok = ok && exact_violations == 0;
  r.summary += std::string(learned ? "; " : "") + "exact OneD K=" + std::to_string(c.exact_users) + ": " +
               std::to_string(exact_violations) + " violations";
  finish(r, t0, ok);
  return r;
}

CheckResult check_transience(const TransienceCheck& c) {
  auto r = start(8, "states above the smallest clique size are transient", 60.0);
  const auto t0 = Clock::now();
  const Aggregation agg(Scheme::OneD, c.users);
  bool ok = true;
  int policies = 0;
  int offending = 0;
  int reachable_offending = 0;
  for (double p : c.losses) {
    const DetailedModel model = exact_model(agg, p);
    for (const Policy& pol : all_policies(agg)) {
      int m = c.users + 1;
      for (int s = 0; s < agg.size(); ++s) {
        if (pol[s] == Action::CliqueWithOldest) m = std::min(m, agg.state(s).clique);
      }
      const Chain chain = policy_chain(model, pol);
      const auto recurrent = recurrent_states(chain);
      const auto seen = reachable_states(chain, 0);
      int bad = 0;
      int bad_reachable = 0;
      for (int s = 0; s < model.states(); ++s) {
        const int l = agg.state(model.agg_index[static_cast<std::size_t>(s)]).clique;
        if (l > m && recurrent[static_cast<std::size_t>(s)]) {
          ++bad;
          if (seen[static_cast<std::size_t>(s)]) ++bad_reachable;
        }
      }
      reachable_offending += bad_reachable > 0 ? 1 : 0;
      r.detail["policies"].push_back({{"loss", p}, {"policy", policy_string(pol)}, {"m", m},
                                      {"recurrent_above_m", bad}, {"reachable_recurrent_above_m", bad_reachable}});
      ++policies;
      if (bad > 0) {
        ok = false;
        ++offending;
        r.findings.push_back("p=" + num(p) + " policy " + policy_string(pol) + ": " + std::to_string(bad) +
                             " recurrent states with L > " + std::to_string(m) + " (" + std::to_string(bad_reachable) +
                             " reachable from the empty matrix); e-lines outside an unserved clique form a closed class");
      }
    }
  }
  r.summary = std::to_string(policies) + " policy/loss pairs at K=" + std::to_string(c.users) + ", " +
              std::to_string(offending) + " with a recurrent state above m (" + std::to_string(reachable_offending) +
              " when restricted to states reachable from the empty matrix)";
  finish(r, t0, ok);
  return r;
}

CheckResult check_codec(const CodecCheck& c) {
  auto r = start(9, "XOR codec round trip", 0.0);
  const auto t0 = Clock::now();
  Rng rng(c.seed);
  std::uniform_int_distribution<int> count(1, 8), length(0, 96), byte(0, 255), bit(0, 1);
  long long recovered = 0;
  long long failures = 0;
  for (int n = 0; n < c.cases; ++n) {
    std::vector<Packet> packets(static_cast<std::size_t>(count(rng)));
    std::vector<std::uint8_t> coef(packets.size());
    for (std::size_t i = 0; i < packets.size(); ++i) {
      packets[i].owner = static_cast<int>(i);
      packets[i].payload.resize(static_cast<std::size_t>(length(rng)));
      for (auto& b : packets[i].payload) b = static_cast<std::uint8_t>(byte(rng));
      coef[i] = static_cast<std::uint8_t>(bit(rng));
    }
    coef[static_cast<std::size_t>(n) % packets.size()] = 1;
    const auto coded = xor_combine(packets, coef);
    for (std::size_t i = 0; i < packets.size(); ++i) {
      if (!coef[i]) continue;
      std::vector<Packet> known;
      for (std::size_t j = 0; j < packets.size(); ++j) {
        if (j != i && coef[j]) known.push_back(packets[j]);
      }
      ++recovered;
      if (recover(coded, known, packets[i].payload.size()) != packets[i].payload) ++failures;
    }
  }
  r.summary = std::to_string(c.cases) + " combinations, " + std::to_string(recovered) + " recoveries, " +
              std::to_string(failures) + " mismatches";
  r.detail["cases"] = c.cases;
  r.detail["failures"] = failures;
  finish(r, t0, failures == 0 && c.cases >= 1000);
  return r;
}

std::vector<CheckResult> run_acceptance(const std::vector<int>& ids) {
  std::vector<CheckResult> out;
  for (int id : ids) {
    switch (id) {
      case 1: out.push_back(check_uncoded()); break;
      case 2: out.push_back(check_induced_values()); break;
      case 3: out.push_back(check_learned_sg()); break;
      case 4: out.push_back(check_threshold()); break;
      case 5: out.push_back(check_binomial()); break;
      case 6: out.push_back(check_tte_ordering()); break;
      case 7: out.push_back(check_value_shape()); break;
      case 8: out.push_back(check_transience()); break;
      case 9: out.push_back(check_codec()); break;
      default: throw Error(ErrorCode::InvalidArgument, "criterion ids run from 1 to 9");
    }
  }
  return out;
}

std::string format_line(const CheckResult& r) {
  return std::string(r.passed ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " + r.name + ": " + r.summary + " (" +
         num(r.seconds, 3) + " s)";
}

Json to_json(const CheckResult& r) {
  return {{"id", r.id},           {"name", r.name},         {"passed", r.passed},
          {"summary", r.summary}, {"findings", r.findings}, {"seconds", r.seconds},
          {"budget_seconds", r.budget_seconds}, {"detail", r.detail}};
}

}  // namespace ncsched
