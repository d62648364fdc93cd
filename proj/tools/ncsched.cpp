#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ncsched/acceptance.hpp"
#include "ncsched/harness.hpp"

using namespace ncsched;

namespace {

struct Flags {
  std::string config;
  std::optional<int> users;
  std::string loss;
  std::optional<int> tte;
  std::optional<double> gamma;
  std::string scheme;
  std::vector<std::string> policy;
  std::optional<long long> slots;
  std::optional<int> seeds;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> episodes;
  std::optional<long long> phase_slots;
  std::optional<int> min_phases;
  std::optional<int> max_phases;
  std::optional<double> stop_tol;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON experiment config; flags override its fields")->check(CLI::ExistingFile);
  app->add_option("--users", f.users, "number of users K");
  app->add_option("--loss", f.loss, "loss probability, or a comma list sweeping uniform losses");
  app->add_option("--tte", f.tte, "packet lifetime T (0 = no TTE)");
  app->add_option("--gamma", f.gamma, "discount factor");
  app->add_option("--scheme", f.scheme, "notte|agg1|agg2|oned");
  app->add_option("--policy", f.policy, "learn | uncoded|greedy|sg|msg|random | rule:<name> | file:<csv>")
      ->delimiter(',');
  app->add_option("--slots", f.slots, "evaluation slots per seed");
  app->add_option("--seeds", f.seeds, "independent evaluation seeds");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--episodes", f.episodes, "episodes for the discounted-return estimate (0 = off)");
  app->add_option("--phase-slots", f.phase_slots, "learning slots per phase");
  app->add_option("--min-phases", f.min_phases, "learning phases before a stop rule may fire");
  app->add_option("--max-phases", f.max_phases, "learning phase cap");
  app->add_option("--stop-tol", f.stop_tol, "sup-norm value change that stops learning");
}

Json loss_json(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      values.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "loss: cannot read '" + cell + "'");
    }
  }
  if (values.size() == 1) return values.front();
  return values;
}

Json overlay(const Flags& f, const std::vector<std::string>& default_policies) {
  Json j = Json::object();
  if (!f.config.empty()) {
    std::ifstream is(f.config);
    try {
      j = Json::parse(is);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, "config: " + std::string(e.what()));
    }
  }
  if (f.users) j["users"] = *f.users;
  if (!f.loss.empty()) {
    j["loss"] = loss_json(f.loss);
    j.erase("loss_preset");
  }
  if (f.tte) j["tte"] = *f.tte;
  if (f.gamma) j["gamma"] = *f.gamma;
  if (!f.scheme.empty()) j["scheme"] = f.scheme;
  if (!f.policy.empty()) {
    j["policies"] = f.policy;
  } else if (!j.contains("policies")) {
    j["policies"] = default_policies;
  }
  if (f.seed) j["seed"] = *f.seed;
  if (!f.out.empty()) j["out"] = f.out;
  if (f.slots) j["evaluation"]["slots"] = *f.slots;
  if (f.seeds) j["evaluation"]["seeds"] = *f.seeds;
  if (f.episodes) j["evaluation"]["episodes"] = *f.episodes;
  if (f.phase_slots) j["schedule"]["phase_slots"] = *f.phase_slots;
  if (f.min_phases) j["schedule"]["min_phases"] = *f.min_phases;
  if (f.max_phases) j["schedule"]["max_phases"] = *f.max_phases;
  if (f.stop_tol) j["schedule"]["stop_tol"] = *f.stop_tol;
  return j;
}

void print_report(const Report& report) {
  const auto sweep = report.config.sweep();
  std::printf("%-16s", "policy");
  for (std::size_t i = 0; i < sweep.size(); ++i) std::printf("  point %-10zu", i);
  std::printf("\n");
  for (const auto& src : report.config.policies) {
    std::printf("%-16s", src.label().c_str());
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      const PointResult* r = report.find(src.label(), i);
      std::printf("  %.4f+-%.4f", r ? r->throughput.mean : 0.0, r ? r->throughput.std_error : 0.0);
    }
    std::printf("\n");
  }
  for (const auto& r : report.results) {
    if (r.policy == "learn") {
      std::printf("learned point %zu: %s (%d phases, %lld slots, stop=%s)\n", r.point, policy_string(*r.table).c_str(),
                  r.phases, r.learn_slots, r.stop_rule.c_str());
    }
  }
  std::printf("wrote %s\n", report.config.out_dir.string().c_str());
}

int run(const Flags& f, const std::vector<std::string>& default_policies) {
  const ExperimentConfig cfg = ExperimentConfig::from_json(overlay(f, default_policies));
  print_report(run_experiment(cfg));
  return 0;
}

Policy resolve(const std::string& spec, const Aggregation& agg) {
  if (spec.rfind("file:", 0) == 0) return read_policy_csv(spec.substr(5), agg);
  if (spec.rfind("rule:", 0) == 0) return named_policy(agg, spec.substr(5));
  return named_policy(agg, spec);
}

std::vector<double> losses_of(const Flags& f, std::vector<double> fallback) {
  if (f.loss.empty()) return fallback;
  const Json j = loss_json(f.loss);
  if (j.is_number()) return {j.get<double>()};
  return j.get<std::vector<double>>();
}

int run_oracle(const Flags& f, const std::vector<int>& ids) {
  std::vector<CheckResult> results;
  for (int id : ids) {
    switch (id) {
      case 2: {
        InducedValueCheck c;
        if (f.users) c.users = *f.users;
        if (f.gamma) c.gamma = *f.gamma;
        c.loss = losses_of(f, {c.loss}).front();
        results.push_back(check_induced_values(c));
        break;
      }
      case 4: {
        ThresholdCheck c;
        if (f.users) c.users = {*f.users};
        c.losses = losses_of(f, c.losses);
        results.push_back(check_threshold(c));
        break;
      }
      case 5: {
        BinomialCheck c;
        if (f.users) c.users = *f.users;
        c.loss = losses_of(f, {c.loss}).front();
        if (f.seed) c.seed = *f.seed;
        results.push_back(check_binomial(c));
        break;
      }
      case 7: {
        ValueShapeCheck c;
        if (f.users) c.exact_users = *f.users;
        if (f.gamma) c.gamma = *f.gamma;
        c.exact_losses = losses_of(f, c.exact_losses);
        results.push_back(check_value_shape(c, false));
        break;
      }
      case 8: {
        TransienceCheck c;
        if (f.users) c.users = *f.users;
        c.losses = losses_of(f, c.losses);
        results.push_back(check_transience(c));
        break;
      }
      default:
        throw Error(ErrorCode::InvalidArgument, "oracle checks are 2, 4, 5, 7 and 8");
    }
  }
  bool ok = true;
  Json out = Json::array();
  for (const auto& r : results) {
    std::printf("%s\n", format_line(r).c_str());
    for (const auto& finding : r.findings) std::printf("    finding: %s\n", finding.c_str());
    ok = ok && r.passed;
    out.push_back(to_json(r));
  }
  if (!f.out.empty()) {
    std::filesystem::create_directories(f.out);
    std::ofstream(std::filesystem::path(f.out) / "oracle.json") << out.dump(2) << '\n';
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network-coded broadcast scheduling: learning, baselines and exact oracle"};
  app.require_subcommand(1);

  Flags learn_f, eval_f, compare_f, oracle_f, diff_f;
  auto* learn = app.add_subcommand("learn", "learn a policy per loss value and evaluate it");
  add_common(learn, learn_f);
  auto* eval = app.add_subcommand("eval", "evaluate one or more fixed policies");
  add_common(eval, eval_f);
  auto* compare = app.add_subcommand("compare", "throughput comparison of several policies across losses");
  add_common(compare, compare_f);

  auto* oracle = app.add_subcommand("oracle", "exact-oracle acceptance checks; nonzero exit on failure");
  add_common(oracle, oracle_f);
  std::vector<int> checks{2, 4, 5, 7, 8};
  oracle->add_option("--checks", checks, "criteria to run (2,4,5,7,8)")->delimiter(',');

  auto* diff = app.add_subcommand("diff", "states where two aggregated policies disagree");
  add_common(diff, diff_f);
  std::string pa, pb;
  diff->add_option("a", pa, "policy: sg|msg|greedy|threshold:<m>|file:<csv>")->required();
  diff->add_option("b", pb, "policy: sg|msg|greedy|threshold:<m>|file:<csv>")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (learn->parsed()) {
      if (!learn_f.policy.empty()) throw Error(ErrorCode::InvalidArgument, "policy: learn takes no --policy");
      return run(learn_f, {"learn"});
    }
    if (eval->parsed()) {
      if (eval_f.policy.empty() && eval_f.config.empty()) throw Error(ErrorCode::InvalidArgument, "policy: is required");
      return run(eval_f, {});
    }
    if (compare->parsed()) return run(compare_f, {"learn", "sg", "greedy", "uncoded"});
    if (oracle->parsed()) return run_oracle(oracle_f, checks);
    if (diff->parsed()) {
      const Scheme scheme = parse_scheme(diff_f.scheme.empty() ? "notte" : diff_f.scheme);
      const Aggregation agg(scheme, diff_f.users.value_or(5), diff_f.tte.value_or(uses_tte(scheme) ? 5 : 0));
      const auto d = diff_policies(resolve(pa, agg), resolve(pb, agg), agg);
      std::printf("%zu disagreeing states\n", d.size());
      for (const auto& x : d) std::printf("  %d %s: %d vs %d\n", x.state, x.description.c_str(), label(x.a), label(x.b));
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
