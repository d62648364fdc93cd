#include "ncsched/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

namespace ncsched {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, field + ": " + what);
}

template <typename T>
T read_field(const Json& j, const std::string& key, const std::string& prefix, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    field_error(prefix + key, "wrong type (" + std::string(j.at(key).type_name()) + ")");
  }
}

std::string message_of(const Error& e) {
  const std::string w = e.what();
  const auto p = w.find(": ");
  return p == std::string::npos ? w : w.substr(p + 2);
}

std::string fmt(double x, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

const char* to_string(StorageRule rule) { return rule == StorageRule::Accumulate ? "accumulate" : "literal"; }

StorageRule parse_storage(const std::string& s) {
  if (s == "accumulate") return StorageRule::Accumulate;
  if (s == "literal") return StorageRule::Literal;
  field_error("storage", "expected accumulate|literal, got '" + s + "'");
}

bool uniform_loss(const std::vector<double>& loss) {
  return std::all_of(loss.begin(), loss.end(), [&](double p) { return p == loss.front(); });
}

std::string point_label(const std::vector<double>& loss, std::size_t index) {
  if (uniform_loss(loss)) return "p=" + fmt(loss.front(), 4);
  return "pt" + std::to_string(index) + "(mean=" + fmt(std::accumulate(loss.begin(), loss.end(), 0.0) / loss.size(), 4) + ")";
}

}  // namespace

// ---------------------------------------------------------------------------

std::string PolicySource::label() const {
  switch (kind) {
    case SourceKind::Learn: return "learn";
    case SourceKind::Baseline: return ncsched::to_string(baseline);
    case SourceKind::Named: return "rule:" + name;
    case SourceKind::File: return "file:" + name;
  }
  return "?";
}

PolicySource PolicySource::parse(const std::string& spec) {
  PolicySource src;
  if (spec == "learn") return src;
  if (spec.rfind("rule:", 0) == 0) {
    src.kind = SourceKind::Named;
    src.name = spec.substr(5);
    return src;
  }
  if (spec.rfind("file:", 0) == 0) {
    src.kind = SourceKind::File;
    src.name = spec.substr(5);
    return src;
  }
  src.kind = SourceKind::Baseline;
  src.baseline = parse_baseline(spec);
  return src;
}

void ExperimentConfig::validate() const {
  try {
    channel.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidArgument, "channel." + message_of(e));
  }
  if (uses_tte(scheme) && !channel.tte()) field_error("tte", std::string("scheme ") + ncsched::to_string(scheme) + " needs a lifetime");
  if (!uses_tte(scheme) && channel.tte()) field_error("tte", std::string("scheme ") + ncsched::to_string(scheme) + " is binary");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    if (static_cast<int>(pt.size()) != channel.users) {
      field_error("points[" + std::to_string(i) + "]", "needs one loss value per user");
    }
    for (double p : pt) {
      if (!(p >= 0.0 && p < 1.0)) field_error("points[" + std::to_string(i) + "]", "loss must lie in [0,1)");
    }
  }
  if (policies.empty()) field_error("policies", "at least one policy is required");
  for (const auto& src : policies) {
    if (src.kind == SourceKind::Baseline && src.baseline == BaselineId::ModifiedSemiGreedy && !channel.tte()) {
      field_error("policies", "msg needs a TTE channel");
    }
    if (src.kind == SourceKind::Named && src.name.empty()) field_error("policies", "empty rule name");
    if (src.kind == SourceKind::File && src.name.empty()) field_error("policies", "empty policy file path");
    if (src.slots && *src.slots != evaluation.slots && !allow_mixed_budgets) {
      field_error("policies", src.label() + " uses " + std::to_string(*src.slots) + " slots against " +
                                  std::to_string(evaluation.slots) + "; set allow_mixed_budgets to compare them");
    }
  }
  try {
    schedule.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidArgument, "schedule." + message_of(e));
  }
  if (evaluation.slots < 1) field_error("evaluation.slots", "must be >= 1");
  if (evaluation.seeds < 1) field_error("evaluation.seeds", "must be >= 1");
  if (evaluation.episodes < 0) field_error("evaluation.episodes", "must be >= 0");
  if (evaluation.horizon < 1) field_error("evaluation.horizon", "must be >= 1");
  if (out_dir.empty()) field_error("out", "output directory is required");
  for (const auto& f : formats) {
    if (f != "csv" && f != "json") field_error("formats", "unknown format '" + f + "' (csv|json)");
  }
}

std::vector<std::vector<double>> ExperimentConfig::sweep() const {
  if (points.empty()) return {channel.loss};
  return points;
}

namespace {

void read_loss(const Json& l, int users, ExperimentConfig& c) {
  const auto k = static_cast<std::size_t>(std::max(users, 0));
  try {
    if (l.is_number()) {
      c.channel.loss.assign(k, l.get<double>());
    } else if (l.is_array() && !l.empty() && l.front().is_number()) {
      for (const auto& p : l) c.points.emplace_back(k, p.get<double>());
    } else if (l.is_array() && !l.empty() && l.front().is_array()) {
      c.points = l.get<std::vector<std::vector<double>>>();
    } else {
      field_error("loss", "expected a number, a list of numbers or a list of per-user vectors");
    }
  } catch (const nlohmann::json::exception&) {
    field_error("loss", "mixed or non-numeric entries");
  }
}

}  // namespace

Aggregation ExperimentConfig::aggregation() const { return Aggregation(scheme, channel.users, channel.lifetime); }

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  if (!j.is_object()) field_error("config", "expected a JSON object");
  ExperimentConfig c;
  if (!j.contains("seed")) field_error("seed", "is mandatory");
  c.channel.seed = read_field<std::uint64_t>(j, "seed", "", 0);
  c.channel.users = read_field<int>(j, "users", "", 5);
  c.channel.lifetime = read_field<int>(j, "tte", "", 0);
  c.channel.gamma = read_field<double>(j, "gamma", "", 0.99);
  c.channel.loss_jitter = read_field<double>(j, "loss_jitter", "", 0.0);
  c.channel.storage = parse_storage(read_field<std::string>(j, "storage", "", "accumulate"));
  try {
    c.scheme = parse_scheme(read_field<std::string>(j, "scheme", "", "notte"));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InvalidArgument || message_of(e).rfind("scheme", 0) == 0) throw;
    field_error("scheme", message_of(e));
  }

  const int k = c.channel.users;
  if (j.contains("loss")) {
    read_loss(j.at("loss"), k, c);
  } else if (j.contains("loss_preset")) {
    c.points = loss_preset(read_field<std::string>(j, "loss_preset", "", ""), k);
  } else {
    field_error("loss", "is required (or loss_preset)");
  }
  if (!c.points.empty()) c.channel.loss = c.points.front();

  for (const auto& spec : read_field<std::vector<std::string>>(j, "policies", "", {"learn"})) {
    try {
      c.policies.push_back(PolicySource::parse(spec));
    } catch (const Error& e) {
      field_error("policies", e.what());
    }
  }
  if (j.contains("policy_slots")) {
    const auto budgets = read_field<std::map<std::string, long long>>(j, "policy_slots", "", {});
    for (auto& src : c.policies) {
      auto it = budgets.find(src.label());
      if (it != budgets.end()) src.slots = it->second;
    }
  }

  if (j.contains("schedule")) {
    const Json& s = j.at("schedule");
    if (!s.is_object()) field_error("schedule", "expected an object");
    auto& sc = c.schedule;
    sc.epsilon0 = read_field(s, "epsilon0", "schedule.", sc.epsilon0);
    sc.decay = read_field(s, "decay", "schedule.", sc.decay);
    sc.epsilon_min = read_field(s, "epsilon_min", "schedule.", sc.epsilon_min);
    sc.phase_slots = read_field(s, "phase_slots", "schedule.", sc.phase_slots);
    sc.max_phases = read_field(s, "max_phases", "schedule.", sc.max_phases);
    sc.min_phases = read_field(s, "min_phases", "schedule.", sc.min_phases);
    sc.stop_tol = read_field(s, "stop_tol", "schedule.", sc.stop_tol);
    sc.stable_phases = read_field(s, "stable_phases", "schedule.", sc.stable_phases);
    sc.episode_slots = read_field(s, "episode_slots", "schedule.", sc.episode_slots);
    sc.seeding = read_field(s, "seeding", "schedule.", sc.seeding);
    sc.reservoir = read_field(s, "reservoir", "schedule.", sc.reservoir);
    sc.vi_tol = read_field(s, "vi_tol", "schedule.", sc.vi_tol);
    sc.vi_max_iterations = read_field(s, "vi_max_iterations", "schedule.", sc.vi_max_iterations);
  }
  if (j.contains("evaluation")) {
    const Json& e = j.at("evaluation");
    if (!e.is_object()) field_error("evaluation", "expected an object");
    auto& ev = c.evaluation;
    ev.slots = read_field(e, "slots", "evaluation.", ev.slots);
    ev.seeds = read_field(e, "seeds", "evaluation.", ev.seeds);
    ev.episodes = read_field(e, "episodes", "evaluation.", ev.episodes);
    ev.horizon = read_field(e, "horizon", "evaluation.", ev.horizon);
  }
  c.out_dir = read_field<std::string>(j, "out", "", "out");
  c.formats = read_field(j, "formats", "", c.formats);
  c.allow_mixed_budgets = read_field(j, "allow_mixed_budgets", "", false);
  c.validate();
  return c;
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["seed"] = channel.seed;
  j["users"] = channel.users;
  j["tte"] = channel.lifetime;
  j["gamma"] = channel.gamma;
  j["loss_jitter"] = channel.loss_jitter;
  j["storage"] = to_string(channel.storage);
  j["scheme"] = ncsched::to_string(scheme);
  j["loss"] = sweep();
  Json pol = Json::array();
  Json budgets = Json::object();
  for (const auto& src : policies) {
    pol.push_back(src.label());
    if (src.slots) budgets[src.label()] = *src.slots;
  }
  j["policies"] = pol;
  if (!budgets.empty()) j["policy_slots"] = budgets;
  j["schedule"] = {{"epsilon0", schedule.epsilon0},         {"decay", schedule.decay},
                   {"epsilon_min", schedule.epsilon_min},   {"phase_slots", schedule.phase_slots},
                   {"max_phases", schedule.max_phases},     {"min_phases", schedule.min_phases},
                   {"stop_tol", schedule.stop_tol},         {"stable_phases", schedule.stable_phases},
                   {"episode_slots", schedule.episode_slots}, {"seeding", schedule.seeding},
                   {"reservoir", schedule.reservoir},       {"vi_tol", schedule.vi_tol},
                   {"vi_max_iterations", schedule.vi_max_iterations}};
  j["evaluation"] = {{"slots", evaluation.slots},
                     {"seeds", evaluation.seeds},
                     {"episodes", evaluation.episodes},
                     {"horizon", evaluation.horizon}};
  j["out"] = out_dir.string();
  j["formats"] = formats;
  j["allow_mixed_budgets"] = allow_mixed_budgets;
  return j;
}

std::vector<std::vector<double>> loss_preset(const std::string& name, int users) {
  const std::string prefix = "equal-mean-";
  if (name.rfind(prefix, 0) != 0) field_error("loss_preset", "unknown preset '" + name + "' (equal-mean-<m>)");
  double mean = 0.0;
  try {
    mean = std::stod(name.substr(prefix.size()));
  } catch (const std::exception&) {
    field_error("loss_preset", "cannot read the mean in '" + name + "'");
  }
  if (!(mean > 0.0 && mean < 1.0)) field_error("loss_preset", "mean must lie in (0,1)");
  if (users < 2) field_error("users", "must be >= 2");
  const double cap = std::min(mean, 1.0 - mean) * 0.999;
  std::vector<std::vector<double>> out;
  for (double spread : {0.0, 0.05, 0.1, 0.15, 0.2}) {
    if (spread > cap) break;
    std::vector<double> p;
    for (int k = 0; k < users; ++k) {
      p.push_back(mean + spread * (2.0 * k / (users - 1) - 1.0));
    }
    out.push_back(std::move(p));
  }
  return out;
}

Policy greedy_policy(const Aggregation& agg) {
  const Action clique = agg.scheme() == Scheme::AggII ? Action::GlobalMaxClique : Action::CliqueWithOldest;
  return make_policy(agg, [&](const AggregatedState& s) {
    if (s.clique >= 2 || !agg.feasible(s, Action::EmptyLine)) return clique;
    return Action::EmptyLine;
  });
}

Policy named_policy(const Aggregation& agg, const std::string& name) {
  if (name == "sg") return semi_greedy_policy(agg);
  if (name == "msg") return msg_policy(agg);
  if (name == "greedy") return greedy_policy(agg);
  if (name.rfind("threshold:", 0) == 0) return threshold_policy(agg, std::stoi(name.substr(10)));
  throw Error(ErrorCode::InvalidArgument, "unknown rule '" + name + "' (sg|msg|greedy|threshold:<m>)");
}

// ---------------------------------------------------------------------------

const PointResult* Report::find(const std::string& policy, std::size_t point) const {
  for (const auto& r : results) {
    if (r.policy == policy && r.point == point) return &r;
  }
  return nullptr;
}

Json to_json(const EvalResult& r) {
  return {{"mean", r.mean}, {"std_error", r.std_error}, {"per_seed", r.per_seed}, {"slots", r.slots}};
}

Json Report::to_json() const {
  Json j;
  j["config"] = config.to_json();
  const Aggregation agg = config.aggregation();
  Json runs = Json::array();
  for (const auto& r : results) {
    Json x;
    x["point"] = r.point;
    x["loss"] = r.loss;
    x["policy"] = r.policy;
    x["seed"] = r.seed;
    x["throughput"] = ncsched::to_json(r.throughput);
    if (r.discounted) x["discounted_from_empty"] = ncsched::to_json(*r.discounted);
    x["delivered"] = r.throughput.delivered;
    if (!r.throughput.delivered.empty()) {
      const auto [lo, hi] = std::minmax_element(r.throughput.delivered.begin(), r.throughput.delivered.end());
      x["delivery_ratio_min_max"] = *hi > 0 ? static_cast<double>(*lo) / static_cast<double>(*hi) : 0.0;
    }
    if (r.table) x["actions"] = policy_string(*r.table);
    if (r.value) x["values"] = r.value->values;
    if (r.policy == "learn") {
      x["learning"] = {{"phases", r.phases}, {"slots", r.learn_slots}, {"stop_rule", r.stop_rule}};
    }
    runs.push_back(std::move(x));
  }
  j["runs"] = std::move(runs);
  Json states = Json::array();
  for (int s = 0; s < agg.size(); ++s) states.push_back(agg.describe(agg.state(s)));
  j["states"] = std::move(states);
  return j;
}

void Report::write(const fs::path& dir) const {
  fs::create_directories(dir);
  const bool csv = std::find(config.formats.begin(), config.formats.end(), "csv") != config.formats.end();
  const bool json = std::find(config.formats.begin(), config.formats.end(), "json") != config.formats.end();
  const Aggregation agg = config.aggregation();
  const auto sweep = config.sweep();

  auto open = [&](const std::string& name) {
    std::ofstream os(dir / name);
    if (!os) throw Error(ErrorCode::InvalidArgument, "out: cannot write " + (dir / name).string());
    os << std::setprecision(10);
    return os;
  };

  if (csv) {
    std::vector<const PointResult*> tabled;
    for (const auto& r : results) {
      if (r.table) tabled.push_back(&r);
    }
    if (!tabled.empty()) {
      auto pos = open("policy.csv");
      auto vos = open("value.csv");
      pos << "state_id";
      vos << "state_id";
      for (const auto& n : agg.component_names()) {
        pos << ',' << n;
        vos << ',' << n;
      }
      for (const auto* r : tabled) {
        const std::string col = r->policy + ' ' + point_label(r->loss, r->point);
        pos << ',' << col;
        if (r->value) vos << ',' << col;
      }
      pos << '\n';
      vos << '\n';
      for (int s = 0; s < agg.size(); ++s) {
        pos << s;
        vos << s;
        for (int c : agg.components(agg.state(s))) {
          pos << ',' << c;
          vos << ',' << c;
        }
        for (const auto* r : tabled) {
          pos << ',' << label((*r->table)[s]);
          if (r->value) vos << ',' << r->value->values[static_cast<std::size_t>(s)];
        }
        pos << '\n';
        vos << '\n';
      }
    }

    auto tos = open("throughput.csv");
    tos << "policy";
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      const std::string l = point_label(sweep[i], i);
      tos << ',' << l << ',' << l << " se";
    }
    tos << '\n';
    for (const auto& src : config.policies) {
      tos << src.label();
      for (std::size_t i = 0; i < sweep.size(); ++i) {
        const PointResult* r = find(src.label(), i);
        if (r) {
          tos << ',' << r->throughput.mean << ',' << r->throughput.std_error;
        } else {
          tos << ",,";
        }
      }
      tos << '\n';
    }
  }
  if (json) open("report.json") << to_json().dump(2) << '\n';
}

Report run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec || !fs::is_directory(config.out_dir)) {
    field_error("out", "cannot create " + config.out_dir.string() + (ec ? " (" + ec.message() + ")" : ""));
  }

  const Aggregation agg = config.aggregation();
  const auto sweep = config.sweep();
  Report report;
  report.config = config;

  // File policies are read once, before the parallel region.
  std::map<std::string, Policy> files;
  for (const auto& src : config.policies) {
    if (src.kind == SourceKind::File) files.emplace(src.name, read_policy_csv(src.name, agg));
    if (src.kind == SourceKind::Named) named_policy(agg, src.name).validate(agg);
  }

  const std::size_t n_pol = config.policies.size();
  const long long jobs = static_cast<long long>(sweep.size() * n_pol);
  report.results.resize(static_cast<std::size_t>(jobs));
  std::vector<std::string> errors(static_cast<std::size_t>(jobs));

#pragma omp parallel for schedule(dynamic, 1)
  for (long long job = 0; job < jobs; ++job) {
    const std::size_t point = static_cast<std::size_t>(job) / n_pol;
    const PolicySource& src = config.policies[static_cast<std::size_t>(job) % n_pol];
    PointResult& out = report.results[static_cast<std::size_t>(job)];
    try {
      out.point = point;
      out.loss = sweep[point];
      out.policy = src.label();
      out.seed = derive_seed(derive_seed(config.channel.seed, point), static_cast<std::uint64_t>(job) % n_pol);
      ChannelConfig channel = config.channel;
      channel.loss = sweep[point];

      std::optional<Policy> table;
      if (src.kind == SourceKind::Learn) {
        channel.seed = derive_seed(out.seed, 0);
        LearningResult lr = algorithm_a(channel, agg, config.schedule);
        table = lr.policy;
        out.value = lr.value;
        out.phases = static_cast<int>(lr.history.size());
        out.learn_slots = lr.slots;
        out.stop_rule = to_string(lr.stop_rule);
      } else if (src.kind == SourceKind::Named) {
        table = named_policy(agg, src.name);
      } else if (src.kind == SourceKind::File) {
        table = files.at(src.name);
      }
      out.table = table;

      ControllerFactory factory;
      if (table) {
        factory = [&agg, table] { return std::make_unique<PolicyController>(agg, *table); };
      } else {
        const BaselineId id = src.baseline;
        factory = [&agg, id] { return std::make_unique<BaselineController>(id, &agg); };
      }
      channel.seed = derive_seed(out.seed, 1);
      const long long slots = src.slots.value_or(config.evaluation.slots);
      out.throughput = average_cost_eval(factory, channel, channel.empty_state(), slots, config.evaluation.seeds);
      if (config.evaluation.episodes > 0) {
        channel.seed = derive_seed(out.seed, 2);
        out.discounted = discounted_value_estimate(factory, channel, channel.empty_state(), config.evaluation.episodes,
                                                   config.evaluation.horizon, config.evaluation.seeds);
      }
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(job)] = out.policy + " at point " + std::to_string(point) + ": " + e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw Error(ErrorCode::InvalidArgument, e);
  }
  report.write(config.out_dir);
  return report;
}

// ---------------------------------------------------------------------------

std::vector<Disagreement> diff_policies(const Policy& a, const Policy& b, const Aggregation& agg) {
  if (!a.matches(agg) || !b.matches(agg) || a.scheme != b.scheme) {
    throw Error(ErrorCode::SchemeMismatch, "policies belong to different aggregations");
  }
  std::vector<Disagreement> out;
  for (int s = 0; s < agg.size(); ++s) {
    if (a[s] != b[s]) out.push_back({s, agg.describe(agg.state(s)), a[s], b[s]});
  }
  return out;
}

void write_policy_csv(const fs::path& path, const Aggregation& agg, const Policy& policy) {
  policy.validate(agg);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  os << "state_id";
  for (const auto& n : agg.component_names()) os << ',' << n;
  os << ",action\n";
  for (int s = 0; s < agg.size(); ++s) {
    os << s;
    for (int c : agg.components(agg.state(s))) os << ',' << c;
    os << ',' << label(policy[s]) << '\n';
  }
}

Policy read_policy_csv(const fs::path& path, const Aggregation& agg, const std::string& column) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::InvalidArgument, "cannot read policy file " + path.string());
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::InvalidArgument, path.string() + ": empty file");
  const auto header = split(line);
  const auto names = agg.component_names();
  if (header.size() < names.size() + 2 || header[0] != "state_id" ||
      !std::equal(names.begin(), names.end(), header.begin() + 1)) {
    throw Error(ErrorCode::SchemeMismatch, path.string() + ": columns do not match scheme " + to_string(agg.scheme()));
  }
  std::size_t col = header.size() - 1;
  if (!column.empty()) {
    auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) throw Error(ErrorCode::InvalidArgument, path.string() + ": no column '" + column + "'");
    col = static_cast<std::size_t>(it - header.begin());
  }

  Policy p = make_policy(agg, [](const AggregatedState&) { return Action::CliqueWithOldest; });
  std::vector<bool> seen(static_cast<std::size_t>(agg.size()), false);
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    const std::string where = path.string() + ":" + std::to_string(row);
    if (cells.size() != header.size()) throw Error(ErrorCode::InvalidArgument, where + ": wrong number of cells");
    const int s = std::stoi(cells[0]);
    if (s < 0 || s >= agg.size()) throw Error(ErrorCode::SchemeMismatch, where + ": state id out of range");
    const auto comps = agg.components(agg.state(s));
    for (std::size_t c = 0; c < comps.size(); ++c) {
      if (std::stoi(cells[c + 1]) != comps[c]) {
        throw Error(ErrorCode::SchemeMismatch, where + ": components differ from " + agg.describe(agg.state(s)));
      }
    }
    p.actions[static_cast<std::size_t>(s)] = action_from_label(std::stoi(cells[col]));
    seen[static_cast<std::size_t>(s)] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw Error(ErrorCode::SchemeMismatch, path.string() + ": missing states for scheme " + to_string(agg.scheme()));
  }
  p.validate(agg);
  return p;
}

// ---------------------------------------------------------------------------

Json to_json(const InducedValueReport& r, const Aggregation& agg) {
  Json j;
  j["policy"] = policy_string(r.policy);
  j["gamma"] = r.gamma;
  j["max_gap"] = r.max_gap;
  j["worst_state"] = r.worst_state >= 0 ? agg.describe(agg.state(r.worst_state)) : "";
  j["max_gap_recurrent"] = r.max_gap_recurrent;
  j["lumpable"] = r.lumpable;
  j["lumpable_recurrent"] = r.lumpable_recurrent;
  j["stationary_gap"] = r.stationary_gap;
  j["gain_detailed"] = r.gain_detailed;
  j["gain_induced"] = r.gain_induced;
  j["gain_gap"] = r.gain_gap();
  j["v_hat"] = r.v_hat;
  j["v_bar"] = r.v_bar;
  j["uniform_fallback_states"] = r.uniform_fallback_states;
  return j;
}

Json to_json(const MonotoneCheck& c) {
  Json fixed = Json::object();
  for (const auto& [k, v] : c.fixed) fixed[k] = v;
  return {{"axis", c.axis},         {"fixed", fixed},           {"nondecreasing", c.nondecreasing},
          {"states", c.states},     {"values", c.values},       {"violations", c.violations},
          {"worst", c.worst}};
}

}  // namespace ncsched
