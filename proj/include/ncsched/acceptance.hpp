#pragma once

#include <string>
#include <vector>

#include "ncsched/harness.hpp"

namespace ncsched {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// One-line summary of the measured quantities.
  std::string summary;
  /// Systematic residuals reported alongside a pass or fail.
  std::vector<std::string> findings;
  Json detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct UncodedCheck {
  int users = 5;
  double loss = 0.25;
  double gamma = 0.99;
  long long slots = 200000;
  int seeds = 5;
  int episodes = 200;
  long long horizon = 2000;
  double throughput_tol = 0.01;
  double value_tol = 1.5;
  std::uint64_t seed = 20240601;
};
CheckResult check_uncoded(const UncodedCheck& c = {});

struct InducedValueCheck {
  int users = 3;
  double loss = 0.25;
  double gamma = 0.9;
  double tol = 1e-6;
};
CheckResult check_induced_values(const InducedValueCheck& c = {});

struct LearnedSgCheck {
  int users = 5;
  std::vector<double> losses{0.1, 0.25, 0.4};
  double gamma = 0.99;
  LearningSchedule schedule = default_schedule();
  std::uint64_t seed = 11;

  static LearningSchedule default_schedule();
};
CheckResult check_learned_sg(const LearnedSgCheck& c = {});

struct ThresholdCheck {
  std::vector<int> users{3, 4};
  std::vector<double> losses{0.1, 0.25, 0.4};
};
CheckResult check_threshold(const ThresholdCheck& c = {});

struct BinomialCheck {
  int users = 3;
  double loss = 0.25;
  long long samples = 100000;
  double tv_tol = 0.02;
  double exact_tol = 1e-12;
  std::uint64_t seed = 5;
};
CheckResult check_binomial(const BinomialCheck& c = {});

struct TteOrderingCheck {
  int users = 5;
  int lifetime = 5;
  double gamma = 0.99;
  std::vector<double> losses{0.1, 0.25, 0.4};
  long long slots = 200000;
  int seeds = 5;
  LearningSchedule schedule = default_schedule();
  double learned_slack = 0.005;
  double msg_margin = 0.01;
  double msg_margin_from = 0.25;
  double sg_band = 0.03;
  std::uint64_t seed = 29;

  static LearningSchedule default_schedule();
};
CheckResult check_tte_ordering(const TteOrderingCheck& c = {});

struct ValueShapeCheck {
  int users = 5;
  int lifetime = 9;
  double loss = 0.25;
  double gamma = 0.99;
  LearningSchedule schedule = default_schedule();
  int exact_users = 4;
  std::vector<double> exact_losses{0.1, 0.25, 0.4};
  std::uint64_t seed = 13;

  static LearningSchedule default_schedule();
};
/// `learned` false skips the learned AggI part (oracle-only runs).
CheckResult check_value_shape(const ValueShapeCheck& c = {}, bool learned = true);

struct TransienceCheck {
  int users = 4;
  std::vector<double> losses{0.1, 0.25, 0.4};
};
CheckResult check_transience(const TransienceCheck& c = {});

struct CodecCheck {
  int cases = 2000;
  std::uint64_t seed = 99;
};
CheckResult check_codec(const CodecCheck& c = {});

/// Runs the listed criteria (1..9) in order.
std::vector<CheckResult> run_acceptance(const std::vector<int>& ids);

/// "[PASS] 3 name: summary (1.2 s)"
std::string format_line(const CheckResult& r);
Json to_json(const CheckResult& r);

}  // namespace ncsched
