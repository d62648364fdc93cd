#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "ncsched/baselines.hpp"
#include "ncsched/channel.hpp"
#include "ncsched/learning.hpp"

using namespace ncsched;

TEST_CASE("channel config validation") {
  CHECK_NOTHROW(ChannelConfig::uniform(5, 0.25).validate());
  auto c = ChannelConfig::uniform(5, 0.25);
  c.loss[2] = 1.0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("loss"), Error);
  c = ChannelConfig::uniform(5, 0.25);
  c.loss.pop_back();
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK_THROWS_AS(ChannelConfig::uniform(1, 0.25).validate(), Error);
  CHECK_THROWS_AS(ChannelConfig::uniform(3, 0.25, 0, 1.0).validate(), Error);
}

TEST_CASE("realization law") {
  const Aggregation notte(Scheme::NoTte, 5);
  const auto law = realization_law(notte, fixtures::five_user_b(), Action::CliqueWithOldest);
  REQUIRE(law.size() == 2);
  CHECK(law[0].combo == 0b00111u);
  CHECK(law[1].combo == 0b10011u);
  CHECK(law[0].probability == doctest::Approx(0.5));

  const auto empty = realization_law(notte, DetailedState::binary(5), Action::EmptyLine);
  CHECK(empty.size() == 5);
  for (const auto& r : empty) CHECK(r.probability == doctest::Approx(0.2));

  const auto unique = realization_law(notte, fixtures::five_user_a(), Action::CliqueWithOldest);
  REQUIRE(unique.size() == 1);
  CHECK(unique[0].combo == 0b01110u);

  CHECK_THROWS_AS((void)realization_law(notte, fixtures::five_user_a(), Action::EmptyLine), Error);
}

TEST_CASE("one-slot transition probability") {
  const double q = 0.3;
  auto cfg = ChannelConfig::uniform(4, q, 0, 0.99, 17);
  Simulator sim(cfg);
  const long long n = 200000;
  long long hit = 0;
  for (long long i = 0; i < n; ++i) {
    if (sim.step(fixtures::four_user_s5(), 0b0111).outcome.next_state == fixtures::four_user_sa()) ++hit;
  }
  const double want = q * (1 - q) * (1 - q);
  CHECK(std::abs(static_cast<double>(hit) / n - want) < 4 * std::sqrt(want * (1 - want) / n));
}

TEST_CASE("lossless channel delivers every uncoded send") {
  const auto cfg = ChannelConfig::uniform(4, 0.0);
  Simulator sim(cfg);
  const auto out = sim.step(fixtures::four_user_s5(), singleton(1)).outcome;
  CHECK(out.reward == 1);
  CHECK(out.next_state.row_empty(1));

  BaselineController uncoded(BaselineId::Uncoded);
  const auto trace = run_episode(uncoded, sim, cfg.empty_state(), 1000);
  CHECK(trace.throughput().value() == 1.0);
}

TEST_CASE("Monte-Carlo clique-size law from a clique with no disjoint clique") {
  const double p = 0.25;
  auto cfg = ChannelConfig::uniform(3, p, 0, 0.99, 23);
  Simulator sim(cfg);
  const auto s = DetailedState::from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  std::vector<double> freq(4, 0.0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto next = sim.step(s, 0b111).outcome.next_state;
    freq[static_cast<std::size_t>(next.all_empty() ? 0 : max_clique_size(next))] += 1.0 / n;
  }
  CHECK(freq[0] == doctest::Approx(0.421875).epsilon(0.02));
}

TEST_CASE("trace accounting and determinism") {
  auto cfg = ChannelConfig::uniform(5, 0.3, 0, 0.99, 99);
  const Aggregation agg(Scheme::NoTte, 5);
  auto run = [&] {
    Simulator sim(cfg);
    BaselineController sg(BaselineId::SemiGreedy);
    return run_episode(sg, sim, DetailedState::binary(5), 5000, {true, &agg, {}});
  };
  const Trace a = run();
  const Trace b = run();
  CHECK(a.records.size() == 5000);
  long long delivered = 0;
  for (long long d : a.delivered) delivered += d;
  CHECK(delivered == a.total_reward);
  for (const auto& r : a.records) CHECK(r.reward <= 5);
  std::ostringstream sa, sb;
  a.write_csv(sa);
  b.write_csv(sb);
  CHECK(sa.str() == sb.str());
  CHECK(a.final_state == b.final_state);

  Simulator sim(cfg);
  BaselineController sg(BaselineId::SemiGreedy);
  CHECK_FALSE(run_episode(sg, sim, DetailedState::binary(5), 0).throughput().has_value());
}

TEST_CASE("uncoded throughput and discounted value") {
  const auto cfg = ChannelConfig::uniform(5, 0.25, 0, 0.99, 3);
  const ControllerFactory uncoded = [] { return std::make_unique<BaselineController>(BaselineId::Uncoded); };
  const auto tp = average_cost_eval(uncoded, cfg, DetailedState::binary(5), 200000, 2);
  CHECK(tp.mean == doctest::Approx(0.75).epsilon(0.0134));
  const auto dv = discounted_value_estimate(uncoded, cfg, DetailedState::binary(5), 100, 2000, 2);
  CHECK(std::abs(dv.mean - 75.0) < 2.0);
}

TEST_CASE("differentiated uncoded throughput is the mean success rate") {
  ChannelConfig cfg = ChannelConfig::uniform(4, 0.0, 0, 0.99, 8);
  cfg.loss = {0.1, 0.2, 0.3, 0.4};
  const ControllerFactory uncoded = [] { return std::make_unique<BaselineController>(BaselineId::Uncoded); };
  const auto tp = average_cost_eval(uncoded, cfg, DetailedState::binary(4), 200000, 2);
  const double slots_per_round = 1 / 0.9 + 1 / 0.8 + 1 / 0.7 + 1 / 0.6;
  CHECK(tp.mean == doctest::Approx(4 / slots_per_round).epsilon(0.01));
}
