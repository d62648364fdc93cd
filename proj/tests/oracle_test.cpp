#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ncsched/oracle.hpp"

using namespace ncsched;

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("detailed space sizes") {
  CHECK(DetailedSpace(3).size() == 64);
  CHECK(DetailedSpace(4).size() == 4096);
  CHECK_THROWS_AS(DetailedSpace(5), Error);
  const DetailedSpace space(4);
  for (int i : {0, 1, 77, 4095}) CHECK(space.index_of(space.state(i)) == i);
  CHECK(space.state(0) == DetailedState::binary(4));
}

TEST_CASE("exact transition examples") {
  const Aggregation agg(Scheme::NoTte, 4);
  const double q = 0.2;
  const auto out = exact_transition(agg, fixtures::four_user_s5(), Action::CliqueWithOldest, std::vector<double>(4, q));
  double total = 0.0, to_sa = 0.0;
  for (const auto& o : out) {
    total += o.probability;
    if (o.next == fixtures::four_user_sa()) to_sa += o.probability;
  }
  CHECK(total == doctest::Approx(1.0));
  CHECK(to_sa == doctest::Approx(q * (1 - q) * (1 - q)));

  auto s = fixtures::four_user_s5();
  const auto sure = exact_transition(agg, s, Action::EmptyLine, std::vector<double>(4, 0.0));
  REQUIRE(sure.size() == 1);
  CHECK(sure[0].next.row_empty(3));
  CHECK(sure[0].reward_mass == doctest::Approx(1.0));
}

TEST_CASE("aggregated successors of the (3,1) clique action at K=4") {
  const Aggregation agg(Scheme::NoTte, 4);
  const std::vector<double> loss(4, 0.3);
  const DetailedSpace space(4);
  for (int i = 0; i < space.size(); ++i) {
    const auto s = space.state(i);
    if (!(agg.aggregate(s) == AggregatedState{0, 3, 1})) continue;
    for (const auto& o : exact_transition(agg, s, Action::CliqueWithOldest, loss)) {
      const auto n = agg.aggregate(o.next);
      const bool allowed = n == AggregatedState{0, 3, 1} || n == AggregatedState{0, 2, 2} ||
                           n == AggregatedState{0, 1, 3} || n == AggregatedState{0, 1, 4};
      CHECK(allowed);
    }
  }
}

TEST_CASE("property: clique-size law against the binomial") {
  const Aggregation agg(Scheme::NoTte, 4);
  const double p = 0.3;
  const std::vector<double> loss(4, p);
  const DetailedSpace space(4);
  int checked = 0;
  for (int i = 0; i < space.size(); ++i) {
    const auto s = space.state(i);
    const int k = max_clique_size(s);
    if (k < 2 || maximum_cliques(s).size() != 1) continue;
    const UserSet q = max_clique(s);
    const bool disjoint = (nonempty_rows(s) & ~q) != 0;
    std::vector<double> law(5, 0.0);
    for (const auto& o : exact_transition(agg, s, Action::CliqueWithOldest, loss))
      law[static_cast<std::size_t>(o.next.all_empty() ? 0 : max_clique_size(o.next))] += o.probability;
    std::vector<double> tail(6, 0.0), btail(6, 0.0);
    for (int j = 4; j >= 0; --j) {
      tail[static_cast<std::size_t>(j)] = tail[static_cast<std::size_t>(j + 1)] + law[static_cast<std::size_t>(j)];
      const double b = j <= k ? binom(k, j) * std::pow(p, j) * std::pow(1 - p, k - j) : 0.0;
      btail[static_cast<std::size_t>(j)] = btail[static_cast<std::size_t>(j + 1)] + b;
    }
    for (int j = 0; j <= 4; ++j) {
      if (disjoint) {
        CHECK(tail[static_cast<std::size_t>(j)] >= btail[static_cast<std::size_t>(j)] - 1e-12);
      } else {
        CHECK(tail[static_cast<std::size_t>(j)] == doctest::Approx(btail[static_cast<std::size_t>(j)]));
      }
    }
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("chains are stochastic and kernels agree") {
  const Aggregation agg(Scheme::NoTte, 4);
  const DetailedSpace space(4);
  const std::vector<double> loss{0.1, 0.2, 0.3, 0.25};
  const auto serial = build_detailed_model(space, agg, loss, StorageRule::Accumulate, Kernel::Serial);
  const auto parallel = build_detailed_model(space, agg, loss, StorageRule::Accumulate, Kernel::Parallel);
  CHECK(serial.row_ptr == parallel.row_ptr);
  CHECK(serial.next == parallel.next);
  CHECK(serial.probability == parallel.probability);
  CHECK(serial.reward_mass == parallel.reward_mass);

  const Chain chain = policy_chain(serial, semi_greedy_policy(agg));
  for (int s = 0; s < chain.states(); ++s) {
    double total = 0.0;
    for (int e = chain.row_ptr[static_cast<std::size_t>(s)]; e < chain.row_ptr[static_cast<std::size_t>(s) + 1]; ++e)
      total += chain.probability[static_cast<std::size_t>(e)];
    CHECK(total == doctest::Approx(1.0));
    CHECK(chain.reward[static_cast<std::size_t>(s)] >= 0.0);
    CHECK(chain.reward[static_cast<std::size_t>(s)] <= 4.0);
  }

  const auto vs = evaluate_discounted(chain, 0.95, Kernel::Serial);
  const auto vp = evaluate_discounted(chain, 0.95, Kernel::Parallel);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    CHECK(vs[i] == doctest::Approx(vp[i]).epsilon(1e-10));
    CHECK(vs[i] >= 0.0);
    CHECK(vs[i] <= 4.0 / 0.05);
  }
  const auto ps = limiting_distribution(chain, 0, Kernel::Serial);
  const auto pp = limiting_distribution(chain, 0, Kernel::Parallel);
  double mass = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    CHECK(ps[i] == doctest::Approx(pp[i]).epsilon(1e-10));
    mass += ps[i];
  }
  CHECK(mass == doctest::Approx(1.0));
  const auto rec = recurrent_states(chain);
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (ps[i] > 1e-12) CHECK(rec[i]);
}

TEST_CASE("induced-value identities at K=3") {
  const Aggregation agg(Scheme::NoTte, 3);
  const DetailedSpace space(3);
  const auto model = build_detailed_model(space, agg, std::vector<double>(3, 0.25), StorageRule::Accumulate,
                                          Kernel::Serial);
  const auto greedy = verify_induced_values(model, agg, semi_greedy_policy(agg), 0.0);
  CHECK(greedy.max_gap < 1e-12);
  for (const Policy& p : all_policies(agg)) {
    const auto r = verify_induced_values(model, agg, p, 0.9);
    CHECK(r.stationary_gap < 1e-9);
    CHECK(r.gain_gap() < 1e-9);
    if (r.lumpable_recurrent) CHECK(r.max_gap_recurrent < 1e-6);
  }
  const auto induced = induced_model_exact(model, agg, semi_greedy_policy(agg));
  double mass = 0.0;
  for (double m : induced.mass) mass += m;
  CHECK(mass == doctest::Approx(1.0));
}

TEST_CASE("NoTte K=3 optimum is semi-greedy") {
  const Aggregation agg(Scheme::NoTte, 3);
  const DetailedSpace space(3);
  for (double p : {0.1, 0.25, 0.4}) {
    const auto model = build_detailed_model(space, agg, std::vector<double>(3, p), StorageRule::Accumulate,
                                            Kernel::Parallel);
    const auto best = exact_optimal(model, agg, Criterion::AverageCost, 0.0);
    CHECK(best.policy == semi_greedy_policy(agg));
    const auto pi = exact_optimal(model, agg, Criterion::AverageCost, 0.0, OptimizeMethod::PolicyIteration);
    CHECK(pi.value.gain == doctest::Approx(best.value.gain).epsilon(1e-8));
  }
}

TEST_CASE("OneD optimum is a threshold and its value is monotone") {
  for (int users : {3, 4}) {
    const Aggregation agg(Scheme::OneD, users);
    const DetailedSpace space(users);
    const auto model = build_detailed_model(space, agg, std::vector<double>(static_cast<std::size_t>(users), 0.25),
                                            StorageRule::Accumulate, Kernel::Parallel);
    const auto best = exact_optimal(model, agg, Criterion::AverageCost, 0.0);
    CHECK(is_threshold(best.policy));
    const auto disc = exact_optimal(model, agg, Criterion::Discounted, 0.99);
    CHECK(verify_value_shape(agg, disc.value.values).monotone);
  }
  const Aggregation agg(Scheme::OneD, 5);
  CHECK(switch_count(threshold_policy(agg, 3)) == 1);
  CHECK(is_threshold(threshold_policy(agg, 3)));
}

TEST_CASE("values vanish as the loss approaches one") {
  const Aggregation agg(Scheme::OneD, 3);
  const DetailedSpace space(3);
  const auto model = build_detailed_model(space, agg, std::vector<double>(3, 0.999999), StorageRule::Accumulate,
                                          Kernel::Parallel);
  const auto best = exact_optimal(model, agg, Criterion::Discounted, 0.9);
  for (double v : best.value.values) CHECK(v < 1e-4);
}

TEST_CASE("monotone scans") {
  const Aggregation agg(Scheme::OneD, 4);
  const auto flat = verify_value_shape(agg, std::vector<double>(4, 3.0));
  CHECK(flat.monotone);
  CHECK(flat.d == 0.0);
  const auto bent = verify_value_shape(agg, {1.0, 2.0, 1.5, 3.0});
  CHECK_FALSE(bent.monotone);
  CHECK(bent.violations == 1);
  CHECK(verify_value_shape(agg, {1.0, 2.0, 1.5, 3.0}, 0.6).monotone);
  CHECK_THROWS_AS(monotone_along(agg, {1, 2, 3, 4}, "F", {}, true), Error);
}

TEST_CASE("transience above the smallest clique size from the empty start") {
  const Aggregation agg(Scheme::OneD, 4);
  const DetailedSpace space(4);
  const auto model = build_detailed_model(space, agg, std::vector<double>(4, 0.25), StorageRule::Accumulate,
                                          Kernel::Parallel);
  for (int m = 2; m <= 4; ++m) {
    const Chain chain = policy_chain(model, threshold_policy(agg, m));
    const auto rec = recurrent_states(chain);
    const auto reach = reachable_states(chain, 0);
    for (int s = 0; s < chain.states(); ++s) {
      if (rec[static_cast<std::size_t>(s)] && reach[static_cast<std::size_t>(s)]) {
        CHECK(max_clique_size(space.state(s)) <= m);
      }
    }
  }
}
