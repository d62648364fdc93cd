#include <doctest.h>

#include "fixtures.hpp"
#include "ncsched/aggregation.hpp"
#include "ncsched/oracle_kernels.hpp"
#include "ncsched/policy.hpp"

using namespace ncsched;

TEST_CASE("aggregate examples") {
  const Aggregation notte(Scheme::NoTte, 5);
  CHECK(notte.aggregate(fixtures::five_user_a()) == AggregatedState{0, 3, 0});
  CHECK(notte.aggregate(fixtures::five_user_b()) == AggregatedState{0, 3, 0});
  CHECK(notte.aggregate(DetailedState::binary(5)) == AggregatedState{0, 1, 5});

  const auto t = fixtures::oldest_outside_clique();
  CHECK(Aggregation(Scheme::AggI, 4, 5).aggregate(t) == AggregatedState{1, 1, 0});
  CHECK(Aggregation(Scheme::AggII, 4, 5).aggregate(t) == AggregatedState{1, 3, 0});
  CHECK(Aggregation(Scheme::OneD, 5).aggregate(fixtures::five_user_a()) == AggregatedState{0, 3, 0});
}

TEST_CASE("aggregate rejects a mode mismatch") {
  try {
    (void)Aggregation(Scheme::AggI, 4, 5).aggregate(fixtures::four_user_s5());
    FAIL("expected ModeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ModeMismatch);
  }
  CHECK_THROWS_AS((void)Aggregation(Scheme::NoTte, 4).aggregate(fixtures::oldest_outside_clique()), Error);
}

TEST_CASE("feasible actions") {
  const Aggregation notte(Scheme::NoTte, 5);
  CHECK(notte.feasible_actions({0, 3, 0}) == std::vector<Action>{Action::CliqueWithOldest});
  CHECK(notte.feasible_actions({0, 1, 5}) == std::vector<Action>{Action::EmptyLine});
  const Aggregation agg2(Scheme::AggII, 5, 5);
  CHECK(agg2.feasible_actions({2, 3, 1}) ==
        std::vector<Action>{Action::CliqueWithOldest, Action::EmptyLine, Action::GlobalMaxClique});
  const Aggregation agg1(Scheme::AggI, 5, 5);
  for (const auto& s : agg1.states()) CHECK_FALSE(agg1.feasible(s, Action::GlobalMaxClique));
}

TEST_CASE("enumeration sizes") {
  CHECK(Aggregation(Scheme::NoTte, 5).size() <= 30);
  CHECK(Aggregation(Scheme::NoTte, 5).size() == 16);
  CHECK(Aggregation(Scheme::AggI, 5, 9).size() == 96);
  CHECK(Aggregation(Scheme::OneD, 5).size() == 5);
  CHECK_THROWS_AS(Aggregation(Scheme::NoTte, 1), Error);
  CHECK_THROWS_AS(Aggregation(Scheme::AggI, 4), Error);
}

TEST_CASE("NoTte enumeration order") {
  const Aggregation agg(Scheme::NoTte, 5);
  std::string order;
  for (const auto& s : agg.states()) order += std::to_string(s.clique) + std::to_string(s.empty) + " ";
  CHECK(order == "10 20 30 40 50 11 21 31 41 12 22 32 13 23 14 15 ");
}

TEST_CASE("seed_state round trip") {
  for (const auto& agg : {Aggregation(Scheme::NoTte, 5), Aggregation(Scheme::NoTte, 3), Aggregation(Scheme::OneD, 5),
                          Aggregation(Scheme::AggI, 5, 9), Aggregation(Scheme::AggI, 3, 5),
                          Aggregation(Scheme::AggII, 5, 5)}) {
    for (const auto& s : agg.states()) CHECK(agg.aggregate(agg.seed_state(s)) == s);
  }
  CHECK(Aggregation(Scheme::NoTte, 5).seed_state({0, 1, 5}) == DetailedState::binary(5));

  const Aggregation agg1(Scheme::AggI, 3, 5);
  const auto seeded = agg1.seed_state({2, 2, 1});
  CHECK(empty_lines(seeded) == 1);
  CHECK(clique_with_oldest(seeded).lifetime == 2);
  CHECK(clique_with_oldest(seeded).size() == 2);
  CHECK_THROWS_AS((void)Aggregation(Scheme::NoTte, 5).seed_state({0, 5, 1}), Error);
}

TEST_CASE("fiber size of (3,1) at K=4") {
  const DetailedSpace space(4);
  const Aggregation agg(Scheme::NoTte, 4);
  int fiber = 0;
  for (int i = 0; i < space.size(); ++i)
    if (agg.aggregate(space.state(i)) == AggregatedState{0, 3, 1}) ++fiber;
  CHECK(fiber == 32);
}

TEST_CASE("property: C never exceeds L") {
  Rng rng(3);
  std::uniform_int_distribution<int> tau(0, 6);
  const Aggregation agg1(Scheme::AggI, 5, 6), agg2(Scheme::AggII, 5, 6);
  for (int trial = 0; trial < 2000; ++trial) {
    auto s = DetailedState::tte(5, 6);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        if (i != j && tau(rng) > 3) s.set(i, j, tau(rng));
    if (s.all_empty()) continue;
    CHECK(oldest_clique_size(s) <= max_clique_size(s));
    const auto a = agg1.aggregate(s);
    const auto b = agg2.aggregate(s);
    CHECK(a.clique <= b.clique);
    CHECK(a.oldest == b.oldest);
    CHECK(a.empty == b.empty);
  }
}

TEST_CASE("policies are constant on fibers") {
  const Aggregation agg(Scheme::NoTte, 4);
  const Policy sg = semi_greedy_policy(agg);
  CHECK(policy_string(sg) == "11112222222");
  sg.validate(agg);
  Policy bad = sg;
  bad.actions[0] = Action::EmptyLine;
  CHECK_THROWS_AS(bad.validate(agg), Error);
  CHECK_THROWS_AS(sg.validate(Aggregation(Scheme::NoTte, 5)), Error);
}

TEST_CASE("threshold and MSG rules") {
  const Aggregation oned(Scheme::OneD, 5);
  CHECK(policy_string(threshold_policy(oned, 3)) == "22111");
  const Aggregation agg2(Scheme::AggII, 5, 5);
  const Policy msg = msg_policy(agg2);
  for (int i = 0; i < agg2.size(); ++i) {
    const auto& s = agg2.state(i);
    if (s.oldest == 1) CHECK(msg[i] == Action::CliqueWithOldest);
    if (s.oldest > 1 && s.empty > 0) CHECK(msg[i] == Action::EmptyLine);
  }
  CHECK(all_policies(Aggregation(Scheme::OneD, 4)).size() == 4);
}
