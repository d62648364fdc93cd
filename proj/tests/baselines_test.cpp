#include <doctest.h>

#include "fixtures.hpp"
#include "ncsched/baselines.hpp"

using namespace ncsched;

TEST_CASE("baseline names") {
  for (auto id : {BaselineId::Uncoded, BaselineId::Greedy, BaselineId::SemiGreedy, BaselineId::ModifiedSemiGreedy,
                  BaselineId::RandomRestricted}) {
    CHECK(parse_baseline(to_string(id)) == id);
  }
  CHECK_THROWS_AS(parse_baseline("optimal"), Error);
}

TEST_CASE("semi-greedy sends the clique when no line is empty") {
  Rng rng(1);
  int cursor = 0;
  const auto d = decide(BaselineId::SemiGreedy, fixtures::five_user_a(), rng, cursor);
  CHECK(d.combo == 0b01110u);
  CHECK(d.action == 1);
  const auto e = decide(BaselineId::SemiGreedy, fixtures::four_user_s5(), rng, cursor);
  CHECK(e.combo == singleton(3));
  CHECK(e.action == 2);
}

TEST_CASE("greedy on the empty matrix picks a random singleton") {
  Rng rng(2);
  int cursor = 0;
  std::vector<int> hits(4, 0);
  for (int i = 0; i < 4000; ++i) {
    const auto d = decide(BaselineId::Greedy, DetailedState::binary(4), rng, cursor);
    REQUIRE(set_size(d.combo) == 1);
    ++hits[static_cast<std::size_t>(members(d.combo).front())];
  }
  for (int h : hits) CHECK(h > 800);
  const auto c = decide(BaselineId::Greedy, fixtures::four_user_s5(), rng, cursor);
  CHECK(c.combo == 0b0111u);
}

TEST_CASE("MSG") {
  Rng rng(3);
  int cursor = 0;
  auto s = DetailedState::from_rows({{0, 4, 0, 0}, {4, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}}, 5);
  auto d = decide(BaselineId::ModifiedSemiGreedy, s, rng, cursor);
  CHECK(d.combo == singleton(2));
  s.set(2, 3, 3);
  d = decide(BaselineId::ModifiedSemiGreedy, s, rng, cursor);
  CHECK(d.combo == singleton(3));
  CHECK_THROWS_AS((void)decide(BaselineId::ModifiedSemiGreedy, DetailedState::binary(3), rng, cursor), Error);
}

TEST_CASE("property: MSG equals SG once every lifetime exceeds one") {
  Rng rng(4), a(5), b(5);
  std::uniform_int_distribution<int> tau(0, 5);
  int cursor = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    auto s = DetailedState::tte(4, 5);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j && tau(rng) > 2) s.set(i, j, 2 + tau(rng) % 4);
    const auto x = decide(BaselineId::ModifiedSemiGreedy, s, a, cursor);
    const auto y = decide(BaselineId::SemiGreedy, s, b, cursor);
    CHECK(x.combo == y.combo);
  }
}

TEST_CASE("uncoded is round-robin and never coded") {
  BaselineController c(BaselineId::Uncoded);
  Rng rng(6);
  for (int i = 0; i < 12; ++i) CHECK(c.decide(fixtures::five_user_a(), rng).combo == singleton(i % 5));
  c.reset();
  CHECK(c.decide(fixtures::five_user_a(), rng).combo == singleton(0));
}

TEST_CASE("random restricted needs an aggregation") {
  CHECK_THROWS_AS(BaselineController(BaselineId::RandomRestricted), Error);
  const Aggregation agg(Scheme::NoTte, 5);
  BaselineController c(BaselineId::RandomRestricted, &agg);
  Rng rng(7);
  CHECK(c.decide(fixtures::five_user_a(), rng).combo == 0b01110u);
}
