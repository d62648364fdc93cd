#include <doctest.h>

#include "fixtures.hpp"
#include "ncsched/state.hpp"

using namespace ncsched;

namespace {

ReceptionVector rx(int users, std::initializer_list<int> ok) {
  ReceptionVector r{users, 0};
  for (int u : ok) r.received |= singleton(u);
  return r;
}

DetailedState random_binary(int users, double density, Rng& rng) {
  std::bernoulli_distribution coin(density);
  DetailedState s = DetailedState::binary(users);
  for (int i = 0; i < users; ++i)
    for (int j = 0; j < users; ++j)
      if (i != j && coin(rng)) s.set(i, j, 1);
  return s;
}

}  // namespace

TEST_CASE("empty lines") {
  CHECK(empty_lines(fixtures::five_user_a()) == 0);
  CHECK(empty_lines(fixtures::five_user_b()) == 0);
  CHECK(empty_lines(DetailedState::binary(5)) == 5);
  CHECK(empty_lines(fixtures::four_user_s5()) == 1);
}

TEST_CASE("maximum clique") {
  CHECK(max_clique(fixtures::five_user_a()) == (singleton(1) | singleton(2) | singleton(3)));
  CHECK(max_clique_size(fixtures::five_user_b()) == 3);
  const auto both = maximum_cliques(fixtures::five_user_b());
  CHECK(both.size() == 2);
  CHECK(max_clique_size(DetailedState::binary(5)) == 1);
  CHECK(maximum_cliques(DetailedState::binary(3)).size() == 3);
  CHECK(max_clique_size(fixtures::four_user_sa()) == 1);
  CHECK(maximum_cliques(fixtures::four_user_sa()) == std::vector<UserSet>{singleton(1)});
}

TEST_CASE("clique with the oldest line") {
  const auto s = DetailedState::from_rows({{0, 3, 0}, {2, 0, 4}, {0, 0, 0}}, 5);
  auto oc = clique_with_oldest(s);
  CHECK(oc.lifetime == 2);
  CHECK(oc.clique == (singleton(0) | singleton(1)));

  const auto t = fixtures::oldest_outside_clique();
  oc = clique_with_oldest(t);
  CHECK(oc.lifetime == 1);
  CHECK(oc.clique == singleton(3));
  CHECK(max_clique_size(t) == 3);

  auto single = DetailedState::tte(3, 5);
  single.set(0, 1, 4);
  CHECK(clique_with_oldest(single).lifetime == 4);
  CHECK(clique_with_oldest(single).size() == 1);

  CHECK_THROWS_AS(clique_with_oldest(DetailedState::tte(3, 5)), Error);
}

TEST_CASE("apply_outcome examples") {
  const auto out = apply_outcome(fixtures::four_user_s5(), 0b0111, rx(4, {0, 2}));
  CHECK(out.reward == 2);
  CHECK(out.decoded == 0b0101u);
  CHECK(out.next_state == fixtures::four_user_sa());

  const auto s = fixtures::five_user_a();
  const auto ok = apply_outcome(s, singleton(1), rx(5, {1}));
  CHECK(ok.reward == 1);
  CHECK(ok.next_state.row_empty(1));

  const auto miss = apply_outcome(DetailedState::binary(3), singleton(0), rx(3, {1}));
  CHECK(miss.reward == 0);
  CHECK(miss.next_state.at(0, 1) == 1);
  CHECK(miss.next_state.at(0, 2) == 0);
  CHECK(miss.refreshed_row == 0);
}

TEST_CASE("apply_outcome rejects non-cliques and empty combinations") {
  const auto s = fixtures::four_user_s5();
  try {
    (void)apply_outcome(s, 0b1001, rx(4, {}));
    FAIL("expected NotAClique");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAClique);
  }
  CHECK_THROWS_AS((void)apply_outcome(s, 0, rx(4, {})), Error);
}

TEST_CASE("storage rules differ on prior copies") {
  auto s = DetailedState::binary(3);
  s.set(0, 2, 1);
  const auto acc = apply_outcome(s, singleton(0), rx(3, {1}), StorageRule::Accumulate);
  CHECK(acc.next_state.at(0, 2) == 1);
  CHECK(acc.next_state.at(0, 1) == 1);
  const auto lit = apply_outcome(s, singleton(0), rx(3, {1}), StorageRule::Literal);
  CHECK(lit.next_state.at(0, 2) == 0);
  CHECK(lit.next_state.at(0, 1) == 1);
}

TEST_CASE("TTE aging") {
  const auto s = DetailedState::from_rows({{0, 3}, {1, 0}}, 5);
  CHECK(age_tte(s) == DetailedState::from_rows({{0, 2}, {0, 0}}, 5));
  CHECK(age_tte(DetailedState::tte(3, 4)) == DetailedState::tte(3, 4));

  // A failed uncoded send refreshes every holder to T and is exempt from this slot's aging.
  auto t = DetailedState::tte(3, 4);
  t.set(0, 2, 2);
  t.set(1, 0, 3);
  const auto out = transmit(t, singleton(0), rx(3, {1}));
  CHECK(out.next_state.at(0, 1) == 4);
  CHECK(out.next_state.at(0, 2) == 4);
  CHECK(out.next_state.at(1, 0) == 2);
  CHECK_THROWS_AS((void)age_tte(DetailedState::binary(3)), Error);
}

TEST_CASE("state validity") {
  CHECK_THROWS_AS(DetailedState::binary(1), Error);
  auto s = DetailedState::binary(3);
  CHECK_THROWS_AS(s.set(1, 1, 1), Error);
  CHECK_THROWS_AS(s.set(0, 1, 2), Error);
  auto t = DetailedState::tte(3, 4);
  CHECK_THROWS_AS(t.set(0, 1, 5), Error);
  CHECK_THROWS_AS(DetailedState::from_rows({{0, 1}, {1, 0, 0}}), Error);
}

TEST_CASE("property: slot dynamics") {
  Rng rng(7);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 3000; ++trial) {
    const int users = 3 + trial % 4;
    const DetailedState s = random_binary(users, 0.4 + 0.1 * (trial % 5), rng);
    ReceptionVector r{users, 0};
    for (int u = 0; u < users; ++u)
      if (coin(rng)) r.received |= singleton(u);

    const UserSet clique = max_clique(s, rng);
    const auto coded = apply_outcome(s, clique, r);
    CHECK(coded.reward == set_size(clique & r.received));
    CHECK(coded.reward == set_size(coded.decoded));
    CHECK(coded.reward <= set_size(clique));
    if (set_size(clique) > 1) CHECK(max_clique_size(coded.next_state) <= max_clique_size(s));
    for (int u = 0; u < users; ++u) {
      if (contains(clique, u)) continue;
      for (int j = 0; j < users; ++j) CHECK(coded.next_state.at(u, j) == s.at(u, j));
    }

    const int target = pick_member(all_users(users), rng);
    const auto plain = apply_outcome(s, singleton(target), r);
    CHECK(max_clique_size(plain.next_state) <= max_clique_size(s) + 1);
    for (int u = 0; u < users; ++u) {
      if (u == target) continue;
      for (int j = 0; j < users; ++j) CHECK(plain.next_state.at(u, j) == s.at(u, j));
    }
  }
}

TEST_CASE("property: TTE entries stay within lifetime") {
  Rng rng(11);
  std::bernoulli_distribution coin(0.6);
  const int users = 4, lifetime = 3;
  DetailedState s = DetailedState::tte(users, lifetime);
  for (int slot = 0; slot < 5000; ++slot) {
    ReceptionVector r{users, 0};
    for (int u = 0; u < users; ++u)
      if (coin(rng)) r.received |= singleton(u);
    const UserSet combo = (slot % 3 == 0 && !s.all_empty()) ? clique_with_oldest(s, rng).clique
                                                             : singleton(pick_member(all_users(users), rng));
    const auto out = transmit(s, combo, r);
    for (int i = 0; i < users; ++i)
      for (int j = 0; j < users; ++j) {
        const int v = out.next_state.at(i, j);
        CHECK(v >= 0);
        if (out.refreshed_row == i) {
          CHECK(v <= lifetime);
        } else {
          CHECK(v <= lifetime - 1);
        }
      }
    s = out.next_state;
  }
}
