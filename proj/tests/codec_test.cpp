#include <doctest.h>

#include <algorithm>
#include <random>

#include "ncsched/codec.hpp"
#include "ncsched/types.hpp"

using namespace ncsched;

namespace {

Packet make_packet(int owner, std::size_t length, Rng& rng) {
  std::uniform_int_distribution<int> byte(0, 255);
  Packet p{{}, owner, static_cast<std::uint64_t>(owner)};
  for (std::size_t i = 0; i < length; ++i) p.payload.push_back(static_cast<std::uint8_t>(byte(rng)));
  return p;
}

}  // namespace

TEST_CASE("single coefficient returns the payload") {
  Rng rng(1);
  std::vector<Packet> ps{make_packet(0, 8, rng), make_packet(1, 5, rng)};
  const std::vector<std::uint8_t> coeff{0, 1};
  CHECK(xor_combine(ps, coeff) == ps[1].payload);
}

TEST_CASE("xor is its own inverse") {
  Rng rng(2);
  std::vector<Packet> ps{make_packet(0, 6, rng), make_packet(1, 6, rng)};
  const auto z = xor_combine(ps, std::vector<std::uint8_t>{1, 1});
  CHECK(recover(z, std::span<const Packet>(ps).subspan(1), 6) == ps[0].payload);
}

TEST_CASE("all-zero coefficients are rejected") {
  Rng rng(3);
  std::vector<Packet> ps{make_packet(0, 4, rng)};
  try {
    (void)xor_combine(ps, std::vector<std::uint8_t>{0});
    FAIL("expected EmptyCombination");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyCombination);
  }
}

TEST_CASE("property: combine then peel recovers each constituent") {
  Rng rng(4);
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_int_distribution<std::size_t> length(0, 64);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = count(rng);
    std::vector<Packet> ps;
    for (int i = 0; i < n; ++i) ps.push_back(make_packet(i, length(rng), rng));
    if (std::all_of(ps.begin(), ps.end(), [](const Packet& p) { return p.payload.empty(); })) continue;
    const std::vector<std::uint8_t> ones(static_cast<std::size_t>(n), 1);
    const auto z = xor_combine(ps, ones);
    for (int target = 0; target < n; ++target) {
      std::vector<Packet> others;
      for (int i = 0; i < n; ++i)
        if (i != target) others.push_back(ps[static_cast<std::size_t>(i)]);
      const auto& want = ps[static_cast<std::size_t>(target)].payload;
      CHECK(recover(z, others, want.size()) == want);
    }
  }
}

TEST_CASE("property: order of packets does not matter") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Packet> ps{make_packet(0, 10, rng), make_packet(1, 3, rng), make_packet(2, 7, rng)};
    const std::vector<std::uint8_t> ones{1, 1, 1};
    const auto z = xor_combine(ps, ones);
    std::shuffle(ps.begin(), ps.end(), rng);
    CHECK(xor_combine(ps, ones) == z);
    CHECK(z.size() == 10);
  }
}
