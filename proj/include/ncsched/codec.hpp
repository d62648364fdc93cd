#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ncsched {

struct Packet {
  std::vector<std::uint8_t> payload;
  int owner = 0;
  std::uint64_t sequence = 0;
};

/// XOR of the payloads whose coefficient is 1. Shorter payloads are padded
/// with trailing zeros, so the result is as long as the longest selected one.
/// Throws EmptyCombination when every coefficient is 0.
std::vector<std::uint8_t> xor_combine(std::span<const Packet> packets,
                                      std::span<const std::uint8_t> coefficients);

/// Peels `known` packets off a coded payload and truncates to `length`.
/// Decoding is the same XOR as encoding.
std::vector<std::uint8_t> recover(std::span<const std::uint8_t> coded, std::span<const Packet> known,
                                  std::size_t length);

}  // namespace ncsched
