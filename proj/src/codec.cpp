#include "ncsched/codec.hpp"

#include <algorithm>

#include "ncsched/types.hpp"

namespace ncsched {

namespace {

void xor_into(std::vector<std::uint8_t>& acc, std::span<const std::uint8_t> payload) {
  if (payload.size() > acc.size()) acc.resize(payload.size(), 0);
  std::transform(payload.begin(), payload.end(), acc.begin(), acc.begin(),
                 [](std::uint8_t a, std::uint8_t b) { return static_cast<std::uint8_t>(a ^ b); });
}

}  // namespace

std::vector<std::uint8_t> xor_combine(std::span<const Packet> packets,
                                      std::span<const std::uint8_t> coefficients) {
  if (coefficients.size() != packets.size()) {
    throw Error(ErrorCode::InvalidArgument, "one coefficient per packet is required");
  }
  std::vector<std::uint8_t> out;
  bool any = false;
  for (std::size_t i = 0; i < packets.size(); ++i) {
    if (coefficients[i] > 1) throw Error(ErrorCode::InvalidArgument, "coefficients are binary");
    if (coefficients[i] == 0) continue;
    any = true;
    xor_into(out, packets[i].payload);
  }
  if (!any) throw Error(ErrorCode::EmptyCombination, "the zero packet is not a transmission");
  return out;
}

std::vector<std::uint8_t> recover(std::span<const std::uint8_t> coded, std::span<const Packet> known,
                                  std::size_t length) {
  std::vector<std::uint8_t> out(coded.begin(), coded.end());
  for (const Packet& p : known) xor_into(out, p.payload);
  if (length > out.size()) throw Error(ErrorCode::InvalidArgument, "requested length exceeds coded payload");
  out.resize(length);
  return out;
}

}  // namespace ncsched
