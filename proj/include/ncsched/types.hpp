#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncsched {

/// Set of user indices packed into a bitmask; bit u is user u (0-based).
using UserSet = std::uint32_t;

/// Upper bound on K. Clique search and the bitmask representation rely on it.
inline constexpr int kMaxUsers = 16;

using Rng = std::mt19937_64;

inline int set_size(UserSet s) noexcept { return std::popcount(s); }
inline bool contains(UserSet s, int user) noexcept { return ((s >> user) & 1u) != 0; }
inline UserSet singleton(int user) noexcept { return UserSet{1} << user; }
inline UserSet all_users(int users) noexcept { return (UserSet{1} << users) - 1u; }

std::vector<int> members(UserSet s);
std::string format_set(UserSet s);

/// Orders sets by their sorted member lists.
bool lexicographic_less(UserSet a, UserSet b) noexcept;

/// Uniform pick of one set bit. `s` must be nonempty.
int pick_member(UserSet s, Rng& rng);

enum class ErrorCode {
  InvalidArgument,
  AllExpired,
  NotAClique,
  EmptyCombination,
  ModeMismatch,
  Unrepresentable,
  InfeasibleAction,
  NoData,
  AmbiguousSlice,
  TooLarge,
  DegeneratePolicy,
  SchemeMismatch,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ncsched
