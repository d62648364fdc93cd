#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ncsched/types.hpp"

namespace ncsched {

/// How a failed uncoded transmission updates the intended user's row in
/// binary mode. Accumulate keeps earlier copies; Literal rewrites the row
/// to exactly the users that heard this slot.
enum class StorageRule { Accumulate, Literal };

/// K x K storage matrix. Entry (i, j) > 0 means user j stores the pending
/// packet of user i. Binary mode holds {0, 1}; TTE mode holds the remaining
/// lifetime in {0..T}.
class DetailedState {
 public:
  DetailedState() = default;

  static DetailedState binary(int users);
  static DetailedState tte(int users, int lifetime);
  /// `lifetime` 0 builds a binary state.
  static DetailedState from_rows(const std::vector<std::vector<int>>& rows, int lifetime = 0);

  int users() const noexcept { return users_; }
  bool is_tte() const noexcept { return lifetime_ > 0; }
  int lifetime() const noexcept { return lifetime_; }
  /// Value written for a fresh copy: 1 in binary mode, T in TTE mode.
  int fresh_value() const noexcept { return is_tte() ? lifetime_ : 1; }

  int at(int row, int col) const noexcept { return cells_[static_cast<std::size_t>(row * users_ + col)]; }
  void set(int row, int col, int value);

  /// Users holding `row`'s pending packet.
  UserSet holders(int row) const noexcept;
  bool row_empty(int row) const noexcept;
  void clear_row(int row) noexcept;
  bool all_empty() const noexcept;

  bool operator==(const DetailedState&) const = default;

  std::string to_string() const;

 private:
  DetailedState(int users, int lifetime);

  int users_ = 0;
  int lifetime_ = 0;
  std::vector<std::uint8_t> cells_;
};

/// Per-user success flags for one slot.
struct ReceptionVector {
  int users = 0;
  UserSet received = 0;

  bool operator[](int user) const noexcept { return contains(received, user); }
  static ReceptionVector from_flags(const std::vector<bool>& flags);
};

struct SlotOutcome {
  DetailedState next_state;
  int reward = 0;
  UserSet decoded = 0;
  /// Row refreshed by a failed uncoded transmission, if any.
  std::optional<int> refreshed_row;
};

int empty_lines(const DetailedState& s) noexcept;
UserSet empty_rows(const DetailedState& s) noexcept;
UserSet nonempty_rows(const DetailedState& s) noexcept;

/// mutual[i] has bit j set iff s(i,j) > 0 and s(j,i) > 0.
std::vector<UserSet> mutual_adjacency(const DetailedState& s);

bool is_clique(const DetailedState& s, UserSet users);

/// All maximum-cardinality cliques. When no pair is mutual the result is
/// the singletons of non-empty rows, or every singleton for the empty matrix.
std::vector<UserSet> maximum_cliques(const DetailedState& s);
int max_clique_size(const DetailedState& s);
/// Lexicographically smallest maximum clique.
UserSet max_clique(const DetailedState& s);
/// Uniformly drawn maximum clique.
UserSet max_clique(const DetailedState& s, Rng& rng);

/// Minimum strictly positive entry (F). Throws AllExpired on an empty matrix.
int oldest_lifetime(const DetailedState& s);

struct OldestClique {
  int lifetime = 0;  // F
  UserSet clique = 0;

  int size() const noexcept { return set_size(clique); }
};

/// Every maximum clique among those containing a row that holds an entry
/// equal to F, deduplicated.
std::vector<UserSet> oldest_cliques(const DetailedState& s);
/// Size of those cliques (C). Throws AllExpired.
int oldest_clique_size(const DetailedState& s);
OldestClique clique_with_oldest(const DetailedState& s);
OldestClique clique_with_oldest(const DetailedState& s, Rng& rng);

/// Decodes, clears and stores per the reception flags. Does not age.
SlotOutcome apply_outcome(const DetailedState& s, UserSet combo, const ReceptionVector& rx,
                          StorageRule rule = StorageRule::Accumulate);

/// Decrements every positive entry. `fresh_row`, when given, is left as is.
DetailedState age_tte(const DetailedState& s, std::optional<int> fresh_row = std::nullopt);

/// One full slot: apply_outcome, then (TTE mode) age every row except the
/// one refreshed this slot.
SlotOutcome transmit(const DetailedState& s, UserSet combo, const ReceptionVector& rx,
                     StorageRule rule = StorageRule::Accumulate);

}  // namespace ncsched
