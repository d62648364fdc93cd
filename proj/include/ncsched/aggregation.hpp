#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ncsched/state.hpp"

namespace ncsched {

/// NoTte: (L, E) on binary states. AggI: (F, C, E) and AggII: (F, L, E) on
/// TTE states. OneD: (L) on binary states.
enum class Scheme { NoTte, AggI, AggII, OneD };

const char* to_string(Scheme scheme) noexcept;
Scheme parse_scheme(const std::string& name);
inline bool uses_tte(Scheme scheme) noexcept { return scheme == Scheme::AggI || scheme == Scheme::AggII; }

/// Restricted action labels. Under NoTte and OneD label 1 sends the global
/// maximal clique; under OneD label 2 sends an e-line (any user outside it).
enum class Action : int { CliqueWithOldest = 1, EmptyLine = 2, GlobalMaxClique = 3 };

inline constexpr int kActionSlots = 4;  // indexed by label, slot 0 unused
inline constexpr Action kAllActions[] = {Action::CliqueWithOldest, Action::EmptyLine, Action::GlobalMaxClique};

inline int label(Action a) noexcept { return static_cast<int>(a); }
Action action_from_label(int value);

/// Components unused by a scheme are 0. The all-empty TTE matrix is the
/// sentinel (F=0, C=0, E=K).
struct AggregatedState {
  int oldest = 0;  // F
  int clique = 1;  // C under AggI, L otherwise
  int empty = 0;   // E

  bool operator==(const AggregatedState&) const = default;
};

class Aggregation {
 public:
  Aggregation(Scheme scheme, int users, int lifetime = 0);

  Scheme scheme() const noexcept { return scheme_; }
  int users() const noexcept { return users_; }
  int lifetime() const noexcept { return lifetime_; }

  /// Enumerated states, ordered by E, then C/L, then F (all ascending).
  int size() const noexcept { return static_cast<int>(states_.size()); }
  const std::vector<AggregatedState>& states() const noexcept { return states_; }
  const AggregatedState& state(int index) const { return states_.at(static_cast<std::size_t>(index)); }
  std::optional<int> find(const AggregatedState& s) const noexcept;
  /// Throws Unrepresentable.
  int index_of(const AggregatedState& s) const;
  /// Index of the all-empty matrix's class.
  int empty_matrix_index() const;

  bool representable(const AggregatedState& s) const noexcept;

  AggregatedState aggregate(const DetailedState& s) const;
  int aggregate_index(const DetailedState& s) const { return index_of(aggregate(s)); }

  std::vector<Action> feasible_actions(const AggregatedState& s) const;
  bool feasible(const AggregatedState& s, Action a) const;
  bool feasible(int index, Action a) const { return feasible(state(index), a); }

  /// Canonical detailed state whose aggregate is `s`. Throws Unrepresentable.
  DetailedState seed_state(const AggregatedState& s) const;

  /// Names of the components, in (F, C/L, E) order, restricted to the scheme.
  std::vector<std::string> component_names() const;
  std::vector<int> components(const AggregatedState& s) const;
  std::string describe(const AggregatedState& s) const;

 private:
  std::size_t key(const AggregatedState& s) const noexcept;

  Scheme scheme_;
  int users_;
  int lifetime_;
  std::vector<AggregatedState> states_;
  std::vector<int> lookup_;
};

}  // namespace ncsched
