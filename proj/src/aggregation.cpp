#include "ncsched/aggregation.hpp"

#include <sstream>

namespace ncsched {

const char* to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::NoTte: return "notte";
    case Scheme::AggI: return "agg1";
    case Scheme::AggII: return "agg2";
    case Scheme::OneD: return "oned";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "notte") return Scheme::NoTte;
  if (name == "agg1") return Scheme::AggI;
  if (name == "agg2") return Scheme::AggII;
  if (name == "oned") return Scheme::OneD;
  throw Error(ErrorCode::InvalidArgument, "unknown scheme '" + name + "' (notte|agg1|agg2|oned)");
}

Action action_from_label(int value) {
  if (value < 1 || value > 3) throw Error(ErrorCode::InvalidArgument, "action label must be 1, 2 or 3");
  return static_cast<Action>(value);
}

Aggregation::Aggregation(Scheme scheme, int users, int lifetime)
    : scheme_(scheme), users_(users), lifetime_(uses_tte(scheme) ? lifetime : 0) {
  if (users < 2 || users > kMaxUsers) {
    throw Error(ErrorCode::InvalidArgument, "aggregation needs 2 <= K <= " + std::to_string(kMaxUsers));
  }
  if (uses_tte(scheme) && lifetime < 1) {
    throw Error(ErrorCode::InvalidArgument, std::string(to_string(scheme)) + " requires a TTE lifetime >= 1");
  }

  if (scheme_ == Scheme::OneD) {
    for (int l = 1; l <= users_; ++l) states_.push_back({0, l, 0});
  } else if (scheme_ == Scheme::NoTte) {
    for (int e = 0; e <= users_; ++e) {
      for (int l = 1; l <= users_; ++l) {
        AggregatedState s{0, l, e};
        if (representable(s)) states_.push_back(s);
      }
    }
  } else {
    for (int e = 0; e < users_; ++e) {
      for (int c = 1; c <= users_; ++c) {
        for (int f = 1; f <= lifetime_; ++f) {
          AggregatedState s{f, c, e};
          if (representable(s)) states_.push_back(s);
        }
      }
    }
    states_.push_back({0, 0, users_});
  }

  lookup_.assign(key({lifetime_, users_, users_}) + 1, -1);
  for (int i = 0; i < size(); ++i) lookup_[key(states_[static_cast<std::size_t>(i)])] = i;
}

std::size_t Aggregation::key(const AggregatedState& s) const noexcept {
  const auto width = static_cast<std::size_t>(users_ + 1);
  return (static_cast<std::size_t>(s.oldest) * width + static_cast<std::size_t>(s.clique)) * width +
         static_cast<std::size_t>(s.empty);
}

bool Aggregation::representable(const AggregatedState& s) const noexcept {
  const int k = users_;
  if (s.clique < 0 || s.clique > k || s.empty < 0 || s.empty > k || s.oldest < 0) return false;
  switch (scheme_) {
    case Scheme::OneD:
      return s.oldest == 0 && s.empty == 0 && s.clique >= 1;
    case Scheme::NoTte: {
      if (s.oldest != 0) return false;
      if (s.empty == k) return s.clique == 1;
      const int rows = k - s.empty;
      if (s.clique < 1 || s.clique > rows) return false;
      // With K=2 two non-empty rows always hold each other's packets.
      return !(s.clique == 1 && s.empty == 0 && k == 2);
    }
    case Scheme::AggI:
    case Scheme::AggII: {
      if (s.empty == k) return s.oldest == 0 && s.clique == 0;
      const int rows = k - s.empty;
      if (s.oldest < 1 || s.clique < 1 || s.clique > rows) return false;
      // Rows refresh one per slot, so non-empty rows carry distinct lifetimes.
      if (s.oldest + rows - 1 > lifetime_) return false;
      return !(s.clique == 1 && s.empty == 0 && k == 2);
    }
  }
  return false;
}

std::optional<int> Aggregation::find(const AggregatedState& s) const noexcept {
  if (!representable(s)) return std::nullopt;
  const std::size_t k = key(s);
  if (k >= lookup_.size() || lookup_[k] < 0) return std::nullopt;
  return lookup_[k];
}

int Aggregation::index_of(const AggregatedState& s) const {
  if (auto idx = find(s)) return *idx;
  throw Error(ErrorCode::Unrepresentable, describe(s) + " is not an enumerated " + to_string(scheme_) + " state");
}

int Aggregation::empty_matrix_index() const {
  switch (scheme_) {
    case Scheme::OneD: return index_of({0, 1, 0});
    case Scheme::NoTte: return index_of({0, 1, users_});
    default: return index_of({0, 0, users_});
  }
}

AggregatedState Aggregation::aggregate(const DetailedState& s) const {
  if (s.users() != users_) throw Error(ErrorCode::InvalidArgument, "state has a different user count");
  if (s.is_tte() != uses_tte(scheme_)) {
    throw Error(ErrorCode::ModeMismatch, std::string(to_string(scheme_)) +
                                             (uses_tte(scheme_) ? " needs a TTE state" : " needs a binary state"));
  }
  if (uses_tte(scheme_) && s.lifetime() != lifetime_) {
    throw Error(ErrorCode::ModeMismatch, "state lifetime differs from the scheme's T");
  }
  switch (scheme_) {
    case Scheme::OneD:
      return {0, max_clique_size(s), 0};
    case Scheme::NoTte:
      return {0, max_clique_size(s), empty_lines(s)};
    case Scheme::AggI: {
      const int e = empty_lines(s);
      if (e == users_) return {0, 0, e};
      return {oldest_lifetime(s), oldest_clique_size(s), e};
    }
    case Scheme::AggII: {
      const int e = empty_lines(s);
      if (e == users_) return {0, 0, e};
      return {oldest_lifetime(s), max_clique_size(s), e};
    }
  }
  return {};
}

std::vector<Action> Aggregation::feasible_actions(const AggregatedState& s) const {
  std::vector<Action> out;
  switch (scheme_) {
    case Scheme::OneD:
      if (s.clique >= 2) out.push_back(Action::CliqueWithOldest);
      if (s.clique < users_) out.push_back(Action::EmptyLine);
      break;
    case Scheme::NoTte:
      if (s.empty < users_) out.push_back(Action::CliqueWithOldest);
      if (s.empty > 0) out.push_back(Action::EmptyLine);
      break;
    case Scheme::AggI:
    case Scheme::AggII:
      if (s.empty < users_) out.push_back(Action::CliqueWithOldest);
      if (s.empty > 0) out.push_back(Action::EmptyLine);
      if (scheme_ == Scheme::AggII && s.empty < users_) out.push_back(Action::GlobalMaxClique);
      break;
  }
  return out;
}

bool Aggregation::feasible(const AggregatedState& s, Action a) const {
  for (Action f : feasible_actions(s)) {
    if (f == a) return true;
  }
  return false;
}

DetailedState Aggregation::seed_state(const AggregatedState& target) const {
  if (!representable(target)) {
    throw Error(ErrorCode::Unrepresentable, describe(target) + " has no detailed preimage");
  }
  const int k = users_;
  DetailedState s = uses_tte(scheme_) ? DetailedState::tte(k, lifetime_) : DetailedState::binary(k);

  int clique = target.clique;
  int rows = k - target.empty;
  if (scheme_ == Scheme::OneD) {
    // Clique on the lowest users, every other row empty.
    if (clique == 1) return s;
    rows = clique;
  }
  if (rows == 0) return s;

  auto value_of = [&](int row) { return uses_tte(scheme_) ? target.oldest + row : 1; };
  const bool has_empty = rows < k;
  const int sink = k - 1;  // an empty row when has_empty

  for (int r = 0; r < rows; ++r) {
    const int v = value_of(r);
    if (r < clique && clique >= 2) {
      for (int j = 0; j < clique; ++j) {
        if (j != r) s.set(r, j, v);
      }
    } else if (has_empty) {
      s.set(r, sink, v);
    } else if (clique >= 2) {
      s.set(r, 0, v);
    } else {
      // No mutual pair allowed: 0 -> 1 -> 2 and every later row -> 0.
      s.set(r, r <= 1 ? r + 1 : 0, v);
    }
  }

  if (aggregate(s) != target) {
    throw Error(ErrorCode::Unrepresentable, "seed construction failed for " + describe(target));
  }
  return s;
}

std::vector<std::string> Aggregation::component_names() const {
  switch (scheme_) {
    case Scheme::OneD: return {"L"};
    case Scheme::NoTte: return {"L", "E"};
    case Scheme::AggI: return {"F", "C", "E"};
    case Scheme::AggII: return {"F", "L", "E"};
  }
  return {};
}

std::vector<int> Aggregation::components(const AggregatedState& s) const {
  switch (scheme_) {
    case Scheme::OneD: return {s.clique};
    case Scheme::NoTte: return {s.clique, s.empty};
    default: return {s.oldest, s.clique, s.empty};
  }
}

std::string Aggregation::describe(const AggregatedState& s) const {
  std::ostringstream os;
  const auto names = component_names();
  const auto values = components(s);
  os << '(';
  for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i] << '=' << values[i];
  os << ')';
  return os.str();
}

}  // namespace ncsched
