#include "ncsched/state.hpp"

#include <algorithm>
#include <sstream>

namespace ncsched {

std::vector<int> members(UserSet s) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(set_size(s)));
  while (s != 0) {
    out.push_back(std::countr_zero(s));
    s &= s - 1;
  }
  return out;
}

std::string format_set(UserSet s) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (int u : members(s)) {
    if (!first) os << ',';
    os << u;
    first = false;
  }
  os << '}';
  return os.str();
}

bool lexicographic_less(UserSet a, UserSet b) noexcept {
  if (a == b) return false;
  const UserSet diff = a ^ b;
  const UserSet lowest = diff & (~diff + 1u);
  const UserSet above = ~((lowest << 1) - 1u);
  if ((a & lowest) != 0) {
    // a continues with the differing element; b is smaller only if it ends here.
    return (b & above) != 0;
  }
  return (a & above) == 0;
}

int pick_member(UserSet s, Rng& rng) {
  const int n = set_size(s);
  std::uniform_int_distribution<int> dist(0, n - 1);
  int k = dist(rng);
  while (k-- > 0) s &= s - 1;
  return std::countr_zero(s);
}

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AllExpired: return "AllExpired";
    case ErrorCode::NotAClique: return "NotAClique";
    case ErrorCode::EmptyCombination: return "EmptyCombination";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::Unrepresentable: return "Unrepresentable";
    case ErrorCode::InfeasibleAction: return "InfeasibleAction";
    case ErrorCode::NoData: return "NoData";
    case ErrorCode::AmbiguousSlice: return "AmbiguousSlice";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::DegeneratePolicy: return "DegeneratePolicy";
    case ErrorCode::SchemeMismatch: return "SchemeMismatch";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------

DetailedState::DetailedState(int users, int lifetime)
    : users_(users), lifetime_(lifetime), cells_(static_cast<std::size_t>(users * users), 0) {
  if (users < 2 || users > kMaxUsers) {
    throw Error(ErrorCode::InvalidArgument, "user count must be in [2, " + std::to_string(kMaxUsers) + "]");
  }
  if (lifetime < 0 || lifetime > 255) {
    throw Error(ErrorCode::InvalidArgument, "lifetime must be in [1, 255]");
  }
}

DetailedState DetailedState::binary(int users) { return DetailedState(users, 0); }

DetailedState DetailedState::tte(int users, int lifetime) {
  if (lifetime < 1) throw Error(ErrorCode::InvalidArgument, "TTE lifetime must be >= 1");
  return DetailedState(users, lifetime);
}

DetailedState DetailedState::from_rows(const std::vector<std::vector<int>>& rows, int lifetime) {
  const int k = static_cast<int>(rows.size());
  DetailedState s = lifetime > 0 ? tte(k, lifetime) : binary(k);
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != k) {
      throw Error(ErrorCode::InvalidArgument, "storage matrix must be square");
    }
    for (int j = 0; j < k; ++j) s.set(i, j, rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
  }
  return s;
}

void DetailedState::set(int row, int col, int value) {
  if (row < 0 || row >= users_ || col < 0 || col >= users_) {
    throw Error(ErrorCode::InvalidArgument, "index out of range");
  }
  if (value < 0 || value > fresh_value()) {
    throw Error(ErrorCode::InvalidArgument, "entry " + std::to_string(value) + " outside [0, " +
                                                std::to_string(fresh_value()) + "]");
  }
  if (row == col && value != 0) throw Error(ErrorCode::InvalidArgument, "diagonal must stay zero");
  cells_[static_cast<std::size_t>(row * users_ + col)] = static_cast<std::uint8_t>(value);
}

UserSet DetailedState::holders(int row) const noexcept {
  UserSet out = 0;
  for (int j = 0; j < users_; ++j) {
    if (at(row, j) > 0) out |= singleton(j);
  }
  return out;
}

bool DetailedState::row_empty(int row) const noexcept {
  const auto* begin = cells_.data() + row * users_;
  return std::all_of(begin, begin + users_, [](std::uint8_t v) { return v == 0; });
}

void DetailedState::clear_row(int row) noexcept {
  std::fill_n(cells_.begin() + row * users_, users_, std::uint8_t{0});
}

bool DetailedState::all_empty() const noexcept {
  return std::all_of(cells_.begin(), cells_.end(), [](std::uint8_t v) { return v == 0; });
}

std::string DetailedState::to_string() const {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < users_; ++i) {
    os << (i ? ",[" : "[");
    for (int j = 0; j < users_; ++j) os << (j ? "," : "") << at(i, j);
    os << ']';
  }
  os << ']';
  return os.str();
}

ReceptionVector ReceptionVector::from_flags(const std::vector<bool>& flags) {
  ReceptionVector rx;
  rx.users = static_cast<int>(flags.size());
  for (int u = 0; u < rx.users; ++u) {
    if (flags[static_cast<std::size_t>(u)]) rx.received |= singleton(u);
  }
  return rx;
}

// ---------------------------------------------------------------------------

UserSet empty_rows(const DetailedState& s) noexcept {
  UserSet out = 0;
  for (int i = 0; i < s.users(); ++i) {
    if (s.row_empty(i)) out |= singleton(i);
  }
  return out;
}

UserSet nonempty_rows(const DetailedState& s) noexcept {
  return all_users(s.users()) & ~empty_rows(s);
}

int empty_lines(const DetailedState& s) noexcept { return set_size(empty_rows(s)); }

std::vector<UserSet> mutual_adjacency(const DetailedState& s) {
  const int k = s.users();
  std::vector<UserSet> adj(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (s.at(i, j) > 0 && s.at(j, i) > 0) {
        adj[static_cast<std::size_t>(i)] |= singleton(j);
        adj[static_cast<std::size_t>(j)] |= singleton(i);
      }
    }
  }
  return adj;
}

bool is_clique(const DetailedState& s, UserSet users) {
  if (users == 0) return false;
  const auto adj = mutual_adjacency(s);
  for (int u : members(users)) {
    if ((users & ~singleton(u) & ~adj[static_cast<std::size_t>(u)]) != 0) return false;
  }
  return true;
}

namespace {

// Bron-Kerbosch with pivoting; keeps only the cliques of the largest size seen.
class MaxCliqueCollector {
 public:
  explicit MaxCliqueCollector(const std::vector<UserSet>& adj) : adj_(adj) {}

  void run(UserSet r, UserSet p, UserSet x) {
    if (p == 0 && x == 0) {
      offer(r);
      return;
    }
    // Bound: even taking all of p cannot reach the best size.
    if (set_size(r) + set_size(p) < best_) return;
    const UserSet px = p | x;
    int pivot = std::countr_zero(px);
    int best_cover = -1;
    for (int u : members(px)) {
      const int cover = set_size(p & adj_[static_cast<std::size_t>(u)]);
      if (cover > best_cover) {
        best_cover = cover;
        pivot = u;
      }
    }
    UserSet candidates = p & ~adj_[static_cast<std::size_t>(pivot)];
    while (candidates != 0) {
      const int v = std::countr_zero(candidates);
      candidates &= candidates - 1;
      const UserSet nv = adj_[static_cast<std::size_t>(v)];
      run(r | singleton(v), p & nv, x & nv);
      p &= ~singleton(v);
      x |= singleton(v);
    }
  }

  const std::vector<UserSet>& cliques() const noexcept { return cliques_; }
  int best() const noexcept { return best_; }

 private:
  void offer(UserSet r) {
    const int n = set_size(r);
    if (n > best_) {
      best_ = n;
      cliques_.clear();
    }
    if (n == best_) cliques_.push_back(r);
  }

  const std::vector<UserSet>& adj_;
  std::vector<UserSet> cliques_;
  int best_ = 0;
};

UserSet lexicographic_min(const std::vector<UserSet>& sets) {
  return *std::min_element(sets.begin(), sets.end(), lexicographic_less);
}

UserSet uniform_pick(const std::vector<UserSet>& sets, Rng& rng) {
  std::uniform_int_distribution<std::size_t> dist(0, sets.size() - 1);
  return sets[dist(rng)];
}

}  // namespace

std::vector<UserSet> maximum_cliques(const DetailedState& s) {
  const auto adj = mutual_adjacency(s);
  MaxCliqueCollector collector(adj);
  collector.run(0, all_users(s.users()), 0);
  if (collector.best() >= 2) {
    auto out = collector.cliques();
    std::sort(out.begin(), out.end(), lexicographic_less);
    return out;
  }
  UserSet pool = nonempty_rows(s);
  if (pool == 0) pool = all_users(s.users());
  std::vector<UserSet> out;
  for (int u : members(pool)) out.push_back(singleton(u));
  return out;
}

int max_clique_size(const DetailedState& s) {
  const auto adj = mutual_adjacency(s);
  MaxCliqueCollector collector(adj);
  collector.run(0, all_users(s.users()), 0);
  return std::max(collector.best(), 1);
}

UserSet max_clique(const DetailedState& s) { return lexicographic_min(maximum_cliques(s)); }

UserSet max_clique(const DetailedState& s, Rng& rng) { return uniform_pick(maximum_cliques(s), rng); }

int oldest_lifetime(const DetailedState& s) {
  int best = 0;
  for (int i = 0; i < s.users(); ++i) {
    for (int j = 0; j < s.users(); ++j) {
      const int v = s.at(i, j);
      if (v > 0 && (best == 0 || v < best)) best = v;
    }
  }
  if (best == 0) throw Error(ErrorCode::AllExpired, "no stored packet; use empty-line logic");
  return best;
}

std::vector<UserSet> oldest_cliques(const DetailedState& s) {
  const int f = oldest_lifetime(s);
  const auto adj = mutual_adjacency(s);
  std::vector<UserSet> out;
  int best = 0;
  for (int r = 0; r < s.users(); ++r) {
    bool holds_f = false;
    for (int j = 0; j < s.users(); ++j) holds_f = holds_f || s.at(r, j) == f;
    if (!holds_f) continue;
    MaxCliqueCollector collector(adj);
    collector.run(singleton(r), adj[static_cast<std::size_t>(r)], 0);
    if (collector.best() > best) {
      best = collector.best();
      out.clear();
    }
    if (collector.best() == best) {
      for (UserSet c : collector.cliques()) {
        if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
      }
    }
  }
  std::sort(out.begin(), out.end(), lexicographic_less);
  return out;
}

int oldest_clique_size(const DetailedState& s) { return set_size(oldest_cliques(s).front()); }

OldestClique clique_with_oldest(const DetailedState& s) {
  return OldestClique{oldest_lifetime(s), lexicographic_min(oldest_cliques(s))};
}

OldestClique clique_with_oldest(const DetailedState& s, Rng& rng) {
  return OldestClique{oldest_lifetime(s), uniform_pick(oldest_cliques(s), rng)};
}

// ---------------------------------------------------------------------------

SlotOutcome apply_outcome(const DetailedState& s, UserSet combo, const ReceptionVector& rx,
                          StorageRule rule) {
  if (combo == 0) throw Error(ErrorCode::EmptyCombination, "transmission must carry at least one packet");
  if ((combo & ~all_users(s.users())) != 0) throw Error(ErrorCode::InvalidArgument, "combination names unknown user");
  if (rx.users != s.users()) throw Error(ErrorCode::InvalidArgument, "reception vector length differs from K");
  if (set_size(combo) > 1 && !is_clique(s, combo)) {
    throw Error(ErrorCode::NotAClique, format_set(combo) + " is not instantly decodable");
  }

  SlotOutcome out;
  out.next_state = s;
  for (int u : members(combo)) {
    if (rx[u]) {
      out.next_state.clear_row(u);
      out.decoded |= singleton(u);
      ++out.reward;
    }
  }

  // Only uncoded packets are stored by bystanders.
  if (set_size(combo) == 1 && out.decoded == 0) {
    const int u = std::countr_zero(combo);
    for (int k = 0; k < s.users(); ++k) {
      if (k == u) continue;
      const bool heard = rx[k];
      if (rule == StorageRule::Literal && !s.is_tte()) {
        out.next_state.set(u, k, heard ? 1 : 0);
      } else if (heard || s.at(u, k) > 0) {
        out.next_state.set(u, k, s.fresh_value());
      }
    }
    out.refreshed_row = u;
  }
  return out;
}

DetailedState age_tte(const DetailedState& s, std::optional<int> fresh_row) {
  if (!s.is_tte()) throw Error(ErrorCode::ModeMismatch, "aging applies to TTE states only");
  DetailedState next = s;
  for (int i = 0; i < s.users(); ++i) {
    if (fresh_row && *fresh_row == i) continue;
    for (int j = 0; j < s.users(); ++j) {
      const int v = s.at(i, j);
      if (v > 0) next.set(i, j, v - 1);
    }
  }
  return next;
}

SlotOutcome transmit(const DetailedState& s, UserSet combo, const ReceptionVector& rx, StorageRule rule) {
  SlotOutcome out = apply_outcome(s, combo, rx, rule);
  if (s.is_tte()) out.next_state = age_tte(out.next_state, out.refreshed_row);
  return out;
}

}  // namespace ncsched
