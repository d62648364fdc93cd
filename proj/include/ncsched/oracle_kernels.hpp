#pragma once

#include <vector>

#include "ncsched/channel.hpp"
#include "ncsched/policy.hpp"

namespace ncsched {

enum class Kernel { Serial, Parallel };

/// All binary K x K zero-diagonal matrices. Index bit b is the b-th
/// off-diagonal cell in row-major order; index 0 is the empty matrix.
class DetailedSpace {
 public:
  /// Throws TooLarge for K > 4 unless `allow_large` (hard cap K = 5).
  explicit DetailedSpace(int users, bool allow_large = false);

  int users() const noexcept { return users_; }
  int size() const noexcept { return size_; }
  DetailedState state(int index) const;
  int index_of(const DetailedState& s) const;

 private:
  int users_;
  int size_;
};

/// Sparse per-(state, action) successor lists of the binary detailed MDP.
/// Row (s, a) lives at row_ptr[s * kActionSlots + label(a)].
struct DetailedModel {
  int users = 0;
  Scheme scheme = Scheme::NoTte;
  std::vector<int> agg_index;
  std::vector<int> row_ptr;
  std::vector<int> next;
  std::vector<double> probability;
  /// probability x expected reward of the transition.
  std::vector<double> reward_mass;

  int states() const noexcept { return static_cast<int>(agg_index.size()); }
  std::size_t row(int s, Action a) const noexcept {
    return static_cast<std::size_t>(s) * kActionSlots + static_cast<std::size_t>(label(a));
  }
  bool available(int s, Action a) const noexcept { return row_ptr[row(s, a) + 1] > row_ptr[row(s, a)]; }
  double expected_reward(int s, Action a) const;
};

DetailedModel build_detailed_model(const DetailedSpace& space, const Aggregation& agg, const std::vector<double>& loss,
                                   StorageRule rule, Kernel kernel);

/// Markov chain of the detailed MDP under a policy over aggregated states.
struct Chain {
  std::vector<int> row_ptr;
  std::vector<int> next;
  std::vector<double> probability;
  std::vector<double> reward_mass;
  std::vector<double> reward;  // expected per state

  int states() const noexcept { return static_cast<int>(reward.size()); }
};

Chain policy_chain(const DetailedModel& model, const Policy& policy);

/// Discounted value by Jacobi iteration, stopped once the a-posteriori error
/// bound falls below `tol`.
std::vector<double> evaluate_discounted(const Chain& chain, double gamma, Kernel kernel, double tol = 1e-12);

/// Limiting distribution from `start` by lazy power iteration x <- x(I+P)/2.
std::vector<double> limiting_distribution(const Chain& chain, int start, Kernel kernel, double tol = 1e-14,
                                          int max_iterations = 2000000);

}  // namespace ncsched
