#pragma once

#include "ncsched/state.hpp"

namespace fixtures {

// Five-user pair sharing the aggregate (3,0).
inline ncsched::DetailedState five_user_a() {
  return ncsched::DetailedState::from_rows({{0, 1, 0, 0, 1},
                                            {1, 0, 1, 1, 0},
                                            {0, 1, 0, 1, 0},
                                            {0, 1, 1, 0, 0},
                                            {0, 1, 0, 0, 0}});
}

inline ncsched::DetailedState five_user_b() {
  return ncsched::DetailedState::from_rows({{0, 1, 1, 0, 1},
                                            {1, 0, 1, 0, 1},
                                            {1, 1, 0, 0, 0},
                                            {0, 0, 0, 0, 1},
                                            {1, 1, 0, 0, 0}});
}

// Four users, clique {0,1,2}, row 3 empty, user 3 also holds packet 1.
inline ncsched::DetailedState four_user_s5() {
  return ncsched::DetailedState::from_rows({{0, 1, 1, 0}, {1, 0, 1, 1}, {1, 1, 0, 0}, {0, 0, 0, 0}});
}

// Only row 1 non-empty.
inline ncsched::DetailedState four_user_sa() {
  return ncsched::DetailedState::from_rows({{0, 0, 0, 0}, {1, 0, 1, 1}, {0, 0, 0, 0}, {0, 0, 0, 0}});
}

inline ncsched::DetailedState oldest_outside_clique() {
  return ncsched::DetailedState::from_rows({{0, 5, 5, 0}, {5, 0, 5, 0}, {5, 5, 0, 0}, {1, 0, 0, 0}}, 5);
}

}  // namespace fixtures
