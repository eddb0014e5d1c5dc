// Invariance of the first-order jet invariants under sampled group
// elements, for both ways of prolonging the action.

#include <cstdio>

#include "toda/solve.hpp"

int main() {
  using namespace toda;
  for (int rank : {1, 2, 3}) {
    auto setup = default_invariance_setup(rank);
    for (auto m : {ProlongationMethod::Analytic, ProlongationMethod::CurveDifferentiation}) {
      auto rep = invariance_check(setup, 24, 0.1, 1e-3, m);
      std::printf("A%d %-22s samples %d  max deviation %.2e\n", rank, method_name(m).c_str(),
                  rep.group_elements_sampled, rep.max_deviation);
    }
  }
}
