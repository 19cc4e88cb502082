// Estimates the log-Sobolev constant on the Heisenberg group, turns it into a
// semi-Gaussian parameter and checks the Gross form for a few translated bumps.

#include <iostream>

#include "strata/strata.hpp"

int main() {
  using namespace strata;
  auto h = heisenberg();

  ConstantProvider provider;
  auto A = provider.inflated_A(h);
  const double gamma = gamma_from_A(h->homogeneous_dim(), h->first_stratum_dim(), A.value);
  std::cout << "A = " << A.value << " (" << A.provenance << "), gamma = " << gamma << "\n";

  auto gest = ConstantEstimate::checked(gamma, A.direction, "from A");
  CheckOptions opt;
  opt.rel_tol = ToleranceProfile::strict().relative_for(h.get());
  GridSpec grid({5, 5, 7}, {40, 40, 40});
  for (double s : {0.0, 0.5, 1.0}) {
    GradedBump bump{h, 0.3, 0.2, Point({s, -s, 0.5 * s})};
    auto rep = check_gross(sample(h, grid, bump), gest, 0.0, nullptr, opt);
    std::cout << "shift " << s << ": lhs " << rep.lhs << ", rhs " << rep.rhs << ", " << to_string(rep.verdict)
              << "\n";
  }
}
