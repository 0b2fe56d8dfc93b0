// Prints the largest value of n(x)4 :: A over candidates with eigenvalues
// (0.7, 0.3, 0) along in-plane directions, with and without orthotropy.

#include <cstdio>

#include "fotex/fotex.hpp"

int main() {
  using namespace fotex;
  const SweepResult r = sweep(0.7, 0.3, SweepGrid::plane(19), {SymmetryClass::Triclinic, SymmetryClass::Orthotropic});
  std::printf("%8s %12s %12s %12s\n", "phi", "triclinic", "orthotropic", "gap");
  for (const auto& n : r.nodes)
    std::printf("%8.1f %12.8f %12.8f %12.3e\n", n.phi_deg, n.values[0], n.values[1], n.values[0] - n.values[1]);
  return r.failures() == 0 ? 0 : 1;
}
