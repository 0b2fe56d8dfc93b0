// Takes an extreme candidate tensor, decomposes it into fiber atoms and
// prints the atoms and the reconstruction error.

#include <cstdio>
#include <cstdlib>

#include "fotex/fotex.hpp"

int main(int argc, char** argv) {
  using namespace fotex;
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  const Sym4 a = sample_extreme_candidate(seed);
  const RealizationResult r = realize(a);
  std::printf("seed %llu: %d atoms, residual %.3e\n", static_cast<unsigned long long>(seed), r.atom_count, r.residual);
  for (const auto& at : r.measure.atoms)
    std::printf("  w = %.10f  p = (% .8f, % .8f, % .8f)\n", at.weight, at.direction[0], at.direction[1], at.direction[2]);

  const SosResult s = sos_certificate(a);
  std::printf("min over candidates of A :: B with B = A: %.6e\n", s.margin);
  return r.tolerance_reached ? 0 : 3;
}
