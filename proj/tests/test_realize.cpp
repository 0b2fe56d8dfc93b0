#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"

using namespace fotex;

namespace {

double oracle_residual(const FiberMeasure& m, const Sym4& a) {
  const oracle::Full f = oracle::measure_full(m);
  oracle::Full d = oracle::full(a);
  for (int n = 0; n < 81; ++n) d[n] -= f[n];
  return std::sqrt(oracle::frob(d, d));
}

void expect_valid_measure(const FiberMeasure& m) {
  EXPECT_LE(m.atoms.size(), 15u);
  for (const auto& at : m.atoms) {
    EXPECT_GE(at.weight, 0.0);
    EXPECT_NEAR(at.direction.vec().norm(), 1.0, 1e-12);
  }
}

FiberMeasure rotated_icosahedra(oracle::Rng& rng, int copies) {
  FiberMeasure m;
  for (int k = 0; k < copies; ++k) {
    const Mat3 q = rng.rotation();
    for (const auto& d : icosahedron_axes())
      m.atoms.push_back({1.0 / (6.0 * copies), Direction::normalized(q * d.vec())});
  }
  return m;
}

// random form with a prescribed sphere minimum: iso-shifted random quartic
double sos_eval(const SosCertificate& c, const Vec3& x) {
  double s = 0.0;
  for (const Sym2& q : c.squares) {
    const double v = x.dot(q.matrix() * x);
    s += v * v;
  }
  return s;
}

}  // namespace

// realize ----------------------------------------------------------------------

TEST(Realize, RankOne) {
  oracle::Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    const Vec3 p = rng.direction().vec();
    const RealizationResult r = realize(Sym4::power(p));
    ASSERT_EQ(r.atom_count, 1);
    EXPECT_LE(r.residual, 1e-10);
    EXPECT_NEAR(r.measure.atoms[0].weight, 1.0, 1e-10);
    EXPECT_NEAR(std::abs(r.measure.atoms[0].direction.vec().dot(p)), 1.0, 1e-10);
    EXPECT_TRUE(r.tolerance_reached);
  }
}

TEST(Realize, Iso4) {
  const RealizationResult r = realize(iso4());
  EXPECT_LE(r.residual, 1e-8);
  EXPECT_LE(r.atom_count, 15);
  expect_valid_measure(r.measure);
  EXPECT_NEAR(r.residual, oracle_residual(r.measure, iso4()), 1e-14);
  // the six icosahedral axes are one exact answer
  EXPECT_LE(oracle_residual(FiberMeasure::uniform(icosahedron_axes()), iso4()), 1e-12);
}

TEST(Realize, ExtremeCandidates) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Sym4 a = sample_extreme_candidate(seed);
    const RealizationResult r = realize(a);
    EXPECT_LE(r.residual, 1e-5) << seed;
    EXPECT_LE(r.atom_count, 15);
    expect_valid_measure(r.measure);
    EXPECT_NEAR(r.residual, oracle_residual(r.measure, a), 1e-12);
    EXPECT_TRUE(check_candidate(moment4(r.measure), 1e-8).is_candidate);
  }
}

TEST(Realize, RoundTripRandomMeasures) {
  oracle::Rng rng(2);
  for (int t = 0; t < 24; ++t) {
    const FiberMeasure m = rng.measure(1 + t % 12);
    const Sym4 a = fot4_from_fibers(m);
    const RealizationResult r = realize(a);
    EXPECT_LE(r.residual, 1e-8) << t;
    EXPECT_LE(oracle_residual(r.measure, a), 1e-8);
    EXPECT_NEAR(r.measure.total_weight(), 1.0, 1e-8);
    expect_valid_measure(r.measure);
  }
}

TEST(Realize, ExtremizerOutputs) {
  const std::pair<double, double> lams[] = {{1.0 / 3.0, 1.0 / 3.0}, {0.5, 0.25}, {0.8, 0.1}};
  for (const auto& [l1, l2] : lams) {
    const ExtremeResult e =
        extremize(l1, l2, Direction::spherical(30 * std::numbers::pi / 180, 60 * std::numbers::pi / 180),
                  SymmetryClass::Triclinic);
    const RealizationResult r = realize(e.tensor);
    EXPECT_LE(r.residual, 1e-5);
    EXPECT_LE(r.atom_count, 15);
  }
}

TEST(Realize, RejectsNonCandidates) {
  EXPECT_THROW(realize(1.1 * iso4()), NotCandidate);
  EXPECT_THROW(realize(assemble_triclinic({1.0, 0.0, {}})), NotCandidate);
}

TEST(Realize, Deterministic) {
  const Sym4 a = sample_extreme_candidate(3);
  const RealizationResult r1 = realize(a), r2 = realize(a);
  ASSERT_EQ(r1.atom_count, r2.atom_count);
  for (int i = 0; i < r1.atom_count; ++i) {
    EXPECT_EQ(r1.measure.atoms[i].weight, r2.measure.atoms[i].weight);
    EXPECT_EQ(r1.measure.atoms[i].direction.vec(), r2.measure.atoms[i].direction.vec());
  }
}

// caratheodory_reduce ---------------------------------------------------------

TEST(Caratheodory, ThirtyRedundantAtomsOfIso4) {
  oracle::Rng rng(3);
  const FiberMeasure m = rotated_icosahedra(rng, 5);
  ASSERT_EQ(m.atoms.size(), 30u);
  ASSERT_LE(oracle_residual(m, iso4()), 1e-12);
  const FiberMeasure r = caratheodory_reduce(m, iso4());
  EXPECT_LE(r.atoms.size(), 15u);
  EXPECT_LE(oracle_residual(r, iso4()), 1e-9);
  for (const auto& at : r.atoms) EXPECT_GE(at.weight, -1e-12);
}

TEST(Caratheodory, SmallMeasureUnchanged) {
  const FiberMeasure m{{{0.5, Direction(1, 0, 0)}, {0.3, Direction(0, 1, 0)}, {0.2, Direction(0, 0, 1)}}};
  const FiberMeasure r = caratheodory_reduce(m, fot4_from_fibers(m));
  ASSERT_EQ(r.atoms.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(r.atoms[i].weight, m.atoms[i].weight);
    EXPECT_EQ(r.atoms[i].direction.vec(), m.atoms[i].direction.vec());
  }
}

TEST(Caratheodory, SixteenAtoms) {
  // 16 moment vectors in a 15-dimensional space are always dependent
  oracle::Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const FiberMeasure m = rng.measure(16);
    const Sym4 a = fot4_from_fibers(m);
    const FiberMeasure r = caratheodory_reduce(m, a);
    EXPECT_LE(r.atoms.size(), 15u);
    EXPECT_LE(oracle_residual(r, a), 1e-8);
    for (const auto& at : r.atoms) EXPECT_GE(at.weight, -1e-12);
  }
}

TEST(Caratheodory, ManyAtoms) {
  oracle::Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    const FiberMeasure m = rng.measure(rng.integer(17, 80));
    const Sym4 a = fot4_from_fibers(m);
    const FiberMeasure r = caratheodory_reduce(m, a);
    EXPECT_LE(r.atoms.size(), 15u);
    EXPECT_LE(oracle_residual(r, a), 1e-8);
    EXPECT_NEAR(r.total_weight(), 1.0, 1e-8);
  }
}

TEST(Caratheodory, RejectsMismatchedTarget) {
  oracle::Rng rng(6);
  const FiberMeasure m = rng.measure(20);
  EXPECT_THROW(caratheodory_reduce(m, iso4()), Error);
}

// nnls ---------------------------------------------------------------------------

TEST(Nnls, KnownSolution) {
  oracle::Rng rng(7);
  MatX e(15, 40);
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 40; ++j) e(i, j) = rng.normal();
  VecX w0 = VecX::Zero(40);
  w0(3) = 0.7;
  w0(11) = 0.2;
  w0(30) = 1.5;
  const VecX w = nnls(e, e * w0);
  EXPECT_GE(w.minCoeff(), 0.0);
  EXPECT_LE((e * w - e * w0).norm(), 1e-10);
}

TEST(Nnls, KktConditions) {
  oracle::Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    MatX e(15, 30);
    VecX a(15);
    for (int i = 0; i < 15; ++i) {
      a(i) = rng.normal();
      for (int j = 0; j < 30; ++j) e(i, j) = rng.normal();
    }
    const VecX w = nnls(e, a);
    const VecX g = e.transpose() * (a - e * w);  // negative gradient
    for (int j = 0; j < 30; ++j) {
      EXPECT_GE(w(j), 0.0);
      if (w(j) > 0.0)
        EXPECT_NEAR(g(j), 0.0, 1e-9);
      else
        EXPECT_LE(g(j), 1e-9);
    }
  }
}

// quartic_min_on_sphere -------------------------------------------------------

TEST(QuarticMin, Iso4IsConstant) {
  const SphereMinimum m = quartic_min_on_sphere(iso4());
  EXPECT_NEAR(m.value, 0.2, 1e-14);
}

TEST(QuarticMin, UnidirectionalVanishesOnCircle) {
  const SphereMinimum m = quartic_min_on_sphere(Sym4::power(Vec3::UnitX()));
  EXPECT_NEAR(m.value, 0.0, 1e-14);
  EXPECT_NEAR(m.argmin.vec()(0), 0.0, 1e-3);
}

TEST(QuarticMin, DifferenceOfSquares) {
  const Sym2 s = Sym2::diag(1, -1, 0);
  const SphereMinimum m = quartic_min_on_sphere(sym_dyad(s, s));
  EXPECT_NEAR(m.value, 0.0, 1e-12);
  const Vec3 x = m.argmin.vec();
  EXPECT_NEAR(x(0) * x(0) - x(1) * x(1), 0.0, 1e-6);
}

TEST(QuarticMin, BeatsDenseGridOracle) {
  oracle::Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    const Sym4 b = rng.sym4();
    const SphereMinimum m = quartic_min_on_sphere(b);
    const oracle::Full f = oracle::full(b);
    EXPECT_NEAR(oracle::quartic(f, m.argmin.vec()), m.value, 1e-12);
    // coarse angle grid, then shrinking local grids around the best node
    auto q = [&](double th, double ph) {
      return oracle::quartic(f, Vec3(std::cos(ph) * std::sin(th), std::sin(ph) * std::sin(th), std::cos(th)));
    };
    double grid = 1e300, bt = 0, bp = 0;
    const int k = 100;
    for (int i = 0; i <= k; ++i)
      for (int j = 0; j < 2 * k; ++j) {
        const double th = std::numbers::pi * i / k, ph = std::numbers::pi * j / k;
        if (const double v = q(th, ph); v < grid) grid = v, bt = th, bp = ph;
      }
    EXPECT_LE(m.value, grid + 1e-12);
    for (double h = std::numbers::pi / k; h > 1e-10; h *= 0.25) {
      const double ct = bt, cp = bp;
      for (int i = -10; i <= 10; ++i)
        for (int j = -10; j <= 10; ++j)
          if (const double v = q(ct + h * i / 10, cp + h * j / 10); v < grid) grid = v, bt = ct + h * i / 10, bp = cp + h * j / 10;
    }
    EXPECT_NEAR(m.value, grid, 1e-9);
  }
}

TEST(QuarticMin, GridTooSmall) { EXPECT_THROW(quartic_min_on_sphere(iso4(), 50), Error); }

// sos_certificate ---------------------------------------------------------------

TEST(Sos, SumOfThreeSquares) {
  oracle::Rng rng(10);
  for (int t = 0; t < 10; ++t) {
    Sym4 b;
    std::vector<Sym2> s;
    for (int i = 0; i < 3; ++i) {
      s.push_back(rng.sym2());
      b = b + sym_dyad(s.back(), s.back());
    }
    const SosResult r = sos_certificate(b);
    ASSERT_TRUE(r.feasible);
    ASSERT_TRUE(r.certificate.has_value());
    EXPECT_LE(r.certificate->reconstruction_residual, 1e-9);
    EXPECT_GE(r.certificate->min_gram_eigenvalue, -1e-9);
    const oracle::Full f = oracle::full(b);
    for (int k = 0; k < 20; ++k) {
      const Vec3 x = rng.gaussian3();
      double direct = 0.0;
      for (const Sym2& q : s) direct += std::pow(x.dot(q.matrix() * x), 2);
      EXPECT_NEAR(oracle::quartic(f, x), direct, 1e-10 * (1.0 + direct));
      EXPECT_NEAR(sos_eval(*r.certificate, x), direct, 1e-9 * (1.0 + direct));
    }
  }
}

TEST(Sos, IdentityGivesNormToTheFourth) {
  const Sym4 b = sym_dyad(Sym2::identity(), Sym2::identity());
  const SosResult r = sos_certificate(b);
  ASSERT_TRUE(r.feasible);
  oracle::Rng rng(11);
  for (int k = 0; k < 20; ++k) {
    const Vec3 x = rng.gaussian3();
    EXPECT_NEAR(sos_eval(*r.certificate, x), std::pow(x.squaredNorm(), 2), 1e-9 * std::pow(x.squaredNorm(), 2));
  }
  // margin = min over candidates of A :: B = 1 since B :: A = (Id:A:Id)
  EXPECT_NEAR(r.margin, 1.0, 1e-8);
}

TEST(Sos, NegativeQuarticIsInfeasible) {
  oracle::Rng rng(12);
  for (int t = 0; t < 8; ++t) {
    const Sym4 b = oracle::quartic_with_min(rng, -1e-3);
    ASSERT_LT(quartic_min_on_sphere(b).value, -1e-6);
    const SosResult r = sos_certificate(b);
    EXPECT_FALSE(r.feasible);
    ASSERT_TRUE(r.witness.has_value());
    EXPECT_LT(r.witness->value, 0.0);
    EXPECT_NEAR(r.witness->value, r.witness->tensor.dot(b), 1e-15);
    EXPECT_NEAR(oracle::frob(oracle::full(r.witness->tensor), oracle::full(b)), r.witness->value, 1e-12);
    EXPECT_TRUE(check_candidate(r.witness->tensor, 1e-8).is_candidate);
  }
  const Sym4 c = 0.1 * sym_dyad(Sym2::identity(), Sym2::identity()) - Sym4::power(Vec3::UnitX());
  EXPECT_FALSE(sos_certificate(c).feasible);
}

TEST(Sos, PositiveQuarticsAreCertified) {
  oracle::Rng rng(13);
  for (int t = 0; t < 10; ++t) {
    const Sym4 b = oracle::quartic_with_min(rng, 1e-3);
    const SosResult r = sos_certificate(b);
    ASSERT_TRUE(r.feasible) << t;
    EXPECT_LE(r.certificate->reconstruction_residual, 1e-8);
    EXPECT_GE(r.margin, 0.0);
  }
}

TEST(Sos, DualityConsistency) {
  oracle::Rng rng(14);
  std::vector<Sym4> realized;
  for (std::uint64_t s = 0; s < 4; ++s) realized.push_back(moment4(realize(sample_extreme_candidate(s)).measure));
  for (int t = 0; t < 4; ++t) realized.push_back(moment4(realize(fot4_from_fibers(rng.measure(5))).measure));
  std::vector<Sym4> certified;
  for (int t = 0; t < 6; ++t) {
    const Sym4 b = oracle::quartic_with_min(rng, rng.uniform(1e-6, 1e-2));
    if (sos_certificate(b).feasible) certified.push_back(b);
  }
  ASSERT_GE(certified.size(), 6u);
  for (const Sym4& a : realized)
    for (const Sym4& b : certified) EXPECT_GE(a.dot(b), -1e-9);
}
