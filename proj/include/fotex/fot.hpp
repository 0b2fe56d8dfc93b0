#pragma once

// Fiber-orientation tensors of discrete orientation measures and the
// candidate-set membership test (complete symmetry, positive semidefinite
// Kelvin-Mandel matrix, unit double trace).

#include <cmath>
#include <random>
#include <vector>

#include "fotex/errors.hpp"
#include "fotex/sdp.hpp"
#include "fotex/sphere.hpp"
#include "fotex/tensor.hpp"

namespace fotex {

struct FiberAtom {
  double weight;
  Direction direction;
};

/// Finite orientation measure sum_i w_i delta_{p_i}. The normalized form has
/// nonnegative weights summing to one.
struct FiberMeasure {
  std::vector<FiberAtom> atoms;

  double total_weight() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.weight;
    return s;
  }

  /// Throws EmptyMeasure / InvalidMeasure unless the measure is normalized.
  void validate_normalized(double tol = 1e-12) const {
    if (atoms.empty()) throw EmptyMeasure();
    for (const auto& a : atoms)
      if (!(a.weight >= 0.0)) throw InvalidMeasure("negative fiber weight");
    if (std::abs(total_weight() - 1.0) > tol)
      throw InvalidMeasure("fiber weights sum to " + std::to_string(total_weight()) + ", expected 1");
  }

  /// Rescales the weights to sum to one.
  FiberMeasure normalized() const {
    if (atoms.empty()) throw EmptyMeasure();
    const double s = total_weight();
    if (!(s > 0.0)) throw InvalidMeasure("fiber weights sum to zero");
    FiberMeasure out = *this;
    for (auto& a : out.atoms) a.weight /= s;
    return out;
  }

  static FiberMeasure uniform(const std::vector<Direction>& dirs) {
    FiberMeasure m;
    for (const auto& d : dirs) m.atoms.push_back({1.0 / dirs.size(), d});
    return m;
  }
};

/// sum_i w_i p_i (x) p_i.
inline Sym2 fot2_from_fibers(const FiberMeasure& m) {
  m.validate_normalized();
  Sym2 a;
  for (const auto& at : m.atoms) a += at.weight * Sym2::dyad(at.direction.vec());
  return a;
}

/// sum_i w_i p_i (x)4.
inline Sym4 fot4_from_fibers(const FiberMeasure& m) {
  m.validate_normalized();
  Sym4 a;
  for (const auto& at : m.atoms) a += at.weight * Sym4::power(at.direction.vec());
  return a;
}

/// Unnormalized moment sum_i w_i p_i (x)4 (no validation).
inline Sym4 moment4(const FiberMeasure& m) {
  Sym4 a;
  for (const auto& at : m.atoms) a += at.weight * Sym4::power(at.direction.vec());
  return a;
}

inline constexpr double kCandidateTol = 1e-9;

struct CandidateReport {
  double symmetry_residual = 0.0;
  Vec6 km_eigenvalues = Vec6::Zero();  // descending; noise above -tol clamped to 0
  double raw_min_eigenvalue = 0.0;
  bool clamped = false;  // some eigenvalue in (-tol, 0) was clamped
  double trace = 0.0;
  bool is_candidate = false;
};

namespace detail {

inline CandidateReport candidate_report(const Mat6& km, double symmetry_residual, double trace, double tol) {
  CandidateReport r;
  r.symmetry_residual = symmetry_residual;
  r.trace = trace;
  r.km_eigenvalues = eig_sym(km).values;
  r.raw_min_eigenvalue = r.km_eigenvalues(5);
  for (int i = 0; i < 6; ++i) {
    if (r.km_eigenvalues(i) < 0.0 && r.km_eigenvalues(i) >= -tol) {
      r.km_eigenvalues(i) = 0.0;
      r.clamped = true;
    }
  }
  r.is_candidate = symmetry_residual <= tol && r.raw_min_eigenvalue >= -tol && std::abs(trace - 1.0) <= tol;
  return r;
}

}  // namespace detail

inline CandidateReport check_candidate(const Sym4& a, double tol = kCandidateTol) {
  return detail::candidate_report(km_from_sym4(a).m, 0.0, a.trace(), tol);
}

/// Raw Kelvin-Mandel input: the redundancy relations enter symmetry_residual
/// and the trace is that of the matrix.
inline CandidateReport check_candidate(const KM66& k, double tol = kCandidateTol) {
  const Mat6 sym = 0.5 * (k.m + k.m.transpose());
  return detail::candidate_report(sym, km_redundancy_residual(k.m), k.m.trace(), tol);
}

/// Worst residual of the elementary moment-tensor properties for a measure.
struct PropertyReport {
  double symmetry = 0.0;       // complete index symmetry of A2 and A4
  double positivity = 0.0;     // max(0, -min A4::q(x)4) and max(0, -min q.A2.q) on a grid
  double contraction = 0.0;    // |A4 : Id - A2|
  double normalization = 0.0;  // |A2 : Id - 1|
  Sym2 a2;
  Sym4 a4;
};

/// Properties are checked on full 3^k component arrays built directly from
/// the atoms, independently of the packed Sym4 storage.
inline PropertyReport check_properties(const FiberMeasure& m, int grid_size = 1000) {
  m.validate_normalized();
  PropertyReport rep;
  rep.a2 = fot2_from_fibers(m);
  rep.a4 = fot4_from_fibers(m);

  std::array<double, 81> f4{};
  std::array<double, 9> f2{};
  for (const auto& at : m.atoms) {
    const Vec3& p = at.direction.vec();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        f2[3 * i + j] += at.weight * p(i) * p(j);
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) f4[detail::flat(i, j, k, l)] += at.weight * p(i) * p(j) * p(k) * p(l);
      }
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      rep.symmetry = std::max(rep.symmetry, std::abs(f2[3 * i + j] - f2[3 * j + i]));
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          std::array<int, 4> idx = {i, j, k, l};
          const double ref = f4[detail::flat(i, j, k, l)];
          std::array<int, 4> pos = {0, 1, 2, 3};
          do {
            const double v = f4[detail::flat(idx[pos[0]], idx[pos[1]], idx[pos[2]], idx[pos[3]])];
            rep.symmetry = std::max(rep.symmetry, std::abs(v - ref));
          } while (std::next_permutation(pos.begin(), pos.end()));
        }
    }

  for (const auto& q : fibonacci_sphere(grid_size)) {
    const Vec3& v = q.vec();
    double s4 = 0.0, s2 = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        s2 += f2[3 * i + j] * v(i) * v(j);
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) s4 += f4[detail::flat(i, j, k, l)] * v(i) * v(j) * v(k) * v(l);
      }
    rep.positivity = std::max({rep.positivity, -s4, -s2});
  }

  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double c = 0.0;
      for (int k = 0; k < 3; ++k) c += f4[detail::flat(i, j, k, k)];
      rep.contraction = std::max(rep.contraction, std::abs(c - f2[3 * i + j]));
    }
  rep.normalization = std::abs(f2[0] + f2[4] + f2[8] - 1.0);
  return rep;
}

/// argmax <R, KM(A)> over the candidate set (complete symmetry and
/// normalization only), for a symmetric 6x6 objective R.
inline Sym4 extreme_candidate(const Mat6& objective, const SdpOptions& opt = {}) {
  ConstraintSpec spec;
  SdpProblem p{MatX(0.5 * (objective + objective.transpose())), build_constraints(spec)};
  const SdpSolution s = solve(p, opt);
  if (s.status != SdpStatus::Optimal)
    throw SolverError("extreme_candidate: solver status " + std::string(to_string(s.status)));
  return sym4_nearest_km(KM66{Mat6(s.x), Frame::Fixed}, 1e-6);
}

/// Random symmetric objective with standard normal entries.
inline Mat6 random_symmetric(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat6 r;
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) r(i, j) = r(j, i) = nd(rng);
  return r;
}

/// Extreme point of the candidate set for a random linear objective.
inline Sym4 sample_extreme_candidate(std::uint64_t seed, const SdpOptions& opt = {}) {
  return extreme_candidate(random_symmetric(seed), opt);
}

}  // namespace fotex
