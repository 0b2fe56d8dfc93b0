#pragma once

// Eigensystem-based parameterization of fourth-order fiber-orientation
// tensors and material symmetry groups. All tensors here are expressed in the
// eigensystem {v1, v2, v3} of the second-order tensor.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "fotex/tensor.hpp"

namespace fotex {

/// (7/35) sym(Id (x) Id).
inline Sym4 iso4() { return (7.0 / 35.0) * sym_dyad(Sym2::identity(), Sym2::identity()); }

inline constexpr double kOrderingTol = 1e-12;

/// Throws OrderingViolation unless lambda1 >= lambda2 >= lambda3 >= 0 with
/// lambda3 = 1 - lambda1 - lambda2.
inline void validate_ordering(double lambda1, double lambda2) {
  const double lambda3 = 1.0 - lambda1 - lambda2;
  if (!std::isfinite(lambda1) || !std::isfinite(lambda2))
    throw OrderingViolation("eigenvalues must be finite");
  if (lambda1 < lambda2 - kOrderingTol || lambda2 < lambda3 - kOrderingTol ||
      lambda3 < -kOrderingTol || lambda1 > 1.0 + kOrderingTol)
    throw OrderingViolation("eigenvalues violate lambda1 >= lambda2 >= 1 - lambda1 - lambda2 >= 0 (lambda1=" +
                            std::to_string(lambda1) + ", lambda2=" + std::to_string(lambda2) + ")");
}

struct TriclinicParams {
  double lambda1 = 1.0 / 3.0;
  double lambda2 = 1.0 / 3.0;
  std::array<double, 9> d{};
};

namespace detail {

/// Fills the lower-right 3x3 block of a Kelvin-Mandel matrix from its upper
/// blocks through the complete-symmetry relations, then mirrors the upper
/// triangle.
inline void complete_km(Mat6& m) {
  m(3, 3) = 2.0 * m(1, 2);
  m(4, 4) = 2.0 * m(0, 2);
  m(5, 5) = 2.0 * m(0, 1);
  m(3, 4) = kSqrt2 * m(2, 5);
  m(3, 5) = kSqrt2 * m(1, 4);
  m(4, 5) = kSqrt2 * m(0, 3);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < r; ++c) m(r, c) = m(c, r);
}

}  // namespace detail

/// Constant and second-order part iso4 + 6/7 sym(dev(A) (x) Id) from its
/// explicit Kelvin-Mandel matrix.
inline Sym4 second_order_part(double lambda1, double lambda2) {
  validate_ordering(lambda1, lambda2);
  Mat6 m = Mat6::Zero();
  m(0, 0) = 6.0 / 7.0 * lambda1 - 3.0 / 35.0;
  m(0, 1) = 1.0 / 7.0 * lambda1 + 1.0 / 7.0 * lambda2 - 1.0 / 35.0;
  m(0, 2) = -1.0 / 7.0 * lambda2 + 4.0 / 35.0;
  m(1, 1) = 6.0 / 7.0 * lambda2 - 3.0 / 35.0;
  m(1, 2) = -1.0 / 7.0 * lambda1 + 4.0 / 35.0;
  m(2, 2) = -6.0 / 7.0 * lambda1 - 6.0 / 7.0 * lambda2 + 27.0 / 35.0;
  detail::complete_km(m);
  return sym4_project_km(m);
}

/// Same quantity built tensorially, iso4 + 6/7 sym(dev(diag(lambda)) (x) Id).
inline Sym4 second_order_part_tensorial(double lambda1, double lambda2) {
  validate_ordering(lambda1, lambda2);
  const Sym2 a = Sym2::diag(lambda1, lambda2, 1.0 - lambda1 - lambda2);
  return iso4() + (6.0 / 7.0) * sym_dyad(deviator(a), Sym2::identity());
}

/// Fully traceless triclinic structure tensor with parameters d1..d9.
inline Sym4 tricl_structure(const std::array<double, 9>& d) {
  const double d1 = d[0], d2 = d[1], d3 = d[2], d4 = d[3], d5 = d[4], d6 = d[5], d7 = d[6],
               d8 = d[7], d9 = d[8];
  Mat6 m = Mat6::Zero();
  m(0, 0) = -(d1 + d2);
  m(0, 1) = d1;
  m(0, 2) = d2;
  m(1, 1) = -(d1 + d3);
  m(1, 2) = d3;
  m(2, 2) = -(d2 + d3);
  m(0, 3) = -kSqrt2 * (d4 + d5);
  m(0, 4) = kSqrt2 * d6;
  m(0, 5) = kSqrt2 * d8;
  m(1, 3) = kSqrt2 * d4;
  m(1, 4) = -kSqrt2 * (d6 + d7);
  m(1, 5) = kSqrt2 * d9;
  m(2, 3) = kSqrt2 * d5;
  m(2, 4) = kSqrt2 * d7;
  m(2, 5) = -kSqrt2 * (d8 + d9);
  detail::complete_km(m);
  return sym4_project_km(m);
}

/// iso4 + 6/7 sym(dev(A) (x) Id) + F(d1..d9). Not necessarily a candidate.
inline Sym4 assemble_triclinic(const TriclinicParams& p) {
  return second_order_part(p.lambda1, p.lambda2) + tricl_structure(p.d);
}

enum class SymmetryClass { Triclinic, Orthotropic };

inline std::string_view to_string(SymmetryClass s) {
  return s == SymmetryClass::Triclinic ? "triclinic" : "orthotropic";
}

inline SymmetryClass parse_symmetry(std::string_view name) {
  if (name == "triclinic") return SymmetryClass::Triclinic;
  if (name == "orthotropic") return SymmetryClass::Orthotropic;
  throw ParseError("unknown symmetry class '" + std::string(name) + "'");
}

struct SymmetryGroup {
  SymmetryClass name;
  std::vector<Rotation> elements;
};

inline SymmetryGroup triclinic_group() { return {SymmetryClass::Triclinic, {Rotation()}}; }

/// The four sign-flip rotations about the eigensystem axes.
inline SymmetryGroup orthotropic_group() {
  SymmetryGroup g{SymmetryClass::Orthotropic, {}};
  for (const Vec3& s : {Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)})
    g.elements.emplace_back(Mat3(s.asDiagonal()));
  return g;
}

inline SymmetryGroup symmetry_group(SymmetryClass s) {
  return s == SymmetryClass::Triclinic ? triclinic_group() : orthotropic_group();
}

/// max over Q in G of |Q * A - A|.
inline double symmetry_residual(const Sym4& a, const SymmetryGroup& g) {
  double worst = 0.0;
  for (const auto& q : g.elements) worst = std::max(worst, (rayleigh_rotate(q, a) - a).norm());
  return worst;
}

}  // namespace fotex
