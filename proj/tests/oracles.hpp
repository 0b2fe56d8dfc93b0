#pragma once

// Independent reference computations and random generators for the tests.
// Nothing here goes through the packed Sym4 / Kelvin-Mandel code paths of
// the library unless a test says so.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "fotex/fotex.hpp"

namespace oracle {

using fotex::Mat3;
using fotex::Mat6;
using fotex::MatX;
using fotex::Vec3;
using fotex::VecX;

using Full = std::array<double, 81>;

inline int at(int i, int j, int k, int l) { return ((i * 3 + j) * 3 + k) * 3 + l; }

inline Full full(const fotex::Sym4& a) {
  Full f{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) f[at(i, j, k, l)] = a(i, j, k, l);
  return f;
}

inline Full power(const Vec3& p) {
  Full f{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) f[at(i, j, k, l)] = p(i) * p(j) * p(k) * p(l);
  return f;
}

inline Full measure_full(const fotex::FiberMeasure& m) {
  Full f{};
  for (const auto& a : m.atoms) {
    const Full pf = power(a.direction.vec());
    for (int n = 0; n < 81; ++n) f[n] += a.weight * pf[n];
  }
  return f;
}

/// sum over all 81 index tuples of A_ijkl q_i q_j q_k q_l.
inline double quartic(const Full& f, const Vec3& q) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) s += f[at(i, j, k, l)] * q(i) * q(j) * q(k) * q(l);
  return s;
}

inline double frob(const Full& a, const Full& b) {
  double s = 0.0;
  for (int n = 0; n < 81; ++n) s += a[n] * b[n];
  return s;
}

inline double max_abs_diff(const Full& a, const Full& b) {
  double s = 0.0;
  for (int n = 0; n < 81; ++n) s = std::max(s, std::abs(a[n] - b[n]));
  return s;
}

/// Component of delta_ij delta_kl symmetrized over all 24 index orders.
inline double sym_dd(int i, int j, int k, int l) {
  return ((i == j) * (k == l) + (i == k) * (j == l) + (i == l) * (j == k)) / 3.0;
}

inline Full iso4_full() {
  Full f{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) f[at(i, j, k, l)] = 0.2 * sym_dd(i, j, k, l);
  return f;
}

/// A_ijkk.
inline Mat3 contract(const Full& f) {
  Mat3 c = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c(i, j) += f[at(i, j, k, k)];
  return c;
}

/// Kelvin-Mandel matrix straight from the 81 components, with the pair
/// weights sqrt2 for off-diagonal index pairs.
inline Mat6 km_matrix(const Full& f) {
  const int pr[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
  Mat6 m;
  for (int r = 0; r < 6; ++r)
    for (int s = 0; s < 6; ++s) {
      const double w = (r >= 3 ? std::sqrt(2.0) : 1.0) * (s >= 3 ? std::sqrt(2.0) : 1.0);
      m(r, s) = w * f[at(pr[r][0], pr[r][1], pr[s][0], pr[s][1])];
    }
  return m;
}

inline Eigen::Matrix<double, 6, 1> km_eigs_desc(const Full& f) {
  Eigen::SelfAdjointEigenSolver<Mat6> es(km_matrix(f), Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

// ---------------------------------------------------------------------------
// Random generators (hand-rolled, seeded).

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }

  Vec3 gaussian3() { return Vec3(normal(), normal(), normal()); }
  fotex::Direction direction() { return fotex::Direction::normalized(gaussian3()); }

  fotex::FiberMeasure measure(int k) {
    fotex::FiberMeasure m;
    for (int i = 0; i < k; ++i) m.atoms.push_back({uniform(0.01, 1.0), direction()});
    return m.normalized();
  }

  fotex::Sym4 sym4() {
    fotex::Sym4 a;
    for (auto& c : a.c) c = normal();
    return a;
  }

  fotex::Sym2 sym2() { return fotex::Sym2{{normal(), normal(), normal(), normal(), normal(), normal()}}; }

  /// Haar-distributed proper rotation.
  Mat3 rotation() {
    Mat3 g;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g(i, j) = normal();
    Eigen::HouseholderQR<Mat3> qr(g);
    Mat3 q = qr.householderQ();
    const Mat3 r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < 3; ++j)
      if (r(j, j) < 0) q.col(j) *= -1.0;
    if (q.determinant() < 0) q.col(0) *= -1.0;
    return q;
  }

  /// (lambda1, lambda2) with lambda1 >= lambda2 >= 1 - lambda1 - lambda2 >= 0.
  std::pair<double, double> ordered_lambdas() {
    std::array<double, 3> l{};
    const double a = uniform(), b = uniform();
    const double lo = std::min(a, b), hi = std::max(a, b);
    l = {lo, hi - lo, 1.0 - hi};
    std::sort(l.begin(), l.end(), std::greater<>());
    return {l[0], l[1]};
  }

  MatX symmetric(int n) {
    MatX m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) m(i, j) = m(j, i) = normal();
    return m;
  }

  MatX random_pd(int n) {
    MatX g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = normal();
    return g * g.transpose() + 0.1 * MatX::Identity(n, n);
  }
};

// ---------------------------------------------------------------------------
// Reference SDP value through the spectral form of the dual.
//
// For   max <C,X>  s.t.  tr X = 1,  <A_k, X> = b_k (k = 1..q),  X psd
// the dual value is   min_y  lambda_max(C - sum_k y_k A_k) + sum_k b_k y_k,
// a convex function of y in R^q (q <= 2), minimized by nested golden-section
// search on a box.

inline double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol,
                         double* argmin = nullptr) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  const double x = 0.5 * (a + b);
  if (argmin) *argmin = x;
  return f(x);
}

inline double lambda_max(const MatX& m) {
  Eigen::SelfAdjointEigenSolver<MatX> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

struct SpectralDual {
  double value;
  std::vector<double> y;
  bool interior;  // minimizer strictly inside the search box
};

inline SpectralDual spectral_dual_value(const MatX& c, const std::vector<MatX>& a, const std::vector<double>& b,
                                        double box = 20.0) {
  const double tol = 1e-11;
  SpectralDual out{0.0, std::vector<double>(a.size(), 0.0), true};
  auto inner = [&](double y1, double* y2_out) {
    if (a.size() < 2) return lambda_max(c - (a.empty() ? MatX::Zero(c.rows(), c.cols()) : MatX(y1 * a[0]))) +
                             (a.empty() ? 0.0 : b[0] * y1);
    auto g = [&](double y2) { return lambda_max(c - y1 * a[0] - y2 * a[1]) + b[0] * y1 + b[1] * y2; };
    return golden_min(g, -box, box, tol, y2_out);
  };
  if (a.empty()) {
    out.value = lambda_max(c);
    return out;
  }
  double y1 = 0.0;
  out.value = golden_min([&](double t) { return inner(t, nullptr); }, -box, box, tol, &y1);
  out.y[0] = y1;
  if (a.size() >= 2) inner(y1, &out.y[1]);
  for (double v : out.y)
    if (std::abs(v) > box - 1e-3) out.interior = false;
  return out;
}

// Random quartic form whose minimum on the unit sphere is target_min.
inline fotex::Sym4 quartic_with_min(Rng& rng, double target_min) {
  const fotex::Sym4 b = rng.sym4();
  const double m = fotex::quartic_min_on_sphere(b).value;
  // sym(Id (x) Id) evaluates to |x|^4
  return b + (target_min - m) * fotex::sym_dyad(fotex::Sym2::identity(), fotex::Sym2::identity());
}

}  // namespace oracle
