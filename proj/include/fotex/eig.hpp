#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace fotex {

/// Eigenpairs of a real symmetric matrix. Eigenvalues are sorted in
/// descending order; column i of `vectors` belongs to `values[i]`.
template <int N>
struct SymEigen {
  Eigen::Matrix<double, N, 1> values;
  Eigen::Matrix<double, N, N> vectors;
};

struct JacobiOptions {
  double threshold = 1e-14;  // relative to the Frobenius norm of the input
  int max_sweeps = 100;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix (only the upper
/// triangle is read). Works for fixed (3, 6) and dynamic sizes.
template <typename Derived>
auto eig_sym(const Eigen::MatrixBase<Derived>& input, JacobiOptions opts = {})
    -> SymEigen<Derived::RowsAtCompileTime> {
  constexpr int N = Derived::RowsAtCompileTime;
  using Mat = Eigen::Matrix<double, N, N>;
  const Eigen::Index n = input.rows();

  Mat a = input.template selfadjointView<Eigen::Upper>();
  Mat v = Mat::Identity(n, n);

  const double scale = a.norm();
  if (scale > 0.0) {
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
      double off = 0.0;
      for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
      if (std::sqrt(2.0 * off) <= opts.threshold * scale) break;

      for (Eigen::Index p = 0; p < n; ++p) {
        for (Eigen::Index q = p + 1; q < n; ++q) {
          const double apq = a(p, q);
          if (apq == 0.0) continue;
          const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
          const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double s = t * c;
          for (Eigen::Index k = 0; k < n; ++k) {
            const double akp = a(k, p);
            const double akq = a(k, q);
            a(k, p) = c * akp - s * akq;
            a(k, q) = s * akp + c * akq;
          }
          for (Eigen::Index k = 0; k < n; ++k) {
            const double apk = a(p, k);
            const double aqk = a(q, k);
            a(p, k) = c * apk - s * aqk;
            a(q, k) = s * apk + c * aqk;
          }
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          for (Eigen::Index k = 0; k < n; ++k) {
            const double vkp = v(k, p);
            const double vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return a(i, i) > a(j, j);
  });

  SymEigen<N> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[i], order[i]);
    out.vectors.col(i) = v.col(order[i]);
  }
  return out;
}

/// Smallest eigenvalue of a symmetric matrix.
template <typename Derived>
double min_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  const auto e = eig_sym(m);
  return e.values(e.values.size() - 1);
}

}  // namespace fotex
