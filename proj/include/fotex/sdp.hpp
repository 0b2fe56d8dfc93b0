#pragma once

// Dense linear semidefinite programming for small matrices (n <= 8), the
// constraint builder for fourth-order orientation tensors in Kelvin-Mandel
// form, and the extremization / sweep drivers built on top of it.
//
// Problem form:   maximize <C, X>  s.t.  <A_k, X> = b_k,  X psd
// Dual:           minimize b^T y   s.t.  Z = sum_k y_k A_k - C psd
//
// A constraint is given by upper-triangular coefficients G_ij (i <= j) and
// reads sum_{i<=j} G_ij X_ij = b.

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fotex/eig.hpp"
#include "fotex/errors.hpp"
#include "fotex/param_symmetry.hpp"
#include "fotex/tensor.hpp"

namespace fotex {

using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

struct LinearConstraint {
  std::map<std::pair<int, int>, double> coeffs;  // 0-based, first <= second
  double rhs = 0.0;

  LinearConstraint& set(int i, int j, double g) {
    if (i > j) std::swap(i, j);
    coeffs[{i, j}] = g;
    return *this;
  }

  /// Symmetric matrix A with <A, X>_F = sum_{i<=j} G_ij X_ij.
  MatX matrix(int n) const {
    MatX a = MatX::Zero(n, n);
    for (const auto& [ij, g] : coeffs) {
      const auto [i, j] = ij;
      if (i == j) {
        a(i, i) += g;
      } else {
        a(i, j) += 0.5 * g;
        a(j, i) += 0.5 * g;
      }
    }
    return a;
  }

  friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;
};

struct SdpProblem {
  MatX objective;  // symmetric, n x n
  std::vector<LinearConstraint> constraints;
  int dim() const { return static_cast<int>(objective.rows()); }
};

enum class SdpStatus { Optimal, Infeasible, NumericalFailure };

inline std::string_view to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    default: return "numerical_failure";
  }
}

struct SdpOptions {
  double feasibility_tol = 1e-9;
  double gap_tol = 1e-8;
  double psd_tol = 1e-10;
  int max_iterations = 200;
  /// Upper bound on trace(X) assumed by the big-M phase-I problem.
  double big_m = 1e4;
};

struct SdpResiduals {
  double primal = 0.0;           // max_k |<A_k, X> - b_k|
  double dual = 0.0;             // max(0, -lambda_min(Z)) with Z rebuilt from y
  double gap = 0.0;              // |<C, X> - b^T y|
  double complementarity = 0.0;  // <X, Z>
};

struct SdpSolution {
  MatX x;
  MatX z;
  double objective_value = 0.0;
  double dual_value = 0.0;
  VecX dual_y;  // one entry per input constraint; 0 for dropped rows
  SdpStatus status = SdpStatus::NumericalFailure;
  SdpResiduals residuals;
  int iterations = 0;
  std::vector<std::string> log;
};

namespace detail {

struct IpmResult {
  MatX x, z;
  VecX y;
  int iterations = 0;
  bool converged = false;
  bool diverged = false;
};

inline MatX apply_adjoint(const std::vector<MatX>& a, const VecX& y, int n) {
  MatX s = MatX::Zero(n, n);
  for (std::size_t k = 0; k < a.size(); ++k) s += y(static_cast<Eigen::Index>(k)) * a[k];
  return s;
}

inline VecX apply_op(const std::vector<MatX>& a, const MatX& x) {
  VecX v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t k = 0; k < a.size(); ++k) v(static_cast<Eigen::Index>(k)) = a[k].cwiseProduct(x).sum();
  return v;
}

/// Largest alpha <= cap with x + alpha dx psd, for x positive definite.
inline double max_step(const MatX& x, const MatX& dx, double cap) {
  Eigen::LLT<MatX> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  const MatX linv = llt.matrixL().solve(MatX::Identity(x.rows(), x.cols()));
  MatX w = linv * dx * linv.transpose();
  w = (0.5 * (w + w.transpose())).eval();
  const double lmin = eig_sym(w).values(w.rows() - 1);
  if (lmin >= 0.0) return cap;
  return std::min(cap, -1.0 / lmin);
}

/// Infeasible-start primal-dual path following with the HKM direction and
/// Mehrotra predictor-corrector. Assumes the rows of `a` are independent.
inline IpmResult ipm(const MatX& c, const std::vector<MatX>& a, const VecX& b, const SdpOptions& opt) {
  const int n = static_cast<int>(c.rows());
  const int m = static_cast<int>(a.size());
  const MatX eye = MatX::Identity(n, n);

  double anorm_max = 0.0;
  double xi = 10.0;
  for (int k = 0; k < m; ++k) {
    const double an = a[k].norm();
    anorm_max = std::max(anorm_max, an);
    xi = std::max(xi, std::sqrt(double(n)) * (1.0 + std::abs(b(k))) / (1.0 + an));
  }
  const double eta = std::max({10.0, std::sqrt(double(n)), anorm_max, c.norm()});

  IpmResult r;
  r.x = xi * eye;
  r.z = eta * eye;
  r.y = VecX::Zero(m);

  const double bnorm = b.norm();
  const double cnorm = c.norm();

  // Near the boundary the iterates can degrade after reaching the requested
  // accuracy, so the best iterate seen is what a stalled run returns.
  IpmResult best = r;
  double best_merit = std::numeric_limits<double>::infinity();
  auto finish = [&](IpmResult& cur) -> IpmResult& {
    if (cur.converged || cur.diverged) return cur;
    best.iterations = cur.iterations;
    return best;
  };

  for (int it = 0; it < opt.max_iterations; ++it) {
    r.iterations = it;
    const VecX rp = b - apply_op(a, r.x);
    const MatX rd = c - apply_adjoint(a, r.y, n) + r.z;
    const double pobj = c.cwiseProduct(r.x).sum();
    const double dobj = b.dot(r.y);
    const double mu = r.x.cwiseProduct(r.z).sum() / n;

    const double relp = rp.norm() / (1.0 + bnorm);
    const double reld = rd.norm() / (1.0 + cnorm);
    const double gap = std::abs(pobj - dobj);
    const double compl_ = r.x.cwiseProduct(r.z).sum();
    const double gscale = opt.gap_tol * (1.0 + std::abs(pobj));
    if (relp <= 0.1 * opt.feasibility_tol && reld <= 0.1 * opt.feasibility_tol && gap <= 0.1 * gscale &&
        compl_ <= 0.1 * gscale) {
      r.converged = true;
      return r;
    }
    if (!std::isfinite(pobj) || r.x.norm() > 1e12 || r.y.norm() > 1e12) {
      r.diverged = true;
      return r;
    }
    const double merit = std::max({relp / opt.feasibility_tol, reld / opt.feasibility_tol, gap / gscale, compl_ / gscale});
    if (merit < best_merit) {
      best_merit = merit;
      best = r;
    } else if (best_merit <= 1.0 && merit > 1e3 * best_merit) {
      return finish(r);
    }

    Eigen::LLT<MatX> zllt(r.z);
    if (zllt.info() != Eigen::Success) return finish(r);
    const MatX zinv = zllt.solve(eye);

    // Schur complement M_ij = <A_i, Z^-1 A_j X>.
    std::vector<MatX> g(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) g[j] = zinv * a[j] * r.x;
    MatX schur(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) schur(i, j) = a[i].cwiseProduct(g[j]).sum();
    schur = (0.5 * (schur + schur.transpose())).eval();
    // Close to a rank-deficient optimum the Schur matrix is only
    // semidefinite up to rounding; a tiny diagonal shift keeps it factorable
    // and the infeasible-start steps absorb the inexact direction.
    Eigen::LDLT<MatX> sfac(schur);
    const double sscale = std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
    for (double shift = 1e-14; sfac.info() != Eigen::Success || !sfac.isPositive(); shift *= 100.0) {
      if (shift > 1e-8) return finish(r);
      sfac.compute(schur + shift * sscale * MatX::Identity(m, m));
    }

    auto direction = [&](double target_mu, const MatX* corr, MatX& dx, VecX& dy, MatX& dz) {
      MatX t = target_mu * zinv - r.x + zinv * rd * r.x;
      if (corr) t -= *corr;
      const VecX h = apply_op(a, t) - rp;
      dy = sfac.solve(h);
      dz = apply_adjoint(a, dy, n) - rd;
      dx = target_mu * zinv - r.x - zinv * dz * r.x;
      if (corr) dx -= *corr;
      dx = (0.5 * (dx + dx.transpose())).eval();
    };

    MatX dx, dz;
    VecX dy;
    direction(0.0, nullptr, dx, dy, dz);
    const double ap_aff = max_step(r.x, dx, 1.0);
    const double ad_aff = max_step(r.z, dz, 1.0);
    const double mu_aff = (r.x + ap_aff * dx).cwiseProduct(r.z + ad_aff * dz).sum() / n;
    double sigma = std::pow(std::max(0.0, mu_aff) / mu, 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);

    const MatX corr = zinv * dz * dx;
    direction(sigma * mu, &corr, dx, dy, dz);

    const double ap_max = max_step(r.x, dx, 1e30);
    const double ad_max = max_step(r.z, dz, 1e30);
    const double gamma = 0.9 + 0.09 * std::min({1.0, ap_max, ad_max});
    const double ap = std::min(1.0, gamma * ap_max);
    const double ad = std::min(1.0, gamma * ad_max);
    if (ap < 1e-14 && ad < 1e-14) return finish(r);

    r.x += ap * dx;
    r.x = (0.5 * (r.x + r.x.transpose())).eval();
    r.y += ad * dy;
    r.z += ad * dz;
    r.z = (0.5 * (r.z + r.z.transpose())).eval();
  }
  r.iterations = opt.max_iterations;
  return finish(r);
}

/// Row vector of a constraint in the upper-triangular coordinates X_ij, i <= j.
inline VecX constraint_row(const LinearConstraint& c, int n) {
  VecX row = VecX::Zero(n * (n + 1) / 2);
  for (const auto& [ij, g] : c.coeffs) {
    const auto [i, j] = ij;
    row(i * n - i * (i - 1) / 2 + (j - i)) += g;
  }
  return row;
}

}  // namespace detail

namespace detail {

/// Indices i whose diagonal entry X_ii is not forced to zero by a reduced
/// constraint row of the form sum_i c_i X_ii = 0 with all c_i of one sign.
/// Rows are brought to reduced echelon form with off-diagonal variables
/// eliminated first; repeated until no further entry is fixed.
inline std::vector<int> unforced_indices(const SdpProblem& p) {
  const int n = p.dim();
  std::vector<bool> alive(static_cast<std::size_t>(n), true);
  const double eps = 1e-12;
  for (;;) {
    std::vector<std::pair<int, int>> cols;  // off-diagonal first
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (alive[i] && alive[j]) cols.emplace_back(i, j);
    const int first_diag = static_cast<int>(cols.size());
    for (int i = 0; i < n; ++i)
      if (alive[i]) cols.emplace_back(i, i);
    const int nc = static_cast<int>(cols.size());
    const int m = static_cast<int>(p.constraints.size());
    MatX t = MatX::Zero(m, nc + 1);
    for (int k = 0; k < m; ++k) {
      for (int c = 0; c < nc; ++c) {
        const auto it = p.constraints[k].coeffs.find(cols[c]);
        if (it != p.constraints[k].coeffs.end()) t(k, c) = it->second;
      }
      t(k, nc) = p.constraints[k].rhs;
    }
    int row = 0;
    std::vector<int> pivot_col;
    for (int c = 0; c < nc && row < m; ++c) {
      Eigen::Index piv;
      const double v = t.col(c).tail(m - row).cwiseAbs().maxCoeff(&piv);
      if (v <= eps) continue;
      t.row(row).swap(t.row(row + static_cast<int>(piv)));
      t.row(row) /= t(row, c);
      for (int k = 0; k < m; ++k)
        if (k != row && t(k, c) != 0.0) t.row(k) -= t(k, c) * t.row(row);
      pivot_col.push_back(c);
      ++row;
    }
    bool changed = false;
    for (int k = 0; k < row; ++k) {
      if (pivot_col[k] < first_diag || std::abs(t(k, nc)) > eps) continue;
      bool pos = true, neg = true;
      for (int c = first_diag; c < nc; ++c) {
        if (t(k, c) < -eps) pos = false;
        if (t(k, c) > eps) neg = false;
      }
      if (!pos && !neg) continue;
      for (int c = first_diag; c < nc; ++c)
        if (std::abs(t(k, c)) > eps) {
          alive[cols[c].first] = false;
          changed = true;
        }
    }
    if (!changed) break;
  }
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (alive[i]) keep.push_back(i);
  return keep;
}

}  // namespace detail

/// Solves the SDP. Exact duplicates and linearly dependent rows are removed
/// (rank-revealing QR) and logged; inconsistent rows give Infeasible. When
/// the interior-point iteration fails, a big-M phase-I problem decides
/// between Infeasible and NumericalFailure.
inline SdpSolution solve(const SdpProblem& p, const SdpOptions& opt = {}) {
  const int n = p.dim();
  const int m = static_cast<int>(p.constraints.size());
  SdpSolution sol;
  sol.dual_y = VecX::Zero(m);
  sol.x = MatX::Zero(n, n);
  sol.z = MatX::Zero(n, n);
  if (n == 0) throw Error("SDP of dimension 0");
  for (const auto& c : p.constraints)
    for (const auto& [ij, g] : c.coeffs)
      if (ij.first < 0 || ij.second >= n || ij.first > ij.second)
        throw Error("constraint index out of range");

  // Without a strictly feasible point the interior-point method breaks
  // down; solve on the face where the forced diagonal entries vanish.
  const std::vector<int> keep = detail::unforced_indices(p);
  if (static_cast<int>(keep.size()) < n) {
    std::string fixed;
    std::vector<int> pos(static_cast<std::size_t>(n), -1);
    for (std::size_t i = 0; i < keep.size(); ++i) pos[keep[i]] = static_cast<int>(i);
    for (int i = 0; i < n; ++i)
      if (pos[i] < 0) fixed += " " + std::to_string(i);
    sol.log.push_back("diagonal entries forced to zero:" + fixed);
    if (keep.empty()) {
      for (const auto& c : p.constraints)
        if (std::abs(c.rhs) > 1e-12) {
          sol.status = SdpStatus::Infeasible;
          return sol;
        }
      sol.status = SdpStatus::Optimal;
      return sol;
    }
    const int r = static_cast<int>(keep.size());
    SdpProblem sub{MatX(r, r), {}};
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) sub.objective(i, j) = p.objective(keep[i], keep[j]);
    std::vector<int> origin;
    for (int k = 0; k < m; ++k) {
      LinearConstraint rc;
      rc.rhs = p.constraints[k].rhs;
      for (const auto& [ij, g] : p.constraints[k].coeffs)
        if (pos[ij.first] >= 0 && pos[ij.second] >= 0 && g != 0.0) rc.set(pos[ij.first], pos[ij.second], g);
      if (rc.coeffs.empty()) {
        if (std::abs(rc.rhs) > 1e-12) {
          sol.status = SdpStatus::Infeasible;
          sol.log.push_back("constraint " + std::to_string(k) + " is inconsistent with the forced zeros");
          return sol;
        }
        continue;
      }
      sub.constraints.push_back(std::move(rc));
      origin.push_back(k);
    }
    SdpSolution inner = solve(sub, opt);
    sol.status = inner.status;
    sol.objective_value = inner.objective_value;
    sol.dual_value = inner.dual_value;
    sol.residuals = inner.residuals;
    sol.iterations = inner.iterations;
    for (auto& line : inner.log) sol.log.push_back(std::move(line));
    for (std::size_t i = 0; i < keep.size(); ++i)
      for (std::size_t j = 0; j < keep.size(); ++j) {
        sol.x(keep[i], keep[j]) = inner.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        sol.z(keep[i], keep[j]) = inner.z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    for (std::size_t i = 0; i < origin.size(); ++i) sol.dual_y(origin[i]) = inner.dual_y(static_cast<Eigen::Index>(i));
    return sol;
  }

  // Preprocessing: linear independence of the constraint rows.
  const int nv = n * (n + 1) / 2;
  MatX rows(m, nv);
  VecX rhs(m);
  for (int k = 0; k < m; ++k) {
    rows.row(k) = detail::constraint_row(p.constraints[k], n).transpose();
    rhs(k) = p.constraints[k].rhs;
  }
  std::vector<int> kept;
  if (m > 0) {
    Eigen::ColPivHouseholderQR<MatX> qr(rows.transpose());
    qr.setThreshold(1e-10);
    const int rank = static_cast<int>(qr.rank());
    for (int i = 0; i < rank; ++i) kept.push_back(static_cast<int>(qr.colsPermutation().indices()(i)));
    std::sort(kept.begin(), kept.end());
    if (rank < m) {
      MatX basis(nv, rank);
      VecX bk(rank);
      for (int i = 0; i < rank; ++i) {
        basis.col(i) = rows.row(kept[i]).transpose();
        bk(i) = rhs(kept[i]);
      }
      const auto bqr = basis.colPivHouseholderQr();
      for (int k = 0; k < m; ++k) {
        if (std::binary_search(kept.begin(), kept.end(), k)) continue;
        const VecX coef = bqr.solve(VecX(rows.row(k).transpose()));
        const double expected = coef.dot(bk);
        if (std::abs(expected - rhs(k)) > 1e-9 * (1.0 + std::abs(rhs(k)))) {
          sol.status = SdpStatus::Infeasible;
          sol.log.push_back("constraint " + std::to_string(k) + " is inconsistent with the others");
          return sol;
        }
        sol.log.push_back("removed linearly dependent constraint " + std::to_string(k));
      }
    }
  }

  std::vector<MatX> a;
  VecX b(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    a.push_back(p.constraints[kept[i]].matrix(n));
    b(static_cast<Eigen::Index>(i)) = rhs(kept[i]);
  }
  const MatX c = 0.5 * (p.objective + p.objective.transpose());

  const detail::IpmResult r = detail::ipm(c, a, b, opt);
  sol.iterations = r.iterations;
  sol.x = r.x;
  for (std::size_t i = 0; i < kept.size(); ++i) sol.dual_y(kept[i]) = r.y(static_cast<Eigen::Index>(i));
  sol.z = detail::apply_adjoint(a, r.y, n) - c;
  sol.objective_value = c.cwiseProduct(r.x).sum();
  sol.dual_value = b.dot(r.y);

  sol.residuals.primal = a.empty() ? 0.0 : (detail::apply_op(a, r.x) - b).cwiseAbs().maxCoeff();
  sol.residuals.dual = std::max(0.0, -min_eigenvalue(sol.z));
  sol.residuals.gap = std::abs(sol.objective_value - sol.dual_value);
  sol.residuals.complementarity = std::abs(r.x.cwiseProduct(sol.z).sum());

  const double scale = 1.0 + std::abs(sol.objective_value);
  const bool certified = sol.residuals.primal <= opt.feasibility_tol * (1.0 + b.lpNorm<Eigen::Infinity>()) &&
                         sol.residuals.dual <= opt.feasibility_tol * (1.0 + c.norm()) &&
                         sol.residuals.gap <= opt.gap_tol * scale &&
                         min_eigenvalue(sol.x) >= -opt.psd_tol;
  if (certified) {
    sol.status = SdpStatus::Optimal;
    return sol;
  }

  // Phase I: maximize -tau s.t. <A_k, X> + tau r_k = b_k, tr X + tau + s = M
  // over the block-diagonal variable diag(X, tau, s).
  const int np = n + 2;
  std::vector<MatX> pa;
  VecX pb(static_cast<Eigen::Index>(a.size() + 1));
  for (std::size_t k = 0; k < a.size(); ++k) {
    MatX ak = MatX::Zero(np, np);
    ak.topLeftCorner(n, n) = a[k];
    ak(n, n) = b(static_cast<Eigen::Index>(k)) - a[k].trace();
    pa.push_back(ak);
    pb(static_cast<Eigen::Index>(k)) = b(static_cast<Eigen::Index>(k));
  }
  pa.push_back(MatX::Identity(np, np));
  pb(static_cast<Eigen::Index>(a.size())) = opt.big_m;
  MatX pc = MatX::Zero(np, np);
  pc(n, n) = -1.0;
  const detail::IpmResult ph = detail::ipm(pc, pa, pb, opt);
  const double tau = ph.x(n, n);
  sol.log.push_back("phase-I optimum tau = " + std::to_string(tau));
  if (ph.converged && tau > 1e-7) {
    sol.status = SdpStatus::Infeasible;
    sol.log.push_back("no psd point with trace <= " + std::to_string(opt.big_m) + " satisfies the constraints");
  } else {
    sol.status = SdpStatus::NumericalFailure;
    sol.log.push_back(r.diverged ? "iterates diverged; objective may be unbounded"
                                 : "interior-point iteration did not converge");
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Constraint builder for Kelvin-Mandel variables (0-based indices).

struct ConstraintSpec {
  bool complete_symmetry = true;
  bool eigensystem = false;
  bool normalization = true;
  std::optional<std::pair<double, double>> eigenvalues;  // (lambda1, lambda2)
  bool orthotropy = false;
};

inline std::vector<LinearConstraint> build_constraints(const ConstraintSpec& spec) {
  std::vector<LinearConstraint> out;
  auto row = [&](std::initializer_list<std::tuple<int, int, double>> entries, double g) {
    LinearConstraint c;
    for (const auto& [i, j, v] : entries) c.set(i - 1, j - 1, v);
    c.rhs = g;
    out.push_back(std::move(c));
  };
  if (spec.complete_symmetry) {
    row({{4, 4, 1.0}, {2, 3, -2.0}}, 0.0);
    row({{5, 5, 1.0}, {1, 3, -2.0}}, 0.0);
    row({{6, 6, 1.0}, {1, 2, -2.0}}, 0.0);
    row({{4, 5, 1.0}, {3, 6, -kSqrt2}}, 0.0);
    row({{4, 6, 1.0}, {2, 5, -kSqrt2}}, 0.0);
    row({{5, 6, 1.0}, {1, 4, -kSqrt2}}, 0.0);
  }
  if (spec.eigensystem) {
    row({{1, 4, 1.0}, {2, 4, 1.0}, {3, 4, 1.0}}, 0.0);
    row({{1, 5, 1.0}, {2, 5, 1.0}, {3, 5, 1.0}}, 0.0);
    row({{1, 6, 1.0}, {2, 6, 1.0}, {3, 6, 1.0}}, 0.0);
  }
  if (spec.normalization) {
    row({{1, 1, 1.0}, {2, 2, 1.0}, {3, 3, 1.0}, {4, 4, 1.0}, {5, 5, 1.0}, {6, 6, 1.0}}, 1.0);
  }
  if (spec.eigenvalues) {
    validate_ordering(spec.eigenvalues->first, spec.eigenvalues->second);
    row({{1, 1, 1.0}, {1, 2, 1.0}, {1, 3, 1.0}}, spec.eigenvalues->first);
    row({{1, 2, 1.0}, {2, 2, 1.0}, {2, 3, 1.0}}, spec.eigenvalues->second);
  }
  if (spec.orthotropy) {
    row({{2, 4, 1.0}}, 0.0);
    row({{3, 4, 1.0}}, 0.0);
    row({{1, 5, 1.0}}, 0.0);
    row({{3, 5, 1.0}}, 0.0);
    row({{1, 6, 1.0}}, 0.0);
    row({{2, 6, 1.0}}, 0.0);
  }
  return out;
}

/// Restricts an SDP to the principal submatrix on `keep`; X is fixed to zero
/// elsewhere. Coefficients on dropped entries vanish and constraints left
/// without coefficients are dropped (or make the problem infeasible if their
/// right-hand side is nonzero, reported through the returned flag).
struct RestrictedProblem {
  SdpProblem problem;
  std::vector<int> keep;
  bool consistent = true;
};

inline RestrictedProblem restrict_problem(const SdpProblem& p, const std::vector<int>& keep) {
  RestrictedProblem out;
  out.keep = keep;
  const int r = static_cast<int>(keep.size());
  std::vector<int> pos(static_cast<std::size_t>(p.dim()), -1);
  for (int i = 0; i < r; ++i) pos[keep[i]] = i;
  out.problem.objective = MatX(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) out.problem.objective(i, j) = p.objective(keep[i], keep[j]);
  for (const auto& c : p.constraints) {
    LinearConstraint rc;
    rc.rhs = c.rhs;
    for (const auto& [ij, g] : c.coeffs)
      if (pos[ij.first] >= 0 && pos[ij.second] >= 0 && g != 0.0) rc.set(pos[ij.first], pos[ij.second], g);
    if (rc.coeffs.empty()) {
      if (std::abs(rc.rhs) > 1e-12) out.consistent = false;
      continue;
    }
    if (std::find(out.problem.constraints.begin(), out.problem.constraints.end(), rc) ==
        out.problem.constraints.end())
      out.problem.constraints.push_back(std::move(rc));
  }
  return out;
}

inline MatX embed(const MatX& x, const std::vector<int>& keep, int n) {
  MatX full = MatX::Zero(n, n);
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j) full(keep[i], keep[j]) = x(i, j);
  return full;
}

// ---------------------------------------------------------------------------
// Extremal fourth-order information for prescribed second-order data.

struct ExtremeResult {
  double value = 0.0;
  Sym4 tensor;  // eigensystem frame
  SdpSolution solution;
};

/// Kelvin-Mandel slots whose basis tensor only involves eigendirections with
/// nonzero eigenvalue. The others are forced to zero by psd-ness together
/// with A : Id = diag(lambda).
inline std::vector<int> active_km_slots(double lambda1, double lambda2, double tol = 1e-12) {
  const double lam[3] = {lambda1, lambda2, 1.0 - lambda1 - lambda2};
  std::vector<int> keep;
  for (int s = 0; s < 6; ++s) {
    const auto [i, j] = detail::kKmPair[s];
    if (lam[i] > tol && lam[j] > tol) keep.push_back(s);
  }
  return keep;
}

/// maximize n(x)4 :: A over candidates with A : Id = diag(lambda1, lambda2,
/// lambda3) in the eigensystem frame and the requested material symmetry.
inline ExtremeResult extremize(double lambda1, double lambda2, const Direction& n, SymmetryClass symmetry,
                               const SdpOptions& opt = {}) {
  validate_ordering(lambda1, lambda2);
  ConstraintSpec spec;
  spec.eigensystem = true;
  spec.eigenvalues = std::make_pair(lambda1, lambda2);
  spec.orthotropy = symmetry == SymmetryClass::Orthotropic;

  const Vec6 mv = km_vector(n.vec());
  SdpProblem full{mv * mv.transpose(), build_constraints(spec)};
  const RestrictedProblem rp = restrict_problem(full, active_km_slots(lambda1, lambda2));
  if (!rp.consistent) throw SolverError("extremize: restricted constraints are inconsistent");

  ExtremeResult out;
  out.solution = solve(rp.problem, opt);
  if (out.solution.status != SdpStatus::Optimal)
    throw SolverError("extremize: solver status " + std::string(to_string(out.solution.status)));
  const MatX x6 = embed(out.solution.x, rp.keep, 6);
  out.solution.x = x6;
  out.solution.z = embed(out.solution.z, rp.keep, 6);
  out.value = out.solution.objective_value;
  out.tensor = sym4_nearest_km(KM66{Mat6(x6), Frame::Eigen}, 1e-6);
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps over directions.

struct SweepGrid {
  bool planar = false;
  int n_phi = 31;
  int n_theta = 31;  // ignored in planar mode

  static SweepGrid sphere(int n_phi = 31, int n_theta = 31) { return {false, n_phi, n_theta}; }
  static SweepGrid plane(int n_phi = 91) { return {true, n_phi, 1}; }
};

struct SweepNode {
  double phi_deg = 0.0;
  double theta_deg = 0.0;
  std::vector<double> values;  // one per requested symmetry, NaN on failure
  int iterations = 0;
  bool ok = true;
};

struct SweepResult {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  SweepGrid grid;
  std::vector<SymmetryClass> symmetries;
  std::vector<SweepNode> nodes;  // theta outer, phi inner
  SdpOptions options;

  int failures() const {
    return static_cast<int>(std::count_if(nodes.begin(), nodes.end(), [](const SweepNode& n) { return !n.ok; }));
  }
  long total_iterations() const {
    long s = 0;
    for (const auto& n : nodes) s += n.iterations;
    return s;
  }
};

inline double grid_angle(int i, int count) { return count <= 1 ? 0.0 : 90.0 * i / (count - 1); }

/// One extremize solve per node and symmetry class on the eighth sphere
/// phi, theta in [0, 90] deg, or on the v1-v2 plane (theta = 90 deg). Node
/// failures are recorded as NaN. Nodes may be processed by up to `threads`
/// workers; results do not depend on the thread count.
inline SweepResult sweep(double lambda1, double lambda2, const SweepGrid& grid,
                         const std::vector<SymmetryClass>& symmetries, unsigned threads = 1,
                         const SdpOptions& opt = {}) {
  validate_ordering(lambda1, lambda2);
  SweepResult res;
  res.lambda1 = lambda1;
  res.lambda2 = lambda2;
  res.grid = grid;
  res.symmetries = symmetries;
  res.options = opt;
  const int nt = grid.planar ? 1 : grid.n_theta;
  for (int t = 0; t < nt; ++t)
    for (int f = 0; f < grid.n_phi; ++f) {
      SweepNode node;
      node.phi_deg = grid_angle(f, grid.n_phi);
      node.theta_deg = grid.planar ? 90.0 : grid_angle(t, grid.n_theta);
      res.nodes.push_back(node);
    }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < res.nodes.size(); i = next++) {
      SweepNode& node = res.nodes[i];
      const double deg = std::numbers::pi / 180.0;
      const Direction n = Direction::spherical(node.phi_deg * deg, node.theta_deg * deg);
      for (SymmetryClass s : symmetries) {
        try {
          const ExtremeResult r = extremize(lambda1, lambda2, n, s, opt);
          node.values.push_back(r.value);
          node.iterations += r.solution.iterations;
        } catch (const Error&) {
          node.values.push_back(std::numeric_limits<double>::quiet_NaN());
          node.ok = false;
        }
      }
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return res;
}

}  // namespace fotex
