#pragma once

// Constructive realizability: decomposition of candidate tensors into
// nonnegative sums of rank-one quartic powers, the sphere minimum of quartic
// forms, and sum-of-squares certificates through the dual SDP.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "fotex/errors.hpp"
#include "fotex/fot.hpp"
#include "fotex/sdp.hpp"
#include "fotex/sphere.hpp"
#include "fotex/tensor.hpp"

namespace fotex {

using Vec15 = Eigen::Matrix<double, 15, 1>;
using MomentMatrix = Eigen::Matrix<double, 15, Eigen::Dynamic>;

/// Moment vector of p (x)4; Euclidean norms of these vectors are tensor
/// Frobenius norms.
inline Vec15 atom_moment(const Vec3& p) { return Sym4::power(p).moment_vector(); }

inline MomentMatrix moment_matrix(const std::vector<Direction>& dirs) {
  MomentMatrix e(15, static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t i = 0; i < dirs.size(); ++i) e.col(static_cast<Eigen::Index>(i)) = atom_moment(dirs[i].vec());
  return e;
}

/// Lawson-Hanson active-set solution of min |E w - a| subject to w >= 0.
inline VecX nnls(const MatX& e, const VecX& a, int max_iter = 0) {
  const Eigen::Index n = e.cols();
  if (max_iter <= 0) max_iter = static_cast<int>(3 * n + 30);
  VecX w = VecX::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double tol = 1e-14 * std::max(1.0, e.norm() * a.norm());

  auto solve_passive = [&](VecX& s) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    MatX ep(e.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) ep.col(static_cast<Eigen::Index>(k)) = e.col(idx[k]);
    const VecX sp = ep.colPivHouseholderQr().solve(a);
    s = VecX::Zero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) s(idx[k]) = sp(static_cast<Eigen::Index>(k));
  };

  for (int outer = 0; outer < max_iter; ++outer) {
    const VecX grad = e.transpose() * (a - e * w);
    Eigen::Index best = -1;
    double best_val = tol;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[j] && grad(j) > best_val) {
        best_val = grad(j);
        best = j;
      }
    if (best < 0) break;
    passive[best] = true;

    for (int inner = 0; inner < max_iter; ++inner) {
      VecX s;
      solve_passive(s);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && s(j) <= 0.0) feasible = false;
      if (feasible) {
        w = s;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && s(j) <= 0.0) alpha = std::min(alpha, w(j) / (w(j) - s(j)));
      w += alpha * (s - w);
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && w(j) <= 1e-15) {
          passive[j] = false;
          w(j) = 0.0;
        }
    }
  }
  return w;
}

/// Frobenius norm of sum_i w_i p_i (x)4 - target, recomputed from scratch.
inline double realization_residual(const FiberMeasure& m, const Sym4& target) {
  return (moment4(m) - target).norm();
}

/// Reduces a nonnegative atomic representation to at most 15 atoms by
/// repeatedly removing a linear dependence among the atom moment vectors.
inline FiberMeasure caratheodory_reduce(const FiberMeasure& m, const Sym4& target) {
  FiberMeasure cur = m;
  if (realization_residual(m, target) > 1e-9 * std::max(1.0, target.norm()))
    throw Error("caratheodory_reduce: measure does not reproduce the target");
  while (cur.atoms.size() > 15) {
    std::vector<Direction> dirs;
    for (const auto& at : cur.atoms) dirs.push_back(at.direction);
    const MatX e = moment_matrix(dirs);
    VecX c;
    bool found = false;
    // Scaled retries: columns normalized to unit length first.
    for (int attempt = 0; attempt < 2 && !found; ++attempt) {
      MatX es = e;
      VecX scale = VecX::Ones(e.cols());
      if (attempt == 1)
        for (Eigen::Index j = 0; j < e.cols(); ++j) {
          scale(j) = 1.0 / e.col(j).norm();
          es.col(j) *= scale(j);
        }
      Eigen::JacobiSVD<MatX> svd(es, Eigen::ComputeFullV);
      c = svd.matrixV().col(e.cols() - 1).cwiseProduct(scale);
      found = (e * c).norm() <= 1e-10 * e.norm() * c.norm();
    }
    if (!found) throw NullSpaceNotFound("no numerically null combination of atom moments");
    if (c.maxCoeff() <= 0.0) c = -c;

    double t = std::numeric_limits<double>::infinity();
    Eigen::Index drop = -1;
    for (Eigen::Index i = 0; i < c.size(); ++i)
      if (c(i) > 0.0 && cur.atoms[i].weight / c(i) < t) {
        t = cur.atoms[i].weight / c(i);
        drop = i;
      }
    FiberMeasure next;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      if (i == drop) continue;
      double w = cur.atoms[i].weight - t * c(i);
      if (w < 0.0) w = 0.0;  // roundoff, |w| ~ 1e-16
      if (w > 0.0) next.atoms.push_back({w, cur.atoms[i].direction});
    }
    cur = std::move(next);
  }
  return cur;
}

struct RealizeOptions {
  int grid_size = 400;
  int polish_iters = 50;
  double tol = 1e-8;
  double candidate_tol = 1e-7;
};

struct RealizationResult {
  FiberMeasure measure;
  double residual = 0.0;
  int atom_count = 0;
  bool tolerance_reached = false;
};

namespace detail {

inline std::pair<Vec3, Vec3> tangent_basis(const Vec3& p) {
  const Vec3 helper = std::abs(p(0)) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 t1 = (helper - helper.dot(p) * p).normalized();
  return {t1, p.cross(t1)};
}

/// Derivative of the moment vector of p (x)4 in direction t.
inline Vec15 atom_moment_derivative(const Vec3& p, const Vec3& t) {
  Vec15 d;
  for (int m = 0; m < 15; ++m) {
    const auto& mi = kMultiIndices[m].idx;
    double s = 0.0;
    for (int pos = 0; pos < 4; ++pos) {
      double prod = t(mi[pos]);
      for (int o = 0; o < 4; ++o)
        if (o != pos) prod *= p(mi[o]);
      s += prod;
    }
    d(m) = std::sqrt(double(kMultiIndices[m].multiplicity)) * s;
  }
  return d;
}

inline Vec15 measure_moment(const std::vector<double>& w, const std::vector<Vec3>& p) {
  Vec15 v = Vec15::Zero();
  for (std::size_t i = 0; i < w.size(); ++i) v += w[i] * atom_moment(p[i]);
  return v;
}

/// Levenberg-damped Gauss-Newton step on the directions, and optionally on
/// the weights as well (clamped at zero); directions are retracted onto the
/// sphere by normalization.
inline bool polish_step(std::vector<double>& w, std::vector<Vec3>& p, const Vec15& target, double& damping, bool joint) {
  const std::size_t k = p.size();
  const Eigen::Index per = joint ? 3 : 2;
  const Vec15 r = measure_moment(w, p) - target;
  const double f0 = r.squaredNorm();
  MatX jac(15, static_cast<Eigen::Index>(per * k));
  std::vector<std::pair<Vec3, Vec3>> basis(k);
  for (std::size_t i = 0; i < k; ++i) {
    const Eigen::Index c = per * static_cast<Eigen::Index>(i);
    basis[i] = tangent_basis(p[i]);
    jac.col(c) = w[i] * atom_moment_derivative(p[i], basis[i].first);
    jac.col(c + 1) = w[i] * atom_moment_derivative(p[i], basis[i].second);
    if (joint) jac.col(c + 2) = atom_moment(p[i]);
  }
  const MatX jtj = jac.transpose() * jac;
  const VecX jtr = jac.transpose() * r;
  for (int tries = 0; tries < 12; ++tries) {
    MatX lhs = jtj;
    lhs.diagonal().array() += damping * (1e-6 + jtj.diagonal().array());
    const VecX step = lhs.ldlt().solve(-jtr);
    std::vector<Vec3> tp(k);
    std::vector<double> tw = w;
    for (std::size_t i = 0; i < k; ++i) {
      const Eigen::Index c = per * static_cast<Eigen::Index>(i);
      tp[i] = (p[i] + step(c) * basis[i].first + step(c + 1) * basis[i].second).normalized();
      if (joint) tw[i] = std::max(0.0, w[i] + step(c + 2));
    }
    const double f1 = (measure_moment(tw, tp) - target).squaredNorm();
    if (f1 < f0) {
      p = std::move(tp);
      w = std::move(tw);
      damping = std::max(1e-12, damping * 0.3);
      return true;
    }
    damping *= 10.0;
  }
  return false;
}

/// Merges directions closer than ~1e-7 rad (up to sign) and drops zero weights.
inline void merge_atoms(std::vector<double>& w, std::vector<Vec3>& p) {
  std::vector<double> nw;
  std::vector<Vec3> np;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0)) continue;
    bool merged = false;
    for (std::size_t j = 0; j < np.size(); ++j) {
      if (std::abs(np[j].dot(p[i])) > 1.0 - 1e-14) {
        nw[j] += w[i];
        merged = true;
        break;
      }
    }
    if (!merged) {
      nw.push_back(w[i]);
      np.push_back(p[i]);
    }
  }
  w = std::move(nw);
  p = std::move(np);
}

/// Greedy clustering: the heaviest remaining atom absorbs every atom within
/// the given angle (up to sign) at the weighted mean direction.
inline void cluster_atoms(std::vector<double>& w, std::vector<Vec3>& p, double angle) {
  std::vector<std::size_t> order(w.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
  std::vector<bool> used(w.size(), false);
  std::vector<double> nw;
  std::vector<Vec3> np;
  const double c = std::cos(angle);
  for (std::size_t oi : order) {
    if (used[oi]) continue;
    double sw = 0.0;
    Vec3 sp = Vec3::Zero();
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (used[j]) continue;
      const double d = p[oi].dot(p[j]);
      if (std::abs(d) < c) continue;
      used[j] = true;
      sw += w[j];
      sp += w[j] * (d < 0.0 ? -p[j] : p[j]);
    }
    nw.push_back(sw);
    np.push_back(sp.normalized());
  }
  w = std::move(nw);
  p = std::move(np);
}

inline void refit_weights(std::vector<double>& w, const std::vector<Vec3>& p, const Vec15& target) {
  MatX e(15, static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) e.col(static_cast<Eigen::Index>(i)) = atom_moment(p[i]);
  const VecX sol = nnls(e, target);
  for (std::size_t i = 0; i < p.size(); ++i) w[i] = sol(static_cast<Eigen::Index>(i));
}

/// Alternating fixed-weight direction polish and NNLS re-fit; returns the
/// final residual norm.
inline double polish(std::vector<double>& w, std::vector<Vec3>& p, const Vec15& target, const RealizeOptions& opts) {
  double res = (measure_moment(w, p) - target).norm();
  double damping = 1e-3;
  for (int round = 0; round < opts.polish_iters && res > 1e-3 * opts.tol; ++round) {
    const bool moved = polish_step(w, p, target, damping, true);
    refit_weights(w, p, target);
    merge_atoms(w, p);
    const double next = (measure_moment(w, p) - target).norm();
    const bool stalled = res - next < 1e-12;
    res = std::min(res, next);
    if (stalled && !moved) break;
  }
  return res;
}

}  // namespace detail

namespace detail {

/// Orthonormal basis of the numerically null eigenvectors of KM(A). Every
/// atom p of a decomposition of A has km_vector(p) orthogonal to them.
inline MatX km_null_space(const Sym4& a, double rel_tol) {
  const auto e = eig_sym(km_from_sym4(a).m);
  int q = 0;
  while (q < 6 && e.values(5 - q) <= rel_tol * std::max(e.values(0), 1e-300)) ++q;
  MatX n(6, q);
  for (int i = 0; i < q; ++i) n.col(i) = e.vectors.col(5 - i);
  return n;
}

/// Gauss-Newton projection of a unit vector onto the common zeros of the
/// quadrics n_i . km_vector(p). Returns false when it stalls away from them.
inline bool project_to_zero_set(Vec3& p, const MatX& n) {
  for (int it = 0; it < 40; ++it) {
    const VecX g = n.transpose() * km_vector(p);
    if (g.norm() < 1e-15) return true;
    const auto [t1, t2] = tangent_basis(p);
    auto dm = [&](const Vec3& t) {
      Vec6 d;
      d << 2 * p(0) * t(0), 2 * p(1) * t(1), 2 * p(2) * t(2), kSqrt2 * (p(1) * t(2) + p(2) * t(1)),
          kSqrt2 * (p(0) * t(2) + p(2) * t(0)), kSqrt2 * (p(0) * t(1) + p(1) * t(0));
      return d;
    };
    MatX j(n.cols(), 2);
    j.col(0) = n.transpose() * dm(t1);
    j.col(1) = n.transpose() * dm(t2);
    const Eigen::Vector2d step = j.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-g);
    const double len = step.norm();
    const double scale = len > 0.3 ? 0.3 / len : 1.0;
    p = (p + scale * (step(0) * t1 + step(1) * t2)).normalized();
  }
  return (n.transpose() * km_vector(p)).norm() <= 1e-12;
}

inline void ring(std::vector<Vec3>& out, const Vec3& c, double h, int count) {
  const auto [t1, t2] = tangent_basis(c);
  for (int j = 0; j < count; ++j) {
    const double ang = 2.0 * std::numbers::pi * j / count;
    out.push_back((std::cos(h) * c + std::sin(h) * (std::cos(ang) * t1 + std::sin(ang) * t2)).normalized());
  }
}

/// Appends the zero-set projections of the given points (duplicates removed).
inline void add_projected(std::vector<Vec3>& out, const std::vector<Vec3>& pts, const MatX& n) {
  if (n.cols() == 0) return;
  const std::size_t first = out.size();
  for (Vec3 p : pts) {
    if (!project_to_zero_set(p, n)) continue;
    bool dup = false;
    for (std::size_t i = first; i < out.size() && !dup; ++i) dup = std::abs(out[i].dot(p)) > 1.0 - 1e-13;
    if (!dup) out.push_back(p);
  }
}

inline double nnls_support(const std::vector<Vec3>& cand, const Vec15& target, std::vector<double>& w,
                           std::vector<Vec3>& p) {
  MatX e(15, static_cast<Eigen::Index>(cand.size()));
  for (std::size_t i = 0; i < cand.size(); ++i) e.col(static_cast<Eigen::Index>(i)) = atom_moment(cand[i]);
  const VecX sol = nnls(e, target);
  w.clear();
  p.clear();
  for (std::size_t i = 0; i < cand.size(); ++i)
    if (sol(static_cast<Eigen::Index>(i)) > 0.0) {
      w.push_back(sol(static_cast<Eigen::Index>(i)));
      p.push_back(cand[i]);
    }
  return (measure_moment(w, p) - target).norm();
}

}  // namespace detail

/// Nonnegative atomic decomposition of a candidate tensor with at most 15
/// atoms. Throws NotCandidate for inputs outside the candidate set; a result
/// with tolerance_reached = false is the best effort found.
///
/// Stages: NNLS over a half-sphere dictionary, local dictionary refinement,
/// direction polish alternating with NNLS re-fits, Caratheodory reduction.
/// When KM(A) is singular all atoms lie on the common zeros of the quadrics
/// given by its null vectors, and the dictionary is augmented by projections
/// onto that set.
inline RealizationResult realize(const Sym4& a, const RealizeOptions& opts = {}) {
  const CandidateReport rep = check_candidate(a, opts.candidate_tol);
  if (!rep.is_candidate) throw NotCandidate("tensor is not a fiber-orientation tensor candidate");

  const Vec15 target = a.moment_vector();
  const MatX null = detail::km_null_space(a, 1e-7);
  std::vector<Vec3> base;
  for (const auto& d : fibonacci_half_sphere(opts.grid_size)) base.push_back(d.vec());
  {
    std::vector<Vec3> proj;
    detail::add_projected(proj, base, null);
    base.insert(base.end(), proj.begin(), proj.end());
  }

  std::vector<double> w;
  std::vector<Vec3> p;
  double res = detail::nnls_support(base, target, w, p);

  // Local refinement: NNLS over the base dictionary, the current support and
  // rings around it at halving radii. Each level is convex, so the support can
  // move between basins where a local polish would stall.
  const double spacing = std::sqrt(2.0 * std::numbers::pi / opts.grid_size);
  for (double h = 0.5 * spacing; h > 1e-9 && res > 1e-3 * opts.tol; h *= 0.5) {
    std::vector<Vec3> local;
    for (const Vec3& c : p) detail::ring(local, c, h, 8);
    std::vector<Vec3> cand = p;
    cand.insert(cand.end(), base.begin(), base.end());
    cand.insert(cand.end(), local.begin(), local.end());
    detail::add_projected(cand, local, null);
    std::vector<double> nw;
    std::vector<Vec3> np;
    // Near-parallel columns at small radii can stop the active set early.
    const double next = detail::nnls_support(cand, target, nw, np);
    if (next > res) continue;
    res = next;
    w = std::move(nw);
    p = std::move(np);
  }

  res = std::min(res, detail::polish(w, p, target, opts));
  // Polished atoms gather in clusters around the support points; collapsing
  // them at decreasing scales removes redundant atoms. A collapse is kept if
  // it lowers the residual or leaves a converged fit converged.
  for (double angle : {2.5 * spacing, spacing, 0.3 * spacing, 0.1 * spacing, 0.03 * spacing, 1e-3 * spacing}) {
    std::vector<double> wc = w;
    std::vector<Vec3> pc = p;
    detail::cluster_atoms(wc, pc, angle);
    if (wc.size() == w.size()) continue;
    detail::refit_weights(wc, pc, target);
    detail::merge_atoms(wc, pc);
    const double res_c = detail::polish(wc, pc, target, opts);
    if (res_c < res || res_c <= 1e-3 * opts.tol) {
      res = res_c;
      w = std::move(wc);
      p = std::move(pc);
    }
  }

  FiberMeasure m;
  for (std::size_t i = 0; i < w.size(); ++i) m.atoms.push_back({w[i], Direction::normalized(p[i])});
  if (m.atoms.size() > 15) m = caratheodory_reduce(m, moment4(m));

  RealizationResult out;
  out.measure = std::move(m);
  out.residual = realization_residual(out.measure, a);
  out.atom_count = static_cast<int>(out.measure.atoms.size());
  out.tolerance_reached = out.residual <= opts.tol;
  return out;
}

// ---------------------------------------------------------------------------
// Quartic forms on the sphere.

struct SphereMinimum {
  double value;
  Direction argmin;
};

namespace detail {

inline Vec3 quartic_gradient(const detail::Full4& f, const Vec3& x) {
  Vec3 g = Vec3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) g(i) += 4.0 * f[flat(i, j, k, l)] * x(j) * x(k) * x(l);
  return g;
}

inline Mat3 quartic_hessian(const detail::Full4& f, const Vec3& x) {
  Mat3 h = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) h(i, j) += 12.0 * f[flat(i, j, k, l)] * x(k) * x(l);
  return h;
}

/// Riemannian Newton descent on the sphere with backtracking.
inline Vec3 sphere_newton(const Sym4& b, Vec3 x, int max_iter = 50) {
  const detail::Full4 f = b.full();
  double fx = quartic_eval(b, x);
  for (int it = 0; it < max_iter; ++it) {
    const auto [t1, t2] = tangent_basis(x);
    Eigen::Matrix<double, 3, 2> t;
    t << t1, t2;
    const Vec3 g = quartic_gradient(f, x);
    const Eigen::Vector2d gr = t.transpose() * g;
    if (gr.norm() < 1e-15) break;
    Eigen::Matrix2d hr = t.transpose() * quartic_hessian(f, x) * t - x.dot(g) * Eigen::Matrix2d::Identity();
    Eigen::Vector2d step;
    Eigen::LLT<Eigen::Matrix2d> llt(hr);
    if (llt.info() == Eigen::Success && hr.determinant() > 0.0)
      step = -llt.solve(gr);
    else
      step = -gr / std::max(1.0, hr.norm());
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls) {
      const Vec3 trial = (x + alpha * (t * step)).normalized();
      const double ft = quartic_eval(b, trial);
      if (ft <= fx) {
        moved = ft < fx || alpha == 1.0;
        x = trial;
        fx = ft;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  return x;
}

}  // namespace detail

/// Minimum of B :: q(x)4 over a Fibonacci grid of unit directions, optionally
/// refined by Riemannian Newton from the best well-separated grid points.
inline SphereMinimum quartic_min_on_sphere(const Sym4& b, int grid_size = 2000, bool polish = true) {
  if (grid_size < 100) throw Error("quartic_min_on_sphere: grid_size must be at least 100");
  const std::vector<Direction> grid = fibonacci_half_sphere(grid_size);
  std::vector<std::pair<double, std::size_t>> vals;
  vals.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals.emplace_back(quartic_eval(b, grid[i].vec()), i);
  std::sort(vals.begin(), vals.end());

  SphereMinimum best{vals.front().first, grid[vals.front().second]};
  if (!polish) return best;

  std::vector<Vec3> starts;
  for (const auto& [v, i] : vals) {
    const Vec3& p = grid[i].vec();
    bool far = true;
    for (const auto& s : starts)
      if (std::abs(s.dot(p)) > std::cos(0.2)) far = false;
    if (far) starts.push_back(p);
    if (starts.size() >= 12) break;
  }
  for (const auto& s : starts) {
    const Vec3 x = detail::sphere_newton(b, s);
    const double v = quartic_eval(b, x);
    if (v < best.value) best = {v, Direction::normalized(x)};
  }
  return best;
}

// ---------------------------------------------------------------------------
// Sum-of-squares certificates.

struct SosCertificate {
  Mat6 gram;                  // psd, sym(gram) = B
  std::vector<Sym2> squares;  // B::x(x)4 = sum_i (S_i : x(x)x)^2
  double reconstruction_residual = 0.0;
  double min_gram_eigenvalue = 0.0;
};

struct SosWitness {
  Sym4 tensor;  // a candidate with tensor :: B < 0
  double value = 0.0;
};

struct SosResult {
  bool feasible = false;
  std::optional<SosCertificate> certificate;
  std::optional<SosWitness> witness;
  /// min of A :: B over candidates A, equal to the dual SOS margin.
  double margin = 0.0;
  SdpSolution solution;
};

/// Decides whether the quartic form of B is a sum of squares of quadratic
/// forms. Solves t* = min { A :: B : A candidate }; its dual slack Z is a
/// Gram matrix of B - t* |x|^4, hence Z + t* I is a Gram matrix of B. For
/// t* < 0 the minimizer is a separating candidate.
inline SosResult sos_certificate(const Sym4& b, double tol = 1e-9, const SdpOptions& opt = {}) {
  ConstraintSpec spec;
  const Mat6 kb = km_from_sym4(b).m;
  SdpProblem p{MatX(-kb), build_constraints(spec)};
  SosResult out;
  out.solution = solve(p, opt);
  if (out.solution.status != SdpStatus::Optimal)
    throw SolverError("sos_certificate: solver status " + std::string(to_string(out.solution.status)));
  out.margin = -out.solution.objective_value;

  Mat6 g = Mat6(out.solution.z) + out.margin * Mat6::Identity();
  g = (0.5 * (g + g.transpose())).eval();
  // Remove the residual of the dual equality constraints exactly.
  g += km_from_sym4(b - sym4_project_km(g)).m;
  const auto eg = eig_sym(g);
  if (eg.values(5) >= -tol) {
    SosCertificate cert;
    cert.gram = g;
    cert.min_gram_eigenvalue = eg.values(5);
    cert.reconstruction_residual = (sym4_project_km(g) - b).norm();
    for (int i = 0; i < 6; ++i) {
      if (eg.values(i) <= 0.0) continue;
      const Vec6 u = std::sqrt(eg.values(i)) * eg.vectors.col(i);
      cert.squares.push_back(Sym2{{u(0), u(1), u(2), u(3) / kSqrt2, u(4) / kSqrt2, u(5) / kSqrt2}});
    }
    out.feasible = true;
    out.certificate = std::move(cert);
  } else {
    SosWitness w;
    w.tensor = sym4_project_km(Mat6(out.solution.x));
    w.value = w.tensor.dot(b);
    out.witness = w;
  }
  return out;
}

}  // namespace fotex
