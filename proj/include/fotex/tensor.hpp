#pragma once

// Completely symmetric tensors of order two and four in three dimensions and
// their Kelvin-Mandel representation.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "fotex/eig.hpp"
#include "fotex/errors.hpp"

namespace fotex {

inline constexpr double kSqrt2 = 1.41421356237309504880;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// A point on the unit sphere.
class Direction {
 public:
  /// Throws InvalidMeasure unless |v| = 1 within 1e-12.
  explicit Direction(const Vec3& v) : v_(v) {
    if (!v.allFinite() || std::abs(v.norm() - 1.0) > 1e-12)
      throw InvalidMeasure("direction is not a unit vector");
  }
  Direction(double x, double y, double z) : Direction(Vec3(x, y, z)) {}

  /// Normalizes v; throws on a zero or non-finite vector.
  static Direction normalized(const Vec3& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidMeasure("cannot normalize a zero vector");
    Direction d;
    d.v_ = v / n;
    return d;
  }

  /// n(phi, theta) = (cos phi sin theta, sin phi sin theta, cos theta), radians.
  static Direction spherical(double phi, double theta) {
    return normalized(Vec3(std::cos(phi) * std::sin(theta), std::sin(phi) * std::sin(theta),
                           std::cos(theta)));
  }

  const Vec3& vec() const noexcept { return v_; }
  double operator[](int i) const { return v_(i); }
  Direction operator-() const {
    Direction d;
    d.v_ = -v_;
    return d;
  }

 private:
  Direction() = default;
  Vec3 v_ = Vec3::UnitX();
};

/// Symmetric 3x3 tensor stored as (11, 22, 33, 23, 13, 12).
struct Sym2 {
  std::array<double, 6> c{};

  static Sym2 identity() { return Sym2{{1, 1, 1, 0, 0, 0}}; }
  static Sym2 diag(double a, double b, double d) { return Sym2{{a, b, d, 0, 0, 0}}; }
  static Sym2 dyad(const Vec3& p) {
    return Sym2{{p(0) * p(0), p(1) * p(1), p(2) * p(2), p(1) * p(2), p(0) * p(2), p(0) * p(1)}};
  }
  static Sym2 from_matrix(const Mat3& m) {
    return Sym2{{m(0, 0), m(1, 1), m(2, 2), 0.5 * (m(1, 2) + m(2, 1)), 0.5 * (m(0, 2) + m(2, 0)),
                 0.5 * (m(0, 1) + m(1, 0))}};
  }

  double operator()(int i, int j) const { return c[slot(i, j)]; }
  double& operator()(int i, int j) { return c[slot(i, j)]; }

  Mat3 matrix() const {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = (*this)(i, j);
    return m;
  }
  double trace() const { return c[0] + c[1] + c[2]; }
  double norm() const { return matrix().norm(); }

  Sym2& operator+=(const Sym2& o) {
    for (int i = 0; i < 6; ++i) c[i] += o.c[i];
    return *this;
  }
  Sym2& operator*=(double s) {
    for (auto& x : c) x *= s;
    return *this;
  }
  friend Sym2 operator+(Sym2 a, const Sym2& b) { return a += b; }
  friend Sym2 operator-(Sym2 a, const Sym2& b) { return a += (-1.0 * b); }
  friend Sym2 operator*(double s, Sym2 a) { return a *= s; }

 private:
  static int slot(int i, int j) {
    if (i == j) return i;
    return 6 - i - j;  // (1,2)->3, (0,2)->4, (0,1)->5
  }
};

/// Orthogonal 3x3 matrix. Improper elements (det = -1) are allowed and
/// flagged through is_proper().
class Rotation {
 public:
  Rotation() : q_(Mat3::Identity()) {}
  explicit Rotation(const Mat3& q) : q_(q) {
    if ((q.transpose() * q - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-12)
      throw Error("rotation matrix is not orthogonal");
  }
  static Rotation about_axis(const Vec3& axis, double angle) {
    return Rotation(Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix());
  }

  const Mat3& matrix() const noexcept { return q_; }
  bool is_proper() const { return q_.determinant() > 0.0; }
  friend Rotation operator*(const Rotation& a, const Rotation& b) { return Rotation(a.q_ * b.q_); }

 private:
  Mat3 q_;
};

namespace detail {

struct MultiIndex {
  std::array<int, 4> idx;
  int multiplicity;  // number of distinct index permutations
};

inline constexpr std::array<MultiIndex, 15> kMultiIndices = [] {
  std::array<MultiIndex, 15> out{};
  int n = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      for (int k = j; k < 3; ++k)
        for (int l = k; l < 3; ++l) {
          int counts[3] = {0, 0, 0};
          ++counts[i], ++counts[j], ++counts[k], ++counts[l];
          int denom = 1;
          for (int cnt : counts)
            for (int f = 2; f <= cnt; ++f) denom *= f;
          out[n++] = MultiIndex{{i, j, k, l}, 24 / denom};
        }
  return out;
}();

inline constexpr std::array<int, 81> kFullToSorted = [] {
  std::array<int, 81> out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          int s[4] = {i, j, k, l};
          for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
              if (s[b] < s[a]) {
                int t = s[a];
                s[a] = s[b];
                s[b] = t;
              }
          for (int m = 0; m < 15; ++m) {
            const auto& mi = kMultiIndices[m].idx;
            if (mi[0] == s[0] && mi[1] == s[1] && mi[2] == s[2] && mi[3] == s[3]) {
              out[27 * i + 9 * j + 3 * k + l] = m;
            }
          }
        }
  return out;
}();

/// Kelvin-Mandel slot -> index pair, order (11, 22, 33, 23, 13, 12).
inline constexpr std::array<std::array<int, 2>, 6> kKmPair = {
    {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};

constexpr int km_slot(int a, int b) {
  if (a == b) return a;
  return 6 - a - b;
}

inline double km_weight(int slot) { return slot < 3 ? 1.0 : kSqrt2; }

using Full4 = std::array<double, 81>;

constexpr int flat(int i, int j, int k, int l) { return 27 * i + 9 * j + 3 * k + l; }

}  // namespace detail

/// Completely symmetric fourth-order tensor in 3D, stored through its 15
/// independent components in lexicographic multi-index order
/// 1111, 1112, 1113, 1122, 1123, 1133, 1222, 1223, 1233, 1333, 2222, 2223,
/// 2233, 2333, 3333.
struct Sym4 {
  std::array<double, 15> c{};

  /// Component A_ijkl with 0-based indices in any order.
  double operator()(int i, int j, int k, int l) const {
    return c[detail::kFullToSorted[detail::flat(i, j, k, l)]];
  }
  double& operator()(int i, int j, int k, int l) {
    return c[detail::kFullToSorted[detail::flat(i, j, k, l)]];
  }

  /// Named 1-based access such as coeff("1123"); throws ParseError on a bad name.
  double coeff(std::string_view name) const { return c[slot_of(name)]; }
  double& coeff(std::string_view name) { return c[slot_of(name)]; }

  static std::string name_of(int slot) {
    std::string s;
    for (int v : detail::kMultiIndices[slot].idx) s += static_cast<char>('1' + v);
    return s;
  }
  static int slot_of(std::string_view name) {
    if (name.size() != 4) throw ParseError("invalid multi-index '" + std::string(name) + "'");
    int idx[4];
    for (int a = 0; a < 4; ++a) {
      if (name[a] < '1' || name[a] > '3')
        throw ParseError("invalid multi-index '" + std::string(name) + "'");
      idx[a] = name[a] - '1';
    }
    return detail::kFullToSorted[detail::flat(idx[0], idx[1], idx[2], idx[3])];
  }

  /// p (x) p (x) p (x) p.
  static Sym4 power(const Vec3& p) {
    Sym4 a;
    for (int m = 0; m < 15; ++m) {
      const auto& mi = detail::kMultiIndices[m].idx;
      a.c[m] = p(mi[0]) * p(mi[1]) * p(mi[2]) * p(mi[3]);
    }
    return a;
  }

  detail::Full4 full() const {
    detail::Full4 f{};
    for (int n = 0; n < 81; ++n) f[n] = c[detail::kFullToSorted[n]];
    return f;
  }

  /// Double-double contraction A::B = sum over all 81 components.
  double dot(const Sym4& o) const {
    double s = 0.0;
    for (int m = 0; m < 15; ++m) s += detail::kMultiIndices[m].multiplicity * c[m] * o.c[m];
    return s;
  }
  double norm() const { return std::sqrt(dot(*this)); }
  /// Id : A : Id.
  double trace() const {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += (*this)(i, i, j, j);
    return s;
  }

  /// Components scaled so that the Euclidean norm of the result equals the
  /// tensor Frobenius norm.
  Eigen::Matrix<double, 15, 1> moment_vector() const {
    Eigen::Matrix<double, 15, 1> v;
    for (int m = 0; m < 15; ++m) v(m) = std::sqrt(double(detail::kMultiIndices[m].multiplicity)) * c[m];
    return v;
  }
  static Sym4 from_moment_vector(const Eigen::Matrix<double, 15, 1>& v) {
    Sym4 a;
    for (int m = 0; m < 15; ++m) a.c[m] = v(m) / std::sqrt(double(detail::kMultiIndices[m].multiplicity));
    return a;
  }

  Sym4& operator+=(const Sym4& o) {
    for (int i = 0; i < 15; ++i) c[i] += o.c[i];
    return *this;
  }
  Sym4& operator-=(const Sym4& o) {
    for (int i = 0; i < 15; ++i) c[i] -= o.c[i];
    return *this;
  }
  Sym4& operator*=(double s) {
    for (auto& x : c) x *= s;
    return *this;
  }
  friend Sym4 operator+(Sym4 a, const Sym4& b) { return a += b; }
  friend Sym4 operator-(Sym4 a, const Sym4& b) { return a -= b; }
  friend Sym4 operator*(double s, Sym4 a) { return a *= s; }
  friend bool operator==(const Sym4&, const Sym4&) = default;
};

enum class Frame { Fixed, Eigen };

/// Symmetric 6x6 Kelvin-Mandel matrix with basis B1 = v1v1, B2 = v2v2,
/// B3 = v3v3, B4 = (v2v3 + v3v2)/sqrt2, B5 = (v1v3 + v3v1)/sqrt2,
/// B6 = (v1v2 + v2v1)/sqrt2.
struct KM66 {
  Mat6 m = Mat6::Zero();
  Frame frame = Frame::Fixed;

  double operator()(int r, int c) const { return m(r, c); }
  double& operator()(int r, int c) { return m(r, c); }
};

inline KM66 km_from_sym4(const Sym4& a, Frame frame = Frame::Fixed) {
  KM66 k;
  k.frame = frame;
  for (int r = 0; r < 6; ++r) {
    const auto [i, j] = detail::kKmPair[r];
    for (int s = 0; s < 6; ++s) {
      const auto [p, q] = detail::kKmPair[s];
      const double v = a(i, j, p, q);
      const int nsq = (r >= 3) + (s >= 3);
      k.m(r, s) = nsq == 0 ? v : (nsq == 1 ? kSqrt2 * v : 2.0 * v);
    }
  }
  return k;
}

/// Worst violation of matrix symmetry and of the six Kelvin-Mandel
/// redundancy relations N44 = 2N23, N55 = 2N13, N66 = 2N12, N45 = sqrt2 N36,
/// N46 = sqrt2 N25, N56 = sqrt2 N14.
inline double km_redundancy_residual(const Mat6& m) {
  double worst = (m - m.transpose()).cwiseAbs().maxCoeff();
  worst = std::max(worst, std::abs(m(3, 3) - 2.0 * m(1, 2)));
  worst = std::max(worst, std::abs(m(4, 4) - 2.0 * m(0, 2)));
  worst = std::max(worst, std::abs(m(5, 5) - 2.0 * m(0, 1)));
  worst = std::max(worst, std::abs(m(3, 4) - kSqrt2 * m(2, 5)));
  worst = std::max(worst, std::abs(m(3, 5) - kSqrt2 * m(1, 4)));
  worst = std::max(worst, std::abs(m(4, 5) - kSqrt2 * m(0, 3)));
  return worst;
}

/// Orthogonal projection of a minor-symmetric Kelvin-Mandel matrix onto the
/// completely symmetric tensors (averages every component over its index
/// permutations). No residual check.
inline Sym4 sym4_project_km(const Mat6& m) {
  std::array<double, 15> sum{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const int r = detail::km_slot(i, j);
          const int s = detail::km_slot(k, l);
          const double v = 0.5 * (m(r, s) + m(s, r)) / (detail::km_weight(r) * detail::km_weight(s));
          sum[detail::kFullToSorted[detail::flat(i, j, k, l)]] += v;
        }
  Sym4 a;
  for (int n = 0; n < 15; ++n) a.c[n] = sum[n] / detail::kMultiIndices[n].multiplicity;
  return a;
}

/// Inverse of km_from_sym4: each coefficient is read from one entry, chosen
/// with scale factor 1 or 2 where possible so that the round trip is exact.
/// Throws NotCompletelySymmetric when the redundancy residual exceeds tol.
inline Sym4 sym4_from_km(const KM66& k, double tol = 1e-12) {
  const double res = km_redundancy_residual(k.m);
  if (!(res <= tol)) throw NotCompletelySymmetric(res);
  std::array<int, 15> rank;
  rank.fill(3);
  Sym4 a;
  for (int r = 0; r < 6; ++r)
    for (int s = r; s < 6; ++s) {
      const auto [i, j] = detail::kKmPair[r];
      const auto [p, q] = detail::kKmPair[s];
      const int slot = detail::kFullToSorted[detail::flat(i, j, p, q)];
      const int nsq = (r >= 3) + (s >= 3);
      const int pref = nsq == 1 ? 2 : nsq / 2;  // factor 1 best, then 2, then sqrt2
      if (pref >= rank[slot]) continue;
      rank[slot] = pref;
      a.c[slot] = nsq == 0 ? k.m(r, s) : (nsq == 1 ? k.m(r, s) / kSqrt2 : 0.5 * k.m(r, s));
    }
  return a;
}

/// sym4_project_km after checking the redundancy residual against tol; for
/// noisy matrices such as solver output.
inline Sym4 sym4_nearest_km(const KM66& k, double tol) {
  const double res = km_redundancy_residual(k.m);
  if (!(res <= tol)) throw NotCompletelySymmetric(res);
  return sym4_project_km(k.m);
}

/// Kelvin-Mandel vector of q (x) q.
inline Vec6 km_vector(const Vec3& q) {
  Vec6 m;
  m << q(0) * q(0), q(1) * q(1), q(2) * q(2), kSqrt2 * q(1) * q(2), kSqrt2 * q(0) * q(2),
      kSqrt2 * q(0) * q(1);
  return m;
}
inline Vec6 km_vector(const Sym2& s) {
  Vec6 m;
  m << s.c[0], s.c[1], s.c[2], kSqrt2 * s.c[3], kSqrt2 * s.c[4], kSqrt2 * s.c[5];
  return m;
}

/// A :: q(x)q(x)q(x)q.
inline double quartic_eval(const Sym4& a, const Vec3& q) {
  const Vec6 m = km_vector(q);
  return m.dot(km_from_sym4(a).m * m);
}

/// A : Id.
inline Sym2 contract_to_sym2(const Sym4& a) {
  Sym2 s;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) s(i, j) = a(i, j, 0, 0) + a(i, j, 1, 1) + a(i, j, 2, 2);
  return s;
}

/// Complete symmetrization of S (x) T.
inline Sym4 sym_dyad(const Sym2& s, const Sym2& t) {
  Sym4 a;
  for (int m = 0; m < 15; ++m) {
    std::array<int, 4> idx = detail::kMultiIndices[m].idx;
    double sum = 0.0;
    int count = 0;
    std::array<int, 4> pos = {0, 1, 2, 3};
    do {
      sum += s(idx[pos[0]], idx[pos[1]]) * t(idx[pos[2]], idx[pos[3]]);
      ++count;
    } while (std::next_permutation(pos.begin(), pos.end()));
    a.c[m] = sum / count;
  }
  return a;
}

inline Sym2 deviator(const Sym2& s) { return s - (s.trace() / 3.0) * Sym2::identity(); }

inline Sym2 rotate(const Rotation& q, const Sym2& s) {
  return Sym2::from_matrix(q.matrix() * s.matrix() * q.matrix().transpose());
}

/// Rayleigh product Q * A, A'_ijkl = Q_ia Q_jb Q_kc Q_ld A_abcd.
inline Sym4 rayleigh_rotate(const Rotation& rot, const Sym4& a) {
  const Mat3& q = rot.matrix();
  detail::Full4 t = a.full();
  // Contract one leg at a time.
  for (int leg = 0; leg < 4; ++leg) {
    detail::Full4 next{};
    for (int n = 0; n < 81; ++n) {
      int id[4] = {n / 27, (n / 9) % 3, (n / 3) % 3, n % 3};
      double s = 0.0;
      for (int b = 0; b < 3; ++b) {
        int src[4] = {id[0], id[1], id[2], id[3]};
        src[leg] = b;
        s += q(id[leg], b) * t[detail::flat(src[0], src[1], src[2], src[3])];
      }
      next[n] = s;
    }
    t = next;
  }
  Sym4 out;
  for (int m = 0; m < 15; ++m) {
    const auto& mi = detail::kMultiIndices[m].idx;
    out.c[m] = t[detail::flat(mi[0], mi[1], mi[2], mi[3])];
  }
  return out;
}

/// Descending eigenvalues of the Kelvin-Mandel matrix of A.
inline Vec6 km_eigenvalues(const Sym4& a) { return eig_sym(km_from_sym4(a).m).values; }

/// Eigenvalues (descending) and the proper rotation Q = sum v_i (x) e_i of a
/// symmetric second-order tensor. v1 and v2 have a positive first nonzero
/// component; v3 = v1 x v2.
struct Eigensystem {
  Vec3 values;
  Rotation q;
};

inline Eigensystem eigensystem(const Sym2& s) {
  const auto e = eig_sym(s.matrix());
  Mat3 v = e.vectors;
  for (int col = 0; col < 2; ++col) {
    for (int r = 0; r < 3; ++r) {
      if (std::abs(v(r, col)) > 1e-12) {
        if (v(r, col) < 0.0) v.col(col) *= -1.0;
        break;
      }
    }
  }
  v.col(2) = v.col(0).cross(v.col(1));
  Eigensystem out{e.values, Rotation()};
  out.q = Rotation(v);
  return out;
}

/// Components of A in the eigensystem of A : Id, i.e. Q^T * A.
inline Sym4 to_eigen_frame(const Sym4& a) {
  const Eigensystem es = eigensystem(contract_to_sym2(a));
  return rayleigh_rotate(Rotation(es.q.matrix().transpose()), a);
}

}  // namespace fotex
