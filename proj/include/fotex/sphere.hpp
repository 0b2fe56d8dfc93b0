#pragma once

// Deterministic point sets on the unit sphere.

#include <cmath>
#include <numbers>
#include <vector>

#include "fotex/tensor.hpp"

namespace fotex {

/// Fibonacci lattice with n points covering the whole sphere.
inline std::vector<Direction> fibonacci_sphere(int n) {
  std::vector<Direction> pts;
  pts.reserve(static_cast<std::size_t>(n));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts.push_back(Direction::normalized(Vec3(r * std::cos(phi), r * std::sin(phi), z)));
  }
  return pts;
}

/// Fibonacci lattice with n points on the upper hemisphere z > 0. Since p
/// and -p generate the same even-order moments this covers all atoms once.
inline std::vector<Direction> fibonacci_half_sphere(int n) {
  std::vector<Direction> pts;
  pts.reserve(static_cast<std::size_t>(n));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts.push_back(Direction::normalized(Vec3(r * std::cos(phi), r * std::sin(phi), z)));
  }
  return pts;
}

/// Six directions through antipodal vertex pairs of a regular icosahedron.
/// Equal weights integrate every polynomial of degree <= 5 exactly.
inline std::vector<Direction> icosahedron_axes() {
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  const Vec3 raw[6] = {{0, 1, g}, {0, -1, g}, {1, g, 0}, {-1, g, 0}, {g, 0, 1}, {-g, 0, 1}};
  std::vector<Direction> pts;
  for (const auto& v : raw) pts.push_back(Direction::normalized(v));
  return pts;
}

}  // namespace fotex
