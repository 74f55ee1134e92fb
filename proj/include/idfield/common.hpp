#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>

namespace idfield {

using Complex = std::complex<double>;

// Points in index space (t) and in the integration domain (x) share this
// fixed-capacity representation; coordinates beyond the active dimension
// stay zero.
using Point = std::array<double, 3>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

// Levy integrals larger than this are treated as divergent ("= infinity").
inline constexpr double kOverflowGuard = 1e12;

inline Point make_point(double x, double y = 0.0, double z = 0.0) {
  return Point{x, y, z};
}

// cos(x) - 1 without cancellation near x = 0.
inline double cos_minus_one(double x) {
  const double h = std::sin(0.5 * x);
  return -2.0 * h * h;
}

// sin(x) - x without cancellation near x = 0.
inline double sin_minus_x(double x) {
  if (std::fabs(x) > 0.1) return std::sin(x) - x;
  const double x2 = x * x;
  return -x * x2 / 6.0 *
         (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Axis-aligned box in R^m, m <= 3.
struct Box {
  Point lo{};
  Point hi{};
  int dim = 1;

  bool contains(const Point& p) const {
    for (int i = 0; i < dim; ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }

  bool contains(const Box& inner) const {
    for (int i = 0; i < dim; ++i)
      if (inner.lo[i] < lo[i] || inner.hi[i] > hi[i]) return false;
    return true;
  }
};

}  // namespace idfield
