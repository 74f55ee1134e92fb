#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "idfield/common.hpp"
#include "idfield/rng.hpp"

namespace idfield {

// Truncation function of the Levy-Khintchine exponent:
// tau(z) = z for |z| <= 1, z/|z| otherwise.
double tau(double z);

enum class LevyFamily { None, PointMasses, StablePair, Tempered };

// One-dimensional Levy measure drawn from a small set of parametric
// families:
//   PointMasses  sum of w_k * delta_{z_k}, z_k != 0, w_k >= 0
//   StablePair   density c_plus s^{-1-alpha} on s>0 plus
//                c_minus |s|^{-1-alpha} on s<0, alpha in (0,2)
//   Tempered     the StablePair density damped by exp(-theta |s|), theta>0
struct LevyMeasure {
  LevyFamily family = LevyFamily::None;
  std::vector<std::pair<double, double>> atoms;  // (location, mass)
  double alpha = 0.0;
  double c_plus = 0.0;
  double c_minus = 0.0;
  double theta = 0.0;

  static LevyMeasure none();
  static LevyMeasure point_masses(std::vector<std::pair<double, double>> atoms);
  static LevyMeasure stable_pair(double alpha, double c_plus, double c_minus);
  static LevyMeasure tempered(double alpha, double c_plus, double c_minus,
                              double theta);

  // Masses / intensities multiplied by factor >= 0.
  LevyMeasure scaled(double factor) const;
  bool is_zero() const;
  void validate() const;  // throws std::invalid_argument
};

// Generating triplet of a one-dimensional infinitely divisible law
// (shift relative to tau-centering, Gaussian variance, jump measure).
struct LevyTriplet {
  double shift = 0.0;
  double gaussian_variance = 0.0;
  LevyMeasure jumps;

  LevyTriplet scaled(double factor) const;
  void validate() const;
};

struct QuadratureOptions {
  double rel_tol = 1e-9;
  double overflow_guard = kOverflowGuard;
  int max_blocks = 600;  // dyadic blocks per direction
  int max_depth = 32;    // adaptive bisection depth within a block
};

struct LevyIntegral {
  double value = 0.0;
  bool diverged = false;
};

// Integral of h against the Levy measure. Exact sum for PointMasses,
// adaptive quadrature on dyadic blocks split at |s| = 1 otherwise.
// Divergence (overflow guard exceeded or no tail decay) is reported in
// the flag rather than thrown.
LevyIntegral try_levy_quadrature(const LevyMeasure& nu,
                                 const std::function<double(double)>& h,
                                 const QuadratureOptions& opts = {});

// Throwing variant; std::runtime_error on divergence / non-convergence.
double levy_quadrature(const LevyMeasure& nu,
                       const std::function<double(double)>& h,
                       const QuadratureOptions& opts = {});

// integral of min(1, z^2) d nu  (the jump part of the control measure).
double truncated_second_moment(const LevyMeasure& nu);

// integral of (e^{ius} - 1 - iu tau(s)) d nu. Closed form for StablePair,
// quadrature for Tempered, exact sum for PointMasses.
Complex levy_exponent(const LevyMeasure& nu, double u);

// Levy-Khintchine characteristic function of the triplet's law.
Complex cf_id(const LevyTriplet& triplet, double t);

// Prepared sampler for one infinitely divisible law: Gaussian part plus
// compound Poisson jumps of size |z| > eps, with the discarded small jumps
// compensated in the shift (relative to the tau-centering).
class IdSampler {
 public:
  IdSampler(const LevyTriplet& triplet, double eps);

  double draw(RngStream& rng) const;
  double jump_rate() const { return rate_plus_ + rate_minus_ + atom_rate_; }

 private:
  double shift_ = 0.0;  // triplet shift minus compensation
  double sigma_ = 0.0;
  LevyFamily family_ = LevyFamily::None;
  double alpha_ = 0.0;
  double theta_ = 0.0;
  double eps_ = 0.0;
  double rate_plus_ = 0.0;   // Pareto proposal rate, s > eps
  double rate_minus_ = 0.0;  // mirrored side
  double atom_rate_ = 0.0;
  std::vector<std::pair<double, double>> atom_plans_;  // (z, rate)
};

// One draw from the triplet's law (truncation level eps in (0,1]).
double sample_id(const LevyTriplet& triplet, double eps, RngStream& rng);

}  // namespace idfield
