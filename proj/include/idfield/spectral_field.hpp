#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "idfield/common.hpp"
#include "idfield/random_measure.hpp"

namespace idfield {

enum class SignClass { Nonnegative, Nonpositive, Mixed };

// Deterministic integrand family f_t(x), t in R^d. The sign class is a
// declaration; spot_check_sign_class probes it at random points.
struct KernelFamily {
  std::function<double(const Point& t, const Point& x)> eval;
  SignClass sign_class = SignClass::Mixed;
  std::optional<std::function<Box(const Point& t)>> support_hint;
};

// Complete description of one random field X(t) = integral of f_t dLambda.
// gamma scales the control measure (gamma = 1 is the nominal field).
struct FieldSpec {
  KernelFamily kernels;
  LocalCharacteristics chars;
  DomainPartition partition;
  double gamma = 1.0;
};

struct SimplePiece {
  double coefficient = 0.0;
  int cell = 0;
};

// Simple function sum of coefficient * indicator(cell); cells distinct,
// zero coefficients omitted.
struct SimpleFunction {
  std::vector<SimplePiece> pieces;
};

// Randomized probe of the declared sign class over ts x domain box;
// throws std::invalid_argument on a violation.
void spot_check_sign_class(const KernelFamily& kernels,
                           std::span<const Point> ts, const Box& box,
                           int n_points, std::uint64_t seed);

// Throws if a declared support hint sticks out of the partition box.
void check_support_hints(const FieldSpec& spec, std::span<const Point> ts);

// Level-n simple approximation of f_t on the dyadically refined grid:
// coefficient f_t(midpoint) on cells where |f_t(midpoint)| <= n, zero
// elsewhere. For one-signed kernel families coefficients of the wrong sign
// are zeroed, keeping the approximation one-signed as well.
SimpleFunction simple_approx(const FieldSpec& spec, const Point& t, int level);

// Sum of coefficient * measure[cell]; throws std::out_of_range on an
// unknown cell id.
double integrate_simple(const SimpleFunction& sf,
                        std::span<const double> measure);

// Pointwise log-characteristic exponent
// K(u,x) = iu a(x) - u^2 sigma2(x)/2 + integral (e^{ius}-1-iu tau(s)) rho(x,ds).
Complex cumulant_kernel(double u, const Point& x,
                        const LocalCharacteristics& chars);

// Joint characteristic function of (X(t_1),...,X(t_r)) by the midpoint rule:
// exp(gamma * sum over cells of K(sum_j theta_j f_{t_j}(mid), mid) * mass).
Complex joint_cf(const FieldSpec& spec, std::span<const Point> ts,
                 std::span<const double> theta);

// Single-point convenience form of joint_cf.
Complex cf_integral(const FieldSpec& spec, const Point& t, double u);

// The three sufficient integrals for Lambda-integrability plus the proof
// bounds; divergent entries are reported at the overflow guard.
struct IntegrabilityReport {
  double cond_i = 0.0;    // integral of |f a| d lambda
  double cond_ii = 0.0;   // integral of f^2 sigma2 d lambda
  double cond_iii = 0.0;  // double integral of |f s| rho(x,ds) d lambda
  bool pass_i = false, pass_ii = false, pass_iii = false, pass = false;
  double u_bound = 0.0;   // integral of |U(f(x),x)| d lambda
  double v0_bound = 0.0;  // integral of |V0(f(x),x)| d lambda
  bool u_diverged = false, v0_diverged = false;
};

IntegrabilityReport integrability_check(const FieldSpec& spec, const Point& t);

// Same field with the control measure scaled by gamma > 0.
FieldSpec scale_spec(const FieldSpec& spec, double gamma);

// Prepared joint sampler: one shared measure draw on the level-n refined
// grid feeds every t, which is what produces the correct joint law.
class FieldSampler {
 public:
  FieldSampler(const FieldSpec& spec, std::span<const Point> ts, int level,
               double eps);

  std::vector<double> draw(std::uint64_t seed) const;
  void draw(std::uint64_t seed, std::vector<double>& measure_buf,
            std::vector<double>& out) const;

  std::size_t n_points() const { return pieces_.size(); }
  const DomainPartition& grid() const { return grid_; }

 private:
  DomainPartition grid_;
  MeasureSampler measure_;
  std::vector<SimpleFunction> pieces_;
};

// One joint draw of (X^(n)(t_1),...,X^(n)(t_r)).
std::vector<double> sample_field(const FieldSpec& spec,
                                 std::span<const Point> ts, int level,
                                 double eps, std::uint64_t seed);

}  // namespace idfield
