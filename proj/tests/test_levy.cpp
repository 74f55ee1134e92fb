#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "idfield/levy.hpp"
#include "test_support.hpp"

using namespace idfield;
using idtest::oracle_stable_exponent;
using idtest::scalar_ecf;
using idtest::simpson_oracle;

TEST_CASE("tau truncates at the unit interval") {
  CHECK(tau(0.5) == 0.5);
  CHECK(tau(0.0) == 0.0);
  CHECK(tau(-3.0) == -1.0);
  CHECK(tau(1.0) == 1.0);
  CHECK(tau(-1.0) == -1.0);

  RngStream rng(321);
  for (int i = 0; i < 10000; ++i) {
    const double z =
        (2.0 * rng.next_uniform() - 1.0) * std::pow(10.0, 6.0 * rng.next_uniform() - 3.0);
    CHECK(std::fabs(tau(z)) <= std::min(std::fabs(z), 1.0) + 1e-15);
  }
}

TEST_CASE("descriptor validation rejects bad parameters") {
  CHECK_THROWS_AS(LevyMeasure::point_masses({{0.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(LevyMeasure::point_masses({{1.0, -0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(LevyMeasure::stable_pair(2.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(LevyMeasure::stable_pair(0.5, -1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(LevyMeasure::tempered(0.5, 1.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(LevyTriplet({0.0, -1.0, LevyMeasure::none()}).validate(),
                  std::invalid_argument);
}

TEST_CASE("truncated second moment: atoms exactly, stable against the closed form") {
  CHECK(truncated_second_moment(LevyMeasure::point_masses({{2.0, 3.0}})) ==
        doctest::Approx(3.0).epsilon(1e-14));
  CHECK(truncated_second_moment(LevyMeasure::point_masses({{0.5, 4.0}})) ==
        doctest::Approx(1.0).epsilon(1e-14));

  // hand integral: int_0^1 s^{-0.5} ds + int_1^inf s^{-2.5} ds = 2 + 2/3
  const double expect = 2.0 + 2.0 / 3.0;
  CHECK(truncated_second_moment(LevyMeasure::stable_pair(1.5, 1.0, 0.0)) ==
        doctest::Approx(expect).epsilon(1e-8));
  CHECK(truncated_second_moment(LevyMeasure::none()) == 0.0);
}

TEST_CASE("levy_quadrature: atoms, stable symmetry, tempered gamma integral") {
  CHECK(levy_quadrature(LevyMeasure::point_masses({{1.0, 2.0}}),
                        [](double s) { return s * s; }) ==
        doctest::Approx(2.0).epsilon(1e-14));

  const auto min1s2 = [](double s) { return std::min(1.0, s * s); };
  const double sym = levy_quadrature(LevyMeasure::stable_pair(1.5, 1.0, 1.0), min1s2);
  CHECK(sym == doctest::Approx(2.0 * (2.0 + 2.0 / 3.0)).epsilon(1e-8));
  CHECK(sym == doctest::Approx(truncated_second_moment(
                    LevyMeasure::stable_pair(1.5, 1.0, 1.0))).epsilon(1e-12));

  // int_0^inf s^{-0.5} e^{-s} ds = Gamma(1/2) = sqrt(pi)
  const double gamma_half = levy_quadrature(
      LevyMeasure::tempered(0.5, 1.0, 0.0, 1.0), [](double s) { return s; });
  CHECK(gamma_half == doctest::Approx(std::sqrt(idfield::kPi)).epsilon(1e-8));
}

TEST_CASE("levy_quadrature flags divergent integrands instead of looping") {
  // |s| against alpha = 1.5 diverges at the origin, against 0.8 at infinity
  const auto habs = [](double s) { return std::fabs(s); };
  CHECK(try_levy_quadrature(LevyMeasure::stable_pair(1.5, 1.0, 0.0), habs).diverged);
  CHECK(try_levy_quadrature(LevyMeasure::stable_pair(0.8, 1.0, 0.0), habs).diverged);
  CHECK_FALSE(
      try_levy_quadrature(LevyMeasure::tempered(0.5, 1.0, 1.0, 1.0), habs).diverged);
  CHECK_THROWS_AS(levy_quadrature(LevyMeasure::stable_pair(1.5, 1.0, 0.0), habs),
                  std::runtime_error);
}

TEST_CASE("cf_id on the elementary triplets") {
  const Complex gauss = cf_id(LevyTriplet{0.0, 1.0, LevyMeasure::none()}, 1.0);
  CHECK(std::abs(gauss - Complex(std::exp(-0.5), 0.0)) < 1e-14);

  const Complex drift = cf_id(LevyTriplet{2.0, 0.0, LevyMeasure::none()}, 1.0);
  CHECK(std::abs(drift - std::exp(Complex(0.0, 2.0))) < 1e-14);

  const Complex cp =
      cf_id(LevyTriplet{0.0, 0.0, LevyMeasure::point_masses({{2.0, 3.0}})}, 1.0);
  const Complex expect =
      std::exp(3.0 * (std::exp(Complex(0.0, 2.0)) - 1.0 - Complex(0.0, 1.0)));
  CHECK(std::abs(cp - expect) < 1e-14);
}

TEST_CASE("cf_id matches the empirical CF of compound-Poisson draws") {
  const LevyTriplet triplet{0.0, 0.0, LevyMeasure::point_masses({{2.0, 3.0}})};
  const IdSampler sampler(triplet, 0.5);
  RngStream rng(2024);
  const int n = 1000000;
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = sampler.draw(rng);
  for (double t : {0.5, 1.0}) {
    CHECK(std::abs(scalar_ecf(xs, t) - cf_id(triplet, t)) < 0.01);
  }
}

TEST_CASE("characteristic function invariants over random triplets") {
  RngStream rng(555);
  for (int rep = 0; rep < 30; ++rep) {
    const LevyTriplet triplet = idtest::random_triplet(rng);
    CHECK(std::abs(cf_id(triplet, 0.0) - Complex(1.0, 0.0)) == 0.0);
    for (double t : {0.4, 1.0, 2.7}) {
      const Complex v = cf_id(triplet, t);
      CHECK(std::abs(v) <= 1.0 + 1e-12);
      CHECK(std::abs(cf_id(triplet, -t) - std::conj(v)) < 1e-12);
    }
  }
}

TEST_CASE("convolution of triplets multiplies characteristic functions") {
  const LevyTriplet a{0.3, 0.8, LevyMeasure::point_masses({{1.0, 0.7}})};
  const LevyTriplet b{-0.1, 0.4, LevyMeasure::point_masses({{-0.5, 1.1}})};
  const LevyTriplet sum{a.shift + b.shift,
                        a.gaussian_variance + b.gaussian_variance,
                        LevyMeasure::point_masses({{1.0, 0.7}, {-0.5, 1.1}})};
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK(std::abs(cf_id(sum, t) - cf_id(a, t) * cf_id(b, t)) < 1e-10);
  }

  const LevyTriplet s1{0.0, 0.0, LevyMeasure::stable_pair(1.2, 0.5, 0.3)};
  const LevyTriplet s2{0.0, 0.0, LevyMeasure::stable_pair(1.2, 0.2, 0.9)};
  const LevyTriplet s12{0.0, 0.0, LevyMeasure::stable_pair(1.2, 0.7, 1.2)};
  for (double t : {0.5, 2.0}) {
    CHECK(std::abs(cf_id(s12, t) - cf_id(s1, t) * cf_id(s2, t)) < 1e-10);
  }
}

TEST_CASE("closed-form stable exponent agrees with brute-force quadrature") {
  for (double alpha : {0.5, 1.0, 1.5, 1.8}) {
    for (double u : {0.5, 1.0, 2.0}) {
      double slack = 0.0;
      const Complex oracle = oracle_stable_exponent(alpha, u, &slack);
      const Complex closed =
          levy_exponent(LevyMeasure::stable_pair(alpha, 1.0, 0.0), u);
      CHECK(std::abs(closed - oracle) < slack + 1e-5);
    }
  }
}

TEST_CASE("stable scale constant matches the classical formula") {
  for (double alpha : {0.3, 0.7, 1.3, 1.7}) {
    const double c =
        -levy_exponent(LevyMeasure::stable_pair(alpha, 1.0, 0.0), 1.0).real();
    const double expect = std::tgamma(2.0 - alpha) *
                          std::cos(idfield::kPi * alpha / 2.0) /
                          (alpha * (1.0 - alpha));
    CHECK(c == doctest::Approx(expect).epsilon(1e-12));
  }
  const double c1 =
      -levy_exponent(LevyMeasure::stable_pair(1.0, 1.0, 0.0), 1.0).real();
  CHECK(c1 == doctest::Approx(idfield::kPi / 2.0).epsilon(1e-12));
}

TEST_CASE("tempered exponent agrees with the closed gamma-function form") {
  // one-sided alpha = 1/2, theta = 1:
  //   int (e^{ius}-1) s^{-3/2} e^{-s} ds = Gamma(-1/2) ((1-iu)^{1/2} - 1)
  //   int tau(s) s^{-3/2} e^{-s} ds
  //     = sqrt(pi) erf(1) + 2/e - 2 sqrt(pi) erfc(1)
  const double sq_pi = std::sqrt(idfield::kPi);
  const double tau_int = sq_pi * std::erf(1.0) + 2.0 / std::exp(1.0) -
                         2.0 * sq_pi * std::erfc(1.0);
  const LevyMeasure nu = LevyMeasure::tempered(0.5, 1.0, 0.0, 1.0);
  for (double u : {0.5, 1.0, 2.0}) {
    const Complex expect =
        -2.0 * sq_pi * (std::sqrt(Complex(1.0, -u)) - 1.0) -
        Complex(0.0, u * tau_int);
    CHECK(std::abs(levy_exponent(nu, u) - expect) < 1e-7);
  }
}

TEST_CASE("gaussian sampling moments") {
  const LevyTriplet triplet{0.0, 1.0, LevyMeasure::none()};
  const IdSampler sampler(triplet, 0.5);
  RngStream rng(99);
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sampler.draw(rng);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  CHECK(std::fabs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(sum2 / n - mean * mean - 1.0) < 0.05);
}

TEST_CASE("compound poisson draws are compensated lattice points") {
  const LevyTriplet triplet{0.0, 0.0, LevyMeasure::point_masses({{1.0, 2.0}})};
  const IdSampler sampler(triplet, 0.5);
  RngStream rng(123);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sampler.draw(rng);
    const double k = x + 2.0;  // compensation is 2 tau(1) = 2
    CHECK(k >= -1e-12);
    CHECK(std::fabs(k - std::round(k)) < 1e-12);
    sum += x;
  }
  // variance of the compensated law is int z^2 dnu = 2
  CHECK(std::fabs(sum / n) < 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("stable sampling empirical CF matches cf_id") {
  const LevyTriplet triplet{0.0, 0.0, LevyMeasure::stable_pair(0.5, 1.0, 1.0)};
  const IdSampler sampler(triplet, 1e-4);
  RngStream rng(77);
  const int n = 50000;
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = sampler.draw(rng);
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK(std::abs(scalar_ecf(xs, t) - cf_id(triplet, t)) < 0.02);
  }
}

TEST_CASE("tempered sampling empirical CF matches cf_id") {
  const LevyTriplet triplet{0.1, 0.2,
                            LevyMeasure::tempered(0.6, 1.0, 0.5, 1.5)};
  const IdSampler sampler(triplet, 1e-3);
  RngStream rng(78);
  const int n = 30000;
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = sampler.draw(rng);
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK(std::abs(scalar_ecf(xs, t) - cf_id(triplet, t)) < 0.025);
  }
}

TEST_CASE("empirical CF of generic ID draws obeys the 3/sqrt(N) band") {
  const LevyTriplet triplet{0.2, 0.7,
                            LevyMeasure::point_masses({{1.0, 0.8}, {-0.6, 1.2}})};
  const IdSampler sampler(triplet, 0.1);
  RngStream rng(404);
  const int n = 100000;
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = sampler.draw(rng);
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK(std::abs(scalar_ecf(xs, t) - cf_id(triplet, t)) <
          3.0 / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("sampler preconditions") {
  CHECK_THROWS_AS(IdSampler(LevyTriplet{}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(IdSampler(LevyTriplet{}, 1.5), std::invalid_argument);
}
