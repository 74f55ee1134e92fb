#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "idfield/stable.hpp"
#include "test_support.hpp"

using namespace idfield;
using idtest::unit_interval_grid;

namespace {

KernelFamily two_constant_kernels() {
  KernelFamily k;
  k.eval = [](const Point&, const Point&) { return 1.0; };
  k.sign_class = SignClass::Nonnegative;
  return k;
}

StableSpec one_cell_spec(double alpha, double beta) {
  StableSpec s;
  s.alpha = alpha;
  s.beta = [beta](const Point&) { return beta; };
  s.partition = unit_interval_grid(1);
  s.kernels = two_constant_kernels();
  return s;
}

}  // namespace

TEST_CASE("g_map normalizes kernel vectors and flags the null set") {
  KernelFamily k;
  k.eval = [](const Point& t, const Point&) { return t[0]; };
  const std::vector<Point> ts{make_point(3.0), make_point(4.0)};
  const auto g = g_map(make_point(0.5), ts, k);
  REQUIRE(g.has_value());
  CHECK((*g)[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK((*g)[1] == doctest::Approx(0.8).epsilon(1e-15));

  const std::vector<Point> zero_ts{make_point(0.0), make_point(0.0)};
  CHECK_FALSE(g_map(make_point(0.5), zero_ts, k).has_value());

  const std::vector<Point> neg_ts{make_point(-1.0), make_point(0.0)};
  const auto gn = g_map(make_point(0.5), neg_ts, k);
  REQUIRE(gn.has_value());
  CHECK((*gn)[0] == -1.0);
  CHECK((*gn)[1] == 0.0);
}

TEST_CASE("spectral measure of null kernels is empty") {
  StableSpec s = one_cell_spec(1.5, 0.0);
  s.kernels.eval = [](const Point&, const Point&) { return 0.0; };
  const std::vector<Point> ts{make_point(0.0), make_point(1.0)};
  CHECK(spectral_measure(s, ts).atoms.empty());
}

TEST_CASE("worked one-cell spectral measure: single atom at the diagonal") {
  const StableSpec s = one_cell_spec(1.5, 1.0);
  const std::vector<Point> ts{make_point(0.0), make_point(1.0)};
  const SpectralMeasure gamma = spectral_measure(s, ts);
  REQUIRE(gamma.atoms.size() == 1);  // antipodal weight (1-beta)/2 = 0 dropped
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::fabs(gamma.atoms[0].s[0] - inv_sqrt2) < 1e-12);
  CHECK(std::fabs(gamma.atoms[0].s[1] - inv_sqrt2) < 1e-12);
  CHECK(std::fabs(gamma.atoms[0].weight - std::pow(2.0, 0.75)) < 1e-12);
  CHECK(gamma.drift == std::vector<double>{0.0, 0.0});
}

TEST_CASE("beta = 0 gives an antipodally symmetric atom set") {
  StableSpec s = one_cell_spec(1.2, 0.0);
  s.partition = unit_interval_grid(8);
  s.kernels.eval = [](const Point& t, const Point& x) {
    return t[0] == 0.0 ? x[0] : 1.0 - x[0];
  };
  const std::vector<Point> ts{make_point(0.0), make_point(1.0)};
  const SpectralMeasure gamma = spectral_measure(s, ts);
  CHECK(gamma.atoms.size() % 2 == 0);
  for (const auto& atom : gamma.atoms) {
    bool found = false;
    for (const auto& other : gamma.atoms) {
      if (std::fabs(atom.s[0] + other.s[0]) < 1e-14 &&
          std::fabs(atom.s[1] + other.s[1]) < 1e-14) {
        CHECK(atom.weight == doctest::Approx(other.weight).epsilon(1e-12));
        found = true;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("atoms stay on the unit sphere and conserve the half-weight mass") {
  RngStream rng(2718);
  for (int rep = 0; rep < 10; ++rep) {
    auto bundle = idtest::random_bounded_kernels(rng, 3);
    StableSpec s;
    s.alpha = 0.6 + 1.2 * rng.next_uniform();
    const double b = 2.0 * rng.next_uniform() - 1.0;
    s.beta = [b](const Point&) { return b; };
    s.partition = unit_interval_grid(16);
    s.kernels = bundle.family;

    const SpectralMeasure gamma = spectral_measure(s, bundle.ts);
    double total = 0.0;
    for (const auto& atom : gamma.atoms) {
      double norm = 0.0;
      for (double c : atom.s) norm += c * c;
      CHECK(std::fabs(std::sqrt(norm) - 1.0) < 1e-12);
      total += atom.weight;
    }
    double expected = 0.0;
    for (const Cell& cell : s.partition.cells()) {
      double ss = 0.0;
      for (const Point& t : bundle.ts) {
        const double f = s.kernels.eval(t, cell.mid);
        ss += f * f;
      }
      if (ss > 0.0) expected += std::pow(ss, 0.5 * s.alpha) * cell.mass;
    }
    CHECK(total == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("stable_cf: symmetric atom pairs cancel the skew terms") {
  for (double alpha : {0.7, 1.5}) {
    SpectralMeasure gamma;
    gamma.atoms = {{{1.0, 0.0}, 0.6}, {{-1.0, 0.0}, 0.6}};
    gamma.drift = {0.0, 0.0};
    CHECK(std::abs(stable_cf(gamma, alpha, std::vector<double>{0.0, 0.0}) -
                   Complex(1.0, 0.0)) == 0.0);
    for (double u : {0.5, 1.0, 2.0}) {
      const Complex v = stable_cf(gamma, alpha, std::vector<double>{u, 0.0});
      const double expect = std::exp(-1.2 * std::pow(u, alpha));
      CHECK(std::abs(v - Complex(expect, 0.0)) < 1e-14);
      CHECK(std::abs(v) <= 1.0 + 1e-12);
      // conjugate symmetry for symmetric gamma
      const Complex vm = stable_cf(gamma, alpha, std::vector<double>{-u, 0.0});
      CHECK(std::abs(vm - std::conj(v)) < 1e-14);
    }
  }
  // alpha = 1: the log terms cancel as well
  SpectralMeasure gamma;
  gamma.atoms = {{{1.0}, 0.6}, {{-1.0}, 0.6}};
  gamma.drift = {0.0};
  for (double u : {0.5, 2.0}) {
    CHECK(std::abs(stable_cf(gamma, 1.0, std::vector<double>{u}) -
                   Complex(std::exp(-1.2 * u), 0.0)) < 1e-14);
  }
}

TEST_CASE("association classification over the sphere regions") {
  SpectralMeasure orthant;
  orthant.atoms = {{{0.6, 0.8}, 1.0}, {{1.0, 0.0}, 0.5}};
  CHECK(association_classify(orthant) == Association::Associated);

  SpectralMeasure axes;  // e1 and -e2: all pairwise products vanish
  axes.atoms = {{{1.0, 0.0}, 1.0}, {{0.0, -1.0}, 2.0}};
  CHECK(association_classify(axes) == Association::Both);

  const double c = 1.0 / std::sqrt(2.0);
  SpectralMeasure mixed;
  mixed.atoms = {{{c, c}, 1.0}, {{c, -c}, 1.0}};
  CHECK(association_classify(mixed) == Association::Neither);

  SpectralMeasure na_only;
  na_only.atoms = {{{c, -c}, 1.0}};
  CHECK(association_classify(na_only) == Association::NegativelyAssociated);

  const SphereMasses masses = sphere_masses(mixed);
  CHECK(masses.s_minus == 1.0);
  CHECK(masses.s_plus == 1.0);
}

TEST_CASE("one-signed kernel families are associated or both (Gamma(S-) = 0)") {
  RngStream rng(31415);
  for (int rep = 0; rep < 20; ++rep) {
    const double sign = rep % 2 == 0 ? 1.0 : -1.0;
    auto bundle = idtest::random_bounded_kernels(rng, 2 + rep % 2, sign);
    StableSpec s;
    s.alpha = 0.5 + 1.3 * rng.next_uniform();
    const double b = 2.0 * rng.next_uniform() - 1.0;
    s.beta = [b](const Point&) { return b; };
    s.partition = unit_interval_grid(16);
    s.kernels = bundle.family;
    const SpectralMeasure gamma = spectral_measure(s, bundle.ts);
    CHECK(sphere_masses(gamma).s_minus == 0.0);
    const Association cls = association_classify(gamma);
    CHECK((cls == Association::Associated || cls == Association::Both));
  }
}

TEST_CASE("null_check detects degenerate integrands") {
  StableSpec s = one_cell_spec(1.5, 0.0);
  s.partition = unit_interval_grid(16);

  const auto zero = null_check(s, [](const Point&) { return 0.0; });
  CHECK(zero.integral == 0.0);
  CHECK(zero.degenerate);

  // kernel supported only on mass-zero cells
  Box box;
  box.lo = make_point(0.0);
  box.hi = make_point(1.0);
  box.dim = 1;
  s.partition = DomainPartition::uniform_grid(
      box, {16, 1, 1}, [](const Point& x) { return x[0] < 0.5 ? 0.0 : 1.0; });
  const auto masked =
      null_check(s, [](const Point& x) { return x[0] < 0.5 ? 1.0 : 0.0; });
  CHECK(masked.integral == 0.0);
  CHECK(masked.degenerate);

  s.partition = unit_interval_grid(16);
  const auto unit = null_check(s, [](const Point&) { return 1.0; });
  CHECK(unit.integral == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(unit.degenerate);
}

TEST_CASE("degenerate stable integrals produce exactly zero field draws") {
  StableSpec s = one_cell_spec(1.2, 0.0);
  Box box;
  box.lo = make_point(0.0);
  box.hi = make_point(1.0);
  box.dim = 1;
  s.partition = DomainPartition::uniform_grid(
      box, {16, 1, 1}, [](const Point& x) { return x[0] < 0.5 ? 0.0 : 1.0; });
  s.kernels.eval = [](const Point&, const Point& x) {
    return x[0] < 0.5 ? 1.0 : 0.0;
  };
  const FieldSpec fs = to_field_spec(s);
  const std::vector<Point> ts{make_point(0.0)};
  const FieldSampler sampler(fs, ts, 1, 0.001);
  for (int k = 0; k < 1000; ++k) {
    CHECK(sampler.draw(substream_seed(5, k))[0] == 0.0);
  }
}

TEST_CASE("stable Gamma and the generic ID path give the same one-point cf") {
  for (double alpha : {0.7, 1.3, 1.7}) {
    for (double beta : {0.0, 0.5, -1.0}) {
      StableSpec s = one_cell_spec(alpha, beta);
      s.partition = unit_interval_grid(16);
      s.kernels.eval = [](const Point&, const Point& x) {
        const double q = 1.0 - (x[0] - 0.5) * (x[0] - 0.5) / 0.16;
        return q > 0.0 ? q * q : 0.0;
      };
      const std::vector<Point> ts{make_point(0.0)};
      const SpectralMeasure gamma = spectral_measure(s, ts);
      const FieldSpec fs = to_field_spec(s);
      for (double u : {-2.0, -0.5, 0.5, 1.0, 2.0}) {
        const Complex via_gamma =
            stable_cf(gamma, alpha, std::vector<double>{u});
        const Complex via_id = cf_integral(fs, ts[0], u);
        CHECK(std::abs(via_gamma - via_id) < 0.01);
      }
    }
  }
}

TEST_CASE("bridge rejects skewed alpha = 1 measures") {
  const auto chars = stable_local_characteristics(
      1.0, [](const Point&) { return 0.5; });
  CHECK_THROWS_AS(chars.rho(make_point(0.0)), std::invalid_argument);
  const auto ok = stable_local_characteristics(1.0, {});
  CHECK_NOTHROW(ok.rho(make_point(0.0)));
}

TEST_CASE("spectral measure parameter validation") {
  StableSpec s = one_cell_spec(1.5, 2.0);  // |beta| > 1
  const std::vector<Point> ts{make_point(0.0)};
  CHECK_THROWS_AS(spectral_measure(s, ts), std::invalid_argument);
  StableSpec bad = one_cell_spec(2.5, 0.0);
  CHECK_THROWS_AS(spectral_measure(bad, ts), std::invalid_argument);
}
