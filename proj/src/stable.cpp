#include "idfield/stable.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace idfield {

namespace {

double beta_at(const StableSpec& spec, const Point& x) {
  const double b = spec.beta ? spec.beta(x) : 0.0;
  if (!(std::fabs(b) <= 1.0))
    throw std::invalid_argument("skewness beta must lie in [-1,1]");
  return b;
}

}  // namespace

std::optional<std::vector<double>> g_map(const Point& x,
                                         std::span<const Point> ts,
                                         const KernelFamily& kernels) {
  std::vector<double> f(ts.size());
  double ss = 0.0;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    f[j] = kernels.eval(ts[j], x);
    ss += f[j] * f[j];
  }
  if (ss == 0.0) return std::nullopt;  // every kernel vanishes at x
  const double inv = 1.0 / std::sqrt(ss);
  for (double& v : f) v *= inv;
  return f;
}

SpectralMeasure spectral_measure(const StableSpec& spec,
                                 std::span<const Point> ts) {
  if (ts.empty()) throw std::invalid_argument("at least one t-point required");
  if (!(spec.alpha > 0.0 && spec.alpha < 2.0))
    throw std::invalid_argument("stable index must be in (0,2)");

  std::map<std::vector<double>, double> merged;
  for (const Cell& cell : spec.partition.cells()) {
    if (cell.mass == 0.0) continue;
    std::vector<double> f(ts.size());
    double ss = 0.0;
    for (std::size_t j = 0; j < ts.size(); ++j) {
      f[j] = spec.kernels.eval(ts[j], cell.mid);
      ss += f[j] * f[j];
    }
    if (ss == 0.0) continue;
    const double m1 = std::pow(ss, 0.5 * spec.alpha) * cell.mass;
    const double b = beta_at(spec, cell.mid);
    const double inv = 1.0 / std::sqrt(ss);

    std::vector<double> g(ts.size()), gneg(ts.size());
    for (std::size_t j = 0; j < ts.size(); ++j) {
      g[j] = f[j] * inv;
      gneg[j] = -g[j];
    }
    const double w_plus = 0.5 * (1.0 + b) * m1;
    const double w_minus = 0.5 * (1.0 - b) * m1;
    if (w_plus > 0.0) merged[g] += w_plus;
    if (w_minus > 0.0) merged[gneg] += w_minus;
  }

  SpectralMeasure gamma;
  gamma.drift.assign(ts.size(), 0.0);
  gamma.atoms.reserve(merged.size());
  for (auto& [s, w] : merged) gamma.atoms.push_back(SpectralAtom{s, w});
  return gamma;
}

Complex stable_cf(const SpectralMeasure& gamma, double alpha,
                  std::span<const double> theta) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("stable index must be in (0,2)");
  Complex exponent(0.0, 0.0);
  const double skew_factor =
      alpha == 1.0 ? 2.0 / kPi : std::tan(kPi * alpha / 2.0);
  for (const SpectralAtom& atom : gamma.atoms) {
    const double proj = dot(theta, atom.s);
    if (proj == 0.0) continue;  // covers the 0*ln 0 = 0 convention
    const double ap = std::pow(std::fabs(proj), alpha);
    const double sgn = proj > 0.0 ? 1.0 : -1.0;
    if (alpha == 1.0) {
      const double a1 = std::fabs(proj);
      exponent -= atom.weight *
                  Complex(a1, a1 * skew_factor * sgn * std::log(a1));
    } else {
      exponent -= atom.weight * Complex(ap, -ap * sgn * skew_factor);
    }
  }
  double drift = 0.0;
  if (!gamma.drift.empty()) drift = dot(theta, gamma.drift);
  return std::exp(exponent + Complex(0.0, drift));
}

SphereMasses sphere_masses(const SpectralMeasure& gamma) {
  SphereMasses m;
  for (const SpectralAtom& atom : gamma.atoms) {
    bool mixed = false, same = false;
    const auto& s = atom.s;
    for (std::size_t i = 0; i < s.size() && !(mixed && same); ++i) {
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        const double p = s[i] * s[j];
        if (p < 0.0) mixed = true;
        if (p > 0.0) same = true;
      }
    }
    if (mixed) m.s_minus += atom.weight;
    if (same) m.s_plus += atom.weight;
  }
  return m;
}

Association association_classify(const SpectralMeasure& gamma) {
  const SphereMasses m = sphere_masses(gamma);
  if (m.s_minus == 0.0 && m.s_plus == 0.0) return Association::Both;
  if (m.s_minus == 0.0) return Association::Associated;
  if (m.s_plus == 0.0) return Association::NegativelyAssociated;
  return Association::Neither;
}

NullCheckReport null_check(const StableSpec& spec,
                           const std::function<double(const Point&)>& f) {
  NullCheckReport rep;
  for (const Cell& cell : spec.partition.cells())
    rep.integral += std::pow(std::fabs(f(cell.mid)), spec.alpha) * cell.mass;
  rep.degenerate = rep.integral == 0.0;
  return rep;
}

LocalCharacteristics stable_local_characteristics(
    double alpha, std::function<double(const Point&)> beta) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("stable index must be in (0,2)");

  // Per unit intensity of the one-sided stable density, the jump exponent
  // evaluates at u = 1 to -scale + i * imag_part; the tau-centering leaves
  // a linear drift that a(x) cancels so that unit base mass carries unit
  // stable scale and skewness beta(x).
  const Complex e1 = levy_exponent(LevyMeasure::stable_pair(alpha, 1.0, 0.0), 1.0);
  const double scale_per_unit = -e1.real();
  const double total = 1.0 / scale_per_unit;
  const double drift_per_skew =
      alpha == 1.0 ? 0.0
                   : e1.imag() - scale_per_unit * std::tan(kPi * alpha / 2.0);

  LocalCharacteristics chars;
  chars.sigma2 = [](const Point&) { return 0.0; };
  chars.a = [alpha, total, drift_per_skew, beta](const Point& x) {
    const double b = beta ? beta(x) : 0.0;
    if (alpha == 1.0 && b != 0.0)
      throw std::invalid_argument(
          "alpha = 1 with nonzero skewness is not supported by the bridge");
    return -(total * b) * drift_per_skew;
  };
  chars.rho = [alpha, total, beta](const Point& x) {
    const double b = beta ? beta(x) : 0.0;
    if (!(std::fabs(b) <= 1.0))
      throw std::invalid_argument("skewness beta must lie in [-1,1]");
    if (alpha == 1.0 && b != 0.0)
      throw std::invalid_argument(
          "alpha = 1 with nonzero skewness is not supported by the bridge");
    return LevyMeasure::stable_pair(alpha, total * 0.5 * (1.0 + b),
                                    total * 0.5 * (1.0 - b));
  };
  return chars;
}

FieldSpec to_field_spec(const StableSpec& spec) {
  return FieldSpec{spec.kernels,
                   stable_local_characteristics(spec.alpha, spec.beta),
                   spec.partition, 1.0};
}

}  // namespace idfield
