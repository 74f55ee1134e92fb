#include "idfield/spectral_field.hpp"

#include <cmath>
#include <stdexcept>

#include "idfield/rng.hpp"

namespace idfield {

void spot_check_sign_class(const KernelFamily& kernels,
                           std::span<const Point> ts, const Box& box,
                           int n_points, std::uint64_t seed) {
  if (kernels.sign_class == SignClass::Mixed || ts.empty()) return;
  RngStream rng(seed);
  for (int i = 0; i < n_points; ++i) {
    const Point& t = ts[rng.next_u64() % ts.size()];
    Point x{};
    for (int d = 0; d < box.dim; ++d)
      x[d] = box.lo[d] + rng.next_uniform() * (box.hi[d] - box.lo[d]);
    const double v = kernels.eval(t, x);
    if (kernels.sign_class == SignClass::Nonnegative && v < 0.0)
      throw std::invalid_argument(
          "kernel declared Nonnegative takes a negative value");
    if (kernels.sign_class == SignClass::Nonpositive && v > 0.0)
      throw std::invalid_argument(
          "kernel declared Nonpositive takes a positive value");
  }
}

void check_support_hints(const FieldSpec& spec, std::span<const Point> ts) {
  if (!spec.kernels.support_hint) return;
  for (const Point& t : ts) {
    const Box hint = (*spec.kernels.support_hint)(t);
    if (!spec.partition.box().contains(hint))
      throw std::invalid_argument(
          "kernel support hint exceeds the partition box; enlarge the domain");
  }
}

namespace {

SimpleFunction approx_on_grid(const KernelFamily& kernels,
                              const DomainPartition& grid, const Point& t,
                              double bound) {
  SimpleFunction sf;
  for (const Cell& cell : grid.cells()) {
    double v = kernels.eval(t, cell.mid);
    if (kernels.sign_class == SignClass::Nonnegative && v < 0.0) v = 0.0;
    if (kernels.sign_class == SignClass::Nonpositive && v > 0.0) v = 0.0;
    if (v == 0.0 || std::fabs(v) > bound) continue;  // zero or beyond the clamp bound
    sf.pieces.push_back(SimplePiece{v, cell.id});
  }
  return sf;
}

}  // namespace

SimpleFunction simple_approx(const FieldSpec& spec, const Point& t,
                             int level) {
  if (level < 1) throw std::invalid_argument("approximation level must be >= 1");
  return approx_on_grid(spec.kernels, spec.partition.refined(level), t,
                        static_cast<double>(level));
}

double integrate_simple(const SimpleFunction& sf,
                        std::span<const double> measure) {
  double acc = 0.0;
  for (const SimplePiece& p : sf.pieces) {
    if (p.cell < 0 || static_cast<std::size_t>(p.cell) >= measure.size())
      throw std::out_of_range("simple function references an unknown cell id");
    acc += p.coefficient * measure[p.cell];
  }
  return acc;
}

Complex cumulant_kernel(double u, const Point& x,
                        const LocalCharacteristics& chars) {
  if (u == 0.0) return Complex(0.0, 0.0);
  const double a = chars.a ? chars.a(x) : 0.0;
  const double s2 = chars.sigma2 ? chars.sigma2(x) : 0.0;
  Complex k(-0.5 * u * u * s2, u * a);
  if (chars.rho) k += levy_exponent(chars.rho(x), u);
  return k;
}

Complex joint_cf(const FieldSpec& spec, std::span<const Point> ts,
                 std::span<const double> theta) {
  if (ts.size() != theta.size())
    throw std::invalid_argument("theta dimension must match the t-points");
  Complex exponent(0.0, 0.0);
  for (const Cell& cell : spec.partition.cells()) {
    if (cell.mass == 0.0) continue;
    double u = 0.0;
    for (std::size_t j = 0; j < ts.size(); ++j)
      u += theta[j] * spec.kernels.eval(ts[j], cell.mid);
    if (u == 0.0) continue;
    exponent += cumulant_kernel(u, cell.mid, spec.chars) * cell.mass;
  }
  return std::exp(spec.gamma * exponent);
}

Complex cf_integral(const FieldSpec& spec, const Point& t, double u) {
  const Point ts[1] = {t};
  const double theta[1] = {u};
  return joint_cf(spec, ts, theta);
}

IntegrabilityReport integrability_check(const FieldSpec& spec,
                                        const Point& t) {
  IntegrabilityReport rep;
  bool iii_diverged = false;
  for (const Cell& cell : spec.partition.cells()) {
    if (cell.mass == 0.0) continue;
    const double f = spec.kernels.eval(t, cell.mid);
    const double a = spec.chars.a ? spec.chars.a(cell.mid) : 0.0;
    const double s2 = spec.chars.sigma2 ? spec.chars.sigma2(cell.mid) : 0.0;
    const LevyMeasure rho =
        spec.chars.rho ? spec.chars.rho(cell.mid) : LevyMeasure::none();
    const double w = spec.gamma * cell.mass;

    rep.cond_i += std::fabs(f * a) * w;
    rep.cond_ii += f * f * s2 * w;

    if (f != 0.0 && !rho.is_zero()) {
      const LevyIntegral abs_first =
          try_levy_quadrature(rho, [](double s) { return std::fabs(s); });
      if (abs_first.diverged)
        iii_diverged = true;
      else
        rep.cond_iii += std::fabs(f) * abs_first.value * w;

      // Proof bounds: U(u,x) = u a(x) + integral (tau(su) - u tau(s)) rho,
      // V0(u,x) = integral min(1, (su)^2) rho.
      const LevyIntegral u_int = try_levy_quadrature(
          rho, [f](double s) { return tau(s * f) - f * tau(s); });
      if (u_int.diverged)
        rep.u_diverged = true;
      else
        rep.u_bound += std::fabs(f * a + u_int.value) * w;

      const LevyIntegral v0_int = try_levy_quadrature(rho, [f](double s) {
        return std::min(1.0, s * f * s * f);
      });
      if (v0_int.diverged)
        rep.v0_diverged = true;
      else
        rep.v0_bound += v0_int.value * w;
    } else {
      rep.u_bound += std::fabs(f * a) * w;
    }
  }
  if (iii_diverged) rep.cond_iii = kOverflowGuard;
  if (rep.u_diverged) rep.u_bound = kOverflowGuard;
  if (rep.v0_diverged) rep.v0_bound = kOverflowGuard;
  rep.pass_i = rep.cond_i < kOverflowGuard;
  rep.pass_ii = rep.cond_ii < kOverflowGuard;
  rep.pass_iii = rep.cond_iii < kOverflowGuard;
  rep.pass = rep.pass_i && rep.pass_ii && rep.pass_iii;
  return rep;
}

FieldSpec scale_spec(const FieldSpec& spec, double gamma) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("control-measure scale must be > 0");
  FieldSpec out = spec;
  out.gamma = spec.gamma * gamma;
  return out;
}

FieldSampler::FieldSampler(const FieldSpec& spec, std::span<const Point> ts,
                           int level, double eps)
    : grid_(spec.partition.refined(level)),
      measure_(grid_, spec.chars, eps, spec.gamma) {
  if (ts.empty()) throw std::invalid_argument("at least one t-point required");
  pieces_.reserve(ts.size());
  for (const Point& t : ts)
    pieces_.push_back(approx_on_grid(spec.kernels, grid_, t,
                                     static_cast<double>(level)));
}

void FieldSampler::draw(std::uint64_t seed, std::vector<double>& measure_buf,
                        std::vector<double>& out) const {
  measure_.draw(seed, measure_buf);
  out.resize(pieces_.size());
  for (std::size_t i = 0; i < pieces_.size(); ++i)
    out[i] = integrate_simple(pieces_[i], measure_buf);
}

std::vector<double> FieldSampler::draw(std::uint64_t seed) const {
  std::vector<double> measure_buf, out;
  draw(seed, measure_buf, out);
  return out;
}

std::vector<double> sample_field(const FieldSpec& spec,
                                 std::span<const Point> ts, int level,
                                 double eps, std::uint64_t seed) {
  return FieldSampler(spec, ts, level, eps).draw(seed);
}

}  // namespace idfield
