#include "idfield/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "idfield/rng.hpp"

namespace idfield {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Verdict pass_if(bool ok) { return ok ? Verdict::Pass : Verdict::Fail; }

// Monte Carlo band for |empirical cf - cf| at one theta.
double ecf_tolerance(long n, double terms = 2.0) {
  return n > 0 ? 3.0 * terms / std::sqrt(static_cast<double>(n)) : 0.0;
}

std::vector<Point> select_points(std::span<const Point> ts,
                                 const std::vector<int>& idx) {
  std::vector<Point> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(ts[i]);
  return out;
}

std::vector<double> select_coords(std::span<const double> theta,
                                  const std::vector<int>& idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(theta[i]);
  return out;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

void ExperimentReport::add(Statistic s) { statistics.push_back(std::move(s)); }

void ExperimentReport::finalize() {
  verdict = Verdict::Pass;
  for (const Statistic& s : statistics) {
    if (s.verdict == Verdict::Fail) {
      verdict = Verdict::Fail;
      return;
    }
    if (s.verdict == Verdict::Inconclusive) verdict = Verdict::Inconclusive;
  }
  if (!error.empty()) verdict = Verdict::Fail;
}

Complex empirical_cf(const std::vector<std::vector<double>>& samples,
                     std::span<const double> theta) {
  if (samples.empty())
    throw std::invalid_argument("empirical_cf needs at least one sample");
  Complex acc(0.0, 0.0);
  for (const auto& x : samples) {
    const double phase = dot(theta, x);
    acc += Complex(std::cos(phase), std::sin(phase));
  }
  return acc / static_cast<double>(samples.size());
}

double MonotoneTestFunction::operator()(std::span<const double> y) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const double v = j < y.size() ? y[j] : 0.0;
    if (kind == Kind::Threshold) {
      acc += v > levels[j] ? 1.0 : 0.0;
    } else {
      acc += 0.5 * (1.0 + std::tanh(slope * (v - levels[j])));
    }
  }
  return acc;
}

MonotoneTestFunction make_monotone_function(int dim, std::uint64_t seed) {
  return make_monotone_function(
      dim, seed, std::vector<std::pair<double, double>>(dim, {-1.0, 1.0}));
}

MonotoneTestFunction make_monotone_function(
    int dim, std::uint64_t seed,
    const std::vector<std::pair<double, double>>& level_ranges) {
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (static_cast<int>(level_ranges.size()) != dim)
    throw std::invalid_argument("one level range per coordinate required");
  RngStream rng(seed);
  MonotoneTestFunction f;
  f.kind = rng.next_uniform() < 0.5 ? MonotoneTestFunction::Kind::Threshold
                                    : MonotoneTestFunction::Kind::SmoothClamp;
  f.levels.resize(dim);
  double max_width = 0.0;
  for (int j = 0; j < dim; ++j) {
    const auto& [lo, hi] = level_ranges[j];
    f.levels[j] = lo + rng.next_uniform() * (hi - lo);
    max_width = std::max(max_width, hi - lo);
  }
  f.slope = (2.0 + 6.0 * rng.next_uniform()) / std::max(max_width, 1e-6);
  return f;
}

std::vector<std::vector<double>> draw_field_samples(const FieldSampler& sampler,
                                                    long n,
                                                    std::uint64_t seed) {
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(n));
  std::vector<double> measure_buf, draw_buf;
  for (long k = 0; k < n; ++k) {
    sampler.draw(substream_seed(seed, static_cast<std::uint64_t>(k)),
                 measure_buf, draw_buf);
    out.push_back(draw_buf);
  }
  return out;
}

std::vector<std::vector<double>> default_theta_grid(int dim, int count,
                                                    double radius,
                                                    std::uint64_t seed) {
  std::vector<std::vector<double>> grid;
  for (int i = 0; i < dim && static_cast<int>(grid.size()) < count; ++i) {
    std::vector<double> v(dim, 0.0);
    v[i] = radius * 0.5;
    grid.push_back(v);
    v[i] = -radius;
    grid.push_back(v);
  }
  if (static_cast<int>(grid.size()) < count)
    grid.emplace_back(dim, radius / std::sqrt(static_cast<double>(dim)));
  RngStream rng(seed);
  while (static_cast<int>(grid.size()) < count) {
    std::vector<double> v(dim);
    for (double& c : v) c = (2.0 * rng.next_uniform() - 1.0) * radius;
    grid.push_back(std::move(v));
  }
  return grid;
}

// ---------------------------------------------------------------------------

ExperimentReport test_independence(
    const FieldSpec& spec, std::span<const Point> ts,
    const std::vector<int>& K, const std::vector<int>& L, long n,
    const std::vector<std::vector<double>>& theta_grid, int level, double eps,
    std::uint64_t seed) {
  const auto start = Clock::now();
  if (K.empty() || L.empty())
    throw std::invalid_argument("index sets K and L must be nonempty");
  std::vector<bool> seen(ts.size(), false);
  for (int i : K) {
    if (i < 0 || static_cast<std::size_t>(i) >= ts.size() || seen[i])
      throw std::invalid_argument("K contains an invalid or duplicate index");
    seen[i] = true;
  }
  for (int j : L) {
    if (j < 0 || static_cast<std::size_t>(j) >= ts.size() || seen[j])
      throw std::invalid_argument("L overlaps K or is invalid");
    seen[j] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw std::invalid_argument("K and L must cover all t-points");

  ExperimentReport rep;
  rep.name = "independence";
  rep.seed = seed;
  rep.parameters["n_points"] = std::to_string(ts.size());
  rep.parameters["n_theta"] = std::to_string(theta_grid.size());

  // (a) support disjointness on the partition
  bool disjoint = true;
  for (const Cell& cell : spec.partition.cells()) {
    bool in_k = false, in_l = false;
    for (int i : K)
      if (spec.kernels.eval(ts[i], cell.mid) != 0.0) {
        in_k = true;
        break;
      }
    if (!in_k) continue;
    for (int j : L)
      if (spec.kernels.eval(ts[j], cell.mid) != 0.0) {
        in_l = true;
        break;
      }
    if (in_k && in_l) {
      disjoint = false;
      break;
    }
  }
  rep.add({"support_disjoint", disjoint ? 1.0 : 0.0, 0.0, 1.0,
           pass_if(disjoint), 0});

  // (b) analytic factorization gap
  const std::vector<Point> ts_k = select_points(ts, K);
  const std::vector<Point> ts_l = select_points(ts, L);
  double analytic_gap = 0.0;
  for (const auto& theta : theta_grid) {
    if (theta.size() != ts.size())
      throw std::invalid_argument("theta grid dimension mismatch");
    const std::vector<double> th_k = select_coords(theta, K);
    const std::vector<double> th_l = select_coords(theta, L);
    const Complex full = joint_cf(spec, ts, theta);
    const Complex split =
        joint_cf(spec, ts_k, th_k) * joint_cf(spec, ts_l, th_l);
    analytic_gap = std::max(analytic_gap, std::abs(full - split));
  }
  rep.add({"analytic_gap", analytic_gap, 0.0, 1e-9,
           pass_if(analytic_gap <= 1e-9), 0});

  // (c) empirical counterpart
  if (n > 0) {
    const FieldSampler sampler(spec, ts, level, eps);
    const auto samples = draw_field_samples(sampler, n, seed);
    double emp_gap = 0.0;
    for (const auto& theta : theta_grid) {
      // marginal ecf = joint ecf with the complementary block zeroed
      std::vector<double> th_k_only(theta.size(), 0.0), th_l_only(theta.size(), 0.0);
      for (int i : K) th_k_only[i] = theta[i];
      for (int j : L) th_l_only[j] = theta[j];
      const Complex full = empirical_cf(samples, theta);
      const Complex split =
          empirical_cf(samples, th_k_only) * empirical_cf(samples, th_l_only);
      emp_gap = std::max(emp_gap, std::abs(full - split));
    }
    const double tol = analytic_gap + ecf_tolerance(n, 3.0);
    rep.add({"empirical_gap", emp_gap, ecf_tolerance(n, 1.0), tol,
             pass_if(emp_gap <= tol), n});
  }

  rep.finalize();
  rep.runtime_seconds = seconds_since(start);
  return rep;
}

namespace {

struct CovEstimate {
  double cov = 0.0;
  double se = 0.0;
};

CovEstimate covariance_estimate(const std::vector<double>& f,
                                const std::vector<double>& g) {
  const std::size_t n = f.size();
  double fm = 0.0, gm = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    fm += f[k];
    gm += g[k];
  }
  fm /= static_cast<double>(n);
  gm /= static_cast<double>(n);
  double cov = 0.0, var_prod = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double p = (f[k] - fm) * (g[k] - gm);
    cov += p;
  }
  cov /= static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double p = (f[k] - fm) * (g[k] - gm) - cov;
    var_prod += p * p;
  }
  var_prod /= static_cast<double>(n);
  return CovEstimate{cov, std::sqrt(var_prod / static_cast<double>(n))};
}

std::vector<std::pair<double, double>> central_quantile_ranges(
    std::vector<std::vector<double>> pilot, std::size_t dim) {
  std::vector<std::pair<double, double>> ranges(dim);
  std::vector<double> coord(pilot.size());
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t k = 0; k < pilot.size(); ++k) coord[k] = pilot[k][j];
    std::sort(coord.begin(), coord.end());
    const auto at = [&](double q) {
      const std::size_t i = static_cast<std::size_t>(
          q * static_cast<double>(coord.size() - 1));
      return coord[i];
    };
    double lo = at(0.15), hi = at(0.85);
    if (!(hi > lo)) {  // nearly constant coordinate; widen a hair
      lo -= 0.5;
      hi += 0.5;
    }
    ranges[j] = {lo, hi};
  }
  return ranges;
}

ExperimentReport association_impl(const FieldSpec& spec,
                                  std::span<const Point> ts,
                                  const std::vector<int>& I,
                                  const std::vector<int>& J, int n_pairs,
                                  long n, int level, double eps,
                                  std::uint64_t seed, bool negative) {
  const auto start = Clock::now();
  if (n_pairs < 1 || n < 2)
    throw std::invalid_argument("association test needs pairs and samples");

  ExperimentReport rep;
  rep.name = negative ? "negative_association" : "association";
  rep.seed = seed;
  rep.parameters["n_pairs"] = std::to_string(n_pairs);
  rep.parameters["dim"] = std::to_string(ts.size());

  const FieldSampler sampler(spec, ts, level, eps);
  const auto pilot =
      draw_field_samples(sampler, std::min<long>(512, std::max<long>(64, n / 16)),
                         substream_seed(seed, 0xB00F));
  const auto ranges = central_quantile_ranges(pilot, ts.size());
  const auto samples = draw_field_samples(sampler, n, seed);

  const std::vector<int> all = [&] {
    std::vector<int> v(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) v[i] = static_cast<int>(i);
    return v;
  }();
  const std::vector<int>& f_idx = I.empty() ? all : I;
  const std::vector<int>& g_idx = negative ? J : f_idx;

  auto ranges_for = [&](const std::vector<int>& idx) {
    std::vector<std::pair<double, double>> r;
    r.reserve(idx.size());
    for (int i : idx) r.push_back(ranges[i]);
    return r;
  };
  const auto f_ranges = ranges_for(f_idx);
  const auto g_ranges = ranges_for(g_idx);

  int violations = 0;
  double worst_cov = 0.0, worst_se = 0.0, worst_margin = 0.0;
  bool have_worst = false;
  std::vector<double> fv(samples.size()), gv(samples.size());
  std::vector<double> ybuf_f(f_idx.size()), ybuf_g(g_idx.size());
  for (int p = 0; p < n_pairs; ++p) {
    const auto f = make_monotone_function(
        static_cast<int>(f_idx.size()), substream_seed(seed, 17, 2 * p),
        f_ranges);
    const auto g = make_monotone_function(
        static_cast<int>(g_idx.size()), substream_seed(seed, 17, 2 * p + 1),
        g_ranges);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      for (std::size_t j = 0; j < f_idx.size(); ++j)
        ybuf_f[j] = samples[k][f_idx[j]];
      for (std::size_t j = 0; j < g_idx.size(); ++j)
        ybuf_g[j] = samples[k][g_idx[j]];
      fv[k] = f(ybuf_f);
      gv[k] = g(ybuf_g);
    }
    const CovEstimate est = covariance_estimate(fv, gv);
    const double margin =
        negative ? est.cov - 3.0 * est.se : est.cov + 3.0 * est.se;
    const bool violated = negative ? margin > 0.0 : margin < 0.0;
    if (violated) ++violations;
    if (!have_worst || (negative ? margin > worst_margin
                                 : margin < worst_margin)) {
      have_worst = true;
      worst_margin = margin;
      worst_cov = est.cov;
      worst_se = est.se;
    }
  }

  rep.add({"n_violations", static_cast<double>(violations), 0.0, 0.0,
           pass_if(violations == 0), n});
  rep.add({negative ? "max_covariance" : "min_covariance", worst_cov, worst_se,
           negative ? 3.0 * worst_se : -3.0 * worst_se, pass_if(violations == 0),
           n});
  rep.finalize();
  rep.runtime_seconds = seconds_since(start);
  return rep;
}

}  // namespace

ExperimentReport test_association(const FieldSpec& spec,
                                  std::span<const Point> ts, int n_pairs,
                                  long n, int level, double eps,
                                  std::uint64_t seed) {
  return association_impl(spec, ts, {}, {}, n_pairs, n, level, eps, seed,
                          false);
}

ExperimentReport test_negative_association(
    const FieldSpec& spec, std::span<const Point> ts,
    const std::vector<int>& I, const std::vector<int>& J, int n_pairs, long n,
    int level, double eps, std::uint64_t seed) {
  if (I.empty() || J.empty())
    throw std::invalid_argument("index sets I and J must be nonempty");
  for (int i : I)
    for (int j : J)
      if (i == j)
        throw std::invalid_argument("index sets I and J must be disjoint");
  return association_impl(spec, ts, I, J, n_pairs, n, level, eps, seed, true);
}

ExperimentReport test_id(const FieldSpec& spec, std::span<const Point> ts,
                         int n_fold, long n,
                         const std::vector<std::vector<double>>& theta_grid,
                         int level, double eps, std::uint64_t seed) {
  const auto start = Clock::now();
  if (n_fold < 2) throw std::invalid_argument("n_fold must be >= 2");

  ExperimentReport rep;
  rep.name = "id_property";
  rep.seed = seed;
  rep.parameters["n_fold"] = std::to_string(n_fold);

  const FieldSpec scaled = scale_spec(spec, 1.0 / n_fold);

  double analytic_gap = 0.0;
  for (const auto& theta : theta_grid) {
    const Complex part = joint_cf(scaled, ts, theta);
    Complex powed(1.0, 0.0);
    for (int i = 0; i < n_fold; ++i) powed *= part;
    analytic_gap =
        std::max(analytic_gap, std::abs(powed - joint_cf(spec, ts, theta)));
  }
  rep.add({"analytic_gap", analytic_gap, 0.0, 1e-12,
           pass_if(analytic_gap <= 1e-12), 0});

  if (n > 0) {
    const FieldSampler sampler(scaled, ts, level, eps);
    std::vector<std::vector<double>> sums(
        static_cast<std::size_t>(n), std::vector<double>(ts.size(), 0.0));
    std::vector<double> measure_buf, draw_buf;
    for (long k = 0; k < n; ++k) {
      for (int fold = 0; fold < n_fold; ++fold) {
        sampler.draw(substream_seed(seed, static_cast<std::uint64_t>(k),
                                    static_cast<std::uint64_t>(fold) + 1),
                     measure_buf, draw_buf);
        for (std::size_t j = 0; j < draw_buf.size(); ++j)
          sums[k][j] += draw_buf[j];
      }
    }
    double emp_gap = 0.0;
    for (const auto& theta : theta_grid)
      emp_gap = std::max(
          emp_gap, std::abs(empirical_cf(sums, theta) - joint_cf(spec, ts, theta)));
    const double tol = ecf_tolerance(n, 2.0);
    rep.add({"empirical_gap", emp_gap, ecf_tolerance(n, 1.0), tol,
             pass_if(emp_gap <= tol), n});
  }

  rep.finalize();
  rep.runtime_seconds = seconds_since(start);
  return rep;
}

ExperimentReport test_stoch_continuity(const FieldSpec& spec, const Point& t,
                                       const std::vector<double>& radii,
                                       double eps_x, long n, int level,
                                       double eps, std::uint64_t seed,
                                       const ContinuityOptions& opts) {
  const auto start = Clock::now();
  if (radii.empty()) throw std::invalid_argument("at least one radius required");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] < radii[k - 1])))
      throw std::invalid_argument("radii must be positive and strictly decreasing");
  }
  if (!(eps_x > 0.0)) throw std::invalid_argument("eps_x must be > 0");

  ExperimentReport rep;
  rep.name = "stochastic_continuity";
  rep.seed = seed;
  rep.parameters["eps_x"] = format_double(eps_x);
  rep.parameters["n_radii"] = std::to_string(radii.size());

  std::vector<Point> ts;
  ts.push_back(t);
  for (double r : radii) {
    Point s = t;
    for (int d = 0; d < 3; ++d) s[d] += r * opts.direction[d];
    ts.push_back(s);
  }

  // hypothesis probe: kernel gap sup over the partition, envelope domination
  bool envelope_ok = true;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    double sup_gap = 0.0;
    for (const Cell& cell : spec.partition.cells()) {
      const double gap = std::fabs(spec.kernels.eval(ts[k + 1], cell.mid) -
                                   spec.kernels.eval(t, cell.mid));
      sup_gap = std::max(sup_gap, gap);
      if (opts.envelope && gap > (*opts.envelope)(cell.mid) + 1e-12)
        envelope_ok = false;
    }
    rep.add({"sup_kernel_gap_" + std::to_string(k), sup_gap, 0.0, 0.0,
             Verdict::Pass, 0});
  }
  if (opts.envelope) {
    rep.add({"envelope_dominates", envelope_ok ? 1.0 : 0.0, 0.0, 1.0,
             pass_if(envelope_ok), 0});
    FieldSpec env_spec = spec;
    auto g = *opts.envelope;
    env_spec.kernels.eval = [g](const Point&, const Point& x) { return g(x); };
    env_spec.kernels.sign_class = SignClass::Mixed;
    env_spec.kernels.support_hint.reset();
    const IntegrabilityReport ir = integrability_check(env_spec, t);
    rep.add({"envelope_integrable", ir.pass ? 1.0 : 0.0, 0.0, 1.0,
             pass_if(ir.pass), 0});
  }

  // coupled exceedance probabilities
  const FieldSampler sampler(spec, ts, level, eps);
  std::vector<long> exceed(radii.size(), 0);
  std::vector<double> measure_buf, draw_buf;
  for (long k = 0; k < n; ++k) {
    sampler.draw(substream_seed(seed, static_cast<std::uint64_t>(k)),
                 measure_buf, draw_buf);
    for (std::size_t r = 0; r < radii.size(); ++r)
      if (std::fabs(draw_buf[r + 1] - draw_buf[0]) > eps_x) ++exceed[r];
  }
  std::vector<double> p(radii.size()), se(radii.size());
  for (std::size_t r = 0; r < radii.size(); ++r) {
    p[r] = static_cast<double>(exceed[r]) / static_cast<double>(n);
    se[r] = std::sqrt(p[r] * (1.0 - p[r]) / static_cast<double>(n));
    rep.add({"p_exceed_" + std::to_string(r), p[r], se[r], 0.0, Verdict::Pass,
             n});
  }

  bool monotone = true;
  for (std::size_t r = 0; r + 1 < radii.size(); ++r) {
    const double band =
        2.0 * std::sqrt(se[r] * se[r] + se[r + 1] * se[r + 1]);
    if (p[r + 1] > p[r] + band) monotone = false;
  }
  rep.add({"p_nonincreasing", monotone ? 1.0 : 0.0, 0.0, 1.0,
           pass_if(monotone), n});
  const double final_p = p.back();
  const double final_tol = 2.0 * se.back();
  rep.add({"final_p", final_p, se.back(), final_tol,
           pass_if(final_p <= final_tol), n});

  rep.finalize();
  rep.runtime_seconds = seconds_since(start);
  return rep;
}

}  // namespace idfield
