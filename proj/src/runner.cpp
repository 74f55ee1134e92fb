#include "idfield/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "idfield/report_io.hpp"
#include "idfield/rng.hpp"
#include "idfield/stable.hpp"

namespace idfield {

namespace {

using nlohmann::json;

std::vector<int> index_list(const json& e, const char* key) {
  std::vector<int> out;
  if (!e.contains(key)) return out;
  for (const auto& v : e[key]) out.push_back(v.get<int>());
  return out;
}

long effective_samples(const ExperimentConfig& cfg, const json& e) {
  if (e.contains("samples")) return e["samples"].get<long>();
  return cfg.samples;
}

std::vector<std::vector<double>> theta_grid_for(const json& e, int dim,
                                                std::uint64_t seed) {
  if (e.contains("theta_grid")) {
    std::vector<std::vector<double>> grid;
    for (const auto& row : e["theta_grid"])
      grid.push_back(row.get<std::vector<double>>());
    return grid;
  }
  const int count = e.value("n_theta", 8);
  const double radius = e.value("theta_radius", 2.0);
  return default_theta_grid(dim, count, radius, substream_seed(seed, 0xA11CE));
}

ExperimentReport run_cf_check(const ExperimentConfig& cfg, const json& e,
                              std::uint64_t seed) {
  ExperimentReport rep;
  rep.name = "cf_check";
  rep.seed = seed;
  const int ti = e.value("t_index", 0);
  const Point t = cfg.t_points[ti];
  const FieldSpec spec = cfg.field_spec();
  std::vector<double> thetas = e.contains("theta")
                                   ? e["theta"].get<std::vector<double>>()
                                   : std::vector<double>{0.5, 1.0, 2.0};
  const long n = effective_samples(cfg, e);
  const double tol =
      e.value("tolerance", 6.0 / std::sqrt(static_cast<double>(n)));

  rep.add({"cf_at_zero_gap",
           std::abs(cf_integral(spec, t, 0.0) - Complex(1.0, 0.0)), 0.0, 1e-12,
           Verdict::Pass, 0});

  const std::vector<Point> ts{t};
  const FieldSampler sampler(spec, ts, cfg.level, cfg.epsilon);
  const auto samples = draw_field_samples(sampler, n, seed);
  for (double u : thetas) {
    const Complex analytic = cf_integral(spec, t, u);
    const Complex empirical = empirical_cf(samples, std::vector<double>{u});
    const double gap = std::abs(analytic - empirical);
    std::ostringstream name;
    name << "cf_gap_theta_" << u;
    rep.add({name.str(), gap, 1.0 / std::sqrt(static_cast<double>(n)), tol,
             gap <= tol ? Verdict::Pass : Verdict::Fail, n});
  }
  rep.finalize();
  return rep;
}

ExperimentReport run_independence(const ExperimentConfig& cfg, const json& e,
                                  std::uint64_t seed) {
  const auto K = index_list(e, "K");
  const auto L = index_list(e, "L");
  const auto grid = theta_grid_for(e, static_cast<int>(cfg.t_points.size()),
                                          seed);
  return test_independence(cfg.field_spec(), cfg.t_points, K, L,
                           effective_samples(cfg, e), grid, cfg.level,
                           cfg.epsilon, seed);
}

ExperimentReport run_association(const ExperimentConfig& cfg, const json& e,
                                 std::uint64_t seed, bool negative) {
  const int pairs = e.value("pairs", 50);
  const long n = effective_samples(cfg, e);
  if (!negative) {
    std::vector<Point> ts = cfg.t_points;
    if (e.contains("I")) {
      ts.clear();
      for (int i : index_list(e, "I")) ts.push_back(cfg.t_points[i]);
    }
    return test_association(cfg.field_spec(), ts, pairs, n, cfg.level,
                            cfg.epsilon, seed);
  }
  return test_negative_association(cfg.field_spec(), cfg.t_points,
                                   index_list(e, "I"), index_list(e, "J"),
                                   pairs, n, cfg.level, cfg.epsilon, seed);
}

ExperimentReport run_id(const ExperimentConfig& cfg, const json& e,
                        std::uint64_t seed) {
  const int n_fold = e.value("n_fold", 2);
  const auto grid = theta_grid_for(e, static_cast<int>(cfg.t_points.size()),
                                          seed);
  return test_id(cfg.field_spec(), cfg.t_points, n_fold,
                 effective_samples(cfg, e), grid, cfg.level, cfg.epsilon,
                 seed);
}

ExperimentReport run_continuity(const ExperimentConfig& cfg, const json& e,
                                std::uint64_t seed) {
  const int ti = e.value("t_index", 0);
  const auto radii = e["radii"].get<std::vector<double>>();
  const double eps_x = e["eps_x"].get<double>();
  ContinuityOptions opts;
  if (e.contains("direction")) {
    const auto d = e["direction"].get<std::vector<double>>();
    opts.direction = Point{};
    for (std::size_t i = 0; i < std::min<std::size_t>(3, d.size()); ++i)
      opts.direction[i] = d[i];
  }
  if (e.contains("envelope")) {
    const auto env = e["envelope"];
    const double amp = env.value("amplitude", 1.0);
    const auto lo = env["lo"].get<std::vector<double>>();
    const auto hi = env["hi"].get<std::vector<double>>();
    Point plo{}, phi{};
    for (std::size_t i = 0; i < std::min<std::size_t>(3, lo.size()); ++i)
      plo[i] = lo[i];
    for (std::size_t i = 0; i < std::min<std::size_t>(3, hi.size()); ++i)
      phi[i] = hi[i];
    opts.envelope = [plo, phi, amp](const Point& x) {
      for (int d = 0; d < 3; ++d)
        if (x[d] < plo[d] || x[d] > phi[d]) return 0.0;
      return amp;
    };
  }
  return test_stoch_continuity(cfg.field_spec(), cfg.t_points[ti], radii,
                               eps_x, effective_samples(cfg, e), cfg.level,
                               cfg.epsilon, seed, opts);
}

const char* association_name(Association a) {
  switch (a) {
    case Association::Associated:
      return "associated";
    case Association::NegativelyAssociated:
      return "negatively_associated";
    case Association::Both:
      return "both";
    case Association::Neither:
      return "neither";
  }
  return "unknown";
}

ExperimentReport run_stable_spectral(const ExperimentConfig& cfg,
                                     const json& e, std::uint64_t seed) {
  ExperimentReport rep;
  rep.name = "stable_spectral";
  rep.seed = seed;
  StableSpec sspec{*cfg.stable_alpha, cfg.stable_beta, cfg.partition,
                   cfg.kernels};
  std::vector<Point> ts = cfg.t_points;
  if (e.contains("I")) {
    ts.clear();
    for (int i : index_list(e, "I")) ts.push_back(cfg.t_points[i]);
  }
  const SpectralMeasure gamma = spectral_measure(sspec, ts);
  const SphereMasses masses = sphere_masses(gamma);
  double total = 0.0;
  for (const auto& a : gamma.atoms) total += a.weight;

  rep.parameters["alpha"] = std::to_string(sspec.alpha);
  rep.parameters["classification"] =
      association_name(association_classify(gamma));
  rep.add({"gamma_total_mass", total, 0.0, 0.0, Verdict::Pass, 0});
  rep.add({"gamma_s_minus", masses.s_minus, 0.0, 0.0, Verdict::Pass, 0});
  rep.add({"gamma_s_plus", masses.s_plus, 0.0, 0.0, Verdict::Pass, 0});
  rep.add({"n_atoms", static_cast<double>(gamma.atoms.size()), 0.0, 0.0,
           Verdict::Pass, 0});
  if (e.contains("expect")) {
    const bool ok = e["expect"].get<std::string>() ==
                    rep.parameters["classification"];
    rep.add({"classification_matches", ok ? 1.0 : 0.0, 0.0, 1.0,
             ok ? Verdict::Pass : Verdict::Fail, 0});
  }
  rep.spectral = gamma;
  rep.finalize();
  return rep;
}

ExperimentReport run_null_check(const ExperimentConfig& cfg, const json& e,
                                std::uint64_t seed) {
  ExperimentReport rep;
  rep.name = "null_check";
  rep.seed = seed;
  const int ti = e.value("t_index", 0);
  const Point t = cfg.t_points[ti];
  StableSpec sspec{*cfg.stable_alpha, cfg.stable_beta, cfg.partition,
                   cfg.kernels};
  const auto& kernels = cfg.kernels;
  const auto result = null_check(
      sspec, [&kernels, t](const Point& x) { return kernels.eval(t, x); });
  rep.parameters["degenerate"] = result.degenerate ? "true" : "false";
  rep.add({"alpha_integral", result.integral, 0.0, 0.0, Verdict::Pass, 0});
  if (result.degenerate) {
    // a null alpha-integral forces every draw to vanish identically
    const FieldSpec fs = to_field_spec(sspec);
    const std::vector<Point> ts{t};
    const FieldSampler sampler(fs, ts, cfg.level, cfg.epsilon);
    const long n = std::min<long>(effective_samples(cfg, e), 10000);
    double max_abs = 0.0;
    std::vector<double> mbuf, dbuf;
    for (long k = 0; k < n; ++k) {
      sampler.draw(substream_seed(seed, k), mbuf, dbuf);
      max_abs = std::max(max_abs, std::fabs(dbuf[0]));
    }
    rep.add({"max_abs_draw", max_abs, 0.0, 0.0,
             max_abs == 0.0 ? Verdict::Pass : Verdict::Fail, n});
  }
  if (e.contains("expect_degenerate")) {
    const bool ok = e["expect_degenerate"].get<bool>() == result.degenerate;
    rep.add({"degeneracy_matches", ok ? 1.0 : 0.0, 0.0, 1.0,
             ok ? Verdict::Pass : Verdict::Fail, 0});
  }
  rep.finalize();
  return rep;
}

}  // namespace

std::vector<ExperimentReport> run_experiment(
    const ExperimentConfig& cfg, const std::vector<std::string>& name_filter) {
  // model-level validation before anything executes
  spot_check_sign_class(cfg.kernels, cfg.t_points, cfg.partition.box(), 1000,
                        substream_seed(cfg.seed, 0x51C4));
  check_support_hints(cfg.field_spec(), cfg.t_points);

  std::vector<ExperimentReport> reports;
  for (std::size_t i = 0; i < cfg.experiments.size(); ++i) {
    const ExperimentRequest& req = cfg.experiments[i];
    if (!name_filter.empty() &&
        std::find(name_filter.begin(), name_filter.end(), req.name) ==
            name_filter.end())
      continue;
    const std::uint64_t seed = substream_seed(cfg.seed, i + 1);
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport rep;
    try {
      if (req.name == "cf_check") {
        rep = run_cf_check(cfg, req.params, seed);
      } else if (req.name == "independence") {
        rep = run_independence(cfg, req.params, seed);
      } else if (req.name == "association") {
        rep = run_association(cfg, req.params, seed, false);
      } else if (req.name == "negative_association") {
        rep = run_association(cfg, req.params, seed, true);
      } else if (req.name == "id") {
        rep = run_id(cfg, req.params, seed);
      } else if (req.name == "continuity") {
        rep = run_continuity(cfg, req.params, seed);
      } else if (req.name == "stable_spectral") {
        rep = run_stable_spectral(cfg, req.params, seed);
      } else if (req.name == "null_check") {
        rep = run_null_check(cfg, req.params, seed);
      }
    } catch (const std::exception& ex) {
      rep.name = req.name;
      rep.seed = seed;
      rep.error = ex.what();
      rep.finalize();
    }
    rep.runtime_seconds = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start)
                              .count();
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace idfield
