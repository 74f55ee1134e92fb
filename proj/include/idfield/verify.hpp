#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "idfield/common.hpp"
#include "idfield/spectral_field.hpp"
#include "idfield/stable.hpp"

namespace idfield {

enum class Verdict { Pass, Fail, Inconclusive };

const char* to_string(Verdict v);

struct Statistic {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double threshold = 0.0;
  Verdict verdict = Verdict::Pass;
  long long n_samples = 0;
};

// Result of one executable verification: named statistics with their
// standard errors, thresholds and verdicts, plus the master seed for exact
// reruns.
struct ExperimentReport {
  std::string name;
  std::map<std::string, std::string> parameters;
  std::vector<Statistic> statistics;
  std::uint64_t seed = 0;
  double runtime_seconds = 0.0;
  Verdict verdict = Verdict::Pass;
  std::string error;
  std::optional<SpectralMeasure> spectral;

  void add(Statistic s);
  void finalize();  // verdict = worst statistic verdict
};

// (1/N) sum of exp(i theta . X_k).
Complex empirical_cf(const std::vector<std::vector<double>>& samples,
                     std::span<const double> theta);

// Bounded coordinate-wise nondecreasing test function: per coordinate
// either a hard threshold indicator or a tanh ramp, summed.
struct MonotoneTestFunction {
  enum class Kind { Threshold, SmoothClamp };
  Kind kind = Kind::Threshold;
  std::vector<double> levels;
  double slope = 1.0;

  double operator()(std::span<const double> y) const;
};

MonotoneTestFunction make_monotone_function(int dim, std::uint64_t seed);
MonotoneTestFunction make_monotone_function(
    int dim, std::uint64_t seed,
    const std::vector<std::pair<double, double>>& level_ranges);

// N independent joint draws; replicate k uses the derived stream
// substream_seed(master_seed, k).
std::vector<std::vector<double>> draw_field_samples(const FieldSampler& sampler,
                                                    long n, std::uint64_t seed);

// Deterministic grid of theta vectors: axis vectors, a diagonal, and
// seeded random directions, all within the given radius.
std::vector<std::vector<double>> default_theta_grid(int dim, int count,
                                                    double radius,
                                                    std::uint64_t seed);

// Independence of {X(t_i), i in K} and {X(t_j), j in L} (K, L disjoint,
// covering all of ts): support-disjointness hypothesis on the partition,
// analytic factorization gap over the theta grid, and the empirical
// counterpart from N draws (skipped when n == 0).
ExperimentReport test_independence(
    const FieldSpec& spec, std::span<const Point> ts,
    const std::vector<int>& K, const std::vector<int>& L, long n,
    const std::vector<std::vector<double>>& theta_grid, int level, double eps,
    std::uint64_t seed);

// Association probe: n_pairs random monotone pairs (f,g), covariance
// estimated from n joint draws of X over ts; verdict fails only if some
// estimate drops below -3 standard errors.
ExperimentReport test_association(const FieldSpec& spec,
                                  std::span<const Point> ts, int n_pairs,
                                  long n, int level, double eps,
                                  std::uint64_t seed);

// Negative-association probe over disjoint index sets I and J: the same
// machinery with the one-sided rule flipped (estimates must stay below
// +3 standard errors).
ExperimentReport test_negative_association(
    const FieldSpec& spec, std::span<const Point> ts,
    const std::vector<int>& I, const std::vector<int>& J, int n_pairs, long n,
    int level, double eps, std::uint64_t seed);

// Infinite divisibility: joint_cf(scale_spec(spec,1/n_fold))^n_fold must
// reproduce joint_cf(spec) exactly; empirically, sums of n_fold draws from
// the scaled spec must match the original CF on the grid.
ExperimentReport test_id(const FieldSpec& spec, std::span<const Point> ts,
                         int n_fold, long n,
                         const std::vector<std::vector<double>>& theta_grid,
                         int level, double eps, std::uint64_t seed);

struct ContinuityOptions {
  Point direction = make_point(1.0);  // approach path s = t + r * direction
  std::optional<std::function<double(const Point&)>> envelope;
};

// Stochastic continuity at t: coupled draws (one shared measure sample per
// replicate) estimate p_k = P(|X(s_k) - X(t)| > eps_x) along shrinking
// radii; verdict asks p_k to be nonincreasing within noise and to end
// below 2 standard errors.
ExperimentReport test_stoch_continuity(const FieldSpec& spec, const Point& t,
                                       const std::vector<double>& radii,
                                       double eps_x, long n, int level,
                                       double eps, std::uint64_t seed,
                                       const ContinuityOptions& opts = {});

}  // namespace idfield
