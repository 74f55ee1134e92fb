#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "idfield/common.hpp"
#include "idfield/spectral_field.hpp"

namespace idfield {

// Alpha-stable random field: stability index, local skewness beta(x) in
// [-1,1], the control measure m carried by the partition's base masses,
// and the kernel family.
struct StableSpec {
  double alpha = 1.5;
  std::function<double(const Point&)> beta;
  DomainPartition partition;
  KernelFamily kernels;
};

struct SpectralAtom {
  std::vector<double> s;  // unit vector in R^n
  double weight = 0.0;
};

// Discrete spectral measure Gamma on the unit sphere plus drift.
struct SpectralMeasure {
  std::vector<SpectralAtom> atoms;
  std::vector<double> drift;  // always zero for fields built here
};

// Normalized kernel vector (f_{t_1}(x),...,f_{t_n}(x)) / ||.||; empty when
// every kernel vanishes at x.
std::optional<std::vector<double>> g_map(const Point& x,
                                         std::span<const Point> ts,
                                         const KernelFamily& kernels);

// Discrete spectral measure of (X(t_1),...,X(t_n)): per cell where some
// kernel is nonzero, an atom at g(mid) with weight (1+beta)/2 * m1 and one
// at -g(mid) with weight (1-beta)/2 * m1, where
// m1 = (sum_k f_{t_k}(mid)^2)^{alpha/2} * mass. Zero-weight atoms are
// dropped and coincident atoms merged.
SpectralMeasure spectral_measure(const StableSpec& spec,
                                 std::span<const Point> ts);

// Finite-sum stable characteristic function over the atom set.
Complex stable_cf(const SpectralMeasure& gamma, double alpha,
                  std::span<const double> theta);

enum class Association { Associated, NegativelyAssociated, Both, Neither };

// Masses of the mixed-sign and same-sign sphere regions (pairs i != j).
struct SphereMasses {
  double s_minus = 0.0;
  double s_plus = 0.0;
};

SphereMasses sphere_masses(const SpectralMeasure& gamma);

// Classifies by exact zero tests on Gamma(S_-) and Gamma(S_+).
Association association_classify(const SpectralMeasure& gamma);

struct NullCheckReport {
  double integral = 0.0;  // sum over cells of |f(mid)|^alpha * mass
  bool degenerate = false;
};

// Null-integral degeneracy: integral of |f|^alpha dm == 0 forces the
// stable integral to vanish almost surely.
NullCheckReport null_check(const StableSpec& spec,
                           const std::function<double(const Point&)>& f);

// Local characteristics of an alpha-stable random measure with skewness
// beta and unit scale per unit base mass, for driving the generic ID path.
// alpha == 1 is supported for beta identically zero only.
LocalCharacteristics stable_local_characteristics(
    double alpha, std::function<double(const Point&)> beta);

// The same stable field expressed through the generic machinery.
FieldSpec to_field_spec(const StableSpec& spec);

}  // namespace idfield
