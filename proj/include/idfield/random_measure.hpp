#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "idfield/common.hpp"
#include "idfield/levy.hpp"

namespace idfield {

struct Cell {
  int id = 0;
  Point mid{};
  double mass = 0.0;  // base-measure mass of the cell
};

// Finite partition of a compact box in R^m (m <= 3) into grid cells with
// midpoint representatives and base-measure masses. A dyadic refinement
// ladder stands in for the exhausting sequence of the underlying domain.
class DomainPartition {
 public:
  using Density = std::function<double(const Point&)>;

  // Uniform grid; cell mass = density(midpoint) * cell volume, density
  // defaulting to 1 (Lebesgue).
  static DomainPartition uniform_grid(const Box& box,
                                      const std::array<int, 3>& resolution,
                                      Density density = {});

  // Dyadic refinement: level 1 is this grid, each level doubles the
  // per-axis resolution.
  DomainPartition refined(int level) const;

  const std::vector<Cell>& cells() const { return cells_; }
  const Box& box() const { return box_; }
  int dim() const { return box_.dim; }
  const std::array<int, 3>& resolution() const { return resolution_; }
  double total_mass() const;

 private:
  Box box_;
  std::array<int, 3> resolution_{1, 1, 1};
  Density density_;
  std::vector<Cell> cells_;
};

// Densities of an ID random measure with respect to the base measure:
// drift a, Gaussian variance sigma2 >= 0, and the local jump measure rho.
struct LocalCharacteristics {
  std::function<double(const Point&)> a;
  std::function<double(const Point&)> sigma2;
  std::function<LevyMeasure(const Point&)> rho;

  static LocalCharacteristics constant(double a0, double sigma2_0,
                                       LevyMeasure rho0 = LevyMeasure::none());
};

// Canonical control-measure mass of one cell:
// (|a| + sigma2 + integral of min(1,z^2) d rho)(midpoint) * cell mass.
double control_mass(const Cell& cell, const LocalCharacteristics& chars);

// Levy triplet of the measure restricted to one cell (midpoint rule).
LevyTriplet cell_triplet(const Cell& cell, const LocalCharacteristics& chars);

// Prepared sampler for the whole partition; every cell gets an independent
// stream derived from (seed, cell id), so draws are order- and
// thread-count-independent. The optional gamma scales the control measure.
class MeasureSampler {
 public:
  MeasureSampler(const DomainPartition& partition,
                 const LocalCharacteristics& chars, double eps,
                 double gamma = 1.0);

  void draw(std::uint64_t seed, std::vector<double>& out) const;
  std::vector<double> draw(std::uint64_t seed) const;
  std::size_t n_cells() const { return samplers_.size(); }

 private:
  std::vector<IdSampler> samplers_;
};

// One joint draw (Lambda(B_1), ..., Lambda(B_n)) of the independently
// scattered measure over the partition.
std::vector<double> sample_measure(const DomainPartition& partition,
                                   const LocalCharacteristics& chars,
                                   double eps, std::uint64_t seed);

}  // namespace idfield
