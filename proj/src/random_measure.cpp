#include "idfield/random_measure.hpp"

#include <cmath>
#include <stdexcept>

namespace idfield {

DomainPartition DomainPartition::uniform_grid(
    const Box& box, const std::array<int, 3>& resolution, Density density) {
  if (box.dim < 1 || box.dim > 3)
    throw std::invalid_argument("domain dimension must be 1, 2 or 3");
  for (int i = 0; i < box.dim; ++i) {
    if (!(box.hi[i] > box.lo[i]))
      throw std::invalid_argument("box must have positive extent per axis");
    if (resolution[i] < 1)
      throw std::invalid_argument("grid resolution must be >= 1 per axis");
  }

  DomainPartition p;
  p.box_ = box;
  p.resolution_ = {1, 1, 1};
  for (int i = 0; i < box.dim; ++i) p.resolution_[i] = resolution[i];
  p.density_ = std::move(density);

  std::array<double, 3> step{1.0, 1.0, 1.0};
  double volume = 1.0;
  for (int i = 0; i < box.dim; ++i) {
    step[i] = (box.hi[i] - box.lo[i]) / p.resolution_[i];
    volume *= step[i];
  }
  const int nx = p.resolution_[0];
  const int ny = box.dim > 1 ? p.resolution_[1] : 1;
  const int nz = box.dim > 2 ? p.resolution_[2] : 1;
  p.cells_.reserve(static_cast<std::size_t>(nx) * ny * nz);
  int id = 0;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        Point mid{box.lo[0] + (i + 0.5) * step[0],
                  box.dim > 1 ? box.lo[1] + (j + 0.5) * step[1] : 0.0,
                  box.dim > 2 ? box.lo[2] + (k + 0.5) * step[2] : 0.0};
        const double dens = p.density_ ? p.density_(mid) : 1.0;
        if (!(dens >= 0.0) || !std::isfinite(dens))
          throw std::invalid_argument("base-measure density must be finite and >= 0");
        p.cells_.push_back(Cell{id++, mid, dens * volume});
      }
    }
  }
  return p;
}

DomainPartition DomainPartition::refined(int level) const {
  if (level < 1) throw std::invalid_argument("refinement level must be >= 1");
  if (level == 1) return *this;
  const int factor = 1 << (level - 1);
  std::array<int, 3> res = resolution_;
  for (int i = 0; i < box_.dim; ++i) {
    if (static_cast<long long>(res[i]) * factor > (1 << 22))
      throw std::invalid_argument("refined grid would be unreasonably large");
    res[i] *= factor;
  }
  return uniform_grid(box_, res, density_);
}

double DomainPartition::total_mass() const {
  double m = 0.0;
  for (const Cell& c : cells_) m += c.mass;
  return m;
}

LocalCharacteristics LocalCharacteristics::constant(double a0, double sigma2_0,
                                                    LevyMeasure rho0) {
  if (!(sigma2_0 >= 0.0))
    throw std::invalid_argument("sigma2 must be >= 0");
  LocalCharacteristics c;
  c.a = [a0](const Point&) { return a0; };
  c.sigma2 = [sigma2_0](const Point&) { return sigma2_0; };
  c.rho = [rho0](const Point&) { return rho0; };
  return c;
}

namespace {

double sigma2_at(const LocalCharacteristics& chars, const Point& x) {
  const double v = chars.sigma2 ? chars.sigma2(x) : 0.0;
  if (!(v >= 0.0))
    throw std::invalid_argument("sigma2 density must be >= 0");
  return v;
}

}  // namespace

double control_mass(const Cell& cell, const LocalCharacteristics& chars) {
  if (cell.mass == 0.0) return 0.0;
  const double a = chars.a ? chars.a(cell.mid) : 0.0;
  const double s2 = sigma2_at(chars, cell.mid);
  const LevyMeasure rho =
      chars.rho ? chars.rho(cell.mid) : LevyMeasure::none();
  return (std::fabs(a) + s2 + truncated_second_moment(rho)) * cell.mass;
}

LevyTriplet cell_triplet(const Cell& cell, const LocalCharacteristics& chars) {
  if (cell.mass == 0.0) return LevyTriplet{};
  const double a = chars.a ? chars.a(cell.mid) : 0.0;
  const double s2 = sigma2_at(chars, cell.mid);
  LevyMeasure rho = chars.rho ? chars.rho(cell.mid) : LevyMeasure::none();
  return LevyTriplet{a * cell.mass, s2 * cell.mass, rho.scaled(cell.mass)};
}

MeasureSampler::MeasureSampler(const DomainPartition& partition,
                               const LocalCharacteristics& chars, double eps,
                               double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  samplers_.reserve(partition.cells().size());
  for (const Cell& cell : partition.cells())
    samplers_.emplace_back(cell_triplet(cell, chars).scaled(gamma), eps);
}

void MeasureSampler::draw(std::uint64_t seed, std::vector<double>& out) const {
  out.resize(samplers_.size());
  for (std::size_t j = 0; j < samplers_.size(); ++j) {
    RngStream stream = RngStream::derive(seed, static_cast<std::uint64_t>(j));
    out[j] = samplers_[j].draw(stream);
  }
}

std::vector<double> MeasureSampler::draw(std::uint64_t seed) const {
  std::vector<double> out;
  draw(seed, out);
  return out;
}

std::vector<double> sample_measure(const DomainPartition& partition,
                                   const LocalCharacteristics& chars,
                                   double eps, std::uint64_t seed) {
  return MeasureSampler(partition, chars, eps).draw(seed);
}

}  // namespace idfield
