#pragma once

#include <cstdint>

namespace idfield {

// Deterministic stream seed derivation: mixes a master seed with up to two
// stream identifiers (replicate index, cell id, ...). Used everywhere a
// batch of independent streams is needed so that results do not depend on
// evaluation order or worker count.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t id_a,
                             std::uint64_t id_b = 0);

// Counter-seeded xoshiro256++ stream with a few shaped draws on top.
// All samplers in the library consume one of these explicitly; no global
// state is involved.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  static RngStream derive(std::uint64_t master, std::uint64_t id_a,
                          std::uint64_t id_b = 0) {
    return RngStream(substream_seed(master, id_a, id_b));
  }

  std::uint64_t next_u64();

  // Uniform on [0,1) with 53 random bits.
  double next_uniform();
  // Uniform on (0,1], safe as a log argument.
  double next_uniform_pos();
  // Standard normal (Box-Muller, spare value cached).
  double next_normal();
  double next_exponential();
  // Poisson count; inversion for small means, PTRD rejection for large.
  long long next_poisson(double mean);

 private:
  std::uint64_t state_[4];
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace idfield
