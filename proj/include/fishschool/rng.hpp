#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace fishschool {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Pure: the output depends only on (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Independent random streams derived from one seed are separated by domain,
/// so drawing initial conditions never shifts the noise sequence.
enum class StreamDomain : std::uint32_t {
  noise = 1,
  initial_positions = 2,
};

/// A sequential view of one Philox stream. Copyable; copies continue the same
/// sequence independently.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, StreamDomain domain, std::uint64_t index);

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::uint64_t next_u64();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_u64_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// One noise stream per particle.
std::vector<NoiseStream> particle_streams(std::uint64_t seed, std::size_t n_particles);

/// d independent N(0, sigma_i^2 dt) samples; all zeros (and no draws) when
/// sigma_i == 0.
std::vector<double> brownian_increment(NoiseStream& rng, std::size_t d, double dt,
                                       double sigma_i);

}  // namespace fishschool
