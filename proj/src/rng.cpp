#include "fishschool/rng.hpp"

#include <cmath>
#include <numbers>

#include "fishschool/params.hpp"

namespace fishschool {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

inline std::array<std::uint32_t, 4> philox_round(const std::array<std::uint32_t, 4>& c,
                                                 const std::array<std::uint32_t, 2>& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, c[0], hi0, lo0);
  mulhilo(kMul1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    counter = philox_round(counter, key);
  }
  return counter;
}

NoiseStream::NoiseStream(std::uint64_t seed, StreamDomain domain, std::uint64_t index)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_((static_cast<std::uint64_t>(domain) << 48) ^ index) {}

std::uint64_t NoiseStream::next_u64() {
  if (buffered_u64_ == 0) {
    buffer_ = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                          static_cast<std::uint32_t>(stream_),
                          static_cast<std::uint32_t>(stream_ >> 32)},
                         key_);
    ++block_;
    buffered_u64_ = 2;
  }
  const int slot = 2 - buffered_u64_;
  --buffered_u64_;
  return (static_cast<std::uint64_t>(buffer_[2 * slot]) << 32) | buffer_[2 * slot + 1];
}

double NoiseStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double NoiseStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::vector<NoiseStream> particle_streams(std::uint64_t seed, std::size_t n_particles) {
  std::vector<NoiseStream> streams;
  streams.reserve(n_particles);
  for (std::size_t i = 0; i < n_particles; ++i) {
    streams.emplace_back(seed, StreamDomain::noise, i);
  }
  return streams;
}

std::vector<double> brownian_increment(NoiseStream& rng, std::size_t d, double dt,
                                       double sigma_i) {
  if (!(dt > 0.0)) throw InvalidParameter("brownian_increment requires dt > 0");
  if (!(sigma_i >= 0.0)) throw InvalidParameter("brownian_increment requires sigma >= 0");
  std::vector<double> out(d, 0.0);
  if (sigma_i == 0.0) return out;
  const double scale = sigma_i * std::sqrt(dt);
  for (auto& w : out) w = scale * rng.normal();
  return out;
}

}  // namespace fishschool
