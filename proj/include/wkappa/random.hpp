#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace wkappa {

// Deterministic random stream identified by (seed, index).
//
// The engine is xoshiro256** whose state is expanded from the pair with
// splitmix64, so distinct pairs give independent, platform-stable sequences.
// Streams are single-owner values; concurrent users need distinct streams.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t index() const noexcept { return index_; }

  // Child stream keyed by `child`; independent of this stream's position.
  RandomStream substream(std::uint64_t child) const;

  std::uint64_t next_u64();
  // Uniform on the open interval (0,1) with 53-bit resolution.
  double uniform();
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::array<std::uint64_t, 4> state_{};
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

double sample_gamma(double shape, RandomStream& stream);

// Beta(alpha, beta) via two gamma draws.
double sample_beta(double alpha, double beta, RandomStream& stream);

std::int64_t sample_binomial(std::int64_t n, double p, RandomStream& stream);

// Sequential conditional binomials; cell counts sum to n.
std::vector<std::int64_t> sample_multinomial(std::span<const double> probabilities,
                                             std::int64_t n, RandomStream& stream);

}  // namespace wkappa
