#include "wkappa/random.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "wkappa/error.hpp"

namespace wkappa {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_pair(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a;
  std::uint64_t h = splitmix64(x);
  x = h ^ (b * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL);
  return splitmix64(x);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t index)
    : seed_(seed), index_(index) {
  std::uint64_t x = mix_pair(seed, index);
  for (auto& word : state_) word = splitmix64(x);
  if (std::all_of(state_.begin(), state_.end(), [](auto w) { return w == 0; })) {
    state_[0] = 1;
  }
}

RandomStream RandomStream::substream(std::uint64_t child) const {
  return RandomStream(mix_pair(seed_, index_), child);
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = std::rotl(state_[3], 45);
  return result;
}

double RandomStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  has_spare_normal_ = true;
  return u * factor;
}

double sample_gamma(double shape, RandomStream& stream) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw Error(ErrorCode::Domain, "sample_gamma: shape must be positive and finite");
  }
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a+1) * U^(1/a)
    const double g = sample_gamma(shape + 1.0, stream);
    return g * std::pow(stream.uniform(), 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze/rejection.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = stream.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = stream.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double sample_beta(double alpha, double beta, RandomStream& stream) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw Error(ErrorCode::Domain, "sample_beta: parameters must be positive");
  }
  const double x = sample_gamma(alpha, stream);
  const double y = sample_gamma(beta, stream);
  return x / (x + y);
}

namespace {

// Inversion by sequential search; expected cost O(n p).
std::int64_t binomial_inversion(std::int64_t n, double p, RandomStream& stream) {
  const double q = 1.0 - p;
  const double s = p / q;
  const double a = static_cast<double>(n + 1) * s;
  for (;;) {
    double r = std::pow(q, static_cast<double>(n));
    double u = stream.uniform();
    std::int64_t x = 0;
    bool ok = true;
    while (u > r) {
      u -= r;
      ++x;
      if (x > n) {
        ok = false;
        break;
      }
      r *= (a / static_cast<double>(x) - s);
    }
    if (ok) return x;
  }
}

// Hormann's BTRD transformed rejection; requires n*p >= 10 and p <= 0.5.
// Acceptance compares against the pmf ratio f(k)/f(mode).
std::int64_t binomial_btrd(std::int64_t n, double p, RandomStream& stream) {
  const double nd = static_cast<double>(n);
  const double q = 1.0 - p;
  const double spq = std::sqrt(nd * p * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = nd * p + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(p / q);
  const auto m = static_cast<std::int64_t>(std::floor((nd + 1.0) * p));
  const double h = std::lgamma(static_cast<double>(m) + 1.0) +
                   std::lgamma(nd - static_cast<double>(m) + 1.0);

  for (;;) {
    double u = stream.uniform() - 0.5;
    double v = stream.uniform();
    const double us = 0.5 - std::fabs(u);
    const double kd = std::floor((2.0 * a / us + b) * u + c);
    if (kd < 0.0 || kd > nd) continue;
    const auto k = static_cast<std::int64_t>(kd);
    if (us >= 0.07 && v <= v_r) return k;
    v = std::log(v * alpha / (a / (us * us) + b));
    const double upper = h - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
                         (kd - static_cast<double>(m)) * lpq;
    if (v <= upper) return k;
  }
}

}  // namespace

std::int64_t sample_binomial(std::int64_t n, double p, RandomStream& stream) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::Domain, "sample_binomial: invalid parameters");
  }
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - sample_binomial(n, 1.0 - p, stream);
  if (static_cast<double>(n) * p < 10.0) return binomial_inversion(n, p, stream);
  return binomial_btrd(n, p, stream);
}

std::vector<std::int64_t> sample_multinomial(std::span<const double> probabilities,
                                             std::int64_t n, RandomStream& stream) {
  if (n < 0) throw Error(ErrorCode::Domain, "sample_multinomial: n must be >= 0");
  if (probabilities.empty()) {
    throw Error(ErrorCode::Domain, "sample_multinomial: empty probability vector");
  }
  double total = 0.0;
  for (double pi : probabilities) {
    if (!(pi >= 0.0) || !std::isfinite(pi)) {
      throw Error(ErrorCode::Domain, "sample_multinomial: probabilities must be >= 0");
    }
    total += pi;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::Domain, "sample_multinomial: probabilities must sum to 1");
  }

  std::vector<std::int64_t> counts(probabilities.size(), 0);
  std::int64_t remaining = n;
  double mass_left = 1.0;
  for (std::size_t k = 0; k + 1 < probabilities.size() && remaining > 0; ++k) {
    const double conditional =
        mass_left > 0.0 ? std::clamp(probabilities[k] / mass_left, 0.0, 1.0) : 0.0;
    counts[k] = sample_binomial(remaining, conditional, stream);
    remaining -= counts[k];
    mass_left -= probabilities[k];
  }
  counts.back() += remaining;
  return counts;
}

}  // namespace wkappa
