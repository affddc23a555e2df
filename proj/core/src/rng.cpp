#include "hmmc/rng.hpp"

#include <algorithm>
#include <cmath>

#include "hmmc/error.hpp"

namespace hmmc {
namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kStreamSalt = 0xd1b54a32d192ed03ULL;

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed + kGamma) ^ mix64(stream * kStreamSalt + 1))) {}

Rng Rng::split(std::uint64_t stream_id) const {
  Rng child;
  child.key_ = mix64(key_ ^ mix64((stream_id + 1) * kStreamSalt));
  child.counter_ = 0;
  return child;
}

std::uint64_t Rng::next() {
  // SplitMix64 over the counter, offset by the stream key.
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double Rng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  // Marsaglia polar method, second variate discarded to keep draws stateless.
  while (true) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

double Rng::log_gamma_draw(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw InvalidInput("gamma shape must be positive and finite");
  }
  if (shape < 1.0) {
    // G(a) = G(a + 1) * U^(1/a)
    const double boosted = log_gamma_draw(shape + 1.0);
    return boosted + std::log(uniform_open()) / shape;
  }
  // Marsaglia & Tsang.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) {
      return std::log(d * v);
    }
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return std::log(d * v);
    }
  }
}

bool Rng::bernoulli(double p) {
  if (p >= 1.0) {
    return true;
  }
  if (p <= 0.0) {
    return false;
  }
  return uniform() < p;
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) {
    throw InvalidInput("uniform_index requires n > 0");
  }
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = max() - (max() % bound) - 1;
  std::uint64_t v = next();
  while (v > limit) {
    v = next();
  }
  return static_cast<std::size_t>(v % bound);
}

std::size_t Rng::categorical(std::span<const double> probabilities) {
  double total = 0.0;
  for (const double p : probabilities) {
    total += p;
  }
  if (!(total > 0.0)) {
    throw InvalidInput("categorical weights must have a positive sum");
  }
  const double target = uniform() * total;
  double running = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) {
      continue;
    }
    last_positive = i;
    running += probabilities[i];
    if (target < running) {
      return i;
    }
  }
  return last_positive;
}

std::vector<double> Rng::dirichlet(std::span<const double> alpha) {
  std::vector<double> out(alpha.size());
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    out[i] = log_gamma_draw(alpha[i]);
    peak = std::max(peak, out[i]);
  }
  double total = 0.0;
  for (double& v : out) {
    v = std::exp(v - peak);
    total += v;
  }
  for (double& v : out) {
    v /= total;
  }
  return out;
}

}  // namespace hmmc
