#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace hmmc {

// Counter-based generator. Each draw hashes (key, counter) with the
// SplitMix64 finalizer, so a stream is fully described by its key and the
// number of draws taken from it. `split(id)` derives a child key from the
// parent key alone: the child stream does not depend on how many values the
// parent has produced, which is what makes parallel workers reproducible.
//
// Satisfies UniformRandomBitGenerator, but the library only uses the
// distribution helpers below so results do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  Rng split(std::uint64_t stream_id) const;

  result_type operator()() { return next(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  std::uint64_t next();

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  // Uniform on (0, 1); never returns 0, safe for log().
  double uniform_open();
  double normal();
  // Gamma(shape, 1). Returns log of the draw; shapes well below 1 produce
  // draws that underflow a double, the log form does not.
  double log_gamma_draw(double shape);
  bool bernoulli(double p);
  // Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);
  // Index drawn proportionally to the (nonnegative) weights.
  std::size_t categorical(std::span<const double> probabilities);
  // Dirichlet(alpha) via normalized Gamma draws, normalized in log space.
  std::vector<double> dirichlet(std::span<const double> alpha);

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// SplitMix64 finalizer; exposed for hashing seeds and configs.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace hmmc
