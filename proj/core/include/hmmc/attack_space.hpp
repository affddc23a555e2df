#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "hmmc/attack.hpp"

namespace hmmc {

inline constexpr double kDefaultEnumerationCap = 1e6;

// The |X|^|T| attack vectors indexed in mixed radix with choices[0] as the
// most significant digit, so index order is lexicographic order.
class AttackSpace {
 public:
  // Throws CapacityError when |X|^|T| exceeds `cap`.
  AttackSpace(std::size_t horizon, std::size_t emissions,
              double cap = kDefaultEnumerationCap);

  // |X|^|T| as a double; never overflows.
  static double count(std::size_t horizon, std::size_t emissions);

  std::uint64_t size() const noexcept { return size_; }
  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t emissions() const noexcept { return emissions_; }

  AttackVector at(std::uint64_t index) const;
  void decode(std::uint64_t index, AttackVector& out) const;
  std::uint64_t index_of(const AttackVector& attack) const;

 private:
  std::size_t horizon_;
  std::size_t emissions_;
  std::uint64_t size_;
};

// Number of attacks differing from a fixed sequence in exactly g positions:
// C(|T|, g) * (|X| - 1)^g.
double group_size(std::size_t horizon, std::size_t emissions, std::size_t g);

// Uniformly random attack.
AttackVector random_attack(std::size_t horizon, std::size_t emissions, Rng& rng);

}  // namespace hmmc
