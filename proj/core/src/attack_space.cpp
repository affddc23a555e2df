#include "hmmc/attack_space.hpp"

#include <cmath>
#include <string>

#include "hmmc/error.hpp"

namespace hmmc {

double AttackSpace::count(std::size_t horizon, std::size_t emissions) {
  return std::pow(static_cast<double>(emissions), static_cast<double>(horizon));
}

AttackSpace::AttackSpace(std::size_t horizon, std::size_t emissions, double cap)
    : horizon_(horizon), emissions_(emissions), size_(0) {
  if (horizon == 0 || emissions == 0) {
    throw InvalidInput("attack space needs positive sizes");
  }
  const double n = count(horizon, emissions);
  if (n > cap || n > 9e15) {
    throw CapacityError("attack space has " + std::to_string(emissions) + "^" +
                        std::to_string(horizon) +
                        " elements, above the enumeration cap; use rme, aps or rns");
  }
  size_ = static_cast<std::uint64_t>(std::llround(n));
}

void AttackSpace::decode(std::uint64_t index, AttackVector& out) const {
  if (index >= size_) {
    throw InvalidInput("attack index out of range");
  }
  out.choices.resize(horizon_);
  for (std::size_t t = horizon_; t-- > 0;) {
    out.choices[t] = static_cast<int>(index % emissions_);
    index /= emissions_;
  }
}

AttackVector AttackSpace::at(std::uint64_t index) const {
  AttackVector out;
  decode(index, out);
  return out;
}

std::uint64_t AttackSpace::index_of(const AttackVector& attack) const {
  if (attack.size() != horizon_) {
    throw InvalidInput("attack length differs from the attack space horizon");
  }
  std::uint64_t index = 0;
  for (const int k : attack.choices) {
    if (k < 0 || static_cast<std::size_t>(k) >= emissions_) {
      throw InvalidInput("attack choice outside the emission alphabet");
    }
    index = index * emissions_ + static_cast<std::uint64_t>(k);
  }
  return index;
}

double group_size(std::size_t horizon, std::size_t emissions, std::size_t g) {
  if (g > horizon) return 0.0;
  double binom = 1.0;
  for (std::size_t j = 1; j <= g; ++j) {
    binom = binom * static_cast<double>(horizon - g + j) / static_cast<double>(j);
  }
  return std::round(binom) *
         std::pow(static_cast<double>(emissions - 1), static_cast<double>(g));
}

AttackVector random_attack(std::size_t horizon, std::size_t emissions, Rng& rng) {
  AttackVector out;
  out.choices.resize(horizon);
  for (auto& k : out.choices) k = static_cast<int>(rng.uniform_index(emissions));
  return out;
}

}  // namespace hmmc
