#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hmmc/attack_space.hpp"
#include "hmmc/result.hpp"

namespace hmmc {

struct CmeConfig {
  std::size_t samples = 1000;  // N
  double cap = kDefaultEnumerationCap;
  std::size_t threads = 1;
};

// Sample means of f1 for every attack over one common set of omega draws,
// plus the deterministic f2. Because u = w1*f1 - w2*f2, the same table ranks
// attacks for any pair of weights.
struct ComponentEstimates {
  AttackSpace space;
  std::size_t samples = 0;
  std::vector<double> f1_mean;
  std::vector<double> f1_se;
  std::vector<double> f2;

  double utility(std::uint64_t index, double w1, double w2) const {
    return w1 * f1_mean[index] - w2 * f2[index];
  }
  // Highest mean utility; ties go to the lowest index.
  std::uint64_t argmax(double w1, double w2) const;
};

// Sample n uses rng.split(n); results do not depend on the thread count.
ComponentEstimates estimate_components(const ProblemSpec& spec, const BeliefModel& beliefs,
                                       std::span<const int> true_obs,
                                       const CmeConfig& config, const Rng& rng);

// Throws CapacityError when |X|^|T| exceeds config.cap.
SolverResult solve_cme(const ProblemSpec& spec, const BeliefModel& beliefs,
                       std::span<const int> true_obs, const CmeConfig& config,
                       const Rng& rng);

struct RmeConfig {
  std::size_t samples = 100;  // omega draws per candidate
  std::size_t patience = 1;   // consecutive failures before stopping
  Budget budget;              // counts candidates, including the first
};

SolverResult solve_rme(const ProblemSpec& spec, const BeliefModel& beliefs,
                       std::span<const int> true_obs, const RmeConfig& config,
                       const Rng& rng);

}  // namespace hmmc
