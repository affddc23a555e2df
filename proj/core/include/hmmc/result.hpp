#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmmc/attack.hpp"
#include "hmmc/beliefs.hpp"

namespace hmmc {

// Stop after `iterations` units of work or `seconds` of wall time, whichever
// comes first. Only checked between iterations.
struct Budget {
  std::optional<std::size_t> iterations;
  std::optional<double> seconds;

  bool exhausted(std::size_t done, std::chrono::steady_clock::time_point start) const {
    if (iterations && done >= *iterations) return true;
    if (seconds) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      if (elapsed.count() >= *seconds) return true;
    }
    return false;
  }
  bool bounded() const { return iterations.has_value() || seconds.has_value(); }
};

struct SolverDiagnostics {
  std::size_t iterations = 0;
  std::size_t samples = 0;  // utility evaluations, a rough cost measure
  double wall_seconds = 0.0;
  std::vector<double> trace;  // best estimate after each iteration

  // APS
  std::vector<std::vector<double>> coordinate_frequencies;  // |T| x |X|
  std::vector<double> acceptance_rates;                     // A, B, pi, rho
  std::size_t final_copies = 0;

  // R&S
  double final_loss = 0.0;
};

struct SolverResult {
  std::string solver;
  AttackVector best_attack;
  double estimated_utility = 0.0;
  double standard_error = 0.0;
  SolverDiagnostics diagnostics;
};

// Stream id reserved for re-estimating a returned attack's utility, so
// solvers run from the same rng report estimates on the same draws.
inline constexpr std::uint64_t kEvaluationStream = 0x4556414cULL;

struct UtilityEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

// Monte-Carlo mean of u over `samples` independent draws of omega. Draw n
// uses rng.split(n), so the same rng and sample count give a common set of
// draws for every attack.
UtilityEstimate estimate_utility(const ProblemSpec& spec, const BeliefModel& beliefs,
                                 std::span<const int> true_obs, const AttackVector& attack,
                                 std::size_t samples, const Rng& rng);

}  // namespace hmmc
