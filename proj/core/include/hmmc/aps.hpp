#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "hmmc/result.hpp"

namespace hmmc {

enum class ModeEstimation { Auto, Joint, PerCoordinate };

struct ApsConfig {
  // Sweep n (1-based) uses H_n = g(n + start_index - 1) with
  // g(m) = min(h_max, 1 + floor((m - 1) / h_step)).
  std::size_t start_index = 1;
  std::size_t h_step = 100;
  std::size_t h_max = 16;

  Budget budget{5000, std::nullopt};  // counts sweeps
  // Sweeps discarded before mode estimation; defaults to half of those run.
  std::optional<std::size_t> burn_in;

  // u' = max(u - shift, floor). Without an explicit shift the utility lower
  // bound times (1 + margin) is used.
  std::optional<double> shift;
  double margin = 0.05;
  double floor = 1e-9;

  // Auto picks per-coordinate modes when |T| > 10.
  ModeEstimation mode = ModeEstimation::Auto;

  // Utility re-estimate of the returned attack.
  std::size_t evaluation_samples = 500;

  std::size_t copies_at(std::size_t sweep) const;
  void validate() const;
};

ApsConfig aps_a_config();  // annealing from the first sweep
ApsConfig aps_b_config();  // schedule entered at index 500

// Hooks for inspecting a run. Default implementations do nothing.
class ApsObserver {
 public:
  virtual ~ApsObserver() = default;
  virtual void on_sweep(std::size_t /*sweep*/, std::size_t /*copies*/) {}
  virtual void on_acceptance(std::size_t /*block*/, double /*probability*/) {}
  virtual void on_conditional(std::size_t /*t*/, std::span<const double> /*probs*/) {}
};

// Metropolis-within-Gibbs sampling from the augmented density; see
// ApsConfig for the schedule and transform. Throws ConfigError if a
// transformed utility is not a positive finite number.
SolverResult solve_aps(const ProblemSpec& spec, const BeliefModel& beliefs,
                       std::span<const int> true_obs, const ApsConfig& config,
                       const Rng& rng, ApsObserver* observer = nullptr);

// min{1, proposed / current} for positive utilities.
double metropolis_acceptance(double proposed, double current);

}  // namespace hmmc
