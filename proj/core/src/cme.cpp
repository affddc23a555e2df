#include "hmmc/cme.hpp"

#include <chrono>

#include "hmmc/error.hpp"
#include "parallel.hpp"
#include "stats.hpp"

namespace hmmc {
namespace {

constexpr std::size_t kOmegaBatch = 64;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

UtilityEstimate estimate_utility(const ProblemSpec& spec, const BeliefModel& beliefs,
                                 std::span<const int> true_obs, const AttackVector& attack,
                                 std::size_t samples, const Rng& rng) {
  if (samples == 0) {
    throw InvalidInput("utility estimate needs at least one sample");
  }
  RunningStats stats;
  for (std::size_t n = 0; n < samples; ++n) {
    Rng draw = rng.split(n);
    const OmegaSample omega = sample_omega(beliefs, true_obs.size(), draw);
    stats.add(PreparedOmega(spec, true_obs, omega).evaluate(attack).u);
  }
  return {stats.mean(), stats.standard_error()};
}

std::uint64_t ComponentEstimates::argmax(double w1, double w2) const {
  std::uint64_t best = 0;
  double best_u = utility(0, w1, w2);
  for (std::uint64_t i = 1; i < space.size(); ++i) {
    const double u = utility(i, w1, w2);
    if (u > best_u) {
      best_u = u;
      best = i;
    }
  }
  return best;
}

ComponentEstimates estimate_components(const ProblemSpec& spec, const BeliefModel& beliefs,
                                       std::span<const int> true_obs,
                                       const CmeConfig& config, const Rng& rng) {
  if (config.samples == 0) {
    throw InvalidInput("CME needs at least one sample");
  }
  const std::size_t horizon = true_obs.size();
  spec.validate(beliefs.num_states(), horizon);
  AttackSpace space(horizon, beliefs.num_emissions(), config.cap);
  const auto size = static_cast<std::size_t>(space.size());
  std::vector<RunningStats> stats(size);

  std::vector<OmegaSample> omegas;
  std::vector<PreparedOmega> prepared;
  for (std::size_t b0 = 0; b0 < config.samples; b0 += kOmegaBatch) {
    const std::size_t b1 = std::min(config.samples, b0 + kOmegaBatch);
    omegas.clear();
    prepared.clear();
    omegas.reserve(b1 - b0);
    prepared.reserve(b1 - b0);
    for (std::size_t n = b0; n < b1; ++n) {
      Rng draw = rng.split(n);
      omegas.push_back(sample_omega(beliefs, horizon, draw));
    }
    for (const auto& omega : omegas) prepared.emplace_back(spec, true_obs, omega);
    parallel_for(size, config.threads, [&](std::size_t begin, std::size_t end) {
      AttackVector z;
      for (std::size_t idx = begin; idx < end; ++idx) {
        space.decode(idx, z);
        for (const auto& p : prepared) stats[idx].add(p.f1(z));
      }
    });
  }

  ComponentEstimates out{space, config.samples, std::vector<double>(size),
                         std::vector<double>(size), std::vector<double>(size)};
  AttackVector z;
  for (std::size_t idx = 0; idx < size; ++idx) {
    space.decode(idx, z);
    out.f1_mean[idx] = stats[idx].mean();
    out.f1_se[idx] = stats[idx].standard_error();
    out.f2[idx] = static_cast<double>(cost_f2(z, true_obs));
  }
  return out;
}

SolverResult solve_cme(const ProblemSpec& spec, const BeliefModel& beliefs,
                       std::span<const int> true_obs, const CmeConfig& config,
                       const Rng& rng) {
  const auto start = std::chrono::steady_clock::now();
  const ComponentEstimates est = estimate_components(spec, beliefs, true_obs, config, rng);
  const std::uint64_t best = est.argmax(spec.w1, spec.w2);
  SolverResult out;
  out.solver = "cme";
  out.best_attack = est.space.at(best);
  out.estimated_utility = est.utility(best, spec.w1, spec.w2);
  out.standard_error = spec.w1 * est.f1_se[best];
  out.diagnostics.iterations = config.samples;
  out.diagnostics.samples = config.samples * static_cast<std::size_t>(est.space.size());
  out.diagnostics.trace.push_back(out.estimated_utility);
  out.diagnostics.wall_seconds = seconds_since(start);
  return out;
}

SolverResult solve_rme(const ProblemSpec& spec, const BeliefModel& beliefs,
                       std::span<const int> true_obs, const RmeConfig& config,
                       const Rng& rng) {
  if (config.samples == 0 || config.patience == 0) {
    throw ConfigError("RME needs positive samples and patience");
  }
  if (config.budget.iterations && *config.budget.iterations == 0) {
    throw ConfigError("RME budget must allow at least one candidate");
  }
  const std::size_t horizon = true_obs.size();
  spec.validate(beliefs.num_states(), horizon);
  const auto start = std::chrono::steady_clock::now();
  Rng pick = rng.split(0);
  // Every candidate is scored on the same omega draws.
  const Rng eval = rng.split(1);

  SolverResult out;
  out.solver = "rme";
  out.best_attack = random_attack(horizon, beliefs.num_emissions(), pick);
  UtilityEstimate best =
      estimate_utility(spec, beliefs, true_obs, out.best_attack, config.samples, eval);
  std::size_t candidates = 1;
  std::size_t failures = 0;
  out.diagnostics.trace.push_back(best.mean);
  while (failures < config.patience && !config.budget.exhausted(candidates, start)) {
    AttackVector cand = random_attack(horizon, beliefs.num_emissions(), pick);
    const UtilityEstimate est =
        estimate_utility(spec, beliefs, true_obs, cand, config.samples, eval);
    ++candidates;
    if (est.mean > best.mean) {
      out.best_attack = std::move(cand);
      best = est;
      failures = 0;
    } else {
      ++failures;
    }
    out.diagnostics.trace.push_back(best.mean);
  }
  out.estimated_utility = best.mean;
  out.standard_error = best.standard_error;
  out.diagnostics.iterations = candidates;
  out.diagnostics.samples = candidates * config.samples;
  out.diagnostics.wall_seconds = seconds_since(start);
  return out;
}

}  // namespace hmmc
