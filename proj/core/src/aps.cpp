#include "hmmc/aps.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <string>

#include "hmmc/attack_space.hpp"
#include "hmmc/error.hpp"
#include "hmmc/greedy.hpp"

namespace hmmc {
namespace {

enum Block : std::size_t { kBlockA = 0, kBlockB = 1, kBlockPi = 2, kBlockRho = 3 };

struct Copy {
  OmegaSample omega;
  std::vector<double> baseline;
  double u = 0.0;  // transformed utility at the current attack
};

}  // namespace

std::size_t ApsConfig::copies_at(std::size_t sweep) const {
  const std::size_t m = sweep + start_index - 1;
  return std::min(h_max, 1 + (m - 1) / h_step);
}

void ApsConfig::validate() const {
  if (start_index == 0 || h_step == 0 || h_max == 0) {
    throw ConfigError("APS schedule parameters must be positive");
  }
  if (!(floor > 0.0)) {
    throw ConfigError("APS utility floor must be positive");
  }
  if (!(margin >= 0.0)) {
    throw ConfigError("APS shift margin must be nonnegative");
  }
  if (!budget.bounded()) {
    throw ConfigError("APS needs a sweep or time budget");
  }
  if (budget.iterations && *budget.iterations == 0) {
    throw ConfigError("APS needs at least one sweep");
  }
  if (burn_in && budget.iterations && *burn_in >= *budget.iterations) {
    throw ConfigError("APS burn-in must be shorter than the run");
  }
  if (evaluation_samples == 0) {
    throw ConfigError("APS evaluation needs at least one sample");
  }
}

ApsConfig aps_a_config() { return ApsConfig{}; }

ApsConfig aps_b_config() {
  ApsConfig c;
  c.start_index = 500;
  return c;
}

double metropolis_acceptance(double proposed, double current) {
  if (!(current > 0.0)) return 1.0;
  return std::min(1.0, proposed / current);
}

SolverResult solve_aps(const ProblemSpec& spec, const BeliefModel& beliefs,
                       std::span<const int> true_obs, const ApsConfig& config,
                       const Rng& rng, ApsObserver* observer) {
  config.validate();
  const std::size_t horizon = true_obs.size();
  const std::size_t emissions = beliefs.num_emissions();
  spec.validate(beliefs.num_states(), horizon);
  const auto start = std::chrono::steady_clock::now();
  const double shift =
      config.shift.value_or(utility_lower_bound(spec, horizon) * (1.0 + config.margin));

  Rng chain = rng.split(0);
  std::size_t evaluations = 0;
  std::size_t sweep = 0;

  auto transformed = [&](const OmegaSample& omega, const std::vector<double>& baseline,
                         const AttackVector& z, std::size_t h) {
    thread_local ObsSequence y;
    y = perturb(z, true_obs, omega.rho);
    const double f1 = f1_value(spec, omega.params, y, baseline);
    const double u = spec.w1 * f1 - spec.w2 * static_cast<double>(cost_f2(z, true_obs));
    const double v = std::max(u - shift, config.floor);
    ++evaluations;
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw ConfigError("transformed utility is not positive and finite at sweep " +
                        std::to_string(sweep) + ", copy " + std::to_string(h + 1));
    }
    return v;
  };
  auto raw = [&](double transformed_u) { return transformed_u + shift; };

  AttackVector z = random_attack(horizon, emissions, chain);
  std::vector<Copy> copies;
  auto add_copy = [&]() {
    Copy c{sample_omega(beliefs, horizon, chain), {}, 0.0};
    c.baseline = disruption_baseline(spec, c.omega.params, true_obs);
    c.u = transformed(c.omega, c.baseline, z, copies.size());
    copies.push_back(std::move(c));
  };

  std::vector<AttackVector> history;
  std::vector<std::size_t> accepted(4, 0);
  std::vector<std::size_t> proposed(4, 0);
  std::vector<double> values;
  std::vector<double> logits(emissions);
  SolverResult out;
  out.solver = config.start_index > 1 ? "aps-b" : "aps-a";

  while (sweep == 0 || !config.budget.exhausted(sweep, start)) {
    ++sweep;
    const std::size_t h_target = config.copies_at(sweep);
    while (copies.size() < h_target) add_copy();
    if (observer) observer->on_sweep(sweep, copies.size());

    // Metropolis refresh of each block, proposing from the prior.
    for (std::size_t h = 0; h < copies.size(); ++h) {
      Copy& c = copies[h];
      for (std::size_t block = 0; block < 4; ++block) {
        OmegaSample cand{c.omega.params, c.omega.rho};
        const HmmParams& p = c.omega.params;
        switch (block) {
          case kBlockA:
            cand.params = HmmParams::unchecked(beliefs.sample_transition(chain), p.emission(),
                                               p.initial());
            break;
          case kBlockB:
            cand.params = HmmParams::unchecked(p.transition(), beliefs.sample_emission(chain),
                                               p.initial());
            break;
          case kBlockPi:
            cand.params = HmmParams::unchecked(p.transition(), p.emission(),
                                               beliefs.sample_initial(chain));
            break;
          default:
            cand.rho = beliefs.sample_rho(horizon, chain);
            break;
        }
        std::vector<double> cand_base =
            block == kBlockRho ? c.baseline
                               : disruption_baseline(spec, cand.params, true_obs);
        const double u_new = transformed(cand, cand_base, z, h);
        const double accept = metropolis_acceptance(u_new, c.u);
        if (observer) observer->on_acceptance(block, accept);
        ++proposed[block];
        if (chain.uniform() < accept) {
          ++accepted[block];
          c.omega = std::move(cand);
          c.baseline = std::move(cand_base);
          c.u = u_new;
        }
      }
    }

    // Gibbs step for each coordinate of the attack.
    values.assign(copies.size() * emissions, 0.0);
    for (std::size_t t = 0; t < horizon; ++t) {
      for (std::size_t k = 0; k < emissions; ++k) {
        z.choices[t] = static_cast<int>(k);
        double acc = 0.0;
        for (std::size_t h = 0; h < copies.size(); ++h) {
          const double v = transformed(copies[h].omega, copies[h].baseline, z, h);
          values[h * emissions + k] = v;
          acc += std::log(v);
        }
        logits[k] = acc;
      }
      const auto probs = softmax(logits);
      if (observer) observer->on_conditional(t, probs);
      const auto k = chain.categorical(probs);
      z.choices[t] = static_cast<int>(k);
      for (std::size_t h = 0; h < copies.size(); ++h) copies[h].u = values[h * emissions + k];
    }

    history.push_back(z);
    double mean_u = 0.0;
    for (const auto& c : copies) mean_u += raw(c.u);
    out.diagnostics.trace.push_back(mean_u / static_cast<double>(copies.size()));
  }

  std::size_t burn = config.burn_in.value_or(history.size() / 2);
  if (burn >= history.size()) burn = history.size() / 2;

  std::vector<std::vector<double>> freq(horizon, std::vector<double>(emissions, 0.0));
  std::map<AttackVector, std::size_t> joint;
  for (std::size_t n = burn; n < history.size(); ++n) {
    for (std::size_t t = 0; t < horizon; ++t) {
      freq[t][static_cast<std::size_t>(history[n].choices[t])] += 1.0;
    }
    ++joint[history[n]];
  }
  const double kept = static_cast<double>(history.size() - burn);
  const bool per_coordinate =
      config.mode == ModeEstimation::PerCoordinate ||
      (config.mode == ModeEstimation::Auto && horizon > 10);
  if (per_coordinate) {
    out.best_attack.choices.assign(horizon, 0);
    for (std::size_t t = 0; t < horizon; ++t) {
      const auto it = std::max_element(freq[t].begin(), freq[t].end());
      out.best_attack.choices[t] = static_cast<int>(it - freq[t].begin());
    }
  } else {
    std::size_t best = 0;
    for (const auto& [attack, count] : joint) {
      if (count > best) {
        best = count;
        out.best_attack = attack;
      }
    }
  }
  for (auto& row : freq) {
    for (double& v : row) v /= kept;
  }

  const UtilityEstimate est = estimate_utility(spec, beliefs, true_obs, out.best_attack,
                                               config.evaluation_samples,
                                               rng.split(kEvaluationStream));
  out.estimated_utility = est.mean;
  out.standard_error = est.standard_error;
  out.diagnostics.iterations = sweep;
  out.diagnostics.samples = evaluations;
  out.diagnostics.coordinate_frequencies = std::move(freq);
  out.diagnostics.acceptance_rates.resize(4);
  for (std::size_t b = 0; b < 4; ++b) {
    out.diagnostics.acceptance_rates[b] =
        proposed[b] == 0 ? 0.0
                         : static_cast<double>(accepted[b]) / static_cast<double>(proposed[b]);
  }
  out.diagnostics.final_copies = copies.size();
  out.diagnostics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace hmmc
