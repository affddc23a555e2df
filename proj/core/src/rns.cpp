#include "hmmc/rns.hpp"

#include <array>
#include <chrono>
#include <deque>
#include <numeric>
#include <string>

#include "hmmc/attack_space.hpp"
#include "hmmc/error.hpp"
#include "hmmc/mlp.hpp"

namespace hmmc {
namespace {

struct PresetRow {
  std::size_t hidden1;
  std::size_t hidden2;
  std::size_t iterations;
  double learning_rate;
  double epsilon;
};

constexpr std::array<PresetRow, 6> kPresetsA{{
    {16, 8, 100, 0.005, 0.05},
    {32, 16, 10, 0.005, 0.05},
    {16, 8, 100, 0.1, 0.005},
    {32, 16, 10, 0.1, 0.005},
    {64, 64, 100, 0.005, 0.05},
    {64, 64, 100, 0.1, 0.05},
}};

constexpr std::array<PresetRow, 6> kPresetsB{{
    {16, 8, 50, 0.005, 0.05},
    {32, 16, 10, 0.005, 0.05},
    {16, 8, 50, 0.1, 0.005},
    {32, 16, 10, 0.1, 0.005},
    {64, 64, 100, 0.005, 0.05},
    {64, 64, 100, 0.1, 0.05},
}};

constexpr std::size_t kLossWindow = 100;

}  // namespace

void RnsConfig::validate() const {
  if (hidden1 == 0 || hidden2 == 0) {
    throw ConfigError("network widths must be at least 1");
  }
  if (!(learning_rate > 0.0)) {
    throw ConfigError("learning rate must be positive");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ConfigError("epsilon must lie in [0, 1]");
  }
  if (greedy_iterations == 0) {
    throw ConfigError("greedy search needs at least one iteration");
  }
  if (!(mcts_c > 0.0) || !(sa_decay > 0.0)) {
    throw ConfigError("exploration constant and annealing decay must be positive");
  }
  if (!budget.bounded()) {
    throw ConfigError("R&S needs an experiment or time budget");
  }
  if (budget.iterations && *budget.iterations == 0) {
    throw ConfigError("R&S needs at least one experiment");
  }
  if (evaluation_samples == 0) {
    throw ConfigError("R&S evaluation needs at least one sample");
  }
}

RnsConfig hyperparameter_presets(RnsVariant variant, int combination) {
  if (combination < 1 || combination > 6) {
    throw InvalidInput("hyperparameter combination " + std::to_string(combination) +
                       " outside 1..6");
  }
  const PresetRow& row =
      (variant == RnsVariant::A ? kPresetsA : kPresetsB)[static_cast<std::size_t>(combination - 1)];
  RnsConfig c;
  c.hidden1 = row.hidden1;
  c.hidden2 = row.hidden2;
  c.greedy_iterations = row.iterations;
  c.learning_rate = row.learning_rate;
  c.epsilon = row.epsilon;
  c.greedy = variant == RnsVariant::A ? GreedyKind::Mcts : GreedyKind::Sa;
  return c;
}

SolverResult solve_rns(const ProblemSpec& spec, const BeliefModel& beliefs,
                       std::span<const int> true_obs, const RnsConfig& config,
                       const Rng& rng) {
  config.validate();
  const std::size_t horizon = true_obs.size();
  const std::size_t emissions = beliefs.num_emissions();
  spec.validate(beliefs.num_states(), horizon);
  const auto start = std::chrono::steady_clock::now();

  Rng init = rng.split(0);
  Rng policy = rng.split(1);
  Rng search = rng.split(2);
  Rng world = rng.split(3);
  Mlp net(horizon * emissions, config.hidden1, config.hidden2, config.learning_rate, init);
  const AttackScorer score = [&net, emissions](const AttackVector& z) {
    return net.predict(z, emissions);
  };

  // SA restarts from the previous greedy answer.
  AttackVector incumbent = random_attack(horizon, emissions, search);
  auto greedy = [&]() {
    if (config.greedy == GreedyKind::Mcts) {
      incumbent = greedy_mcts(score, horizon, emissions, config.greedy_iterations,
                              config.mcts_c, search);
    } else {
      incumbent = greedy_sa(score, horizon, emissions, config.greedy_iterations,
                            config.sa_decay, search, &incumbent);
    }
    return incumbent;
  };

  SolverResult out;
  out.solver = config.greedy == GreedyKind::Mcts ? "rns-a" : "rns-b";
  std::deque<double> losses;
  std::size_t experiments = 0;
  while (experiments == 0 || !config.budget.exhausted(experiments, start)) {
    const AttackVector z = policy.bernoulli(config.epsilon)
                               ? random_attack(horizon, emissions, policy)
                               : greedy();
    const OmegaSample omega = sample_omega(beliefs, horizon, world);
    const double u = PreparedOmega(spec, true_obs, omega).evaluate(z).u;
    out.diagnostics.trace.push_back(net.predict(z, emissions));
    losses.push_back(net.train_step(z, emissions, u));
    if (losses.size() > kLossWindow) losses.pop_front();
    ++experiments;
  }

  out.best_attack = greedy();
  const UtilityEstimate est = estimate_utility(spec, beliefs, true_obs, out.best_attack,
                                               config.evaluation_samples,
                                               rng.split(kEvaluationStream));
  out.estimated_utility = est.mean;
  out.standard_error = est.standard_error;
  out.diagnostics.iterations = experiments;
  out.diagnostics.samples = experiments;
  out.diagnostics.final_loss =
      std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(losses.size());
  out.diagnostics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace hmmc
