#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "hmmc/greedy.hpp"
#include "hmmc/result.hpp"

namespace hmmc {

enum class GreedyKind { Mcts, Sa };
enum class RnsVariant { A, B };  // A: MCTS greedy step, B: simulated annealing

struct RnsConfig {
  std::size_t hidden1 = 16;
  std::size_t hidden2 = 8;
  double learning_rate = 0.005;
  double epsilon = 0.05;
  GreedyKind greedy = GreedyKind::Mcts;
  std::size_t greedy_iterations = 100;
  double mcts_c = kDefaultUctConstant;
  double sa_decay = kDefaultSaDecay;
  Budget budget{1000, std::nullopt};  // counts experiments
  std::size_t evaluation_samples = 500;

  void validate() const;
};

// The six tuned combinations per variant (1-based). Throws InvalidInput for
// any other index.
RnsConfig hyperparameter_presets(RnsVariant variant, int combination);

// Sequential experimentation: pick an attack (epsilon-greedy on the
// approximator), simulate its utility on a fresh omega, take one Adam step.
// The answer is the greedy attack under the final approximator.
SolverResult solve_rns(const ProblemSpec& spec, const BeliefModel& beliefs,
                       std::span<const int> true_obs, const RnsConfig& config,
                       const Rng& rng);

}  // namespace hmmc
