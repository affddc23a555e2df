#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "hmmc/attack.hpp"
#include "hmmc/rng.hpp"

namespace hmmc {

using AttackScorer = std::function<double(const AttackVector&)>;

inline constexpr double kDefaultUctConstant = 0.5;
inline constexpr double kDefaultSaDecay = 5.0;

// Monte-Carlo tree search over attack prefixes. A node at depth d fixes
// choices[0..d); its actions are the |X| emissions for position d. Reward of
// a complete attack is the scorer's value.
class MctsSearch {
 public:
  struct Edge {
    int child = -1;
    std::size_t visits = 0;
    double q = 0.0;
    double reward_sum = 0.0;  // kept alongside q so tests can check the mean
  };
  struct Node {
    std::size_t depth = 0;
    std::size_t visits = 0;
    std::vector<Edge> edges;
  };

  MctsSearch(std::size_t horizon, std::size_t emissions, double c = kDefaultUctConstant);

  // Runs one select/expand/rollout/backpropagate pass and returns the reward.
  double iterate(const AttackScorer& score, Rng& rng);
  void run(const AttackScorer& score, std::size_t iterations, Rng& rng);

  const AttackVector& best() const { return best_; }
  double best_score() const { return best_score_; }
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  std::size_t horizon_;
  std::size_t emissions_;
  double c_;
  std::vector<Node> nodes_;
  AttackVector best_;
  double best_score_;
  bool has_best_ = false;
};

// Approximate argmax of `score` by MCTS with UCT selection.
AttackVector greedy_mcts(const AttackScorer& score, std::size_t horizon,
                         std::size_t emissions, std::size_t iterations, double c, Rng& rng);

// Temperature during sweep j (0-based): exp(-l*j/|T|).
double sa_temperature(std::size_t j, std::size_t horizon, double decay);

// Simulated annealing by Gibbs sweeps over the coordinates. Each of the
// `iterations` sweeps updates every z_t once from its softmax full
// conditional at the current temperature. Returns the best attack visited.
// `start` may be empty, in which case a uniform random attack is used.
AttackVector greedy_sa(const AttackScorer& score, std::size_t horizon,
                       std::size_t emissions, std::size_t iterations, double decay,
                       Rng& rng, const AttackVector* start = nullptr);

// Probabilities proportional to exp(logits), computed stably.
std::vector<double> softmax(std::span<const double> logits);

}  // namespace hmmc
