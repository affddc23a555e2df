#include "hmmc/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hmmc/attack_space.hpp"
#include "hmmc/error.hpp"

namespace hmmc {

std::vector<double> softmax(std::span<const double> logits) {
  double peak = -std::numeric_limits<double>::infinity();
  for (const double v : logits) peak = std::max(peak, v);
  std::vector<double> out(logits.size());
  if (!std::isfinite(peak)) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
    return out;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

MctsSearch::MctsSearch(std::size_t horizon, std::size_t emissions, double c)
    : horizon_(horizon),
      emissions_(emissions),
      c_(c),
      best_score_(-std::numeric_limits<double>::infinity()) {
  if (horizon == 0 || emissions == 0) {
    throw InvalidInput("search needs positive sizes");
  }
  if (!(c > 0.0)) {
    throw InvalidInput("exploration constant must be positive");
  }
  nodes_.push_back(Node{0, 0, std::vector<Edge>(emissions)});
}

double MctsSearch::iterate(const AttackScorer& score, Rng& rng) {
  AttackVector state;
  state.choices.reserve(horizon_);
  std::vector<std::pair<std::size_t, std::size_t>> path;  // (node, action)
  std::size_t node = 0;
  bool expanded = false;

  while (state.size() < horizon_ && !expanded) {
    Node& n = nodes_[node];
    std::vector<std::size_t> unvisited;
    for (std::size_t a = 0; a < emissions_; ++a) {
      if (n.edges[a].visits == 0) unvisited.push_back(a);
    }
    std::size_t action = 0;
    if (!unvisited.empty()) {
      action = unvisited[rng.uniform_index(unvisited.size())];
      expanded = true;
    } else {
      double best = -std::numeric_limits<double>::infinity();
      const double log_n = std::log(static_cast<double>(n.visits));
      for (std::size_t a = 0; a < emissions_; ++a) {
        const Edge& e = n.edges[a];
        const double ucb =
            e.q + c_ * std::sqrt(2.0 * log_n / static_cast<double>(e.visits));
        if (ucb > best) {
          best = ucb;
          action = a;
        }
      }
    }
    path.emplace_back(node, action);
    state.choices.push_back(static_cast<int>(action));
    if (state.size() < horizon_) {
      if (nodes_[node].edges[action].child < 0) {
        nodes_.push_back(Node{state.size(), 0, std::vector<Edge>(emissions_)});
        nodes_[node].edges[action].child = static_cast<int>(nodes_.size() - 1);
      }
      node = static_cast<std::size_t>(nodes_[node].edges[action].child);
    }
  }

  // Uniform random rollout to a complete attack.
  while (state.size() < horizon_) {
    state.choices.push_back(static_cast<int>(rng.uniform_index(emissions_)));
  }
  const double reward = score(state);
  if (!has_best_ || reward > best_score_ || (reward == best_score_ && state < best_)) {
    best_ = state;
    best_score_ = reward;
    has_best_ = true;
  }

  for (const auto& [idx, action] : path) {
    Node& n = nodes_[idx];
    Edge& e = n.edges[action];
    ++n.visits;
    ++e.visits;
    e.q += (reward - e.q) / static_cast<double>(e.visits);
    e.reward_sum += reward;
  }
  return reward;
}

void MctsSearch::run(const AttackScorer& score, std::size_t iterations, Rng& rng) {
  for (std::size_t i = 0; i < iterations; ++i) iterate(score, rng);
}

AttackVector greedy_mcts(const AttackScorer& score, std::size_t horizon,
                         std::size_t emissions, std::size_t iterations, double c,
                         Rng& rng) {
  if (iterations == 0) {
    throw InvalidInput("MCTS needs at least one iteration");
  }
  MctsSearch search(horizon, emissions, c);
  search.run(score, iterations, rng);
  return search.best();
}

double sa_temperature(std::size_t j, std::size_t horizon, double decay) {
  return std::exp(-decay * static_cast<double>(j) / static_cast<double>(horizon));
}

AttackVector greedy_sa(const AttackScorer& score, std::size_t horizon,
                       std::size_t emissions, std::size_t iterations, double decay,
                       Rng& rng, const AttackVector* start) {
  if (iterations == 0) {
    throw InvalidInput("simulated annealing needs at least one iteration");
  }
  if (!(decay > 0.0)) {
    throw InvalidInput("annealing decay must be positive");
  }
  AttackVector z = start ? *start : random_attack(horizon, emissions, rng);
  if (z.size() != horizon) {
    throw InvalidInput("starting attack has the wrong length");
  }
  AttackVector best = z;
  double best_score = score(z);
  std::vector<double> values(emissions);
  std::vector<double> logits(emissions);
  for (std::size_t j = 0; j < iterations; ++j) {
    const double temp = sa_temperature(j, horizon, decay);
    for (std::size_t t = 0; t < horizon; ++t) {
      const int keep = z.choices[t];
      for (std::size_t k = 0; k < emissions; ++k) {
        z.choices[t] = static_cast<int>(k);
        values[k] = score(z);
        logits[k] = values[k] / temp;
        if (values[k] > best_score || (values[k] == best_score && z < best)) {
          best_score = values[k];
          best = z;
        }
      }
      z.choices[t] = keep;
      const auto probs = softmax(logits);
      z.choices[t] = static_cast<int>(rng.categorical(probs));
    }
  }
  return best;
}

}  // namespace hmmc
