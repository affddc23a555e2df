#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hmmc/attack.hpp"
#include "hmmc/rng.hpp"

namespace hmmc {

// Two ReLU hidden layers and a linear scalar output, trained with Adam on
// single-sample squared error. Attacks are fed as a flattened |T|*|X|
// one-hot vector.
class Mlp {
 public:
  Mlp(std::size_t inputs, std::size_t hidden1, std::size_t hidden2, double learning_rate,
      Rng& rng);

  std::size_t inputs() const noexcept { return inputs_; }

  double predict(std::span<const double> x) const;
  // Same as predict on the one-hot encoding, without materializing it.
  double predict(const AttackVector& attack, std::size_t emissions) const;

  // One Adam step on 0.5 * (f(x) - target)^2. Returns the squared error
  // before the step.
  double train_step(std::span<const double> x, double target);
  double train_step(const AttackVector& attack, std::size_t emissions, double target);

 private:
  struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> w;  // out x in, row-major
    std::vector<double> b;
    std::vector<double> mw, vw, mb, vb;
  };

  void forward(std::span<const double> x, std::vector<double>& h1,
               std::vector<double>& h2, double& y) const;
  void adam(Layer& layer, std::span<const double> gw, std::span<const double> gb);

  std::size_t inputs_;
  Layer l1_, l2_, l3_;
  double lr_;
  std::size_t step_ = 0;
};

std::vector<double> one_hot(const AttackVector& attack, std::size_t emissions);

}  // namespace hmmc
