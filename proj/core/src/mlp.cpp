#include "hmmc/mlp.hpp"

#include <cmath>

#include "hmmc/error.hpp"

namespace hmmc {
namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

}  // namespace

std::vector<double> one_hot(const AttackVector& attack, std::size_t emissions) {
  std::vector<double> x(attack.size() * emissions, 0.0);
  for (std::size_t t = 0; t < attack.size(); ++t) {
    x[t * emissions + static_cast<std::size_t>(attack.choices[t])] = 1.0;
  }
  return x;
}

Mlp::Mlp(std::size_t inputs, std::size_t hidden1, std::size_t hidden2,
         double learning_rate, Rng& rng)
    : inputs_(inputs), lr_(learning_rate) {
  if (inputs == 0 || hidden1 == 0 || hidden2 == 0) {
    throw InvalidInput("network widths must be at least 1");
  }
  if (!(learning_rate > 0.0)) {
    throw InvalidInput("learning rate must be positive");
  }
  auto init = [&rng](Layer& layer, std::size_t in, std::size_t out) {
    layer.in = in;
    layer.out = out;
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    layer.w.resize(in * out);
    for (double& v : layer.w) v = (2.0 * rng.uniform() - 1.0) * scale;
    layer.b.assign(out, 0.0);
    layer.mw.assign(in * out, 0.0);
    layer.vw.assign(in * out, 0.0);
    layer.mb.assign(out, 0.0);
    layer.vb.assign(out, 0.0);
  };
  init(l1_, inputs, hidden1);
  init(l2_, hidden1, hidden2);
  init(l3_, hidden2, 1);
}

void Mlp::forward(std::span<const double> x, std::vector<double>& h1,
                  std::vector<double>& h2, double& y) const {
  h1.assign(l1_.out, 0.0);
  for (std::size_t o = 0; o < l1_.out; ++o) {
    double acc = l1_.b[o];
    const double* w = &l1_.w[o * l1_.in];
    for (std::size_t i = 0; i < l1_.in; ++i) {
      if (x[i] != 0.0) acc += w[i] * x[i];
    }
    h1[o] = acc > 0.0 ? acc : 0.0;
  }
  h2.assign(l2_.out, 0.0);
  for (std::size_t o = 0; o < l2_.out; ++o) {
    double acc = l2_.b[o];
    const double* w = &l2_.w[o * l2_.in];
    for (std::size_t i = 0; i < l2_.in; ++i) acc += w[i] * h1[i];
    h2[o] = acc > 0.0 ? acc : 0.0;
  }
  y = l3_.b[0];
  for (std::size_t i = 0; i < l3_.in; ++i) y += l3_.w[i] * h2[i];
}

double Mlp::predict(std::span<const double> x) const {
  if (x.size() != inputs_) {
    throw InvalidInput("network input has the wrong size");
  }
  std::vector<double> h1;
  std::vector<double> h2;
  double y = 0.0;
  forward(x, h1, h2, y);
  return y;
}

double Mlp::predict(const AttackVector& attack, std::size_t emissions) const {
  if (attack.size() * emissions != inputs_) {
    throw InvalidInput("attack does not match the network input size");
  }
  thread_local std::vector<double> h1;
  thread_local std::vector<double> h2;
  h1.assign(l1_.out, 0.0);
  for (std::size_t o = 0; o < l1_.out; ++o) {
    const double* w = &l1_.w[o * l1_.in];
    double acc = l1_.b[o];
    for (std::size_t t = 0; t < attack.size(); ++t) {
      acc += w[t * emissions + static_cast<std::size_t>(attack.choices[t])];
    }
    h1[o] = acc > 0.0 ? acc : 0.0;
  }
  h2.assign(l2_.out, 0.0);
  for (std::size_t o = 0; o < l2_.out; ++o) {
    double acc = l2_.b[o];
    const double* w = &l2_.w[o * l2_.in];
    for (std::size_t i = 0; i < l2_.in; ++i) acc += w[i] * h1[i];
    h2[o] = acc > 0.0 ? acc : 0.0;
  }
  double y = l3_.b[0];
  for (std::size_t i = 0; i < l3_.in; ++i) y += l3_.w[i] * h2[i];
  return y;
}

void Mlp::adam(Layer& layer, std::span<const double> gw, std::span<const double> gb) {
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step_));
  auto update = [&](std::vector<double>& p, std::vector<double>& m, std::vector<double>& v,
                    std::span<const double> g) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
      v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
      p[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + kAdamEps);
    }
  };
  update(layer.w, layer.mw, layer.vw, gw);
  update(layer.b, layer.mb, layer.vb, gb);
}

double Mlp::train_step(std::span<const double> x, double target) {
  if (x.size() != inputs_) {
    throw InvalidInput("network input has the wrong size");
  }
  std::vector<double> h1;
  std::vector<double> h2;
  double y = 0.0;
  forward(x, h1, h2, y);
  const double err = y - target;

  std::vector<double> g3w(l3_.in);
  for (std::size_t i = 0; i < l3_.in; ++i) g3w[i] = err * h2[i];
  const std::vector<double> g3b{err};

  std::vector<double> d2(l2_.out);
  for (std::size_t o = 0; o < l2_.out; ++o) {
    d2[o] = h2[o] > 0.0 ? err * l3_.w[o] : 0.0;
  }
  std::vector<double> g2w(l2_.in * l2_.out);
  for (std::size_t o = 0; o < l2_.out; ++o) {
    for (std::size_t i = 0; i < l2_.in; ++i) g2w[o * l2_.in + i] = d2[o] * h1[i];
  }

  std::vector<double> d1(l1_.out, 0.0);
  for (std::size_t i = 0; i < l2_.in; ++i) {
    if (h1[i] <= 0.0) continue;
    double acc = 0.0;
    for (std::size_t o = 0; o < l2_.out; ++o) acc += d2[o] * l2_.w[o * l2_.in + i];
    d1[i] = acc;
  }
  std::vector<double> g1w(l1_.in * l1_.out, 0.0);
  for (std::size_t o = 0; o < l1_.out; ++o) {
    if (d1[o] == 0.0) continue;
    for (std::size_t i = 0; i < l1_.in; ++i) g1w[o * l1_.in + i] = d1[o] * x[i];
  }

  ++step_;
  adam(l3_, g3w, g3b);
  adam(l2_, g2w, d2);
  adam(l1_, g1w, d1);
  return err * err;
}

double Mlp::train_step(const AttackVector& attack, std::size_t emissions, double target) {
  return train_step(one_hot(attack, emissions), target);
}

}  // namespace hmmc
