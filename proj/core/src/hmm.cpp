#include "hmmc/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hmmc/error.hpp"

namespace hmmc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_stochastic(std::span<const double> row, const std::string& name) {
  double total = 0.0;
  for (const double v : row) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidInput(name + " has a negative or non-finite entry");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kStochasticTolerance) {
    throw InvalidInput(name + " sums to " + std::to_string(total) + ", expected 1");
  }
}

double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

}  // namespace

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) {
    return {};
  }
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) {
      throw InvalidInput("ragged matrix: row " + std::to_string(r) + " has " +
                         std::to_string(rows[r].size()) + " columns, expected " +
                         std::to_string(m.cols()));
    }
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    const auto src = row(r);
    out[r].assign(src.begin(), src.end());
  }
  return out;
}

HmmParams::HmmParams(Matrix transition, Matrix emission, std::vector<double> initial)
    : transition_(std::move(transition)),
      emission_(std::move(emission)),
      initial_(std::move(initial)) {
  const std::size_t q = transition_.rows();
  if (q == 0) {
    throw InvalidInput("HMM needs at least one state");
  }
  if (transition_.cols() != q) {
    throw InvalidInput("transition matrix must be square");
  }
  if (emission_.rows() != q) {
    throw InvalidInput("emission matrix must have one row per state");
  }
  if (emission_.cols() == 0) {
    throw InvalidInput("HMM needs at least one emission symbol");
  }
  if (initial_.size() != q) {
    throw InvalidInput("initial distribution must have one entry per state");
  }
  for (std::size_t i = 0; i < q; ++i) {
    check_stochastic(transition_.row(i), "transition row " + std::to_string(i + 1));
    check_stochastic(emission_.row(i), "emission row " + std::to_string(i + 1));
  }
  check_stochastic(initial_, "initial distribution");
  build_logs();
}

HmmParams::HmmParams(NoCheck, Matrix transition, Matrix emission,
                     std::vector<double> initial)
    : transition_(std::move(transition)),
      emission_(std::move(emission)),
      initial_(std::move(initial)) {
  build_logs();
}

HmmParams HmmParams::unchecked(Matrix transition, Matrix emission,
                               std::vector<double> initial) {
  return HmmParams(NoCheck{}, std::move(transition), std::move(emission),
                   std::move(initial));
}

void HmmParams::build_logs() {
  log_transition_ = Matrix(transition_.rows(), transition_.cols());
  log_emission_ = Matrix(emission_.rows(), emission_.cols());
  log_initial_.resize(initial_.size());
  for (std::size_t i = 0; i < transition_.rows(); ++i) {
    for (std::size_t j = 0; j < transition_.cols(); ++j) {
      log_transition_(i, j) = safe_log(transition_(i, j));
    }
    for (std::size_t k = 0; k < emission_.cols(); ++k) {
      log_emission_(i, k) = safe_log(emission_(i, k));
    }
    log_initial_[i] = safe_log(initial_[i]);
  }
}

void HmmParams::check_observations(std::span<const int> obs) const {
  if (obs.empty()) {
    throw InvalidInput("observation sequence must not be empty");
  }
  const int limit = static_cast<int>(num_emissions());
  for (std::size_t t = 0; t < obs.size(); ++t) {
    if (obs[t] < 0 || obs[t] >= limit) {
      throw InvalidInput("observation " + std::to_string(t + 1) + " = " +
                         std::to_string(obs[t] + 1) + " outside 1.." +
                         std::to_string(limit));
    }
  }
}

double logsumexp(std::span<const double> values) {
  double peak = kNegInf;
  for (const double v : values) {
    peak = std::max(peak, v);
  }
  if (peak == kNegInf) {
    return kNegInf;
  }
  double total = 0.0;
  for (const double v : values) {
    total += std::exp(v - peak);
  }
  return peak + std::log(total);
}

ForwardBackwardResult forward_backward(const HmmParams& params,
                                       std::span<const int> obs) {
  params.check_observations(obs);
  const std::size_t n = obs.size();
  const std::size_t q = params.num_states();
  const Matrix& la = params.log_transition();
  const Matrix& lb = params.log_emission();

  ForwardBackwardResult out{Matrix(n, q), Matrix(n, q, 0.0), 0.0};
  std::vector<double> terms(q);

  for (std::size_t i = 0; i < q; ++i) {
    out.log_alpha(0, i) = params.log_initial()[i] + lb(i, obs[0]);
  }
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t i = 0; i < q; ++i) {
      for (std::size_t j = 0; j < q; ++j) {
        terms[j] = out.log_alpha(t - 1, j) + la(j, i);
      }
      out.log_alpha(t, i) = logsumexp(terms) + lb(i, obs[t]);
    }
  }
  for (std::size_t t = n - 1; t-- > 0;) {
    for (std::size_t i = 0; i < q; ++i) {
      for (std::size_t j = 0; j < q; ++j) {
        terms[j] = out.log_beta(t + 1, j) + la(i, j) + lb(j, obs[t + 1]);
      }
      out.log_beta(t, i) = logsumexp(terms);
    }
  }
  out.log_likelihood = logsumexp(out.log_alpha.row(n - 1));
  return out;
}

StateDistribution smoothing_dist(const ForwardBackwardResult& fb, std::size_t t) {
  if (t >= fb.log_alpha.rows()) {
    throw InvalidInput("time index " + std::to_string(t + 1) + " outside 1.." +
                       std::to_string(fb.log_alpha.rows()));
  }
  const std::size_t q = fb.log_alpha.cols();
  std::vector<double> joint(q);
  for (std::size_t i = 0; i < q; ++i) {
    joint[i] = fb.log_alpha(t, i) + fb.log_beta(t, i);
  }
  const double norm = logsumexp(joint);
  StateDistribution out;
  out.probs.resize(q);
  if (norm == kNegInf) {
    std::fill(out.probs.begin(), out.probs.end(), 1.0 / static_cast<double>(q));
    out.zero_likelihood = true;
    return out;
  }
  for (std::size_t i = 0; i < q; ++i) {
    out.probs[i] = std::exp(joint[i] - norm);
  }
  return out;
}

StateDistribution filtering_dist(const ForwardBackwardResult& fb) {
  return smoothing_dist(fb, fb.log_alpha.rows() - 1);
}

StateDistribution posterior_at(const HmmParams& params, std::span<const int> obs,
                               std::size_t t) {
  const std::size_t n = obs.size();
  const std::size_t q = params.num_states();
  if (t >= n) {
    throw InvalidInput("time index " + std::to_string(t + 1) + " outside 1.." +
                       std::to_string(n));
  }
  const Matrix& a = params.transition();
  const Matrix& b = params.emission();

  StateDistribution out;
  out.probs.assign(q, 0.0);
  auto degenerate = [&]() {
    std::fill(out.probs.begin(), out.probs.end(), 1.0 / static_cast<double>(q));
    out.zero_likelihood = true;
    return out;
  };

  // Forward pass, renormalized at every step. A common positive factor per
  // step does not change the posterior.
  std::vector<double> alpha(q);
  std::vector<double> scratch(q);
  double total = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    alpha[i] = params.initial()[i] * b(i, obs[0]);
    total += alpha[i];
  }
  if (!(total > 0.0)) {
    return degenerate();
  }
  for (double& v : alpha) v /= total;
  for (std::size_t s = 1; s <= t; ++s) {
    total = 0.0;
    std::fill(scratch.begin(), scratch.end(), 0.0);
    for (std::size_t j = 0; j < q; ++j) {
      const double aj = alpha[j];
      if (aj == 0.0) continue;
      const auto row = a.row(j);
      for (std::size_t i = 0; i < q; ++i) {
        scratch[i] += aj * row[i];
      }
    }
    for (std::size_t i = 0; i < q; ++i) {
      scratch[i] *= b(i, obs[s]);
      total += scratch[i];
    }
    if (!(total > 0.0)) {
      return degenerate();
    }
    for (std::size_t i = 0; i < q; ++i) alpha[i] = scratch[i] / total;
  }

  // Backward pass down to t.
  std::vector<double> beta(q, 1.0);
  for (std::size_t s = n - 1; s > t; --s) {
    total = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
      scratch[j] = beta[j] * b(j, obs[s]);
    }
    for (std::size_t i = 0; i < q; ++i) {
      const auto row = a.row(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < q; ++j) {
        acc += row[j] * scratch[j];
      }
      beta[i] = acc;
      total += acc;
    }
    if (!(total > 0.0)) {
      return degenerate();
    }
    for (double& v : beta) v /= total;
  }

  total = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    out.probs[i] = alpha[i] * beta[i];
    total += out.probs[i];
  }
  if (!(total > 0.0)) {
    return degenerate();
  }
  for (double& v : out.probs) v /= total;
  return out;
}

ViterbiResult viterbi(const HmmParams& params, std::span<const int> obs) {
  params.check_observations(obs);
  const std::size_t n = obs.size();
  const std::size_t q = params.num_states();
  const Matrix& la = params.log_transition();
  const Matrix& lb = params.log_emission();

  ViterbiResult out;
  out.log_delta = Matrix(n, q);
  out.backpointers.assign(n, std::vector<int>(q, 0));
  for (std::size_t i = 0; i < q; ++i) {
    out.log_delta(0, i) = params.log_initial()[i] + lb(i, obs[0]);
  }
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t i = 0; i < q; ++i) {
      double best = kNegInf;
      int arg = 0;
      for (std::size_t j = 0; j < q; ++j) {
        const double cand = out.log_delta(t - 1, j) + la(j, i);
        if (cand > best) {
          best = cand;
          arg = static_cast<int>(j);
        }
      }
      out.backpointers[t][i] = arg;
      out.log_delta(t, i) = best + lb(i, obs[t]);
    }
  }
  double best = kNegInf;
  int last = 0;
  for (std::size_t i = 0; i < q; ++i) {
    if (out.log_delta(n - 1, i) > best) {
      best = out.log_delta(n - 1, i);
      last = static_cast<int>(i);
    }
  }
  out.best_log_prob = best;
  out.best_path.assign(n, 0);
  out.best_path[n - 1] = last;
  for (std::size_t t = n - 1; t > 0; --t) {
    out.best_path[t - 1] = out.backpointers[t][out.best_path[t]];
  }
  return out;
}

PathEnumerationResult enumerate_paths_oracle(const HmmParams& params,
                                             std::span<const int> obs) {
  params.check_observations(obs);
  const std::size_t n = obs.size();
  const std::size_t q = params.num_states();
  if (std::pow(static_cast<double>(q), static_cast<double>(n)) > kPathEnumerationCap) {
    throw CapacityError("path enumeration over " + std::to_string(q) + "^" +
                        std::to_string(n) + " paths exceeds the cap of 1e7");
  }
  const Matrix& a = params.transition();
  const Matrix& b = params.emission();

  PathEnumerationResult out;
  out.posteriors = Matrix(n, q, 0.0);
  double total = 0.0;
  double best = -1.0;
  StatePath path(n, 0);
  while (true) {
    double weight = params.initial()[path[0]] * b(path[0], obs[0]);
    for (std::size_t t = 1; t < n; ++t) {
      weight *= a(path[t - 1], path[t]) * b(path[t], obs[t]);
    }
    total += weight;
    for (std::size_t t = 0; t < n; ++t) {
      out.posteriors(t, path[t]) += weight;
    }
    // Paths are visited in lexicographic order; strict > keeps the first.
    if (weight > best) {
      best = weight;
      out.best_path = path;
    }
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++path[pos] < static_cast<int>(q)) break;
      path[pos] = 0;
      if (pos == 0) {
        pos = n + 1;
        break;
      }
    }
    if (pos == n + 1) break;
  }
  out.log_likelihood = safe_log(total);
  out.best_log_prob = safe_log(best);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t i = 0; i < q; ++i) {
      out.posteriors(t, i) = total > 0.0 ? out.posteriors(t, i) / total
                                         : 1.0 / static_cast<double>(q);
    }
  }
  return out;
}

std::pair<StatePath, ObsSequence> sample_sequence(const HmmParams& params,
                                                  std::size_t length, Rng& rng) {
  if (length == 0) {
    throw InvalidInput("sequence length must be at least 1");
  }
  StatePath path(length);
  ObsSequence obs(length);
  path[0] = static_cast<int>(rng.categorical(params.initial()));
  obs[0] = static_cast<int>(rng.categorical(params.emission().row(path[0])));
  for (std::size_t t = 1; t < length; ++t) {
    path[t] = static_cast<int>(rng.categorical(params.transition().row(path[t - 1])));
    obs[t] = static_cast<int>(rng.categorical(params.emission().row(path[t])));
  }
  return {std::move(path), std::move(obs)};
}

HmmParams random_params(std::size_t num_states, std::size_t num_emissions, Rng& rng,
                        double concentration) {
  if (num_states == 0 || num_emissions == 0) {
    throw InvalidInput("random_params needs positive sizes");
  }
  const std::vector<double> alpha_q(num_states, concentration);
  const std::vector<double> alpha_x(num_emissions, concentration);
  Matrix a(num_states, num_states);
  Matrix b(num_states, num_emissions);
  for (std::size_t i = 0; i < num_states; ++i) {
    const auto ra = rng.dirichlet(alpha_q);
    std::copy(ra.begin(), ra.end(), a.row(i).begin());
    const auto rb = rng.dirichlet(alpha_x);
    std::copy(rb.begin(), rb.end(), b.row(i).begin());
  }
  return HmmParams::unchecked(std::move(a), std::move(b), rng.dirichlet(alpha_q));
}

}  // namespace hmmc
