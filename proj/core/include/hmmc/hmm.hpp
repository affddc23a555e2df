#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "hmmc/rng.hpp"

namespace hmmc {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  // Rows must all have the same length.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<std::vector<double>> to_rows() const;

  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Emission indices, 0-based. The 1-based convention used in instance files
// is converted in the io layer.
using ObsSequence = std::vector<int>;
using StatePath = std::vector<int>;

inline constexpr double kStochasticTolerance = 1e-9;

// Transition matrix A (|Q| x |Q|), emission matrix B (|Q| x |X|), initial
// distribution pi. Immutable once constructed; log-domain copies are cached
// for the recursions.
class HmmParams {
 public:
  // Validates shapes, nonnegativity and row sums (within 1e-9); throws
  // InvalidInput naming the offending row.
  HmmParams(Matrix transition, Matrix emission, std::vector<double> initial);

  // Skips validation. For rows produced by samplers that already normalize.
  static HmmParams unchecked(Matrix transition, Matrix emission,
                             std::vector<double> initial);

  std::size_t num_states() const noexcept { return transition_.rows(); }
  std::size_t num_emissions() const noexcept { return emission_.cols(); }

  const Matrix& transition() const noexcept { return transition_; }
  const Matrix& emission() const noexcept { return emission_; }
  const std::vector<double>& initial() const noexcept { return initial_; }

  const Matrix& log_transition() const noexcept { return log_transition_; }
  const Matrix& log_emission() const noexcept { return log_emission_; }
  const std::vector<double>& log_initial() const noexcept { return log_initial_; }

  // Throws InvalidInput if obs is empty or holds an out-of-range emission.
  void check_observations(std::span<const int> obs) const;

  friend bool operator==(const HmmParams& a, const HmmParams& b) {
    return a.transition_ == b.transition_ && a.emission_ == b.emission_ &&
           a.initial_ == b.initial_;
  }

 private:
  struct NoCheck {};
  HmmParams(NoCheck, Matrix transition, Matrix emission, std::vector<double> initial);
  void build_logs();

  Matrix transition_;
  Matrix emission_;
  std::vector<double> initial_;
  Matrix log_transition_;
  Matrix log_emission_;
  std::vector<double> log_initial_;
};

struct ForwardBackwardResult {
  Matrix log_alpha;  // |T| x |Q|
  Matrix log_beta;   // |T| x |Q|, log_beta[last] = 0
  double log_likelihood = 0.0;
};

struct ViterbiResult {
  Matrix log_delta;                 // |T| x |Q|
  std::vector<std::vector<int>> backpointers;  // |T| x |Q|; row 0 is all zero
  StatePath best_path;
  double best_log_prob = 0.0;
};

// Posterior over states at one time step. When P(obs) = 0 the distribution
// is uniform and `zero_likelihood` is set.
struct StateDistribution {
  std::vector<double> probs;
  bool zero_likelihood = false;
};

double logsumexp(std::span<const double> values);

// Log-space forward and backward recursions.
ForwardBackwardResult forward_backward(const HmmParams& params,
                                       std::span<const int> obs);

// P(Q_t = i | obs); t is 0-based. Throws InvalidInput when t is out of range.
StateDistribution smoothing_dist(const ForwardBackwardResult& fb, std::size_t t);

// P(Q_last = i | obs).
StateDistribution filtering_dist(const ForwardBackwardResult& fb);

// Smoothing distribution at a single time step, computed with normalized
// (scaled) recursions and no full-table allocation. This is the evaluation
// kernel used inside the attack solvers; it agrees with smoothing_dist to
// rounding.
StateDistribution posterior_at(const HmmParams& params, std::span<const int> obs,
                               std::size_t t);

// Most likely latent path. Every argmax picks the lowest state index among
// exact ties.
ViterbiResult viterbi(const HmmParams& params, std::span<const int> obs);

// Exhaustive summation over all |Q|^|T| latent paths. Test oracle.
struct PathEnumerationResult {
  double log_likelihood = 0.0;
  Matrix posteriors;  // |T| x |Q|
  StatePath best_path;
  double best_log_prob = 0.0;
};

inline constexpr double kPathEnumerationCap = 1e7;

// Throws CapacityError when |Q|^|T| exceeds kPathEnumerationCap.
PathEnumerationResult enumerate_paths_oracle(const HmmParams& params,
                                             std::span<const int> obs);

// Draws a latent path from pi and A, and emissions from the rows of B.
std::pair<StatePath, ObsSequence> sample_sequence(const HmmParams& params,
                                                  std::size_t length, Rng& rng);

// Row-stochastic random parameters with Dirichlet(concentration) rows.
HmmParams random_params(std::size_t num_states, std::size_t num_emissions,
                        Rng& rng, double concentration = 1.0);

}  // namespace hmmc
