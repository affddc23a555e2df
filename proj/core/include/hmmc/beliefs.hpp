#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "hmmc/hmm.hpp"
#include "hmmc/rng.hpp"

namespace hmmc {

// Pass as the precision to request point-mass (degenerate) priors.
inline constexpr double kInfinitePrecision = std::numeric_limits<double>::infinity();

// Binary |T| x |X| matrix of attack-success indicators.
class RhoMatrix {
 public:
  RhoMatrix() = default;
  RhoMatrix(std::size_t horizon, std::size_t emissions, bool fill = false)
      : horizon_(horizon), emissions_(emissions), bits_(horizon * emissions, fill) {}

  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t emissions() const noexcept { return emissions_; }

  bool operator()(std::size_t t, std::size_t k) const {
    return bits_[t * emissions_ + k] != 0;
  }
  void set(std::size_t t, std::size_t k, bool value) {
    bits_[t * emissions_ + k] = value ? 1 : 0;
  }

  friend bool operator==(const RhoMatrix&, const RhoMatrix&) = default;

 private:
  std::size_t horizon_ = 0;
  std::size_t emissions_ = 0;
  std::vector<std::uint8_t> bits_;
};

// One joint draw of the attacker's uncertain quantities.
struct OmegaSample {
  HmmParams params;
  RhoMatrix rho;
};

// Sampler interface. Solvers only need blockwise draws from the prior, so any
// model that can produce them plugs in.
class BeliefModel {
 public:
  virtual ~BeliefModel() = default;

  virtual std::size_t num_states() const = 0;
  virtual std::size_t num_emissions() const = 0;

  virtual Matrix sample_transition(Rng& rng) const = 0;
  virtual Matrix sample_emission(Rng& rng) const = 0;
  virtual std::vector<double> sample_initial(Rng& rng) const = 0;
  virtual RhoMatrix sample_rho(std::size_t horizon, Rng& rng) const = 0;

  // Probability that an insertion of emission k takes effect.
  virtual double success_prob(std::size_t k) const = 0;
};

// Dirichlet parameters for one probability row, or an exact row when the
// prior is a point mass. A zero concentration marks a structural zero: that
// entry is always 0 in every draw.
struct DirichletRow {
  std::vector<double> values;
  bool point_mass = false;

  static DirichletRow concentration(std::vector<double> alpha);
  static DirichletRow exact(std::vector<double> probs);

  std::vector<double> mean() const;
  std::vector<double> sample(Rng& rng) const;

  friend bool operator==(const DirichletRow&, const DirichletRow&) = default;
};

class AttackerBeliefs final : public BeliefModel {
 public:
  // Throws InvalidInput on shape mismatches, nonpositive concentrations,
  // invalid exact rows or success rates outside [0, 1].
  AttackerBeliefs(std::vector<DirichletRow> transition_priors,
                  std::vector<DirichletRow> emission_priors, DirichletRow initial_prior,
                  std::vector<double> success_probs);

  std::size_t num_states() const override { return transition_priors_.size(); }
  std::size_t num_emissions() const override { return success_probs_.size(); }

  Matrix sample_transition(Rng& rng) const override;
  Matrix sample_emission(Rng& rng) const override;
  std::vector<double> sample_initial(Rng& rng) const override;
  RhoMatrix sample_rho(std::size_t horizon, Rng& rng) const override;
  double success_prob(std::size_t k) const override { return success_probs_.at(k); }

  const std::vector<DirichletRow>& transition_priors() const { return transition_priors_; }
  const std::vector<DirichletRow>& emission_priors() const { return emission_priors_; }
  const DirichletRow& initial_prior() const { return initial_prior_; }
  const std::vector<double>& success_probs() const { return success_probs_; }

  // Parameters whose rows are the prior means.
  HmmParams mean_params() const;

  friend bool operator==(const AttackerBeliefs& a, const AttackerBeliefs& b) {
    return a.transition_priors_ == b.transition_priors_ &&
           a.emission_priors_ == b.emission_priors_ &&
           a.initial_prior_ == b.initial_prior_ && a.success_probs_ == b.success_probs_;
  }

 private:
  std::vector<DirichletRow> transition_priors_;
  std::vector<DirichletRow> emission_priors_;
  DirichletRow initial_prior_;
  std::vector<double> success_probs_;
};

// Dirichlet rows with parameters precision * mean row. kInfinitePrecision
// yields point masses. `success` holds one rate per emission.
AttackerBeliefs beliefs_from_mean_precision(const HmmParams& mean, double precision,
                                            std::vector<double> success);
AttackerBeliefs beliefs_from_mean_precision(const HmmParams& mean, double precision,
                                            double success);

// Draw order: transition rows, emission rows, initial vector, then rho row by
// row. Horizon must be positive.
OmegaSample sample_omega(const BeliefModel& beliefs, std::size_t horizon, Rng& rng);

}  // namespace hmmc
