#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmmc/beliefs.hpp"
#include "hmmc/hmm.hpp"
#include "hmmc/rng.hpp"

namespace hmmc {

// choices[t] is the emission the attacker tries to place at time t (0-based).
struct AttackVector {
  std::vector<int> choices;

  std::size_t size() const noexcept { return choices.size(); }
  friend auto operator<=>(const AttackVector&, const AttackVector&) = default;
};

// The attack that leaves every observation as it is.
AttackVector identity_attack(std::span<const int> true_obs);

enum class ProblemKind { StateAttraction, StateRepulsion, DistributionDisruption, PathAttraction };
enum class Divergence { KL, Hellinger };

// How path coefficients are read. Signs: entries in {-1, 0, 1}, scaled at
// each t by the inverse of the total Viterbi mass. Fixed: raw c_{t,i}.
enum class CoefficientMode { Signs, Fixed };

std::string to_string(ProblemKind kind);
ProblemKind parse_problem_kind(const std::string& name);
std::string to_string(Divergence d);
Divergence parse_divergence(const std::string& name);

struct ProblemSpec {
  ProblemKind kind = ProblemKind::StateAttraction;
  std::size_t target_time = 0;   // t', 0-based
  std::size_t target_state = 0;  // i', 0-based
  StatePath target_path;         // goal path for the path kind
  Matrix coefficients;           // |T| x |Q| for the path kind
  CoefficientMode coefficient_mode = CoefficientMode::Signs;
  double w1 = 1.0;
  double w2 = 0.0;
  Divergence divergence = Divergence::KL;
  // Overrides the per-sample unattacked distribution in disruption problems.
  std::optional<std::vector<double>> baseline_gamma;

  static ProblemSpec state_attraction(std::size_t t, std::size_t i, double w1, double w2);
  static ProblemSpec state_repulsion(std::size_t t, std::size_t i, double w1, double w2);
  static ProblemSpec disruption(std::size_t t, double w1, double w2,
                                Divergence d = Divergence::KL);
  // Encourages goal[t] at every t; with `repel` the goal states are
  // discouraged instead.
  static ProblemSpec path_attraction(StatePath goal, std::size_t num_states, double w1,
                                     double w2, bool repel = false);

  ProblemSpec with_weights(double new_w1, double new_w2) const;

  // Throws InvalidInput when targets or coefficients do not fit the sizes.
  void validate(std::size_t num_states, std::size_t horizon) const;
};

struct UtilitySample {
  double f1 = 0.0;
  double f2 = 0.0;
  double u = 0.0;
};

// y_t = choices[t] when rho(t, choices[t]) is set, otherwise x_t.
ObsSequence perturb(const AttackVector& attack, std::span<const int> true_obs,
                    const RhoMatrix& rho);

// Number of positions where the attack differs from the true data.
int cost_f2(const AttackVector& attack, std::span<const int> true_obs);

// c * P(Q_t = i | y).
double f1_state(const HmmParams& params, std::span<const int> y, std::size_t t,
                std::size_t i, double c);

// Both arguments are floored at 1e-12 and renormalized before taking logs.
double kl_divergence(std::span<const double> p, std::span<const double> q);
double hellinger_distance(std::span<const double> p, std::span<const double> q);

double f1_disruption(const HmmParams& params, std::span<const int> y, std::size_t t,
                     std::span<const double> baseline, Divergence divergence);

double f1_path(const HmmParams& params, std::span<const int> y,
               const Matrix& coefficients,
               CoefficientMode mode = CoefficientMode::Signs);

// Inference component for any problem kind. `baseline` is only read for
// disruption problems.
double f1_value(const ProblemSpec& spec, const HmmParams& params, std::span<const int> y,
                std::span<const double> baseline);

// The unattacked distribution compared against in disruption problems: the
// spec override if present, else the smoothing distribution under the true
// data and the given parameters. Empty for other kinds.
std::vector<double> disruption_baseline(const ProblemSpec& spec, const HmmParams& params,
                                        std::span<const int> true_obs);

UtilitySample utility(const ProblemSpec& spec, const AttackVector& attack,
                      std::span<const int> true_obs, const OmegaSample& omega);

// Evaluates many attacks against one omega. The disruption baseline is
// computed once at construction. Safe to share between threads.
class PreparedOmega {
 public:
  PreparedOmega(const ProblemSpec& spec, std::span<const int> true_obs,
                const OmegaSample& omega);

  double f1(const AttackVector& attack) const;
  UtilitySample evaluate(const AttackVector& attack) const;

  const OmegaSample& omega() const noexcept { return *omega_; }

 private:
  const ProblemSpec* spec_;
  std::span<const int> true_obs_;
  const OmegaSample* omega_;
  std::vector<double> baseline_;
};

// Lower bound on f1 over all attacks and parameters.
double f1_lower_bound(const ProblemSpec& spec);
// Lower bound on u for the given horizon.
double utility_lower_bound(const ProblemSpec& spec, std::size_t horizon);

// Fraction of positions where two equal-length sequences differ.
double normalized_hamming(std::span<const int> a, std::span<const int> b);

struct ImpactSummary {
  double mean = 0.0;
  double std = 0.0;
  double changed_fraction = 0.0;   // mean of |{t : y_t != x_t}| / |T|
  double perturbed_value = 0.0;    // mean of the perturbed-side metric
  double unperturbed_value = 0.0;  // the same metric on the true data
  std::vector<double> samples;
};

// Simulates the attack `simulations` times with the true parameters fixed and
// fresh success indicators (rate success_probs[k]) per simulation. Impact is
// perturbed - unperturbed posterior for attraction, the reverse for
// repulsion, KL(unperturbed || perturbed) for disruption and the normalized
// Hamming distance from the decoded path to the goal for the path kind.
ImpactSummary impact(const ProblemSpec& spec, const AttackVector& attack,
                     std::span<const int> true_obs, const HmmParams& true_params,
                     std::span<const double> success_probs, std::size_t simulations,
                     Rng& rng);

// Default simulation counts per kind: 5000 for attraction and disruption,
// 1000 for repulsion and path.
std::size_t default_impact_simulations(ProblemKind kind);

}  // namespace hmmc
