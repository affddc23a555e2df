#include "hmmc/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hmmc/error.hpp"
#include "stats.hpp"

namespace hmmc {
namespace {

constexpr double kFloor = 1e-12;

std::vector<double> floored(std::span<const double> p) {
  std::vector<double> out(p.begin(), p.end());
  double total = 0.0;
  for (double& v : out) {
    v = std::max(v, kFloor);
    total += v;
  }
  for (double& v : out) v /= total;
  return out;
}

void check_distribution(std::span<const double> p, const char* name) {
  double total = 0.0;
  for (const double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidInput(std::string(name) + " has a negative or non-finite entry");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw InvalidInput(std::string(name) + " does not sum to 1");
  }
}

}  // namespace

AttackVector identity_attack(std::span<const int> true_obs) {
  return AttackVector{std::vector<int>(true_obs.begin(), true_obs.end())};
}

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::StateAttraction: return "attraction";
    case ProblemKind::StateRepulsion: return "repulsion";
    case ProblemKind::DistributionDisruption: return "disruption";
    case ProblemKind::PathAttraction: return "path";
  }
  return "?";
}

ProblemKind parse_problem_kind(const std::string& name) {
  if (name == "attraction") return ProblemKind::StateAttraction;
  if (name == "repulsion") return ProblemKind::StateRepulsion;
  if (name == "disruption") return ProblemKind::DistributionDisruption;
  if (name == "path") return ProblemKind::PathAttraction;
  throw InvalidInput("unknown problem kind '" + name +
                     "' (expected attraction, repulsion, disruption or path)");
}

std::string to_string(Divergence d) { return d == Divergence::KL ? "kl" : "hellinger"; }

Divergence parse_divergence(const std::string& name) {
  if (name == "kl") return Divergence::KL;
  if (name == "hellinger") return Divergence::Hellinger;
  throw InvalidInput("unknown divergence '" + name + "' (expected kl or hellinger)");
}

ProblemSpec ProblemSpec::state_attraction(std::size_t t, std::size_t i, double w1,
                                          double w2) {
  ProblemSpec s;
  s.kind = ProblemKind::StateAttraction;
  s.target_time = t;
  s.target_state = i;
  s.w1 = w1;
  s.w2 = w2;
  return s;
}

ProblemSpec ProblemSpec::state_repulsion(std::size_t t, std::size_t i, double w1,
                                         double w2) {
  ProblemSpec s = state_attraction(t, i, w1, w2);
  s.kind = ProblemKind::StateRepulsion;
  return s;
}

ProblemSpec ProblemSpec::disruption(std::size_t t, double w1, double w2, Divergence d) {
  ProblemSpec s;
  s.kind = ProblemKind::DistributionDisruption;
  s.target_time = t;
  s.w1 = w1;
  s.w2 = w2;
  s.divergence = d;
  return s;
}

ProblemSpec ProblemSpec::path_attraction(StatePath goal, std::size_t num_states, double w1,
                                         double w2, bool repel) {
  ProblemSpec s;
  s.kind = ProblemKind::PathAttraction;
  s.coefficients = Matrix(goal.size(), num_states, 0.0);
  for (std::size_t t = 0; t < goal.size(); ++t) {
    if (goal[t] < 0 || static_cast<std::size_t>(goal[t]) >= num_states) {
      throw InvalidInput("goal path state at t=" + std::to_string(t + 1) +
                         " outside the state space");
    }
    s.coefficients(t, goal[t]) = repel ? -1.0 : 1.0;
  }
  s.target_path = std::move(goal);
  s.w1 = w1;
  s.w2 = w2;
  return s;
}

ProblemSpec ProblemSpec::with_weights(double new_w1, double new_w2) const {
  ProblemSpec s = *this;
  s.w1 = new_w1;
  s.w2 = new_w2;
  return s;
}

void ProblemSpec::validate(std::size_t num_states, std::size_t horizon) const {
  if (!std::isfinite(w1) || !std::isfinite(w2) || w1 < 0.0 || w2 < 0.0) {
    throw InvalidInput("weights must be finite and nonnegative");
  }
  if (kind == ProblemKind::PathAttraction) {
    if (coefficients.rows() != horizon || coefficients.cols() != num_states) {
      throw InvalidInput("path coefficients must be " + std::to_string(horizon) + " x " +
                         std::to_string(num_states));
    }
    if (!target_path.empty() && target_path.size() != horizon) {
      throw InvalidInput("goal path length differs from the observation length");
    }
    for (const int q : target_path) {
      if (q < 0 || static_cast<std::size_t>(q) >= num_states) {
        throw InvalidInput("goal path state outside the state space");
      }
    }
    return;
  }
  if (target_time >= horizon) {
    throw InvalidInput("target time " + std::to_string(target_time + 1) + " outside 1.." +
                       std::to_string(horizon));
  }
  if (kind != ProblemKind::DistributionDisruption && target_state >= num_states) {
    throw InvalidInput("target state " + std::to_string(target_state + 1) +
                       " outside 1.." + std::to_string(num_states));
  }
  if (kind == ProblemKind::DistributionDisruption && baseline_gamma) {
    if (baseline_gamma->size() != num_states) {
      throw InvalidInput("baseline distribution must have one entry per state");
    }
    check_distribution(*baseline_gamma, "baseline distribution");
  }
}

ObsSequence perturb(const AttackVector& attack, std::span<const int> true_obs,
                    const RhoMatrix& rho) {
  if (attack.size() != true_obs.size() || rho.horizon() != true_obs.size()) {
    throw InvalidInput("attack, observations and success indicators differ in length");
  }
  ObsSequence y(true_obs.begin(), true_obs.end());
  for (std::size_t t = 0; t < y.size(); ++t) {
    const int k = attack.choices[t];
    if (k != y[t] && rho(t, static_cast<std::size_t>(k))) {
      y[t] = k;
    }
  }
  return y;
}

int cost_f2(const AttackVector& attack, std::span<const int> true_obs) {
  if (attack.size() != true_obs.size()) {
    throw InvalidInput("attack and observations differ in length");
  }
  int changed = 0;
  for (std::size_t t = 0; t < true_obs.size(); ++t) {
    if (attack.choices[t] != true_obs[t]) ++changed;
  }
  return changed;
}

double f1_state(const HmmParams& params, std::span<const int> y, std::size_t t,
                std::size_t i, double c) {
  return c * posterior_at(params, y, t).probs.at(i);
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw InvalidInput("distributions differ in size");
  }
  const auto pf = floored(p);
  const auto qf = floored(q);
  double total = 0.0;
  for (std::size_t i = 0; i < pf.size(); ++i) {
    total += pf[i] * (std::log(pf[i]) - std::log(qf[i]));
  }
  return std::max(total, 0.0);
}

double hellinger_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw InvalidInput("distributions differ in size");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = std::sqrt(std::max(p[i], 0.0)) - std::sqrt(std::max(q[i], 0.0));
    total += d * d;
  }
  return std::min(1.0, std::sqrt(total) / std::sqrt(2.0));
}

double f1_disruption(const HmmParams& params, std::span<const int> y, std::size_t t,
                     std::span<const double> baseline, Divergence divergence) {
  if (baseline.size() != params.num_states()) {
    throw InvalidInput("baseline distribution must have one entry per state");
  }
  check_distribution(baseline, "baseline distribution");
  const auto p = posterior_at(params, y, t);
  return divergence == Divergence::KL ? kl_divergence(baseline, p.probs)
                                      : hellinger_distance(baseline, p.probs);
}

double f1_path(const HmmParams& params, std::span<const int> y,
               const Matrix& coefficients, CoefficientMode mode) {
  const ViterbiResult vit = viterbi(params, y);
  const std::size_t q = params.num_states();
  if (coefficients.rows() != y.size() || coefficients.cols() != q) {
    throw InvalidInput("path coefficients do not match the instance size");
  }
  double total = 0.0;
  std::vector<double> mass(q);
  for (std::size_t t = 0; t < y.size(); ++t) {
    const auto row = vit.log_delta.row(t);
    if (mode == CoefficientMode::Fixed) {
      for (std::size_t i = 0; i < q; ++i) {
        if (coefficients(t, i) != 0.0) total += coefficients(t, i) * std::exp(row[i]);
      }
      continue;
    }
    const double norm = logsumexp(row);
    for (std::size_t i = 0; i < q; ++i) {
      mass[i] = norm == -std::numeric_limits<double>::infinity()
                    ? 1.0 / static_cast<double>(q)
                    : std::exp(row[i] - norm);
    }
    for (std::size_t i = 0; i < q; ++i) {
      const double c = coefficients(t, i);
      if (c > 0.0) total += mass[i];
      if (c < 0.0) total -= mass[i];
    }
  }
  return total;
}

double f1_value(const ProblemSpec& spec, const HmmParams& params, std::span<const int> y,
                std::span<const double> baseline) {
  switch (spec.kind) {
    case ProblemKind::StateAttraction:
      return f1_state(params, y, spec.target_time, spec.target_state, 1.0);
    case ProblemKind::StateRepulsion:
      return f1_state(params, y, spec.target_time, spec.target_state, -1.0);
    case ProblemKind::DistributionDisruption:
      return f1_disruption(params, y, spec.target_time, baseline, spec.divergence);
    case ProblemKind::PathAttraction:
      return f1_path(params, y, spec.coefficients, spec.coefficient_mode);
  }
  return 0.0;
}

std::vector<double> disruption_baseline(const ProblemSpec& spec, const HmmParams& params,
                                        std::span<const int> true_obs) {
  if (spec.kind != ProblemKind::DistributionDisruption) return {};
  if (spec.baseline_gamma) return *spec.baseline_gamma;
  return posterior_at(params, true_obs, spec.target_time).probs;
}

UtilitySample utility(const ProblemSpec& spec, const AttackVector& attack,
                      std::span<const int> true_obs, const OmegaSample& omega) {
  return PreparedOmega(spec, true_obs, omega).evaluate(attack);
}

PreparedOmega::PreparedOmega(const ProblemSpec& spec, std::span<const int> true_obs,
                             const OmegaSample& omega)
    : spec_(&spec),
      true_obs_(true_obs),
      omega_(&omega),
      baseline_(disruption_baseline(spec, omega.params, true_obs)) {}

double PreparedOmega::f1(const AttackVector& attack) const {
  if (attack.size() != true_obs_.size()) {
    throw InvalidInput("attack and observations differ in length");
  }
  thread_local ObsSequence y;
  y.resize(true_obs_.size());
  for (std::size_t t = 0; t < true_obs_.size(); ++t) {
    const int k = attack.choices[t];
    y[t] =
        (k != true_obs_[t] && omega_->rho(t, static_cast<std::size_t>(k))) ? k : true_obs_[t];
  }
  return f1_value(*spec_, omega_->params, y, baseline_);
}

UtilitySample PreparedOmega::evaluate(const AttackVector& attack) const {
  UtilitySample s;
  s.f1 = f1(attack);
  s.f2 = static_cast<double>(cost_f2(attack, true_obs_));
  s.u = spec_->w1 * s.f1 - spec_->w2 * s.f2;
  return s;
}

double f1_lower_bound(const ProblemSpec& spec) {
  switch (spec.kind) {
    case ProblemKind::StateAttraction:
    case ProblemKind::DistributionDisruption:
      return 0.0;
    case ProblemKind::StateRepulsion:
      return -1.0;
    case ProblemKind::PathAttraction: {
      // Normalized masses are at most 1 per t; raw Viterbi values are at most 1.
      double bound = 0.0;
      for (std::size_t t = 0; t < spec.coefficients.rows(); ++t) {
        double row_bound = 0.0;
        for (std::size_t i = 0; i < spec.coefficients.cols(); ++i) {
          const double c = spec.coefficients(t, i);
          if (spec.coefficient_mode == CoefficientMode::Fixed) {
            row_bound += std::min(c, 0.0);
          } else if (c < 0.0) {
            row_bound = -1.0;
          }
        }
        bound += row_bound;
      }
      return bound;
    }
  }
  return 0.0;
}

double utility_lower_bound(const ProblemSpec& spec, std::size_t horizon) {
  return spec.w1 * f1_lower_bound(spec) - spec.w2 * static_cast<double>(horizon);
}

double normalized_hamming(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size() || a.empty()) {
    throw InvalidInput("Hamming distance needs two nonempty sequences of equal length");
  }
  std::size_t diff = 0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (a[t] != b[t]) ++diff;
  }
  return static_cast<double>(diff) / static_cast<double>(a.size());
}

std::size_t default_impact_simulations(ProblemKind kind) {
  return kind == ProblemKind::StateAttraction || kind == ProblemKind::DistributionDisruption
             ? 5000
             : 1000;
}

ImpactSummary impact(const ProblemSpec& spec, const AttackVector& attack,
                     std::span<const int> true_obs, const HmmParams& true_params,
                     std::span<const double> success_probs, std::size_t simulations,
                     Rng& rng) {
  if (simulations == 0) {
    throw InvalidInput("impact needs at least one simulation");
  }
  if (success_probs.size() != true_params.num_emissions()) {
    throw InvalidInput("success rates must have one entry per emission");
  }
  true_params.check_observations(true_obs);
  spec.validate(true_params.num_states(), true_obs.size());
  const std::size_t horizon = true_obs.size();

  // Metric on a given sequence; impact is derived from it and the baseline.
  std::vector<double> clean_gamma;
  double clean_value = 0.0;
  StatePath goal = spec.target_path;
  switch (spec.kind) {
    case ProblemKind::StateAttraction:
    case ProblemKind::StateRepulsion:
      clean_value = posterior_at(true_params, true_obs, spec.target_time).probs[spec.target_state];
      break;
    case ProblemKind::DistributionDisruption:
      clean_gamma = posterior_at(true_params, true_obs, spec.target_time).probs;
      clean_value = 0.0;
      break;
    case ProblemKind::PathAttraction:
      if (goal.empty()) {
        // Without an explicit goal, take the encouraged state at each t.
        goal.assign(horizon, 0);
        for (std::size_t t = 0; t < horizon; ++t) {
          double best = -std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < spec.coefficients.cols(); ++i) {
            if (spec.coefficients(t, i) > best) {
              best = spec.coefficients(t, i);
              goal[t] = static_cast<int>(i);
            }
          }
        }
      }
      clean_value = normalized_hamming(viterbi(true_params, true_obs).best_path, goal);
      break;
  }

  ImpactSummary out;
  out.unperturbed_value = clean_value;
  out.samples.reserve(simulations);
  NeumaierSum impact_sum;
  NeumaierSum value_sum;
  NeumaierSum changed_sum;
  RhoMatrix rho(horizon, true_params.num_emissions());
  for (std::size_t m = 0; m < simulations; ++m) {
    for (std::size_t t = 0; t < horizon; ++t) {
      const auto k = static_cast<std::size_t>(attack.choices[t]);
      rho.set(t, k, rng.bernoulli(success_probs[k]));
    }
    const ObsSequence y = perturb(attack, true_obs, rho);
    double value = 0.0;
    double effect = 0.0;
    switch (spec.kind) {
      case ProblemKind::StateAttraction:
        value = posterior_at(true_params, y, spec.target_time).probs[spec.target_state];
        effect = value - clean_value;
        break;
      case ProblemKind::StateRepulsion:
        value = posterior_at(true_params, y, spec.target_time).probs[spec.target_state];
        effect = clean_value - value;
        break;
      case ProblemKind::DistributionDisruption:
        value = kl_divergence(clean_gamma, posterior_at(true_params, y, spec.target_time).probs);
        effect = value;
        break;
      case ProblemKind::PathAttraction:
        value = normalized_hamming(viterbi(true_params, y).best_path, goal);
        effect = value;
        break;
    }
    impact_sum.add(effect);
    value_sum.add(value);
    changed_sum.add(normalized_hamming(y, true_obs));
    out.samples.push_back(effect);
  }
  const auto n = static_cast<double>(simulations);
  out.mean = impact_sum.value() / n;
  out.perturbed_value = value_sum.value() / n;
  out.changed_fraction = changed_sum.value() / n;
  out.std = sample_std(out.samples, out.mean);
  return out;
}

}  // namespace hmmc
