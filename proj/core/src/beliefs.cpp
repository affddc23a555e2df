#include "hmmc/beliefs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hmmc/error.hpp"

namespace hmmc {
namespace {

void check_row(const DirichletRow& row, std::size_t width, const std::string& name) {
  if (row.values.size() != width) {
    throw InvalidInput(name + " has " + std::to_string(row.values.size()) +
                       " entries, expected " + std::to_string(width));
  }
  double total = 0.0;
  for (const double v : row.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidInput(name + " has a negative or non-finite parameter");
    }
    total += v;
  }
  if (row.point_mass) {
    if (std::abs(total - 1.0) > kStochasticTolerance) {
      throw InvalidInput(name + " is a point mass but does not sum to 1");
    }
  } else if (!(total > 0.0)) {
    throw InvalidInput(name + " needs at least one positive concentration");
  }
}

Matrix sample_rows(const std::vector<DirichletRow>& rows, std::size_t width, Rng& rng) {
  Matrix m(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto draw = rows[i].sample(rng);
    std::copy(draw.begin(), draw.end(), m.row(i).begin());
  }
  return m;
}

std::vector<DirichletRow> scaled_rows(const Matrix& m, double precision) {
  std::vector<DirichletRow> out;
  out.reserve(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    std::vector<double> v(r.begin(), r.end());
    if (std::isinf(precision)) {
      out.push_back(DirichletRow::exact(std::move(v)));
    } else {
      for (double& x : v) x *= precision;
      out.push_back(DirichletRow::concentration(std::move(v)));
    }
  }
  return out;
}

}  // namespace

DirichletRow DirichletRow::concentration(std::vector<double> alpha) {
  return DirichletRow{std::move(alpha), false};
}

DirichletRow DirichletRow::exact(std::vector<double> probs) {
  return DirichletRow{std::move(probs), true};
}

std::vector<double> DirichletRow::mean() const {
  std::vector<double> out(values);
  if (point_mass) return out;
  double total = 0.0;
  for (const double v : out) total += v;
  for (double& v : out) v /= total;
  return out;
}

std::vector<double> DirichletRow::sample(Rng& rng) const {
  if (point_mass) return values;
  std::vector<double> alpha;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > 0.0) {
      alpha.push_back(values[i]);
      where.push_back(i);
    }
  }
  std::vector<double> out(values.size(), 0.0);
  const auto draw = rng.dirichlet(alpha);
  for (std::size_t j = 0; j < where.size(); ++j) out[where[j]] = draw[j];
  return out;
}

AttackerBeliefs::AttackerBeliefs(std::vector<DirichletRow> transition_priors,
                                 std::vector<DirichletRow> emission_priors,
                                 DirichletRow initial_prior,
                                 std::vector<double> success_probs)
    : transition_priors_(std::move(transition_priors)),
      emission_priors_(std::move(emission_priors)),
      initial_prior_(std::move(initial_prior)),
      success_probs_(std::move(success_probs)) {
  const std::size_t q = transition_priors_.size();
  const std::size_t x = success_probs_.size();
  if (q == 0 || x == 0) {
    throw InvalidInput("beliefs need at least one state and one emission");
  }
  if (emission_priors_.size() != q) {
    throw InvalidInput("emission priors must have one row per state");
  }
  for (std::size_t i = 0; i < q; ++i) {
    check_row(transition_priors_[i], q, "transition prior " + std::to_string(i + 1));
    check_row(emission_priors_[i], x, "emission prior " + std::to_string(i + 1));
  }
  check_row(initial_prior_, q, "initial prior");
  for (std::size_t k = 0; k < x; ++k) {
    const double p = success_probs_[k];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidInput("success probability " + std::to_string(k + 1) +
                         " outside [0, 1]");
    }
  }
}

Matrix AttackerBeliefs::sample_transition(Rng& rng) const {
  return sample_rows(transition_priors_, num_states(), rng);
}

Matrix AttackerBeliefs::sample_emission(Rng& rng) const {
  return sample_rows(emission_priors_, num_emissions(), rng);
}

std::vector<double> AttackerBeliefs::sample_initial(Rng& rng) const {
  return initial_prior_.sample(rng);
}

RhoMatrix AttackerBeliefs::sample_rho(std::size_t horizon, Rng& rng) const {
  RhoMatrix rho(horizon, num_emissions());
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t k = 0; k < num_emissions(); ++k) {
      rho.set(t, k, rng.bernoulli(success_probs_[k]));
    }
  }
  return rho;
}

HmmParams AttackerBeliefs::mean_params() const {
  std::vector<std::vector<double>> a;
  std::vector<std::vector<double>> b;
  for (const auto& r : transition_priors_) a.push_back(r.mean());
  for (const auto& r : emission_priors_) b.push_back(r.mean());
  return HmmParams::unchecked(Matrix::from_rows(a), Matrix::from_rows(b),
                              initial_prior_.mean());
}

AttackerBeliefs beliefs_from_mean_precision(const HmmParams& mean, double precision,
                                            std::vector<double> success) {
  if (!(precision > 0.0) || std::isnan(precision)) {
    throw InvalidInput("Dirichlet precision must be positive");
  }
  if (success.size() != mean.num_emissions()) {
    throw InvalidInput("success rates must have one entry per emission");
  }
  Matrix pi(1, mean.num_states());
  std::copy(mean.initial().begin(), mean.initial().end(), pi.row(0).begin());
  return AttackerBeliefs(scaled_rows(mean.transition(), precision),
                         scaled_rows(mean.emission(), precision),
                         scaled_rows(pi, precision).front(), std::move(success));
}

AttackerBeliefs beliefs_from_mean_precision(const HmmParams& mean, double precision,
                                            double success) {
  return beliefs_from_mean_precision(
      mean, precision, std::vector<double>(mean.num_emissions(), success));
}

OmegaSample sample_omega(const BeliefModel& beliefs, std::size_t horizon, Rng& rng) {
  if (horizon == 0) {
    throw InvalidInput("horizon must be at least 1");
  }
  Matrix a = beliefs.sample_transition(rng);
  Matrix b = beliefs.sample_emission(rng);
  std::vector<double> pi = beliefs.sample_initial(rng);
  RhoMatrix rho = beliefs.sample_rho(horizon, rng);
  return OmegaSample{HmmParams::unchecked(std::move(a), std::move(b), std::move(pi)),
                     std::move(rho)};
}

}  // namespace hmmc
