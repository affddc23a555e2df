#include "hmmc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "hmmc/error.hpp"
#include "parallel.hpp"
#include "stats.hpp"

namespace hmmc {
namespace {

constexpr std::uint64_t kImpactStream = 0x494d5041ULL;

DesignPoint structure_point(int index, std::size_t q, std::size_t x, std::size_t t,
                            std::size_t att_t, std::size_t att_i, std::size_t rep_t,
                            std::size_t rep_i, std::size_t dis_t) {
  DesignPoint d;
  d.name = "structure-" + std::to_string(index);
  d.states = q;
  d.emissions = x;
  d.horizon = t;
  d.precision = 1e4;
  d.success = 0.95;
  // Targets are given 1-based.
  d.attraction_time = att_t - 1;
  d.attraction_state = att_i - 1;
  d.repulsion_time = rep_t - 1;
  d.repulsion_state = rep_i - 1;
  d.disruption_time = dis_t - 1;
  d.path_goal.assign(t, 0);
  d.attraction_ratio = 20.0;
  d.repulsion_ratio = 15.0;
  d.disruption_ratio = 3.0;
  d.path_ratio = 2.55;
  return d;
}

DesignPoint uncertainty_point(int index, double success, double precision) {
  DesignPoint d = structure_point(index, 20, 20, 20, 17, 4, 16, 7, 16);
  d.name = "uncertainty-" + std::to_string(index);
  d.success = success;
  d.precision = precision;
  return d;
}

DesignPoint sec51_point(const std::string& name, double success, double precision) {
  DesignPoint d;
  d.name = name;
  d.states = 3;
  d.emissions = 6;
  d.horizon = 5;
  d.precision = precision;
  d.success = success;
  d.attraction_time = 2;
  d.attraction_state = 0;
  d.repulsion_time = 2;
  d.repulsion_state = 1;
  d.disruption_time = 2;
  d.path_goal = {2, 0, 0, 0, 2};
  // The worked example is studied as a sweep; this is a point on the
  // attacking side of the observed thresholds.
  d.attraction_ratio = 50.0;
  d.repulsion_ratio = 50.0;
  d.disruption_ratio = 50.0;
  d.path_ratio = 50.0;
  return d;
}

std::vector<DesignPoint> build_design_points() {
  return {
      sec51_point("sec51-low", 0.95, 1e4),
      sec51_point("sec51-high", 0.75, 100.0),
      structure_point(1, 30, 30, 30, 25, 4, 23, 9, 23),
      structure_point(2, 10, 10, 30, 21, 9, 29, 4, 29),
      structure_point(3, 10, 30, 10, 9, 7, 5, 6, 5),
      structure_point(4, 30, 10, 10, 9, 22, 9, 12, 9),
      uncertainty_point(1, 0.95, 1e4),
      uncertainty_point(2, 0.95, 100.0),
      uncertainty_point(3, 0.75, 1e4),
      uncertainty_point(4, 0.75, 100.0),
  };
}

ImpactSummary simulate(const ExperimentInstance& instance, const ProblemSpec& problem,
                       const AttackVector& attack, std::size_t simulations, const Rng& rng) {
  Rng stream = rng;
  return impact(problem, attack, instance.observations, instance.true_params,
                instance.beliefs.success_probs(), simulations, stream);
}

}  // namespace

double DesignPoint::ratio(ProblemKind kind) const {
  switch (kind) {
    case ProblemKind::StateAttraction: return attraction_ratio;
    case ProblemKind::StateRepulsion: return repulsion_ratio;
    case ProblemKind::DistributionDisruption: return disruption_ratio;
    case ProblemKind::PathAttraction: return path_ratio;
  }
  return 1.0;
}

ProblemSpec DesignPoint::problem(ProblemKind kind) const {
  const double w1 = ratio(kind);
  switch (kind) {
    case ProblemKind::StateAttraction:
      return ProblemSpec::state_attraction(attraction_time, attraction_state, w1, 1.0);
    case ProblemKind::StateRepulsion:
      return ProblemSpec::state_repulsion(repulsion_time, repulsion_state, w1, 1.0);
    case ProblemKind::DistributionDisruption:
      return ProblemSpec::disruption(disruption_time, w1, 1.0);
    case ProblemKind::PathAttraction:
      return ProblemSpec::path_attraction(path_goal, states, w1, 1.0);
  }
  throw InvalidInput("unknown problem kind");
}

const std::vector<DesignPoint>& design_points() {
  static const std::vector<DesignPoint> points = build_design_points();
  return points;
}

const DesignPoint& design_point(const std::string& name) {
  for (const auto& d : design_points()) {
    if (d.name == name) return d;
  }
  throw InvalidInput("unknown design point '" + name + "'");
}

HmmParams sec51_params() {
  return HmmParams(Matrix::from_rows({{0.85, 0.05, 0.1}, {0.05, 0.9, 0.05}, {0.5, 0.25, 0.25}}),
                   Matrix::from_rows({{0.699, 0.05, 0.1, 0.05, 0.1, 0.001},
                                      {0.001, 0.1, 0.1, 0.299, 0.3, 0.2},
                                      {0.1, 0.2, 0.1, 0.2, 0.1, 0.3}}),
                   {0.5, 0.3, 0.2});
}

ObsSequence sec51_observations() { return {4, 3, 5, 3, 4}; }

ExperimentInstance generate_instance(const DesignPoint& design, Rng& rng) {
  if (design.name.rfind("sec51", 0) == 0) {
    HmmParams params = sec51_params();
    AttackerBeliefs beliefs =
        beliefs_from_mean_precision(params, design.precision, design.success);
    return {design.name, std::move(params), sec51_observations(), std::move(beliefs)};
  }
  HmmParams params = random_params(design.states, design.emissions, rng, 1.0);
  ObsSequence obs(design.horizon);
  for (int& o : obs) o = static_cast<int>(rng.uniform_index(design.emissions));
  AttackerBeliefs beliefs = beliefs_from_mean_precision(params, design.precision, design.success);
  return {design.name, std::move(params), std::move(obs), std::move(beliefs)};
}

std::vector<double> default_ratio_grid() {
  std::vector<double> grid(50);
  const double lo = std::log10(1e-2);
  const double hi = std::log10(1e3);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / 49.0);
  }
  return grid;
}

std::size_t RatioSweepResult::distinct_attacks() const {
  std::set<AttackVector> seen;
  for (const auto& p : points) seen.insert(p.attack);
  return seen.size();
}

RatioSweepResult run_ratio_sweep(const ExperimentInstance& instance,
                                 const ProblemSpec& problem, const RatioSweepConfig& config,
                                 const Rng& rng) {
  if (config.ratios.empty()) {
    throw InvalidInput("ratio grid must not be empty");
  }
  const std::size_t m = config.simulations.value_or(default_impact_simulations(problem.kind));
  const Rng impact_rng = rng.split(kImpactStream);
  RatioSweepResult out;
  out.kind = problem.kind;

  std::optional<ComponentEstimates> table;
  if (config.solver.kind == SolverKind::Cme) {
    table = estimate_components(problem, instance.beliefs, instance.observations,
                                cme_config(config.solver), rng);
  }
  std::map<AttackVector, ImpactSummary> cache;
  for (const double ratio : config.ratios) {
    if (!(ratio >= 0.0) || !std::isfinite(ratio)) {
      throw InvalidInput("ratios must be finite and nonnegative");
    }
    RatioPoint point;
    point.ratio = ratio;
    if (table) {
      const auto idx = table->argmax(ratio, 1.0);
      point.attack = table->space.at(idx);
      point.expected_utility = table->utility(idx, ratio, 1.0);
      point.standard_error = ratio * table->f1_se[idx];
    } else {
      const SolverResult r = run_solver(config.solver, problem.with_weights(ratio, 1.0),
                                        instance.beliefs, instance.observations, rng);
      point.attack = r.best_attack;
      point.expected_utility = r.estimated_utility;
      point.standard_error = r.standard_error;
    }
    auto it = cache.find(point.attack);
    if (it == cache.end()) {
      it = cache.emplace(point.attack, simulate(instance, problem, point.attack, m, impact_rng))
               .first;
    }
    point.impact = it->second;
    out.points.push_back(std::move(point));
  }
  return out;
}

PerturbationAnalysis run_perturbation_analysis(const ExperimentInstance& instance,
                                               const ProblemSpec& problem,
                                               std::size_t simulations, const Rng& rng,
                                               std::size_t threads, double cap) {
  if (simulations == 0) {
    throw InvalidInput("perturbation analysis needs at least one simulation");
  }
  const auto& obs = instance.observations;
  AttackSpace space(obs.size(), instance.true_params.num_emissions(), cap);
  const auto size = static_cast<std::size_t>(space.size());
  std::vector<double> means(size);
  const Rng impact_rng = rng.split(kImpactStream);
  parallel_for(size, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      means[idx] = simulate(instance, problem, space.at(idx), simulations, impact_rng).mean;
    }
  });

  PerturbationAnalysis out;
  out.kind = problem.kind;
  out.groups.resize(obs.size() + 1);
  for (std::size_t g = 0; g < out.groups.size(); ++g) out.groups[g].changes = g;
  for (std::size_t idx = 0; idx < size; ++idx) {
    AttackVector z = space.at(idx);
    auto& group = out.groups[static_cast<std::size_t>(cost_f2(z, obs))];
    ++group.count;
    group.attacks.push_back(std::move(z));
    group.mean_impact.push_back(means[idx]);
  }
  return out;
}

std::vector<BenchmarkCell> run_time_budget_benchmark(const ExperimentInstance& instance,
                                                     const ProblemSpec& problem,
                                                     const BenchmarkConfig& config,
                                                     const Rng& rng) {
  if (config.repetitions == 0) {
    throw InvalidInput("benchmark needs at least one repetition");
  }
  if (config.budgets.empty() || config.solvers.empty()) {
    throw InvalidInput("benchmark needs at least one solver and one budget");
  }
  for (std::size_t i = 1; i < config.budgets.size(); ++i) {
    const Budget& a = config.budgets[i - 1];
    const Budget& b = config.budgets[i];
    const bool increasing = (a.seconds && b.seconds && *b.seconds > *a.seconds) ||
                            (a.iterations && b.iterations && *b.iterations > *a.iterations);
    if (!increasing) {
      throw InvalidInput("benchmark budgets must be increasing");
    }
  }
  const Rng eval = rng.split(kEvaluationStream);
  std::vector<BenchmarkCell> cells;
  for (const SolverKind kind : config.solvers) {
    for (const Budget& budget : config.budgets) {
      BenchmarkCell cell;
      cell.solver = kind;
      cell.budget = budget;
      SolverSpec spec;
      spec.kind = kind;
      spec.iterations = budget.iterations;
      spec.seconds = budget.seconds;
      spec.preset = config.preset;
      spec.threads = config.threads;
      for (std::size_t r = 0; r < config.repetitions; ++r) {
        const SolverResult res = run_solver(spec, problem, instance.beliefs,
                                            instance.observations, rng.split(r + 1));
        const UtilityEstimate est =
            estimate_utility(problem, instance.beliefs, instance.observations,
                             res.best_attack, config.evaluation_samples, eval);
        cell.utilities.push_back(est.mean);
        cell.iterations.push_back(res.diagnostics.iterations);
        cell.attacks.push_back(res.best_attack);
      }
      RunningStats stats;
      for (const double u : cell.utilities) stats.add(u);
      cell.mean = stats.mean();
      cell.two_std = 2.0 * stats.std();
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace hmmc
