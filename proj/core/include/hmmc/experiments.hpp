#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmmc/solver.hpp"

namespace hmmc {

// A named configuration from the published experiments. Indices are
// 0-based; ratios are w1/w2.
struct DesignPoint {
  std::string name;
  std::size_t states = 0;
  std::size_t emissions = 0;
  std::size_t horizon = 0;
  double precision = 1e4;  // kappa
  double success = 0.95;   // lambda
  std::size_t attraction_time = 0;
  std::size_t attraction_state = 0;
  std::size_t repulsion_time = 0;
  std::size_t repulsion_state = 0;
  std::size_t disruption_time = 0;
  StatePath path_goal;
  double attraction_ratio = 1.0;
  double repulsion_ratio = 1.0;
  double disruption_ratio = 1.0;
  double path_ratio = 1.0;

  double ratio(ProblemKind kind) const;
  // Problem with w2 = 1 and w1 = ratio(kind).
  ProblemSpec problem(ProblemKind kind) const;
};

// sec51-low, sec51-high, structure-1..4 and uncertainty-1..4.
const std::vector<DesignPoint>& design_points();
// Throws InvalidInput for an unknown name.
const DesignPoint& design_point(const std::string& name);

// The small worked model: three states, six emissions, five observations.
HmmParams sec51_params();
ObsSequence sec51_observations();

struct ExperimentInstance {
  std::string name;
  HmmParams true_params;
  ObsSequence observations;
  AttackerBeliefs beliefs;
};

// The sec51 points use the fixed model. Others draw Dirichlet(1) rows and
// uniform observations from rng; beliefs are centered on the true model.
ExperimentInstance generate_instance(const DesignPoint& design, Rng& rng);

// 50 log-spaced points from 1e-2 to 1e3.
std::vector<double> default_ratio_grid();

struct RatioSweepConfig {
  std::vector<double> ratios = default_ratio_grid();
  SolverSpec solver = cme_solver(10000);
  std::optional<std::size_t> simulations;  // M; per-kind default when unset
};

struct RatioPoint {
  double ratio = 0.0;
  AttackVector attack;
  double expected_utility = 0.0;
  double standard_error = 0.0;
  ImpactSummary impact;
};

struct RatioSweepResult {
  ProblemKind kind = ProblemKind::StateAttraction;
  std::vector<RatioPoint> points;

  std::size_t distinct_attacks() const;
};

// Sweeps w1 = ratio with w2 = 1. With CME one table of component estimates
// serves the whole grid; other solvers are rerun per ratio from the same rng.
// Each chosen attack is then simulated under the true model with a common
// stream, so equal attacks get equal impact records.
RatioSweepResult run_ratio_sweep(const ExperimentInstance& instance,
                                 const ProblemSpec& problem, const RatioSweepConfig& config,
                                 const Rng& rng);

struct PerturbationGroup {
  std::size_t changes = 0;
  std::size_t count = 0;
  std::vector<AttackVector> attacks;
  std::vector<double> mean_impact;  // one per attack
};

struct PerturbationAnalysis {
  ProblemKind kind = ProblemKind::StateAttraction;
  std::vector<PerturbationGroup> groups;  // index = number of changed positions
};

// Enumerates every attack and records its mean impact over `simulations`
// runs, grouped by cost_f2. Throws CapacityError above the cap.
PerturbationAnalysis run_perturbation_analysis(const ExperimentInstance& instance,
                                               const ProblemSpec& problem,
                                               std::size_t simulations, const Rng& rng,
                                               std::size_t threads = 1,
                                               double cap = kDefaultEnumerationCap);

struct BenchmarkConfig {
  std::vector<SolverKind> solvers;
  std::vector<Budget> budgets;  // in increasing order
  std::size_t repetitions = 10;
  std::size_t evaluation_samples = 1000;
  int preset = 1;
  std::size_t threads = 1;
};

struct BenchmarkCell {
  SolverKind solver = SolverKind::Cme;
  Budget budget;
  std::vector<double> utilities;  // one per repetition, common evaluation draws
  std::vector<std::size_t> iterations;
  std::vector<AttackVector> attacks;
  double mean = 0.0;
  double two_std = 0.0;
};

// Repetition r runs from rng.split(r + 1) at every budget; returned attacks
// are scored on one fixed set of draws.
std::vector<BenchmarkCell> run_time_budget_benchmark(const ExperimentInstance& instance,
                                                     const ProblemSpec& problem,
                                                     const BenchmarkConfig& config,
                                                     const Rng& rng);

}  // namespace hmmc
