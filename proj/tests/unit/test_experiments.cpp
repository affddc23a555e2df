#include <gtest/gtest.h>

#include <cmath>

#include "hmmc/cme.hpp"
#include "hmmc/error.hpp"
#include "hmmc/experiments.hpp"
#include "oracle.hpp"

using namespace hmmc;

namespace {

ExperimentInstance tiny_instance() {
  HmmParams p(Matrix::from_rows({{0.8, 0.2}, {0.3, 0.7}}),
              Matrix::from_rows({{0.9, 0.1}, {0.2, 0.8}}), {0.7, 0.3});
  AttackerBeliefs b = oracle::point_mass(p);
  return {"tiny", p, ObsSequence{0, 0, 1}, b};
}

}  // namespace

TEST(Designs, PublishedPoints) {
  EXPECT_EQ(design_points().size(), 10u);
  const DesignPoint& s2 = design_point("structure-2");
  EXPECT_EQ(s2.states, 10u);
  EXPECT_EQ(s2.emissions, 10u);
  EXPECT_EQ(s2.horizon, 30u);
  const DesignPoint& low = design_point("sec51-low");
  EXPECT_EQ(low.precision, 1e4);
  EXPECT_EQ(low.success, 0.95);
  EXPECT_EQ(design_point("sec51-high").precision, 100.0);
  EXPECT_THROW(design_point("structure-9"), InvalidInput);
  Rng rng(1);
  const auto inst = generate_instance(s2, rng);
  EXPECT_EQ(inst.observations.size(), 30u);
  EXPECT_EQ(inst.beliefs.num_emissions(), 10u);
  const auto u = generate_instance(design_point("uncertainty-4"), rng);
  EXPECT_EQ(u.true_params.num_states(), 20u);
}

TEST(Designs, SmallModelData) {
  EXPECT_EQ(sec51_observations(), (ObsSequence{4, 3, 5, 3, 4}));
  const HmmParams p = sec51_params();
  EXPECT_EQ(p.transition()(2, 0), 0.5);
  EXPECT_EQ(p.emission()(0, 0), 0.699);
  EXPECT_EQ(p.initial()[2], 0.2);
}

TEST(Designs, DefaultGrid) {
  const auto g = default_ratio_grid();
  ASSERT_EQ(g.size(), 50u);
  EXPECT_NEAR(g.front(), 1e-2, 1e-15);
  EXPECT_NEAR(g.back(), 1e3, 1e-9);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
}

TEST(RatioSweep, VanishingRatioKeepsData) {
  const DesignPoint& d = design_point("sec51-high");
  Rng gen(0);
  const auto inst = generate_instance(d, gen);
  for (const auto kind : {ProblemKind::StateAttraction, ProblemKind::StateRepulsion,
                          ProblemKind::DistributionDisruption}) {
    RatioSweepConfig cfg;
    cfg.ratios = {1e-6};
    cfg.solver = cme_solver(20);
    cfg.simulations = 50;
    const auto r = run_ratio_sweep(inst, d.problem(kind), cfg, Rng(1));
    EXPECT_EQ(r.points[0].attack, identity_attack(inst.observations));
    EXPECT_NEAR(r.points[0].impact.mean, 0.0, 1e-15);
    EXPECT_NEAR(r.points[0].impact.perturbed_value, r.points[0].impact.unperturbed_value, 1e-15);
  }
}

TEST(RatioSweep, SinglePointMatchesDirectSolve) {
  const auto inst = tiny_instance();
  const auto spec = ProblemSpec::state_attraction(2, 1, 1.0, 1.0);
  RatioSweepConfig cfg;
  cfg.ratios = {4.0};
  cfg.solver = cme_solver(3);
  cfg.simulations = 10;
  const auto r = run_ratio_sweep(inst, spec, cfg, Rng(2));
  const auto best = oracle::optimum(spec.with_weights(4.0, 1.0), inst.true_params,
                                    inst.observations);
  EXPECT_EQ(r.points[0].attack, best.attack);
  CmeConfig c;
  c.samples = 3;
  EXPECT_EQ(solve_cme(spec.with_weights(4.0, 1.0), inst.beliefs, inst.observations, c, Rng(2))
                .best_attack,
            r.points[0].attack);
}

TEST(RatioSweep, EqualAttacksShareImpactRecords) {
  const auto inst = tiny_instance();
  RatioSweepConfig cfg;
  cfg.ratios = {0.001, 0.002, 100.0, 200.0};
  cfg.solver = cme_solver(3);
  cfg.simulations = 30;
  const auto r = run_ratio_sweep(inst, ProblemSpec::state_attraction(2, 1, 1, 1), cfg, Rng(3));
  ASSERT_EQ(r.points.size(), 4u);
  EXPECT_EQ(r.points[2].attack, r.points[3].attack);
  EXPECT_EQ(r.points[2].impact.samples, r.points[3].impact.samples);
  EXPECT_LE(r.distinct_attacks(), 2u);
}

TEST(Perturbation, GroupCountsFollowClosedForm) {
  const auto inst = tiny_instance();
  const auto res =
      run_perturbation_analysis(inst, ProblemSpec::state_attraction(2, 1, 1, 1), 10, Rng(4));
  ASSERT_EQ(res.groups.size(), 4u);
  EXPECT_EQ(res.groups[0].count, 1u);
  EXPECT_EQ(res.groups[0].attacks[0], identity_attack(inst.observations));
  std::size_t total = 0;
  for (const auto& g : res.groups) {
    EXPECT_EQ(static_cast<double>(g.count), group_size(3, 2, g.changes));
    EXPECT_EQ(g.mean_impact.size(), g.count);
    for (const auto& a : g.attacks) EXPECT_EQ(cost_f2(a, inst.observations), int(g.changes));
    total += g.count;
  }
  EXPECT_EQ(total, 8u);
}

TEST(Perturbation, SmallModelSingleChangeIsDevastating) {
  const DesignPoint& d = design_point("sec51-low");
  Rng gen(0);
  const auto inst = generate_instance(d, gen);
  const auto res = run_perturbation_analysis(inst, d.problem(ProblemKind::StateAttraction), 300,
                                             Rng(5));
  ASSERT_EQ(res.groups[1].count, 25u);
  double best = 0.0;
  for (const double v : res.groups[1].mean_impact) best = std::max(best, v);
  EXPECT_GE(best, 0.7);
}

TEST(Benchmark, TableShapeAndSingleRepetition) {
  const auto inst = tiny_instance();
  BenchmarkConfig cfg;
  cfg.solvers = {SolverKind::Rme, SolverKind::ApsA};
  cfg.budgets = {Budget{5, std::nullopt}, Budget{50, std::nullopt}, Budget{500, std::nullopt}};
  cfg.repetitions = 1;
  cfg.evaluation_samples = 5;
  const auto cells =
      run_time_budget_benchmark(inst, ProblemSpec::state_attraction(2, 1, 1, 0.2), cfg, Rng(6));
  ASSERT_EQ(cells.size(), 6u);
  for (const auto& c : cells) {
    EXPECT_EQ(c.utilities.size(), 1u);
    EXPECT_EQ(c.two_std, 0.0);
  }
  cfg.budgets = {Budget{50, std::nullopt}, Budget{5, std::nullopt}};
  EXPECT_THROW(run_time_budget_benchmark(inst, ProblemSpec::state_attraction(2, 1, 1, 0.2), cfg,
                                         Rng(6)),
               InvalidInput);
}

TEST(Benchmark, QualityDoesNotDropWithBudget) {
  const auto inst = tiny_instance();
  BenchmarkConfig cfg;
  cfg.solvers = {SolverKind::Rme, SolverKind::ApsA, SolverKind::RnsA};
  cfg.budgets = {Budget{10, std::nullopt}, Budget{200, std::nullopt},
                 Budget{2000, std::nullopt}};
  cfg.repetitions = 4;
  cfg.evaluation_samples = 2;
  const auto cells =
      run_time_budget_benchmark(inst, ProblemSpec::state_attraction(2, 1, 1, 0.2), cfg, Rng(7));
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t b = 1; b < 3; ++b) {
      const auto& lo = cells[s * 3 + b - 1];
      const auto& hi = cells[s * 3 + b];
      EXPECT_EQ(lo.solver, hi.solver);
      EXPECT_GE(hi.mean + std::max(lo.two_std, hi.two_std) + 1e-12, lo.mean)
          << to_string(hi.solver);
    }
  }
}
