#include <gtest/gtest.h>

#include <cmath>

#include "hmmc/attack.hpp"
#include "hmmc/attack_space.hpp"
#include "hmmc/error.hpp"
#include "hmmc/experiments.hpp"
#include "oracle.hpp"

using namespace hmmc;

namespace {

OmegaSample exact_omega(const HmmParams& p, std::size_t horizon, bool rho) {
  return {p, RhoMatrix(horizon, p.num_emissions(), rho)};
}

}  // namespace

TEST(Perturb, IdentityAndSuccessIndicators) {
  const ObsSequence x = sec51_observations();
  RhoMatrix rho(5, 6, false);
  EXPECT_EQ(perturb(identity_attack(x), x, RhoMatrix(5, 6, true)), x);
  AttackVector z = identity_attack(x);
  z.choices[0] = 1;
  EXPECT_EQ(perturb(z, x, rho)[0], 4);
  rho.set(0, 1, true);
  EXPECT_EQ(perturb(z, x, rho)[0], 1);
  const AttackVector all{{0, 1, 2, 3, 0}};
  EXPECT_EQ(perturb(all, x, RhoMatrix(5, 6, true)), all.choices);
}

TEST(Cost, CountsChangedPositions) {
  const ObsSequence x = sec51_observations();
  EXPECT_EQ(cost_f2(identity_attack(x), x), 0);
  AttackVector z = identity_attack(x);
  z.choices[1] = 0;
  z.choices[3] = 0;
  EXPECT_EQ(cost_f2(z, x), 2);
  EXPECT_EQ(cost_f2(AttackVector{{0, 0, 0, 0, 0}}, x), 5);
}

TEST(StateObjective, SmallModelRepulsionBaseline) {
  EXPECT_NEAR(f1_state(sec51_params(), sec51_observations(), 2, 1, -1.0), -0.95, 0.02);
  const HmmParams one(Matrix::from_rows({{1.0}}), Matrix::from_rows({{0.5, 0.5}}), {1.0});
  EXPECT_DOUBLE_EQ(f1_state(one, ObsSequence{0, 1}, 1, 0, 0.3), 0.3);
}

TEST(StateObjective, MatchesBruteForce) {
  Rng rng(12);
  for (int n = 0; n < 10; ++n) {
    const HmmParams p = random_params(3, 3, rng);
    auto [path, y] = sample_sequence(p, 4, rng);
    const auto b = oracle::brute(p, y);
    EXPECT_NEAR(f1_state(p, y, 2, 1, 1.0), b.posterior[2][1], 1e-10);
  }
}

TEST(Divergences, ClosedForms) {
  const std::vector<double> p{0.2, 0.8};
  EXPECT_EQ(kl_divergence(p, p), 0.0);
  EXPECT_EQ(hellinger_distance(p, p), 0.0);
  EXPECT_NEAR(kl_divergence(std::vector<double>{1, 0}, std::vector<double>{0.5, 0.5}),
              std::log(2.0), 1e-9);
  EXPECT_NEAR(hellinger_distance(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 1.0,
              1e-15);
}

TEST(Disruption, UnattackedIsZero) {
  const HmmParams p = sec51_params();
  const ObsSequence x = sec51_observations();
  const ProblemSpec spec = ProblemSpec::disruption(2, 1.0, 0.0);
  const auto base = disruption_baseline(spec, p, x);
  EXPECT_NEAR(f1_disruption(p, x, 2, base, Divergence::KL), 0.0, 1e-15);
  EXPECT_NEAR(f1_disruption(p, x, 2, base, Divergence::Hellinger), 0.0, 1e-7);
}

TEST(PathObjective, SingleStateAndDeterministicEmissions) {
  const HmmParams one(Matrix::from_rows({{1.0}}), Matrix::from_rows({{0.5, 0.5}}), {1.0});
  const ObsSequence y{0, 1, 0, 1};
  const auto spec = ProblemSpec::path_attraction(StatePath(4, 0), 1, 1.0, 0.0);
  EXPECT_NEAR(f1_path(one, y, spec.coefficients), 4.0, 1e-12);

  const HmmParams det(Matrix::from_rows({{0.5, 0.5}, {0.5, 0.5}}),
                      Matrix::from_rows({{1, 0}, {0, 1}}), {0.5, 0.5});
  Matrix c(2, 2);
  c(1, 1) = 1.0;
  EXPECT_NEAR(f1_path(det, ObsSequence{0, 1}, c), 1.0, 1e-12);
}

TEST(PathObjective, SmallModelMatchesIndependentScoring) {
  const auto spec = ProblemSpec::path_attraction({2, 0, 0, 0, 2}, 3, 1.0, 0.0);
  const HmmParams p = sec51_params();
  const ObsSequence x = sec51_observations();
  EXPECT_NEAR(f1_path(p, x, spec.coefficients), oracle::f1(spec, p, x, x), 1e-10);
  const auto repel = ProblemSpec::path_attraction({2, 0, 0, 0, 2}, 3, 1.0, 0.0, true);
  EXPECT_NEAR(f1_path(p, x, repel.coefficients), -oracle::f1(spec, p, x, x), 1e-10);
}

TEST(Utility, ComposesComponents) {
  const HmmParams p = sec51_params();
  const ObsSequence x = sec51_observations();
  const auto omega = exact_omega(p, 5, true);
  const auto spec = ProblemSpec::state_attraction(2, 0, 2.0, 0.3);
  const UtilitySample id = utility(spec, identity_attack(x), x, omega);
  EXPECT_EQ(id.f2, 0.0);
  EXPECT_NEAR(id.u, 2.0 * f1_state(p, x, 2, 0, 1.0), 1e-15);

  const AttackVector z{{4, 0, 0, 3, 4}};
  const UtilitySample s = utility(spec, z, x, omega);
  EXPECT_NEAR(s.u, oracle::utility(spec, p, x, z.choices), 1e-10);
  const UtilitySample cost_only = utility(spec.with_weights(0.0, 0.3), z, x, omega);
  EXPECT_NEAR(cost_only.u, -0.3 * 2, 1e-15);
  EXPECT_NEAR(PreparedOmega(spec, x, omega).evaluate(z).u, s.u, 1e-15);
}

TEST(Utility, LowerBoundHolds) {
  Rng rng(19);
  const HmmParams p = sec51_params();
  const ObsSequence x = sec51_observations();
  const auto omega = exact_omega(p, 5, true);
  for (const auto& spec : {ProblemSpec::state_attraction(2, 0, 1, 0.2),
                           ProblemSpec::state_repulsion(2, 1, 1, 0.2),
                           ProblemSpec::disruption(2, 1, 0.2),
                           ProblemSpec::path_attraction({2, 0, 0, 0, 2}, 3, 1, 0.2)}) {
    const double lb = utility_lower_bound(spec, 5);
    for (int n = 0; n < 50; ++n) {
      EXPECT_GE(utility(spec, random_attack(5, 6, rng), x, omega).u, lb);
    }
  }
}

TEST(Impact, IdentityAttackBaselines) {
  const HmmParams p = sec51_params();
  const ObsSequence x = sec51_observations();
  const std::vector<double> lambda(6, 0.95);
  Rng rng(3);
  const AttackVector id = identity_attack(x);
  EXPECT_EQ(impact(ProblemSpec::state_attraction(2, 0, 1, 1), id, x, p, lambda, 50, rng).mean,
            0.0);
  EXPECT_NEAR(impact(ProblemSpec::disruption(2, 1, 1), id, x, p, lambda, 50, rng).mean, 0.0,
              1e-15);
  const StatePath goal{2, 0, 0, 0, 2};
  const auto path = impact(ProblemSpec::path_attraction(goal, 3, 1, 1), id, x, p, lambda, 50, rng);
  EXPECT_DOUBLE_EQ(path.mean, normalized_hamming(viterbi(p, x).best_path, goal));
  EXPECT_EQ(path.changed_fraction, 0.0);
}

TEST(Impact, NormalizedHamming) {
  EXPECT_EQ(normalized_hamming(std::vector<int>{1, 2, 3}, std::vector<int>{1, 2, 3}), 0.0);
  EXPECT_EQ(normalized_hamming(std::vector<int>{0, 0, 0, 0, 0}, std::vector<int>{1, 1, 1, 1, 1}),
            1.0);
}

TEST(AttackSpace, LexicographicMixedRadix) {
  const AttackSpace s(3, 4);
  EXPECT_EQ(s.size(), 64u);
  EXPECT_EQ(s.at(0).choices, (std::vector<int>{0, 0, 0}));
  EXPECT_EQ(s.at(1).choices, (std::vector<int>{0, 0, 1}));
  EXPECT_EQ(s.at(63).choices, (std::vector<int>{3, 3, 3}));
  for (std::uint64_t i = 0; i + 1 < s.size(); ++i) {
    EXPECT_LT(s.at(i), s.at(i + 1));
    EXPECT_EQ(s.index_of(s.at(i)), i);
  }
  EXPECT_THROW(AttackSpace(30, 10), CapacityError);
}

TEST(AttackSpace, GroupSizesSumToTotal) {
  double total = 0.0;
  for (std::size_t g = 0; g <= 5; ++g) total += group_size(5, 6, g);
  EXPECT_EQ(total, std::pow(6.0, 5));
  EXPECT_EQ(group_size(5, 6, 1), 25.0);
}

TEST(ProblemSpec, ValidatesTargets) {
  EXPECT_THROW(ProblemSpec::state_attraction(5, 0, 1, 1).validate(3, 5), InvalidInput);
  EXPECT_THROW(ProblemSpec::state_attraction(0, 3, 1, 1).validate(3, 5), InvalidInput);
  EXPECT_NO_THROW(ProblemSpec::disruption(4, 1, 1).validate(3, 5));
  EXPECT_EQ(parse_problem_kind(to_string(ProblemKind::PathAttraction)),
            ProblemKind::PathAttraction);
}
