#include "hmmc/solver.hpp"

#include "hmmc/error.hpp"

namespace hmmc {

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Cme: return "cme";
    case SolverKind::Rme: return "rme";
    case SolverKind::ApsA: return "aps-a";
    case SolverKind::ApsB: return "aps-b";
    case SolverKind::RnsA: return "rns-a";
    case SolverKind::RnsB: return "rns-b";
  }
  return "?";
}

SolverKind parse_solver_kind(const std::string& name) {
  if (name == "cme") return SolverKind::Cme;
  if (name == "rme") return SolverKind::Rme;
  if (name == "aps-a") return SolverKind::ApsA;
  if (name == "aps-b") return SolverKind::ApsB;
  if (name == "rns-a") return SolverKind::RnsA;
  if (name == "rns-b") return SolverKind::RnsB;
  throw InvalidInput("unknown solver '" + name +
                     "' (expected cme, rme, aps-a, aps-b, rns-a or rns-b)");
}

CmeConfig cme_config(const SolverSpec& s) {
  CmeConfig c;
  if (s.samples) c.samples = *s.samples;
  if (s.iterations) c.samples = *s.iterations;
  c.threads = s.threads;
  return c;
}

RmeConfig rme_config(const SolverSpec& s) {
  RmeConfig c;
  if (s.samples) c.samples = *s.samples;
  c.budget.iterations = s.iterations;
  c.budget.seconds = s.seconds;
  return c;
}

namespace {

template <typename Config>
void apply_budget(const SolverSpec& s, Config& c) {
  if (s.iterations || s.seconds) {
    c.budget.iterations = s.iterations;
    c.budget.seconds = s.seconds;
  }
  if (s.evaluation_samples) c.evaluation_samples = *s.evaluation_samples;
}

}  // namespace

ApsConfig aps_config(const SolverSpec& s) {
  ApsConfig c = s.kind == SolverKind::ApsB ? aps_b_config() : aps_a_config();
  apply_budget(s, c);
  return c;
}

RnsConfig rns_config(const SolverSpec& s) {
  RnsConfig c = hyperparameter_presets(
      s.kind == SolverKind::RnsB ? RnsVariant::B : RnsVariant::A, s.preset);
  apply_budget(s, c);
  return c;
}

SolverResult run_solver(const SolverSpec& solver, const ProblemSpec& spec,
                        const BeliefModel& beliefs, std::span<const int> true_obs,
                        const Rng& rng) {
  switch (solver.kind) {
    case SolverKind::Cme:
      return solve_cme(spec, beliefs, true_obs, cme_config(solver), rng);
    case SolverKind::Rme:
      return solve_rme(spec, beliefs, true_obs, rme_config(solver), rng);
    case SolverKind::ApsA:
    case SolverKind::ApsB:
      return solve_aps(spec, beliefs, true_obs, aps_config(solver), rng);
    case SolverKind::RnsA:
    case SolverKind::RnsB:
      return solve_rns(spec, beliefs, true_obs, rns_config(solver), rng);
  }
  throw InvalidInput("unknown solver kind");
}

}  // namespace hmmc
