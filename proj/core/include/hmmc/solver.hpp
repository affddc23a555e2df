#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "hmmc/aps.hpp"
#include "hmmc/cme.hpp"
#include "hmmc/rns.hpp"

namespace hmmc {

enum class SolverKind { Cme, Rme, ApsA, ApsB, RnsA, RnsB };

std::string to_string(SolverKind kind);
// Accepts cme, rme, aps-a, aps-b, rns-a, rns-b.
SolverKind parse_solver_kind(const std::string& name);

// Uniform front end over the solver configs. Unset fields keep each
// solver's defaults; `iterations` means omega samples for CME, candidates
// for RME, sweeps for APS and experiments for R&S.
struct SolverSpec {
  SolverKind kind = SolverKind::Cme;
  std::optional<std::size_t> samples;  // CME N, or RME draws per candidate
  std::optional<std::size_t> iterations;
  std::optional<double> seconds;
  int preset = 1;  // R&S hyperparameter combination
  std::size_t threads = 1;
  std::optional<std::size_t> evaluation_samples;
};

inline SolverSpec cme_solver(std::size_t samples) {
  SolverSpec s;
  s.kind = SolverKind::Cme;
  s.samples = samples;
  return s;
}

CmeConfig cme_config(const SolverSpec& s);
RmeConfig rme_config(const SolverSpec& s);
ApsConfig aps_config(const SolverSpec& s);
RnsConfig rns_config(const SolverSpec& s);

SolverResult run_solver(const SolverSpec& solver, const ProblemSpec& spec,
                        const BeliefModel& beliefs, std::span<const int> true_obs,
                        const Rng& rng);

}  // namespace hmmc
