#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hmmc/experiments.hpp"

namespace hmmc {

// How the attacker beliefs were written, kept so files round-trip in the
// form they were authored.
struct BeliefSource {
  bool explicit_rows = false;
  double precision = 1e4;  // kInfinitePrecision for point masses
  std::vector<double> success;
  bool scalar_success = true;

  friend bool operator==(const BeliefSource&, const BeliefSource&) = default;
};

struct NamedProblem {
  std::string name;
  ProblemSpec spec;
};

struct NamedSolver {
  std::string name;
  SolverSpec spec;
};

// Everything an experiment needs. Indices inside are 0-based; files use
// 1-based times, states and emissions.
struct InstanceFile {
  std::string name;
  HmmParams hmm;
  ObsSequence observations;
  AttackerBeliefs beliefs;
  BeliefSource belief_source;
  std::vector<NamedProblem> problems;
  std::vector<NamedSolver> solvers;
  std::optional<std::uint64_t> seed;

  // Throws InvalidInput when no problem has this name.
  const NamedProblem& problem(const std::string& problem_name) const;
};

// Throws ValidationError: positioned ("line:column") for malformed JSON,
// field paths such as "hmm.transition[1]" for invalid content.
InstanceFile parse_instance(const std::string& text);
InstanceFile load_instance(const std::string& path);

// Canonical JSON: sorted keys, two-space indent, floats rounded to 12
// significant digits.
std::string serialize_instance(const InstanceFile& instance);
void save_instance(const std::string& path, const InstanceFile& instance);

// Builds an instance file from a design point and its generated data, with
// all four problems.
InstanceFile instance_from_design(const DesignPoint& design,
                                  const ExperimentInstance& instance,
                                  std::optional<std::uint64_t> seed);

// Re-emits any JSON text in canonical form.
std::string canonical_json(const std::string& text);

// Rounds to 12 significant digits, the precision used in every output.
double round12(double x);
std::string format_double(double x);

// RFC 4180: fields are quoted when they contain a comma, quote, CR or LF;
// records end with CRLF.
std::string csv_field(const std::string& field);
std::string csv_row(const std::vector<std::string>& fields);

// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t value);

struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string version;
};

std::string library_version();

// Attack and state sequences as 1-based text, e.g. "5 4 6 4 5".
std::string sequence_string(const std::vector<int>& values);

}  // namespace hmmc
