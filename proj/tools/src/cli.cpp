#include "hmmc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hmmc/error.hpp"
#include "hmmc/experiments.hpp"
#include "hmmc/io.hpp"
#include "json.hpp"

namespace hmmc::cli {
namespace {

using json = nlohmann::json;

constexpr const char* kSeedEnv = "HMM_CORRUPT_SEED";

struct Common {
  std::string instance;
  std::optional<std::uint64_t> seed;
  std::string solver;
  std::optional<double> budget_seconds;
  std::optional<std::size_t> iterations;
  std::string out;
  std::string format = "json";
  std::size_t threads = 1;
  std::string problem;
};

void add_common(CLI::App* cmd, Common& c, bool needs_instance = true) {
  if (needs_instance) {
    cmd->add_option("--instance,-i", c.instance, "Instance JSON file")->required();
  }
  cmd->add_option("--seed", c.seed, "Master seed (overrides HMM_CORRUPT_SEED and the file)");
  cmd->add_option("--out,-o", c.out, "Write results to this file instead of stdout");
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
}

void add_solver_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--solver", c.solver, "cme, rme, aps-a, aps-b, rns-a or rns-b")
      ->check(CLI::IsMember({"cme", "rme", "aps-a", "aps-b", "rns-a", "rns-b"}));
  cmd->add_option("--budget-seconds", c.budget_seconds, "Wall-clock budget")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--iterations", c.iterations,
                  "Samples (cme), candidates (rme), sweeps (aps) or experiments (rns)");
  cmd->add_option("--problem", c.problem, "Problem name from the instance (default: first)");
}

std::uint64_t resolve_seed(const Common& c, const InstanceFile* inst) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == nullptr || *end != '\0') {
      throw ValidationError(kSeedEnv, "expected a nonnegative integer");
    }
    return v;
  }
  if (inst != nullptr && inst->seed) return *inst->seed;
  return 0;
}

// Hash of the canonical instance plus the command line minus output paths.
std::uint64_t config_hash(const InstanceFile* inst, int argc, const char* const* argv) {
  std::string text = inst != nullptr ? serialize_instance(*inst) : std::string();
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--out" || a == "-o") {
      ++i;
      continue;
    }
    if (a.rfind("--out=", 0) == 0) continue;
    text += '\0';
    text += a;
  }
  return fnv1a(text);
}

json provenance_json(const Provenance& p) {
  return {{"config_hash", hex64(p.config_hash)}, {"seed", p.seed}, {"version", p.version}};
}

json seq(const std::vector<int>& v) {
  json out = json::array();
  for (const int x : v) out.push_back(x + 1);
  return out;
}

json vec(const std::vector<double>& v) {
  json out = json::array();
  for (const double x : v) out.push_back(x);
  return out;
}

void emit(const std::string& text, const Common& c, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) throw ValidationError(c.out, "cannot write output file");
  file << text;
}

std::string dump(const json& j) { return canonical_json(j.dump()); }

const NamedProblem& pick_problem(const InstanceFile& inst, const std::string& name) {
  if (!name.empty()) return inst.problem(name);
  if (inst.problems.empty()) throw InvalidInput("instance defines no problems");
  return inst.problems.front();
}

SolverSpec solver_spec(const Common& c, const InstanceFile& inst, bool solver_given,
                       std::optional<std::size_t> samples, std::optional<int> preset,
                       std::optional<std::size_t> eval_samples) {
  SolverSpec s;
  // A matching solver block in the instance supplies defaults.
  const SolverKind kind = parse_solver_kind(c.solver);
  for (const auto& named : inst.solvers) {
    if (named.spec.kind == kind || (!solver_given && &named == &inst.solvers.front())) {
      s = named.spec;
      break;
    }
  }
  if (solver_given || inst.solvers.empty()) s.kind = kind;
  if (samples) s.samples = samples;
  if (c.iterations) s.iterations = c.iterations;
  if (c.budget_seconds) s.seconds = c.budget_seconds;
  if (preset) s.preset = *preset;
  if (eval_samples) s.evaluation_samples = eval_samples;
  s.threads = c.threads;
  return s;
}

json diagnostics_json(const SolverDiagnostics& d, bool timing) {
  json out{{"iterations", d.iterations}, {"samples", d.samples}, {"trace_final",
           d.trace.empty() ? 0.0 : d.trace.back()}};
  if (!d.acceptance_rates.empty()) {
    out["acceptance_rates"] = {{"transition", d.acceptance_rates[0]},
                               {"emission", d.acceptance_rates[1]},
                               {"initial", d.acceptance_rates[2]},
                               {"success", d.acceptance_rates[3]}};
    out["copies"] = d.final_copies;
    json freq = json::array();
    for (const auto& row : d.coordinate_frequencies) freq.push_back(vec(row));
    out["coordinate_frequencies"] = freq;
  }
  if (d.final_loss != 0.0) out["final_loss"] = d.final_loss;
  if (timing) out["wall_seconds"] = d.wall_seconds;
  return out;
}

int run_infer(const Common& c, bool smooth, std::optional<std::size_t> t, bool filter,
              bool decode, int argc, const char* const* argv, std::ostream& out) {
  const InstanceFile inst = load_instance(c.instance);
  const Provenance prov{config_hash(&inst, argc, argv), resolve_seed(c, &inst),
                        library_version()};
  const bool all = !smooth && !filter && !decode;
  const auto fb = forward_backward(inst.hmm, inst.observations);
  json j{{"provenance", provenance_json(prov)}, {"log_likelihood", fb.log_likelihood}};
  std::string csv = csv_row({"quantity", "t", "state", "value", "config_hash", "seed"});
  const std::string h = hex64(prov.config_hash);
  const std::string sd = std::to_string(prov.seed);
  csv += csv_row({"log_likelihood", "", "", format_double(fb.log_likelihood), h, sd});

  if (smooth || all) {
    std::vector<std::size_t> times;
    if (t) {
      if (*t < 1 || *t > inst.observations.size()) {
        throw InvalidInput("--t " + std::to_string(*t) + " outside 1.." +
                           std::to_string(inst.observations.size()));
      }
      times.push_back(*t - 1);
    } else {
      for (std::size_t s = 0; s < inst.observations.size(); ++s) times.push_back(s);
    }
    json rows = json::array();
    for (const std::size_t s : times) {
      const auto d = smoothing_dist(fb, s);
      rows.push_back({{"t", s + 1}, {"probs", vec(d.probs)}, {"zero_likelihood", d.zero_likelihood}});
      for (std::size_t i = 0; i < d.probs.size(); ++i) {
        csv += csv_row({"smoothing", std::to_string(s + 1), std::to_string(i + 1),
                        format_double(d.probs[i]), h, sd});
      }
    }
    j["smoothing"] = rows;
  }
  if (filter || all) {
    const auto d = filtering_dist(fb);
    j["filtering"] = vec(d.probs);
    for (std::size_t i = 0; i < d.probs.size(); ++i) {
      csv += csv_row({"filtering", std::to_string(inst.observations.size()),
                      std::to_string(i + 1), format_double(d.probs[i]), h, sd});
    }
  }
  if (decode || all) {
    const auto v = viterbi(inst.hmm, inst.observations);
    j["decoding"] = {{"path", seq(v.best_path)}, {"log_prob", v.best_log_prob}};
    for (std::size_t s = 0; s < v.best_path.size(); ++s) {
      csv += csv_row({"decoding", std::to_string(s + 1), std::to_string(v.best_path[s] + 1),
                      format_double(v.best_log_prob), h, sd});
    }
  }
  emit(c.format == "csv" ? csv : dump(j), c, out);
  return kOk;
}

int run_attack(const Common& c, bool solver_given, std::optional<std::size_t> samples,
               std::optional<int> preset, std::optional<std::size_t> eval_samples,
               std::optional<std::size_t> simulations, bool timing, int argc,
               const char* const* argv, std::ostream& out) {
  const InstanceFile inst = load_instance(c.instance);
  const Provenance prov{config_hash(&inst, argc, argv), resolve_seed(c, &inst),
                        library_version()};
  const NamedProblem& problem = pick_problem(inst, c.problem);
  const SolverSpec spec = solver_spec(c, inst, solver_given, samples, preset, eval_samples);
  const Rng rng(prov.seed);
  const SolverResult r =
      run_solver(spec, problem.spec, inst.beliefs, inst.observations, rng);

  const std::size_t m = simulations.value_or(default_impact_simulations(problem.spec.kind));
  Rng impact_rng = rng.split(0x494d5041ULL);
  std::optional<ImpactSummary> imp;
  if (m > 0) {
    imp = impact(problem.spec, r.best_attack, inst.observations, inst.hmm,
                 inst.beliefs.success_probs(), m, impact_rng);
  }
  const int changes = cost_f2(r.best_attack, inst.observations);
  if (c.format == "csv") {
    std::string csv = csv_row({"problem", "algorithm", "design_point", "attack", "impact",
                               "changed_fraction", "expected_utility", "standard_error",
                               "config_hash", "seed"});
    csv += csv_row({problem.name, r.solver, inst.name, sequence_string(r.best_attack.choices),
                    imp ? format_double(imp->mean) : "",
                    imp ? format_double(imp->changed_fraction) : "",
                    format_double(r.estimated_utility), format_double(r.standard_error),
                    hex64(prov.config_hash), std::to_string(prov.seed)});
    emit(csv, c, out);
    return kOk;
  }
  json j{{"provenance", provenance_json(prov)},
         {"problem", problem.name},
         {"kind", to_string(problem.spec.kind)},
         {"design_point", inst.name},
         {"solver", r.solver},
         {"attack", seq(r.best_attack.choices)},
         {"changes", changes},
         {"estimated_utility", r.estimated_utility},
         {"standard_error", r.standard_error},
         {"diagnostics", diagnostics_json(r.diagnostics, timing)}};
  if (imp) {
    j["impact"] = {{"mean", imp->mean},
                   {"std", imp->std},
                   {"changed_fraction", imp->changed_fraction},
                   {"perturbed_value", imp->perturbed_value},
                   {"unperturbed_value", imp->unperturbed_value},
                   {"simulations", m}};
  }
  emit(dump(j), c, out);
  return kOk;
}

ExperimentInstance experiment_of(const InstanceFile& inst) {
  return {inst.name, inst.hmm, inst.observations, inst.beliefs};
}

int run_sweep(const Common& c, bool solver_given, std::optional<std::size_t> samples,
              std::optional<std::size_t> simulations, const std::vector<double>& ratios,
              std::size_t grid_points, double ratio_min, double ratio_max, int argc,
              const char* const* argv, std::ostream& out) {
  const InstanceFile inst = load_instance(c.instance);
  const Provenance prov{config_hash(&inst, argc, argv), resolve_seed(c, &inst),
                        library_version()};
  const NamedProblem& problem = pick_problem(inst, c.problem);
  RatioSweepConfig cfg;
  if (!ratios.empty()) {
    cfg.ratios = ratios;
  } else {
    if (grid_points == 0 || !(ratio_min > 0.0) || !(ratio_max >= ratio_min)) {
      throw InvalidInput("ratio grid needs points > 0 and 0 < min <= max");
    }
    cfg.ratios.clear();
    const double lo = std::log10(ratio_min);
    const double hi = std::log10(ratio_max);
    for (std::size_t i = 0; i < grid_points; ++i) {
      const double f = grid_points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(grid_points - 1);
      cfg.ratios.push_back(std::pow(10.0, lo + (hi - lo) * f));
    }
  }
  cfg.solver = solver_spec(c, inst, solver_given, samples.value_or(10000), std::nullopt,
                           std::nullopt);
  cfg.simulations = simulations;
  const RatioSweepResult res = run_ratio_sweep(experiment_of(inst), problem.spec, cfg, Rng(prov.seed));

  const std::string h = hex64(prov.config_hash);
  const std::string sd = std::to_string(prov.seed);
  if (c.format == "csv") {
    std::string csv = csv_row({"ratio", "attack", "changes", "expected_utility",
                               "standard_error", "impact_mean", "impact_std",
                               "perturbed_value", "changed_fraction", "config_hash", "seed"});
    for (const auto& p : res.points) {
      csv += csv_row({format_double(p.ratio), sequence_string(p.attack.choices),
                      std::to_string(cost_f2(p.attack, inst.observations)),
                      format_double(p.expected_utility), format_double(p.standard_error),
                      format_double(p.impact.mean), format_double(p.impact.std),
                      format_double(p.impact.perturbed_value),
                      format_double(p.impact.changed_fraction), h, sd});
    }
    emit(csv, c, out);
    return kOk;
  }
  json pts = json::array();
  for (const auto& p : res.points) {
    pts.push_back({{"ratio", p.ratio},
                   {"attack", seq(p.attack.choices)},
                   {"expected_utility", p.expected_utility},
                   {"standard_error", p.standard_error},
                   {"impact", {{"mean", p.impact.mean},
                               {"std", p.impact.std},
                               {"perturbed_value", p.impact.perturbed_value},
                               {"changed_fraction", p.impact.changed_fraction}}}});
  }
  json j{{"provenance", provenance_json(prov)},
         {"problem", problem.name},
         {"kind", to_string(res.kind)},
         {"distinct_attacks", res.distinct_attacks()},
         {"points", pts}};
  emit(dump(j), c, out);
  return kOk;
}

int run_perturbation(const Common& c, std::optional<std::size_t> simulations, int argc,
                     const char* const* argv, std::ostream& out) {
  const InstanceFile inst = load_instance(c.instance);
  const Provenance prov{config_hash(&inst, argc, argv), resolve_seed(c, &inst),
                        library_version()};
  const NamedProblem& problem = pick_problem(inst, c.problem);
  const std::size_t m = simulations.value_or(default_impact_simulations(problem.spec.kind));
  const PerturbationAnalysis res = run_perturbation_analysis(
      experiment_of(inst), problem.spec, m, Rng(prov.seed), c.threads);
  const std::string h = hex64(prov.config_hash);
  const std::string sd = std::to_string(prov.seed);
  if (c.format == "csv") {
    std::string csv =
        csv_row({"changes", "attack", "mean_impact", "config_hash", "seed"});
    for (const auto& g : res.groups) {
      for (std::size_t i = 0; i < g.attacks.size(); ++i) {
        csv += csv_row({std::to_string(g.changes), sequence_string(g.attacks[i].choices),
                        format_double(g.mean_impact[i]), h, sd});
      }
    }
    emit(csv, c, out);
    return kOk;
  }
  json groups = json::array();
  for (const auto& g : res.groups) {
    double best = g.mean_impact.empty() ? 0.0 : g.mean_impact.front();
    for (const double v : g.mean_impact) best = std::max(best, v);
    groups.push_back({{"changes", g.changes},
                      {"count", g.count},
                      {"max_mean_impact", best},
                      {"mean_impact", vec(g.mean_impact)}});
  }
  json j{{"provenance", provenance_json(prov)},
         {"problem", problem.name},
         {"kind", to_string(res.kind)},
         {"simulations", m},
         {"groups", groups}};
  emit(dump(j), c, out);
  return kOk;
}

int run_bench(const Common& c, const std::vector<std::string>& solvers,
              const std::vector<double>& seconds, const std::vector<std::size_t>& iterations,
              std::size_t repetitions, std::size_t eval_samples, int preset, int argc,
              const char* const* argv, std::ostream& out) {
  const InstanceFile inst = load_instance(c.instance);
  const Provenance prov{config_hash(&inst, argc, argv), resolve_seed(c, &inst),
                        library_version()};
  const NamedProblem& problem = pick_problem(inst, c.problem);
  BenchmarkConfig cfg;
  for (const auto& s : solvers) cfg.solvers.push_back(parse_solver_kind(s));
  if (cfg.solvers.empty()) cfg.solvers.push_back(parse_solver_kind(c.solver));
  for (const double s : seconds) cfg.budgets.push_back(Budget{std::nullopt, s});
  for (const std::size_t n : iterations) cfg.budgets.push_back(Budget{n, std::nullopt});
  if (cfg.budgets.empty()) {
    throw InvalidInput("bench needs --budgets or --iteration-budgets");
  }
  if (!seconds.empty() && !iterations.empty()) {
    throw InvalidInput("give either --budgets or --iteration-budgets, not both");
  }
  cfg.repetitions = repetitions;
  cfg.evaluation_samples = eval_samples;
  cfg.preset = preset;
  cfg.threads = c.threads;
  const auto cells =
      run_time_budget_benchmark(experiment_of(inst), problem.spec, cfg, Rng(prov.seed));
  const std::string h = hex64(prov.config_hash);
  const std::string sd = std::to_string(prov.seed);
  auto budget_text = [](const Budget& b) {
    return b.seconds ? format_double(*b.seconds) + "s" : std::to_string(*b.iterations);
  };
  if (c.format == "csv") {
    std::string csv = csv_row({"solver", "budget", "repetitions", "mean_utility", "two_std",
                               "config_hash", "seed"});
    for (const auto& cell : cells) {
      csv += csv_row({to_string(cell.solver), budget_text(cell.budget),
                      std::to_string(cell.utilities.size()), format_double(cell.mean),
                      format_double(cell.two_std), h, sd});
    }
    emit(csv, c, out);
    return kOk;
  }
  json rows = json::array();
  for (const auto& cell : cells) {
    json attacks = json::array();
    for (const auto& a : cell.attacks) attacks.push_back(seq(a.choices));
    json its = json::array();
    for (const auto n : cell.iterations) its.push_back(n);
    rows.push_back({{"solver", to_string(cell.solver)},
                    {"budget", budget_text(cell.budget)},
                    {"mean_utility", cell.mean},
                    {"two_std", cell.two_std},
                    {"utilities", vec(cell.utilities)},
                    {"iterations", its},
                    {"attacks", attacks}});
  }
  json j{{"provenance", provenance_json(prov)}, {"problem", problem.name}, {"cells", rows}};
  emit(dump(j), c, out);
  return kOk;
}

json preset_json(RnsVariant v, int k) {
  const RnsConfig r = hyperparameter_presets(v, k);
  return {{"algorithm", v == RnsVariant::A ? "rns-a" : "rns-b"},
          {"combination", k},
          {"hidden", {r.hidden1, r.hidden2}},
          {"iterations", r.greedy_iterations},
          {"learning_rate", r.learning_rate},
          {"epsilon", r.epsilon}};
}

json design_json(const DesignPoint& d) {
  auto path = d.path_goal;
  return {{"name", d.name},
          {"states", d.states},
          {"emissions", d.emissions},
          {"horizon", d.horizon},
          {"precision", d.precision},
          {"success", d.success},
          {"attraction", {{"t", d.attraction_time + 1}, {"state", d.attraction_state + 1},
                          {"ratio", d.attraction_ratio}}},
          {"repulsion", {{"t", d.repulsion_time + 1}, {"state", d.repulsion_state + 1},
                         {"ratio", d.repulsion_ratio}}},
          {"disruption", {{"t", d.disruption_time + 1}, {"ratio", d.disruption_ratio}}},
          {"path", {{"goal", seq(path)}, {"ratio", d.path_ratio}}}};
}

int run_presets(const Common& c, std::optional<int> rns_a, std::optional<int> rns_b,
                const std::string& design, const std::string& generate, int argc,
                const char* const* argv, std::ostream& out) {
  if (!generate.empty()) {
    const DesignPoint& d = design_point(generate);
    const std::uint64_t seed = resolve_seed(c, nullptr);
    Rng rng(seed);
    const ExperimentInstance inst = generate_instance(d, rng);
    emit(serialize_instance(instance_from_design(d, inst, seed)), c, out);
    return kOk;
  }
  const Provenance prov{config_hash(nullptr, argc, argv), resolve_seed(c, nullptr),
                        library_version()};
  if (c.format == "csv") {
    std::string csv = csv_row({"algorithm", "combination", "hidden1", "hidden2", "iterations",
                               "learning_rate", "epsilon"});
    auto add = [&](RnsVariant v, int k) {
      const RnsConfig r = hyperparameter_presets(v, k);
      csv += csv_row({v == RnsVariant::A ? "rns-a" : "rns-b", std::to_string(k),
                      std::to_string(r.hidden1), std::to_string(r.hidden2),
                      std::to_string(r.greedy_iterations), format_double(r.learning_rate),
                      format_double(r.epsilon)});
    };
    if (rns_a) add(RnsVariant::A, *rns_a);
    if (rns_b) add(RnsVariant::B, *rns_b);
    if (!rns_a && !rns_b) {
      for (int k = 1; k <= 6; ++k) add(RnsVariant::A, k);
      for (int k = 1; k <= 6; ++k) add(RnsVariant::B, k);
    }
    emit(csv, c, out);
    return kOk;
  }
  json j{{"provenance", provenance_json(prov)}};
  if (rns_a) j["rns_a"] = preset_json(RnsVariant::A, *rns_a);
  if (rns_b) j["rns_b"] = preset_json(RnsVariant::B, *rns_b);
  if (!design.empty()) j["design"] = design_json(design_point(design));
  if (!rns_a && !rns_b && design.empty()) {
    json designs = json::array();
    for (const auto& d : design_points()) designs.push_back(design_json(d));
    json combos = json::array();
    for (int k = 1; k <= 6; ++k) combos.push_back(preset_json(RnsVariant::A, k));
    for (int k = 1; k <= 6; ++k) combos.push_back(preset_json(RnsVariant::B, k));
    j["designs"] = designs;
    j["hyperparameters"] = combos;
  }
  emit(dump(j), c, out);
  return kOk;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"HMM inference and data-corruption attacks", "hmmc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", library_version());

  Common c;

  auto* infer = app.add_subcommand("infer", "Filtering, smoothing and decoding");
  add_common(infer, c);
  bool smooth = false;
  bool filter = false;
  bool decode = false;
  std::optional<std::size_t> t;
  infer->add_flag("--smooth", smooth, "Smoothing distributions");
  infer->add_option("--t", t, "Time step for --smooth (1-based)");
  infer->add_flag("--filter", filter, "Filtering distribution");
  infer->add_flag("--decode", decode, "Viterbi path");

  auto* attack = app.add_subcommand("attack", "Run one solver on one problem");
  add_common(attack, c);
  add_solver_flags(attack, c);
  std::optional<std::size_t> samples;
  std::optional<int> preset;
  std::optional<std::size_t> eval_samples;
  std::optional<std::size_t> simulations;
  bool timing = false;
  attack->add_option("--samples", samples, "Omega draws (cme N, rme per candidate)");
  attack->add_option("--preset", preset, "R&S hyperparameter combination")
      ->check(CLI::Range(1, 6));
  attack->add_option("--evaluation-samples", eval_samples,
                     "Draws for the reported utility estimate");
  attack->add_option("--simulations", simulations, "Impact simulations M (0 skips)");
  attack->add_flag("--timing", timing, "Include wall time in the output");

  auto* sweep = app.add_subcommand("sweep", "w1/w2 ratio sweep");
  add_common(sweep, c);
  add_solver_flags(sweep, c);
  std::vector<double> ratios;
  std::size_t grid_points = 50;
  double ratio_min = 1e-2;
  double ratio_max = 1e3;
  sweep->add_option("--samples", samples, "Component samples N");
  sweep->add_option("--simulations", simulations, "Impact simulations M");
  sweep->add_option("--ratios", ratios, "Explicit ratio grid")->delimiter(',');
  sweep->add_option("--grid-points", grid_points, "Log-spaced grid size");
  sweep->add_option("--ratio-min", ratio_min, "Smallest ratio");
  sweep->add_option("--ratio-max", ratio_max, "Largest ratio");

  auto* perturb_cmd = app.add_subcommand("perturbation", "Impact grouped by perturbation count");
  add_common(perturb_cmd, c);
  perturb_cmd->add_option("--problem", c.problem, "Problem name (default: first)");
  perturb_cmd->add_option("--simulations", simulations, "Impact simulations per attack");

  auto* bench = app.add_subcommand("bench", "Solver quality against budget");
  add_common(bench, c);
  add_solver_flags(bench, c);
  std::vector<std::string> solvers;
  std::vector<double> budgets;
  std::vector<std::size_t> iteration_budgets;
  std::size_t repetitions = 10;
  std::size_t bench_eval = 1000;
  int bench_preset = 1;
  bench->add_option("--solvers", solvers, "Comma-separated solver list")->delimiter(',');
  bench->add_option("--budgets", budgets, "Increasing wall-clock budgets (s)")->delimiter(',');
  bench->add_option("--iteration-budgets", iteration_budgets, "Increasing iteration budgets")
      ->delimiter(',');
  bench->add_option("--repetitions", repetitions, "Runs per cell")->check(CLI::PositiveNumber);
  bench->add_option("--evaluation-samples", bench_eval, "Common draws for scoring");
  bench->add_option("--preset", bench_preset, "R&S combination")->check(CLI::Range(1, 6));

  auto* presets = app.add_subcommand("presets", "Design points and R&S hyperparameters");
  add_common(presets, c, false);
  std::optional<int> rns_a;
  std::optional<int> rns_b;
  std::string design;
  std::string generate;
  presets->add_option("--rns-a", rns_a, "R&S-A combination 1..6");
  presets->add_option("--rns-b", rns_b, "R&S-B combination 1..6");
  presets->add_option("--design", design, "Show one design point");
  presets->add_option("--generate", generate, "Write an instance file for a design point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (c.solver.empty()) c.solver = *bench ? "rme" : "cme";

  try {
    if (*infer) return run_infer(c, smooth, t, filter, decode, argc, argv, out);
    if (*attack) {
      return run_attack(c, attack->count("--solver") > 0, samples, preset, eval_samples,
                        simulations, timing, argc, argv, out);
    }
    if (*sweep) {
      return run_sweep(c, sweep->count("--solver") > 0, samples, simulations, ratios,
                       grid_points, ratio_min, ratio_max, argc, argv, out);
    }
    if (*perturb_cmd) return run_perturbation(c, simulations, argc, argv, out);
    if (*bench) {
      return run_bench(c, solvers, budgets, iteration_budgets, repetitions, bench_eval,
                       bench_preset, argc, argv, out);
    }
    if (*presets) return run_presets(c, rns_a, rns_b, design, generate, argc, argv, out);
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << "\n";
    return kCapacity;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kUsage;
}

}  // namespace hmmc::cli
