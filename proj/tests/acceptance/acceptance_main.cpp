// Runs the eight acceptance criteria and prints one PASS/FAIL line each.
// Usage: hmmc_acceptance [criterion numbers...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hmmc/aps.hpp"
#include "hmmc/cli.hpp"
#include "hmmc/cme.hpp"
#include "hmmc/experiments.hpp"
#include "hmmc/greedy.hpp"
#include "hmmc/io.hpp"
#include "hmmc/rns.hpp"
#include "oracle.hpp"

namespace {

using namespace hmmc;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1. Recursions against exhaustive path enumeration.
Outcome inference_oracle() {
  Rng rng(101);
  std::size_t instances = 0;
  double worst = 0.0;
  std::size_t path_mismatch = 0;
  for (std::size_t q = 1; q <= 4; ++q) {
    for (std::size_t x = 1; x <= 5; ++x) {
      for (std::size_t t = 1; t <= 7; ++t) {
        Rng local = rng.split(instances);
        const HmmParams p = oracle::random_model(q, x, local);
        auto [path, obs] = sample_sequence(p, t, local);
        const oracle::Brute b = oracle::brute(p, obs);
        const auto fb = forward_backward(p, obs);
        worst = std::max(worst, std::abs(std::exp(fb.log_likelihood) - b.likelihood));
        for (std::size_t s = 0; s < t; ++s) {
          const auto d = smoothing_dist(fb, s);
          for (std::size_t i = 0; i < q; ++i) {
            worst = std::max(worst, std::abs(d.probs[i] - b.posterior[s][i]));
          }
        }
        const auto v = viterbi(p, obs);
        worst = std::max(worst, std::abs(std::exp(v.best_log_prob) - b.best));
        if (v.best_path != b.best_path) ++path_mismatch;
        ++instances;
      }
    }
  }
  return {instances >= 100 && worst <= 1e-10 && path_mismatch == 0,
          std::to_string(instances) + " instances, max abs error " + fmt("%.2e", worst) +
              ", path mismatches " + std::to_string(path_mismatch)};
}

// 2. Smoothing on the printed small model.
Outcome baseline_smoothing() {
  const auto fb = forward_backward(sec51_params(), sec51_observations());
  const double p = smoothing_dist(fb, 2).probs[1];
  return {std::abs(p - 0.95) <= 0.02, "P(Q_3=2|X) = " + fmt("%.6f", p)};
}

// 3. Best single-change attack under low uncertainty.
Outcome single_perturbation() {
  const DesignPoint& d = design_point("sec51-low");
  Rng gen(0);
  const ExperimentInstance inst = generate_instance(d, gen);
  const ProblemSpec spec = d.problem(ProblemKind::StateAttraction);
  const Rng stream(3);
  double best = -1.0;
  double unattacked = 0.0;
  AttackVector best_attack;
  std::size_t tried = 0;
  for (std::size_t t = 0; t < inst.observations.size(); ++t) {
    for (int k = 0; k < static_cast<int>(inst.beliefs.num_emissions()); ++k) {
      if (k == inst.observations[t]) continue;
      AttackVector a = identity_attack(inst.observations);
      a.choices[t] = k;
      Rng r = stream;
      const ImpactSummary s = impact(spec, a, inst.observations, inst.true_params,
                                     inst.beliefs.success_probs(), 5000, r);
      unattacked = s.unperturbed_value;
      if (s.perturbed_value > best) {
        best = s.perturbed_value;
        best_attack = a;
      }
      ++tried;
    }
  }
  return {tried == 25 && unattacked < 0.05 && best >= 0.7,
          std::to_string(tried) + " attacks, unattacked " + fmt("%.4f", unattacked) +
              ", best " + fmt("%.4f", best) + " at " + sequence_string(best_attack.choices)};
}

// 4. CME against exhaustive deterministic evaluation.
Outcome cme_exactness(const std::vector<oracle::TinyCase>& cases) {
  std::size_t ok = 0;
  std::set<ProblemKind> kinds;
  std::string misses;
  for (const auto& c : cases) {
    CmeConfig cfg;
    cfg.samples = 8;
    const auto r = solve_cme(c.spec, oracle::point_mass(c.params), c.obs, cfg, Rng(1));
    if (r.best_attack == c.best.attack) {
      ++ok;
      kinds.insert(c.spec.kind);
    } else {
      misses += " [" + c.label + "]";
    }
  }
  return {ok == cases.size() && kinds.size() == 4,
          std::to_string(ok) + "/" + std::to_string(cases.size()) +
              " instances exact across " + std::to_string(kinds.size()) + " kinds" + misses};
}

// 5. APS and both R&S variants reach the optimum's utility.
Outcome heuristic_convergence(const std::vector<oracle::TinyCase>& cases) {
  struct Tally {
    std::size_t hits = 0;
    std::size_t runs = 0;
    std::size_t cases_passed = 0;
  };
  std::map<std::string, Tally> tally;
  std::string misses;
  for (const auto& c : cases) {
    const AttackerBeliefs beliefs = oracle::point_mass(c.params);
    for (const std::string name : {"aps-a", "aps-b", "rns-a", "rns-b"}) {
      std::size_t hits = 0;
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SolverSpec s;
        s.kind = parse_solver_kind(name);
        s.iterations = name[0] == 'a' ? 5000 : 2000;
        s.evaluation_samples = 1;
        const auto r = run_solver(s, c.spec, beliefs, c.obs, Rng(seed));
        const double u = oracle::utility(c.spec, c.params, c.obs, r.best_attack.choices);
        if (u >= c.best.best - 1e-9) ++hits;
      }
      Tally& t = tally[name];
      t.hits += hits;
      t.runs += 10;
      if (hits >= 9) {
        ++t.cases_passed;
      } else {
        misses += " [" + name + " " + c.label + ": " + std::to_string(hits) + "/10]";
      }
    }
  }
  bool pass = true;
  std::string detail;
  for (const auto& [name, t] : tally) {
    pass = pass && t.cases_passed == cases.size();
    detail += name + " " + std::to_string(t.cases_passed) + "/" + std::to_string(cases.size()) +
              " instances (" + std::to_string(t.hits) + "/" + std::to_string(t.runs) +
              " runs); ";
  }
  return {pass, detail + misses};
}

// 6. Ratio sweep on the small model at N = 2000.
Outcome step_function() {
  const DesignPoint& d = design_point("sec51-low");
  Rng gen(0);
  const ExperimentInstance inst = generate_instance(d, gen);
  RatioSweepConfig cfg;
  cfg.solver = cme_solver(2000);
  cfg.simulations = 200;
  const auto res = run_ratio_sweep(inst, d.problem(ProblemKind::StateAttraction), cfg, Rng(6));
  // Piecewise constant: an attack never reappears after being replaced.
  std::set<AttackVector> closed;
  bool contiguous = true;
  std::size_t changes = 0;
  for (std::size_t i = 1; i < res.points.size(); ++i) {
    if (res.points[i].attack != res.points[i - 1].attack) {
      ++changes;
      closed.insert(res.points[i - 1].attack);
      if (closed.count(res.points[i].attack) != 0) contiguous = false;
    }
  }
  const std::size_t distinct = res.distinct_attacks();
  const bool starts_identity = res.points.front().attack == identity_attack(inst.observations);
  return {res.points.size() == 50 && distinct <= 8 && contiguous,
          std::to_string(distinct) + " distinct attacks over " +
              std::to_string(res.points.size()) + " ratios, " + std::to_string(changes) +
              " steps, contiguous " + (contiguous ? "yes" : "no") + ", identity at low ratio " +
              (starts_identity ? "yes" : "no")};
}

struct ApsChecker : ApsObserver {
  std::size_t last_copies = 0;
  bool monotone = true;
  bool normalized = true;
  bool in_range = true;
  std::size_t conditionals = 0;
  std::size_t acceptances = 0;
  void on_sweep(std::size_t, std::size_t copies) override {
    monotone = monotone && copies >= last_copies;
    last_copies = copies;
  }
  void on_acceptance(std::size_t, double p) override {
    ++acceptances;
    in_range = in_range && p >= 0.0 && p <= 1.0;
  }
  void on_conditional(std::size_t, std::span<const double> probs) override {
    ++conditionals;
    double s = 0.0;
    for (const double v : probs) {
      s += v;
      normalized = normalized && v >= 0.0;
    }
    normalized = normalized && std::abs(s - 1.0) <= 1e-12;
  }
};

const char* kTinyInstance = R"({
  "name": "tiny",
  "hmm": {
    "transition": [[0.7, 0.3], [0.2, 0.8]],
    "emission": [[0.9, 0.1], [0.3, 0.7]],
    "initial": [0.6, 0.4]
  },
  "observations": [1, 2, 1],
  "beliefs": {"precision": 50, "success": 0.9},
  "problems": [
    {"name": "attract", "kind": "attraction", "t": 2, "state": 2, "w1": 1, "w2": 0.05},
    {"name": "path", "kind": "path", "path": [2, 2, 2], "w1": 1, "w2": 0.05}
  ],
  "seed": 7
})";

std::string run_cli(const std::vector<std::string>& args, int& code) {
  std::vector<const char*> argv{"hmmc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return out.str();
}

// 7. Invariant suites.
Outcome properties() {
  std::vector<std::string> failed;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  };

  // Constant likelihood identity.
  {
    Rng rng(7);
    double worst = 0.0;
    for (int n = 0; n < 50; ++n) {
      const HmmParams p = random_params(3 + n % 3, 4, rng);
      auto [path, obs] = sample_sequence(p, 8, rng);
      const auto fb = forward_backward(p, obs);
      for (std::size_t t = 0; t < obs.size(); ++t) {
        std::vector<double> terms;
        for (std::size_t i = 0; i < p.num_states(); ++i) {
          terms.push_back(fb.log_alpha(t, i) + fb.log_beta(t, i));
        }
        worst = std::max(worst, std::abs(logsumexp(terms) - fb.log_likelihood));
      }
    }
    check(worst <= 1e-10, "forward-backward identity");
  }

  // APS conditionals, acceptance and copy schedule over complete runs.
  {
    const DesignPoint& d = design_point("sec51-high");
    Rng gen(0);
    const ExperimentInstance inst = generate_instance(d, gen);
    for (const ApsConfig& base : {aps_a_config(), aps_b_config()}) {
      for (const ProblemKind kind : {ProblemKind::StateAttraction, ProblemKind::PathAttraction}) {
        ApsChecker obs;
        ApsConfig cfg = base;
        cfg.budget = Budget{1600, std::nullopt};
        cfg.evaluation_samples = 20;
        solve_aps(d.problem(kind), inst.beliefs, inst.observations, cfg, Rng(9), &obs);
        check(obs.normalized && obs.conditionals > 0, "Gibbs conditional normalization");
        check(obs.in_range && obs.acceptances > 0, "Metropolis acceptance range");
        check(obs.monotone && obs.last_copies == cfg.copies_at(1600), "H_n monotonicity");
      }
    }
  }

  // MCTS edge statistics.
  {
    Rng rng(5);
    MctsSearch search(4, 3);
    auto score = [](const AttackVector& a) {
      double s = 0.0;
      for (std::size_t t = 0; t < a.size(); ++t) s += std::sin(1.0 + t * a.choices[t]);
      return s;
    };
    search.run(score, 2000, rng);
    double worst = 0.0;
    std::size_t visited = 0;
    for (const auto& node : search.nodes()) {
      std::size_t edge_visits = 0;
      for (const auto& e : node.edges) {
        edge_visits += e.visits;
        if (e.visits == 0) continue;
        ++visited;
        worst = std::max(worst, std::abs(e.q - e.reward_sum / static_cast<double>(e.visits)));
      }
      check(edge_visits <= node.visits, "MCTS visit counts");
    }
    check(visited > 0 && worst <= 1e-9, "MCTS incremental mean");
  }

  // Perturbation group sizes.
  {
    Rng gen(0);
    std::string text = kTinyInstance;
    const InstanceFile inst = parse_instance(text);
    const ExperimentInstance ex{inst.name, inst.hmm, inst.observations, inst.beliefs};
    const auto res = run_perturbation_analysis(ex, inst.problems[0].spec, 10, Rng(2));
    bool ok = res.groups[0].count == 1 &&
              res.groups[0].attacks[0] == identity_attack(inst.observations);
    double total = 0.0;
    for (const auto& g : res.groups) {
      total += static_cast<double>(g.count);
      ok = ok && static_cast<double>(g.count) == group_size(3, 2, g.changes) &&
           g.attacks.size() == g.count;
    }
    check(ok && total == 8.0, "perturbation group sizes");
  }

  // Library-level reproducibility for all solvers.
  {
    const DesignPoint& d = design_point("sec51-high");
    Rng gen(0);
    const ExperimentInstance inst = generate_instance(d, gen);
    const ProblemSpec spec = d.problem(ProblemKind::StateRepulsion);
    for (const SolverKind k : {SolverKind::Cme, SolverKind::Rme, SolverKind::ApsA,
                               SolverKind::ApsB, SolverKind::RnsA, SolverKind::RnsB}) {
      SolverSpec s;
      s.kind = k;
      s.iterations = k == SolverKind::Cme ? 20 : 150;
      s.evaluation_samples = 50;
      if (k == SolverKind::Cme) s.threads = 2;
      const auto a = run_solver(s, spec, inst.beliefs, inst.observations, Rng(77));
      s.threads = 1;
      const auto b = run_solver(s, spec, inst.beliefs, inst.observations, Rng(77));
      check(a.best_attack == b.best_attack && a.estimated_utility == b.estimated_utility &&
                a.diagnostics.trace == b.diagnostics.trace,
            "reproducibility " + to_string(k));
    }
  }

  // CLI reproducibility for every subcommand.
  {
    const std::string path = "acceptance_tiny.json";
    std::ofstream(path) << kTinyInstance;
    const std::vector<std::vector<std::string>> commands = {
        {"infer", "--instance", path},
        {"attack", "--instance", path, "--solver", "cme", "--samples", "30"},
        {"attack", "--instance", path, "--solver", "rme", "--iterations", "20"},
        {"attack", "--instance", path, "--solver", "aps-a", "--iterations", "200"},
        {"attack", "--instance", path, "--solver", "aps-b", "--iterations", "200"},
        {"attack", "--instance", path, "--solver", "rns-a", "--iterations", "100",
         "--format", "csv"},
        {"attack", "--instance", path, "--solver", "rns-b", "--iterations", "100"},
        {"sweep", "--instance", path, "--samples", "40", "--ratios", "0.1,1,10",
         "--simulations", "50"},
        {"perturbation", "--instance", path, "--simulations", "40", "--format", "csv"},
        {"bench", "--instance", path, "--solvers", "cme,aps-a", "--iteration-budgets", "20,60",
         "--repetitions", "2", "--evaluation-samples", "30"},
        {"presets", "--rns-b", "5"},
    };
    for (const auto& cmd : commands) {
      int c1 = -1;
      int c2 = -1;
      const std::string a = run_cli(cmd, c1);
      const std::string b = run_cli(cmd, c2);
      check(c1 == 0 && c2 == 0 && !a.empty() && a == b, "cli " + cmd[0] + " " +
                                                            (cmd.size() > 4 ? cmd[4] : ""));
    }
    std::remove(path.c_str());
  }

  std::string detail = failed.empty() ? "all suites hold" : "failed:";
  for (const auto& f : failed) detail += " [" + f + "]";
  return {failed.empty(), detail};
}

// 8. 60-second runs at (10, 10, 30).
Outcome scale_smoke() {
  const DesignPoint& d = design_point("structure-2");
  Rng gen(8);
  const ExperimentInstance inst = generate_instance(d, gen);
  const ProblemSpec spec = d.problem(ProblemKind::StateAttraction);
  std::string detail;
  bool pass = inst.true_params.num_states() == 10 && inst.true_params.num_emissions() == 10 &&
              inst.observations.size() == 30;
  for (const SolverKind k : {SolverKind::ApsA, SolverKind::RnsA}) {
    SolverSpec s;
    s.kind = k;
    s.seconds = 60.0;
    const auto r = run_solver(s, spec, inst.beliefs, inst.observations, Rng(10));
    bool valid = r.best_attack.size() == 30 && std::isfinite(r.estimated_utility) &&
                 r.diagnostics.iterations > 0;
    for (const int c : r.best_attack.choices) valid = valid && c >= 0 && c < 10;
    pass = pass && valid;
    detail += to_string(k) + " " + std::to_string(r.diagnostics.iterations) + " iterations in " +
              fmt("%.1f", r.diagnostics.wall_seconds) + " s, u=" +
              fmt("%.4f", r.estimated_utility) + (valid ? "" : " INVALID") + "; ";
  }
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  std::vector<oracle::TinyCase> cases;
  auto tiny = [&]() -> const std::vector<oracle::TinyCase>& {
    if (cases.empty()) cases = oracle::tiny_cases();
    return cases;
  };

  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "inference oracle equivalence", 30, inference_oracle},
      {2, "small-model smoothing baseline", 1, baseline_smoothing},
      {3, "single-perturbation devastation", 300, single_perturbation},
      {4, "deterministic CME exactness", 10, [&] { return cme_exactness(tiny()); }},
      {5, "APS and R&S oracle convergence", 600, [&] { return heuristic_convergence(tiny()); }},
      {6, "step-function ratio behavior", 1800, step_function},
      {7, "property suites", 600, properties},
      {8, "scale smoke test (10,10,30)", 240, scale_smoke},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && only.count(c.id) == 0) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (secs > c.limit_seconds) {
      o.pass = false;
      o.detail += " (over the " + fmt("%.0f", c.limit_seconds) + " s limit)";
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s  [%d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
