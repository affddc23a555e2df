#include "hmmc/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "hmmc/error.hpp"
#include "json.hpp"

#ifndef HMMC_VERSION
#define HMMC_VERSION "0.0.0"
#endif

namespace hmmc {
namespace {

using json = nlohmann::json;

std::string field(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string item(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) {
    throw ValidationError(path.empty() ? "<root>" : path, "expected an object");
  }
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(field(path, key), "unknown field");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(field(path, key), "missing required field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(path, "expected a finite number");
  return x;
}

std::uint64_t whole(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ValidationError(path, "expected a nonnegative integer");
}

// 1-based index in 1..limit, returned 0-based.
std::size_t one_based(const json& v, const std::string& path, std::size_t limit,
                      const char* what) {
  if (!v.is_number_integer()) throw ValidationError(path, std::string("expected an integer ") + what);
  const auto k = v.get<std::int64_t>();
  if (k < 1 || static_cast<std::uint64_t>(k) > limit) {
    throw ValidationError(path, std::string(what) + " " + std::to_string(k) + " outside 1.." +
                                    std::to_string(limit));
  }
  return static_cast<std::size_t>(k - 1);
}

std::vector<double> vector_of(const json& v, const std::string& path) {
  if (!v.is_array()) throw ValidationError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], item(path, i)));
  return out;
}

void check_simplex(const std::vector<double>& row, const std::string& path) {
  double total = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] < 0.0) throw ValidationError(item(path, i), "negative probability");
    total += row[i];
  }
  if (std::abs(total - 1.0) > kStochasticTolerance) {
    std::ostringstream msg;
    msg << "row sums to " << total << ", expected 1";
    throw ValidationError(path, msg.str());
  }
}

Matrix stochastic_matrix(const json& v, const std::string& path, std::size_t rows,
                         std::size_t cols) {
  if (!v.is_array() || v.size() != rows) {
    throw ValidationError(path, "expected " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = vector_of(v[r], item(path, r));
    if (row.size() != cols) {
      throw ValidationError(item(path, r), "expected " + std::to_string(cols) + " entries");
    }
    check_simplex(row, item(path, r));
    std::copy(row.begin(), row.end(), m.row(r).begin());
  }
  return m;
}

HmmParams parse_hmm(const json& v) {
  const std::string path = "hmm";
  check_keys(v, path, {"transition", "emission", "initial"});
  const json& a = require(v, path, "transition");
  if (!a.is_array() || a.empty()) {
    throw ValidationError("hmm.transition", "expected a nonempty array of rows");
  }
  const std::size_t q = a.size();
  const json& b = require(v, path, "emission");
  if (!b.is_array() || b.empty() || !b[0].is_array() || b[0].empty()) {
    throw ValidationError("hmm.emission", "expected a nonempty array of rows");
  }
  const std::size_t x = b[0].size();
  Matrix am = stochastic_matrix(a, "hmm.transition", q, q);
  Matrix bm = stochastic_matrix(b, "hmm.emission", q, x);
  auto pi = vector_of(require(v, path, "initial"), "hmm.initial");
  if (pi.size() != q) {
    throw ValidationError("hmm.initial", "expected " + std::to_string(q) + " entries");
  }
  check_simplex(pi, "hmm.initial");
  return HmmParams(std::move(am), std::move(bm), std::move(pi));
}

std::vector<double> parse_success(const json& v, const std::string& path, std::size_t x,
                                  bool& scalar) {
  std::vector<double> out;
  if (v.is_number()) {
    scalar = true;
    out.assign(x, number(v, path));
  } else {
    scalar = false;
    out = vector_of(v, path);
    if (out.size() != x) {
      throw ValidationError(path, "expected one success rate per emission");
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (out[k] < 0.0 || out[k] > 1.0) {
      throw ValidationError(scalar ? path : item(path, k), "success rate outside [0, 1]");
    }
  }
  return out;
}

DirichletRow parse_row(const json& v, const std::string& path, std::size_t width) {
  check_keys(v, path, {"alpha", "exact"});
  const bool has_alpha = v.contains("alpha");
  if (has_alpha == v.contains("exact")) {
    throw ValidationError(path, "give exactly one of alpha or exact");
  }
  const std::string key = has_alpha ? "alpha" : "exact";
  auto values = vector_of(v[key], field(path, key));
  if (values.size() != width) {
    throw ValidationError(field(path, key), "expected " + std::to_string(width) + " entries");
  }
  DirichletRow row = has_alpha ? DirichletRow::concentration(std::move(values))
                               : DirichletRow::exact(std::move(values));
  if (!has_alpha) check_simplex(row.values, field(path, key));
  return row;
}

std::vector<DirichletRow> parse_rows(const json& v, const std::string& path, std::size_t rows,
                                     std::size_t width) {
  if (!v.is_array() || v.size() != rows) {
    throw ValidationError(path, "expected " + std::to_string(rows) + " rows");
  }
  std::vector<DirichletRow> out;
  for (std::size_t r = 0; r < rows; ++r) out.push_back(parse_row(v[r], item(path, r), width));
  return out;
}

AttackerBeliefs parse_beliefs(const json& v, const HmmParams& hmm, BeliefSource& source) {
  const std::string path = "beliefs";
  const std::size_t q = hmm.num_states();
  const std::size_t x = hmm.num_emissions();
  try {
    if (v.contains("precision")) {
      check_keys(v, path, {"precision", "success"});
      const json& p = v["precision"];
      double precision = 0.0;
      if (p.is_string() && p.get<std::string>() == "inf") {
        precision = kInfinitePrecision;
      } else {
        precision = number(p, "beliefs.precision");
        if (!(precision > 0.0)) throw ValidationError("beliefs.precision", "must be positive");
      }
      source.explicit_rows = false;
      source.precision = precision;
      source.success =
          parse_success(require(v, path, "success"), "beliefs.success", x, source.scalar_success);
      return beliefs_from_mean_precision(hmm, precision, source.success);
    }
    check_keys(v, path, {"transition", "emission", "initial", "success"});
    source.explicit_rows = true;
    source.success =
        parse_success(require(v, path, "success"), "beliefs.success", x, source.scalar_success);
    return AttackerBeliefs(parse_rows(require(v, path, "transition"), "beliefs.transition", q, q),
                           parse_rows(require(v, path, "emission"), "beliefs.emission", q, x),
                           parse_row(require(v, path, "initial"), "beliefs.initial", q),
                           source.success);
  } catch (const InvalidInput& e) {
    throw ValidationError(path, e.what());
  }
}

ProblemSpec parse_problem(const json& v, const std::string& path, std::size_t q,
                          std::size_t horizon) {
  check_keys(v, path, {"name", "kind", "t", "state", "w1", "w2", "divergence", "baseline",
                       "path", "repel", "coefficients", "coefficient_mode"});
  const json& kind_v = require(v, path, "kind");
  if (!kind_v.is_string()) throw ValidationError(field(path, "kind"), "expected a string");
  ProblemSpec s;
  try {
    s.kind = parse_problem_kind(kind_v.get<std::string>());
  } catch (const InvalidInput& e) {
    throw ValidationError(field(path, "kind"), e.what());
  }
  s.w1 = v.contains("w1") ? number(v["w1"], field(path, "w1")) : 1.0;
  s.w2 = v.contains("w2") ? number(v["w2"], field(path, "w2")) : 0.0;
  if (s.w1 < 0.0 || s.w2 < 0.0) throw ValidationError(path, "weights must be nonnegative");

  if (s.kind == ProblemKind::PathAttraction) {
    if (v.contains("path")) {
      const json& p = v["path"];
      if (!p.is_array() || p.size() != horizon) {
        throw ValidationError(field(path, "path"),
                              "expected " + std::to_string(horizon) + " states");
      }
      for (std::size_t t = 0; t < horizon; ++t) {
        s.target_path.push_back(
            static_cast<int>(one_based(p[t], item(field(path, "path"), t), q, "state")));
      }
    }
    if (v.contains("coefficients")) {
      const json& c = v["coefficients"];
      if (!c.is_array() || c.size() != horizon) {
        throw ValidationError(field(path, "coefficients"),
                              "expected " + std::to_string(horizon) + " rows");
      }
      s.coefficients = Matrix(horizon, q);
      for (std::size_t t = 0; t < horizon; ++t) {
        const auto row = vector_of(c[t], item(field(path, "coefficients"), t));
        if (row.size() != q) {
          throw ValidationError(item(field(path, "coefficients"), t),
                                "expected " + std::to_string(q) + " entries");
        }
        std::copy(row.begin(), row.end(), s.coefficients.row(t).begin());
      }
      const std::string mode =
          v.contains("coefficient_mode") ? v["coefficient_mode"].get<std::string>() : "signs";
      if (mode != "signs" && mode != "fixed") {
        throw ValidationError(field(path, "coefficient_mode"), "expected signs or fixed");
      }
      s.coefficient_mode = mode == "fixed" ? CoefficientMode::Fixed : CoefficientMode::Signs;
    } else if (!s.target_path.empty()) {
      const bool repel = v.contains("repel") && v["repel"].get<bool>();
      const StatePath goal = s.target_path;
      const double w1 = s.w1;
      const double w2 = s.w2;
      s = ProblemSpec::path_attraction(goal, q, w1, w2, repel);
    } else {
      throw ValidationError(path, "path problems need a path or coefficients");
    }
    return s;
  }

  s.target_time = one_based(require(v, path, "t"), field(path, "t"), horizon, "time");
  if (s.kind == ProblemKind::DistributionDisruption) {
    if (v.contains("divergence")) {
      try {
        s.divergence = parse_divergence(v["divergence"].get<std::string>());
      } catch (const InvalidInput& e) {
        throw ValidationError(field(path, "divergence"), e.what());
      }
    }
    if (v.contains("baseline")) {
      auto base = vector_of(v["baseline"], field(path, "baseline"));
      if (base.size() != q) {
        throw ValidationError(field(path, "baseline"), "expected one entry per state");
      }
      check_simplex(base, field(path, "baseline"));
      s.baseline_gamma = std::move(base);
    }
  } else {
    s.target_state = one_based(require(v, path, "state"), field(path, "state"), q, "state");
  }
  return s;
}

SolverSpec parse_solver(const json& v, const std::string& path) {
  check_keys(v, path, {"name", "kind", "samples", "iterations", "seconds", "preset",
                       "threads", "evaluation_samples"});
  SolverSpec s;
  const json& kind_v = require(v, path, "kind");
  try {
    s.kind = parse_solver_kind(kind_v.is_string() ? kind_v.get<std::string>() : "");
  } catch (const InvalidInput& e) {
    throw ValidationError(field(path, "kind"), e.what());
  }
  if (v.contains("samples")) s.samples = whole(v["samples"], field(path, "samples"));
  if (v.contains("iterations")) s.iterations = whole(v["iterations"], field(path, "iterations"));
  if (v.contains("seconds")) {
    s.seconds = number(v["seconds"], field(path, "seconds"));
    if (!(*s.seconds > 0.0)) throw ValidationError(field(path, "seconds"), "must be positive");
  }
  if (v.contains("preset")) {
    s.preset = static_cast<int>(whole(v["preset"], field(path, "preset")));
    if (s.preset < 1 || s.preset > 6) {
      throw ValidationError(field(path, "preset"), "combination outside 1..6");
    }
  }
  if (v.contains("threads")) s.threads = whole(v["threads"], field(path, "threads"));
  if (v.contains("evaluation_samples")) {
    s.evaluation_samples = whole(v["evaluation_samples"], field(path, "evaluation_samples"));
  }
  return s;
}

json to_json(const std::vector<double>& v) {
  json out = json::array();
  for (const double x : v) out.push_back(round12(x));
  return out;
}

json to_json(const Matrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    out.push_back(to_json(std::vector<double>(row.begin(), row.end())));
  }
  return out;
}

json to_json(const DirichletRow& row) {
  return json{{row.point_mass ? "exact" : "alpha", to_json(row.values)}};
}

json problem_json(const NamedProblem& p) {
  const ProblemSpec& s = p.spec;
  json out{{"name", p.name}, {"kind", to_string(s.kind)}, {"w1", round12(s.w1)},
           {"w2", round12(s.w2)}};
  switch (s.kind) {
    case ProblemKind::StateAttraction:
    case ProblemKind::StateRepulsion:
      out["t"] = s.target_time + 1;
      out["state"] = s.target_state + 1;
      break;
    case ProblemKind::DistributionDisruption:
      out["t"] = s.target_time + 1;
      out["divergence"] = to_string(s.divergence);
      if (s.baseline_gamma) out["baseline"] = to_json(*s.baseline_gamma);
      break;
    case ProblemKind::PathAttraction: {
      if (!s.target_path.empty()) {
        json path = json::array();
        for (const int q : s.target_path) path.push_back(q + 1);
        out["path"] = path;
      }
      out["coefficients"] = to_json(s.coefficients);
      out["coefficient_mode"] = s.coefficient_mode == CoefficientMode::Fixed ? "fixed" : "signs";
      break;
    }
  }
  return out;
}

json solver_json(const NamedSolver& n) {
  const SolverSpec& s = n.spec;
  json out{{"name", n.name}, {"kind", to_string(s.kind)}};
  if (s.samples) out["samples"] = *s.samples;
  if (s.iterations) out["iterations"] = *s.iterations;
  if (s.seconds) out["seconds"] = round12(*s.seconds);
  if (s.preset != 1) out["preset"] = s.preset;
  if (s.threads != 1) out["threads"] = s.threads;
  if (s.evaluation_samples) out["evaluation_samples"] = *s.evaluation_samples;
  return out;
}

void canonicalize(json& j) {
  if (j.is_number_float()) {
    j = round12(j.get<double>());
  } else if (j.is_array() || j.is_object()) {
    for (auto& child : j) canonicalize(child);
  }
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  const std::size_t end = std::min(text.size(), byte > 0 ? byte - 1 : 0);
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    std::string what = e.what();
    // Drop the library's "[json.exception.parse_error.101] " prefix.
    const auto bracket = what.find("] ");
    if (bracket != std::string::npos) what = what.substr(bracket + 2);
    throw ValidationError(std::to_string(line) + ":" + std::to_string(col), what);
  }
}

}  // namespace

const NamedProblem& InstanceFile::problem(const std::string& problem_name) const {
  for (const auto& p : problems) {
    if (p.name == problem_name) return p;
  }
  throw InvalidInput("instance has no problem named '" + problem_name + "'");
}

InstanceFile parse_instance(const std::string& text) {
  const json root = parse_text(text);
  check_keys(root, "", {"name", "hmm", "observations", "beliefs", "problems", "solvers", "seed"});
  HmmParams hmm = parse_hmm(require(root, "", "hmm"));

  const json& obs_v = require(root, "", "observations");
  if (!obs_v.is_array() || obs_v.empty()) {
    throw ValidationError("observations", "expected a nonempty array of emissions");
  }
  ObsSequence obs;
  for (std::size_t t = 0; t < obs_v.size(); ++t) {
    obs.push_back(static_cast<int>(
        one_based(obs_v[t], item("observations", t), hmm.num_emissions(), "emission")));
  }

  // Without a beliefs block the attacker knows the model and never fails.
  BeliefSource source;
  source.precision = kInfinitePrecision;
  source.success.assign(hmm.num_emissions(), 1.0);
  AttackerBeliefs beliefs = root.contains("beliefs")
                                ? parse_beliefs(root["beliefs"], hmm, source)
                                : beliefs_from_mean_precision(hmm, kInfinitePrecision,
                                                              source.success);

  InstanceFile out{root.contains("name") ? root["name"].get<std::string>() : std::string(),
                   std::move(hmm),
                   std::move(obs),
                   std::move(beliefs),
                   source,
                   {},
                   {},
                   std::nullopt};

  if (root.contains("problems")) {
    const json& ps = root["problems"];
    if (!ps.is_array()) throw ValidationError("problems", "expected an array");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string path = item("problems", i);
      NamedProblem p;
      p.name = ps[i].contains("name") && ps[i]["name"].is_string()
                   ? ps[i]["name"].get<std::string>()
                   : "problem-" + std::to_string(i + 1);
      p.spec = parse_problem(ps[i], path, out.hmm.num_states(), out.observations.size());
      out.problems.push_back(std::move(p));
    }
  }
  if (root.contains("solvers")) {
    const json& ss = root["solvers"];
    if (!ss.is_array()) throw ValidationError("solvers", "expected an array");
    for (std::size_t i = 0; i < ss.size(); ++i) {
      NamedSolver s;
      s.name = ss[i].contains("name") && ss[i]["name"].is_string()
                   ? ss[i]["name"].get<std::string>()
                   : "solver-" + std::to_string(i + 1);
      s.spec = parse_solver(ss[i], item("solvers", i));
      out.solvers.push_back(std::move(s));
    }
  }
  if (root.contains("seed")) out.seed = whole(root["seed"], "seed");
  return out;
}

InstanceFile load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path, "cannot open instance file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

std::string serialize_instance(const InstanceFile& instance) {
  json root;
  if (!instance.name.empty()) root["name"] = instance.name;
  root["hmm"] = {{"transition", to_json(instance.hmm.transition())},
                 {"emission", to_json(instance.hmm.emission())},
                 {"initial", to_json(instance.hmm.initial())}};
  json obs = json::array();
  for (const int o : instance.observations) obs.push_back(o + 1);
  root["observations"] = obs;

  const BeliefSource& src = instance.belief_source;
  json success = src.scalar_success && !src.success.empty() ? json(round12(src.success.front()))
                                                            : to_json(src.success);
  if (src.explicit_rows) {
    const auto& b = instance.beliefs;
    json a = json::array();
    json e = json::array();
    for (const auto& r : b.transition_priors()) a.push_back(to_json(r));
    for (const auto& r : b.emission_priors()) e.push_back(to_json(r));
    root["beliefs"] = {{"transition", a},
                       {"emission", e},
                       {"initial", to_json(b.initial_prior())},
                       {"success", success}};
  } else {
    root["beliefs"] = {{"precision", std::isinf(src.precision) ? json("inf")
                                                               : json(round12(src.precision))},
                       {"success", success}};
  }
  if (!instance.problems.empty()) {
    json ps = json::array();
    for (const auto& p : instance.problems) ps.push_back(problem_json(p));
    root["problems"] = ps;
  }
  if (!instance.solvers.empty()) {
    json ss = json::array();
    for (const auto& s : instance.solvers) ss.push_back(solver_json(s));
    root["solvers"] = ss;
  }
  if (instance.seed) root["seed"] = *instance.seed;
  canonicalize(root);
  return root.dump(2) + "\n";
}

void save_instance(const std::string& path, const InstanceFile& instance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path, "cannot write instance file");
  out << serialize_instance(instance);
}

InstanceFile instance_from_design(const DesignPoint& design,
                                  const ExperimentInstance& instance,
                                  std::optional<std::uint64_t> seed) {
  BeliefSource src;
  src.precision = design.precision;
  src.success.assign(instance.true_params.num_emissions(), design.success);
  InstanceFile out{design.name, instance.true_params, instance.observations, instance.beliefs,
                   src, {}, {}, seed};
  for (const ProblemKind kind :
       {ProblemKind::StateAttraction, ProblemKind::StateRepulsion,
        ProblemKind::DistributionDisruption, ProblemKind::PathAttraction}) {
    out.problems.push_back(NamedProblem{to_string(kind), design.problem(kind)});
  }
  return out;
}

std::string canonical_json(const std::string& text) {
  json j = parse_text(text);
  canonicalize(j);
  return j.dump(2) + "\n";
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string csv_field(const std::string& f) {
  if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
  std::string out = "\"";
  for (const char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    out += csv_field(fields[i]);
  }
  out += "\r\n";
  return out;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string library_version() { return HMMC_VERSION; }

std::string sequence_string(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ' ';
    out += std::to_string(values[i] + 1);
  }
  return out;
}

}  // namespace hmmc
