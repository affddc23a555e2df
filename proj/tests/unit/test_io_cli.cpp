#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hmmc/cli.hpp"
#include "hmmc/cme.hpp"
#include "hmmc/error.hpp"
#include "hmmc/io.hpp"
#include "json.hpp"

using namespace hmmc;
using nlohmann::json;

namespace {

const std::string kPresets = HMMC_PRESETS_DIR;

const char* kTiny = R"({
  "name": "tiny",
  "hmm": {
    "transition": [[0.7, 0.3], [0.2, 0.8]],
    "emission": [[0.9, 0.1], [0.3, 0.7]],
    "initial": [0.6, 0.4]
  },
  "observations": [1, 2, 1],
  "beliefs": {"precision": "inf", "success": 1},
  "problems": [
    {"name": "attract", "kind": "attraction", "t": 2, "state": 2, "w1": 1, "w2": 0.05},
    {"name": "spread", "kind": "disruption", "t": 3, "w1": 2, "w2": 0.1, "divergence": "hellinger"},
    {"name": "goal", "kind": "path", "path": [2, 2, 1], "w1": 1, "w2": 0.05}
  ],
  "solvers": [{"name": "quick", "kind": "cme", "samples": 4}],
  "seed": 7
})";

std::string write_temp(const std::string& name, const std::string& text) {
  std::ofstream(name) << text;
  return name;
}

int run(const std::vector<std::string>& args, std::string& out, std::string* err = nullptr) {
  std::vector<const char*> argv{"hmmc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o;
  std::ostringstream e;
  const int code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), o, e);
  out = o.str();
  if (err != nullptr) *err = e.str();
  return code;
}

std::string where_of(const std::string& text) {
  try {
    parse_instance(text);
  } catch (const ValidationError& e) {
    return e.where();
  }
  return "";
}

}  // namespace

TEST(Instance, ShippedPresetIsTheSmallModel) {
  const InstanceFile f = load_instance(kPresets + "/sec51.json");
  EXPECT_EQ(f.hmm, sec51_params());
  EXPECT_EQ(f.observations, sec51_observations());
  EXPECT_EQ(f.problems.size(), 4u);
  EXPECT_EQ(f.problem("attraction").spec.target_time, 2u);
  EXPECT_EQ(f.beliefs, beliefs_from_mean_precision(sec51_params(), 1e4, 0.95));
}

TEST(Instance, RoundTripsCanonically) {
  for (const std::string& text :
       {std::string(kTiny), serialize_instance(load_instance(kPresets + "/sec51.json"))}) {
    const InstanceFile a = parse_instance(text);
    const std::string s = serialize_instance(a);
    const InstanceFile b = parse_instance(s);
    EXPECT_EQ(serialize_instance(b), s);
    EXPECT_EQ(a.hmm, b.hmm);
    EXPECT_EQ(a.beliefs, b.beliefs);
    EXPECT_EQ(a.observations, b.observations);
    EXPECT_EQ(a.seed, b.seed);
  }
}

TEST(Instance, ExplicitBeliefsRoundTrip) {
  json j = json::parse(kTiny);
  j["beliefs"] = {{"transition", {{{"alpha", {7, 3}}}, {{"exact", {0.2, 0.8}}}}},
                  {"emission", {{{"alpha", {9, 0}}}, {{"alpha", {3, 7}}}}},
                  {"initial", {{"alpha", {6, 4}}}},
                  {"success", {0.5, 1.0}}};
  const InstanceFile a = parse_instance(j.dump());
  EXPECT_TRUE(a.beliefs.transition_priors()[1].point_mass);
  EXPECT_EQ(a.beliefs.success_probs(), (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(parse_instance(serialize_instance(a)).beliefs, a.beliefs);
}

TEST(Instance, ValidationErrorsNameTheField) {
  json j = json::parse(kTiny);
  j["hmm"]["transition"][1] = {0.5, 0.4};
  EXPECT_EQ(where_of(j.dump()), "hmm.transition[1]");

  j = json::parse(kTiny);
  j["observations"][2] = 3;
  EXPECT_EQ(where_of(j.dump()), "observations[2]");

  j = json::parse(kTiny);
  j["problems"][0]["colour"] = 1;
  EXPECT_EQ(where_of(j.dump()), "problems[0].colour");

  j = json::parse(kTiny);
  j.erase("hmm");
  EXPECT_EQ(where_of(j.dump()), "hmm");

  EXPECT_EQ(where_of("{\n  \"name\": \"x\",\n  oops\n}"), "3:3");
  EXPECT_THROW(load_instance("/nonexistent/instance.json"), ValidationError);
}

TEST(Output, CanonicalFormatting) {
  EXPECT_EQ(round12(0.1 + 0.2), 0.3);
  EXPECT_EQ(format_double(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(canonical_json("{\"b\":1,\"a\":[0.30000000000000004]}"),
            "{\n  \"a\": [\n    0.3\n  ],\n  \"b\": 1\n}\n");
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_row({"x", "line\nbreak"}), "x,\"line\nbreak\"\r\n");
  EXPECT_EQ(hex64(fnv1a("")), "cbf29ce484222325");
  EXPECT_EQ(sequence_string({4, 3, 5}), "5 4 6");
}

TEST(Cli, InferSmoothingAtThirdStep) {
  std::string out;
  ASSERT_EQ(run({"infer", "--instance", kPresets + "/sec51.json", "--smooth", "--t", "3"}, out), 0);
  const json j = json::parse(out);
  ASSERT_EQ(j["smoothing"].size(), 1u);
  EXPECT_EQ(j["smoothing"][0]["t"], 3);
  EXPECT_NEAR(j["smoothing"][0]["probs"][1].get<double>(), 0.95, 0.02);
  EXPECT_FALSE(j.contains("decoding"));
  EXPECT_TRUE(j["provenance"].contains("config_hash"));
}

TEST(Cli, AttackMatchesLibrary) {
  const std::string path = write_temp("cli_tiny.json", kTiny);
  std::string out;
  ASSERT_EQ(run({"attack", "--instance", path, "--solver", "cme", "--samples", "5", "--seed", "9",
                 "--simulations", "0"},
                out),
            0);
  const json j = json::parse(out);
  const InstanceFile f = load_instance(path);
  CmeConfig cfg;
  cfg.samples = 5;
  const auto r = solve_cme(f.problems[0].spec, f.beliefs, f.observations, cfg, Rng(9));
  std::vector<int> attack;
  for (const auto& v : j["attack"]) attack.push_back(v.get<int>() - 1);
  EXPECT_EQ(attack, r.best_attack.choices);
  EXPECT_EQ(j["estimated_utility"].get<double>(), round12(r.estimated_utility));
  EXPECT_EQ(j["provenance"]["seed"], 9);
}

TEST(Cli, SeedPrecedence) {
  const std::string path = write_temp("cli_seed.json", kTiny);
  std::string out;
  auto seed_of = [&](const std::vector<std::string>& extra) {
    std::vector<std::string> args{"attack", "--instance", path, "--samples", "2",
                                  "--simulations", "0"};
    args.insert(args.end(), extra.begin(), extra.end());
    EXPECT_EQ(run(args, out), 0);
    return json::parse(out)["provenance"]["seed"].get<std::uint64_t>();
  };
  unsetenv("HMM_CORRUPT_SEED");
  EXPECT_EQ(seed_of({}), 7u);
  setenv("HMM_CORRUPT_SEED", "31", 1);
  EXPECT_EQ(seed_of({}), 31u);
  EXPECT_EQ(seed_of({"--seed", "5"}), 5u);
  setenv("HMM_CORRUPT_SEED", "abc", 1);
  EXPECT_EQ(run({"attack", "--instance", path}, out), cli::kValidation);
  unsetenv("HMM_CORRUPT_SEED");
}

TEST(Cli, PresetsRows) {
  std::string out;
  ASSERT_EQ(run({"presets", "--rns-a", "1"}, out), 0);
  const json j = json::parse(out);
  EXPECT_EQ(j["rns_a"]["hidden"], json::array({16, 8}));
  EXPECT_EQ(j["rns_a"]["iterations"], 100);
  EXPECT_EQ(j["rns_a"]["learning_rate"], 0.005);
  EXPECT_EQ(j["rns_a"]["epsilon"], 0.05);
  EXPECT_EQ(run({"presets", "--rns-a", "7"}, out), cli::kValidation);
  ASSERT_EQ(run({"presets"}, out), 0);
  EXPECT_EQ(json::parse(out)["designs"].size(), 10u);
}

TEST(Cli, GeneratedInstanceLoads) {
  std::string out;
  ASSERT_EQ(run({"presets", "--generate", "structure-3", "--seed", "4", "--out", "gen.json"}, out),
            0);
  const InstanceFile f = load_instance("gen.json");
  EXPECT_EQ(f.hmm.num_states(), 10u);
  EXPECT_EQ(f.observations.size(), 10u);
  EXPECT_EQ(f.problems.size(), 4u);
  EXPECT_EQ(f.seed, 4u);
}

TEST(Cli, ExitCodes) {
  std::string out;
  std::string err;
  EXPECT_EQ(run({}, out, &err), cli::kUsage);
  EXPECT_EQ(run({"frobnicate"}, out, &err), cli::kUsage);
  EXPECT_EQ(run({"infer", "--instance", "x.json", "--bogus"}, out, &err), cli::kUsage);
  EXPECT_EQ(run({"infer"}, out, &err), cli::kUsage);
  EXPECT_EQ(run({"--help"}, out, &err), cli::kOk);

  json bad = json::parse(kTiny);
  bad["hmm"]["initial"] = {0.6, 0.6};
  const std::string bad_path = write_temp("cli_bad.json", bad.dump());
  EXPECT_EQ(run({"infer", "--instance", bad_path}, out, &err), cli::kValidation);
  EXPECT_NE(err.find("hmm.initial"), std::string::npos);
  EXPECT_EQ(run({"infer", "--instance", "missing.json"}, out, &err), cli::kValidation);
  const std::string tiny = write_temp("cli_codes.json", kTiny);
  EXPECT_EQ(run({"attack", "--instance", tiny, "--problem", "nope"}, out, &err), cli::kValidation);
  EXPECT_EQ(run({"infer", "--instance", tiny, "--smooth", "--t", "9"}, out, &err),
            cli::kValidation);

  std::string big = "{\"name\":\"big\",\"hmm\":{\"transition\":[[1]],\"emission\":[[";
  for (int k = 0; k < 10; ++k) big += std::string(k ? "," : "") + "0.1";
  big += "]],\"initial\":[1]},\"observations\":[1,2,3,4,5,6,7],"
         "\"problems\":[{\"name\":\"a\",\"kind\":\"attraction\",\"t\":1,\"state\":1}]}";
  const std::string big_path = write_temp("cli_big.json", big);
  EXPECT_EQ(run({"perturbation", "--instance", big_path}, out, &err), cli::kCapacity);
  EXPECT_EQ(run({"attack", "--instance", big_path, "--solver", "cme"}, out, &err),
            cli::kCapacity);
}

TEST(Cli, CsvOutputsAndFiles) {
  const std::string path = write_temp("cli_csv.json", kTiny);
  std::string out;
  ASSERT_EQ(run({"attack", "--instance", path, "--problem", "goal", "--solver", "aps-b",
                 "--iterations", "50", "--format", "csv", "--simulations", "20"},
                out),
            0);
  EXPECT_EQ(out.substr(0, out.find("\r\n")),
            "problem,algorithm,design_point,attack,impact,changed_fraction,expected_utility,"
            "standard_error,config_hash,seed");
  EXPECT_NE(out.find("\r\ngoal,aps-b,tiny,"), std::string::npos);
  std::string file_out;
  ASSERT_EQ(run({"attack", "--instance", path, "--problem", "goal", "--solver", "aps-b",
                 "--iterations", "50", "--format", "csv", "--simulations", "20", "--out",
                 "cli_out.csv"},
                file_out),
            0);
  EXPECT_TRUE(file_out.empty());
  std::ifstream in("cli_out.csv", std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), out);

  ASSERT_EQ(run({"sweep", "--instance", path, "--samples", "3", "--grid-points", "5",
                 "--simulations", "10", "--format", "csv"},
                out),
            0);
  std::size_t rows = 0;
  for (std::size_t p = out.find("\r\n"); p != std::string::npos; p = out.find("\r\n", p + 2)) {
    ++rows;
  }
  EXPECT_EQ(rows, 6u);
  ASSERT_EQ(run({"bench", "--instance", path, "--solvers", "rme,rns-b", "--iteration-budgets",
                 "5,20", "--repetitions", "2", "--evaluation-samples", "3"},
                out),
            0);
  EXPECT_EQ(json::parse(out)["cells"].size(), 4u);
}
