#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "netgame/harness/artifacts.hpp"
#include "netgame/harness/cli.hpp"
#include "netgame/harness/config.hpp"

using namespace netgame;
using namespace netgame::harness;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

ExperimentConfig parsed(const std::string& text) {
  auto c = parse_config_text(text);
  finalize(c);
  return c;
}

marl::RunRecord fake_record(std::uint64_t seed, std::vector<double> rewards) {
  marl::RunRecord r;
  r.seed = seed;
  r.n_players = 1;
  for (std::size_t e = 0; e < rewards.size(); ++e) {
    marl::EpisodeRecord ep;
    ep.episode = static_cast<int>(e);
    ep.rewards = Eigen::VectorXd::Constant(1, rewards[e]);
    r.episodes.push_back(ep);
  }
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("netgame_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

int cli(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "netgame");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text) *err_text = err.str();
  return code;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

const char* kSmall = R"({
  "name": "smoke", "env": "supply_chain_2p", "paradigm": "individual",
  "episodes": 3, "horizon": 4, "seeds": 2, "eval_episodes": 2,
  "learning": {"hidden": [4], "batch_size": 4, "warmup_steps": 4}
})";

}  // namespace

TEST(Config, RejectsUnknownKeysByName) {
  try {
    parse_config_text(R"({"name": "x", "learning": {"batchsize": 3}})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("learning.batchsize"), std::string::npos) << e.what();
  }
}

TEST(Config, SyntaxErrorsReportTheLine) {
  try {
    parse_config_text("{\n  \"name\": \"x\",\n  \"episodes\": ,\n}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Config, RejectsBadValues) {
  EXPECT_THROW(parsed(R"({"name": "x", "horizon": 0})"), ConfigError);
  EXPECT_THROW(parsed(R"({"name": "x", "env": "chess"})"), ConfigError);
  EXPECT_THROW(parsed(R"({"name": "x", "learning": {"tau": 2}})"), ConfigError);
  EXPECT_THROW(parsed(R"({"name": "x", "paradigm": "anarchy"})"), ConfigError);
}

TEST(Config, SeedsFromCountOrList) {
  auto a = parsed(R"({"name": "x", "seeds": 3, "base_seed": 10})");
  EXPECT_EQ(a.training.seeds, (std::vector<std::uint64_t>{10, 11, 12}));
  auto b = parsed(R"({"name": "x", "seeds": [5, 2]})");
  EXPECT_EQ(b.training.seeds, (std::vector<std::uint64_t>{5, 2}));
}

TEST(Config, EchoRoundTrips) {
  const auto c = parsed(kSmall);
  auto back = parse_config(c.to_json());
  finalize(back);
  EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(Config, EveryEnvBuildsFromDefaults) {
  for (const char* env : {"supply_chain", "supply_chain_2p", "epidemic", "opinion", "retailer"}) {
    const auto e = make_environment(env, default_env_params(env));
    EXPECT_GE(e->n_players(), 1) << env;
  }
  EXPECT_EQ(default_env_params("supply_chain_2p")["holding"], json({0.05, 0.05}));
  EXPECT_EQ(default_env_params("supply_chain_2p")["goodwill"], json({0.1, 0.1}));
}

TEST(Summary, MeanAndPopulationVariance) {
  const auto t = summarize({fake_record(1, {2.0}), fake_record(2, {4.0})});
  EXPECT_EQ(t.values("reward_p0_mean"), std::vector<double>{3.0});
  EXPECT_EQ(t.values("reward_p0_var"), std::vector<double>{1.0});
  const auto one = summarize({fake_record(1, {2.0, 5.0})});
  EXPECT_EQ(one.values("reward_p0_var"), (std::vector<double>{0.0, 0.0}));
}

TEST(Summary, FailedRunsAreExcluded) {
  auto bad = fake_record(3, {100.0});
  bad.failed = true;
  const auto t = summarize({fake_record(1, {2.0}), bad});
  EXPECT_EQ(t.values("reward_p0_mean"), std::vector<double>{2.0});
}

TEST(Summary, FinalWindowUsesLastEpisodes) {
  const auto j = final_window_stats({fake_record(1, {0.0, 1.0, 3.0}), fake_record(2, {0.0, 3.0, 5.0})}, 2);
  EXPECT_DOUBLE_EQ(j["reward_p0"]["mean"].get<double>(), 3.0);
  EXPECT_DOUBLE_EQ(j["reward_p0"]["var"].get<double>(), 1.0);
}

TEST(Artifacts, ColumnsOmitAbsentMetrics) {
  const auto rec = fake_record(1, {1.0});
  const auto cols = record_columns(rec);
  EXPECT_EQ(cols, (std::vector<std::string>{"seed", "episode", "reward_p0"}));
}

TEST(Artifacts, CsvRoundTripIsExact) {
  CsvTable t{{"a", "b"}, {{0.1, -1e-300}, {1.0 / 3.0, 12345.678}}};
  std::stringstream s;
  write_csv(s, t);
  const auto back = read_csv(s);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Cli, SmokeRunWritesArtifacts) {
  const fs::path dir = scratch("smoke");
  write_file(dir / "c.json", kSmall);
  ASSERT_EQ(cli({"--config", (dir / "c.json").string(), "--out", (dir / "out").string()}), kSuccess);
  const fs::path run = dir / "out" / "smoke";
  EXPECT_TRUE(fs::exists(run / "seed_1.csv"));
  EXPECT_TRUE(fs::exists(run / "seed_2.csv"));
  EXPECT_TRUE(fs::exists(run / "curves.csv"));
  const json summary = json::parse(slurp(run / "summary.json"));
  EXPECT_EQ(summary["successful_runs"], 2);
  std::ifstream f(run / "seed_1.csv");
  const auto table = read_csv(f);
  EXPECT_EQ(table.rows.size(), 3u);
  EXPECT_GE(table.column("throughput"), 0);
}

TEST(Cli, MissingConfigExitsWithConfigError) {
  std::string err;
  EXPECT_EQ(cli({"--config", "/nonexistent/netgame.json"}, &err), kConfigError);
  EXPECT_FALSE(err.empty());
  const fs::path dir = scratch("bad");
  write_file(dir / "c.json", R"({"name": "x", "bogus": 1})");
  EXPECT_EQ(cli({"--config", (dir / "c.json").string()}, &err), kConfigError);
  EXPECT_NE(err.find("bogus"), std::string::npos);
}

TEST(Cli, CentralizedSummaryEchoesCostCoefficients) {
  const fs::path dir = scratch("central");
  write_file(dir / "c.json", kSmall);
  ASSERT_EQ(cli({"--config", (dir / "c.json").string(), "--out", (dir / "out").string(),
                 "--paradigm", "centralized", "--seeds", "1"}),
            kSuccess);
  const json s = json::parse(slurp(dir / "out" / "smoke" / "summary.json"));
  EXPECT_EQ(s["config"]["env_params"]["holding"], json({0.05, 0.05}));
  EXPECT_EQ(s["config"]["env_params"]["goodwill"], json({0.1, 0.1}));
  EXPECT_EQ(s["config"]["paradigm"], "centralized");
}

TEST(Cli, ArtifactsAreByteDeterministic) {
  const fs::path dir = scratch("det");
  write_file(dir / "c.json", kSmall);
  for (const char* out : {"a", "b"})
    ASSERT_EQ(cli({"--config", (dir / "c.json").string(), "--out", (dir / out).string(), "--workers", "2",
                   "--trajectory"}),
              kSuccess);
  for (const char* f : {"seed_1.csv", "seed_2.csv", "curves.csv", "seed_1_trajectory.csv"})
    EXPECT_EQ(slurp(dir / "a" / "smoke" / f), slurp(dir / "b" / "smoke" / f)) << f;
}

TEST(Cli, EnvironmentSeedOverridesBaseSeed) {
  const fs::path dir = scratch("envseed");
  write_file(dir / "c.json", kSmall);
  ::setenv("NETGAME_SEED", "40", 1);
  const int code = cli({"--config", (dir / "c.json").string(), "--out", (dir / "out").string()});
  ::unsetenv("NETGAME_SEED");
  ASSERT_EQ(code, kSuccess);
  EXPECT_TRUE(fs::exists(dir / "out" / "smoke" / "seed_40.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "smoke" / "seed_41.csv"));
}
