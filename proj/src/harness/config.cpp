#include "netgame/harness/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "netgame/common/error.hpp"
#include "netgame/env/epidemic.hpp"
#include "netgame/env/opinion.hpp"
#include "netgame/env/supply_chain.hpp"
#include "netgame/env/two_player.hpp"

namespace netgame::harness {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("field '" + field + "': " + what);
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) fail(where.empty() ? "<root>" : where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) fail(where.empty() ? key : where + "." + key, "unknown key");
  }
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

long long integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  return v.get<long long>();
}

bool boolean(const json& v, const std::string& field) {
  if (!v.is_boolean()) fail(field, "expected true or false");
  return v.get<bool>();
}

std::string text(const json& v, const std::string& field) {
  if (!v.is_string()) fail(field, "expected a string");
  return v.get<std::string>();
}

/// A scalar broadcast to n entries, or a list of exactly n numbers.
std::vector<double> per_player(const json& v, int n, const std::string& field) {
  if (v.is_number()) return std::vector<double>(static_cast<std::size_t>(n), v.get<double>());
  if (!v.is_array() || static_cast<int>(v.size()) != n)
    fail(field, "expected a number or a list of " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k)
    out.push_back(number(v[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<int> per_player_int(const json& v, int n, const std::string& field) {
  std::vector<int> out;
  for (double d : per_player(v, n, field)) {
    if (d != static_cast<int>(d)) fail(field, "expected integers");
    out.push_back(static_cast<int>(d));
  }
  return out;
}

/// [[i, j], ...] or [[i, j, w], ...].
std::vector<std::tuple<int, int, std::optional<double>>> edge_list(const json& v,
                                                                   const std::string& field) {
  if (!v.is_array()) fail(field, "expected a list of [i, j] or [i, j, weight] entries");
  std::vector<std::tuple<int, int, std::optional<double>>> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::string f = field + "[" + std::to_string(k) + "]";
    const auto& e = v[k];
    if (!e.is_array() || (e.size() != 2 && e.size() != 3)) fail(f, "expected [i, j] or [i, j, w]");
    std::optional<double> w;
    if (e.size() == 3) w = number(e[2], f + "[2]");
    out.emplace_back(static_cast<int>(integer(e[0], f + "[0]")),
                     static_cast<int>(integer(e[1], f + "[1]")), w);
  }
  return out;
}

const std::set<std::string> kEnvNames = {"supply_chain", "supply_chain_2p", "epidemic", "opinion",
                                         "retailer"};

}  // namespace

json default_env_params(const std::string& env) {
  if (env == "supply_chain_2p") {
    return {{"raw_price", 0.5},        {"raw_price_slope", 0.0},  {"demand_intercept", 10.0},
            {"demand_slope", 2.0},     {"demand_noise", 0.05},    {"holding", {0.05, 0.05}},
            {"goodwill", {0.1, 0.1}},  {"forecast_alpha", 0.3},   {"order_high", 20.0},
            {"price_high", 10.0},      {"initial_stock_low", 0.0}, {"initial_stock_high", 0.0},
            {"gamma", 0.95}};
  }
  if (env == "supply_chain") {
    return {{"n_players", 3},
            {"edges", {{0, 1}, {1, 2}}},
            {"lead_time", 1},
            {"holding", 0.05},
            {"goodwill", 0.1},
            {"raw_price", 0.5},
            {"raw_price_slope", 0.0},
            {"demand_intercept", 10.0},
            {"demand_slope", 2.0},
            {"demand_noise", 0.05},
            {"rationing", "proportional"},
            {"forecast_alpha", 0.3},
            {"order_high", 20.0},
            {"price_high", 10.0},
            {"initial_stock_low", 0.0},
            {"initial_stock_high", 0.0},
            {"gamma", 0.95}};
  }
  if (env == "epidemic") {
    return {{"n_cities", 5},
            {"edges", {{0, 1, 0.5}, {1, 2, 0.5}, {2, 3, 0.5}, {3, 4, 0.5}, {4, 0, 0.5}}},
            {"recovery_noise", 0.1},
            {"lockdown_cost", 0.5},
            {"effort_cost", 0.5},
            {"initial_healthy", 0.9},
            {"initial_patients", 0.1},
            {"reward_after_transition", true},
            {"gamma", 0.95}};
  }
  if (env == "opinion") {
    return {{"n_players", 4},
            {"edges", {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}}},
            {"topic_dim", 2},
            {"disagreement_cost", 1.0},
            {"control_cost", 1.0},
            {"leader", 0},
            {"control_high", 1.0},
            {"initial_spread", 1.0},
            {"gamma", 0.95}};
  }
  if (env == "retailer") {
    return {{"demand_intercept", 10.0}, {"demand_slope", 2.0}, {"demand_noise", 0.05},
            {"price_high", 10.0},       {"forecast_alpha", 0.3}, {"gamma", 0.95}};
  }
  fail("env", "unknown environment '" + env +
                  "' (expected supply_chain, supply_chain_2p, epidemic, opinion or retailer)");
}

std::unique_ptr<Environment> make_environment(const std::string& env, const json& user_params) {
  json p = default_env_params(env);
  std::set<std::string> known;
  for (const auto& [key, value] : p.items()) known.insert(key);
  if (env == "opinion") known.insert({"A", "B"});
  reject_unknown(user_params, known, "env_params");
  for (const auto& [key, value] : user_params.items()) p[key] = value;
  const auto f = [](const std::string& key) { return "env_params." + key; };
  const auto num = [&](const std::string& key) { return number(p.at(key), f(key)); };

  try {
    if (env == "supply_chain_2p") {
      supply::TwoPlayerConfig c;
      c.raw_market = {num("raw_price"), num("raw_price_slope")};
      c.consumer_market = {num("demand_intercept"), num("demand_slope"), num("demand_noise")};
      const auto h = per_player(p.at("holding"), 2, f("holding"));
      const auto g = per_player(p.at("goodwill"), 2, f("goodwill"));
      c.holding[0] = h[0];
      c.holding[1] = h[1];
      c.goodwill[0] = g[0];
      c.goodwill[1] = g[1];
      c.forecast_alpha = num("forecast_alpha");
      c.order_high = num("order_high");
      c.price_high = num("price_high");
      c.initial_stock_low = num("initial_stock_low");
      c.initial_stock_high = num("initial_stock_high");
      c.gamma = num("gamma");
      return std::make_unique<supply::TwoPlayerSupplyChainEnv>(c);
    }
    if (env == "supply_chain") {
      const int n = static_cast<int>(integer(p.at("n_players"), f("n_players")));
      if (n < 1) fail(f("n_players"), "must be positive");
      std::vector<GameGraph::Edge> edges;
      for (const auto& [i, j, w] : edge_list(p.at("edges"), f("edges"))) edges.emplace_back(i, j);
      supply::SupplyChainConfig c;
      c.graph = GameGraph(n, edges);
      c.lead_time = per_player_int(p.at("lead_time"), n, f("lead_time"));
      c.holding = per_player(p.at("holding"), n, f("holding"));
      c.goodwill = per_player(p.at("goodwill"), n, f("goodwill"));
      c.raw_market = {num("raw_price"), num("raw_price_slope")};
      c.consumer_market = {num("demand_intercept"), num("demand_slope"), num("demand_noise")};
      c.rationing = supply::rationing_from_string(text(p.at("rationing"), f("rationing")));
      c.forecast_alpha = num("forecast_alpha");
      c.order_high = num("order_high");
      c.price_high = num("price_high");
      c.initial_stock_low = num("initial_stock_low");
      c.initial_stock_high = num("initial_stock_high");
      c.gamma = num("gamma");
      return std::make_unique<supply::SupplyChainEnv>(c);
    }
    if (env == "epidemic") {
      const int n = static_cast<int>(integer(p.at("n_cities"), f("n_cities")));
      if (n < 1) fail(f("n_cities"), "must be positive");
      std::vector<GameGraph::Edge> pairs;
      std::vector<double> weights;
      for (const auto& [i, j, w] : edge_list(p.at("edges"), f("edges"))) {
        pairs.emplace_back(i, j);
        weights.push_back(w.value_or(1.0));
      }
      epidemic::EpidemicConfig c;
      c.graph = GameGraph::undirected(n, pairs, weights);
      c.recovery_noise = per_player(p.at("recovery_noise"), n, f("recovery_noise"));
      c.lockdown_cost = per_player(p.at("lockdown_cost"), n, f("lockdown_cost"));
      c.effort_cost = per_player(p.at("effort_cost"), n, f("effort_cost"));
      c.initial_healthy = per_player(p.at("initial_healthy"), n, f("initial_healthy"));
      c.initial_patients = per_player(p.at("initial_patients"), n, f("initial_patients"));
      c.reward_after_transition =
          boolean(p.at("reward_after_transition"), f("reward_after_transition"));
      c.gamma = num("gamma");
      return std::make_unique<epidemic::EpidemicEnv>(c);
    }
    if (env == "opinion") {
      const int n = static_cast<int>(integer(p.at("n_players"), f("n_players")));
      if (n < 1) fail(f("n_players"), "must be positive");
      const int dim = static_cast<int>(integer(p.at("topic_dim"), f("topic_dim")));
      if (dim < 1) fail(f("topic_dim"), "must be positive");
      std::vector<GameGraph::Edge> pairs;
      std::vector<double> weights;
      for (const auto& [i, j, w] : edge_list(p.at("edges"), f("edges"))) {
        pairs.emplace_back(i, j);
        weights.push_back(w.value_or(1.0));
      }
      auto c = opinion::OpinionConfig::identity(GameGraph::undirected(n, pairs, weights), dim);
      c.disagreement_cost = per_player(p.at("disagreement_cost"), n, f("disagreement_cost"));
      c.control_cost = per_player(p.at("control_cost"), n, f("control_cost"));
      c.leader = static_cast<int>(integer(p.at("leader"), f("leader")));
      c.control_high = num("control_high");
      c.initial_spread = num("initial_spread");
      c.gamma = num("gamma");
      for (const char* which : {"A", "B"}) {
        if (!p.contains(which)) continue;
        const auto& list = p.at(which);
        if (!list.is_array() || static_cast<int>(list.size()) != n)
          fail(f(which), "expected one topic_dim x topic_dim matrix per player");
        auto& target = std::string(which) == "A" ? c.A : c.B;
        for (int i = 0; i < n; ++i) {
          const auto& m = list[static_cast<std::size_t>(i)];
          const std::string fi = f(which) + "[" + std::to_string(i) + "]";
          if (!m.is_array() || static_cast<int>(m.size()) != dim) fail(fi, "wrong row count");
          for (int r = 0; r < dim; ++r) {
            const auto& row = m[static_cast<std::size_t>(r)];
            if (!row.is_array() || static_cast<int>(row.size()) != dim)
              fail(fi, "wrong column count");
            for (int col = 0; col < dim; ++col)
              target[i](r, col) = number(row[static_cast<std::size_t>(col)], fi);
          }
        }
      }
      return std::make_unique<opinion::OpinionEnv>(c);
    }
    if (env == "retailer") {
      return std::make_unique<supply::RetailerEnv>(
          supply::ConsumerMarket{num("demand_intercept"), num("demand_slope"), num("demand_noise")},
          num("price_high"), num("forecast_alpha"), num("gamma"));
    }
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("env_params: ") + e.what());
  }
  fail("env", "unknown environment '" + env + "'");
}

namespace {

void parse_learning(const json& v, learning::DDPGConfig& d) {
  reject_unknown(v,
                 {"hidden", "activation", "actor_lr", "critic_lr", "tau", "gamma", "batch_size",
                  "buffer_capacity", "warmup_steps", "sigma_start", "sigma_end", "obs_scale",
                  "reward_scale"},
                 "learning");
  const auto f = [](const std::string& key) { return "learning." + key; };
  if (v.contains("hidden")) {
    const auto& h = v.at("hidden");
    if (!h.is_array()) fail(f("hidden"), "expected a list of layer widths");
    d.hidden.clear();
    for (std::size_t k = 0; k < h.size(); ++k) {
      const auto width = integer(h[k], f("hidden") + "[" + std::to_string(k) + "]");
      if (width < 1) fail(f("hidden"), "layer widths must be positive");
      d.hidden.push_back(static_cast<int>(width));
    }
  }
  if (v.contains("activation")) {
    const auto a = text(v.at("activation"), f("activation"));
    if (a == "relu") d.activation = nn::Hidden::Relu;
    else if (a == "tanh") d.activation = nn::Hidden::Tanh;
    else fail(f("activation"), "expected relu or tanh");
  }
  if (v.contains("actor_lr")) d.actor_lr = number(v.at("actor_lr"), f("actor_lr"));
  if (v.contains("critic_lr")) d.critic_lr = number(v.at("critic_lr"), f("critic_lr"));
  if (v.contains("tau")) d.tau = number(v.at("tau"), f("tau"));
  if (v.contains("gamma")) d.gamma = number(v.at("gamma"), f("gamma"));
  const auto count = [&](const char* key) {
    const auto value = integer(v.at(key), f(key));
    if (value < 0) fail(f(key), "must be >= 0");
    return static_cast<std::size_t>(value);
  };
  if (v.contains("batch_size")) d.batch_size = count("batch_size");
  if (v.contains("buffer_capacity")) d.buffer_capacity = count("buffer_capacity");
  if (v.contains("warmup_steps")) d.warmup_steps = count("warmup_steps");
  if (v.contains("sigma_start")) d.sigma_start = number(v.at("sigma_start"), f("sigma_start"));
  if (v.contains("sigma_end")) d.sigma_end = number(v.at("sigma_end"), f("sigma_end"));
  if (v.contains("obs_scale")) d.obs_scale = number(v.at("obs_scale"), f("obs_scale"));
  if (v.contains("reward_scale")) d.reward_scale = number(v.at("reward_scale"), f("reward_scale"));
}

json learning_to_json(const learning::DDPGConfig& d) {
  json j = {{"hidden", d.hidden},
            {"activation", d.activation == nn::Hidden::Relu ? "relu" : "tanh"},
            {"actor_lr", d.actor_lr},
            {"critic_lr", d.critic_lr},
            {"tau", d.tau},
            {"batch_size", d.batch_size},
            {"buffer_capacity", d.buffer_capacity},
            {"warmup_steps", d.warmup_steps},
            {"sigma_start", d.sigma_start},
            {"sigma_end", d.sigma_end},
            {"obs_scale", d.obs_scale},
            {"reward_scale", d.reward_scale}};
  if (d.gamma) j["gamma"] = *d.gamma;
  return j;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  reject_unknown(doc,
                 {"name", "env", "paradigm", "episodes", "horizon", "seeds", "base_seed",
                  "eval_episodes", "out", "plot_data", "trajectories", "workers", "learning",
                  "env_params"},
                 "");
  ExperimentConfig c;
  if (doc.contains("name")) c.name = text(doc.at("name"), "name");
  if (doc.contains("env")) c.env = text(doc.at("env"), "env");
  if (doc.contains("paradigm")) {
    try {
      c.training.paradigm = marl::paradigm_from_string(text(doc.at("paradigm"), "paradigm"));
    } catch (const ArgumentError& e) {
      fail("paradigm", e.what());
    }
  }
  if (doc.contains("episodes"))
    c.training.episodes = static_cast<int>(integer(doc.at("episodes"), "episodes"));
  if (doc.contains("horizon"))
    c.training.horizon = static_cast<int>(integer(doc.at("horizon"), "horizon"));
  if (doc.contains("seeds")) {
    const auto& s = doc.at("seeds");
    if (s.is_number_integer()) {
      c.seed_count = static_cast<int>(s.get<long long>());
    } else if (s.is_array()) {
      for (std::size_t k = 0; k < s.size(); ++k) {
        const auto v = integer(s[k], "seeds[" + std::to_string(k) + "]");
        if (v < 0) fail("seeds", "seeds must be nonnegative");
        c.explicit_seeds.push_back(static_cast<std::uint64_t>(v));
      }
    } else {
      fail("seeds", "expected a count or a list of integers");
    }
  }
  if (doc.contains("base_seed")) {
    const auto v = integer(doc.at("base_seed"), "base_seed");
    if (v < 0) fail("base_seed", "must be nonnegative");
    c.base_seed = static_cast<std::uint64_t>(v);
  }
  if (doc.contains("eval_episodes"))
    c.eval_episodes = static_cast<int>(integer(doc.at("eval_episodes"), "eval_episodes"));
  if (doc.contains("out")) c.out_dir = text(doc.at("out"), "out");
  if (doc.contains("plot_data")) c.plot_data = boolean(doc.at("plot_data"), "plot_data");
  if (doc.contains("trajectories"))
    c.trajectories = boolean(doc.at("trajectories"), "trajectories");
  if (doc.contains("workers")) c.workers = static_cast<int>(integer(doc.at("workers"), "workers"));
  if (doc.contains("learning")) parse_learning(doc.at("learning"), c.training.ddpg);
  if (doc.contains("env_params")) {
    if (!doc.at("env_params").is_object()) fail("env_params", "expected an object");
    c.env_params = doc.at("env_params");
  }
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("JSON syntax error at line " + std::to_string(line) + ", column " +
                      std::to_string(column));
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void finalize(ExperimentConfig& config) {
  if (!kEnvNames.count(config.env)) fail("env", "unknown environment '" + config.env + "'");
  if (config.name.empty()) config.name = config.env + "_" + marl::to_string(config.training.paradigm);
  if (config.name.find('/') != std::string::npos || config.name == "." || config.name == "..")
    fail("name", "must be a plain directory name");

  // Resolve env params against defaults so the echo is complete.
  const auto env = make_environment(config.env, config.env_params);
  json resolved = default_env_params(config.env);
  for (const auto& [key, value] : config.env_params.items()) resolved[key] = value;
  config.env_params = resolved;

  if (config.training.episodes < 0) fail("episodes", "must be >= 0");
  if (config.training.horizon < 1) fail("horizon", "must be >= 1");
  if (config.eval_episodes < 1) fail("eval_episodes", "must be >= 1");
  if (config.workers < 1) fail("workers", "must be >= 1");
  if (config.explicit_seeds.empty()) {
    if (config.seed_count < 1) fail("seeds", "count must be >= 1");
    config.training.seeds.clear();
    for (int k = 0; k < config.seed_count; ++k)
      config.training.seeds.push_back(config.base_seed + static_cast<std::uint64_t>(k));
  } else {
    config.training.seeds = config.explicit_seeds;
  }
  if (config.training.paradigm == marl::Paradigm::CentralizedReward && env->n_players() < 1)
    fail("paradigm", "centralized needs at least one player");
  try {
    config.training.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

json ExperimentConfig::to_json() const {
  return {{"name", name},
          {"env", env},
          {"env_params", env_params},
          {"paradigm", marl::to_string(training.paradigm)},
          {"episodes", training.episodes},
          {"horizon", training.horizon},
          {"seeds", training.seeds},
          {"eval_episodes", eval_episodes},
          {"out", out_dir.string()},
          {"plot_data", plot_data},
          {"trajectories", trajectories},
          {"workers", workers},
          {"learning", learning_to_json(training.ddpg)}};
}

}  // namespace netgame::harness
