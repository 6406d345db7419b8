#include "netgame/harness/artifacts.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "netgame/common/error.hpp"

namespace netgame::harness {

using nlohmann::json;

int CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

std::vector<double> CsvTable::values(const std::string& name) const {
  const int c = column(name);
  require(c >= 0, "csv: no column '" + name + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[static_cast<std::size_t>(c)]);
  return out;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t c = 0; c < table.header.size(); ++c)
    out << (c ? "," : "") << table.header[c];
  out << '\n';
  for (const auto& row : table.rows) {
    require(row.size() == table.header.size(), "csv: row width does not match header");
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Fault("csv: bad number '" + s + "' on line " + std::to_string(line));
  return x;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Fault("csv: missing header");
  table.header = split(line);
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != table.header.size())
      throw Fault("csv: line " + std::to_string(n) + " has " + std::to_string(cells.size()) +
                  " cells, expected " + std::to_string(table.header.size()));
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c, n));
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<std::string> record_columns(const marl::RunRecord& record) {
  std::vector<std::string> cols = {"seed", "episode"};
  const int n = record.n_players;
  for (int i = 0; i < n; ++i) cols.push_back("reward_p" + std::to_string(i));
  const bool trades = !record.episodes.empty() && record.episodes.front().mean_order.size() > 0;
  if (trades) {
    for (int i = 0; i < n; ++i) cols.push_back("mean_q_p" + std::to_string(i));
    for (int i = 0; i < n; ++i) cols.push_back("mean_p_p" + std::to_string(i));
  }
  if (!record.episodes.empty() && record.episodes.front().throughput) cols.push_back("throughput");
  if (!record.episodes.empty() && record.episodes.front().inefficiency)
    cols.push_back("inefficiency");
  return cols;
}

CsvTable record_table(const marl::RunRecord& record) {
  CsvTable table;
  table.header = record_columns(record);
  const bool trades = table.column("mean_q_p0") >= 0;
  const bool throughput = table.column("throughput") >= 0;
  const bool inefficiency = table.column("inefficiency") >= 0;
  for (const auto& e : record.episodes) {
    std::vector<double> row = {static_cast<double>(record.seed), static_cast<double>(e.episode)};
    for (Eigen::Index i = 0; i < e.rewards.size(); ++i) row.push_back(e.rewards[i]);
    if (trades) {
      for (Eigen::Index i = 0; i < e.mean_order.size(); ++i) row.push_back(e.mean_order[i]);
      for (Eigen::Index i = 0; i < e.mean_price.size(); ++i) row.push_back(e.mean_price[i]);
    }
    if (throughput) row.push_back(e.throughput.value_or(0.0));
    if (inefficiency) row.push_back(e.inefficiency.value_or(0.0));
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable summarize(const std::vector<marl::RunRecord>& records) {
  std::vector<CsvTable> tables;
  for (const auto& r : records)
    if (!r.failed) tables.push_back(record_table(r));
  CsvTable out;
  out.header = {"episode"};
  if (tables.empty()) return out;
  const auto& header = tables.front().header;
  for (const auto& t : tables)
    require(t.header == header, "summarize: runs have different columns");
  for (std::size_t c = 2; c < header.size(); ++c) {
    out.header.push_back(header[c] + "_mean");
    out.header.push_back(header[c] + "_var");
  }
  std::size_t n_episodes = tables.front().rows.size();
  for (const auto& t : tables) n_episodes = std::min(n_episodes, t.rows.size());
  const double k = static_cast<double>(tables.size());
  for (std::size_t e = 0; e < n_episodes; ++e) {
    std::vector<double> row = {tables.front().rows[e][1]};
    for (std::size_t c = 2; c < header.size(); ++c) {
      double mean = 0.0;
      for (const auto& t : tables) mean += t.rows[e][c];
      mean /= k;
      double var = 0.0;
      for (const auto& t : tables) var += (t.rows[e][c] - mean) * (t.rows[e][c] - mean);
      row.push_back(mean);
      row.push_back(var / k);
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

json final_window_stats(const std::vector<marl::RunRecord>& records, int window) {
  json out = json::object();
  std::vector<CsvTable> tables;
  for (const auto& r : records)
    if (!r.failed && !r.episodes.empty()) tables.push_back(record_table(r));
  if (tables.empty()) return out;
  const auto& header = tables.front().header;
  for (std::size_t c = 2; c < header.size(); ++c) {
    std::vector<double> per_seed;
    for (const auto& t : tables) {
      const std::size_t n = t.rows.size();
      const std::size_t w = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(window, 1)));
      double s = 0.0;
      for (std::size_t e = n - w; e < n; ++e) s += t.rows[e][c];
      per_seed.push_back(s / static_cast<double>(w));
    }
    double mean = 0.0;
    for (double v : per_seed) mean += v;
    mean /= static_cast<double>(per_seed.size());
    double var = 0.0;
    for (double v : per_seed) var += (v - mean) * (v - mean);
    out[header[c]] = {{"mean", mean}, {"var", var / static_cast<double>(per_seed.size())}};
  }
  return out;
}

json summary_json(const ExperimentConfig& config, const std::vector<marl::RunRecord>& records,
                  const std::vector<SeedEvaluation>& evaluations, int window) {
  json failures = json::array();
  int ok = 0;
  for (const auto& r : records) {
    if (r.failed) failures.push_back({{"seed", r.seed}, {"message", r.failure}});
    else ++ok;
  }
  json evals = json::array();
  for (const auto& se : evaluations) {
    const auto& ev = se.evaluation;
    json e = {{"seed", se.seed},
              {"mean_rewards", std::vector<double>(ev.mean_rewards.data(),
                                                   ev.mean_rewards.data() + ev.mean_rewards.size())},
              {"mean_total", ev.mean_total}};
    if (ev.mean_throughput) e["mean_throughput"] = *ev.mean_throughput;
    if (ev.mean_inefficiency) e["mean_inefficiency"] = *ev.mean_inefficiency;
    evals.push_back(std::move(e));
  }
  json totals = json::object();
  if (!evaluations.empty()) {
    double mean = 0.0;
    for (const auto& se : evaluations) mean += se.evaluation.mean_total;
    mean /= static_cast<double>(evaluations.size());
    double var = 0.0;
    for (const auto& se : evaluations)
      var += (se.evaluation.mean_total - mean) * (se.evaluation.mean_total - mean);
    totals = {{"mean", mean}, {"var", var / static_cast<double>(evaluations.size())}};
  }
  return {{"config", config.to_json()},
          {"seeds", config.training.seeds},
          {"successful_runs", ok},
          {"failed_runs", static_cast<int>(records.size()) - ok},
          {"failures", failures},
          {"final_window", window},
          {"final", final_window_stats(records, window)},
          {"evaluation", {{"episodes", config.eval_episodes}, {"total", totals}, {"per_seed", evals}}}};
}

CsvTable trajectory_table(const Environment& env, const marl::Trajectory& trajectory) {
  CsvTable table;
  table.header = {"t", env.name() == "epidemic" ? "city" : "player"};
  for (const auto& c : env.trajectory_columns()) table.header.push_back(c);
  for (std::size_t t = 0; t < trajectory.results.size(); ++t) {
    for (int i = 0; i < env.n_players(); ++i) {
      std::vector<double> row = {static_cast<double>(t), static_cast<double>(i)};
      for (double v : env.trajectory_row(i, trajectory.states[t], trajectory.actions[t],
                                         trajectory.results[t]))
        row.push_back(v);
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace netgame::harness
