#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "netgame/core/game.hpp"
#include "netgame/harness/config.hpp"
#include "netgame/marl/trainer.hpp"

namespace netgame::harness {

/// Numeric CSV with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  ///< -1 when absent
  std::vector<double> values(const std::string& name) const;
};

/// Shortest text that parses back to the same double.
std::string format_double(double x);

void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);

/// seed, episode, reward_p<i>..., then mean_q_p<i>/mean_p_p<i> when the env
/// trades, then throughput and inefficiency when the env reports them.
std::vector<std::string> record_columns(const marl::RunRecord& record);
CsvTable record_table(const marl::RunRecord& record);

/// Per-episode cross-seed mean and population variance of every metric column
/// (`<col>_mean`, `<col>_var`). Failed runs are excluded.
CsvTable summarize(const std::vector<marl::RunRecord>& records);

/// Per-seed evaluation of a trained team.
struct SeedEvaluation {
  std::uint64_t seed = 0;
  marl::Evaluation evaluation;
};

/// Mean and population variance across successful seeds of each metric's
/// average over the last `window` episodes.
nlohmann::json final_window_stats(const std::vector<marl::RunRecord>& records, int window);

nlohmann::json summary_json(const ExperimentConfig& config,
                            const std::vector<marl::RunRecord>& records,
                            const std::vector<SeedEvaluation>& evaluations, int window);

/// t, player (city for the epidemic env), then the env's own columns.
CsvTable trajectory_table(const Environment& env, const marl::Trajectory& trajectory);

}  // namespace netgame::harness
