#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "readsim/config.hpp"
#include "readsim/metrics.hpp"
#include "readsim/ppo.hpp"

namespace readsim {

// Trains at the first configured time budget. Writes checkpoint.json,
// curve.csv and resolved_config.json into `out_dir`.
struct TrainSummary {
  std::filesystem::path checkpoint;
  std::filesystem::path curve;
  std::filesystem::path resolved_config;
  std::vector<CurvePoint> curve_points;
};
TrainSummary cmd_train(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream* log = nullptr);

struct SimulateRequest {
  std::string policy = "heuristic";  // or a checkpoint path
  std::optional<std::filesystem::path> text;
  std::size_t episodes = 50;
};

// One condition per configured time budget. Writes scanpaths.jsonl,
// metrics.csv and heatmap_T<budget>.{csv,svg} into `out_dir`.
struct SimulateSummary {
  std::filesystem::path scanpaths;
  std::filesystem::path metrics;
  std::vector<std::filesystem::path> heatmaps;
  std::map<double, MeanSd> reading_speed_by_condition;
};
SimulateSummary cmd_simulate(const RunConfig& config, const SimulateRequest& request,
                             const std::filesystem::path& out_dir);

// Writes comparison.csv, metrics_sim.csv, metrics_human.csv and summary.txt.
ComparisonReport cmd_evaluate(const RunConfig& config, const std::filesystem::path& simulated,
                              const std::filesystem::path& human, const std::filesystem::path& out_dir);

struct FitRow {
  std::size_t grid_index = 0;
  std::vector<std::pair<std::string, double>> parameters;
  std::map<std::string, double> metrics;  // means over fit.episodes episodes
  double loss = 0.0;
};

struct FitResult {
  std::vector<FitRow> rows;  // ascending loss, ties in grid order
  FitRow best;
};

// Grid search over fit.grid (first axis varies slowest). Throws ConfigError
// for an empty grid or target. Writes fit.csv and fit_best.json.
FitResult cmd_fit(const RunConfig& config, const std::string& policy, const std::optional<std::filesystem::path>& text,
                  const std::filesystem::path& out_dir);

// Mean metric vector for the given config under the seed protocol used by fit.
std::map<std::string, double> fit_metrics(const RunConfig& config, const std::string& policy,
                                          const std::optional<std::filesystem::path>& text);

}  // namespace readsim
