#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "svcal/calibration.hpp"
#include "svcal/distributions.hpp"
#include "svcal/metrics.hpp"
#include "svcal/stats.hpp"

namespace svcal {

struct RunConfig {
  std::filesystem::path predictions;
  std::optional<std::filesystem::path> votes;
  std::optional<std::filesystem::path> soft_predictions;  // soft-loss model, same schema
  std::optional<std::filesystem::path> null_predictions;  // null-input model for PVI
  std::optional<std::filesystem::path> proxies;
  std::vector<std::string> proxy_columns;  // empty: every column except case_id/article

  Split split = Split::Test;
  Split dev_split = Split::Dev;
  bool temperature_scaling = true;
  int ece_bins = kDefaultEceBins;
  TemperatureGrid grid;
  CalibrationObjective objective = CalibrationObjective::NLL;
  double entropy_bin_width = kDefaultEntropyBinWidth;
  std::uint64_t seed = 0;
  TTestVariant t_test = TTestVariant::Welch;
  std::optional<std::set<int>> articles;  // allow-list; nullopt keeps every article

  std::filesystem::path output_dir = "report";

  void validate() const;  // throws InvalidArgument
};

struct PipelineOutput {
  std::vector<std::filesystem::path> files;  // in write order
  std::size_t unanimous = 0;
  std::size_t split_vote = 0;
  std::size_t all = 0;
  std::optional<Temperature> temperature;
};

/// Evaluates the configured split per group (unanimous / split_vote / all) and
/// writes report.json plus the per-pair and histogram CSVs it was computed from.
/// A pair is unanimous when its judge vote shares have zero entropy.
PipelineOutput run_pipeline(const RunConfig& config);

}  // namespace svcal
