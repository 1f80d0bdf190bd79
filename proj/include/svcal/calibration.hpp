#pragma once

#include <string_view>
#include <vector>

#include "svcal/numeric.hpp"

namespace svcal {

struct PredictionRecord;

enum class CalibrationObjective { NLL, ECE };

std::string_view to_string(CalibrationObjective objective);
CalibrationObjective parse_objective(std::string_view name);

struct Temperature {
  double t = 1.0;
  CalibrationObjective objective = CalibrationObjective::NLL;
  double dev_objective_value = 0.0;
};

struct TemperatureGrid {
  double lo = 0.25;
  double hi = 10.0;
  double step = 0.05;

  // Grid points lo + k*step up to hi (inclusive, with a 1e-9 step slack).
  std::vector<double> points() const;
};

/// Parses "lo:hi:step".
TemperatureGrid parse_grid(std::string_view spec);

/// softmax(logits / t). Throws InvalidTemperature unless t is finite and positive.
Probs2 apply_temperature(const Logits2& logits, double t);

inline Probs2 softmax(const Logits2& logits) { return apply_temperature(logits, 1.0); }

/// Mean -ln p(gold) under temperature t; probabilities clamped at 1e-12.
double nll(const std::vector<PredictionRecord>& records, double t);

/// Exhaustive grid search; the smallest t wins ties. ECE uses `ece_bins` equal-width bins.
Temperature fit_temperature(const std::vector<PredictionRecord>& dev,
                            CalibrationObjective objective = CalibrationObjective::NLL,
                            const TemperatureGrid& grid = {}, int ece_bins = 10);

}  // namespace svcal
