#include "svcal/calibration.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "svcal/error.hpp"
#include "svcal/metrics.hpp"

namespace svcal {

std::string_view to_string(CalibrationObjective objective) {
  return objective == CalibrationObjective::NLL ? "nll" : "ece";
}

CalibrationObjective parse_objective(std::string_view name) {
  if (name == "nll" || name == "NLL") return CalibrationObjective::NLL;
  if (name == "ece" || name == "ECE") return CalibrationObjective::ECE;
  fail(ErrorCode::InvalidArgument, "unknown calibration objective '" + std::string(name) + "'");
}

std::vector<double> TemperatureGrid::points() const {
  if (!(lo > 0.0) || !(hi > lo) || !(step > 0.0) || !std::isfinite(hi) || !std::isfinite(step)) {
    fail(ErrorCode::InvalidGrid, "temperature grid needs 0 < lo < hi and step > 0");
  }
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(lo + static_cast<double>(k) * step);
  return out;
}

TemperatureGrid parse_grid(std::string_view spec) {
  double values[3];
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t colon = i < 2 ? spec.find(':', pos) : spec.size();
    if (colon == std::string_view::npos) break;
    const std::string_view part = spec.substr(pos, colon - pos);
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), values[i]);
    if (ec != std::errc() || ptr != part.data() + part.size()) break;
    if (i == 2) {
      TemperatureGrid grid{values[0], values[1], values[2]};
      grid.points();  // validates
      return grid;
    }
    pos = colon + 1;
  }
  fail(ErrorCode::InvalidGrid, "expected lo:hi:step, got '" + std::string(spec) + "'");
}

Probs2 apply_temperature(const Logits2& logits, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    fail(ErrorCode::InvalidTemperature, "temperature must be positive and finite, got " + format_double(t));
  }
  // Work with the scaled margin so huge logits or tiny t cannot overflow.
  const double margin = (logits[1] - logits[0]) / t;
  const double e = std::exp(-std::abs(margin));
  const double big = 1.0 / (1.0 + e);
  const double small = e / (1.0 + e);
  return margin > 0.0 ? Probs2{small, big} : Probs2{big, small};
}

double nll(const std::vector<PredictionRecord>& records, double t) {
  if (records.empty()) fail(ErrorCode::EmptyInput, "NLL needs at least one prediction");
  double total = 0.0;
  for (const auto& r : records) {
    const Probs2 p = apply_temperature(r.logits, t);
    total -= safe_log(p[static_cast<std::size_t>(r.gold)]);
  }
  return total / static_cast<double>(records.size());
}

Temperature fit_temperature(const std::vector<PredictionRecord>& dev, CalibrationObjective objective,
                            const TemperatureGrid& grid, int ece_bins) {
  if (dev.empty()) fail(ErrorCode::EmptyInput, "temperature search needs a non-empty dev set");
  const std::vector<double> candidates = grid.points();

  auto evaluate = [&](double t) {
    if (objective == CalibrationObjective::NLL) return nll(dev, t);
    std::vector<ConfidencePoint> points;
    points.reserve(dev.size());
    for (const auto& r : dev) {
      const int pred = predicted_class(r);
      points.push_back({apply_temperature(r.logits, t)[static_cast<std::size_t>(pred)], pred == r.gold});
    }
    return ece(points, ece_bins).ece;
  };

  Temperature best{candidates.front(), objective, std::numeric_limits<double>::infinity()};
  for (double t : candidates) {
    const double value = evaluate(t);
    if (value < best.dev_objective_value) {
      best.t = t;
      best.dev_objective_value = value;
    }
  }
  return best;
}

}  // namespace svcal
