#pragma once

#include <utility>
#include <vector>

#include <json.hpp>

namespace sparsetrig {

// Least-squares fit of log(error / (ln m)^kappa) against log m.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double kappa = 0.0;
  double residual = 0.0;  // RMS of the log-domain residuals
  // Range of the slopes refitted with one row left out.
  double band_lo = 0.0;
  double band_hi = 0.0;
  std::vector<std::pair<double, double>> rows;  // (m, error)
};

// Needs >= 4 rows with m > 1, error > 0 and at least two distinct m.
RateFit fit_rate(std::vector<std::pair<double, double>> rows, double kappa);

nlohmann::json to_json(const RateFit& fit);

}  // namespace sparsetrig
