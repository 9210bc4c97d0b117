#include "sparsetrig/rate_fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sparsetrig {

namespace {

struct Line {
  double slope;
  double intercept;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y, std::size_t skip) {
  double n = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i == skip) continue;
    n += 1;
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i == skip) continue;
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate: all m values coincide");
  const double slope = sxy / sxx;
  return Line{slope, my - slope * mx};
}

}  // namespace

RateFit fit_rate(std::vector<std::pair<double, double>> rows, double kappa) {
  if (rows.size() < 4) throw std::invalid_argument("fit_rate: need at least 4 rows");
  std::vector<double> x, y;
  for (const auto& [m, e] : rows) {
    if (!(m > 1.0) || !std::isfinite(m)) throw std::invalid_argument("fit_rate: need m > 1");
    if (!(e > 0.0) || !std::isfinite(e)) throw std::invalid_argument("fit_rate: need error > 0");
    x.push_back(std::log(m));
    y.push_back(std::log(e) - kappa * std::log(std::log(m)));
  }
  RateFit fit;
  fit.kappa = kappa;
  const Line all = least_squares(x, y, x.size());
  fit.slope = all.slope;
  fit.intercept = all.intercept;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (all.intercept + all.slope * x[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(x.size()));
  fit.band_lo = fit.band_hi = fit.slope;
  for (std::size_t i = 0; i < x.size(); ++i) {
    try {
      const Line loo = least_squares(x, y, i);
      fit.band_lo = std::min(fit.band_lo, loo.slope);
      fit.band_hi = std::max(fit.band_hi, loo.slope);
    } catch (const std::invalid_argument&) {
      // leaving this row out collapses the m range; it adds no band information
    }
  }
  fit.rows = std::move(rows);
  return fit;
}

nlohmann::json to_json(const RateFit& fit) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [m, e] : fit.rows) rows.push_back({m, e});
  return nlohmann::json{{"slope", fit.slope},       {"intercept", fit.intercept}, {"kappa", fit.kappa},
                        {"residual", fit.residual}, {"band", {fit.band_lo, fit.band_hi}}, {"rows", rows}};
}

}  // namespace sparsetrig
