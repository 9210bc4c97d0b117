#include "sparsetrig/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "sparsetrig/dictionary.hpp"
#include "sparsetrig/errors.hpp"
#include "sparsetrig/greedy.hpp"
#include "sparsetrig/index_set.hpp"
#include "sparsetrig/layered.hpp"
#include "sparsetrig/norms.hpp"
#include "sparsetrig/oracle.hpp"
#include "sparsetrig/parallel.hpp"
#include "sparsetrig/rate_fit.hpp"
#include "sparsetrig/rng.hpp"
#include "sparsetrig/serialization.hpp"
#include "sparsetrig/sparse_grid.hpp"

#ifndef SPARSETRIG_VERSION
#define SPARSETRIG_VERSION "unknown"
#endif

namespace sparsetrig {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) { return format_number(v); }

json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

double number_from(const json& j) {
  if (j.is_null()) return kNaN;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw std::invalid_argument("config: expected a number, got \"" + s + "\"");
  }
  return j.get<double>();
}

RateTarget rate_target(const ExperimentConfig& c) {
  return c.target == "kernel" ? RateTarget::kernel(c.r, c.d) : RateTarget::of(c.class_spec());
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("config: " + what);
}

void require_box(const ExperimentConfig& c) {
  require(static_cast<int>(c.box.size()) == c.d, "box needs one entry per dimension");
  for (int n : c.box) require(n >= 1, "box entries must be >= 1");
}

Severity band_severity(const ExperimentConfig& c) { return c.monitored ? Severity::Monitor : Severity::Assert; }

std::pair<double, double> band_or_default(const Tolerances& tol, double predicted, double width) {
  return {std::isnan(tol.slope_lo) ? predicted - width : tol.slope_lo,
          std::isnan(tol.slope_hi) ? predicted + width : tol.slope_hi};
}

// Least-squares slope of y against x, with the leave-one-out range.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double band_lo = 0.0;
  double band_hi = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  auto fit = [&](std::size_t skip) {
    double sx = 0, sy = 0, n = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (i != skip) sx += x[i], sy += y[i], n += 1;
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (i != skip) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
    return std::pair{sxy / sxx, my - sxy / sxx * mx};
  };
  LineFit out;
  std::tie(out.slope, out.intercept) = fit(x.size());
  out.band_lo = out.band_hi = out.slope;
  if (x.size() >= 3)
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double s = fit(i).first;
      out.band_lo = std::min(out.band_lo, s);
      out.band_hi = std::max(out.band_hi, s);
    }
  return out;
}

std::string csv_header(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::Approx:
      return "regime,seed,p,p_used,m,error,normalized";
    case ExperimentKind::Rates:
      return curve_csv_header();
    case ExperimentKind::Cubature:
      return "regime,d,r,q,theta,n,points,seed,error";
    case ExperimentKind::Oracle:
      return c.method == "lebesgue" ? "seed,m,steps,residual,short_steps,residual_short,residual_m,sigma,ratio,ratio_short"
                                    : "seed,m,residual,sigma,difference";
  }
  return {};
}

// ---- approx -------------------------------------------------------------------

void run_approx(const ExperimentConfig& c, RunResult& out) {
  const double theta = box_theta(c.box);
  const bool sup = std::isinf(c.p);
  const double p_used = sup ? g_inf_exponent(theta) : c.p;
  const Schedule schedule = Schedule::for_lp(p_used, c.v);
  const double normalizer = sup ? std::sqrt(std::log(theta)) : std::pow(schedule.gamma, 1.0 / schedule.q);
  const std::string regime = sup ? "IA:p=inf" : (c.p >= 2.0 ? "IA:2<=p" : "IA:1<p<2");

  struct SeedRun {
    std::vector<double> errors;  // m = m_min..m_max
    bool conserved = true;
    RateFit fit;
  };
  std::vector<SeedRun> runs(c.seeds.size());
  parallel_for(c.seeds.size(), c.threads, [&](std::size_t i) {
    const TrigPolynomial t = random_box_polynomial(c.box, c.seeds[i]);
    const TrigDictionary dict(c.box, p_used, AtomScaling::Unit);
    IaOptions io;
    io.schedule = schedule;
    io.m_max = c.m_max;
    io.oversampling = c.oversampling;
    io.keep_snapshots = true;
    const auto trace = ia_epsilon(t, dict, io);
    if (static_cast<int>(trace.steps.size()) < c.m_max) throw ConvergenceError("approx: IA stopped early", 0.0);
    SeedRun& run = runs[i];
    for (const auto& st : trace.steps) {
      std::int64_t total = 0;
      for (auto v : st.numerators) total += v;
      run.conserved = run.conserved && total == st.step;
    }
    std::vector<std::pair<double, double>> rows;
    for (int m = c.m_min; m <= c.m_max; ++m) {
      const auto& st = trace.steps[static_cast<std::size_t>(m - 1)];
      double err = st.residual;  // ||t||_A = 1
      if (sup) {
        std::vector<RealTerm> g;
        for (std::size_t j = 0; j < st.numerators.size(); ++j) {
          const auto& term = trace.terms[j];
          g.push_back(RealTerm{term.atom, term.sign * static_cast<double>(st.numerators[j]) / (m * term.norm_const)});
        }
        err = norm_value(t - from_real_expansion(t.dim(), g), Exponent::sup(), c.oversampling);
      }
      run.errors.push_back(err);
      rows.emplace_back(m, err);
    }
    run.fit = fit_rate(std::move(rows), 0.0);
  });

  std::ostringstream csv;
  json seeds = json::array();
  std::vector<double> slopes;
  bool conserved = true;
  int good = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    for (int m = c.m_min; m <= c.m_max; ++m) {
      const double e = run.errors[static_cast<std::size_t>(m - c.m_min)];
      csv << regime << ',' << c.seeds[i] << ',' << num(c.p) << ',' << num(p_used) << ',' << m << ',' << num(e) << ','
          << num(e / normalizer) << '\n';
      ++out.rows;
    }
    conserved = conserved && run.conserved;
    slopes.push_back(run.fit.slope);
    if (run.fit.slope <= c.tol.slope_hi) ++good;
    seeds.push_back({{"seed", c.seeds[i]},
                     {"slope", run.fit.slope},
                     {"band", {run.fit.band_lo, run.fit.band_hi}},
                     {"error_first", run.errors.front()},
                     {"error_last", run.errors.back()}});
  }
  out.csv += csv.str();
  std::sort(slopes.begin(), slopes.end());
  const double fraction = static_cast<double>(good) / static_cast<double>(runs.size());
  out.results = {{"regime", regime},
                 {"p_used", p_used},
                 {"normalizer", normalizer},
                 {"predicted_slope", sup || c.p >= 2.0 ? -0.5 : -(1.0 - 1.0 / c.p)},
                 {"slope_threshold", c.tol.slope_hi},
                 {"median_slope", slopes[slopes.size() / 2]},
                 {"fraction_within", fraction},
                 {"seeds", seeds}};
  out.checks.push_back({"a_norm_conserved", conserved, Severity::Assert,
                        "sum of IA numerators equals the step count at every step"});
  std::ostringstream detail;
  detail << good << "/" << runs.size() << " seeds with slope <= " << num(c.tol.slope_hi) << " (need "
         << num(c.tol.min_fraction) << "), median slope " << num(slopes[slopes.size() / 2]);
  out.checks.push_back({"slope_fraction", fraction >= c.tol.min_fraction, band_severity(c), detail.str()});
}

// ---- rates --------------------------------------------------------------------

void finish_rates(const ExperimentConfig& c, const RateLine& line, const std::vector<CurveRow>& rows, RunResult& out) {
  std::ostringstream csv;
  std::vector<std::pair<double, double>> pts;
  double worst_tail = 0.0;
  for (const auto& row : rows) {
    csv << curve_csv_row(row) << '\n';
    pts.emplace_back(static_cast<double>(row.m), row.error);
    if (row.error > 0) worst_tail = std::max(worst_tail, row.tail / row.error);
  }
  out.csv += csv.str();
  out.rows = rows.size();
  const RateFit fit = fit_rate(pts, line.kappa);
  const auto [lo, hi] = band_or_default(c.tol, -line.rho, 0.25);
  out.results = {{"line", {{"id", line.id}, {"rho", line.rho}, {"kappa", line.kappa}, {"guard", line.guard}}},
                 {"predicted_slope", -line.rho},
                 {"band", {lo, hi}},
                 {"fit", to_json(fit)},
                 {"max_tail_over_error", worst_tail}};
  if (worst_tail > 0.5)
    out.warnings.push_back("truncation tail exceeds half the measured error; raise extra_layers");
  std::ostringstream detail;
  detail << "slope " << num(fit.slope) << " (leave-one-out " << num(fit.band_lo) << ".." << num(fit.band_hi)
         << "), kappa " << num(line.kappa) << ", accepted [" << num(lo) << ", " << num(hi) << "], target "
         << num(-line.rho);
  out.checks.push_back({"rate_band", fit.slope >= lo && fit.slope <= hi, band_severity(c), detail.str()});
}

void run_rates(const ExperimentConfig& c, RunResult& out) {
  const RateTarget target = rate_target(c);
  if (c.method == "layered") {
    const RateLine line = rate_line(target, c.p, c.mu);
    CurveOptions co;
    co.am.greedy.v = c.v;
    co.am.greedy.oversampling = c.oversampling;
    co.am.threads = 1;
    co.extra_layers = c.extra_layers;
    co.threads = c.threads;
    finish_rates(c, line, sigma_upper_curve(target, c.p, c.mu, c.n_values, c.seeds, co), out);
    return;
  }
  // partial_sum: hyperbolic cross truncation of the kernel, 1 < p <= 2
  RateLine line;
  line.id = "F:1<p<=2";
  line.guard = "r > 1 - 1/p";
  line.rho = c.r - 1.0 + 1.0 / c.p;
  line.kappa = (c.d - 1) * (c.r - 1.0 + 2.0 / c.p);
  const auto ns = sorted_unique(c.n_values);
  const int level = ns.back() + c.extra_layers;
  const ClassSample f = target.sample(level, c.seeds.front());
  const double tail = tail_estimate(f, c.p);
  std::vector<CurveRow> rows(ns.size());
  parallel_for(ns.size(), c.threads, [&](std::size_t i) {
    const int n = ns[i];
    const TrigPolynomial rest = f.f - hyperbolic_partial_sum(f.f, n);
    CurveRow& row = rows[i];
    row.regime = line.id;
    row.d = c.d;
    row.r = c.r;
    row.q = 1.0;
    row.p = c.p;
    row.theta = kInf;
    row.mu = 0.0;
    row.n = n;
    row.seed = c.seeds.front();
    row.m = static_cast<std::int64_t>(IndexSet::step_hyperbolic_cross(c.d, n).size());
    row.error = c.p == 2.0 ? l2_norm(rest) : norm_value(rest, Exponent::lp(c.p), c.oversampling);
    const double m = static_cast<double>(row.m);
    row.predicted = std::pow(m, -line.rho) * std::pow(std::log(m), line.kappa);
    row.ratio = row.error / row.predicted;
    row.tail = tail;
  });
  finish_rates(c, line, rows, out);
}

// ---- cubature -----------------------------------------------------------------

void run_cubature(const ExperimentConfig& c, RunResult& out) {
  const ClassSpec spec = c.class_spec();
  const ClassSampling sampling = c.sampling == "rule_aligned" ? ClassSampling::RuleAligned : ClassSampling::Random;
  const auto ns = sorted_unique(c.n_values);
  struct Level {
    std::size_t points = 0;
    ErrorStatistics stats;
  };
  std::vector<Level> levels(ns.size());
  parallel_for(ns.size(), c.threads, [&](std::size_t i) {
    const KnotSet X = smolyak_cubature(ns[i], c.d);
    levels[i].points = X.size();
    levels[i].stats = class_cubature_error(spec, X, ns[i] + c.extra_layers, c.seeds, sampling);
  });

  const std::string regime = to_string(spec.kind) + ":cubature";
  std::ostringstream csv;
  json per_n = json::array();
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const int n = ns[i];
    const auto& lv = levels[i];
    for (std::size_t s = 0; s < c.seeds.size(); ++s) {
      csv << regime << ',' << c.d << ',' << num(c.r) << ',' << num(c.q) << ',' << num(spec.theta) << ',' << n << ','
          << lv.points << ',' << c.seeds[s] << ',' << num(lv.stats.errors[s]) << '\n';
      ++out.rows;
    }
    const double normalized = lv.stats.max / std::pow(static_cast<double>(std::max(n, 1)), c.d - 1);
    per_n.push_back({{"n", n},
                     {"points", lv.points},
                     {"half_period_points", sparse_grid(n, c.d).size()},
                     {"positive_parts_points", sparse_grid(n, c.d, {GridPeriod::Half, true, false}).size()},
                     {"max", lv.stats.max},
                     {"median", lv.stats.median},
                     {"normalized_max", normalized}});
    if (normalized > 0) {
      xs.push_back(n);
      ys.push_back(std::log2(normalized));
    }
  }
  out.csv += csv.str();
  out.results = {{"regime", regime}, {"sampling", c.sampling}, {"levels", per_n}, {"lower_estimate", true}};

  const auto [lo, hi] = band_or_default(c.tol, -c.r, 0.25);
  if (xs.size() >= 2) {
    const LineFit fit = least_squares(xs, ys);
    out.results["fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"band", {fit.band_lo, fit.band_hi}}};
    out.results["band"] = {lo, hi};
    std::ostringstream detail;
    detail << "slope of log2(max error / n^(d-1)) against n: " << num(fit.slope) << " (leave-one-out "
           << num(fit.band_lo) << ".." << num(fit.band_hi) << "), accepted [" << num(lo) << ", " << num(hi) << "]";
    out.checks.push_back({"decay_band", fit.slope >= lo && fit.slope <= hi, band_severity(c), detail.str()});
  } else {
    out.warnings.push_back("fewer than two levels with nonzero error; no decay fit");
  }

  json exact = json::array();
  bool all_exact = true;
  for (int n = 0; n <= c.exact_check_max; ++n) {
    const auto rule = rule_functional(smolyak_cubature(n, c.d));
    auto worst_on = [&](int level) {
      double worst = 0.0;
      if (level < 0) return worst;
      IndexSet::step_hyperbolic_cross(c.d, level).for_each([&](std::span<const int> k) {
        const bool zero = std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
        worst = std::max(worst, std::abs(rule(k) - Complex(zero ? 1.0 : 0.0, 0.0)));
      });
      return worst;
    };
    const double w_nd = worst_on(n - c.d);
    const double w_n = worst_on(n);
    all_exact = all_exact && w_nd <= c.tol.exact;
    exact.push_back({{"n", n}, {"max_deviation_Q_n_minus_d", w_nd}, {"max_deviation_Q_n", w_n}});
  }
  out.results["exactness"] = exact;
  out.checks.push_back({"exact_on_hyperbolic_cross", all_exact, Severity::Assert,
                        "rule reproduces the mean of every e^{ikx}, k in Q_{n-d}, n <= " +
                            std::to_string(c.exact_check_max)});
}

// ---- oracle -------------------------------------------------------------------

void run_oracle(const ExperimentConfig& c, RunResult& out) {
  std::ostringstream csv;
  if (c.method == "l2_equivalence") {
    const TrigDictionary dict(c.box, 2.0);
    struct Row {
      int m;
      double residual, sigma;
    };
    std::vector<std::vector<Row>> per_seed(c.seeds.size());
    parallel_for(c.seeds.size(), c.threads, [&](std::size_t i) {
      const TrigPolynomial f = random_box_polynomial(c.box, c.seeds[i]);
      WcgaOptions wo;
      wo.t = c.t;
      wo.m_max = std::min<int>(c.m_max, static_cast<int>(dict.size()));
      wo.oversampling = c.oversampling;
      wo.keep_snapshots = false;
      const auto trace = wcga(f, dict, wo);
      for (const auto& st : trace.steps) per_seed[i].push_back({st.step, st.residual, oracle_sigma(f, dict, st.step)});
    });
    double worst_diff = 0.0, worst_deficit = 0.0;
    for (std::size_t i = 0; i < per_seed.size(); ++i)
      for (const auto& row : per_seed[i]) {
        csv << c.seeds[i] << ',' << row.m << ',' << num(row.residual) << ',' << num(row.sigma) << ','
            << num(row.residual - row.sigma) << '\n';
        ++out.rows;
        worst_diff = std::max(worst_diff, std::abs(row.residual - row.sigma));
        worst_deficit = std::max(worst_deficit, row.sigma - row.residual);
      }
    out.results = {{"dictionary_size", dict.size()}, {"max_abs_difference", worst_diff},
                   {"max_oracle_excess", worst_deficit}};
    out.checks.push_back({"oracle_dominance", worst_deficit <= 1e-9, Severity::Assert,
                          "residual >= sigma_m - 1e-9; worst excess " + num(worst_deficit)});
    if (c.t == 1.0)
      out.checks.push_back({"l2_oracle_match", worst_diff <= c.tol.match, Severity::Assert,
                            "max |residual - sigma_m| = " + num(worst_diff) + " (tolerance " + num(c.tol.match) + ")"});
  } else {
    const TrigDictionary dict(c.box, c.p);
    std::vector<LebesgueReport> reps(c.seeds.size());
    parallel_for(c.seeds.size(), c.threads, [&](std::size_t i) {
      reps[i] = lebesgue_check(random_box_polynomial(c.box, c.seeds[i]), dict, c.t, c.m_max, c.c_iter);
    });
    double worst = 0.0, worst_short = 0.0, worst_deficit = 0.0;
    int breaches = 0;
    for (std::size_t i = 0; i < reps.size(); ++i) {
      const auto& r = reps[i];
      csv << c.seeds[i] << ',' << r.m << ',' << r.steps << ',' << num(r.residual) << ',' << r.short_steps << ','
          << num(r.residual_short) << ',' << num(r.residual_m) << ',' << num(r.sigma) << ',' << num(r.ratio) << ','
          << num(r.ratio_short) << '\n';
      ++out.rows;
      worst = std::max(worst, r.ratio);
      worst_short = std::max(worst_short, r.ratio_short);
      worst_deficit = std::max(worst_deficit, r.sigma - r.residual_m);
      if (!(r.ratio <= c.tol.monitor_ratio)) ++breaches;
    }
    out.results = {{"dictionary_size", dict.size()},
                   {"max_ratio", json_number(worst)},
                   {"max_ratio_short", json_number(worst_short)},
                   {"threshold", c.tol.monitor_ratio},
                   {"breaches", breaches}};
    out.checks.push_back({"oracle_dominance", worst_deficit <= 1e-9, Severity::Assert,
                          "m-step residual >= sigma_m - 1e-9; worst excess " + num(worst_deficit)});
    out.checks.push_back({"lebesgue_ratio", breaches == 0, Severity::Monitor,
                          std::to_string(breaches) + " seeds above " + num(c.tol.monitor_ratio) + "; max ratio " +
                              num(worst) + ", after ceil(m ln(m+1)) steps " + num(worst_short)});
  }
  out.csv += csv.str();
}

// ---- presets ------------------------------------------------------------------

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::uint64_t count) {
  std::vector<std::uint64_t> s;
  for (std::uint64_t i = 0; i < count; ++i) s.push_back(first + i);
  return s;
}

std::vector<int> int_range(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

std::map<std::string, ExperimentConfig> build_presets() {
  std::map<std::string, ExperimentConfig> out;
  auto add = [&](ExperimentConfig c) { out.emplace(c.id, std::move(c)); };

  auto approx = [](std::string id, double p) {
    ExperimentConfig c;
    c.id = std::move(id);
    c.kind = ExperimentKind::Approx;
    c.method = "ia";
    c.d = 2;
    c.box = {16, 16};
    c.p = p;
    c.m_min = 8;
    c.m_max = 256;
    c.seeds = seed_range(1, 20);
    return c;
  };
  {
    auto c = approx("ia-lp", 4.0);
    c.description = "IA(eps) on random t/||t||_A over Box(16,16), residual in L_4";
    c.claim = "||t - G_m(t)||_p <= C(v) gamma^{1/2} ||t||_A m^{-1/2}, 2 <= p < inf";
    c.guard = "2 <= p < inf";
    c.tol.slope_hi = -0.45;
    add(c);
  }
  {
    auto c = approx("ia-linf", kInf);
    c.description = "IA(eps) in L_p with p = ceil(ln theta(N)), error measured in the sup norm";
    c.claim = "||t - G_m(t)||_inf << (ln theta(N))^{1/2} ||t||_A m^{-1/2}";
    c.guard = "p = max(2, ceil(ln theta(N)))";
    c.tol.slope_hi = -0.45;
    add(c);
  }
  {
    auto c = approx("ia-lp-below-2", 1.5);
    c.description = "IA(eps) in L_p, 1 < p < 2, where the modulus of smoothness is of power type p";
    c.claim = "||t - G_m(t)||_p << ||t||_A m^{-(1 - 1/p)}, 1 < p <= 2";
    c.guard = "1 < p <= 2";
    c.tol.slope_hi = -0.25;
    c.monitored = true;
    add(c);
  }

  auto rates = [](std::string id, ClassSpec spec, double p, double mu) {
    ExperimentConfig c;
    c.id = std::move(id);
    c.kind = ExperimentKind::Rates;
    c.method = "layered";
    c.target = "class";
    c.family = spec.kind;
    c.d = spec.d;
    c.r = spec.r;
    c.q = spec.q;
    c.theta = spec.theta;
    c.p = p;
    c.mu = mu;
    c.n_values = int_range(3, 7);
    c.seeds = seed_range(1, 3);
    c.extra_layers = 6;
    c.monitored = true;
    return c;
  };
  auto linf = [](ExperimentConfig c) {
    c.n_values = int_range(2, 5);
    c.seeds = {1};
    c.extra_layers = 2;
    return c;
  };
  {
    auto c = rates("w-q-le-2-le-p", ClassSpec::W(1.4, 1.5, 2), 2.0, 0.35);
    c.claim = "sigma_m(W^r_q)_p << m^{-r+1/q-1/2} (log m)^{(d-1)(r-2/q+1)}, 1 < q <= 2 <= p < inf";
    c.guard = "r > 1/q";
    // q < 2 normalizes on a full grid, which bounds the truncation level
    c.seeds = {1};
    c.extra_layers = 3;
    add(c);
  }
  {
    auto c = rates("w-2-le-q-le-p", ClassSpec::W(1.5, 2.0, 2), 2.0, 0.5);
    c.claim = "sigma_m(W^r_q)_p << m^{-r} (log m)^{r(d-1)}, 2 <= q <= p < inf";
    c.guard = "r > 1/2";
    c.monitored = false;
    c.tol.slope_lo = -1.7;
    c.tol.slope_hi = -1.3;
    add(c);
  }
  {
    auto c = linf(rates("w-linf-q-le-2", ClassSpec::W(1.4, 1.5, 2), kInf, 0.35));
    c.claim = "sigma_m(W^r_q)_inf << m^{-r+1/q-1/2} (log m)^{(d-1)(r-2/q+1)+1/2}, 1 < q <= 2";
    c.guard = "r > 1/q";
    add(c);
  }
  {
    auto c = linf(rates("w-linf-2-le-q", ClassSpec::W(1.5, 2.0, 2), kInf, 0.5));
    c.claim = "sigma_m(W^r_q)_inf << m^{-r} (log m)^{r(d-1)+1/2}, 2 <= q < inf";
    c.guard = "r > 1/2";
    add(c);
  }
  {
    ExperimentConfig c = rates("kernel-p-ge-2", ClassSpec::W(1.5, 2.0, 2), 2.0, 0.25);
    c.target = "kernel";
    c.seeds = {1};
    c.claim = "sigma_m(F_r)_p << m^{-r+1/2} (log m)^{r(d-1)}, 2 <= p < inf";
    c.guard = "r > 1";
    c.monitored = false;
    c.tol.slope_lo = -1.2;
    c.tol.slope_hi = -0.8;
    add(c);
  }
  {
    ExperimentConfig c = rates("kernel-p-le-2", ClassSpec::W(1.5, 2.0, 2), 1.5, 0.0);
    c.method = "partial_sum";
    c.target = "kernel";
    c.seeds = {1};
    c.n_values = int_range(2, 6);
    c.extra_layers = 2;
    c.oversampling = 2;
    c.claim = "sigma_m(F_r)_p << m^{-r+1-1/p} (log m)^{(d-1)(r-1+2/p)}, 1 < p <= 2, by hyperbolic cross truncation";
    c.guard = "r > 1 - 1/p";
    add(c);
  }
  {
    auto c = rates("h-q-le-2-le-p", ClassSpec::H(1.4, 1.5, 2), 2.0, 0.35);
    c.claim = "sigma_m(H^r_q)_p << m^{-r+1/q-1/2} (log m)^{(d-1)(r-1/q+1)}, 1 < q <= 2 <= p < inf";
    c.guard = "r > 1/q";
    add(c);
  }
  {
    auto c = rates("h-2-le-q-le-p", ClassSpec::H(1.5, 2.0, 2), 2.0, 0.5);
    c.claim = "sigma_m(H^r_q)_p << m^{-r} (log m)^{(d-1)(r+1/2)}, 2 <= q <= p < inf";
    c.guard = "r > 1/2";
    add(c);
  }
  {
    auto c = linf(rates("h-linf-q-le-2", ClassSpec::H(1.4, 1.5, 2), kInf, 0.35));
    c.claim = "sigma_m(H^r_q)_inf << m^{-r+1/q-1/2} (log m)^{(d-1)(r-1/q+1)+1/2}, 1 < q <= 2";
    c.guard = "r > 1/q";
    add(c);
  }
  {
    auto c = linf(rates("h-linf-2-le-q", ClassSpec::H(1.5, 2.0, 2), kInf, 0.5));
    c.claim = "sigma_m(H^r_q)_inf << m^{-r} (log m)^{(r+1/2)(d-1)+1/2}, 2 <= q < inf";
    c.guard = "r > 1/2";
    add(c);
  }
  {
    auto c = rates("b-q-le-2-le-p", ClassSpec::B(1.4, 1.5, 2.0, 2), 2.0, 0.35);
    c.claim = "sigma_m(B^r_{q,theta})_p << m^{-r+1/q-1/2} (log m)^{(d-1)(r-1/q+1-1/theta)}, 1 < q <= 2 <= p < inf";
    c.guard = "r > 1/q";
    add(c);
  }
  {
    auto c = rates("b-2-le-q-le-p", ClassSpec::B(1.5, 2.0, 2.0, 2), 2.0, 0.5);
    c.claim = "sigma_m(B^r_{q,theta})_p << m^{-r} (log m)^{(d-1)(r+1/2-1/theta)}, 2 <= q <= p < inf";
    c.guard = "r > 1/2";
    add(c);
  }
  {
    auto c = rates("htheta-2-le-q-le-p", ClassSpec::Htheta(1.5, 2.0, 2.0, 2), 2.0, 0.5);
    c.claim = "sigma_m(H^r_{q,theta})_p << m^{-r} (log m)^{(d-1)(r+1/2-1/theta)}, 2 <= q <= p < inf";
    c.guard = "r > 1/2";
    add(c);
  }

  auto cubature = [](std::string id, std::string sampling) {
    ExperimentConfig c;
    c.id = std::move(id);
    c.kind = ExperimentKind::Cubature;
    c.method = "smolyak";
    c.family = ClassKind::H;
    c.d = 2;
    c.r = 1.5;
    c.q = 2.0;
    c.n_values = int_range(3, 8);
    c.seeds = seed_range(1, 3);
    c.extra_layers = 4;
    c.sampling = std::move(sampling);
    c.claim = "Lambda(H^r_q, SG(n)) << 2^{-rn} n^{d-1}, r > 1/q";
    c.guard = "r > 1/q";
    c.tol.slope_lo = -1.75;
    c.tol.slope_hi = -1.25;
    return c;
  };
  {
    auto c = cubature("cubature-h", "rule_aligned");
    c.description = "Smolyak rule on SG(n); class samples aligned with the rule's nonzero frequencies";
    add(c);
  }
  {
    auto c = cubature("cubature-h-random", "random");
    c.description = "Smolyak rule on SG(n); random class samples (typical rather than worst case error)";
    c.monitored = true;
    add(c);
  }
  {
    ExperimentConfig c;
    c.id = "oracle-l2";
    c.kind = ExperimentKind::Oracle;
    c.method = "l2_equivalence";
    c.d = 2;
    c.box = {16, 16};
    c.p = 2.0;
    c.t = 1.0;
    c.m_max = 32;
    c.seeds = seed_range(1, 100);
    c.description = "WCGA with t = 1 in L_2 against the Parseval thresholding oracle";
    c.claim = "in L_2 with an orthonormal dictionary, WCGA(t = 1) after m steps attains sigma_m";
    c.guard = "p = 2, t = 1";
    add(c);
  }
  {
    ExperimentConfig c;
    c.id = "oracle-lebesgue";
    c.kind = ExperimentKind::Oracle;
    c.method = "lebesgue";
    c.d = 1;
    c.box = {4};
    c.p = 4.0;
    c.t = 1.0;
    c.m_max = 2;
    c.c_iter = 4;
    c.seeds = seed_range(1, 100);
    c.description = "WCGA residual after ceil(m ln(m+1)) * 4 steps against the exhaustive sigma_m";
    c.claim = "||f_{C m ln(m+1)}||_p <= C sigma_m(f)_p for the L_p-normalized trigonometric system";
    c.guard = "2 <= p < inf";
    c.tol.monitor_ratio = 10.0;
    add(c);
  }
  for (auto& [name, c] : out) {
    if (c.description.empty()) c.description = c.claim;
    c.out_dir = "results/" + name;
    c.validate();
  }
  return out;
}

}  // namespace

// ---- kinds and statuses ---------------------------------------------------------

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Approx:
      return "approx";
    case ExperimentKind::Rates:
      return "rates";
    case ExperimentKind::Cubature:
      return "cubature";
    case ExperimentKind::Oracle:
      return "oracle";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (auto k : {ExperimentKind::Approx, ExperimentKind::Rates, ExperimentKind::Cubature, ExperimentKind::Oracle})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown experiment kind: " + name);
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Pass:
      return "pass";
    case RunStatus::Fail:
      return "fail";
    case RunStatus::Warn:
      return "warn";
  }
  return "?";
}

// ---- config -------------------------------------------------------------------

ClassSpec ExperimentConfig::class_spec() const {
  switch (family) {
    case ClassKind::W:
      return ClassSpec::W(r, q, d);
    case ClassKind::H:
      return ClassSpec::H(r, q, d);
    case ClassKind::B:
      return ClassSpec::B(r, q, theta, d);
    case ClassKind::Htheta:
      return ClassSpec::Htheta(r, q, theta, d);
    case ClassKind::WAb:
      return ClassSpec::WAb(a, b, d);
  }
  throw std::invalid_argument("unknown class family");
}

void ExperimentConfig::validate() const {
  require(!id.empty(), "id must not be empty");
  require(d >= 1 && d <= 8, "d must be in [1, 8]");
  require(oversampling >= 1, "oversampling must be >= 1");
  require(target == "class" || target == "kernel", "target must be \"class\" or \"kernel\"");
  switch (kind) {
    case ExperimentKind::Approx:
      require(method == "ia", "approx supports method \"ia\"");
      require_box(*this);
      if (!(p > 1.0)) throw RegimeError("approx: need p > 1");
      require(m_min >= 1 && m_max - m_min + 1 >= 4, "approx needs 1 <= m_min and at least 4 values of m");
      require(v > 0.0, "v must be positive");
      require(std::isfinite(tol.slope_hi), "approx needs tolerances.slope_hi");
      require(tol.min_fraction > 0.0 && tol.min_fraction <= 1.0, "min_fraction must be in (0, 1]");
      break;
    case ExperimentKind::Rates: {
      require(!n_values.empty(), "rates needs n_values");
      require(sorted_unique(n_values).size() >= 4, "rates needs at least 4 distinct n");
      require(extra_layers >= 0, "extra_layers must be >= 0");
      if (method == "layered") {
        for (int n : n_values) require(n >= 1, "n must be >= 1");
        if (!(mu > 0.0)) throw RegimeError("rates: need mu > 0");
        rate_line(rate_target(*this), p, mu);
      } else if (method == "partial_sum") {
        for (int n : n_values) require(n >= 0, "n must be >= 0");
        require(target == "kernel", "partial_sum applies to the kernel target");
        if (!(p > 1.0 && p <= 2.0)) throw RegimeError("partial_sum: need 1 < p <= 2");
        if (!(r > 1.0 - 1.0 / p)) throw RegimeError("partial_sum: need r > 1 - 1/p");
        if (!(r > 1.0)) throw RegimeError("partial_sum: kernel samples need r > 1");
      } else {
        require(false, "rates supports methods \"layered\" and \"partial_sum\"");
      }
      break;
    }
    case ExperimentKind::Cubature: {
      require(method == "smolyak", "cubature supports method \"smolyak\"");
      require(!n_values.empty(), "cubature needs n_values");
      for (int n : n_values) require(n >= 0, "n must be >= 0");
      require(extra_layers >= 0, "extra_layers must be >= 0");
      require(sampling == "random" || sampling == "rule_aligned", "sampling must be \"random\" or \"rule_aligned\"");
      require(target == "class", "cubature needs a class target");
      require(exact_check_max >= 0, "exact_check_max must be >= 0");
      const ClassSpec spec = class_spec();
      spec.validate();
      if (spec.kind == ClassKind::WAb) throw RegimeError("cubature: WAb has no smoothness class guard");
      if (!(r > 1.0 / q)) throw RegimeError("cubature: need r > 1/q");
      if (sampling == "rule_aligned" && spec.kind == ClassKind::W)
        throw RegimeError("cubature: rule_aligned sampling needs a block-norm class (H, B, Htheta)");
      break;
    }
    case ExperimentKind::Oracle:
      require_box(*this);
      require(m_max >= 1, "oracle needs m_max >= 1");
      require(t > 0.0 && t <= 1.0, "t must be in (0, 1]");
      if (method == "l2_equivalence") {
        if (p != 2.0) throw RegimeError("l2_equivalence: need p = 2");
      } else if (method == "lebesgue") {
        if (!(p >= 2.0 && std::isfinite(p))) throw RegimeError("lebesgue: need 2 <= p < inf");
        require(c_iter >= 1, "c_iter must be >= 1");
      } else {
        require(false, "oracle supports methods \"l2_equivalence\" and \"lebesgue\"");
      }
      break;
  }
}

json ExperimentConfig::to_json() const {
  json tj = {{"slope_lo", json_number(tol.slope_lo)},   {"slope_hi", json_number(tol.slope_hi)},
             {"min_fraction", tol.min_fraction},       {"match", tol.match},
             {"monitor_ratio", tol.monitor_ratio},     {"exact", tol.exact}};
  return {{"id", id},
          {"kind", sparsetrig::to_string(kind)},
          {"method", method},
          {"description", description},
          {"claim", claim},
          {"guard", guard},
          {"monitored", monitored},
          {"d", d},
          {"target", target},
          {"family", sparsetrig::to_string(family)},
          {"r", json_number(r)},
          {"q", json_number(q)},
          {"p", json_number(p)},
          {"theta", json_number(theta)},
          {"mu", json_number(mu)},
          {"t", json_number(t)},
          {"v", json_number(v)},
          {"a", json_number(a)},
          {"b", json_number(b)},
          {"n_values", n_values},
          {"m_min", m_min},
          {"m_max", m_max},
          {"box", box},
          {"seeds", seeds},
          {"oversampling", oversampling},
          {"extra_layers", extra_layers},
          {"sampling", sampling},
          {"exact_check_max", exact_check_max},
          {"c_iter", c_iter},
          {"tolerances", tj},
          {"threads", threads},
          {"out_dir", out_dir}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  ExperimentConfig c;
  for (const auto& [key, val] : j.items()) {
    if (key == "id") c.id = val.get<std::string>();
    else if (key == "kind") c.kind = experiment_kind_from_string(val.get<std::string>());
    else if (key == "method") c.method = val.get<std::string>();
    else if (key == "description") c.description = val.get<std::string>();
    else if (key == "claim") c.claim = val.get<std::string>();
    else if (key == "guard") c.guard = val.get<std::string>();
    else if (key == "monitored") c.monitored = val.get<bool>();
    else if (key == "d") c.d = val.get<int>();
    else if (key == "target") c.target = val.get<std::string>();
    else if (key == "family") c.family = class_kind_from_string(val.get<std::string>());
    else if (key == "r") c.r = number_from(val);
    else if (key == "q") c.q = number_from(val);
    else if (key == "p") c.p = number_from(val);
    else if (key == "theta") c.theta = number_from(val);
    else if (key == "mu") c.mu = number_from(val);
    else if (key == "t") c.t = number_from(val);
    else if (key == "v") c.v = number_from(val);
    else if (key == "a") c.a = number_from(val);
    else if (key == "b") c.b = number_from(val);
    else if (key == "n_values") c.n_values = val.get<std::vector<int>>();
    else if (key == "m_min") c.m_min = val.get<int>();
    else if (key == "m_max") c.m_max = val.get<int>();
    else if (key == "box") c.box = val.get<std::vector<int>>();
    else if (key == "seeds") c.seeds = val.get<std::vector<std::uint64_t>>();
    else if (key == "oversampling") c.oversampling = val.get<int>();
    else if (key == "extra_layers") c.extra_layers = val.get<int>();
    else if (key == "sampling") c.sampling = val.get<std::string>();
    else if (key == "exact_check_max") c.exact_check_max = val.get<int>();
    else if (key == "c_iter") c.c_iter = val.get<int>();
    else if (key == "threads") c.threads = val.get<unsigned>();
    else if (key == "out_dir") c.out_dir = val.get<std::string>();
    else if (key == "tolerances") {
      for (const auto& [tk, tv] : val.items()) {
        if (tk == "slope_lo") c.tol.slope_lo = number_from(tv);
        else if (tk == "slope_hi") c.tol.slope_hi = number_from(tv);
        else if (tk == "min_fraction") c.tol.min_fraction = number_from(tv);
        else if (tk == "match") c.tol.match = number_from(tv);
        else if (tk == "monitor_ratio") c.tol.monitor_ratio = number_from(tv);
        else if (tk == "exact") c.tol.exact = number_from(tv);
        else throw std::invalid_argument("config: unknown tolerance \"" + tk + "\"");
      }
    } else {
      throw std::invalid_argument("config: unknown key \"" + key + "\"");
    }
  }
  return c;
}

TrigPolynomial random_box_polynomial(const std::vector<int>& box, std::uint64_t seed) {
  const TrigDictionary dict(box, 2.0, AtomScaling::Unit);
  CounterRng rng(seed, 0xb0c5);
  std::vector<RealTerm> terms;
  terms.reserve(dict.size());
  double total = 0.0;
  for (const auto& atom : dict.atoms()) {
    terms.push_back(RealTerm{atom.key, rng.normal()});
    total += std::abs(terms.back().value);
  }
  for (auto& t : terms) t.value /= total;
  return from_real_expansion(static_cast<int>(box.size()), terms);
}

// ---- results ------------------------------------------------------------------

RunStatus RunResult::status() const {
  bool warn = false;
  for (const auto& c : checks) {
    if (c.passed) continue;
    if (c.severity == Severity::Assert) return RunStatus::Fail;
    warn = true;
  }
  return warn ? RunStatus::Warn : RunStatus::Pass;
}

json RunResult::summary() const {
  json cj = json::array();
  for (const auto& c : checks)
    cj.push_back({{"name", c.name},
                  {"passed", c.passed},
                  {"severity", c.severity == Severity::Assert ? "assert" : "monitor"},
                  {"detail", c.detail}});
  return {{"id", config.id},
          {"kind", to_string(config.kind)},
          {"method", config.method},
          {"claim", config.claim},
          {"guard", config.guard},
          {"status", to_string(status())},
          {"exit_code", exit_code()},
          {"rows", rows},
          {"checks", cj},
          {"warnings", warnings},
          {"results", results},
          {"elapsed_seconds", elapsed_seconds}};
}

RunResult run(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  RunResult out;
  out.config = config;
  out.csv = csv_header(config) + "\n";
  out.results = json::object();
  if (config.seeds.empty()) {
    out.warnings.push_back("empty seed list: nothing to run");
  } else {
    switch (config.kind) {
      case ExperimentKind::Approx:
        run_approx(config, out);
        break;
      case ExperimentKind::Rates:
        run_rates(config, out);
        break;
      case ExperimentKind::Cubature:
        run_cubature(config, out);
        break;
      case ExperimentKind::Oracle:
        run_oracle(config, out);
        break;
    }
  }
  out.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

json make_manifest(const RunResult& result, const std::string& subcommand) {
  return {{"format", "sparsetrig-manifest"},
          {"format_version", 1},
          {"library_version", SPARSETRIG_VERSION},
          {"compiler", __VERSION__},
          {"subcommand", subcommand},
          {"config", result.config.to_json()},
          {"outputs",
           {{"results.csv", {{"bytes", result.csv.size()}, {"fnv1a64", hex64(fnv1a64(result.csv))}}}}},
          {"status", to_string(result.status())}};
}

void write_bundle(const RunResult& result, const std::filesystem::path& dir, const std::string& subcommand) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw std::runtime_error("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream os(dir / name, std::ios::binary | std::ios::trunc);
    os << text;
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
  };
  write("results.csv", result.csv);
  write("summary.json", result.summary().dump(2) + "\n");
  write("manifest.json", make_manifest(result, subcommand).dump(2) + "\n");
}

RunResult replay(const json& manifest) {
  if (manifest.value("format", "") != "sparsetrig-manifest") throw std::invalid_argument("replay: not a manifest");
  const auto cfg = ExperimentConfig::from_json(manifest.at("config"));
  RunResult out = run(cfg);
  const auto& rec = manifest.at("outputs").at("results.csv");
  const std::string want = rec.at("fnv1a64").get<std::string>();
  const std::size_t bytes = rec.at("bytes").get<std::size_t>();
  const std::string got = hex64(fnv1a64(out.csv));
  out.checks.push_back({"replay_identical", got == want && bytes == out.csv.size(), Severity::Assert,
                        "results.csv digest " + got + " (" + std::to_string(out.csv.size()) + " bytes), manifest " +
                            want + " (" + std::to_string(bytes) + " bytes)"});
  if (manifest.value("compiler", "") != std::string(__VERSION__) ||
      manifest.value("library_version", "") != std::string(SPARSETRIG_VERSION))
    out.warnings.push_back("manifest was written by a different build; byte identity is only promised per build");
  return out;
}

const std::map<std::string, ExperimentConfig>& presets() {
  static const auto table = build_presets();
  return table;
}

ExperimentConfig preset(const std::string& name) {
  const auto& table = presets();
  const auto it = table.find(name);
  if (it == table.end()) throw std::invalid_argument("unknown preset: " + name);
  return it->second;
}

}  // namespace sparsetrig
