#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsetrig/function_classes.hpp"
#include "sparsetrig/trig_polynomial.hpp"

namespace sparsetrig {

// ---- G^p_m / G^inf_m ----------------------------------------------------------

struct GreedyOptions {
  double v = 1.0;  // IA schedule constant
  int oversampling = 4;
};

struct GreedyApproximation {
  TrigPolynomial approximant{1};
  double p = 2.0;  // exponent the IA run used
  double a_norm = 0.0;  // real A-norm of the input; the output has the same
  double error = 0.0;  // ||t - approximant||_p (grid quadrature for p != 2)
  int atoms = 0;  // distinct real atoms used, <= m
};

// IA(eps) in L_p on t/||t||_A over the unit-sup real dictionary, rescaled by
// ||t||_A. m = 0 gives the zero polynomial. Needs 2 <= p < inf.
GreedyApproximation g_p_m(const TrigPolynomial& t, int m, double p, const GreedyOptions& opts = {});

// p = max(2, ceil(ln theta)) for a dictionary of theta atoms.
int g_inf_exponent(double theta);
// theta(N) = prod (2 N_j + 1).
double box_theta(const std::vector<int>& N);

// g_p_m with p = g_inf_exponent(theta of t's bounding box). `error` is the sup
// over the 4x oversampled grid, a lower estimate of the true sup norm.
GreedyApproximation g_inf_m(const TrigPolynomial& t, int m, const GreedyOptions& opts = {});

// ---- layered scheme -------------------------------------------------------------

struct LayerSchedule {
  int n = 0;
  double mu = 0.5;
  int d = 1;
  int l_max = 0;
  std::map<int, std::int64_t> m_l;  // l in (n, l_max]

  // m_l = floor(2^{n - mu (l - n)} l^{d-1}).
  static LayerSchedule make(int n, double mu, int d, int l_max);
  std::int64_t total_budget() const;
};

struct LayerPart {
  int l = 0;
  std::int64_t budget = 0;
  TrigPolynomial part{1};
  double layer_a_norm = 0.0;  // real A-norm of f_l
  double part_a_norm = 0.0;  // real A-norm of the greedy output
  double layer_norm = 0.0;  // ||f_l||_p
  double error = 0.0;  // ||f_l - part||_p
  int terms = 0;  // |supp part|
};

struct ConstructiveApproximant {
  double p = 2.0;
  double mu = 0.5;
  int n = 0;
  LayerSchedule schedule;
  TrigPolynomial base{1};  // S_n(f)
  std::vector<LayerPart> layers;  // increasing l, empty layers skipped
  std::int64_t total_terms = 0;
  double error = 0.0;  // ||f - A_m(f)||_p against the truncated f
  double tail = 0.0;  // estimate of the layers beyond the truncation
  bool error_lower_bound = false;  // p = inf: grid maximum

  TrigPolynomial approximant() const;
};

struct AmOptions {
  GreedyOptions greedy;
  unsigned threads = 1;  // 0 = hardware concurrency
};

// S_n(f) + sum_{l = n+1..l_max} G_{m_l}(f_l), where l_max is the top layer of
// the sample. p = inf routes the layers through g_inf_m. Needs 2 <= p and
// 0 < mu < a for the sample's class.
ConstructiveApproximant a_m(const ClassSample& f, double p, double mu, int n, const AmOptions& opts = {});

// ---- rate table -----------------------------------------------------------------

// What the curve approximates: a class sample or the Bernoulli kernel itself.
struct RateTarget {
  bool bernoulli = false;
  ClassSpec spec;  // class targets
  double r = 1.0;  // Bernoulli targets
  int d = 1;

  static RateTarget of(const ClassSpec& spec);
  static RateTarget kernel(double r, int d);

  // Layer A-norm decay ||f_l||_A << 2^{-a l} l^{(d-1) b}.
  double layer_a() const;
  double layer_b() const;
  std::string describe() const;
  nlohmann::json to_json() const;
  static RateTarget from_json(const nlohmann::json& j);

  // Member truncated at Q_level. Kernel targets are deterministic.
  ClassSample sample(int level, std::uint64_t seed) const;
};

// Predicted upper rate m^{-rho} (log m)^{kappa} for a target and p.
struct RateLine {
  std::string id;  // regime label, e.g. "W:q<=2<=p"
  double rho = 0.0;
  double kappa = 0.0;
  std::string guard;  // the regime inequality that holds
};

// Throws RegimeError naming the failed guard when (target, p) is outside every
// implemented line, or when mu >= a (pass mu <= 0 to skip that check).
RateLine rate_line(const RateTarget& target, double p, double mu = 0.0);

struct CurveOptions {
  AmOptions am;
  int extra_layers = 5;  // samples are truncated at Q_{n_max + extra_layers}
  unsigned threads = 1;  // over (seed, n) pairs
};

struct CurveRow {
  std::string regime;
  int d = 1;
  double r = 0.0;
  double q = 0.0;
  double p = 2.0;
  double theta = 0.0;
  double mu = 0.0;
  int n = 0;
  std::uint64_t seed = 0;
  std::int64_t m = 0;
  double error = 0.0;
  double predicted = 0.0;
  double ratio = 0.0;
  double tail = 0.0;
};

// One row per (n, seed), sorted by (n, seed).
std::vector<CurveRow> sigma_upper_curve(const RateTarget& target, double p, double mu, const std::vector<int>& n_values,
                                        const std::vector<std::uint64_t>& seeds, const CurveOptions& opts = {});

std::string curve_csv_header();
std::string curve_csv_row(const CurveRow& row);

}  // namespace sparsetrig
