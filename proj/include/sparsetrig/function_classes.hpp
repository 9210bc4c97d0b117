#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsetrig/index_set.hpp"
#include "sparsetrig/trig_polynomial.hpp"

namespace sparsetrig {

enum class ClassKind { W, H, B, Htheta, WAb };

std::string to_string(ClassKind kind);
ClassKind class_kind_from_string(const std::string& name);

// Mixed-smoothness class parameters. W: f = phi * F_r with ||phi||_q <= 1.
// H: sup_s ||delta_s f||_q 2^{r||s||_1}. B: l_theta over s of the same.
// Htheta: sup_n of the l_theta aggregate over ||s||_1 = n.
// WAb: ||f_l||_A <= 2^{-a l} max(l,1)^{(d-1) b}.
struct ClassSpec {
  ClassKind kind = ClassKind::W;
  int d = 1;
  double r = 1.0;
  double q = 2.0;
  double theta = std::numeric_limits<double>::infinity();
  double a = 0.0;
  double b = 0.0;

  static ClassSpec W(double r, double q, int d);
  static ClassSpec H(double r, double q, int d);
  static ClassSpec B(double r, double q, double theta, int d);
  static ClassSpec Htheta(double r, double q, double theta, int d);
  static ClassSpec WAb(double a, double b, int d);

  // Throws RegimeError on out-of-range parameters.
  void validate() const;
  // Exponent of the layer decay used by the layered method: r - 1/q for
  // W/H/B/Htheta (A-norm of a layer), a for WAb.
  double layer_a() const;
  double layer_b() const;
  std::string describe() const;
};

nlohmann::json to_json(const ClassSpec& spec);
ClassSpec class_spec_from_json(const nlohmann::json& j);

struct ClassSample {
  TrigPolynomial f{1};
  ClassSpec spec;
  TrigPolynomial phi{1};  // generator, W only
  std::string truncation;
  int truncation_level = -1;  // n of Q_n when truncated on a step cross
  std::uint64_t seed = 0;
  // W: ||phi||_q. Others: the defining class functional of f.
  double certificate = 0.0;
};

nlohmann::json to_json(const ClassSample& s);

// Coefficients of the Bernoulli kernel F_r on `truncation`:
// prod_j (k_j == 0 ? 1 : |k_j|^{-r} e^{-i sign(k_j) r pi/2}).
TrigPolynomial bernoulli_coeffs(double r, const IndexSet& truncation);

// Random class member on a finite truncation, scaled so the certificate is 1.
ClassSample sample_class(const ClassSpec& spec, const IndexSet& truncation, std::uint64_t seed);

// Block-norm functional of f for H/B/Htheta (and the layer A-norm functional
// for WAb). Throws RegimeError for W.
double class_norm(const TrigPolynomial& f, const ClassSpec& spec);

// ||delta_s f||_q for every nonempty block.
std::map<std::vector<int>, double> block_norms(const TrigPolynomial& f, double q);

// (sum_s eps_s^p 2^{||s||_1 (p/q - 1)})^{1/p}; needs 1 <= q < p < inf or
// 1 < p < q <= inf.
double block_sum_bound(const std::map<std::vector<int>, double>& eps, double p, double q);

// Estimated L_p size of the layers beyond the truncation: geometric
// continuation of the top layer at the class decay rate.
double tail_estimate(const ClassSample& s, double p);

}  // namespace sparsetrig
