#pragma once

#include <limits>
#include <string>
#include <vector>

#include "sparsetrig/grid_function.hpp"
#include "sparsetrig/trig_polynomial.hpp"

namespace sparsetrig {

// Which norm to take. All L_p norms use the normalized measure (2pi)^{-d}dx,
// so ||e^{i(k,.)}||_p = 1.
class Exponent {
 public:
  enum class Kind { Lp, Sup, A, L2Exact };

  static Exponent lp(double p);
  static Exponent sup() { return Exponent(Kind::Sup, std::numeric_limits<double>::infinity()); }
  static Exponent a() { return Exponent(Kind::A, 1.0); }
  static Exponent l2_exact() { return Exponent(Kind::L2Exact, 2.0); }
  // "inf", "A", "2-exact" or a number.
  static Exponent parse(const std::string& text);

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  bool is_sup() const { return kind_ == Kind::Sup; }
  std::string str() const;

 private:
  Exponent(Kind kind, double p) : kind_(kind), p_(p) {}
  Kind kind_;
  double p_;
};

struct QuadratureOptions {
  int oversampling = 4;
  // Re-evaluate on the 2x refined grid and report the difference.
  bool estimate_error = true;
};

struct NormEstimate {
  double value = 0.0;
  // |value(2M) - value(M)| for quadrature norms, 0 for exact ones.
  double error_estimate = 0.0;
  // Grid used for the value (empty for coefficient formulas).
  std::vector<int> grid;
  // Sup norms are grid maxima: certified lower bounds only.
  bool lower_bound = false;
};

NormEstimate norm(const TrigPolynomial& t, Exponent e, const QuadratureOptions& opts = {});

// Shorthand for norm(t, e, {oversampling, false}).value.
double norm_value(const TrigPolynomial& t, Exponent e, int oversampling = 4);

// Power mean (mean |g|^p)^{1/p} over the grid, p >= 1; p = inf gives max |g|.
double grid_norm(const GridFunction& g, double p);

}  // namespace sparsetrig
