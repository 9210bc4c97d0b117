#include "sparsetrig/norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sparsetrig/errors.hpp"

namespace sparsetrig {

Exponent Exponent::lp(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("norm: exponent must exceed 1");
  if (std::isinf(p)) return sup();
  return Exponent(Kind::Lp, p);
}

Exponent Exponent::parse(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "infinity") return sup();
  if (text == "A" || text == "a") return a();
  if (text == "2-exact") return l2_exact();
  std::size_t used = 0;
  const double p = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("norm: cannot parse exponent '" + text + "'");
  return lp(p);
}

std::string Exponent::str() const {
  switch (kind_) {
    case Kind::Sup: return "inf";
    case Kind::A: return "A";
    case Kind::L2Exact: return "2-exact";
    case Kind::Lp: {
      std::ostringstream os;
      os << p_;
      return os.str();
    }
  }
  return "?";
}

double grid_norm(const GridFunction& g, double p) {
  const auto& s = g.samples();
  if (s.empty()) return 0.0;
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : s) m = std::max(m, std::abs(v));
    return m;
  }
  if (!(p >= 1.0)) throw std::invalid_argument("grid_norm: exponent must be >= 1");
  // Scale by the max first so large p does not overflow.
  double peak = 0.0;
  for (const auto& v : s) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  double acc = 0.0;
  if (p == 2.0) {
    for (const auto& v : s) acc += std::norm(v / peak);
  } else {
    for (const auto& v : s) acc += std::pow(std::abs(v) / peak, p);
  }
  return peak * std::pow(acc / static_cast<double>(s.size()), 1.0 / p);
}

NormEstimate norm(const TrigPolynomial& t, Exponent e, const QuadratureOptions& opts) {
  NormEstimate out;
  switch (e.kind()) {
    case Exponent::Kind::A:
      out.value = a_norm(t);
      return out;
    case Exponent::Kind::L2Exact:
      out.value = l2_norm(t);
      return out;
    case Exponent::Kind::Lp:
    case Exponent::Kind::Sup:
      break;
  }
  if (t.empty()) return out;
  const auto max_k = t.max_abs_frequency();
  out.grid = quadrature_grid(max_k, opts.oversampling);
  out.value = grid_norm(sample(t, out.grid), e.p());
  out.lower_bound = e.is_sup();
  if (opts.estimate_error) {
    std::vector<int> fine = out.grid;
    for (int& M : fine) M *= 2;
    out.error_estimate = std::abs(grid_norm(sample(t, fine), e.p()) - out.value);
  }
  return out;
}

double norm_value(const TrigPolynomial& t, Exponent e, int oversampling) {
  return norm(t, e, QuadratureOptions{oversampling, false}).value;
}

}  // namespace sparsetrig
