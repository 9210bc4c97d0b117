#pragma once

#include <complex>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "sparsetrig/frequency.hpp"
#include "sparsetrig/index_set.hpp"

namespace sparsetrig {

using Complex = std::complex<double>;

// Sparse trigonometric polynomial t(x) = sum_k c_k e^{i(k,x)} on [0,2pi)^d.
//
// Terms are kept sorted lexicographically by frequency; exact zeros are never
// stored. Storage is flat (dim ints per term) so large hyperbolic crosses stay
// compact.
class TrigPolynomial {
 public:
  using Term = std::pair<FrequencyIndex, Complex>;

  explicit TrigPolynomial(int dim);

  // Duplicate frequencies are summed.
  static TrigPolynomial from_terms(int dim, std::vector<Term> terms);
  static TrigPolynomial constant(int dim, Complex c);
  static TrigPolynomial monomial(FrequencyIndex k, Complex c = 1.0);

  int dim() const { return dim_; }
  std::size_t size() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }

  std::span<const int> frequency(std::size_t i) const {
    return {keys_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  Complex coeff(std::size_t i) const { return coeffs_[i]; }
  const std::vector<Complex>& coeffs() const { return coeffs_; }

  // Coefficient at k, zero if absent.
  Complex at(std::span<const int> k) const;
  Complex at(const FrequencyIndex& k) const { return at(k.values()); }

  std::vector<Term> terms() const;

  TrigPolynomial filtered(const std::function<bool(std::span<const int>)>& keep) const;
  TrigPolynomial restricted(const IndexSet& set) const;

  // Componentwise max |k_j| over stored terms.
  std::vector<int> max_abs_frequency() const;

  // True iff c(-k) == conj(c(k)) for every k, within tol (absolute).
  bool is_real(double tol = 0.0) const;

  Complex evaluate(std::span<const double> x) const;

  TrigPolynomial& operator+=(const TrigPolynomial& o);
  TrigPolynomial& operator-=(const TrigPolynomial& o);
  TrigPolynomial& operator*=(Complex s);
  friend TrigPolynomial operator+(TrigPolynomial a, const TrigPolynomial& b) { return a += b; }
  friend TrigPolynomial operator-(TrigPolynomial a, const TrigPolynomial& b) { return a -= b; }
  friend TrigPolynomial operator*(TrigPolynomial a, Complex s) { return a *= s; }
  friend TrigPolynomial operator*(Complex s, TrigPolynomial a) { return a *= s; }

  // Exact coefficientwise equality.
  friend bool operator==(const TrigPolynomial& a, const TrigPolynomial& b) {
    return a.dim_ == b.dim_ && a.keys_ == b.keys_ && a.coeffs_ == b.coeffs_;
  }

  // Largest |a_k - b_k| over the union of supports.
  friend double max_coeff_diff(const TrigPolynomial& a, const TrigPolynomial& b);

 private:
  std::size_t find(std::span<const int> k) const;
  TrigPolynomial combine(const TrigPolynomial& o, double sign) const;

  int dim_;
  std::vector<int> keys_;
  std::vector<Complex> coeffs_;
};

// Sum of |c_k|.
double a_norm(const TrigPolynomial& t);

// L_2 norm with respect to the normalized measure, by Parseval.
double l2_norm(const TrigPolynomial& t);

// Restriction to the dyadic block rho(s).
TrigPolynomial delta_s(const TrigPolynomial& t, std::span<const int> s);

// Sum of delta_s(t) over ||s||_1 == l.
TrigPolynomial layer(const TrigPolynomial& t, int l);

// S_n(t): restriction to the step hyperbolic cross Q_n.
TrigPolynomial hyperbolic_partial_sum(const TrigPolynomial& t, int n);

// Largest ||s||_1 over the stored terms (-1 for the zero polynomial).
int top_layer(const TrigPolynomial& t);

}  // namespace sparsetrig
