#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparsetrig/trig_polynomial.hpp"

namespace sparsetrig {

// Identity of a real trigonometric product
//   phi(x) = prod_{j in E} cos(k_j x_j) prod_{j not in E} sin(k_j x_j),  k_j >= 0,
// where bit j of cos_mask marks j in E. Coordinates with k_j = 0 always carry
// a cosine. Ordered canonically by (||k||_1, k, cos_mask).
struct AtomKey {
  FrequencyIndex freq;
  std::uint32_t cos_mask = 0;

  int dim() const { return freq.dim(); }
  std::string pattern() const;  // "c"/"s" per coordinate

  friend std::strong_ordering operator<=>(const AtomKey& a, const AtomKey& b);
  friend bool operator==(const AtomKey& a, const AtomKey& b) = default;
};

// Canonical atom for (k, pattern); throws if a zero coordinate carries a sine.
AtomKey make_atom_key(FrequencyIndex freq, std::uint32_t cos_mask);

// One element of the real trigonometric dictionary: the raw product divided
// by norm_const. norm_const = ||raw||_p for L_p-normalized dictionaries, 1 for
// the unit (sup-norm one) system used by IA(eps).
struct DictionaryAtom {
  AtomKey key;
  double norm_const = 1.0;

  // Complex expansion of the normalized atom.
  TrigPolynomial polynomial() const;
};

// (sigma k, weight) pairs with phi_raw = sum weight * e^{i(sigma k, x)}.
struct ExponentialTerm {
  std::vector<int> k;
  Complex weight;
};
std::vector<ExponentialTerm> raw_atom_terms(const AtomKey& key);

// ||cos(k x)||_p for k >= 1 under the normalized measure; 1 for p = inf.
double cosine_lp_norm(double p);

// ||raw atom||_p = cosine_lp_norm(p)^{#nonzero k_j}.
double raw_atom_norm(const AtomKey& key, double p);

// Pointwise value of the raw product.
double raw_atom_value(const AtomKey& key, std::span<const double> x);

enum class AtomScaling { LpNormalized, Unit };

// The real d-variate trigonometric system restricted to Box(N), normalized in
// L_p (or unit scaled). theta(N) = prod (2 N_j + 1) atoms.
class TrigDictionary {
 public:
  TrigDictionary(std::vector<int> box, double p, AtomScaling scaling = AtomScaling::LpNormalized);

  int dim() const { return static_cast<int>(box_.size()); }
  const std::vector<int>& box() const { return box_; }
  double p() const { return p_; }
  AtomScaling scaling() const { return scaling_; }
  std::size_t size() const { return size_; }
  std::int64_t theta() const { return static_cast<std::int64_t>(size_); }

  // Atoms in canonical order. Built on first use; refuses more than 2^22 atoms.
  const std::vector<DictionaryAtom>& atoms() const;
  const DictionaryAtom& atom(std::size_t i) const { return atoms()[i]; }
  std::optional<std::size_t> index_of(const AtomKey& key) const;

  bool contains(const AtomKey& key) const;
  DictionaryAtom make_atom(const AtomKey& key) const;
  double atom_norm_const(const AtomKey& key) const;

  // Quadrature grid for L_p work on this dictionary.
  std::vector<int> quadrature_grid(int oversampling = 4) const;

 private:
  std::vector<int> box_;
  double p_;
  AtomScaling scaling_;
  std::size_t size_;
  mutable std::vector<DictionaryAtom> atoms_;
};

// Coefficients of a real polynomial in the raw real system, in canonical atom order.
struct RealTerm {
  AtomKey key;
  double value;
};
std::vector<RealTerm> real_expansion(const TrigPolynomial& t);

// Inverse of real_expansion: sum value * raw atom.
TrigPolynomial from_real_expansion(int dim, std::span<const RealTerm> terms);

// Sum of |coefficients| of t in the raw real system.
double real_a_norm(const TrigPolynomial& t);

}  // namespace sparsetrig
