#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sparsetrig/dictionary.hpp"
#include "sparsetrig/grid_function.hpp"
#include "sparsetrig/trig_polynomial.hpp"

namespace sparsetrig {

// Norming (peak) functional of a real function f in L_p, 1 < p < inf:
//   F_f(g) = ||f||_p^{1-p} mean(|f|^{p-1} sign(f) g).
// At p = 2 it works on coefficients (Parseval); otherwise on a sampling grid,
// where the kernel's discrete spectrum H(k) = mean(h e^{-i(k,x)}) is computed
// once so every atom or polynomial is scored by lookups.
class NormingFunctional {
 public:
  // p == 2 keeps f's coefficients and ignores grid_sizes.
  NormingFunctional(const TrigPolynomial& f, double p, const std::vector<int>& grid_sizes);
  // Grid mode for any p (real part of the samples is used).
  NormingFunctional(const GridFunction& f, double p);

  double p() const { return p_; }
  double norm_p() const { return norm_; }
  bool coefficient_mode() const { return coeffs_.has_value(); }
  // Empty in coefficient mode.
  const std::vector<int>& grid_sizes() const { return sizes_; }

  // mean(h e^{-i(k,x)}) with h = |f|^{p-1} sign f (unscaled).
  Complex kernel_coefficient(std::span<const int> k) const;

  double apply(const TrigPolynomial& g) const;
  double apply(const GridFunction& g) const;
  double apply(const DictionaryAtom& atom) const { return apply_raw(atom.key) / atom.norm_const; }
  // F_f(raw atom), allocation free.
  double apply_raw(const AtomKey& key) const;

 private:
  double scale() const;

  double p_;
  double norm_ = 0.0;
  std::vector<int> sizes_;
  std::optional<TrigPolynomial> coeffs_;
  std::optional<Spectrum> kernel_;
  std::optional<GridFunction> kernel_samples_;
};

}  // namespace sparsetrig
