#pragma once

#include <vector>

#include "sparsetrig/index_set.hpp"
#include "sparsetrig/rng.hpp"
#include "sparsetrig/trig_polynomial.hpp"

namespace sparsetrig::testing {

// Random complex coefficients on `set`.
inline TrigPolynomial random_on(const IndexSet& set, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<TrigPolynomial::Term> terms;
  set.for_each([&](std::span<const int> k) {
    terms.emplace_back(FrequencyIndex(k), Complex(rng.normal(), rng.normal()));
  });
  return TrigPolynomial::from_terms(set.dim(), std::move(terms));
}

// Random real-valued polynomial on a symmetric set: c(-k) = conj(c(k)).
inline TrigPolynomial random_real_on(const IndexSet& set, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<TrigPolynomial::Term> terms;
  set.for_each([&](std::span<const int> k) {
    FrequencyIndex key(k);
    FrequencyIndex neg = -key;
    if (neg < key) return;
    if (neg == key) {
      terms.emplace_back(key, Complex(rng.normal(), 0.0));
    } else {
      const Complex c(rng.normal(), rng.normal());
      terms.emplace_back(key, c);
      terms.emplace_back(neg, std::conj(c));
    }
  });
  return TrigPolynomial::from_terms(set.dim(), std::move(terms));
}

}  // namespace sparsetrig::testing
