#pragma once

#include <cstddef>

#include "sparsetrig/dictionary.hpp"
#include "sparsetrig/greedy.hpp"

namespace sparsetrig {

struct OracleOptions {
  // Largest number of m-subsets examined for p != 2.
  std::size_t max_subsets = 100000;
  int oversampling = 4;
  ProjectionOptions projection{1e-9, 200};
};

// sigma_m(f, D)_p: best m-term error over the dictionary. p = 2 drops the
// m largest atom energies (Parseval); other p enumerate all m-subsets and
// project. Throws BudgetExceeded beyond max_subsets.
double oracle_sigma(const TrigPolynomial& f, const TrigDictionary& dict, int m, const OracleOptions& opts = {});

// Number of m-subsets of an n-set, saturating at SIZE_MAX.
std::size_t binomial_saturating(std::size_t n, std::size_t m);

struct LebesgueReport {
  int m = 0;
  int steps = 0;  // ceil(m ln(m+1)) * c_iter
  int short_steps = 0;  // ceil(m ln(m+1))
  double residual = 0.0;  // after `steps`
  double residual_short = 0.0;  // after `short_steps`
  double residual_m = 0.0;  // after m steps, an m-term approximant
  double sigma = 0.0;
  double ratio = 0.0;  // residual / sigma (0 when both vanish)
  double ratio_short = 0.0;
};

LebesgueReport lebesgue_check(const TrigPolynomial& f, const TrigDictionary& dict, double t, int m, int c_iter = 4,
                              const OracleOptions& opts = {});

}  // namespace sparsetrig
