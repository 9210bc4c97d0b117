#include "sparsetrig/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "atom_grid.hpp"
#include "sparsetrig/errors.hpp"
#include "sparsetrig/norms.hpp"

namespace sparsetrig {

std::size_t binomial_saturating(std::size_t n, std::size_t m) {
  if (m > n) return 0;
  m = std::min(m, n - m);
  long double acc = 1.0L;
  for (std::size_t i = 1; i <= m; ++i) {
    acc = acc * static_cast<long double>(n - m + i) / static_cast<long double>(i);
    if (acc > static_cast<long double>(std::numeric_limits<std::size_t>::max() / 2))
      return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(std::llround(acc));
}

double oracle_sigma(const TrigPolynomial& f, const TrigDictionary& dict, int m, const OracleOptions& opts) {
  if (m < 0) throw std::invalid_argument("oracle_sigma: negative m");
  if (f.dim() != dict.dim()) throw DimensionMismatch("oracle_sigma: dimension mismatch");
  const double p = dict.p();
  if (p == 2.0) {
    std::vector<double> reachable, tail;
    for (const auto& rt : real_expansion(f)) {
      const double e = rt.value * rt.value * detail::raw_self_inner(rt.key);
      (dict.contains(rt.key) ? reachable : tail).push_back(e);
    }
    std::sort(reachable.begin(), reachable.end());
    const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(m), reachable.size());
    double acc = 0.0;
    // smallest first for accuracy
    for (std::size_t i = 0; i + keep < reachable.size(); ++i) acc += reachable[i];
    std::sort(tail.begin(), tail.end());
    for (double e : tail) acc += e;
    return std::sqrt(acc);
  }
  const auto& atoms = dict.atoms();
  const std::size_t n = atoms.size();
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(m), n);
  if (binomial_saturating(n, k) > opts.max_subsets)
    throw BudgetExceeded("oracle_sigma: too many subsets for exhaustive search");
  const auto sizes = dict.quadrature_grid(opts.oversampling);
  const auto g = sample(f, sizes);
  std::vector<double> fs(g.total());
  for (std::size_t i = 0; i < fs.size(); ++i) fs[i] = g[i].real();
  if (k == 0) return grid_norm(g, p);

  std::vector<double> guess(n);
  for (std::size_t i = 0; i < n; ++i)
    guess[i] = detail::raw_inner(f, atoms[i].key) / detail::raw_self_inner(atoms[i].key) * atoms[i].norm_const;

  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  double best = std::numeric_limits<double>::infinity();
  std::vector<DictionaryAtom> span(k);
  std::vector<double> warm(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) {
      span[i] = atoms[idx[i]];
      warm[i] = guess[idx[i]];
    }
    best = std::min(best, chebyshev_project_samples(fs, sizes, span, p, opts.projection, warm).residual_norm);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return best;
}

LebesgueReport lebesgue_check(const TrigPolynomial& f, const TrigDictionary& dict, double t, int m, int c_iter,
                              const OracleOptions& opts) {
  if (m < 1) throw std::invalid_argument("lebesgue_check: m must be positive");
  if (c_iter < 1) throw std::invalid_argument("lebesgue_check: c_iter must be positive");
  LebesgueReport rep;
  rep.m = m;
  rep.short_steps = static_cast<int>(std::ceil(m * std::log(m + 1.0)));
  rep.steps = rep.short_steps * c_iter;
  rep.sigma = oracle_sigma(f, dict, m, opts);
  WcgaOptions wo;
  wo.t = t;
  wo.m_max = rep.steps;
  wo.oversampling = opts.oversampling;
  wo.keep_snapshots = false;
  const auto trace = wcga(f, dict, wo);
  auto residual_after = [&](int s) {
    double r = trace.initial_residual;
    for (const auto& st : trace.steps)
      if (st.step <= s) r = st.residual;
    return r;
  };
  rep.residual = residual_after(rep.steps);
  rep.residual_short = residual_after(rep.short_steps);
  rep.residual_m = residual_after(m);
  const double scale = std::max(trace.initial_residual, 1e-300);
  auto ratio = [&](double r) {
    if (rep.sigma > 1e-13 * scale) return r / rep.sigma;
    return r <= 1e-10 * scale ? 0.0 : std::numeric_limits<double>::infinity();
  };
  rep.ratio = ratio(rep.residual);
  rep.ratio_short = ratio(rep.residual_short);
  return rep;
}

}  // namespace sparsetrig
