#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sparsetrig/dictionary.hpp"
#include "sparsetrig/grid_function.hpp"
#include "sparsetrig/norming.hpp"

namespace sparsetrig {

// ---- selection -------------------------------------------------------------

struct AtomChoice {
  std::size_t index = 0;  // position in the dictionary's canonical order
  DictionaryAtom atom;
  double value = 0.0;  // F(atom), signed
};

// F(phi) for every atom of dict, canonical order.
std::vector<double> score_atoms(const NormingFunctional& F, const TrigDictionary& dict);

// t = 1: argmax |F(phi)| (earliest atom on ties); t < 1: the first atom in
// canonical order with |F(phi)| >= t * max. Throws ResidualVanished when every
// score is zero.
AtomChoice select_atom(const NormingFunctional& F, const TrigDictionary& dict, double t = 1.0);

// ---- Chebyshev projection ----------------------------------------------------

struct ProjectionOptions {
  // Stop once max_j |F_residual(phi_j)| <= tol_opt.
  double tol_opt = 1e-7;
  int max_iter = 200;
};

struct ProjectionResult {
  std::vector<double> coeffs;  // on the normalized atoms, in span order
  double residual_norm = 0.0;
  double optimality_gap = 0.0;  // max_j |F_residual(phi_j)|
  int iterations = 0;
};

// argmin_c ||f - sum c_j phi_j||_p, 1 < p < inf. p = 2 is the closed-form
// orthogonal projection; otherwise a damped Newton iteration on mean |r|^p over
// `grid_sizes` (empty: chosen from the spectra of f and the span).
ProjectionResult chebyshev_project(const TrigPolynomial& f, std::span<const DictionaryAtom> span, double p,
                                   std::vector<int> grid_sizes = {}, const ProjectionOptions& opts = {},
                                   std::span<const double> warm_start = {});

// Same on pre-sampled real data. residual_out (optional) receives the final
// residual samples.
ProjectionResult chebyshev_project_samples(const std::vector<double>& f_samples, const std::vector<int>& grid_sizes,
                                           std::span<const DictionaryAtom> span, double p,
                                           const ProjectionOptions& opts, std::span<const double> warm_start,
                                           std::vector<double>* residual_out = nullptr);

// ---- traces ----------------------------------------------------------------

enum class Algorithm { WCGA, IA };

struct TraceStep {
  int step = 0;
  AtomKey atom;
  int sign = 1;  // IA picks from D^{+-}; WCGA atoms always carry +1
  double score = 0.0;
  double residual = 0.0;  // ||f - G_step||_p
  std::uint64_t digest = 0;  // FNV-1a over the coefficient snapshot
  // Snapshot, aligned with ApproximationTrace::terms. WCGA: coefficients of the
  // normalized atoms. IA: signed integer numerators over the denominator `step`.
  std::vector<double> coeffs;
  std::vector<std::int64_t> numerators;
};

struct TraceTerm {
  AtomKey atom;
  int sign = 1;
  double norm_const = 1.0;
};

struct ApproximationTrace {
  Algorithm algorithm = Algorithm::WCGA;
  double p = 2.0;
  double weakness = 1.0;  // WCGA t
  double schedule_v = 0.0;  // IA v
  double initial_residual = 0.0;
  std::vector<TraceTerm> terms;  // distinct (atom, sign) in order of first use
  std::vector<TraceStep> steps;
  TrigPolynomial approximant{1};

  std::vector<double> residuals() const;
  // One JSON object per line; coefficient snapshots only when requested.
  std::string to_json_lines(bool full_coefficients = false) const;
};

// ---- WCGA --------------------------------------------------------------------

struct WcgaOptions {
  double t = 1.0;
  int m_max = 64;
  double stop = 0.0;  // halt once ||f_m||_p <= stop
  int oversampling = 4;
  bool keep_snapshots = true;
  ProjectionOptions projection;
};

ApproximationTrace wcga(const TrigPolynomial& f, const TrigDictionary& dict, const WcgaOptions& opts = {});

// ---- IA(eps) -----------------------------------------------------------------

// eps_n = v gamma^{1/q} n^{-1/q'} for a space with modulus of smoothness
// rho(u) <= gamma u^q. L_p, p >= 2: q = 2, gamma = (p-1)/2. 1 < p < 2: q = p, gamma = 1/p.
struct Schedule {
  double v = 1.0;
  double gamma = 0.5;
  double q = 2.0;

  static Schedule for_lp(double p, double v = 1.0);
  double operator()(int n) const;
};

struct IaOptions {
  Schedule schedule;
  int m_max = 64;
  int oversampling = 4;
  int resynthesis_period = 32;
  bool keep_snapshots = true;
};

// f must lie in A_1 of the dictionary's symmetrized atoms. Each step takes the
// score-maximizing atom among the sign-matched support atoms of f; the whole
// symmetrized dictionary is searched only if that atom misses the eps test.
ApproximationTrace ia_epsilon(const TrigPolynomial& f, const TrigDictionary& dict, const IaOptions& opts);

// Sum over dictionary atoms of |coefficient| of the real expansion of t in
// dict's scaling.
double dictionary_a_norm(const TrigPolynomial& t, const TrigDictionary& dict);

}  // namespace sparsetrig
