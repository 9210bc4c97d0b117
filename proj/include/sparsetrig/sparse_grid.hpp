#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "sparsetrig/function_classes.hpp"
#include "sparsetrig/trig_polynomial.hpp"

namespace sparsetrig {

using BigInt = boost::multiprecision::cpp_int;

// ---- Fejer kernels --------------------------------------------------------------

// prod_j K_{N_j}(x_j), K_N = sum_{|k| < N} (1 - |k|/N) e^{ikx}. Needs N_j >= 1.
TrigPolynomial fejer_kernel(const std::vector<int>& N);
TrigPolynomial fejer_kernel(int N, int d);

// sin^2(N x / 2) / (N sin^2(x / 2)), with the limit N at x = 0 mod 2pi.
double fejer_closed_form(int N, double x);

// ---- knots ----------------------------------------------------------------------

// A point of the torus. Exact knots store x_j = pi num_j / 2^{den_pow_j} in
// lowest terms (num_j odd unless den_pow_j = 0; num_j = 0 forces den_pow_j = 0).
// Float-only knots carry an empty `num`.
struct Knot {
  std::vector<BigInt> num;
  std::vector<int> den_pow;
  std::vector<double> x;  // float shadow, always present

  bool exact() const { return !num.empty(); }
  static Knot dyadic(std::vector<BigInt> num, std::vector<int> den_pow);
  static Knot real(std::vector<double> x);
};

class KnotSet {
 public:
  explicit KnotSet(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  std::size_t size() const { return knots_.size(); }
  const std::vector<Knot>& knots() const { return knots_; }
  const Knot& operator[](std::size_t i) const { return knots_[i]; }
  bool has_weights() const { return weights_.has_value(); }
  const std::vector<double>& weights() const;

  // Appends; exact duplicates are allowed here (see dedup builders below).
  void add(Knot k);
  // Throws unless |w| == size().
  void set_weights(std::vector<double> w);
  bool all_exact() const;

  nlohmann::json to_json() const;
  static KnotSet from_json(const nlohmann::json& j);

 private:
  int dim_;
  std::vector<Knot> knots_;
  std::optional<std::vector<double>> weights_;
};

// ---- webs and nets --------------------------------------------------------------

// W(s) = zero set of w(s, x) = prod sin(2^{s_j} x_j).
struct Web {
  std::vector<int> s;

  // Exact for dyadic knots: some j with 2^{s_j} num_j / 2^{den_pow_j} integral.
  // Float knots: |w(s, x)| <= tol.
  bool contains(const Knot& k, double tol = 1e-9) const;
  double value(std::span<const double> x) const;
};

struct NetReport {
  bool is_net = true;
  bool approximate = false;  // float-only knots were tested with a tolerance
  std::vector<int> witness;  // s with the largest off-web count
  std::int64_t witness_count = 0;  // |X \ W(witness)|
  std::int64_t allowed = 0;  // 2^l
};

// X is an (n,l)-net when |X \ W(s)| <= 2^l for every s in N_0^d with ||s||_1 = n.
NetReport is_nl_net(const KnotSet& X, int n, int l);

// ---- sparse grids ---------------------------------------------------------------

enum class GridPeriod {
  Half,  // xi_j = pi k_j 2^{-n_j}, 0 <= k_j < 2^{n_j}
  Full,  // xi_j = 2 pi k_j 2^{-n_j}, the rectangle-rule nodes on [0, 2pi)
};

struct SparseGridOptions {
  GridPeriod period = GridPeriod::Half;
  bool positive_parts = false;  // compositions with n_j >= 1 instead of n_j >= 0
  bool smolyak_weights = false;  // Full period only
};

// Deduplicated union over ||n||_1 = n of the tensor grids, in canonical order.
KnotSet sparse_grid(int n, int d, const SparseGridOptions& opts = {});

// Smolyak combination of full-period rectangle rules over ||l||_1 <= n,
// l_j >= 0: coefficient (-1)^{n - |l|} C(d-1, n - |l|) for n - d < |l| <= n,
// accumulated per knot. The knots are sparse_grid(n, d, Full).
KnotSet smolyak_cubature(int n, int d);

// Value of the Smolyak rule on e^{i(k,x)}, computed from 2-adic valuations.
double smolyak_on_exponential(int n, std::span<const int> k);

// ---- cubature and recovery ------------------------------------------------------

// Real part of sum_j lambda_j f(xi_j). Dyadic knots are evaluated on one
// aliased FFT grid when it is small enough, otherwise pointwise.
double cubature(const TrigPolynomial& f, const KnotSet& X);

// Same rule as smolyak_cubature(n, d), applied in the coefficient domain.
double smolyak_cubature_fast(const TrigPolynomial& f, int n);

// f evaluated at every knot.
std::vector<Complex> evaluate_at(const TrigPolynomial& f, const KnotSet& X);

struct ErrorStatistics {
  std::vector<double> errors;  // per seed, in seed order
  double max = 0.0;
  double median = 0.0;
  double mean = 0.0;
  bool lower_estimate = true;  // sampled sup over a class
};

ErrorStatistics make_statistics(std::vector<double> errors);

// k -> Lambda(e^{i(k,x)}, X). Dyadic knots use one FFT of the weights.
std::function<Complex(std::span<const int>)> rule_functional(const KnotSet& X);

enum class ClassSampling {
  Random,  // sample_class as is
  // Each block keeps its norm from sample_class but moves its mass onto the
  // frequencies the rule does not annihilate, phase-aligned with the rule.
  // Needs a block-norm class (H, B, Htheta).
  RuleAligned,
};

ClassSample rule_aligned_sample(const ClassSpec& spec, int level, std::uint64_t seed,
                                const std::function<Complex(std::span<const int>)>& rule);

// |f^(0) - Lambda(f, X)| over class samples truncated at Q_level.
ErrorStatistics class_cubature_error(const ClassSpec& spec, const KnotSet& X, int level,
                                     const std::vector<std::uint64_t>& seeds,
                                     ClassSampling sampling = ClassSampling::Random);

// sum_j f(xi_j) psi_j. Throws on a length mismatch.
TrigPolynomial recovery_apply(const TrigPolynomial& f, const KnotSet& X, const std::vector<TrigPolynomial>& psis);

// ||f - Psi(f, X)||_p over class samples truncated at Q_level.
ErrorStatistics recovery_error(const ClassSpec& spec, const KnotSet& X, const std::vector<TrigPolynomial>& psis,
                               double p, int level, const std::vector<std::uint64_t>& seeds);

// Full tensor grid x = 2 pi m / 2^{levels} with its real cardinal functions
// 2^{-|levels|} prod_j (sum_{|k| < M_j/2} e^{ik(x_j - xi_j)} + cos(M_j (x_j - xi_j) / 2)),
// which reproduce T(2^{levels - 1} - 1) exactly.
struct CardinalSystem {
  KnotSet knots{1};
  std::vector<TrigPolynomial> psis;
};
CardinalSystem dirichlet_cardinals(const std::vector<int>& levels);

}  // namespace sparsetrig
