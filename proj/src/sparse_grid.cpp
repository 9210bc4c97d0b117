#include "sparsetrig/sparse_grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "sparsetrig/errors.hpp"
#include "sparsetrig/grid_function.hpp"
#include "sparsetrig/index_set.hpp"
#include "sparsetrig/norms.hpp"
#include "sparsetrig/rng.hpp"

namespace sparsetrig {

namespace {

constexpr double kPi = std::numbers::pi;

// Largest total grid handled by one aliased FFT in evaluate_at.
constexpr std::size_t kMaxFftGrid = std::size_t{1} << 22;

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

void reduce(BigInt& num, int& den_pow) {
  if (num == 0) {
    den_pow = 0;
    return;
  }
  while (den_pow > 0 && !boost::multiprecision::bit_test(num, 0)) {
    num >>= 1;
    --den_pow;
  }
}

int trailing_zeros(long long v) {
  int t = 0;
  while ((v & 1) == 0) {
    v >>= 1;
    ++t;
  }
  return t;
}

// Visits every l in N_0^d (or N^d) with ||l||_1 == total.
template <class Fn>
void for_each_level(int d, int total, bool positive, Fn&& fn) {
  if (positive) {
    if (total < d) return;
    for_each_composition(d, total - d, [&](std::span<const int> l) {
      std::vector<int> shifted(l.begin(), l.end());
      for (int& v : shifted) ++v;
      fn(std::span<const int>(shifted));
    });
  } else {
    for_each_composition(d, total, fn);
  }
}

// Grid indices of a tensor grid with 2^{l_j} nodes per axis, scaled to a
// common grid of 2^{top} nodes per axis.
template <class Fn>
void for_each_tensor_node(std::span<const int> l, int top, Fn&& fn) {
  const std::size_t d = l.size();
  std::vector<long long> idx(d, 0);
  for (;;) {
    std::vector<long long> scaled(d);
    for (std::size_t j = 0; j < d; ++j) scaled[j] = idx[j] << (top - l[j]);
    fn(scaled);
    std::size_t j = d;
    while (j > 0) {
      --j;
      if (++idx[j] < (1LL << l[j])) break;
      idx[j] = 0;
      if (j == 0) return;
    }
  }
}

// Knot x_j = 2 pi m_j / 2^{top}.
Knot knot_from_index(const std::vector<long long>& m, int top) {
  std::vector<BigInt> num;
  std::vector<int> den;
  for (long long v : m) {
    num.emplace_back(2 * v);
    den.push_back(top);
  }
  return Knot::dyadic(std::move(num), std::move(den));
}

std::vector<int> zero_index(int d) { return std::vector<int>(static_cast<std::size_t>(d), 0); }

}  // namespace

// ---- Fejer ----------------------------------------------------------------------

TrigPolynomial fejer_kernel(const std::vector<int>& N) {
  if (N.empty()) throw std::invalid_argument("fejer_kernel: empty order vector");
  for (int n : N)
    if (n < 1) throw std::invalid_argument("fejer_kernel: need N_j >= 1");
  std::vector<int> box(N.size());
  for (std::size_t j = 0; j < N.size(); ++j) box[j] = N[j] - 1;
  std::vector<TrigPolynomial::Term> terms;
  IndexSet::box(box).for_each([&](std::span<const int> k) {
    double c = 1.0;
    for (std::size_t j = 0; j < k.size(); ++j) c *= 1.0 - std::abs(k[j]) / static_cast<double>(N[j]);
    terms.emplace_back(FrequencyIndex(k), Complex(c, 0.0));
  });
  return TrigPolynomial::from_terms(static_cast<int>(N.size()), std::move(terms));
}

TrigPolynomial fejer_kernel(int N, int d) { return fejer_kernel(std::vector<int>(static_cast<std::size_t>(d), N)); }

double fejer_closed_form(int N, double x) {
  const double s = std::sin(x / 2.0);
  if (std::abs(s) < 1e-8) {
    // K_N(x) = N - (N^3 - N) x^2 / 12 + O(x^4) near zero
    const double y = std::remainder(x, 2.0 * kPi);
    return N - (static_cast<double>(N) * N * N - N) * y * y / 12.0;
  }
  const double t = std::sin(N * x / 2.0);
  return t * t / (N * s * s);
}

// ---- knots ----------------------------------------------------------------------

Knot Knot::dyadic(std::vector<BigInt> num, std::vector<int> den_pow) {
  if (num.size() != den_pow.size() || num.empty()) throw std::invalid_argument("Knot: bad dyadic coordinates");
  Knot k;
  k.x.resize(num.size());
  for (std::size_t j = 0; j < num.size(); ++j) {
    if (den_pow[j] < 0) throw std::invalid_argument("Knot: negative denominator power");
    reduce(num[j], den_pow[j]);
    k.x[j] = kPi * static_cast<double>(num[j]) / std::ldexp(1.0, den_pow[j]);
  }
  k.num = std::move(num);
  k.den_pow = std::move(den_pow);
  return k;
}

Knot Knot::real(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("Knot: empty coordinates");
  Knot k;
  k.x = std::move(x);
  return k;
}

const std::vector<double>& KnotSet::weights() const {
  if (!weights_) throw std::logic_error("KnotSet: no weights");
  return *weights_;
}

void KnotSet::add(Knot k) {
  if (static_cast<int>(k.x.size()) != dim_) throw DimensionMismatch("KnotSet: knot dimension differs");
  knots_.push_back(std::move(k));
  weights_.reset();
}

void KnotSet::set_weights(std::vector<double> w) {
  if (w.size() != knots_.size()) throw std::invalid_argument("KnotSet: weight count differs from knot count");
  weights_ = std::move(w);
}

bool KnotSet::all_exact() const {
  return std::all_of(knots_.begin(), knots_.end(), [](const Knot& k) { return k.exact(); });
}

nlohmann::json KnotSet::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& k : knots_) {
    if (k.exact()) {
      nlohmann::json num = nlohmann::json::array();
      for (const auto& v : k.num) {
        if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
          num.push_back(static_cast<std::int64_t>(v));
        else
          num.push_back(v.str());
      }
      pts.push_back({{"num", num}, {"den_pow", k.den_pow}});
    } else {
      pts.push_back({{"x", k.x}});
    }
  }
  nlohmann::json j{{"d", dim_}, {"points", pts}};
  if (weights_) j["weights"] = *weights_;
  return j;
}

KnotSet KnotSet::from_json(const nlohmann::json& j) {
  KnotSet X(j.at("d").get<int>());
  for (const auto& p : j.at("points")) {
    if (p.contains("num")) {
      std::vector<BigInt> num;
      for (const auto& v : p.at("num")) num.push_back(v.is_string() ? BigInt(v.get<std::string>()) : BigInt(v.get<std::int64_t>()));
      X.add(Knot::dyadic(std::move(num), p.at("den_pow").get<std::vector<int>>()));
    } else {
      X.add(Knot::real(p.at("x").get<std::vector<double>>()));
    }
  }
  if (j.contains("weights")) X.set_weights(j.at("weights").get<std::vector<double>>());
  return X;
}

// ---- webs and nets --------------------------------------------------------------

bool Web::contains(const Knot& k, double tol) const {
  if (k.x.size() != s.size()) throw DimensionMismatch("Web: dimension mismatch");
  if (k.exact()) {
    // reduced num/2^b: 2^{s_j} num / 2^b is an integer iff num = 0 or s_j >= b
    for (std::size_t j = 0; j < s.size(); ++j)
      if (s[j] >= k.den_pow[j]) return true;
    return false;
  }
  return std::abs(value(k.x)) <= tol;
}

double Web::value(std::span<const double> x) const {
  double w = 1.0;
  for (std::size_t j = 0; j < s.size(); ++j) w *= std::sin(std::ldexp(x[j], s[j]));
  return w;
}

NetReport is_nl_net(const KnotSet& X, int n, int l) {
  if (n < 0 || l < 0) throw std::invalid_argument("is_nl_net: need n, l >= 0");
  if (l > 62) throw std::invalid_argument("is_nl_net: l too large");
  NetReport rep;
  rep.allowed = std::int64_t{1} << l;
  rep.approximate = !X.all_exact();
  rep.witness_count = -1;
  for_each_composition(X.dim(), n, [&](std::span<const int> s) {
    const Web web{std::vector<int>(s.begin(), s.end())};
    std::int64_t off = 0;
    for (const auto& k : X.knots())
      if (!web.contains(k)) ++off;
    if (off > rep.witness_count) {
      rep.witness_count = off;
      rep.witness = web.s;
    }
  });
  rep.is_net = rep.witness_count <= rep.allowed;
  return rep;
}

// ---- sparse grids ---------------------------------------------------------------

KnotSet sparse_grid(int n, int d, const SparseGridOptions& opts) {
  if (n < 0 || d < 1) throw std::invalid_argument("sparse_grid: need n >= 0, d >= 1");
  if (n > 40) throw std::invalid_argument("sparse_grid: n too large");
  if (opts.smolyak_weights) {
    if (opts.period != GridPeriod::Full || opts.positive_parts)
      throw std::invalid_argument("sparse_grid: Smolyak weights need the full-period n_j >= 0 grid");
    return smolyak_cubature(n, d);
  }
  // common grid x = 2 pi m / 2^{top}; the node of level n_j with index k sits
  // at m = k 2^{n - n_j} in both conventions
  const int top = opts.period == GridPeriod::Half ? n + 1 : n;
  std::vector<std::vector<long long>> keys;
  for_each_level(d, n, opts.positive_parts, [&](std::span<const int> l) {
    for_each_tensor_node(l, n, [&](const std::vector<long long>& m) { keys.push_back(m); });
  });
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  KnotSet X(d);
  for (const auto& m : keys) X.add(knot_from_index(m, top));
  return X;
}

KnotSet smolyak_cubature(int n, int d) {
  if (n < 0 || d < 1) throw std::invalid_argument("smolyak_cubature: need n >= 0, d >= 1");
  std::map<std::vector<long long>, double> acc;
  for (int total = std::max(0, n - d + 1); total <= n; ++total) {
    const double c = ((n - total) % 2 ? -1.0 : 1.0) * binomial(d - 1, n - total);
    const double w = c * std::ldexp(1.0, -total);
    for_each_composition(d, total, [&](std::span<const int> l) {
      for_each_tensor_node(l, n, [&](const std::vector<long long>& m) { acc[m] += w; });
    });
  }
  KnotSet X(d);
  std::vector<double> weights;
  for (const auto& [m, w] : acc) {
    X.add(knot_from_index(m, n));
    weights.push_back(w);
  }
  X.set_weights(std::move(weights));
  return X;
}

double smolyak_on_exponential(int n, std::span<const int> k) {
  // sum over subsets T of the nonzero coordinates with sum_{j in T} (v_j + 1) <= n
  std::vector<int> cost;
  for (int kj : k)
    if (kj != 0) cost.push_back(trailing_zeros(std::abs(static_cast<long long>(kj))) + 1);
  const std::size_t J = cost.size();
  if (J > 30) throw std::invalid_argument("smolyak_on_exponential: dimension too large");
  double total = 0.0;
  for (std::uint32_t T = 0; T < (1u << J); ++T) {
    int c = 0, bits = 0;
    for (std::size_t j = 0; j < J; ++j)
      if (T >> j & 1u) {
        c += cost[j];
        ++bits;
      }
    if (c <= n) total += bits % 2 ? -1.0 : 1.0;
  }
  return total;
}

// ---- cubature and recovery ------------------------------------------------------

std::vector<Complex> evaluate_at(const TrigPolynomial& f, const KnotSet& X) {
  if (f.dim() != X.dim()) throw DimensionMismatch("evaluate_at: dimension mismatch");
  std::vector<Complex> out(X.size());
  if (X.size() == 0) return out;
  if (X.all_exact()) {
    std::vector<int> top(static_cast<std::size_t>(X.dim()), 0);
    for (const auto& k : X.knots())
      for (std::size_t j = 0; j < top.size(); ++j) top[j] = std::max(top[j], k.den_pow[j] + 1);
    std::size_t total = 1;
    bool fits = true;
    for (int t : top) {
      if (t > 30 || total > (kMaxFftGrid >> t)) {
        fits = false;
        break;
      }
      total <<= t;
    }
    if (fits) {
      std::vector<int> sizes;
      for (int t : top) sizes.push_back(1 << t);
      const GridFunction g = sample(f, sizes, Sampling::AllowAliasing);
      for (std::size_t i = 0; i < X.size(); ++i) {
        const auto& k = X[i];
        // x_j = pi num / 2^b = 2 pi (num 2^{top - b - 1}) / 2^{top}
        std::vector<int> m(top.size());
        for (std::size_t j = 0; j < top.size(); ++j) {
          const BigInt M = BigInt(1) << top[j];
          BigInt idx = (k.num[j] << (top[j] - k.den_pow[j] - 1)) % M;
          if (idx < 0) idx += M;
          m[j] = static_cast<int>(idx);
        }
        out[i] = g[grid_index(m, sizes)];
      }
      return out;
    }
  }
  for (std::size_t i = 0; i < X.size(); ++i) out[i] = f.evaluate(X[i].x);
  return out;
}

double cubature(const TrigPolynomial& f, const KnotSet& X) {
  if (!X.has_weights()) throw std::invalid_argument("cubature: knot set has no weights");
  const auto vals = evaluate_at(f, X);
  const auto& w = X.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) s += w[i] * vals[i].real();
  return s;
}

double smolyak_cubature_fast(const TrigPolynomial& f, int n) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f.coeff(i).real() * smolyak_on_exponential(n, f.frequency(i));
  return s;
}

ErrorStatistics make_statistics(std::vector<double> errors) {
  ErrorStatistics st;
  st.errors = errors;
  if (errors.empty()) return st;
  std::sort(errors.begin(), errors.end());
  st.max = errors.back();
  const std::size_t h = errors.size() / 2;
  st.median = errors.size() % 2 ? errors[h] : 0.5 * (errors[h - 1] + errors[h]);
  double sum = 0.0;
  for (double e : errors) sum += e;
  st.mean = sum / static_cast<double>(errors.size());
  return st;
}

std::function<Complex(std::span<const int>)> rule_functional(const KnotSet& X) {
  if (!X.has_weights()) throw std::invalid_argument("rule_functional: knot set has no weights");
  if (X.all_exact() && X.size() > 0) {
    std::vector<int> top(static_cast<std::size_t>(X.dim()), 0);
    for (const auto& k : X.knots())
      for (std::size_t j = 0; j < top.size(); ++j) top[j] = std::max(top[j], k.den_pow[j] + 1);
    std::size_t total = 1;
    bool fits = true;
    for (int t : top) {
      if (t > 30 || total > (kMaxFftGrid >> t)) {
        fits = false;
        break;
      }
      total <<= t;
    }
    if (fits) {
      std::vector<int> sizes;
      for (int t : top) sizes.push_back(1 << t);
      auto g = GridFunction::zeros(sizes);
      for (std::size_t i = 0; i < X.size(); ++i) {
        const auto& k = X[i];
        std::vector<int> m(top.size());
        for (std::size_t j = 0; j < top.size(); ++j) {
          const BigInt M = BigInt(1) << top[j];
          BigInt idx = (k.num[j] << (top[j] - k.den_pow[j] - 1)) % M;
          if (idx < 0) idx += M;
          m[j] = static_cast<int>(idx);
        }
        g.samples()[grid_index(m, sizes)] += X.weights()[i];
      }
      // spectrum(k) = mean_m g e^{-ikx}, so Lambda(e^{ikx}) = total * spectrum(-k)
      auto spec = std::make_shared<Spectrum>(spectrum(g));
      const double scale = static_cast<double>(total);
      return [spec, scale](std::span<const int> k) {
        std::vector<int> neg(k.begin(), k.end());
        for (int& v : neg) v = -v;
        return scale * spec->at(neg);
      };
    }
  }
  auto knots = std::make_shared<KnotSet>(X);
  return [knots](std::span<const int> k) {
    Complex s(0.0, 0.0);
    for (std::size_t i = 0; i < knots->size(); ++i) {
      double phase = 0.0;
      for (std::size_t j = 0; j < k.size(); ++j) phase += k[j] * (*knots)[i].x[j];
      s += knots->weights()[i] * std::polar(1.0, phase);
    }
    return s;
  };
}

ClassSample rule_aligned_sample(const ClassSpec& spec, int level, std::uint64_t seed,
                                const std::function<Complex(std::span<const int>)>& rule) {
  if (spec.kind != ClassKind::H && spec.kind != ClassKind::B && spec.kind != ClassKind::Htheta)
    throw RegimeError("rule_aligned_sample: needs a block-norm class (H, B or Htheta)");
  ClassSample s = sample_class(spec, IndexSet::step_hyperbolic_cross(spec.d, level), seed);
  std::map<std::vector<int>, std::vector<TrigPolynomial::Term>> blocks;
  for (const auto& term : s.f.terms()) blocks[dyadic_block_of(term.first.values())].push_back(term);
  CounterRng rng(seed, 0x5eed);
  std::vector<TrigPolynomial::Term> out;
  std::uint64_t id = 0;
  for (auto& [bs, terms] : blocks) {
    std::vector<TrigPolynomial::Term> aligned;
    CounterRng brng = rng.substream(++id);
    for (const auto& [k, c] : terms) {
      const FrequencyIndex neg = -k;
      if (neg < k) continue;
      const Complex lam = rule(k.values());
      if (std::abs(lam) <= 1e-9) continue;
      const Complex v = (0.5 + brng.uniform()) * std::conj(lam) / std::abs(lam);
      if (neg == k) {
        aligned.emplace_back(k, Complex(v.real(), 0.0));
      } else {
        aligned.emplace_back(k, v);
        aligned.emplace_back(neg, std::conj(v));
      }
    }
    if (aligned.empty()) {
      out.insert(out.end(), terms.begin(), terms.end());
      continue;
    }
    const auto original = TrigPolynomial::from_terms(spec.d, terms);
    auto part = TrigPolynomial::from_terms(spec.d, std::move(aligned));
    const double target = block_norms(original, spec.q).begin()->second;
    part *= Complex(target / block_norms(part, spec.q).begin()->second, 0.0);
    const auto pt = part.terms();
    out.insert(out.end(), pt.begin(), pt.end());
  }
  s.f = TrigPolynomial::from_terms(spec.d, std::move(out));
  s.certificate = class_norm(s.f, spec);
  return s;
}

ErrorStatistics class_cubature_error(const ClassSpec& spec, const KnotSet& X, int level,
                                     const std::vector<std::uint64_t>& seeds, ClassSampling sampling) {
  std::vector<double> errors;
  const auto Q = IndexSet::step_hyperbolic_cross(spec.d, level);
  std::function<Complex(std::span<const int>)> rule;
  if (sampling == ClassSampling::RuleAligned) rule = rule_functional(X);
  for (auto seed : seeds) {
    const auto s = sampling == ClassSampling::RuleAligned ? rule_aligned_sample(spec, level, seed, rule)
                                                          : sample_class(spec, Q, seed);
    const double exact = s.f.at(zero_index(spec.d)).real();
    errors.push_back(std::abs(exact - cubature(s.f, X)));
  }
  return make_statistics(std::move(errors));
}

TrigPolynomial recovery_apply(const TrigPolynomial& f, const KnotSet& X, const std::vector<TrigPolynomial>& psis) {
  if (psis.size() != X.size()) throw std::invalid_argument("recovery_apply: need one function per knot");
  const auto vals = evaluate_at(f, X);
  std::vector<TrigPolynomial::Term> terms;
  for (std::size_t i = 0; i < psis.size(); ++i) {
    if (psis[i].dim() != f.dim()) throw DimensionMismatch("recovery_apply: dimension mismatch");
    for (std::size_t t = 0; t < psis[i].size(); ++t)
      terms.emplace_back(FrequencyIndex(psis[i].frequency(t)), vals[i] * psis[i].coeff(t));
  }
  return TrigPolynomial::from_terms(f.dim(), std::move(terms));
}

ErrorStatistics recovery_error(const ClassSpec& spec, const KnotSet& X, const std::vector<TrigPolynomial>& psis,
                               double p, int level, const std::vector<std::uint64_t>& seeds) {
  std::vector<double> errors;
  const auto Q = IndexSet::step_hyperbolic_cross(spec.d, level);
  const Exponent e = std::isinf(p) ? Exponent::sup() : p == 2.0 ? Exponent::l2_exact() : Exponent::lp(p);
  for (auto seed : seeds) {
    const auto s = sample_class(spec, Q, seed);
    const auto diff = s.f - recovery_apply(s.f, X, psis);
    errors.push_back(diff.empty() ? 0.0 : norm_value(diff, e));
  }
  return make_statistics(std::move(errors));
}

CardinalSystem dirichlet_cardinals(const std::vector<int>& levels) {
  if (levels.empty()) throw std::invalid_argument("dirichlet_cardinals: empty level vector");
  const int d = static_cast<int>(levels.size());
  for (int l : levels)
    if (l < 0 || l > 20) throw std::invalid_argument("dirichlet_cardinals: level out of range");
  const int top = *std::max_element(levels.begin(), levels.end());
  CardinalSystem sys;
  sys.knots = KnotSet(d);
  for_each_tensor_node(levels, top, [&](const std::vector<long long>& m) {
    Knot k = knot_from_index(m, top);
    // one-dimensional factors, then their tensor product
    std::vector<std::vector<std::pair<int, Complex>>> factors(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      const int M = 1 << levels[static_cast<std::size_t>(j)];
      const double xi = k.x[static_cast<std::size_t>(j)];
      auto& fac = factors[static_cast<std::size_t>(j)];
      if (M == 1) {
        fac.emplace_back(0, Complex(1.0, 0.0));
        continue;
      }
      for (int q = -M / 2; q <= M / 2; ++q) {
        const double scale = (std::abs(q) == M / 2 ? 0.5 : 1.0) / M;
        fac.emplace_back(q, std::polar(scale, -q * xi));
      }
    }
    std::vector<TrigPolynomial::Term> terms;
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (;;) {
      std::vector<int> freq(static_cast<std::size_t>(d));
      Complex c(1.0, 0.0);
      for (std::size_t j = 0; j < idx.size(); ++j) {
        freq[j] = factors[j][idx[j]].first;
        c *= factors[j][idx[j]].second;
      }
      terms.emplace_back(FrequencyIndex(freq), c);
      std::size_t j = idx.size();
      bool done = true;
      while (j > 0) {
        --j;
        if (++idx[j] < factors[j].size()) {
          done = false;
          break;
        }
        idx[j] = 0;
      }
      if (done) break;
    }
    sys.psis.push_back(TrigPolynomial::from_terms(d, std::move(terms)));
    sys.knots.add(std::move(k));
  });
  return sys;
}

}  // namespace sparsetrig
