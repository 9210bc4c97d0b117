#include "sparsetrig/function_classes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sparsetrig/dictionary.hpp"
#include "sparsetrig/errors.hpp"
#include "sparsetrig/norms.hpp"
#include "sparsetrig/rng.hpp"
#include "sparsetrig/serialization.hpp"

namespace sparsetrig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exponent in the random phi profile |phi(k)| ~ prod max(|k_j|,1)^{-1/2-delta}.
constexpr double kProfileDelta = 0.05;

double block_q_norm(const TrigPolynomial& t, double q) {
  if (q == 2.0) return l2_norm(t);
  return norm_value(t, std::isinf(q) ? Exponent::sup() : Exponent::lp(q));
}

// Terms of the truncation grouped by dyadic block, blocks in lexicographic order.
std::map<std::vector<int>, std::vector<FrequencyIndex>> blocks_of(const IndexSet& set) {
  std::map<std::vector<int>, std::vector<FrequencyIndex>> out;
  set.for_each([&](std::span<const int> k) { out[dyadic_block_of(k)].emplace_back(k); });
  return out;
}

std::map<std::vector<int>, TrigPolynomial> split_blocks(const TrigPolynomial& f) {
  std::map<std::vector<int>, std::vector<TrigPolynomial::Term>> terms;
  for (std::size_t i = 0; i < f.size(); ++i)
    terms[dyadic_block_of(f.frequency(i))].emplace_back(FrequencyIndex(f.frequency(i)), f.coeff(i));
  std::map<std::vector<int>, TrigPolynomial> out;
  for (auto& [s, t] : terms) out.emplace(s, TrigPolynomial::from_terms(f.dim(), std::move(t)));
  return out;
}

// Real random polynomial on a symmetric member list: normal coefficients,
// c(-k) = conj c(k).
TrigPolynomial random_real(int dim, const std::vector<FrequencyIndex>& members, CounterRng rng) {
  std::vector<TrigPolynomial::Term> terms;
  for (const auto& k : members) {
    const FrequencyIndex neg = -k;
    if (neg < k) continue;
    if (neg == k) {
      terms.emplace_back(k, Complex(rng.normal(), 0.0));
    } else {
      const Complex c(rng.normal(), rng.normal());
      terms.emplace_back(k, c);
      terms.emplace_back(neg, std::conj(c));
    }
  }
  return TrigPolynomial::from_terms(dim, std::move(terms));
}

void check_symmetric(const IndexSet& set) {
  bool ok = true;
  set.for_each([&](std::span<const int> k) {
    std::vector<int> n(k.begin(), k.end());
    for (int& v : n) v = -v;
    if (!set.contains(n)) ok = false;
  });
  if (!ok) throw std::invalid_argument("sample_class: truncation must be symmetric under k -> -k");
}

double layer_index_factor(int l, int d, double b) { return std::pow(std::max(l, 1), (d - 1) * b); }

}  // namespace

std::string to_string(ClassKind kind) {
  switch (kind) {
    case ClassKind::W: return "W";
    case ClassKind::H: return "H";
    case ClassKind::B: return "B";
    case ClassKind::Htheta: return "Htheta";
    case ClassKind::WAb: return "WAb";
  }
  return "?";
}

ClassKind class_kind_from_string(const std::string& name) {
  for (auto k : {ClassKind::W, ClassKind::H, ClassKind::B, ClassKind::Htheta, ClassKind::WAb})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown class kind '" + name + "'");
}

ClassSpec ClassSpec::W(double r, double q, int d) { return ClassSpec{ClassKind::W, d, r, q, kInf, 0.0, 0.0}; }
ClassSpec ClassSpec::H(double r, double q, int d) { return ClassSpec{ClassKind::H, d, r, q, kInf, 0.0, 0.0}; }
ClassSpec ClassSpec::B(double r, double q, double theta, int d) {
  return ClassSpec{ClassKind::B, d, r, q, theta, 0.0, 0.0};
}
ClassSpec ClassSpec::Htheta(double r, double q, double theta, int d) {
  return ClassSpec{ClassKind::Htheta, d, r, q, theta, 0.0, 0.0};
}
ClassSpec ClassSpec::WAb(double a, double b, int d) { return ClassSpec{ClassKind::WAb, d, 0.0, 2.0, kInf, a, b}; }

void ClassSpec::validate() const {
  if (d < 1) throw RegimeError("class: dimension must be positive");
  if (kind == ClassKind::WAb) {
    if (!(a > 0.0)) throw RegimeError("class WAb: need a > 0");
    if (!std::isfinite(b)) throw RegimeError("class WAb: b must be finite");
    return;
  }
  if (!(q > 1.0)) throw RegimeError("class: need q > 1");
  if (!(r > 0.0)) throw RegimeError("class: need r > 0");
  if (kind == ClassKind::W) {
    if (std::isinf(q)) throw RegimeError("class W: need q < inf");
    if (!(r > 1.0 / q)) throw RegimeError("class W: need r > 1/q");
  }
  if ((kind == ClassKind::B || kind == ClassKind::Htheta) && !(theta >= 1.0))
    throw RegimeError("class: need theta >= 1");
}

double ClassSpec::layer_a() const {
  if (kind == ClassKind::WAb) return a;
  return r - 1.0 / std::min(q, 2.0);
}

double ClassSpec::layer_b() const {
  switch (kind) {
    case ClassKind::WAb: return b;
    case ClassKind::W: return 1.0 - 1.0 / std::min(q, 2.0);
    case ClassKind::H: return 1.0;
    case ClassKind::B:
    case ClassKind::Htheta: return 1.0 - 1.0 / theta;
  }
  return 1.0;
}

std::string ClassSpec::describe() const {
  std::string s = to_string(kind) + "(d=" + std::to_string(d);
  auto num = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };
  if (kind == ClassKind::WAb) return s + ",a=" + num(a) + ",b=" + num(b) + ")";
  s += ",r=" + num(r) + ",q=" + num(q);
  if (kind == ClassKind::B || kind == ClassKind::Htheta) s += ",theta=" + num(theta);
  return s + ")";
}

nlohmann::json to_json(const ClassSpec& spec) {
  nlohmann::json j{{"kind", to_string(spec.kind)}, {"d", spec.d}};
  if (spec.kind == ClassKind::WAb) {
    j["a"] = spec.a;
    j["b"] = spec.b;
  } else {
    j["r"] = spec.r;
    j["q"] = std::isinf(spec.q) ? nlohmann::json("inf") : nlohmann::json(spec.q);
    if (spec.kind == ClassKind::B || spec.kind == ClassKind::Htheta)
      j["theta"] = std::isinf(spec.theta) ? nlohmann::json("inf") : nlohmann::json(spec.theta);
  }
  return j;
}

ClassSpec class_spec_from_json(const nlohmann::json& j) {
  auto num = [&](const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    const auto& v = j.at(key);
    if (v.is_string()) {
      if (v.get<std::string>() == "inf") return kInf;
      throw std::invalid_argument(std::string("class spec: bad value for ") + key);
    }
    return v.get<double>();
  };
  ClassSpec s;
  s.kind = class_kind_from_string(j.at("kind").get<std::string>());
  s.d = j.at("d").get<int>();
  s.r = num("r", 1.0);
  s.q = num("q", 2.0);
  s.theta = num("theta", kInf);
  s.a = num("a", 0.0);
  s.b = num("b", 0.0);
  s.validate();
  return s;
}

nlohmann::json to_json(const ClassSample& s) {
  nlohmann::json j{{"spec", to_json(s.spec)},
                   {"truncation", s.truncation},
                   {"seed", s.seed},
                   {"certificate", s.certificate},
                   {"f", to_json(s.f)}};
  if (s.truncation_level >= 0) j["truncation_level"] = s.truncation_level;
  if (!s.phi.empty()) j["phi"] = to_json(s.phi);
  return j;
}

TrigPolynomial bernoulli_coeffs(double r, const IndexSet& truncation) {
  if (!(r > 0.0)) throw std::invalid_argument("bernoulli_coeffs: need r > 0");
  const double half_turn = r * std::numbers::pi / 2.0;
  const Complex minus(std::cos(half_turn), -std::sin(half_turn));
  std::vector<TrigPolynomial::Term> terms;
  truncation.for_each([&](std::span<const int> k) {
    Complex c = 1.0;
    for (int kj : k) {
      if (kj == 0) continue;
      c *= std::pow(static_cast<double>(std::abs(kj)), -r) * (kj > 0 ? minus : std::conj(minus));
    }
    terms.emplace_back(FrequencyIndex(k), c);
  });
  return TrigPolynomial::from_terms(truncation.dim(), std::move(terms));
}

ClassSample sample_class(const ClassSpec& spec, const IndexSet& truncation, std::uint64_t seed) {
  spec.validate();
  if (truncation.dim() != spec.d) throw DimensionMismatch("sample_class: truncation dimension differs from spec");
  if (truncation.size() == 0) throw std::invalid_argument("sample_class: empty truncation");
  check_symmetric(truncation);
  ClassSample out;
  out.spec = spec;
  out.seed = seed;
  out.truncation = truncation.describe();
  if (truncation.kind() == IndexSetKind::StepHyperbolicCross) out.truncation_level = truncation.params()[0];
  const int d = spec.d;
  CounterRng rng(seed);

  switch (spec.kind) {
    case ClassKind::W: {
      std::vector<TrigPolynomial::Term> terms;
      truncation.for_each([&](std::span<const int> k) {
        const FrequencyIndex key(k);
        const FrequencyIndex neg = -key;
        if (neg < key) return;
        double mag = 1.0;
        for (int kj : k) mag *= std::pow(std::max(std::abs(kj), 1), -0.5 - kProfileDelta);
        if (neg == key) {
          terms.emplace_back(key, Complex(rng.uniform() < 0.5 ? -mag : mag, 0.0));
        } else {
          const Complex c = std::polar(mag, rng.phase());
          terms.emplace_back(key, c);
          terms.emplace_back(neg, std::conj(c));
        }
      });
      auto phi = TrigPolynomial::from_terms(d, std::move(terms));
      phi *= Complex(1.0 / block_q_norm(phi, spec.q), 0.0);
      const auto kernel = bernoulli_coeffs(spec.r, truncation);
      std::vector<TrigPolynomial::Term> fterms;
      for (std::size_t i = 0; i < phi.size(); ++i)
        fterms.emplace_back(FrequencyIndex(phi.frequency(i)), phi.coeff(i) * kernel.at(phi.frequency(i)));
      out.f = TrigPolynomial::from_terms(d, std::move(fterms));
      out.certificate = block_q_norm(phi, spec.q);
      out.phi = std::move(phi);
      return out;
    }
    case ClassKind::WAb: {
      std::map<int, std::vector<FrequencyIndex>> layers;
      truncation.for_each([&](std::span<const int> k) { layers[dyadic_layer(k)].emplace_back(k); });
      TrigPolynomial f(d);
      for (auto& [l, members] : layers) {
        auto part = random_real(d, members, rng.substream(static_cast<std::uint64_t>(l)));
        const double target = std::pow(2.0, -spec.a * l) * layer_index_factor(l, d, spec.b);
        part *= Complex(target / real_a_norm(part), 0.0);
        f += part;
      }
      out.f = std::move(f);
      out.certificate = class_norm(out.f, spec);
      return out;
    }
    case ClassKind::H:
    case ClassKind::B:
    case ClassKind::Htheta: {
      const auto blocks = blocks_of(truncation);
      // per-block target values of ||delta_s f||_q 2^{r||s||_1}
      std::map<std::vector<int>, double> weight;
      std::uint64_t id = 0;
      CounterRng wrng = rng.substream(0xB10C);
      for (const auto& [s, members] : blocks) weight[s] = spec.kind == ClassKind::H ? 1.0 : 0.5 + 0.5 * wrng.uniform();
      if (spec.kind == ClassKind::B && !std::isinf(spec.theta)) {
        double acc = 0.0;
        for (const auto& [s, w] : weight) acc += std::pow(w, spec.theta);
        const double scale = std::pow(acc, -1.0 / spec.theta);
        for (auto& [s, w] : weight) w *= scale;
      } else if (spec.kind == ClassKind::Htheta && !std::isinf(spec.theta)) {
        std::map<int, double> layer_acc;
        for (const auto& [s, w] : weight) layer_acc[l1_norm(s)] += std::pow(w, spec.theta);
        for (auto& [s, w] : weight) w *= std::pow(layer_acc[l1_norm(s)], -1.0 / spec.theta);
      } else if (spec.kind != ClassKind::H) {
        // theta = inf: the aggregate is a sup
        double mx = 0.0;
        for (const auto& [s, w] : weight) mx = std::max(mx, w);
        for (auto& [s, w] : weight) w /= mx;
      }
      TrigPolynomial f(d);
      for (const auto& [s, members] : blocks) {
        auto part = random_real(d, members, rng.substream(++id));
        const double target = weight[s] * std::pow(2.0, -spec.r * l1_norm(s));
        part *= Complex(target / block_q_norm(part, spec.q), 0.0);
        f += part;
      }
      out.f = std::move(f);
      out.certificate = class_norm(out.f, spec);
      return out;
    }
  }
  throw std::logic_error("sample_class: unhandled kind");
}

std::map<std::vector<int>, double> block_norms(const TrigPolynomial& f, double q) {
  std::map<std::vector<int>, double> out;
  for (const auto& [s, part] : split_blocks(f)) out[s] = block_q_norm(part, q);
  return out;
}

double class_norm(const TrigPolynomial& f, const ClassSpec& spec) {
  spec.validate();
  if (f.dim() != spec.d) throw DimensionMismatch("class_norm: dimension mismatch");
  if (spec.kind == ClassKind::W) throw RegimeError("class_norm: the W class has no block-norm formula");
  if (spec.kind == ClassKind::WAb) {
    std::map<int, std::vector<TrigPolynomial::Term>> layers;
    for (std::size_t i = 0; i < f.size(); ++i)
      layers[dyadic_layer(f.frequency(i))].emplace_back(FrequencyIndex(f.frequency(i)), f.coeff(i));
    double out = 0.0;
    for (auto& [l, terms] : layers) {
      const double a = real_a_norm(TrigPolynomial::from_terms(f.dim(), std::move(terms)));
      out = std::max(out, a * std::pow(2.0, spec.a * l) / layer_index_factor(l, spec.d, spec.b));
    }
    return out;
  }
  const auto norms = block_norms(f, spec.q);
  std::map<std::vector<int>, double> vals;
  for (const auto& [s, v] : norms) vals[s] = v * std::pow(2.0, spec.r * l1_norm(s));
  const bool sup = spec.kind == ClassKind::H || std::isinf(spec.theta);
  if (spec.kind == ClassKind::H || (spec.kind == ClassKind::B && sup)) {
    double out = 0.0;
    for (const auto& [s, v] : vals) out = std::max(out, v);
    return out;
  }
  if (spec.kind == ClassKind::B) {
    double acc = 0.0;
    for (const auto& [s, v] : vals) acc += std::pow(v, spec.theta);
    return std::pow(acc, 1.0 / spec.theta);
  }
  // Htheta: sup over layers of the per-layer aggregate
  std::map<int, double> layer;
  for (const auto& [s, v] : vals) {
    double& acc = layer[l1_norm(s)];
    acc = sup ? std::max(acc, v) : acc + std::pow(v, spec.theta);
  }
  double out = 0.0;
  for (const auto& [n, acc] : layer) out = std::max(out, sup ? acc : std::pow(acc, 1.0 / spec.theta));
  return out;
}

double block_sum_bound(const std::map<std::vector<int>, double>& eps, double p, double q) {
  const bool upper = q >= 1.0 && q < p && std::isfinite(p);
  const bool lower = p > 1.0 && p < q;
  if (!upper && !lower) throw RegimeError("block_sum_bound: need 1 <= q < p < inf or 1 < p < q <= inf");
  const double e = std::isinf(q) ? -1.0 : p / q - 1.0;
  double acc = 0.0;
  for (const auto& [s, v] : eps) {
    if (v < 0.0) throw std::invalid_argument("block_sum_bound: negative entry");
    if (v == 0.0) continue;
    acc += std::pow(v, p) * std::pow(2.0, l1_norm(s) * e);
  }
  return std::pow(acc, 1.0 / p);
}

double tail_estimate(const ClassSample& s, double p) {
  const int top = top_layer(s.f);
  if (top < 1) return 0.0;
  const double rate = s.spec.kind == ClassKind::WAb ? s.spec.a : s.spec.r;
  const auto last = layer(s.f, top);
  const double nrm = p == 2.0 ? l2_norm(last) : norm_value(last, std::isinf(p) ? Exponent::sup() : Exponent::lp(p));
  const double g = std::pow(2.0, -rate);
  return nrm * g / (1.0 - g);
}

}  // namespace sparsetrig
