#include "sparsetrig/dictionary.hpp"

#include <algorithm>
#include <cmath>

#include "sparsetrig/errors.hpp"
#include "sparsetrig/grid_function.hpp"

namespace sparsetrig {

namespace {

constexpr std::size_t kMaxMaterializedAtoms = std::size_t{1} << 22;

}  // namespace

std::string AtomKey::pattern() const {
  std::string out;
  for (int j = 0; j < freq.dim(); ++j) out += (cos_mask >> j & 1u) ? 'c' : 's';
  return out;
}

std::strong_ordering operator<=>(const AtomKey& a, const AtomKey& b) {
  const int la = l1_norm(a.freq.values());
  const int lb = l1_norm(b.freq.values());
  if (auto c = la <=> lb; c != 0) return c;
  if (auto c = a.freq <=> b.freq; c != 0) return c;
  return a.cos_mask <=> b.cos_mask;
}

AtomKey make_atom_key(FrequencyIndex freq, std::uint32_t cos_mask) {
  if (freq.dim() < 1 || freq.dim() > 31) throw DimensionMismatch("atom: dimension out of range");
  if (cos_mask >> freq.dim()) throw std::invalid_argument("atom: pattern has bits beyond dimension");
  for (int j = 0; j < freq.dim(); ++j) {
    if (freq[j] < 0) throw std::invalid_argument("atom: frequencies must be nonnegative");
    if (freq[j] == 0 && !(cos_mask >> j & 1u))
      throw std::invalid_argument("atom: zero frequency needs a cosine factor");
  }
  return AtomKey{std::move(freq), cos_mask};
}

std::vector<ExponentialTerm> raw_atom_terms(const AtomKey& key) {
  const int d = key.dim();
  std::vector<int> active;
  for (int j = 0; j < d; ++j)
    if (key.freq[j] != 0) active.push_back(j);
  const std::size_t n = active.size();
  std::vector<ExponentialTerm> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
    ExponentialTerm term{std::vector<int>(key.freq.values().begin(), key.freq.values().end()), 1.0};
    for (std::size_t a = 0; a < n; ++a) {
      const int j = active[a];
      const int sigma = (bits >> a & 1u) ? -1 : 1;
      term.k[static_cast<std::size_t>(j)] *= sigma;
      // cos: (e + e^-)/2, sin: (e - e^-)/(2i)
      if (key.cos_mask >> j & 1u)
        term.weight *= 0.5;
      else
        term.weight *= Complex(0.0, -0.5 * sigma);
    }
    out.push_back(std::move(term));
  }
  return out;
}

double cosine_lp_norm(double p) {
  if (std::isinf(p)) return 1.0;
  if (p == 2.0) return std::sqrt(0.5);
  // mean |cos|^p = Gamma((p+1)/2) / (sqrt(pi) Gamma(p/2 + 1))
  const double log_mean = std::lgamma((p + 1.0) / 2.0) - 0.5 * std::log(M_PI) - std::lgamma(p / 2.0 + 1.0);
  return std::exp(log_mean / p);
}

double raw_atom_norm(const AtomKey& key, double p) {
  int active = 0;
  for (int j = 0; j < key.dim(); ++j) active += key.freq[j] != 0;
  return std::pow(cosine_lp_norm(p), active);
}

double raw_atom_value(const AtomKey& key, std::span<const double> x) {
  if (static_cast<int>(x.size()) != key.dim()) throw DimensionMismatch("atom: point dimension");
  double v = 1.0;
  for (int j = 0; j < key.dim(); ++j) {
    const double arg = key.freq[j] * x[static_cast<std::size_t>(j)];
    v *= (key.cos_mask >> j & 1u) ? std::cos(arg) : std::sin(arg);
  }
  return v;
}

TrigPolynomial DictionaryAtom::polynomial() const {
  std::vector<TrigPolynomial::Term> terms;
  for (auto& e : raw_atom_terms(key)) terms.emplace_back(FrequencyIndex(std::move(e.k)), e.weight / norm_const);
  return TrigPolynomial::from_terms(key.dim(), std::move(terms));
}

TrigDictionary::TrigDictionary(std::vector<int> box, double p, AtomScaling scaling)
    : box_(std::move(box)), p_(p), scaling_(scaling), size_(1) {
  if (box_.empty() || box_.size() > 31) throw DimensionMismatch("dictionary: dimension out of range");
  if (!(p > 1.0)) throw std::invalid_argument("dictionary: exponent must exceed 1");
  for (int n : box_) {
    if (n < 0) throw std::invalid_argument("dictionary: negative box size");
    size_ *= static_cast<std::size_t>(2 * n + 1);
  }
}

const std::vector<DictionaryAtom>& TrigDictionary::atoms() const {
  if (!atoms_.empty()) return atoms_;
  if (size_ > kMaxMaterializedAtoms) throw BudgetExceeded("dictionary: too many atoms to enumerate");
  std::vector<DictionaryAtom> out;
  out.reserve(size_);
  const int d = dim();
  std::vector<int> k(static_cast<std::size_t>(d), 0);
  while (true) {
    std::uint32_t forced = 0, free_bits = 0;
    for (int j = 0; j < d; ++j) (k[static_cast<std::size_t>(j)] == 0 ? forced : free_bits) |= 1u << j;
    // enumerate subsets of free_bits
    std::uint32_t sub = free_bits;
    while (true) {
      AtomKey key{FrequencyIndex(k), forced | sub};
      out.push_back(DictionaryAtom{key, atom_norm_const(key)});
      if (sub == 0) break;
      sub = (sub - 1) & free_bits;
    }
    int j = d - 1;
    while (j >= 0 && k[static_cast<std::size_t>(j)] == box_[static_cast<std::size_t>(j)]) k[static_cast<std::size_t>(j--)] = 0;
    if (j < 0) break;
    ++k[static_cast<std::size_t>(j)];
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
  atoms_ = std::move(out);
  return atoms_;
}

bool TrigDictionary::contains(const AtomKey& key) const {
  if (key.dim() != dim()) return false;
  for (int j = 0; j < dim(); ++j) {
    if (key.freq[j] < 0 || key.freq[j] > box_[static_cast<std::size_t>(j)]) return false;
    if (key.freq[j] == 0 && !(key.cos_mask >> j & 1u)) return false;
  }
  return (key.cos_mask >> dim()) == 0;
}

std::optional<std::size_t> TrigDictionary::index_of(const AtomKey& key) const {
  if (!contains(key)) return std::nullopt;
  const auto& a = atoms();
  auto it = std::lower_bound(a.begin(), a.end(), key, [](const DictionaryAtom& x, const AtomKey& k) { return x.key < k; });
  if (it == a.end() || !(it->key == key)) return std::nullopt;
  return static_cast<std::size_t>(it - a.begin());
}

double TrigDictionary::atom_norm_const(const AtomKey& key) const {
  return scaling_ == AtomScaling::Unit ? 1.0 : raw_atom_norm(key, p_);
}

DictionaryAtom TrigDictionary::make_atom(const AtomKey& key) const {
  if (!contains(key)) throw std::invalid_argument("dictionary: atom outside the box");
  return DictionaryAtom{key, atom_norm_const(key)};
}

std::vector<int> TrigDictionary::quadrature_grid(int oversampling) const {
  return sparsetrig::quadrature_grid(box_, oversampling);
}

std::vector<RealTerm> real_expansion(const TrigPolynomial& t) {
  const int d = t.dim();
  if (d > 31) throw DimensionMismatch("real_expansion: dimension out of range");
  // distinct |k| vectors
  std::vector<FrequencyIndex> kappas;
  kappas.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto k = t.frequency(i);
    std::vector<int> a(k.begin(), k.end());
    for (int& v : a) v = std::abs(v);
    kappas.emplace_back(std::move(a));
  }
  std::sort(kappas.begin(), kappas.end());
  kappas.erase(std::unique(kappas.begin(), kappas.end()), kappas.end());

  std::vector<RealTerm> out;
  std::vector<int> active;
  std::vector<Complex> vals;
  std::vector<int> probe(static_cast<std::size_t>(d));
  for (const auto& kappa : kappas) {
    active.clear();
    std::uint32_t forced = 0;
    for (int j = 0; j < d; ++j) {
      if (kappa[j] != 0)
        active.push_back(j);
      else
        forced |= 1u << j;
    }
    const std::size_t n = active.size();
    const std::size_t nsig = std::size_t{1} << n;
    vals.assign(nsig, 0.0);
    for (std::size_t bits = 0; bits < nsig; ++bits) {
      for (int j = 0; j < d; ++j) probe[static_cast<std::size_t>(j)] = kappa[j];
      for (std::size_t a = 0; a < n; ++a)
        if (bits >> a & 1u) probe[static_cast<std::size_t>(active[a])] *= -1;
      vals[bits] = t.at(probe);
    }
    // c_E = sum_sigma t(sigma kappa) prod_{j active, not in E} (i sigma_j)
    for (std::size_t emask = 0; emask < nsig; ++emask) {
      Complex c = 0.0;
      for (std::size_t bits = 0; bits < nsig; ++bits) {
        Complex w = 1.0;
        for (std::size_t a = 0; a < n; ++a)
          if (!(emask >> a & 1u)) w *= Complex(0.0, (bits >> a & 1u) ? -1.0 : 1.0);
        c += w * vals[bits];
      }
      if (c.real() == 0.0) continue;
      std::uint32_t cos_mask = forced;
      for (std::size_t a = 0; a < n; ++a)
        if (emask >> a & 1u) cos_mask |= 1u << active[a];
      out.push_back(RealTerm{AtomKey{kappa, cos_mask}, c.real()});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
  return out;
}

TrigPolynomial from_real_expansion(int dim, std::span<const RealTerm> terms) {
  std::vector<TrigPolynomial::Term> out;
  for (const auto& rt : terms) {
    if (rt.key.dim() != dim) throw DimensionMismatch("from_real_expansion: atom dimension");
    for (auto& e : raw_atom_terms(rt.key)) out.emplace_back(FrequencyIndex(std::move(e.k)), e.weight * rt.value);
  }
  return TrigPolynomial::from_terms(dim, std::move(out));
}

double real_a_norm(const TrigPolynomial& t) {
  double s = 0.0;
  for (const auto& rt : real_expansion(t)) s += std::abs(rt.value);
  return s;
}

}  // namespace sparsetrig
