#include "sparsetrig/trig_polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sparsetrig/errors.hpp"

namespace sparsetrig {

namespace {

int compare_keys(std::span<const int> a, std::span<const int> b) {
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] < b[j]) return -1;
    if (a[j] > b[j]) return 1;
  }
  return 0;
}

}  // namespace

TrigPolynomial::TrigPolynomial(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("TrigPolynomial: dimension must be >= 1");
}

TrigPolynomial TrigPolynomial::from_terms(int dim, std::vector<Term> terms) {
  TrigPolynomial t(dim);
  for (const auto& [k, c] : terms)
    if (k.dim() != dim) throw DimensionMismatch("TrigPolynomial: term dimension mismatch");
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.first < b.first; });
  t.keys_.reserve(terms.size() * static_cast<std::size_t>(dim));
  t.coeffs_.reserve(terms.size());
  std::size_t i = 0;
  while (i < terms.size()) {
    Complex sum = terms[i].second;
    std::size_t j = i + 1;
    while (j < terms.size() && terms[j].first == terms[i].first) sum += terms[j++].second;
    if (sum != Complex(0.0, 0.0)) {
      auto v = terms[i].first.values();
      t.keys_.insert(t.keys_.end(), v.begin(), v.end());
      t.coeffs_.push_back(sum);
    }
    i = j;
  }
  return t;
}

TrigPolynomial TrigPolynomial::constant(int dim, Complex c) {
  return from_terms(dim, {{FrequencyIndex(std::vector<int>(static_cast<std::size_t>(dim), 0)), c}});
}

TrigPolynomial TrigPolynomial::monomial(FrequencyIndex k, Complex c) {
  const int d = k.dim();
  return from_terms(d, {{std::move(k), c}});
}

std::size_t TrigPolynomial::find(std::span<const int> k) const {
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const int c = compare_keys(frequency(mid), k);
    if (c == 0) return mid;
    if (c < 0) lo = mid + 1;
    else hi = mid;
  }
  return size();
}

Complex TrigPolynomial::at(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != dim_) throw DimensionMismatch("TrigPolynomial::at: dimension mismatch");
  const std::size_t i = find(k);
  return i == size() ? Complex(0.0, 0.0) : coeffs_[i];
}

std::vector<TrigPolynomial::Term> TrigPolynomial::terms() const {
  std::vector<Term> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.emplace_back(FrequencyIndex(frequency(i)), coeffs_[i]);
  return out;
}

TrigPolynomial TrigPolynomial::filtered(const std::function<bool(std::span<const int>)>& keep) const {
  TrigPolynomial out(dim_);
  for (std::size_t i = 0; i < size(); ++i) {
    auto k = frequency(i);
    if (keep(k)) {
      out.keys_.insert(out.keys_.end(), k.begin(), k.end());
      out.coeffs_.push_back(coeffs_[i]);
    }
  }
  return out;
}

TrigPolynomial TrigPolynomial::restricted(const IndexSet& set) const {
  if (set.dim() != dim_) throw DimensionMismatch("restricted: dimension mismatch");
  return filtered([&](std::span<const int> k) { return set.contains(k); });
}

std::vector<int> TrigPolynomial::max_abs_frequency() const {
  std::vector<int> m(static_cast<std::size_t>(dim_), 0);
  for (std::size_t i = 0; i < size(); ++i) {
    auto k = frequency(i);
    for (std::size_t j = 0; j < m.size(); ++j) m[j] = std::max(m[j], std::abs(k[j]));
  }
  return m;
}

bool TrigPolynomial::is_real(double tol) const {
  std::vector<int> neg(static_cast<std::size_t>(dim_));
  for (std::size_t i = 0; i < size(); ++i) {
    auto k = frequency(i);
    for (std::size_t j = 0; j < neg.size(); ++j) neg[j] = -k[j];
    const Complex partner = at(neg);
    if (std::abs(partner - std::conj(coeffs_[i])) > tol) return false;
  }
  return true;
}

Complex TrigPolynomial::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw DimensionMismatch("evaluate: dimension mismatch");
  Complex sum(0.0, 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    auto k = frequency(i);
    double phase = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) phase += k[j] * x[j];
    sum += coeffs_[i] * Complex(std::cos(phase), std::sin(phase));
  }
  return sum;
}

TrigPolynomial TrigPolynomial::combine(const TrigPolynomial& o, double sign) const {
  if (o.dim_ != dim_) throw DimensionMismatch("TrigPolynomial: dimension mismatch");
  TrigPolynomial out(dim_);
  out.keys_.reserve(keys_.size() + o.keys_.size());
  out.coeffs_.reserve(size() + o.size());
  std::size_t i = 0, j = 0;
  auto push = [&](std::span<const int> k, Complex c) {
    if (c == Complex(0.0, 0.0)) return;
    out.keys_.insert(out.keys_.end(), k.begin(), k.end());
    out.coeffs_.push_back(c);
  };
  while (i < size() || j < o.size()) {
    int c;
    if (i == size()) c = 1;
    else if (j == o.size()) c = -1;
    else c = compare_keys(frequency(i), o.frequency(j));
    if (c < 0) {
      push(frequency(i), coeffs_[i]);
      ++i;
    } else if (c > 0) {
      push(o.frequency(j), sign * o.coeffs_[j]);
      ++j;
    } else {
      push(frequency(i), coeffs_[i] + sign * o.coeffs_[j]);
      ++i;
      ++j;
    }
  }
  return out;
}

TrigPolynomial& TrigPolynomial::operator+=(const TrigPolynomial& o) {
  *this = combine(o, 1.0);
  return *this;
}

TrigPolynomial& TrigPolynomial::operator-=(const TrigPolynomial& o) {
  *this = combine(o, -1.0);
  return *this;
}

TrigPolynomial& TrigPolynomial::operator*=(Complex s) {
  if (s == Complex(0.0, 0.0)) {
    keys_.clear();
    coeffs_.clear();
    return *this;
  }
  for (auto& c : coeffs_) c *= s;
  // Underflow can create exact zeros; combine() drops them.
  if (std::any_of(coeffs_.begin(), coeffs_.end(), [](Complex c) { return c == Complex(0.0, 0.0); }))
    *this = combine(TrigPolynomial(dim_), 1.0);
  return *this;
}

double max_coeff_diff(const TrigPolynomial& a, const TrigPolynomial& b) {
  const TrigPolynomial diff = a.combine(b, -1.0);
  double m = 0.0;
  for (const Complex& c : diff.coeffs()) m = std::max(m, std::abs(c));
  return m;
}

double a_norm(const TrigPolynomial& t) {
  double s = 0.0;
  for (const Complex& c : t.coeffs()) s += std::abs(c);
  return s;
}

double l2_norm(const TrigPolynomial& t) {
  double s = 0.0;
  for (const Complex& c : t.coeffs()) s += std::norm(c);
  return std::sqrt(s);
}

TrigPolynomial delta_s(const TrigPolynomial& t, std::span<const int> s) {
  if (static_cast<int>(s.size()) != t.dim()) throw DimensionMismatch("delta_s: dimension mismatch");
  return t.filtered([&](std::span<const int> k) {
    for (std::size_t j = 0; j < k.size(); ++j)
      if (dyadic_level(k[j]) != s[j]) return false;
    return true;
  });
}

TrigPolynomial layer(const TrigPolynomial& t, int l) {
  if (l < 0) throw std::invalid_argument("layer: l must be >= 0");
  return t.filtered([&](std::span<const int> k) { return dyadic_layer(k) == l; });
}

TrigPolynomial hyperbolic_partial_sum(const TrigPolynomial& t, int n) {
  if (n < 0) throw std::invalid_argument("hyperbolic_partial_sum: n must be >= 0");
  return t.filtered([&](std::span<const int> k) { return dyadic_layer(k) <= n; });
}

int top_layer(const TrigPolynomial& t) {
  int top = -1;
  for (std::size_t i = 0; i < t.size(); ++i) top = std::max(top, dyadic_layer(t.frequency(i)));
  return top;
}

}  // namespace sparsetrig
