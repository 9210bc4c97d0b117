#include "sparsetrig/norming.hpp"

#include <array>
#include <cmath>

#include "sparsetrig/errors.hpp"
#include "sparsetrig/norms.hpp"

namespace sparsetrig {

namespace {

void check_p(double p) {
  if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("norming functional: need 1 < p < inf");
}

}  // namespace

NormingFunctional::NormingFunctional(const TrigPolynomial& f, double p, const std::vector<int>& grid_sizes) : p_(p) {
  check_p(p);
  if (p == 2.0) {
    coeffs_ = f;
    norm_ = l2_norm(f);
    return;
  }
  *this = NormingFunctional(sample(f, grid_sizes), p);
}

NormingFunctional::NormingFunctional(const GridFunction& f, double p) : p_(p), sizes_(f.grid_sizes()) {
  check_p(p);
  norm_ = grid_norm(f, p);
  GridFunction h = signed_power(f, p - 1.0);
  kernel_ = spectrum(h);
  kernel_samples_ = std::move(h);
}

double NormingFunctional::scale() const {
  if (norm_ == 0.0) return 0.0;
  return p_ == 2.0 ? 1.0 / norm_ : std::pow(norm_, 1.0 - p_);
}

Complex NormingFunctional::kernel_coefficient(std::span<const int> k) const {
  if (coeffs_) return coeffs_->at(k);
  return kernel_->at(k);
}

double NormingFunctional::apply(const TrigPolynomial& g) const {
  const double s = scale();
  if (s == 0.0) return 0.0;
  // mean(h g) = sum_k g(k) H(-k); at p = 2 H(-k) = conj f(k) for real f
  Complex acc = 0.0;
  std::array<int, 32> probe{};
  const auto d = static_cast<std::size_t>(g.dim());
  if (!coeffs_ && static_cast<int>(d) != static_cast<int>(sizes_.size()))
    throw DimensionMismatch("norming functional: dimension mismatch");
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto k = g.frequency(i);
    for (std::size_t j = 0; j < d; ++j) probe[j] = -k[j];
    std::span<const int> neg(probe.data(), d);
    if (coeffs_) {
      acc += g.coeff(i) * coeffs_->at(neg);
    } else {
      if (!kernel_->representable(k)) throw AliasingError("norming functional: polynomial not resolved by the grid");
      acc += g.coeff(i) * kernel_->at(neg);
    }
  }
  return acc.real() * s;
}

double NormingFunctional::apply(const GridFunction& g) const {
  if (coeffs_) throw std::invalid_argument("norming functional: coefficient-mode functional applied to a grid");
  if (g.grid_sizes() != sizes_) throw DimensionMismatch("norming functional: grid mismatch");
  const double s = scale();
  if (s == 0.0) return 0.0;
  const auto& h = kernel_samples_->samples();
  const auto& v = g.samples();
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += h[i].real() * v[i].real();
  return acc / static_cast<double>(v.size()) * s;
}

double NormingFunctional::apply_raw(const AtomKey& key) const {
  const double s = scale();
  if (s == 0.0) return 0.0;
  const int d = key.dim();
  std::array<int, 32> active{};
  int n = 0;
  for (int j = 0; j < d; ++j)
    if (key.freq[j] != 0) active[static_cast<std::size_t>(n++)] = j;
  std::array<int, 32> probe{};
  Complex acc = 0.0;
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    Complex w = 1.0;
    for (int j = 0; j < d; ++j) probe[static_cast<std::size_t>(j)] = -key.freq[j];
    for (int a = 0; a < n; ++a) {
      const int j = active[static_cast<std::size_t>(a)];
      const double sigma = (bits >> a & 1u) ? -1.0 : 1.0;
      probe[static_cast<std::size_t>(j)] = -static_cast<int>(sigma) * key.freq[j];
      w *= (key.cos_mask >> j & 1u) ? Complex(0.5, 0.0) : Complex(0.0, -0.5 * sigma);
    }
    std::span<const int> k(probe.data(), static_cast<std::size_t>(d));
    acc += w * (coeffs_ ? coeffs_->at(k) : kernel_->at(k));
  }
  return acc.real() * s;
}

}  // namespace sparsetrig
