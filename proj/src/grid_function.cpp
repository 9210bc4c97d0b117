#include "sparsetrig/grid_function.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "sparsetrig/errors.hpp"

namespace sparsetrig {

namespace {

constexpr std::size_t kMaxGridPoints = std::size_t{1} << 27;

std::size_t wrap_index(std::span<const int> k, const std::vector<int>& sizes) {
  std::size_t idx = 0;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    const int M = sizes[j];
    int r = k[j] % M;
    if (r < 0) r += M;
    idx = idx * static_cast<std::size_t>(M) + static_cast<std::size_t>(r);
  }
  return idx;
}

void check_sizes(const std::vector<int>& sizes) {
  if (sizes.empty()) throw std::invalid_argument("grid: empty grid");
  std::size_t total = 1;
  for (int M : sizes) {
    if (M < 1 || !std::has_single_bit(static_cast<unsigned>(M)))
      throw std::invalid_argument("grid: sizes must be powers of two");
    total *= static_cast<std::size_t>(M);
    if (total > kMaxGridPoints) throw BudgetExceeded("grid: more than 2^27 nodes requested");
  }
}

}  // namespace

GridFunction::GridFunction(std::vector<int> grid_sizes, std::vector<Complex> samples)
    : sizes_(std::move(grid_sizes)), samples_(std::move(samples)) {
  check_sizes(sizes_);
  std::size_t total = 1;
  for (int M : sizes_) total *= static_cast<std::size_t>(M);
  if (total != samples_.size()) throw std::invalid_argument("GridFunction: sample count does not match grid");
}

GridFunction GridFunction::zeros(std::vector<int> grid_sizes) {
  check_sizes(grid_sizes);
  std::size_t total = 1;
  for (int M : grid_sizes) total *= static_cast<std::size_t>(M);
  return GridFunction(std::move(grid_sizes), std::vector<Complex>(total));
}

std::vector<double> GridFunction::node(std::size_t i) const {
  std::vector<double> x(sizes_.size());
  for (std::size_t j = sizes_.size(); j-- > 0;) {
    const auto M = static_cast<std::size_t>(sizes_[j]);
    x[j] = 2.0 * std::numbers::pi * static_cast<double>(i % M) / static_cast<double>(M);
    i /= M;
  }
  return x;
}

Complex Spectrum::at(std::span<const int> k) const {
  if (k.size() != sizes_.size()) throw DimensionMismatch("Spectrum::at: dimension mismatch");
  return data_[wrap_index(k, sizes_)];
}

bool Spectrum::representable(std::span<const int> k) const {
  for (std::size_t j = 0; j < sizes_.size(); ++j)
    if (2 * std::abs(k[j]) >= sizes_[j]) return false;
  return true;
}

std::size_t grid_index(std::span<const int> k, const std::vector<int>& grid_sizes) {
  if (k.size() != grid_sizes.size()) throw DimensionMismatch("grid_index: dimension mismatch");
  return wrap_index(k, grid_sizes);
}

int next_pow2(int n) {
  if (n < 1) return 1;
  return static_cast<int>(std::bit_ceil(static_cast<unsigned>(n)));
}

std::vector<int> quadrature_grid(std::span<const int> max_abs, int oversampling) {
  if (oversampling < 1) throw std::invalid_argument("quadrature_grid: oversampling must be >= 1");
  std::vector<int> sizes(max_abs.size());
  for (std::size_t j = 0; j < max_abs.size(); ++j)
    sizes[j] = next_pow2(oversampling * (2 * max_abs[j] + 1));
  return sizes;
}

GridFunction sample(const TrigPolynomial& t, const std::vector<int>& grid_sizes, Sampling mode) {
  if (static_cast<int>(grid_sizes.size()) != t.dim()) throw DimensionMismatch("sample: dimension mismatch");
  GridFunction g = GridFunction::zeros(grid_sizes);
  auto& data = g.samples();
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto k = t.frequency(i);
    if (mode == Sampling::Unaliased)
      for (std::size_t j = 0; j < k.size(); ++j)
        if (2 * std::abs(k[j]) >= grid_sizes[j])
          throw AliasingError("sample: frequency does not fit the grid without aliasing");
    data[wrap_index(k, grid_sizes)] += t.coeff(i);
  }
  detail::fft_inplace(data, grid_sizes, +1);
  return g;
}

Spectrum spectrum(const GridFunction& g) {
  std::vector<Complex> data = g.samples();
  detail::fft_inplace(data, g.grid_sizes(), -1);
  const double scale = 1.0 / static_cast<double>(g.total());
  for (auto& c : data) c *= scale;
  return Spectrum(g.grid_sizes(), std::move(data));
}

TrigPolynomial analyze(const GridFunction& g, const IndexSet& support) {
  if (support.dim() != g.dim()) throw DimensionMismatch("analyze: dimension mismatch");
  if (g.total() == 0) throw std::invalid_argument("analyze: empty grid");
  const Spectrum spec = spectrum(g);
  std::vector<TrigPolynomial::Term> terms;
  support.for_each([&](std::span<const int> k) {
    if (!spec.representable(k)) throw AliasingError("analyze: support frequency aliases on the grid");
    const Complex c = spec.at(k);
    if (c != Complex(0.0, 0.0)) terms.emplace_back(FrequencyIndex(k), c);
  });
  return TrigPolynomial::from_terms(g.dim(), std::move(terms));
}

GridFunction signed_power(const GridFunction& g, double p_minus_one) {
  GridFunction out = GridFunction::zeros(g.grid_sizes());
  auto& o = out.samples();
  const auto& s = g.samples();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double v = s[i].real();
    const double a = std::abs(v);
    o[i] = a == 0.0 ? 0.0 : std::copysign(std::pow(a, p_minus_one), v);
  }
  return out;
}

}  // namespace sparsetrig
