#pragma once

#include <complex>
#include <span>
#include <vector>

#include "sparsetrig/trig_polynomial.hpp"

namespace sparsetrig {

// Complex samples on the uniform tensor grid x_j = 2 pi m_j / M_j.
// Row-major, last coordinate fastest. Every M_j is a power of two.
class GridFunction {
 public:
  GridFunction(std::vector<int> grid_sizes, std::vector<Complex> samples);
  static GridFunction zeros(std::vector<int> grid_sizes);

  int dim() const { return static_cast<int>(sizes_.size()); }
  const std::vector<int>& grid_sizes() const { return sizes_; }
  std::size_t total() const { return samples_.size(); }
  const std::vector<Complex>& samples() const { return samples_; }
  std::vector<Complex>& samples() { return samples_; }
  Complex operator[](std::size_t i) const { return samples_[i]; }

  // Node coordinates of flat index i.
  std::vector<double> node(std::size_t i) const;

 private:
  std::vector<int> sizes_;
  std::vector<Complex> samples_;
};

enum class Sampling { Unaliased, AllowAliasing };

// Discrete Fourier coefficients of a grid function, normalized so that
// at(k) = mean_m g(x_m) e^{-i(k, x_m)}; indices wrap modulo the grid.
class Spectrum {
 public:
  Spectrum(std::vector<int> grid_sizes, std::vector<Complex> data)
      : sizes_(std::move(grid_sizes)), data_(std::move(data)) {}

  const std::vector<int>& grid_sizes() const { return sizes_; }
  Complex at(std::span<const int> k) const;
  // True when every |k_j| < M_j / 2, i.e. k has a unique residue on the grid.
  bool representable(std::span<const int> k) const;
  const std::vector<Complex>& data() const { return data_; }

 private:
  std::vector<int> sizes_;
  std::vector<Complex> data_;
};

// Row-major position of frequency k on the grid, wrapped modulo M_j.
std::size_t grid_index(std::span<const int> k, const std::vector<int>& grid_sizes);

// Next power of two >= n (n >= 1).
int next_pow2(int n);

// Grid sizes M_j = next_pow2(oversampling * (2 max|k_j| + 1)).
std::vector<int> quadrature_grid(std::span<const int> max_abs, int oversampling = 4);

// samples(m) = sum_k c_k e^{i(k, x_m)} via one inverse FFT.
// Throws AliasingError unless every 2|k_j| < M_j or aliasing is requested.
GridFunction sample(const TrigPolynomial& t, const std::vector<int>& grid_sizes,
                    Sampling mode = Sampling::Unaliased);

// Forward FFT normalized by the number of nodes.
Spectrum spectrum(const GridFunction& g);

// Coefficients on `support`, recovered by forward FFT.
TrigPolynomial analyze(const GridFunction& g, const IndexSet& support);

// Pointwise sign(g)|g|^e on the real part of g (e = p - 1 for norming kernels).
GridFunction signed_power(const GridFunction& g, double p_minus_one);

}  // namespace sparsetrig
