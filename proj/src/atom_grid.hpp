#pragma once

// Grid-side helpers for dictionary atoms: spectral lookups, separable
// evaluation and batched synthesis.

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "fft.hpp"
#include "sparsetrig/dictionary.hpp"
#include "sparsetrig/grid_function.hpp"

namespace sparsetrig::detail {

class AtomOnGrid {
 public:
  AtomOnGrid(const DictionaryAtom& atom, const std::vector<int>& sizes) : key_(atom.key), nc_(atom.norm_const) {
    for (auto& t : raw_atom_terms(atom.key)) {
      std::vector<int> neg = t.k;
      for (int& v : neg) v = -v;
      pos_.push_back(grid_index(t.k, sizes));
      neg_.push_back(grid_index(neg, sizes));
      w_.push_back(t.weight);
      freqs_.push_back(std::move(t.k));
    }
  }

  const AtomKey& key() const { return key_; }
  double norm_const() const { return nc_; }

  // mean(u phi) given spec[k] = mean(u e^{-i(k,x)}).
  double correlate(const std::vector<std::complex<double>>& spec) const {
    std::complex<double> acc = 0.0;
    for (std::size_t s = 0; s < w_.size(); ++s) acc += w_[s] * spec[neg_[s]];
    return acc.real() / nc_;
  }

  // g += scale * phi on the grid (separable product).
  void add_to(std::vector<double>& g, double scale, const std::vector<int>& sizes) const {
    const auto vals = samples(sizes);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += scale * vals[i];
  }

  // mean(r * raw atom).
  double raw_inner_samples(const std::vector<double>& r, const std::vector<int>& sizes) const {
    const auto vals = samples(sizes);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) acc += r[i] * vals[i];
    return acc * nc_ / static_cast<double>(r.size());
  }

  // Normalized atom samples.
  std::vector<double> samples(const std::vector<int>& sizes) const {
    std::vector<double> out{1.0 / nc_};
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      const int M = sizes[j];
      const int k = key_.freq[static_cast<int>(j)];
      const bool c = key_.cos_mask >> j & 1u;
      std::vector<double> line(static_cast<std::size_t>(M));
      for (int m = 0; m < M; ++m) {
        // reduce k m mod M before scaling for accuracy
        const long long km = (static_cast<long long>(k) * m) % M;
        const double arg = 2.0 * M_PI * static_cast<double>(km) / M;
        line[static_cast<std::size_t>(m)] = c ? std::cos(arg) : std::sin(arg);
      }
      std::vector<double> next(out.size() * line.size());
      for (std::size_t a = 0; a < out.size(); ++a)
        for (std::size_t b = 0; b < line.size(); ++b) next[a * line.size() + b] = out[a] * line[b];
      out.swap(next);
    }
    return out;
  }

  friend double pair_correlate(const AtomOnGrid& a, const AtomOnGrid& b, const std::vector<std::complex<double>>& spec,
                               const std::vector<int>& sizes) {
    std::complex<double> acc = 0.0;
    std::vector<int> k(sizes.size());
    for (std::size_t s = 0; s < a.w_.size(); ++s)
      for (std::size_t t = 0; t < b.w_.size(); ++t) {
        for (std::size_t j = 0; j < k.size(); ++j) k[j] = -(a.freqs_[s][j] + b.freqs_[t][j]);
        acc += a.w_[s] * b.w_[t] * spec[grid_index(k, sizes)];
      }
    return acc.real() / (a.nc_ * b.nc_);
  }

  friend std::vector<double> synthesize(const std::vector<AtomOnGrid>& atoms, std::span<const double> coeffs,
                                        const std::vector<int>& sizes) {
    std::size_t total = 1;
    for (int M : sizes) total *= static_cast<std::size_t>(M);
    std::vector<std::complex<double>> buf(total);
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      const double c = coeffs[j] / atoms[j].nc_;
      for (std::size_t s = 0; s < atoms[j].w_.size(); ++s) buf[atoms[j].pos_[s]] += atoms[j].w_[s] * c;
    }
    fft_inplace(buf, sizes, +1);
    std::vector<double> out(total);
    for (std::size_t i = 0; i < total; ++i) out[i] = buf[i].real();
    return out;
  }

 private:
  AtomKey key_;
  double nc_;
  std::vector<std::size_t> pos_, neg_;
  std::vector<std::complex<double>> w_;
  std::vector<std::vector<int>> freqs_;
};

double pair_correlate(const AtomOnGrid& a, const AtomOnGrid& b, const std::vector<std::complex<double>>& spec,
                      const std::vector<int>& sizes);
std::vector<double> synthesize(const std::vector<AtomOnGrid>& atoms, std::span<const double> coeffs,
                               const std::vector<int>& sizes);

// mean(t * raw atom), real part.
inline double raw_inner(const TrigPolynomial& t, const AtomKey& key) {
  std::complex<double> acc = 0.0;
  std::vector<int> neg(static_cast<std::size_t>(key.dim()));
  for (const auto& term : raw_atom_terms(key)) {
    for (std::size_t j = 0; j < neg.size(); ++j) neg[j] = -term.k[j];
    acc += term.weight * t.at(neg);
  }
  return acc.real();
}

// mean(raw^2) = 2^{-#nonzero k_j}.
inline double raw_self_inner(const AtomKey& key) {
  int active = 0;
  for (int j = 0; j < key.dim(); ++j) active += key.freq[j] != 0;
  return std::ldexp(1.0, -active);
}

}  // namespace sparsetrig::detail
