#pragma once

#include <complex>
#include <vector>

namespace sparsetrig::detail {

// In-place multidimensional DFT over a row-major array.
// sign = -1: forward, sum x_m e^{-2 pi i k m / M}; sign = +1: backward. Unnormalized.
void fft_inplace(std::vector<std::complex<double>>& data, const std::vector<int>& dims, int sign);

}  // namespace sparsetrig::detail
