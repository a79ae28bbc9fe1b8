#pragma once

#include <complex>
#include <vector>

namespace flatlab {

/// In-place discrete Fourier transform, X_k = sum_j x_j exp(-2 pi i jk/N).
/// The inverse carries the 1/N factor. Radix-2 for power-of-two lengths,
/// direct summation otherwise.
void fft(std::vector<std::complex<double>>& a, bool inverse = false);

}  // namespace flatlab
