#pragma once

#include "pucp/field.hpp"

namespace pucp {

//! In-place 2D complex FFT on an n x n row-major array, n a power of two.
//! Unnormalized forward transform, inverse scales by 1/n^2. Backed by FFTW
//! with deterministic (FFTW_ESTIMATE) plans.
void fft2(std::vector<complex_t>& data, int n, bool inverse);

//! Signed integer frequency for bin index k of an n-point transform.
inline int freq_index(int k, int n) { return (k < n / 2) ? k : k - n; }

} // namespace pucp
