#pragma once

/// @file fft.hpp
/// @brief Thin FFTW wrapper for square complex 2D transforms.
///
/// Forward transform is unnormalised: P(kx, ky) = sum_ij p(i, j) exp(-2 pi i (kx i + ky j) / n).
/// The inverse divides by n^2 so inverse(forward(p)) == p.
/// Plans are created once per (n, direction) under a mutex; execution is
/// thread-safe.

#include <complex>
#include <vector>

#include "mgsr/grid.hpp"

namespace mgsr::fft {

using Complex = std::complex<double>;

/// Row-major n x n complex array.
struct Spectrum2d {
    int n = 0;
    std::vector<Complex> data;

    Complex& operator()(int kx, int ky) { return data[static_cast<std::size_t>(kx) * n + ky]; }
    const Complex& operator()(int kx, int ky) const { return data[static_cast<std::size_t>(kx) * n + ky]; }
};

Spectrum2d forward(const Grid& g);

/// Inverse transform, keeping the real part.
Grid inverse_real(const Spectrum2d& s);

/// Signed integer frequency of index k on an n-point axis: k for k < n/2, k - n otherwise.
inline int signed_frequency(int k, int n) noexcept { return 2 * k < n ? k : k - n; }

} // namespace mgsr::fft
