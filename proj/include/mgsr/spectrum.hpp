#pragma once

/// @file spectrum.hpp
/// @brief Radially binned 2D power spectrum.
///
/// Power is |P(kx, ky)|^2 of the unnormalised forward DFT (see fft.hpp),
/// accumulated into the bin round(sqrt(kx^2 + ky^2)) with kx, ky the signed
/// integer frequencies. Bins run from 0 to round(sqrt(2) * n / 2) so that the
/// corner modes are kept and the unnormalised bin sum equals
/// sum |P|^2 = n^2 * sum p^2 exactly (Parseval).

#include <vector>

#include "mgsr/grid.hpp"

namespace mgsr {

struct Spectrum {
    std::vector<int> k;
    std::vector<double> power;
};

/// Requires n >= 4. With peak_normalize the bins are divided by the largest
/// one; an all-zero spectrum is returned unchanged.
Spectrum power_spectrum(const Grid& p, bool peak_normalize = false);

} // namespace mgsr
