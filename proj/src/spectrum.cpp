#include "mgsr/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "mgsr/fft.hpp"

namespace mgsr {

Spectrum power_spectrum(const Grid& p, bool peak_normalize) {
    const int n = p.n();
    if (n < 4) throw std::invalid_argument("power spectrum needs n >= 4");

    const auto hat = fft::forward(p);
    const int half = n / 2;
    const int kmax = static_cast<int>(std::lround(std::sqrt(2.0) * half));

    Spectrum s;
    s.k.resize(static_cast<std::size_t>(kmax) + 1);
    s.power.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
    for (int k = 0; k <= kmax; ++k) s.k[static_cast<std::size_t>(k)] = k;

    for (int a = 0; a < n; ++a) {
        const int kx = fft::signed_frequency(a, n);
        for (int b = 0; b < n; ++b) {
            const int ky = fft::signed_frequency(b, n);
            const auto bin = static_cast<std::size_t>(std::lround(std::hypot(kx, ky)));
            s.power[bin] += std::norm(hat(a, b));
        }
    }

    if (peak_normalize) {
        const double peak = *std::max_element(s.power.begin(), s.power.end());
        if (peak > 0.0)
            for (double& v : s.power) v /= peak;
    }
    return s;
}

} // namespace mgsr
