#include "mgsr/transfer.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mgsr {

TransferRatio::TransferRatio(int s) : s_(s) {
    if (s != 2 && s != 4 && s != 8 && s != 16)
        throw std::invalid_argument("transfer ratio must be 2, 4, 8 or 16, got " + std::to_string(s));
}

TransferRatio TransferRatio::from_steps(int n_step) {
    if (n_step < 1 || n_step > 4) throw std::invalid_argument("N_step must be in 1..4, got " + std::to_string(n_step));
    return TransferRatio(1 << n_step);
}

int TransferRatio::steps() const noexcept { return std::countr_zero(static_cast<unsigned>(s_)); }

Grid restrict_injection(const Grid& fine, TransferRatio s, MeanHandling mean) {
    const int ratio = s.value();
    if (fine.n() % ratio != 0)
        throw std::invalid_argument("grid side " + std::to_string(fine.n()) + " not divisible by transfer ratio " +
                                    std::to_string(ratio));
    const int nc = fine.n() / ratio;
    Grid coarse(nc);
    for (int i = 0; i < nc; ++i)
        for (int j = 0; j < nc; ++j) coarse(i, j) = fine(ratio * i, ratio * j);
    if (mean == MeanHandling::subtract) subtract_mean(coarse);
    return coarse;
}

namespace detail {

double cubic_bspline(double t) noexcept {
    const double a = std::abs(t);
    if (a < 1.0) return 2.0 / 3.0 - a * a + 0.5 * a * a * a;
    if (a < 2.0) {
        const double b = 2.0 - a;
        return b * b * b / 6.0;
    }
    return 0.0;
}

std::vector<double> cyclic_spline_coefficients(const std::vector<double>& d) {
    const std::size_t n = d.size();
    constexpr double off = 1.0 / 6.0;
    constexpr double diag = 4.0 / 6.0;
    if (n == 0) return {};
    if (n == 1) return {d[0]};
    if (n == 2) {
        // Both neighbours of each node are the other node.
        const double a = diag, b = 2.0 * off, det = a * a - b * b;
        return {(a * d[0] - b * d[1]) / det, (a * d[1] - b * d[0]) / det};
    }

    // Sherman-Morrison on the cyclic tridiagonal system.
    auto thomas = [n](std::vector<double> bdiag, std::vector<double> rhs) {
        std::vector<double> cp(n), x(n);
        cp[0] = off / bdiag[0];
        rhs[0] /= bdiag[0];
        for (std::size_t i = 1; i < n; ++i) {
            const double m = bdiag[i] - off * cp[i - 1];
            cp[i] = off / m;
            rhs[i] = (rhs[i] - off * rhs[i - 1]) / m;
        }
        x[n - 1] = rhs[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) x[i] = rhs[i] - cp[i] * x[i + 1];
        return x;
    };

    const double gamma = -diag;
    std::vector<double> bb(n, diag);
    bb[0] = diag - gamma;
    bb[n - 1] = diag - off * off / gamma;

    std::vector<double> x = thomas(bb, d);
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = off;
    const std::vector<double> z = thomas(bb, u);

    const double fact = (x[0] + off * x[n - 1] / gamma) / (1.0 + z[0] + off * z[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
    return x;
}

} // namespace detail

Grid spline_prolong(const Grid& coarse, TransferRatio s) {
    const int nc = coarse.n();
    const int ratio = s.value();
    const int nf = nc * ratio;

    // Prefilter rows then columns to get the spline coefficient array.
    Grid coef = coarse;
    std::vector<double> line(static_cast<std::size_t>(nc));
    for (int i = 0; i < nc; ++i) {
        for (int j = 0; j < nc; ++j) line[static_cast<std::size_t>(j)] = coef(i, j);
        const auto c = detail::cyclic_spline_coefficients(line);
        for (int j = 0; j < nc; ++j) coef(i, j) = c[static_cast<std::size_t>(j)];
    }
    for (int j = 0; j < nc; ++j) {
        for (int i = 0; i < nc; ++i) line[static_cast<std::size_t>(i)] = coef(i, j);
        const auto c = detail::cyclic_spline_coefficients(line);
        for (int i = 0; i < nc; ++i) coef(i, j) = c[static_cast<std::size_t>(i)];
    }

    // weights[r][m] multiplies coefficient i0 + m - 1 at fine offset r/s.
    std::vector<std::array<double, 4>> weights(static_cast<std::size_t>(ratio));
    for (int r = 0; r < ratio; ++r) {
        const double t = static_cast<double>(r) / ratio;
        for (int m = 0; m < 4; ++m) weights[static_cast<std::size_t>(r)][static_cast<std::size_t>(m)] = detail::cubic_bspline(t - (m - 1));
    }

    // Interpolate along j: nc x nf intermediate.
    std::vector<double> tmp(static_cast<std::size_t>(nc) * nf);
    for (int i = 0; i < nc; ++i) {
        for (int jf = 0; jf < nf; ++jf) {
            const int j0 = jf / ratio;
            const auto& w = weights[static_cast<std::size_t>(jf % ratio)];
            double v = 0.0;
            for (int m = 0; m < 4; ++m) v += w[static_cast<std::size_t>(m)] * coef.wrapped(i, j0 + m - 1);
            tmp[static_cast<std::size_t>(i) * nf + jf] = v;
        }
    }

    Grid fine(nf);
    for (int ifine = 0; ifine < nf; ++ifine) {
        const int i0 = ifine / ratio;
        const auto& w = weights[static_cast<std::size_t>(ifine % ratio)];
        for (int jf = 0; jf < nf; ++jf) {
            double v = 0.0;
            for (int m = 0; m < 4; ++m) {
                const int ic = coarse.wrap(i0 + m - 1);
                v += w[static_cast<std::size_t>(m)] * tmp[static_cast<std::size_t>(ic) * nf + jf];
            }
            fine(ifine, jf) = v;
        }
    }
    return fine;
}

} // namespace mgsr
