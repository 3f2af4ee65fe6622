#pragma once

/// @file transfer.hpp
/// @brief Grid transfer: injection restriction and periodic cubic-spline prolongation.

#include <vector>

#include "mgsr/grid.hpp"

namespace mgsr {

/// Side-length ratio between a fine grid and the next coarser one, 2^N_step.
class TransferRatio {
public:
    /// Throws std::invalid_argument unless s is one of 2, 4, 8, 16.
    explicit TransferRatio(int s);

    static TransferRatio from_steps(int n_step);

    int value() const noexcept { return s_; }
    int steps() const noexcept;

    bool operator==(const TransferRatio&) const = default;

private:
    int s_;
};

enum class MeanHandling { keep, subtract };

/// coarse[i, j] = fine[s*i, s*j]. By default the result is mean-subtracted,
/// which is what coarse-grid right-hand sides need.
Grid restrict_injection(const Grid& fine, TransferRatio s, MeanHandling mean = MeanHandling::subtract);

/// Periodic interpolating cubic B-spline, applied separably: coefficients from
/// the cyclic system (c[i-1] + 4 c[i] + c[i+1]) / 6 = coarse[i], then the
/// cubic B-spline basis evaluated at offsets r/s. Coincident nodes reproduce
/// the coarse values: restrict(spline_prolong(c, s), s) == c to rounding.
Grid spline_prolong(const Grid& coarse, TransferRatio s);

namespace detail {

/// Solves the periodic system (x[i-1] + 4 x[i] + x[i+1]) / 6 = d[i].
std::vector<double> cyclic_spline_coefficients(const std::vector<double>& d);

/// Uniform cubic B-spline basis.
double cubic_bspline(double t) noexcept;

} // namespace detail

} // namespace mgsr
