#pragma once

/// @file normalize.hpp
/// @brief Sign-preserving logarithmic normalisation of field values onto [-1, 1].
///
/// Magnitudes are mapped linearly in log10 space from [p_min, p_max] onto
/// [0, 1] and the sign is reattached, so q = T'(|p|) * sgn(p). Magnitudes
/// outside the band clamp to 0 or 1. The sign grid is returned separately so
/// values with |p| <= p_min (which normalise to q = 0) can be restored to
/// +-p_min; only p == 0 carries sign 0 and maps back to 0.

#include "mgsr/grid.hpp"

namespace mgsr {

class NormBounds {
public:
    /// Defaults are the magnitude floor and ceiling used for pressure data.
    NormBounds() = default;

    /// Throws std::invalid_argument unless 0 < p_min < p_max.
    NormBounds(double p_min, double p_max);

    double p_min() const noexcept { return p_min_; }
    double p_max() const noexcept { return p_max_; }

private:
    double p_min_ = 1e-10;
    double p_max_ = 1e-3;
};

struct Normalized {
    Grid q;      ///< values in [-1, 1]
    Grid signs;  ///< -1, 0 or +1 per node
};

/// Scalar map: returns T'(|p|) * sgn(p).
double normalize_value(double p, const NormBounds& b) noexcept;

/// Scalar inverse: magnitude from |q|, sign from `sign`. sign == 0 gives 0.
double denormalize_value(double q, double sign, const NormBounds& b) noexcept;

Normalized normalize(const Grid& p, const NormBounds& b);

Grid denormalize(const Grid& q, const Grid& signs, const NormBounds& b);

/// Inverse using sgn(q) as the sign grid. Used on network output, where no
/// sign grid of matching resolution exists.
Grid denormalize(const Grid& q, const NormBounds& b);

} // namespace mgsr
