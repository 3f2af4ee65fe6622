#pragma once

/// @file sr_prolong.hpp
/// @brief Windowed super-resolution prolongation.
///
/// One pass upsamples a normalised grid by 4: 6x6 windows taken with stride 2
/// are each run through the generator twice (6 -> 12 -> 24), the three output
/// channels are averaged, and each window contributes only its central 2x2
/// coarse cells (8x8 fine cells). The first and last window in each direction
/// also own the two coarse cells nearest their boundary, so every fine cell is
/// written by exactly one window. Windows do not wrap around the periodic
/// boundary.

#include <vector>

#include "mgsr/generator.hpp"
#include "mgsr/grid.hpp"
#include "mgsr/normalize.hpp"
#include "mgsr/transfer.hpp"

namespace mgsr {

inline constexpr int kWindowSide = 6;
inline constexpr int kWindowStride = 2;
inline constexpr int kPassUpscale = 4;

/// Window placement along one axis, in coarse indices.
struct WindowSpan {
    int start;      ///< first coarse index covered by the window
    int own_begin;  ///< first coarse index whose output this window writes
    int own_end;    ///< one past the last owned coarse index
};

/// Window spans for a coarse side n. Requires n even and n >= 6.
std::vector<WindowSpan> window_spans(int n);

/// One x4 pass on a normalised grid. If `write_counts` is non-null it must
/// hold (4n)^2 entries and is incremented once for every fine cell written.
Grid sr_upscale_pass(const Grid& q, const Generator& gen, std::vector<int>* write_counts = nullptr);

/// Prolongation by s in {4, 16}: normalise, log4(s) passes, denormalise using
/// sgn of the network output, then subtract the mean.
Grid sr_prolong(const Grid& coarse, TransferRatio s, const Generator& gen, const NormBounds& bounds);

} // namespace mgsr
