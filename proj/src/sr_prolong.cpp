#include "mgsr/sr_prolong.hpp"

#include <stdexcept>
#include <string>

namespace mgsr {

std::vector<WindowSpan> window_spans(int n) {
    if (n < kWindowSide || n % kWindowStride != 0)
        throw std::invalid_argument("SR prolongation needs an even coarse side >= 6, got " + std::to_string(n));
    std::vector<WindowSpan> spans;
    for (int start = 0; start + kWindowSide <= n; start += kWindowStride) spans.push_back({start, start + 2, start + 4});
    spans.front().own_begin = 0;
    spans.back().own_end = n;
    return spans;
}

Grid sr_upscale_pass(const Grid& q, const Generator& gen, std::vector<int>* write_counts) {
    const int n = q.n();
    const int nf = kPassUpscale * n;
    const auto spans = window_spans(n);
    const int per_axis = static_cast<int>(spans.size());
    const int windows = per_axis * per_axis;
    if (write_counts && write_counts->size() != static_cast<std::size_t>(nf) * nf)
        throw std::invalid_argument("write counter size does not match the fine grid");

    // Window outputs are computed independently, then stitched in order.
    std::vector<Tensor3> outputs(static_cast<std::size_t>(windows));
#pragma omp parallel for schedule(dynamic)
    for (int w = 0; w < windows; ++w) {
        const WindowSpan& rs = spans[static_cast<std::size_t>(w / per_axis)];
        const WindowSpan& cs = spans[static_cast<std::size_t>(w % per_axis)];
        Tensor3 x(kImageChannels, kWindowSide, kWindowSide);
        for (int c = 0; c < kImageChannels; ++c)
            for (int i = 0; i < kWindowSide; ++i)
                for (int j = 0; j < kWindowSide; ++j) x.at(c, i, j) = static_cast<float>(q(rs.start + i, cs.start + j));
        outputs[static_cast<std::size_t>(w)] = gen.forward(gen.forward(x));
    }

    Grid fine(nf);
    for (int w = 0; w < windows; ++w) {
        const WindowSpan& rs = spans[static_cast<std::size_t>(w / per_axis)];
        const WindowSpan& cs = spans[static_cast<std::size_t>(w % per_axis)];
        const Tensor3& out = outputs[static_cast<std::size_t>(w)];
        for (int fi = kPassUpscale * rs.own_begin; fi < kPassUpscale * rs.own_end; ++fi) {
            const int li = fi - kPassUpscale * rs.start;
            for (int fj = kPassUpscale * cs.own_begin; fj < kPassUpscale * cs.own_end; ++fj) {
                const int lj = fj - kPassUpscale * cs.start;
                double v = 0.0;
                for (int c = 0; c < out.channels; ++c) v += out.at(c, li, lj);
                fine(fi, fj) = v / out.channels;
                if (write_counts) ++(*write_counts)[static_cast<std::size_t>(fi) * nf + fj];
            }
        }
    }
    return fine;
}

Grid sr_prolong(const Grid& coarse, TransferRatio s, const Generator& gen, const NormBounds& bounds) {
    int passes = 0;
    if (s.value() == 4)
        passes = 1;
    else if (s.value() == 16)
        passes = 2;
    else
        throw std::invalid_argument("SR prolongation supports ratios 4 and 16, got " + std::to_string(s.value()));

    Grid q = normalize(coarse, bounds).q;
    for (int p = 0; p < passes; ++p) q = sr_upscale_pass(q, gen);
    Grid fine = denormalize(q, bounds);
    subtract_mean(fine);
    return fine;
}

} // namespace mgsr
