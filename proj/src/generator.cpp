#include "mgsr/generator.hpp"

#include "mgsr/binary_io.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace mgsr {

namespace {

using Conv = Generator::Conv;
using Affine = Generator::Affine;
using PRelu = Generator::PRelu;

Conv load_conv(const GeneratorWeights& w, const std::string& layer) {
    const NamedTensor& t = w.at(layer + ".weight");
    Conv c;
    c.out = static_cast<int>(t.dims[0]);
    c.in = static_cast<int>(t.dims[1]);
    c.k = static_cast<int>(t.dims[2]);
    // Drop (input channel, tap) columns that are zero for every output.
    const int cols = c.in * c.k * c.k;
    for (int r = 0; r < cols; ++r) {
        bool used = false;
        for (int o = 0; o < c.out && !used; ++o) used = t.values[static_cast<std::size_t>(o) * cols + r] != 0.0f;
        if (used) c.taps.push_back(r);
    }
    c.weight.reserve(static_cast<std::size_t>(c.out) * c.taps.size());
    for (int o = 0; o < c.out; ++o)
        for (int r : c.taps) c.weight.push_back(t.values[static_cast<std::size_t>(o) * cols + r]);
    if (const auto* b = w.find(layer + ".bias"))
        c.bias = b->values;
    else
        c.bias.assign(static_cast<std::size_t>(c.out), 0.0f);
    return c;
}

Affine load_bn(const GeneratorWeights& w, const std::string& layer) {
    const auto& gamma = w.at(layer + ".gamma").values;
    const auto& beta = w.at(layer + ".beta").values;
    const auto& mu = w.at(layer + ".mean").values;
    const auto& var = w.at(layer + ".var").values;
    Affine a;
    a.scale.resize(gamma.size());
    a.shift.resize(gamma.size());
    for (std::size_t c = 0; c < gamma.size(); ++c) {
        a.scale[c] = gamma[c] / std::sqrt(var[c] + kBatchNormEpsilon);
        a.shift[c] = beta[c] - mu[c] * a.scale[c];
    }
    return a;
}

PRelu load_prelu(const GeneratorWeights& w, const std::string& layer, int channels) {
    const auto& v = w.at(layer + ".alpha").values;
    PRelu p;
    p.alpha = v.size() == 1 ? std::vector<float>(static_cast<std::size_t>(channels), v[0]) : v;
    return p;
}

Tensor3 conv2d(const Conv& c, const Tensor3& x) {
    if (x.channels != c.in) throw std::invalid_argument("conv input channel mismatch");
    const int h = x.height, w = x.width, hw = h * w;
    Tensor3 out(c.out, h, w);
    using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<RowMat> y(out.data.data(), c.out, hw);

    if (!c.taps.empty()) {
        const int pad = c.k / 2;
        const int rows = static_cast<int>(c.taps.size());
        RowMat cols(rows, hw);
        for (int r = 0; r < rows; ++r) {
            const int tap = c.taps[static_cast<std::size_t>(r)];
            const int ci = tap / (c.k * c.k), ky = tap / c.k % c.k, kx = tap % c.k;
            float* dst = cols.data() + static_cast<std::size_t>(r) * hw;
            for (int yy = 0; yy < h; ++yy) {
                const int sy = std::clamp(yy + ky - pad, 0, h - 1);
                for (int xx = 0; xx < w; ++xx) {
                    const int sx = std::clamp(xx + kx - pad, 0, w - 1);
                    dst[yy * w + xx] = x.at(ci, sy, sx);
                }
            }
        }
        Eigen::Map<const RowMat> wm(c.weight.data(), c.out, rows);
        y.noalias() = wm * cols;
    } else {
        y.setZero();
    }
    for (int o = 0; o < c.out; ++o) y.row(o).array() += c.bias[static_cast<std::size_t>(o)];
    return out;
}

void affine_inplace(const Affine& a, Tensor3& x) {
    const std::size_t hw = static_cast<std::size_t>(x.height) * x.width;
    for (int c = 0; c < x.channels; ++c) {
        const float s = a.scale[static_cast<std::size_t>(c)], t = a.shift[static_cast<std::size_t>(c)];
        float* p = x.data.data() + c * hw;
        for (std::size_t k = 0; k < hw; ++k) p[k] = p[k] * s + t;
    }
}

void prelu_inplace(const PRelu& a, Tensor3& x) {
    const std::size_t hw = static_cast<std::size_t>(x.height) * x.width;
    for (int c = 0; c < x.channels; ++c) {
        const float al = a.alpha[static_cast<std::size_t>(c)];
        float* p = x.data.data() + c * hw;
        for (std::size_t k = 0; k < hw; ++k)
            if (p[k] < 0.0f) p[k] *= al;
    }
}

void add_inplace(Tensor3& x, const Tensor3& y) {
    for (std::size_t k = 0; k < x.data.size(); ++k) x.data[k] += y.data[k];
}

} // namespace

Tensor3::Tensor3(int c, int h, int w)
    : channels(c), height(h), width(w), data(static_cast<std::size_t>(c) * h * w, 0.0f) {}

Tensor3 pixel_shuffle2(const Tensor3& in) {
    if (in.channels % 4 != 0) throw std::invalid_argument("pixel shuffle needs a multiple of 4 channels");
    Tensor3 out(in.channels / 4, 2 * in.height, 2 * in.width);
    for (int c = 0; c < out.channels; ++c)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int y = 0; y < in.height; ++y)
                    for (int x = 0; x < in.width; ++x) out.at(c, 2 * y + i, 2 * x + j) = in.at(4 * c + 2 * i + j, y, x);
    return out;
}

Generator::Generator(const GeneratorWeights& w) {
    w.validate();
    head_ = load_conv(w, "head.conv");
    head_act_ = load_prelu(w, "head.prelu", kFeatureChannels);
    for (std::uint32_t i = 0; i < w.residual_blocks(); ++i) {
        const std::string r = "res" + std::to_string(i);
        blocks_.push_back({load_conv(w, r + ".conv1"), load_bn(w, r + ".bn1"),
                           load_prelu(w, r + ".prelu", kFeatureChannels), load_conv(w, r + ".conv2"),
                           load_bn(w, r + ".bn2")});
    }
    post_ = load_conv(w, "post.conv");
    post_bn_ = load_bn(w, "post.bn");
    up_ = load_conv(w, "up.conv");
    up_act_ = load_prelu(w, "up.prelu", kFeatureChannels);
    tail_ = load_conv(w, "tail.conv");
}

Tensor3 Generator::forward(const Tensor3& x) const {
    if (x.channels != kImageChannels || x.height != x.width || x.height < kMinInputSide)
        throw std::invalid_argument("generator input must be (3, n, n), got (" + std::to_string(x.channels) + ", " +
                                    std::to_string(x.height) + ", " + std::to_string(x.width) + ")");
    if (x.data.size() != static_cast<std::size_t>(x.channels) * x.height * x.width)
        throw std::invalid_argument("generator input data size does not match its shape");

    Tensor3 skip = conv2d(head_, x);
    prelu_inplace(head_act_, skip);

    Tensor3 y = skip;
    for (const Block& b : blocks_) {
        Tensor3 t = conv2d(b.conv1, y);
        affine_inplace(b.bn1, t);
        prelu_inplace(b.act, t);
        t = conv2d(b.conv2, t);
        affine_inplace(b.bn2, t);
        add_inplace(y, t);
    }
    Tensor3 t = conv2d(post_, y);
    affine_inplace(post_bn_, t);
    add_inplace(t, skip);

    Tensor3 u = pixel_shuffle2(conv2d(up_, t));
    prelu_inplace(up_act_, u);

    Tensor3 out = conv2d(tail_, u);
    for (float& v : out.data) v = std::tanh(v);
    return out;
}

Tensor3 generator_forward(const GeneratorWeights& w, const Tensor3& x) { return Generator(w).forward(x); }

Tensor3 load_raw_f32(const std::filesystem::path& path, int channels, int height, int width) {
    if (channels < 1 || height < 1 || width < 1) throw std::invalid_argument("raw tensor dimensions must be positive");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    Tensor3 t(channels, height, width);
    try {
        for (float& v : t.data) v = io::read_le<float>(in, "raw f32 tensor");
    } catch (const io::Truncated&) {
        throw std::runtime_error(path.string() + ": fewer than " + std::to_string(t.data.size()) + " f32 values");
    }
    if (in.peek() != std::char_traits<char>::eof())
        throw std::runtime_error(path.string() + ": more than " + std::to_string(t.data.size()) + " f32 values");
    return t;
}

void save_raw_f32(const std::filesystem::path& path, const Tensor3& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (float v : t.data) io::write_le(out, v);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

} // namespace mgsr
