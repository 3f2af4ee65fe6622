#pragma once

/// @file generator.hpp
/// @brief Inference-only SRGAN-style x2 generator.
///
/// head: conv9x9 3->64, PReLU
/// B x residual block: conv3x3, BN, PReLU, conv3x3, BN, + skip
/// post: conv3x3, BN, + head skip
/// up: conv3x3 64->256, pixel shuffle x2, PReLU
/// tail: conv9x9 64->3 (+bias), tanh
///
/// Convolutions use replicate padding. BatchNorm runs in inference mode with
/// its running statistics and is folded into a per-channel affine at load.

#include <filesystem>
#include <vector>

#include "mgsr/weights.hpp"

namespace mgsr {

inline constexpr int kMinInputSide = 6;

/// Channel-major float image, data[(c*height + y)*width + x].
struct Tensor3 {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data;

    Tensor3() = default;
    Tensor3(int c, int h, int w);

    float& at(int c, int y, int x) noexcept {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    float at(int c, int y, int x) const noexcept {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
};

/// PyTorch PixelShuffle(2): out[c, 2y+i, 2x+j] = in[4c + 2i + j, y, x].
Tensor3 pixel_shuffle2(const Tensor3& in);

class Generator {
public:
    /// Validates the bundle and prepares folded layers.
    explicit Generator(const GeneratorWeights& w);

    /// (3, n, n) -> (3, 2n, 2n) with n >= 6. Throws std::invalid_argument on other shapes.
    Tensor3 forward(const Tensor3& x) const;

    int residual_blocks() const noexcept { return static_cast<int>(blocks_.size()); }

    struct Conv {
        int out = 0, in = 0, k = 0;
        std::vector<int> taps;      // nonzero columns of the in*k*k im2col layout
        std::vector<float> weight;  // out x taps.size(), row-major
        std::vector<float> bias;    // out
    };
    struct Affine {
        std::vector<float> scale, shift;
    };
    struct PRelu {
        std::vector<float> alpha;  // one per channel
    };

private:
    struct Block {
        Conv conv1;
        Affine bn1;
        PRelu act;
        Conv conv2;
        Affine bn2;
    };

    Conv head_;
    PRelu head_act_;
    std::vector<Block> blocks_;
    Conv post_;
    Affine post_bn_;
    Conv up_;
    PRelu up_act_;
    Conv tail_;
};

/// One-shot convenience: builds a Generator from `w` and runs it on `x`.
Tensor3 generator_forward(const GeneratorWeights& w, const Tensor3& x);

/// Headerless little-endian f32 dump in Tensor3 (C, H, W) order, the layout of
/// a contiguous PyTorch tensor. The file must hold exactly c*h*w values.
Tensor3 load_raw_f32(const std::filesystem::path& path, int channels, int height, int width);
void save_raw_f32(const std::filesystem::path& path, const Tensor3& t);

} // namespace mgsr
