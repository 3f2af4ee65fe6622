#pragma once

/// @file weights.hpp
/// @brief Generator weight bundle and the MGSR1 weight file format.
///
/// MGSR1 layout (all integers little-endian):
///
///     "MGSR" | u32 version (=1) | u32 upscale_per_pass | u32 residual_blocks B | u32 tensor_count
///     tensor_count x { u32 name_len | name (UTF-8) | u8 dtype (0 = f32) | u8 ndim
///                      | ndim x u32 dims | prod(dims) x f32 values }
///
/// Convolution weights are [out_ch, in_ch, kh, kw]. Canonical tensor names,
/// with C = 64 feature channels:
///
///     head.conv.weight [C,3,9,9]     head.prelu.alpha [C] or [1]
///     res{i}.conv1.weight [C,C,3,3]  res{i}.bn1.{gamma,beta,mean,var} [C]
///     res{i}.prelu.alpha             res{i}.conv2.weight, res{i}.bn2.*
///     post.conv.weight [C,C,3,3]     post.bn.{gamma,beta,mean,var}
///     up.conv.weight [4C,C,3,3]      up.prelu.alpha [C] or [1]
///     tail.conv.weight [3,C,9,9]     tail.conv.bias [3]
///
/// Every convolution may also carry an optional `<layer>.bias` of length out_ch.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mgsr {

inline constexpr int kFeatureChannels = 64;
inline constexpr int kImageChannels = 3;
inline constexpr int kUpscalePerPass = 2;
inline constexpr float kBatchNormEpsilon = 1e-5f;

struct NamedTensor {
    std::string name;
    std::vector<std::uint32_t> dims;
    std::vector<float> values;

    std::size_t element_count() const noexcept;
};

class WeightFileError : public std::runtime_error {
public:
    enum class Kind {
        io,
        bad_magic,
        unsupported_version,
        truncated,
        bad_header,
        bad_dtype,
        bad_shape,
        missing_tensor,
        unknown_tensor,
        duplicate_tensor,
        bad_value,
        trailing_data,
    };

    WeightFileError(Kind kind, const std::string& what);
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

const char* to_string(WeightFileError::Kind kind) noexcept;

class GeneratorWeights {
public:
    GeneratorWeights() = default;
    GeneratorWeights(std::uint32_t residual_blocks, std::vector<NamedTensor> tensors,
                     std::uint32_t upscale_per_pass = kUpscalePerPass);

    std::uint32_t upscale_per_pass() const noexcept { return upscale_; }
    std::uint32_t residual_blocks() const noexcept { return blocks_; }
    const std::vector<NamedTensor>& tensors() const noexcept { return tensors_; }

    const NamedTensor* find(const std::string& name) const noexcept;

    /// Looks up a tensor that validate() guarantees to exist.
    const NamedTensor& at(const std::string& name) const;

    /// Checks names, shapes and values. Throws WeightFileError.
    void validate() const;

    /// Number of tensors a bundle without optional conv biases carries.
    static std::size_t required_tensor_count(std::uint32_t residual_blocks) noexcept;

private:
    std::uint32_t upscale_ = kUpscalePerPass;
    std::uint32_t blocks_ = 0;
    std::vector<NamedTensor> tensors_;
};

/// Parses and validates an MGSR1 stream.
GeneratorWeights read_weights(std::istream& is);
GeneratorWeights load_weights(const std::filesystem::path& path);

void write_weights(std::ostream& os, const GeneratorWeights& w);
void save_weights(const std::filesystem::path& path, const GeneratorWeights& w);

/// Weights for which one generator application is tanh(nearest-neighbour x2
/// upsample): identity head and tail taps, zeroed residual and post branches
/// (BN gamma = beta = 0), and an up-convolution whose four sub-pixel output
/// channels each copy the centre tap of their source channel.
GeneratorWeights make_nearest_neighbor_weights(std::uint32_t residual_blocks);

/// Randomly initialised weights (scaled normal taps, BN statistics near
/// identity). Deterministic for a given seed.
GeneratorWeights make_random_weights(std::uint32_t residual_blocks, std::uint64_t seed);

} // namespace mgsr
