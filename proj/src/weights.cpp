#include "mgsr/weights.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "mgsr/binary_io.hpp"

namespace mgsr {

namespace {

constexpr std::string_view kMagic = "MGSR";
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMaxBlocks = 256;
constexpr std::uint32_t kMaxNameLength = 256;
constexpr std::uint8_t kMaxRank = 4;
constexpr std::uint8_t kDtypeF32 = 0;

using Kind = WeightFileError::Kind;
using Dims = std::vector<std::uint32_t>;

std::string dims_to_string(const Dims& d) {
    std::string s = "[";
    for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
    return s + "]";
}

struct Expected {
    Dims shape;
    bool optional = false;
    bool prelu = false;  // accepts [C] or [1]
    bool variance = false;
};

std::map<std::string, Expected> expected_tensors(std::uint32_t blocks) {
    constexpr std::uint32_t C = kFeatureChannels;
    constexpr std::uint32_t I = kImageChannels;
    std::map<std::string, Expected> m;
    auto conv = [&m](const std::string& layer, Dims shape) {
        const std::uint32_t out = shape[0];
        m[layer + ".weight"] = {std::move(shape)};
        m[layer + ".bias"] = {{out}, true};
    };
    auto bn = [&m](const std::string& layer) {
        for (const char* p : {"gamma", "beta", "mean"}) m[layer + "." + p] = {{C}};
        m[layer + ".var"] = {{C}, false, false, true};
    };
    auto prelu = [&m](const std::string& layer) { m[layer + ".alpha"] = {{C}, false, true}; };

    conv("head.conv", {C, I, 9, 9});
    prelu("head.prelu");
    for (std::uint32_t i = 0; i < blocks; ++i) {
        const std::string r = "res" + std::to_string(i);
        conv(r + ".conv1", {C, C, 3, 3});
        bn(r + ".bn1");
        prelu(r + ".prelu");
        conv(r + ".conv2", {C, C, 3, 3});
        bn(r + ".bn2");
    }
    conv("post.conv", {C, C, 3, 3});
    bn("post.bn");
    conv("up.conv", {4 * C, C, 3, 3});
    prelu("up.prelu");
    conv("tail.conv", {I, C, 9, 9});
    m["tail.conv.bias"].optional = false;
    return m;
}

} // namespace

std::size_t NamedTensor::element_count() const noexcept {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
}

WeightFileError::WeightFileError(Kind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

const char* to_string(WeightFileError::Kind kind) noexcept {
    switch (kind) {
        case Kind::io: return "io error";
        case Kind::bad_magic: return "bad magic";
        case Kind::unsupported_version: return "unsupported version";
        case Kind::truncated: return "truncated payload";
        case Kind::bad_header: return "bad header";
        case Kind::bad_dtype: return "unsupported dtype";
        case Kind::bad_shape: return "shape inconsistency";
        case Kind::missing_tensor: return "missing tensor";
        case Kind::unknown_tensor: return "unknown tensor";
        case Kind::duplicate_tensor: return "duplicate tensor";
        case Kind::bad_value: return "bad value";
        case Kind::trailing_data: return "trailing data";
    }
    return "unknown";
}

GeneratorWeights::GeneratorWeights(std::uint32_t residual_blocks, std::vector<NamedTensor> tensors,
                                   std::uint32_t upscale_per_pass)
    : upscale_(upscale_per_pass), blocks_(residual_blocks), tensors_(std::move(tensors)) {}

const NamedTensor* GeneratorWeights::find(const std::string& name) const noexcept {
    for (const auto& t : tensors_)
        if (t.name == name) return &t;
    return nullptr;
}

const NamedTensor& GeneratorWeights::at(const std::string& name) const {
    if (const auto* t = find(name)) return *t;
    throw WeightFileError(Kind::missing_tensor, name);
}

std::size_t GeneratorWeights::required_tensor_count(std::uint32_t residual_blocks) noexcept {
    // head: weight + alpha; block: 2 weights + 8 BN + alpha; post: weight + 4 BN;
    // up: weight + alpha; tail: weight + bias.
    return 2 + 11 * static_cast<std::size_t>(residual_blocks) + 5 + 2 + 2;
}

void GeneratorWeights::validate() const {
    if (upscale_ != kUpscalePerPass)
        throw WeightFileError(Kind::bad_header, "upscale_per_pass must be 2, got " + std::to_string(upscale_));
    if (blocks_ > kMaxBlocks) throw WeightFileError(Kind::bad_header, "too many residual blocks");

    const auto expected = expected_tensors(blocks_);
    std::set<std::string> seen;
    for (const auto& t : tensors_) {
        if (!seen.insert(t.name).second) throw WeightFileError(Kind::duplicate_tensor, t.name);
        const auto it = expected.find(t.name);
        if (it == expected.end()) throw WeightFileError(Kind::unknown_tensor, t.name);
        const Expected& e = it->second;
        const bool shape_ok = t.dims == e.shape || (e.prelu && t.dims == Dims{1});
        if (!shape_ok)
            throw WeightFileError(Kind::bad_shape, t.name + " has shape " + dims_to_string(t.dims) + ", expected " +
                                                       dims_to_string(e.shape));
        if (t.values.size() != t.element_count())
            throw WeightFileError(Kind::bad_shape, t.name + " value count does not match its shape");
        for (float v : t.values)
            if (!std::isfinite(v)) throw WeightFileError(Kind::bad_value, t.name + " contains non-finite values");
        if (e.variance)
            for (float v : t.values)
                if (!(v > 0.0f)) throw WeightFileError(Kind::bad_value, t.name + " must be strictly positive");
    }
    for (const auto& [name, e] : expected)
        if (!e.optional && !seen.contains(name)) throw WeightFileError(Kind::missing_tensor, name);
}

GeneratorWeights read_weights(std::istream& is) {
    try {
        if (!io::read_magic(is, kMagic)) throw WeightFileError(Kind::bad_magic, "expected \"MGSR\"");
        const auto version = io::read_le<std::uint32_t>(is, "version");
        if (version != kVersion)
            throw WeightFileError(Kind::unsupported_version, "file version " + std::to_string(version) + ", reader supports 1");
        const auto upscale = io::read_le<std::uint32_t>(is, "upscale_per_pass");
        const auto blocks = io::read_le<std::uint32_t>(is, "residual block count");
        const auto count = io::read_le<std::uint32_t>(is, "tensor count");
        if (blocks > kMaxBlocks) throw WeightFileError(Kind::bad_header, "residual block count " + std::to_string(blocks));
        if (count > 2 * GeneratorWeights::required_tensor_count(blocks) + 16)
            throw WeightFileError(Kind::bad_header, "tensor count " + std::to_string(count));

        std::vector<NamedTensor> tensors;
        tensors.reserve(count);
        for (std::uint32_t t = 0; t < count; ++t) {
            NamedTensor nt;
            const auto len = io::read_le<std::uint32_t>(is, "name length");
            if (len == 0 || len > kMaxNameLength) throw WeightFileError(Kind::bad_header, "tensor name length " + std::to_string(len));
            nt.name.resize(len);
            if (!is.read(nt.name.data(), len)) throw io::Truncated("tensor name");
            const auto dtype = io::read_le<std::uint8_t>(is, "dtype");
            if (dtype != kDtypeF32) throw WeightFileError(Kind::bad_dtype, nt.name + " has dtype " + std::to_string(dtype));
            const auto ndim = io::read_le<std::uint8_t>(is, "ndim");
            if (ndim == 0 || ndim > kMaxRank) throw WeightFileError(Kind::bad_shape, nt.name + " has rank " + std::to_string(ndim));
            nt.dims.resize(ndim);
            for (auto& d : nt.dims) d = io::read_le<std::uint32_t>(is, "dims");
            std::size_t elements = 1;
            for (auto d : nt.dims) {
                if (d == 0 || d > (1u << 20)) throw WeightFileError(Kind::bad_shape, nt.name + " has dimension " + std::to_string(d));
                elements *= d;
            }
            if (elements > (std::size_t{1} << 26)) throw WeightFileError(Kind::bad_shape, nt.name + " is too large");
            nt.values.resize(elements);
            for (auto& v : nt.values) v = io::read_le<float>(is, "tensor values");
            tensors.push_back(std::move(nt));
        }
        if (is.peek() != std::char_traits<char>::eof()) throw WeightFileError(Kind::trailing_data, "bytes after last tensor");

        GeneratorWeights w(blocks, std::move(tensors), upscale);
        w.validate();
        return w;
    } catch (const io::Truncated& e) {
        throw WeightFileError(Kind::truncated, e.what());
    }
}

GeneratorWeights load_weights(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw WeightFileError(Kind::io, "cannot open " + path.string());
    return read_weights(is);
}

void write_weights(std::ostream& os, const GeneratorWeights& w) {
    io::write_magic(os, kMagic);
    io::write_le<std::uint32_t>(os, kVersion);
    io::write_le<std::uint32_t>(os, w.upscale_per_pass());
    io::write_le<std::uint32_t>(os, w.residual_blocks());
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(w.tensors().size()));
    for (const auto& t : w.tensors()) {
        io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(t.name.size()));
        os.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
        io::write_le<std::uint8_t>(os, kDtypeF32);
        io::write_le<std::uint8_t>(os, static_cast<std::uint8_t>(t.dims.size()));
        for (auto d : t.dims) io::write_le<std::uint32_t>(os, d);
        for (float v : t.values) io::write_le<float>(os, v);
    }
    if (!os) throw WeightFileError(Kind::io, "failed writing weights");
}

void save_weights(const std::filesystem::path& path, const GeneratorWeights& w) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw WeightFileError(Kind::io, "cannot open " + path.string() + " for writing");
    write_weights(os, w);
}

namespace {

// Builds every required tensor, filling values via `fill(name, dims)`.
GeneratorWeights build_weights(std::uint32_t blocks,
                               const std::function<std::vector<float>(const std::string&, const Dims&)>& fill) {
    std::vector<NamedTensor> tensors;
    for (const auto& [name, e] : expected_tensors(blocks)) {
        if (e.optional) continue;
        NamedTensor t{name, e.shape, {}};
        t.values = fill(name, t.dims);
        tensors.push_back(std::move(t));
    }
    GeneratorWeights w(blocks, std::move(tensors));
    w.validate();
    return w;
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Index into a [out, in, kh, kw] tensor.
std::size_t conv_index(const Dims& d, std::uint32_t o, std::uint32_t i, std::uint32_t y, std::uint32_t x) {
    return ((static_cast<std::size_t>(o) * d[1] + i) * d[2] + y) * d[3] + x;
}

} // namespace

GeneratorWeights make_nearest_neighbor_weights(std::uint32_t residual_blocks) {
    return build_weights(residual_blocks, [](const std::string& name, const Dims& d) {
        std::vector<float> v(std::accumulate(d.begin(), d.end(), std::size_t{1}, std::multiplies<>()), 0.0f);
        if (name == "head.conv.weight" || name == "tail.conv.weight") {
            for (std::uint32_t c = 0; c < kImageChannels; ++c) v[conv_index(d, c, c, d[2] / 2, d[3] / 2)] = 1.0f;
        } else if (name == "up.conv.weight") {
            // Output channel 4c + k feeds sub-pixel k of channel c after the shuffle.
            for (std::uint32_t c = 0; c < kFeatureChannels; ++c)
                for (std::uint32_t k = 0; k < 4; ++k) v[conv_index(d, 4 * c + k, c, 1, 1)] = 1.0f;
        } else if (ends_with(name, ".alpha") || ends_with(name, ".var")) {
            std::fill(v.begin(), v.end(), 1.0f);
        }
        // Residual/post convolutions and all other BN parameters stay zero, so
        // those branches contribute exactly zero and only the skips remain.
        return v;
    });
}

GeneratorWeights make_random_weights(std::uint32_t residual_blocks, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return build_weights(residual_blocks, [&rng](const std::string& name, const Dims& d) {
        const std::size_t count = std::accumulate(d.begin(), d.end(), std::size_t{1}, std::multiplies<>());
        std::vector<float> v(count);
        if (ends_with(name, ".weight")) {
            const double fan_in = static_cast<double>(d[1]) * d[2] * d[3];
            std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(fan_in));
            for (auto& x : v) x = static_cast<float>(dist(rng));
        } else if (ends_with(name, ".gamma")) {
            std::uniform_real_distribution<double> dist(0.8, 1.2);
            for (auto& x : v) x = static_cast<float>(dist(rng));
        } else if (ends_with(name, ".var")) {
            std::uniform_real_distribution<double> dist(0.5, 1.5);
            for (auto& x : v) x = static_cast<float>(dist(rng));
        } else if (ends_with(name, ".alpha")) {
            std::fill(v.begin(), v.end(), 0.25f);
        } else {
            std::normal_distribution<double> dist(0.0, 0.05);
            for (auto& x : v) x = static_cast<float>(dist(rng));
        }
        return v;
    });
}

} // namespace mgsr
