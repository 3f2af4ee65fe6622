#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "mgsr/generator.hpp"
#include "oracles.hpp"

using namespace mgsr;

namespace {

Tensor3 random_input(int n, unsigned seed, bool identical_channels = false) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    Tensor3 x(3, n, n);
    for (auto& v : x.data) v = u(rng);
    if (identical_channels)
        for (int c = 1; c < 3; ++c)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) x.at(c, i, j) = x.at(0, i, j);
    return x;
}

} // namespace

TEST_CASE("pixel shuffle channel order") {
    Tensor3 in(4, 1, 2);
    for (int c = 0; c < 4; ++c)
        for (int x = 0; x < 2; ++x) in.at(c, 0, x) = static_cast<float>(10 * c + x);
    const Tensor3 out = pixel_shuffle2(in);
    CHECK(out.channels == 1);
    CHECK(out.height == 2);
    CHECK(out.width == 4);
    // Row 0 interleaves channels 0 and 1, row 1 channels 2 and 3.
    CHECK(out.at(0, 0, 0) == 0.0f);
    CHECK(out.at(0, 0, 1) == 10.0f);
    CHECK(out.at(0, 0, 2) == 1.0f);
    CHECK(out.at(0, 0, 3) == 11.0f);
    CHECK(out.at(0, 1, 0) == 20.0f);
    CHECK(out.at(0, 1, 1) == 30.0f);
    CHECK(out.at(0, 1, 3) == 31.0f);
}

TEST_CASE("forward pass matches the double-precision reference") {
    for (std::uint32_t blocks : {0u, 2u}) {
        const GeneratorWeights w = make_random_weights(blocks, 100 + blocks);
        const Generator g(w);
        CHECK(g.residual_blocks() == static_cast<int>(blocks));
        const Tensor3 x = random_input(6, blocks);
        const Tensor3 y = g.forward(x);
        REQUIRE(y.channels == 3);
        REQUIRE(y.height == 12);

        oracle::Image xi(3, 6);
        for (std::size_t k = 0; k < x.data.size(); ++k) xi.v[k] = x.data[k];
        const oracle::Image ref = oracle::reference_forward(w, xi);
        double max_err = 0.0;
        for (std::size_t k = 0; k < y.data.size(); ++k) max_err = std::max(max_err, std::abs(y.data[k] - ref.v[k]));
        CHECK(max_err < 1e-4);
    }
}

TEST_CASE("optional conv biases are applied") {
    const GeneratorWeights base = make_random_weights(1, 7);
    std::vector<NamedTensor> ts = base.tensors();
    ts.push_back({"up.conv.bias", {256}, std::vector<float>(256, 0.3f)});
    ts.push_back({"res0.conv2.bias", {64}, std::vector<float>(64, -0.2f)});
    const GeneratorWeights w(1, ts);
    const Tensor3 x = random_input(6, 8);
    const Tensor3 y = Generator(w).forward(x);
    oracle::Image xi(3, 6);
    for (std::size_t k = 0; k < x.data.size(); ++k) xi.v[k] = x.data[k];
    const oracle::Image ref = oracle::reference_forward(w, xi);
    double max_err = 0.0, max_change = 0.0;
    const Tensor3 y0 = Generator(base).forward(x);
    for (std::size_t k = 0; k < y.data.size(); ++k) {
        max_err = std::max(max_err, std::abs(y.data[k] - ref.v[k]));
        max_change = std::max(max_change, static_cast<double>(std::abs(y.data[k] - y0.data[k])));
    }
    CHECK(max_err < 1e-4);
    CHECK(max_change > 1e-3);
}

TEST_CASE("output codomain and determinism") {
    const Generator g(make_random_weights(1, 9));
    Tensor3 x = random_input(8, 10);
    for (auto& v : x.data) v *= 50.0f;
    const Tensor3 a = g.forward(x), b = g.forward(x);
    CHECK(a.data == b.data);
    for (float v : a.data) {
        CHECK(v >= -1.0f);
        CHECK(v <= 1.0f);
    }
}

TEST_CASE("crafted nearest-neighbour weights give tanh of an NN upsample") {
    const Generator g(make_nearest_neighbor_weights(3));
    const Tensor3 x = random_input(6, 11);
    const Tensor3 y = g.forward(x);
    double max_err = 0.0;
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j)
                max_err = std::max(max_err, std::abs(static_cast<double>(y.at(c, i, j)) - std::tanh(x.at(c, i / 2, j / 2))));
    CHECK(max_err < 1e-6);
}

TEST_CASE("input shape checks") {
    const Generator g(make_nearest_neighbor_weights(0));
    CHECK_THROWS_AS(g.forward(Tensor3(1, 6, 6)), std::invalid_argument);
    CHECK_THROWS_AS(g.forward(Tensor3(3, 6, 8)), std::invalid_argument);
    CHECK_THROWS_AS(g.forward(Tensor3(3, 4, 4)), std::invalid_argument);
    CHECK_NOTHROW(generator_forward(make_nearest_neighbor_weights(0), Tensor3(3, 6, 6)));
}

TEST_CASE("raw f32 dumps round-trip and reject wrong sizes") {
    const auto path = std::filesystem::temp_directory_path() / "mgsr_raw_f32_test.f32";
    const Tensor3 x = random_input(7, 4);
    save_raw_f32(path, x);
    CHECK(std::filesystem::file_size(path) == x.data.size() * 4);
    CHECK(load_raw_f32(path, 3, 7, 7).data == x.data);
    CHECK_THROWS(load_raw_f32(path, 3, 7, 8));
    CHECK_THROWS(load_raw_f32(path, 3, 6, 7));
    CHECK_THROWS(load_raw_f32(path, 0, 7, 7));
    std::filesystem::remove(path);
    CHECK_THROWS(load_raw_f32(path, 3, 7, 7));
}
