#include <doctest.h>

#include <cmath>
#include <random>

#include "mgsr/fft.hpp"
#include "mgsr/spectrum.hpp"
#include "oracles.hpp"

using namespace mgsr;

TEST_CASE("forward transform matches a naive DFT") {
    std::mt19937 rng(5);
    std::normal_distribution<double> nd;
    Grid g(8);
    for (double& v : g.values()) v = nd(rng);
    const auto s = fft::forward(g);
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) CHECK(std::abs(s(a, b) - oracle::naive_dft(g, a, b)) < 1e-12);
    const Grid back = fft::inverse_real(s);
    CHECK(diff_norm(back, g) < 1e-15);
}

TEST_CASE("pure modes land in one bin") {
    const int n = 32;
    const auto x = node_coordinates(n);
    Grid p(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) p(i, j) = std::cos(2 * x[i]) + std::cos(2 * x[j]);
    const Spectrum s = power_spectrum(p);
    double peak = 0.0;
    for (double v : s.power) peak = std::max(peak, v);
    CHECK(s.power[2] == peak);
    for (std::size_t k = 0; k < s.k.size(); ++k) {
        CHECK(s.k[k] == static_cast<int>(k));
        if (k != 2) CHECK(s.power[k] < 1e-20 * peak);
    }
    const Spectrum norm = power_spectrum(p, true);
    CHECK(norm.power[2] == 1.0);
}

TEST_CASE("zero field has a zero spectrum") {
    const Spectrum s = power_spectrum(Grid(16), true);
    for (double v : s.power) CHECK(v == 0.0);
    CHECK_THROWS_AS(power_spectrum(Grid(2)), std::invalid_argument);
}

TEST_CASE("Parseval on white noise") {
    for (int n : {16, 24, 33}) {
        std::mt19937 rng(n);
        std::normal_distribution<double> nd;
        Grid g(n);
        for (double& v : g.values()) v = nd(rng);
        const Spectrum s = power_spectrum(g);
        double bins = 0.0, direct = 0.0;
        for (double v : s.power) bins += v;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) direct += std::norm(oracle::naive_dft(g, a, b));
        CHECK(std::abs(bins - direct) < 1e-10 * direct);
        double energy = 0.0;
        for (double v : g.values()) energy += v * v;
        CHECK(std::abs(bins - n * n * energy) < 1e-10 * bins);
    }
}
