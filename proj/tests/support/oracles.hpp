#pragma once

// Brute-force reference implementations used by the tests. Deliberately
// naive and independent of the library code paths they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "mgsr/generator.hpp"
#include "mgsr/grid.hpp"
#include "mgsr/weights.hpp"

namespace oracle {

using mgsr::Grid;

inline std::complex<double> naive_dft(const Grid& g, int kx, int ky) {
    const int n = g.n();
    std::complex<double> acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double phase = -2.0 * std::numbers::pi * (static_cast<double>(kx) * i + static_cast<double>(ky) * j) / n;
            acc += g(i, j) * std::complex<double>(std::cos(phase), std::sin(phase));
        }
    return acc;
}

inline double naive_laplacian_at(const Grid& p, int i, int j) {
    const double h = 2.0 * std::numbers::pi / p.n();
    return (p.wrapped(i + 1, j) + p.wrapped(i - 1, j) + p.wrapped(i, j + 1) + p.wrapped(i, j - 1) - 4.0 * p(i, j)) / (h * h);
}

// Dense Gaussian elimination with partial pivoting, A row-major m x m.
inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
    const int m = static_cast<int>(b.size());
    for (int c = 0; c < m; ++c) {
        int piv = c;
        for (int r = c + 1; r < m; ++r)
            if (std::abs(a[r * m + c]) > std::abs(a[piv * m + c])) piv = r;
        for (int k = 0; k < m; ++k) std::swap(a[c * m + k], a[piv * m + k]);
        std::swap(b[c], b[piv]);
        for (int r = c + 1; r < m; ++r) {
            const double f = a[r * m + c] / a[c * m + c];
            for (int k = c; k < m; ++k) a[r * m + k] -= f * a[c * m + k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(m);
    for (int r = m - 1; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < m; ++k) s -= a[r * m + k] * x[k];
        x[r] = s / a[r * m + r];
    }
    return x;
}

// Zero-mean solution of the 5-point periodic Poisson problem. The singular
// operator is made regular by replacing the last equation with sum(p) = 0.
inline Grid dense_poisson_solve(const Grid& f) {
    const int n = f.n(), m = n * n;
    const double h2 = std::pow(2.0 * std::numbers::pi / n, 2);
    std::vector<double> a(static_cast<std::size_t>(m) * m, 0.0), b(m);
    auto idx = [n](int i, int j) { return ((i + n) % n) * n + (j + n) % n; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int r = idx(i, j);
            a[r * m + r] -= 4.0 / h2;
            a[r * m + idx(i + 1, j)] += 1.0 / h2;
            a[r * m + idx(i - 1, j)] += 1.0 / h2;
            a[r * m + idx(i, j + 1)] += 1.0 / h2;
            a[r * m + idx(i, j - 1)] += 1.0 / h2;
            b[r] = f(i, j);
        }
    for (int k = 0; k < m; ++k) a[(m - 1) * m + k] = 1.0;
    b[m - 1] = 0.0;
    return Grid(n, dense_solve(a, b));
}

inline Grid nearest_upsample(const Grid& g, int s) {
    Grid out(g.n() * s);
    for (int i = 0; i < out.n(); ++i)
        for (int j = 0; j < out.n(); ++j) out(i, j) = g(i / s, j / s);
    return out;
}

// ---- reference generator: double precision, direct convolution, unfolded BN ----

struct Image {
    int c = 0, n = 0;
    std::vector<double> v;
    Image(int c_, int n_) : c(c_), n(n_), v(static_cast<std::size_t>(c_) * n_ * n_, 0.0) {}
    double& at(int ch, int y, int x) { return v[(static_cast<std::size_t>(ch) * n + y) * n + x]; }
    double at(int ch, int y, int x) const { return v[(static_cast<std::size_t>(ch) * n + y) * n + x]; }
};

inline Image conv(const mgsr::GeneratorWeights& w, const std::string& layer, const Image& x) {
    const auto& t = w.at(layer + ".weight");
    const int co = static_cast<int>(t.dims[0]), ci = static_cast<int>(t.dims[1]), k = static_cast<int>(t.dims[2]);
    const auto* bias = w.find(layer + ".bias");
    Image y(co, x.n);
    for (int o = 0; o < co; ++o)
        for (int yy = 0; yy < x.n; ++yy)
            for (int xx = 0; xx < x.n; ++xx) {
                double acc = bias ? bias->values[o] : 0.0;
                for (int i = 0; i < ci; ++i)
                    for (int ky = 0; ky < k; ++ky)
                        for (int kx = 0; kx < k; ++kx) {
                            const int sy = std::clamp(yy + ky - k / 2, 0, x.n - 1);
                            const int sx = std::clamp(xx + kx - k / 2, 0, x.n - 1);
                            acc += static_cast<double>(t.values[((static_cast<std::size_t>(o) * ci + i) * k + ky) * k + kx]) *
                                   x.at(i, sy, sx);
                        }
                y.at(o, yy, xx) = acc;
            }
    return y;
}

inline void batch_norm(const mgsr::GeneratorWeights& w, const std::string& layer, Image& x) {
    const auto& g = w.at(layer + ".gamma").values;
    const auto& b = w.at(layer + ".beta").values;
    const auto& mu = w.at(layer + ".mean").values;
    const auto& var = w.at(layer + ".var").values;
    for (int c = 0; c < x.c; ++c)
        for (int k = 0; k < x.n * x.n; ++k) {
            double& v = x.v[static_cast<std::size_t>(c) * x.n * x.n + k];
            v = g[c] * (v - mu[c]) / std::sqrt(static_cast<double>(var[c]) + 1e-5) + b[c];
        }
}

inline void prelu(const mgsr::GeneratorWeights& w, const std::string& layer, Image& x) {
    const auto& a = w.at(layer + ".alpha").values;
    for (int c = 0; c < x.c; ++c)
        for (int k = 0; k < x.n * x.n; ++k) {
            double& v = x.v[static_cast<std::size_t>(c) * x.n * x.n + k];
            if (v < 0) v *= a.size() == 1 ? a[0] : a[c];
        }
}

inline Image reference_forward(const mgsr::GeneratorWeights& w, const Image& x) {
    Image head = conv(w, "head.conv", x);
    prelu(w, "head.prelu", head);
    Image y = head;
    for (std::uint32_t b = 0; b < w.residual_blocks(); ++b) {
        const std::string r = "res" + std::to_string(b);
        Image t = conv(w, r + ".conv1", y);
        batch_norm(w, r + ".bn1", t);
        prelu(w, r + ".prelu", t);
        t = conv(w, r + ".conv2", t);
        batch_norm(w, r + ".bn2", t);
        for (std::size_t k = 0; k < y.v.size(); ++k) y.v[k] += t.v[k];
    }
    Image t = conv(w, "post.conv", y);
    batch_norm(w, "post.bn", t);
    for (std::size_t k = 0; k < t.v.size(); ++k) t.v[k] += head.v[k];
    const Image u = conv(w, "up.conv", t);
    Image s(u.c / 4, 2 * u.n);
    for (int c = 0; c < s.c; ++c)
        for (int yy = 0; yy < s.n; ++yy)
            for (int xx = 0; xx < s.n; ++xx) s.at(c, yy, xx) = u.at(4 * c + 2 * (yy % 2) + xx % 2, yy / 2, xx / 2);
    prelu(w, "up.prelu", s);
    Image out = conv(w, "tail.conv", s);
    for (double& v : out.v) v = std::tanh(v);
    return out;
}

} // namespace oracle
