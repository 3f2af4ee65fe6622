#include "mgsr/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "mgsr/binary_io.hpp"
#include "mgsr/fft.hpp"
#include "mgsr/transfer.hpp"

namespace mgsr {

namespace {

using fft::Complex;
using fft::signed_frequency;
using fft::Spectrum2d;

constexpr Complex kI{0.0, 1.0};

// Frequency used for derivatives; the Nyquist index carries no derivative.
double derivative_frequency(int k, int n) { return 2 * k == n ? 0.0 : signed_frequency(k, n); }

bool inside_two_thirds(int kx, int ky, int n) { return 3 * std::abs(kx) < n && 3 * std::abs(ky) < n; }

Spectrum2d derivative(const Spectrum2d& s, bool along_x) {
    Spectrum2d d = s;
    for (int a = 0; a < s.n; ++a)
        for (int b = 0; b < s.n; ++b) d(a, b) *= kI * derivative_frequency(along_x ? a : b, s.n);
    return d;
}

Grid multiply(const Grid& a, const Grid& b) {
    Grid out(a.n());
    auto o = out.values();
    const auto av = a.values(), bv = b.values();
    for (std::size_t k = 0; k < o.size(); ++k) o[k] = av[k] * bv[k];
    return out;
}

} // namespace

ModeField single_mode_field(int n, int k) {
    if (k < 1 || 2 * k >= n)
        throw std::invalid_argument("mode " + std::to_string(k) + " is aliased on a grid of side " + std::to_string(n));
    const auto x = node_coordinates(n);
    ModeField m{Grid(n), Grid(n)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            m.p(i, j) = std::cos(k * x[static_cast<std::size_t>(i)]) + std::cos(k * x[static_cast<std::size_t>(j)]);
            m.f(i, j) = -static_cast<double>(k * k) * m.p(i, j);
        }
    return m;
}

TurbulentSource turbulent_source(int n, int k_peak, std::uint64_t seed) {
    if (k_peak < 2 || 4 * k_peak > n)
        throw std::invalid_argument("k_peak must be in 2..n/4, got " + std::to_string(k_peak) + " for n = " +
                                    std::to_string(n));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Grid noise(n);
    for (double& v : noise.values()) v = normal(rng);

    Spectrum2d psi = fft::forward(noise);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const int kx = signed_frequency(a, n), ky = signed_frequency(b, n);
            const double k = std::hypot(kx, ky);
            Complex& c = psi(a, b);
            if (k == 0.0 || !inside_two_thirds(kx, ky, n) || std::abs(c) == 0.0) {
                c = 0.0;
                continue;
            }
            c = c / std::abs(c) * (k * std::exp(-(k / k_peak) * (k / k_peak)));
        }

    TurbulentSource out;
    out.flow.k_peak = k_peak;
    out.flow.seed = seed;
    Spectrum2d u_hat = derivative(psi, false);
    Spectrum2d v_hat = derivative(psi, true);
    for (auto& c : v_hat.data) c = -c;
    Grid u = fft::inverse_real(u_hat), v = fft::inverse_real(v_hat);
    const double speed = std::sqrt(rms(u) * rms(u) + rms(v) * rms(v));
    u *= 1.0 / speed;
    v *= 1.0 / speed;
    for (auto& c : u_hat.data) c /= speed;
    for (auto& c : v_hat.data) c /= speed;

    const Grid ux = fft::inverse_real(derivative(u_hat, true)), uy = fft::inverse_real(derivative(u_hat, false));
    const Grid vx = fft::inverse_real(derivative(v_hat, true)), vy = fft::inverse_real(derivative(v_hat, false));
    const Grid wx = multiply(u, ux) + multiply(v, uy);
    const Grid wy = multiply(u, vx) + multiply(v, vy);

    const Spectrum2d wx_hat = derivative(fft::forward(wx), true);
    const Spectrum2d wy_hat = derivative(fft::forward(wy), false);
    Spectrum2d f_hat = wx_hat;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const bool keep = inside_two_thirds(signed_frequency(a, n), signed_frequency(b, n), n);
            f_hat(a, b) = keep && (a || b) ? -(wx_hat(a, b) + wy_hat(a, b)) : Complex{};
        }
    out.f = fft::inverse_real(f_hat);
    subtract_mean(out.f);
    out.flow.u = std::move(u);
    out.flow.v = std::move(v);
    out.p_oracle = spectral_poisson_solve(out.f, PoissonSymbol::continuous);
    return out;
}

Grid spectral_poisson_solve(const Grid& f, PoissonSymbol symbol) {
    const int n = f.n();
    const double h = f.spacing();
    Spectrum2d s = fft::forward(f);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (a == 0 && b == 0) {
                s(a, b) = 0.0;
                continue;
            }
            double lambda = 0.0;
            if (symbol == PoissonSymbol::continuous) {
                const double kx = signed_frequency(a, n), ky = signed_frequency(b, n);
                lambda = -(kx * kx + ky * ky);
            } else {
                const double sx = std::sin(a * h / 2.0), sy = std::sin(b * h / 2.0);
                lambda = -4.0 / (h * h) * (sx * sx + sy * sy);
            }
            s(a, b) /= lambda;
        }
    Grid p = fft::inverse_real(s);
    subtract_mean(p);
    return p;
}

double spectral_divergence_rms(const Grid& u, const Grid& v) {
    require_same_size(u, v);
    const Spectrum2d dx = derivative(fft::forward(u), true);
    const Spectrum2d dy = derivative(fft::forward(v), false);
    Spectrum2d div = dx;
    for (std::size_t k = 0; k < div.data.size(); ++k) div.data[k] += dy.data[k];
    return rms(fft::inverse_real(div));
}

std::vector<WindowPair> extract_windows(const std::vector<Grid>& fields, int count, std::uint64_t seed,
                                        const NormBounds& bounds, const WindowOptions& options) {
    if (fields.empty()) throw std::invalid_argument("extract_windows needs at least one field");
    if (count < 0) throw std::invalid_argument("window count must be >= 0");
    for (const auto& f : fields)
        if (f.n() < kHighResWindow)
            throw std::invalid_argument("field side " + std::to_string(f.n()) + " is smaller than the 12x12 window");

    std::mt19937_64 rng(seed);
    std::vector<WindowPair> pairs;
    pairs.reserve(static_cast<std::size_t>(count));
    for (int s = 0; s < count; ++s) {
        const auto fid = std::uniform_int_distribution<std::size_t>(0, fields.size() - 1)(rng);
        Grid field = fields[fid];
        if (options.peak) {
            double peak = 0.0;
            for (double v : field.values()) peak = std::max(peak, std::abs(v));
            if (peak > 0.0) field *= *options.peak / peak;
        }

        int max_level = 0;
        while (field.n() % (2 << max_level) == 0 && field.n() / (2 << max_level) >= kHighResWindow) ++max_level;
        const int level = std::uniform_int_distribution<int>(0, max_level)(rng);
        const Grid ctx = level == 0 ? field : restrict_injection(field, TransferRatio(1 << level), MeanHandling::keep);

        auto pick = std::uniform_int_distribution<int>(0, ctx.n() - kHighResWindow);
        const int row = pick(rng), col = pick(rng);

        WindowPair w;
        w.field_id = static_cast<std::uint32_t>(fid);
        w.level = static_cast<std::uint32_t>(level);
        w.corner = static_cast<std::uint32_t>(row) << 16 | static_cast<std::uint32_t>(col);
        for (int i = 0; i < kHighResWindow; ++i)
            for (int j = 0; j < kHighResWindow; ++j)
                w.hr[static_cast<std::size_t>(i * kHighResWindow + j)] =
                    static_cast<float>(normalize_value(ctx(row + i, col + j), bounds));
        for (int i = 0; i < kLowResWindow; ++i)
            for (int j = 0; j < kLowResWindow; ++j)
                w.lr[static_cast<std::size_t>(i * kLowResWindow + j)] =
                    w.hr[static_cast<std::size_t>(2 * i * kHighResWindow + 2 * j)];
        pairs.push_back(w);
    }
    return pairs;
}

namespace {
constexpr std::string_view kWindowMagic = "MGWP";
}

void write_windows(std::ostream& os, const std::vector<WindowPair>& pairs) {
    io::write_magic(os, kWindowMagic);
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(pairs.size()));
    for (const auto& w : pairs) {
        for (float v : w.lr) io::write_le(os, v);
        for (float v : w.hr) io::write_le(os, v);
        io::write_le(os, w.field_id);
        io::write_le(os, w.level);
        io::write_le(os, w.corner);
    }
    if (!os) throw WindowFileError("failed writing window dataset");
}

std::vector<WindowPair> read_windows(std::istream& is) {
    try {
        if (!io::read_magic(is, kWindowMagic)) throw WindowFileError("bad magic, expected \"MGWP\"");
        const auto count = io::read_le<std::uint32_t>(is, "pair count");
        std::vector<WindowPair> pairs;
        pairs.reserve(std::min<std::uint32_t>(count, 1u << 20));
        for (std::uint32_t k = 0; k < count; ++k) {
            WindowPair w;
            for (float& v : w.lr) v = io::read_le<float>(is, "lr values");
            for (float& v : w.hr) v = io::read_le<float>(is, "hr values");
            w.field_id = io::read_le<std::uint32_t>(is, "field id");
            w.level = io::read_le<std::uint32_t>(is, "level");
            w.corner = io::read_le<std::uint32_t>(is, "corner");
            pairs.push_back(w);
        }
        return pairs;
    } catch (const io::Truncated& e) {
        throw WindowFileError(std::string("truncated window dataset: ") + e.what());
    }
}

void save_windows(const std::filesystem::path& path, const std::vector<WindowPair>& pairs) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw WindowFileError("cannot open " + path.string() + " for writing");
    write_windows(os, pairs);
}

std::vector<WindowPair> load_windows(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw WindowFileError("cannot open " + path.string());
    return read_windows(is);
}

} // namespace mgsr
