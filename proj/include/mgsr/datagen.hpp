#pragma once

/// @file datagen.hpp
/// @brief Synthetic Poisson problems, spectral reference solutions and
/// training-window extraction.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mgsr/grid.hpp"
#include "mgsr/normalize.hpp"

namespace mgsr {

struct ModeField {
    Grid p;  ///< cos(kx) + cos(ky)
    Grid f;  ///< continuous Laplacian, -k^2 p
};

/// Requires 1 <= k < n/2; throws std::invalid_argument for aliased modes.
ModeField single_mode_field(int n, int k);

struct FlowField {
    Grid u;
    Grid v;
    int k_peak = 0;
    std::uint64_t seed = 0;
};

struct TurbulentSource {
    Grid f;         ///< -div((u . grad) u), dealiased
    FlowField flow; ///< divergence-free velocity, unit RMS speed
    Grid p_oracle;  ///< spectral solution with the continuous symbol
};

/// Streamfunction with |psi_hat(k)| proportional to k exp(-(k/k_peak)^2) and
/// random phases (taken from the transform of seeded white noise, so the
/// field is real), restricted to |kx|, |ky| < n/3. u = d psi/dy, v = -d psi/dx.
/// Requires 2 <= k_peak <= n/4.
TurbulentSource turbulent_source(int n, int k_peak, std::uint64_t seed);

enum class PoissonSymbol {
    continuous,  ///< -|k|^2
    discrete,    ///< -(4/h^2) (sin^2(kx h/2) + sin^2(ky h/2)), the 5-point stencil
};

/// Zero-mean solution of lap(p) = f by division in Fourier space.
Grid spectral_poisson_solve(const Grid& f, PoissonSymbol symbol);

/// RMS of the spectral divergence i kx u_hat + i ky v_hat, back in real space.
double spectral_divergence_rms(const Grid& u, const Grid& v);

inline constexpr int kLowResWindow = 6;
inline constexpr int kHighResWindow = 12;

struct WindowPair {
    std::array<float, kLowResWindow * kLowResWindow> lr{};
    std::array<float, kHighResWindow * kHighResWindow> hr{};
    std::uint32_t field_id = 0;
    std::uint32_t level = 0;   ///< restriction power l
    std::uint32_t corner = 0;  ///< (row << 16) | col of the HR window in the restricted field

    int corner_row() const noexcept { return static_cast<int>(corner >> 16); }
    int corner_col() const noexcept { return static_cast<int>(corner & 0xffffu); }
};

struct WindowOptions {
    /// If set, each field is scaled so max |p| equals this before extraction.
    std::optional<double> peak;
};

/// Samples `count` pairs: random field, random l with side / 2^l >= 12 (and
/// 2^l dividing side), injection by 2^l, random 12x12 window as HR and its
/// stride-2 nodes as LR, both normalised with `bounds`.
std::vector<WindowPair> extract_windows(const std::vector<Grid>& fields, int count, std::uint64_t seed,
                                        const NormBounds& bounds, const WindowOptions& options = {});

class WindowFileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// "MGWP" | u32 count | count x { 36 f32 lr | 144 f32 hr | u32 field_id | u32 l | u32 corner }
void write_windows(std::ostream& os, const std::vector<WindowPair>& pairs);
std::vector<WindowPair> read_windows(std::istream& is);
void save_windows(const std::filesystem::path& path, const std::vector<WindowPair>& pairs);
std::vector<WindowPair> load_windows(const std::filesystem::path& path);

} // namespace mgsr
