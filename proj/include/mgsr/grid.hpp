#pragma once

/// @file grid.hpp
/// @brief Square periodic node-centred scalar field on [0, 2pi)^2.
///
/// A Grid holds n*n doubles in row-major order; row index i runs along x,
/// column index j along y. Node (i, j) sits at (i*h, j*h) with h = 2pi/n and
/// neighbours wrap periodically in both directions.

#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace mgsr {

class Grid {
public:
    Grid() = default;

    /// Zero-filled n x n grid. Throws std::invalid_argument for n < 2.
    explicit Grid(int n);

    /// Takes ownership of row-major values; values.size() must equal n*n.
    Grid(int n, std::vector<double> values);

    int n() const noexcept { return n_; }
    std::size_t size() const noexcept { return data_.size(); }
    double spacing() const noexcept { return 2.0 * std::numbers::pi / n_; }

    double& operator()(int i, int j) noexcept { return data_[static_cast<std::size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const noexcept { return data_[static_cast<std::size_t>(i) * n_ + j]; }

    /// Periodic access; any integer index is wrapped into [0, n).
    double wrapped(int i, int j) const noexcept { return (*this)(wrap(i), wrap(j)); }

    int wrap(int i) const noexcept {
        const int r = i % n_;
        return r < 0 ? r + n_ : r;
    }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    Grid& operator+=(const Grid& other);
    Grid& operator-=(const Grid& other);
    Grid& operator*=(double s) noexcept;

    friend Grid operator+(Grid a, const Grid& b) { return a += b; }
    friend Grid operator-(Grid a, const Grid& b) { return a -= b; }
    friend Grid operator*(Grid a, double s) { return a *= s; }
    friend Grid operator*(double s, Grid a) { return a *= s; }

    bool operator==(const Grid&) const = default;

private:
    int n_ = 0;
    std::vector<double> data_;
};

/// Thrown when two grids that must share a side length do not.
class SizeMismatch : public std::invalid_argument {
public:
    SizeMismatch(int a, int b);
};

void require_same_size(const Grid& a, const Grid& b);

double mean(const Grid& g) noexcept;

/// Root mean square over all nodes.
double rms(const Grid& g) noexcept;

/// Subtracts the grid mean in place (periodic gauge fixing).
void subtract_mean(Grid& g) noexcept;

/// RMS of (a - b). This is the norm used for convergence checks.
double diff_norm(const Grid& a, const Grid& b);

/// Node coordinates along one axis: x_i = i * 2pi / n.
std::vector<double> node_coordinates(int n);

} // namespace mgsr
