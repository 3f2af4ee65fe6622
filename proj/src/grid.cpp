#include "mgsr/grid.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace mgsr {

Grid::Grid(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("grid side must be >= 2, got " + std::to_string(n));
    data_.assign(static_cast<std::size_t>(n) * n, 0.0);
}

Grid::Grid(int n, std::vector<double> values) : n_(n), data_(std::move(values)) {
    if (n < 2) throw std::invalid_argument("grid side must be >= 2, got " + std::to_string(n));
    if (data_.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("grid of side " + std::to_string(n) + " needs " +
                                    std::to_string(static_cast<std::size_t>(n) * n) + " values, got " +
                                    std::to_string(data_.size()));
}

Grid& Grid::operator+=(const Grid& other) {
    require_same_size(*this, other);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

Grid& Grid::operator-=(const Grid& other) {
    require_same_size(*this, other);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

Grid& Grid::operator*=(double s) noexcept {
    for (double& v : data_) v *= s;
    return *this;
}

SizeMismatch::SizeMismatch(int a, int b)
    : std::invalid_argument("grid size mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}

void require_same_size(const Grid& a, const Grid& b) {
    if (a.n() != b.n()) throw SizeMismatch(a.n(), b.n());
}

double mean(const Grid& g) noexcept {
    if (g.size() == 0) return 0.0;
    const auto v = g.values();
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double rms(const Grid& g) noexcept {
    if (g.size() == 0) return 0.0;
    double s = 0.0;
    for (double v : g.values()) s += v * v;
    return std::sqrt(s / static_cast<double>(g.size()));
}

void subtract_mean(Grid& g) noexcept {
    const double m = mean(g);
    for (double& v : g.values()) v -= m;
}

double diff_norm(const Grid& a, const Grid& b) {
    require_same_size(a, b);
    const auto x = a.values();
    const auto y = b.values();
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(x.size()));
}

std::vector<double> node_coordinates(int n) {
    std::vector<double> x(static_cast<std::size_t>(n));
    const double h = 2.0 * std::numbers::pi / n;
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = i * h;
    return x;
}

} // namespace mgsr
