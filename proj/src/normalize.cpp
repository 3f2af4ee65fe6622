#include "mgsr/normalize.hpp"

#include <algorithm>
#include <cmath>

namespace mgsr {

namespace {

double sign_of(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

} // namespace

NormBounds::NormBounds(double p_min, double p_max) : p_min_(p_min), p_max_(p_max) {
    if (!(p_min > 0.0) || !(p_min < p_max) || !std::isfinite(p_max))
        throw std::invalid_argument("norm bounds require 0 < p_min < p_max");
}

double normalize_value(double p, const NormBounds& b) noexcept {
    const double a = std::abs(p);
    const double s = sign_of(p);
    if (a <= b.p_min()) return 0.0;
    if (a >= b.p_max()) return s;
    const double lo = std::log10(b.p_min());
    const double hi = std::log10(b.p_max());
    const double t = std::clamp((std::log10(a) - lo) / (hi - lo), 0.0, 1.0);
    return t * s;
}

double denormalize_value(double q, double sign, const NormBounds& b) noexcept {
    if (sign == 0.0) return 0.0;
    const double s = sign_of(sign);
    const double t = std::abs(q);
    if (t >= 1.0) return s * b.p_max();
    if (t <= 0.0) return s * b.p_min();
    const double lo = std::log10(b.p_min());
    const double hi = std::log10(b.p_max());
    return s * std::pow(10.0, t * (hi - lo) + lo);
}

Normalized normalize(const Grid& p, const NormBounds& b) {
    Normalized out{Grid(p.n()), Grid(p.n())};
    const auto src = p.values();
    auto q = out.q.values();
    auto s = out.signs.values();
    for (std::size_t k = 0; k < src.size(); ++k) {
        q[k] = normalize_value(src[k], b);
        s[k] = sign_of(src[k]);
    }
    return out;
}

Grid denormalize(const Grid& q, const Grid& signs, const NormBounds& b) {
    require_same_size(q, signs);
    Grid p(q.n());
    const auto qv = q.values();
    const auto sv = signs.values();
    auto pv = p.values();
    for (std::size_t k = 0; k < qv.size(); ++k) pv[k] = denormalize_value(qv[k], sv[k], b);
    return p;
}

Grid denormalize(const Grid& q, const NormBounds& b) {
    Grid p(q.n());
    const auto qv = q.values();
    auto pv = p.values();
    for (std::size_t k = 0; k < qv.size(); ++k) pv[k] = denormalize_value(qv[k], sign_of(qv[k]), b);
    return p;
}

} // namespace mgsr
