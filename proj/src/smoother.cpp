#include "mgsr/smoother.hpp"

#include <cmath>
#include <stdexcept>

namespace mgsr {

PoissonProblem::PoissonProblem(Grid f) : f_(std::move(f)) {
    const double m = mean(f_);
    if (std::abs(m) > 1e-12 * rms(f_))
        throw std::invalid_argument("Poisson right-hand side must have zero mean on a periodic domain");
}

PoissonProblem PoissonProblem::unchecked(Grid f) { return PoissonProblem(std::move(f), NoCheck{}); }

Grid apply_laplacian(const Grid& p) {
    const int n = p.n();
    const double inv_h2 = 1.0 / (p.spacing() * p.spacing());
    Grid out(n);
    for (int i = 0; i < n; ++i) {
        const int im = i == 0 ? n - 1 : i - 1;
        const int ip = i == n - 1 ? 0 : i + 1;
        for (int j = 0; j < n; ++j) {
            const int jm = j == 0 ? n - 1 : j - 1;
            const int jp = j == n - 1 ? 0 : j + 1;
            out(i, j) = (p(ip, j) + p(im, j) + p(i, jp) + p(i, jm) - 4.0 * p(i, j)) * inv_h2;
        }
    }
    return out;
}

void gauss_seidel_inplace(Grid& p, const Grid& f, int sweeps) {
    require_same_size(p, f);
    if (sweeps < 0) throw std::invalid_argument("sweep count must be >= 0");
    const int n = p.n();
    const double h2 = p.spacing() * p.spacing();
    for (int s = 0; s < sweeps; ++s) {
        for (int colour = 0; colour < 2; ++colour) {
            for (int i = 0; i < n; ++i) {
                const int im = i == 0 ? n - 1 : i - 1;
                const int ip = i == n - 1 ? 0 : i + 1;
                for (int j = (i + colour) & 1; j < n; j += 2) {
                    const int jm = j == 0 ? n - 1 : j - 1;
                    const int jp = j == n - 1 ? 0 : j + 1;
                    p(i, j) = 0.25 * (p(ip, j) + p(im, j) + p(i, jp) + p(i, jm) - h2 * f(i, j));
                }
            }
        }
        subtract_mean(p);
    }
}

Grid gauss_seidel(Grid p, const PoissonProblem& prob, int sweeps) {
    gauss_seidel_inplace(p, prob.f(), sweeps);
    return p;
}

Grid residual(const Grid& p, const Grid& f) {
    require_same_size(p, f);
    Grid r = apply_laplacian(p);
    auto rv = r.values();
    const auto fv = f.values();
    for (std::size_t k = 0; k < rv.size(); ++k) rv[k] = fv[k] - rv[k];
    subtract_mean(r);
    return r;
}

Grid residual(const Grid& p, const PoissonProblem& prob) { return residual(p, prob.f()); }

} // namespace mgsr
