#pragma once

/// @file smoother.hpp
/// @brief Periodic 5-point Poisson operator, red-black Gauss-Seidel and residual.

#include "mgsr/grid.hpp"

namespace mgsr {

/// Right-hand side of lap(p) = f on a periodic grid with spacing h = 2pi/n.
/// f must have (numerically) zero mean for the problem to be solvable.
class PoissonProblem {
public:
    /// Throws std::invalid_argument if |mean(f)| > 1e-12 * rms(f).
    explicit PoissonProblem(Grid f);

    /// Skips the solvability check. Used for coarse-level correction equations,
    /// whose right-hand sides are mean-subtracted by construction.
    static PoissonProblem unchecked(Grid f);

    const Grid& f() const noexcept { return f_; }
    int n() const noexcept { return f_.n(); }
    double spacing() const noexcept { return f_.spacing(); }

private:
    struct NoCheck {};
    PoissonProblem(Grid f, NoCheck) : f_(std::move(f)) {}
    Grid f_;
};

/// (p[i+1,j] + p[i-1,j] + p[i,j+1] + p[i,j-1] - 4 p[i,j]) / h^2 with periodic wrap.
Grid apply_laplacian(const Grid& p);

/// `sweeps` red-black sweeps (colour (i+j) even first, then odd), each followed
/// by mean subtraction. Returns the relaxed copy.
Grid gauss_seidel(Grid p, const PoissonProblem& prob, int sweeps);

/// In-place variant used by the solver.
void gauss_seidel_inplace(Grid& p, const Grid& f, int sweeps);

/// f - lap(p), mean-subtracted.
Grid residual(const Grid& p, const PoissonProblem& prob);
Grid residual(const Grid& p, const Grid& f);

} // namespace mgsr
