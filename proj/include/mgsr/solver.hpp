#pragma once

/// @file solver.hpp
/// @brief Multigrid V-cycle driver with per-iteration prolongation scheduling.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mgsr/generator.hpp"
#include "mgsr/grid.hpp"
#include "mgsr/normalize.hpp"
#include "mgsr/smoother.hpp"

namespace mgsr {

/// Which prolongation a solve may use. `spline` and `sr` pin the operator;
/// `hybrid` picks it every iteration from N_GAN and S_thres.
enum class Prolongation { spline, sr, hybrid };

/// Operator actually applied in one iteration (`none` for the initial record).
enum class ProlongationOp { none, spline, sr };

const char* to_string(Prolongation p) noexcept;
const char* to_string(ProlongationOp op) noexcept;

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    int N_iter = 300;
    int N_grid = 96;
    int r_min = 12;
    int N_smooth_pre = 10;
    int N_smooth = 20;
    int N_step = 4;
    double N_GAN = 1.0;
    double S_thres = 0.0;
    double tol = 1e-10;
    Prolongation prolongation = Prolongation::spline;
    std::string weights;
    NormBounds bounds;
    std::uint64_t seed = 0;

    /// Gauss-Seidel sweeps on the coarsest level.
    int coarse_sweeps = 10;
    /// Scale applied to every prolonged correction.
    double cgc_damping = 0.7;

    /// Throws ConfigError on inconsistent values.
    void validate() const;

    /// Side lengths from finest to coarsest, e.g. {96, 6}.
    std::vector<int> level_sides() const;

    bool uses_sr() const noexcept { return prolongation != Prolongation::spline; }
};

/// Flat JSON object whose keys are the RunConfig field names. Missing keys
/// keep the values in `base`; unknown keys are an error. N_GAN accepts a
/// number or a string "a/b". Throws ConfigError.
RunConfig parse_run_config(std::string_view json_text, RunConfig base = {});
std::string to_json(const RunConfig& cfg);

/// Parses "0.2", "5" or "1/300". Throws ConfigError.
double parse_ratio(std::string_view text);

/// Operator for 1-based iteration `iter` under the N_GAN mod rule. With
/// N_GAN < 1 the period is round(1/N_GAN), spline first and SR second;
/// otherwise the period is round(N_GAN), SR first and spline second. The first
/// operator is used when iter mod N != 0 and the switch is not latched. N = 1
/// alternates (odd iterations SR, even spline). If n_iter > 0 and the period
/// is at least n_iter, the second operator is only reached through the latch.
ProlongationOp schedule_operator(int iter, double n_gan, bool switch_latched, int n_iter = 0);

struct LogRecord {
    int iter = 0;
    double diff_norm = 0.0;
    double residual_norm = 0.0;
    ProlongationOp op = ProlongationOp::none;
    bool switch_latched = false;
    double wall_ms = 0.0;
};

/// Row 0 records the initial smoothing: diff_norm is the change made by the
/// N_smooth_pre sweeps. Rows 1.. are V-cycles; switch_latched is the latch
/// state the operator was chosen under.
struct ConvergenceLog {
    std::vector<LogRecord> records;

    void write_csv(std::ostream& os) const;
    static ConvergenceLog read_csv(std::istream& is);
};

/// Operator sequence that `schedule_operator` yields when replayed on the
/// diff norms of `log` (latch after any record with diff_norm <= S_thres).
std::vector<ProlongationOp> replay_schedule(const ConvergenceLog& log, const RunConfig& cfg);

/// Seeded uniform values in [-p_max, p_max], mean-subtracted.
Grid random_initial_grid(int n, std::uint64_t seed, double amplitude);

/// One V-cycle iteration. `op` selects the prolongation on every level; `gen`
/// must be non-null when op is sr.
Grid v_cycle(const Grid& p, const PoissonProblem& prob, const RunConfig& cfg, ProlongationOp op,
             const Generator* gen = nullptr);

struct SolveResult {
    Grid p;
    ConvergenceLog log;
    bool converged = false;
    int iterations = 0;
    double final_diff = 0.0;
};

/// Runs the solver. If the configuration uses SR and `gen` is null, the
/// generator is loaded from cfg.weights.
SolveResult solve(const PoissonProblem& prob, const RunConfig& cfg, const Generator* gen = nullptr);

struct PlainGsResult {
    Grid p;
    int sweeps = 0;
    bool converged = false;
    double final_diff = 0.0;
};

/// Plain red-black Gauss-Seidel from the same initial grid as solve(): one
/// sweep counts as one iteration, stopping when the RMS change per sweep
/// drops below `tol`.
PlainGsResult plain_gauss_seidel(const PoissonProblem& prob, const RunConfig& cfg, double tol, int max_sweeps);

} // namespace mgsr
