#include "mgsr/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "mgsr/datagen.hpp"
#include "mgsr/generator.hpp"
#include "mgsr/grid_io.hpp"
#include "mgsr/solver.hpp"
#include "mgsr/spectrum.hpp"
#include "mgsr/weights.hpp"

namespace mgsr::cli {

namespace {

// Thrown for problems that should exit with kExitUsage.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
    if (const char* s = std::getenv("MGSR_SEED")) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(s, &used);
            if (used == std::string(s).size()) return v;
        } catch (const std::exception&) {
        }
        throw UsageError(std::string("MGSR_SEED is not a non-negative integer: ") + s);
    }
    return 0;
}

std::string strip_mgg(std::string path) {
    if (path.size() > 4 && path.ends_with(".mgg")) path.resize(path.size() - 4);
    return path;
}

std::string read_text(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw UsageError("cannot read " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// ---- config overrides shared by solve and sweep ----

struct Overrides {
    std::optional<int> N_iter, r_min, N_smooth_pre, N_smooth, N_step, coarse_sweeps;
    std::optional<std::string> N_GAN, prolongation;
    std::optional<double> S_thres, tol, p_min, p_max, cgc_damping;
    std::optional<std::uint64_t> seed;
    std::string config_path;
    std::string weights;

    void add_to(CLI::App& app) {
        app.add_option("--config", config_path, "JSON file with RunConfig keys")->check(CLI::ExistingFile);
        app.add_option("--weights", weights, "MGSR1 generator weights");
        app.add_option("--N_iter", N_iter);
        app.add_option("--r_min", r_min);
        app.add_option("--N_smooth_pre", N_smooth_pre);
        app.add_option("--N_smooth", N_smooth);
        app.add_option("--N_step", N_step);
        app.add_option("--N_GAN", N_GAN, "number or ratio such as 1/300");
        app.add_option("--S_thres", S_thres);
        app.add_option("--tol", tol);
        app.add_option("--prolongation", prolongation)->check(CLI::IsMember({"spline", "sr", "hybrid"}));
        app.add_option("--p_min", p_min);
        app.add_option("--p_max", p_max);
        app.add_option("--seed", seed);
        app.add_option("--coarse_sweeps", coarse_sweeps);
        app.add_option("--cgc_damping", cgc_damping);
    }

    RunConfig build() const {
        RunConfig base;
        base.seed = default_seed();
        RunConfig c = config_path.empty() ? base : parse_run_config(read_text(config_path), base);
        if (N_iter) c.N_iter = *N_iter;
        if (r_min) c.r_min = *r_min;
        if (N_smooth_pre) c.N_smooth_pre = *N_smooth_pre;
        if (N_smooth) c.N_smooth = *N_smooth;
        if (N_step) c.N_step = *N_step;
        if (coarse_sweeps) c.coarse_sweeps = *coarse_sweeps;
        if (N_GAN) c.N_GAN = parse_ratio(*N_GAN);
        if (S_thres) c.S_thres = *S_thres;
        if (tol) c.tol = *tol;
        if (cgc_damping) c.cgc_damping = *cgc_damping;
        if (prolongation) c = parse_run_config("{\"prolongation\":\"" + *prolongation + "\"}", c);
        if (p_min || p_max) c.bounds = NormBounds(p_min.value_or(c.bounds.p_min()), p_max.value_or(c.bounds.p_max()));
        if (seed) c.seed = *seed;
        if (!weights.empty()) c.weights = weights;
        return c;
    }
};

std::unique_ptr<Generator> generator_for(const RunConfig& cfg) {
    if (!cfg.uses_sr()) return nullptr;
    if (cfg.weights.empty())
        throw UsageError(std::string("prolongation '") + to_string(cfg.prolongation) + "' needs --weights");
    if (!std::filesystem::exists(cfg.weights)) throw UsageError("weights file not found: " + cfg.weights);
    return std::make_unique<Generator>(load_weights(cfg.weights));
}

// ---- datagen ----

struct DatagenArgs {
    std::string kind;
    int n = 0;
    std::optional<int> mode_k, k_peak;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int cmd_datagen(const DatagenArgs& a, std::ostream& out) {
    const std::string base = strip_mgg(a.out);
    std::vector<std::pair<std::string, const Grid*>> files;
    ModeField mode;
    TurbulentSource turb;
    if (a.kind == "mode") {
        if (!a.mode_k) throw UsageError("--kind mode needs --mode-k");
        mode = single_mode_field(a.n, *a.mode_k);
        files = {{base + ".f.mgg", &mode.f}, {base + ".p.mgg", &mode.p}};
    } else {
        if (!a.k_peak) throw UsageError("--kind turb needs --k-peak");
        turb = turbulent_source(a.n, *a.k_peak, a.seed.value_or(default_seed()));
        files = {{base + ".f.mgg", &turb.f},
                 {base + ".p.mgg", &turb.p_oracle},
                 {base + ".u.mgg", &turb.flow.u},
                 {base + ".v.mgg", &turb.flow.v}};
    }
    for (const auto& [path, g] : files) {
        save_grid(path, *g);
        out << path << '\n';
    }
    return kExitOk;
}

// ---- solve ----

struct SolveArgs {
    std::string rhs, out_grid, out_log;
    Overrides ov;
};

int cmd_solve(const SolveArgs& a, std::ostream& out) {
    const Grid f = load_grid(a.rhs);
    RunConfig cfg = a.ov.build();
    cfg.N_grid = f.n();
    cfg.validate();
    const auto gen = generator_for(cfg);
    const SolveResult r = solve(PoissonProblem(f), cfg, gen.get());

    if (!a.out_grid.empty()) save_grid(a.out_grid, r.p);
    if (!a.out_log.empty()) {
        std::ofstream os(a.out_log);
        if (!os) throw std::runtime_error("cannot open " + a.out_log + " for writing");
        r.log.write_csv(os);
    }
    out << (r.converged ? "converged" : "not converged") << " iterations=" << r.iterations
        << " final_diff=" << fmt(r.final_diff) << '\n';
    return r.converged ? kExitOk : kExitNotConverged;
}

// ---- sweep ----

struct SweepArgs {
    std::string param;
    std::vector<std::string> values;
    int replicates = 1;
    std::vector<std::string> rhs_files;
    std::string rhs_kind = "turb";
    int rhs_count = 1;
    int rhs_n = 0;
    int mode_k = 2;
    int k_peak = 4;
    std::optional<std::uint64_t> rhs_seed;
    bool scale_smooth = false;
    int jobs = 1;
    std::string out;
    Overrides ov;
};

struct SweepRow {
    double value;
    std::string value_text;
    int replicate;
    int rhs_id;
    double iters;
    bool converged;
    double final_diff;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
    static const std::vector<std::string> params{"N_smooth", "N_GAN", "S_thres", "N_grid", "k_peak"};
    if (std::find(params.begin(), params.end(), a.param) == params.end())
        throw UsageError("--param must be one of N_smooth, N_GAN, S_thres, N_grid, k_peak");
    if (a.replicates < 1) throw UsageError("--replicates must be >= 1");
    if (a.jobs < 1) throw UsageError("--jobs must be >= 1");
    if (!a.rhs_files.empty() && (a.param == "N_grid" || a.param == "k_peak"))
        throw UsageError("--param " + a.param + " generates its right-hand sides; drop --rhs");
    if (a.param == "k_peak" && a.rhs_kind != "turb") throw UsageError("--param k_peak needs --rhs-kind turb");

    const RunConfig base = a.ov.build();
    std::vector<double> values;
    for (const auto& v : a.values) values.push_back(parse_ratio(v));

    // Right-hand sides per value (only N_grid and k_peak change them).
    const std::uint64_t rhs_seed = a.rhs_seed.value_or(default_seed());
    auto make_rhs = [&](int n, int k_peak) {
        std::vector<Grid> set;
        if (!a.rhs_files.empty()) {
            for (const auto& path : a.rhs_files) set.push_back(load_grid(path));
        } else if (a.rhs_kind == "mode") {
            set.push_back(single_mode_field(n, a.mode_k).f);
        } else if (a.rhs_kind == "turb") {
            for (int i = 0; i < a.rhs_count; ++i) set.push_back(turbulent_source(n, k_peak, rhs_seed + i).f);
        } else {
            throw UsageError("--rhs-kind must be mode or turb");
        }
        return set;
    };
    const int default_n = a.rhs_n > 0 ? a.rhs_n : base.N_grid;

    struct Task {
        std::size_t value_index;
        int replicate;
        int rhs_id;
        RunConfig cfg;
        const Grid* f;
    };
    std::vector<std::vector<Grid>> rhs_sets;
    std::vector<Task> tasks;
    rhs_sets.reserve(values.size());
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
        const double v = values[vi];
        RunConfig cfg = base;
        int n = default_n, k_peak = a.k_peak;
        if (a.param == "N_smooth") cfg.N_smooth = static_cast<int>(std::lround(v));
        else if (a.param == "N_GAN") cfg.N_GAN = v;
        else if (a.param == "S_thres") cfg.S_thres = v;
        else if (a.param == "N_grid") n = static_cast<int>(std::lround(v));
        else k_peak = static_cast<int>(std::lround(v));
        rhs_sets.push_back(make_rhs(n, k_peak));
        for (int r = 0; r < a.replicates; ++r)
            for (std::size_t id = 0; id < rhs_sets.back().size(); ++id) {
                RunConfig c = cfg;
                c.N_grid = rhs_sets.back()[id].n();
                c.seed = base.seed + static_cast<std::uint64_t>(r);
                c.validate();
                tasks.push_back({vi, r, static_cast<int>(id), c, &rhs_sets.back()[id]});
            }
    }
    const auto gen = generator_for(base);

    std::vector<SweepRow> rows(tasks.size());
    std::size_t next = 0;
    std::mutex m;
    std::exception_ptr failure;
    auto worker = [&] {
        for (;;) {
            std::size_t t;
            {
                std::lock_guard lock(m);
                if (next >= tasks.size() || failure) return;
                t = next++;
            }
            try {
                const Task& task = tasks[t];
                const SolveResult r = solve(PoissonProblem(*task.f), task.cfg, gen.get());
                double iters = r.iterations;
                if (a.scale_smooth) iters *= task.cfg.N_smooth / 20.0;
                rows[t] = {values[task.value_index], a.values[task.value_index], task.replicate, task.rhs_id, iters,
                           r.converged, r.final_diff};
            } catch (...) {
                std::lock_guard lock(m);
                failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < std::min<int>(a.jobs, static_cast<int>(tasks.size())); ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& x, const SweepRow& y) {
        return std::tie(x.value, x.replicate, x.rhs_id) < std::tie(y.value, y.replicate, y.rhs_id);
    });

    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file) throw std::runtime_error("cannot open " + a.out + " for writing");
    }
    std::ostream& os = a.out.empty() ? out : file;
    os << "param,value,replicate,rhs_id,iters_to_converge,converged,final_diff\n";
    for (const auto& r : rows)
        os << a.param << ',' << r.value_text << ',' << r.replicate << ',' << r.rhs_id << ',' << fmt(r.iters) << ','
           << (r.converged ? 1 : 0) << ',' << fmt(r.final_diff) << '\n';
    return kExitOk;
}

// ---- spectrum ----

int cmd_spectrum(const std::string& in, bool peak_normalize, const std::string& out_path, std::ostream& out) {
    const Spectrum s = power_spectrum(load_grid(in), peak_normalize);
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot open " + out_path + " for writing");
    }
    std::ostream& os = out_path.empty() ? out : file;
    os << "k,power\n";
    char buf[40];
    for (std::size_t i = 0; i < s.k.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", s.power[i]);
        os << s.k[i] << ',' << buf << '\n';
    }
    return kExitOk;
}

// ---- windows ----

struct WindowsArgs {
    std::vector<std::string> in;
    int count = 1000;
    std::optional<std::uint64_t> seed;
    double p_min = 1e-10, p_max = 1e-3;
    std::optional<double> peak;
    bool no_rescale = false;
    std::string out;
};

int cmd_windows(const WindowsArgs& a, std::ostream& out) {
    const NormBounds bounds(a.p_min, a.p_max);
    std::vector<Grid> fields;
    for (const auto& path : a.in) fields.push_back(load_grid(path));
    WindowOptions opt;
    if (!a.no_rescale) opt.peak = a.peak.value_or(bounds.p_max());
    const auto pairs = extract_windows(fields, a.count, a.seed.value_or(default_seed()), bounds, opt);
    save_windows(a.out, pairs);
    out << "wrote " << pairs.size() << " window pairs to " << a.out << '\n';
    return kExitOk;
}

// ---- weights ----

int cmd_weights(const std::string& kind, int blocks, std::optional<std::uint64_t> seed, const std::string& path,
                std::ostream& out) {
    const auto b = static_cast<std::uint32_t>(blocks);
    const GeneratorWeights w = kind == "nn" ? make_nearest_neighbor_weights(b)
                                            : make_random_weights(b, seed.value_or(default_seed()));
    save_weights(path, w);
    out << "wrote " << w.tensors().size() << " tensors to " << path << '\n';
    return kExitOk;
}

// ---- forward ----

struct ForwardArgs {
    std::string weights, in, out;
    std::vector<int> shape;
};

int cmd_forward(const ForwardArgs& a, std::ostream& out) {
    if (a.shape.size() != 3) throw UsageError("--shape takes C,H,W");
    const Generator gen(load_weights(a.weights));
    const Tensor3 x = load_raw_f32(a.in, a.shape[0], a.shape[1], a.shape[2]);
    const Tensor3 y = gen.forward(x);
    save_raw_f32(a.out, y);
    out << "wrote " << y.channels << 'x' << y.height << 'x' << y.width << " to " << a.out << '\n';
    return kExitOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hybrid spline / super-resolution multigrid Poisson solver", "mgsr"};
    app.require_subcommand(1);

    DatagenArgs dg;
    auto* datagen = app.add_subcommand("datagen", "Write synthetic right-hand sides and reference solutions");
    datagen->add_option("--kind", dg.kind)->required()->check(CLI::IsMember({"mode", "turb"}));
    datagen->add_option("--n", dg.n, "grid side")->required()->check(CLI::Range(4, 1 << 14));
    datagen->add_option("--mode-k", dg.mode_k);
    datagen->add_option("--k-peak", dg.k_peak);
    datagen->add_option("--seed", dg.seed);
    datagen->add_option("--out", dg.out, "output base path")->required();

    SolveArgs sv;
    auto* solve_cmd = app.add_subcommand("solve", "Solve lap(p) = f for an MGG1 right-hand side");
    solve_cmd->add_option("--rhs", sv.rhs)->required()->check(CLI::ExistingFile);
    solve_cmd->add_option("--out-grid", sv.out_grid);
    solve_cmd->add_option("--out-log", sv.out_log);
    sv.ov.add_to(*solve_cmd);

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Iterations to convergence over a parameter range");
    sweep->add_option("--param", sw.param)->required();
    sweep->add_option("--values", sw.values)->required()->delimiter(',');
    sweep->add_option("--replicates", sw.replicates);
    sweep->add_option("--rhs", sw.rhs_files, "MGG1 right-hand sides")->delimiter(',')->check(CLI::ExistingFile);
    sweep->add_option("--rhs-kind", sw.rhs_kind)->check(CLI::IsMember({"mode", "turb"}));
    sweep->add_option("--rhs-count", sw.rhs_count)->check(CLI::PositiveNumber);
    sweep->add_option("--rhs-n", sw.rhs_n);
    sweep->add_option("--rhs-seed", sw.rhs_seed);
    sweep->add_option("--mode-k", sw.mode_k);
    sweep->add_option("--k-peak", sw.k_peak);
    sweep->add_flag("--scale-smooth", sw.scale_smooth, "multiply iterations by N_smooth/20");
    sweep->add_option("--jobs", sw.jobs);
    sweep->add_option("--out", sw.out);
    sw.ov.add_to(*sweep);

    std::string sp_in, sp_out;
    bool sp_peak = false;
    auto* spectrum = app.add_subcommand("spectrum", "Radially binned power spectrum of an MGG1 grid");
    spectrum->add_option("--in", sp_in)->required()->check(CLI::ExistingFile);
    spectrum->add_flag("--peak-normalize", sp_peak);
    spectrum->add_option("--out", sp_out);

    WindowsArgs wa;
    auto* windows = app.add_subcommand("windows", "Extract normalised 6x6 / 12x12 training window pairs");
    windows->add_option("--in", wa.in)->required()->check(CLI::ExistingFile);
    windows->add_option("--count", wa.count)->check(CLI::NonNegativeNumber);
    windows->add_option("--seed", wa.seed);
    windows->add_option("--p_min", wa.p_min);
    windows->add_option("--p_max", wa.p_max);
    windows->add_option("--peak", wa.peak, "rescale each field to this max |p| (default p_max)");
    windows->add_flag("--no-rescale", wa.no_rescale);
    windows->add_option("--out", wa.out)->required();

    std::string wk_kind = "nn", wk_out;
    int wk_blocks = 4;
    std::optional<std::uint64_t> wk_seed;
    auto* weights = app.add_subcommand("weights", "Write crafted nearest-neighbour or random generator weights");
    weights->add_option("--kind", wk_kind)->check(CLI::IsMember({"nn", "random"}));
    weights->add_option("--blocks", wk_blocks)->check(CLI::Range(0, 64));
    weights->add_option("--seed", wk_seed);
    weights->add_option("--out", wk_out)->required();

    ForwardArgs fw;
    auto* forward = app.add_subcommand("forward", "Run the generator once on a raw f32 tensor (parity fixtures)");
    forward->add_option("--weights", fw.weights)->required()->check(CLI::ExistingFile);
    forward->add_option("--in", fw.in, "raw little-endian f32, C*H*W values")->required()->check(CLI::ExistingFile);
    forward->add_option("--shape", fw.shape, "C,H,W of the input")->required()->delimiter(',');
    forward->add_option("--out", fw.out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << "run with --help for usage\n";
        return kExitUsage;
    }

    try {
        if (*datagen) return cmd_datagen(dg, out);
        if (*solve_cmd) return cmd_solve(sv, out);
        if (*sweep) return cmd_sweep(sw, out);
        if (*spectrum) return cmd_spectrum(sp_in, sp_peak, sp_out, out);
        if (*windows) return cmd_windows(wa, out);
        if (*weights) return cmd_weights(wk_kind, wk_blocks, wk_seed, wk_out, out);
        if (*forward) return cmd_forward(fw, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const WeightFileError& e) {
        err << "weights: " << e.what() << '\n';
        return e.kind() == WeightFileError::Kind::io ? kExitUsage : kExitFailure;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"mgsr"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace mgsr::cli
