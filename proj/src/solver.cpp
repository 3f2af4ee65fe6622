#include "mgsr/solver.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "mgsr/sr_prolong.hpp"
#include "mgsr/transfer.hpp"

namespace mgsr {

const char* to_string(Prolongation p) noexcept {
    switch (p) {
        case Prolongation::spline: return "spline";
        case Prolongation::sr: return "sr";
        case Prolongation::hybrid: return "hybrid";
    }
    return "?";
}

const char* to_string(ProlongationOp op) noexcept {
    switch (op) {
        case ProlongationOp::none: return "none";
        case ProlongationOp::spline: return "spline";
        case ProlongationOp::sr: return "sr";
    }
    return "?";
}

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw ConfigError(msg); }

// Fine-to-coarse transfer ratio used by the V-cycle.
int ratio_of(const RunConfig& cfg) { return 1 << cfg.N_step; }

bool recurse_below(int side, int s, int r_min) { return side > r_min && side % s == 0 && side / s >= r_min; }

} // namespace

std::vector<int> RunConfig::level_sides() const {
    const int s = ratio_of(*this);
    std::vector<int> sides{N_grid, N_grid / s};
    while (recurse_below(sides.back(), s, r_min)) sides.push_back(sides.back() / s);
    return sides;
}

void RunConfig::validate() const {
    if (N_iter < 1) config_error("N_iter must be >= 1");
    if (N_step < 1 || N_step > 4) config_error("N_step must be in 1..4");
    if (N_grid < 4 || N_grid > (1 << 14)) config_error("N_grid must be in 4..16384");
    if (r_min < 2) config_error("r_min must be >= 2");
    if (N_smooth_pre < 0 || N_smooth < 0) config_error("smoothing counts must be >= 0");
    if (!(tol > 0.0)) config_error("tol must be > 0");
    if (!(N_GAN > 0.0) || !std::isfinite(N_GAN)) config_error("N_GAN must be a positive number");
    if (!(S_thres >= 0.0)) config_error("S_thres must be >= 0");
    if (coarse_sweeps < 1) config_error("coarse_sweeps must be >= 1");
    if (!(cgc_damping > 0.0 && cgc_damping <= 2.0)) config_error("cgc_damping must be in (0, 2]");
    const int s = ratio_of(*this);
    if (N_grid % s != 0)
        config_error("N_grid " + std::to_string(N_grid) + " is not divisible by 2^N_step = " + std::to_string(s));
    for (int side : level_sides()) {
        if (side < 2 || side % 2 != 0)
            config_error("every level side must be even and >= 2, got " + std::to_string(side));
    }
    if (uses_sr()) {
        if (s != 4 && s != 16) config_error("SR prolongation needs N_step 2 or 4");
        const auto sides = level_sides();
        for (std::size_t l = 1; l < sides.size(); ++l)
            if (sides[l] < kWindowSide)
                config_error("SR prolongation needs coarse sides >= 6, got " + std::to_string(sides[l]));
    }
}

double parse_ratio(std::string_view text) {
    auto number = [&](std::string_view t) {
        while (!t.empty() && t.front() == ' ') t.remove_prefix(1);
        while (!t.empty() && t.back() == ' ') t.remove_suffix(1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
            config_error("cannot parse \"" + std::string(text) + "\" as a number or ratio");
        return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return number(text);
    const double den = number(text.substr(slash + 1));
    if (den == 0.0) config_error("zero denominator in \"" + std::string(text) + "\"");
    return number(text.substr(0, slash)) / den;
}

RunConfig parse_run_config(std::string_view json_text, RunConfig base) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        config_error(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) config_error("config must be a JSON object");

    RunConfig c = std::move(base);
    double p_min = c.bounds.p_min(), p_max = c.bounds.p_max();
    auto get_int = [](const json& v, const std::string& key) {
        if (!v.is_number_integer()) config_error(key + " must be an integer");
        return v.get<long long>();
    };
    auto get_real = [](const json& v, const std::string& key) {
        if (!v.is_number()) config_error(key + " must be a number");
        return v.get<double>();
    };
    for (const auto& [key, v] : j.items()) {
        if (key == "N_iter") c.N_iter = static_cast<int>(get_int(v, key));
        else if (key == "N_grid") c.N_grid = static_cast<int>(get_int(v, key));
        else if (key == "r_min") c.r_min = static_cast<int>(get_int(v, key));
        else if (key == "N_smooth_pre") c.N_smooth_pre = static_cast<int>(get_int(v, key));
        else if (key == "N_smooth") c.N_smooth = static_cast<int>(get_int(v, key));
        else if (key == "N_step") c.N_step = static_cast<int>(get_int(v, key));
        else if (key == "coarse_sweeps") c.coarse_sweeps = static_cast<int>(get_int(v, key));
        else if (key == "N_GAN") c.N_GAN = v.is_string() ? parse_ratio(v.get<std::string>()) : get_real(v, key);
        else if (key == "S_thres") c.S_thres = get_real(v, key);
        else if (key == "tol") c.tol = get_real(v, key);
        else if (key == "cgc_damping") c.cgc_damping = get_real(v, key);
        else if (key == "p_min") p_min = get_real(v, key);
        else if (key == "p_max") p_max = get_real(v, key);
        else if (key == "seed") {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
                config_error("seed must be a non-negative integer");
            c.seed = v.get<std::uint64_t>();
        } else if (key == "weights") {
            if (!v.is_string() && !v.is_null()) config_error("weights must be a path string");
            c.weights = v.is_null() ? std::string{} : v.get<std::string>();
        } else if (key == "prolongation") {
            const std::string s = v.is_string() ? v.get<std::string>() : std::string{};
            if (s == "spline") c.prolongation = Prolongation::spline;
            else if (s == "sr") c.prolongation = Prolongation::sr;
            else if (s == "hybrid") c.prolongation = Prolongation::hybrid;
            else config_error("prolongation must be one of spline, sr, hybrid");
        } else {
            config_error("unknown config key \"" + key + "\"");
        }
    }
    try {
        c.bounds = NormBounds(p_min, p_max);
    } catch (const std::invalid_argument& e) {
        config_error(e.what());
    }
    return c;
}

std::string to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["N_iter"] = c.N_iter;
    j["N_grid"] = c.N_grid;
    j["r_min"] = c.r_min;
    j["N_smooth_pre"] = c.N_smooth_pre;
    j["N_smooth"] = c.N_smooth;
    j["N_step"] = c.N_step;
    j["N_GAN"] = c.N_GAN;
    j["S_thres"] = c.S_thres;
    j["tol"] = c.tol;
    j["prolongation"] = to_string(c.prolongation);
    j["weights"] = c.weights;
    j["p_min"] = c.bounds.p_min();
    j["p_max"] = c.bounds.p_max();
    j["seed"] = c.seed;
    j["coarse_sweeps"] = c.coarse_sweeps;
    j["cgc_damping"] = c.cgc_damping;
    return j.dump(2);
}

ProlongationOp schedule_operator(int iter, double n_gan, bool switch_latched, int n_iter) {
    ProlongationOp first = ProlongationOp::sr, second = ProlongationOp::spline;
    double period = n_gan;
    if (n_gan < 1.0) {
        period = 1.0 / n_gan;
        std::swap(first, second);
    }
    const long long n = std::max(1LL, std::llround(period));
    if (switch_latched) return second;
    if (n == 1) return iter % 2 == 1 ? ProlongationOp::sr : ProlongationOp::spline;
    if (n_iter > 0 && n >= n_iter) return first;
    return iter % n != 0 ? first : second;
}

void ConvergenceLog::write_csv(std::ostream& os) const {
    os << "iter,diff_norm,residual_norm,operator,switch_latched,wall_ms\n";
    char buf[64];
    for (const auto& r : records) {
        os << r.iter << ',';
        std::snprintf(buf, sizeof buf, "%.17g", r.diff_norm);
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", r.residual_norm);
        os << buf << ',' << to_string(r.op) << ',' << (r.switch_latched ? 1 : 0) << ',';
        std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
        os << buf << '\n';
    }
}

ConvergenceLog ConvergenceLog::read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "iter,diff_norm,residual_norm,operator,switch_latched,wall_ms")
        throw std::runtime_error("convergence log: unexpected header");
    ConvergenceLog log;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell[6];
        for (auto& c : cell)
            if (!std::getline(ss, c, ',')) throw std::runtime_error("convergence log: short row \"" + line + "\"");
        LogRecord r;
        r.iter = std::stoi(cell[0]);
        r.diff_norm = std::stod(cell[1]);
        r.residual_norm = std::stod(cell[2]);
        if (cell[3] == "spline") r.op = ProlongationOp::spline;
        else if (cell[3] == "sr") r.op = ProlongationOp::sr;
        else if (cell[3] == "none") r.op = ProlongationOp::none;
        else throw std::runtime_error("convergence log: unknown operator \"" + cell[3] + "\"");
        r.switch_latched = cell[4] == "1";
        r.wall_ms = std::stod(cell[5]);
        log.records.push_back(r);
    }
    return log;
}

std::vector<ProlongationOp> replay_schedule(const ConvergenceLog& log, const RunConfig& cfg) {
    std::vector<ProlongationOp> ops;
    bool latched = false;
    for (const auto& r : log.records) {
        if (r.iter >= 1) {
            if (cfg.prolongation == Prolongation::spline) ops.push_back(ProlongationOp::spline);
            else if (cfg.prolongation == Prolongation::sr) ops.push_back(ProlongationOp::sr);
            else ops.push_back(schedule_operator(r.iter, cfg.N_GAN, latched, cfg.N_iter));
        }
        if (r.diff_norm <= cfg.S_thres) latched = true;
    }
    return ops;
}

Grid random_initial_grid(int n, std::uint64_t seed, double amplitude) {
    std::mt19937_64 rng(seed);
    Grid g(n);
    for (double& v : g.values()) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        v = amplitude * (2.0 * u - 1.0);
    }
    subtract_mean(g);
    return g;
}

namespace {

Grid prolong(const Grid& coarse, int s, ProlongationOp op, const RunConfig& cfg, const Generator* gen) {
    if (op == ProlongationOp::sr) {
        if (!gen) throw ConfigError("SR prolongation requested without a generator");
        return sr_prolong(coarse, TransferRatio(s), *gen, cfg.bounds);
    }
    return spline_prolong(coarse, TransferRatio(s));
}

// Returns the updated iterate for lap(p) = f on the current level.
Grid cycle(Grid p, const Grid& f, const RunConfig& cfg, ProlongationOp op, const Generator* gen) {
    const int s = ratio_of(cfg);
    gauss_seidel_inplace(p, f, cfg.N_smooth);
    const Grid r = residual(p, f);

    // Half injection: after a red-black sweep the residual sits on the colour
    // that injection samples, so plain injection doubles it.
    Grid rc = restrict_injection(r, TransferRatio(s));
    rc *= 0.5;

    Grid delta_c(rc.n());
    if (recurse_below(rc.n(), s, cfg.r_min))
        delta_c = cycle(std::move(delta_c), rc, cfg, op, gen);
    else
        gauss_seidel_inplace(delta_c, rc, cfg.coarse_sweeps);

    Grid delta = prolong(delta_c, s, op, cfg, gen);
    delta *= cfg.cgc_damping;
    p += delta;
    subtract_mean(p);
    return p;
}

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

} // namespace

Grid v_cycle(const Grid& p, const PoissonProblem& prob, const RunConfig& cfg, ProlongationOp op, const Generator* gen) {
    require_same_size(p, prob.f());
    if (p.n() != cfg.N_grid) throw ConfigError("grid side does not match N_grid");
    if (op == ProlongationOp::none) throw std::invalid_argument("v_cycle needs a prolongation operator");
    return cycle(p, prob.f(), cfg, op, gen);
}

SolveResult solve(const PoissonProblem& prob, const RunConfig& cfg, const Generator* gen) {
    cfg.validate();
    if (prob.n() != cfg.N_grid)
        throw ConfigError("right-hand side has side " + std::to_string(prob.n()) + " but N_grid is " +
                          std::to_string(cfg.N_grid));
    std::unique_ptr<Generator> owned;
    if (cfg.uses_sr() && !gen) {
        if (cfg.weights.empty()) throw ConfigError("prolongation mode needs a weights file");
        owned = std::make_unique<Generator>(load_weights(cfg.weights));
        gen = owned.get();
    }

    SolveResult out;
    auto t0 = Clock::now();
    const Grid initial = random_initial_grid(cfg.N_grid, cfg.seed, cfg.bounds.p_max());
    Grid p = gauss_seidel(initial, prob, cfg.N_smooth_pre);
    double d = diff_norm(p, initial);
    bool latched = d <= cfg.S_thres;
    out.log.records.push_back({0, d, rms(residual(p, prob)), ProlongationOp::none, false, ms_since(t0)});

    for (int iter = 1; iter <= cfg.N_iter; ++iter) {
        t0 = Clock::now();
        ProlongationOp op = ProlongationOp::spline;
        if (cfg.prolongation == Prolongation::sr) op = ProlongationOp::sr;
        else if (cfg.prolongation == Prolongation::hybrid) op = schedule_operator(iter, cfg.N_GAN, latched, cfg.N_iter);

        Grid next = cycle(p, prob.f(), cfg, op, gen);
        d = diff_norm(next, p);
        p = std::move(next);
        out.log.records.push_back({iter, d, rms(residual(p, prob)), op, latched, ms_since(t0)});
        out.iterations = iter;
        if (d <= cfg.S_thres) latched = true;
        if (d < cfg.tol) {
            out.converged = true;
            break;
        }
    }
    out.final_diff = d;
    out.p = std::move(p);
    return out;
}

PlainGsResult plain_gauss_seidel(const PoissonProblem& prob, const RunConfig& cfg, double tol, int max_sweeps) {
    PlainGsResult out;
    Grid p = random_initial_grid(prob.n(), cfg.seed, cfg.bounds.p_max());
    for (int k = 1; k <= max_sweeps; ++k) {
        const Grid prev = p;
        gauss_seidel_inplace(p, prob.f(), 1);
        out.final_diff = diff_norm(p, prev);
        out.sweeps = k;
        if (out.final_diff < tol) {
            out.converged = true;
            break;
        }
    }
    out.p = std::move(p);
    return out;
}

} // namespace mgsr
