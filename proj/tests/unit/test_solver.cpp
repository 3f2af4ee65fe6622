#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mgsr/datagen.hpp"
#include "mgsr/solver.hpp"

using namespace mgsr;
using Op = ProlongationOp;

TEST_CASE("mod-rule schedule") {
    std::vector<Op> ops;
    for (int i = 1; i <= 5; ++i) ops.push_back(schedule_operator(i, 5.0, false));
    CHECK(ops == std::vector<Op>{Op::sr, Op::sr, Op::sr, Op::sr, Op::spline});

    CHECK(schedule_operator(1, 0.2, false) == Op::spline);
    CHECK(schedule_operator(5, 0.2, false) == Op::sr);
    CHECK(schedule_operator(10, 0.2, false) == Op::sr);
    CHECK(schedule_operator(7, 0.2, false) == Op::spline);

    for (int i = 1; i <= 6; ++i) CHECK(schedule_operator(i, 1.0, false) == (i % 2 ? Op::sr : Op::spline));
}

TEST_CASE("latch selects the second operator") {
    for (double n_gan : {1.0 / 300, 0.2, 1.0, 5.0, 300.0})
        for (int i = 1; i <= 12; ++i)
            CHECK(schedule_operator(i, n_gan, true) == (n_gan < 1 ? Op::sr : Op::spline));
}

TEST_CASE("edge-case ratios pin one operator over the run") {
    for (int i = 1; i <= 300; ++i) {
        CHECK(schedule_operator(i, 1.0 / 300, false, 300) == Op::spline);
        CHECK(schedule_operator(i, 300.0, false, 300) == Op::sr);
    }
    // Without the run length the bare mod rule applies.
    CHECK(schedule_operator(300, 1.0 / 300, false) == Op::sr);
}

TEST_CASE("config validation") {
    RunConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.level_sides() == std::vector<int>{96, 6});

    RunConfig deep;
    deep.N_grid = 192;
    deep.N_step = 1;
    deep.r_min = 24;
    CHECK(deep.level_sides() == std::vector<int>{192, 96, 48, 24});
    deep.r_min = 12;
    CHECK(deep.level_sides() == std::vector<int>{192, 96, 48, 24, 12});

    auto bad = [](auto mutate) {
        RunConfig r;
        mutate(r);
        CHECK_THROWS_AS(r.validate(), ConfigError);
    };
    bad([](RunConfig& r) { r.tol = 0; });
    bad([](RunConfig& r) { r.N_GAN = 0; });
    bad([](RunConfig& r) { r.N_grid = 100; });
    bad([](RunConfig& r) { r.N_step = 5; });
    bad([](RunConfig& r) { r.N_grid = 48, r.N_step = 4; });
    bad([](RunConfig& r) { r.prolongation = Prolongation::sr, r.N_step = 3, r.N_grid = 96; });
    bad([](RunConfig& r) { r.prolongation = Prolongation::hybrid, r.N_grid = 64; });
}

TEST_CASE("config JSON") {
    const RunConfig c = parse_run_config(
        R"({"N_iter": 50, "N_GAN": "1/300", "S_thres": 1e-5, "prolongation": "hybrid", "weights": "w.mgsr",
            "p_min": 1e-9, "seed": 42, "cgc_damping": 0.5})");
    CHECK(c.N_iter == 50);
    CHECK(c.N_GAN == doctest::Approx(1.0 / 300));
    CHECK(c.S_thres == 1e-5);
    CHECK(c.prolongation == Prolongation::hybrid);
    CHECK(c.weights == "w.mgsr");
    CHECK(c.bounds.p_min() == 1e-9);
    CHECK(c.seed == 42);
    CHECK(c.cgc_damping == 0.5);

    const RunConfig again = parse_run_config(to_json(c));
    CHECK(to_json(again) == to_json(c));

    CHECK_THROWS_AS(parse_run_config("{bad"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("[1]"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"N_itr": 3})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"N_iter": 2.5})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"prolongation": "bicubic"})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"p_min": 1})"), ConfigError);
    CHECK(parse_ratio("1/300") == doctest::Approx(1.0 / 300));
    CHECK(parse_ratio("0.2") == 0.2);
    CHECK_THROWS_AS(parse_ratio("1/0"), ConfigError);
    CHECK_THROWS_AS(parse_ratio("abc"), ConfigError);
}

TEST_CASE("v_cycle fixed points and residual reduction") {
    RunConfig cfg;
    const PoissonProblem zero(Grid(96));
    CHECK(v_cycle(Grid(96), zero, cfg, Op::spline) == Grid(96));

    const auto m = single_mode_field(96, 2);
    const PoissonProblem prob(m.f);
    const Grid exact = spectral_poisson_solve(m.f, PoissonSymbol::discrete);
    CHECK(diff_norm(v_cycle(exact, prob, cfg, Op::spline), exact) < 1e-12);

    Grid p = random_initial_grid(96, 1, 1e-3);
    const double before = rms(residual(p, prob));
    p = v_cycle(p, prob, cfg, Op::spline);
    CHECK(rms(residual(p, prob)) < before);
    CHECK(std::abs(mean(p)) < 1e-13);
    CHECK_THROWS_AS(v_cycle(p, prob, cfg, Op::sr), ConfigError);
}

TEST_CASE("spline solve of a single mode") {
    const auto m = single_mode_field(96, 2);
    const RunConfig cfg;
    const SolveResult r = solve(PoissonProblem(m.f), cfg);
    CHECK(r.converged);
    CHECK(r.iterations <= 300);
    CHECK(diff_norm(r.p, spectral_poisson_solve(m.f, PoissonSymbol::discrete)) < 1e-8);
    // Second-order discretisation error: (k h)^2 / 12 relative.
    const double h = m.f.spacing();
    CHECK(diff_norm(r.p, m.p) / rms(m.p) < 1.2 * (2 * h) * (2 * h) / 12.0);
    CHECK(std::abs(mean(r.p)) < 1e-13);

    const auto& recs = r.log.records;
    REQUIRE(recs.size() == static_cast<std::size_t>(r.iterations) + 1);
    CHECK(recs[0].op == Op::none);
    for (std::size_t i = 1; i < recs.size(); ++i) {
        CHECK(recs[i].iter == static_cast<int>(i));
        CHECK(recs[i].op == Op::spline);
    }
    // Loose trend: at least 10x reduction per 50 iterations.
    for (std::size_t i = 1; i + 50 < recs.size(); ++i) CHECK(recs[i + 50].diff_norm * 10 <= recs[i].diff_norm);
}

TEST_CASE("multi-level cycle converges") {
    RunConfig cfg;
    cfg.N_grid = 96;
    cfg.N_step = 1;
    cfg.r_min = 12;
    const auto m = single_mode_field(96, 3);
    const SolveResult r = solve(PoissonProblem(m.f), cfg);
    CHECK(cfg.level_sides().size() == 4);
    CHECK(r.converged);
    CHECK(diff_norm(r.p, spectral_poisson_solve(m.f, PoissonSymbol::discrete)) < 1e-8);
}

TEST_CASE("non-convergence is reported, not thrown") {
    RunConfig cfg;
    cfg.N_iter = 3;
    const auto m = single_mode_field(96, 2);
    const SolveResult r = solve(PoissonProblem(m.f), cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 3);
    CHECK(r.final_diff == r.log.records.back().diff_norm);
}

TEST_CASE("SR mode needs a generator or weights file") {
    RunConfig cfg;
    cfg.prolongation = Prolongation::sr;
    CHECK_THROWS_AS(solve(PoissonProblem(Grid(96)), cfg), ConfigError);
    cfg.weights = "/nonexistent.mgsr";
    CHECK_THROWS_AS(solve(PoissonProblem(Grid(96)), cfg), WeightFileError);
}

TEST_CASE("threshold of one switches at the first iteration") {
    RunConfig cfg;
    cfg.prolongation = Prolongation::hybrid;
    cfg.N_GAN = 5;
    cfg.S_thres = 1.0;
    cfg.N_iter = 4;
    const Generator g(make_nearest_neighbor_weights(0));
    const auto m = single_mode_field(96, 2);
    const SolveResult r = solve(PoissonProblem(m.f), cfg, &g);
    CHECK(r.log.records[1].switch_latched);
    for (std::size_t i = 1; i < r.log.records.size(); ++i) CHECK(r.log.records[i].op == Op::spline);
}

TEST_CASE("log CSV roundtrip and replay") {
    RunConfig cfg;
    cfg.prolongation = Prolongation::hybrid;
    cfg.N_GAN = 0.2;
    cfg.S_thres = 1e-4;
    const Generator g(make_nearest_neighbor_weights(0));
    const auto m = single_mode_field(96, 4);
    const SolveResult r = solve(PoissonProblem(m.f), cfg, &g);

    std::stringstream ss;
    r.log.write_csv(ss);
    CHECK(ss.str().rfind("iter,diff_norm,residual_norm,operator,switch_latched,wall_ms\n", 0) == 0);
    const ConvergenceLog back = ConvergenceLog::read_csv(ss);
    REQUIRE(back.records.size() == r.log.records.size());
    std::vector<Op> logged;
    for (std::size_t i = 0; i < back.records.size(); ++i) {
        CHECK(back.records[i].diff_norm == r.log.records[i].diff_norm);
        CHECK(back.records[i].op == r.log.records[i].op);
        if (back.records[i].iter > 0) logged.push_back(back.records[i].op);
    }
    CHECK(replay_schedule(back, cfg) == logged);
}

TEST_CASE("plain Gauss-Seidel reference") {
    const auto m = single_mode_field(32, 2);
    RunConfig cfg;
    const PlainGsResult r = plain_gauss_seidel(PoissonProblem(m.f), cfg, 1e-8, 20000);
    CHECK(r.converged);
    CHECK(r.sweeps > 100);
    CHECK(diff_norm(r.p, spectral_poisson_solve(m.f, PoissonSymbol::discrete)) < 1e-5);
}
