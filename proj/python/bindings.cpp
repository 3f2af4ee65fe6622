#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <memory>

#include "mgsr/datagen.hpp"
#include "mgsr/generator.hpp"
#include "mgsr/grid_io.hpp"
#include "mgsr/normalize.hpp"
#include "mgsr/smoother.hpp"
#include "mgsr/solver.hpp"
#include "mgsr/spectrum.hpp"
#include "mgsr/sr_prolong.hpp"
#include "mgsr/transfer.hpp"
#include "mgsr/weights.hpp"

namespace py = pybind11;
using namespace mgsr;

namespace {

using F64 = py::array_t<double, py::array::c_style | py::array::forcecast>;
using F32 = py::array_t<float, py::array::c_style | py::array::forcecast>;

Grid to_grid(const F64& a) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw py::value_error("expected a square 2-D array");
    const auto n = static_cast<int>(a.shape(0));
    return Grid(n, std::vector<double>(a.data(), a.data() + a.size()));
}

py::array_t<double> to_numpy(const Grid& g) {
    py::array_t<double> out({g.n(), g.n()});
    std::copy(g.values().begin(), g.values().end(), out.mutable_data());
    return out;
}

Tensor3 to_tensor(const F32& a) {
    if (a.ndim() != 3) throw py::value_error("expected a (C, H, W) array");
    Tensor3 t(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)), static_cast<int>(a.shape(2)));
    std::copy(a.data(), a.data() + a.size(), t.data.begin());
    return t;
}

py::array_t<float> to_numpy(const Tensor3& t) {
    py::array_t<float> out({t.channels, t.height, t.width});
    std::copy(t.data.begin(), t.data.end(), out.mutable_data());
    return out;
}

py::dict log_to_dict(const ConvergenceLog& log) {
    const auto n = static_cast<py::ssize_t>(log.records.size());
    py::array_t<int> iter(n), latched(n);
    py::array_t<double> diff(n), res(n), ms(n);
    py::list ops;
    for (py::ssize_t k = 0; k < n; ++k) {
        const LogRecord& r = log.records[static_cast<std::size_t>(k)];
        iter.mutable_at(k) = r.iter;
        diff.mutable_at(k) = r.diff_norm;
        res.mutable_at(k) = r.residual_norm;
        ops.append(to_string(r.op));
        latched.mutable_at(k) = r.switch_latched;
        ms.mutable_at(k) = r.wall_ms;
    }
    py::dict d;
    d["iter"] = iter;
    d["diff_norm"] = diff;
    d["residual_norm"] = res;
    d["operator"] = ops;
    d["switch_latched"] = latched;
    d["wall_ms"] = ms;
    return d;
}

py::dict windows_to_dict(const std::vector<WindowPair>& pairs) {
    const auto n = static_cast<py::ssize_t>(pairs.size());
    py::array_t<float> lr({n, py::ssize_t{kLowResWindow}, py::ssize_t{kLowResWindow}});
    py::array_t<float> hr({n, py::ssize_t{kHighResWindow}, py::ssize_t{kHighResWindow}});
    py::array_t<std::uint32_t> field(n), level(n), row(n), col(n);
    float* lp = lr.mutable_data();
    float* hp = hr.mutable_data();
    for (py::ssize_t k = 0; k < n; ++k) {
        const WindowPair& w = pairs[static_cast<std::size_t>(k)];
        lp = std::copy(w.lr.begin(), w.lr.end(), lp);
        hp = std::copy(w.hr.begin(), w.hr.end(), hp);
        field.mutable_at(k) = w.field_id;
        level.mutable_at(k) = w.level;
        row.mutable_at(k) = static_cast<std::uint32_t>(w.corner_row());
        col.mutable_at(k) = static_cast<std::uint32_t>(w.corner_col());
    }
    py::dict d;
    d["lr"] = lr;
    d["hr"] = hr;
    d["field_id"] = field;
    d["level"] = level;
    d["corner_row"] = row;
    d["corner_col"] = col;
    return d;
}

PoissonSymbol symbol_from(const std::string& s) {
    if (s == "discrete") return PoissonSymbol::discrete;
    if (s == "continuous") return PoissonSymbol::continuous;
    throw py::value_error("symbol must be 'discrete' or 'continuous'");
}

} // namespace

PYBIND11_MODULE(_mgsr, m) {
    m.doc() = "Hybrid spline / super-resolution multigrid Poisson solver";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    // Leaked on purpose: the type must outlive every translator call.
    static const py::handle weight_error =
        py::exception<WeightFileError>(m, "WeightFileError", PyExc_RuntimeError).release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const WeightFileError& e) {
            py::object err = weight_error(e.what());
            err.attr("kind") = to_string(e.kind());
            PyErr_SetObject(weight_error.ptr(), err.ptr());
        }
    });

    py::class_<NormBounds>(m, "NormBounds")
        .def(py::init<>())
        .def(py::init<double, double>(), py::arg("p_min"), py::arg("p_max"))
        .def_property_readonly("p_min", &NormBounds::p_min)
        .def_property_readonly("p_max", &NormBounds::p_max)
        .def("__repr__", [](const NormBounds& b) {
            return "NormBounds(p_min=" + std::to_string(b.p_min()) + ", p_max=" + std::to_string(b.p_max()) + ")";
        });

    m.def("normalize", [](const F64& p, const NormBounds& b) {
        const Normalized n = normalize(to_grid(p), b);
        return py::make_tuple(to_numpy(n.q), to_numpy(n.signs));
    }, py::arg("p"), py::arg("bounds") = NormBounds{}, "Returns (q, signs).");
    m.def("denormalize", [](const F64& q, std::optional<F64> signs, const NormBounds& b) {
        return to_numpy(signs ? denormalize(to_grid(q), to_grid(*signs), b) : denormalize(to_grid(q), b));
    }, py::arg("q"), py::arg("signs") = py::none(), py::arg("bounds") = NormBounds{},
          "Without signs, sgn(q) is used.");

    m.def("apply_laplacian", [](const F64& p) { return to_numpy(apply_laplacian(to_grid(p))); });
    m.def("residual", [](const F64& p, const F64& f) { return to_numpy(residual(to_grid(p), to_grid(f))); });
    m.def("gauss_seidel", [](const F64& p, const F64& f, int sweeps) {
        Grid g = to_grid(p);
        gauss_seidel_inplace(g, to_grid(f), sweeps);
        return to_numpy(g);
    }, py::arg("p"), py::arg("f"), py::arg("sweeps") = 1);
    m.def("restrict_injection", [](const F64& fine, int s, bool subtract_mean) {
        return to_numpy(restrict_injection(to_grid(fine), TransferRatio(s),
                                           subtract_mean ? MeanHandling::subtract : MeanHandling::keep));
    }, py::arg("fine"), py::arg("s"), py::arg("subtract_mean") = true);
    m.def("spline_prolong", [](const F64& coarse, int s) {
        return to_numpy(spline_prolong(to_grid(coarse), TransferRatio(s)));
    }, py::arg("coarse"), py::arg("s"));

    py::class_<GeneratorWeights>(m, "GeneratorWeights")
        .def_property_readonly("residual_blocks", &GeneratorWeights::residual_blocks)
        .def_property_readonly("upscale_per_pass", &GeneratorWeights::upscale_per_pass)
        .def("tensors", [](const GeneratorWeights& w) {
            py::dict d;
            for (const NamedTensor& t : w.tensors()) {
                std::vector<py::ssize_t> shape(t.dims.begin(), t.dims.end());
                py::array_t<float> a(shape);
                std::copy(t.values.begin(), t.values.end(), a.mutable_data());
                d[py::str(t.name)] = a;
            }
            return d;
        }, "Name -> float32 array.");
    m.def("load_weights", &load_weights, py::arg("path"));
    m.def("save_weights", &save_weights, py::arg("path"), py::arg("weights"));
    m.def("make_nearest_neighbor_weights", &make_nearest_neighbor_weights, py::arg("residual_blocks"));
    m.def("make_random_weights", &make_random_weights, py::arg("residual_blocks"), py::arg("seed"));

    py::class_<Generator, std::shared_ptr<Generator>>(m, "Generator")
        .def(py::init<const GeneratorWeights&>(), py::arg("weights"))
        .def(py::init([](const std::filesystem::path& p) { return std::make_shared<Generator>(load_weights(p)); }),
             py::arg("path"))
        .def_property_readonly("residual_blocks", &Generator::residual_blocks)
        .def("forward", [](const Generator& g, const F32& x) {
            Tensor3 t = to_tensor(x);
            Tensor3 y;
            {
                py::gil_scoped_release release;
                y = g.forward(t);
            }
            return to_numpy(y);
        }, py::arg("x"), "(3, H, W) float32 -> (3, 2H, 2W).");

    m.def("sr_prolong", [](const F64& coarse, int s, const Generator& g, const NormBounds& b) {
        const Grid c = to_grid(coarse);
        Grid out;
        {
            py::gil_scoped_release release;
            out = sr_prolong(c, TransferRatio(s), g, b);
        }
        return to_numpy(out);
    }, py::arg("coarse"), py::arg("s"), py::arg("generator"), py::arg("bounds") = NormBounds{});

    py::enum_<Prolongation>(m, "Prolongation")
        .value("spline", Prolongation::spline)
        .value("sr", Prolongation::sr)
        .value("hybrid", Prolongation::hybrid);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("N_iter", &RunConfig::N_iter)
        .def_readwrite("N_grid", &RunConfig::N_grid)
        .def_readwrite("r_min", &RunConfig::r_min)
        .def_readwrite("N_smooth_pre", &RunConfig::N_smooth_pre)
        .def_readwrite("N_smooth", &RunConfig::N_smooth)
        .def_readwrite("N_step", &RunConfig::N_step)
        .def_readwrite("N_GAN", &RunConfig::N_GAN)
        .def_readwrite("S_thres", &RunConfig::S_thres)
        .def_readwrite("tol", &RunConfig::tol)
        .def_readwrite("prolongation", &RunConfig::prolongation)
        .def_readwrite("weights", &RunConfig::weights)
        .def_readwrite("bounds", &RunConfig::bounds)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("coarse_sweeps", &RunConfig::coarse_sweeps)
        .def_readwrite("cgc_damping", &RunConfig::cgc_damping)
        .def("validate", &RunConfig::validate)
        .def("level_sides", &RunConfig::level_sides)
        .def("to_json", [](const RunConfig& c) { return to_json(c); })
        .def_static("from_json", [](const std::string& text) { return parse_run_config(text); }, py::arg("text"));

    m.def("parse_ratio", &parse_ratio, py::arg("text"));
    m.def("schedule_operator", [](int iter, double n_gan, bool latched, int n_iter) {
        return std::string(to_string(schedule_operator(iter, n_gan, latched, n_iter)));
    }, py::arg("iter"), py::arg("n_gan"), py::arg("switch_latched"), py::arg("n_iter") = 0);

    m.def("solve", [](const F64& f, RunConfig cfg, std::shared_ptr<Generator> gen) {
        const PoissonProblem prob(to_grid(f));
        cfg.N_grid = prob.f().n();
        SolveResult r;
        {
            py::gil_scoped_release release;
            r = solve(prob, cfg, gen.get());
        }
        py::dict d;
        d["p"] = to_numpy(r.p);
        d["log"] = log_to_dict(r.log);
        d["converged"] = r.converged;
        d["iterations"] = r.iterations;
        d["final_diff"] = r.final_diff;
        return d;
    }, py::arg("f"), py::arg("config") = RunConfig{}, py::arg("generator") = nullptr,
          "N_grid is taken from f. Returns a dict with p, log, converged, iterations, final_diff.");

    m.def("single_mode_field", [](int n, int k) {
        const ModeField mf = single_mode_field(n, k);
        return py::make_tuple(to_numpy(mf.p), to_numpy(mf.f));
    }, py::arg("n"), py::arg("k"), "Returns (p, f).");
    m.def("turbulent_source", [](int n, int k_peak, std::uint64_t seed) {
        const TurbulentSource t = turbulent_source(n, k_peak, seed);
        py::dict d;
        d["f"] = to_numpy(t.f);
        d["u"] = to_numpy(t.flow.u);
        d["v"] = to_numpy(t.flow.v);
        d["p_oracle"] = to_numpy(t.p_oracle);
        return d;
    }, py::arg("n"), py::arg("k_peak"), py::arg("seed"));
    m.def("spectral_poisson_solve", [](const F64& f, const std::string& symbol) {
        return to_numpy(spectral_poisson_solve(to_grid(f), symbol_from(symbol)));
    }, py::arg("f"), py::arg("symbol") = "discrete");
    m.def("power_spectrum", [](const F64& p, bool peak_normalize) {
        const Spectrum s = power_spectrum(to_grid(p), peak_normalize);
        return py::make_tuple(py::array_t<int>(static_cast<py::ssize_t>(s.k.size()), s.k.data()),
                              py::array_t<double>(static_cast<py::ssize_t>(s.power.size()), s.power.data()));
    }, py::arg("p"), py::arg("peak_normalize") = false, "Returns (k, power).");

    m.def("extract_windows", [](const std::vector<F64>& fields, int count, std::uint64_t seed, const NormBounds& b,
                                std::optional<double> peak) {
        std::vector<Grid> grids;
        for (const auto& f : fields) grids.push_back(to_grid(f));
        return windows_to_dict(extract_windows(grids, count, seed, b, WindowOptions{peak}));
    }, py::arg("fields"), py::arg("count"), py::arg("seed"), py::arg("bounds") = NormBounds{},
          py::arg("peak") = py::none());
    m.def("load_windows", [](const std::filesystem::path& p) { return windows_to_dict(load_windows(p)); },
          py::arg("path"));

    m.def("load_grid", [](const std::filesystem::path& p) { return to_numpy(load_grid(p)); }, py::arg("path"));
    m.def("save_grid", [](const std::filesystem::path& p, const F64& g) { save_grid(p, to_grid(g)); },
          py::arg("path"), py::arg("grid"));
}
