#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pcpd/blocking.hpp"
#include "pcpd/cli.hpp"
#include "pcpd/delta_tensor.hpp"
#include "pcpd/detector.hpp"
#include "pcpd/errors.hpp"
#include "pcpd/ingest.hpp"
#include "pcpd/localizer.hpp"
#include "pcpd/mdf.hpp"
#include "pcpd/segmenter.hpp"
#include "pcpd/simgen.hpp"

#include <optional>
#include <string>

namespace py = pybind11;
using namespace pcpd;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// (n, d) -> vectors, (n, p, p) -> matrices, or an (n, n) distance matrix.
ObjectSeries to_series(const Array& a, const std::string& metric) {
    const auto info = a.request();
    const double* p = static_cast<const double*>(info.ptr);
    if (metric != "auto" && metric != "precomputed") {
        throw ConfigError("metric: expected 'auto' or 'precomputed', got '" + metric + "'");
    }
    if (metric == "precomputed") {
        if (info.ndim != 2 || info.shape[0] != info.shape[1]) {
            throw InputError("precomputed distances must be a square (n, n) array");
        }
        Eigen::MatrixXd d(info.shape[0], info.shape[1]);
        for (py::ssize_t i = 0; i < info.shape[0]; ++i) {
            for (py::ssize_t j = 0; j < info.shape[1]; ++j) {
                d(i, j) = p[i * info.shape[1] + j];
            }
        }
        return ObjectSeries::from_distance_matrix(std::move(d));
    }
    if (info.ndim == 2) {
        std::vector<Eigen::VectorXd> out;
        out.reserve(static_cast<std::size_t>(info.shape[0]));
        for (py::ssize_t i = 0; i < info.shape[0]; ++i) {
            out.emplace_back(Eigen::Map<const Eigen::VectorXd>(p + i * info.shape[1], info.shape[1]));
        }
        return ObjectSeries::from_vectors(std::move(out));
    }
    if (info.ndim == 3 && info.shape[1] == info.shape[2]) {
        const auto q = info.shape[1];
        std::vector<Eigen::MatrixXd> out;
        out.reserve(static_cast<std::size_t>(info.shape[0]));
        for (py::ssize_t i = 0; i < info.shape[0]; ++i) {
            // Row-major storage of each slice.
            Eigen::MatrixXd m(q, q);
            for (py::ssize_t r = 0; r < q; ++r) {
                for (py::ssize_t c = 0; c < q; ++c) {
                    m(r, c) = p[(i * q + r) * q + c];
                }
            }
            out.push_back(std::move(m));
        }
        return ObjectSeries::from_matrices(std::move(out));
    }
    throw InputError("objects must be an (n, d) array of vectors or an (n, p, p) array of matrices");
}

py::array_t<double> from_series(const ObjectSeries& s) {
    if (s.metric() == MetricId::frobenius) {
        const auto q = static_cast<py::ssize_t>(s.dimension());
        py::array_t<double> out({static_cast<py::ssize_t>(s.size()), q, q});
        auto v = out.mutable_unchecked<3>();
        for (std::size_t i = 0; i < s.size(); ++i) {
            for (py::ssize_t r = 0; r < q; ++r) {
                for (py::ssize_t c = 0; c < q; ++c) {
                    v(static_cast<py::ssize_t>(i), r, c) = s.matrices()[i](r, c);
                }
            }
        }
        return out;
    }
    if (s.metric() == MetricId::euclidean) {
        const auto d = static_cast<py::ssize_t>(s.dimension());
        py::array_t<double> out({static_cast<py::ssize_t>(s.size()), d});
        auto v = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < s.size(); ++i) {
            for (py::ssize_t c = 0; c < d; ++c) {
                v(static_cast<py::ssize_t>(i), c) = s.vectors()[i](c);
            }
        }
        return out;
    }
    const auto& d = s.distance_matrix();
    py::array_t<double> out({d.rows(), d.cols()});
    auto v = out.mutable_unchecked<2>();
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        for (Eigen::Index j = 0; j < d.cols(); ++j) {
            v(i, j) = d(i, j);
        }
    }
    return out;
}

DetectorConfig make_detector(double alpha, double b, std::size_t max_perms, bool early_stop, std::uint64_t seed,
                             std::size_t threads, std::optional<std::size_t> enn) {
    DetectorConfig cfg;
    cfg.alpha = alpha;
    cfg.b = b;
    cfg.max_perms = max_perms;
    cfg.early_stop = early_stop;
    cfg.master_seed = seed;
    cfg.threads = threads;
    cfg.e_nn = enn;
    cfg.validate();
    return cfg;
}

py::dict detection_dict(const DetectionOutcome& d) {
    py::dict out;
    out["B_hat"] = d.B_hat;
    out["t_hat"] = d.t_hat;
    out["tau_b_hat"] = d.tau_b_hat;
    out["p_value"] = d.p_value;
    out["stopped_at"] = d.stopped_at;
    out["decision"] = std::string(to_string(d.decision));
    out["blocks"] = d.blocks;
    return out;
}

py::dict localization_dict(const LocalizationResult& loc) {
    py::dict out;
    out["V_n"] = loc.marginal.V_n;
    py::list per_m;
    for (const auto& t : loc.marginal.per_m) {
        py::dict e;
        e["m"] = t.m;
        e["S_hat"] = t.statistic;
        e["p_value"] = t.p_value;
        e["rejected"] = t.rejected;
        per_m.append(e);
    }
    out["per_m"] = per_m;
    py::dict cls;
    for (const auto& c : loc.classifications) {
        cls[py::int_(c.m)] = py::make_tuple(c.label, c.c1, c.c2);
    }
    out["classifications"] = cls;
    out["nu_hat"] = loc.nu_hat;
    out["l_F_hat"] = loc.location.l_F_hat;
    out["tau_F_hat"] = loc.location.tau_F_hat;
    out["e_nn"] = loc.e_nn;
    return out;
}

BlockSeries blocks_of(const Array& objects, std::size_t period, const std::string& metric,
                      const std::string& remainder) {
    return blockify(to_series(objects, metric), period, parse_remainder_policy(remainder));
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Periodic change-point detection for metric-space time series";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def(
        "scan_curve",
        [](const Array& objects, std::size_t period, double b, const std::string& metric, const std::string& remainder) {
            const auto blocks = blocks_of(objects, period, metric, remainder);
            std::vector<ScanPoint> curve;
            {
                py::gil_scoped_release release;
                curve = scan_statistic_curve(DeltaTensor::build_joint(blocks), WeightSpec::unit(), b);
            }
            py::array_t<double> out({static_cast<py::ssize_t>(curve.size()), py::ssize_t{3}});
            auto v = out.mutable_unchecked<2>();
            for (std::size_t i = 0; i < curve.size(); ++i) {
                const auto r = static_cast<py::ssize_t>(i);
                v(r, 0) = static_cast<double>(curve[i].t);
                v(r, 1) = curve[i].u;
                v(r, 2) = curve[i].value;
            }
            return out;
        },
        py::arg("objects"), py::arg("period"), py::arg("b") = 0.1, py::arg("metric") = "auto",
        py::arg("remainder") = "drop", "Rows of (t, u, B_hat) over the candidate splits.");

    m.def(
        "detect",
        [](const Array& objects, std::size_t period, double alpha, double b, std::size_t max_perms, bool early_stop,
           std::uint64_t seed, std::size_t threads, const std::string& metric, const std::string& remainder) {
            const auto cfg = make_detector(alpha, b, max_perms, early_stop, seed, threads, std::nullopt);
            const auto blocks = blocks_of(objects, period, metric, remainder);
            DetectionOutcome out;
            {
                py::gil_scoped_release release;
                out = detect_single(blocks, cfg);
            }
            return detection_dict(out);
        },
        py::arg("objects"), py::arg("period"), py::arg("alpha") = 0.05, py::arg("b") = 0.1,
        py::arg("max_perms") = 500, py::arg("early_stop") = true, py::arg("seed") = 0, py::arg("threads") = 0,
        py::arg("metric") = "auto", py::arg("remainder") = "drop");

    m.def(
        "localize",
        [](const Array& objects, std::size_t period, std::optional<std::size_t> t_hat, double alpha, double b,
           std::size_t max_perms, bool early_stop, std::uint64_t seed, std::size_t threads,
           std::optional<std::size_t> enn, const std::string& metric, const std::string& remainder) {
            const auto cfg = make_detector(alpha, b, max_perms, early_stop, seed, threads, enn);
            const auto blocks = blocks_of(objects, period, metric, remainder);
            py::dict out;
            LocalizationResult loc;
            {
                py::gil_scoped_release release;
                if (!t_hat) {
                    t_hat = detect_single(blocks, cfg).t_hat;
                }
                loc = localize(blocks, *t_hat, cfg);
            }
            out = localization_dict(loc);
            out["t_hat"] = *t_hat;
            return out;
        },
        py::arg("objects"), py::arg("period"), py::arg("t_hat") = py::none(), py::arg("alpha") = 0.05,
        py::arg("b") = 0.1, py::arg("max_perms") = 500, py::arg("early_stop") = true, py::arg("seed") = 0,
        py::arg("threads") = 0, py::arg("enn") = py::none(), py::arg("metric") = "auto",
        py::arg("remainder") = "drop",
        "Within-block localization at split t_hat; runs the detector first when t_hat is None.");

    m.def(
        "segment",
        [](const Array& objects, std::size_t period, double alpha, double b, std::size_t max_perms, std::uint64_t seed,
           std::size_t threads, std::optional<std::size_t> min_interval_len, const std::string& metric,
           const std::string& remainder) {
            const auto cfg = make_detector(alpha, b, max_perms, true, seed, threads, std::nullopt);
            SegmentationConfig seg;
            seg.min_interval_len = min_interval_len;
            const auto blocks = blocks_of(objects, period, metric, remainder);
            SegmentationResult res;
            {
                py::gil_scoped_release release;
                res = segment_multiple(blocks, cfg, seg);
            }
            py::list out;
            for (const auto& cp : res.change_points) {
                py::dict e;
                e["t_hat"] = cp.t_hat;
                e["l_F_hat"] = cp.l_F_hat;
                e["tau_F_hat"] = cp.tau_F_hat;
                e["p_value"] = cp.p_value;
                e["interval"] = py::make_tuple(cp.interval.lo, cp.interval.hi);
                e["nu_hat"] = cp.localization ? py::cast(cp.localization->nu_hat) : py::none();
                out.append(e);
            }
            return out;
        },
        py::arg("objects"), py::arg("period"), py::arg("alpha") = 0.05, py::arg("b") = 0.1,
        py::arg("max_perms") = 500, py::arg("seed") = 0, py::arg("threads") = 0,
        py::arg("min_interval_len") = py::none(), py::arg("metric") = "auto", py::arg("remainder") = "drop");

    m.def(
        "mcvm",
        [](const Array& first, const Array& second, const std::string& metric) {
            return mcvm_two_sample(to_series(first, metric), to_series(second, metric));
        },
        py::arg("first"), py::arg("second"), py::arg("metric") = "auto");

    m.def(
        "final_location",
        [](std::size_t t_hat, std::size_t nu_hat, std::size_t period, std::size_t n) {
            const auto loc = final_location(t_hat, nu_hat, period, n);
            return py::make_tuple(loc.l_F_hat, loc.tau_F_hat);
        },
        py::arg("t_hat"), py::arg("nu_hat"), py::arg("period"), py::arg("n"));

    m.def(
        "generate_networks",
        [](std::size_t nodes, std::size_t period, std::size_t blocks, double eta, double tau, std::size_t nu_star,
           double day_factor, const std::string& layout, std::uint64_t seed) {
            SimConfig sim;
            sim.nodes = nodes;
            sim.period = period;
            sim.blocks = blocks;
            sim.eta = eta;
            sim.tau = tau;
            sim.nu_star = nu_star;
            sim.day_factor = day_factor;
            sim.layout = parse_network_layout(layout);
            sim.validate();
            return from_series(generate_periodic_network_series(sim, seed));
        },
        py::arg("nodes") = 20, py::arg("period") = 13, py::arg("blocks") = 50, py::arg("eta") = 0.0,
        py::arg("tau") = 0.5, py::arg("nu_star") = 10, py::arg("day_factor") = 0.0,
        py::arg("layout") = "fixed_pattern", py::arg("seed") = 1, "Graph Laplacians as an (n, p, p) array.");

    m.def(
        "generate_vectors",
        [](std::size_t dimension, std::size_t period, std::size_t blocks,
           const std::vector<std::pair<std::size_t, double>>& changes, std::uint64_t seed) {
            VectorSimConfig vc;
            vc.dimension = dimension;
            vc.period = period;
            vc.blocks = blocks;
            vc.changes = changes;
            return from_series(generate_periodic_vector_series(vc, seed));
        },
        py::arg("dimension") = 3, py::arg("period") = 4, py::arg("blocks") = 50,
        py::arg("changes") = std::vector<std::pair<std::size_t, double>>{}, py::arg("seed") = 1,
        "changes: (first affected observation, 1-based; shift) pairs.");

    m.def(
        "load_dataset",
        [](const std::string& manifest) {
            const auto ds = load_dataset(manifest);
            return py::make_tuple(from_series(ds.series), ds.period_hint);
        },
        py::arg("manifest"));

    m.def(
        "run",
        [](const std::string& config_json) {
            const auto cfg = parse_run_config(config_json);
            py::gil_scoped_release release;
            return run_command(cfg);
        },
        py::arg("config_json"), "Runs a command-line config and returns the report text.");
}
