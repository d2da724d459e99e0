#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dpcpower/analytic.hpp"
#include "dpcpower/channel.hpp"
#include "dpcpower/cli.hpp"
#include "dpcpower/config.hpp"
#include "dpcpower/distributions.hpp"
#include "dpcpower/errors.hpp"
#include "dpcpower/experiment.hpp"
#include "dpcpower/power.hpp"
#include "dpcpower/report.hpp"
#include "dpcpower/selection.hpp"

namespace py = pybind11;
using namespace dpcpower;

namespace {

SinrTargets targets_of(const py::object& gamma, double sigma_sq, std::size_t users) {
    if (py::isinstance<py::float_>(gamma) || py::isinstance<py::int_>(gamma)) {
        return SinrTargets::uniform(gamma.cast<double>(), sigma_sq, users);
    }
    return SinrTargets{gamma.cast<std::vector<double>>(), sigma_sq};
}

ChannelSet channel_set_of(const std::vector<ChannelVector>& users) {
    if (users.empty()) {
        throw DimensionError("need at least one channel");
    }
    return ChannelSet(static_cast<int>(users.front().size()), users);
}

py::dict solution_dict(const PowerSolution& s) {
    py::dict d;
    d["per_user_power"] = s.per_user_power;
    d["total_power"] = s.total_power;
    d["beamformers"] = s.beamformers;
    d["achieved_sinr"] = s.achieved_sinr;
    d["method"] = std::string(to_string(s.method));
    return d;
}

Algorithm algorithm_of(const std::string& name) {
    auto a = parse_algorithm(name);
    if (!a) {
        throw ConfigError("unknown algorithm '" + name + "'");
    }
    return *a;
}

py::dict row_dict(const ResultRow& r) {
    py::dict d;
    d["sweep_value"] = r.sweep_value;
    d["M"] = r.M;
    d["K"] = r.K;
    d["Ks"] = r.Ks;
    d["algorithm"] = r.algorithm;
    d["power_method"] = r.power_method;
    d["mc_mean"] = r.mc_mean;
    d["mc_stderr"] = r.mc_stderr;
    if (r.analytic) {
        d["analytic_status"] = std::string(to_string(r.analytic->status));
        d["analytic_value"] = r.analytic->ok() ? py::object(py::float_(r.analytic->value)) : py::none();
    } else {
        d["analytic_status"] = "exact_model";
        d["analytic_value"] = py::none();
    }
    d["trials"] = r.trials;
    d["failures"] = r.failures;
    d["flagged"] = r.flagged;
    d["note"] = r.note;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Minimum-power DPC user selection: channels, power, selection, analytic averages";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
    py::register_exception<DomainError>(m, "DomainError", error.ptr());
    py::register_exception<FullSpaceError>(m, "FullSpaceError", error.ptr());
    py::register_exception<RankDeficiencyError>(m, "RankDeficiencyError", error.ptr());
    py::register_exception<InfeasibleGeometryError>(m, "InfeasibleGeometryError", error.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
    py::register_exception<DivergenceError>(m, "DivergenceError", error.ptr());
    py::register_exception<BudgetError>(m, "BudgetError", error.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", error.ptr());

    m.def(
        "sample_channels",
        [](int M, int K, std::uint64_t seed, std::uint64_t stream) {
            const ChannelSet set = sample_channel_set(M, K, SeedSpec{seed, stream});
            return std::vector<ChannelVector>(set.vectors().begin(), set.vectors().end());
        },
        py::arg("M"), py::arg("K"), py::arg("seed"), py::arg("stream") = 0,
        "K i.i.d. CN(0, I_M) channel vectors");

    m.def("sin_sq_angle", [](const ChannelVector& h, const std::vector<ChannelVector>& basis) {
        return sin_sq_angle(h, basis);
    });

    m.def(
        "exact_min_power",
        [](const std::vector<ChannelVector>& ch, const py::object& gamma, double sigma_sq) {
            return solution_dict(exact_min_power(ch, targets_of(gamma, sigma_sq, ch.size())));
        },
        py::arg("channels"), py::arg("gamma"), py::arg("sigma_sq"));
    m.def(
        "approx_min_power",
        [](const std::vector<ChannelVector>& ch, const py::object& gamma, double sigma_sq) {
            return solution_dict(approx_min_power(ch, targets_of(gamma, sigma_sq, ch.size())));
        },
        py::arg("channels"), py::arg("gamma"), py::arg("sigma_sq"));
    m.def(
        "downlink_dual_solution",
        [](const std::vector<ChannelVector>& ch, const py::object& gamma, double sigma_sq) {
            return solution_dict(downlink_dual_solution(ch, targets_of(gamma, sigma_sq, ch.size())));
        },
        py::arg("channels"), py::arg("gamma"), py::arg("sigma_sq"));
    m.def(
        "evaluate_sinr",
        [](const std::vector<ChannelVector>& ch, const std::vector<ChannelVector>& beams,
           const std::vector<double>& powers, double sigma_sq) {
            return evaluate_sinr(ch, beams, powers, sigma_sq);
        },
        py::arg("channels"), py::arg("beamformers"), py::arg("powers"), py::arg("sigma_sq"));

    m.def(
        "select",
        [](const std::string& name, const std::vector<ChannelVector>& users, int Ks,
           std::uint64_t seed, double gamma, double sigma_sq, const std::string& model) {
            const ChannelSet set = channel_set_of(users);
            const Algorithm a = algorithm_of(name);
            SelectionResult r;
            switch (a) {
            case Algorithm::nus: r = select_nus(set, Ks); break;
            case Algorithm::sus: r = select_sus(set, Ks); break;
            case Algorithm::aus: r = select_aus(set, Ks); break;
            case Algorithm::rus: r = select_rus(set, Ks, SeedSpec{seed, 1}); break;
            case Algorithm::exhaustive:
                r = select_exhaustive(set, Ks, SinrTargets::uniform(gamma, sigma_sq, Ks),
                                      model == "exact" ? PowerModel::exact : PowerModel::approx);
                break;
            }
            py::dict d;
            d["encoding_order"] = r.encoding_order;
            d["selection_order"] = r.selection_order;
            return d;
        },
        py::arg("algorithm"), py::arg("channels"), py::arg("Ks"), py::arg("seed") = 0,
        py::arg("gamma") = 10.0, py::arg("sigma_sq") = 0.1, py::arg("model") = "approx",
        "User selection; indices are 0-based and position 0 is encoded first");

    m.def("alpha", &alpha, py::arg("M"), py::arg("K"));
    m.def("p_nus", &p_nus, py::arg("M"), py::arg("K"), py::arg("Ks"), py::arg("gamma"),
          py::arg("sigma_sq"));
    m.def("p_sus", &p_sus, py::arg("M"), py::arg("K"), py::arg("Ks"), py::arg("gamma"),
          py::arg("sigma_sq"));
    m.def("p_rus", &p_rus, py::arg("M"), py::arg("Ks"), py::arg("gamma"), py::arg("sigma_sq"));
    m.def("p_aus_2", &p_aus_2, py::arg("M"), py::arg("K"), py::arg("gamma"), py::arg("sigma_sq"));
    m.def("p_lower_bound_2", &p_lower_bound_2, py::arg("M"), py::arg("K"), py::arg("gamma"),
          py::arg("sigma_sq"));
    m.def(
        "analytic_average_power",
        [](const std::string& name, int M, int K, int Ks, double gamma, double sigma_sq) {
            const AnalyticValue v = analytic_average_power(algorithm_of(name), M, K, Ks, gamma, sigma_sq);
            return py::make_tuple(std::string(to_string(v.status)), v.ok() ? py::object(py::float_(v.value)) : py::none(),
                                  v.detail);
        },
        py::arg("algorithm"), py::arg("M"), py::arg("K"), py::arg("Ks"), py::arg("gamma"),
        py::arg("sigma_sq"), "(status, value or None, detail)");

    py::class_<DistributionSpec>(m, "DistributionSpec")
        .def_static("chisq", &DistributionSpec::chisq, py::arg("M"))
        .def_static("order_stat", &DistributionSpec::order_stat, py::arg("M"), py::arg("r"), py::arg("K"))
        .def_static("not_largest", &DistributionSpec::not_largest, py::arg("M"), py::arg("K"))
        .def_static("angle", &DistributionSpec::angle, py::arg("M"), py::arg("i"))
        .def_static("angle_max", &DistributionSpec::angle_max, py::arg("M"), py::arg("K"))
        .def("__repr__", &DistributionSpec::describe);
    m.def("cdf", &cdf, py::arg("spec"), py::arg("x"));
    m.def("pdf", &pdf, py::arg("spec"), py::arg("x"));
    m.def("mean_inverse", &mean_inverse, py::arg("spec"));

    m.def(
        "run_config",
        [](const std::string& text, int workers) {
            const ExperimentConfig config = parse_config_text(text, "<python>");
            RunOptions options;
            options.workers = workers;
            ResultTable table;
            {
                py::gil_scoped_release release;
                table = run_sweep(config, options);
            }
            py::list rows;
            for (const auto& r : table) {
                rows.append(row_dict(r));
            }
            return rows;
        },
        py::arg("config_text"), py::arg("workers") = 1,
        "Parse key=value config text and run the Monte Carlo sweep");
    m.def(
        "figure_config", [](int id) { return std::string(figure_config_text(id)); },
        py::arg("figure_id"));
    m.def(
        "cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out;
            std::ostringstream err;
            const int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the command line tool in-process: (exit_code, stdout, stderr)");
}
