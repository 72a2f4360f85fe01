#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>

#include "busyq/busy_law.hpp"
#include "busyq/busy_transform.hpp"
#include "busyq/errors.hpp"
#include "busyq/inversion.hpp"
#include "busyq/model_io.hpp"
#include "busyq/moments.hpp"
#include "busyq/network.hpp"
#include "busyq/rng.hpp"
#include "busyq/simulate.hpp"
#include "busyq/tail.hpp"
#include "busyq/verify.hpp"

namespace py = pybind11;
using namespace busyq;

namespace {

InversionConfig make_config(const std::string& method, int order) {
    InversionConfig cfg;
    if (method == "gaver-stehfest") cfg.method = InversionMethod::GaverStehfest;
    else if (method == "talbot") cfg.method = InversionMethod::Talbot;
    else if (method != "auto")
        fail_validation("METHOD_UNAVAILABLE", "/method", "unknown inversion method " + method);
    cfg.order = order;
    return cfg;
}

TransformFn wrap_transform(const std::function<std::complex<double>(std::complex<double>)>& f,
                           bool complex_capable) {
    return {f, complex_capable};
}

NetworkModel network_from_parts(const std::vector<double>& rates,
                                const std::vector<std::vector<double>>& routing,
                                const std::vector<ServiceModel>& services) {
    const int j = static_cast<int>(services.size());
    Eigen::VectorXd lam(j);
    for (int i = 0; i < j; ++i) lam(i) = rates.at(i);
    Eigen::MatrixXd p(j, j);
    for (int r = 0; r < j; ++r)
        for (int c = 0; c < j; ++c) p(r, c) = routing.at(r).at(c);
    return {lam, p, services};
}

}  // namespace

PYBIND11_MODULE(_busyq, m) {
    m.doc() = "busy-period analysis of infinite-server queues and networks";

    py::register_exception<Error>(m, "BusyqError");

    py::class_<rng::Stream>(m, "Stream")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def_static("substream", &rng::Stream::substream, py::arg("seed"), py::arg("index"))
        .def("uniform", &rng::Stream::uniform)
        .def("exponential", &rng::Stream::exponential, py::arg("rate"));

    py::class_<ServiceModel>(m, "ServiceModel")
        .def_static("constant", &ServiceModel::constant, py::arg("alpha"))
        .def_static("exponential", &ServiceModel::exponential, py::arg("rate"))
        .def_static("beta_const", &ServiceModel::beta_const, py::arg("lambda_"), py::arg("rho"),
                    py::arg("beta"))
        .def_static(
            "beta_general",
            [](double lambda, double rho, std::function<double(double)> beta) {
                return ServiceModel::beta_general(lambda, rho, std::move(beta));
            },
            py::arg("lambda_"), py::arg("rho"), py::arg("beta"))
        .def_static("empirical", &ServiceModel::empirical, py::arg("df"), py::arg("atom0") = 0.0)
        .def("df", &ServiceModel::df, py::arg("t"))
        .def("tail", &ServiceModel::tail, py::arg("t"))
        .def("density", &ServiceModel::density, py::arg("t"))
        .def("mean", &ServiceModel::mean)
        .def("atom", &ServiceModel::atom)
        .def("integrated_tail", &ServiceModel::integrated_tail, py::arg("t"))
        .def("sample", &ServiceModel::sample, py::arg("stream"));

    py::class_<QueueModel>(m, "QueueModel")
        .def(py::init<double, ServiceModel>(), py::arg("lambda_"), py::arg("service"))
        .def_property_readonly("lambda_", &QueueModel::lambda)
        .def_property_readonly("rho", &QueueModel::rho)
        .def_property_readonly("service", &QueueModel::service);

    m.def("parse_queue_json", [](const std::string& text) {
        return parse_queue(nlohmann::json::parse(text));
    });
    m.def("parse_network_json", [](const std::string& text) {
        return parse_network(nlohmann::json::parse(text));
    });

    py::class_<BusyTransform>(m, "BusyTransform")
        .def(py::init<QueueModel>(), py::arg("queue"))
        .def("eval", &BusyTransform::eval, py::arg("s"))
        .def("eval_real", &BusyTransform::eval_real, py::arg("s"))
        .def("eval_quadrature", &BusyTransform::eval_quadrature, py::arg("s"))
        .def_property_readonly("closed_form", &BusyTransform::closed_form)
        .def_property_readonly("truncation_point", &BusyTransform::truncation_point);

    m.def("mean_busy_period", &mean_busy_period, py::arg("queue"));

    m.def(
        "busy_moments",
        [](const QueueModel& q, int n_max) {
            auto r = busy_moments(q, n_max);
            py::dict out;
            out["moments"] = r.moments;
            out["c_values"] = r.c_values;
            out["cancellation_warning"] = r.cancellation_warning;
            return out;
        },
        py::arg("queue"), py::arg("n_max"));
    m.def("c_derivatives", [](const QueueModel& q, int n) { return c_derivatives(q, n); },
          py::arg("queue"), py::arg("n_max"));
    m.def("beta_family_moments", &beta_family_moments, py::arg("lambda_"), py::arg("rho"),
          py::arg("beta"), py::arg("n_max"));

    m.def("beta_const_service_df", &beta_const_service_df, py::arg("lambda_"), py::arg("rho"),
          py::arg("beta"), py::arg("t"));
    m.def("beta_const_busy_df", &beta_const_busy_df, py::arg("lambda_"), py::arg("rho"),
          py::arg("beta"), py::arg("t"));

    py::class_<AtomicLaw>(m, "AtomicLaw")
        .def_readonly("atom0", &AtomicLaw::atom0)
        .def_readonly("step", &AtomicLaw::step)
        .def_readonly("density", &AtomicLaw::density)
        .def("df", &AtomicLaw::df, py::arg("t"))
        .def("mean", &AtomicLaw::mean)
        .def("total_mass", &AtomicLaw::total_mass);

    m.def(
        "general_busy_density",
        [](const QueueModel& q, double step, double horizon) {
            BusyGridSpec spec;
            spec.step = step;
            spec.horizon = horizon;
            return general_busy_density(q, spec);
        },
        py::arg("queue"), py::arg("step") = 0.0, py::arg("horizon") = 0.0);

    m.def(
        "beta_general_busy_df",
        [](double lambda, double rho, std::function<double(double)> beta,
           const std::vector<double>& grid) {
            return beta_general_busy_df(lambda, rho, beta, grid);
        },
        py::arg("lambda_"), py::arg("rho"), py::arg("beta"), py::arg("grid"));

    py::class_<ConstantBusyLaw>(m, "ConstantBusyLaw")
        .def(py::init([](double lambda, double alpha) {
                 return ConstantBusyLaw(lambda, alpha);
             }),
             py::arg("lambda_"), py::arg("alpha"))
        .def("df", &ConstantBusyLaw::df, py::arg("t"))
        .def("mean", &ConstantBusyLaw::mean)
        .def("sample", &ConstantBusyLaw::sample, py::arg("stream"));

    m.def(
        "invert",
        [](const std::function<std::complex<double>(std::complex<double>)>& f, double t,
           bool complex_capable, const std::string& method, int order) {
            return invert(wrap_transform(f, complex_capable), t, make_config(method, order));
        },
        py::arg("transform"), py::arg("t"), py::arg("complex_capable") = true,
        py::arg("method") = "auto", py::arg("order") = 0);
    m.def(
        "invert_df",
        [](const std::function<std::complex<double>(std::complex<double>)>& f,
           const std::vector<double>& grid, bool complex_capable, const std::string& method,
           int order) {
            auto r = invert_df(wrap_transform(f, complex_capable), grid,
                               make_config(method, order));
            py::dict out;
            out["values"] = r.values;
            out["max_violation"] = r.max_violation;
            return out;
        },
        py::arg("transform"), py::arg("grid"), py::arg("complex_capable") = true,
        py::arg("method") = "auto", py::arg("order") = 0);

    m.def(
        "recover_service_tail",
        [](const std::function<std::complex<double>(std::complex<double>)>& hbar, double lambda,
           double rho, const std::vector<double>& grid, const std::string& method, int order) {
            auto tt = make_tail_transform(wrap_transform(hbar, true), lambda, rho);
            return recover_service_tail(tt, grid, make_config(method, order));
        },
        py::arg("hbar"), py::arg("lambda_"), py::arg("rho"), py::arg("grid"),
        py::arg("method") = "auto", py::arg("order") = 0);

    m.def(
        "check_feasibility",
        [](const std::function<double(double)>& a, double rho, const std::vector<double>& grid,
           double deriv_step_rel, double limit_tol) {
            auto r = check_feasibility(a, rho, grid, deriv_step_rel, limit_tol);
            py::dict out;
            out["verdict"] = r.verdict == FeasibilityVerdict::Pass ? "PASS" : "FAIL";
            out["cond1_ok"] = r.cond1_ok;
            out["cond2_ok"] = r.cond2_ok;
            out["cond2_limit_estimate"] = r.cond2_limit_estimate;
            py::list points;
            for (const auto& p : r.cond1) {
                py::dict d;
                d["t"] = p.t;
                d["value"] = p.value;
                d["sign"] = p.sign;
                points.append(d);
            }
            out["cond1"] = points;
            return out;
        },
        py::arg("a"), py::arg("rho"), py::arg("grid"), py::arg("deriv_step_rel") = 1e-4,
        py::arg("limit_tol") = 1e-6);

    py::class_<NetworkModel>(m, "NetworkModel")
        .def(py::init(&network_from_parts), py::arg("exogenous_rates"), py::arg("routing"),
             py::arg("services"))
        .def_property_readonly("node_count", &NetworkModel::node_count)
        .def_property_readonly("total_rate", &NetworkModel::total_rate)
        .def_property_readonly("spectral_radius", &NetworkModel::spectral_radius)
        .def("exit_probabilities", [](const NetworkModel& net) {
            const Eigen::VectorXd q = net.exit_probabilities();
            return std::vector<double>(q.data(), q.data() + q.size());
        });

    m.def("solve_traffic", [](const NetworkModel& net) {
        const Eigen::VectorXd gamma = solve_traffic(net);
        return std::vector<double>(gamma.data(), gamma.data() + gamma.size());
    });

    py::class_<SojournTransform>(m, "SojournTransform")
        .def(py::init<NetworkModel>(), py::arg("net"))
        .def("eval", &SojournTransform::eval, py::arg("s"))
        .def("eval_real", &SojournTransform::eval_real, py::arg("s"))
        .def("eval_neumann", &SojournTransform::eval_neumann, py::arg("s"),
             py::arg("term_tol") = 1e-12)
        .def_property_readonly("complex_capable", &SojournTransform::complex_capable)
        .def(
            "invert_df",
            [](const SojournTransform& st, const std::vector<double>& grid,
               const std::string& method, int order) {
                TransformFn f = st.transform();
                TransformFn df_f{[f](std::complex<double> s) { return f(s) / s; },
                                 f.complex_capable};
                return invert_df(df_f, grid, make_config(method, order)).values;
            },
            py::arg("grid"), py::arg("method") = "auto", py::arg("order") = 0);

    m.def("sojourn_moments", [](const SojournTransform& st) {
        auto r = sojourn_moments(st);
        py::dict out;
        out["mean"] = r.mean;
        out["second_moment"] = r.second_moment;
        out["mean_expected_visits"] = r.mean_expected_visits;
        return out;
    });

    m.def(
        "simulate_queue",
        [](const QueueModel& q, long periods, std::uint64_t seed, double horizon, double warmup,
           int replications) {
            SimConfig cfg;
            cfg.periods = periods;
            cfg.seed = seed;
            cfg.horizon = horizon;
            cfg.warmup = warmup;
            auto sample = replications > 1 ? simulate_queue_replicated(q, cfg, replications)
                                           : simulate_queue(q, cfg);
            py::dict out;
            out["busy"] = sample.busy;
            out["idle"] = sample.idle;
            return out;
        },
        py::arg("queue"), py::arg("periods") = 0, py::arg("seed") = 1, py::arg("horizon") = 0.0,
        py::arg("warmup") = 0.0, py::arg("replications") = 1);

    m.def(
        "simulate_network",
        [](const NetworkModel& net, long customers, std::uint64_t seed) {
            SimConfig cfg;
            cfg.seed = seed;
            return simulate_network(net, customers, cfg);
        },
        py::arg("net"), py::arg("customers"), py::arg("seed") = 1);

    m.def("ks_distance",
          [](std::vector<double> samples, const std::function<double(double)>& df) {
              return ks_distance(std::move(samples), df);
          },
          py::arg("samples"), py::arg("df"));

    m.def("run_acceptance", [] {
        py::list out;
        for (const auto& r : run_acceptance(nullptr)) {
            py::dict d;
            d["name"] = r.name;
            d["pass"] = r.pass;
            d["detail"] = r.detail;
            out.append(d);
        }
        return out;
    });
}
