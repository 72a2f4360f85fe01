#include <CLI11.hpp>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "busyq/busy_law.hpp"
#include "busyq/busy_transform.hpp"
#include "busyq/errors.hpp"
#include "busyq/inversion.hpp"
#include "busyq/model_io.hpp"
#include "busyq/moments.hpp"
#include "busyq/network.hpp"
#include "busyq/simulate.hpp"
#include "busyq/tail.hpp"
#include "busyq/verify.hpp"

namespace {

using busyq::Error;
using busyq::ErrorKind;
using nlohmann::json;

// fixed 12-significant-digit formatting keeps output byte-identical across runs
std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct OutputOptions {
    std::string format = "csv";
    std::string path;  // empty: stdout
};

void add_output_options(CLI::App* cmd, OutputOptions& out) {
    cmd->add_option("--out", out.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--output", out.path, "write to this file instead of stdout");
}

void emit(const Table& table, const OutputOptions& out) {
    std::ostringstream body;
    if (out.format == "csv") {
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            body << (c ? "," : "") << table.columns[c];
        body << "\n";
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) body << (c ? "," : "") << fmt(row[c]);
            body << "\n";
        }
    } else {
        json j;
        j["columns"] = table.columns;
        j["rows"] = table.rows;
        body << j.dump() << "\n";
    }
    if (out.path.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream f(out.path);
        if (!f) busyq::fail_validation("FILE_NOT_FOUND", "/" + out.path, "cannot open output file");
        f << body.str();
    }
}

void emit_json(const json& j, const OutputOptions& out) {
    if (out.path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream f(out.path);
        if (!f) busyq::fail_validation("FILE_NOT_FOUND", "/" + out.path, "cannot open output file");
        f << j.dump(2) << "\n";
    }
}

struct InversionOptions {
    std::string method = "auto";
    int order = 0;

    busyq::InversionConfig config() const {
        busyq::InversionConfig cfg;
        if (method == "gaver-stehfest") cfg.method = busyq::InversionMethod::GaverStehfest;
        else if (method == "talbot") cfg.method = busyq::InversionMethod::Talbot;
        cfg.order = order;
        return cfg;
    }
};

void add_inversion_options(CLI::App* cmd, InversionOptions& inv) {
    cmd->add_option("--invert-method", inv.method, "inversion method")
        ->check(CLI::IsMember({"auto", "gaver-stehfest", "talbot"}));
    cmd->add_option("--invert-order", inv.order, "inversion order (0: method default)");
}

int dispatch(CLI::App& app);

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"busy-period analysis of infinite-server queues and networks"};
    app.require_subcommand(1);

    // --- transform ---------------------------------------------------------
    auto* transform_cmd = app.add_subcommand("transform", "evaluate the busy-period transform");
    static std::string model_path, s_grid_text;
    static bool use_quadrature = false;
    static OutputOptions transform_out;
    transform_cmd->add_option("--model", model_path, "queue model JSON file")->required();
    transform_cmd->add_option("--s-grid", s_grid_text, "frequency grid start:stop:step")
        ->required();
    transform_cmd->add_flag("--quadrature", use_quadrature,
                            "force the quadrature route even when a closed form exists");
    add_output_options(transform_cmd, transform_out);
    transform_cmd->callback([] {
        auto queue = busyq::load_queue_file(model_path);
        busyq::BusyTransform bt(queue);
        auto grid = busyq::parse_grid(s_grid_text, "/s-grid");
        Table table{{"s", "value"}, {}};
        for (double s : grid.points()) {
            const double v = use_quadrature ? bt.eval_quadrature({s, 0.0}).real()
                                            : bt.eval_real(s);
            table.rows.push_back({s, v});
        }
        emit(table, transform_out);
    });

    // --- moments -----------------------------------------------------------
    auto* moments_cmd = app.add_subcommand("moments", "busy-period moments");
    static std::string moments_model, moments_method = "auto";
    static int n_max = 3;
    static OutputOptions moments_out;
    moments_cmd->add_option("--model", moments_model, "queue model JSON file")->required();
    moments_cmd->add_option("--n", n_max, "highest moment order")->required();
    moments_cmd->add_option("--method", moments_method, "auto, recursion or closed")
        ->check(CLI::IsMember({"auto", "recursion", "closed"}));
    add_output_options(moments_cmd, moments_out);
    moments_cmd->callback([] {
        auto queue = busyq::load_queue_file(moments_model);
        const auto* family = queue.service().beta_const_params();
        std::vector<double> values;
        if (moments_method == "closed" || (moments_method == "auto" && family)) {
            if (!family)
                busyq::fail_validation("METHOD_UNAVAILABLE", "/method",
                                       "closed-form moments exist only for beta-const services");
            values = busyq::beta_family_moments(family->lambda, family->rho, family->beta, n_max);
        } else {
            auto result = busyq::busy_moments(queue, n_max);
            if (result.cancellation_warning)
                std::cerr << "warning: moment recursion lost more than 8 significant digits\n";
            values = result.moments;
        }
        Table table{{"n", "moment"}, {}};
        for (int n = 1; n <= n_max; ++n)
            table.rows.push_back({static_cast<double>(n), values[n - 1]});
        emit(table, moments_out);
    });

    // --- busy-law ----------------------------------------------------------
    auto* law_cmd = app.add_subcommand("busy-law", "busy-period density and d.f. on a grid");
    static std::string law_model, law_grid_text;
    static OutputOptions law_out;
    law_cmd->add_option("--model", law_model, "queue model JSON file")->required();
    law_cmd->add_option("--grid", law_grid_text, "output grid start:stop:step")->required();
    add_output_options(law_cmd, law_out);
    law_cmd->callback([] {
        auto queue = busyq::load_queue_file(law_model);
        auto grid = busyq::parse_grid(law_grid_text, "/grid");
        Table table{{"t", "density", "df"}, {}};
        if (const auto* constant = queue.service().constant_params()) {
            busyq::ConstantBusyLaw law(queue.lambda(), constant->alpha);
            const auto& offset = law.offset_law();
            for (double t : grid.points()) {
                const double shifted = t - constant->alpha;
                double density = 0.0;
                if (shifted >= 0.0 && !offset.density.empty()) {
                    const double x = shifted / offset.step;
                    const auto i = static_cast<std::size_t>(x);
                    if (i + 1 < offset.density.size()) {
                        const double fr = x - static_cast<double>(i);
                        density = offset.density[i] * (1 - fr) + offset.density[i + 1] * fr;
                    }
                }
                table.rows.push_back({t, density, law.df(t)});
            }
        } else {
            // internal representation always covers the full law; the grid
            // only selects what is printed
            busyq::BusyGridSpec spec;
            spec.step = std::min(queue.service().mean() / 200.0,
                                 grid.step > 0 ? grid.step : 1.0);
            auto law = busyq::general_busy_density(queue, spec);
            for (double t : grid.points()) {
                double density = 0.0;
                const double x = t / law.step;
                const auto i = static_cast<std::size_t>(x);
                if (i + 1 < law.density.size()) {
                    const double fr = x - static_cast<double>(i);
                    density = law.density[i] * (1 - fr) + law.density[i + 1] * fr;
                }
                table.rows.push_back({t, density, law.df(t)});
            }
        }
        emit(table, law_out);
    });

    // --- tail --------------------------------------------------------------
    auto* tail_cmd = app.add_subcommand("tail", "busy-period tail analysis");
    tail_cmd->require_subcommand(1);

    auto* recover_cmd =
        tail_cmd->add_subcommand("recover", "reconstruct the service tail from a busy tail");
    static std::string hbar_expr, recover_grid_text;
    static double recover_lambda = 0.0, recover_rho = 0.0;
    static InversionOptions recover_inv;
    static OutputOptions recover_out;
    recover_cmd->add_option("--hbar", hbar_expr, "tail transform, rational:\"p/q\"")->required();
    recover_cmd->add_option("--lambda", recover_lambda, "arrival rate")->required();
    recover_cmd->add_option("--rho", recover_rho, "traffic intensity")->required();
    recover_cmd->add_option("--grid", recover_grid_text, "time grid start:stop:step")->required();
    add_inversion_options(recover_cmd, recover_inv);
    add_output_options(recover_cmd, recover_out);
    recover_cmd->callback([] {
        auto hbar = busyq::parse_transform_expr(hbar_expr);
        auto tt = busyq::make_tail_transform(hbar, recover_lambda, recover_rho);
        auto grid = busyq::parse_grid(recover_grid_text, "/grid");
        auto points = grid.points();
        if (!points.empty() && points.front() == 0.0) points.erase(points.begin());
        auto tail = busyq::recover_service_tail(tt, points, recover_inv.config());
        Table table{{"t", "tail"}, {}};
        for (std::size_t i = 0; i < points.size(); ++i) table.rows.push_back({points[i], tail[i]});
        emit(table, recover_out);
    });

    auto* check_cmd = tail_cmd->add_subcommand("check", "feasibility conditions on a(t)");
    static std::string a_expr, check_grid_text;
    static double check_rho = 0.0, limit_tol = 1e-6;
    static OutputOptions check_out;
    check_cmd->add_option("--a", a_expr, "a(t): rational:\"p/q\" in t or expdecay:c,r")
        ->required();
    check_cmd->add_option("--rho", check_rho, "traffic intensity")->required();
    check_cmd->add_option("--grid", check_grid_text, "probe grid start:stop:step")->required();
    check_cmd->add_option("--limit-tol", limit_tol, "tolerance on the limit at infinity");
    add_output_options(check_cmd, check_out);
    check_cmd->callback([] {
        auto a = busyq::parse_real_expr(a_expr);
        auto grid = busyq::parse_grid(check_grid_text, "/grid");
        auto points = grid.points();
        if (!points.empty() && points.front() == 0.0) points.erase(points.begin());
        auto report = busyq::check_feasibility(a, check_rho, points, 1e-4, limit_tol);
        if (check_out.format == "csv") {
            Table table{{"t", "value", "sign"}, {}};
            for (const auto& p : report.cond1)
                table.rows.push_back({p.t, p.value, static_cast<double>(p.sign)});
            emit(table, check_out);
            std::cerr << "verdict: "
                      << (report.verdict == busyq::FeasibilityVerdict::Pass ? "PASS" : "FAIL")
                      << " (limit estimate " << fmt(report.cond2_limit_estimate) << ")\n";
        } else {
            json j;
            j["verdict"] = report.verdict == busyq::FeasibilityVerdict::Pass ? "PASS" : "FAIL";
            j["cond1_ok"] = report.cond1_ok;
            j["cond2_ok"] = report.cond2_ok;
            j["cond2_limit_estimate"] = report.cond2_limit_estimate;
            json pts = json::array();
            for (const auto& p : report.cond1)
                pts.push_back({{"t", p.t}, {"value", p.value}, {"sign", p.sign}});
            j["cond1"] = pts;
            emit_json(j, check_out);
        }
    });

    // --- network -----------------------------------------------------------
    auto* network_cmd = app.add_subcommand("network", "open networks of infinite-server nodes");
    network_cmd->require_subcommand(1);
    auto* solve_cmd = network_cmd->add_subcommand(
        "solve", "traffic rates, sojourn transform, moments, d.f.");
    static std::string net_path, net_s_grid, net_t_grid;
    static bool want_moments = false, want_invert = false;
    static InversionOptions net_inv;
    static OutputOptions net_out;
    solve_cmd->add_option("--net", net_path, "network model JSON file")->required();
    solve_cmd->add_option("--s-grid", net_s_grid, "evaluate the transform on this grid");
    solve_cmd->add_flag("--moments", want_moments, "sojourn mean and second moment");
    solve_cmd->add_flag("--invert", want_invert, "invert the transform into a d.f.");
    solve_cmd->add_option("--grid", net_t_grid, "time grid for --invert");
    add_inversion_options(solve_cmd, net_inv);
    add_output_options(solve_cmd, net_out);
    solve_cmd->callback([] {
        auto net = busyq::load_network_file(net_path);
        busyq::SojournTransform st(net);
        if (want_moments) {
            auto m = busyq::sojourn_moments(st);
            Table table{{"mean", "second_moment", "mean_expected_visits"},
                        {{m.mean, m.second_moment, m.mean_expected_visits}}};
            emit(table, net_out);
            return;
        }
        if (want_invert) {
            if (net_t_grid.empty())
                busyq::fail_validation("GRID_INVALID", "/grid", "--invert needs --grid");
            auto grid = busyq::parse_grid(net_t_grid, "/grid");
            auto points = grid.points();
            if (!points.empty() && points.front() == 0.0) points.erase(points.begin());
            auto f = st.transform();
            busyq::TransformFn df_f{
                [f](std::complex<double> s) { return f(s) / s; }, f.complex_capable};
            auto inv = busyq::invert_df(df_f, points, net_inv.config());
            Table table{{"t", "df"}, {}};
            for (std::size_t i = 0; i < points.size(); ++i)
                table.rows.push_back({points[i], inv.values[i]});
            emit(table, net_out);
            return;
        }
        if (!net_s_grid.empty()) {
            auto grid = busyq::parse_grid(net_s_grid, "/s-grid");
            Table table{{"s", "gbar"}, {}};
            for (double s : grid.points()) table.rows.push_back({s, st.eval_real(s)});
            emit(table, net_out);
            return;
        }
        // default: the traffic solution
        auto gamma = busyq::solve_traffic(net);
        Table table{{"node", "gamma"}, {}};
        for (int i = 0; i < net.node_count(); ++i)
            table.rows.push_back({static_cast<double>(i), gamma(i)});
        emit(table, net_out);
    });

    // --- sim ---------------------------------------------------------------
    auto* sim_cmd = app.add_subcommand("sim", "discrete-event verification oracle");
    sim_cmd->require_subcommand(1);

    auto* sim_queue_cmd = sim_cmd->add_subcommand("queue", "sample busy periods");
    static std::string sim_model;
    static busyq::SimConfig sim_cfg;
    static int replications = 1;
    static OutputOptions sim_out;
    sim_queue_cmd->add_option("--model", sim_model, "queue model JSON file")->required();
    sim_queue_cmd->add_option("--periods", sim_cfg.periods, "busy periods to collect");
    sim_queue_cmd->add_option("--horizon", sim_cfg.horizon, "or a time horizon");
    sim_queue_cmd->add_option("--warmup", sim_cfg.warmup, "discard periods starting earlier");
    sim_queue_cmd->add_option("--seed", sim_cfg.seed, "random seed");
    sim_queue_cmd->add_option("--replications", replications, "independent substreams");
    add_output_options(sim_queue_cmd, sim_out);
    sim_queue_cmd->callback([] {
        auto queue = busyq::load_queue_file(sim_model);
        busyq::BusyPeriodSample sample =
            replications > 1 ? busyq::simulate_queue_replicated(queue, sim_cfg, replications)
                             : busyq::simulate_queue(queue, sim_cfg);
        Table table{{"period", "busy", "idle"}, {}};
        for (std::size_t i = 0; i < sample.busy.size(); ++i)
            table.rows.push_back({static_cast<double>(i), sample.busy[i], sample.idle[i]});
        emit(table, sim_out);
        std::cerr << "periods " << sample.busy.size() << ", mean " << fmt(sample.busy_mean())
                  << ", stderr " << fmt(sample.busy_stderr()) << "\n";
    });

    auto* sim_net_cmd = sim_cmd->add_subcommand("network", "sample network sojourn times");
    static std::string sim_net_path;
    static long customers = 0;
    static busyq::SimConfig sim_net_cfg;
    static OutputOptions sim_net_out;
    sim_net_cmd->add_option("--net", sim_net_path, "network model JSON file")->required();
    sim_net_cmd->add_option("--customers", customers, "customers to push through")->required();
    sim_net_cmd->add_option("--seed", sim_net_cfg.seed, "random seed");
    add_output_options(sim_net_cmd, sim_net_out);
    sim_net_cmd->callback([] {
        auto net = busyq::load_network_file(sim_net_path);
        auto sojourns = busyq::simulate_network(net, customers, sim_net_cfg);
        Table table{{"customer", "sojourn"}, {}};
        for (std::size_t i = 0; i < sojourns.size(); ++i)
            table.rows.push_back({static_cast<double>(i), sojourns[i]});
        emit(table, sim_net_out);
    });

    // --- verify ------------------------------------------------------------
    auto* verify_cmd = app.add_subcommand("verify", "run the cross-module acceptance checks");
    verify_cmd->callback([] {
        const auto results = busyq::run_acceptance(&std::cout);
        if (!busyq::all_passed(results))
            busyq::fail_numerical("VERIFY_FAILED", "one or more acceptance checks failed");
    });

    try {
        CLI11_PARSE(app, argc, argv);
    } catch (const Error& e) {
        json err;
        err["error"] = {{"kind", e.kind() == ErrorKind::Validation ? "validation" : "numerical"},
                        {"code", e.code()},
                        {"path", e.path()},
                        {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return e.kind() == ErrorKind::Validation ? 1 : 2;
    } catch (const std::exception& e) {
        json err;
        err["error"] = {{"kind", "numerical"}, {"code", "INTERNAL"}, {"path", ""},
                        {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
    return 0;
}
