#include "busyq/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "busyq/busy_law.hpp"
#include "busyq/busy_transform.hpp"
#include "busyq/inversion.hpp"
#include "busyq/moments.hpp"
#include "busyq/network.hpp"
#include "busyq/quadrature.hpp"
#include "busyq/rng.hpp"
#include "busyq/simulate.hpp"
#include "busyq/tail.hpp"

namespace busyq {
namespace {

std::string format_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Reporter {
    std::vector<CheckResult>& results;
    std::ostream* progress;

    void record(const std::string& name, bool pass, const std::string& detail) {
        results.push_back({name, pass, detail});
        if (progress)
            (*progress) << (pass ? "[PASS] " : "[FAIL] ") << name << " -- " << detail << "\n";
    }
};

NetworkModel tandem_net() {
    Eigen::VectorXd lam(2);
    lam << 1.0, 0.0;
    Eigen::MatrixXd p(2, 2);
    p << 0.0, 1.0, 0.0, 0.0;
    return {lam, p, {ServiceModel::exponential(1.0), ServiceModel::exponential(1.0)}};
}

NetworkModel feedback_net() {
    Eigen::VectorXd lam(1);
    lam << 1.0;
    Eigen::MatrixXd p(1, 1);
    p << 0.5;
    return {lam, p, {ServiceModel::exponential(1.0)}};
}

NetworkModel random_net(rng::Stream& stream, int max_nodes) {
    const int j = 1 + static_cast<int>(stream.uniform() * max_nodes);
    Eigen::VectorXd lam(j);
    for (int i = 0; i < j; ++i) lam(i) = 0.1 + stream.uniform();
    Eigen::MatrixXd p(j, j);
    for (int r = 0; r < j; ++r) {
        double row = 0.0;
        for (int c = 0; c < j; ++c) {
            p(r, c) = stream.uniform();
            row += p(r, c);
        }
        const double scale = (0.2 + 0.7 * stream.uniform()) / row;
        for (int c = 0; c < j; ++c) p(r, c) *= scale;
    }
    std::vector<ServiceModel> svc;
    for (int i = 0; i < j; ++i) {
        if (stream.uniform() < 0.5)
            svc.push_back(ServiceModel::exponential(0.5 + stream.uniform()));
        else
            svc.push_back(ServiceModel::constant(0.2 + stream.uniform()));
    }
    return {lam, p, svc};
}

// 1. simulated busy-period mean vs (e^rho - 1)/lambda, 6 combinations
void check_sim_mean(Reporter& rep) {
    struct Case {
        double lambda;
        ServiceModel svc;
    };
    std::vector<Case> cases;
    cases.push_back({1.0, ServiceModel::constant(1.0)});
    cases.push_back({0.5, ServiceModel::constant(1.0)});
    cases.push_back({1.0, ServiceModel::exponential(1.0)});
    cases.push_back({0.5, ServiceModel::exponential(0.5)});
    cases.push_back({1.0, ServiceModel::beta_const(1.0, 1.0, 0.0)});
    cases.push_back({0.5, ServiceModel::beta_const(0.5, 1.0, 0.2)});
    bool pass = true;
    double worst_sigma = 0.0;
    std::uint64_t seed = 20'240'501;
    for (auto& c : cases) {
        QueueModel q(c.lambda, c.svc);
        SimConfig cfg;
        cfg.seed = seed++;
        cfg.periods = 100'000;
        auto sample = simulate_queue_replicated(q, cfg, 8);
        const double target = mean_busy_period(q);
        const double sigmas = std::abs(sample.busy_mean() - target) /
                              std::max(sample.busy_stderr(), 1e-12);
        worst_sigma = std::max(worst_sigma, sigmas);
        pass = pass && sigmas < 3.0;
    }
    rep.record("1. busy-period mean: simulation vs closed formula", pass,
               "6 (lambda, service) combinations, worst deviation " +
                   format_double(worst_sigma) + " standard errors (limit 3)");
}

// 2. moment recursion vs family closed form
void check_moment_recursion(Reporter& rep) {
    double worst = 0.0;
    for (double lambda : {0.5, 1.0, 2.0}) {
        for (double rho : {0.5, 1.0, 2.0}) {
            const double bmax = lambda / std::expm1(rho);
            for (double beta : {-0.5 * lambda, 0.0, 0.9 * bmax}) {
                QueueModel q(lambda, ServiceModel::beta_const(lambda, rho, beta));
                auto rec = busy_moments(q, 5);
                auto closed = beta_family_moments(lambda, rho, beta, 5);
                for (int n = 0; n < 5; ++n)
                    worst = std::max(worst,
                                     std::abs(rec.moments[n] - closed[n]) / closed[n]);
            }
        }
    }
    rep.record("2. moment recursion vs closed family moments", worst < 1e-6,
               "3x3x3 grid, n <= 5, worst relative error " + format_double(worst) +
                   " (limit 1e-6)");
}

// 3. constant-service derivative recursion vs direct quadrature
void check_constant_derivatives(Reporter& rep) {
    double worst = 0.0;
    for (double lambda : {0.5, 1.0}) {
        for (double alpha : {1.0, 2.0}) {
            QueueModel q(lambda, ServiceModel::constant(alpha));
            auto rec = c_derivatives(q, 6);
            for (int n = 0; n <= 6; ++n) {
                const double direct =
                    quad::integrate(
                        [&](double t) {
                            return std::pow(t, n) * std::exp(-lambda * t) * lambda;
                        },
                        0.0, alpha, {1e-14, 1e-12})
                        .value;
                const double expected = (n % 2 == 0) ? direct : -direct;
                worst = std::max(worst, std::abs(rec[n] - expected));
            }
        }
    }
    rep.record("3. constant-service derivative recursion vs quadrature", worst < 1e-8,
               "n <= 6, worst absolute error " + format_double(worst) + " (limit 1e-8)");
}

// 4. transform normalization and finite-difference mean, all variants
void check_transform_normalization(Reporter& rep) {
    std::vector<QueueModel> queues;
    queues.emplace_back(1.0, ServiceModel::constant(1.0));
    queues.emplace_back(1.0, ServiceModel::exponential(1.0));
    queues.emplace_back(1.0, ServiceModel::beta_const(1.0, 1.0, 0.0));
    queues.emplace_back(
        1.0, ServiceModel::beta_general(1.0, 1.0, [](double u) { return 0.1 * std::exp(-u); }));
    queues.emplace_back(1.0,
                        ServiceModel::empirical([](double t) { return -std::expm1(-t); }));
    double worst_norm = 0.0, worst_mean = 0.0;
    for (const auto& q : queues) {
        BusyTransform bt(q);
        worst_norm = std::max(worst_norm, std::abs(bt.eval_real(0.0) - 1.0));
        const double h = 1e-5;
        const double fd = -(bt.eval_real(h) - 1.0) / h;
        worst_mean = std::max(worst_mean,
                              std::abs(fd - mean_busy_period(q)) / mean_busy_period(q));
    }
    rep.record("4. transform normalization and mean",
               worst_norm < 1e-8 && worst_mean < 1e-3,
               "all service variants: |B(0)-1| " + format_double(worst_norm) +
                   " (limit 1e-8), FD-mean relative error " + format_double(worst_mean) +
                   " (limit 1e-3)");
}

// 5. inversion round trip of (1/s) B(s) for the family
void check_inversion_roundtrip(Reporter& rep) {
    std::vector<double> grid;
    for (double t = 0.05; t <= 10.0001; t += 0.05) grid.push_back(t);
    double worst = 0.0;
    for (double lambda : {0.5, 1.0}) {
        for (double rho : {0.5, 1.0}) {
            for (double frac : {-0.3, 0.0, 0.5}) {
                const double beta = frac * (frac < 0 ? lambda : lambda / std::expm1(rho));
                BusyTransform bt({lambda, ServiceModel::beta_const(lambda, rho, beta)});
                TransformFn f = bt.transform();
                TransformFn df_f{[f](std::complex<double> s) { return f(s) / s; }, true};
                auto inv = invert_df(df_f, grid, {InversionMethod::Talbot, 32});
                for (std::size_t i = 0; i < grid.size(); ++i)
                    worst = std::max(
                        worst, std::abs(inv.values[i] -
                                        beta_const_busy_df(lambda, rho, beta, grid[i])));
            }
        }
    }
    // pure-exponential endpoint beta = lambda/(e^rho - 1)
    double worst_exp = 0.0;
    {
        const double lambda = 1.0, rho = 1.0;
        const double beta = lambda / std::expm1(rho);
        BusyTransform bt({lambda, ServiceModel::beta_const(lambda, rho, beta)});
        TransformFn f = bt.transform();
        TransformFn df_f{[f](std::complex<double> s) { return f(s) / s; }, true};
        auto inv = invert_df(df_f, grid, {InversionMethod::Talbot, 32});
        for (std::size_t i = 0; i < grid.size(); ++i)
            worst_exp = std::max(
                worst_exp,
                std::abs(inv.values[i] + std::expm1(-grid[i] * lambda / std::expm1(rho))));
    }
    rep.record("5. inversion round trip of the busy d.f.",
               worst < 1e-4 && worst_exp < 1e-5,
               "family grid error " + format_double(worst) +
                   " (limit 1e-4); exponential endpoint error " + format_double(worst_exp) +
                   " (limit 1e-5)");
}

// 6. convolution series vs closed form; compound-geometric sampling
void check_series_and_compound(Reporter& rep) {
    QueueModel q(1.0, ServiceModel::beta_const(1.0, 1.0, 0.0));
    BusyGridSpec spec;
    spec.step = 0.005;
    spec.horizon = 40.0;
    AtomicLaw law = general_busy_density(q, spec);
    double worst = 0.0;
    for (double t = 0.0; t <= 10.0; t += 0.1)
        worst = std::max(worst, std::abs(law.df(t) - beta_const_busy_df(1.0, 1.0, 0.0, t)));

    ConstantBusyLaw compound(1.0, 1.0);
    rng::Stream stream(777);
    double mean = 0.0;
    const int n = 100'000;
    for (int i = 0; i < n; ++i) mean += compound.sample(stream);
    mean /= n;
    const double target = std::expm1(1.0);
    const double rel = std::abs(mean - target) / target;
    rep.record("6. density series vs closed form; compound sampling",
               worst < 5e-3 && rel < 0.01,
               "series grid error " + format_double(worst) +
                   " (limit 5e-3); compound sample mean off by " + format_double(rel) +
                   " relative (limit 0.01)");
}

// 7. service-tail reconstruction round trip over a parameter grid
void check_tail_roundtrip(Reporter& rep) {
    std::vector<double> grid;
    for (double t = 0.05; t <= 10.0001; t += 0.05) grid.push_back(t);
    double worst = 0.0;
    for (double lambda : {0.5, 1.0, 2.0}) {
        for (double rho : {0.5, 1.0, 2.0}) {
            for (double frac : {-0.3, 0.0, 0.5}) {
                const double beta = frac * (frac < 0 ? lambda : lambda / std::expm1(rho));
                const double w = (lambda + beta) / lambda * -std::expm1(-rho);
                const double r = std::exp(-rho) * (lambda + beta);
                TransformFn hbar{[w, r](std::complex<double> s) { return w / (s + r); }, true};
                auto tt = make_tail_transform(hbar, lambda, rho);
                auto tail = recover_service_tail(tt, grid);
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    const double a = lambda + beta;
                    const double truth =
                        -std::expm1(-rho) * a /
                        (lambda * std::exp(-rho) * std::expm1(a * grid[i]) + lambda);
                    worst = std::max(worst, std::abs(tail[i] - truth));
                }
            }
        }
    }
    rep.record("7. service-tail reconstruction round trip", worst < 1e-3,
               "3x3x3 family grid on t in [0.05, 10], worst error " + format_double(worst) +
                   " (limit 1e-3)");
}

// 8. feasibility checker against the symbolic oracle
void check_feasibility_oracle(Reporter& rep) {
    const double rho = std::log(2.0);  // k = 1
    bool pass = true;
    for (int density : {1, 2}) {
        std::vector<double> grid;
        for (double t = 0.13; t <= 20.0; t += 0.5 / density) grid.push_back(t);
        auto rational = check_feasibility([](double t) { return 10.0 / (1.0 + t); }, rho, grid);
        pass = pass && rational.verdict == FeasibilityVerdict::Fail;
        // sign flips exactly at t = c/k - 1 = 9
        for (const auto& p : rational.cond1) {
            if (p.t < 8.9) pass = pass && p.sign == 1;
            if (p.t > 9.1) pass = pass && p.sign == -1;
        }
        auto exponential =
            check_feasibility([](double t) { return 0.5 * std::exp(-t); }, rho, grid);
        pass = pass && exponential.verdict == FeasibilityVerdict::Fail;
        for (const auto& p : exponential.cond1)
            if (std::abs(p.value) > 1e-13) pass = pass && p.sign == -1;
    }
    rep.record("8. feasibility checker vs symbolic oracle", pass,
               "rational case flips sign at t = 9, exponential case negative everywhere; "
               "verdicts stable under refinement");
}

// 9. network transform: origin value, evaluator agreement, path semantics,
//    inversion, and sojourn simulation
void check_network_transform(Reporter& rep) {
    rng::Stream stream(424'242);
    double worst_origin = 0.0;
    for (int rep_i = 0; rep_i < 100; ++rep_i) {
        SojournTransform st(random_net(stream, 6));
        worst_origin = std::max(worst_origin, std::abs(st.eval_real(0.0) - 1.0));
    }

    double worst_agree = 0.0;
    for (int rep_i = 0; rep_i < 30; ++rep_i) {
        SojournTransform st(random_net(stream, 6));
        for (int i = 0; i < 8; ++i) {
            const double s = 0.25 + 1.25 * i;
            worst_agree = std::max(worst_agree,
                                   std::abs(st.eval({s, 0.0}) - st.eval_neumann({s, 0.0})));
        }
    }

    // path enumeration on DAG nets (feed-forward routing)
    double worst_path = 0.0;
    for (int rep_i = 0; rep_i < 25; ++rep_i) {
        const int j = 2 + static_cast<int>(stream.uniform() * 3);
        Eigen::VectorXd lam(j);
        for (int i = 0; i < j; ++i) lam(i) = 0.1 + stream.uniform();
        Eigen::MatrixXd p = Eigen::MatrixXd::Zero(j, j);
        for (int r = 0; r < j; ++r)
            for (int c = r + 1; c < j; ++c) p(r, c) = stream.uniform() * 0.9 / (j - r);
        std::vector<ServiceModel> svc;
        for (int i = 0; i < j; ++i)
            svc.push_back(ServiceModel::exponential(0.5 + stream.uniform()));
        NetworkModel net{lam, p, svc};
        SojournTransform st(net);
        const Eigen::VectorXd exit = net.exit_probabilities();
        std::vector<TransformFn> transforms;
        for (int i = 0; i < j; ++i) transforms.push_back(service_transform(net.services()[i]));
        for (double s : {0.3, 1.0, 2.7}) {
            struct Frame {
                int node;
                double weight;
                std::complex<double> product;
            };
            std::vector<Frame> stack;
            for (int entry = 0; entry < j; ++entry)
                if (lam(entry) > 0.0)
                    stack.push_back({entry, lam(entry) / net.total_rate(), {1.0, 0.0}});
            std::complex<double> total(0.0, 0.0);
            while (!stack.empty()) {
                Frame f = stack.back();
                stack.pop_back();
                const std::complex<double> prod = f.product * transforms[f.node]({s, 0.0});
                if (exit(f.node) > 0.0) total += f.weight * exit(f.node) * prod;
                for (int next = 0; next < j; ++next)
                    if (p(f.node, next) > 0.0)
                        stack.push_back({next, f.weight * p(f.node, next), prod});
            }
            worst_path = std::max(worst_path, std::abs(st.eval({s, 0.0}) - total));
        }
    }

    // tandem d.f. against the two-stage closed form
    SojournTransform tandem_st(tandem_net());
    TransformFn tandem_f = tandem_st.transform();
    TransformFn tandem_df{[tandem_f](std::complex<double> s) { return tandem_f(s) / s; },
                          true};
    std::vector<double> grid;
    for (double t = 0.05; t <= 10.0001; t += 0.05) grid.push_back(t);
    auto inv = invert_df(tandem_df, grid, {InversionMethod::Talbot, 32});
    double worst_df = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double erlang2 = 1.0 - (1.0 + grid[i]) * std::exp(-grid[i]);
        worst_df = std::max(worst_df, std::abs(inv.values[i] - erlang2));
    }

    // simulated sojourns against the inverted transform
    const double ks_limit = 1.36 / std::sqrt(100'000.0);
    SimConfig cfg;
    cfg.seed = 31'415;
    auto tandem_sojourns = simulate_network(tandem_net(), 100'000, cfg);
    const double ks_tandem = ks_distance(tandem_sojourns, [](double t) {
        return t < 0 ? 0.0 : 1.0 - (1.0 + t) * std::exp(-t);
    });
    // feedback net: geometric number of unit-exponential stages is
    // exponential with the exit rate 1/2
    cfg.seed = 27'182;
    auto feedback_sojourns = simulate_network(feedback_net(), 100'000, cfg);
    const double ks_feedback = ks_distance(
        feedback_sojourns, [](double t) { return t < 0 ? 0.0 : -std::expm1(-0.5 * t); });

    const bool pass = worst_origin < 1e-12 && worst_agree < 1e-10 && worst_path < 1e-10 &&
                      worst_df < 1e-5 && ks_tandem < ks_limit && ks_feedback < ks_limit;
    rep.record("9. network transform: origin, evaluators, paths, inversion, simulation", pass,
               "origin " + format_double(worst_origin) + " (1e-12); evaluator gap " +
                   format_double(worst_agree) + " (1e-10); path gap " +
                   format_double(worst_path) + " (1e-10); tandem d.f. " +
                   format_double(worst_df) + " (1e-5); KS " + format_double(ks_tandem) + "/" +
                   format_double(ks_feedback) + " (" + format_double(ks_limit) + ")");
}

// 10. traffic equations: residuals and the worked example
void check_traffic(Reporter& rep) {
    rng::Stream stream(5'550'123);
    double worst = 0.0;
    for (int rep_i = 0; rep_i < 100; ++rep_i) {
        NetworkModel net = random_net(stream, 6);
        Eigen::VectorXd gamma = solve_traffic(net);
        const double residual =
            (gamma - net.exogenous_rates() - net.routing().transpose() * gamma)
                .lpNorm<Eigen::Infinity>();
        worst = std::max(worst, residual / std::max(1.0, gamma.lpNorm<Eigen::Infinity>()));
    }

    Eigen::VectorXd lam(2);
    lam << 1.0, 0.0;
    Eigen::MatrixXd p(2, 2);
    p << 0.0, 0.5, 0.0, 0.0;
    NetworkModel two{lam, p, {ServiceModel::exponential(1.0), ServiceModel::exponential(1.0)}};
    Eigen::VectorXd gamma = solve_traffic(two);
    const bool exact = std::abs(gamma(0) - 1.0) < 1e-14 && std::abs(gamma(1) - 0.5) < 1e-14;
    rep.record("10. traffic equations", worst < 1e-10 && exact,
               "worst relative residual " + format_double(worst) +
                   " (limit 1e-10); two-node example reproduced exactly");
}

}  // namespace

std::vector<CheckResult> run_acceptance(std::ostream* progress) {
    std::vector<CheckResult> results;
    Reporter rep{results, progress};
    check_sim_mean(rep);
    check_moment_recursion(rep);
    check_constant_derivatives(rep);
    check_transform_normalization(rep);
    check_inversion_roundtrip(rep);
    check_series_and_compound(rep);
    check_tail_roundtrip(rep);
    check_feasibility_oracle(rep);
    check_network_transform(rep);
    check_traffic(rep);
    return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return !results.empty();
}

}  // namespace busyq
