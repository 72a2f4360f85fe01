#include "busyq/network.hpp"

#include <cmath>
#include <string>

#include "busyq/errors.hpp"

namespace busyq {
namespace {

// Spectral radius of a nonnegative matrix by power iteration on P + I
// (the shift removes periodic oscillation; the radius shifts by exactly 1).
double nonnegative_spectral_radius(const Eigen::MatrixXd& p, double tol = 1e-10,
                                   int max_iter = 10'000) {
    const int n = static_cast<int>(p.rows());
    Eigen::MatrixXd shifted = p + Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    double estimate = 0.0;
    for (int i = 0; i < max_iter; ++i) {
        Eigen::VectorXd w = shifted * v;
        const double norm = w.lpNorm<Eigen::Infinity>();
        if (norm < 1e-280) return 0.0;
        w /= norm;
        if (std::abs(norm - estimate) < tol * std::max(1.0, norm) && i > 2)
            return norm - 1.0;
        estimate = norm;
        v = std::move(w);
    }
    return estimate - 1.0;
}

}  // namespace

NetworkModel::NetworkModel(Eigen::VectorXd exogenous_rates, Eigen::MatrixXd routing,
                           std::vector<ServiceModel> services)
    : exogenous_(std::move(exogenous_rates)),
      routing_(std::move(routing)),
      services_(std::move(services)) {
    const int j = static_cast<int>(services_.size());
    if (j < 1) fail_validation("SCHEMA_TYPE", "/nodes", "network needs at least one node");
    if (exogenous_.size() != j)
        fail_validation("SCHEMA_TYPE", "/nodes", "one exogenous rate per node required");
    if (routing_.rows() != j || routing_.cols() != j)
        fail_validation("SCHEMA_TYPE", "/routing", "routing matrix must be J x J");

    for (int i = 0; i < j; ++i) {
        if (!(exogenous_(i) >= 0.0) || !std::isfinite(exogenous_(i)))
            fail_validation("LAMBDA_NONPOSITIVE", "/nodes/" + std::to_string(i) + "/lambda",
                            "exogenous rates must be finite and >= 0");
        double row_sum = 0.0;
        for (int l = 0; l < j; ++l) {
            const double p = routing_(i, l);
            if (!(p >= 0.0) || p > 1.0 + 1e-12)
                fail_validation("ROUTING_ENTRY", "/routing/" + std::to_string(i),
                                "routing probabilities must lie in [0, 1]");
            row_sum += p;
        }
        if (row_sum > 1.0 + 1e-9)
            fail_validation("ROUTING_ROW_SUM", "/routing/" + std::to_string(i),
                            "routing row sums must not exceed 1 (row sum " +
                                std::to_string(row_sum) + ")");
    }
    total_rate_ = exogenous_.sum();
    if (!(total_rate_ > 0.0))
        fail_validation("LAMBDA_NONPOSITIVE", "/nodes", "total exogenous rate must be > 0");

    spectral_radius_ = nonnegative_spectral_radius(routing_);
    if (!(spectral_radius_ < 1.0 - 1e-10))
        fail_validation("ROUTING_UNSTABLE", "/routing",
                        "routing matrix spectral radius must be < 1 (customers could cycle "
                        "forever)");
}

Eigen::VectorXd NetworkModel::exit_probabilities() const {
    return Eigen::VectorXd::Ones(node_count()) - routing_.rowwise().sum();
}

Eigen::VectorXd solve_traffic(const NetworkModel& net) {
    const int j = net.node_count();
    const Eigen::MatrixXd system =
        Eigen::MatrixXd::Identity(j, j) - net.routing().transpose();
    Eigen::VectorXd gamma = system.partialPivLu().solve(net.exogenous_rates());
    const double residual =
        (gamma - net.exogenous_rates() - net.routing().transpose() * gamma)
            .lpNorm<Eigen::Infinity>();
    if (residual > 1e-10 * std::max(1.0, gamma.lpNorm<Eigen::Infinity>()))
        fail_numerical("TRAFFIC_RESIDUAL", "traffic equation residual exceeds tolerance");
    return gamma;
}

SojournTransform::SojournTransform(NetworkModel net) : net_(std::move(net)) {
    node_transforms_.reserve(net_.node_count());
    for (const ServiceModel& svc : net_.services()) {
        node_transforms_.push_back(service_transform(svc));
        complex_capable_ = complex_capable_ && node_transforms_.back().complex_capable;
    }
    exit_ = net_.exit_probabilities();
}

std::complex<double> SojournTransform::eval(std::complex<double> s) const {
    using Complex = std::complex<double>;
    const int j = net_.node_count();
    Eigen::VectorXcd node_vals(j);
    for (int i = 0; i < j; ++i) node_vals(i) = node_transforms_[i](s);

    Eigen::MatrixXcd system = Eigen::MatrixXcd::Identity(j, j);
    for (int r = 0; r < j; ++r)
        for (int c = 0; c < j; ++c) system(r, c) -= net_.routing()(r, c) * node_vals(c);
    Eigen::VectorXcd q = exit_.cast<Complex>();
    Eigen::VectorXcd x = system.partialPivLu().solve(q);
    if ((system * x - q).lpNorm<Eigen::Infinity>() > 1e-8 * std::max(1.0, q.norm()))
        fail_numerical("NEAR_SINGULAR", "I - P(s) is numerically singular at this frequency");

    Complex acc(0.0, 0.0);
    for (int i = 0; i < j; ++i) acc += net_.exogenous_rates()(i) * node_vals(i) * x(i);
    return acc / net_.total_rate();
}

std::complex<double> SojournTransform::eval_neumann(std::complex<double> s,
                                                    double term_tol) const {
    using Complex = std::complex<double>;
    const int j = net_.node_count();
    Eigen::VectorXcd node_vals(j);
    for (int i = 0; i < j; ++i) node_vals(i) = node_transforms_[i](s);
    Eigen::VectorXcd lam_s(j);
    for (int i = 0; i < j; ++i) lam_s(i) = net_.exogenous_rates()(i) * node_vals(i);
    Eigen::MatrixXcd p_s(j, j);
    for (int r = 0; r < j; ++r)
        for (int c = 0; c < j; ++c) p_s(r, c) = net_.routing()(r, c) * node_vals(c);

    Eigen::VectorXcd w = exit_.cast<Complex>();
    Complex total(0.0, 0.0);
    for (long n = 0; n < 1'000'000; ++n) {
        const Complex term = (lam_s.transpose() * w).value() / net_.total_rate();
        total += term;
        if (std::abs(term) < term_tol) return total;
        w = p_s * w;
    }
    fail_numerical("NEAR_SINGULAR", "series evaluator failed to converge");
}

TransformFn SojournTransform::transform() const {
    SojournTransform copy = *this;
    return {[copy](std::complex<double> s) { return copy.eval(s); }, complex_capable_};
}

SojournMoments sojourn_moments(const SojournTransform& st) {
    SojournMoments out;
    const Eigen::VectorXd gamma = solve_traffic(st.net());
    double visits_mean = 0.0;
    for (int i = 0; i < st.net().node_count(); ++i)
        visits_mean += gamma(i) / st.net().total_rate() * st.net().services()[i].mean();
    out.mean_expected_visits = visits_mean;

    const double h = 1e-3 * (visits_mean > 0.0 ? 1.0 / visits_mean : 1.0);
    if (h < 1e-12) fail_numerical("STEP_UNDERFLOW", "finite-difference step underflowed");
    auto d1 = [&](double step) {
        return -(st.eval_real(step) - st.eval_real(-step)) / (2.0 * step);
    };
    auto d2 = [&](double step) {
        return (st.eval_real(step) - 2.0 + st.eval_real(-step)) / (step * step);
    };
    out.mean = (4.0 * d1(h / 2) - d1(h)) / 3.0;
    out.second_moment = (4.0 * d2(h / 2) - d2(h)) / 3.0;

    if (std::abs(out.mean - visits_mean) > 1e-4 * std::max(1.0, visits_mean))
        fail_numerical("MOMENT_MISMATCH",
                       "finite-difference mean disagrees with the expected-visits mean");
    return out;
}

}  // namespace busyq
