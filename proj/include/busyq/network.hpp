#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "busyq/distributions.hpp"
#include "busyq/transform.hpp"

namespace busyq {

/// Open network of infinite-server nodes: exogenous Poisson rates, a
/// substochastic routing matrix (row j holds the move probabilities out of
/// node j; the row defect is the exit probability) and one service law per
/// node. Validated at construction: entries in [0,1], row sums <= 1,
/// spectral radius of the routing matrix < 1 (power iteration), and a
/// positive total exogenous rate.
class NetworkModel {
public:
    NetworkModel(Eigen::VectorXd exogenous_rates, Eigen::MatrixXd routing,
                 std::vector<ServiceModel> services);

    int node_count() const { return static_cast<int>(services_.size()); }
    const Eigen::VectorXd& exogenous_rates() const { return exogenous_; }
    const Eigen::MatrixXd& routing() const { return routing_; }
    const std::vector<ServiceModel>& services() const { return services_; }
    double total_rate() const { return total_rate_; }
    Eigen::VectorXd exit_probabilities() const;
    double spectral_radius() const { return spectral_radius_; }

private:
    Eigen::VectorXd exogenous_;
    Eigen::MatrixXd routing_;
    std::vector<ServiceModel> services_;
    double total_rate_ = 0.0;
    double spectral_radius_ = 0.0;
};

/// Total per-node arrival rates Gamma solving Gamma^T = Lambda^T + Gamma^T P
/// by direct LU; the residual is checked against 1e-10 * |Gamma|_inf.
Eigen::VectorXd solve_traffic(const NetworkModel& net);

/// Transform of the total service a customer accumulates while walking the
/// network: with per-node transforms Gbar_j,
///   Gbar(s) = (1/lambda) Lambda(s)^T (I - P(s))^{-1} (I - P) 1,
/// where Lambda(s)_j = lambda_j Gbar_j(s) and P(s)_{jl} = p_{jl} Gbar_l(s);
/// each transform factor attaches to the node where the service is received.
class SojournTransform {
public:
    explicit SojournTransform(NetworkModel net);

    const NetworkModel& net() const { return net_; }
    bool complex_capable() const { return complex_capable_; }

    /// Linear-solve evaluator (partial-pivot LU on I - P(s)).
    std::complex<double> eval(std::complex<double> s) const;
    double eval_real(double s) const { return eval({s, 0.0}).real(); }

    /// Series evaluator sum_n Lambda(s)^T P(s)^n (I-P) 1 / lambda, truncated
    /// when a term drops below term_tol; retained as a cross-check.
    std::complex<double> eval_neumann(std::complex<double> s, double term_tol = 1e-12) const;

    TransformFn transform() const;

private:
    NetworkModel net_;
    std::vector<TransformFn> node_transforms_;
    Eigen::VectorXd exit_;  // (I - P) 1
    bool complex_capable_ = true;
};

struct SojournMoments {
    double mean = 0.0;            // finite differences at s = 0, Richardson-refined
    double second_moment = 0.0;   // same route
    double mean_expected_visits = 0.0;  // sum_j (gamma_j/lambda) alpha_j
};

/// Mean and second moment of the sojourn time. The finite-difference mean is
/// cross-checked against the expected-visits mean; disagreement beyond 1e-4
/// relative raises MOMENT_MISMATCH.
SojournMoments sojourn_moments(const SojournTransform& st);

}  // namespace busyq
