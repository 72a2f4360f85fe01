#pragma once

#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include "busyq/interp.hpp"
#include "busyq/rng.hpp"
#include "busyq/transform.hpp"

namespace busyq {

/// Degenerate service at a fixed duration.
struct ConstantService {
    double alpha;
};

/// Memoryless service.
struct ExponentialService {
    double rate;
};

/// Member of the one-parameter service family tied to arrival rate `lambda`
/// and traffic intensity `rho`:
///   G(t) = 1 - (1-e^{-rho})(lambda+beta) / (lambda e^{-rho}(e^{(lambda+beta)t}-1) + lambda)
/// valid for -lambda <= beta <= lambda/(e^rho - 1). Mean is rho/lambda by
/// construction; G(0) > 0 except at the upper endpoint of the beta range.
struct BetaConstService {
    double lambda;
    double rho;
    double beta;
};

namespace detail {
struct BetaGeneralImpl;
struct EmpiricalImpl;
}  // namespace detail

/// A service-time law: distribution function, density of the absolutely
/// continuous part, mean, integrated tail and sampling. Immutable after
/// construction; all evaluation methods are pure.
class ServiceModel {
public:
    enum class Kind { Constant, Exponential, BetaConst, BetaGeneral, Empirical };

    static ServiceModel constant(double alpha);
    static ServiceModel exponential(double rate);
    static ServiceModel beta_const(double lambda, double rho, double beta);

    /// Function-parameter variant of the family above, with
    ///   G(t) = 1 - (1/lambda)(1-e^{-rho}) m(t) / (M_inf - (1-e^{-rho}) M(t)),
    ///   m(t) = exp(-lambda t - int_0^t beta), M(t) = int_0^t m, M_inf = M(inf).
    /// The range condition -lambda <= (int_0^t beta)/t <= lambda/(e^rho - 1)
    /// is checked on `range_probe` (default: 64 log-spaced points up to
    /// 20*mean) at construction.
    static ServiceModel beta_general(double lambda, double rho,
                                     std::function<double(double)> beta,
                                     std::vector<double> range_probe = {});

    /// User-supplied distribution function with an explicit weight at zero.
    /// The mean is computed by tail quadrature at construction.
    static ServiceModel empirical(std::function<double(double)> df, double atom0 = 0.0);

    Kind kind() const;

    double df(double t) const;
    double tail(double t) const;
    bool has_density() const;
    double density(double t) const;
    double mean() const;
    /// Weight of the point mass at t = 0, i.e. G(0).
    double atom() const;
    /// Integrated tail  int_0^t (1 - G(v)) dv; increases to the mean.
    double integrated_tail(double t) const;
    /// Smallest t with 1 - G(t) < eps, capped at 50 * mean.
    double tail_cutoff(double eps) const;
    double sample(rng::Stream& stream) const;

    const BetaConstService* beta_const_params() const;
    const ConstantService* constant_params() const;
    const ExponentialService* exponential_params() const;

private:
    using Storage = std::variant<ConstantService, ExponentialService, BetaConstService,
                                 std::shared_ptr<const detail::BetaGeneralImpl>,
                                 std::shared_ptr<const detail::EmpiricalImpl>>;
    explicit ServiceModel(Storage storage) : storage_(std::move(storage)) {}
    Storage storage_;
};

/// Arrivals at rate `lambda` feeding infinitely many servers with the given
/// service law. Traffic intensity rho = lambda * mean service time.
class QueueModel {
public:
    QueueModel(double lambda, ServiceModel service);

    double lambda() const { return lambda_; }
    const ServiceModel& service() const { return service_; }
    double rho() const { return rho_; }

private:
    double lambda_;
    ServiceModel service_;
    double rho_;
};

/// Evaluates the family d.f. formula directly, including the degenerate
/// endpoint beta = -lambda where G is identically 1 (that endpoint is
/// rejected by the ServiceModel constructor because the mean vanishes).
double beta_const_service_df(double lambda, double rho, double beta, double t);

/// Checks -lambda <= (int_0^t beta)/t <= lambda/(e^rho - 1) on a probe grid;
/// throws BETA_RANGE on violation. `probe` empty selects the default grid.
void validate_beta_range(double lambda, double rho, const std::function<double(double)>& beta,
                         std::vector<double> probe, double mean_hint);

/// Laplace-Stieltjes transform of the service law. Closed form (and
/// complex-capable) for Constant and Exponential; real-axis quadrature
/// otherwise. Exactly 1 at s = 0.
TransformFn service_transform(const ServiceModel& service);

}  // namespace busyq
