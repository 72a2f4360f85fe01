#pragma once

#include <functional>
#include <span>
#include <vector>

#include "busyq/distributions.hpp"
#include "busyq/rng.hpp"

namespace busyq {

/// A probability law on [0, inf) split into a point mass at 0 and a
/// density sampled on a uniform grid t_i = i * step.
struct AtomicLaw {
    double atom0 = 0.0;
    double step = 0.0;
    std::vector<double> density;
    std::vector<double> cumulative;  // atom0 + trapezoid integral up to t_i

    static AtomicLaw from_density(double atom0, double step, std::vector<double> density);

    double df(double t) const;
    double total_mass() const { return cumulative.empty() ? atom0 : cumulative.back(); }
    double mean() const;
    double horizon() const { return step * (density.empty() ? 0 : density.size() - 1); }
};

struct BusyGridSpec {
    double step = 0.0;      // 0: mean service / 200
    double horizon = 0.0;   // 0: grown until estimated tail mass < 1e-6
    double series_tol = 1e-8;
    double mass_tol = 1e-3;  // |atom + density mass - 1| beyond this is an error
};

/// Busy-period d.f. for the constant-shape family: a point mass
/// 1 - ((lambda+beta)/lambda)(1-e^{-rho}) at the origin plus an exponential
/// of rate e^{-rho}(lambda+beta). Admits beta = -lambda, where the d.f. is
/// identically 1.
double beta_const_busy_df(double lambda, double rho, double beta, double t);

/// Busy-period law of a general service via the convolution series
///   b = G(0) delta + w * sum_n h^{*n},
///   w(t) = d/dt[ e^{-lambda Phi(t)} (G(t) - G(0)) ],
///   h(t) = d/dt[ 1 - e^{-lambda Phi(t)} ] = lambda (1-G(t)) e^{-lambda Phi(t)}.
/// The kernel mass is 1 - e^{-rho} < 1, so the series is truncated once the
/// geometric remainder drops below series_tol. Constant services have no
/// density and are rejected (use ConstantBusyLaw).
AtomicLaw general_busy_density(const QueueModel& queue, BusyGridSpec spec = {});

/// Busy-period d.f. for the function-parameter family, evaluated on a grid
/// through the same series with the analytic specialization
///   w(t) = (1-G(0)) m(t) (lambda + beta(t) - lambda(1-G(0))),
///   h(t) = lambda (1-G(0)) m(t),  m(t) = exp(-lambda t - int_0^t beta).
std::vector<double> beta_general_busy_df(double lambda, double rho,
                                         const std::function<double(double)>& beta,
                                         std::span<const double> tgrid,
                                         double series_tol = 1e-8);

/// Truncated exponential on [0, alpha): d.f. (1-e^{-lambda t})/(1-e^{-rho})
/// below alpha and 1 from alpha on; continuous at alpha.
struct TruncatedExp {
    double lambda;
    double alpha;

    double df(double t) const;
    double density(double t) const;
    double mean() const;  // 1/lambda - alpha e^{-rho}/(1-e^{-rho})
    double sample(rng::Stream& stream) const;
};

/// Constant-service busy period: alpha plus a Geometric(e^{-rho}) number of
/// i.i.d. truncated exponentials. Exact sampling; the d.f. of the summed
/// part is materialized by the shared convolution series.
class ConstantBusyLaw {
public:
    ConstantBusyLaw(double lambda, double alpha, BusyGridSpec spec = {});

    double lambda() const { return lambda_; }
    double alpha() const { return alpha_; }
    double mean() const;  // collapses to (e^rho - 1)/lambda
    double df(double t) const;
    double sample(rng::Stream& stream) const;

    /// Law of B - alpha: atom e^{-rho} at 0 plus the compound-geometric part.
    const AtomicLaw& offset_law() const { return offset_; }

private:
    double lambda_;
    double alpha_;
    double rho_;
    AtomicLaw offset_;
};

}  // namespace busyq
