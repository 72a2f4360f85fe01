#pragma once

#include <complex>

#include "busyq/distributions.hpp"
#include "busyq/transform.hpp"

namespace busyq {

/// Busy-period Laplace transform of the infinite-server queue,
///   B(s) = 1 + (s - 1/I(s)) / lambda,  I(s) = int_0^inf e^{-st - lambda Phi(t)} dt,
/// where Phi is the integrated service tail. The improper integral is split
/// at a truncation point T past which the tail is below 1e-12 and the
/// remainder is summed in closed form as e^{-sT - lambda Phi(T)} / s.
/// For the constant-shape family the transform collapses to
///   atom + (1 - atom) r / (s + r),  atom = 1 - ((lambda+beta)/lambda)(1-e^{-rho}),
///   r = e^{-rho}(lambda + beta),
/// and that closed form is used instead of quadrature.
class BusyTransform {
public:
    explicit BusyTransform(QueueModel queue);

    const QueueModel& queue() const { return queue_; }
    bool closed_form() const { return closed_; }
    double truncation_point() const { return trunc_; }

    /// Requires Re(s) >= 0; s = 0 returns exactly 1.
    std::complex<double> eval(std::complex<double> s) const;
    double eval_real(double s) const { return eval({s, 0.0}).real(); }

    /// Quadrature route, available for every service (cross-check path).
    std::complex<double> eval_quadrature(std::complex<double> s) const;

    /// Transform handle for the inversion engine; complex-capable only when
    /// the closed form applies.
    TransformFn transform() const;

private:
    QueueModel queue_;
    double trunc_;
    double phi_trunc_;
    bool closed_ = false;
    double atom_ = 0.0;
    double rate_ = 0.0;
};

/// Mean busy period (e^rho - 1)/lambda; holds for every service law.
/// Throws OVERFLOW_RHO for rho > 700.
double mean_busy_period(const QueueModel& queue);

}  // namespace busyq
