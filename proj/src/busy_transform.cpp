#include "busyq/busy_transform.hpp"

#include <cmath>

#include "busyq/errors.hpp"
#include "busyq/quadrature.hpp"

namespace busyq {

BusyTransform::BusyTransform(QueueModel queue) : queue_(std::move(queue)) {
    trunc_ = queue_.service().tail_cutoff(1e-12);
    phi_trunc_ = queue_.service().integrated_tail(trunc_);
    if (const auto* bc = queue_.service().beta_const_params()) {
        closed_ = true;
        const double a = bc->lambda + bc->beta;
        atom_ = 1.0 + std::expm1(-bc->rho) * a / bc->lambda;
        rate_ = std::exp(-bc->rho) * a;
    }
}

std::complex<double> BusyTransform::eval_quadrature(std::complex<double> s) const {
    if (s == std::complex<double>(0.0, 0.0)) return {1.0, 0.0};
    if (s.real() < 0.0)
        fail_validation("TRANSFORM_DOMAIN", "", "transform evaluation requires Re(s) >= 0");
    const double lambda = queue_.lambda();
    const ServiceModel& svc = queue_.service();
    std::complex<double> integral;
    if (s.imag() == 0.0) {
        const double sr = s.real();
        integral = quad::integrate(
                       [&](double t) { return std::exp(-sr * t - lambda * svc.integrated_tail(t)); },
                       0.0, trunc_, {1e-12, 1e-10})
                       .value;
    } else {
        integral = quad::integrate_complex(
                       [&](double t) {
                           return std::exp(-s * t - lambda * svc.integrated_tail(t));
                       },
                       0.0, trunc_, {1e-12, 1e-10})
                       .value;
    }
    integral += std::exp(-s * trunc_ - lambda * phi_trunc_) / s;
    if (std::abs(integral) < 1e-300)
        fail_numerical("POLE_UNDERFLOW", "transform integral underflowed; 1/I is not representable");
    return 1.0 + (s - 1.0 / integral) / lambda;
}

std::complex<double> BusyTransform::eval(std::complex<double> s) const {
    if (!closed_) return eval_quadrature(s);
    if (s == std::complex<double>(0.0, 0.0)) return {1.0, 0.0};
    if (s.real() < 0.0)
        fail_validation("TRANSFORM_DOMAIN", "", "transform evaluation requires Re(s) >= 0");
    return atom_ + (1.0 - atom_) * rate_ / (s + rate_);
}

TransformFn BusyTransform::transform() const {
    if (closed_) {
        const double atom = atom_, rate = rate_;
        return {[atom, rate](std::complex<double> s) {
                    return atom + (1.0 - atom) * rate / (s + rate);
                },
                true};
    }
    BusyTransform copy = *this;
    return {[copy](std::complex<double> s) { return copy.eval(s); }, false};
}

double mean_busy_period(const QueueModel& queue) {
    if (queue.rho() > 700.0)
        fail_numerical("OVERFLOW_RHO", "e^rho overflows double precision for rho > 700");
    return std::expm1(queue.rho()) / queue.lambda();
}

}  // namespace busyq
