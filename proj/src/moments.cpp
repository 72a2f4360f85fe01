#include "busyq/moments.hpp"

#include <cmath>

#include "busyq/errors.hpp"
#include "busyq/quadrature.hpp"

namespace busyq {
namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Neumaier compensated accumulator with a cancellation tally.
struct CompensatedSum {
    double sum = 0.0, comp = 0.0, magnitude = 0.0;
    void add(double x) {
        magnitude += std::abs(x);
        const double t = sum + x;
        comp += (std::abs(sum) >= std::abs(x)) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace

std::vector<double> c_derivatives(const QueueModel& queue, int n_max, int cap) {
    if (n_max < 0 || n_max > cap)
        fail_validation("MOMENT_CAP", "/n",
                        "requested derivative order exceeds the configured cap");
    const double lambda = queue.lambda();
    const double rho = queue.rho();
    std::vector<double> c(n_max + 1);

    if (const auto* constant = queue.service().constant_params()) {
        const double alpha = constant->alpha;
        c[0] = -std::expm1(-rho);
        double sign_alpha = -alpha;  // (-alpha)^n
        for (int n = 1; n <= n_max; ++n) {
            c[n] = -std::exp(-rho) * sign_alpha - n * c[n - 1] / lambda;
            sign_alpha *= -alpha;
        }
        return c;
    }

    const ServiceModel& svc = queue.service();
    const double alpha = svc.mean();
    const double base_cutoff = svc.tail_cutoff(1e-12);
    for (int n = 0; n <= n_max; ++n) {
        // extend the truncation so the t^n weight cannot hide tail mass
        double T = base_cutoff;
        const double weighted_eps = 1e-13 * std::pow(alpha, n);
        while (T < 100.0 * alpha && std::pow(T, n) * svc.tail(T) > weighted_eps) T *= 1.25;
        const double value =
            quad::integrate(
                [&](double t) {
                    return std::pow(t, n) * std::exp(-lambda * svc.integrated_tail(t)) *
                           lambda * svc.tail(t);
                },
                0.0, T, {1e-12 / (n + 1), 1e-10})
                .value;
        c[n] = (n % 2 == 0) ? value : -value;
    }
    return c;
}

MomentSet busy_moments(const QueueModel& queue, int n_max, int cap) {
    if (n_max < 1 || n_max > cap)
        fail_validation("MOMENT_CAP", "/n", "moment order must lie in [1, cap]");
    if (queue.rho() > 700.0)
        fail_numerical("OVERFLOW_RHO", "e^rho overflows double precision for rho > 700");
    MomentSet out;
    out.c_values = c_derivatives(queue, n_max, cap);
    out.c_source = queue.service().constant_params() ? CValueSource::Recursion
                                                     : CValueSource::Quadrature;
    const double lambda = queue.lambda();
    const double e_rho = 1.0 / (1.0 - out.c_values[0]);  // C^(0) = 1 - e^{-rho}
    out.moments.assign(n_max + 1, 0.0);
    for (int n = 1; n <= n_max; ++n) {
        CompensatedSum acc;
        acc.add(e_rho / lambda * n * out.c_values[n - 1]);
        for (int p = 1; p <= n - 1; ++p) {
            const double sign = ((n - p) % 2 == 0) ? 1.0 : -1.0;
            acc.add(-e_rho * sign * binomial(n, p) * out.moments[n - p] * out.c_values[p]);
        }
        const double braced = acc.value();
        out.moments[n] = ((n + 1) % 2 == 0) ? braced : -braced;
        const double lost =
            std::log10(acc.magnitude / std::max(std::abs(braced), 1e-300));
        out.digits_lost = std::max(out.digits_lost, lost);
    }
    out.cancellation_warning = out.digits_lost > 8.0;
    out.moments.erase(out.moments.begin());
    return out;
}

std::vector<double> beta_family_moments(double lambda, double rho, double beta, int n_max) {
    if (n_max < 1) fail_validation("MOMENT_CAP", "/n", "moment order must be >= 1");
    const double a = lambda + beta;
    const double beta_max = lambda / std::expm1(rho);
    if (!(beta > -lambda) || beta > beta_max * (1.0 + 1e-12))
        fail_validation("BETA_RANGE", "/beta", "beta outside the admissible family range");
    const double weight = (a / lambda) * (-std::expm1(-rho));
    const double rate = std::exp(-rho) * a;
    std::vector<double> m(n_max);
    double factorial_over_rate = 1.0;
    for (int n = 1; n <= n_max; ++n) {
        factorial_over_rate *= n / rate;
        m[n - 1] = weight * factorial_over_rate;
    }
    return m;
}

}  // namespace busyq
