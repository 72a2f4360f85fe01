#include "busyq/busy_law.hpp"

#include <algorithm>
#include <cmath>

#include "busyq/errors.hpp"
#include "busyq/quadrature.hpp"

namespace busyq {
namespace {

// Accumulates sum_{n>=0} first * kernel^{*n} on a uniform grid by trapezoid
// convolution. kernel_mass is the analytic L1 norm of the kernel (< 1);
// truncation stops once the geometric remainder of the term masses falls
// below series_tol. Every convolution step multiplies the term mass by the
// discrete kernel mass, so a grid that fails to resolve the kernel loses
// mass at every step; that resolution defect is the coarseness signal.
std::vector<double> convolution_series(const std::vector<double>& first,
                                       const std::vector<double>& kernel, double step,
                                       double kernel_mass, double series_tol) {
    const std::size_t n = first.size();
    auto grid_mass = [&](const std::vector<double>& f) {
        double s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) s += f[i];
        if (!f.empty()) s -= 0.5 * (f.front() + f.back());
        return s * step;
    };
    const double kernel_mass_disc = grid_mass(kernel);
    if (kernel_mass_disc >= 1.0)
        fail_numerical("SERIES_DIVERGENCE",
                       "discrete kernel mass >= 1; the convolution series cannot contract");
    if (std::abs(kernel_mass_disc - kernel_mass) > 0.02 * kernel_mass)
        fail_numerical("GRID_TOO_COARSE",
                       "grid loses more than 2% of the convolution kernel mass per step; "
                       "refine the step or extend the horizon");

    std::vector<double> total(first);
    std::vector<double> term(first);
    std::vector<double> next(n, 0.0);
    double term_mass = grid_mass(first);
    // remaining mass of the untouched terms: term_mass * km/(1-km)
    double remainder = term_mass * kernel_mass / (1.0 - kernel_mass);
    int guard = 0;
    while (remainder > series_tol && guard++ < 10'000) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 1; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j <= i; ++j) acc += term[j] * kernel[i - j];
            acc -= 0.5 * (term[0] * kernel[i] + term[i] * kernel[0]);
            next[i] = acc * step;
        }
        term.swap(next);
        term_mass *= kernel_mass;
        for (std::size_t i = 0; i < n; ++i) total[i] += term[i];
        remainder *= kernel_mass;
    }
    return total;
}

// crude exponential-tail extrapolation from the last quarter of the grid
double estimate_tail_mass(const std::vector<double>& density, double step) {
    const std::size_t n = density.size();
    if (n < 8) return 1.0;
    const double b_end = density[n - 1];
    if (b_end <= 0.0) return 0.0;
    const double b_mid = density[n - 1 - n / 4];
    if (b_mid <= b_end) return 1.0;  // not decaying: horizon clearly short
    const double rate = std::log(b_mid / b_end) / (step * (n / 4));
    return b_end / rate;
}

}  // namespace

AtomicLaw AtomicLaw::from_density(double atom0, double step, std::vector<double> density) {
    AtomicLaw law;
    law.atom0 = atom0;
    law.step = step;
    law.density = std::move(density);
    law.cumulative.resize(law.density.size());
    if (!law.cumulative.empty()) {
        law.cumulative[0] = atom0;
        for (std::size_t i = 1; i < law.density.size(); ++i)
            law.cumulative[i] =
                law.cumulative[i - 1] + 0.5 * step * (law.density[i - 1] + law.density[i]);
    }
    for (double d : law.density)
        if (d < -1e-9)
            fail_numerical("NEGATIVE_DENSITY", "law density went negative beyond tolerance");
    return law;
}

double AtomicLaw::df(double t) const {
    if (t < 0.0) return 0.0;
    if (cumulative.empty()) return atom0;
    const double x = t / step;
    if (x >= static_cast<double>(cumulative.size() - 1)) return cumulative.back();
    const std::size_t i = static_cast<std::size_t>(x);
    const double frac = x - static_cast<double>(i);
    return cumulative[i] + frac * (cumulative[i + 1] - cumulative[i]);
}

double AtomicLaw::mean() const {
    double s = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) s += density[i] * (i * step);
    if (density.size() > 1) s -= 0.5 * (density.back() * (density.size() - 1) * step);
    return s * step;
}

double beta_const_busy_df(double lambda, double rho, double beta, double t) {
    if (t < 0.0) return 0.0;
    const double a = lambda + beta;
    if (a <= 0.0) return 1.0;
    const double rate = std::exp(-rho) * a;
    return 1.0 + (a / lambda) * std::expm1(-rho) * std::exp(-rate * t);
}

AtomicLaw general_busy_density(const QueueModel& queue, BusyGridSpec spec) {
    const ServiceModel& svc = queue.service();
    const double g0 = svc.atom();
    if (g0 >= 1.0 - 1e-12) return AtomicLaw::from_density(1.0, spec.step > 0 ? spec.step : 1.0, {});
    if (!svc.has_density())
        fail_validation("NO_DENSITY", "/service",
                        "service law has no density; constant services use ConstantBusyLaw");

    const double lambda = queue.lambda();
    const double rho = queue.rho();
    const double step = spec.step > 0.0 ? spec.step : svc.mean() / 200.0;
    const double kernel_mass = -std::expm1(-rho);

    double horizon = spec.horizon;
    const bool auto_horizon = horizon <= 0.0;
    if (auto_horizon) horizon = 10.0 * std::expm1(rho) / lambda;

    for (int attempt = 0;; ++attempt) {
        const std::size_t n = static_cast<std::size_t>(std::ceil(horizon / step)) + 1;
        std::vector<double> w(n), h(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = i * step;
            const double decay = std::exp(-lambda * svc.integrated_tail(t));
            const double tail = svc.tail(t);
            w[i] = decay * (svc.density(t) - lambda * tail * (svc.df(t) - g0));
            h[i] = lambda * tail * decay;
        }
        std::vector<double> series =
            convolution_series(w, h, step, kernel_mass, spec.series_tol);
        // clip tiny negative excursions from the truncated alternating tail
        double peak = 0.0;
        for (double v : series) peak = std::max(peak, std::abs(v));
        for (double& v : series) {
            if (v < -1e-4 * peak)
                fail_numerical("NEGATIVE_DENSITY",
                               "convolution series produced a substantially negative density");
            v = std::max(v, 0.0);
        }
        AtomicLaw law = AtomicLaw::from_density(g0, step, std::move(series));
        const double tail_mass = estimate_tail_mass(law.density, step);
        if (!auto_horizon || tail_mass < 1e-6 || attempt >= 4) {
            // a user-chosen horizon may truncate tail mass on purpose; only
            // the full automatic law must integrate to 1
            const double excess = law.total_mass() - 1.0;
            const double defect = auto_horizon ? std::abs(excess) : excess;
            if (defect > spec.mass_tol)
                fail_numerical("NORMALIZATION",
                               "busy law mass deviates from 1 beyond tolerance; grid too "
                               "coarse or horizon too short");
            return law;
        }
        horizon *= 2.0;
    }
}

std::vector<double> beta_general_busy_df(double lambda, double rho,
                                         const std::function<double(double)>& beta,
                                         std::span<const double> tgrid, double series_tol) {
    if (tgrid.empty()) fail_validation("GRID_INVALID", "/grid", "empty evaluation grid");
    for (std::size_t i = 0; i < tgrid.size(); ++i)
        if (tgrid[i] < 0.0 || (i > 0 && tgrid[i] < tgrid[i - 1]))
            fail_validation("GRID_INVALID", "/grid", "grid must be nonnegative and nondecreasing");
    const double alpha = rho / lambda;
    validate_beta_range(lambda, rho, beta, {}, alpha);

    // shape pinned to -lambda: the service d.f. is identically 1 (all mass
    // at zero), so every busy period is empty
    bool degenerate = true;
    for (double t : {0.1 * alpha, alpha, 5.0 * alpha, 20.0 * alpha})
        degenerate = degenerate && std::abs(beta(t) + lambda) < 1e-12 * lambda;
    if (degenerate) return std::vector<double>(tgrid.size(), 1.0);

    const double q = -std::expm1(-rho);
    // m(t) = exp(-lambda t - int beta); M_inf = int_0^inf m
    auto m_exact = [&](double t) {
        return std::exp(-lambda * t - quad::integrate(beta, 0.0, t).value);
    };
    const double m_total = quad::integrate_to_inf(m_exact, 0.0).value;
    const double one_minus_g0 = q / (lambda * m_total);
    if (one_minus_g0 < 1e-14)  // all service mass at zero: busy period is empty
        return std::vector<double>(tgrid.size(), 1.0);
    const double g0 = 1.0 - one_minus_g0;

    const double step = std::min(alpha / 200.0, std::max(tgrid.back(), alpha) / 200.0);
    const double horizon = std::max(tgrid.back() * 1.02, 4.0 * step);
    const std::size_t n = static_cast<std::size_t>(std::ceil(horizon / step)) + 1;

    // incremental cumulative int beta over the uniform grid
    std::vector<double> w(n), h(n);
    double ibeta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = i * step;
        if (i > 0) ibeta += quad::integrate(beta, (i - 1) * step, t).value;
        const double m = std::exp(-lambda * t - ibeta);
        h[i] = lambda * one_minus_g0 * m;
        w[i] = one_minus_g0 * m * (lambda + beta(t) - lambda * one_minus_g0);
    }
    std::vector<double> series = convolution_series(w, h, step, q, series_tol);
    for (double& v : series) v = std::max(v, 0.0);
    AtomicLaw law = AtomicLaw::from_density(g0, step, std::move(series));

    std::vector<double> out;
    out.reserve(tgrid.size());
    for (double t : tgrid) out.push_back(std::min(1.0, law.df(t)));
    return out;
}

double TruncatedExp::df(double t) const {
    if (t < 0.0) return 0.0;
    if (t >= alpha) return 1.0;
    return std::expm1(-lambda * t) / std::expm1(-lambda * alpha);
}

double TruncatedExp::density(double t) const {
    if (t < 0.0 || t >= alpha) return 0.0;
    return lambda * std::exp(-lambda * t) / -std::expm1(-lambda * alpha);
}

double TruncatedExp::mean() const {
    const double rho = lambda * alpha;
    return 1.0 / lambda + alpha * std::exp(-rho) / std::expm1(-rho);
}

double TruncatedExp::sample(rng::Stream& stream) const {
    const double u = stream.uniform();
    return -std::log1p(u * std::expm1(-lambda * alpha)) / lambda;
}

ConstantBusyLaw::ConstantBusyLaw(double lambda, double alpha, BusyGridSpec spec)
    : lambda_(lambda), alpha_(alpha) {
    if (!(lambda > 0.0) || !(alpha > 0.0))
        fail_validation("SERVICE_PARAM", "", "constant busy law needs lambda > 0, alpha > 0");
    rho_ = lambda * alpha;
    const double p_stop = std::exp(-rho_);
    const double kernel_mass = -std::expm1(-rho_);

    const double step = spec.step > 0.0 ? spec.step : alpha / 200.0;
    double horizon = spec.horizon;
    if (horizon <= 0.0) {
        // mean of the summed part is (e^rho-1)/lambda - alpha; geometric tail
        const double mean_offset = std::expm1(rho_) / lambda - alpha;
        horizon = std::max(8.0 * mean_offset + 4.0 * alpha, 8.0 * alpha);
    }
    const std::size_t n = static_cast<std::size_t>(std::ceil(horizon / step)) + 1;
    // density of one truncated exponential, closed interval so the jump at
    // alpha sits on a grid node
    std::vector<double> w(n, 0.0), h(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = i * step;
        if (t <= alpha) {
            h[i] = lambda * std::exp(-lambda * t);
            w[i] = p_stop * h[i];
        }
    }
    std::vector<double> series = convolution_series(w, h, step, kernel_mass, spec.series_tol);
    offset_ = AtomicLaw::from_density(p_stop, step, std::move(series));
}

double ConstantBusyLaw::mean() const { return std::expm1(rho_) / lambda_; }

double ConstantBusyLaw::df(double t) const {
    if (t < alpha_) return 0.0;
    return std::min(1.0, offset_.df(t - alpha_));
}

double ConstantBusyLaw::sample(rng::Stream& stream) const {
    // geometric number of summands with success probability e^{-rho}
    const double u = stream.uniform();
    const double p_stop = std::exp(-rho_);
    long n = 0;
    if (u > p_stop) {
        // invert the geometric d.f.: N = ceil(log(1-u)/log(1-p)) - 1
        n = static_cast<long>(std::ceil(std::log1p(-u) / std::log1p(-p_stop))) - 1;
        n = std::max(n, 0L);
    }
    double total = alpha_;
    TruncatedExp piece{lambda_, alpha_};
    for (long i = 0; i < n; ++i) total += piece.sample(stream);
    return total;
}

}  // namespace busyq
