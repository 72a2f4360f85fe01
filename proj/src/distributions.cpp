#include "busyq/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "busyq/errors.hpp"
#include "busyq/quadrature.hpp"

namespace busyq {
namespace detail {

// Shared expanding search + bisection for the smallest t with tail(t) < eps.
static double find_cutoff(const std::function<double(double)>& tail, double eps,
                          double scale, double cap) {
    if (tail(scale) < eps) {
        double lo = 0.0, hi = scale;
        for (int i = 0; i < 80; ++i) {
            double mid = 0.5 * (lo + hi);
            (tail(mid) < eps ? hi : lo) = mid;
        }
        return hi;
    }
    double t = scale;
    while (t < cap && tail(t) >= eps) t *= 1.5;
    if (t >= cap) return cap;
    double lo = t / 1.5, hi = t;
    for (int i = 0; i < 80; ++i) {
        double mid = 0.5 * (lo + hi);
        (tail(mid) < eps ? hi : lo) = mid;
    }
    return hi;
}

// Generic inverse-d.f. sampling by bisection, honoring an atom at zero.
static double sample_by_bisection(const std::function<double(double)>& df, double atom0,
                                  double scale, double u) {
    if (u < atom0) return 0.0;
    double hi = scale;
    while (df(hi) <= u && hi < 1e12 * scale) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (df(mid) <= u ? lo : hi) = mid;
        if (hi - lo < 1e-15 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

struct BetaGeneralImpl {
    double lambda = 0.0;
    double rho = 0.0;
    std::function<double(double)> beta;
    double q = 0.0;        // 1 - e^{-rho}
    double m_total = 0.0;  // int_0^inf m
    double grid_end = 0.0;
    MonotoneCubic ibeta_memo;
    MonotoneCubic m_int_memo;

    double ibeta(double t) const {
        if (t <= grid_end) return ibeta_memo(t);
        return ibeta_memo(grid_end) + quad::integrate(beta, grid_end, t).value;
    }
    double m(double t) const { return std::exp(-lambda * t - ibeta(t)); }
    double m_int(double t) const {
        if (t <= grid_end) return m_int_memo(t);
        return m_int_memo(grid_end) +
               quad::integrate([this](double u) { return m(u); }, grid_end, t).value;
    }
    // denominator lambda * (M_inf - q M(t)); bounded below by lambda e^{-rho} M_inf
    double denom(double t) const { return lambda * (m_total - q * m_int(t)); }
    double tail(double t) const { return q * m(t) / denom(t); }
    double df(double t) const { return 1.0 - tail(t); }
    double density(double t) const {
        const double D = m_total - q * m_int(t);
        const double mt = m(t);
        return q * mt / (lambda * D * D) * ((lambda + beta(t)) * D - q * mt);
    }
    double integrated_tail(double t) const {
        return -std::log((m_total - q * m_int(t)) / m_total) / lambda;
    }
};

struct EmpiricalImpl {
    std::function<double(double)> user_df;
    double atom0 = 0.0;
    double mean = 0.0;
    double cutoff = 0.0;
    MonotoneCubic phi_memo;

    double df(double t) const { return std::min(1.0, std::max(0.0, user_df(t))); }
    double tail(double t) const { return 1.0 - df(t); }
    double integrated_tail(double t) const {
        if (t <= cutoff) return phi_memo(t);
        return phi_memo(cutoff);  // tail below 1e-12 past the cutoff
    }
};

}  // namespace detail

using detail::BetaGeneralImpl;
using detail::EmpiricalImpl;

// ---------------------------------------------------------------------------
// constructors

ServiceModel ServiceModel::constant(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        fail_validation("SERVICE_PARAM", "/service/alpha", "constant service needs alpha > 0");
    return ServiceModel(ConstantService{alpha});
}

ServiceModel ServiceModel::exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        fail_validation("SERVICE_PARAM", "/service/rate", "exponential service needs rate > 0");
    return ServiceModel(ExponentialService{rate});
}

ServiceModel ServiceModel::beta_const(double lambda, double rho, double beta) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        fail_validation("SERVICE_PARAM", "/service/lambda", "family needs lambda > 0");
    if (!(rho > 0.0) || !std::isfinite(rho))
        fail_validation("SERVICE_PARAM", "/service/rho", "family needs rho > 0");
    const double beta_max = lambda / std::expm1(rho);
    const double slack = 1e-12 * lambda;
    if (!(beta <= beta_max + slack))
        fail_validation("BETA_RANGE", "/service/beta",
                        "beta must satisfy beta <= lambda/(e^rho - 1)");
    if (!(beta > -lambda + slack))
        fail_validation("BETA_RANGE", "/service/beta",
                        "beta = -lambda gives a zero-mean (degenerate) service law");
    return ServiceModel(BetaConstService{lambda, rho, std::min(beta, beta_max)});
}

void validate_beta_range(double lambda, double rho, const std::function<double(double)>& beta,
                         std::vector<double> probe, double mean_hint) {
    if (probe.empty()) {
        // default: 64 log-spaced points spanning [mean/50, 20*mean]
        const double lo = mean_hint / 50.0, hi = 20.0 * mean_hint;
        const double ratio = std::pow(hi / lo, 1.0 / 63.0);
        double t = lo;
        for (int i = 0; i < 64; ++i, t *= ratio) probe.push_back(t);
    }
    std::sort(probe.begin(), probe.end());
    const double beta_max = lambda / std::expm1(rho);
    const double slack = 1e-9 * lambda;
    double prev_t = 0.0, acc = 0.0;
    for (double t : probe) {
        if (!(t > 0.0)) fail_validation("BETA_RANGE", "/service/beta", "probe grid must be positive");
        acc += quad::integrate(beta, prev_t, t).value;
        prev_t = t;
        const double avg = acc / t;
        if (avg < -lambda - slack || avg > beta_max + slack)
            fail_validation("BETA_RANGE", "/service/beta",
                            "(int_0^t beta)/t leaves [-lambda, lambda/(e^rho-1)] near t = " +
                                std::to_string(t));
    }
}

ServiceModel ServiceModel::beta_general(double lambda, double rho,
                                        std::function<double(double)> beta,
                                        std::vector<double> range_probe) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        fail_validation("SERVICE_PARAM", "/service/lambda", "family needs lambda > 0");
    if (!(rho > 0.0) || !std::isfinite(rho))
        fail_validation("SERVICE_PARAM", "/service/rho", "family needs rho > 0");
    if (!beta) fail_validation("SERVICE_PARAM", "/service/beta", "beta function required");
    const double alpha = rho / lambda;
    validate_beta_range(lambda, rho, beta, std::move(range_probe), alpha);

    auto impl = std::make_shared<BetaGeneralImpl>();
    impl->lambda = lambda;
    impl->rho = rho;
    impl->beta = std::move(beta);
    impl->q = -std::expm1(-rho);

    // m(t) via nested adaptive integrals (memoization comes after).
    auto m_exact = [&](double t) {
        return std::exp(-lambda * t - quad::integrate(impl->beta, 0.0, t).value);
    };
    impl->m_total = quad::integrate_to_inf(m_exact, 0.0).value;
    if (!(impl->m_total > 0.0) || !std::isfinite(impl->m_total))
        fail_validation("BETA_RANGE", "/service/beta", "int_0^inf exp(-lambda t - int beta) diverges");

    auto tail_exact = [&](double t) {
        const double M = quad::integrate(m_exact, 0.0, t).value;
        return impl->q * m_exact(t) / (lambda * (impl->m_total - impl->q * M));
    };
    const double cut = detail::find_cutoff(tail_exact, 1e-12, alpha, 50.0 * alpha);
    impl->grid_end = std::max(cut * 1.05, 20.0 * alpha);

    // memoized cumulative integrals of beta and m on a uniform knot grid
    const int knots = 2048;
    const double h = impl->grid_end / (knots - 1);
    std::vector<double> xs(knots), ib(knots), mi(knots);
    xs[0] = 0.0;
    ib[0] = 0.0;
    mi[0] = 0.0;
    for (int i = 1; i < knots; ++i) {
        xs[i] = i * h;
        ib[i] = ib[i - 1] + quad::integrate(impl->beta, xs[i - 1], xs[i]).value;
    }
    MonotoneCubic ib_interp(xs, ib);
    auto m_fast = [&](double t) { return std::exp(-lambda * t - ib_interp(t)); };
    for (int i = 1; i < knots; ++i)
        mi[i] = mi[i - 1] + quad::integrate(m_fast, xs[i - 1], xs[i]).value;
    impl->ibeta_memo = std::move(ib_interp);
    impl->m_int_memo = MonotoneCubic(xs, mi);
    return ServiceModel(Storage(std::shared_ptr<const BetaGeneralImpl>(impl)));
}

ServiceModel ServiceModel::empirical(std::function<double(double)> df, double atom0) {
    if (!df) fail_validation("SERVICE_PARAM", "/service/df", "distribution function required");
    if (!(atom0 >= 0.0 && atom0 <= 1.0))
        fail_validation("SERVICE_PARAM", "/service/atom0", "atom0 must lie in [0, 1]");
    if (std::abs(df(0.0) - atom0) > 1e-8)
        fail_validation("SERVICE_ATOM_MISMATCH", "/service/atom0",
                        "df(0) disagrees with the declared atom at zero");

    auto impl = std::make_shared<EmpiricalImpl>();
    impl->user_df = std::move(df);
    impl->atom0 = atom0;

    auto tail = [&](double t) { return 1.0 - impl->user_df(t); };
    double mean;
    try {
        mean = quad::integrate_to_inf(tail, 0.0).value;
    } catch (const Error&) {
        fail_numerical("DIVERGENT_INTEGRAL", "tail integral of the supplied d.f. does not converge");
    }
    if (!(mean > 0.0) || !std::isfinite(mean))
        fail_validation("SERVICE_PARAM", "/service/df", "supplied d.f. has nonpositive mean");
    impl->mean = mean;
    impl->cutoff = detail::find_cutoff(tail, 1e-12, mean, 50.0 * mean);

    // monotonicity and range probe
    double prev = -1e-12;
    for (int i = 0; i <= 256; ++i) {
        const double t = impl->cutoff * i / 256.0;
        const double v = impl->user_df(t);
        if (v < -1e-12 || v > 1.0 + 1e-12)
            fail_validation("SERVICE_DF_RANGE", "/service/df", "d.f. leaves [0, 1]");
        if (v < prev - 1e-10)
            fail_validation("SERVICE_DF_DECREASING", "/service/df", "d.f. is not nondecreasing");
        prev = v;
    }

    // integrated tail on a uniform memo grid
    const int knots = 2048;
    const double h = impl->cutoff / (knots - 1);
    std::vector<double> xs(knots), phi(knots);
    for (int i = 1; i < knots; ++i) {
        xs[i] = i * h;
        phi[i] = phi[i - 1] + quad::integrate(tail, xs[i - 1], xs[i]).value;
    }
    impl->phi_memo = MonotoneCubic(xs, phi);
    return ServiceModel(Storage(std::shared_ptr<const EmpiricalImpl>(impl)));
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

void require_nonnegative_time(double t) {
    if (t < 0.0 || !std::isfinite(t))
        fail_validation("NEGATIVE_TIME", "", "time argument must be finite and >= 0");
}

double beta_const_tail(const BetaConstService& p, double t) {
    // (1-e^{-rho})(lambda+beta) e^{rho-at} / (lambda (1+(e^rho-1) e^{-at}))
    const double a = p.lambda + p.beta;
    const double q = -std::expm1(-p.rho);
    const double e = std::exp(-a * t);
    return q * a * std::exp(p.rho) * e / (p.lambda * (1.0 + std::expm1(p.rho) * e));
}

double beta_const_density(const BetaConstService& p, double t) {
    const double a = p.lambda + p.beta;
    const double q = -std::expm1(-p.rho);
    const double e = std::exp(-a * t);
    const double d = 1.0 + std::expm1(p.rho) * e;
    return q * a * a * std::exp(p.rho) * e / (p.lambda * d * d);
}

}  // namespace

double beta_const_service_df(double lambda, double rho, double beta, double t) {
    require_nonnegative_time(t);
    const double a = lambda + beta;
    if (a <= 0.0) return 1.0;  // beta = -lambda: all mass at zero
    return 1.0 - beta_const_tail(BetaConstService{lambda, rho, beta}, t);
}

ServiceModel::Kind ServiceModel::kind() const {
    switch (storage_.index()) {
        case 0: return Kind::Constant;
        case 1: return Kind::Exponential;
        case 2: return Kind::BetaConst;
        case 3: return Kind::BetaGeneral;
        default: return Kind::Empirical;
    }
}

const BetaConstService* ServiceModel::beta_const_params() const {
    return std::get_if<BetaConstService>(&storage_);
}
const ConstantService* ServiceModel::constant_params() const {
    return std::get_if<ConstantService>(&storage_);
}
const ExponentialService* ServiceModel::exponential_params() const {
    return std::get_if<ExponentialService>(&storage_);
}

double ServiceModel::df(double t) const {
    require_nonnegative_time(t);
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstantService>)
                return t >= v.alpha ? 1.0 : 0.0;
            else if constexpr (std::is_same_v<T, ExponentialService>)
                return -std::expm1(-v.rate * t);
            else if constexpr (std::is_same_v<T, BetaConstService>)
                return 1.0 - beta_const_tail(v, t);
            else
                return v->df(t);
        },
        storage_);
}

double ServiceModel::tail(double t) const {
    require_nonnegative_time(t);
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstantService>)
                return t >= v.alpha ? 0.0 : 1.0;
            else if constexpr (std::is_same_v<T, ExponentialService>)
                return std::exp(-v.rate * t);
            else if constexpr (std::is_same_v<T, BetaConstService>)
                return beta_const_tail(v, t);
            else
                return v->tail(t);
        },
        storage_);
}

bool ServiceModel::has_density() const { return kind() != Kind::Constant; }

double ServiceModel::density(double t) const {
    require_nonnegative_time(t);
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstantService>) {
                fail_validation("NO_DENSITY", "",
                                "constant service has no density; use the compound busy law");
            } else if constexpr (std::is_same_v<T, ExponentialService>) {
                return v.rate * std::exp(-v.rate * t);
            } else if constexpr (std::is_same_v<T, BetaConstService>) {
                return beta_const_density(v, t);
            } else if constexpr (std::is_same_v<T, std::shared_ptr<const BetaGeneralImpl>>) {
                return v->density(t);
            } else {
                // central differences; the empirical d.f. has no analytic density
                const double h = 1e-5 * v->mean;
                const double lo = std::max(0.0, t - h);
                return (v->df(t + h) - v->df(lo)) / (t + h - lo);
            }
        },
        storage_);
}

double ServiceModel::mean() const {
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstantService>)
                return v.alpha;
            else if constexpr (std::is_same_v<T, ExponentialService>)
                return 1.0 / v.rate;
            else if constexpr (std::is_same_v<T, BetaConstService>)
                return v.rho / v.lambda;
            else if constexpr (std::is_same_v<T, std::shared_ptr<const BetaGeneralImpl>>)
                return v->rho / v->lambda;
            else
                return v->mean;
        },
        storage_);
}

double ServiceModel::atom() const {
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstantService>)
                return 0.0;
            else if constexpr (std::is_same_v<T, ExponentialService>)
                return 0.0;
            else if constexpr (std::is_same_v<T, BetaConstService>)
                return std::max(0.0, 1.0 - beta_const_tail(v, 0.0));
            else if constexpr (std::is_same_v<T, std::shared_ptr<const BetaGeneralImpl>>)
                return std::max(0.0, v->df(0.0));
            else
                return v->atom0;
        },
        storage_);
}

double ServiceModel::integrated_tail(double t) const {
    require_nonnegative_time(t);
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstantService>)
                return std::min(t, v.alpha);
            else if constexpr (std::is_same_v<T, ExponentialService>)
                return -std::expm1(-v.rate * t) / v.rate;
            else if constexpr (std::is_same_v<T, BetaConstService>) {
                // -(1/lambda) log(1 - (1-e^{-rho})(1 - e^{-at}))
                const double a = v.lambda + v.beta;
                const double q = -std::expm1(-v.rho);
                return -std::log1p(q * std::expm1(-a * t)) / v.lambda;
            } else if constexpr (std::is_same_v<T, std::shared_ptr<const BetaGeneralImpl>>)
                return v->integrated_tail(t);
            else
                return v->integrated_tail(t);
        },
        storage_);
}

double ServiceModel::tail_cutoff(double eps) const {
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstantService>)
                return v.alpha;
            else if constexpr (std::is_same_v<T, ExponentialService>)
                return std::min(-std::log(eps) / v.rate, 50.0 / v.rate);
            else {
                const double a = mean();
                return detail::find_cutoff([&](double t) { return tail(t); }, eps, a, 50.0 * a);
            }
        },
        storage_);
}

double ServiceModel::sample(rng::Stream& stream) const {
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstantService>) {
                return v.alpha;
            } else if constexpr (std::is_same_v<T, ExponentialService>) {
                return stream.exponential(v.rate);
            } else if constexpr (std::is_same_v<T, BetaConstService>) {
                // closed-form inverse of the family d.f.
                const double u = stream.uniform();
                const double a = v.lambda + v.beta;
                const double q = -std::expm1(-v.rho);
                const double g0 = 1.0 - q * a / v.lambda;
                if (u < g0) return 0.0;
                const double arg = std::exp(v.rho) * (q * a / (v.lambda * (1.0 - u)) - 1.0);
                return std::log1p(arg) / a;
            } else {
                const double u = stream.uniform();
                return detail::sample_by_bisection([&](double t) { return df(t); }, atom(),
                                                   mean(), u);
            }
        },
        storage_);
}

// ---------------------------------------------------------------------------

QueueModel::QueueModel(double lambda, ServiceModel service)
    : lambda_(lambda), service_(std::move(service)) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        fail_validation("LAMBDA_NONPOSITIVE", "/lambda", "arrival rate must be finite and > 0");
    const auto* bc = service_.beta_const_params();
    if (bc && std::abs(bc->lambda - lambda) > 1e-9 * lambda)
        fail_validation("MODEL_LAMBDA_MISMATCH", "/service/lambda",
                        "family service is tied to the arrival rate; lambdas must match");
    rho_ = lambda_ * service_.mean();
    if (!(rho_ > 0.0) || !std::isfinite(rho_))
        fail_validation("SERVICE_PARAM", "/service", "traffic intensity must be finite and > 0");
}

TransformFn service_transform(const ServiceModel& service) {
    if (const auto* c = service.constant_params()) {
        const double alpha = c->alpha;
        return {[alpha](std::complex<double> s) { return std::exp(-s * alpha); }, true};
    }
    if (const auto* e = service.exponential_params()) {
        const double rate = e->rate;
        return {[rate](std::complex<double> s) { return rate / (s + rate); }, true};
    }
    // G~(s) = 1 - s int_0^T e^{-st}(1-G(t)) dt, exact at s = 0
    ServiceModel copy = service;
    const double T = copy.tail_cutoff(1e-12);
    auto fn = [copy, T](std::complex<double> s) -> std::complex<double> {
        const double sr = s.real();
        if (s.imag() != 0.0)
            fail_validation("METHOD_UNAVAILABLE", "",
                            "quadrature-backed service transform supports real s only");
        if (sr == 0.0) return {1.0, 0.0};
        const double integral =
            quad::integrate([&](double t) { return std::exp(-sr * t) * copy.tail(t); }, 0.0, T,
                            {1e-12, 1e-10})
                .value;
        return {1.0 - sr * integral, 0.0};
    };
    return {std::move(fn), false};
}

}  // namespace busyq
