#include "busyq/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "busyq/errors.hpp"

namespace busyq {
namespace {

constexpr int kGaverDefaultOrder = 14;
constexpr int kGaverMaxOrder = 20;  // coefficient blow-up past this in doubles
constexpr int kTalbotDefaultOrder = 32;
constexpr int kTalbotMaxOrder = 40;  // e^{2M/5} round-off passes 1e-9 beyond

// Stehfest weights; long-double factorials are exact through 20!.
std::vector<double> stehfest_coefficients(int n) {
    long double fact[21];
    fact[0] = 1.0L;
    for (int i = 1; i <= 20; ++i) fact[i] = fact[i - 1] * i;
    const int half = n / 2;
    std::vector<double> v(n);
    for (int k = 1; k <= n; ++k) {
        long double sum = 0.0L;
        for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
            long double term = std::pow(static_cast<long double>(j), half) * fact[2 * j];
            term /= fact[half - j] * fact[j] * fact[j - 1] * fact[k - j] * fact[2 * j - k];
            sum += term;
        }
        v[k - 1] = static_cast<double>(((half + k) % 2 == 0) ? sum : -sum);
    }
    return v;
}

double gaver_stehfest(const TransformFn& f, double t, int order) {
    const auto weights = stehfest_coefficients(order);
    const double log2t = std::numbers::ln2 / t;
    // compensated sum: the weights alternate and grow to ~1e8 at order 14
    double sum = 0.0, comp = 0.0;
    for (int k = 1; k <= order; ++k) {
        const double x = weights[k - 1] * f.real_at(k * log2t);
        const double s = sum + x;
        comp += (std::abs(sum) >= std::abs(x)) ? (sum - s) + x : (x - s) + sum;
        sum = s;
    }
    return log2t * (sum + comp);
}

// Fixed-contour Talbot rule: s(theta) = r theta (cot theta + i), r = 2M/(5t).
double talbot(const TransformFn& f, double t, int order) {
    const double r = 2.0 * order / (5.0 * t);
    double total = 0.5 * std::exp(r * t) * f({r, 0.0}).real();
    for (int k = 1; k < order; ++k) {
        const double theta = k * std::numbers::pi / order;
        const double cot = std::cos(theta) / std::sin(theta);
        const std::complex<double> s(r * theta * cot, r * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        const std::complex<double> term =
            std::exp(t * s) * f(s) * std::complex<double>(1.0, sigma);
        total += term.real();
    }
    return r / order * total;
}

}  // namespace

double invert(const TransformFn& f, double t, InversionConfig cfg) {
    if (!(t > 0.0)) fail_validation("INVERSION_DOMAIN", "", "inversion requires t > 0");
    InversionMethod method = cfg.method;
    if (method == InversionMethod::Auto)
        method = f.complex_capable ? InversionMethod::Talbot : InversionMethod::GaverStehfest;
    if (method == InversionMethod::Talbot && !f.complex_capable)
        fail_validation("METHOD_UNAVAILABLE", "",
                        "Talbot needs a complex-capable transform; this one is real-axis only");
    if (method == InversionMethod::GaverStehfest) {
        int order = cfg.order > 0 ? cfg.order : kGaverDefaultOrder;
        if (order % 2 != 0 || order < 2 || order > kGaverMaxOrder)
            fail_validation("ORDER_OVERFLOW", "/invert-order",
                            "Gaver-Stehfest order must be even and <= 20 in double precision");
        return gaver_stehfest(f, t, order);
    }
    int order = cfg.order > 0 ? cfg.order : kTalbotDefaultOrder;
    if (order < 4 || order > kTalbotMaxOrder)
        fail_validation("ORDER_OVERFLOW", "/invert-order",
                        "Talbot order must lie in [4, 40] in double precision");
    return talbot(f, t, order);
}

DfInversion invert_df(const TransformFn& f, std::span<const double> tgrid, InversionConfig cfg) {
    if (tgrid.empty()) fail_validation("INVERSION_DOMAIN", "", "empty time grid");
    for (std::size_t i = 0; i < tgrid.size(); ++i)
        if (!(tgrid[i] > 0.0) || (i > 0 && tgrid[i] <= tgrid[i - 1]))
            fail_validation("INVERSION_DOMAIN", "", "grid must be positive and increasing");
    // properness: s f(s) -> 1 as s -> 0 (f already carries the 1/s factor)
    const double probe = 1e-6;
    const double mass = f.real_at(probe) * probe;
    if (std::abs(mass - 1.0) > 1e-2)
        fail_validation("IMPROPER_LAW", "",
                        "transform does not normalize to a proper law at s -> 0");

    DfInversion out;
    out.values.reserve(tgrid.size());
    for (double t : tgrid) out.values.push_back(std::clamp(invert(f, t, cfg), 0.0, 1.0));

    for (std::size_t i = 0; i + 1 < out.values.size(); ++i)
        out.max_violation = std::max(out.max_violation, out.values[i] - out.values[i + 1]);
    if (out.max_violation > 0.01)
        fail_numerical("INVERSION_ACCURACY",
                       "inverted d.f. violates monotonicity by more than 0.01");

    // pool-adjacent-violators isotonic pass
    std::vector<double> level(out.values.begin(), out.values.end());
    std::vector<int> count(level.size(), 1);
    int m = 0;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        level[m] = out.values[i];
        count[m] = 1;
        while (m > 0 && level[m - 1] > level[m]) {
            level[m - 1] = (level[m - 1] * count[m - 1] + level[m] * count[m]) /
                           (count[m - 1] + count[m]);
            count[m - 1] += count[m];
            --m;
        }
        ++m;
    }
    std::size_t idx = 0;
    for (int b = 0; b < m; ++b)
        for (int c = 0; c < count[b]; ++c) out.values[idx++] = level[b];
    return out;
}

}  // namespace busyq
