#include "busyq/tail.hpp"

#include <algorithm>
#include <cmath>

#include "busyq/errors.hpp"

namespace busyq {
namespace {

TransformFn shifted_inverse_transform(const TailTransform& tt) {
    const TransformFn hbar = tt.hbar;
    const double lambda = tt.lambda;
    const double kappa = tt.atom_kappa;
    return {[hbar, lambda, kappa](std::complex<double> s) {
                return 1.0 / (lambda * hbar(s) + 1.0) - kappa;
            },
            tt.hbar.complex_capable};
}

}  // namespace

TailTransform make_tail_transform(TransformFn hbar, double lambda, double rho) {
    if (!(lambda > 0.0) || !(rho > 0.0))
        fail_validation("SERVICE_PARAM", "", "tail transform needs lambda > 0, rho > 0");
    TailTransform tt;
    tt.hbar = std::move(hbar);
    tt.lambda = lambda;
    tt.rho = rho;
    const double s1 = 1e3, s2 = 1e4, s3 = 1e5;
    auto phi = [&](double s) { return (1.0 / (lambda * tt.hbar({s, 0.0}) + 1.0)).real(); };
    const double p1 = phi(s1), p2 = phi(s2), p3 = phi(s3);
    const double k12 = (s2 * p2 - s1 * p1) / (s2 - s1);
    const double k23 = (s3 * p3 - s2 * p2) / (s3 - s2);
    tt.atom_kappa = k23 + (k23 - k12) / (s3 / s2 - 1.0);
    return tt;
}

std::vector<double> recover_service_tail(const TailTransform& tt,
                                         std::span<const double> tgrid, InversionConfig cfg) {
    if (tgrid.empty()) fail_validation("GRID_INVALID", "/grid", "empty recovery grid");
    for (std::size_t i = 0; i < tgrid.size(); ++i)
        if (!(tgrid[i] > 0.0) || (i > 0 && tgrid[i] <= tgrid[i - 1]))
            fail_validation("GRID_INVALID", "/grid", "grid must be positive and increasing");

    const TransformFn fc_transform = shifted_inverse_transform(tt);

    // evaluation points: a refined prefix below t_1, then the user grid with
    // segment midpoints so the accumulation of int_0^t f_c can use Simpson
    const double t1 = tgrid[0];
    std::vector<double> pts;
    pts.reserve(2 * tgrid.size() + 8);
    for (int k = 1; k < 16; ++k) pts.push_back(t1 * k / 16.0);
    pts.push_back(t1);
    for (std::size_t i = 1; i < tgrid.size(); ++i) {
        pts.push_back(0.5 * (tgrid[i - 1] + tgrid[i]));
        pts.push_back(tgrid[i]);
    }

    std::vector<double> fc(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) fc[i] = invert(fc_transform, pts[i], cfg);

    auto guard_denominator = [&](double integral) {
        const double denom = tt.lambda * (tt.atom_kappa + integral);
        if (!(denom > 1e-12))
            fail_numerical("NON_TAIL",
                           "denominator kappa + int f_c vanished; the input transform is "
                           "not a feasible busy-period tail");
        return denom;
    };

    std::vector<double> tail(tgrid.size());
    double integral = pts[0] * fc[0];  // rectangle on [0, t1/16]
    for (std::size_t i = 1; i < 16; ++i)
        integral += 0.5 * (fc[i] + fc[i - 1]) * (pts[i] - pts[i - 1]);
    tail[0] = std::abs(fc[15]) / guard_denominator(integral);
    for (std::size_t seg = 1; seg < tgrid.size(); ++seg) {
        const std::size_t mid = 14 + 2 * seg, end = 15 + 2 * seg;
        integral += (pts[end] - pts[end - 2]) / 6.0 *
                    (fc[end - 2] + 4.0 * fc[mid] + fc[end]);
        tail[seg] = std::abs(fc[end]) / guard_denominator(integral);
    }

    double peak = 0.0;
    for (std::size_t i = 0; i < tail.size(); ++i) {
        if (tail[i] < -1e-9 || tail[i] > 1.0 + 1e-9)
            fail_numerical("NON_TAIL", "reconstructed values leave [0, 1]");
        if (i > 0 && tail[i] > tail[i - 1] + 1e-9)
            fail_numerical("NON_TAIL", "reconstructed values increase along the grid");
        peak = std::max(peak, tail[i]);
    }
    if (peak < 1e-12)
        fail_numerical("NON_TAIL",
                       "reconstruction is identically zero; a degenerate busy period has no "
                       "recoverable service law");
    return tail;
}

FeasibilityReport check_feasibility(const std::function<double(double)>& a, double rho,
                                    std::span<const double> probe_grid, double deriv_step_rel,
                                    double limit_tol) {
    if (!(rho > 0.0)) fail_validation("SERVICE_PARAM", "/rho", "rho must be > 0");
    if (probe_grid.empty()) fail_validation("GRID_INVALID", "/grid", "empty probe grid");
    for (std::size_t i = 0; i < probe_grid.size(); ++i)
        if (!(probe_grid[i] > 0.0) || (i > 0 && probe_grid[i] <= probe_grid[i - 1]))
            fail_validation("GRID_INVALID", "/grid", "probe grid must be positive and increasing");

    const double k = 1.0 / std::expm1(rho);
    FeasibilityReport report;
    report.cond1.reserve(probe_grid.size());
    report.cond1_ok = true;

    for (double t : probe_grid) {
        const double at = a(t);
        // both printed singular values are excluded: the ratio divides by
        // a - k, and the companion value -k appears as the stated exclusion
        if (std::min(std::abs(at - k), std::abs(at + k)) < 1e-9)
            fail_numerical("NEAR_SINGULAR",
                           "a(t) is within 1e-9 of a singular value 1/(e^rho - 1) at t = " +
                               std::to_string(t));
        const double h = deriv_step_rel * t;
        const double ap = a(t + h), am = a(t - h);
        const double d1 = (ap - am) / (2.0 * h);
        const double d2 = (ap - 2.0 * at + am) / (h * h);
        const double value = (d2 * (at + k) - 2.0 * d1 * d1) / (at - k);
        FeasibilityPoint point{t, value, 0};
        const double tiny = 1e-12 * (std::abs(d2 * (at + k)) + 2.0 * d1 * d1 + 1e-300);
        if (value > tiny)
            point.sign = 1;
        else if (value < -tiny)
            point.sign = -1;
        if (point.sign != 1) report.cond1_ok = false;
        report.cond1.push_back(point);
    }

    // limit estimate: median |a| over the last five probe points
    const std::size_t n = probe_grid.size();
    const std::size_t m = std::min<std::size_t>(5, n);
    std::vector<double> last(m);
    for (std::size_t i = 0; i < m; ++i) last[i] = std::abs(a(probe_grid[n - m + i]));
    std::nth_element(last.begin(), last.begin() + m / 2, last.end());
    report.cond2_limit_estimate = last[m / 2];
    report.cond2_ok = report.cond2_limit_estimate <= limit_tol;

    report.verdict = (report.cond1_ok && report.cond2_ok) ? FeasibilityVerdict::Pass
                                                          : FeasibilityVerdict::Fail;
    return report;
}

}  // namespace busyq
