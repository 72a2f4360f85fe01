#pragma once

#include <functional>
#include <span>
#include <vector>

#include "busyq/inversion.hpp"
#include "busyq/transform.hpp"

namespace busyq {

/// Transform of a busy-period tail H(t) = 1 - B(t), together with the
/// constant kappa = lim_{s->inf} 1/(lambda H~(s) + 1). That limit is the
/// weight of the point mass hiding in 1/(lambda H~ + 1); it is split off
/// analytically because no sampling inversion rule can represent a delta.
struct TailTransform {
    TransformFn hbar;
    double lambda = 0.0;
    double rho = 0.0;
    double atom_kappa = 1.0;
};

/// Builds the tail transform and extracts kappa by Richardson extrapolation
/// over s = 1e3, 1e4, 1e5 (assuming a 1/s-type approach to the limit).
TailTransform make_tail_transform(TransformFn hbar, double lambda, double rho);

/// Service-tail reconstruction: with f_c the continuous part of the inverse
/// of 1/(lambda H~(s) + 1),
///   1 - G(t) = |f_c(t)| / ( lambda ( kappa + int_0^t f_c(v) dv ) ).
/// The integral is accumulated by trapezoid over the grid, with a refined
/// prefix below the first grid point. The magnitude convention in the
/// numerator is the one that round-trips the constant-shape family exactly.
/// Throws NON_TAIL when the output leaves [0,1], increases along the grid,
/// vanishes identically, or the denominator gives out.
std::vector<double> recover_service_tail(const TailTransform& tt,
                                         std::span<const double> tgrid,
                                         InversionConfig cfg = {});

enum class FeasibilityVerdict { Pass, Fail };

struct FeasibilityPoint {
    double t = 0.0;
    double value = 0.0;  // [a''(a + k) - 2 a'^2] / (a - k),  k = 1/(e^rho - 1)
    int sign = 0;
};

struct FeasibilityReport {
    std::vector<FeasibilityPoint> cond1;
    double cond2_limit_estimate = 0.0;
    bool cond1_ok = false;
    bool cond2_ok = false;
    FeasibilityVerdict verdict = FeasibilityVerdict::Fail;
};

/// Checks whether a(t) can come from a feasible busy-period tail:
/// the displayed second-derivative ratio must be positive at every probe
/// point and a(t) must vanish at infinity. Derivatives are central
/// differences with relative step `deriv_step_rel`. Probe points too close
/// to either singular value +-1/(e^rho - 1) raise NEAR_SINGULAR.
FeasibilityReport check_feasibility(const std::function<double(double)>& a, double rho,
                                    std::span<const double> probe_grid,
                                    double deriv_step_rel = 1e-4, double limit_tol = 1e-6);

}  // namespace busyq
