#pragma once

#include <span>
#include <vector>

#include "busyq/transform.hpp"

namespace busyq {

enum class InversionMethod { Auto, GaverStehfest, Talbot };

/// Auto picks Talbot for complex-capable transforms (deformed contour,
/// roughly 0.6 digits per node up to the double-precision ceiling) and
/// Gaver-Stehfest otherwise (real axis only). order = 0 selects the
/// per-method default: 14 for Gaver-Stehfest, 32 for Talbot.
struct InversionConfig {
    InversionMethod method = InversionMethod::Auto;
    int order = 0;
};

/// Pointwise inverse transform at t > 0. The transform must not hide a
/// point mass: atoms invert to delta terms that no sampling rule can see,
/// so callers split them off analytically first.
double invert(const TransformFn& f, double t, InversionConfig cfg = {});

struct DfInversion {
    std::vector<double> values;
    /// Largest adjacent monotonicity violation before regularization.
    double max_violation = 0.0;
};

/// Inverts s -> (1/s) * (transform of a proper law) on a grid of t values,
/// clamps to [0, 1] and applies an isotonic (pool-adjacent-violators) pass.
/// A pre-regularization violation above 0.01 raises INVERSION_ACCURACY.
DfInversion invert_df(const TransformFn& f, std::span<const double> tgrid,
                      InversionConfig cfg = {});

}  // namespace busyq
