#include "busyq/interp.hpp"

#include <algorithm>
#include <cmath>

#include "busyq/errors.hpp"

namespace busyq {

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        fail_validation("INTERP_GRID", "", "interpolation grid needs >= 2 points");
    std::vector<double> secant(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dx = x_[i + 1] - x_[i];
        if (dx <= 0.0) fail_validation("INTERP_GRID", "", "grid must be strictly increasing");
        secant[i] = (y_[i + 1] - y_[i]) / dx;
    }
    tangent_.assign(n, 0.0);
    tangent_[0] = secant[0];
    tangent_[n - 1] = secant[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (secant[i - 1] * secant[i] <= 0.0)
            tangent_[i] = 0.0;
        else
            tangent_[i] = 0.5 * (secant[i - 1] + secant[i]);
    }
    // Fritsch-Carlson limiter.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (secant[i] == 0.0) {
            tangent_[i] = tangent_[i + 1] = 0.0;
            continue;
        }
        const double a = tangent_[i] / secant[i];
        const double b = tangent_[i + 1] / secant[i];
        const double r2 = a * a + b * b;
        if (r2 > 9.0) {
            const double scale = 3.0 / std::sqrt(r2);
            tangent_[i] = scale * a * secant[i];
            tangent_[i + 1] = scale * b * secant[i];
        }
    }
}

double MonotoneCubic::operator()(double t) const {
    if (t <= x_.front()) return y_.front();
    if (t >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double u = (t - x_[i]) / h;
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1;
    const double h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2;
    const double h11 = u3 - u2;
    return h00 * y_[i] + h10 * h * tangent_[i] + h01 * y_[i + 1] + h11 * h * tangent_[i + 1];
}

}  // namespace busyq
