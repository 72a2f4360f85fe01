#pragma once

#include <vector>

namespace busyq {

/// Monotone (Fritsch-Carlson) piecewise-cubic interpolant. Preserves the
/// monotonicity of the sampled data, which keeps interpolated distribution
/// functions and integrated tails nondecreasing.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double t) const;
    bool empty() const { return x_.empty(); }
    double front_x() const { return x_.front(); }
    double back_x() const { return x_.back(); }
    double back_y() const { return y_.back(); }

private:
    std::vector<double> x_, y_, tangent_;
};

}  // namespace busyq
