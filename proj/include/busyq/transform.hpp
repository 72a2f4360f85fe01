#pragma once

#include <complex>
#include <functional>

namespace busyq {

/// An evaluable Laplace transform s -> value. `complex_capable` says whether
/// the function may be evaluated off the positive real axis (closed forms
/// are; quadrature-backed transforms support real s only, which restricts
/// the inversion contour choice).
struct TransformFn {
    std::function<std::complex<double>(std::complex<double>)> fn;
    bool complex_capable = true;

    std::complex<double> operator()(std::complex<double> s) const { return fn(s); }
    double real_at(double s) const { return fn(std::complex<double>(s, 0.0)).real(); }
};

}  // namespace busyq
