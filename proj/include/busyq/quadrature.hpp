#pragma once

#include <complex>
#include <functional>

namespace busyq::quad {

struct Tolerance {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
};

struct Result {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
};

struct ComplexResult {
    std::complex<double> value{0.0, 0.0};
    double error_estimate = 0.0;
    int evaluations = 0;
};

/// Adaptive Gauss-Kronrod (7,15) on a finite interval. Throws
/// QUADRATURE_NONCONVERGENT when the tolerance cannot be met.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 Tolerance tol = {});

/// Same rule with a complex-valued integrand (shared real nodes).
ComplexResult integrate_complex(const std::function<std::complex<double>(double)>& f,
                                double a, double b, Tolerance tol = {});

/// Integral over [a, inf) via the substitution t = a + x/(1-x).
Result integrate_to_inf(const std::function<double(double)>& f, double a,
                        Tolerance tol = {});

}  // namespace busyq::quad
