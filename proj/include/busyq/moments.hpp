#pragma once

#include <vector>

#include "busyq/distributions.hpp"

namespace busyq {

inline constexpr int kDefaultMomentCap = 10;

enum class CValueSource { Recursion, Quadrature };

struct MomentSet {
    std::vector<double> c_values;  // C^(0)..C^(n), derivatives at 0 of the kernel transform
    std::vector<double> moments;   // E[B^1]..E[B^n]
    CValueSource c_source = CValueSource::Quadrature;
    bool cancellation_warning = false;
    double digits_lost = 0.0;
};

/// Derivatives C^(n)(0) = int_0^inf (-t)^n e^{-lambda Phi(t)} lambda (1-G(t)) dt.
/// Constant services use the exact recursion
///   C^(0) = 1 - e^{-rho},  C^(n) = -e^{-rho}(-alpha)^n - n C^(n-1)/lambda;
/// every other service goes through quadrature.
std::vector<double> c_derivatives(const QueueModel& queue, int n_max,
                                  int cap = kDefaultMomentCap);

/// Busy-period moments E[B^n] by the transform-derivative recursion
///   E[B^n] = (-1)^{n+1} { (e^rho/lambda) n C^(n-1)
///            - e^rho sum_{p=1}^{n-1} (-1)^{n-p} C(n,p) E[B^{n-p}] C^(p) }.
/// The alternating sum is accumulated with compensated summation and a
/// cancellation monitor (warning once more than 8 digits are lost).
MomentSet busy_moments(const QueueModel& queue, int n_max, int cap = kDefaultMomentCap);

/// Closed-form moments for the constant-shape family:
///   E[B^n] = ((lambda+beta)/lambda)(1-e^{-rho}) n! / (e^{-rho}(lambda+beta))^n.
std::vector<double> beta_family_moments(double lambda, double rho, double beta, int n_max);

}  // namespace busyq
