#include <doctest.h>

#include <cmath>
#include <complex>

#include "busyq/errors.hpp"
#include "busyq/interp.hpp"
#include "busyq/quadrature.hpp"

using namespace busyq;

TEST_CASE("finite interval integrals hit tight tolerances") {
    auto r = quad::integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));

    auto poly = quad::integrate([](double x) { return 3.0 * x * x; }, 0.0, 2.0);
    CHECK(poly.value == doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("semi-infinite integrals via the rational substitution") {
    auto r = quad::integrate_to_inf([](double x) { return std::exp(-x); }, 0.0);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));

    // shifted start and slower decay
    auto s = quad::integrate_to_inf([](double x) { return std::exp(-0.25 * x); }, 2.0);
    CHECK(s.value == doctest::Approx(4.0 * std::exp(-0.5)).epsilon(1e-9));
}

TEST_CASE("complex integrand shares the rule") {
    const std::complex<double> s{1.0, 2.0};
    auto r = quad::integrate_complex(
        [&](double t) { return std::exp(-s * t); }, 0.0, 30.0);
    const std::complex<double> expect = 1.0 / s;  // up to e^{-30} truncation
    CHECK(std::abs(r.value - expect) < 1e-10);
}

TEST_CASE("hopeless integrands raise the nonconvergence error") {
    // oscillation with period shrinking to zero near the endpoint
    CHECK_THROWS_AS(quad::integrate([](double x) { return std::sin(1.0 / x); }, 1e-300, 1.0,
                                    {1e-16, 1e-16}),
                    Error);
}

TEST_CASE("monotone cubic interpolation preserves monotonicity") {
    std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0};
    std::vector<double> y{0.0, 0.1, 0.9, 0.95, 1.0};
    MonotoneCubic f(x, y);
    double prev = -1.0;
    for (double t = 0.0; t <= 4.0; t += 0.01) {
        const double v = f(t);
        CHECK(v >= prev - 1e-14);
        prev = v;
    }
    CHECK(f(0.0) == doctest::Approx(0.0));
    CHECK(f(2.0) == doctest::Approx(0.9));
    CHECK(f(10.0) == doctest::Approx(1.0));  // clamped beyond the grid
}
