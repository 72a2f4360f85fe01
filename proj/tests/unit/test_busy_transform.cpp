#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "busyq/busy_transform.hpp"
#include "busyq/errors.hpp"

using namespace busyq;

namespace {

QueueModel unit_constant_queue() { return {1.0, ServiceModel::constant(1.0)}; }

}  // namespace

TEST_CASE("transform of a proper law is 1 at the origin, for every variant") {
    std::vector<QueueModel> queues;
    queues.emplace_back(1.0, ServiceModel::constant(1.0));
    queues.emplace_back(1.0, ServiceModel::exponential(1.0));
    queues.emplace_back(1.0, ServiceModel::beta_const(1.0, 1.0, 0.0));
    queues.emplace_back(1.0, ServiceModel::beta_general(1.0, 1.0,
                                                        [](double u) { return 0.1 * std::exp(-u); }));
    queues.emplace_back(1.0, ServiceModel::empirical([](double t) { return -std::expm1(-t); }));
    for (const auto& q : queues) {
        BusyTransform bt(q);
        CHECK(std::abs(bt.eval({0.0, 0.0}) - 1.0) < 1e-8);
        CHECK(std::abs(bt.eval_quadrature({0.0, 0.0}) - 1.0) < 1e-8);
    }
}

TEST_CASE("constant service: frozen quadrature oracle values") {
    BusyTransform bt(unit_constant_queue());
    // reference values from 40-digit quadrature of the defining integral
    CHECK(bt.eval_real(1.0) == doctest::Approx(0.238405844044).epsilon(1e-9));
    CHECK(bt.eval_real(0.5) == doctest::Approx(0.46284231894566).epsilon(1e-9));
    const std::complex<double> v = bt.eval({1.0, 2.0});
    CHECK(std::abs(v - std::complex<double>(-0.12403142758612, -0.13347651557544)) < 1e-8);
    // truncation lands exactly on the service cutoff
    CHECK(bt.truncation_point() == doctest::Approx(1.0));
}

TEST_CASE("exponential service: frozen quadrature oracle values") {
    BusyTransform bt({1.0, ServiceModel::exponential(1.0)});
    CHECK(bt.eval_real(0.25) == doctest::Approx(0.7154469045637).epsilon(1e-8));
    CHECK(bt.eval_real(1.0) == doctest::Approx(0.41802329313067).epsilon(1e-8));
    CHECK(bt.eval_real(4.0) == doctest::Approx(0.17552983254423).epsilon(1e-8));
    const std::complex<double> v = bt.eval({1.0, 2.0});
    CHECK(std::abs(v - std::complex<double>(0.21863434735419, -0.19073996566212)) < 1e-7);
}

TEST_CASE("constant-shape family: closed form equals quadrature") {
    for (double lambda : {0.5, 1.0}) {
        for (double rho : {0.5, 1.0, 2.0}) {
            const double beta = 0.3 * lambda / std::expm1(rho);
            BusyTransform bt({lambda, ServiceModel::beta_const(lambda, rho, beta)});
            CHECK(bt.closed_form());
            for (int i = 1; i <= 16; ++i) {
                const double s = 10.0 * i / 16.0;
                CHECK(std::abs(bt.eval_real(s) - bt.eval_quadrature({s, 0.0}).real()) < 1e-6);
            }
        }
    }
}

TEST_CASE("closed-form value at s = 1 for the unit family member") {
    BusyTransform bt({1.0, ServiceModel::beta_const(1.0, 1.0, 0.0)});
    // atom e^{-1} plus (1-e^{-1}) e^{-1}/(1+e^{-1}); quadrature agrees
    const double expect = 0.53788284274;
    CHECK(bt.eval_real(1.0) == doctest::Approx(expect).epsilon(1e-10));
    CHECK(bt.eval_quadrature({1.0, 0.0}).real() == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("finite-difference mean against the closed mean formula") {
    std::vector<QueueModel> queues;
    queues.emplace_back(1.0, ServiceModel::constant(1.0));
    queues.emplace_back(0.5, ServiceModel::exponential(0.5));
    queues.emplace_back(1.0, ServiceModel::beta_const(1.0, 1.0, 0.0));
    queues.emplace_back(1.0, ServiceModel::empirical([](double t) { return -std::expm1(-t); }));
    for (const auto& q : queues) {
        BusyTransform bt(q);
        const double h = 1e-5;
        const double fd_mean = -(bt.eval_real(h) - 1.0) / h;
        CHECK(fd_mean == doctest::Approx(mean_busy_period(q)).epsilon(1e-3));
    }
}

TEST_CASE("transform is positive and strictly decreasing on the real axis") {
    std::vector<QueueModel> queues;
    queues.emplace_back(1.0, ServiceModel::constant(1.0));
    queues.emplace_back(1.0, ServiceModel::exponential(1.0));
    queues.emplace_back(1.0, ServiceModel::beta_const(1.0, 1.0, 0.1));
    for (const auto& q : queues) {
        BusyTransform bt(q);
        double prev = 1.0;
        for (int i = 1; i <= 16; ++i) {
            const double v = bt.eval_real(10.0 * i / 16.0);
            CHECK(v > 0.0);
            CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("mean busy period") {
    CHECK(mean_busy_period(unit_constant_queue()) ==
          doctest::Approx(std::expm1(1.0)).epsilon(1e-12));
    CHECK(mean_busy_period({0.5, ServiceModel::constant(2.0)}) ==
          doctest::Approx(2.0 * std::expm1(1.0)).epsilon(1e-12));
    // vanishing traffic: busy period collapses to one service time
    CHECK(mean_busy_period({1.0, ServiceModel::constant(1e-9)}) ==
          doctest::Approx(1e-9).epsilon(1e-6));
    CHECK_THROWS_AS(mean_busy_period({1.0, ServiceModel::constant(701.0)}), Error);
}

TEST_CASE("negative real part is rejected") {
    BusyTransform bt(unit_constant_queue());
    CHECK_THROWS_AS(bt.eval({-0.5, 0.0}), Error);
}
