#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "busyq/distributions.hpp"
#include "busyq/errors.hpp"
#include "busyq/quadrature.hpp"
#include "busyq/rng.hpp"
#include "busyq/simulate.hpp"

using namespace busyq;

namespace {
const double kE = std::exp(1.0);
}

TEST_CASE("constant service is a step d.f. at alpha") {
    auto svc = ServiceModel::constant(1.0);
    CHECK(svc.df(0.5) == 0.0);
    CHECK(svc.df(1.5) == 1.0);
    CHECK(svc.df(1.0) == 1.0);  // right-continuous at the jump
    CHECK(svc.mean() == doctest::Approx(1.0));
    CHECK(svc.integrated_tail(0.25) == doctest::Approx(0.25));
    CHECK(svc.integrated_tail(7.0) == doctest::Approx(1.0));
    CHECK_FALSE(svc.has_density());
    CHECK_THROWS_AS(svc.density(0.5), Error);
    CHECK_THROWS_AS(svc.df(-0.1), Error);
    CHECK_THROWS_AS(ServiceModel::constant(0.0), Error);
}

TEST_CASE("family d.f. closed form and its endpoints") {
    // direct evaluation, cross-checked against the integral representation
    CHECK(beta_const_service_df(1.0, 1.0, 0.0, 1.0) == doctest::Approx(0.61269983678).epsilon(1e-9));
    CHECK(beta_const_service_df(1.0, 1.0, 0.0, 0.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    // degenerate endpoint beta = -lambda: d.f. identically one...
    CHECK(beta_const_service_df(1.0, 1.0, -1.0, 0.0) == 1.0);
    CHECK(beta_const_service_df(1.0, 1.0, -1.0, 5.0) == 1.0);
    // ...but rejected as a service model (zero mean)
    CHECK_THROWS_AS(ServiceModel::beta_const(1.0, 1.0, -1.0), Error);
    // out-of-range beta rejected
    const double beta_max = 1.0 / std::expm1(1.0);
    CHECK_THROWS_AS(ServiceModel::beta_const(1.0, 1.0, beta_max + 1e-6), Error);
    // upper endpoint admitted, atom vanishes there
    auto top = ServiceModel::beta_const(1.0, 1.0, beta_max);
    CHECK(top.atom() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("family mean is rho/lambda, verified by tail quadrature") {
    for (double lambda : {0.5, 1.0, 2.0}) {
        for (double rho : {0.5, 1.0, 2.0}) {
            const double beta_max = lambda / std::expm1(rho);
            for (double beta : {-0.4 * lambda, 0.0, 0.9 * beta_max}) {
                auto svc = ServiceModel::beta_const(lambda, rho, beta);
                CHECK(svc.mean() == doctest::Approx(rho / lambda).epsilon(1e-12));
                const double cut = svc.tail_cutoff(1e-14);
                const double by_quadrature =
                    quad::integrate([&](double t) { return svc.tail(t); }, 0.0, cut).value;
                CHECK(by_quadrature == doctest::Approx(rho / lambda).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("beta-const example values from the mean operation") {
    auto svc = ServiceModel::beta_const(2.0, 1.0, 0.1);
    CHECK(svc.mean() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("function-parameter family reduces to the constant-shape one") {
    auto general = ServiceModel::beta_general(1.0, 1.0, [](double) { return 0.0; });
    for (double t : {0.0, 0.3, 1.0, 2.5, 6.0}) {
        CHECK(general.df(t) ==
              doctest::Approx(beta_const_service_df(1.0, 1.0, 0.0, t)).epsilon(1e-7));
    }
    CHECK(general.mean() == doctest::Approx(1.0).epsilon(1e-12));
    // integrated tail agrees with the constant-shape closed form up to the
    // cumulative-integral memo resolution
    auto closed = ServiceModel::beta_const(1.0, 1.0, 0.0);
    for (double t : {0.5, 1.0, 3.0})
        CHECK(general.integrated_tail(t) ==
              doctest::Approx(closed.integrated_tail(t)).epsilon(1e-7));
}

TEST_CASE("function-parameter family with a genuinely varying shape") {
    // beta(u) = 0.1 e^{-u} keeps (int beta)/t well inside the admissible band
    auto svc = ServiceModel::beta_general(1.0, 1.0, [](double u) { return 0.1 * std::exp(-u); });
    CHECK(svc.mean() == doctest::Approx(1.0).epsilon(1e-12));
    const double cut = svc.tail_cutoff(1e-13);
    const double numeric_mean =
        quad::integrate([&](double t) { return svc.tail(t); }, 0.0, cut, {1e-11, 1e-9}).value;
    CHECK(numeric_mean == doctest::Approx(1.0).epsilon(1e-6));
    // d.f. is a proper nondecreasing function
    double prev = -1.0;
    for (double t = 0.0; t < 8.0; t += 0.05) {
        const double v = svc.df(t);
        CHECK(v >= prev - 1e-12);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
}

TEST_CASE("range condition rejects an inadmissible shape function") {
    // (int beta)/t ~ beta0 > lambda/(e^rho-1) violates the upper bound
    const double beta_max = 1.0 / std::expm1(1.0);
    CHECK_THROWS_AS(
        ServiceModel::beta_general(1.0, 1.0, [=](double) { return 2.0 * beta_max; }), Error);
    CHECK_THROWS_AS(ServiceModel::beta_general(1.0, 1.0, [](double) { return -1.5; }), Error);
}

TEST_CASE("empirical model: exponential d.f. round trip") {
    auto svc = ServiceModel::empirical([](double t) { return -std::expm1(-t); }, 0.0);
    CHECK(svc.mean() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(svc.atom() == 0.0);
    CHECK(svc.df(1.0) == doctest::Approx(-std::expm1(-1.0)).epsilon(1e-12));
    CHECK(svc.integrated_tail(2.0) == doctest::Approx(-std::expm1(-2.0)).epsilon(1e-7));
}

TEST_CASE("empirical model validations") {
    // declared atom disagreeing with df(0)
    CHECK_THROWS_AS(ServiceModel::empirical([](double t) { return -std::expm1(-t); }, 0.3),
                    Error);
    // decreasing "d.f."
    CHECK_THROWS_AS(
        ServiceModel::empirical([](double t) { return t < 1.0 ? 0.9 - 0.5 * t : 1.0; }, 0.9),
        Error);
}

TEST_CASE("df is nondecreasing and within [0,1] for every variant") {
    std::vector<ServiceModel> models;
    models.push_back(ServiceModel::constant(2.0));
    models.push_back(ServiceModel::exponential(0.7));
    models.push_back(ServiceModel::beta_const(1.0, 1.5, 0.05));
    models.push_back(ServiceModel::empirical([](double t) { return -std::expm1(-2.0 * t); }));
    rng::Stream grid_stream(7);
    for (const auto& svc : models) {
        std::vector<double> ts;
        for (int i = 0; i < 200; ++i) ts.push_back(grid_stream.uniform() * 10.0);
        std::sort(ts.begin(), ts.end());
        double prev = -1.0;
        for (double t : ts) {
            const double v = svc.df(t);
            CHECK(v >= prev - 1e-12);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            prev = v;
        }
    }
}

TEST_CASE("sampling matches the d.f. (Kolmogorov-Smirnov)") {
    const int n = 100'000;
    std::vector<ServiceModel> models;
    models.push_back(ServiceModel::constant(1.0));
    models.push_back(ServiceModel::exponential(1.0));
    models.push_back(ServiceModel::beta_const(1.0, 1.0, 0.0));
    models.push_back(ServiceModel::beta_general(1.0, 1.0, [](double u) { return 0.1 * std::exp(-u); }));
    models.push_back(ServiceModel::empirical([](double t) { return -std::expm1(-t); }));
    std::uint64_t seed = 1234;
    for (const auto& svc : models) {
        rng::Stream stream(seed++);
        std::vector<double> samples(n);
        for (double& x : samples) x = svc.sample(stream);
        const double ks = ks_distance(samples, [&](double t) { return t < 0 ? 0.0 : svc.df(t); });
        CHECK(ks < 0.01);
    }
}

TEST_CASE("sampling example values") {
    rng::Stream stream(42);
    auto constant = ServiceModel::constant(1.0);
    for (int i = 0; i < 5; ++i) CHECK(constant.sample(stream) == 1.0);

    auto exp_svc = ServiceModel::exponential(1.0);
    double sum = 0.0;
    const int n = 100'000;
    for (int i = 0; i < n; ++i) sum += exp_svc.sample(stream);
    CHECK(sum / n == doctest::Approx(1.0).epsilon(0.01));

    // family draws reproduce the d.f. pointwise
    auto family = ServiceModel::beta_const(1.0, 1.0, 0.0);
    int below = 0;
    for (int i = 0; i < n; ++i)
        if (family.sample(stream) <= 1.0) ++below;
    CHECK(static_cast<double>(below) / n ==
          doctest::Approx(0.6127).epsilon(0.01));
}

TEST_CASE("identical seeds give identical samples") {
    auto svc = ServiceModel::beta_const(1.0, 1.0, 0.1);
    rng::Stream a(99), b(99);
    for (int i = 0; i < 100; ++i) CHECK(svc.sample(a) == svc.sample(b));
}

TEST_CASE("queue model validation") {
    CHECK_THROWS_AS(QueueModel(0.0, ServiceModel::constant(1.0)), Error);
    CHECK_THROWS_AS(QueueModel(-1.0, ServiceModel::constant(1.0)), Error);
    // family service must carry the queue's arrival rate
    CHECK_THROWS_AS(QueueModel(2.0, ServiceModel::beta_const(1.0, 1.0, 0.0)), Error);
    QueueModel q(0.5, ServiceModel::constant(2.0));
    CHECK(q.rho() == doctest::Approx(1.0));
}

TEST_CASE("service transform: closed forms and quadrature route") {
    auto tf_const = service_transform(ServiceModel::constant(2.0));
    CHECK(tf_const.complex_capable);
    CHECK(tf_const.real_at(0.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

    auto tf_exp = service_transform(ServiceModel::exponential(2.0));
    CHECK(tf_exp.real_at(1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    auto tf_family = service_transform(ServiceModel::beta_const(1.0, 1.0, 0.0));
    CHECK_FALSE(tf_family.complex_capable);
    CHECK(tf_family.real_at(0.0) == 1.0);  // exact at the origin
    // frozen quadrature oracle values
    CHECK(tf_family.real_at(1.0) == doctest::Approx(0.58197670686933).epsilon(1e-8));
    CHECK(tf_family.real_at(0.3) == doctest::Approx(0.78520314601929).epsilon(1e-8));
}
