#include <doctest.h>

#include <cmath>
#include <vector>

#include "busyq/busy_law.hpp"
#include "busyq/busy_transform.hpp"
#include "busyq/errors.hpp"
#include "busyq/rng.hpp"

using namespace busyq;

namespace {
const double kEInv = std::exp(-1.0);
}

TEST_CASE("family busy d.f. closed form") {
    CHECK(beta_const_busy_df(1.0, 1.0, 0.0, 0.0) == doctest::Approx(kEInv).epsilon(1e-12));
    CHECK(beta_const_busy_df(1.0, 1.0, 0.0, 1.0) ==
          doctest::Approx(0.562445752488).epsilon(1e-10));
    // exponential endpoint: pure exponential of rate lambda/(e^rho - 1)
    const double beta = 1.0 / std::expm1(1.0);
    for (double t : {0.2, 1.0, 4.0})
        CHECK(beta_const_busy_df(1.0, 1.0, beta, t) ==
              doctest::Approx(-std::expm1(-t / std::expm1(1.0))).epsilon(1e-12));
    // degenerate endpoint
    CHECK(beta_const_busy_df(1.0, 1.0, -1.0, 3.0) == 1.0);
}

TEST_CASE("convolution-series law for the family service matches the closed form") {
    QueueModel q(1.0, ServiceModel::beta_const(1.0, 1.0, 0.0));
    BusyGridSpec spec;
    spec.step = 0.005;
    spec.horizon = 40.0;
    AtomicLaw law = general_busy_density(q, spec);
    CHECK(law.atom0 == doctest::Approx(kEInv).epsilon(1e-12));
    CHECK(law.total_mass() == doctest::Approx(1.0).epsilon(1e-4));
    double worst = 0.0;
    for (double t = 0.0; t <= 10.0; t += 0.25)
        worst = std::max(worst, std::abs(law.df(t) - beta_const_busy_df(1.0, 1.0, 0.0, t)));
    CHECK(worst < 5e-3);
    CHECK(law.df(1.0) == doctest::Approx(0.562445752488).epsilon(5e-3));
}

TEST_CASE("series law for exponential service has the universal mean") {
    QueueModel q(1.0, ServiceModel::exponential(1.0));
    BusyGridSpec spec;
    spec.step = 0.005;
    spec.horizon = 45.0;
    AtomicLaw law = general_busy_density(q, spec);
    CHECK(law.atom0 == 0.0);
    CHECK(law.mean() == doctest::Approx(std::expm1(1.0)).epsilon(0.01));
    CHECK(law.total_mass() == doctest::Approx(1.0).epsilon(1e-3));
    // every density value is nonnegative and the d.f. is monotone
    double prev = 0.0;
    for (double t = 0.0; t < 20.0; t += 0.1) {
        const double v = law.df(t);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
}

TEST_CASE("grid transform of the produced law matches the busy transform") {
    QueueModel q(1.0, ServiceModel::exponential(1.0));
    BusyGridSpec spec;
    spec.step = 0.005;
    spec.horizon = 45.0;
    AtomicLaw law = general_busy_density(q, spec);
    BusyTransform bt(q);
    for (double s : {0.25, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0}) {
        double grid_transform = law.atom0;
        const auto& d = law.density;
        double acc = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double w = (i == 0 || i + 1 == d.size()) ? 0.5 : 1.0;
            acc += w * std::exp(-s * i * law.step) * d[i];
        }
        grid_transform += acc * law.step;
        CHECK(std::abs(grid_transform - bt.eval_real(s)) < 1e-3);
    }
}

TEST_CASE("function-parameter family at the degenerate endpoint is all-ones") {
    std::vector<double> grid{0.0, 0.5, 1.0, 4.0};
    auto values = beta_general_busy_df(1.0, 1.0, [](double) { return -1.0; }, grid);
    for (double v : values) CHECK(v == 1.0);
}

TEST_CASE("constant service is routed away from the density series") {
    QueueModel q(1.0, ServiceModel::constant(1.0));
    CHECK_THROWS_AS(general_busy_density(q), Error);
}

TEST_CASE("a hopeless grid raises the coarseness error") {
    QueueModel q(1.0, ServiceModel::exponential(1.0));
    BusyGridSpec spec;
    spec.step = 5.0;  // cannot resolve a unit-mean kernel
    spec.horizon = 40.0;
    CHECK_THROWS_AS(general_busy_density(q, spec), Error);
}

TEST_CASE("function-parameter family busy d.f.: flat shape matches closed form") {
    std::vector<double> grid;
    for (double t = 0.0; t <= 6.0; t += 0.1) grid.push_back(t);
    auto values = beta_general_busy_df(1.0, 1.0, [](double) { return 0.0; }, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(values[i] - beta_const_busy_df(1.0, 1.0, 0.0, grid[i])));
    CHECK(worst < 1e-4);
}

TEST_CASE("function-parameter family at the exponential endpoint") {
    const double rho = 1.0;
    const double beta = 1.0 / std::expm1(rho);
    std::vector<double> grid;
    for (double t = 0.0; t <= 6.0; t += 0.1) grid.push_back(t);
    auto values = beta_general_busy_df(1.0, rho, [=](double) { return beta; }, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst,
                         std::abs(values[i] + std::expm1(-grid[i] / std::expm1(rho))));
    CHECK(worst < 1e-4);
}

TEST_CASE("truncated exponential building block") {
    TruncatedExp a{1.0, 1.0};
    CHECK(a.df(0.0) == 0.0);
    CHECK(a.df(1.0) == 1.0);
    CHECK(a.df(0.999999) == doctest::Approx(1.0).epsilon(1e-5));  // continuous at the cutoff
    CHECK(a.mean() == doctest::Approx(0.418023293131).epsilon(1e-10));
    rng::Stream stream(5);
    double sum = 0.0;
    const int n = 200'000;
    for (int i = 0; i < n; ++i) {
        const double x = a.sample(stream);
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        sum += x;
    }
    CHECK(sum / n == doctest::Approx(a.mean()).epsilon(0.01));
}

TEST_CASE("constant-service busy law: compound-geometric representation") {
    ConstantBusyLaw law(1.0, 1.0);
    // algebraic identity: alpha + (e^rho - 1) E[A] collapses to the closed mean
    TruncatedExp a{1.0, 1.0};
    CHECK(law.alpha() + std::expm1(1.0) * a.mean() ==
          doctest::Approx(std::expm1(1.0)).epsilon(1e-10));
    CHECK(law.mean() == doctest::Approx(std::expm1(1.0)).epsilon(1e-12));

    // d.f.: nothing below alpha, atom e^{-rho} at alpha, monotone to 1
    CHECK(law.df(0.999) == 0.0);
    CHECK(law.df(1.0) == doctest::Approx(kEInv).epsilon(1e-6));
    CHECK(law.df(30.0) == doctest::Approx(1.0).epsilon(1e-3));

    rng::Stream stream(11);
    double sum = 0.0;
    const int n = 100'000;
    for (int i = 0; i < n; ++i) sum += law.sample(stream);
    CHECK(sum / n == doctest::Approx(std::expm1(1.0)).epsilon(0.01));
}

TEST_CASE("constant busy law at vanishing traffic reduces to one service") {
    ConstantBusyLaw law(1e-3, 1.0);
    rng::Stream stream(3);
    double sum = 0.0;
    const int n = 10'000;
    for (int i = 0; i < n; ++i) sum += law.sample(stream);
    CHECK(sum / n == doctest::Approx(1.0).epsilon(1e-2));
    // almost all draws are exactly alpha
    rng::Stream again(3);
    int exact = 0;
    for (int i = 0; i < n; ++i)
        if (law.sample(again) == 1.0) ++exact;
    CHECK(exact > n * 0.99);
}
