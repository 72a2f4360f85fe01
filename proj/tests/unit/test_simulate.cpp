#include <doctest.h>

#include <cmath>
#include <vector>

#include "busyq/busy_law.hpp"
#include "busyq/busy_transform.hpp"
#include "busyq/errors.hpp"
#include "busyq/simulate.hpp"

using namespace busyq;

namespace {

NetworkModel tandem() {
    Eigen::VectorXd lam(2);
    lam << 1.0, 0.0;
    Eigen::MatrixXd p(2, 2);
    p << 0.0, 1.0, 0.0, 0.0;
    return {lam, p, {ServiceModel::exponential(1.0), ServiceModel::exponential(1.0)}};
}

}  // namespace

TEST_CASE("busy-period mean tracks the closed formula within 3 standard errors") {
    struct Case {
        double lambda;
        ServiceModel svc;
    };
    std::vector<Case> cases;
    cases.push_back({1.0, ServiceModel::exponential(1.0)});
    cases.push_back({1.0, ServiceModel::constant(1.0)});
    cases.push_back({0.5, ServiceModel::exponential(1.0)});
    std::uint64_t seed = 101;
    for (auto& c : cases) {
        QueueModel q(c.lambda, c.svc);
        SimConfig cfg;
        cfg.seed = seed++;
        cfg.periods = 100'000;
        auto sample = simulate_queue(q, cfg);
        CHECK(sample.busy.size() == 100'000);
        const double target = mean_busy_period(q);
        CHECK(std::abs(sample.busy_mean() - target) < 3.0 * sample.busy_stderr());
        CHECK(std::abs(sample.busy_mean() - target) / target < 0.01);
    }
}

TEST_CASE("sparse arrivals make busy periods collapse to single services") {
    QueueModel q(1e-3, ServiceModel::constant(1.0));
    SimConfig cfg;
    cfg.seed = 5;
    cfg.periods = 20'000;
    auto sample = simulate_queue(q, cfg);
    const double target = mean_busy_period(q);  // 1.0005...
    CHECK(sample.busy_mean() == doctest::Approx(target).epsilon(0.01));
    CHECK(target == doctest::Approx(1.0).epsilon(0.001));
}

TEST_CASE("busy and idle durations alternate with exponential idle gaps") {
    QueueModel q(1.0, ServiceModel::exponential(1.0));
    SimConfig cfg;
    cfg.seed = 77;
    cfg.periods = 50'000;
    auto sample = simulate_queue(q, cfg);
    CHECK(sample.idle.size() == sample.busy.size());
    double idle_mean = 0.0;
    for (double g : sample.idle) {
        CHECK(g > 0.0);
        idle_mean += g;
    }
    idle_mean /= static_cast<double>(sample.idle.size());
    CHECK(idle_mean == doctest::Approx(1.0).epsilon(0.02));  // memoryless gaps at rate 1
    for (double b : sample.busy) CHECK(b >= 0.0);
}

TEST_CASE("service laws with an origin atom produce zero-length busy periods") {
    QueueModel q(1.0, ServiceModel::beta_const(1.0, 1.0, 0.0));
    SimConfig cfg;
    cfg.seed = 5;
    cfg.periods = 100'000;
    auto sample = simulate_queue(q, cfg);
    long zeros = 0;
    for (double b : sample.busy)
        if (b == 0.0) ++zeros;
    // weight of the origin atom of the busy law is e^{-rho}
    CHECK(static_cast<double>(zeros) / sample.busy.size() ==
          doctest::Approx(std::exp(-1.0)).epsilon(0.02));
    const double ks =
        ks_distance(sample.busy, [](double t) { return t < 0 ? 0.0 : beta_const_busy_df(1.0, 1.0, 0.0, t); });
    CHECK(ks < 1.36 / std::sqrt(100'000.0));
}

TEST_CASE("busy-period d.f. for constant service matches the compound representation") {
    QueueModel q(1.0, ServiceModel::constant(1.0));
    SimConfig cfg;
    cfg.seed = 404;
    cfg.periods = 100'000;
    auto sample = simulate_queue(q, cfg);
    ConstantBusyLaw law(1.0, 1.0);
    const double ks = ks_distance(sample.busy, [&](double t) { return law.df(t); });
    CHECK(ks < 0.01);
}

TEST_CASE("horizon targets discard straddling periods and can come up empty") {
    QueueModel q(1.0, ServiceModel::exponential(1.0));
    SimConfig cfg;
    cfg.seed = 6;
    cfg.horizon = 2000.0;
    auto sample = simulate_queue(q, cfg);
    CHECK(sample.busy.size() > 100);
    for (double b : sample.busy) CHECK(b <= 2000.0);

    SimConfig tiny;
    tiny.seed = 6;
    tiny.horizon = 1e-9;
    CHECK_THROWS_AS(simulate_queue(q, tiny), Error);
    SimConfig none;
    CHECK_THROWS_AS(simulate_queue(q, none), Error);
}

TEST_CASE("identical seed and config reproduce the sample exactly") {
    QueueModel q(1.0, ServiceModel::exponential(1.0));
    SimConfig cfg;
    cfg.seed = 999;
    cfg.periods = 1000;
    auto a = simulate_queue(q, cfg);
    auto b = simulate_queue(q, cfg);
    REQUIRE(a.busy.size() == b.busy.size());
    for (std::size_t i = 0; i < a.busy.size(); ++i) CHECK(a.busy[i] == b.busy[i]);
}

TEST_CASE("replicated runs are deterministic regardless of thread budget") {
    QueueModel q(1.0, ServiceModel::exponential(1.0));
    SimConfig cfg;
    cfg.seed = 321;
    cfg.periods = 20'000;
    auto merged = simulate_queue_replicated(q, cfg, 8);
    REQUIRE(merged.busy.size() == 20'000);
    auto again = simulate_queue_replicated(q, cfg, 8);
    for (std::size_t i = 0; i < merged.busy.size(); ++i) CHECK(merged.busy[i] == again.busy[i]);
    CHECK(std::abs(merged.busy_mean() - std::expm1(1.0)) < 3.0 * merged.busy_stderr());
}

TEST_CASE("network sojourns: tandem, degenerate, and geometric feedback") {
    SimConfig cfg;
    cfg.seed = 42;
    {
        auto sojourns = simulate_network(tandem(), 100'000, cfg);
        double mean = 0.0;
        for (double s : sojourns) mean += s;
        mean /= static_cast<double>(sojourns.size());
        CHECK(mean == doctest::Approx(2.0).epsilon(0.01));
    }
    {
        Eigen::VectorXd lam(1);
        lam << 1.0;
        Eigen::MatrixXd p(1, 1);
        p << 0.0;
        NetworkModel net{lam, p, {ServiceModel::constant(3.0)}};
        auto sojourns = simulate_network(net, 1000, cfg);
        for (double s : sojourns) CHECK(s == 3.0);
    }
    {
        Eigen::VectorXd lam(1);
        lam << 1.0;
        Eigen::MatrixXd p(1, 1);
        p << 0.5;
        NetworkModel net{lam, p, {ServiceModel::exponential(1.0)}};
        auto sojourns = simulate_network(net, 100'000, cfg);
        double mean = 0.0;
        for (double s : sojourns) mean += s;
        mean /= static_cast<double>(sojourns.size());
        CHECK(mean == doctest::Approx(2.0).epsilon(0.015));
    }
}

TEST_CASE("empirical d.f. basics") {
    std::vector<double> samples{1.0, 2.0, 3.0};
    CHECK(empirical_df(samples, 2.0) == doctest::Approx(2.0 / 3.0));
    CHECK(empirical_df(samples, 0.5) == 0.0);
    CHECK(empirical_df(samples, 3.5) == 1.0);
    std::vector<double> tgrid{0.5, 2.5};
    auto grid = empirical_df_grid({3.0, 1.0, 2.0}, tgrid);
    CHECK(grid[0] == 0.0);
    CHECK(grid[1] == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(empirical_df({}, 1.0), Error);
}

TEST_CASE("Kolmogorov-Smirnov distance") {
    // constant samples against their own step d.f.: distance is zero
    std::vector<double> constants(100, 2.0);
    const double d0 = ks_distance(constants, [](double t) { return t >= 2.0 ? 1.0 : 0.0; });
    CHECK(d0 == doctest::Approx(0.0));

    // exponential sample against the true d.f.
    rng::Stream stream(1);
    std::vector<double> sample(100'000);
    for (double& x : sample) x = stream.exponential(1.0);
    const double d = ks_distance(sample, [](double t) { return t < 0 ? 0.0 : -std::expm1(-t); });
    CHECK(d < 0.006);

    // against a wrong d.f. the distance is large
    const double wrong = ks_distance(sample, [](double t) { return t < 0 ? 0.0 : -std::expm1(-2.0 * t); });
    CHECK(wrong > 0.1);
}
