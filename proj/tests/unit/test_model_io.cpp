#include <doctest.h>

#include <cmath>
#include <complex>

#include "busyq/errors.hpp"
#include "busyq/model_io.hpp"

using namespace busyq;
using nlohmann::json;

TEST_CASE("service fragments parse for every kind") {
    auto constant = parse_service(json::parse(R"({"kind":"constant","alpha":2.0})"), "");
    CHECK(constant.mean() == doctest::Approx(2.0));

    auto exponential = parse_service(json::parse(R"({"kind":"exponential","rate":0.5})"), "");
    CHECK(exponential.mean() == doctest::Approx(2.0));

    auto family =
        parse_service(json::parse(R"({"kind":"beta-const","lambda":1.0,"rho":1.0,"beta":0.0})"), "");
    CHECK(family.df(1.0) == doctest::Approx(0.61269983678).epsilon(1e-9));

    auto general = parse_service(
        json::parse(R"({"kind":"beta-general","lambda":1.0,"rho":1.0,"beta_poly":[0.0]})"), "");
    CHECK(general.mean() == doctest::Approx(1.0).epsilon(1e-10));

    auto empirical = parse_service(
        json::parse(R"({"kind":"empirical","t":[0.0,1.0,2.0],"df":[0.0,0.5,1.0]})"), "");
    CHECK(empirical.df(1.0) == doctest::Approx(0.5));
    CHECK(empirical.df(5.0) == 1.0);
    CHECK(empirical.mean() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("family lambda is inherited from the queue when omitted") {
    auto queue =
        parse_queue(json::parse(R"({"lambda":2.0,"service":{"kind":"beta-const","rho":1.0,"beta":0.0}})"));
    CHECK(queue.lambda() == 2.0);
    CHECK(queue.rho() == doctest::Approx(1.0));
}

TEST_CASE("schema errors carry pointer-style paths") {
    try {
        parse_queue(json::parse(R"({"service":{"kind":"constant","alpha":1.0}})"));
        FAIL("expected a missing-field error");
    } catch (const Error& e) {
        CHECK(e.code() == "MISSING_FIELD");
        CHECK(e.path() == "/lambda");
        CHECK(e.kind() == ErrorKind::Validation);
    }
    try {
        parse_service(json::parse(R"({"kind":"magic"})"), "/service");
        FAIL("expected an unknown-kind error");
    } catch (const Error& e) {
        CHECK(e.code() == "SCHEMA_TYPE");
        CHECK(e.path() == "/service/kind");
    }
    try {
        parse_network(json::parse(
            R"({"nodes":[{"lambda":1.0,"service":{"kind":"exponential","rate":1.0}},
                         {"lambda":0.0,"service":{"kind":"exponential","rate":1.0}}],
                "routing":[[0.7,0.5],[0.0,0.0]]})"));
        FAIL("expected a row-sum error");
    } catch (const Error& e) {
        CHECK(e.code() == "ROUTING_ROW_SUM");
        CHECK(e.path() == "/routing/0");
    }
}

TEST_CASE("network fragment parses into a solvable model") {
    auto net = parse_network(json::parse(
        R"({"nodes":[{"lambda":1.0,"service":{"kind":"exponential","rate":1.0}},
                     {"lambda":0.0,"service":{"kind":"exponential","rate":1.0}}],
            "routing":[[0.0,1.0],[0.0,0.0]]})"));
    CHECK(net.node_count() == 2);
    CHECK(net.total_rate() == doctest::Approx(1.0));
    CHECK(net.exit_probabilities()(1) == doctest::Approx(1.0));
}

TEST_CASE("rational transform expressions") {
    auto tf = parse_transform_expr("rational:(0.6321205588)/(s+0.3678794412)");
    CHECK(tf.complex_capable);
    CHECK(tf.real_at(1.0) == doctest::Approx(0.6321205588 / 1.3678794412).epsilon(1e-12));
    const std::complex<double> v = tf({0.0, 1.0});
    CHECK(std::abs(v - 0.6321205588 / std::complex<double>(0.3678794412, 1.0)) < 1e-12);

    auto quad = parse_transform_expr("rational:(1)/(s^2+2s+1)");
    CHECK(quad.real_at(1.0) == doctest::Approx(0.25).epsilon(1e-12));

    CHECK_THROWS_AS(parse_transform_expr("rational:(1)/(0)"), Error);
    CHECK_THROWS_AS(parse_transform_expr("poly:1+s"), Error);
    CHECK_THROWS_AS(parse_transform_expr("rational:(1+)/(s)"), Error);
}

TEST_CASE("real function expressions for the feasibility probe") {
    auto rational = parse_real_expr("rational:(10)/(1+t)");
    CHECK(rational(1.0) == doctest::Approx(5.0));
    auto decay = parse_real_expr("expdecay:0.5,2.0");
    CHECK(decay(1.0) == doctest::Approx(0.5 * std::exp(-2.0)));
    CHECK_THROWS_AS(parse_real_expr("expdecay:0.5"), Error);
}

TEST_CASE("grid specifications") {
    auto g = parse_grid("0:10:0.5");
    auto pts = g.points();
    CHECK(pts.size() == 21);
    CHECK(pts.front() == 0.0);
    CHECK(pts.back() == doctest::Approx(10.0));
    CHECK_THROWS_AS(parse_grid("0:10:0"), Error);
    CHECK_THROWS_AS(parse_grid("5:1:0.5"), Error);
    CHECK_THROWS_AS(parse_grid("1:2"), Error);
}
