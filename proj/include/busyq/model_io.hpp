#pragma once

#include <functional>
#include <string>

#include <json.hpp>

#include "busyq/distributions.hpp"
#include "busyq/network.hpp"
#include "busyq/transform.hpp"

namespace busyq {

/// Service fragment schema (the `kind` field selects the variant):
///   {"kind":"constant","alpha":1.0}
///   {"kind":"exponential","rate":1.0}
///   {"kind":"beta-const","lambda":1.0,"rho":1.0,"beta":0.0}
///   {"kind":"beta-general","lambda":1.0,"rho":1.0,"beta_poly":[c0,c1,...]}
///   {"kind":"empirical","t":[...],"df":[...],"atom0":0.0}
/// `inherit_lambda` fills a missing family lambda (the queue's arrival rate).
ServiceModel parse_service(const nlohmann::json& j, const std::string& path,
                           double inherit_lambda = 0.0);

/// Queue schema: {"lambda":1.0,"service":{...}}.
QueueModel parse_queue(const nlohmann::json& j, const std::string& path = "");

/// Network schema:
///   {"nodes":[{"lambda":1.0,"service":{...}},...],
///    "routing":[[0.0,1.0],[0.0,0.0]]}
NetworkModel parse_network(const nlohmann::json& j, const std::string& path = "");

QueueModel load_queue_file(const std::string& filename);
NetworkModel load_network_file(const std::string& filename);
nlohmann::json load_json_file(const std::string& filename);

/// Transform expression `rational:"<poly>/<poly>"`, polynomials in s with
/// terms like `2.5s^3`, `s`, `-0.4`. Complex-capable.
TransformFn parse_transform_expr(const std::string& spec);

/// Real function expression for diagnostics: `rational:"<poly>/<poly>"` in t
/// or `expdecay:c,r` meaning c * e^{-r t}.
std::function<double(double)> parse_real_expr(const std::string& spec);

struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;

    std::vector<double> points() const;
};

/// Parses "start:stop:step"; step must be > 0 and stop >= start.
GridSpec parse_grid(const std::string& text, const std::string& path = "/grid");

}  // namespace busyq
