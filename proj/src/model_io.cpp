#include "busyq/model_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <vector>

#include "busyq/errors.hpp"
#include "busyq/interp.hpp"

namespace busyq {
namespace {

double require_number(const nlohmann::json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key))
        fail_validation("MISSING_FIELD", path + "/" + key, "required field is missing");
    const auto& v = j.at(key);
    if (!v.is_number())
        fail_validation("SCHEMA_TYPE", path + "/" + key, "expected a number");
    return v.get<double>();
}

std::vector<double> require_number_array(const nlohmann::json& j, const std::string& key,
                                         const std::string& path) {
    if (!j.contains(key))
        fail_validation("MISSING_FIELD", path + "/" + key, "required field is missing");
    const auto& v = j.at(key);
    if (!v.is_array())
        fail_validation("SCHEMA_TYPE", path + "/" + key, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number())
            fail_validation("SCHEMA_TYPE", path + "/" + key, "expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

// polynomial parser: term (('+'|'-') term)*, term = [number]['*'][var['^'uint]]
struct Polynomial {
    std::vector<double> coeffs;  // coeffs[k] multiplies x^k

    template <typename T>
    T eval(T x) const {
        T acc{};
        for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
        return acc;
    }
};

Polynomial parse_poly(const std::string& text, const std::string& path) {
    Polynomial poly;
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) ||
                                   text[i] == '(' || text[i] == ')'))
            ++i;
    };
    skip_ws();
    if (i >= text.size()) fail_validation("EXPR_PARSE", path, "empty polynomial");
    bool first = true;
    while (true) {
        skip_ws();
        if (i >= text.size()) break;
        double sign = 1.0;
        if (text[i] == '+' || text[i] == '-') {
            sign = text[i] == '-' ? -1.0 : 1.0;
            ++i;
        } else if (!first) {
            fail_validation("EXPR_PARSE", path, "expected '+' or '-' between terms");
        }
        skip_ws();
        double coeff = 1.0;
        bool saw_number = false;
        if (i < text.size() &&
            (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) {
            char* end = nullptr;
            coeff = std::strtod(text.c_str() + i, &end);
            i = static_cast<std::size_t>(end - text.c_str());
            saw_number = true;
        }
        skip_ws();
        if (i < text.size() && text[i] == '*') {
            ++i;
            skip_ws();
        }
        int power = 0;
        if (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) {
            ++i;  // variable letter (s or t)
            power = 1;
            if (i < text.size() && text[i] == '^') {
                ++i;
                if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
                    fail_validation("EXPR_PARSE", path, "expected an integer exponent after '^'");
                char* end = nullptr;
                power = static_cast<int>(std::strtol(text.c_str() + i, &end, 10));
                i = static_cast<std::size_t>(end - text.c_str());
            }
        } else if (!saw_number) {
            fail_validation("EXPR_PARSE", path, "expected a coefficient or a variable");
        }
        if (power < 0 || power > 64)
            fail_validation("EXPR_PARSE", path, "exponent out of range");
        if (static_cast<std::size_t>(power) >= poly.coeffs.size())
            poly.coeffs.resize(power + 1, 0.0);
        poly.coeffs[power] += sign * coeff;
        first = false;
    }
    if (poly.coeffs.empty()) fail_validation("EXPR_PARSE", path, "empty polynomial");
    return poly;
}

std::pair<Polynomial, Polynomial> parse_rational(const std::string& body,
                                                 const std::string& path) {
    // split on the '/' that separates the two polynomials (none appears
    // inside a polynomial term)
    const std::size_t slash = body.find('/');
    if (slash == std::string::npos)
        fail_validation("EXPR_PARSE", path, "rational form needs '<poly>/<poly>'");
    Polynomial num = parse_poly(body.substr(0, slash), path);
    Polynomial den = parse_poly(body.substr(slash + 1), path);
    bool den_nonzero = false;
    for (double c : den.coeffs) den_nonzero = den_nonzero || c != 0.0;
    if (!den_nonzero) fail_validation("EXPR_PARSE", path, "zero denominator polynomial");
    return {std::move(num), std::move(den)};
}

std::string strip_quotes(std::string s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        return s.substr(1, s.size() - 2);
    return s;
}

}  // namespace

ServiceModel parse_service(const nlohmann::json& j, const std::string& path,
                           double inherit_lambda) {
    if (!j.is_object()) fail_validation("SCHEMA_TYPE", path, "service must be an object");
    if (!j.contains("kind"))
        fail_validation("MISSING_FIELD", path + "/kind", "service kind is required");
    const std::string kind = j.at("kind").is_string() ? j.at("kind").get<std::string>() : "";

    if (kind == "constant") return ServiceModel::constant(require_number(j, "alpha", path));
    if (kind == "exponential") return ServiceModel::exponential(require_number(j, "rate", path));
    if (kind == "beta-const") {
        const double lambda =
            j.contains("lambda") ? require_number(j, "lambda", path) : inherit_lambda;
        if (!(lambda > 0.0))
            fail_validation("MISSING_FIELD", path + "/lambda",
                            "family lambda missing and no queue rate to inherit");
        return ServiceModel::beta_const(lambda, require_number(j, "rho", path),
                                        require_number(j, "beta", path));
    }
    if (kind == "beta-general") {
        const double lambda =
            j.contains("lambda") ? require_number(j, "lambda", path) : inherit_lambda;
        if (!(lambda > 0.0))
            fail_validation("MISSING_FIELD", path + "/lambda",
                            "family lambda missing and no queue rate to inherit");
        const double rho = require_number(j, "rho", path);
        auto coeffs = require_number_array(j, "beta_poly", path);
        Polynomial poly{std::move(coeffs)};
        return ServiceModel::beta_general(lambda, rho,
                                          [poly](double t) { return poly.eval(t); });
    }
    if (kind == "empirical") {
        auto ts = require_number_array(j, "t", path);
        auto dfs = require_number_array(j, "df", path);
        if (ts.size() != dfs.size() || ts.empty())
            fail_validation("SCHEMA_TYPE", path, "empirical needs matching nonempty t/df arrays");
        const double atom0 = j.contains("atom0") ? require_number(j, "atom0", path) : 0.0;
        if (std::abs(dfs.back() - 1.0) > 1e-9)
            fail_validation("SERVICE_DF_RANGE", path + "/df",
                            "empirical d.f. must reach 1 at its last knot");
        if (ts.front() > 0.0) {
            ts.insert(ts.begin(), 0.0);
            dfs.insert(dfs.begin(), atom0);
        }
        MonotoneCubic interp(ts, dfs);  // validates the grid
        const double t_end = ts.back();
        auto df = [interp, t_end](double t) { return t >= t_end ? 1.0 : interp(t); };
        return ServiceModel::empirical(df, atom0);
    }
    fail_validation("SCHEMA_TYPE", path + "/kind", "unknown service kind '" + kind + "'");
}

QueueModel parse_queue(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) fail_validation("SCHEMA_TYPE", path, "queue model must be an object");
    const double lambda = require_number(j, "lambda", path);
    if (!j.contains("service"))
        fail_validation("MISSING_FIELD", path + "/service", "queue needs a service law");
    return QueueModel(lambda, parse_service(j.at("service"), path + "/service", lambda));
}

NetworkModel parse_network(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) fail_validation("SCHEMA_TYPE", path, "network model must be an object");
    if (!j.contains("nodes") || !j.at("nodes").is_array())
        fail_validation("MISSING_FIELD", path + "/nodes", "network needs a node array");
    if (!j.contains("routing") || !j.at("routing").is_array())
        fail_validation("MISSING_FIELD", path + "/routing", "network needs a routing matrix");

    const auto& nodes = j.at("nodes");
    const int count = static_cast<int>(nodes.size());
    Eigen::VectorXd rates(count);
    std::vector<ServiceModel> services;
    services.reserve(count);
    for (int i = 0; i < count; ++i) {
        const std::string node_path = path + "/nodes/" + std::to_string(i);
        const auto& node = nodes.at(i);
        if (!node.is_object())
            fail_validation("SCHEMA_TYPE", node_path, "node must be an object");
        rates(i) = require_number(node, "lambda", node_path);
        if (!node.contains("service"))
            fail_validation("MISSING_FIELD", node_path + "/service", "node needs a service law");
        services.push_back(parse_service(node.at("service"), node_path + "/service", rates(i)));
    }

    const auto& routing = j.at("routing");
    if (static_cast<int>(routing.size()) != count)
        fail_validation("SCHEMA_TYPE", path + "/routing", "routing must have one row per node");
    Eigen::MatrixXd p(count, count);
    for (int r = 0; r < count; ++r) {
        const auto& row = routing.at(r);
        const std::string row_path = path + "/routing/" + std::to_string(r);
        if (!row.is_array() || static_cast<int>(row.size()) != count)
            fail_validation("SCHEMA_TYPE", row_path, "routing row must have one entry per node");
        for (int c = 0; c < count; ++c) {
            if (!row.at(c).is_number())
                fail_validation("SCHEMA_TYPE", row_path, "routing entries must be numbers");
            p(r, c) = row.at(c).get<double>();
        }
    }
    return NetworkModel(std::move(rates), std::move(p), std::move(services));
}

nlohmann::json load_json_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) fail_validation("FILE_NOT_FOUND", "/" + filename, "cannot open file");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        fail_validation("JSON_PARSE", "/" + filename, e.what());
    }
    return j;
}

QueueModel load_queue_file(const std::string& filename) {
    return parse_queue(load_json_file(filename));
}

NetworkModel load_network_file(const std::string& filename) {
    return parse_network(load_json_file(filename));
}

TransformFn parse_transform_expr(const std::string& spec) {
    const std::string prefix = "rational:";
    if (spec.rfind(prefix, 0) != 0)
        fail_validation("EXPR_PARSE", "/hbar", "transform expressions use rational:\"p/q\"");
    auto [num, den] = parse_rational(strip_quotes(spec.substr(prefix.size())), "/hbar");
    return {[num, den](std::complex<double> s) { return num.eval(s) / den.eval(s); }, true};
}

std::function<double(double)> parse_real_expr(const std::string& spec) {
    const std::string rational = "rational:";
    const std::string expdecay = "expdecay:";
    if (spec.rfind(rational, 0) == 0) {
        auto [num, den] = parse_rational(strip_quotes(spec.substr(rational.size())), "/a");
        return [num, den](double t) { return num.eval(t) / den.eval(t); };
    }
    if (spec.rfind(expdecay, 0) == 0) {
        const std::string body = strip_quotes(spec.substr(expdecay.size()));
        const std::size_t comma = body.find(',');
        if (comma == std::string::npos)
            fail_validation("EXPR_PARSE", "/a", "expdecay form is expdecay:c,r");
        char* end = nullptr;
        const double c = std::strtod(body.c_str(), &end);
        const double r = std::strtod(body.c_str() + comma + 1, &end);
        return [c, r](double t) { return c * std::exp(-r * t); };
    }
    fail_validation("EXPR_PARSE", "/a",
                    "expected rational:\"p/q\" (in t) or expdecay:c,r");
}

std::vector<double> GridSpec::points() const {
    std::vector<double> out;
    const double n_steps = (stop - start) / step;
    const long n = static_cast<long>(std::floor(n_steps + 1e-9));
    out.reserve(n + 1);
    for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

GridSpec parse_grid(const std::string& text, const std::string& path) {
    GridSpec g;
    const std::size_t c1 = text.find(':');
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        fail_validation("GRID_INVALID", path, "grid format is start:stop:step");
    try {
        g.start = std::stod(text.substr(0, c1));
        g.stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        g.step = std::stod(text.substr(c2 + 1));
    } catch (const std::exception&) {
        fail_validation("GRID_INVALID", path, "grid fields must be numbers");
    }
    if (!(g.step > 0.0)) fail_validation("GRID_INVALID", path, "grid step must be > 0");
    if (g.stop < g.start) fail_validation("GRID_INVALID", path, "grid stop must be >= start");
    return g;
}

}  // namespace busyq
