#include "busyq/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "busyq/errors.hpp"

namespace busyq::quad {
namespace {

// QUADPACK dqk15 nodes and weights on [-1,1]; even indices are the
// embedded Gauss-7 points.
constexpr double kNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

constexpr int kMaxDepth = 52;
constexpr int kMaxEvaluations = 2'000'000;

template <typename Value, typename Fn>
void gk15(const Fn& f, double a, double b, Value& kronrod, double& err) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    Value gauss{};
    kronrod = Value{};
    for (int i = 0; i < 8; ++i) {
        const double dx = half * kNodes[i];
        Value fv = f(mid - dx);
        if (i != 7) fv += f(mid + dx);
        kronrod += kKronrodW[i] * fv;
        if (i % 2 == 1) gauss += kGaussW[i / 2] * fv;
    }
    kronrod *= half;
    gauss *= half;
    err = std::abs(kronrod - gauss);
}

template <typename Value, typename Fn>
struct Worker {
    const Fn& f;
    Tolerance tol;
    int evaluations = 0;

    Value run(double a, double b) {
        Value whole;
        double err;
        gk15<Value>(f, a, b, whole, err);
        evaluations += 15;
        return refine(a, b, whole, err, 0);
    }

    Value refine(double a, double b, Value estimate, double err, int depth) {
        const double scale = std::max(std::abs(estimate), 1.0);
        if (err <= tol.abs_tol || err <= tol.rel_tol * std::abs(estimate)) return estimate;
        if (depth >= kMaxDepth || evaluations >= kMaxEvaluations) {
            if (err <= 1e3 * (tol.abs_tol + tol.rel_tol * scale)) return estimate;
            fail_numerical("QUADRATURE_NONCONVERGENT",
                           "adaptive quadrature did not reach the requested tolerance");
        }
        const double mid = 0.5 * (a + b);
        Value left, right;
        double el, er;
        gk15<Value>(f, a, mid, left, el);
        gk15<Value>(f, mid, b, right, er);
        evaluations += 30;
        Tolerance half{0.5 * tol.abs_tol, tol.rel_tol};
        Worker sub{f, half, evaluations};
        Value l = sub.refine(a, mid, left, el, depth + 1);
        Value r = sub.refine(mid, b, right, er, depth + 1);
        evaluations = sub.evaluations;
        return l + r;
    }
};

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b, Tolerance tol) {
    if (a == b) return {0.0, 0.0, 0};
    Worker<double, std::function<double(double)>> w{f, tol};
    Result out;
    out.value = w.run(a, b);
    out.evaluations = w.evaluations;
    out.error_estimate = tol.abs_tol;
    return out;
}

ComplexResult integrate_complex(const std::function<std::complex<double>(double)>& f,
                                double a, double b, Tolerance tol) {
    if (a == b) return {{0.0, 0.0}, 0.0, 0};
    Worker<std::complex<double>, std::function<std::complex<double>(double)>> w{f, tol};
    ComplexResult out;
    out.value = w.run(a, b);
    out.evaluations = w.evaluations;
    out.error_estimate = tol.abs_tol;
    return out;
}

Result integrate_to_inf(const std::function<double(double)>& f, double a, Tolerance tol) {
    auto mapped = [&](double x) -> double {
        const double om = 1.0 - x;
        if (om < 1e-14) return 0.0;
        const double t = a + x / om;
        return f(t) / (om * om);
    };
    return integrate(mapped, 0.0, 1.0, tol);
}

}  // namespace busyq::quad
