#pragma once

// Adaptive bisection around boost's embedded Gauss-Kronrod (7/15) rule with an
// absolute error target. Works for real and complex integrands.

#include <cmath>
#include <complex>
#include <type_traits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace wkb {

template <class T>
struct QuadratureResult {
    T value{};
    double error = 0.0;
    bool converged = true;
};

namespace detail {

template <class F, class T>
void gk_bisect(F& f, double a, double b, double abs_tol, unsigned depth, QuadratureResult<T>& acc) {
    double err = 0.0;
    const T estimate = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err);
    if (err <= abs_tol || !(err == err)) {
        acc.value += estimate;
        acc.error += err;
        return;
    }
    if (depth == 0) {
        acc.value += estimate;
        acc.error += err;
        acc.converged = false;
        return;
    }
    const double mid = 0.5 * (a + b);
    gk_bisect(f, a, mid, 0.5 * abs_tol, depth - 1, acc);
    gk_bisect(f, mid, b, 0.5 * abs_tol, depth - 1, acc);
}

}  // namespace detail

/// Integral of f over [a, b] to absolute tolerance abs_tol. Intervals are
/// bisected until the Kronrod-Gauss difference meets its share of the
/// tolerance; `converged` is false if max_depth was exhausted first.
template <class F>
[[nodiscard]] auto integrate_adaptive(F f, double a, double b, double abs_tol, unsigned max_depth = 30) {
    using T = std::decay_t<decltype(f(a))>;
    QuadratureResult<T> acc;
    if (a == b) {
        return acc;
    }
    detail::gk_bisect(f, a, b, abs_tol, max_depth, acc);
    return acc;
}

}  // namespace wkb
