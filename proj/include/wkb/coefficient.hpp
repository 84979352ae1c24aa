#pragma once

// Coefficient functions a(x) on [0, 1] with analytic derivatives to order 5,
// the correction beta = -(a^{-1/4})'' / (2 a^{1/4}) and the chain
// beta_0 = beta / (2 phi'), beta_k = beta_{k-1}' / (2 phi') with
// phi' = sqrt(a) - eps^2 beta.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "wkb/chebyshev.hpp"
#include "wkb/jet.hpp"

namespace wkb {

/// a, a', ..., a^(5) at one point.
using Derivatives = std::array<double, 6>;

class Coefficient {
public:
    using DerivativeFn = std::function<Derivatives(double)>;
    using PrimitiveFn = std::function<double(double)>;

    Coefficient(std::string name, DerivativeFn derivatives)
        : name_(std::move(name)), derivatives_(std::move(derivatives)) {}

    /// Closed-form phi_1 = int_0^x sqrt(a), when known.
    Coefficient& with_exact_phi1(PrimitiveFn phi1) {
        phi1_ = std::move(phi1);
        return *this;
    }
    /// Closed-form phi_1 and phi_2 = int_0^x beta.
    Coefficient& with_exact_phase(PrimitiveFn phi1, PrimitiveFn phi2) {
        phi1_ = std::move(phi1);
        phi2_ = std::move(phi2);
        return *this;
    }

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] Derivatives derivatives(double x) const { return derivatives_(x); }
    [[nodiscard]] double operator()(double x) const { return derivatives_(x)[0]; }
    [[nodiscard]] double derivative(int k, double x) const {
        if (k < 0 || k > 5) {
            throw std::out_of_range("Coefficient::derivative: order must be in 0..5");
        }
        return derivatives_(x)[static_cast<std::size_t>(k)];
    }

    [[nodiscard]] bool has_exact_phi1() const { return static_cast<bool>(phi1_); }
    [[nodiscard]] bool has_exact_phase() const { return phi1_ && phi2_; }
    [[nodiscard]] double exact_phi1(double x) const { return phi1_(x); }
    [[nodiscard]] double exact_phi2(double x) const { return phi2_(x); }

private:
    std::string name_;
    DerivativeFn derivatives_;
    PrimitiveFn phi1_;
    PrimitiveFn phi2_;
};

/// Registry lookup: "gauss" (a = exp(-x^2)), "quadratic" (a = (x + 1/2)^2),
/// "constant" (a = 1).
[[nodiscard]] inline Coefficient builtin_coefficient(std::string_view name) {
    if (name == "gauss") {
        Coefficient c("gauss", [](double x) {
            // d^k/dx^k exp(-x^2) = (-1)^k H_k(x) exp(-x^2), physicists' Hermite H_k
            const double e = std::exp(-x * x);
            const double x2 = x * x;
            return Derivatives{e,
                               -2.0 * x * e,
                               (4.0 * x2 - 2.0) * e,
                               -(8.0 * x2 * x - 12.0 * x) * e,
                               (16.0 * x2 * x2 - 48.0 * x2 + 12.0) * e,
                               -(32.0 * x2 * x2 * x - 160.0 * x2 * x + 120.0 * x) * e};
        });
        // phi_2 involves erfi, which has no standard implementation
        c.with_exact_phi1([](double x) {
            return std::sqrt(std::numbers::pi / 2.0) * std::erf(x / std::numbers::sqrt2);
        });
        return c;
    }
    if (name == "quadratic") {
        Coefficient c("quadratic", [](double x) {
            const double s = x + 0.5;
            return Derivatives{s * s, 2.0 * s, 2.0, 0.0, 0.0, 0.0};
        });
        c.with_exact_phase([](double x) { return 0.5 * x * x + 0.5 * x; },
                           [](double x) {
                               const double s = 2.0 * x + 1.0;
                               return -3.0 * x * (x + 1.0) / (s * s);
                           });
        return c;
    }
    if (name == "constant") {
        Coefficient c("constant", [](double) { return Derivatives{1.0, 0.0, 0.0, 0.0, 0.0, 0.0}; });
        c.with_exact_phase([](double x) { return x; }, [](double) { return 0.0; });
        return c;
    }
    throw std::invalid_argument("unknown coefficient '" + std::string(name) +
                                "' (expected gauss, quadratic or constant)");
}

namespace detail {

inline void require_positive(double a, double x) {
    if (!(a > 0.0)) {
        throw std::domain_error("coefficient a(" + std::to_string(x) + ") = " + std::to_string(a) +
                                " is not positive (evanescent region)");
    }
}

// beta as a jet of order K, built from a jet of order K + 2.
template <std::size_t K>
[[nodiscard]] Jet<K> beta_jet(const Jet<K + 2>& a) {
    const Jet<K + 1> da = differentiate(a);
    const Jet<K> d2a = differentiate(da);
    const Jet<K> a_k = truncate<K>(a);
    const Jet<K> da_k = truncate<K>(da);
    // beta = -5/32 a'^2 a^{-5/2} + 1/8 a'' a^{-3/2}
    return -5.0 / 32.0 * (da_k * da_k * pow(a_k, -2.5)) + 1.0 / 8.0 * (d2a * pow(a_k, -1.5));
}

}  // namespace detail

/// beta(x) from a, a', a'' in closed form.
[[nodiscard]] inline double beta(const Coefficient& coeff, double x) {
    const Derivatives d = coeff.derivatives(x);
    detail::require_positive(d[0], x);
    const double a = d[0];
    return -5.0 / 32.0 * d[1] * d[1] * std::pow(a, -2.5) + 0.125 * d[2] * std::pow(a, -1.5);
}

/// beta, its derivatives and the beta_k chain at a single point.
struct BetaChain {
    double beta = 0.0;
    std::array<double, 4> beta_d{};  // beta, beta', beta'', beta'''
    double dphi = 0.0;               // phi' = sqrt(a) - eps^2 beta
    double d2phi = 0.0;              // phi''
    std::array<double, 4> beta_k{};  // beta_0 .. beta_3
};

/// Analytic beta chain through order-5 derivatives of a.
[[nodiscard]] inline BetaChain analytic_beta_chain(const Coefficient& coeff, double epsilon, double x) {
    const Derivatives d = coeff.derivatives(x);
    detail::require_positive(d[0], x);
    const auto a = Jet<5>::from_derivatives(d);
    const Jet<3> b = detail::beta_jet<3>(a);
    const Jet<3> dphi = pow(truncate<3>(a), 0.5) - epsilon * epsilon * b;
    if (!(dphi.value() > 0.0)) {
        throw std::domain_error("phase derivative sqrt(a) - eps^2 beta is not positive at x = " +
                                std::to_string(x));
    }
    const Jet<3> b0 = b / (2.0 * dphi);
    const Jet<2> b1 = differentiate(b0) / (2.0 * truncate<2>(dphi));
    const Jet<1> b2 = differentiate(b1) / (2.0 * truncate<1>(dphi));
    const Jet<0> b3 = differentiate(b2) / (2.0 * truncate<0>(dphi));

    BetaChain out;
    out.beta = b.value();
    for (std::size_t k = 0; k < 4; ++k) {
        out.beta_d[k] = b.derivative(k);
    }
    out.dphi = dphi.value();
    out.d2phi = dphi.derivative(1);
    out.beta_k = {b0.value(), b1.value(), b2.value(), b3.value()};
    return out;
}

struct HypothesisReport {
    double a0_min = 0.0;
    double epsilon1 = 0.0;
    bool admissible = false;
};

/// Checks a >= a0 > 0 and eps < eps1 = min(1, min_x a^{1/4} beta_+^{-1/2}) on
/// a Chebyshev sample of [0, 1] with n_samples points.
[[nodiscard]] inline HypothesisReport validate_hypothesis_a(const Coefficient& coeff, double epsilon,
                                                           std::size_t n_samples = 257) {
    if (n_samples < 32) {
        throw std::invalid_argument("validate_hypothesis_a: need at least 32 samples");
    }
    const cheb::ChebGrid grid = cheb::cheb_nodes(n_samples - 1, 0.0, 1.0);
    HypothesisReport report;
    report.a0_min = std::numeric_limits<double>::infinity();
    for (double x : grid.mapped_nodes) {
        report.a0_min = std::min(report.a0_min, coeff(x));
    }
    if (!(report.a0_min > 0.0)) {
        report.epsilon1 = 0.0;
        report.admissible = false;
        return report;
    }
    double eps1 = 1.0;
    for (double x : grid.mapped_nodes) {
        const double b_plus = std::max(0.0, beta(coeff, x));
        if (b_plus > 0.0) {
            eps1 = std::min(eps1, std::pow(coeff(x), 0.25) / std::sqrt(b_plus));
        }
    }
    report.epsilon1 = eps1;
    report.admissible = epsilon > 0.0 && epsilon < eps1;
    return report;
}

}  // namespace wkb
