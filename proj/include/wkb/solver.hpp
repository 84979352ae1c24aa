#pragma once

// WKB marching for eps^2 phi'' + a(x) phi = 0 on [0, 1].
//
// The oscillatory unknown U = (a^{1/4} phi, eps (a^{1/4} phi)' / sqrt(a)) is
// de-oscillated to Z = exp(-i Phi~/eps) P U, Phi~ = diag(phi~, -phi~), and Z is
// advanced by the closed-form one-step matrices of a truncated Picard
// iteration: Z_{n+1} = (I + A^1_n) Z_n (first order) or
// Z_{n+1} = (I + A^2_n + A^3_n) Z_n (second order).

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wkb/coefficient.hpp"
#include "wkb/phase.hpp"

namespace wkb {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

inline constexpr Complex imag_unit{0.0, 1.0};

struct StateU {
    Complex u1;
    Complex u2;

    [[nodiscard]] double norm() const { return std::sqrt(std::norm(u1) + std::norm(u2)); }
};

struct StateZ {
    Complex z1;
    Complex z2;

    [[nodiscard]] double norm() const { return std::sqrt(std::norm(z1) + std::norm(z2)); }
};

[[nodiscard]] inline double distance(const StateU& a, const StateU& b) {
    return std::sqrt(std::norm(a.u1 - b.u1) + std::norm(a.u2 - b.u2));
}
[[nodiscard]] inline double distance(const StateZ& a, const StateZ& b) {
    return std::sqrt(std::norm(a.z1 - b.z1) + std::norm(a.z2 - b.z2));
}

/// phi(0) = phi0 and eps phi'(0) = phi1 (note the eps scaling).
struct InitialData {
    Complex phi0;
    Complex phi1;
};

namespace detail {

// a^{1/4} and its derivative at x.
struct QuarterPower {
    double value;
    double slope;
};

[[nodiscard]] inline QuarterPower quarter_power(const Coefficient& coeff, double x) {
    const Derivatives d = coeff.derivatives(x);
    require_positive(d[0], x);
    const double q = std::pow(d[0], 0.25);
    return {q, 0.25 * d[1] / (q * q * q)};
}

}  // namespace detail

/// U(0) = (a^{1/4} phi0, (a^{1/4} phi1 + eps (a^{1/4})' phi0) / sqrt(a)) at x = 0.
[[nodiscard]] inline StateU initial_U(const InitialData& data, const Coefficient& coeff, double epsilon) {
    const auto [q, dq] = detail::quarter_power(coeff, 0.0);
    return {q * data.phi0, (q * data.phi1 + epsilon * dq * data.phi0) / (q * q)};
}

/// (phi, eps phi') at x from U(x); inverse of the U-substitution.
struct Wavefunction {
    Complex phi;
    Complex eps_dphi;
};

[[nodiscard]] inline Wavefunction recover_wavefunction(const StateU& u, const Coefficient& coeff, double epsilon,
                                                       double x) {
    const auto [q, dq] = detail::quarter_power(coeff, x);
    return {u.u1 / q, q * u.u2 - epsilon * dq * u.u1 / (q * q)};
}

/// Initial data whose U(0) is the given vector.
[[nodiscard]] inline InitialData initial_data_from_U(const StateU& u0, const Coefficient& coeff, double epsilon) {
    const Wavefunction w = recover_wavefunction(u0, coeff, epsilon, 0.0);
    return {w.phi, w.eps_dphi};
}

/// Z = P U with P = [[i, 1], [1, i]] / sqrt 2 (phase factor is I at x = 0).
[[nodiscard]] inline StateZ to_Z(const StateU& u) {
    const double s = std::numbers::sqrt2 / 2.0;
    return {s * (imag_unit * u.u1 + u.u2), s * (u.u1 + imag_unit * u.u2)};
}

/// U = P^{-1} diag(e^{i phi~/eps}, e^{-i phi~/eps}) Z.
[[nodiscard]] inline StateU back_transform(const StateZ& z, double phi_tilde, double epsilon) {
    const double s = std::numbers::sqrt2 / 2.0;
    const Complex e = std::polar(1.0, phi_tilde / epsilon);
    const Complex w1 = e * z.z1;
    const Complex w2 = std::conj(e) * z.z2;
    return {s * (-imag_unit * w1 + w2), s * (w1 - imag_unit * w2)};
}

inline constexpr double kernel_series_threshold = 1e-2;

/// H_1(x) = e^{ix} - 1.
[[nodiscard]] inline Complex h1_kernel(double x) {
    if (std::abs(x) < kernel_series_threshold) {
        // sum_{k=1}^{8} (ix)^k / k!
        const double x2 = x * x;
        const double re = x2 * (-1.0 / 2 + x2 * (1.0 / 24 + x2 * (-1.0 / 720 + x2 / 40320)));
        const double im = x * (1.0 + x2 * (-1.0 / 6 + x2 * (1.0 / 120 + x2 * (-1.0 / 5040))));
        return {re, im};
    }
    const double s = std::sin(0.5 * x);
    return {-2.0 * s * s, std::sin(x)};
}

/// H_2(x) = e^{ix} - 1 - ix.
[[nodiscard]] inline Complex h2_kernel(double x) {
    if (std::abs(x) < kernel_series_threshold) {
        // sum_{k=2}^{9} (ix)^k / k!
        const double x2 = x * x;
        const double re = x2 * (-1.0 / 2 + x2 * (1.0 / 24 + x2 * (-1.0 / 720 + x2 / 40320)));
        const double im = x * x2 * (-1.0 / 6 + x2 * (1.0 / 120 + x2 * (-1.0 / 5040 + x2 / 362880)));
        return {re, im};
    }
    const double s = std::sin(0.5 * x);
    return {-2.0 * s * s, std::sin(x) - x};
}

/// Phase data for the cell [x_n, x_{n+1}], with e = exp(2 i phi~ / eps) at both ends.
struct StepData {
    NodePhase left;
    NodePhase right;
    double increment = 0.0;  // S~_n
    double epsilon = 0.0;
    Complex e_left;
    Complex e_right;

    [[nodiscard]] static Complex oscillator(double phi, double epsilon) {
        return std::polar(1.0, 2.0 * phi / epsilon);
    }

    [[nodiscard]] static StepData make(const NodePhase& left, const NodePhase& right, double increment,
                                       double epsilon) {
        return {left, right, increment, epsilon, oscillator(left.phi, epsilon), oscillator(right.phi, epsilon)};
    }
};

/// First-order one-step matrix A^1_n.
[[nodiscard]] inline Mat2 assemble_A1(const StepData& s) {
    const double eps = s.epsilon;
    const double eps2 = eps * eps;
    const double eps3 = eps2 * eps;
    const double arg = 2.0 * s.increment / eps;
    const double b0l = s.left.beta_k[0];
    const double b0r = s.right.beta_k[0];
    const double b1r = s.right.beta_k[1];
    const Complex el = s.e_left;
    const Complex er = s.e_right;
    const Complex elc = std::conj(el);
    const Complex erc = std::conj(er);

    Mat2 a = Mat2::Zero();
    a(0, 1) = eps3 * b1r * (elc * h1_kernel(-arg)) - imag_unit * eps2 * (b0l * elc - b0r * erc);
    a(1, 0) = eps3 * b1r * (el * h1_kernel(arg)) - imag_unit * eps2 * (b0r * er - b0l * el);
    return a;
}

/// Off-diagonal part A^2_n of the second-order step.
[[nodiscard]] inline Mat2 assemble_A2(const StepData& s) {
    const double eps = s.epsilon;
    const double eps2 = eps * eps;
    const double eps3 = eps2 * eps;
    const double eps4 = eps2 * eps2;
    const double eps5 = eps4 * eps;
    const double arg = 2.0 * s.increment / eps;
    const auto& l = s.left.beta_k;
    const auto& r = s.right.beta_k;
    const Complex el = s.e_left;
    const Complex er = s.e_right;
    const Complex elc = std::conj(el);
    const Complex erc = std::conj(er);

    Mat2 a = Mat2::Zero();
    a(0, 1) = -imag_unit * eps2 * (l[0] * elc - r[0] * erc) + eps3 * (r[1] * erc - l[1] * elc) +
              imag_unit * eps4 * r[2] * (-(elc * h1_kernel(-arg))) - eps5 * r[3] * (elc * h2_kernel(-arg));
    a(1, 0) = -imag_unit * eps2 * (r[0] * er - l[0] * el) + eps3 * (r[1] * er - l[1] * el) +
              imag_unit * eps4 * r[2] * (el * h1_kernel(arg)) - eps5 * r[3] * (el * h2_kernel(arg));
    return a;
}

/// Diagonal part A^3_n of the second-order step.
[[nodiscard]] inline Mat2 assemble_A3(const StepData& s) {
    const double eps = s.epsilon;
    const double eps3 = eps * eps * eps;
    const double eps4 = eps3 * eps;
    const double eps5 = eps4 * eps;
    const double arg = 2.0 * s.increment / eps;
    const double width = s.right.x - s.left.x;
    const double b0l = s.left.beta_k[0];
    const double b0r = s.right.beta_k[0];
    const double b1r = s.right.beta_k[1];
    const double trapezoid = width * (s.right.beta * b0r + s.left.beta * b0l) / 2.0;
    const double gap = b0l - b0r;

    Mat2 a = Mat2::Zero();
    a(0, 0) = -imag_unit * eps3 * trapezoid - eps4 * b0l * b0r * h1_kernel(-arg) +
              imag_unit * eps5 * b1r * gap * h2_kernel(-arg);
    a(1, 1) = imag_unit * eps3 * trapezoid - eps4 * b0l * b0r * h1_kernel(arg) -
              imag_unit * eps5 * b1r * gap * h2_kernel(arg);
    return a;
}

/// The full update matrix I + A for the given order (1 or 2).
[[nodiscard]] inline Mat2 step_matrix(const StepData& s, int order) {
    if (order == 1) {
        return Mat2::Identity() + assemble_A1(s);
    }
    if (order == 2) {
        return Mat2::Identity() + assemble_A2(s) + assemble_A3(s);
    }
    throw std::invalid_argument("scheme order must be 1 or 2");
}

[[nodiscard]] inline StateZ step(const StateZ& z, const StepData& s, int order) {
    const Mat2 m = step_matrix(s, order);
    return {m(0, 0) * z.z1 + m(0, 1) * z.z2, m(1, 0) * z.z1 + m(1, 1) * z.z2};
}

struct SchemeConfig {
    int order = 1;
    double epsilon = 0.1;
    UniformGrid grid;
    PhaseMethod phase_method = PhaseMethod::spectral;
    std::size_t n_cheb = default_cheb_n;
};

/// Streams the march over config.grid: visit(n, x_n, Z_n, phi~(x_n)) for
/// n = 0..N-1. The phase model must belong to config.epsilon.
template <class Visit>
void march(const SchemeConfig& config, const PhaseModel& phase, const StateZ& z_initial, Visit&& visit) {
    if (config.order != 1 && config.order != 2) {
        throw std::invalid_argument("scheme order must be 1 or 2");
    }
    if (phase.epsilon() != config.epsilon) {
        throw std::invalid_argument("phase model was built for a different epsilon");
    }
    const double eps = config.epsilon;
    StateZ z = z_initial;
    NodePhase left;
    Complex e_left;
    phase.walk(config.grid, [&](std::size_t n, const NodePhase& node, double increment) {
        const Complex e_node = StepData::oscillator(node.phi, eps);
        if (n > 0) {
            const StepData s{left, node, increment, eps, e_left, e_node};
            z = step(z, s, config.order);
        }
        visit(n, node.x, z, node.phi);
        left = node;
        e_left = e_node;
    });
}

struct Trajectory {
    std::vector<double> x;
    std::vector<StateZ> z;
    std::vector<StateU> u;
    std::vector<Wavefunction> wave;
    std::vector<double> phi_tilde;
};

[[nodiscard]] inline Trajectory solve(const SchemeConfig& config, const Coefficient& coeff, const InitialData& data,
                                      const PhaseModel& phase) {
    Trajectory t;
    const std::size_t n_nodes = config.grid.size();
    t.x.reserve(n_nodes);
    t.z.reserve(n_nodes);
    t.u.reserve(n_nodes);
    t.wave.reserve(n_nodes);
    t.phi_tilde.reserve(n_nodes);
    const StateZ z0 = to_Z(initial_U(data, coeff, config.epsilon));
    march(config, phase, z0, [&](std::size_t, double x, const StateZ& z, double phi) {
        const StateU u = back_transform(z, phi, config.epsilon);
        t.x.push_back(x);
        t.z.push_back(z);
        t.u.push_back(u);
        t.wave.push_back(recover_wavefunction(u, coeff, config.epsilon, x));
        t.phi_tilde.push_back(phi);
    });
    return t;
}

/// Builds the configured phase model, then marches.
[[nodiscard]] inline Trajectory solve(const SchemeConfig& config, const Coefficient& coeff, const InitialData& data) {
    const PhaseModel phase = build_phase(config.phase_method, coeff, config.epsilon, config.grid, config.n_cheb);
    return solve(config, coeff, data, phase);
}

}  // namespace wkb
