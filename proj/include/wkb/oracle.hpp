#pragma once

// Independent ground truth for the marching schemes.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "wkb/phase.hpp"
#include "wkb/quadrature.hpp"
#include "wkb/solver.hpp"

namespace wkb {

class OracleFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OracleSolution {
    std::vector<double> nodes;
    std::vector<StateU> u;
    std::vector<StateZ> z;  // empty for oracles that never form Z
    std::string method;
    double estimated_accuracy = 0.0;  // NaN when not estimated
};

/// (phi, eps phi') for a = 1: phi0 cos(x/eps) + phi1 sin(x/eps) and its
/// eps-scaled derivative.
[[nodiscard]] inline Wavefunction analytic_constant(const InitialData& data, double epsilon, double x) {
    const double c = std::cos(x / epsilon);
    const double s = std::sin(x / epsilon);
    return {data.phi0 * c + data.phi1 * s, -data.phi0 * s + data.phi1 * c};
}

/// U from (phi, eps phi') at x: the forward U-substitution.
[[nodiscard]] inline StateU to_U(const Wavefunction& w, const Coefficient& coeff, double epsilon, double x) {
    const auto [q, dq] = detail::quarter_power(coeff, x);
    return {q * w.phi, (q * w.eps_dphi + epsilon * dq * w.phi) / (q * q)};
}

namespace detail {

using RkState = std::array<double, 4>;  // Re phi, Im phi, Re eps phi', Im eps phi'

[[nodiscard]] inline std::vector<RkState> rk_run(const Coefficient& coeff, double epsilon, double tol,
                                                 const InitialData& data, const std::vector<double>& nodes) {
    namespace odeint = boost::numeric::odeint;
    auto rhs = [&coeff, epsilon](const RkState& y, RkState& dy, double x) {
        const double a = coeff(x);
        dy[0] = y[2] / epsilon;
        dy[1] = y[3] / epsilon;
        dy[2] = -a * y[0] / epsilon;
        dy[3] = -a * y[1] / epsilon;
    };
    RkState y{data.phi0.real(), data.phi0.imag(), data.phi1.real(), data.phi1.imag()};
    std::vector<RkState> out;
    out.reserve(nodes.size());
    auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<RkState>());
    const double dt0 = std::min(1e-3, epsilon * 1e-2);
    try {
        odeint::integrate_times(stepper, rhs, y, nodes.begin(), nodes.end(), dt0,
                                [&out](const RkState& s, double) { out.push_back(s); },
                                odeint::max_step_checker(10'000'000));
    } catch (const std::exception& e) {
        throw OracleFailure(std::string("rk_reference: integration failed: ") + e.what());
    }
    if (out.size() != nodes.size()) {
        throw OracleFailure("rk_reference: integration stopped before the last node");
    }
    return out;
}

}  // namespace detail

/// Solves the original second-order problem as a first-order system for
/// (phi, eps phi') with an embedded Runge-Kutta-Fehlberg 7(8) pair under
/// local error control `tol`, reporting U at the requested nodes. The
/// accuracy estimate is the end-point deviation from a second run that is
/// not forced to stop at every node, so it takes its own step sequence.
[[nodiscard]] inline OracleSolution rk_reference(const Coefficient& coeff, const InitialData& data, double epsilon,
                                                 double tol, const std::vector<double>& nodes) {
    if (epsilon < 1e-3) {
        throw std::invalid_argument("rk_reference: eps must be >= 1e-3");
    }
    if (tol < 1e-13) {
        throw std::invalid_argument("rk_reference: tol must be >= 1e-13");
    }
    if (nodes.empty() || nodes.front() != 0.0 || !std::is_sorted(nodes.begin(), nodes.end())) {
        throw std::invalid_argument("rk_reference: nodes must be ascending and start at 0");
    }
    const auto fine = detail::rk_run(coeff, epsilon, tol, data, nodes);
    auto as_U = [&](const detail::RkState& y, double x) {
        return to_U({{y[0], y[1]}, {y[2], y[3]}}, coeff, epsilon, x);
    };

    OracleSolution sol;
    sol.nodes = nodes;
    sol.method = "rk78";
    sol.u.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) sol.u.push_back(as_U(fine[i], nodes[i]));
    sol.estimated_accuracy = 0.0;
    if (nodes.size() > 1) {
        const auto free_run = detail::rk_run(coeff, epsilon, tol, data, {nodes.front(), nodes.back()});
        sol.estimated_accuracy = distance(sol.u.back(), as_U(free_run.back(), nodes.back()));
    }
    return sol;
}

namespace detail {

struct RestrictedRun {
    std::vector<StateU> u;
    std::vector<StateZ> z;
};

// March on `fine` cells, keeping every `stride`-th node.
[[nodiscard]] inline RestrictedRun restricted_march(const SchemeConfig& fine, const Coefficient& coeff,
                                                    const InitialData& data, std::size_t stride) {
    const PhaseModel phase = build_phase(fine.phase_method, coeff, fine.epsilon, fine.grid, fine.n_cheb);
    const StateZ z0 = to_Z(initial_U(data, coeff, fine.epsilon));
    RestrictedRun run;
    run.u.reserve(fine.grid.cells / stride + 1);
    run.z.reserve(fine.grid.cells / stride + 1);
    march(fine, phase, z0, [&](std::size_t n, double, const StateZ& z, double phi) {
        if (n % stride == 0) {
            run.z.push_back(z);
            run.u.push_back(back_transform(z, phi, fine.epsilon));
        }
    });
    return run;
}

}  // namespace detail

/// The same scheme on a grid `refine` times finer, restricted to the nodes of
/// config.grid. With estimate_accuracy, the run at refine/2 is also made and
/// the largest deviation is reported.
[[nodiscard]] inline OracleSolution self_reference(const SchemeConfig& config, const Coefficient& coeff,
                                                   const InitialData& data, std::size_t refine,
                                                   bool estimate_accuracy = false) {
    if (refine < 1) {
        throw std::invalid_argument("self_reference: refine must be >= 1");
    }
    SchemeConfig fine = config;
    fine.grid.cells = config.grid.cells * refine;
    auto run = detail::restricted_march(fine, coeff, data, refine);

    OracleSolution sol;
    sol.nodes = config.grid.nodes();
    sol.u = std::move(run.u);
    sol.z = std::move(run.z);
    sol.method = "self_reference x" + std::to_string(refine);
    sol.estimated_accuracy = std::nan("");
    if (estimate_accuracy && refine >= 2) {
        SchemeConfig half = config;
        half.grid.cells = config.grid.cells * (refine / 2);
        const auto coarse = detail::restricted_march(half, coeff, data, refine / 2);
        double deviation = 0.0;
        for (std::size_t i = 0; i < sol.u.size(); ++i) {
            deviation = std::max(deviation, distance(sol.u[i], coarse.u[i]));
        }
        sol.estimated_accuracy = deviation;
    }
    return sol;
}

struct PicardMatrix {
    Mat2 m = Mat2::Zero();
    double error = 0.0;  // accumulated quadrature error estimate
};

/// Brute-force iterated integrals of B(y) = beta~(y) [[0, e^{-2i phi~/eps}],
/// [e^{2i phi~/eps}, 0]] over [lo, hi]: p = 1 gives M_1 = int B, p = 2 gives
/// M_2 = int_lo^hi B(y1) int_lo^{y1} B(y2) dy2 dy1 (nested quadrature).
/// Throws OracleFailure if a quadrature does not reach its tolerance.
[[nodiscard]] inline PicardMatrix brute_force_M(int p, double lo, double hi, const PhaseModel& phase) {
    const double eps = phase.epsilon();
    auto up = [&](double y) {  // beta e^{2 i phi / eps}
        const NodePhase n = phase.node(y);
        return n.beta * std::polar(1.0, 2.0 * n.phi / eps);
    };
    auto down = [&](double y) {  // beta e^{-2 i phi / eps}
        const NodePhase n = phase.node(y);
        return n.beta * std::polar(1.0, -2.0 * n.phi / eps);
    };
    auto check = [](const auto& r, const char* what) {
        if (!r.converged) {
            throw OracleFailure(std::string("brute_force_M: quadrature for ") + what + " did not converge");
        }
    };

    PicardMatrix out;
    if (p == 1) {
        constexpr double tol = 1e-12;
        const auto m12 = integrate_adaptive(down, lo, hi, tol);
        const auto m21 = integrate_adaptive(up, lo, hi, tol);
        check(m12, "M1(1,2)");
        check(m21, "M1(2,1)");
        out.m(0, 1) = m12.value;
        out.m(1, 0) = m21.value;
        out.error = m12.error + m21.error;
        return out;
    }
    if (p == 2) {
        constexpr double inner_tol = 1e-12;
        constexpr double outer_tol = 1e-10;
        bool inner_ok = true;
        auto nested = [&](auto&& outer_f, auto&& inner_f) {
            return integrate_adaptive(
                [&](double y1) {
                    const auto inner = integrate_adaptive(inner_f, lo, y1, inner_tol);
                    inner_ok = inner_ok && inner.converged;
                    return outer_f(y1) * inner.value;
                },
                lo, hi, outer_tol);
        };
        const auto m11 = nested(down, up);
        const auto m22 = nested(up, down);
        check(m11, "M2(1,1)");
        check(m22, "M2(2,2)");
        if (!inner_ok) {
            throw OracleFailure("brute_force_M: inner quadrature for M2 did not converge");
        }
        out.m(0, 0) = m11.value;
        out.m(1, 1) = m22.value;
        out.error = m11.error + m22.error;
        return out;
    }
    throw std::invalid_argument("brute_force_M: p must be 1 or 2");
}

}  // namespace wkb
