#include <algorithm>
#include <cmath>
#include <utility>
#include <stdexcept>

#include <gtest/gtest.h>

#include "wkb/oracle.hpp"

using namespace wkb;

namespace {

std::vector<double> grid_nodes(std::size_t cells) { return UniformGrid{cells}.nodes(); }

double max_distance(const std::vector<StateU>& a, const std::vector<StateU>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, distance(a[i], b[i]));
    return worst;
}

// One scheme step on [lo, hi] from Z at x = lo.
StateZ one_step(const PhaseModel& phase, double lo, double hi, const StateZ& z, int order) {
    const NodePhase l = phase.node(lo), r = phase.node(hi);
    return step(z, StepData::make(l, r, r.phi - l.phi, phase.epsilon()), order);
}

StateZ mat_times(const Mat2& m, const StateZ& z) { return {m(0, 0) * z.z1 + m(0, 1) * z.z2, m(1, 0) * z.z1 + m(1, 1) * z.z2}; }

}  // namespace

TEST(AnalyticConstant, Identities) {
    const InitialData d{1.0, -imag_unit};
    const auto w0 = analytic_constant(d, 0.1, 0.0);
    EXPECT_EQ(w0.phi, d.phi0);
    EXPECT_EQ(w0.eps_dphi, d.phi1);
    for (double x : {0.1, 0.37, 1.0}) {
        const auto w = analytic_constant(d, 0.01, x);
        EXPECT_NEAR(std::abs(w.phi - std::polar(1.0, -x / 0.01)), 0.0, 1e-13);
        const InitialData g{Complex(0.3, 1.0), Complex(-2.0, 0.1)};
        const auto a = analytic_constant(g, 0.01, x);
        const double e0 = std::norm(g.phi0) + std::norm(g.phi1);
        EXPECT_NEAR(std::norm(a.phi) + std::norm(a.eps_dphi), e0, 1e-13);
    }
}

TEST(RkReference, ConstantCoefficient) {
    const auto c = builtin_coefficient("constant");
    const InitialData d{1.0, -imag_unit};
    const double tol = 1e-10;
    const auto nodes = grid_nodes(100);
    const auto sol = rk_reference(c, d, 0.1, tol, nodes);
    ASSERT_EQ(sol.u.size(), nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto w = analytic_constant(d, 0.1, nodes[i]);
        EXPECT_NEAR(distance(sol.u[i], {w.phi, w.eps_dphi}), 0.0, 10 * tol);
        EXPECT_NEAR(sol.u[i].norm() * sol.u[i].norm(), 2.0, 10 * tol);
    }
    EXPECT_GE(sol.estimated_accuracy, 0.0);
}

TEST(RkReference, Preconditions) {
    const auto g = builtin_coefficient("gauss");
    EXPECT_THROW((void)rk_reference(g, {1.0, 0.0}, 1e-4, 1e-10, grid_nodes(4)), std::invalid_argument);
    EXPECT_THROW((void)rk_reference(g, {1.0, 0.0}, 1e-1, 1e-14, grid_nodes(4)), std::invalid_argument);
    EXPECT_THROW((void)rk_reference(g, {1.0, 0.0}, 1e-1, 1e-10, {0.5, 1.0}), std::invalid_argument);
}

TEST(RkReference, AgreesWithSecondOrderScheme) {
    const auto g = builtin_coefficient("gauss");
    const InitialData d{1.0, -imag_unit};
    const SchemeConfig config{2, 0.1, UniformGrid{1000}, PhaseMethod::spectral};
    const auto t = solve(config, g, d);
    const auto rk = rk_reference(g, d, 0.1, 1e-12, config.grid.nodes());
    EXPECT_LE(max_distance(t.u, rk.u), 1e-8);
}

TEST(SelfReference, RefineOneIsBaseRun) {
    const auto g = builtin_coefficient("gauss");
    const InitialData d{1.0, -imag_unit};
    const SchemeConfig config{1, 0.05, UniformGrid{40}, PhaseMethod::spectral};
    const auto t = solve(config, g, d);
    const auto ref = self_reference(config, g, d, 1);
    ASSERT_EQ(ref.u.size(), t.u.size());
    for (std::size_t i = 0; i < t.u.size(); ++i) {
        EXPECT_EQ(ref.u[i].u1, t.u[i].u1);
        EXPECT_EQ(ref.u[i].u2, t.u[i].u2);
    }
    EXPECT_THROW((void)self_reference(config, g, d, 0), std::invalid_argument);
}

TEST(SelfReference, RichardsonSanity) {
    const auto g = builtin_coefficient("gauss");
    const InitialData d{1.0, -imag_unit};
    const SchemeConfig config{2, 1e-2, UniformGrid{100}, PhaseMethod::spectral};
    const auto t = solve(config, g, d);
    const auto r64 = self_reference(config, g, d, 64);
    const auto r128 = self_reference(config, g, d, 128);
    const double scheme_error = max_distance(t.u, r128.u);
    EXPECT_LE(100 * max_distance(r64.u, r128.u), scheme_error);
}

TEST(SelfReference, SecondOrderInH) {
    const auto g = builtin_coefficient("gauss");
    const InitialData d{1.0, -imag_unit};
    auto err = [&](double eps, std::size_t cells) {
        const SchemeConfig config{2, eps, UniformGrid{cells}, PhaseMethod::spectral};
        return max_distance(solve(config, g, d).u, self_reference(config, g, d, 64).u);
    };
    // eps = 1e-3 saturates near 1e-12 once h < 2e-2, so only the coarse end shows h^2
    EXPECT_NEAR(std::log2(err(1e-3, 10) / err(1e-3, 20)), 2.0, 0.3);
    for (std::size_t cells : {100u, 1000u}) EXPECT_LE(err(1e-3, cells), 1e-11);
    EXPECT_NEAR(std::log10(err(1e-2, 50) / err(1e-2, 500)), 2.0, 0.3);
}

TEST(OracleAgreement, RkVersusSelfReference) {
    const auto g = builtin_coefficient("gauss");
    const InitialData d{1.0, -imag_unit};
    const double tol = 1e-12;
    for (double eps : {1e-1, 1e-2}) {
        const SchemeConfig config{2, eps, UniformGrid{1000}, PhaseMethod::spectral};
        const auto t = solve(config, g, d);
        const auto self = self_reference(config, g, d, 64);
        const auto rk = rk_reference(g, d, eps, tol, config.grid.nodes());
        const double scheme_error = max_distance(t.u, self.u);
        EXPECT_LE(max_distance(self.u, rk.u), 10 * std::max(tol, scheme_error)) << eps;
    }
}

TEST(BruteForceM, ZeroForConstant) {
    const auto phase = build_phase_analytic(builtin_coefficient("constant"), 0.1);
    EXPECT_EQ(brute_force_M(1, 0.0, 0.1, phase).m.norm(), 0.0);
    EXPECT_EQ(brute_force_M(2, 0.0, 0.1, phase).m.norm(), 0.0);
    EXPECT_THROW((void)brute_force_M(3, 0.0, 0.1, phase), std::invalid_argument);
}

TEST(BruteForceM, Structure) {
    const auto phase = build_phase_spectral(builtin_coefficient("gauss"), 0.1);
    const auto m1 = brute_force_M(1, 0.2, 0.3, phase);
    EXPECT_EQ(m1.m(0, 0), Complex(0.0));
    EXPECT_EQ(m1.m(1, 1), Complex(0.0));
    EXPECT_NEAR(std::abs(m1.m(1, 0) - std::conj(m1.m(0, 1))), 0.0, 1e-12);
    const auto m2 = brute_force_M(2, 0.2, 0.3, phase);
    EXPECT_EQ(m2.m(0, 1), Complex(0.0));
    EXPECT_NEAR(std::abs(m2.m(1, 1) - std::conj(m2.m(0, 0))), 0.0, 1e-10);
}

TEST(BruteForceM, FirstOrderMatrix) {
    const double eps = 0.1;
    const auto phase = build_phase_spectral(builtin_coefficient("gauss"), eps);
    const NodePhase l = phase.node(0.0), r = phase.node(0.1);
    const Mat2 a1 = assemble_A1(StepData::make(l, r, r.phi - l.phi, eps));
    const Mat2 m1 = brute_force_M(1, 0.0, 0.1, phase).m;
    EXPECT_LE((a1 - eps * m1).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(BruteForceM, SecondOrderStep) {
    const double eps = 0.1;
    const auto phase = build_phase_spectral(builtin_coefficient("gauss"), eps);
    const StateZ z = to_Z({1.0, -imag_unit});
    for (auto [h, tol] : {std::pair{0.05, 1e-7}, std::pair{0.1, 1e-6}}) {
        const Mat2 picard =
            Mat2::Identity() + eps * brute_force_M(1, 0.0, h, phase).m + eps * eps * brute_force_M(2, 0.0, h, phase).m;
        EXPECT_LE(distance(one_step(phase, 0.0, h, z, 2), mat_times(picard, z)), tol) << h;
    }
}

TEST(BruteForceM, OneStepOracleEquivalence) {
    // Constants calibrated once at (eps, h) = (0.1, 0.1) and frozen: C1 = 1, C2 = 4.
    const StateZ z = to_Z({1.0, -imag_unit});
    for (double eps : {0.1, 0.01}) {
        const auto phase = build_phase_spectral(builtin_coefficient("gauss"), eps);
        for (double h : {0.1, 0.05}) {
            const Mat2 m1 = brute_force_M(1, 0.3, 0.3 + h, phase).m;
            const Mat2 m2 = brute_force_M(2, 0.3, 0.3 + h, phase).m;
            const double e1 = distance(one_step(phase, 0.3, 0.3 + h, z, 1), mat_times(Mat2::Identity() + eps * m1, z));
            const double e2 =
                distance(one_step(phase, 0.3, 0.3 + h, z, 2), mat_times(Mat2::Identity() + eps * m1 + eps * eps * m2, z));
            const double b1 = eps * eps * h * std::min(eps, h) + eps * eps * std::pow(h, 4);
            const double b2 = std::pow(eps, 3) * std::pow(h, 3) + std::pow(eps, 4) * std::pow(h, 4);
            EXPECT_LE(e1, b1) << "eps=" << eps << " h=" << h;
            EXPECT_LE(e2, 4 * b2 + 1e-10) << "eps=" << eps << " h=" << h;
        }
    }
}
