#pragma once

// Approximate WKB phase phi~ = phi~_1 - eps^2 phi~_2 with phi_1 = int sqrt(a)
// and phi_2 = int beta, together with phi~', phi~'' and the beta~_k chain.
//
// Three constructions are provided:
//   spectral  Chebyshev collocation + Clenshaw-Curtis antiderivatives; every
//             derived quantity (beta~, beta~_k, phi~', phi~'') comes from the
//             spectral representation and is interpolated barycentrically.
//   simpson   one three-point Simpson rule per WKB cell for the phase values;
//             beta, beta_k and phi' are the analytic ones.
//   analytic  closed-form phase when the coefficient registers one, adaptive
//             Gauss-Kronrod quadrature otherwise; analytic beta chain.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "wkb/chebyshev.hpp"
#include "wkb/coefficient.hpp"
#include "wkb/quadrature.hpp"

namespace wkb {

enum class PhaseMethod { spectral, simpson, analytic };

[[nodiscard]] inline std::string_view to_string(PhaseMethod m) {
    switch (m) {
        case PhaseMethod::spectral: return "spectral";
        case PhaseMethod::simpson: return "simpson";
        case PhaseMethod::analytic: return "analytic";
    }
    return "unknown";
}

[[nodiscard]] inline PhaseMethod parse_phase_method(std::string_view s) {
    if (s == "spectral") return PhaseMethod::spectral;
    if (s == "simpson") return PhaseMethod::simpson;
    if (s == "analytic") return PhaseMethod::analytic;
    throw std::invalid_argument("unknown phase method '" + std::string(s) +
                                "' (expected spectral, simpson or analytic)");
}

/// Uniform grid x_n = n / cells, n = 0..cells, on [0, 1].
struct UniformGrid {
    std::size_t cells = 1;

    [[nodiscard]] static UniformGrid from_step(double h) {
        const double m = std::round(1.0 / h);
        if (!(h > 0.0) || m < 1.0 || std::abs(m * h - 1.0) > 1e-9) {
            throw std::invalid_argument("step h = " + std::to_string(h) + " is not of the form 1/(N-1)");
        }
        return UniformGrid{static_cast<std::size_t>(m)};
    }

    [[nodiscard]] std::size_t size() const { return cells + 1; }
    [[nodiscard]] double step() const { return 1.0 / static_cast<double>(cells); }
    [[nodiscard]] double node(std::size_t n) const { return static_cast<double>(n) / static_cast<double>(cells); }
    [[nodiscard]] std::vector<double> nodes() const {
        std::vector<double> xs(size());
        for (std::size_t n = 0; n < xs.size(); ++n) xs[n] = node(n);
        return xs;
    }
};

/// Everything the marching matrices need at one grid node.
struct NodePhase {
    double x = 0.0;
    double phi = 0.0;
    double beta = 0.0;
    std::array<double, 4> beta_k{};
};

/// Phase data sampled on a whole grid; increments[n] = phi~(x_{n+1}) - phi~(x_n).
struct GridPhase {
    std::vector<NodePhase> nodes;
    std::vector<double> increments;
};

namespace detail {

class SpectralPhase {
public:
    SpectralPhase(const Coefficient& coeff, double epsilon, std::size_t n_cheb)
        : epsilon_(epsilon), grid_(cheb::cheb_nodes(n_cheb, 0.0, 1.0)) {
        const std::size_t size = grid_.size();
        std::vector<double> sqrt_a(size);
        std::vector<double> b(size);
        for (std::size_t j = 0; j < size; ++j) {
            const double x = grid_.mapped_nodes[j];
            sqrt_a[j] = std::sqrt(coeff(x));
            b[j] = wkb::beta(coeff, x);
        }
        phi1_series_ = cheb::antiderivative_coeffs(cheb::cheb_coeffs(sqrt_a, 0.0, 1.0));
        phi2_series_ = cheb::antiderivative_coeffs(cheb::cheb_coeffs(b, 0.0, 1.0));
        phi1_ = node_values(phi1_series_);
        phi2_ = node_values(phi2_series_);

        // d/dx on [0, 1] is 2 d/dl
        const Eigen::MatrixXd d = 2.0 * cheb::diff_matrix(n_cheb);
        auto apply = [&](const std::vector<double>& v) {
            const Eigen::VectorXd r = d * Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
            return std::vector<double>(r.data(), r.data() + r.size());
        };
        // phi1~, phi2~ are the antiderivatives of the interpolants of sqrt(a)
        // and beta, so their derivatives at the nodes are those samples.
        const double eps2 = epsilon * epsilon;
        beta_ = b;
        dphi_.resize(size);
        for (std::size_t j = 0; j < size; ++j) {
            dphi_[j] = sqrt_a[j] - eps2 * beta_[j];
            if (!(dphi_[j] > 0.0)) {
                throw std::domain_error("spectral phase: phi~' is not positive at a collocation node");
            }
        }
        d2phi_ = apply(dphi_);
        beta_k_[0].resize(size);
        for (std::size_t j = 0; j < size; ++j) beta_k_[0][j] = beta_[j] / (2.0 * dphi_[j]);
        for (std::size_t k = 1; k < 4; ++k) {
            beta_k_[k] = apply(beta_k_[k - 1]);
            for (std::size_t j = 0; j < size; ++j) beta_k_[k][j] /= 2.0 * dphi_[j];
        }
    }

    [[nodiscard]] const cheb::ChebGrid& grid() const { return grid_; }
    [[nodiscard]] const cheb::ChebyshevSeries& phi1_series() const { return phi1_series_; }
    [[nodiscard]] const cheb::ChebyshevSeries& phi2_series() const { return phi2_series_; }

    [[nodiscard]] double phi1(double x) const { return cheb::barycentric_eval(phi1_, grid_, x); }
    [[nodiscard]] double phi2(double x) const { return cheb::barycentric_eval(phi2_, grid_, x); }
    [[nodiscard]] double dphi(double x) const { return cheb::barycentric_eval(dphi_, grid_, x); }
    [[nodiscard]] double d2phi(double x) const { return cheb::barycentric_eval(d2phi_, grid_, x); }

    [[nodiscard]] NodePhase node(const cheb::BarycentricPoint& p, double x) const {
        NodePhase out;
        out.x = x;
        out.phi = p(phi1_) - epsilon_ * epsilon_ * p(phi2_);
        out.beta = p(beta_);
        for (std::size_t k = 0; k < 4; ++k) out.beta_k[k] = p(beta_k_[k]);
        return out;
    }

    [[nodiscard]] NodePhase node(double x) const { return node(cheb::BarycentricPoint(grid_, x), x); }

    template <class Visit>
    void walk(const UniformGrid& g, Visit&& visit) const {
        cheb::BarycentricPoint p(grid_);
        p.set(0.0);
        NodePhase prev = node(p, 0.0);
        visit(std::size_t{0}, prev, 0.0);
        for (std::size_t n = 1; n < g.size(); ++n) {
            const double x = g.node(n);
            p.set(x);
            NodePhase cur = node(p, x);
            visit(n, cur, cur.phi - prev.phi);
            prev = cur;
        }
    }

private:
    [[nodiscard]] std::vector<double> node_values(const cheb::ChebyshevSeries& s) const {
        std::vector<double> v(grid_.size());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = cheb::cheb_eval(s, grid_.mapped_nodes[j]);
        v.back() = 0.0;  // the antiderivative vanishes at x = 0 by construction
        return v;
    }

    double epsilon_;
    cheb::ChebGrid grid_;
    cheb::ChebyshevSeries phi1_series_;
    cheb::ChebyshevSeries phi2_series_;
    std::vector<double> phi1_, phi2_, beta_, dphi_, d2phi_;
    std::array<std::vector<double>, 4> beta_k_;
};

// Shared pieces of the two modes that take beta, beta_k and phi' from the
// analytic coefficient.
class AnalyticChain {
public:
    AnalyticChain(const Coefficient& coeff, double epsilon) : coeff_(coeff), epsilon_(epsilon) {}

    [[nodiscard]] double dphi(double x) const { return analytic_beta_chain(coeff_, epsilon_, x).dphi; }
    [[nodiscard]] double d2phi(double x) const { return analytic_beta_chain(coeff_, epsilon_, x).d2phi; }

    [[nodiscard]] NodePhase node_without_phi(double x) const {
        const BetaChain c = analytic_beta_chain(coeff_, epsilon_, x);
        NodePhase out;
        out.x = x;
        out.beta = c.beta;
        out.beta_k = c.beta_k;
        return out;
    }

protected:
    Coefficient coeff_;
    double epsilon_;
};

class SimpsonPhase : public AnalyticChain {
public:
    // Above this many cells the cumulative table is not stored; phi~ at
    // arbitrary x is then recomputed by summation.
    static constexpr std::size_t table_limit = std::size_t{1} << 21;

    SimpsonPhase(const Coefficient& coeff, double epsilon, UniformGrid grid)
        : AnalyticChain(coeff, epsilon), grid_(grid) {
        if (grid.cells < 1) {
            throw std::invalid_argument("simpson phase: need at least 2 grid nodes");
        }
        if (grid.cells <= table_limit) {
            phi1_table_.resize(grid.size());
            phi2_table_.resize(grid.size());
            for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
                const auto [s1, s2] = cell(grid.node(n), grid.node(n + 1));
                phi1_table_[n + 1] = phi1_table_[n] + s1;
                phi2_table_[n + 1] = phi2_table_[n] + s2;
            }
        }
    }

    [[nodiscard]] const UniformGrid& grid() const { return grid_; }

    /// Simpson's rule for (int sqrt(a), int beta) over [lo, hi].
    [[nodiscard]] std::pair<double, double> cell(double lo, double hi) const {
        const double mid = 0.5 * (lo + hi);
        const double w = (hi - lo) / 6.0;
        const double s1 = w * (std::sqrt(coeff_(lo)) + 4.0 * std::sqrt(coeff_(mid)) + std::sqrt(coeff_(hi)));
        const double s2 = w * (wkb::beta(coeff_, lo) + 4.0 * wkb::beta(coeff_, mid) + wkb::beta(coeff_, hi));
        return {s1, s2};
    }

    /// (phi~_1, phi~_2) at x: cumulative value at the grid node below x plus a
    /// partial Simpson cell.
    [[nodiscard]] std::pair<double, double> parts(double x) const {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw std::domain_error("simpson phase: x outside [0, 1]");
        }
        const auto n = std::min(static_cast<std::size_t>(x * static_cast<double>(grid_.cells)), grid_.cells);
        double p1 = 0.0;
        double p2 = 0.0;
        if (!phi1_table_.empty()) {
            p1 = phi1_table_[n];
            p2 = phi2_table_[n];
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                const auto [s1, s2] = cell(grid_.node(i), grid_.node(i + 1));
                p1 += s1;
                p2 += s2;
            }
        }
        const double xn = grid_.node(n);
        if (x > xn) {
            const auto [s1, s2] = cell(xn, x);
            p1 += s1;
            p2 += s2;
        }
        return {p1, p2};
    }

    [[nodiscard]] double phi1(double x) const { return parts(x).first; }
    [[nodiscard]] double phi2(double x) const { return parts(x).second; }

    [[nodiscard]] NodePhase node(double x) const {
        NodePhase out = node_without_phi(x);
        const auto [p1, p2] = parts(x);
        out.phi = p1 - epsilon_ * epsilon_ * p2;
        return out;
    }

    template <class Visit>
    void walk(const UniformGrid& g, Visit&& visit) const {
        if (g.cells != grid_.cells) {
            throw std::invalid_argument("simpson phase: walked grid differs from the grid it was built on");
        }
        const double eps2 = epsilon_ * epsilon_;
        double p1 = 0.0;
        double p2 = 0.0;
        NodePhase first = node_without_phi(0.0);
        visit(std::size_t{0}, first, 0.0);
        for (std::size_t n = 1; n < g.size(); ++n) {
            const auto [s1, s2] = cell(g.node(n - 1), g.node(n));
            p1 += s1;
            p2 += s2;
            NodePhase cur = node_without_phi(g.node(n));
            cur.phi = p1 - eps2 * p2;
            visit(n, cur, s1 - eps2 * s2);
        }
    }

private:
    UniformGrid grid_;
    std::vector<double> phi1_table_;
    std::vector<double> phi2_table_;
};

class AnalyticPhase : public AnalyticChain {
public:
    static constexpr double quad_tol = 1e-15;

    AnalyticPhase(const Coefficient& coeff, double epsilon) : AnalyticChain(coeff, epsilon) {}

    [[nodiscard]] std::pair<double, double> segment(double lo, double hi) const {
        if (coeff_.has_exact_phase()) {
            return {coeff_.exact_phi1(hi) - coeff_.exact_phi1(lo), coeff_.exact_phi2(hi) - coeff_.exact_phi2(lo)};
        }
        const double s1 = coeff_.has_exact_phi1()
                              ? coeff_.exact_phi1(hi) - coeff_.exact_phi1(lo)
                              : integrate_adaptive([this](double t) { return std::sqrt(coeff_(t)); }, lo, hi, quad_tol)
                                    .value;
        const auto s2 = integrate_adaptive([this](double t) { return wkb::beta(coeff_, t); }, lo, hi, quad_tol);
        return {s1, s2.value};
    }

    [[nodiscard]] double phi1(double x) const {
        return coeff_.has_exact_phi1() ? coeff_.exact_phi1(x) : segment(0.0, x).first;
    }
    [[nodiscard]] double phi2(double x) const {
        return coeff_.has_exact_phase() ? coeff_.exact_phi2(x) : segment(0.0, x).second;
    }

    [[nodiscard]] NodePhase node(double x) const {
        NodePhase out = node_without_phi(x);
        out.phi = phi1(x) - epsilon_ * epsilon_ * phi2(x);
        return out;
    }

    template <class Visit>
    void walk(const UniformGrid& g, Visit&& visit) const {
        const double eps2 = epsilon_ * epsilon_;
        NodePhase prev = node_without_phi(0.0);
        visit(std::size_t{0}, prev, 0.0);
        if (coeff_.has_exact_phase()) {
            for (std::size_t n = 1; n < g.size(); ++n) {
                NodePhase cur = node(g.node(n));
                visit(n, cur, cur.phi - prev.phi);
                prev = cur;
            }
            return;
        }
        double p1 = 0.0;
        double p2 = 0.0;
        for (std::size_t n = 1; n < g.size(); ++n) {
            const auto [s1, s2] = segment(g.node(n - 1), g.node(n));
            p1 += s1;
            p2 += s2;
            NodePhase cur = node_without_phi(g.node(n));
            cur.phi = p1 - eps2 * p2;
            visit(n, cur, s1 - eps2 * s2);
        }
    }
};

}  // namespace detail

/// Immutable phase model for one (coefficient, eps, method).
class PhaseModel {
public:
    using Impl = std::variant<detail::SpectralPhase, detail::SimpsonPhase, detail::AnalyticPhase>;

    PhaseModel(double epsilon, Impl impl) : epsilon_(epsilon), impl_(std::make_shared<const Impl>(std::move(impl))) {}

    [[nodiscard]] double epsilon() const { return epsilon_; }
    [[nodiscard]] PhaseMethod method() const { return static_cast<PhaseMethod>(impl_->index()); }

    [[nodiscard]] double phi1(double x) const {
        return std::visit([x](const auto& m) { return m.phi1(x); }, *impl_);
    }
    [[nodiscard]] double phi2(double x) const {
        return std::visit([x](const auto& m) { return m.phi2(x); }, *impl_);
    }
    [[nodiscard]] double phi(double x) const { return phi1(x) - epsilon_ * epsilon_ * phi2(x); }
    [[nodiscard]] double dphi(double x) const {
        return std::visit([x](const auto& m) { return m.dphi(x); }, *impl_);
    }
    [[nodiscard]] double d2phi(double x) const {
        return std::visit([x](const auto& m) { return m.d2phi(x); }, *impl_);
    }
    [[nodiscard]] NodePhase node(double x) const {
        return std::visit([x](const auto& m) { return m.node(x); }, *impl_);
    }
    [[nodiscard]] double beta(double x) const { return node(x).beta; }
    [[nodiscard]] double beta_k(std::size_t k, double x) const { return node(x).beta_k.at(k); }

    /// Streams the grid: visit(n, NodePhase at x_n, phi~(x_n) - phi~(x_{n-1})),
    /// the increment being 0 at n = 0.
    template <class Visit>
    void walk(const UniformGrid& g, Visit&& visit) const {
        std::visit([&](const auto& m) { m.walk(g, visit); }, *impl_);
    }

    [[nodiscard]] GridPhase sample(const UniformGrid& g) const {
        GridPhase out;
        out.nodes.reserve(g.size());
        out.increments.reserve(g.cells);
        walk(g, [&](std::size_t n, const NodePhase& p, double inc) {
            out.nodes.push_back(p);
            if (n > 0) out.increments.push_back(inc);
        });
        return out;
    }

    [[nodiscard]] const detail::SpectralPhase* spectral() const {
        return std::get_if<detail::SpectralPhase>(impl_.get());
    }

private:
    double epsilon_;
    std::shared_ptr<const Impl> impl_;
};

namespace detail {

inline void require_admissible(const Coefficient& coeff, double epsilon) {
    const HypothesisReport r = validate_hypothesis_a(coeff, epsilon);
    if (!r.admissible) {
        throw std::domain_error("coefficient '" + coeff.name() + "' with eps = " + std::to_string(epsilon) +
                                " violates Hypothesis A (min a = " + std::to_string(r.a0_min) +
                                ", eps1 = " + std::to_string(r.epsilon1) + ")");
    }
}

}  // namespace detail

inline constexpr std::size_t default_cheb_n = 20;

[[nodiscard]] inline PhaseModel build_phase_spectral(const Coefficient& coeff, double epsilon,
                                                     std::size_t n_cheb = default_cheb_n) {
    if (n_cheb < 8) {
        throw std::invalid_argument("build_phase_spectral: n_cheb must be >= 8");
    }
    detail::require_admissible(coeff, epsilon);
    return PhaseModel(epsilon, detail::SpectralPhase(coeff, epsilon, n_cheb));
}

[[nodiscard]] inline PhaseModel build_phase_simpson(const Coefficient& coeff, double epsilon, UniformGrid grid) {
    detail::require_admissible(coeff, epsilon);
    return PhaseModel(epsilon, detail::SimpsonPhase(coeff, epsilon, grid));
}

[[nodiscard]] inline PhaseModel build_phase_analytic(const Coefficient& coeff, double epsilon) {
    detail::require_admissible(coeff, epsilon);
    return PhaseModel(epsilon, detail::AnalyticPhase(coeff, epsilon));
}

/// Builds a phase model of the requested kind; `grid` is only used by simpson.
[[nodiscard]] inline PhaseModel build_phase(PhaseMethod method, const Coefficient& coeff, double epsilon,
                                            UniformGrid grid, std::size_t n_cheb = default_cheb_n) {
    switch (method) {
        case PhaseMethod::spectral: return build_phase_spectral(coeff, epsilon, n_cheb);
        case PhaseMethod::simpson: return build_phase_simpson(coeff, epsilon, grid);
        case PhaseMethod::analytic: return build_phase_analytic(coeff, epsilon);
    }
    throw std::invalid_argument("build_phase: unknown method");
}

struct PhaseErrors {
    double value = 0.0;   // E
    double first = 0.0;   // E'
    double second = 0.0;  // E''
};

/// Sup-norm deviations of phi~, phi~', phi~'' from a higher-resolution
/// reference, sampled at n_points equispaced points of [0, 1].
[[nodiscard]] inline PhaseErrors phase_accuracy(const PhaseModel& model, const PhaseModel& reference,
                                                std::size_t n_points = 1000) {
    PhaseErrors e;
    for (std::size_t i = 0; i < n_points; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(n_points - 1);
        e.value = std::max(e.value, std::abs(model.phi(x) - reference.phi(x)));
        e.first = std::max(e.first, std::abs(model.dphi(x) - reference.dphi(x)));
        e.second = std::max(e.second, std::abs(model.d2phi(x) - reference.d2phi(x)));
    }
    return e;
}

}  // namespace wkb
