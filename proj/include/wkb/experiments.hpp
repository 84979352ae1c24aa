#pragma once

// Convergence sweeps, order estimation, the Chebyshev phase study and CSV
// output.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "wkb/chebyshev.hpp"
#include "wkb/coefficient.hpp"
#include "wkb/oracle.hpp"
#include "wkb/phase.hpp"
#include "wkb/solver.hpp"

namespace wkb {

enum class ErrorTarget { U, Z };

/// U_I = (1, -i).
[[nodiscard]] inline StateU default_initial_U() { return {1.0, -imag_unit}; }

[[nodiscard]] inline std::vector<double> default_epsilons() { return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}; }

/// h = 10^-k, k = 0..6.
[[nodiscard]] inline std::vector<double> default_steps() {
    std::vector<double> hs;
    for (int k = 0; k <= 6; ++k) hs.push_back(std::pow(10.0, -k));
    return hs;
}

struct SweepSpec {
    std::string coefficient = "gauss";
    std::vector<double> epsilon_list = default_epsilons();
    std::vector<double> h_list = default_steps();
    int order = 1;
    PhaseMethod phase_method = PhaseMethod::spectral;
    std::size_t n_cheb = default_cheb_n;
    ErrorTarget target = ErrorTarget::U;
    StateU initial = default_initial_U();
    std::size_t refine = 64;
    /// Steps below this are skipped for eps <= small_eps (budget cap).
    double min_h_small_eps = 1e-4;
    double small_eps = 1e-3;
    /// Compare against the analytic solution instead of a fine-grid run
    /// (only meaningful for the constant coefficient).
    bool analytic_reference = false;
};

inline constexpr double below_machine_ratio = 1e-16;

struct ConvergenceRecord {
    double epsilon = 0.0;
    double h = 0.0;
    int order = 1;
    PhaseMethod phase_method = PhaseMethod::spectral;
    double err_u_inf = 0.0;
    double err_z_inf = 0.0;
    std::string reference;
    double wall_time = 0.0;  // seconds, scheme run only
    bool below_machine = false;
    bool failed = false;
    std::string message;

    [[nodiscard]] double error(ErrorTarget t) const { return t == ErrorTarget::U ? err_u_inf : err_z_inf; }
    [[nodiscard]] std::string flag() const {
        if (failed) return "failed";
        if (below_machine) return "below_machine";
        return "ok";
    }
};

/// Step sizes actually run for epsilon, after the small-eps cap.
[[nodiscard]] inline std::vector<double> steps_for(const SweepSpec& spec, double epsilon) {
    std::vector<double> hs;
    for (double h : spec.h_list) {
        if (epsilon <= spec.small_eps && h < spec.min_h_small_eps * (1.0 - 1e-9)) continue;
        hs.push_back(h);
    }
    std::sort(hs.begin(), hs.end(), std::greater<>());
    return hs;
}

namespace detail {

struct NodeErrors {
    double u = 0.0;
    double z = 0.0;
    double u_scale = 0.0;
};

[[nodiscard]] inline NodeErrors compare_restricted(const Trajectory& t, const OracleSolution& ref, std::size_t stride) {
    NodeErrors e;
    for (std::size_t n = 0; n < t.u.size(); ++n) {
        const std::size_t r = n * stride;
        e.u = std::max(e.u, distance(t.u[n], ref.u.at(r)));
        if (!ref.z.empty()) e.z = std::max(e.z, distance(t.z[n], ref.z.at(r)));
        e.u_scale = std::max(e.u_scale, ref.u[r].norm());
    }
    return e;
}

[[nodiscard]] inline OracleSolution constant_reference(const UniformGrid& grid, const InitialData& data,
                                                       const Coefficient& coeff, double epsilon) {
    OracleSolution sol;
    sol.nodes = grid.nodes();
    sol.method = "analytic_constant";
    sol.u.reserve(sol.nodes.size());
    sol.z.reserve(sol.nodes.size());
    for (double x : sol.nodes) {
        const StateU u = to_U(analytic_constant(data, epsilon, x), coeff, epsilon, x);
        sol.u.push_back(u);
        // Z = diag(e^{-i x/eps}, e^{i x/eps}) P U for a = 1
        const StateZ pz = to_Z(u);
        const Complex e = std::polar(1.0, -x / epsilon);
        sol.z.push_back({e * pz.z1, std::conj(e) * pz.z2});
    }
    return sol;
}

}  // namespace detail

/// One record per (eps, h). The reference for each eps is a single fine run at
/// refine x the smallest step, shared by every h dividing into it; otherwise
/// each h gets its own refined reference. Failures are recorded, not thrown.
[[nodiscard]] inline std::vector<ConvergenceRecord> run_sweep(const SweepSpec& spec) {
    const Coefficient coeff = builtin_coefficient(spec.coefficient);
    std::vector<ConvergenceRecord> records;
    for (double eps : spec.epsilon_list) {
        const std::vector<double> hs = steps_for(spec, eps);
        if (hs.empty()) continue;
        const InitialData data = initial_data_from_U(spec.initial, coeff, eps);

        std::vector<UniformGrid> grids;
        std::vector<std::string> grid_errors;
        for (double h : hs) {
            try {
                grids.push_back(UniformGrid::from_step(h));
                grid_errors.emplace_back();
            } catch (const std::exception& e) {
                grids.push_back(UniformGrid{0});
                grid_errors.emplace_back(e.what());
            }
        }
        std::size_t finest = 0;
        for (const auto& g : grids) finest = std::max(finest, g.cells);
        const bool shareable = std::all_of(grids.begin(), grids.end(),
                                           [&](const UniformGrid& g) { return g.cells > 0 && finest % g.cells == 0; });

        std::optional<OracleSolution> shared;
        std::string shared_error;
        SchemeConfig base{spec.order, eps, UniformGrid{finest}, spec.phase_method, spec.n_cheb};
        if (shareable) {
            try {
                shared = spec.analytic_reference ? detail::constant_reference(base.grid, data, coeff, eps)
                                                 : self_reference(base, coeff, data, spec.refine);
            } catch (const std::exception& e) {
                shared_error = e.what();
            }
        }

        for (std::size_t i = 0; i < hs.size(); ++i) {
            ConvergenceRecord rec;
            rec.epsilon = eps;
            rec.h = hs[i];
            rec.order = spec.order;
            rec.phase_method = spec.phase_method;
            try {
                if (!grid_errors[i].empty()) throw std::invalid_argument(grid_errors[i]);
                if (shareable && !shared) throw OracleFailure(shared_error);
                SchemeConfig config = base;
                config.grid = grids[i];

                const auto t0 = std::chrono::steady_clock::now();
                const Trajectory t = solve(config, coeff, data);
                rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

                detail::NodeErrors e;
                if (shared) {
                    rec.reference = shared->method + " at h=" + fmt::format("{:.3e}", 1.0 / static_cast<double>(finest));
                    e = detail::compare_restricted(t, *shared, finest / config.grid.cells);
                } else {
                    const OracleSolution ref = spec.analytic_reference
                                                   ? detail::constant_reference(config.grid, data, coeff, eps)
                                                   : self_reference(config, coeff, data, spec.refine);
                    rec.reference = ref.method;
                    e = detail::compare_restricted(t, ref, 1);
                }
                rec.err_u_inf = e.u;
                rec.err_z_inf = e.z;
                const double err = rec.error(spec.target);
                rec.below_machine = err == 0.0 || err < below_machine_ratio * e.u_scale;
            } catch (const std::exception& ex) {
                rec.failed = true;
                rec.message = ex.what();
            }
            records.push_back(std::move(rec));
        }
    }
    return records;
}

/// Least-squares slope of log(err) against log(h).
[[nodiscard]] inline double estimate_order(const std::vector<ConvergenceRecord>& records,
                                           ErrorTarget target = ErrorTarget::U) {
    std::vector<double> lx, ly;
    for (const auto& r : records) {
        if (r.failed || r.below_machine) {
            throw std::invalid_argument("estimate_order: record at h = " + fmt::format("{:g}", r.h) +
                                        " is flagged " + r.flag());
        }
        const double err = r.error(target);
        if (!(err > 0.0)) throw std::invalid_argument("estimate_order: non-positive error");
        if (std::find(lx.begin(), lx.end(), std::log(r.h)) != lx.end()) {
            throw std::invalid_argument("estimate_order: duplicate step");
        }
        lx.push_back(std::log(r.h));
        ly.push_back(std::log(err));
    }
    if (lx.size() < 3) throw std::invalid_argument("estimate_order: need at least 3 distinct steps");
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

/// Records for one eps with lo <= h <= hi.
[[nodiscard]] inline std::vector<ConvergenceRecord> select(const std::vector<ConvergenceRecord>& records, double eps,
                                                           double h_lo, double h_hi) {
    std::vector<ConvergenceRecord> out;
    for (const auto& r : records) {
        if (r.epsilon == eps && r.h >= h_lo * (1 - 1e-12) && r.h <= h_hi * (1 + 1e-12)) out.push_back(r);
    }
    return out;
}

[[nodiscard]] inline std::vector<ConvergenceRecord> sorted_records(std::vector<ConvergenceRecord> records) {
    std::stable_sort(records.begin(), records.end(), [](const ConvergenceRecord& a, const ConvergenceRecord& b) {
        if (a.epsilon != b.epsilon) return a.epsilon > b.epsilon;
        return a.h > b.h;
    });
    return records;
}

inline constexpr const char* convergence_csv_header = "epsilon,h,order,phase_method,err_u_inf,err_z_inf,flag";

[[nodiscard]] inline std::string convergence_csv(const std::vector<ConvergenceRecord>& records) {
    std::string out = std::string(convergence_csv_header) + "\n";
    for (const auto& r : sorted_records(records)) {
        out += fmt::format("{:.16e},{:.16e},{},{},{:.16e},{:.16e},{}\n", r.epsilon, r.h, r.order,
                           to_string(r.phase_method), r.err_u_inf, r.err_z_inf, r.flag());
    }
    return out;
}

namespace detail {

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    f.flush();
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace detail

inline void emit_csv(const std::vector<ConvergenceRecord>& records, const std::string& path) {
    detail::write_file(path, convergence_csv(records));
}

[[nodiscard]] inline std::string trajectory_csv(const Trajectory& t) {
    std::string out = "x,re_u1,im_u1,re_u2,im_u2,re_z1,im_z1,re_z2,im_z2,phi_tilde\n";
    for (std::size_t n = 0; n < t.x.size(); ++n) {
        const StateU& u = t.u[n];
        const StateZ& z = t.z[n];
        out += fmt::format("{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n", t.x[n],
                           u.u1.real(), u.u1.imag(), u.u2.real(), u.u2.imag(), z.z1.real(), z.z1.imag(), z.z2.real(),
                           z.z2.imag(), t.phi_tilde[n]);
    }
    return out;
}

inline void emit_trajectory_csv(const Trajectory& t, const std::string& path) {
    detail::write_file(path, trajectory_csv(t));
}

// Chebyshev phase study

struct PhaseStudyRow {
    std::string series;  // quadrature_error, phi1_coeff, phi2_coeff, interp_error
    std::size_t n = 0;
    std::size_t index = 0;
    double x = 0.0;
    double value = 0.0;
};

/// For each N: the Clenshaw-Curtis error of int_0^1 sqrt(a), the magnitudes of
/// the Chebyshev coefficients of the antiderivatives of sqrt(a) and -beta, and
/// (when interp_points > 0) the barycentric interpolation error of the sqrt(a)
/// antiderivative at equispaced points.
[[nodiscard]] inline std::vector<PhaseStudyRow> phase_convergence_study(const Coefficient& coeff,
                                                                       const std::vector<std::size_t>& n_list,
                                                                       std::size_t interp_points = 1000) {
    if (!std::is_sorted(n_list.begin(), n_list.end())) {
        throw std::invalid_argument("phase_convergence_study: N list must be ascending");
    }
    auto exact_phi1 = [&](double x) {
        if (coeff.has_exact_phi1()) return coeff.exact_phi1(x);
        return integrate_adaptive([&](double t) { return std::sqrt(coeff(t)); }, 0.0, x, 1e-16).value;
    };
    const double exact_total = exact_phi1(1.0);
    std::vector<double> xs(interp_points), exact(interp_points);
    for (std::size_t i = 0; i < interp_points; ++i) {
        xs[i] = interp_points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(interp_points - 1);
        exact[i] = exact_phi1(xs[i]);
    }

    std::vector<PhaseStudyRow> rows;
    for (std::size_t n : n_list) {
        const cheb::ChebGrid grid = cheb::cheb_nodes(n, 0.0, 1.0);
        std::vector<double> sqrt_a(grid.size()), minus_beta(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) {
            sqrt_a[j] = std::sqrt(coeff(grid.mapped_nodes[j]));
            minus_beta[j] = -beta(coeff, grid.mapped_nodes[j]);
        }
        const auto phi1 = cheb::antiderivative_coeffs(cheb::cheb_coeffs(sqrt_a, 0.0, 1.0));
        const auto phi2 = cheb::antiderivative_coeffs(cheb::cheb_coeffs(minus_beta, 0.0, 1.0));
        rows.push_back({"quadrature_error", n, 0, 1.0, std::abs(cheb::cheb_eval(phi1, 1.0) - exact_total)});
        for (std::size_t k = 0; k < phi1.coeffs.size(); ++k) {
            rows.push_back({"phi1_coeff", n, k, 0.0, std::abs(phi1.coeffs[k])});
        }
        for (std::size_t k = 0; k < phi2.coeffs.size(); ++k) {
            rows.push_back({"phi2_coeff", n, k, 0.0, std::abs(phi2.coeffs[k])});
        }
        if (interp_points > 0) {
            std::vector<double> values(grid.size());
            for (std::size_t j = 0; j < grid.size(); ++j) values[j] = cheb::cheb_eval(phi1, grid.mapped_nodes[j]);
            cheb::BarycentricPoint p(grid);
            for (std::size_t i = 0; i < interp_points; ++i) {
                p.set(xs[i]);
                rows.push_back({"interp_error", n, i, xs[i], std::abs(p(values) - exact[i])});
            }
        }
    }
    return rows;
}

[[nodiscard]] inline std::string phase_study_csv(const std::vector<PhaseStudyRow>& rows) {
    std::string out = "series,n,index,x,value\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{:.16e},{:.16e}\n", r.series, r.n, r.index, r.x, r.value);
    }
    return out;
}

inline void emit_phase_study_csv(const std::vector<PhaseStudyRow>& rows, const std::string& path) {
    detail::write_file(path, phase_study_csv(rows));
}

}  // namespace wkb
