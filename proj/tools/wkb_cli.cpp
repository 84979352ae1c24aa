// Command-line driver: single solves, convergence sweeps and the Chebyshev
// phase study, all written as CSV.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "wkb/wkb.hpp"

namespace {

struct SolveOptions {
    std::string coefficient = "gauss";
    double epsilon = 0.1;
    double h = 1e-2;
    int order = 1;
    std::string phase = "spectral";
    std::size_t cheb_n = wkb::default_cheb_n;
    std::string out;
};

struct ConvergenceOptions {
    std::string coefficient = "gauss";
    std::vector<double> epsilons = wkb::default_epsilons();
    std::vector<double> steps = wkb::default_steps();
    int order = 1;
    std::string phase = "spectral";
    std::size_t cheb_n = wkb::default_cheb_n;
    std::size_t refine = 64;
    std::string out;
};

struct PhaseCheckOptions {
    std::string coefficient = "gauss";
    std::size_t n_max = 24;
    std::string out;
};

void write_or_print(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
    } else {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f || !(f << text)) throw std::runtime_error("cannot write '" + path + "'");
    }
}

int run_solve(const SolveOptions& o) {
    const wkb::Coefficient coeff = wkb::builtin_coefficient(o.coefficient);
    wkb::SchemeConfig config{o.order, o.epsilon, wkb::UniformGrid::from_step(o.h), wkb::parse_phase_method(o.phase),
                             o.cheb_n};
    const wkb::InitialData data = wkb::initial_data_from_U(wkb::default_initial_U(), coeff, o.epsilon);
    const wkb::Trajectory t = wkb::solve(config, coeff, data);
    write_or_print(wkb::trajectory_csv(t), o.out);
    return 0;
}

int run_convergence(const ConvergenceOptions& o) {
    wkb::SweepSpec spec;
    spec.coefficient = o.coefficient;
    spec.epsilon_list = o.epsilons;
    spec.h_list = o.steps;
    spec.order = o.order;
    spec.phase_method = wkb::parse_phase_method(o.phase);
    spec.n_cheb = o.cheb_n;
    spec.refine = o.refine;
    spec.analytic_reference = o.coefficient == "constant";

    // Validate up front so a bad eps fails loudly instead of as a failed row.
    const wkb::Coefficient coeff = wkb::builtin_coefficient(o.coefficient);
    for (double eps : spec.epsilon_list) wkb::detail::require_admissible(coeff, eps);
    for (double h : spec.h_list) (void)wkb::UniformGrid::from_step(h);

    const auto records = wkb::run_sweep(spec);
    write_or_print(wkb::convergence_csv(records), o.out);

    int failures = 0;
    for (const auto& r : records) {
        if (r.failed) {
            std::cerr << fmt::format("eps={:g} h={:g}: {}\n", r.epsilon, r.h, r.message);
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}

int run_phase_check(const PhaseCheckOptions& o) {
    const wkb::Coefficient coeff = wkb::builtin_coefficient(o.coefficient);
    std::vector<std::size_t> ns(o.n_max - 1);
    std::iota(ns.begin(), ns.end(), std::size_t{2});
    write_or_print(wkb::phase_study_csv(wkb::phase_convergence_study(coeff, ns)), o.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"WKB marching solver for eps^2 phi'' + a(x) phi = 0 on [0, 1]"};
    app.require_subcommand(1);

    SolveOptions solve_opts;
    auto* solve = app.add_subcommand("solve", "march one (eps, h) configuration and write the trajectory");
    solve->set_help_flag("--help", "print this help message and exit");
    solve->add_option("--coefficient", solve_opts.coefficient, "gauss, quadratic or constant")->capture_default_str();
    solve->add_option("--epsilon", solve_opts.epsilon)->required()->check(CLI::PositiveNumber);
    solve->add_option("--h", solve_opts.h)->required()->check(CLI::PositiveNumber);
    solve->add_option("--order", solve_opts.order)->check(CLI::IsMember({1, 2}))->capture_default_str();
    solve->add_option("--phase", solve_opts.phase)
        ->check(CLI::IsMember({"spectral", "simpson", "analytic"}))
        ->capture_default_str();
    solve->add_option("--cheb-n", solve_opts.cheb_n, "Chebyshev polynomial degree")->capture_default_str();
    solve->add_option("--out", solve_opts.out, "output CSV (stdout if omitted)");

    ConvergenceOptions conv_opts;
    auto* conv = app.add_subcommand("convergence", "error sweep over eps and h against a refined reference");
    conv->add_option("--coefficient", conv_opts.coefficient)->capture_default_str();
    conv->add_option("--epsilon-list", conv_opts.epsilons)->delimiter(',')->capture_default_str();
    conv->add_option("--h-list", conv_opts.steps)->delimiter(',')->capture_default_str();
    conv->add_option("--order", conv_opts.order)->check(CLI::IsMember({1, 2}))->capture_default_str();
    conv->add_option("--phase", conv_opts.phase)
        ->check(CLI::IsMember({"spectral", "simpson", "analytic"}))
        ->capture_default_str();
    conv->add_option("--cheb-n", conv_opts.cheb_n)->capture_default_str();
    conv->add_option("--refine", conv_opts.refine, "reference grid refinement")->capture_default_str();
    conv->add_option("--out", conv_opts.out)->required();

    PhaseCheckOptions phase_opts;
    auto* phase = app.add_subcommand("phase-check", "Chebyshev quadrature and interpolation study");
    phase->add_option("--coefficient", phase_opts.coefficient)->capture_default_str();
    phase->add_option("--n-max", phase_opts.n_max)->check(CLI::Range(2, 200))->capture_default_str();
    phase->add_option("--out", phase_opts.out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) return run_solve(solve_opts);
        if (*conv) return run_convergence(conv_opts);
        if (*phase) return run_phase_check(phase_opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
