#pragma once

// Chebyshev spectral toolkit on a single interval [lo, hi]: Gauss-Lobatto
// nodes, coefficient transform, Clenshaw-Curtis antiderivative, spectral
// differentiation and barycentric interpolation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wkb::cheb {

enum class MapDirection { forward, inverse };

/// Affine map between [lo, hi] and [-1, 1]. `forward` sends x in [lo, hi] to
/// l in [-1, 1]; `inverse` sends l back via x = hi (1 + l)/2 + lo (1 - l)/2.
[[nodiscard]] inline double map_interval(double x, double lo, double hi, MapDirection direction) {
    if (!(lo < hi)) {
        throw std::invalid_argument("map_interval: require lo < hi");
    }
    if (direction == MapDirection::forward) {
        return (2.0 * x - lo - hi) / (hi - lo);
    }
    return hi * (1.0 + x) / 2.0 + lo * (1.0 - x) / 2.0;
}

/// N+1 Chebyshev-Gauss-Lobatto points l_j = cos(j pi / N), descending from 1
/// to -1, together with their images on [lo, hi].
struct ChebGrid {
    std::size_t n_poly = 0;
    double lo = -1.0;
    double hi = 1.0;
    std::vector<double> nodes;
    std::vector<double> mapped_nodes;

    [[nodiscard]] std::size_t size() const { return nodes.size(); }
};

[[nodiscard]] inline ChebGrid cheb_nodes(std::size_t n, double lo = -1.0, double hi = 1.0) {
    if (n < 1) {
        throw std::invalid_argument("cheb_nodes: N must be >= 1 (N = 0 is a degenerate grid)");
    }
    if (!(lo < hi)) {
        throw std::invalid_argument("cheb_nodes: require lo < hi");
    }
    ChebGrid grid;
    grid.n_poly = n;
    grid.lo = lo;
    grid.hi = hi;
    grid.nodes.resize(n + 1);
    grid.mapped_nodes.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        grid.nodes[j] = std::cos(static_cast<double>(j) * std::numbers::pi / static_cast<double>(n));
        grid.mapped_nodes[j] = map_interval(grid.nodes[j], lo, hi, MapDirection::inverse);
    }
    // cos(pi/2) is not exactly zero in floating point; the endpoints must be.
    grid.mapped_nodes.front() = hi;
    grid.mapped_nodes.back() = lo;
    return grid;
}

/// Truncated Chebyshev expansion f(x) ~ sum_n coeffs[n] T_n(l(x)) on [lo, hi].
struct ChebyshevSeries {
    double interval_lo = -1.0;
    double interval_hi = 1.0;
    std::vector<double> coeffs;

    [[nodiscard]] std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
};

namespace detail {

// cos(n j pi / N) with the integer product reduced modulo 2N first, so the
// cosine argument stays in [0, 2 pi).
[[nodiscard]] inline double cos_index(std::size_t n, std::size_t j, std::size_t big_n) {
    const std::size_t m = (n * j) % (2 * big_n);
    return std::cos(static_cast<double>(m) * std::numbers::pi / static_cast<double>(big_n));
}

}  // namespace detail

/// Coefficients a_n with sum_n a_n cos(n j pi / N) = samples[j] for every j
/// (type-I DCT, O(N^2)). samples[j] must be taken at l_j = cos(j pi / N).
[[nodiscard]] inline ChebyshevSeries cheb_coeffs(std::span<const double> samples, double lo = -1.0,
                                                 double hi = 1.0) {
    if (samples.size() < 2) {
        throw std::invalid_argument("cheb_coeffs: need N+1 >= 2 samples");
    }
    if (!(lo < hi)) {
        throw std::invalid_argument("cheb_coeffs: require lo < hi");
    }
    const std::size_t n_poly = samples.size() - 1;
    ChebyshevSeries series{lo, hi, std::vector<double>(n_poly + 1, 0.0)};
    for (std::size_t n = 0; n <= n_poly; ++n) {
        double sum = 0.0;
        for (std::size_t j = 0; j <= n_poly; ++j) {
            const double endpoint = (j == 0 || j == n_poly) ? 0.5 : 1.0;
            sum += endpoint * samples[j] * detail::cos_index(n, j, n_poly);
        }
        const double edge = (n == 0 || n == n_poly) ? 0.5 : 1.0;
        series.coeffs[n] = 2.0 * edge * sum / static_cast<double>(n_poly);
    }
    return series;
}

/// Clenshaw evaluation of the series at x in [lo, hi].
[[nodiscard]] inline double cheb_eval(const ChebyshevSeries& series, double x) {
    constexpr double slack = 1e-12;
    double l = map_interval(x, series.interval_lo, series.interval_hi, MapDirection::forward);
    if (!(std::abs(l) <= 1.0 + slack)) {
        throw std::domain_error("cheb_eval: x = " + std::to_string(x) + " outside series interval");
    }
    l = std::clamp(l, -1.0, 1.0);
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t k = series.coeffs.size(); k-- > 1;) {
        const double b0 = 2.0 * l * b1 - b2 + series.coeffs[k];
        b2 = b1;
        b1 = b0;
    }
    const double a0 = series.coeffs.empty() ? 0.0 : series.coeffs[0];
    return l * b1 - b2 + a0;
}

/// Coefficients of the antiderivative x -> int_lo^x f, truncated at the
/// input degree N, normalized to vanish at lo and scaled by (hi - lo)/2.
[[nodiscard]] inline ChebyshevSeries antiderivative_coeffs(const ChebyshevSeries& series) {
    const std::size_t n_poly = series.degree();
    if (series.coeffs.size() < 3) {
        throw std::invalid_argument("antiderivative_coeffs: need degree N >= 2");
    }
    const auto& a = series.coeffs;
    auto coeff = [&](std::size_t n) { return n <= n_poly ? a[n] : 0.0; };

    std::vector<double> b(n_poly + 1, 0.0);
    b[1] = a[0] - 0.5 * coeff(2);
    for (std::size_t n = 2; n < n_poly; ++n) {
        b[n] = (a[n - 1] - a[n + 1]) / (2.0 * static_cast<double>(n));
    }
    b[n_poly] = a[n_poly - 1] / (2.0 * static_cast<double>(n_poly));
    double alternating = 0.0;
    for (std::size_t n = 1; n <= n_poly; ++n) {
        alternating += (n % 2 == 0 ? 1.0 : -1.0) * b[n];
    }
    b[0] = -alternating;

    const double jacobian = (series.interval_hi - series.interval_lo) / 2.0;
    for (double& v : b) {
        v *= jacobian;
    }
    return {series.interval_lo, series.interval_hi, std::move(b)};
}

/// (N+1)x(N+1) spectral differentiation matrix on the reference nodes
/// cos(j pi / N). The diagonal is minus the off-diagonal row sum.
[[nodiscard]] inline Eigen::MatrixXd diff_matrix(std::size_t n) {
    if (n < 1) {
        throw std::invalid_argument("diff_matrix: N must be >= 1");
    }
    const auto size = static_cast<Eigen::Index>(n + 1);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(size, size);
    auto weight = [n](std::size_t j) {
        const double edge = (j == 0 || j == n) ? 2.0 : 1.0;
        return (j % 2 == 0 ? 1.0 : -1.0) * edge;
    };
    for (std::size_t i = 0; i <= n; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j <= n; ++j) {
            if (i == j) {
                continue;
            }
            // x_i - x_j = 2 sin((i+j) pi/2N) sin((j-i) pi/2N), free of cancellation
            const double half = std::numbers::pi / (2.0 * static_cast<double>(n));
            const double gap = 2.0 * std::sin(static_cast<double>(i + j) * half) *
                               std::sin((static_cast<double>(j) - static_cast<double>(i)) * half);
            const double entry = weight(i) / weight(j) / gap;
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = entry;
            row_sum += entry;
        }
        d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = -row_sum;
    }
    return d;
}

/// Barycentric weights for the second-kind Chebyshev points: (-1)^j, halved
/// at both endpoints.
[[nodiscard]] inline std::vector<double> barycentric_weights(std::size_t n) {
    std::vector<double> w(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        w[j] = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);
    }
    return w;
}

/// Normalized barycentric coefficients at one evaluation point, so several
/// node-value arrays can be interpolated at the same x with one dot product
/// each. `set` reuses the buffer, which keeps marching loops allocation-free.
class BarycentricPoint {
public:
    explicit BarycentricPoint(const ChebGrid& grid)
        : grid_(&grid), weights_(barycentric_weights(grid.n_poly)), coeffs_(grid.size(), 0.0) {}

    BarycentricPoint(const ChebGrid& grid, double x) : BarycentricPoint(grid) { set(x); }

    void set(double x) {
        constexpr double slack = 1e-12;
        const ChebGrid& grid = *grid_;
        const double width = grid.hi - grid.lo;
        if (!(x >= grid.lo - slack * width && x <= grid.hi + slack * width)) {
            throw std::domain_error("barycentric_eval: x = " + std::to_string(x) + " outside interval");
        }
        double denom = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double diff = x - grid.mapped_nodes[j];
            if (diff == 0.0) {
                std::fill(coeffs_.begin(), coeffs_.end(), 0.0);
                coeffs_[j] = 1.0;
                return;
            }
            coeffs_[j] = weights_[j] / diff;
            denom += coeffs_[j];
        }
        for (double& c : coeffs_) {
            c /= denom;
        }
    }

    [[nodiscard]] double operator()(std::span<const double> node_values) const {
        double sum = 0.0;
        for (std::size_t j = 0; j < coeffs_.size(); ++j) {
            sum += coeffs_[j] * node_values[j];
        }
        return sum;
    }

private:
    const ChebGrid* grid_;
    std::vector<double> weights_;
    std::vector<double> coeffs_;
};

/// Value at x of the degree-N interpolant through (grid.mapped_nodes,
/// node_values). Returns the node value when x hits a node exactly.
[[nodiscard]] inline double barycentric_eval(std::span<const double> node_values, const ChebGrid& grid,
                                             double x) {
    if (node_values.size() != grid.size()) {
        throw std::invalid_argument("barycentric_eval: node_values size does not match grid");
    }
    return BarycentricPoint(grid, x)(node_values);
}

}  // namespace wkb::cheb
