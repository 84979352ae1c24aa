#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "wkb/chebyshev.hpp"

using namespace wkb::cheb;

namespace {

const double kErfIntegral = 0.8556243918921488031733;  // sqrt(pi/2) erf(1/sqrt 2)

std::vector<double> sample(const ChebGrid& g, auto f) {
    std::vector<double> v(g.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(g.mapped_nodes[j]);
    return v;
}

double gauss_half(double x) { return std::exp(-0.5 * x * x); }

double erf_primitive(double x) { return std::sqrt(std::numbers::pi / 2.0) * std::erf(x / std::numbers::sqrt2); }

}  // namespace

TEST(ChebNodes, SmallGrids) {
    const auto g1 = cheb_nodes(1);
    ASSERT_EQ(g1.size(), 2u);
    EXPECT_EQ(g1.nodes[0], 1.0);
    EXPECT_EQ(g1.nodes[1], -1.0);

    const auto g2 = cheb_nodes(2);
    ASSERT_EQ(g2.size(), 3u);
    EXPECT_EQ(g2.nodes[0], 1.0);
    EXPECT_NEAR(g2.nodes[1], 0.0, 1e-16);
    EXPECT_EQ(g2.nodes[2], -1.0);

    const auto g4 = cheb_nodes(4);
    const double r = std::numbers::sqrt2 / 2.0;
    const std::vector<double> expected{1.0, r, 0.0, -r, -1.0};
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(g4.nodes[j], expected[j], 2e-16);
}

TEST(ChebNodes, RejectsDegenerate) { EXPECT_THROW((void)cheb_nodes(0), std::invalid_argument); }

TEST(ChebNodes, StrictlyDecreasingAndMapped) {
    for (std::size_t n : {3u, 8u, 20u, 64u}) {
        const auto g = cheb_nodes(n, 0.0, 1.0);
        for (std::size_t j = 0; j < g.size(); ++j) {
            EXPECT_EQ(g.nodes[j], std::cos(static_cast<double>(j) * std::numbers::pi / static_cast<double>(n)))
                << "j=" << j;
            if (j > 0) {
                EXPECT_LT(g.nodes[j], g.nodes[j - 1]);
                EXPECT_LT(g.mapped_nodes[j], g.mapped_nodes[j - 1]);
            }
        }
        EXPECT_EQ(g.mapped_nodes.front(), 1.0);
        EXPECT_EQ(g.mapped_nodes.back(), 0.0);
    }
}

TEST(MapInterval, EndpointsAndInverse) {
    EXPECT_DOUBLE_EQ(map_interval(2.0, 2.0, 5.0, MapDirection::forward), -1.0);
    EXPECT_DOUBLE_EQ(map_interval(5.0, 2.0, 5.0, MapDirection::forward), 1.0);
    EXPECT_DOUBLE_EQ(map_interval(3.5, 2.0, 5.0, MapDirection::forward), 0.0);
    for (double x : {2.0, 2.3, 4.9, 5.0}) {
        const double l = map_interval(x, 2.0, 5.0, MapDirection::forward);
        EXPECT_NEAR(map_interval(l, 2.0, 5.0, MapDirection::inverse), x, 1e-15);
    }
}

TEST(ChebCoeffs, BasisPolynomials) {
    const auto g = cheb_nodes(6);
    const auto one = cheb_coeffs(sample(g, [](double) { return 1.0; }));
    const auto lin = cheb_coeffs(sample(g, [](double l) { return l; }));
    const auto t2 = cheb_coeffs(sample(g, [](double l) { return 2 * l * l - 1; }));
    for (std::size_t n = 0; n <= 6; ++n) {
        EXPECT_NEAR(one.coeffs[n], n == 0 ? 1.0 : 0.0, 1e-15);
        EXPECT_NEAR(lin.coeffs[n], n == 1 ? 1.0 : 0.0, 1e-15);
        EXPECT_NEAR(t2.coeffs[n], n == 2 ? 1.0 : 0.0, 1e-15);
    }
}

TEST(ChebEval, KnownValues) {
    EXPECT_NEAR(cheb_eval(ChebyshevSeries{-1.0, 1.0, {0.0, 1.0}}, 0.3), 0.3, 1e-16);
    EXPECT_NEAR(cheb_eval(ChebyshevSeries{-1.0, 1.0, {0.0, 0.0, 1.0}}, 0.5), -0.5, 1e-16);
    EXPECT_THROW((void)cheb_eval(ChebyshevSeries{0.0, 1.0, {1.0, 2.0}}, 1.1), std::domain_error);
    EXPECT_NO_THROW((void)cheb_eval(ChebyshevSeries{0.0, 1.0, {1.0, 2.0}}, 1.0 + 1e-14));
}

TEST(ChebCoeffs, InterpolationIdentityAgainstCosineSum) {
    // Direct O(N^2) cosine sum at the nodes is the oracle.
    const std::size_t n = 20;
    const auto g = cheb_nodes(n, 0.0, 1.0);
    const auto v = sample(g, gauss_half);
    const auto s = cheb_coeffs(v, 0.0, 1.0);
    for (std::size_t j = 0; j <= n; ++j) {
        double sum = 0.0;
        for (std::size_t k = 0; k <= n; ++k) {
            sum += s.coeffs[k] * std::cos(static_cast<double>(k * j) * std::numbers::pi / static_cast<double>(n));
        }
        EXPECT_NEAR(sum, v[j], 1e-13);
        EXPECT_NEAR(cheb_eval(s, g.mapped_nodes[j]), v[j], 1e-13);
    }
}

TEST(ChebCoeffs, RoundTripRandomSmooth) {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (std::size_t n = 1; n <= 64; n += (n < 8 ? 1 : 7)) {
        const double a = u(rng), b = u(rng), c = u(rng);
        const auto g = cheb_nodes(n, -0.5, 2.0);
        const auto v = sample(g, [&](double x) { return a * std::sin(b * x) + std::exp(c * x / 3.0); });
        const auto s = cheb_coeffs(v, -0.5, 2.0);
        for (std::size_t j = 0; j < g.size(); ++j) {
            EXPECT_NEAR(cheb_eval(s, g.mapped_nodes[j]), v[j], 1e-13 * std::max(1.0, std::abs(v[j]))) << "n=" << n;
        }
    }
}

TEST(Antiderivative, SimpleCases) {
    const auto one = antiderivative_coeffs(ChebyshevSeries{-1.0, 1.0, {1.0, 0.0, 0.0, 0.0}});
    EXPECT_NEAR(one.coeffs[0], 1.0, 1e-16);
    EXPECT_NEAR(one.coeffs[1], 1.0, 1e-16);
    for (std::size_t n = 2; n < one.coeffs.size(); ++n) EXPECT_NEAR(one.coeffs[n], 0.0, 1e-16);

    const auto lin = antiderivative_coeffs(ChebyshevSeries{-1.0, 1.0, {0.0, 1.0, 0.0, 0.0}});
    EXPECT_NEAR(lin.coeffs[0], -0.25, 1e-16);
    EXPECT_NEAR(lin.coeffs[1], 0.0, 1e-16);
    EXPECT_NEAR(lin.coeffs[2], 0.25, 1e-16);
    EXPECT_NEAR(lin.coeffs[3], 0.0, 1e-16);

    EXPECT_THROW((void)antiderivative_coeffs(ChebyshevSeries{-1.0, 1.0, {1.0, 2.0}}), std::invalid_argument);
}

TEST(Antiderivative, Monomials) {
    for (std::size_t n : {4u, 10u, 20u}) {
        const auto g = cheb_nodes(n);
        for (std::size_t k = 0; k + 1 <= n; ++k) {
            const auto v = sample(g, [k](double l) { return std::pow(l, static_cast<double>(k)); });
            const auto b = antiderivative_coeffs(cheb_coeffs(v));
            const double kp = static_cast<double>(k + 1);
            for (double l : {-1.0, -0.7, 0.0, 0.2, 0.95, 1.0}) {
                const double exact = std::pow(l, kp) / kp - std::pow(-1.0, kp) / kp;
                EXPECT_NEAR(cheb_eval(b, l), exact, 1e-12) << "n=" << n << " k=" << k << " l=" << l;
            }
        }
    }
}

TEST(Antiderivative, VanishesAtLeftEndpointAndScales) {
    const auto g = cheb_nodes(20, 0.0, 1.0);
    const auto b = antiderivative_coeffs(cheb_coeffs(sample(g, gauss_half), 0.0, 1.0));
    EXPECT_LE(std::abs(cheb_eval(b, 0.0)), 1e-13);
    EXPECT_NEAR(cheb_eval(b, 1.0), kErfIntegral, 1e-14);
    EXPECT_NEAR(cheb_eval(b, 0.4), erf_primitive(0.4), 1e-14);
}

TEST(Antiderivative, SpectralDecay) {
    for (std::size_t n : {20u, 24u, 32u}) {
        const auto g = cheb_nodes(n, 0.0, 1.0);
        const auto a = cheb_coeffs(sample(g, gauss_half), 0.0, 1.0);
        EXPECT_LE(std::abs(a.coeffs[n]), 1e-15) << "n=" << n;
    }
}

TEST(DiffMatrix, ExactOnPolynomials) {
    for (std::size_t n : {1u, 2u, 8u, 16u, 32u}) {
        const auto g = cheb_nodes(n);
        const Eigen::MatrixXd d = diff_matrix(n);
        for (std::size_t k = 0; k <= n; ++k) {
            Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
            for (std::size_t j = 0; j < g.size(); ++j) v(static_cast<Eigen::Index>(j)) = std::pow(g.nodes[j], k);
            const Eigen::VectorXd dv = d * v;
            for (std::size_t j = 0; j < g.size(); ++j) {
                const double exact = k == 0 ? 0.0 : static_cast<double>(k) * std::pow(g.nodes[j], k - 1.0);
                EXPECT_NEAR(dv(static_cast<Eigen::Index>(j)), exact, 1e-11) << "n=" << n << " k=" << k;
            }
        }
    }
}

TEST(DiffMatrix, RowsSumToZero) {
    const Eigen::MatrixXd d = diff_matrix(20);
    for (Eigen::Index i = 0; i < d.rows(); ++i) EXPECT_NEAR(d.row(i).sum(), 0.0, 1e-13);
}

TEST(Barycentric, ConstantsNodeHitsAndDomain) {
    const auto g = cheb_nodes(12, 0.0, 1.0);
    const std::vector<double> c(g.size(), 3.25);
    for (double x : {0.0, 0.013, 0.5, 0.77, 1.0}) EXPECT_NEAR(barycentric_eval(c, g, x), 3.25, 1e-15);

    const auto v = sample(g, gauss_half);
    for (std::size_t j = 0; j < g.size(); ++j) EXPECT_EQ(barycentric_eval(v, g, g.mapped_nodes[j]), v[j]);

    EXPECT_THROW((void)barycentric_eval(v, g, 1.5), std::domain_error);
    EXPECT_THROW((void)barycentric_eval(v, g, -0.1), std::domain_error);
}

TEST(Barycentric, WeightsClosedForm) {
    const auto w = barycentric_weights(5);
    const std::vector<double> expected{0.5, -1.0, 1.0, -1.0, 1.0, -0.5};
    ASSERT_EQ(w.size(), expected.size());
    for (std::size_t j = 0; j < w.size(); ++j) EXPECT_EQ(w[j], expected[j]);
}

TEST(Barycentric, MatchesChebyshevSum) {
    const auto g = cheb_nodes(20, 0.0, 1.0);
    const auto s = cheb_coeffs(sample(g, gauss_half), 0.0, 1.0);
    std::vector<double> values(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) values[j] = cheb_eval(s, g.mapped_nodes[j]);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double x = u(rng);
        EXPECT_NEAR(barycentric_eval(values, g, x), cheb_eval(s, x), 1e-13);
    }
}

TEST(Barycentric, InterpolatedAntiderivative) {
    const auto g = cheb_nodes(20, 0.0, 1.0);
    const auto b = antiderivative_coeffs(cheb_coeffs(sample(g, gauss_half), 0.0, 1.0));
    std::vector<double> values(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) values[j] = cheb_eval(b, g.mapped_nodes[j]);
    BarycentricPoint p(g);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = i / 999.0;
        p.set(x);
        worst = std::max(worst, std::abs(p(values) - erf_primitive(x)));
    }
    EXPECT_LE(worst, 1e-14);
}
