#pragma once

// Truncated Taylor arithmetic. A Jet<K> holds c[k] = f^(k)(x0) / k! for
// k = 0..K; arithmetic propagates exact derivatives without finite
// differences or nested quotient rules.

#include <array>
#include <cmath>
#include <cstddef>

namespace wkb {

template <std::size_t K>
struct Jet {
    std::array<double, K + 1> c{};

    static constexpr std::size_t order = K;

    [[nodiscard]] static Jet constant(double v) {
        Jet j;
        j.c[0] = v;
        return j;
    }

    /// Build from plain derivatives d[k] = f^(k)(x0).
    template <std::size_t M>
    [[nodiscard]] static Jet from_derivatives(const std::array<double, M>& d) {
        static_assert(M >= K + 1, "not enough derivatives for this jet order");
        Jet j;
        double factorial = 1.0;
        for (std::size_t k = 0; k <= K; ++k) {
            if (k > 0) {
                factorial *= static_cast<double>(k);
            }
            j.c[k] = d[k] / factorial;
        }
        return j;
    }

    [[nodiscard]] double value() const { return c[0]; }

    /// k-th derivative f^(k)(x0).
    [[nodiscard]] double derivative(std::size_t k) const {
        double factorial = 1.0;
        for (std::size_t i = 2; i <= k; ++i) {
            factorial *= static_cast<double>(i);
        }
        return c[k] * factorial;
    }

    Jet& operator+=(const Jet& o) {
        for (std::size_t k = 0; k <= K; ++k) c[k] += o.c[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (std::size_t k = 0; k <= K; ++k) c[k] -= o.c[k];
        return *this;
    }
    Jet& operator*=(double s) {
        for (double& v : c) v *= s;
        return *this;
    }
};

template <std::size_t K>
[[nodiscard]] Jet<K> operator+(Jet<K> a, const Jet<K>& b) { return a += b; }
template <std::size_t K>
[[nodiscard]] Jet<K> operator-(Jet<K> a, const Jet<K>& b) { return a -= b; }
template <std::size_t K>
[[nodiscard]] Jet<K> operator*(Jet<K> a, double s) { return a *= s; }
template <std::size_t K>
[[nodiscard]] Jet<K> operator*(double s, Jet<K> a) { return a *= s; }

template <std::size_t K>
[[nodiscard]] Jet<K> operator*(const Jet<K>& a, const Jet<K>& b) {
    Jet<K> r;
    for (std::size_t k = 0; k <= K; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i <= k; ++i) s += a.c[i] * b.c[k - i];
        r.c[k] = s;
    }
    return r;
}

template <std::size_t K>
[[nodiscard]] Jet<K> operator/(const Jet<K>& a, const Jet<K>& b) {
    Jet<K> r;
    for (std::size_t k = 0; k <= K; ++k) {
        double s = a.c[k];
        for (std::size_t i = 1; i <= k; ++i) s -= b.c[i] * r.c[k - i];
        r.c[k] = s / b.c[0];
    }
    return r;
}

/// f^alpha for f(x0) > 0 (J.C.P. Miller recurrence).
template <std::size_t K>
[[nodiscard]] Jet<K> pow(const Jet<K>& f, double alpha) {
    Jet<K> g;
    g.c[0] = std::pow(f.c[0], alpha);
    for (std::size_t k = 1; k <= K; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) {
            s += ((alpha + 1.0) * static_cast<double>(j) - static_cast<double>(k)) * f.c[j] * g.c[k - j];
        }
        g.c[k] = s / (static_cast<double>(k) * f.c[0]);
    }
    return g;
}

/// Derivative jet, one order lower.
template <std::size_t K>
[[nodiscard]] Jet<K - 1> differentiate(const Jet<K>& f) {
    static_assert(K >= 1);
    Jet<K - 1> d;
    for (std::size_t k = 0; k < K; ++k) d.c[k] = static_cast<double>(k + 1) * f.c[k + 1];
    return d;
}

template <std::size_t M, std::size_t K>
[[nodiscard]] Jet<M> truncate(const Jet<K>& f) {
    static_assert(M <= K);
    Jet<M> r;
    for (std::size_t k = 0; k <= M; ++k) r.c[k] = f.c[k];
    return r;
}

}  // namespace wkb
