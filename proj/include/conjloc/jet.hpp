#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace conjloc {

namespace detail {

constexpr std::size_t jet_index(int i, int j) noexcept {
    const int d = i + j;
    return static_cast<std::size_t>(d * (d + 1) / 2 + (d - i));
}

struct JetProductTerm {
    unsigned char lhs, rhs, out;
};

// All slot pairs whose total degree stays within order 4.
constexpr std::array<JetProductTerm, 70> make_jet_product_table() noexcept {
    std::array<JetProductTerm, 70> table{};
    std::size_t n = 0;
    for (int d1 = 0; d1 <= 4; ++d1)
        for (int i1 = d1; i1 >= 0; --i1)
            for (int d2 = 0; d1 + d2 <= 4; ++d2)
                for (int i2 = d2; i2 >= 0; --i2) {
                    const int j1 = d1 - i1, j2 = d2 - i2;
                    table[n++] = {static_cast<unsigned char>(jet_index(i1, j1)),
                                  static_cast<unsigned char>(jet_index(i2, j2)),
                                  static_cast<unsigned char>(jet_index(i1 + i2, j1 + j2))};
                }
    return table;
}

inline constexpr auto kJetProductTable = make_jet_product_table();

}  // namespace detail

// Truncated bivariate Taylor expansion of total order <= 4.
//
// Slots are ordered by total degree, then by decreasing power of u1:
//   (0,0) | (1,0) (0,1) | (2,0) (1,1) (0,2) | (3,0) ... (0,3) | (4,0) ... (0,4)
// Each slot stores the Taylor coefficient d^(i+j) f / (du1^i du2^j) / (i! j!).
// partial(i, j) converts back to the plain partial derivative.
class Jet2 {
public:
    static constexpr int order = 4;
    static constexpr std::size_t size = 15;

    static constexpr std::size_t index(int i, int j) noexcept { return detail::jet_index(i, j); }

    constexpr Jet2() noexcept = default;
    constexpr explicit Jet2(double value) noexcept { c_[0] = value; }

    static constexpr Jet2 constant(double value) noexcept { return Jet2(value); }

    // g(u_k) for a function of one chart variable, from its Taylor coefficients
    // g^(m)(a) / m! at the expansion point, m = 0..4.
    static constexpr Jet2 univariate(int k, const std::array<double, 5>& taylor) noexcept {
        Jet2 r;
        for (int m = 0; m <= order; ++m) r.c_[k == 0 ? index(m, 0) : index(0, m)] = taylor[m];
        return r;
    }

    // Independent variable u_k (k = 0 or 1) expanded about `value`.
    static constexpr Jet2 variable(double value, int k) noexcept {
        Jet2 r(value);
        r.c_[k == 0 ? index(1, 0) : index(0, 1)] = 1.0;
        return r;
    }

    constexpr double value() const noexcept { return c_[0]; }
    constexpr double coeff(int i, int j) const noexcept { return c_[index(i, j)]; }
    constexpr double& coeff(int i, int j) noexcept { return c_[index(i, j)]; }
    constexpr double operator[](std::size_t k) const noexcept { return c_[k]; }
    constexpr const std::array<double, size>& coefficients() const noexcept { return c_; }

    double partial(int i, int j) const noexcept {
        return c_[index(i, j)] * factorial(i) * factorial(j);
    }

    // d/du_k. The top-degree slots of the result are zero: the derivative of an
    // order-4 jet is only an order-3 jet.
    Jet2 derivative(int k) const noexcept {
        Jet2 r;
        for (int d = 0; d < order; ++d) {
            for (int i = 0; i <= d; ++i) {
                const int j = d - i;
                r.c_[index(i, j)] = k == 0 ? (i + 1) * c_[index(i + 1, j)]
                                           : (j + 1) * c_[index(i, j + 1)];
            }
        }
        return r;
    }

    // f(this) given f and its first four derivatives at value().
    Jet2 compose(const std::array<double, 5>& derivs) const noexcept {
        Jet2 h = *this;
        h.c_[0] = 0.0;
        Jet2 r(derivs[0]);
        Jet2 hk = h;
        double inv_fact = 1.0;
        for (int k = 1; k <= order; ++k) {
            inv_fact /= k;
            r.axpy(derivs[k] * inv_fact, hk);
            if (k < order) hk = hk * h;
        }
        return r;
    }

    Jet2& operator+=(const Jet2& o) noexcept {
        for (std::size_t k = 0; k < size; ++k) c_[k] += o.c_[k];
        return *this;
    }
    Jet2& operator-=(const Jet2& o) noexcept {
        for (std::size_t k = 0; k < size; ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Jet2& operator*=(double s) noexcept {
        for (auto& v : c_) v *= s;
        return *this;
    }
    Jet2& operator+=(double s) noexcept {
        c_[0] += s;
        return *this;
    }

    // this += a * x
    void axpy(double a, const Jet2& x) noexcept {
        for (std::size_t k = 0; k < size; ++k) c_[k] += a * x.c_[k];
    }

    friend Jet2 operator*(const Jet2& a, const Jet2& b) noexcept {
        Jet2 r;
        for (const auto& t : detail::kJetProductTable) r.c_[t.out] += a.c_[t.lhs] * b.c_[t.rhs];
        return r;
    }

    friend Jet2 operator+(Jet2 a, const Jet2& b) noexcept { return a += b; }
    friend Jet2 operator-(Jet2 a, const Jet2& b) noexcept { return a -= b; }
    friend Jet2 operator-(Jet2 a) noexcept { return a *= -1.0; }
    friend Jet2 operator*(Jet2 a, double s) noexcept { return a *= s; }
    friend Jet2 operator*(double s, Jet2 a) noexcept { return a *= s; }
    friend Jet2 operator+(Jet2 a, double s) noexcept { return a += s; }
    friend Jet2 operator+(double s, Jet2 a) noexcept { return a += s; }
    friend Jet2 operator-(Jet2 a, double s) noexcept { return a += -s; }
    friend Jet2 operator-(double s, const Jet2& a) noexcept { return (-a) += s; }
    friend Jet2 operator/(const Jet2& a, const Jet2& b) noexcept { return a * reciprocal(b); }
    friend Jet2 operator/(Jet2 a, double s) noexcept { return a *= 1.0 / s; }

    friend Jet2 reciprocal(const Jet2& a) noexcept {
        const double inv = 1.0 / a.value();
        // f(x) = 1/x: f^(k)(a) = (-1)^k k! / a^(k+1)
        return a.compose({inv, -inv * inv, 2 * inv * inv * inv, -6 * inv * inv * inv * inv,
                          24 * inv * inv * inv * inv * inv});
    }

    friend Jet2 sin(const Jet2& a) noexcept {
        const double s = std::sin(a.value()), c = std::cos(a.value());
        return a.compose({s, c, -s, -c, s});
    }

    friend Jet2 cos(const Jet2& a) noexcept {
        const double s = std::sin(a.value()), c = std::cos(a.value());
        return a.compose({c, -s, -c, s, c});
    }

    friend Jet2 sqrt(const Jet2& a) noexcept {
        const double r = std::sqrt(a.value());
        const double x = a.value();
        return a.compose({r, 0.5 / r, -0.25 / (r * x), 0.375 / (r * x * x),
                          -0.9375 / (r * x * x * x)});
    }

private:
    static constexpr int factorial(int n) noexcept { return n <= 1 ? 1 : n * factorial(n - 1); }

    std::array<double, size> c_{};
};

}  // namespace conjloc
