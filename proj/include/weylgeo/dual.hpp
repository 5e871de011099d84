#pragma once

// Forward-mode automatic differentiation scalars.
//
// HyperDual<T> carries a value, two seeded first-order parts and the mixed
// second-order part: f(x) -> (f, f' x1, f' x2, f' x12 + f'' x1 x2).
// Grad<T> carries a value and a full 4-direction gradient; it is the cheap
// workhorse for Christoffel symbols and field derivatives on charts.
//
// Both nest: Grad<Grad<double>> yields exact second derivatives of anything
// written generically against these types.

#include <array>
#include <cmath>
#include <cstddef>

#include "weylgeo/errors.hpp"

namespace weylgeo {

namespace detail {
inline double value_of(double x) { return x; }
template <class T> struct scalar_rank { static constexpr int value = 0; };
} // namespace detail

template <class T>
struct HyperDual {
    T v{};   // value
    T d1{};  // first seeded direction
    T d2{};  // second seeded direction
    T d12{}; // mixed second-order part

    HyperDual() = default;
    HyperDual(T value) : v(std::move(value)) {}
    HyperDual(T value, T a, T b, T ab)
        : v(std::move(value)), d1(std::move(a)), d2(std::move(b)), d12(std::move(ab)) {}

    HyperDual& operator+=(const HyperDual& o) {
        v = v + o.v; d1 = d1 + o.d1; d2 = d2 + o.d2; d12 = d12 + o.d12;
        return *this;
    }
    HyperDual& operator-=(const HyperDual& o) {
        v = v - o.v; d1 = d1 - o.d1; d2 = d2 - o.d2; d12 = d12 - o.d12;
        return *this;
    }
};

template <class T> HyperDual<T> operator+(HyperDual<T> a, const HyperDual<T>& b) { return a += b; }
template <class T> HyperDual<T> operator-(HyperDual<T> a, const HyperDual<T>& b) { return a -= b; }
template <class T> HyperDual<T> operator-(const HyperDual<T>& a) {
    return {-a.v, -a.d1, -a.d2, -a.d12};
}

template <class T>
HyperDual<T> operator*(const HyperDual<T>& a, const HyperDual<T>& b) {
    return {a.v * b.v,
            a.v * b.d1 + a.d1 * b.v,
            a.v * b.d2 + a.d2 * b.v,
            a.v * b.d12 + a.d1 * b.d2 + a.d2 * b.d1 + a.d12 * b.v};
}

template <class T>
HyperDual<T> operator/(const HyperDual<T>& a, const HyperDual<T>& b) {
    T w = T(1) / b.v;
    T w2 = w * w;
    HyperDual<T> inv{w, -b.d1 * w2, -b.d2 * w2,
                     -b.d12 * w2 + T(2) * b.d1 * b.d2 * w2 * w};
    return a * inv;
}

// Chain rule through a scalar function given f(v), f'(v), f''(v).
template <class T>
HyperDual<T> hd_chain(const HyperDual<T>& x, T f, T df, T ddf) {
    return {f, df * x.d1, df * x.d2, df * x.d12 + ddf * x.d1 * x.d2};
}

// --- Grad: value plus gradient in N fixed directions ------------------------

template <class T, std::size_t N = 4>
struct Grad {
    T v{};
    std::array<T, N> d{};

    Grad() = default;
    Grad(T value) : v(std::move(value)) { d.fill(T(0)); }
    static Grad seeded(T value, std::size_t i) {
        Grad g(std::move(value));
        g.d[i] = T(1);
        return g;
    }

    Grad& operator+=(const Grad& o) {
        v = v + o.v;
        for (std::size_t i = 0; i < N; ++i) d[i] = d[i] + o.d[i];
        return *this;
    }
    Grad& operator-=(const Grad& o) {
        v = v - o.v;
        for (std::size_t i = 0; i < N; ++i) d[i] = d[i] - o.d[i];
        return *this;
    }
};

template <class T, std::size_t N> Grad<T, N> operator+(Grad<T, N> a, const Grad<T, N>& b) { return a += b; }
template <class T, std::size_t N> Grad<T, N> operator-(Grad<T, N> a, const Grad<T, N>& b) { return a -= b; }
template <class T, std::size_t N> Grad<T, N> operator-(const Grad<T, N>& a) {
    Grad<T, N> r;
    r.v = -a.v;
    for (std::size_t i = 0; i < N; ++i) r.d[i] = -a.d[i];
    return r;
}

template <class T, std::size_t N>
Grad<T, N> operator*(const Grad<T, N>& a, const Grad<T, N>& b) {
    Grad<T, N> r;
    r.v = a.v * b.v;
    for (std::size_t i = 0; i < N; ++i) r.d[i] = a.v * b.d[i] + a.d[i] * b.v;
    return r;
}

template <class T, std::size_t N>
Grad<T, N> operator/(const Grad<T, N>& a, const Grad<T, N>& b) {
    Grad<T, N> r;
    T w = T(1) / b.v;
    r.v = a.v * w;
    for (std::size_t i = 0; i < N; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) * w;
    return r;
}

template <class T, std::size_t N>
Grad<T, N> grad_chain(const Grad<T, N>& x, T f, T df) {
    Grad<T, N> r;
    r.v = std::move(f);
    for (std::size_t i = 0; i < N; ++i) r.d[i] = df * x.d[i];
    return r;
}

namespace detail {
template <class T> struct scalar_rank<HyperDual<T>> {
    static constexpr int value = scalar_rank<T>::value + 1;
};
template <class T, std::size_t N> struct scalar_rank<Grad<T, N>> {
    static constexpr int value = scalar_rank<T>::value + 1;
};
template <class T> double value_of(const HyperDual<T>& x) { return value_of(x.v); }
template <class T, std::size_t N> double value_of(const Grad<T, N>& x) { return value_of(x.v); }
} // namespace detail

// The plain double underneath any nesting of AD scalars.
template <class T> double value_of(const T& x) { return detail::value_of(x); }

// --- math functions ----------------------------------------------------------

using std::atan2;
using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;
using std::tan;

template <class T> HyperDual<T> sin(const HyperDual<T>& x) { return hd_chain(x, sin(x.v), cos(x.v), -sin(x.v)); }
template <class T> HyperDual<T> cos(const HyperDual<T>& x) { return hd_chain(x, cos(x.v), -sin(x.v), -cos(x.v)); }
template <class T> HyperDual<T> tan(const HyperDual<T>& x) {
    T t = tan(x.v);
    T s = T(1) + t * t;
    return hd_chain(x, t, s, T(2) * t * s);
}
template <class T> HyperDual<T> exp(const HyperDual<T>& x) {
    T e = exp(x.v);
    return hd_chain(x, e, e, e);
}
template <class T> HyperDual<T> log(const HyperDual<T>& x) {
    T w = T(1) / x.v;
    return hd_chain(x, log(x.v), w, -w * w);
}
template <class T> HyperDual<T> sqrt(const HyperDual<T>& x) {
    T s = sqrt(x.v);
    T ds = T(0.5) / s;
    return hd_chain(x, s, ds, T(-0.25) / (s * x.v));
}
template <class T>
HyperDual<T> atan2(const HyperDual<T>& y, const HyperDual<T>& x) {
    T r2 = x.v * x.v + y.v * y.v;
    T w = T(1) / r2;
    T fx = -y.v * w;           // d/dx
    T fy = x.v * w;            // d/dy
    T w2 = w * w;
    T fxx = T(2) * x.v * y.v * w2;
    T fyy = -fxx;
    T fxy = (y.v * y.v - x.v * x.v) * w2;
    return {atan2(y.v, x.v),
            fy * y.d1 + fx * x.d1,
            fy * y.d2 + fx * x.d2,
            fy * y.d12 + fx * x.d12 + fyy * y.d1 * y.d2 + fxx * x.d1 * x.d2 +
                fxy * (x.d1 * y.d2 + x.d2 * y.d1)};
}

template <class T, std::size_t N> Grad<T, N> sin(const Grad<T, N>& x) { return grad_chain(x, sin(x.v), cos(x.v)); }
template <class T, std::size_t N> Grad<T, N> cos(const Grad<T, N>& x) { return grad_chain(x, cos(x.v), -sin(x.v)); }
template <class T, std::size_t N> Grad<T, N> tan(const Grad<T, N>& x) {
    T t = tan(x.v);
    return grad_chain(x, t, T(1) + t * t);
}
template <class T, std::size_t N> Grad<T, N> exp(const Grad<T, N>& x) {
    T e = exp(x.v);
    return grad_chain(x, e, e);
}
template <class T, std::size_t N> Grad<T, N> log(const Grad<T, N>& x) { return grad_chain(x, log(x.v), T(1) / x.v); }
template <class T, std::size_t N> Grad<T, N> sqrt(const Grad<T, N>& x) {
    T s = sqrt(x.v);
    return grad_chain(x, s, T(0.5) / s);
}
template <class T, std::size_t N>
Grad<T, N> atan2(const Grad<T, N>& y, const Grad<T, N>& x) {
    T w = T(1) / (x.v * x.v + y.v * y.v);
    Grad<T, N> r;
    r.v = atan2(y.v, x.v);
    for (std::size_t i = 0; i < N; ++i) r.d[i] = (x.v * y.d[i] - y.v * x.d[i]) * w;
    return r;
}

// Integer powers by repeated multiplication so negative bases stay legal.
template <class T>
T pow_int(const T& base, long long k) {
    if (k == 0) return T(1);
    bool neg = k < 0;
    unsigned long long n = neg ? static_cast<unsigned long long>(-k) : static_cast<unsigned long long>(k);
    T acc(1);
    T b = base;
    while (n) {
        if (n & 1ull) acc = acc * b;
        b = b * b;
        n >>= 1;
    }
    if (neg) return T(1) / acc;
    return acc;
}

template <class T> HyperDual<T> pow(const HyperDual<T>& x, const HyperDual<T>& y) {
    return exp(y * log(x));
}
template <class T, std::size_t N> Grad<T, N> pow(const Grad<T, N>& x, const Grad<T, N>& y) {
    return exp(y * log(x));
}

} // namespace weylgeo
