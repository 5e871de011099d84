#pragma once

// Fixed-size linear algebra over generic scalars (double or AD types).
// 4x4 is all chart geometry needs; a small symmetric Jacobi eigensolver
// covers SPD diagnostics and test oracles.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

#include "weylgeo/dual.hpp"
#include "weylgeo/errors.hpp"

namespace weylgeo {

template <class T> using Vec4 = std::array<T, 4>;
template <class T> using Mat4 = std::array<std::array<T, 4>, 4>;
using CVec4 = std::array<std::complex<double>, 4>;

template <class T>
Vec4<T> vzero4() { return {T(0), T(0), T(0), T(0)}; }

template <class T>
Mat4<T> mzero4() {
    Mat4<T> m;
    for (auto& row : m) row.fill(T(0));
    return m;
}

template <class T>
Mat4<T> midentity4() {
    Mat4<T> m = mzero4<T>();
    for (int i = 0; i < 4; ++i) m[i][i] = T(1);
    return m;
}

template <class T>
Vec4<T> matvec(const Mat4<T>& m, const Vec4<T>& x) {
    Vec4<T> r = vzero4<T>();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i] = r[i] + m[i][j] * x[j];
    return r;
}

inline CVec4 matvec(const Mat4<double>& m, const CVec4& x) {
    CVec4 r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i] += m[i][j] * x[j];
    return r;
}

template <class T>
Mat4<T> matmul(const Mat4<T>& a, const Mat4<T>& b) {
    Mat4<T> r = mzero4<T>();
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j < 4; ++j) r[i][j] = r[i][j] + a[i][k] * b[k][j];
    return r;
}

template <class T>
T inner(const Mat4<T>& g, const Vec4<T>& x, const Vec4<T>& y) {
    T s(0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s = s + g[i][j] * x[i] * y[j];
    return s;
}

inline std::complex<double> inner_c(const Mat4<double>& g, const CVec4& x, const CVec4& y) {
    std::complex<double> s{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s += g[i][j] * x[i] * y[j];
    return s;
}

// Hermitian pairing h(x, y) = g(x, conj(y)).
inline std::complex<double> inner_h(const Mat4<double>& g, const CVec4& x, const CVec4& y) {
    std::complex<double> s{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s += g[i][j] * x[i] * std::conj(y[j]);
    return s;
}

// Gaussian elimination with partial pivoting on the value part.
template <class T>
Mat4<T> inverse4(const Mat4<T>& a) {
    Mat4<T> m = a;
    Mat4<T> inv = midentity4<T>();
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        double best = std::abs(value_of(m[col][col]));
        for (int r = col + 1; r < 4; ++r) {
            double cand = std::abs(value_of(m[r][col]));
            if (cand > best) { best = cand; piv = r; }
        }
        if (best == 0.0) throw GeometryError("singular 4x4 matrix");
        if (piv != col) { std::swap(m[piv], m[col]); std::swap(inv[piv], inv[col]); }
        T w = T(1) / m[col][col];
        for (int j = 0; j < 4; ++j) { m[col][j] = m[col][j] * w; inv[col][j] = inv[col][j] * w; }
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            T f = m[r][col];
            for (int j = 0; j < 4; ++j) {
                m[r][j] = m[r][j] - f * m[col][j];
                inv[r][j] = inv[r][j] - f * inv[col][j];
            }
        }
    }
    return inv;
}

template <class T>
T det4(const Mat4<T>& m) {
    // expansion via LU-free cofactors on 2x2 minors
    auto minor2 = [&m](int r0, int r1, int c0, int c1) {
        return m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    };
    T d(0);
    d = d + minor2(0, 1, 0, 1) * minor2(2, 3, 2, 3);
    d = d - minor2(0, 1, 0, 2) * minor2(2, 3, 1, 3);
    d = d + minor2(0, 1, 0, 3) * minor2(2, 3, 1, 2);
    d = d + minor2(0, 1, 1, 2) * minor2(2, 3, 0, 3);
    d = d - minor2(0, 1, 1, 3) * minor2(2, 3, 0, 2);
    d = d + minor2(0, 1, 2, 3) * minor2(2, 3, 0, 1);
    return d;
}

// Cholesky of a symmetric matrix; returns false if not positive definite.
// L is lower triangular with g = L L^T.
inline bool cholesky4(const Mat4<double>& g, Mat4<double>& L) {
    L = mzero4<double>();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = g[i][j];
            for (int k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
            if (i == j) {
                if (s <= 0.0) return false;
                L[i][i] = std::sqrt(s);
            } else {
                L[i][j] = s / L[j][j];
            }
        }
    }
    return true;
}

// Jacobi eigenvalues of a symmetric NxN matrix (tests and SPD diagnostics).
template <std::size_t N>
std::array<double, N> symmetric_eigenvalues(std::array<std::array<double, N>, N> a) {
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = p + 1; q < N; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-28) break;
        for (std::size_t p = 0; p < N; ++p) {
            for (std::size_t q = p + 1; q < N; ++q) {
                if (a[p][q] == 0.0) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < N; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < N; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::array<double, N> ev;
    for (std::size_t i = 0; i < N; ++i) ev[i] = a[i][i];
    return ev;
}

inline double norm(const Vec4<double>& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
}

inline double norm_g(const Mat4<double>& g, const Vec4<double>& v) {
    return std::sqrt(std::max(0.0, inner(g, v, v)));
}

inline double norm_c(const CVec4& v) {
    double s = 0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

} // namespace weylgeo
