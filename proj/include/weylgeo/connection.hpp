#pragma once

// Christoffel symbols from chart data via forward-mode AD, curvature of an
// arbitrary connection-coefficient field, and transport utilities.

#include <functional>

#include "weylgeo/chart.hpp"

namespace weylgeo {

// Connection coefficients at a point: G[k][i][j] = Gamma^k_{ij} with i the
// direction slot. Levi-Civita and Weyl connections are symmetric in (i, j);
// the J-compatible connection used for Chern integration is not.
template <class T>
struct Christoffels {
    std::array<Mat4<T>, 4> G; // G[k][i][j]
};

template <class T>
Grad<T> seed_grad(const T& v, int dir) {
    return Grad<T>::seeded(v, static_cast<std::size_t>(dir));
}

template <class T>
Vec4<Grad<T>> seed_point(const Vec4<T>& p) {
    return {Grad<T>::seeded(p[0], 0), Grad<T>::seeded(p[1], 1),
            Grad<T>::seeded(p[2], 2), Grad<T>::seeded(p[3], 3)};
}

// Levi-Civita Christoffel symbols at p. Metric first derivatives come from a
// single gradient-mode evaluation of each component.
template <class T>
Christoffels<T> christoffels_lc(const ChartedManifold4& M, const Vec4<T>& p) {
    Vec4<Grad<T>> ps = seed_point(p);
    Mat4<Grad<T>> gj = metric_components(M, ps);
    Mat4<T> g, dg[4];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            g[i][j] = gj[i][j].v;
            for (int k = 0; k < 4; ++k) dg[k][i][j] = gj[i][j].d[k];
        }
    require_spd(value_part(g));
    Mat4<T> ginv = inverse4(g);
    Christoffels<T> out;
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                T s(0);
                for (int l = 0; l < 4; ++l)
                    s = s + ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                out.G[k][i][j] = T(0.5) * s;
            }
    return out;
}

// Curvature tensor R^l_{kij} of a connection-coefficient field:
//   R(e_i, e_j) e_k = R^l_{kij} e_l
//   R^l_{kij} = d_i G^l_{jk} - d_j G^l_{ik} + G^l_{im} G^m_{jk} - G^l_{jm} G^m_{ik}
template <class T>
struct Riemann {
    std::array<std::array<Mat4<T>, 4>, 4> R; // R[l][k][i][j]
};

// GammaField: callable Vec4<S> -> Christoffels<S> for S in {T, Grad<T>}.
template <class T, class GammaField>
Riemann<T> riemann_of(GammaField&& gamma, const Vec4<T>& p) {
    Christoffels<Grad<T>> Gj = gamma(seed_point(p));
    T G[4][4][4];
    T dG[4][4][4][4]; // dG[d][k][i][j] = d_d Gamma^k_{ij}
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                G[k][i][j] = Gj.G[k][i][j].v;
                for (int d = 0; d < 4; ++d) dG[d][k][i][j] = Gj.G[k][i][j].d[d];
            }
    Riemann<T> out;
    for (int l = 0; l < 4; ++l)
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    T s = dG[i][l][j][k] - dG[j][l][i][k];
                    for (int m = 0; m < 4; ++m)
                        s = s + G[l][i][m] * G[m][j][k] - G[l][j][m] * G[m][i][k];
                    out.R[l][k][i][j] = s;
                }
    return out;
}

// R(X, Y) as an endomorphism: (F)^l_k = R^l_{kij} X^i Y^j.
template <class T>
Mat4<T> curvature_endo(const Riemann<T>& R, const Vec4<T>& X, const Vec4<T>& Y) {
    Mat4<T> F = mzero4<T>();
    for (int l = 0; l < 4; ++l)
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    F[l][k] = F[l][k] + R.R[l][k][i][j] * X[i] * Y[j];
    return F;
}

// Directional covariant derivative of a vector field along a map:
// dV is the plain directional derivative of the components.
template <class T>
Vec4<T> covariant_dir(const Christoffels<T>& G, const Vec4<T>& X, const Vec4<T>& V,
                      const Vec4<T>& dV) {
    Vec4<T> r = dV;
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r[k] = r[k] + G.G[k][i][j] * X[i] * V[j];
    return r;
}

inline CVec4 covariant_dir_c(const Christoffels<double>& G, const CVec4& X, const CVec4& V,
                             const CVec4& dV) {
    CVec4 r = dV;
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r[k] += G.G[k][i][j] * X[i] * V[j];
    return r;
}

// RK4 integration of parallel transport dV/dt = -Gamma(c')(V) along a curve.
// `gamma_at` yields Christoffels at a chart point, `curve` and `velocity`
// parametrize the path.
inline Vec4<double> parallel_transport(
    const std::function<Christoffels<double>(const Vec4<double>&)>& gamma_at,
    const std::function<Vec4<double>(double)>& curve,
    const std::function<Vec4<double>(double)>& velocity, Vec4<double> V, double t0,
    double t1, int steps) {
    auto rhs = [&](double t, const Vec4<double>& v) {
        Christoffels<double> G = gamma_at(curve(t));
        Vec4<double> X = velocity(t);
        Vec4<double> r = vzero4<double>();
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) r[k] -= G.G[k][i][j] * X[i] * v[j];
        return r;
    };
    double h = (t1 - t0) / steps;
    double t = t0;
    for (int s = 0; s < steps; ++s) {
        auto add = [](const Vec4<double>& a, const Vec4<double>& b, double f) {
            Vec4<double> r;
            for (int i = 0; i < 4; ++i) r[i] = a[i] + f * b[i];
            return r;
        };
        Vec4<double> k1 = rhs(t, V);
        Vec4<double> k2 = rhs(t + h / 2, add(V, k1, h / 2));
        Vec4<double> k3 = rhs(t + h / 2, add(V, k2, h / 2));
        Vec4<double> k4 = rhs(t + h, add(V, k3, h));
        for (int i = 0; i < 4; ++i)
            V[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        t += h;
    }
    return V;
}

// RK4 geodesic integration x'' + Gamma(x', x') = 0; returns (x, x').
inline std::pair<Vec4<double>, Vec4<double>> integrate_geodesic(
    const std::function<Christoffels<double>(const Vec4<double>&)>& gamma_at,
    Vec4<double> x, Vec4<double> v, double t1, int steps) {
    struct State { Vec4<double> x, v; };
    auto rhs = [&](const State& s) {
        Christoffels<double> G = gamma_at(s.x);
        State d;
        d.x = s.v;
        d.v = vzero4<double>();
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) d.v[k] -= G.G[k][i][j] * s.v[i] * s.v[j];
        return d;
    };
    auto add = [](const State& a, const State& b, double f) {
        State r;
        for (int i = 0; i < 4; ++i) {
            r.x[i] = a.x[i] + f * b.x[i];
            r.v[i] = a.v[i] + f * b.v[i];
        }
        return r;
    };
    State s{x, v};
    double h = t1 / steps;
    for (int it = 0; it < steps; ++it) {
        State k1 = rhs(s);
        State k2 = rhs(add(s, k1, h / 2));
        State k3 = rhs(add(s, k2, h / 2));
        State k4 = rhs(add(s, k3, h));
        for (int i = 0; i < 4; ++i) {
            s.x[i] += h / 6 * (k1.x[i] + 2 * k2.x[i] + 2 * k3.x[i] + k4.x[i]);
            s.v[i] += h / 6 * (k1.v[i] + 2 * k2.v[i] + 2 * k3.v[i] + k4.v[i]);
        }
    }
    return {s.x, s.v};
}

} // namespace weylgeo
