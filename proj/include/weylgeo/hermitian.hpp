#pragma once

// Almost-Hermitian analysis on a chart carrying J: Kaehler form, Lee form,
// Nijenhuis tensor, nabla J, and the residuals of the two identities that
// tie them together.

#include "weylgeo/connection.hpp"
#include "weylgeo/forms.hpp"

namespace weylgeo {

// omega(X, Y) = g(JX, Y), i.e. omega_ij = J^k_i g_kj.
template <class T>
Mat4<T> omega_at(const ChartedManifold4& M, const Vec4<T>& p) {
    Mat4<T> g = metric_components(M, p);
    Mat4<T> J = J_at(M, p);
    Mat4<T> w = mzero4<T>();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) w[i][j] = w[i][j] + J[k][i] * g[k][j];
    return w;
}

template <class T>
struct FieldJet {
    Mat4<T> value;
    std::array<Mat4<T>, 4> d; // d[k] = coordinate derivative in direction k
};

template <class T, class Field>
FieldJet<T> field_jet(Field&& f, const Vec4<T>& p) {
    Mat4<Grad<T>> w = f(seed_point(p));
    FieldJet<T> out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            out.value[i][j] = w[i][j].v;
            for (int k = 0; k < 4; ++k) out.d[k][i][j] = w[i][j].d[k];
        }
    return out;
}

// Kaehler form as a 2-form value, with the compatibility defect checked.
inline TwoForm kahler_form(const ChartedManifold4& M, const Vec4<double>& p,
                           double compat_tol = 1e-10) {
    Mat4<double> g = metric_components(M, p);
    Mat4<double> J = J_at(M, p);
    double defect = J_compatibility_defect(g, J);
    if (defect > compat_tol)
        throw GeometryError("incompatible almost-complex structure (defect " +
                            std::to_string(defect) + ")");
    return TwoForm::from_full(omega_at(M, Vec4<double>{p[0], p[1], p[2], p[3]}));
}

// Lee form theta = J(delta_g omega) = -(delta_g omega) o J, the unique
// one-form with theta ^ omega = d omega in dimension four.
template <class T>
Vec4<T> lee_form_at(const ChartedManifold4& M, const Vec4<T>& p) {
    Christoffels<T> G = christoffels_lc(M, p);
    FieldJet<T> wj = field_jet([&M](const auto& x) { return omega_at(M, x); }, p);
    Mat4<T> g = metric_components(M, p);
    Mat4<T> ginv = inverse4(g);
    Mat4<T> J = J_at(M, p);

    // (nabla_i omega)_{jk} = d_i omega_{jk} - G^m_{ij} omega_{mk} - G^m_{ik} omega_{jm}
    auto nabla_w = [&](int i, int j, int k) {
        T s = wj.d[i][j][k];
        for (int m = 0; m < 4; ++m)
            s = s - G.G[m][i][j] * wj.value[m][k] - G.G[m][i][k] * wj.value[j][m];
        return s;
    };
    Vec4<T> delta = vzero4<T>(); // (delta omega)_k = -g^{ij} (nabla_i omega)_{jk}
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) delta[k] = delta[k] - ginv[i][j] * nabla_w(i, j, k);
    Vec4<T> theta = vzero4<T>();
    for (int k = 0; k < 4; ++k)
        for (int m = 0; m < 4; ++m) theta[k] = theta[k] - J[m][k] * delta[m];
    return theta;
}

// d omega as a 3-tensor evaluated on constant frame triples.
template <class T>
T dform3(const FieldJet<T>& wj, const Vec4<T>& X, const Vec4<T>& Y, const Vec4<T>& Z) {
    T s(0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                s = s + X[i] * Y[j] * Z[k] * (wj.d[i][j][k] - wj.d[j][i][k] + wj.d[k][i][j]);
    return s;
}

// (theta ^ omega)(X, Y, Z)
template <class T>
T wedge12(const Vec4<T>& th, const Mat4<T>& w, const Vec4<T>& X, const Vec4<T>& Y,
          const Vec4<T>& Z) {
    auto thv = [&](const Vec4<T>& V) {
        T s(0);
        for (int i = 0; i < 4; ++i) s = s + th[i] * V[i];
        return s;
    };
    auto wv = [&](const Vec4<T>& A, const Vec4<T>& B) {
        T s(0);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) s = s + w[i][j] * A[i] * B[j];
        return s;
    };
    return thv(X) * wv(Y, Z) - thv(Y) * wv(X, Z) + thv(Z) * wv(X, Y);
}

// Nijenhuis tensor with constant-extension arguments; depends on J and dJ only.
inline Vec4<double> nijenhuis(const ChartedManifold4& M, const Vec4<double>& p,
                              const Vec4<double>& X, const Vec4<double>& Y) {
    FieldJet<double> Jj = field_jet([&M](const auto& x) { return J_at(M, x); }, p);
    const Mat4<double>& J = Jj.value;
    Vec4<double> JX = matvec(J, X), JY = matvec(J, Y);
    Vec4<double> N = vzero4<double>();
    for (int m = 0; m < 4; ++m) {
        double s = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                for (int k = 0; k < 4; ++k)
                    s += J[m][k] * (X[i] * Jj.d[i][k][j] * Y[j] - Y[i] * Jj.d[i][k][j] * X[j]);
                s += -JX[i] * Jj.d[i][m][j] * Y[j] + JY[i] * Jj.d[i][m][j] * X[j];
            }
        N[m] = s;
    }
    return N;
}

// (nabla_Z J) for an arbitrary connection.
inline Mat4<double> nabla_J(const ChartedManifold4& M, const Christoffels<double>& G,
                            const Vec4<double>& p, const Vec4<double>& Z) {
    FieldJet<double> Jj = field_jet([&M](const auto& x) { return J_at(M, x); }, p);
    Mat4<double> r = mzero4<double>();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0;
            for (int k = 0; k < 4; ++k) {
                s += Z[k] * Jj.d[k][i][j];
                for (int m = 0; m < 4; ++m)
                    s += Z[k] * (G.G[i][k][m] * Jj.value[m][j] - G.G[m][k][j] * Jj.value[i][m]);
            }
            r[i][j] = s;
        }
    return r;
}

// <N(X,Y), JZ> - [ dw(X,Y,Z) - dw(JX,JY,Z) - 2 <(nabla^g_Z J) X, Y> ]
inline double identity_dwJN_residual(const ChartedManifold4& M, const Vec4<double>& p,
                                     const Vec4<double>& X, const Vec4<double>& Y,
                                     const Vec4<double>& Z) {
    Mat4<double> g = metric_components(M, p);
    Mat4<double> J = J_at(M, p);
    Christoffels<double> G = christoffels_lc(M, p);
    FieldJet<double> wj = field_jet([&M](const auto& x) { return omega_at(M, x); }, p);
    Vec4<double> N = nijenhuis(M, p, X, Y);
    Vec4<double> JX = matvec(J, X), JY = matvec(J, Y), JZ = matvec(J, Z);
    Mat4<double> nJ = nabla_J(M, G, p, Z);
    double lhs = inner(g, N, JZ);
    double rhs = dform3(wj, X, Y, Z) - dform3(wj, JX, JY, Z) - 2.0 * inner(g, matvec(nJ, X), Y);
    return lhs - rhs;
}

} // namespace weylgeo
