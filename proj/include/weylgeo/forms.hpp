#pragma once

// 2-forms on a 4-manifold stored as 6-vectors in the ordered index-pair basis
// (12, 13, 14, 23, 24, 34), the Hodge star on 2-forms, and the self-dual /
// anti-self-dual decomposition.

#include <array>

#include "weylgeo/chart.hpp"
#include "weylgeo/linalg.hpp"

namespace weylgeo {

inline constexpr std::array<std::array<int, 2>, 6> kPairBasis = {{
    {0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3},
}};

struct TwoForm {
    std::array<double, 6> c{}; // components beta_{ij} on the ordered pairs

    double& operator[](int I) { return c[static_cast<std::size_t>(I)]; }
    double operator[](int I) const { return c[static_cast<std::size_t>(I)]; }

    Mat4<double> full() const {
        Mat4<double> b = mzero4<double>();
        for (int I = 0; I < 6; ++I) {
            auto [i, j] = kPairBasis[static_cast<std::size_t>(I)];
            b[i][j] = c[static_cast<std::size_t>(I)];
            b[j][i] = -c[static_cast<std::size_t>(I)];
        }
        return b;
    }

    static TwoForm from_full(const Mat4<double>& b) {
        TwoForm f;
        for (int I = 0; I < 6; ++I) {
            auto [i, j] = kPairBasis[static_cast<std::size_t>(I)];
            f.c[static_cast<std::size_t>(I)] = b[i][j];
        }
        return f;
    }

    TwoForm operator+(const TwoForm& o) const {
        TwoForm r;
        for (int I = 0; I < 6; ++I) r.c[I] = c[I] + o.c[I];
        return r;
    }
    TwoForm operator-(const TwoForm& o) const {
        TwoForm r;
        for (int I = 0; I < 6; ++I) r.c[I] = c[I] - o.c[I];
        return r;
    }
    TwoForm operator*(double s) const {
        TwoForm r;
        for (int I = 0; I < 6; ++I) r.c[I] = c[I] * s;
        return r;
    }
};

// <beta, gamma>_g = 1/2 beta_{ij} gamma_{kl} g^{ik} g^{jl}
inline double form_inner(const Mat4<double>& ginv, const TwoForm& b, const TwoForm& g2) {
    Mat4<double> B = b.full(), C = g2.full();
    double s = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l)
                    s += B[i][j] * C[k][l] * ginv[i][k] * ginv[j][l];
    return 0.5 * s;
}

inline double form_norm(const Mat4<double>& ginv, const TwoForm& b) {
    return std::sqrt(std::max(0.0, form_inner(ginv, b, b)));
}

// (beta ^ gamma) evaluated on the coordinate 4-frame, i.e. the coefficient of
// dx1^dx2^dx3^dx4.
inline double wedge22(const TwoForm& b, const TwoForm& g2) {
    return b[0] * g2[5] - b[1] * g2[4] + b[2] * g2[3] +
           b[3] * g2[2] - b[4] * g2[1] + b[5] * g2[0];
}

inline int levi_civita4(int i, int j, int k, int l) {
    int p[4] = {i, j, k, l};
    int sign = 1;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            if (p[a] == p[b]) return 0;
            if (p[a] > p[b]) { std::swap(p[a], p[b]); sign = -sign; }
        }
    return sign;
}

// Hodge star on 2-forms: (star b)_{kl} = 1/2 sqrt(g) eps_{ijkl} b^{ij},
// with eps carrying the chart orientation. Defined so b ^ star c = <b,c> vol.
inline TwoForm hodge_star2(const Mat4<double>& g, const Mat4<double>& ginv,
                           double sqrt_det, double orientation, const TwoForm& b) {
    (void)g;
    Mat4<double> B = b.full();
    Mat4<double> Bup = mzero4<double>(); // b^{ij}
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int a = 0; a < 4; ++a)
                for (int c = 0; c < 4; ++c) Bup[i][j] += ginv[i][a] * ginv[j][c] * B[a][c];
    TwoForm out;
    for (int I = 0; I < 6; ++I) {
        auto [k, l] = kPairBasis[static_cast<std::size_t>(I)];
        double s = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                int eps = levi_civita4(i, j, k, l);
                if (eps) s += eps * Bup[i][j];
            }
        out[I] = 0.5 * orientation * sqrt_det * s;
    }
    return out;
}

// Orthonormal coframe rows e^a_i with g = sum_a e^a (x) e^a, oriented
// positively with respect to the chart orientation.
inline Mat4<double> orthonormal_coframe(const Mat4<double>& g, double orientation) {
    Mat4<double> L;
    if (!cholesky4(g, L)) throw GeometryError("coframe requires an SPD metric");
    // rows of L^T are a coframe: g = (L^T)^T (L^T)
    Mat4<double> C = mzero4<double>();
    for (int a = 0; a < 4; ++a)
        for (int i = 0; i < 4; ++i) C[a][i] = L[i][a];
    double d = det4(C) * orientation;
    if (d < 0)
        for (int i = 0; i < 4; ++i) std::swap(C[2][i], C[3][i]);
    return C;
}

inline TwoForm coframe_wedge(const Mat4<double>& C, int a, int b) {
    TwoForm f;
    for (int I = 0; I < 6; ++I) {
        auto [i, j] = kPairBasis[static_cast<std::size_t>(I)];
        f[I] = C[a][i] * C[b][j] - C[a][j] * C[b][i];
    }
    return f;
}

// Orthonormal basis of the +1 (sign=+1) or -1 (sign=-1) eigenspace of the
// star operator. Each element has unit norm in the induced 2-form metric.
inline std::array<TwoForm, 3> selfdual_basis(const Mat4<double>& g, double orientation,
                                             double sign) {
    Mat4<double> C = orthonormal_coframe(g, orientation);
    const double inv_sqrt2 = 0.7071067811865475244;
    std::array<TwoForm, 3> out;
    out[0] = (coframe_wedge(C, 0, 1) + coframe_wedge(C, 2, 3) * sign) * inv_sqrt2;
    out[1] = (coframe_wedge(C, 0, 2) + coframe_wedge(C, 3, 1) * sign) * inv_sqrt2;
    out[2] = (coframe_wedge(C, 0, 3) + coframe_wedge(C, 1, 2) * sign) * inv_sqrt2;
    return out;
}

} // namespace weylgeo
