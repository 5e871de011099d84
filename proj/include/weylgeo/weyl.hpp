#pragma once

// Weyl structures in a fixed gauge: a metric representative plus a one-form.
// The one-form is user-supplied expressions, zero, or derived from J via the
// Lee form; gauge transforms accumulate an exact shift alpha -> alpha - du
// while the metric representative picks up e^{2u}.

#include "weylgeo/hermitian.hpp"

namespace weylgeo {

enum class AlphaKind { Zero, Exprs, Canonical };

struct WeylStructure {
    ChartPtr chart;                       // current metric representative
    AlphaKind kind = AlphaKind::Zero;
    std::array<Expr, 4> alpha_exprs;      // AlphaKind::Exprs
    ChartPtr canonical_source;            // AlphaKind::Canonical: chart carrying (g, J)
    Expr gauge_shift;                     // accumulated u with alpha -> alpha - du
    bool has_shift = false;

    static WeylStructure levi_civita(ChartPtr c) {
        WeylStructure w;
        w.chart = std::move(c);
        w.kind = AlphaKind::Zero;
        return w;
    }
    static WeylStructure from_exprs(ChartPtr c, std::array<Expr, 4> a) {
        WeylStructure w;
        w.chart = std::move(c);
        w.kind = AlphaKind::Exprs;
        w.alpha_exprs = std::move(a);
        return w;
    }
    static WeylStructure canonical(ChartPtr c) {
        if (!c->has_J) throw GeometryError("canonical Weyl structure requires J");
        WeylStructure w;
        w.chart = c;
        w.kind = AlphaKind::Canonical;
        w.canonical_source = std::move(c);
        return w;
    }
};

template <class T>
Vec4<T> alpha_at(const WeylStructure& W, const Vec4<T>& p) {
    Vec4<T> a = vzero4<T>();
    switch (W.kind) {
    case AlphaKind::Zero: break;
    case AlphaKind::Exprs: {
        std::span<const T> sp(p.data(), 4);
        for (int i = 0; i < 4; ++i)
            if (!W.alpha_exprs[i].empty()) a[i] = W.alpha_exprs[i].eval(sp);
        break;
    }
    case AlphaKind::Canonical: {
        Vec4<T> theta = lee_form_at(*W.canonical_source, p);
        for (int i = 0; i < 4; ++i) a[i] = T(-0.5) * theta[i];
        break;
    }
    }
    if (W.has_shift) {
        Vec4<Grad<T>> ps = seed_point(p);
        Grad<T> u = W.gauge_shift.eval(std::span<const Grad<T>>(ps.data(), 4));
        for (int i = 0; i < 4; ++i) a[i] = a[i] - u.d[i];
    }
    return a;
}

// Gamma^D = Gamma^LC + alpha_i delta^k_j + alpha_j delta^k_i - g_ij alpha^k
template <class T>
Christoffels<T> christoffels_weyl(const WeylStructure& W, const Vec4<T>& p) {
    Christoffels<T> G = christoffels_lc(*W.chart, p);
    if (W.kind == AlphaKind::Zero && !W.has_shift) return G;
    Vec4<T> a = alpha_at(W, p);
    Mat4<T> g = metric_components(*W.chart, p);
    Vec4<T> asharp = matvec(inverse4(g), a);
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                T s = G.G[k][i][j];
                if (k == j) s = s + a[i];
                if (k == i) s = s + a[j];
                s = s - g[i][j] * asharp[k];
                G.G[k][i][j] = s;
            }
    return G;
}

// Componentwise maximum of (nabla^D g + 2 alpha (x) g) at p.
inline double metricity_defect(const WeylStructure& W, const Vec4<double>& p) {
    FieldJet<double> gj =
        field_jet([&W](const auto& x) { return metric_components(*W.chart, x); }, p);
    Christoffels<double> G = christoffels_weyl(W, p);
    Vec4<double> a = alpha_at(W, p);
    double worst = 0;
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double s = gj.d[k][i][j] + 2.0 * a[k] * gj.value[i][j];
                for (int m = 0; m < 4; ++m)
                    s -= G.G[m][k][i] * gj.value[m][j] + G.G[m][k][j] * gj.value[i][m];
                worst = std::max(worst, std::abs(s));
            }
    return worst;
}

// (e^{2u} g, alpha - du); J and coordinates are untouched.
inline WeylStructure gauge_transform(const WeylStructure& W, const Expr& u) {
    auto nc = std::make_shared<ChartedManifold4>(*W.chart);
    Expr factor = expr_call(Func::Exp, expr_mul(expr_num(2.0), u));
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            const Expr& e = nc->metric[i][j].empty() ? nc->metric[j][i] : nc->metric[i][j];
            if (!e.empty()) {
                Expr scaled = expr_mul(factor, e);
                if (j != i) nc->metric[j][i] = Expr();
                nc->metric[i][j] = scaled;
            }
        }
    WeylStructure out = W;
    out.chart = nc;
    if (out.has_shift)
        out.gauge_shift = expr_add(out.gauge_shift, u);
    else {
        out.gauge_shift = u;
        out.has_shift = true;
    }
    return out;
}

inline Riemann<double> riemann_lc(const ChartedManifold4& M, const Vec4<double>& p) {
    return riemann_of([&M](const auto& x) { return christoffels_lc(M, x); }, p);
}

inline Riemann<double> riemann_weyl(const WeylStructure& W, const Vec4<double>& p) {
    return riemann_of([&W](const auto& x) { return christoffels_weyl(W, x); }, p);
}

inline double max_abs_riemann(const Riemann<double>& R) {
    double m = 0;
    for (int l = 0; l < 4; ++l)
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) m = std::max(m, std::abs(R.R[l][k][i][j]));
    return m;
}

// Sectional curvature of the plane spanned by X, Y.
inline double sectional_curvature(const ChartedManifold4& M, const Vec4<double>& p,
                                  const Vec4<double>& X, const Vec4<double>& Y) {
    Mat4<double> g = metric_components(M, p);
    Riemann<double> R = riemann_lc(M, p);
    Vec4<double> RXYY = vzero4<double>();
    for (int l = 0; l < 4; ++l)
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    RXYY[l] += R.R[l][k][i][j] * Y[k] * X[i] * Y[j];
    double num = inner(g, RXYY, X);
    double den = inner(g, X, X) * inner(g, Y, Y) - inner(g, X, Y) * inner(g, X, Y);
    return num / den;
}

// Residual of  c(N(X,Y), JZ) + 2 c((nabla^D_Z J) X, Y)  for the canonical
// Weyl connection of the chart.
inline double identity_weylJN_residual(const WeylStructure& W, const Vec4<double>& p,
                                       const Vec4<double>& X, const Vec4<double>& Y,
                                       const Vec4<double>& Z) {
    const ChartedManifold4& M = *W.chart;
    Mat4<double> g = metric_components(M, p);
    Mat4<double> J = J_at(M, p);
    Christoffels<double> GD = christoffels_weyl(W, p);
    Vec4<double> N = nijenhuis(M, p, X, Y);
    Mat4<double> nJ = nabla_J(M, GD, p, Z);
    return inner(g, N, matvec(J, Z)) + 2.0 * inner(g, matvec(nJ, X), Y);
}

// Gauge-fixed residual of d^D omega_c: the 3-form 2 alpha ^ omega + d omega,
// evaluated on coordinate triples; zero for the canonical structure.
inline double ddw_residual(const WeylStructure& W, const Vec4<double>& p) {
    const ChartedManifold4& M = *W.chart;
    FieldJet<double> wj = field_jet([&M](const auto& x) { return omega_at(M, x); }, p);
    Vec4<double> a = alpha_at(W, p);
    double worst = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            for (int k = j + 1; k < 4; ++k) {
                Vec4<double> X = vzero4<double>(), Y = vzero4<double>(), Z = vzero4<double>();
                X[i] = 1; Y[j] = 1; Z[k] = 1;
                double tw = 2.0 * wedge12(a, wj.value, X, Y, Z) + dform3(wj, X, Y, Z);
                worst = std::max(worst, std::abs(tw));
            }
    return worst;
}

} // namespace weylgeo
