#pragma once

// A single coordinate chart on a 4-manifold: coordinate names, periodicity,
// metric / gauge one-form / almost-complex structure component expressions,
// and an orientation sign. All evaluation is generic over the AD scalar.

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "weylgeo/expr.hpp"
#include "weylgeo/linalg.hpp"

namespace weylgeo {

struct CoordSpec {
    std::string name;
    bool periodic = false;
    double period = 0.0;  // when periodic
    double lo = -1.0;     // sampling window (open coordinates)
    double hi = 1.0;
};

struct ChartedManifold4 {
    std::array<CoordSpec, 4> coords;
    std::array<std::array<Expr, 4>, 4> metric;   // symmetric; upper triangle authoritative
    std::array<Expr, 4> alpha;                   // optional gauge one-form components
    bool has_alpha = false;
    std::array<std::array<Expr, 4>, 4> J;        // optional almost-complex structure
    bool has_J = false;
    double orientation = 1.0;                    // sign of the coordinate frame

    VarTable vars() const {
        VarTable t;
        for (const auto& c : coords) t.names.push_back(c.name);
        return t;
    }

    // Wrap periodic coordinates into [0, period).
    Vec4<double> wrap(Vec4<double> p) const {
        for (int i = 0; i < 4; ++i) {
            if (!coords[i].periodic) continue;
            double per = coords[i].period;
            p[i] = std::fmod(p[i], per);
            if (p[i] < 0) p[i] += per;
        }
        return p;
    }

    bool in_domain(const Vec4<double>& p) const {
        for (int i = 0; i < 4; ++i)
            if (!coords[i].periodic && (p[i] < coords[i].lo || p[i] > coords[i].hi))
                return false;
        return true;
    }

    Vec4<double> sample_point(std::mt19937_64& rng) const {
        Vec4<double> p;
        for (int i = 0; i < 4; ++i) {
            double lo = coords[i].periodic ? 0.0 : coords[i].lo;
            double hi = coords[i].periodic ? coords[i].period : coords[i].hi;
            std::uniform_real_distribution<double> d(lo + 0.02 * (hi - lo), hi - 0.02 * (hi - lo));
            p[i] = d(rng);
        }
        return p;
    }
};

using ChartPtr = std::shared_ptr<const ChartedManifold4>;

template <class T>
struct MetricAt {
    Mat4<T> g;
    Mat4<T> ginv;
    T sqrt_det;
};

template <class T>
Mat4<T> metric_components(const ChartedManifold4& M, const Vec4<T>& p) {
    Mat4<T> g;
    std::span<const T> sp(p.data(), 4);
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            const Expr& e = M.metric[i][j].empty() ? M.metric[j][i] : M.metric[i][j];
            T v = e.empty() ? T(0) : e.eval(sp);
            g[i][j] = v;
            g[j][i] = v;
        }
    return g;
}

// Checks positive definiteness on the value part; reports the smallest
// eigenvalue when the check fails.
inline void require_spd(const Mat4<double>& g) {
    Mat4<double> L;
    if (cholesky4(g, L)) return;
    auto ev = symmetric_eigenvalues<4>(g);
    double mn = ev[0];
    for (double e : ev) mn = std::min(mn, e);
    throw GeometryError("metric not positive definite (min eigenvalue " +
                        std::to_string(mn) + ")");
}

template <class T>
Mat4<double> value_part(const Mat4<T>& m) {
    Mat4<double> r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i][j] = value_of(m[i][j]);
    return r;
}

template <class T>
MetricAt<T> metric_at(const ChartedManifold4& M, const Vec4<T>& p) {
    MetricAt<T> out;
    out.g = metric_components(M, p);
    require_spd(value_part(out.g));
    out.ginv = inverse4(out.g);
    out.sqrt_det = sqrt(det4(out.g));
    return out;
}

template <class T>
Mat4<T> J_at(const ChartedManifold4& M, const Vec4<T>& p) {
    if (!M.has_J) throw GeometryError("chart has no almost-complex structure");
    Mat4<T> J;
    std::span<const T> sp(p.data(), 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            J[i][j] = M.J[i][j].empty() ? T(0) : M.J[i][j].eval(sp);
    return J;
}

// Largest defect of J^2 + I and of g(J., J.) - g at a point.
inline double J_compatibility_defect(const Mat4<double>& g, const Mat4<double>& J) {
    double defect = 0.0;
    Mat4<double> JJ = matmul(J, J);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            defect = std::max(defect, std::abs(JJ[i][j] + (i == j ? 1.0 : 0.0)));
    // g(JX, JY) = (J^T g J)_{xy}
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) s += J[a][i] * g[a][b] * J[b][j];
            defect = std::max(defect, std::abs(s - g[i][j]));
        }
    return defect;
}

template <class T>
Vec4<T> alpha_exprs_at(const ChartedManifold4& M, const Vec4<T>& p) {
    Vec4<T> a = vzero4<T>();
    if (!M.has_alpha) return a;
    std::span<const T> sp(p.data(), 4);
    for (int i = 0; i < 4; ++i)
        if (!M.alpha[i].empty()) a[i] = M.alpha[i].eval(sp);
    return a;
}

// Musical isomorphisms.
template <class T>
Vec4<T> sharp(const Mat4<T>& ginv, const Vec4<T>& oneform) {
    return matvec(ginv, oneform);
}
template <class T>
Vec4<T> flat(const Mat4<T>& g, const Vec4<T>& vec) {
    return matvec(g, vec);
}

} // namespace weylgeo
