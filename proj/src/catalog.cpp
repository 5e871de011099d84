#include "weylgeo/catalog.hpp"

#include <cmath>
#include <cstdio>

namespace weylgeo {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEtaMargin = 0.05;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Expr pc(const std::string& s, const VarTable& vars) { return parse(s, vars); }

ChartPtr make_chart(std::array<CoordSpec, 4> coords,
                    const std::array<std::array<std::string, 4>, 4>& gsrc,
                    const std::array<std::array<std::string, 4>, 4>* Jsrc,
                    double orientation) {
    auto c = std::make_shared<ChartedManifold4>();
    c->coords = std::move(coords);
    VarTable vars = c->vars();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (!gsrc[i][j].empty()) c->metric[i][j] = pc(gsrc[i][j], vars);
    if (Jsrc) {
        c->has_J = true;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (!(*Jsrc)[i][j].empty()) c->J[i][j] = pc((*Jsrc)[i][j], vars);
    }
    c->orientation = orientation;
    return c;
}

const VarTable kUV{{"u", "v"}};

std::array<Expr, 4> surf(const std::string& a, const std::string& b, const std::string& c,
                         const std::string& d) {
    return {pc(a, kUV), pc(b, kUV), pc(c, kUV), pc(d, kUV)};
}

// 4x4 matrices of optional expressions, for building perturbed J fields.
using EMat = std::array<std::array<Expr, 4>, 4>;

EMat emat_mul(const EMat& A, const EMat& B) {
    EMat R;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Expr acc;
            for (int k = 0; k < 4; ++k) {
                if (A[i][k].empty() || B[k][j].empty()) continue;
                Expr term = expr_mul(A[i][k], B[k][j]);
                acc = acc.empty() ? term : expr_add(acc, term);
            }
            R[i][j] = acc;
        }
    return R;
}

EMat emat_transpose(const EMat& A) {
    EMat R;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) R[i][j] = A[j][i];
    return R;
}

} // namespace

CatalogEntry flat_kahler() {
    std::array<CoordSpec, 4> coords;
    const char* names[4] = {"x1", "x2", "x3", "x4"};
    for (int i = 0; i < 4; ++i) coords[i] = {names[i], true, 2 * kPi, 0, 2 * kPi};
    std::array<std::array<std::string, 4>, 4> g{};
    for (int i = 0; i < 4; ++i) g[i][i] = "1";
    std::array<std::array<std::string, 4>, 4> J{};
    J[1][0] = "1";
    J[0][1] = "-1";
    J[3][2] = "1";
    J[2][3] = "-1";

    CatalogEntry e;
    e.name = "flat_kahler";
    e.chart = make_chart(coords, g, &J, +1.0);
    e.hermitian = true;

    CatalogSurface lag;
    lag.name = "lagrangian_torus";
    lag.components = surf("u", "0", "v", "0");
    lag.domain = {64, 64, 0, 0, 2 * kPi, 2 * kPi, true, true};
    lag.ann = {true, true, false, true, true};
    e.surfaces.push_back(lag);

    CatalogSurface graph;
    graph.name = "complex_points_graph";
    graph.components = surf("u", "v", "0.05*(2 - cos(u) - cos(v))", "0");
    graph.domain = {64, 64, 0, 0, 2 * kPi, 2 * kPi, true, true};
    graph.ann = {false, false, false, false, false};
    e.surfaces.push_back(graph);

    CatalogSurface diag;
    diag.name = "diagonal_holomorphic";
    diag.components = surf("u", "v", "u", "v");
    diag.domain = {64, 64, 0, 0, 2 * kPi, 2 * kPi, true, true};
    diag.ann = {true, true, true, false, true};
    e.surfaces.push_back(diag);
    return e;
}

CatalogEntry hopf_surface() {
    // Product of a circle with a radius-2 round 3-sphere in torus coordinates.
    // The sphere radius normalizes the Lee form of the standard Hermitian
    // structure to exactly d phi (the fiber pairs with the circle direction).
    std::array<CoordSpec, 4> coords = {{
        {"phi", true, 2 * kPi, 0, 2 * kPi},
        {"eta", false, 0, kEtaMargin, kPi / 2 - kEtaMargin},
        {"xi1", true, 2 * kPi, 0, 2 * kPi},
        {"xi2", true, 2 * kPi, 0, 2 * kPi},
    }};
    std::array<std::array<std::string, 4>, 4> g{};
    g[0][0] = "1";
    g[1][1] = "4";
    g[2][2] = "4*pow(cos(eta),2)";
    g[3][3] = "4*pow(sin(eta),2)";
    std::array<std::array<std::string, 4>, 4> J{};
    J[2][0] = "0.5";
    J[3][0] = "0.5";
    J[2][1] = "sin(eta)/cos(eta)";
    J[3][1] = "-cos(eta)/sin(eta)";
    J[0][2] = "-2*pow(cos(eta),2)";
    J[1][2] = "-cos(eta)*sin(eta)";
    J[0][3] = "-2*pow(sin(eta),2)";
    J[1][3] = "cos(eta)*sin(eta)";

    CatalogEntry e;
    e.name = "hopf_surface";
    e.chart = make_chart(coords, g, &J, +1.0);
    e.hermitian = true;

    // phi runs at double speed so the parametrizations below are conformal.
    CatalogSurface fiber;
    fiber.name = "fiber_torus";
    fiber.components = surf("2*u", "0.7", "v", "v");
    fiber.domain = {64, 64, 0, 0, kPi, 2 * kPi, true, true};
    fiber.ann = {true, true, true, false, true};
    e.surfaces.push_back(fiber);

    CatalogSurface cliff;
    cliff.name = "clifford_torus";
    cliff.components = surf("2*u", fmt(kPi / 4), "v", "-v");
    cliff.domain = {64, 64, 0, 0, kPi, 2 * kPi, true, true};
    cliff.ann = {true, true, false, true, true};
    e.surfaces.push_back(cliff);

    // Isothermal annulus on a great 2-sphere at fixed phi: eta follows the
    // Gudermannian of u so |f_u| = |f_v| pointwise.
    CatalogSurface sphere;
    sphere.name = "great_sphere";
    sphere.components = surf("1", "atan2((exp(u)-exp(-u))/2, 1)", "v", "0");
    sphere.domain = {64, 64, 0.2, 0, 2.8, 2 * kPi, false, true};
    sphere.ann = {false, true, false, false, true};
    e.surfaces.push_back(sphere);
    return e;
}

CatalogEntry hopf_cover() {
    std::array<CoordSpec, 4> coords = {{
        {"r", false, 0, 0.5, 2.0},
        {"eta", false, 0, kEtaMargin, kPi / 2 - kEtaMargin},
        {"xi1", true, 2 * kPi, 0, 2 * kPi},
        {"xi2", true, 2 * kPi, 0, 2 * kPi},
    }};
    std::array<std::array<std::string, 4>, 4> g{};
    g[0][0] = "1";
    g[1][1] = "pow(r,2)";
    g[2][2] = "pow(r,2)*pow(cos(eta),2)";
    g[3][3] = "pow(r,2)*pow(sin(eta),2)";

    CatalogEntry e;
    e.name = "hopf_cover";
    e.chart = make_chart(coords, g, nullptr, +1.0);

    // Same flat metric in the exponential coordinate phi = log r.
    std::array<CoordSpec, 4> lcoords = coords;
    lcoords[0] = {"phi", false, 0, std::log(0.5), std::log(2.0)};
    std::array<std::array<std::string, 4>, 4> lg{};
    lg[0][0] = "exp(2*phi)";
    lg[1][1] = "exp(2*phi)";
    lg[2][2] = "exp(2*phi)*pow(cos(eta),2)";
    lg[3][3] = "exp(2*phi)*pow(sin(eta),2)";
    e.second_chart = make_chart(lcoords, lg, nullptr, +1.0);

    CatalogSurface plane;
    plane.name = "plane_through_origin";
    plane.components = surf("exp(u)", fmt(kPi / 4), "v", "-v");
    plane.domain = {64, 64, std::log(0.6), 0, std::log(1.9) - std::log(0.6), 2 * kPi, false, true};
    plane.ann = {true, true, false, false, true};
    e.surfaces.push_back(plane);
    return e;
}

CatalogEntry principal_bundle(double F1, double F2) {
    std::array<CoordSpec, 4> coords = {{
        {"t1", true, 2 * kPi, 0, 2 * kPi},
        {"t2", true, 2 * kPi, 0, 2 * kPi},
        {"x", false, 0, -0.3, 1.3},
        {"y", true, 1.0, 0, 1.0},
    }};
    std::string F1s = fmt(F1), F2s = fmt(F2);
    std::array<std::array<std::string, 4>, 4> g{};
    g[0][0] = "1";
    g[1][1] = "1";
    g[2][2] = "1";
    g[3][3] = "1 + " + fmt(F1 * F1 + F2 * F2) + "*pow(x,2)";
    g[0][3] = F1s + "*x";
    g[1][3] = F2s + "*x";
    std::array<std::array<std::string, 4>, 4> J{};
    J[1][0] = "1";
    J[0][1] = "-1";
    J[3][2] = "1";
    J[0][2] = "-(" + F1s + ")*x";
    J[1][2] = "-(" + F2s + ")*x";
    J[2][3] = "-1";
    J[0][3] = "-(" + F2s + ")*x";
    J[1][3] = "(" + F1s + ")*x";

    CatalogEntry e;
    e.name = "principal_bundle";
    e.chart = make_chart(coords, g, &J, +1.0);
    e.hermitian = true;

    CatalogSurface fiber;
    fiber.name = "pb_fiber_torus";
    fiber.components = surf("u", "v", "0.25", "0.4");
    fiber.domain = {64, 64, 0, 0, 2 * kPi, 2 * kPi, true, true};
    fiber.ann = {true, true, true, false, true};
    e.surfaces.push_back(fiber);

    // Horizontal lift of the closed base geodesic x = 0 swept by the fiber
    // direction (-F2, F1); closes after one u-period for integer F.
    double kap = 1.0 / std::sqrt(F1 * F1 + F2 * F2);
    CatalogSurface swept;
    swept.name = "swept_torus";
    swept.components = surf(fmt(-F2 * kap) + "*u", fmt(F1 * kap) + "*u", "0", "v");
    swept.domain = {64, 64, 0, 0, 2 * kPi / kap, 1.0, true, true};
    swept.ann = {true, true, false, true, true};
    e.surfaces.push_back(swept);
    return e;
}

CatalogEntry perturbed_hermitian() {
    // Flat metric with J conjugated by a position-dependent rotation: stays
    // orthogonal with J^2 = -1 but is no longer integrable.
    std::array<CoordSpec, 4> coords;
    const char* names[4] = {"x1", "x2", "x3", "x4"};
    for (int i = 0; i < 4; ++i) coords[i] = {names[i], true, 2 * kPi, 0, 2 * kPi};
    std::array<std::array<std::string, 4>, 4> g{};
    for (int i = 0; i < 4; ++i) g[i][i] = "1";

    auto c = std::make_shared<ChartedManifold4>();
    c->coords = coords;
    VarTable vars = c->vars();
    for (int i = 0; i < 4; ++i) c->metric[i][i] = pc("1", vars);
    c->orientation = +1.0;

    Expr psi1 = pc("0.3*sin(x1)*cos(x2)", vars);
    Expr psi2 = pc("0.2*sin(x3) + 0.15*cos(x1)", vars);

    auto rot_plane = [](int a, int b, const Expr& ang) {
        EMat R;
        for (int i = 0; i < 4; ++i) R[i][i] = expr_num(1.0);
        R[a][a] = expr_call(Func::Cos, ang);
        R[b][b] = expr_call(Func::Cos, ang);
        R[a][b] = expr_neg(expr_call(Func::Sin, ang));
        R[b][a] = expr_call(Func::Sin, ang);
        return R;
    };
    EMat R = emat_mul(rot_plane(0, 2, psi1), rot_plane(1, 3, psi2));
    EMat J0;
    J0[1][0] = expr_num(1.0);
    J0[0][1] = expr_num(-1.0);
    J0[3][2] = expr_num(1.0);
    J0[2][3] = expr_num(-1.0);
    EMat J = emat_mul(emat_mul(R, J0), emat_transpose(R));

    c->has_J = true;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) c->J[i][j] = J[i][j];

    CatalogEntry e;
    e.name = "perturbed_hermitian";
    e.chart = c;
    e.hermitian = true;
    return e;
}

ChartPtr hopf_unit_product_chart() {
    std::array<CoordSpec, 4> coords = {{
        {"phi", true, 2 * kPi, 0, 2 * kPi},
        {"eta", false, 0, kEtaMargin, kPi / 2 - kEtaMargin},
        {"xi1", true, 2 * kPi, 0, 2 * kPi},
        {"xi2", true, 2 * kPi, 0, 2 * kPi},
    }};
    std::array<std::array<std::string, 4>, 4> g{};
    g[0][0] = "1";
    g[1][1] = "1";
    g[2][2] = "pow(cos(eta),2)";
    g[3][3] = "pow(sin(eta),2)";
    return make_chart(coords, g, nullptr, +1.0);
}

std::vector<CatalogEntry> all_entries() {
    std::vector<CatalogEntry> v;
    v.push_back(flat_kahler());
    v.push_back(hopf_surface());
    v.push_back(hopf_cover());
    v.push_back(principal_bundle(1.0, 2.0));
    v.push_back(perturbed_hermitian());
    return v;
}

CatalogEntry find_entry(const std::string& name) {
    for (auto& e : all_entries())
        if (e.name == name) return e;
    throw ConfigError("unknown catalog entry '" + name + "'");
}

} // namespace weylgeo
