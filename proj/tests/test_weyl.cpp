#include <doctest.h>

#include <random>

#include "weylgeo/catalog.hpp"
#include "weylgeo/weyl.hpp"

using namespace weylgeo;

namespace {

constexpr double kPi = 3.14159265358979323846;

ChartPtr flat_chart() {
    auto c = std::make_shared<ChartedManifold4>();
    const char* names[4] = {"x1", "x2", "x3", "x4"};
    for (int i = 0; i < 4; ++i) c->coords[i] = {names[i], false, 0, -2, 2};
    VarTable vars = c->vars();
    for (int i = 0; i < 4; ++i) c->metric[i][i] = parse("1", vars);
    return c;
}

// flat metric plus a smooth SPD perturbation
ChartPtr wavy_chart() {
    auto c = std::make_shared<ChartedManifold4>();
    const char* names[4] = {"x1", "x2", "x3", "x4"};
    for (int i = 0; i < 4; ++i) c->coords[i] = {names[i], false, 0, -1.5, 1.5};
    VarTable vars = c->vars();
    c->metric[0][0] = parse("1 + 0.2*sin(x1)*cos(x2)", vars);
    c->metric[1][1] = parse("1 + 0.15*cos(x3)", vars);
    c->metric[2][2] = parse("1 + 0.1*sin(x4)*sin(x1)", vars);
    c->metric[3][3] = parse("1 + 0.12*cos(x1)", vars);
    c->metric[0][1] = parse("0.08*sin(x3)*cos(x4)", vars);
    c->metric[2][3] = parse("0.05*cos(x2)", vars);
    return c;
}

std::array<Expr, 4> random_alpha_exprs() {
    VarTable vars{{"x1", "x2", "x3", "x4"}};
    return {parse("0.3*sin(x2)", vars), parse("0.2*cos(x1) - 0.1", vars),
            parse("0.15*x1", vars), parse("0.25*cos(x3)", vars)};
}

// damped random quadratic for the gauge-change tests
Expr random_damped_quadratic(std::mt19937_64& rng) {
    VarTable vars{{"x1", "x2", "x3", "x4"}};
    std::uniform_real_distribution<double> coef(-0.4, 0.4);
    std::string damp = "exp(-(x1*x1 + x2*x2 + x3*x3 + x4*x4))";
    char buf[256];
    std::snprintf(buf, sizeof buf, "(%g + %g*x1 + %g*x2*x3 + %g*x4*x4)*%s", coef(rng),
                  coef(rng), coef(rng), coef(rng), damp.c_str());
    return parse(buf, vars);
}

double max_gamma_diff(const Christoffels<double>& A, const Christoffels<double>& B) {
    double m = 0;
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                m = std::max(m, std::abs(A.G[k][i][j] - B.G[k][i][j]));
    return m;
}

} // namespace

TEST_CASE("levi_civita: flat chart has vanishing Christoffels") {
    auto c = flat_chart();
    Christoffels<double> G = christoffels_lc(*c, Vec4<double>{0.3, -0.2, 0.5, 0.1});
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) CHECK(std::abs(G.G[k][i][j]) <= 1e-14);
}

TEST_CASE("levi_civita: sphere-factor Christoffels on the unit product chart") {
    ChartPtr c = hopf_unit_product_chart();
    double eta = 0.6;
    Christoffels<double> G = christoffels_lc(*c, Vec4<double>{0.2, eta, 1.0, 2.0});
    CHECK(G.G[1][2][2] == doctest::Approx(std::cos(eta) * std::sin(eta)).epsilon(1e-10));
    CHECK(G.G[1][3][3] == doctest::Approx(-std::sin(eta) * std::cos(eta)).epsilon(1e-10));
    // finite-difference oracle for one component
    double h = 1e-5;
    auto gc = [&](double e) {
        return metric_components(*c, Vec4<double>{0.2, e, 1.0, 2.0})[2][2];
    };
    double dg = (gc(eta + h) - gc(eta - h)) / (2 * h);
    CHECK(G.G[1][2][2] == doctest::Approx(-0.5 * dg).epsilon(1e-8));
}

TEST_CASE("levi_civita: Christoffels are symmetric in the lower indices") {
    auto c = wavy_chart();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        Vec4<double> p{d(rng), d(rng), d(rng), d(rng)};
        Christoffels<double> G = christoffels_lc(*c, p);
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) CHECK(G.G[k][i][j] == G.G[k][j][i]);
    }
}

TEST_CASE("geodesic oracle: a great circle of the sphere factor stays put") {
    ChartPtr c = hopf_unit_product_chart();
    auto gamma = [&](const Vec4<double>& p) { return christoffels_lc(*c, p); };
    // the diagonal circle at eta = pi/4 is a closed geodesic of period 2 pi
    Vec4<double> x{1.0, kPi / 4, 0.0, 0.0};
    Vec4<double> v{0.0, 0.0, 1.0, -1.0};
    auto [xe, ve] = integrate_geodesic(gamma, x, v, 2 * kPi, 4000);
    auto circ_dist = [](double a, double per) {
        double d = std::fmod(std::abs(a), per);
        return std::min(d, per - d);
    };
    CHECK(std::abs(xe[1] - kPi / 4) <= 1e-6);
    CHECK(circ_dist(xe[2], 2 * kPi) <= 1e-6);
    CHECK(std::abs(ve[1]) <= 1e-6);
}

TEST_CASE("weyl_connection: alpha = 0 reduces to Levi-Civita") {
    auto c = wavy_chart();
    WeylStructure W = WeylStructure::levi_civita(c);
    Vec4<double> p{0.4, -0.3, 0.2, 0.9};
    CHECK(max_gamma_diff(christoffels_weyl(W, p), christoffels_lc(*c, p)) == 0.0);
}

TEST_CASE("weyl_connection: canonical Hopf structure has alpha = -dphi/2") {
    CatalogEntry hopf = hopf_surface();
    WeylStructure W = WeylStructure::canonical(hopf.chart);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 20; ++t) {
        Vec4<double> p = hopf.chart->sample_point(rng);
        Vec4<double> a = alpha_at(W, p);
        CHECK(std::abs(a[0] + 0.5) <= 1e-9);
        for (int i = 1; i < 4; ++i) CHECK(std::abs(a[i]) <= 1e-9);
    }
}

TEST_CASE("weyl_connection: metricity defect vanishes for random gauge data") {
    auto c = wavy_chart();
    WeylStructure W = WeylStructure::from_exprs(c, random_alpha_exprs());
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        Vec4<double> p{d(rng), d(rng), d(rng), d(rng)};
        CHECK(metricity_defect(W, p) <= 1e-8);
        Christoffels<double> G = christoffels_weyl(W, p);
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) CHECK(G.G[k][i][j] == G.G[k][j][i]);
    }
}

TEST_CASE("riemann: flat chart vanishes") {
    auto c = flat_chart();
    Riemann<double> R = riemann_lc(*c, Vec4<double>{0.2, 0.1, -0.4, 0.8});
    CHECK(max_abs_riemann(R) <= 1e-12);
}

TEST_CASE("riemann: the cone metric over the unit sphere is flat") {
    CatalogEntry cover = hopf_cover();
    std::mt19937_64 rng(17);
    for (int t = 0; t < 25; ++t) {
        Vec4<double> p = cover.chart->sample_point(rng);
        Riemann<double> R = riemann_lc(*cover.chart, p);
        CHECK(max_abs_riemann(R) <= 1e-8);
    }
}

TEST_CASE("riemann: first Bianchi identity for a curved chart") {
    auto c = wavy_chart();
    Vec4<double> p{0.3, 0.5, -0.2, 0.4};
    Riemann<double> R = riemann_lc(*c, p);
    for (int l = 0; l < 4; ++l)
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    double cyc = R.R[l][k][i][j] + R.R[l][i][j][k] + R.R[l][j][k][i];
                    CHECK(std::abs(cyc) <= 1e-8);
                }
}

TEST_CASE("riemann: sphere factor has unit sectional curvature") {
    ChartPtr c = hopf_unit_product_chart();
    std::mt19937_64 rng(23);
    for (int t = 0; t < 10; ++t) {
        Vec4<double> p = c->sample_point(rng);
        // tangent planes to the sphere factor: span pairs of eta, xi1, xi2
        Vec4<double> X = vzero4<double>(), Y = vzero4<double>();
        X[1] = 1.0;
        Y[2] = 1.0;
        CHECK(sectional_curvature(*c, p, X, Y) == doctest::Approx(1.0).epsilon(1e-6));
        Vec4<double> Z = vzero4<double>();
        Z[3] = 1.0;
        CHECK(sectional_curvature(*c, p, X, Z) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("gauge_transform: u = 0 is the identity") {
    auto c = wavy_chart();
    WeylStructure W = WeylStructure::from_exprs(c, random_alpha_exprs());
    VarTable vars{{"x1", "x2", "x3", "x4"}};
    WeylStructure W2 = gauge_transform(W, parse("0", vars));
    Vec4<double> p{0.3, -0.4, 0.6, 0.2};
    CHECK(max_gamma_diff(christoffels_weyl(W, p), christoffels_weyl(W2, p)) <= 1e-12);
}

TEST_CASE("gauge_transform: the Weyl connection is gauge invariant") {
    auto c = wavy_chart();
    WeylStructure W = WeylStructure::from_exprs(c, random_alpha_exprs());
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        WeylStructure W2 = gauge_transform(W, random_damped_quadratic(rng));
        for (int t = 0; t < 20; ++t) {
            Vec4<double> p{d(rng), d(rng), d(rng), d(rng)};
            CHECK(max_gamma_diff(christoffels_weyl(W, p), christoffels_weyl(W2, p)) <= 1e-8);
            CHECK(metricity_defect(W2, p) <= 1e-8);
        }
    }
}

TEST_CASE("gauge_transform: exact gauge potential untwists to Levi-Civita") {
    auto c = wavy_chart();
    VarTable vars{{"x1", "x2", "x3", "x4"}};
    Expr u = parse("0.2*sin(x1) + 0.1*x2*x3", vars);
    // alpha = du as expressions
    std::array<Expr, 4> du = {parse("0.2*cos(x1)", vars), parse("0.1*x3", vars),
                              parse("0.1*x2", vars), parse("0", vars)};
    WeylStructure W = WeylStructure::from_exprs(c, du);
    WeylStructure W2 = gauge_transform(W, u);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        Vec4<double> p{d(rng), d(rng), d(rng), d(rng)};
        Vec4<double> a = alpha_at(W2, p);
        for (int i = 0; i < 4; ++i) CHECK(std::abs(a[i]) <= 1e-12);
        CHECK(max_gamma_diff(christoffels_weyl(W2, p), christoffels_lc(*W2.chart, p)) <= 1e-12);
    }
}

TEST_CASE("covariant derivative: constant field in a flat chart") {
    auto c = flat_chart();
    Christoffels<double> G = christoffels_lc(*c, Vec4<double>{0, 0, 0, 0});
    Vec4<double> X{1, 2, 0, 0}, V{0, 1, 0, 3}, dV{0, 0, 0, 0};
    Vec4<double> r = covariant_dir(G, X, V, dV);
    for (int i = 0; i < 4; ++i) CHECK(r[i] == 0.0);
    // linearity in the field argument is structural: doubling (V, dV) doubles it
    Vec4<double> V2{0, 2, 0, 6}, dV2{0, 0, 0, 0};
    Vec4<double> r2 = covariant_dir(G, X, V2, dV2);
    for (int i = 0; i < 4; ++i) CHECK(r2[i] == 2 * r[i]);
}

TEST_CASE("holonomy oracle: transport around a small square measures curvature") {
    ChartPtr c = hopf_unit_product_chart();
    Vec4<double> p{0.5, 0.7, 1.2, 0.8};
    double h = 1e-2;
    auto gamma = [&](const Vec4<double>& x) { return christoffels_lc(*c, x); };
    // square in the (eta, xi1) coordinate plane
    int e1 = 1, e2 = 2;
    Vec4<double> V{0.3, 0.4, -0.2, 0.5};
    Vec4<double> cur = V;
    auto leg = [&](int dir, double sgn, Vec4<double> start, const Vec4<double>& vin) {
        auto curve = [&, start](double t) {
            Vec4<double> x = start;
            x[dir] += sgn * t;
            return x;
        };
        auto vel = [&](double) {
            Vec4<double> v = vzero4<double>();
            v[dir] = sgn;
            return v;
        };
        return parallel_transport(gamma, curve, vel, vin, 0, h, 64);
    };
    Vec4<double> x = p;
    cur = leg(e1, +1, x, cur);
    x[e1] += h;
    cur = leg(e2, +1, x, cur);
    x[e2] += h;
    cur = leg(e1, -1, x, cur);
    x[e1] -= h;
    cur = leg(e2, -1, x, cur);
    // holonomy defect ~ -R(e1, e2) V h^2
    Riemann<double> R = riemann_lc(*c, p);
    Vec4<double> XX = vzero4<double>(), YY = vzero4<double>();
    XX[e1] = 1;
    YY[e2] = 1;
    Mat4<double> F = curvature_endo(R, XX, YY);
    Vec4<double> pred = matvec(F, V);
    double num = 0, den = 0;
    for (int i = 0; i < 4; ++i) {
        double defect = (cur[i] - V[i]) / (h * h);
        num += std::abs(defect + pred[i]);
        den += std::abs(pred[i]);
    }
    CHECK(num / den <= 1e-2);
}
