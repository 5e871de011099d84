#include <doctest.h>

#include <random>

#include "weylgeo/catalog.hpp"
#include "weylgeo/forms.hpp"

using namespace weylgeo;

namespace {

ChartPtr flat_chart() {
    auto c = std::make_shared<ChartedManifold4>();
    const char* names[4] = {"x1", "x2", "x3", "x4"};
    for (int i = 0; i < 4; ++i) c->coords[i] = {names[i], false, 0, -2, 2};
    VarTable vars = c->vars();
    for (int i = 0; i < 4; ++i) c->metric[i][i] = parse("1", vars);
    c->orientation = 1.0;
    return c;
}

Mat4<double> random_spd(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Mat4<double> A;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) A[i][j] = d(rng);
    Mat4<double> g = mzero4<double>();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            for (int k = 0; k < 4; ++k) g[i][j] += A[k][i] * A[k][j];
            if (i == j) g[i][j] += 0.8;
        }
    return g;
}

TwoForm random_form(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    TwoForm f;
    for (int I = 0; I < 6; ++I) f[I] = d(rng);
    return f;
}

} // namespace

TEST_CASE("metric_at: flat metric gives identity and unit density") {
    auto c = flat_chart();
    Vec4<double> p{0.1, 0.2, 0.3, 0.4};
    MetricAt<double> m = metric_at(*c, p);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            CHECK(m.g[i][j] == doctest::Approx(i == j ? 1.0 : 0.0));
            CHECK(m.ginv[i][j] == doctest::Approx(i == j ? 1.0 : 0.0));
        }
    CHECK(m.sqrt_det == doctest::Approx(1.0));
}

TEST_CASE("metric_at: unit product chart is diag(1,1,1/2,1/2) at eta = pi/4") {
    ChartPtr c = hopf_unit_product_chart();
    Vec4<double> p{0.3, 3.14159265358979323846 / 4, 1.0, 2.0};
    MetricAt<double> m = metric_at(*c, p);
    CHECK(m.g[0][0] == doctest::Approx(1.0));
    CHECK(m.g[1][1] == doctest::Approx(1.0));
    CHECK(m.g[2][2] == doctest::Approx(0.5));
    CHECK(m.g[3][3] == doctest::Approx(0.5));
    CHECK(m.sqrt_det == doctest::Approx(0.5));
}

TEST_CASE("metric_at: degenerate metric reports non-SPD") {
    auto c = std::make_shared<ChartedManifold4>();
    const char* names[4] = {"x1", "x2", "x3", "x4"};
    for (int i = 0; i < 4; ++i) c->coords[i] = {names[i], false, 0, -2, 2};
    VarTable vars = c->vars();
    for (int i = 0; i < 3; ++i) c->metric[i][i] = parse("1", vars);
    c->metric[3][3] = parse("0", vars);
    Vec4<double> p{0, 0, 0, 0};
    CHECK_THROWS_AS(metric_at(*c, p), GeometryError);
}

TEST_CASE("sharp/flat: flat metric and the unit product chart") {
    auto c = flat_chart();
    Vec4<double> p{0, 0, 0, 0};
    MetricAt<double> m = metric_at(*c, p);
    Vec4<double> dx1{1, 0, 0, 0};
    Vec4<double> v = sharp(m.ginv, dx1);
    CHECK(v[0] == doctest::Approx(1.0));

    ChartPtr h = hopf_unit_product_chart();
    Vec4<double> q{0.0, 3.14159265358979323846 / 4, 0.5, 0.5};
    MetricAt<double> mh = metric_at(*h, q);
    Vec4<double> dxi1{0, 0, 1, 0};
    Vec4<double> w = sharp(mh.ginv, dxi1);
    CHECK(w[2] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("property: flat(sharp(beta)) = beta for random SPD metrics") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (int t = 0; t < 100; ++t) {
        Mat4<double> g = random_spd(rng);
        Mat4<double> gi = inverse4(g);
        Vec4<double> beta{d(rng), d(rng), d(rng), d(rng)};
        Vec4<double> back = flat(g, sharp(gi, beta));
        for (int i = 0; i < 4; ++i) CHECK(std::abs(back[i] - beta[i]) <= 1e-12);
    }
}

TEST_CASE("hodge star: flat star of e12 is e34") {
    Mat4<double> g = midentity4<double>();
    TwoForm e12;
    e12[0] = 1; // pair (0,1)
    TwoForm s = hodge_star2(g, g, 1.0, 1.0, e12);
    CHECK(s[5] == doctest::Approx(1.0)); // pair (2,3)
    for (int I = 0; I < 5; ++I) CHECK(std::abs(s[I]) <= 1e-15);
}

TEST_CASE("property: star is an involution and the projectors split") {
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 100; ++t) {
        Mat4<double> g = random_spd(rng);
        Mat4<double> gi = inverse4(g);
        double sd = std::sqrt(det4(g));
        TwoForm b = random_form(rng);
        TwoForm ss = hodge_star2(g, gi, sd, 1.0, hodge_star2(g, gi, sd, 1.0, b));
        for (int I = 0; I < 6; ++I) CHECK(std::abs(ss[I] - b[I]) <= 1e-10);
        // projectors: idempotent and mutually annihilating
        auto P = [&](const TwoForm& x, double sign) {
            TwoForm sx = hodge_star2(g, gi, sd, 1.0, x);
            return (x + sx * sign) * 0.5;
        };
        TwoForm pp = P(P(b, +1), +1), pm = P(P(b, +1), -1);
        TwoForm p1 = P(b, +1);
        for (int I = 0; I < 6; ++I) {
            CHECK(std::abs(pp[I] - p1[I]) <= 1e-10);
            CHECK(std::abs(pm[I]) <= 1e-10);
        }
    }
}

TEST_CASE("property: star on 2-forms is conformally invariant") {
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int t = 0; t < 100; ++t) {
        Mat4<double> g = random_spd(rng);
        double scale = std::exp(2.0 * u(rng));
        Mat4<double> g2;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) g2[i][j] = scale * g[i][j];
        TwoForm b = random_form(rng);
        TwoForm s1 = hodge_star2(g, inverse4(g), std::sqrt(det4(g)), 1.0, b);
        TwoForm s2 = hodge_star2(g2, inverse4(g2), std::sqrt(det4(g2)), 1.0, b);
        for (int I = 0; I < 6; ++I) CHECK(std::abs(s1[I] - s2[I]) <= 1e-10);
    }
}

TEST_CASE("property: beta ^ star gamma = <beta, gamma> vol") {
    std::mt19937_64 rng(31337);
    for (int t = 0; t < 100; ++t) {
        Mat4<double> g = random_spd(rng);
        Mat4<double> gi = inverse4(g);
        double sd = std::sqrt(det4(g));
        TwoForm b = random_form(rng), c = random_form(rng);
        double lhs = wedge22(b, hodge_star2(g, gi, sd, 1.0, c));
        double rhs = form_inner(gi, b, c) * sd;
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("selfdual basis: flat metric spans the standard self-dual forms") {
    Mat4<double> g = midentity4<double>();
    auto basis = selfdual_basis(g, 1.0, +1.0);
    Mat4<double> gi = g;
    double sd = 1.0;
    for (const auto& b : basis) {
        TwoForm sb = hodge_star2(g, gi, sd, 1.0, b);
        for (int I = 0; I < 6; ++I) CHECK(std::abs(sb[I] - b[I]) <= 1e-10);
        CHECK(form_norm(gi, b) == doctest::Approx(1.0).epsilon(1e-12));
    }
    // orthonormality
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            CHECK(std::abs(form_inner(gi, basis[a], basis[b])) <= 1e-12);
}

TEST_CASE("selfdual basis: each eigenspace is 3-dimensional for random metrics") {
    std::mt19937_64 rng(4242);
    for (int t = 0; t < 20; ++t) {
        Mat4<double> g = random_spd(rng);
        Mat4<double> gi = inverse4(g);
        double sd = std::sqrt(det4(g));
        for (double sign : {+1.0, -1.0}) {
            auto basis = selfdual_basis(g, 1.0, sign);
            for (const auto& b : basis) {
                TwoForm sb = hodge_star2(g, gi, sd, 1.0, b);
                for (int I = 0; I < 6; ++I) CHECK(std::abs(sb[I] - sign * b[I]) <= 1e-10);
                CHECK(form_norm(gi, b) == doctest::Approx(1.0).epsilon(1e-10));
            }
            for (int a = 0; a < 3; ++a)
                for (int b2 = a + 1; b2 < 3; ++b2)
                    CHECK(std::abs(form_inner(gi, basis[a], basis[b2])) <= 1e-10);
        }
        // oracle: eigendecomposition of star on the 6-dim space of 2-forms.
        // Build the star matrix in an orthonormal 2-form basis and count
        // eigenvalues near +1 and -1.
        std::array<TwoForm, 6> on;
        {
            Mat4<double> C = orthonormal_coframe(g, 1.0);
            int idx = 0;
            for (int a = 0; a < 4; ++a)
                for (int b2 = a + 1; b2 < 4; ++b2) on[idx++] = coframe_wedge(C, a, b2);
        }
        std::array<std::array<double, 6>, 6> S{};
        for (int A = 0; A < 6; ++A) {
            TwoForm sA = hodge_star2(g, gi, sd, 1.0, on[A]);
            for (int B = 0; B < 6; ++B) S[B][A] = form_inner(gi, sA, on[B]);
        }
        auto ev = symmetric_eigenvalues<6>(S);
        int plus = 0, minus = 0;
        for (double e : ev) {
            if (std::abs(e - 1) < 1e-8) ++plus;
            if (std::abs(e + 1) < 1e-8) ++minus;
        }
        CHECK(plus == 3);
        CHECK(minus == 3);
    }
}

TEST_CASE("hodge star: reversing the orientation flips the star and the eigenspaces") {
    std::mt19937_64 rng(60);
    for (int t = 0; t < 20; ++t) {
        Mat4<double> g = random_spd(rng);
        Mat4<double> gi = inverse4(g);
        double sd = std::sqrt(det4(g));
        TwoForm b = random_form(rng);
        TwoForm sp = hodge_star2(g, gi, sd, +1.0, b);
        TwoForm sm = hodge_star2(g, gi, sd, -1.0, b);
        for (int I = 0; I < 6; ++I) CHECK(sp[I] == -sm[I]);
        // the self-dual basis for one orientation is anti-self-dual for the other
        auto basis = selfdual_basis(g, -1.0, +1.0);
        for (const auto& e : basis) {
            TwoForm se = hodge_star2(g, gi, sd, -1.0, e);
            for (int I = 0; I < 6; ++I) CHECK(std::abs(se[I] - e[I]) <= 1e-10);
        }
    }
}
