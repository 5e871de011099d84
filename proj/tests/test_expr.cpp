#include <doctest.h>

#include <random>

#include "weylgeo/expr.hpp"

using namespace weylgeo;

namespace {

const VarTable kVars{{"x1", "x2", "x3", "x4"}};

double eval_at(const Expr& e, std::array<double, 4> p) {
    return e.eval(std::span<const double>(p.data(), 4));
}

// central finite differences, the independent oracle for the AD jets
double fd_first(const Expr& e, std::array<double, 4> p, int i, double h) {
    auto pp = p, pm = p;
    pp[i] += h;
    pm[i] -= h;
    return (eval_at(e, pp) - eval_at(e, pm)) / (2 * h);
}

double fd_second(const Expr& e, std::array<double, 4> p, int i, int j, double h) {
    if (i == j) {
        auto pp = p, pm = p;
        pp[i] += h;
        pm[i] -= h;
        return (eval_at(e, pp) - 2 * eval_at(e, p) + eval_at(e, pm)) / (h * h);
    }
    auto a = p, b = p, c = p, d = p;
    a[i] += h; a[j] += h;
    b[i] += h; b[j] -= h;
    c[i] -= h; c[j] += h;
    d[i] -= h; d[j] -= h;
    return (eval_at(e, a) - eval_at(e, b) - eval_at(e, c) + eval_at(e, d)) / (4 * h * h);
}

// random expression trees for the round-trip property
Expr random_tree(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
    // non-negative literals: the parser reads "-c" as Neg(Num(c)), so a
    // negative literal node would not round-trip structurally
    std::uniform_real_distribution<double> num(0.0, 3.0);
    std::uniform_int_distribution<int> var(0, 3);
    switch (pick(rng)) {
    case 0: return expr_num(num(rng));
    case 1: {
        int v = var(rng);
        return expr_var(v, kVars.names[static_cast<std::size_t>(v)]);
    }
    case 2: return expr_add(random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 3: return expr_sub(random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 4: return expr_mul(random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 5: return expr_neg(random_tree(rng, depth - 1));
    case 6: return expr_call(Func::Sin, random_tree(rng, depth - 1));
    default: return expr_call(Func::Cos, random_tree(rng, depth - 1));
    }
}

Expr random_poly(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_int_distribution<int> deg(0, 4);
    Expr acc = expr_num(coef(rng));
    for (int t = 0; t < 6; ++t) {
        Expr term = expr_num(coef(rng));
        int total = deg(rng);
        for (int d = 0; d < total; ++d) {
            int v = std::uniform_int_distribution<int>(0, 3)(rng);
            term = expr_mul(term, expr_var(v, kVars.names[static_cast<std::size_t>(v)]));
        }
        acc = expr_add(acc, term);
    }
    return acc;
}

} // namespace

TEST_CASE("parser: direct grammar cases") {
    Expr e = parse("sin(x1)*x2", kVars);
    const ExprNode& root = *e.root();
    CHECK(root.kind == ExprNode::Kind::Mul);
    CHECK(root.a->kind == ExprNode::Kind::Call);
    CHECK(root.a->fn == Func::Sin);
    CHECK(root.a->a->kind == ExprNode::Kind::Var);
    CHECK(root.a->a->var == 0);
    CHECK(root.b->kind == ExprNode::Kind::Var);
    CHECK(root.b->var == 1);
}

TEST_CASE("parser: incomplete input reports the right offset") {
    try {
        parse("x1 + ", kVars);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.offset == 5);
    }
}

TEST_CASE("parser: pow and constants") {
    Expr e = parse("pow(x3, 2) + cos(pi)", kVars);
    CHECK(eval_at(e, {0, 0, 2, 0}) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("parser: caret is rejected with a diagnostic") {
    CHECK_THROWS_AS(parse("x1 ^ 2", kVars), ParseError);
}

TEST_CASE("parser: unknown identifier") {
    try {
        parse("sin(q)", kVars);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.offset == 4);
    }
}

TEST_CASE("eval: domain errors are reported, never silent") {
    CHECK_THROWS_AS(eval_at(parse("log(x1)", kVars), {-1, 0, 0, 0}), EvalDomainError);
    CHECK_THROWS_AS(eval_at(parse("1/x1", kVars), {0, 0, 0, 0}), EvalDomainError);
    CHECK_THROWS_AS(eval_at(parse("sqrt(x1)", kVars), {-2, 0, 0, 0}), EvalDomainError);
}

TEST_CASE("eval_jet2: derivative of sine at zero") {
    Expr e = parse("sin(x1)", kVars);
    std::array<double, 4> p{0, 0, 0, 0};
    Jet2 j = eval_jet2(e, std::span<const double>(p.data(), 4), 0, 1);
    CHECK(j.value == doctest::Approx(0.0));
    CHECK(j.d1 == doctest::Approx(1.0));
}

TEST_CASE("eval_jet2: bilinear mixed partial") {
    Expr e = parse("x1*x2", kVars);
    std::array<double, 4> p{0.3, -0.7, 0, 0};
    Jet2 j = eval_jet2(e, std::span<const double>(p.data(), 4), 0, 1);
    CHECK(j.d12 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eval_jet2: exp second derivative against the FD oracle") {
    Expr e = parse("exp(2*x1)", kVars);
    std::array<double, 4> p{0.3, 0, 0, 0};
    Jet2 j = eval_jet2(e, std::span<const double>(p.data(), 4), 0, 0);
    double expected = 4.0 * std::exp(0.6);
    CHECK(j.d12 == doctest::Approx(expected).epsilon(1e-14));
    double fd = fd_second(e, p, 0, 0, 1e-4);
    CHECK(std::abs(j.d12 - fd) / std::abs(fd) <= 1e-6);
}

TEST_CASE("property: AD jets of random polynomials match finite differences") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> pt(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        Expr e = random_poly(rng);
        std::array<double, 4> p{pt(rng), pt(rng), pt(rng), pt(rng)};
        int i = std::uniform_int_distribution<int>(0, 3)(rng);
        int j = std::uniform_int_distribution<int>(0, 3)(rng);
        Jet2 jet = eval_jet2(e, std::span<const double>(p.data(), 4), i, j);
        // keep the FD oracle inside its own truncation budget: the central
        // stencils on a quartic carry O(h^2) errors with 4th-derivative
        // coefficients bounded by ~50 here
        double f1 = fd_first(e, p, i, 1e-4);
        if (std::abs(f1) >= 0.5)
            CHECK(std::abs(jet.d1 - f1) / std::abs(f1) <= 1e-6);
        else
            CHECK(std::abs(jet.d1 - f1) <= 5e-7);
        double f2 = fd_second(e, p, i, j, 1e-3);
        if (std::abs(f2) >= 10.0)
            CHECK(std::abs(jet.d12 - f2) / std::abs(f2) <= 1e-6);
        else
            CHECK(std::abs(jet.d12 - f2) <= 1e-5);
    }
}

TEST_CASE("property: parse . print . parse is the identity on random trees") {
    std::mt19937_64 rng(777);
    for (int trial = 0; trial < 1000; ++trial) {
        Expr t = random_tree(rng, 4);
        std::string printed = t.print();
        Expr back = parse(printed, kVars);
        CHECK(back.same_tree(t));
        // and printing again is stable
        CHECK(back.print() == printed);
    }
}

TEST_CASE("pow with integer exponent accepts negative bases") {
    Expr e = parse("pow(cos(x1), 2)", kVars);
    CHECK(eval_at(e, {3.0, 0, 0, 0}) == doctest::Approx(std::cos(3.0) * std::cos(3.0)));
    // general exponent requires a positive base
    CHECK_THROWS_AS(eval_at(parse("pow(x1, 0.5)", kVars), {-1, 0, 0, 0}), EvalDomainError);
}

TEST_CASE("atan2 jets") {
    Expr e = parse("atan2(x2, x1)", kVars);
    std::array<double, 4> p{0.8, -0.4, 0, 0};
    Jet2 j = eval_jet2(e, std::span<const double>(p.data(), 4), 0, 1);
    double f12 = fd_second(e, p, 0, 1, 1e-4);
    CHECK(std::abs(j.d12 - f12) <= 1e-6 * std::max(1.0, std::abs(f12)));
}
