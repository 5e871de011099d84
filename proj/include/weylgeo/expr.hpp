#pragma once

// Scalar expression fields: parse, print, evaluate with exact jets.
//
// Grammar (see README for the EBNF): +, -, *, /, unary minus, parentheses,
// calls sin cos tan exp log sqrt pow atan2, constants pi and e, and the
// variables declared by the surrounding chart or surface domain.
// `^` is rejected; exponentiation goes through pow(.,.).

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "weylgeo/dual.hpp"
#include "weylgeo/errors.hpp"

namespace weylgeo {

enum class Func : std::uint8_t { Sin, Cos, Tan, Exp, Log, Sqrt, Pow, Atan2 };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum class Kind : std::uint8_t { Num, Var, Neg, Add, Sub, Mul, Div, Call } kind;
    double num = 0.0;
    int var = -1;            // index into the variable table
    std::string var_name;    // kept for printing
    Func fn = Func::Sin;
    ExprPtr a, b;            // children (b unused for unary)
    std::size_t src_offset = 0;
};

// Table of variable names an expression may reference, e.g. chart coordinates
// or the surface domain parameters (u, v).
struct VarTable {
    std::vector<std::string> names;
    int index_of(std::string_view s) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == s) return static_cast<int>(i);
        return -1;
    }
};

namespace tape {
enum class Op : std::uint8_t {
    PushNum, PushVar, Neg, Add, Sub, Mul, Div,
    Sin, Cos, Tan, Exp, Log, Sqrt, PowGeneral, PowInt, Atan2
};
struct Instr {
    Op op;
    double num = 0.0;       // PushNum payload
    int var = -1;           // PushVar payload
    long long ipow = 0;     // PowInt payload
    const ExprNode* node = nullptr; // for domain-error reporting
};
} // namespace tape

class Expr {
  public:
    Expr() = default;
    explicit Expr(ExprPtr root);

    const ExprPtr& root() const { return root_; }
    bool empty() const { return !root_; }

    std::string print() const;
    bool same_tree(const Expr& other) const;

    // Evaluate at a point; T is double or any nesting of Grad / HyperDual.
    template <class T>
    T eval(std::span<const T> point) const;

    template <class T>
    T eval(const std::vector<T>& point) const {
        return eval(std::span<const T>(point.data(), point.size()));
    }

    // Convenience jets against a 4-variable point.
    double value(std::span<const double> p) const { return eval(p); }

    std::size_t stack_need() const { return stack_need_; }
    const std::vector<tape::Instr>& program() const { return prog_; }

  private:
    ExprPtr root_;
    std::vector<tape::Instr> prog_;
    std::size_t stack_need_ = 0;
};

// Parse `src` against the given variable table. Throws ParseError.
Expr parse(std::string_view src, const VarTable& vars);

std::string print_tree(const ExprPtr& node);
bool same_tree(const ExprPtr& a, const ExprPtr& b);

// Result of eval_jet2: value, the two seeded first derivatives and the mixed
// second partial, exact to roundoff.
struct Jet2 {
    double value;
    double d1;
    double d2;
    double d12;
};

// Second-order jet of `e` at `point` seeded in directions i and j.
Jet2 eval_jet2(const Expr& e, std::span<const double> point, int seed_i, int seed_j);

// Value plus full gradient at `point` (up to 4 variables).
std::pair<double, std::array<double, 4>> eval_grad4(const Expr& e, std::span<const double> point);

// --- programmatic AST builders (used by the catalog and gauge transforms) ---

Expr expr_num(double v);
Expr expr_var(int index, std::string name);
Expr expr_neg(const Expr& a);
Expr expr_add(const Expr& a, const Expr& b);
Expr expr_sub(const Expr& a, const Expr& b);
Expr expr_mul(const Expr& a, const Expr& b);
Expr expr_div(const Expr& a, const Expr& b);
Expr expr_call(Func f, const Expr& a);
Expr expr_call(Func f, const Expr& a, const Expr& b);

// --- templated evaluator ------------------------------------------------------

namespace detail {

template <class T>
bool nonzero_seed(const T&) { return true; }
inline bool nonzero_seed(const double&) { return false; }

template <class T>
T eval_pow_general(const T& x, const T& y, const ExprNode* node) {
    if (value_of(x) <= 0.0)
        throw EvalDomainError("pow with non-positive base and non-integer exponent",
                              node ? print_tree(node->a) + ", " + print_tree(node->b) : "pow");
    return exp(y * log(x));
}

} // namespace detail

template <class T>
T Expr::eval(std::span<const T> point) const {
    if (!root_) throw EvalDomainError("empty expression", "");
    std::vector<T> stack;
    stack.reserve(stack_need_);
    auto pop2 = [&stack]() {
        T b = std::move(stack.back());
        stack.pop_back();
        T a = std::move(stack.back());
        stack.pop_back();
        return std::pair<T, T>(std::move(a), std::move(b));
    };
    for (const auto& ins : prog_) {
        using tape::Op;
        switch (ins.op) {
        case Op::PushNum: stack.emplace_back(T(ins.num)); break;
        case Op::PushVar: stack.emplace_back(point[static_cast<std::size_t>(ins.var)]); break;
        case Op::Neg: stack.back() = -stack.back(); break;
        case Op::Add: { auto [a, b] = pop2(); stack.emplace_back(a + b); break; }
        case Op::Sub: { auto [a, b] = pop2(); stack.emplace_back(a - b); break; }
        case Op::Mul: { auto [a, b] = pop2(); stack.emplace_back(a * b); break; }
        case Op::Div: {
            auto [a, b] = pop2();
            if (value_of(b) == 0.0)
                throw EvalDomainError("division by zero", print_tree(ins.node->b));
            stack.emplace_back(a / b);
            break;
        }
        case Op::Sin: stack.back() = sin(stack.back()); break;
        case Op::Cos: stack.back() = cos(stack.back()); break;
        case Op::Tan: stack.back() = tan(stack.back()); break;
        case Op::Exp: stack.back() = exp(stack.back()); break;
        case Op::Log:
            if (value_of(stack.back()) <= 0.0)
                throw EvalDomainError("log of non-positive value", print_tree(ins.node->a));
            stack.back() = log(stack.back());
            break;
        case Op::Sqrt:
            if (value_of(stack.back()) < 0.0)
                throw EvalDomainError("sqrt of negative value", print_tree(ins.node->a));
            if (value_of(stack.back()) == 0.0 && detail::nonzero_seed(stack.back()))
                throw EvalDomainError("sqrt derivative at zero", print_tree(ins.node->a));
            stack.back() = sqrt(stack.back());
            break;
        case Op::PowInt: {
            T x = std::move(stack.back());
            stack.pop_back();
            if (ins.ipow < 0 && value_of(x) == 0.0)
                throw EvalDomainError("zero raised to negative power", print_tree(ins.node->a));
            stack.emplace_back(pow_int(x, ins.ipow));
            break;
        }
        case Op::PowGeneral: {
            auto [a, b] = pop2();
            stack.emplace_back(detail::eval_pow_general(a, b, ins.node));
            break;
        }
        case Op::Atan2: {
            auto [a, b] = pop2();
            if (value_of(a) == 0.0 && value_of(b) == 0.0)
                throw EvalDomainError("atan2(0, 0)", print_tree(ins.node->a));
            stack.emplace_back(atan2(a, b));
            break;
        }
        }
    }
    return stack.back();
}

} // namespace weylgeo
