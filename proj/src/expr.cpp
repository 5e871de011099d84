#include "weylgeo/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace weylgeo {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kE = 2.71828182845904523536;

struct FuncInfo {
    const char* name;
    Func fn;
    int arity;
};
constexpr FuncInfo kFuncs[] = {
    {"sin", Func::Sin, 1},  {"cos", Func::Cos, 1},   {"tan", Func::Tan, 1},
    {"exp", Func::Exp, 1},  {"log", Func::Log, 1},   {"sqrt", Func::Sqrt, 1},
    {"pow", Func::Pow, 2},  {"atan2", Func::Atan2, 2},
};

const FuncInfo* find_func(std::string_view s) {
    for (const auto& f : kFuncs)
        if (s == f.name) return &f;
    return nullptr;
}

ExprPtr make_node(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

ExprPtr num_node(double v, std::size_t off = 0) {
    ExprNode n;
    n.kind = ExprNode::Kind::Num;
    n.num = v;
    n.src_offset = off;
    return make_node(std::move(n));
}

// --- recursive descent parser -------------------------------------------------

class Parser {
  public:
    Parser(std::string_view src, const VarTable& vars) : src_(src), vars_(vars) {}

    ExprPtr run() {
        skip_ws();
        if (pos_ >= src_.size())
            throw ParseError(pos_, "empty expression", "expression");
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos_ < src_.size())
            throw ParseError(pos_, "unexpected trailing input", "end of input");
        return e;
    }

  private:
    std::string_view src_;
    const VarTable& vars_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    ExprPtr parse_sum() {
        ExprPtr lhs = parse_term();
        for (;;) {
            char c = peek();
            if (c != '+' && c != '-') return lhs;
            std::size_t off = pos_++;
            ExprPtr rhs = parse_term();
            ExprNode n;
            n.kind = c == '+' ? ExprNode::Kind::Add : ExprNode::Kind::Sub;
            n.a = std::move(lhs);
            n.b = std::move(rhs);
            n.src_offset = off;
            lhs = make_node(std::move(n));
        }
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            char c = peek();
            if (c == '^')
                throw ParseError(pos_, "operator '^' is not supported, use pow(a, b)", "* or /");
            if (c != '*' && c != '/') return lhs;
            std::size_t off = pos_++;
            ExprPtr rhs = parse_unary();
            ExprNode n;
            n.kind = c == '*' ? ExprNode::Kind::Mul : ExprNode::Kind::Div;
            n.a = std::move(lhs);
            n.b = std::move(rhs);
            n.src_offset = off;
            lhs = make_node(std::move(n));
        }
    }

    ExprPtr parse_unary() {
        char c = peek();
        if (c == '-') {
            std::size_t off = pos_++;
            ExprPtr a = parse_unary();
            ExprNode n;
            n.kind = ExprNode::Kind::Neg;
            n.a = std::move(a);
            n.src_offset = off;
            return make_node(std::move(n));
        }
        if (c == '+') { // tolerate unary plus
            ++pos_;
            return parse_unary();
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        char c = peek();
        std::size_t off = pos_;
        if (c == '\0')
            throw ParseError(pos_, "unexpected end of input", "number, identifier or (");
        if (c == '(') {
            ++pos_;
            ExprPtr e = parse_sum();
            if (peek() != ')')
                throw ParseError(pos_, "missing closing parenthesis", ")");
            ++pos_;
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        throw ParseError(off, std::string("unexpected character '") + c + "'",
                         "number, identifier or (");
    }

    ExprPtr parse_number() {
        std::size_t off = pos_;
        const char* begin = src_.data() + pos_;
        char* end = nullptr;
        std::string buf(src_.substr(pos_, std::min<std::size_t>(64, src_.size() - pos_)));
        double v = std::strtod(buf.c_str(), &end);
        if (end == buf.c_str())
            throw ParseError(off, "malformed number", "number");
        pos_ += static_cast<std::size_t>(end - buf.c_str());
        (void)begin;
        return num_node(v, off);
    }

    ExprPtr parse_ident() {
        std::size_t off = pos_;
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        std::string_view name = src_.substr(start, pos_ - start);
        if (name == "pi") return num_node(kPi, off);
        if (name == "e") return num_node(kE, off);

        if (peek() == '(') {
            const FuncInfo* fi = find_func(name);
            if (!fi)
                throw ParseError(off, "unknown function '" + std::string(name) + "'",
                                 "sin cos tan exp log sqrt pow atan2");
            ++pos_; // consume '('
            std::vector<ExprPtr> args;
            args.push_back(parse_sum());
            while (peek() == ',') {
                ++pos_;
                args.push_back(parse_sum());
            }
            if (peek() != ')')
                throw ParseError(pos_, "missing closing parenthesis in call", ")");
            ++pos_;
            if (static_cast<int>(args.size()) != fi->arity)
                throw ParseError(off, std::string(fi->name) + " expects " +
                                          std::to_string(fi->arity) + " argument(s)",
                                 "argument list");
            ExprNode n;
            n.kind = ExprNode::Kind::Call;
            n.fn = fi->fn;
            n.a = args[0];
            if (fi->arity == 2) n.b = args[1];
            n.src_offset = off;
            return make_node(std::move(n));
        }

        int idx = vars_.index_of(name);
        if (idx < 0)
            throw ParseError(off, "unknown identifier '" + std::string(name) + "'",
                             "declared variable or constant");
        ExprNode n;
        n.kind = ExprNode::Kind::Var;
        n.var = idx;
        n.var_name = std::string(name);
        n.src_offset = off;
        return make_node(std::move(n));
    }
};

// --- printer -------------------------------------------------------------------

int precedence(const ExprNode& n) {
    switch (n.kind) {
    case ExprNode::Kind::Add:
    case ExprNode::Kind::Sub: return 1;
    case ExprNode::Kind::Mul:
    case ExprNode::Kind::Div: return 2;
    case ExprNode::Kind::Neg: return 3;
    default: return 4;
    }
}

void print_rec(const ExprNode& n, std::string& out) {
    auto child = [&out](const ExprPtr& c, int min_prec) {
        bool paren = precedence(*c) < min_prec;
        if (paren) out += '(';
        print_rec(*c, out);
        if (paren) out += ')';
    };
    switch (n.kind) {
    case ExprNode::Kind::Num: {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", n.num);
        out += buf;
        break;
    }
    case ExprNode::Kind::Var: out += n.var_name; break;
    case ExprNode::Kind::Neg:
        out += '-';
        child(n.a, 4); // parenthesize anything that is not atomic
        break;
    case ExprNode::Kind::Add:
        child(n.a, 1);
        out += " + ";
        child(n.b, 2);
        break;
    case ExprNode::Kind::Sub:
        child(n.a, 1);
        out += " - ";
        child(n.b, 2);
        break;
    case ExprNode::Kind::Mul:
        child(n.a, 2);
        out += "*";
        child(n.b, 3);
        break;
    case ExprNode::Kind::Div:
        child(n.a, 2);
        out += "/";
        child(n.b, 3);
        break;
    case ExprNode::Kind::Call: {
        const char* name = nullptr;
        for (const auto& f : kFuncs)
            if (f.fn == n.fn) name = f.name;
        out += name;
        out += '(';
        print_rec(*n.a, out);
        if (n.b) {
            out += ", ";
            print_rec(*n.b, out);
        }
        out += ')';
        break;
    }
    }
}

// --- compilation to a postfix program -------------------------------------------

struct Compiler {
    std::vector<tape::Instr> prog;
    std::size_t depth = 0, max_depth = 0;

    void push_effect(int delta) {
        depth = static_cast<std::size_t>(static_cast<long>(depth) + delta);
        if (depth > max_depth) max_depth = depth;
    }

    void emit(const ExprNode* n) {
        using K = ExprNode::Kind;
        using tape::Op;
        switch (n->kind) {
        case K::Num:
            prog.push_back({Op::PushNum, n->num, -1, 0, n});
            push_effect(+1);
            break;
        case K::Var:
            prog.push_back({Op::PushVar, 0.0, n->var, 0, n});
            push_effect(+1);
            break;
        case K::Neg:
            emit(n->a.get());
            prog.push_back({Op::Neg, 0.0, -1, 0, n});
            break;
        case K::Add:
        case K::Sub:
        case K::Mul:
        case K::Div: {
            emit(n->a.get());
            emit(n->b.get());
            Op op = n->kind == K::Add   ? Op::Add
                    : n->kind == K::Sub ? Op::Sub
                    : n->kind == K::Mul ? Op::Mul
                                        : Op::Div;
            prog.push_back({op, 0.0, -1, 0, n});
            push_effect(-1);
            break;
        }
        case K::Call: {
            if (n->fn == Func::Pow) {
                // Literal integer exponents run as repeated multiplication so
                // negative bases are legal and derivatives stay exact.
                if (n->b->kind == K::Num) {
                    double k = n->b->num;
                    if (k == std::floor(k) && std::abs(k) <= 64.0) {
                        emit(n->a.get());
                        prog.push_back({Op::PowInt, 0.0, -1, static_cast<long long>(k), n});
                        break;
                    }
                }
                emit(n->a.get());
                emit(n->b.get());
                prog.push_back({Op::PowGeneral, 0.0, -1, 0, n});
                push_effect(-1);
                break;
            }
            if (n->fn == Func::Atan2) {
                emit(n->a.get());
                emit(n->b.get());
                prog.push_back({Op::Atan2, 0.0, -1, 0, n});
                push_effect(-1);
                break;
            }
            emit(n->a.get());
            Op op;
            switch (n->fn) {
            case Func::Sin: op = Op::Sin; break;
            case Func::Cos: op = Op::Cos; break;
            case Func::Tan: op = Op::Tan; break;
            case Func::Exp: op = Op::Exp; break;
            case Func::Log: op = Op::Log; break;
            default: op = Op::Sqrt; break;
            }
            prog.push_back({op, 0.0, -1, 0, n});
            break;
        }
        }
    }
};

} // namespace

Expr::Expr(ExprPtr root) : root_(std::move(root)) {
    if (!root_) return;
    Compiler c;
    c.emit(root_.get());
    prog_ = std::move(c.prog);
    stack_need_ = c.max_depth;
}

std::string Expr::print() const { return root_ ? print_tree(root_) : std::string(); }

bool Expr::same_tree(const Expr& other) const { return weylgeo::same_tree(root_, other.root_); }

std::string print_tree(const ExprPtr& node) {
    std::string out;
    if (node) print_rec(*node, out);
    return out;
}

bool same_tree(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case ExprNode::Kind::Num: return a->num == b->num;
    case ExprNode::Kind::Var: return a->var == b->var && a->var_name == b->var_name;
    case ExprNode::Kind::Call:
        if (a->fn != b->fn) return false;
        [[fallthrough]];
    default:
        return same_tree(a->a, b->a) && same_tree(a->b, b->b);
    }
}

Expr parse(std::string_view src, const VarTable& vars) {
    if (src.empty()) throw ParseError(0, "empty expression", "expression");
    Parser p(src, vars);
    return Expr(p.run());
}

Jet2 eval_jet2(const Expr& e, std::span<const double> point, int seed_i, int seed_j) {
    std::vector<HyperDual<double>> x(point.size());
    for (std::size_t k = 0; k < point.size(); ++k) {
        x[k] = HyperDual<double>(point[k]);
        if (static_cast<int>(k) == seed_i) x[k].d1 = 1.0;
        if (static_cast<int>(k) == seed_j) x[k].d2 = 1.0;
    }
    HyperDual<double> r = e.eval(std::span<const HyperDual<double>>(x.data(), x.size()));
    return {r.v, r.d1, r.d2, r.d12};
}

std::pair<double, std::array<double, 4>> eval_grad4(const Expr& e, std::span<const double> point) {
    std::vector<Grad<double>> x(point.size());
    for (std::size_t k = 0; k < point.size(); ++k)
        x[k] = Grad<double>::seeded(point[k], k);
    Grad<double> r = e.eval(std::span<const Grad<double>>(x.data(), x.size()));
    return {r.v, r.d};
}

Expr expr_num(double v) { return Expr(num_node(v)); }

Expr expr_var(int index, std::string name) {
    ExprNode n;
    n.kind = ExprNode::Kind::Var;
    n.var = index;
    n.var_name = std::move(name);
    return Expr(make_node(std::move(n)));
}

namespace {
Expr binary(ExprNode::Kind k, const Expr& a, const Expr& b) {
    ExprNode n;
    n.kind = k;
    n.a = a.root();
    n.b = b.root();
    return Expr(make_node(std::move(n)));
}
} // namespace

Expr expr_neg(const Expr& a) {
    ExprNode n;
    n.kind = ExprNode::Kind::Neg;
    n.a = a.root();
    return Expr(make_node(std::move(n)));
}
Expr expr_add(const Expr& a, const Expr& b) { return binary(ExprNode::Kind::Add, a, b); }
Expr expr_sub(const Expr& a, const Expr& b) { return binary(ExprNode::Kind::Sub, a, b); }
Expr expr_mul(const Expr& a, const Expr& b) { return binary(ExprNode::Kind::Mul, a, b); }
Expr expr_div(const Expr& a, const Expr& b) { return binary(ExprNode::Kind::Div, a, b); }

Expr expr_call(Func f, const Expr& a) {
    ExprNode n;
    n.kind = ExprNode::Kind::Call;
    n.fn = f;
    n.a = a.root();
    return Expr(make_node(std::move(n)));
}
Expr expr_call(Func f, const Expr& a, const Expr& b) {
    ExprNode n;
    n.kind = ExprNode::Kind::Call;
    n.fn = f;
    n.a = a.root();
    n.b = b.root();
    return Expr(make_node(std::move(n)));
}

} // namespace weylgeo
