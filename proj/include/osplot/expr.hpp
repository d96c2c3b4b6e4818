#pragma once

// Arithmetic expressions over named real variables: parsing, evaluation,
// symbolic differentiation, and a compiled stack-machine form for hot loops.
//
// Grammar (recursive descent):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | name | name '(' expr ')' | '(' expr ')'
// Functions: sin cos tan sqrt exp log abs.  Constants: pi e.
// Implicit multiplication is rejected.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "osplot/error.hpp"

namespace osplot {

enum class Func { Sin, Cos, Tan, Sqrt, Exp, Log, Abs };
enum class BinOp { Add, Sub, Mul, Div, Pow };

inline std::string_view func_name(Func f) {
    switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Sqrt: return "sqrt";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Abs: return "abs";
    }
    return "?";
}

inline std::optional<Func> func_from_name(std::string_view name) {
    static constexpr std::array<std::pair<std::string_view, Func>, 7> table{{
        {"sin", Func::Sin}, {"cos", Func::Cos}, {"tan", Func::Tan},
        {"sqrt", Func::Sqrt}, {"exp", Func::Exp}, {"log", Func::Log},
        {"abs", Func::Abs},
    }};
    for (const auto& [n, f] : table)
        if (n == name) return f;
    return std::nullopt;
}

class Expr;

struct ExprNode {
    enum class Kind { Constant, Variable, Negate, Binary, Call };

    Kind kind = Kind::Constant;
    double value = 0.0;    // Constant
    std::string name;      // Variable
    BinOp op = BinOp::Add; // Binary
    Func func = Func::Sin; // Call
    std::vector<Expr> args;
};

/// Immutable expression tree handle. Copies share structure.
class Expr {
public:
    Expr() : node_(std::make_shared<const ExprNode>()) {}
    explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}

    const ExprNode& node() const { return *node_; }
    ExprNode::Kind kind() const { return node_->kind; }

    bool is_constant() const { return kind() == ExprNode::Kind::Constant; }
    bool is_constant(double v) const { return is_constant() && node_->value == v; }

private:
    std::shared_ptr<const ExprNode> node_;
};

// ---------------------------------------------------------------------------
// Raw constructors (no simplification)

namespace detail {

inline Expr make(ExprNode n) { return Expr(std::make_shared<const ExprNode>(std::move(n))); }

} // namespace detail

inline Expr constant(double v) {
    ExprNode n;
    n.kind = ExprNode::Kind::Constant;
    n.value = v;
    return detail::make(std::move(n));
}

inline Expr variable(std::string name) {
    ExprNode n;
    n.kind = ExprNode::Kind::Variable;
    n.name = std::move(name);
    return detail::make(std::move(n));
}

inline Expr raw_negate(Expr e) {
    ExprNode n;
    n.kind = ExprNode::Kind::Negate;
    n.args = {std::move(e)};
    return detail::make(std::move(n));
}

inline Expr raw_binary(BinOp op, Expr a, Expr b) {
    ExprNode n;
    n.kind = ExprNode::Kind::Binary;
    n.op = op;
    n.args = {std::move(a), std::move(b)};
    return detail::make(std::move(n));
}

inline Expr raw_call(Func f, Expr arg) {
    ExprNode n;
    n.kind = ExprNode::Kind::Call;
    n.func = f;
    n.args = {std::move(arg)};
    return detail::make(std::move(n));
}

// ---------------------------------------------------------------------------
// Evaluation primitives shared by the tree walker and the compiled form.
// They return nullopt on a domain error.

namespace detail {

inline std::optional<double> finite(double v) {
    if (std::isfinite(v)) return v;
    return std::nullopt;
}

inline std::optional<double> apply(Func f, double x) {
    switch (f) {
    case Func::Sin: return finite(std::sin(x));
    case Func::Cos: return finite(std::cos(x));
    case Func::Tan: return finite(std::tan(x));
    case Func::Sqrt:
        if (x < 0.0) return std::nullopt;
        return std::sqrt(x);
    case Func::Exp: return finite(std::exp(x));
    case Func::Log:
        if (!(x > 0.0)) return std::nullopt;
        return finite(std::log(x));
    case Func::Abs: return std::fabs(x);
    }
    return std::nullopt;
}

inline std::optional<double> apply(BinOp op, double a, double b) {
    switch (op) {
    case BinOp::Add: return finite(a + b);
    case BinOp::Sub: return finite(a - b);
    case BinOp::Mul: return finite(a * b);
    case BinOp::Div:
        if (b == 0.0) return std::nullopt;
        return finite(a / b);
    case BinOp::Pow: return finite(std::pow(a, b));
    }
    return std::nullopt;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Folding constructors, used by diff and by callers building expressions.

inline Expr negate(Expr e) {
    if (e.is_constant()) return constant(-e.node().value);
    if (e.kind() == ExprNode::Kind::Negate) return e.node().args[0];
    return raw_negate(std::move(e));
}

inline Expr binary(BinOp op, Expr a, Expr b) {
    if (a.is_constant() && b.is_constant()) {
        if (auto v = detail::apply(op, a.node().value, b.node().value)) return constant(*v);
        return raw_binary(op, std::move(a), std::move(b));
    }
    switch (op) {
    case BinOp::Add:
        if (a.is_constant(0.0)) return b;
        if (b.is_constant(0.0)) return a;
        if (b.kind() == ExprNode::Kind::Negate) return binary(BinOp::Sub, a, b.node().args[0]);
        break;
    case BinOp::Sub:
        if (b.is_constant(0.0)) return a;
        if (a.is_constant(0.0)) return negate(std::move(b));
        if (b.kind() == ExprNode::Kind::Negate) return binary(BinOp::Add, a, b.node().args[0]);
        break;
    case BinOp::Mul:
        if (a.is_constant(0.0) || b.is_constant(0.0)) return constant(0.0);
        if (a.is_constant(1.0)) return b;
        if (b.is_constant(1.0)) return a;
        if (a.is_constant(-1.0)) return negate(std::move(b));
        if (b.is_constant(-1.0)) return negate(std::move(a));
        if (b.kind() == ExprNode::Kind::Negate)
            return negate(binary(BinOp::Mul, std::move(a), b.node().args[0]));
        if (a.kind() == ExprNode::Kind::Negate)
            return negate(binary(BinOp::Mul, a.node().args[0], std::move(b)));
        break;
    case BinOp::Div:
        if (a.is_constant(0.0)) return constant(0.0);
        if (b.is_constant(1.0)) return a;
        break;
    case BinOp::Pow:
        if (b.is_constant(0.0)) return constant(1.0);
        if (b.is_constant(1.0)) return a;
        break;
    }
    return raw_binary(op, std::move(a), std::move(b));
}

inline Expr call(Func f, Expr arg) {
    if (arg.is_constant()) {
        if (auto v = detail::apply(f, arg.node().value)) return constant(*v);
    }
    return raw_call(f, std::move(arg));
}

inline Expr operator+(Expr a, Expr b) { return binary(BinOp::Add, std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return binary(BinOp::Sub, std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return binary(BinOp::Mul, std::move(a), std::move(b)); }
inline Expr operator/(Expr a, Expr b) { return binary(BinOp::Div, std::move(a), std::move(b)); }
inline Expr operator-(Expr a) { return negate(std::move(a)); }
inline Expr pow(Expr a, Expr b) { return binary(BinOp::Pow, std::move(a), std::move(b)); }

// ---------------------------------------------------------------------------
// Parser

namespace detail {

class Parser {
public:
    Parser(std::string_view text, const std::set<std::string, std::less<>>* allowed)
        : text_(text), allowed_(allowed) {}

    Expr parse_all() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
        Expr e = parse_expr();
        skip_ws();
        if (pos_ < text_.size())
            throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                       text_[pos_] == '\n' || text_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text_.size())
                throw ParseError(std::string("expected '") + c + "' before end of input", pos_);
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    Expr parse_expr() {
        Expr lhs = parse_term();
        for (;;) {
            if (accept('+')) lhs = raw_binary(BinOp::Add, lhs, parse_term());
            else if (accept('-')) lhs = raw_binary(BinOp::Sub, lhs, parse_term());
            else return lhs;
        }
    }

    Expr parse_term() {
        Expr lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = raw_binary(BinOp::Mul, lhs, parse_unary());
            else if (accept('/')) lhs = raw_binary(BinOp::Div, lhs, parse_unary());
            else return lhs;
        }
    }

    Expr parse_unary() {
        if (accept('-')) return raw_negate(parse_unary());
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        if (accept('^')) return raw_binary(BinOp::Pow, base, parse_unary());
        return base;
    }

    static bool is_ident_start(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    }
    static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }

    Expr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            expect(')');
            return e;
        }
        if (is_digit(c) || c == '.') return parse_number();
        if (is_ident_start(c)) return parse_identifier();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
        }
        // Exponent only when digits follow, so "2*e" and "2e" stay distinguishable.
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t q = pos_ + 1;
            if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
            if (q < text_.size() && is_digit(text_[q])) {
                pos_ = q;
                while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
            }
        }
        double v = 0.0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) throw ParseError("malformed number", start);
        return constant(v);
    }

    Expr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        const std::string name(text_.substr(start, pos_ - start));

        std::size_t save = pos_;
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            auto f = func_from_name(name);
            if (!f) throw UnknownIdentifier(name, start);
            ++pos_;
            Expr arg = parse_expr();
            if (accept(',')) throw ParseError("function '" + name + "' takes one argument", pos_ - 1);
            expect(')');
            return raw_call(*f, arg);
        }
        pos_ = save;

        if (name == "pi") return constant(std::numbers::pi);
        if (name == "e") return constant(std::numbers::e);
        if (func_from_name(name)) throw ParseError("function '" + name + "' needs an argument", start);
        if (allowed_ && !allowed_->contains(name)) throw UnknownIdentifier(name, start);
        return variable(name);
    }

    std::string_view text_;
    const std::set<std::string, std::less<>>* allowed_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses `text`. Any variable name is accepted.
inline Expr parse(std::string_view text) { return detail::Parser(text, nullptr).parse_all(); }

/// Parses `text`, rejecting variables outside `allowed` with UnknownIdentifier.
inline Expr parse(std::string_view text, const std::set<std::string, std::less<>>& allowed) {
    return detail::Parser(text, &allowed).parse_all();
}

/// Parses "lhs = rhs" as lhs-(rhs); text without '=' is parsed as is.
inline Expr parse_equation(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) return parse(text);
    if (text.find('=', eq + 1) != std::string_view::npos)
        throw ParseError("more than one '='", text.find('=', eq + 1));
    Expr lhs = parse(text.substr(0, eq));
    Expr rhs;
    try {
        rhs = parse(text.substr(eq + 1));
    } catch (const ParseError& e) {
        throw ParseError("in right-hand side: " + std::string(e.what()), eq + 1 + e.offset());
    }
    return raw_binary(BinOp::Sub, lhs, rhs);
}

// ---------------------------------------------------------------------------
// Tree evaluation

using Bindings = std::map<std::string, double, std::less<>>;

namespace detail {

inline double eval_node(const Expr& e, const Bindings& b) {
    const ExprNode& n = e.node();
    switch (n.kind) {
    case ExprNode::Kind::Constant: return n.value;
    case ExprNode::Kind::Variable: {
        auto it = b.find(n.name);
        if (it == b.end()) throw UnboundVariable(n.name);
        if (!std::isfinite(it->second)) throw DomainError("variable '" + n.name + "' is not finite");
        return it->second;
    }
    case ExprNode::Kind::Negate: return -eval_node(n.args[0], b);
    case ExprNode::Kind::Binary: {
        const double x = eval_node(n.args[0], b);
        const double y = eval_node(n.args[1], b);
        if (auto v = apply(n.op, x, y)) return *v;
        throw DomainError(n.op == BinOp::Div && y == 0.0 ? "division by zero"
                                                         : "arithmetic result is not finite");
    }
    case ExprNode::Kind::Call: {
        const double x = eval_node(n.args[0], b);
        if (auto v = apply(n.func, x)) return *v;
        throw DomainError(std::string(func_name(n.func)) + " undefined at " + std::to_string(x));
    }
    }
    return 0.0;
}

} // namespace detail

/// Evaluates `e` with every free variable taken from `bindings`.
/// Throws UnboundVariable or DomainError; never returns NaN or Inf.
inline double eval(const Expr& e, const Bindings& bindings) { return detail::eval_node(e, bindings); }

// ---------------------------------------------------------------------------
// Queries and rewriting

inline void collect_variables(const Expr& e, std::set<std::string, std::less<>>& out) {
    const ExprNode& n = e.node();
    if (n.kind == ExprNode::Kind::Variable) out.insert(n.name);
    for (const Expr& a : n.args) collect_variables(a, out);
}

inline std::set<std::string, std::less<>> free_variables(const Expr& e) {
    std::set<std::string, std::less<>> out;
    collect_variables(e, out);
    return out;
}

inline bool depends_on(const Expr& e, std::string_view var) {
    const ExprNode& n = e.node();
    if (n.kind == ExprNode::Kind::Variable) return n.name == var;
    return std::any_of(n.args.begin(), n.args.end(),
                       [&](const Expr& a) { return depends_on(a, var); });
}

/// Replaces every occurrence of variable `var` by `replacement`.
inline Expr substitute(const Expr& e, std::string_view var, const Expr& replacement) {
    const ExprNode& n = e.node();
    switch (n.kind) {
    case ExprNode::Kind::Constant: return e;
    case ExprNode::Kind::Variable: return n.name == var ? replacement : e;
    case ExprNode::Kind::Negate: return raw_negate(substitute(n.args[0], var, replacement));
    case ExprNode::Kind::Binary:
        return raw_binary(n.op, substitute(n.args[0], var, replacement),
                          substitute(n.args[1], var, replacement));
    case ExprNode::Kind::Call: return raw_call(n.func, substitute(n.args[0], var, replacement));
    }
    return e;
}

// ---------------------------------------------------------------------------
// Symbolic differentiation

inline Expr diff(const Expr& e, std::string_view var) {
    const ExprNode& n = e.node();
    switch (n.kind) {
    case ExprNode::Kind::Constant: return constant(0.0);
    case ExprNode::Kind::Variable: return constant(n.name == var ? 1.0 : 0.0);
    case ExprNode::Kind::Negate: return negate(diff(n.args[0], var));
    case ExprNode::Kind::Binary: {
        const Expr& a = n.args[0];
        const Expr& b = n.args[1];
        switch (n.op) {
        case BinOp::Add: return diff(a, var) + diff(b, var);
        case BinOp::Sub: return diff(a, var) - diff(b, var);
        case BinOp::Mul: return diff(a, var) * b + a * diff(b, var);
        case BinOp::Div:
            return (diff(a, var) * b - a * diff(b, var)) / pow(b, constant(2.0));
        case BinOp::Pow: {
            const bool base_varies = depends_on(a, var);
            const bool exp_varies = depends_on(b, var);
            if (!base_varies && !exp_varies) return constant(0.0);
            if (!exp_varies)
                return b * pow(a, b - constant(1.0)) * diff(a, var);
            if (!base_varies)
                return e * call(Func::Log, a) * diff(b, var);
            return e * (diff(b, var) * call(Func::Log, a) + b * diff(a, var) / a);
        }
        }
        break;
    }
    case ExprNode::Kind::Call: {
        const Expr& u = n.args[0];
        Expr du = diff(u, var);
        if (du.is_constant(0.0)) return du;
        switch (n.func) {
        case Func::Sin: return call(Func::Cos, u) * du;
        case Func::Cos: return -(call(Func::Sin, u) * du);
        case Func::Tan: return du / pow(call(Func::Cos, u), constant(2.0));
        case Func::Sqrt: return du / (constant(2.0) * call(Func::Sqrt, u));
        case Func::Exp: return call(Func::Exp, u) * du;
        case Func::Log: return du / u;
        case Func::Abs: return du * u / call(Func::Abs, u);
        }
        break;
    }
    }
    throw Error("cannot differentiate expression");
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

// 1: + -   2: * /   3: unary minus   4: ^   5: atoms
inline int precedence(const Expr& e) {
    const ExprNode& n = e.node();
    switch (n.kind) {
    case ExprNode::Kind::Constant: return n.value < 0.0 ? 3 : 5;
    case ExprNode::Kind::Variable:
    case ExprNode::Kind::Call: return 5;
    case ExprNode::Kind::Negate: return 3;
    case ExprNode::Kind::Binary:
        switch (n.op) {
        case BinOp::Add:
        case BinOp::Sub: return 1;
        case BinOp::Mul:
        case BinOp::Div: return 2;
        case BinOp::Pow: return 4;
        }
    }
    return 5;
}

inline void print(const Expr& e, std::string& out);

inline void print_wrapped(const Expr& e, bool parens, std::string& out) {
    if (parens) out += '(';
    print(e, out);
    if (parens) out += ')';
}

inline void print(const Expr& e, std::string& out) {
    const ExprNode& n = e.node();
    switch (n.kind) {
    case ExprNode::Kind::Constant:
        if (n.value == std::numbers::pi) out += "pi";
        else if (n.value == std::numbers::e) out += "e";
        else out += format_number(n.value);
        return;
    case ExprNode::Kind::Variable: out += n.name; return;
    case ExprNode::Kind::Negate:
        out += '-';
        print_wrapped(n.args[0], precedence(n.args[0]) < 2, out);
        return;
    case ExprNode::Kind::Call:
        out += func_name(n.func);
        out += '(';
        print(n.args[0], out);
        out += ')';
        return;
    case ExprNode::Kind::Binary: {
        const int p = precedence(e);
        const int pl = precedence(n.args[0]);
        const int pr = precedence(n.args[1]);
        static constexpr std::array<char, 5> sym{'+', '-', '*', '/', '^'};
        if (n.op == BinOp::Pow) {
            print_wrapped(n.args[0], pl <= p, out);
            out += '^';
            print_wrapped(n.args[1], pr < 3, out);
            return;
        }
        print_wrapped(n.args[0], pl < p, out);
        out += sym[static_cast<std::size_t>(n.op)];
        const bool strict = n.op == BinOp::Sub || n.op == BinOp::Div;
        print_wrapped(n.args[1], strict ? pr <= p : pr < p || pr == 3, out);
        return;
    }
    }
}

} // namespace detail

/// Renders `e` in the parser's syntax with minimal parentheses.
inline std::string to_string(const Expr& e) {
    std::string out;
    detail::print(e, out);
    return out;
}

// ---------------------------------------------------------------------------
// Compiled form

/// Flat postfix program with variables resolved to argument slots.
/// Evaluation allocates nothing for expressions of modest depth.
class CompiledExpr {
public:
    CompiledExpr() = default;

    CompiledExpr(const Expr& e, std::span<const std::string> vars) {
        emit(e, vars);
        int depth = 0;
        for (const Op& op : code_) {
            depth += op.stack_effect();
            max_depth_ = std::max(max_depth_, depth);
        }
        arity_ = vars.size();
    }

    std::size_t arity() const { return arity_; }

    /// Returns nullopt where the expression is undefined.
    std::optional<double> try_eval(std::span<const double> args) const {
        std::array<double, 64> small{};
        std::vector<double> big;
        double* stack = small.data();
        if (max_depth_ > static_cast<int>(small.size())) {
            big.resize(static_cast<std::size_t>(max_depth_));
            stack = big.data();
        }
        int top = 0;
        for (const Op& op : code_) {
            switch (op.code) {
            case Code::Const: stack[top++] = op.value; break;
            case Code::Var:
                stack[top++] = args[op.slot];
                if (!std::isfinite(stack[top - 1])) return std::nullopt;
                break;
            case Code::Neg: stack[top - 1] = -stack[top - 1]; break;
            case Code::Bin: {
                auto v = detail::apply(op.op, stack[top - 2], stack[top - 1]);
                if (!v) return std::nullopt;
                stack[top - 2] = *v;
                --top;
                break;
            }
            case Code::Call: {
                auto v = detail::apply(op.func, stack[top - 1]);
                if (!v) return std::nullopt;
                stack[top - 1] = *v;
                break;
            }
            }
        }
        return stack[0];
    }

    /// Throws DomainError where the expression is undefined.
    double operator()(std::span<const double> args) const {
        if (auto v = try_eval(args)) return *v;
        throw DomainError("expression undefined at the given point");
    }

    std::optional<double> try_eval(double a) const { return try_eval(std::span<const double>(&a, 1)); }
    std::optional<double> try_eval(double a, double b) const {
        const std::array<double, 2> v{a, b};
        return try_eval(std::span<const double>(v));
    }

private:
    enum class Code { Const, Var, Neg, Bin, Call };

    struct Op {
        Code code;
        double value = 0.0;
        std::size_t slot = 0;
        BinOp op = BinOp::Add;
        Func func = Func::Sin;

        int stack_effect() const {
            switch (code) {
            case Code::Const:
            case Code::Var: return 1;
            case Code::Bin: return -1;
            default: return 0;
            }
        }
    };

    void emit(const Expr& e, std::span<const std::string> vars) {
        const ExprNode& n = e.node();
        switch (n.kind) {
        case ExprNode::Kind::Constant: code_.push_back({Code::Const, n.value}); return;
        case ExprNode::Kind::Variable: {
            auto it = std::find(vars.begin(), vars.end(), n.name);
            if (it == vars.end()) throw UnboundVariable(n.name);
            Op op{Code::Var};
            op.slot = static_cast<std::size_t>(it - vars.begin());
            code_.push_back(op);
            return;
        }
        case ExprNode::Kind::Negate:
            emit(n.args[0], vars);
            code_.push_back({Code::Neg});
            return;
        case ExprNode::Kind::Binary: {
            emit(n.args[0], vars);
            emit(n.args[1], vars);
            Op op{Code::Bin};
            op.op = n.op;
            code_.push_back(op);
            return;
        }
        case ExprNode::Kind::Call: {
            emit(n.args[0], vars);
            Op op{Code::Call};
            op.func = n.func;
            code_.push_back(op);
            return;
        }
        }
    }

    std::vector<Op> code_;
    int max_depth_ = 0;
    std::size_t arity_ = 0;
};

inline CompiledExpr compile(const Expr& e, std::initializer_list<std::string> vars) {
    const std::vector<std::string> v(vars);
    return CompiledExpr(e, v);
}

inline CompiledExpr compile(const Expr& e, const std::vector<std::string>& vars) {
    return CompiledExpr(e, vars);
}

} // namespace osplot
