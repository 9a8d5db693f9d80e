#include "isosing/expression.hpp"

#include <cctype>
#include <charconv>
#include <cstring>
#include <string>

namespace isosing {

using Kind = Expression::Kind;
using Function = Expression::Function;
using NodePtr = Expression::NodePtr;
using Node = Expression::Node;

namespace detail {

void throw_domain(const char* what, std::size_t position) { throw ExpressionError(what, position); }

}  // namespace detail

namespace {

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

NodePtr literal(double v, std::size_t pos = 0) {
    Node n;
    n.kind = Kind::literal;
    n.value = v;
    n.position = pos;
    return make(std::move(n));
}

NodePtr variable_node(Variable v, std::size_t pos = 0) {
    Node n;
    n.kind = Kind::variable;
    n.var = v;
    n.position = pos;
    return make(std::move(n));
}

NodePtr binary(Kind k, NodePtr a, NodePtr b, std::size_t pos = 0) {
    Node n;
    n.kind = k;
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    n.position = pos;
    return make(std::move(n));
}

NodePtr unary_call(Function f, NodePtr a, std::size_t pos = 0) {
    Node n;
    n.kind = Kind::call;
    n.fn = f;
    n.lhs = std::move(a);
    n.position = pos;
    return make(std::move(n));
}

NodePtr negate(NodePtr a, std::size_t pos = 0) {
    Node n;
    n.kind = Kind::neg;
    n.lhs = std::move(a);
    n.position = pos;
    return make(std::move(n));
}

bool is_lit(const NodePtr& n, double v) { return n->kind == Kind::literal && n->value == v; }
bool is_lit(const NodePtr& n) { return n->kind == Kind::literal; }

// Simplifying constructors used by differentiation.
NodePtr s_add(NodePtr a, NodePtr b) {
    if (is_lit(a, 0.0)) return b;
    if (is_lit(b, 0.0)) return a;
    if (is_lit(a) && is_lit(b)) return literal(a->value + b->value);
    return binary(Kind::add, std::move(a), std::move(b));
}

NodePtr s_neg(NodePtr a) {
    if (is_lit(a)) return literal(-a->value);
    if (a->kind == Kind::neg) return a->lhs;
    return negate(std::move(a));
}

NodePtr s_sub(NodePtr a, NodePtr b) {
    if (is_lit(b, 0.0)) return a;
    if (is_lit(a, 0.0)) return s_neg(std::move(b));
    if (is_lit(a) && is_lit(b)) return literal(a->value - b->value);
    return binary(Kind::sub, std::move(a), std::move(b));
}

NodePtr s_mul(NodePtr a, NodePtr b) {
    if (is_lit(a, 0.0) || is_lit(b, 0.0)) return literal(0.0);
    if (is_lit(a, 1.0)) return b;
    if (is_lit(b, 1.0)) return a;
    if (is_lit(a, -1.0)) return s_neg(std::move(b));
    if (is_lit(b, -1.0)) return s_neg(std::move(a));
    if (is_lit(a) && is_lit(b)) return literal(a->value * b->value);
    return binary(Kind::mul, std::move(a), std::move(b));
}

NodePtr s_div(NodePtr a, NodePtr b) {
    if (is_lit(a, 0.0)) return literal(0.0);
    if (is_lit(b, 1.0)) return a;
    return binary(Kind::div, std::move(a), std::move(b));
}

NodePtr s_pow(NodePtr a, NodePtr b) {
    if (is_lit(b, 0.0)) return literal(1.0);
    if (is_lit(b, 1.0)) return a;
    return binary(Kind::pow, std::move(a), std::move(b));
}

bool depends(const Node& n, Variable v) {
    switch (n.kind) {
        case Kind::literal: return false;
        case Kind::variable: return n.var == v;
        case Kind::neg:
        case Kind::call: return depends(*n.lhs, v);
        default: return depends(*n.lhs, v) || depends(*n.rhs, v);
    }
}

bool constant_node(const Node& n) {
    return !depends(n, Variable::x) && !depends(n, Variable::y) && !depends(n, Variable::z);
}

NodePtr diff(const NodePtr& np, Variable v) {
    const Node& n = *np;
    if (!depends(n, v)) return literal(0.0);
    switch (n.kind) {
        case Kind::literal: return literal(0.0);
        case Kind::variable: return literal(1.0);
        case Kind::add: return s_add(diff(n.lhs, v), diff(n.rhs, v));
        case Kind::sub: return s_sub(diff(n.lhs, v), diff(n.rhs, v));
        case Kind::neg: return s_neg(diff(n.lhs, v));
        case Kind::mul:
            return s_add(s_mul(diff(n.lhs, v), n.rhs), s_mul(n.lhs, diff(n.rhs, v)));
        case Kind::div:
            // (a/b)' = a'/b - a b'/b^2
            return s_sub(s_div(diff(n.lhs, v), n.rhs),
                         s_div(s_mul(n.lhs, diff(n.rhs, v)), s_pow(n.rhs, literal(2.0))));
        case Kind::pow: {
            const NodePtr& a = n.lhs;
            const NodePtr& b = n.rhs;
            if (constant_node(*b)) {
                NodePtr reduced = is_lit(b) ? literal(b->value - 1.0) : s_sub(b, literal(1.0));
                return s_mul(s_mul(b, s_pow(a, reduced)), diff(a, v));
            }
            // (a^b)' = a^b (b' log a + b a'/a)
            NodePtr inner = s_add(s_mul(diff(b, v), unary_call(Function::log, a)),
                                  s_div(s_mul(b, diff(a, v)), a));
            return s_mul(np, inner);
        }
        case Kind::call: {
            const NodePtr& a = n.lhs;
            NodePtr da = diff(a, v);
            switch (n.fn) {
                case Function::exp: return s_mul(np, da);
                case Function::log: return s_div(da, a);
                case Function::sin: return s_mul(unary_call(Function::cos, a), da);
                case Function::cos: return s_neg(s_mul(unary_call(Function::sin, a), da));
                case Function::sinh: return s_mul(unary_call(Function::cosh, a), da);
                case Function::cosh: return s_mul(unary_call(Function::sinh, a), da);
                case Function::sqrt: return s_div(da, s_mul(literal(2.0), np));
            }
        }
    }
    return literal(0.0);
}

// ---------------------------------------------------------------- parsing

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected token '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ExpressionError(what, pos_); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            skip_ws();
            const std::size_t at = pos_;
            if (accept('+')) {
                lhs = binary(Kind::add, lhs, term(), at);
            } else if (accept('-')) {
                lhs = binary(Kind::sub, lhs, term(), at);
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            skip_ws();
            const std::size_t at = pos_;
            if (accept('*')) {
                lhs = binary(Kind::mul, lhs, unary(), at);
            } else if (accept('/')) {
                lhs = binary(Kind::div, lhs, unary(), at);
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        skip_ws();
        const std::size_t at = pos_;
        if (accept('-')) return negate(unary(), at);
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        skip_ws();
        const std::size_t at = pos_;
        if (accept('^')) return binary(Kind::pow, base, unary(), at);
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const std::size_t at = pos_;
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t end = pos_;
            while (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end]))) ++end;
            const std::string_view word = text_.substr(pos_, end - pos_);
            pos_ = end;
            if (word == "x") return variable_node(Variable::x, at);
            if (word == "y") return variable_node(Variable::y, at);
            if (word == "z") return variable_node(Variable::z, at);
            Function f;
            if (word == "exp") f = Function::exp;
            else if (word == "log") f = Function::log;
            else if (word == "sin") f = Function::sin;
            else if (word == "cos") f = Function::cos;
            else if (word == "sinh") f = Function::sinh;
            else if (word == "cosh") f = Function::cosh;
            else if (word == "sqrt") f = Function::sqrt;
            else {
                pos_ = at;
                fail("unknown identifier '" + std::string(word) + "'");
            }
            if (!accept('(')) fail("expected '(' after function name");
            NodePtr arg = expr();
            if (!accept(')')) fail("expected ')'");
            return unary_call(f, arg, at);
        }
        if (accept('(')) {
            NodePtr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        fail("unexpected token '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const std::size_t at = pos_;
        double value = 0.0;
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc()) fail("malformed number");
        pos_ += static_cast<std::size_t>(ptr - first);
        return literal(value, at);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- printing

int precedence(const Node& n) {
    switch (n.kind) {
        case Kind::add:
        case Kind::sub: return 1;
        case Kind::mul:
        case Kind::div: return 2;
        case Kind::neg: return 3;
        case Kind::pow: return 4;
        case Kind::literal: return n.value < 0 ? 3 : 5;
        default: return 5;
    }
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string print(const Node& n);

std::string wrap(const Node& n, int min_prec) {
    std::string s = print(n);
    return precedence(n) < min_prec ? "(" + s + ")" : s;
}

std::string print(const Node& n) {
    switch (n.kind) {
        case Kind::literal: return format_number(n.value);
        case Kind::variable: return n.var == Variable::x ? "x" : (n.var == Variable::y ? "y" : "z");
        case Kind::add: return wrap(*n.lhs, 1) + " + " + wrap(*n.rhs, 2);
        case Kind::sub: return wrap(*n.lhs, 1) + " - " + wrap(*n.rhs, 2);
        case Kind::mul: return wrap(*n.lhs, 2) + " * " + wrap(*n.rhs, 3);
        case Kind::div: return wrap(*n.lhs, 2) + " / " + wrap(*n.rhs, 3);
        case Kind::neg: return "-" + wrap(*n.lhs, 3);
        case Kind::pow: return wrap(*n.lhs, 5) + "^" + wrap(*n.rhs, 3);
        case Kind::call: {
            static constexpr const char* names[] = {"exp", "log", "sin", "cos", "sinh", "cosh", "sqrt"};
            return std::string(names[static_cast<int>(n.fn)]) + "(" + print(*n.lhs) + ")";
        }
    }
    return {};
}

}  // namespace

Expression::Expression() : root_(literal(0.0)) {}

Expression Expression::parse(std::string_view text) { return Expression(Parser(text).parse()); }

Expression Expression::constant(double value) { return Expression(literal(value)); }

Expression Expression::variable(Variable v) { return Expression(variable_node(v)); }

Expression Expression::derivative(Variable v) const { return Expression(diff(root_, v)); }

bool Expression::depends_on(Variable v) const { return depends(*root_, v); }

bool Expression::is_constant() const { return constant_node(*root_); }

std::string Expression::to_string() const { return print(*root_); }

}  // namespace isosing
