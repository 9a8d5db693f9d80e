#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <type_traits>

#include "isosing/error.hpp"
#include "isosing/series.hpp"

namespace isosing {

enum class Variable { x, y, z };

// Parse or evaluation failure with a 0-based character offset into the
// source text.
class ExpressionError : public InputError {
public:
    ExpressionError(const std::string& what, std::size_t position)
        : InputError(what + " at column " + std::to_string(position + 1)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// Immutable arithmetic expression over the variables x, y, z.
//
// Grammar (lowest to highest precedence):
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?          right associative
//   atom   := number | x | y | z | func '(' expr ')' | '(' expr ')'
//   func   := exp | log | sin | cos | sinh | cosh | sqrt
class Expression {
public:
    enum class Kind { literal, variable, add, sub, mul, div, pow, neg, call };
    enum class Function { exp, log, sin, cos, sinh, cosh, sqrt };

    struct Node {
        Kind kind = Kind::literal;
        double value = 0.0;
        Variable var = Variable::x;
        Function fn = Function::exp;
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
        std::size_t position = 0;
    };
    using NodePtr = std::shared_ptr<const Node>;

    Expression();  // the constant 0
    explicit Expression(NodePtr root) : root_(std::move(root)) {}

    static Expression parse(std::string_view text);
    static Expression constant(double value);
    static Expression variable(Variable v);

    // Symbolic partial derivative with light algebraic simplification.
    Expression derivative(Variable v) const;

    bool depends_on(Variable v) const;
    bool is_constant() const;
    std::string to_string() const;

    const Node& root() const { return *root_; }

    template <class T>
    T evaluate(const T& x, const T& y, const T& z) const {
        return eval(*root_, x, y, z);
    }

private:
    template <class T>
    static T eval(const Node& n, const T& x, const T& y, const T& z);

    NodePtr root_;
};

namespace detail {

[[noreturn]] void throw_domain(const char* what, std::size_t position);

template <class T>
T integer_power(const T& base, long n) {
    if (n == 0) return constant_like(base, 1.0);
    if (n < 0) return 1.0 / integer_power(base, -n);
    T result = base;
    for (long i = 1; i < n; ++i) result = result * base;
    return result;
}

}  // namespace detail

template <class T>
T Expression::eval(const Node& n, const T& x, const T& y, const T& z) {
    using isosing::cos;
    using isosing::cosh;
    using isosing::exp;
    using isosing::log;
    using isosing::pow;
    using isosing::sin;
    using isosing::sinh;
    using isosing::sqrt;
    using std::cos;
    using std::cosh;
    using std::exp;
    using std::log;
    using std::pow;
    using std::sin;
    using std::sinh;
    using std::sqrt;
    switch (n.kind) {
        case Kind::literal:
            return constant_like(x, n.value);
        case Kind::variable:
            return n.var == Variable::x ? x : (n.var == Variable::y ? y : z);
        case Kind::add:
            return eval(*n.lhs, x, y, z) + eval(*n.rhs, x, y, z);
        case Kind::sub:
            return eval(*n.lhs, x, y, z) - eval(*n.rhs, x, y, z);
        case Kind::mul:
            return eval(*n.lhs, x, y, z) * eval(*n.rhs, x, y, z);
        case Kind::div: {
            T den = eval(*n.rhs, x, y, z);
            if (any_zero_leading(den)) {
                detail::throw_domain("division by zero", n.position);
            }
            return eval(*n.lhs, x, y, z) / den;
        }
        case Kind::neg:
            return -eval(*n.lhs, x, y, z);
        case Kind::pow: {
            T base = eval(*n.lhs, x, y, z);
            const Node& e = *n.rhs;
            if (e.kind == Kind::literal && e.value == std::floor(e.value) && std::abs(e.value) <= 64) {
                return detail::integer_power(base, static_cast<long>(e.value));
            }
            if constexpr (std::is_same_v<T, double> || std::is_same_v<T, Quad>) {
                using isosing::floor;
                using std::floor;
                const T ev = eval(e, x, y, z);
                if (!(base > 0.0) && ev != floor(ev)) {
                    detail::throw_domain("non-integer power of a nonpositive base", n.position);
                }
                if (base == 0.0 && ev < 0.0) detail::throw_domain("division by zero", n.position);
                return pow(base, ev);
            } else {
                if (!(min_leading(base) > 0.0)) {
                    detail::throw_domain("non-integer power of a nonpositive base", n.position);
                }
                if (e.kind == Kind::literal) return pow(base, e.value);
                return exp(eval(e, x, y, z) * log(base));
            }
        }
        case Kind::call: {
            T a = eval(*n.lhs, x, y, z);
            switch (n.fn) {
                case Function::exp: return exp(a);
                case Function::log:
                    if (!(min_leading(a) > 0.0)) detail::throw_domain("log of a nonpositive value", n.position);
                    return log(a);
                case Function::sin: return sin(a);
                case Function::cos: return cos(a);
                case Function::sinh: return sinh(a);
                case Function::cosh: return cosh(a);
                case Function::sqrt:
                    if (!(min_leading(a) >= 0.0)) detail::throw_domain("sqrt of a negative value", n.position);
                    return sqrt(a);
            }
        }
    }
    return constant_like(x, 0.0);
}

}  // namespace isosing
