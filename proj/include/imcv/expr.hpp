#pragma once

#include "imcv/interval.hpp"

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace imcv {

/// Immutable expression tree over variables x1..xn.
///
/// Copies share the underlying nodes. Variables are stored zero-based
/// (`x1` is index 0).
class Expr {
public:
    enum class Kind { constant, variable, neg, add, sub, mul, div, pow, exp, sin, cos, min, max };

    Expr() : Expr(constant(0.0)) {}

    static Expr constant(double value);
    static Expr variable(std::size_t index);
    static Expr unary(Kind kind, Expr arg);
    static Expr binary(Kind kind, Expr lhs, Expr rhs);

    [[nodiscard]] Kind kind() const;
    [[nodiscard]] double value() const;      // constants only
    [[nodiscard]] std::size_t index() const; // variables only
    [[nodiscard]] std::span<const Expr> args() const;

    /// One past the largest variable index referenced (0 for closed terms).
    [[nodiscard]] std::size_t arity() const;
    [[nodiscard]] bool is_constant() const { return kind() == Kind::constant; }
    /// True when the expression is the literal 0.
    [[nodiscard]] bool is_zero() const { return is_constant() && value() == 0.0; }

    [[nodiscard]] std::string to_string() const;

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);

/// Evaluate at a point. Throws domain_error on division by zero or invalid power.
double eval_point(const Expr& e, std::span<const double> x);

/// Natural interval extension; the result contains e(x) for every x in `box`.
Interval eval_interval(const Expr& e, const IntervalBox& box);

/// Interval enclosure of the gradient of `e` over `box` (forward mode).
std::vector<Interval> eval_gradient(const Expr& e, const IntervalBox& box);

/// Parse infix text such as `0.5*x1 + sin(x2)^2`.
///
/// `n_vars` bounds the admissible variable indices (x1..x<n_vars>); pass 0
/// to accept any index. Throws parse_error with a 1-based column.
Expr parse_expr(std::string_view text, std::size_t n_vars = 0);

} // namespace imcv
