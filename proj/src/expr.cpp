#include "imcv/expr.hpp"

#include "imcv/errors.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace imcv {

struct Expr::Node {
    Kind kind;
    double value = 0.0;
    std::size_t index = 0;
    std::vector<Expr> args;
    std::size_t arity = 0;
};

Expr Expr::constant(double value)
{
    return Expr(std::make_shared<const Node>(Node{Kind::constant, value, 0, {}, 0}));
}

Expr Expr::variable(std::size_t index)
{
    return Expr(std::make_shared<const Node>(Node{Kind::variable, 0.0, index, {}, index + 1}));
}

Expr Expr::unary(Kind kind, Expr arg)
{
    const std::size_t a = arg.arity();
    return Expr(std::make_shared<const Node>(Node{kind, 0.0, 0, {std::move(arg)}, a}));
}

Expr Expr::binary(Kind kind, Expr lhs, Expr rhs)
{
    const std::size_t a = std::max(lhs.arity(), rhs.arity());
    return Expr(std::make_shared<const Node>(Node{kind, 0.0, 0, {std::move(lhs), std::move(rhs)}, a}));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
std::size_t Expr::index() const { return node_->index; }
std::span<const Expr> Expr::args() const { return node_->args; }
std::size_t Expr::arity() const { return node_->arity; }

std::string Expr::to_string() const
{
    std::ostringstream os;
    os.precision(17);
    const auto& a = node_->args;
    switch (kind()) {
    case Kind::constant: os << value(); break;
    case Kind::variable: os << 'x' << index() + 1; break;
    case Kind::neg: os << "(-" << a[0].to_string() << ')'; break;
    case Kind::add: os << '(' << a[0].to_string() << " + " << a[1].to_string() << ')'; break;
    case Kind::sub: os << '(' << a[0].to_string() << " - " << a[1].to_string() << ')'; break;
    case Kind::mul: os << '(' << a[0].to_string() << " * " << a[1].to_string() << ')'; break;
    case Kind::div: os << '(' << a[0].to_string() << " / " << a[1].to_string() << ')'; break;
    case Kind::pow: os << '(' << a[0].to_string() << " ^ " << a[1].to_string() << ')'; break;
    case Kind::exp: os << "exp(" << a[0].to_string() << ')'; break;
    case Kind::sin: os << "sin(" << a[0].to_string() << ')'; break;
    case Kind::cos: os << "cos(" << a[0].to_string() << ')'; break;
    case Kind::min: os << "min(" << a[0].to_string() << ", " << a[1].to_string() << ')'; break;
    case Kind::max: os << "max(" << a[0].to_string() << ", " << a[1].to_string() << ')'; break;
    }
    return os.str();
}

Expr operator+(Expr a, Expr b) { return Expr::binary(Expr::Kind::add, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::binary(Expr::Kind::sub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::binary(Expr::Kind::mul, std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return Expr::binary(Expr::Kind::div, std::move(a), std::move(b)); }

namespace {

double point_pow(double base, double exponent)
{
    if (base < 0.0 && exponent != std::floor(exponent)) {
        throw domain_error("non-integer power of a negative base");
    }
    if (base == 0.0 && exponent < 0.0) {
        throw domain_error("negative power of zero");
    }
    return std::pow(base, exponent);
}

void check_arity(const Expr& e, std::size_t n)
{
    if (e.arity() > n) {
        throw validation_error("expression references x" + std::to_string(e.arity()) + " but only " +
                               std::to_string(n) + " variables are given");
    }
}

double eval_point_rec(const Expr& e, std::span<const double> x)
{
    using K = Expr::Kind;
    const auto a = e.args();
    switch (e.kind()) {
    case K::constant: return e.value();
    case K::variable: return x[e.index()];
    case K::neg: return -eval_point_rec(a[0], x);
    case K::add: return eval_point_rec(a[0], x) + eval_point_rec(a[1], x);
    case K::sub: return eval_point_rec(a[0], x) - eval_point_rec(a[1], x);
    case K::mul: return eval_point_rec(a[0], x) * eval_point_rec(a[1], x);
    case K::div: {
        const double d = eval_point_rec(a[1], x);
        if (d == 0.0) {
            throw domain_error("division by zero");
        }
        return eval_point_rec(a[0], x) / d;
    }
    case K::pow: return point_pow(eval_point_rec(a[0], x), eval_point_rec(a[1], x));
    case K::exp: return std::exp(eval_point_rec(a[0], x));
    case K::sin: return std::sin(eval_point_rec(a[0], x));
    case K::cos: return std::cos(eval_point_rec(a[0], x));
    case K::min: return std::min(eval_point_rec(a[0], x), eval_point_rec(a[1], x));
    case K::max: return std::max(eval_point_rec(a[0], x), eval_point_rec(a[1], x));
    }
    return 0.0;
}

Interval interval_pow(const Interval& base, const Interval& exponent)
{
    if (exponent.is_point()) {
        return pow(base, exponent.lo());
    }
    return exp(exponent * log(base));
}

Interval eval_interval_rec(const Expr& e, const IntervalBox& box)
{
    using K = Expr::Kind;
    const auto a = e.args();
    switch (e.kind()) {
    case K::constant: return e.value();
    case K::variable: return box[e.index()];
    case K::neg: return -eval_interval_rec(a[0], box);
    case K::add: return eval_interval_rec(a[0], box) + eval_interval_rec(a[1], box);
    case K::sub: return eval_interval_rec(a[0], box) - eval_interval_rec(a[1], box);
    case K::mul: return eval_interval_rec(a[0], box) * eval_interval_rec(a[1], box);
    case K::div: return eval_interval_rec(a[0], box) / eval_interval_rec(a[1], box);
    case K::pow: return interval_pow(eval_interval_rec(a[0], box), eval_interval_rec(a[1], box));
    case K::exp: return exp(eval_interval_rec(a[0], box));
    case K::sin: return sin(eval_interval_rec(a[0], box));
    case K::cos: return cos(eval_interval_rec(a[0], box));
    case K::min: return min(eval_interval_rec(a[0], box), eval_interval_rec(a[1], box));
    case K::max: return max(eval_interval_rec(a[0], box), eval_interval_rec(a[1], box));
    }
    return 0.0;
}

struct Dual {
    Interval v;
    std::vector<Interval> d;
};

Dual eval_dual(const Expr& e, const IntervalBox& box)
{
    using K = Expr::Kind;
    const std::size_t n = box.size();
    const auto a = e.args();
    auto zip = [n](const Dual& p, const Dual& q, auto&& f) {
        std::vector<Interval> d(n);
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = f(p.d[i], q.d[i]);
        }
        return d;
    };
    auto scale = [n](const Dual& p, const Interval& s) {
        std::vector<Interval> d(n);
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = p.d[i] * s;
        }
        return d;
    };
    switch (e.kind()) {
    case K::constant: return {e.value(), std::vector<Interval>(n, 0.0)};
    case K::variable: {
        std::vector<Interval> d(n, 0.0);
        d[e.index()] = 1.0;
        return {box[e.index()], std::move(d)};
    }
    case K::neg: {
        Dual p = eval_dual(a[0], box);
        return {-p.v, scale(p, -1.0)};
    }
    case K::add:
    case K::sub: {
        Dual p = eval_dual(a[0], box);
        Dual q = eval_dual(a[1], box);
        if (e.kind() == K::add) {
            return {p.v + q.v, zip(p, q, [](auto& x, auto& y) { return x + y; })};
        }
        return {p.v - q.v, zip(p, q, [](auto& x, auto& y) { return x - y; })};
    }
    case K::mul: {
        Dual p = eval_dual(a[0], box);
        Dual q = eval_dual(a[1], box);
        return {p.v * q.v, zip(p, q, [&](auto& x, auto& y) { return x * q.v + p.v * y; })};
    }
    case K::div: {
        Dual p = eval_dual(a[0], box);
        Dual q = eval_dual(a[1], box);
        const Interval v = p.v / q.v;
        const Interval q2 = sqr(q.v);
        return {v, zip(p, q, [&](auto& x, auto& y) { return (x * q.v - p.v * y) / q2; })};
    }
    case K::pow: {
        Dual p = eval_dual(a[0], box);
        Dual q = eval_dual(a[1], box);
        const Interval v = interval_pow(p.v, q.v);
        if (q.v.is_point()) {
            const double k = q.v.lo();
            const Interval dv = k == 0.0 ? Interval(0.0) : Interval(k) * interval_pow(p.v, k - 1.0);
            return {v, scale(p, dv)};
        }
        // d(b^e) = b^e (e' log b + e b'/b)
        const Interval lb = log(p.v);
        return {v, zip(p, q, [&](auto& x, auto& y) { return v * (y * lb + q.v * x / p.v); })};
    }
    case K::exp: {
        Dual p = eval_dual(a[0], box);
        const Interval v = exp(p.v);
        return {v, scale(p, v)};
    }
    case K::sin: {
        Dual p = eval_dual(a[0], box);
        return {sin(p.v), scale(p, cos(p.v))};
    }
    case K::cos: {
        Dual p = eval_dual(a[0], box);
        return {cos(p.v), scale(p, -sin(p.v))};
    }
    case K::min:
    case K::max: {
        Dual p = eval_dual(a[0], box);
        Dual q = eval_dual(a[1], box);
        const bool is_min = e.kind() == K::min;
        const Interval v = is_min ? min(p.v, q.v) : max(p.v, q.v);
        // Branch fixed when the operands do not overlap; otherwise hull of both.
        if (p.v.hi() < q.v.lo()) {
            return {v, is_min ? p.d : q.d};
        }
        if (q.v.hi() < p.v.lo()) {
            return {v, is_min ? q.d : p.d};
        }
        return {v, zip(p, q, [](auto& x, auto& y) { return hull(x, y); })};
    }
    }
    return {0.0, std::vector<Interval>(n, 0.0)};
}

} // namespace

double eval_point(const Expr& e, std::span<const double> x)
{
    check_arity(e, x.size());
    return eval_point_rec(e, x);
}

Interval eval_interval(const Expr& e, const IntervalBox& box)
{
    check_arity(e, box.size());
    return eval_interval_rec(e, box);
}

std::vector<Interval> eval_gradient(const Expr& e, const IntervalBox& box)
{
    check_arity(e, box.size());
    return eval_dual(e, box).d;
}

namespace {

class ExprParser {
public:
    ExprParser(std::string_view text, std::size_t n_vars) : text_(text), n_vars_(n_vars) {}

    Expr parse()
    {
        Expr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) {
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        return e;
    }

private:
    std::string_view text_;
    std::size_t n_vars_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const
    {
        throw parse_error("expression: " + what, 1, static_cast<int>(pos_) + 1);
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            fail(std::string("expected '") + c + "'");
        }
    }

    Expr parse_sum()
    {
        Expr e = parse_product();
        for (;;) {
            if (accept('+')) {
                e = e + parse_product();
            } else if (accept('-')) {
                e = e - parse_product();
            } else {
                return e;
            }
        }
    }

    Expr parse_product()
    {
        Expr e = parse_unary();
        for (;;) {
            if (accept('*')) {
                e = e * parse_unary();
            } else if (accept('/')) {
                e = e / parse_unary();
            } else {
                return e;
            }
        }
    }

    Expr parse_unary()
    {
        if (accept('-')) {
            return Expr::unary(Expr::Kind::neg, parse_unary());
        }
        if (accept('+')) {
            return parse_unary();
        }
        return parse_power();
    }

    Expr parse_power()
    {
        Expr base = parse_primary();
        if (accept('^')) {
            return Expr::binary(Expr::Kind::pow, std::move(base), parse_unary());
        }
        return base;
    }

    Expr parse_primary()
    {
        skip_ws();
        if (pos_ >= text_.size()) {
            fail("unexpected end of expression");
        }
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return parse_number();
        }
        if (accept('(')) {
            Expr e = parse_sum();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
            const std::string_view word = text_.substr(start, pos_ - start);
            if (word.size() > 1 && word[0] == 'x' &&
                word.find_first_not_of("0123456789", 1) == std::string_view::npos) {
                const std::size_t k = std::stoul(std::string(word.substr(1)));
                if (k == 0 || (n_vars_ != 0 && k > n_vars_)) {
                    pos_ = start;
                    fail("variable " + std::string(word) + " out of range");
                }
                return Expr::variable(k - 1);
            }
            if (word == "exp" || word == "sin" || word == "cos") {
                expect('(');
                Expr arg = parse_sum();
                expect(')');
                const auto kind = word == "exp" ? Expr::Kind::exp : word == "sin" ? Expr::Kind::sin : Expr::Kind::cos;
                return Expr::unary(kind, std::move(arg));
            }
            if (word == "min" || word == "max") {
                expect('(');
                Expr lhs = parse_sum();
                expect(',');
                Expr rhs = parse_sum();
                expect(')');
                return Expr::binary(word == "min" ? Expr::Kind::min : Expr::Kind::max, std::move(lhs), std::move(rhs));
            }
            pos_ = start;
            fail("unknown identifier '" + std::string(word) + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Expr parse_number()
    {
        const std::string rest(text_.substr(pos_));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(rest, &used);
        } catch (const std::exception&) {
            fail("malformed number");
        }
        pos_ += used;
        return Expr::constant(v);
    }
};

} // namespace

Expr parse_expr(std::string_view text, std::size_t n_vars)
{
    return ExprParser(text, n_vars).parse();
}

} // namespace imcv
