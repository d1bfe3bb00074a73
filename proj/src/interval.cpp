#include "imcv/interval.hpp"

#include "imcv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace imcv {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double down(double x) { return std::nextafter(x, -inf); }
double up(double x) { return std::nextafter(x, inf); }

void check_finite(double lo, double hi)
{
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw domain_error("interval evaluation overflowed");
    }
}

} // namespace

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi)
{
    if (!(lo <= hi)) {
        throw validation_error("interval with lo > hi");
    }
}

double Interval::mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }

Interval outward(double lo, double hi)
{
    check_finite(lo, hi);
    return {down(lo), up(hi)};
}

Interval hull(const Interval& a, const Interval& b)
{
    return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

Interval operator-(const Interval& a) { return {-a.hi(), -a.lo()}; }

Interval operator+(const Interval& a, const Interval& b)
{
    if (a.is_point() && b.is_point() && (a.lo() == 0.0 || b.lo() == 0.0)) {
        return a.lo() + b.lo();
    }
    return outward(a.lo() + b.lo(), a.hi() + b.hi());
}

Interval operator-(const Interval& a, const Interval& b) { return a + (-b); }

Interval operator*(const Interval& a, const Interval& b)
{
    if (a.is_point() && b.is_point()) {
        const double p = a.lo() * b.lo();
        // Products with 0 or ±1 are exact.
        if (a.lo() == 0.0 || b.lo() == 0.0 || std::fabs(a.lo()) == 1.0 || std::fabs(b.lo()) == 1.0) {
            return p;
        }
        return outward(p, p);
    }
    const double c[] = {a.lo() * b.lo(), a.lo() * b.hi(), a.hi() * b.lo(), a.hi() * b.hi()};
    return outward(*std::min_element(std::begin(c), std::end(c)), *std::max_element(std::begin(c), std::end(c)));
}

Interval operator/(const Interval& a, const Interval& b)
{
    if (b.contains_zero()) {
        throw domain_error("division by an interval containing zero");
    }
    const double c[] = {a.lo() / b.lo(), a.lo() / b.hi(), a.hi() / b.lo(), a.hi() / b.hi()};
    return outward(*std::min_element(std::begin(c), std::end(c)), *std::max_element(std::begin(c), std::end(c)));
}

Interval sqr(const Interval& a)
{
    if (a.is_point() && a.lo() == 0.0) {
        return 0.0;
    }
    const double l = a.lo() * a.lo();
    const double h = a.hi() * a.hi();
    if (a.contains_zero()) {
        return {0.0, up(std::max(l, h))};
    }
    return outward(std::min(l, h), std::max(l, h));
}

Interval pow(const Interval& a, double exponent)
{
    if (exponent == std::floor(exponent) && std::fabs(exponent) <= 64) {
        const int k = static_cast<int>(exponent);
        if (k == 0) {
            return 1.0;
        }
        if (k < 0) {
            return Interval(1.0) / pow(a, -k);
        }
        if (k % 2 == 0) {
            Interval s = sqr(a);
            const double l = std::pow(s.lo(), k / 2);
            const double h = std::pow(s.hi(), k / 2);
            return {std::max(0.0, down(l)), up(h)};
        }
        // Odd powers are monotone.
        return outward(std::pow(a.lo(), k), std::pow(a.hi(), k));
    }
    if (a.lo() <= 0.0) {
        throw domain_error("non-integer power of a non-positive base");
    }
    return exp(log(a) * Interval(exponent));
}

Interval exp(const Interval& a)
{
    return {std::max(0.0, down(std::exp(a.lo()))), up(std::exp(a.hi()))};
}

Interval log(const Interval& a)
{
    if (a.lo() <= 0.0) {
        throw domain_error("logarithm of a non-positive interval");
    }
    return outward(std::log(a.lo()), std::log(a.hi()));
}

Interval sin(const Interval& a)
{
    return cos(a - Interval(std::numbers::pi / 2));
}

Interval cos(const Interval& a)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (a.width() >= two_pi) {
        return {-1.0, 1.0};
    }
    double lo = std::min(std::cos(a.lo()), std::cos(a.hi()));
    double hi = std::max(std::cos(a.lo()), std::cos(a.hi()));
    // Extrema at multiples of pi inside the interval.
    const double k0 = std::ceil(a.lo() / std::numbers::pi);
    for (double k = k0; k * std::numbers::pi <= a.hi(); k += 1.0) {
        if (std::fmod(std::fabs(k), 2.0) == 0.0) {
            hi = 1.0;
        } else {
            lo = -1.0;
        }
    }
    return {std::max(-1.0, down(lo)), std::min(1.0, up(hi))};
}

Interval min(const Interval& a, const Interval& b)
{
    return {std::min(a.lo(), b.lo()), std::min(a.hi(), b.hi())};
}

Interval max(const Interval& a, const Interval& b)
{
    return {std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

Interval abs(const Interval& a)
{
    if (a.contains_zero()) {
        return {0.0, a.mag()};
    }
    return {std::min(std::fabs(a.lo()), std::fabs(a.hi())), a.mag()};
}

std::ostream& operator<<(std::ostream& os, const Interval& x)
{
    return os << '[' << x.lo() << ", " << x.hi() << ']';
}

IntervalBox::IntervalBox(std::vector<Interval> dims) : dims_(std::move(dims)) {}

IntervalBox::IntervalBox(std::initializer_list<Interval> dims) : dims_(dims) {}

double IntervalBox::width() const
{
    double w = 0.0;
    for (const auto& d : dims_) {
        w = std::max(w, d.width());
    }
    return w;
}

std::size_t IntervalBox::widest_axis() const
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < dims_.size(); ++i) {
        if (dims_[i].width() > dims_[best].width()) {
            best = i;
        }
    }
    return best;
}

std::vector<double> IntervalBox::center() const
{
    std::vector<double> c;
    c.reserve(dims_.size());
    for (const auto& d : dims_) {
        c.push_back(d.mid());
    }
    return c;
}

bool IntervalBox::contains(std::span<const double> x) const
{
    if (x.size() != dims_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (!dims_[i].contains(x[i])) {
            return false;
        }
    }
    return true;
}

bool IntervalBox::contains(const IntervalBox& other) const
{
    if (other.size() != size()) {
        return false;
    }
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (!dims_[i].contains(other[i])) {
            return false;
        }
    }
    return true;
}

double IntervalBox::volume() const
{
    double v = 1.0;
    for (const auto& d : dims_) {
        v *= d.width();
    }
    return v;
}

std::pair<IntervalBox, IntervalBox> IntervalBox::bisect(std::size_t axis) const
{
    IntervalBox left = *this;
    IntervalBox right = *this;
    const double m = dims_[axis].mid();
    left[axis] = Interval(dims_[axis].lo(), m);
    right[axis] = Interval(m, dims_[axis].hi());
    return {std::move(left), std::move(right)};
}

std::ostream& operator<<(std::ostream& os, const IntervalBox& box)
{
    os << '[';
    for (std::size_t i = 0; i < box.size(); ++i) {
        os << (i ? ", " : "") << box[i];
    }
    return os << ']';
}

} // namespace imcv
