#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace imcv {

/// Closed interval [lo, hi] with outward-rounded arithmetic.
///
/// Every arithmetic result is widened by one ulp on each side so that the
/// exact real result of the operation on any points of the operands is
/// contained in the returned interval.
class Interval {
public:
    constexpr Interval() = default;
    constexpr Interval(double point) : lo_(point), hi_(point) {} // NOLINT(implicit)
    Interval(double lo, double hi);

    [[nodiscard]] double lo() const { return lo_; }
    [[nodiscard]] double hi() const { return hi_; }
    [[nodiscard]] double width() const { return hi_ - lo_; }
    [[nodiscard]] double mid() const { return 0.5 * (lo_ + hi_); }
    [[nodiscard]] double mag() const; // max |x|
    [[nodiscard]] bool contains(double x) const { return lo_ <= x && x <= hi_; }
    [[nodiscard]] bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
    [[nodiscard]] bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
    [[nodiscard]] bool is_point() const { return lo_ == hi_; }

    friend bool operator==(const Interval&, const Interval&) = default;

private:
    double lo_ = 0.0;
    double hi_ = 0.0;
};

/// Widen by one ulp on each side.
Interval outward(double lo, double hi);
Interval hull(const Interval& a, const Interval& b);

Interval operator-(const Interval& a);
Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
Interval operator/(const Interval& a, const Interval& b); // throws domain_error if 0 ∈ b

Interval sqr(const Interval& a);
Interval pow(const Interval& a, double exponent); // integer exponents on any base, others need a > 0
Interval exp(const Interval& a);
Interval log(const Interval& a);
Interval sin(const Interval& a);
Interval cos(const Interval& a);
Interval min(const Interval& a, const Interval& b);
Interval max(const Interval& a, const Interval& b);
Interval abs(const Interval& a);

std::ostream& operator<<(std::ostream& os, const Interval& x);

/// Axis-aligned box in R^n.
class IntervalBox {
public:
    IntervalBox() = default;
    explicit IntervalBox(std::vector<Interval> dims);
    IntervalBox(std::initializer_list<Interval> dims);

    [[nodiscard]] std::size_t size() const { return dims_.size(); }
    [[nodiscard]] const Interval& operator[](std::size_t i) const { return dims_[i]; }
    [[nodiscard]] Interval& operator[](std::size_t i) { return dims_[i]; }
    [[nodiscard]] std::span<const Interval> dims() const { return dims_; }

    /// Largest edge length.
    [[nodiscard]] double width() const;
    [[nodiscard]] std::size_t widest_axis() const;
    [[nodiscard]] std::vector<double> center() const;
    [[nodiscard]] bool contains(std::span<const double> x) const;
    [[nodiscard]] bool contains(const IntervalBox& other) const;
    [[nodiscard]] double volume() const;

    /// Split along `axis` at the midpoint.
    [[nodiscard]] std::pair<IntervalBox, IntervalBox> bisect(std::size_t axis) const;

    auto begin() const { return dims_.begin(); }
    auto end() const { return dims_.end(); }

    friend bool operator==(const IntervalBox&, const IntervalBox&) = default;

private:
    std::vector<Interval> dims_;
};

std::ostream& operator<<(std::ostream& os, const IntervalBox& box);

} // namespace imcv
