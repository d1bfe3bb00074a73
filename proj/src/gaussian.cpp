#include "imcv/gaussian.hpp"

#include "imcv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace imcv {

namespace {

constexpr double padding = 1e-9;

bool dirac_member(double m, const Interval& target, UpperFace upper)
{
    if (m < target.lo()) {
        return false;
    }
    return upper == UpperFace::closed ? m <= target.hi() : m < target.hi();
}

// Stationary variance of s -> P(a <= m + sZ <= b) when a - m and b - m share a sign.
double stationary_var(double m, const Interval& target)
{
    const double a = target.lo() - m;
    const double b = target.hi() - m;
    if (a * b <= 0.0 || a == b) {
        return -1.0;
    }
    return (b * b - a * a) / (2.0 * std::log(b / a));
}

double prob_at(double m, double v, const Interval& target, UpperFace upper, bool& smooth)
{
    if (v <= 0.0) {
        return dirac_member(m, target, upper) ? 1.0 : 0.0;
    }
    smooth = true;
    return normal_interval_prob(target.lo(), target.hi(), m, std::sqrt(v));
}

AxisExtremes axis_bounds(const Interval& mean, const Interval& var, const Interval& target, UpperFace upper)
{
    if (var.lo() < 0.0) {
        throw validation_error("variance interval must be nonnegative");
    }
    bool smooth = false;
    auto over_var = [&](double m, auto pick) {
        double best = prob_at(m, var.lo(), target, upper, smooth);
        best = pick(best, prob_at(m, var.hi(), target, upper, smooth));
        const double vs = stationary_var(m, target);
        if (vs > var.lo() && vs < var.hi()) {
            best = pick(best, prob_at(m, vs, target, upper, smooth));
        }
        return best;
    };
    auto lesser = [](double x, double y) { return std::min(x, y); };
    auto greater = [](double x, double y) { return std::max(x, y); };

    // The box probability is symmetric and unimodal in m around the target
    // midpoint: the maximum sits at the clamped midpoint and the minimum at an
    // endpoint of the mean interval.
    const double m_star = std::clamp(target.mid(), mean.lo(), mean.hi());
    double hi = over_var(m_star, greater);
    if (var.lo() == 0.0) {
        // Point masses: any mean inside the target attains 1.
        const bool hits = upper == UpperFace::closed ? (mean.lo() <= target.hi() && mean.hi() >= target.lo())
                                                     : (mean.lo() < target.hi() && mean.hi() >= target.lo());
        if (hits) {
            hi = 1.0;
        }
    }
    const double lo = std::min(over_var(mean.lo(), lesser), over_var(mean.hi(), lesser));
    return {lo, hi, smooth};
}

} // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_interval_prob(double a, double b, double m, double s)
{
    const double za = (a - m) / s;
    const double zb = (b - m) / s;
    constexpr double r = std::numbers::sqrt2;
    double p = 0.0;
    if (za > 0.0) {
        p = 0.5 * (std::erfc(za / r) - std::erfc(zb / r));
    } else if (zb < 0.0) {
        p = 0.5 * (std::erfc(-zb / r) - std::erfc(-za / r));
    } else {
        p = 1.0 - 0.5 * std::erfc(zb / r) - 0.5 * std::erfc(-za / r);
    }
    return std::clamp(p, 0.0, 1.0);
}

AxisExtremes axis_prob_extremes(const Interval& mean, const Interval& var, const Interval& target, UpperFace upper)
{
    return axis_bounds(mean, var, target, upper);
}

Interval finalize_prob_bounds(double lo, double hi, bool smooth)
{
    if (!smooth) {
        return {lo, hi};
    }
    return {std::max(0.0, lo - padding), std::min(1.0, hi + padding)};
}

Interval axis_prob_bounds(const Interval& mean, const Interval& var, const Interval& target, UpperFace upper)
{
    const AxisExtremes r = axis_bounds(mean, var, target, upper);
    return finalize_prob_bounds(r.lo, r.hi, r.smooth);
}

Interval box_prob_bounds(const GaussianIntervalParams& g, const IntervalBox& target,
                         const std::vector<UpperFace>& upper_faces)
{
    const std::size_t n = g.mean.size();
    if (g.var.size() != n || target.size() != n) {
        throw validation_error("Gaussian parameters and target box differ in dimension");
    }
    double lo = 1.0;
    double hi = 1.0;
    bool smooth = false;
    for (std::size_t d = 0; d < n; ++d) {
        const UpperFace face = upper_faces.empty() ? UpperFace::closed : upper_faces[d];
        const AxisExtremes r = axis_bounds(g.mean[d], g.var[d], target[d], face);
        lo *= r.lo;
        hi *= r.hi;
        smooth = smooth || r.smooth;
    }
    return finalize_prob_bounds(lo, hi, smooth);
}

Interval complement_prob_bounds(const GaussianIntervalParams& g, const IntervalBox& working_box)
{
    const Interval inside = box_prob_bounds(g, working_box);
    return {std::clamp(1.0 - inside.hi(), 0.0, 1.0), std::clamp(1.0 - inside.lo(), 0.0, 1.0)};
}

Interval gaussian_w1_bounds(const GaussianPoint& g1, const GaussianPoint& g2)
{
    const std::size_t n = g1.mean.size();
    if (g2.mean.size() != n || g1.var.size() != n || g2.var.size() != n) {
        throw validation_error("Gaussians differ in dimension");
    }
    double gap_inf = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dm = g1.mean[i] - g2.mean[i];
        const double ds = std::sqrt(g1.var[i]) - std::sqrt(g2.var[i]);
        gap_inf = std::max(gap_inf, std::fabs(dm));
        sum += dm * dm + ds * ds;
    }
    const double hi = std::sqrt(sum);
    return {std::min(gap_inf, hi), hi};
}

} // namespace imcv
