#pragma once

#include "imcv/interval.hpp"

#include <vector>

namespace imcv {

/// Diagonal Gaussian family N(m, diag(s^2)) with m and s^2 ranging over boxes.
struct GaussianIntervalParams {
    IntervalBox mean;
    std::vector<Interval> var;
};

/// Single diagonal Gaussian.
struct GaussianPoint {
    std::vector<double> mean;
    std::vector<double> var;
};

/// Which faces of a target box belong to it. Only matters for degenerate
/// (zero-variance) axes, where the Gaussian is a point mass.
enum class UpperFace { open, closed };

/// Standard normal CDF.
double normal_cdf(double x);

/// P(a <= X <= b) for X ~ N(m, s^2), s > 0, evaluated in the tail that
/// avoids cancellation.
double normal_interval_prob(double a, double b, double m, double s);

/// Unpadded per-axis extremes; `smooth` is set when a positive variance
/// took part (so the value came from erfc rather than an exact indicator).
struct AxisExtremes {
    double lo = 1.0;
    double hi = 1.0;
    bool smooth = false;
};

AxisExtremes axis_prob_extremes(const Interval& mean, const Interval& var, const Interval& target,
                                UpperFace upper = UpperFace::closed);

/// Product of per-axis extremes, padded by 1e-9 when smooth and clipped to [0, 1].
Interval finalize_prob_bounds(double lo, double hi, bool smooth);

/// Bounds on P(N(m, s^2) in [a, b]) over m in `mean`, s^2 in `var` (one axis).
Interval axis_prob_bounds(const Interval& mean, const Interval& var, const Interval& target,
                          UpperFace upper = UpperFace::closed);

/// Sound bounds on P(N(m, diag(s^2)) in target) over the whole parameter
/// box, as a product of per-axis bounds padded outward by 1e-9 and clipped
/// to [0, 1]. `upper_faces[d]` (if non-empty) selects the membership of the
/// upper face on axis d for point masses; lower faces always belong.
Interval box_prob_bounds(const GaussianIntervalParams& g, const IntervalBox& target,
                         const std::vector<UpperFace>& upper_faces = {});

/// Sound bounds on 1 - P(N in W).
Interval complement_prob_bounds(const GaussianIntervalParams& g, const IntervalBox& working_box);

/// Lower and upper bound on W1(N(m1, S1), N(m2, S2)) for diagonal
/// covariances: [|m1 - m2|_inf, sqrt(|m1 - m2|_2^2 + |S1^1/2 - S2^1/2|_F^2)].
/// The lower end is clamped to the upper end.
Interval gaussian_w1_bounds(const GaussianPoint& g1, const GaussianPoint& g2);

} // namespace imcv
