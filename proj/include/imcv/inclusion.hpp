#pragma once

#include "imcv/expr.hpp"

#include <span>
#include <string>
#include <vector>

namespace imcv {

/// A sub-box together with the inclusion of every expression over it.
struct InclusionPiece {
    IntervalBox box;
    std::vector<Interval> outputs;
};

inline constexpr std::size_t default_subdivision_cap = std::size_t{1} << 20;

/// Longest-edge bisection of `box` until each piece meets the width budget
///
///     w_mean^2 + w_diffusion^2 < kappa^2,
///
/// where w_mean (w_diffusion) is the largest inclusion width among
/// `mean_exprs` (`diffusion_exprs`) over the piece. Outputs are reported in
/// the order mean_exprs followed by diffusion_exprs. Pieces are returned in
/// depth-first, lower-half-first order so the result is deterministic.
///
/// Throws budget_error when more than `cap` pieces would be needed.
std::vector<InclusionPiece> subdivide_until(std::span<const Expr> mean_exprs,
                                            std::span<const Expr> diffusion_exprs,
                                            const IntervalBox& box, double kappa,
                                            std::size_t cap = default_subdivision_cap);

/// Single-group form: every output width must be < kappa.
std::vector<InclusionPiece> subdivide_until(std::span<const Expr> exprs, const IntervalBox& box, double kappa,
                                            std::size_t cap = default_subdivision_cap);

/// Lipschitz bound max_i sum_j |d e_i / d x_j| over `box` from interval
/// derivatives. `finite` is false (and `diagnostic` set) when the derivative
/// enclosure blows up inside the box.
struct LipschitzEstimate {
    double value = 0.0;
    bool finite = true;
    std::string diagnostic;
};

LipschitzEstimate lipschitz_bound(std::span<const Expr> exprs, const IntervalBox& box);

} // namespace imcv
