#include "imcv/inclusion.hpp"

#include "imcv/errors.hpp"

#include <cmath>
#include <limits>

namespace imcv {

std::vector<InclusionPiece> subdivide_until(std::span<const Expr> mean_exprs,
                                            std::span<const Expr> diffusion_exprs,
                                            const IntervalBox& box, double kappa, std::size_t cap)
{
    if (!(kappa > 0.0)) {
        throw validation_error("subdivision budget kappa must be positive");
    }
    if (mean_exprs.empty() && diffusion_exprs.empty()) {
        throw validation_error("subdivision needs at least one expression");
    }

    std::vector<InclusionPiece> done;
    std::vector<IntervalBox> stack{box};
    while (!stack.empty()) {
        IntervalBox current = std::move(stack.back());
        stack.pop_back();

        std::vector<Interval> outputs;
        outputs.reserve(mean_exprs.size() + diffusion_exprs.size());
        double w_mean = 0.0;
        double w_diff = 0.0;
        for (const auto& e : mean_exprs) {
            outputs.push_back(eval_interval(e, current));
            w_mean = std::max(w_mean, outputs.back().width());
        }
        for (const auto& e : diffusion_exprs) {
            outputs.push_back(eval_interval(e, current));
            w_diff = std::max(w_diff, outputs.back().width());
        }

        if (w_mean * w_mean + w_diff * w_diff < kappa * kappa || current.width() == 0.0) {
            done.push_back({std::move(current), std::move(outputs)});
            continue;
        }
        if (done.size() + stack.size() + 2 > cap) {
            throw budget_error("subdivision exceeded " + std::to_string(cap) + " boxes before meeting kappa = " +
                               std::to_string(kappa));
        }
        auto [lower, upper] = current.bisect(current.widest_axis());
        stack.push_back(std::move(upper));
        stack.push_back(std::move(lower));
    }
    return done;
}

std::vector<InclusionPiece> subdivide_until(std::span<const Expr> exprs, const IntervalBox& box, double kappa,
                                            std::size_t cap)
{
    return subdivide_until(exprs, {}, box, kappa, cap);
}

LipschitzEstimate lipschitz_bound(std::span<const Expr> exprs, const IntervalBox& box)
{
    LipschitzEstimate est;
    for (const auto& e : exprs) {
        try {
            double row = 0.0;
            for (const auto& d : eval_gradient(e, box)) {
                row += d.mag();
            }
            est.value = std::max(est.value, row);
        } catch (const domain_error& err) {
            est.finite = false;
            est.value = std::numeric_limits<double>::infinity();
            est.diagnostic = "derivative of " + e.to_string() + " is unbounded on " + "the working box: " + err.what();
            return est;
        }
    }
    return est;
}

} // namespace imcv
