#include "imcv/imc.hpp"

#include "imcv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace imcv {

namespace {

constexpr double sum_tol = 1e-12;

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// Round to a 2^-40 grid so that equal points computed along different
// routes deduplicate; dyadic inputs are unaffected.
std::vector<double> dedupe_key(const std::vector<double>& p)
{
    std::vector<double> key(p.size());
    constexpr double scale = 1099511627776.0; // 2^40
    for (std::size_t i = 0; i < p.size(); ++i) {
        key[i] = std::round(p[i] * scale) / scale;
    }
    return key;
}

} // namespace

Imc::Imc(std::size_t states, std::vector<double> lower, std::vector<double> upper, std::vector<Labels> labels,
         bool has_sink)
    : states_(states), lower_(std::move(lower)), upper_(std::move(upper)), labels_(std::move(labels)),
      has_sink_(has_sink)
{
    if (states_ == 0) {
        throw validation_error("IMC must have at least one state");
    }
    if (lower_.size() != states_ * states_ || upper_.size() != states_ * states_) {
        throw validation_error("IMC bound matrices must be " + std::to_string(states_) + " x " +
                               std::to_string(states_));
    }
    if (labels_.empty()) {
        labels_.resize(states_);
    }
    if (labels_.size() != states_) {
        throw validation_error("IMC needs one label set per state");
    }
}

ImcDiagnostics validate_imc(const Imc& imc)
{
    ImcDiagnostics diag;
    diag.tightened = imc;
    Imc& t = diag.tightened;
    const std::size_t n = imc.size();

    for (std::size_t i = 0; i < n; ++i) {
        double sum_lo = 0.0;
        double sum_hi = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double lo = imc.lower(i, j);
            const double hi = imc.upper(i, j);
            if (!(lo >= 0.0) || !(hi <= 1.0) || !(lo <= hi)) {
                diag.violations.push_back("entry (" + std::to_string(i) + "," + std::to_string(j) +
                                          ") violates 0 <= lower <= upper <= 1: [" + fmt(lo) + ", " + fmt(hi) + "]");
            }
            sum_lo += lo;
            sum_hi += hi;
        }
        if (sum_hi < 1.0 - sum_tol) {
            throw infeasible("row " + std::to_string(i) + " has upper sum " + fmt(sum_hi) + " < 1");
        }
        if (sum_lo > 1.0 + sum_tol) {
            throw infeasible("row " + std::to_string(i) + " has lower sum " + fmt(sum_lo) + " > 1");
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double lo = imc.lower(i, j);
            const double hi = imc.upper(i, j);
            const double new_lo = std::max(lo, 1.0 - (sum_hi - hi));
            const double new_hi = std::min(hi, 1.0 - (sum_lo - lo));
            // Ignore rounding-level movement.
            if (new_lo > lo + sum_tol) {
                t.lower(i, j) = new_lo;
                diag.tightening.push_back("lower(" + std::to_string(i) + "," + std::to_string(j) + "): " + fmt(lo) +
                                          " -> " + fmt(new_lo));
            }
            if (new_hi < hi - sum_tol) {
                t.upper(i, j) = new_hi;
                diag.tightening.push_back("upper(" + std::to_string(i) + "," + std::to_string(j) + "): " + fmt(hi) +
                                          " -> " + fmt(new_hi));
            }
        }
    }

    if (imc.has_sink()) {
        const std::size_t s = imc.sink();
        for (std::size_t j = 0; j < n; ++j) {
            const double want = j == s ? 1.0 : 0.0;
            if (imc.lower(s, j) != want || imc.upper(s, j) != want) {
                diag.violations.push_back("sink row is not absorbing at column " + std::to_string(j));
                break;
            }
        }
        if (imc.labels(s).contains(in_prop)) {
            diag.violations.push_back("sink state is labelled \"in\"");
        }
    }
    return diag;
}

std::vector<DiscreteDist> row_vertices(std::span<const double> lower, std::span<const double> upper, std::size_t cap)
{
    const std::size_t n = lower.size();
    if (upper.size() != n) {
        throw validation_error("row bounds differ in length");
    }
    std::vector<std::size_t> free;
    double fixed_mass = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (upper[j] > lower[j]) {
            free.push_back(j);
        } else {
            fixed_mass += lower[j];
        }
    }
    if (free.size() > cap) {
        throw combinatorial_cap("row has " + std::to_string(free.size()) +
                                " free coordinates; vertex enumeration is capped at " + std::to_string(cap));
    }

    std::vector<double> base(lower.begin(), lower.end());
    std::set<std::vector<double>> seen;
    std::vector<DiscreteDist> out;
    auto emit = [&](std::vector<double> p) {
        if (seen.insert(dedupe_key(p)).second) {
            out.push_back({std::move(p)});
        }
    };

    if (free.empty()) {
        if (std::fabs(fixed_mass - 1.0) <= sum_tol) {
            emit(base);
        }
        return out;
    }

    const std::size_t f = free.size();
    for (std::size_t pivot = 0; pivot < f; ++pivot) {
        // Subsets of the other free coordinates sitting at their upper bound.
        const std::size_t others = f - 1;
        for (std::size_t mask = 0; mask < (std::size_t{1} << others); ++mask) {
            std::vector<double> p = base;
            double mass = fixed_mass;
            std::size_t bit = 0;
            for (std::size_t q = 0; q < f; ++q) {
                if (q == pivot) {
                    continue;
                }
                const std::size_t j = free[q];
                p[j] = (mask >> bit++) & 1U ? upper[j] : lower[j];
                mass += p[j];
            }
            const std::size_t j = free[pivot];
            const double rest = 1.0 - mass;
            if (rest < lower[j] - sum_tol || rest > upper[j] + sum_tol) {
                continue;
            }
            p[j] = std::clamp(rest, lower[j], upper[j]);
            emit(std::move(p));
        }
    }
    return out;
}

std::vector<DiscreteDist> marginal_vertices(const Imc& imc, const DiscreteDist& mu0, int t, std::size_t cap,
                                            std::size_t row_cap)
{
    const std::size_t n = imc.size();
    if (mu0.size() != n) {
        throw validation_error("initial distribution has wrong length");
    }
    if (t < 0) {
        throw validation_error("time horizon must be nonnegative");
    }
    std::vector<std::vector<DiscreteDist>> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        rows[i] = row_vertices(imc.lower_row(i), imc.upper_row(i), row_cap);
        if (rows[i].empty()) {
            throw infeasible("row " + std::to_string(i) + " admits no distribution");
        }
    }

    std::vector<DiscreteDist> current{mu0};
    std::size_t work = 0;
    for (int step = 0; step < t; ++step) {
        std::set<std::vector<double>> seen;
        std::vector<DiscreteDist> next;
        for (const auto& mu : current) {
            // Only rows carrying mass influence V^T mu.
            std::vector<std::size_t> active;
            for (std::size_t i = 0; i < n; ++i) {
                if (mu[i] != 0.0) {
                    active.push_back(i);
                }
            }
            std::vector<std::size_t> choice(active.size(), 0);
            for (;;) {
                if (++work > cap) {
                    throw combinatorial_cap("marginal vertex enumeration exceeded " + std::to_string(cap) +
                                            " matrix-vertex combinations");
                }
                std::vector<double> nu(n, 0.0);
                for (std::size_t a = 0; a < active.size(); ++a) {
                    const std::size_t i = active[a];
                    const auto& row = rows[i][choice[a]].probs;
                    for (std::size_t j = 0; j < n; ++j) {
                        nu[j] += mu[i] * row[j];
                    }
                }
                if (seen.insert(dedupe_key(nu)).second) {
                    next.push_back({std::move(nu)});
                }
                std::size_t a = 0;
                for (; a < active.size(); ++a) {
                    if (++choice[a] < rows[active[a]].size()) {
                        break;
                    }
                    choice[a] = 0;
                }
                if (a == active.size()) {
                    break;
                }
            }
        }
        current = std::move(next);
    }
    return current;
}

double tv_distance(const DiscreteDist& mu, const DiscreteDist& nu)
{
    if (mu.size() != nu.size()) {
        throw validation_error("distributions differ in length");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        d += std::fabs(mu[i] - nu[i]);
    }
    return d;
}

DiscreteDist extreme_row(std::span<const double> lower, std::span<const double> upper, std::span<const double> v,
                         Extreme mode)
{
    const std::size_t n = lower.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (mode == Extreme::max) {
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] > v[b]; });
    } else {
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    }
    std::vector<double> p(lower.begin(), lower.end());
    double rest = 1.0 - std::accumulate(lower.begin(), lower.end(), 0.0);
    for (std::size_t j : order) {
        if (rest <= 0.0) {
            break;
        }
        const double add = std::min(upper[j] - lower[j], rest);
        p[j] += add;
        rest -= add;
    }
    return {std::move(p)};
}

double extreme_value(std::span<const double> lower, std::span<const double> upper, std::span<const double> v,
                     std::span<const std::size_t> order)
{
    double value = 0.0;
    double rest = 1.0;
    for (std::size_t j = 0; j < lower.size(); ++j) {
        value += lower[j] * v[j];
        rest -= lower[j];
    }
    for (std::size_t j : order) {
        if (rest <= 0.0) {
            break;
        }
        const double add = std::min(upper[j] - lower[j], rest);
        value += add * v[j];
        rest -= add;
    }
    return value;
}

std::vector<std::vector<double>> imc_costs(const Imc& imc, double sink_cost)
{
    const std::size_t n = imc.size();
    const auto& centers = imc.centers();
    const std::size_t cells = imc.has_sink() ? n - 1 : n;
    if (centers.size() != cells) {
        throw validation_error("IMC has no state centres for transport costs");
    }
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            if (i >= cells || j >= cells) {
                cost[i][j] = sink_cost;
                continue;
            }
            double c = 0.0;
            for (std::size_t d = 0; d < centers[i].size(); ++d) {
                c = std::max(c, std::fabs(centers[i][d] - centers[j][d]));
            }
            cost[i][j] = c;
        }
    }
    return cost;
}

} // namespace imcv
