#include "imcv/checker.hpp"

#include "imcv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace imcv {

namespace {

// Row access for value iteration. Rows and targets are model states;
// entry() reports whether row r can move to target t and with which bounds.
class ImcModel {
public:
    explicit ImcModel(const Imc& imc) : imc_(imc) {}

    [[nodiscard]] std::size_t size() const { return imc_.size(); }
    bool entry(std::size_t r, std::size_t t, double& lo, double& hi) const
    {
        lo = imc_.lower(r, t);
        hi = imc_.upper(r, t);
        return true;
    }

private:
    const Imc& imc_;
};

// Product of an IMC with a DFA: state i * D + d.
class ProductModel {
public:
    ProductModel(const Imc& imc, const Dfa& dfa) : imc_(imc), d_(dfa.size()), succ_(dfa.size() * imc.size())
    {
        for (std::size_t d = 0; d < d_; ++d) {
            for (std::size_t j = 0; j < imc.size(); ++j) {
                succ_[d * imc.size() + j] = dfa.step(d, imc.labels(j));
            }
        }
    }

    [[nodiscard]] std::size_t size() const { return imc_.size() * d_; }
    [[nodiscard]] std::size_t successor(std::size_t d, std::size_t j) const { return succ_[d * imc_.size() + j]; }
    bool entry(std::size_t r, std::size_t t, double& lo, double& hi) const
    {
        const std::size_t i = r / d_;
        const std::size_t j = t / d_;
        if (t % d_ != successor(r % d_, j)) {
            return false;
        }
        lo = imc_.lower(i, j);
        hi = imc_.upper(i, j);
        return true;
    }

private:
    const Imc& imc_;
    std::size_t d_;
    std::vector<std::size_t> succ_;
};

// Greedy extreme expectation of v over row r; `order` lists targets best-first.
template <class Model>
double row_extreme(const Model& m, std::size_t r, const std::vector<double>& v, const std::vector<std::size_t>& order)
{
    double value = 0.0;
    double rest = 1.0;
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t t = 0; t < m.size(); ++t) {
        if (m.entry(r, t, lo, hi) && lo > 0.0) {
            value += lo * v[t];
            rest -= lo;
        }
    }
    for (std::size_t t : order) {
        if (rest <= 0.0) {
            break;
        }
        if (m.entry(r, t, lo, hi)) {
            const double add = std::min(hi - lo, rest);
            value += add * v[t];
            rest -= add;
        }
    }
    return value;
}

std::vector<std::size_t> sorted_order(const std::vector<double>& v, Extreme mode)
{
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (mode == Extreme::max) {
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] > v[b]; });
    } else {
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    }
    return order;
}

// Row r can put positive mass on t for some feasible distribution.
template <class Model>
std::vector<std::vector<std::size_t>> possible_successors(const Model& m)
{
    const std::size_t n = m.size();
    std::vector<std::vector<std::size_t>> succ(n);
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double lower_sum = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            if (m.entry(r, t, lo, hi)) {
                lower_sum += lo;
            }
        }
        for (std::size_t t = 0; t < n; ++t) {
            if (m.entry(r, t, lo, hi) && std::min(hi, 1.0 - (lower_sum - lo)) > 0.0) {
                succ[r].push_back(t);
            }
        }
    }
    return succ;
}

// States that can reach `goal` through `through` states along possible edges.
std::vector<bool> can_reach(const std::vector<std::vector<std::size_t>>& succ, const StateSet& through,
                            const std::vector<bool>& goal)
{
    const std::size_t n = succ.size();
    std::vector<std::vector<std::size_t>> pred(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (auto t : succ[r]) {
            pred[t].push_back(r);
        }
    }
    std::vector<bool> reach = goal;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (goal[s]) {
            stack.push_back(s);
        }
    }
    while (!stack.empty()) {
        const std::size_t t = stack.back();
        stack.pop_back();
        for (auto r : pred[t]) {
            if (!reach[r] && through[r]) {
                reach[r] = true;
                stack.push_back(r);
            }
        }
    }
    return reach;
}

// States from which some adversary avoids `b` with probability one.
template <class Model>
std::vector<bool> can_avoid(const Model& m, const StateSet& a, const StateSet& b)
{
    const std::size_t n = m.size();
    std::vector<bool> z(n);
    for (std::size_t s = 0; s < n; ++s) {
        z[s] = !b[s];
    }
    double lo = 0.0;
    double hi = 0.0;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t s = 0; s < n; ++s) {
            if (!z[s] || !a[s]) {
                continue;
            }
            // Needs a feasible row supported inside z.
            double inside_hi = 0.0;
            bool ok = true;
            for (std::size_t t = 0; t < n && ok; ++t) {
                if (!m.entry(s, t, lo, hi)) {
                    continue;
                }
                if (z[t]) {
                    inside_hi += hi;
                } else if (lo > 0.0) {
                    ok = false;
                }
            }
            if (!ok || inside_hi < 1.0 - 1e-12) {
                z[s] = false;
                changed = true;
            }
        }
    }
    return z;
}

template <class Model>
ProbIntervals bounded_until_model(const Model& m, const StateSet& a, const StateSet& b, int horizon)
{
    if (horizon < 0) {
        throw validation_error("horizon must be nonnegative");
    }
    const std::size_t n = m.size();
    std::vector<double> lo(n);
    std::vector<double> hi(n);
    for (std::size_t s = 0; s < n; ++s) {
        lo[s] = hi[s] = b[s] ? 1.0 : 0.0;
    }
    std::vector<double> next_lo(n);
    std::vector<double> next_hi(n);
    for (int step = 0; step < horizon; ++step) {
        const auto order_min = sorted_order(lo, Extreme::min);
        const auto order_max = sorted_order(hi, Extreme::max);
        for (std::size_t s = 0; s < n; ++s) {
            if (b[s] || !a[s]) {
                next_lo[s] = lo[s];
                next_hi[s] = hi[s];
                continue;
            }
            next_lo[s] = std::clamp(row_extreme(m, s, lo, order_min), 0.0, 1.0);
            next_hi[s] = std::clamp(row_extreme(m, s, hi, order_max), 0.0, 1.0);
        }
        lo.swap(next_lo);
        hi.swap(next_hi);
    }
    ProbIntervals out(n);
    for (std::size_t s = 0; s < n; ++s) {
        out[s] = {std::min(lo[s], hi[s]), std::max(lo[s], hi[s])};
    }
    return out;
}

template <class Model>
ProbIntervals until_model(const Model& m, const StateSet& a, const StateSet& b, const CheckOptions& options)
{
    if (!(options.tol > 0.0)) {
        throw validation_error("tolerance must be positive");
    }
    const std::size_t n = m.size();
    const auto succ = possible_successors(m);

    // hi = 0 where B is unreachable; lo = 0 where the adversary can avoid B.
    const std::vector<bool> reach_possible = can_reach(succ, a, b);
    const std::vector<bool> avoidable = can_avoid(m, a, b);
    // lo = 1 where no adversary can reach an avoiding state first.
    std::vector<bool> escape_goal(n);
    for (std::size_t s = 0; s < n; ++s) {
        escape_goal[s] = avoidable[s];
    }
    StateSet through(n);
    for (std::size_t s = 0; s < n; ++s) {
        through[s] = a[s] && !b[s];
    }
    const std::vector<bool> may_fail = can_reach(succ, through, escape_goal);

    std::vector<double> lo(n, 0.0);
    std::vector<double> hi(n, 0.0);
    std::vector<bool> fixed(n, false);
    for (std::size_t s = 0; s < n; ++s) {
        if (b[s]) {
            lo[s] = hi[s] = 1.0;
            fixed[s] = true;
        } else if (!a[s] || !reach_possible[s]) {
            fixed[s] = true;
        } else if (!may_fail[s]) {
            lo[s] = 1.0;
        }
    }
    std::vector<bool> lo_fixed(n);
    for (std::size_t s = 0; s < n; ++s) {
        lo_fixed[s] = fixed[s] || avoidable[s] || lo[s] == 1.0;
        if (lo[s] == 1.0) {
            hi[s] = 1.0;
        }
    }

    std::vector<double> next_lo(n);
    std::vector<double> next_hi(n);
    for (std::size_t it = 0;; ++it) {
        if (it >= options.max_iterations) {
            throw non_convergence("until iteration did not converge within " +
                                  std::to_string(options.max_iterations) + " sweeps");
        }
        const auto order_min = sorted_order(lo, Extreme::min);
        const auto order_max = sorted_order(hi, Extreme::max);
        double change = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            next_lo[s] = lo_fixed[s] ? lo[s] : std::clamp(row_extreme(m, s, lo, order_min), lo[s], 1.0);
            next_hi[s] = fixed[s] || hi[s] == 1.0 ? hi[s] : std::clamp(row_extreme(m, s, hi, order_max), hi[s], 1.0);
            change = std::max({change, next_lo[s] - lo[s], next_hi[s] - hi[s]});
        }
        lo.swap(next_lo);
        hi.swap(next_hi);
        if (options.on_iterate) {
            options.on_iterate(it, lo, hi);
        }
        if (change < options.tol) {
            break;
        }
    }
    ProbIntervals out(n);
    for (std::size_t s = 0; s < n; ++s) {
        out[s] = {std::min(lo[s], hi[s]), std::max(lo[s], hi[s])};
    }
    return out;
}

void check_sets(const Imc& imc, const StateSet& a, const StateSet& b)
{
    if (a.size() != imc.size() || b.size() != imc.size()) {
        throw validation_error("state sets must cover every IMC state");
    }
}

} // namespace

StateSet states_satisfying(const Imc& imc, const StateFormula& f)
{
    StateSet s(imc.size());
    for (std::size_t i = 0; i < imc.size(); ++i) {
        s[i] = f.eval(imc.labels(i));
    }
    return s;
}

ProbIntervals bounded_until_interval(const Imc& imc, const StateSet& a, const StateSet& b, int horizon)
{
    check_sets(imc, a, b);
    return bounded_until_model(ImcModel(imc), a, b, horizon);
}

ProbIntervals bounded_until_interval(const Imc& imc, const BoundedUntil& prop)
{
    return bounded_until_interval(imc, states_satisfying(imc, prop.lhs), states_satisfying(imc, prop.rhs),
                                  prop.horizon);
}

ProbIntervals until_interval(const Imc& imc, const StateSet& a, const StateSet& b, const CheckOptions& options)
{
    check_sets(imc, a, b);
    return until_model(ImcModel(imc), a, b, options);
}

ProbIntervals until_interval(const Imc& imc, const Until& prop, const CheckOptions& options)
{
    return until_interval(imc, states_satisfying(imc, prop.lhs), states_satisfying(imc, prop.rhs), options);
}

ProbIntervals safety_interval(const Imc& imc, const Safety& prop, const CheckOptions& options)
{
    const StateSet all(imc.size(), true);
    StateSet unsafe = states_satisfying(imc, prop.safe);
    unsafe.flip();
    const ProbIntervals reach = prop.horizon ? bounded_until_interval(imc, all, unsafe, *prop.horizon)
                                             : until_interval(imc, all, unsafe, options);
    ProbIntervals out(reach.size());
    for (std::size_t s = 0; s < reach.size(); ++s) {
        out[s] = {1.0 - reach[s].hi, 1.0 - reach[s].lo};
    }
    return out;
}

ProbIntervals dfa_product_interval(const Imc& imc, const Dfa& dfa, const CheckOptions& options)
{
    dfa.validate();
    const ProductModel model(imc, dfa);
    const std::size_t d = dfa.size();
    const StateSet all(model.size(), true);
    StateSet accept(model.size());
    for (std::size_t p = 0; p < model.size(); ++p) {
        accept[p] = dfa.accepting[p % d];
    }
    const ProbIntervals product = until_model(model, all, accept, options);
    ProbIntervals out(imc.size());
    for (std::size_t i = 0; i < imc.size(); ++i) {
        out[i] = product[i * d + dfa.step(dfa.initial, imc.labels(i))];
    }
    return out;
}

ProbIntervals check_property(const Imc& imc, const Property& prop, const CheckOptions& options)
{
    struct Visitor {
        const Imc& imc;
        const CheckOptions& options;
        ProbIntervals operator()(const BoundedUntil& p) const { return bounded_until_interval(imc, p); }
        ProbIntervals operator()(const Until& p) const { return until_interval(imc, p, options); }
        ProbIntervals operator()(const Safety& p) const { return safety_interval(imc, p, options); }
        ProbIntervals operator()(const DfaSpec& p) const { return dfa_product_interval(imc, p.dfa, options); }
    };
    return std::visit(Visitor{imc, options}, prop);
}

WinningRegion winning_region(const ProbIntervals& iv, double rho, Comparison bowtie)
{
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw validation_error("threshold rho must lie in [0, 1]");
    }
    WinningRegion w;
    for (std::size_t s = 0; s < iv.size(); ++s) {
        const double lo = iv[s].lo;
        const double hi = iv[s].hi;
        bool all = false;
        bool none = false;
        switch (bowtie) {
        case Comparison::ge: all = lo >= rho; none = hi < rho; break;
        case Comparison::gt: all = lo > rho; none = hi <= rho; break;
        case Comparison::le: all = hi <= rho; none = lo > rho; break;
        case Comparison::lt: all = hi < rho; none = lo >= rho; break;
        }
        (all ? w.guaranteed : none ? w.impossible : w.undecided).push_back(s);
    }
    return w;
}

} // namespace imcv
