#pragma once

#include "imcv/imc.hpp"
#include "imcv/logic.hpp"

#include <functional>
#include <vector>

namespace imcv {

/// Satisfaction-probability bounds of one state.
struct ProbInterval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double width() const { return hi - lo; }
};

using ProbIntervals = std::vector<ProbInterval>;
using StateSet = std::vector<bool>;

struct CheckOptions {
    double tol = 1e-9;
    std::size_t max_iterations = 1'000'000;
    /// Called after every sweep of until_interval with the current lower and
    /// upper iterates.
    std::function<void(std::size_t, const std::vector<double>&, const std::vector<double>&)> on_iterate;
};

/// States whose labels satisfy `f`.
StateSet states_satisfying(const Imc& imc, const StateFormula& f);

/// Bounds on P(A U<=T B) under a time-varying adversary, by T backward
/// sweeps of min/max extreme rows.
ProbIntervals bounded_until_interval(const Imc& imc, const StateSet& a, const StateSet& b, int horizon);
ProbIntervals bounded_until_interval(const Imc& imc, const BoundedUntil& prop);

/// Bounds on P(A U B). States that cannot reach B (possible-support graph)
/// get [0, 0]; states where the adversary can avoid B forever get lo = 0;
/// states reaching B under every adversary get lo = 1. The remaining
/// values are iterated from below until the sup-norm change drops under tol.
/// Throws non_convergence when the iteration cap is reached.
ProbIntervals until_interval(const Imc& imc, const StateSet& a, const StateSet& b, const CheckOptions& options = {});
ProbIntervals until_interval(const Imc& imc, const Until& prop, const CheckOptions& options = {});

/// Bounds on P(G A) (optionally G<=T A) as the complement of reaching !A.
ProbIntervals safety_interval(const Imc& imc, const Safety& prop, const CheckOptions& options = {});

/// Bounds on acceptance by a DFA reading the state labels (the initial
/// state's label included). Result is indexed by IMC state.
ProbIntervals dfa_product_interval(const Imc& imc, const Dfa& dfa, const CheckOptions& options = {});

ProbIntervals check_property(const Imc& imc, const Property& prop, const CheckOptions& options = {});

enum class Comparison { ge, gt, le, lt };

struct WinningRegion {
    std::vector<std::size_t> guaranteed;
    std::vector<std::size_t> impossible;
    std::vector<std::size_t> undecided;
};

/// Partition states by whether their whole interval (guaranteed), none of
/// it (impossible) or only part of it satisfies `p bowtie rho`.
WinningRegion winning_region(const ProbIntervals& iv, double rho, Comparison bowtie);

} // namespace imcv
