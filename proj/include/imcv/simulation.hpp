#pragma once

#include "imcv/checker.hpp"
#include "imcv/logic.hpp"
#include "imcv/system.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace imcv {

/// Cell indices visited by one path of the stopped process.
///
/// `states[t]` is the partition state at time t; once the sink appears the
/// trace ends (`stopped`).
struct TraceSample {
    std::vector<std::size_t> states;
    bool stopped = false;
    int horizon = 0;
};

/// Law of the bounded perturbation xi_t.
struct PerturbationPolicy {
    enum class Kind {
        none,         // xi = 0
        dirac_corner, // xi = direction (a corner of the unit ball)
        dirac_random, // xi = c, one point of the unit ball drawn from the seed
        two_point_l1  // xi = points[0] w.p. weight, else points[1]; E|xi| <= 1
    };

    Kind kind = Kind::none;
    std::vector<double> direction;
    double weight = 0.5;
    std::vector<std::vector<double>> points;

    static PerturbationPolicy zero() { return {}; }
    static PerturbationPolicy corner(std::vector<double> direction);
    static PerturbationPolicy random_dirac();
    static PerturbationPolicy two_point(double weight, std::vector<double> a, std::vector<double> b);

    /// Expected infinity norm of xi; at most 1 for every valid policy.
    [[nodiscard]] double expected_norm() const;
    void validate(std::size_t n) const;
    [[nodiscard]] std::string describe() const;
};

/// Simulate `count` paths of X+ = f(X) + b(X) w + theta xi from x0 for up to
/// `horizon` steps, stopping at the first exit from W. Path i draws from its
/// own generator seeded with seed ^ i, so the first paths do not depend on
/// `count`. The returned traces are paths first, ..., first + count - 1.
std::vector<TraceSample> simulate_paths(const SystemSpec& spec, const Partition& partition,
                                        const std::vector<double>& x0, int horizon, std::size_t count,
                                        const PerturbationPolicy& policy, std::uint64_t seed,
                                        std::size_t first = 0);

struct Estimate {
    double point = 0.0;
    Interval ci;
    std::size_t successes = 0;
    std::size_t samples = 0;
    bool truncated = false;
    std::string warning;
};

/// Clopper-Pearson interval for k successes out of n at the given confidence.
Interval clopper_pearson(std::size_t successes, std::size_t samples, double confidence);

/// Whether one finite trace satisfies the property. Unbounded properties
/// undecided at the end of the trace count as not satisfied and set
/// `truncated`.
bool trace_satisfies(const TraceSample& trace, const Property& prop, const std::vector<Labels>& labels,
                     bool& truncated);

Estimate estimate_probability(const std::vector<TraceSample>& samples, const Property& prop,
                              const std::vector<Labels>& labels, double confidence);

/// Streaming form of simulate_paths + estimate_probability: paths are
/// generated and evaluated in chunks, so `count` is not limited by memory.
/// Gives the same result as the two-step form.
Estimate estimate_probability(const SystemSpec& spec, const Partition& partition, const std::vector<double>& x0,
                              int horizon, std::size_t count, const PerturbationPolicy& policy,
                              std::uint64_t seed, const Property& prop, double confidence);

/// Estimate for an unbounded property by doubling the simulation horizon
/// from `horizon` until the point estimate moves by less than 1e-3.
Estimate estimate_with_doubling(const SystemSpec& spec, const Partition& partition, const std::vector<double>& x0,
                                int horizon, std::size_t count, const PerturbationPolicy& policy,
                                std::uint64_t seed, const Property& prop, double confidence,
                                int max_horizon = 1 << 12);

enum class Verdict { pass, inconclusive, fail };

std::string to_string(Verdict v);

/// PASS if mc_ci is inside [lo - slack, hi + slack], FAIL if disjoint,
/// INCONCLUSIVE otherwise.
Verdict soundness_check(const Interval& mc_ci, const ProbInterval& imc_iv, double slack);

/// One line per trace: comma-separated state indices.
void write_traces(std::ostream& os, const std::vector<TraceSample>& traces);

} // namespace imcv
