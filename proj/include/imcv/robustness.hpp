#pragma once

#include "imcv/abstraction.hpp"
#include "imcv/checker.hpp"
#include "imcv/simulation.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace imcv {

struct CompletenessConstants {
    double ws = 0.0; // (sqrt(2N) + 2) eta
    double tv = 0.0; // N eta ws
};

CompletenessConstants completeness_constants(double eta, std::size_t cells);

struct CompletenessReport {
    double eta = 0.0;
    std::size_t cells = 0;
    double ws = 0.0;
    double tv = 0.0;
    double kappa = 0.0;
    double lhs = 0.0; // 2 eta + N eta tv + kappa
    double rhs = 0.0; // theta2 - theta1
    bool satisfied = false;
};

CompletenessReport completeness_margin(double eta, std::size_t cells, double kappa, double theta1, double theta2);

struct EtaLadder {
    /// First candidate; 0 means the shortest side of the working box.
    double eta0 = 0.0;
    int max_halvings = 40;
    std::size_t max_cells = std::size_t{1} << 24;
};

/// Largest eta0 / 2^k whose partition satisfies the completeness
/// inequality. Candidates whose grid straddles label regions are skipped.
/// Throws no_feasible_eta when none qualifies.
double max_eta(const SystemSpec& spec, double theta1, double theta2, double kappa, const EtaLadder& ladder = {});

/// True iff the W1 upper bound between g and some reference Gaussian of
/// `cell` is at most sqrt(2N) eta.
bool wasserstein_radius_check(const ReferenceLedger& ledger, const GaussianPoint& g, std::size_t cell);

struct SandwichQuery {
    Property property;
    std::vector<double> x0;
    int horizon = 0; // simulation horizon; 0 takes it from the property
    std::size_t paths = 10'000;
    std::size_t policy_paths = 0; // paths per theta2 policy; 0 uses `paths`
    std::uint64_t seed = 0;
    double confidence = 0.99;
};

struct CellRadius {
    std::size_t references = 0;
    /// W1 upper bound from the midpoint Gaussian of the cell to its nearest reference.
    double nearest = 0.0;
    bool within_claim1 = false;
};

struct PolicyEstimate {
    std::string policy;
    Estimate estimate;
};

struct SandwichIntervals {
    std::size_t state = 0;
    Estimate lower_system; // X1 under the zero perturbation
    ProbInterval imc;
    std::vector<PolicyEstimate> upper_system; // X2 under sampled policies
    Interval envelope;
    Verdict lower_in_imc = Verdict::inconclusive;
    bool imc_in_envelope = false;
};

struct SandwichReport {
    double theta1 = 0.0;
    double theta2 = 0.0;
    CompletenessReport margin;
    double claim1_radius = 0.0;
    double recovery = 0.0;
    double imc_row_gap = 0.0;
    std::vector<CellRadius> radii;
    std::optional<SandwichIntervals> intervals;
    std::vector<std::string> diagnostics;
};

/// Perturbation policies sampled for the upper system in dimension n.
std::vector<PerturbationPolicy> sandwich_policies(std::size_t n);

/// Build the IMC of the theta1 system at (eta, kappa), evaluate the
/// completeness inequality and, when a query is given, compare Monte Carlo
/// estimates of the theta1 and theta2 systems with the IMC interval.
SandwichReport sandwich_report(const SystemSpec& spec, double eta, double kappa, double theta1, double theta2,
                               const std::optional<SandwichQuery>& query = std::nullopt);

std::string summary(const SandwichReport& report);

} // namespace imcv
