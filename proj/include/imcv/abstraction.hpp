#pragma once

#include "imcv/gaussian.hpp"
#include "imcv/imc.hpp"
#include "imcv/inclusion.hpp"
#include "imcv/system.hpp"

#include <string>
#include <vector>

namespace imcv {

/// Snapped reference Gaussians recorded for one cell.
struct CellReferences {
    /// Hull of the interval Gaussian parameters over all sub-boxes of the cell.
    GaussianIntervalParams params;
    /// Reference parameters (eta*floor(m/eta), eta^2*floor(s^2/eta^2)).
    std::vector<GaussianPoint> references;
    /// Discrete image of each reference over the partition (sink last).
    std::vector<DiscreteDist> measures;
    std::size_t pieces = 0;
};

/// Bookkeeping trace of the abstraction relation: the reference Gaussians
/// and discrete reference measures per cell, plus the ball radii.
struct ReferenceLedger {
    double eta = 0.0;
    std::size_t cells = 0;
    double kappa = 0.0;
    double ws = 0.0;            // (sqrt(2N) + 2) eta
    double tv = 0.0;            // N eta ws
    double recovery = 0.0;      // 2 eta + N eta tv
    double claim1_radius = 0.0; // sqrt(2N) eta
    LipschitzEstimate lipschitz_f;
    LipschitzEstimate lipschitz_b;
    std::vector<CellReferences> entries;
    std::vector<std::string> diagnostics;
};

struct BuildOptions {
    std::size_t subdivision_cap = default_subdivision_cap;
    std::size_t reference_cap = std::size_t{1} << 16; // per cell
    bool store_reference_measures = true;
};

struct Abstraction {
    Imc imc;
    ReferenceLedger ledger;
};

/// kappa used when the caller does not choose one.
inline double default_kappa(double eta) { return eta / 10.0; }

/// IMC abstraction of `spec` over `partition`.
///
/// Every cell is subdivided until the inclusion widths of f and b meet the
/// kappa budget; each piece yields mean bounds [f] + theta[-1, 1] and
/// diagonal variance bounds from [B][B]^T. Transition bounds to each cell
/// are the min/max of the Gaussian box-probability bounds over the pieces,
/// the sink column collects the mass leaving W, and the result is
/// tightened by validate_imc.
Abstraction build_imc(const SystemSpec& spec, const Partition& partition, double kappa,
                      const BuildOptions& options = {});

/// max_i sum_j (upper_ij - lower_ij).
double row_gap(const Imc& imc);

/// Discrete image over the partition of a single diagonal Gaussian; the
/// last entry is the mass outside the working box.
DiscreteDist discretize_gaussian(const GaussianPoint& g, const Partition& partition);

} // namespace imcv
