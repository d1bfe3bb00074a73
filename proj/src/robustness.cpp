#include "imcv/robustness.hpp"

#include "imcv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace imcv {

CompletenessConstants completeness_constants(double eta, std::size_t cells)
{
    const double n = static_cast<double>(cells);
    CompletenessConstants c;
    c.ws = (std::sqrt(2.0 * n) + 2.0) * eta;
    c.tv = n * eta * c.ws;
    return c;
}

CompletenessReport completeness_margin(double eta, std::size_t cells, double kappa, double theta1, double theta2)
{
    if (!(eta > 0.0) || cells == 0 || kappa < 0.0 || theta1 < 0.0 || theta2 < theta1) {
        throw validation_error("completeness margin needs eta > 0, N >= 1, kappa >= 0 and 0 <= theta1 <= theta2");
    }
    const CompletenessConstants c = completeness_constants(eta, cells);
    CompletenessReport r;
    r.eta = eta;
    r.cells = cells;
    r.ws = c.ws;
    r.tv = c.tv;
    r.kappa = kappa;
    r.lhs = 2.0 * eta + static_cast<double>(cells) * eta * c.tv + kappa;
    r.rhs = theta2 - theta1;
    r.satisfied = r.lhs <= r.rhs;
    return r;
}

double max_eta(const SystemSpec& spec, double theta1, double theta2, double kappa, const EtaLadder& ladder)
{
    if (!(theta2 > theta1) || !(kappa < theta2 - theta1)) {
        throw no_feasible_eta("the completeness inequality needs kappa < theta2 - theta1");
    }
    double eta = ladder.eta0;
    if (eta <= 0.0) {
        eta = std::numeric_limits<double>::infinity();
        for (std::size_t d = 0; d < spec.working_box.size(); ++d) {
            eta = std::min(eta, spec.working_box[d].width());
        }
    }
    for (int k = 0; k <= ladder.max_halvings; ++k, eta /= 2.0) {
        const std::size_t cells = grid_cell_count(spec.working_box, eta);
        if (cells > ladder.max_cells) {
            break;
        }
        try {
            (void)build_partition(spec, eta);
        } catch (const misaligned_labels&) {
            continue;
        }
        if (completeness_margin(eta, cells, kappa, theta1, theta2).satisfied) {
            return eta;
        }
    }
    throw no_feasible_eta("no grid size on the ladder satisfies the completeness inequality");
}

bool wasserstein_radius_check(const ReferenceLedger& ledger, const GaussianPoint& g, std::size_t cell)
{
    const double radius = ledger.claim1_radius;
    for (const auto& ref : ledger.entries.at(cell).references) {
        if (gaussian_w1_bounds(g, ref).hi() <= radius) {
            return true;
        }
    }
    return false;
}

std::vector<PerturbationPolicy> sandwich_policies(std::size_t n)
{
    std::vector<PerturbationPolicy> out;
    out.push_back(PerturbationPolicy::zero());
    if (n <= 4) {
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
            std::vector<double> c(n);
            for (std::size_t d = 0; d < n; ++d) {
                c[d] = (mask >> d & 1U) ? -1.0 : 1.0;
            }
            out.push_back(PerturbationPolicy::corner(std::move(c)));
        }
    } else {
        for (std::size_t d = 0; d < n; ++d) {
            for (double s : {1.0, -1.0}) {
                std::vector<double> c(n, 0.0);
                c[d] = s;
                out.push_back(PerturbationPolicy::corner(std::move(c)));
            }
        }
    }
    out.push_back(PerturbationPolicy::random_dirac());
    const std::vector<double> plus(n, 1.0);
    const std::vector<double> minus(n, -1.0);
    out.push_back(PerturbationPolicy::two_point(0.5, plus, minus));
    for (const auto& dir : {plus, minus}) {
        std::vector<double> far(n);
        std::vector<double> near(n);
        for (std::size_t d = 0; d < n; ++d) {
            far[d] = 2.0 * dir[d];
            near[d] = -2.0 / 3.0 * dir[d];
        }
        out.push_back(PerturbationPolicy::two_point(0.25, std::move(far), std::move(near)));
    }
    return out;
}

namespace {

int property_horizon(const Property& p)
{
    if (const auto* bu = std::get_if<BoundedUntil>(&p)) {
        return bu->horizon;
    }
    if (const auto* s = std::get_if<Safety>(&p); s != nullptr && s->horizon) {
        return *s->horizon;
    }
    return 0;
}

bool is_bounded(const Property& p)
{
    if (std::holds_alternative<BoundedUntil>(p)) {
        return true;
    }
    const auto* s = std::get_if<Safety>(&p);
    return s != nullptr && s->horizon.has_value();
}

Estimate run_estimate(const SystemSpec& spec, const Partition& partition, const SandwichQuery& q,
                      const PerturbationPolicy& policy, int horizon, std::size_t paths)
{
    if (is_bounded(q.property)) {
        return estimate_probability(spec, partition, q.x0, horizon, paths, policy, q.seed, q.property,
                                    q.confidence);
    }
    return estimate_with_doubling(spec, partition, q.x0, horizon, paths, policy, q.seed, q.property, q.confidence);
}

} // namespace

SandwichReport sandwich_report(const SystemSpec& spec, double eta, double kappa, double theta1, double theta2,
                               const std::optional<SandwichQuery>& query)
{
    SandwichReport r;
    r.theta1 = theta1;
    r.theta2 = theta2;

    SystemSpec lower = spec;
    lower.theta = theta1;
    SystemSpec upper = spec;
    upper.theta = theta2;

    const Partition partition = build_partition(spec, eta);
    r.margin = completeness_margin(eta, partition.cell_count(), kappa, theta1, theta2);
    BuildOptions options;
    options.store_reference_measures = false;
    const Abstraction abs = build_imc(lower, partition, kappa, options);
    r.claim1_radius = abs.ledger.claim1_radius;
    r.recovery = abs.ledger.recovery;
    r.imc_row_gap = row_gap(abs.imc);
    r.diagnostics = abs.ledger.diagnostics;

    for (std::size_t c = 0; c < partition.cell_count(); ++c) {
        const CellReferences& e = abs.ledger.entries[c];
        GaussianPoint mid;
        for (std::size_t d = 0; d < spec.n; ++d) {
            mid.mean.push_back(e.params.mean[d].mid());
            mid.var.push_back(e.params.var[d].mid());
        }
        CellRadius cr;
        cr.references = e.references.size();
        cr.nearest = std::numeric_limits<double>::infinity();
        for (const auto& ref : e.references) {
            cr.nearest = std::min(cr.nearest, gaussian_w1_bounds(mid, ref).hi());
        }
        cr.within_claim1 = wasserstein_radius_check(abs.ledger, mid, c);
        r.radii.push_back(cr);
    }

    if (query) {
        const SandwichQuery& q = *query;
        SandwichIntervals iv;
        iv.state = partition.locate(q.x0);
        if (iv.state == partition.sink()) {
            throw validation_error("initial state lies outside W");
        }
        iv.imc = check_property(abs.imc, q.property)[iv.state];
        const int horizon = q.horizon > 0 ? q.horizon : std::max(1, property_horizon(q.property));
        iv.lower_system = run_estimate(lower, partition, q, PerturbationPolicy::zero(), horizon, q.paths);
        iv.lower_in_imc = soundness_check(iv.lower_system.ci, iv.imc, 0.0);
        const std::size_t policy_paths = q.policy_paths > 0 ? q.policy_paths : q.paths;
        double lo = 1.0;
        double hi = 0.0;
        for (const auto& policy : sandwich_policies(spec.n)) {
            PolicyEstimate pe{policy.describe(), run_estimate(upper, partition, q, policy, horizon, policy_paths)};
            lo = std::min(lo, pe.estimate.ci.lo());
            hi = std::max(hi, pe.estimate.ci.hi());
            iv.upper_system.push_back(std::move(pe));
        }
        iv.envelope = Interval(lo, hi);
        iv.imc_in_envelope = lo <= iv.imc.lo && iv.imc.hi <= hi;
        r.intervals = std::move(iv);
    }
    return r;
}

std::string summary(const SandwichReport& r)
{
    std::ostringstream os;
    os.precision(6);
    const auto& m = r.margin;
    os << "eta " << m.eta << ", N " << m.cells << ", kappa " << m.kappa << "\n";
    os << "ws " << m.ws << ", tv " << m.tv << "\n";
    os << "completeness: " << m.lhs << (m.satisfied ? " <= " : " > ") << m.rhs << " ("
       << (m.satisfied ? "satisfied" : "not satisfied") << ")\n";
    os << "claim-1 radius " << r.claim1_radius << ", recovery radius " << r.recovery << ", row gap "
       << r.imc_row_gap << "\n";
    const auto covered = std::count_if(r.radii.begin(), r.radii.end(), [](const CellRadius& c) { return c.within_claim1; });
    os << "cells with a reference inside the claim-1 radius: " << covered << "/" << r.radii.size() << "\n";
    if (r.intervals) {
        const auto& iv = *r.intervals;
        os << "state " << iv.state << "\n";
        os << "  theta1 Monte Carlo [" << iv.lower_system.ci.lo() << ", " << iv.lower_system.ci.hi() << "]\n";
        os << "  IMC               [" << iv.imc.lo << ", " << iv.imc.hi << "]\n";
        os << "  theta2 envelope   [" << iv.envelope.lo() << ", " << iv.envelope.hi() << "]\n";
        os << "  theta1 inside IMC: " << to_string(iv.lower_in_imc) << "\n";
        os << "  IMC inside envelope: " << (iv.imc_in_envelope ? "yes" : "no") << "\n";
    }
    for (const auto& d : r.diagnostics) {
        os << "note: " << d << "\n";
    }
    return os.str();
}

} // namespace imcv
