#include "imcv/abstraction.hpp"

#include "imcv/errors.hpp"
#include "imcv/parallel.hpp"
#include "imcv/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace imcv {

namespace {

struct GridAxes {
    // targets[d][k]: k-th grid interval along axis d, with its upper-face rule.
    std::vector<std::vector<Interval>> targets;
    std::vector<std::vector<UpperFace>> faces;
    // coords[c * dims + d]: grid coordinate of cell c on axis d.
    std::vector<std::size_t> coords;
    std::size_t dims = 0;
};

GridAxes grid_axes(const Partition& partition)
{
    GridAxes g;
    g.dims = partition.dims();
    const auto& shape = partition.shape();
    const auto& w = partition.working_box();
    g.targets.resize(g.dims);
    g.faces.resize(g.dims);
    for (std::size_t d = 0; d < g.dims; ++d) {
        for (std::size_t k = 0; k < shape[d]; ++k) {
            const double lo = w[d].lo() + static_cast<double>(k) * partition.eta();
            const bool last = k + 1 == shape[d];
            g.targets[d].emplace_back(lo, last ? w[d].hi() : lo + partition.eta());
            g.faces[d].push_back(last ? UpperFace::closed : UpperFace::open);
        }
    }
    g.coords.reserve(partition.cell_count() * g.dims);
    for (std::size_t c = 0; c < partition.cell_count(); ++c) {
        for (auto k : partition.coordinates(c)) {
            g.coords.push_back(k);
        }
    }
    return g;
}

std::vector<Expr> flatten(const std::vector<std::vector<Expr>>& b)
{
    std::vector<Expr> out;
    for (const auto& row : b) {
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

GaussianIntervalParams piece_params(const SystemSpec& spec, const InclusionPiece& piece)
{
    GaussianIntervalParams g;
    std::vector<Interval> mean;
    for (std::size_t d = 0; d < spec.n; ++d) {
        const Interval& fm = piece.outputs[d];
        mean.push_back(spec.theta > 0.0 ? fm + Interval(-spec.theta, spec.theta) : fm);
    }
    g.mean = IntervalBox(std::move(mean));
    for (std::size_t d = 0; d < spec.n; ++d) {
        Interval v = 0.0;
        for (std::size_t j = 0; j < spec.k; ++j) {
            v = v + sqr(piece.outputs[spec.n + d * spec.k + j]);
        }
        g.var.push_back(v);
    }
    return g;
}

// Snapped reference parameters of every Gaussian in the family.
void collect_references(const GaussianIntervalParams& g, double eta, std::set<std::vector<double>>& out,
                        std::size_t cap)
{
    const std::size_t n = g.mean.size();
    const double eta2 = eta * eta;
    std::vector<std::vector<double>> axis_values(2 * n);
    for (std::size_t d = 0; d < n; ++d) {
        const double k0 = std::floor(g.mean[d].lo() / eta);
        const double k1 = std::floor(g.mean[d].hi() / eta);
        for (double k = k0; k <= k1; k += 1.0) {
            axis_values[d].push_back(eta * k);
        }
        const double v0 = std::floor(g.var[d].lo() / eta2);
        const double v1 = std::floor(g.var[d].hi() / eta2);
        for (double k = v0; k <= v1; k += 1.0) {
            axis_values[n + d].push_back(eta2 * k);
        }
    }
    std::size_t combos = 1;
    for (const auto& v : axis_values) {
        combos *= v.size();
        if (combos > cap) {
            throw budget_error("reference ledger for a cell exceeds " + std::to_string(cap) + " entries");
        }
    }
    std::vector<std::size_t> idx(2 * n, 0);
    for (std::size_t c = 0; c < combos; ++c) {
        std::vector<double> key(2 * n);
        std::size_t rem = c;
        for (std::size_t a = 0; a < 2 * n; ++a) {
            key[a] = axis_values[a][rem % axis_values[a].size()];
            rem /= axis_values[a].size();
        }
        out.insert(std::move(key));
        if (out.size() > cap) {
            throw budget_error("reference ledger for a cell exceeds " + std::to_string(cap) + " entries");
        }
    }
}

} // namespace

DiscreteDist discretize_gaussian(const GaussianPoint& g, const Partition& partition)
{
    const GridAxes axes = grid_axes(partition);
    const std::size_t n = axes.dims;
    std::vector<std::vector<double>> axis_prob(n);
    for (std::size_t d = 0; d < n; ++d) {
        for (std::size_t k = 0; k < axes.targets[d].size(); ++k) {
            const Interval& t = axes.targets[d][k];
            double p = 0.0;
            if (g.var[d] > 0.0) {
                p = normal_interval_prob(t.lo(), t.hi(), g.mean[d], std::sqrt(g.var[d]));
            } else {
                const double m = g.mean[d];
                p = (m >= t.lo() && (axes.faces[d][k] == UpperFace::closed ? m <= t.hi() : m < t.hi())) ? 1.0 : 0.0;
            }
            axis_prob[d].push_back(p);
        }
    }
    DiscreteDist mu;
    mu.probs.assign(partition.state_count(), 0.0);
    double inside = 0.0;
    for (std::size_t c = 0; c < partition.cell_count(); ++c) {
        double p = 1.0;
        for (std::size_t d = 0; d < n; ++d) {
            p *= axis_prob[d][axes.coords[c * n + d]];
        }
        mu.probs[c] = p;
        inside += p;
    }
    mu.probs.back() = std::max(0.0, 1.0 - inside);
    return mu;
}

Abstraction build_imc(const SystemSpec& spec, const Partition& partition, double kappa, const BuildOptions& options)
{
    spec.validate();
    if (!(kappa > 0.0)) {
        throw validation_error("kappa must be positive");
    }
    if (partition.dims() != spec.n) {
        throw validation_error("partition dimension does not match the system");
    }

    const std::size_t cells = partition.cell_count();
    const std::size_t states = partition.state_count();
    const std::size_t n = spec.n;
    const GridAxes axes = grid_axes(partition);
    const std::vector<Expr> diffusion = flatten(spec.b);

    std::vector<double> lower(states * states, 0.0);
    std::vector<double> upper(states * states, 0.0);
    std::vector<CellReferences> entries(cells);

    parallel_for(cells, [&](std::size_t i) {
        const auto pieces = subdivide_until(spec.f, diffusion, partition.cell(i), kappa, options.subdivision_cap);
        double* lo_row = lower.data() + i * states;
        double* hi_row = upper.data() + i * states;
        std::fill(lo_row, lo_row + states, 1.0);

        CellReferences& entry = entries[i];
        entry.pieces = pieces.size();
        std::set<std::vector<double>> refs;
        std::vector<std::vector<AxisExtremes>> ext(n);
        for (std::size_t p = 0; p < pieces.size(); ++p) {
            const GaussianIntervalParams g = piece_params(spec, pieces[p]);
            if (p == 0) {
                entry.params = g;
            } else {
                std::vector<Interval> mean;
                for (std::size_t d = 0; d < n; ++d) {
                    mean.push_back(hull(entry.params.mean[d], g.mean[d]));
                    entry.params.var[d] = hull(entry.params.var[d], g.var[d]);
                }
                entry.params.mean = IntervalBox(std::move(mean));
            }
            collect_references(g, partition.eta(), refs, options.reference_cap);

            AxisExtremes inside_lo_hi{1.0, 1.0, false};
            for (std::size_t d = 0; d < n; ++d) {
                ext[d].clear();
                for (std::size_t k = 0; k < axes.targets[d].size(); ++k) {
                    ext[d].push_back(axis_prob_extremes(g.mean[d], g.var[d], axes.targets[d][k], axes.faces[d][k]));
                }
                const AxisExtremes w = axis_prob_extremes(g.mean[d], g.var[d], spec.working_box[d]);
                inside_lo_hi.lo *= w.lo;
                inside_lo_hi.hi *= w.hi;
                inside_lo_hi.smooth = inside_lo_hi.smooth || w.smooth;
            }
            for (std::size_t j = 0; j < cells; ++j) {
                double lo = 1.0;
                double hi = 1.0;
                bool smooth = false;
                for (std::size_t d = 0; d < n; ++d) {
                    const AxisExtremes& e = ext[d][axes.coords[j * n + d]];
                    lo *= e.lo;
                    hi *= e.hi;
                    smooth = smooth || e.smooth;
                }
                const Interval b = finalize_prob_bounds(lo, hi, smooth);
                lo_row[j] = std::min(lo_row[j], b.lo());
                hi_row[j] = std::max(hi_row[j], b.hi());
            }
            const Interval inside = finalize_prob_bounds(inside_lo_hi.lo, inside_lo_hi.hi, inside_lo_hi.smooth);
            const std::size_t s = partition.sink();
            lo_row[s] = std::min(lo_row[s], std::clamp(1.0 - inside.hi(), 0.0, 1.0));
            hi_row[s] = std::max(hi_row[s], std::clamp(1.0 - inside.lo(), 0.0, 1.0));
        }

        for (const auto& key : refs) {
            GaussianPoint ref{{key.begin(), key.begin() + static_cast<std::ptrdiff_t>(n)},
                              {key.begin() + static_cast<std::ptrdiff_t>(n), key.end()}};
            if (options.store_reference_measures) {
                entry.measures.push_back(discretize_gaussian(ref, partition));
            }
            entry.references.push_back(std::move(ref));
        }
    });

    const std::size_t s = partition.sink();
    for (std::size_t j = 0; j < states; ++j) {
        lower[s * states + j] = j == s ? 1.0 : 0.0;
        upper[s * states + j] = j == s ? 1.0 : 0.0;
    }

    Imc raw(states, std::move(lower), std::move(upper), partition.all_labels(), true);
    std::vector<std::vector<double>> centers;
    for (std::size_t c = 0; c < cells; ++c) {
        centers.push_back(partition.center(c));
    }
    raw.set_centers(std::move(centers));

    ImcDiagnostics diag = validate_imc(raw);
    if (!diag.ok()) {
        throw infeasible("abstraction violates IMC invariants: " + diag.violations.front());
    }

    Abstraction out{std::move(diag.tightened), {}};
    ReferenceLedger& ledger = out.ledger;
    ledger.eta = partition.eta();
    ledger.cells = cells;
    ledger.kappa = kappa;
    const CompletenessConstants k = completeness_constants(partition.eta(), cells);
    ledger.ws = k.ws;
    ledger.tv = k.tv;
    ledger.recovery = 2.0 * partition.eta() + static_cast<double>(cells) * partition.eta() * k.tv;
    ledger.claim1_radius = std::sqrt(2.0 * static_cast<double>(cells)) * partition.eta();
    ledger.lipschitz_f = lipschitz_bound(spec.f, spec.working_box);
    ledger.lipschitz_b = lipschitz_bound(diffusion, spec.working_box);
    for (const auto* est : {&ledger.lipschitz_f, &ledger.lipschitz_b}) {
        if (!est->finite) {
            ledger.diagnostics.push_back(est->diagnostic);
        }
    }
    if (!diag.tightening.empty()) {
        ledger.diagnostics.push_back("tightened " + std::to_string(diag.tightening.size()) + " transition bounds");
    }
    ledger.entries = std::move(entries);
    return out;
}

double row_gap(const Imc& imc)
{
    double gap = 0.0;
    for (std::size_t i = 0; i < imc.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < imc.size(); ++j) {
            row += imc.upper(i, j) - imc.lower(i, j);
        }
        gap = std::max(gap, row);
    }
    return gap;
}

} // namespace imcv
