#include "imcv/system.hpp"

#include "imcv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace imcv {

namespace {

constexpr double align_tol = 1e-12;

std::size_t axis_cells(const Interval& axis, double eta)
{
    const double ratio = axis.width() / eta;
    const double r = std::round(ratio);
    if (std::fabs(ratio - r) <= align_tol * std::max(1.0, ratio)) {
        return std::max<std::size_t>(1, static_cast<std::size_t>(r));
    }
    return static_cast<std::size_t>(std::ceil(ratio));
}

// Length of the overlap of two intervals (0 if they only touch).
double overlap(const Interval& a, const Interval& b)
{
    return std::max(0.0, std::min(a.hi(), b.hi()) - std::max(a.lo(), b.lo()));
}

std::string describe(const Labels& l)
{
    std::string s = "{";
    for (const auto& p : l) {
        s += (s.size() > 1 ? "," : "") + p;
    }
    return s + "}";
}

} // namespace

void SystemSpec::validate() const
{
    if (n == 0) {
        throw validation_error("system dimension n must be positive");
    }
    if (f.size() != n) {
        throw validation_error("f must have n = " + std::to_string(n) + " entries");
    }
    if (b.size() != n) {
        throw validation_error("b must have n = " + std::to_string(n) + " rows");
    }
    for (const auto& row : b) {
        if (row.size() != k) {
            throw validation_error("every row of b must have k = " + std::to_string(k) + " entries");
        }
    }
    for (const auto& e : f) {
        if (e.arity() > n) {
            throw validation_error("f references a variable beyond x" + std::to_string(n));
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        std::size_t driven = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (b[i][j].arity() > n) {
                throw validation_error("b references a variable beyond x" + std::to_string(n));
            }
            driven += b[i][j].is_zero() ? 0 : 1;
        }
        if (driven > 1) {
            throw validation_error("noise column " + std::to_string(j + 1) +
                                   " drives several coordinates; b b^T must be diagonal");
        }
    }
    if (!(theta >= 0.0)) {
        throw validation_error("theta must be nonnegative");
    }
    if (working_box.size() != n) {
        throw validation_error("working box W must have n = " + std::to_string(n) + " dimensions");
    }
    for (const auto& d : working_box) {
        if (!(d.width() > 0.0)) {
            throw validation_error("working box W must have positive width on every axis");
        }
    }
    if (regions.empty()) {
        throw validation_error("at least one labelled region is required");
    }
    double covered = 0.0;
    for (std::size_t r = 0; r < regions.size(); ++r) {
        const auto& reg = regions[r];
        if (!working_box.contains(reg.box)) {
            throw validation_error("region " + std::to_string(r + 1) + " is not inside W");
        }
        if (!reg.props.contains(in_prop)) {
            throw validation_error("region " + std::to_string(r + 1) + " lacks the \"in\" proposition");
        }
        for (const auto& p : reg.props) {
            if (!props.contains(p)) {
                throw validation_error("region " + std::to_string(r + 1) + " uses undeclared proposition " + p);
            }
        }
        for (std::size_t s = 0; s < r; ++s) {
            double v = 1.0;
            for (std::size_t d = 0; d < n; ++d) {
                v *= overlap(reg.box[d], regions[s].box[d]);
            }
            if (v > 0.0) {
                throw validation_error("regions " + std::to_string(s + 1) + " and " + std::to_string(r + 1) +
                                       " overlap");
            }
        }
        covered += reg.box.volume();
    }
    const double total = working_box.volume();
    if (std::fabs(covered - total) > 1e-9 * total) {
        throw validation_error("regions do not tile W");
    }
}

Labels SystemSpec::labels_at(std::span<const double> x) const
{
    for (const auto& reg : regions) {
        if (reg.box.contains(x)) {
            return reg.props;
        }
    }
    return {};
}

std::vector<Region> regions_from_props(const IntervalBox& working_box,
                                       const std::map<std::string, std::vector<IntervalBox>>& prop_boxes)
{
    const std::size_t n = working_box.size();
    std::vector<std::vector<double>> cuts(n);
    for (std::size_t d = 0; d < n; ++d) {
        cuts[d] = {working_box[d].lo(), working_box[d].hi()};
        for (const auto& [name, boxes] : prop_boxes) {
            for (const auto& bx : boxes) {
                if (bx.size() != n) {
                    throw validation_error("box for proposition " + name + " has wrong dimension");
                }
                for (double c : {bx[d].lo(), bx[d].hi()}) {
                    if (c > working_box[d].lo() && c < working_box[d].hi()) {
                        cuts[d].push_back(c);
                    }
                }
            }
        }
        std::sort(cuts[d].begin(), cuts[d].end());
        cuts[d].erase(std::unique(cuts[d].begin(), cuts[d].end()), cuts[d].end());
    }

    std::vector<Region> regions;
    std::vector<std::size_t> idx(n, 0);
    for (;;) {
        std::vector<Interval> dims;
        for (std::size_t d = 0; d < n; ++d) {
            dims.emplace_back(cuts[d][idx[d]], cuts[d][idx[d] + 1]);
        }
        IntervalBox box(std::move(dims));
        Labels props{in_prop};
        for (const auto& [name, boxes] : prop_boxes) {
            for (const auto& bx : boxes) {
                if (bx.contains(box)) {
                    props.insert(name);
                    break;
                }
            }
        }
        regions.push_back({std::move(box), std::move(props)});

        std::size_t d = n;
        while (d > 0) {
            --d;
            if (++idx[d] + 1 < cuts[d].size()) {
                break;
            }
            idx[d] = 0;
            if (d == 0) {
                return regions;
            }
        }
    }
}

Partition::Partition(IntervalBox working_box, double eta, std::vector<std::size_t> shape, std::vector<Labels> labels)
    : working_box_(std::move(working_box)), eta_(eta), shape_(std::move(shape)), labels_(std::move(labels))
{
}

IntervalBox Partition::cell(std::size_t index) const
{
    const auto coords = coordinates(index);
    std::vector<Interval> dims;
    dims.reserve(coords.size());
    for (std::size_t d = 0; d < coords.size(); ++d) {
        const double lo = working_box_[d].lo() + static_cast<double>(coords[d]) * eta_;
        const double hi = coords[d] + 1 == shape_[d] ? working_box_[d].hi() : lo + eta_;
        dims.emplace_back(lo, hi);
    }
    return IntervalBox(std::move(dims));
}

const Labels& Partition::labels(std::size_t state) const
{
    return state == sink() ? sink_labels_ : labels_.at(state);
}

std::vector<Labels> Partition::all_labels() const
{
    std::vector<Labels> all = labels_;
    all.push_back(sink_labels_);
    return all;
}

std::vector<std::size_t> Partition::coordinates(std::size_t index) const
{
    std::vector<std::size_t> coords(shape_.size());
    for (std::size_t d = shape_.size(); d-- > 0;) {
        coords[d] = index % shape_[d];
        index /= shape_[d];
    }
    return coords;
}

std::size_t Partition::index(std::span<const std::size_t> coords) const
{
    std::size_t idx = 0;
    for (std::size_t d = 0; d < shape_.size(); ++d) {
        idx = idx * shape_[d] + coords[d];
    }
    return idx;
}

std::size_t Partition::locate(std::span<const double> x) const
{
    if (x.size() != shape_.size() || !working_box_.contains(x)) {
        return sink();
    }
    std::size_t idx = 0;
    for (std::size_t d = 0; d < shape_.size(); ++d) {
        const double rel = (x[d] - working_box_[d].lo()) / eta_;
        auto c = static_cast<std::size_t>(std::floor(rel));
        c = std::min(c, shape_[d] - 1);
        // Guard against rounding in the division near cell faces.
        const double lo = working_box_[d].lo() + static_cast<double>(c) * eta_;
        if (x[d] < lo && c > 0) {
            --c;
        } else if (c + 1 < shape_[d] && x[d] >= lo + eta_) {
            ++c;
        }
        idx = idx * shape_[d] + c;
    }
    return idx;
}

double Partition::diameter() const
{
    double diam = 0.0;
    for (std::size_t d = 0; d < shape_.size(); ++d) {
        std::vector<std::size_t> first(shape_.size(), 0);
        std::vector<std::size_t> last(shape_.size(), 0);
        last[d] = shape_[d] - 1;
        diam = std::max(diam, center(index(last))[d] - center(index(first))[d]);
    }
    return diam;
}

std::vector<std::vector<double>> Partition::center_costs(double sink_cost) const
{
    const std::size_t m = state_count();
    std::vector<std::vector<double>> centers;
    centers.reserve(cell_count());
    for (std::size_t i = 0; i < cell_count(); ++i) {
        centers.push_back(center(i));
    }
    std::vector<std::vector<double>> cost(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) {
                continue;
            }
            if (i == sink() || j == sink()) {
                cost[i][j] = sink_cost;
                continue;
            }
            double c = 0.0;
            for (std::size_t d = 0; d < shape_.size(); ++d) {
                c = std::max(c, std::fabs(centers[i][d] - centers[j][d]));
            }
            cost[i][j] = c;
        }
    }
    return cost;
}

std::size_t grid_cell_count(const IntervalBox& working_box, double eta)
{
    if (!(eta > 0.0)) {
        throw validation_error("grid size eta must be positive");
    }
    std::size_t count = 1;
    for (const auto& axis : working_box) {
        count *= axis_cells(axis, eta);
    }
    return count;
}

Partition build_partition(const SystemSpec& spec, double eta)
{
    spec.validate();
    if (!(eta > 0.0)) {
        throw validation_error("grid size eta must be positive");
    }
    std::vector<std::size_t> shape;
    for (const auto& axis : spec.working_box) {
        shape.push_back(axis_cells(axis, eta));
    }
    std::size_t total = 1;
    for (auto s : shape) {
        total *= s;
    }

    std::vector<Labels> labels(total);
    Partition grid(spec.working_box, eta, shape, std::vector<Labels>(total));
    for (std::size_t c = 0; c < total; ++c) {
        const IntervalBox cell = grid.cell(c);
        const Labels* found = nullptr;
        for (const auto& reg : spec.regions) {
            bool hit = true;
            for (std::size_t d = 0; d < spec.n && hit; ++d) {
                const double tol = align_tol * std::max(1.0, std::fabs(cell[d].hi()));
                hit = overlap(cell[d], reg.box[d]) > tol;
            }
            if (!hit) {
                continue;
            }
            if (found != nullptr && *found != reg.props) {
                std::ostringstream os;
                os << "cell " << cell << " straddles regions labelled " << describe(*found) << " and "
                   << describe(reg.props) << " at eta = " << eta;
                throw misaligned_labels(os.str());
            }
            found = &reg.props;
        }
        if (found == nullptr) {
            throw validation_error("cell not covered by any region");
        }
        labels[c] = *found;
    }
    return Partition(spec.working_box, eta, std::move(shape), std::move(labels));
}

} // namespace imcv
