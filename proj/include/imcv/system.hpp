#pragma once

#include "imcv/expr.hpp"
#include "imcv/interval.hpp"

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace imcv {

using Labels = std::set<std::string>;

/// Atomic proposition that holds exactly on the working space.
inline const std::string in_prop = "in";

struct Region {
    IntervalBox box;
    Labels props;
};

/// Discrete-time dynamics X+ = f(X) + b(X) w + theta * xi on a working box.
///
/// `b` is n x k; each noise column may drive at most one state coordinate so
/// that b b^T stays diagonal.
struct SystemSpec {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<Expr> f;
    std::vector<std::vector<Expr>> b;
    double theta = 0.0;
    IntervalBox working_box;
    std::vector<Region> regions;
    Labels props;

    /// Throws validation_error describing the first violated invariant.
    void validate() const;

    /// Labels of the region containing x (empty set outside the working box).
    [[nodiscard]] Labels labels_at(std::span<const double> x) const;
};

/// Tile `working_box` into regions from per-proposition boxes. Every region
/// carries "in"; a proposition holds on a region iff the region lies inside
/// one of its boxes.
std::vector<Region> regions_from_props(const IntervalBox& working_box,
                                       const std::map<std::string, std::vector<IntervalBox>>& prop_boxes);

/// Uniform grid over the working box plus the sink state.
///
/// States are 0-based: cells occupy [0, N) in row-major order (last axis
/// fastest) and the sink is N. Cells are half-open on their upper faces
/// except the last cell along each axis, which is closed.
class Partition {
public:
    Partition(IntervalBox working_box, double eta, std::vector<std::size_t> shape, std::vector<Labels> labels);

    [[nodiscard]] double eta() const { return eta_; }
    [[nodiscard]] std::size_t dims() const { return shape_.size(); }
    [[nodiscard]] std::size_t cell_count() const { return labels_.size(); }
    [[nodiscard]] std::size_t state_count() const { return cell_count() + 1; }
    [[nodiscard]] std::size_t sink() const { return cell_count(); }
    [[nodiscard]] const IntervalBox& working_box() const { return working_box_; }
    [[nodiscard]] const std::vector<std::size_t>& shape() const { return shape_; }

    [[nodiscard]] IntervalBox cell(std::size_t index) const;
    [[nodiscard]] std::vector<double> center(std::size_t index) const { return cell(index).center(); }
    [[nodiscard]] const Labels& labels(std::size_t state) const;
    [[nodiscard]] std::vector<Labels> all_labels() const;

    [[nodiscard]] std::vector<std::size_t> coordinates(std::size_t index) const;
    [[nodiscard]] std::size_t index(std::span<const std::size_t> coords) const;

    /// Cell containing x, or sink() when x lies outside the working box.
    [[nodiscard]] std::size_t locate(std::span<const double> x) const;

    /// Largest infinity-norm distance between two cell centres.
    [[nodiscard]] double diameter() const;

    /// Pairwise infinity-norm distances between cell centres; the sink is at
    /// distance `sink_cost` from every cell.
    [[nodiscard]] std::vector<std::vector<double>> center_costs(double sink_cost) const;

private:
    IntervalBox working_box_;
    double eta_;
    std::vector<std::size_t> shape_;
    std::vector<Labels> labels_;
    Labels sink_labels_;
};

/// Number of cells of a uniform grid of size `eta` over the working box.
std::size_t grid_cell_count(const IntervalBox& working_box, double eta);

/// Throws misaligned_labels when a grid cell straddles regions with
/// different proposition sets.
Partition build_partition(const SystemSpec& spec, double eta);

} // namespace imcv
