#pragma once

#include "imcv/system.hpp"

#include <span>
#include <string>
#include <vector>

namespace imcv {

/// Probability vector over IMC states.
struct DiscreteDist {
    std::vector<double> probs;

    [[nodiscard]] std::size_t size() const { return probs.size(); }
    double operator[](std::size_t i) const { return probs[i]; }
    friend bool operator==(const DiscreteDist&, const DiscreteDist&) = default;
};

using ValueVector = std::vector<double>;

/// Interval-valued Markov chain with componentwise transition bounds.
///
/// When `has_sink()` is set the last state is the absorbing sink: its row is
/// (0, ..., 0, 1) and its labels exclude "in".
class Imc {
public:
    Imc() = default;
    Imc(std::size_t states, std::vector<double> lower, std::vector<double> upper, std::vector<Labels> labels,
        bool has_sink = true);

    [[nodiscard]] std::size_t size() const { return states_; }
    [[nodiscard]] bool has_sink() const { return has_sink_; }
    [[nodiscard]] std::size_t sink() const { return states_ - 1; }

    [[nodiscard]] double lower(std::size_t i, std::size_t j) const { return lower_[i * states_ + j]; }
    [[nodiscard]] double upper(std::size_t i, std::size_t j) const { return upper_[i * states_ + j]; }
    double& lower(std::size_t i, std::size_t j) { return lower_[i * states_ + j]; }
    double& upper(std::size_t i, std::size_t j) { return upper_[i * states_ + j]; }
    [[nodiscard]] std::span<const double> lower_row(std::size_t i) const { return {lower_.data() + i * states_, states_}; }
    [[nodiscard]] std::span<const double> upper_row(std::size_t i) const { return {upper_.data() + i * states_, states_}; }
    [[nodiscard]] const std::vector<double>& lower_matrix() const { return lower_; }
    [[nodiscard]] const std::vector<double>& upper_matrix() const { return upper_; }

    [[nodiscard]] const Labels& labels(std::size_t i) const { return labels_[i]; }
    [[nodiscard]] const std::vector<Labels>& all_labels() const { return labels_; }

    /// Geometric centres of the non-sink states (may be empty).
    [[nodiscard]] const std::vector<std::vector<double>>& centers() const { return centers_; }
    void set_centers(std::vector<std::vector<double>> centers) { centers_ = std::move(centers); }

    /// True when lower == upper everywhere.
    [[nodiscard]] bool is_point() const { return lower_ == upper_; }

private:
    std::size_t states_ = 0;
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<Labels> labels_;
    std::vector<std::vector<double>> centers_;
    bool has_sink_ = true;
};

/// Result of validate_imc. `violations` is empty iff every invariant holds;
/// `tightened` carries the coherent bounds and `tightening` lists each change.
struct ImcDiagnostics {
    std::vector<std::string> violations;
    std::vector<std::string> tightening;
    Imc tightened;

    [[nodiscard]] bool ok() const { return violations.empty(); }
};

/// Check the IMC invariants and tighten every row to its coherent bounds
///   lower_ij <- max(lower_ij, 1 - sum_{l != j} upper_il)
///   upper_ij <- min(upper_ij, 1 - sum_{l != j} lower_il).
/// Throws infeasible when a row has sum(upper) < 1 or sum(lower) > 1.
ImcDiagnostics validate_imc(const Imc& imc);

inline constexpr std::size_t default_vertex_state_cap = 12;
inline constexpr std::size_t default_marginal_cap = 1'000'000;

/// All vertices of {p : lower <= p <= upper, sum p = 1}.
///
/// A vertex has every coordinate at a bound except at most one pivot; the
/// enumeration walks pivots and upper-bound subsets of the free coordinates
/// (those with lower < upper). Throws combinatorial_cap when the number of
/// free coordinates exceeds `cap`.
std::vector<DiscreteDist> row_vertices(std::span<const double> lower, std::span<const double> upper,
                                       std::size_t cap = default_vertex_state_cap);

/// Points V_t^T ... V_1^T mu0 over all sequences of matrix vertices.
std::vector<DiscreteDist> marginal_vertices(const Imc& imc, const DiscreteDist& mu0, int t,
                                            std::size_t cap = default_marginal_cap,
                                            std::size_t row_cap = default_vertex_state_cap);

/// l1 distance sum_q |mu(q) - nu(q)|.
double tv_distance(const DiscreteDist& mu, const DiscreteDist& nu);

/// Exact optimal transport cost between mu and nu (successive shortest paths).
double w1_discrete(const DiscreteDist& mu, const DiscreteDist& nu, const std::vector<std::vector<double>>& cost);

/// Transport costs between IMC states from their centres (infinity norm);
/// the sink sits at distance `sink_cost` from every other state.
std::vector<std::vector<double>> imc_costs(const Imc& imc, double sink_cost);

enum class Extreme { min, max };

/// Feasible row maximising (minimising) p . v: fill states in decreasing
/// (increasing) order of v up to their upper bounds.
DiscreteDist extreme_row(std::span<const double> lower, std::span<const double> upper, std::span<const double> v,
                         Extreme mode);

/// p . v for the greedy row when `order` already lists states best-first.
double extreme_value(std::span<const double> lower, std::span<const double> upper, std::span<const double> v,
                     std::span<const std::size_t> order);

} // namespace imcv
