#pragma once

// Independent reference computations used by the tests. None of these call
// into the library code they are compared against.

#include "imcv/imc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

/// P(a <= N(m, s^2) <= b) by composite Simpson quadrature of the density.
inline double normal_box_quadrature(double a, double b, double m, double s, int panels = 4000)
{
    if (s == 0.0) {
        return (m >= a && m <= b) ? 1.0 : 0.0;
    }
    // Integrate over the part of [a, b] within 12 sigma of the mean.
    const double lo = std::max(a, m - 12.0 * s);
    const double hi = std::min(b, m + 12.0 * s);
    if (!(lo < hi)) {
        return 0.0;
    }
    auto pdf = [&](double x) {
        const double z = (x - m) / s;
        return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
    };
    const double h = (hi - lo) / panels;
    double sum = pdf(lo) + pdf(hi);
    for (int i = 1; i < panels; ++i) {
        sum += (i % 2 == 1 ? 4.0 : 2.0) * pdf(lo + i * h);
    }
    return sum * h / 3.0;
}

/// The same probability from std::erf.
inline double normal_box_erf(double a, double b, double m, double s)
{
    if (s == 0.0) {
        return (m >= a && m <= b) ? 1.0 : 0.0;
    }
    const double r = s * std::numbers::sqrt2;
    return 0.5 * (std::erf((b - m) / r) - std::erf((a - m) / r));
}

/// All vertices of {p : lo <= p <= hi, sum p = 1} by brute force over the
/// 3^n assignments of each coordinate to lower bound, upper bound or free,
/// with exactly one free coordinate (or none).
inline std::vector<std::vector<double>> row_vertices_bruteforce(const std::vector<double>& lo,
                                                                const std::vector<double>& hi)
{
    const std::size_t n = lo.size();
    std::vector<std::vector<double>> out;
    auto add = [&](std::vector<double> p) {
        for (const auto& q : out) {
            bool same = true;
            for (std::size_t i = 0; i < n; ++i) {
                same = same && std::fabs(p[i] - q[i]) < 1e-12;
            }
            if (same) {
                return;
            }
        }
        out.push_back(std::move(p));
    };
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        total *= 2;
    }
    for (std::size_t free = 0; free <= n; ++free) {
        for (std::size_t mask = 0; mask < total; ++mask) {
            std::vector<double> p(n);
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == free) {
                    continue;
                }
                p[i] = (mask >> i & 1U) ? hi[i] : lo[i];
                sum += p[i];
            }
            if (free < n) {
                p[free] = 1.0 - sum;
                if (p[free] < lo[free] - 1e-12 || p[free] > hi[free] + 1e-12) {
                    continue;
                }
                p[free] = std::clamp(p[free], lo[free], hi[free]);
            } else if (std::fabs(sum - 1.0) > 1e-12) {
                continue;
            }
            add(std::move(p));
        }
    }
    return out;
}

/// Min and max of P(A U<=T B) from q0 over every time-varying adversary
/// that picks one vertex of each relevant row at each step. Only the rows of
/// q0 at time 0 and of A\B states afterwards influence the value, so only
/// those choices are enumerated. Returns false when the enumeration would
/// exceed `cap` policies.
inline bool bruteforce_bounded_until(const imcv::Imc& imc, const std::vector<bool>& a, const std::vector<bool>& b,
                                     int horizon, std::size_t q0, std::size_t cap, double& min_out,
                                     double& max_out)
{
    const std::size_t n = imc.size();
    std::vector<std::vector<std::vector<double>>> verts(n);
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<double> lo(n);
        std::vector<double> hi(n);
        for (std::size_t j = 0; j < n; ++j) {
            lo[j] = imc.lower(s, j);
            hi[j] = imc.upper(s, j);
        }
        verts[s] = row_vertices_bruteforce(lo, hi);
    }
    if (b[q0]) {
        min_out = max_out = 1.0;
        return true;
    }
    if (!a[q0] || horizon == 0) {
        min_out = max_out = 0.0;
        return true;
    }
    // Decision slots: (t, s) for which a vertex must be chosen.
    std::vector<std::pair<int, std::size_t>> slots{{0, q0}};
    for (int t = 1; t < horizon; ++t) {
        for (std::size_t s = 0; s < n; ++s) {
            if (a[s] && !b[s]) {
                slots.emplace_back(t, s);
            }
        }
    }
    double count = 1.0;
    for (const auto& [t, s] : slots) {
        count *= static_cast<double>(verts[s].size());
    }
    if (count > static_cast<double>(cap)) {
        return false;
    }
    min_out = std::numeric_limits<double>::infinity();
    max_out = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> choice(slots.size(), 0);
    std::vector<std::vector<std::size_t>> pick(static_cast<std::size_t>(horizon), std::vector<std::size_t>(n, 0));
    for (;;) {
        for (std::size_t k = 0; k < slots.size(); ++k) {
            pick[static_cast<std::size_t>(slots[k].first)][slots[k].second] = choice[k];
        }
        // Forward propagation of the mass that has neither hit B nor left A.
        std::vector<double> mass(n, 0.0);
        mass[q0] = 1.0;
        double reached = 0.0;
        for (int t = 0; t < horizon; ++t) {
            std::vector<double> next(n, 0.0);
            for (std::size_t s = 0; s < n; ++s) {
                if (mass[s] == 0.0) {
                    continue;
                }
                const auto& p = verts[s][pick[static_cast<std::size_t>(t)][s]];
                for (std::size_t j = 0; j < n; ++j) {
                    next[j] += mass[s] * p[j];
                }
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (b[j]) {
                    reached += next[j];
                    next[j] = 0.0;
                } else if (!a[j]) {
                    next[j] = 0.0;
                }
            }
            mass = std::move(next);
        }
        min_out = std::min(min_out, reached);
        max_out = std::max(max_out, reached);
        std::size_t k = 0;
        while (k < slots.size() && ++choice[k] == verts[slots[k].second].size()) {
            choice[k] = 0;
            ++k;
        }
        if (k == slots.size()) {
            break;
        }
    }
    return true;
}

/// P(A U<=T B) for a point chain from matrix powers: B and the states
/// outside A are made absorbing, then the B mass of (P')^T e_q0 is read off.
inline std::vector<double> matrix_power_bounded_until(const Matrix& p, const std::vector<bool>& a,
                                                      const std::vector<bool>& b, int horizon)
{
    const std::size_t n = p.size();
    Matrix q = p;
    for (std::size_t s = 0; s < n; ++s) {
        if (b[s] || !a[s]) {
            std::fill(q[s].begin(), q[s].end(), 0.0);
            q[s][s] = 1.0;
        }
    }
    Matrix pw(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        pw[i][i] = 1.0;
    }
    for (int t = 0; t < horizon; ++t) {
        Matrix next(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                for (std::size_t j = 0; j < n; ++j) {
                    next[i][j] += pw[i][k] * q[k][j];
                }
            }
        }
        pw = std::move(next);
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (b[j]) {
                out[i] += pw[i][j];
            }
        }
    }
    return out;
}

/// Optimal transport cost by enumerating the basic feasible solutions of
/// the transportation polytope (bases of m + n - 1 cells), solved by
/// Gaussian elimination. Suitable for m, n <= 4.
inline double transport_lp_vertices(const std::vector<double>& mu, const std::vector<double>& nu, const Matrix& cost)
{
    const std::size_t m = mu.size();
    const std::size_t n = nu.size();
    const std::size_t cells = m * n;
    const std::size_t basis = m + n - 1;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> pick(basis);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
        if (depth == basis) {
            // Equations: row sums (m), column sums except the last (n - 1).
            const std::size_t eqs = m + n - 1;
            std::vector<std::vector<double>> aug(eqs, std::vector<double>(basis + 1, 0.0));
            for (std::size_t k = 0; k < basis; ++k) {
                const std::size_t i = pick[k] / n;
                const std::size_t j = pick[k] % n;
                aug[i][k] = 1.0;
                if (j + 1 < n) {
                    aug[m + j][k] = 1.0;
                }
            }
            for (std::size_t i = 0; i < m; ++i) {
                aug[i][basis] = mu[i];
            }
            for (std::size_t j = 0; j + 1 < n; ++j) {
                aug[m + j][basis] = nu[j];
            }
            for (std::size_t c = 0; c < basis; ++c) {
                std::size_t piv = c;
                for (std::size_t r = c; r < eqs; ++r) {
                    if (std::fabs(aug[r][c]) > std::fabs(aug[piv][c])) {
                        piv = r;
                    }
                }
                if (std::fabs(aug[piv][c]) < 1e-12) {
                    return; // singular basis
                }
                std::swap(aug[c], aug[piv]);
                for (std::size_t r = 0; r < eqs; ++r) {
                    if (r != c && aug[r][c] != 0.0) {
                        const double f = aug[r][c] / aug[c][c];
                        for (std::size_t k = c; k <= basis; ++k) {
                            aug[r][k] -= f * aug[c][k];
                        }
                    }
                }
            }
            double total = 0.0;
            for (std::size_t k = 0; k < basis; ++k) {
                const double x = aug[k][basis] / aug[k][k];
                if (x < -1e-12) {
                    return;
                }
                total += x * cost[pick[k] / n][pick[k] % n];
            }
            best = std::min(best, total);
            return;
        }
        for (std::size_t c = start; c + (basis - depth) <= cells; ++c) {
            pick[depth] = c;
            rec(c + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

/// int sqrt(Phi(z) (1 - Phi(z))) dz over the real line, by quadrature.
inline double empirical_cdf_constant()
{
    double sum = 0.0;
    const double h = 1e-3;
    for (double z = -12.0; z <= 12.0; z += h) {
        const double f = 0.5 * std::erfc(-z / std::numbers::sqrt2);
        sum += std::sqrt(f * (1.0 - f)) * h;
    }
    return sum;
}

/// W1 between two 1-D samples of equal size by the sorted coupling.
inline double sorted_sample_w1(std::vector<double> x, std::vector<double> y)
{
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum += std::fabs(x[i] - y[i]);
    }
    return sum / static_cast<double>(x.size());
}

/// Random IMC: random stochastic centre rows widened by random amounts,
/// some entries kept exact. The last state is an absorbing sink when
/// `with_sink` is set.
inline imcv::Imc random_imc(std::mt19937_64& rng, std::size_t states, bool with_sink, double point_share = 0.3)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> lo(states * states, 0.0);
    std::vector<double> hi(states * states, 0.0);
    for (std::size_t i = 0; i < states; ++i) {
        if (with_sink && i + 1 == states) {
            lo[i * states + i] = hi[i * states + i] = 1.0;
            continue;
        }
        std::vector<double> p(states);
        double sum = 0.0;
        for (auto& x : p) {
            x = u(rng) < 0.25 ? 0.0 : u(rng);
            sum += x;
        }
        if (sum == 0.0) {
            p[i] = sum = 1.0;
        }
        for (std::size_t j = 0; j < states; ++j) {
            p[j] /= sum;
            if (u(rng) < point_share) {
                lo[i * states + j] = hi[i * states + j] = p[j];
            } else {
                lo[i * states + j] = std::max(0.0, p[j] - 0.3 * u(rng));
                hi[i * states + j] = std::min(1.0, p[j] + 0.3 * u(rng));
            }
        }
    }
    std::vector<imcv::Labels> labels(states);
    return imcv::Imc(states, std::move(lo), std::move(hi), std::move(labels), with_sink);
}

} // namespace oracle
