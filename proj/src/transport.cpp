#include "imcv/errors.hpp"
#include "imcv/imc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace imcv {

namespace {

constexpr double mass_eps = 1e-15;
constexpr double inf = std::numeric_limits<double>::infinity();

} // namespace

// Successive shortest augmenting paths with Johnson potentials on the
// bipartite support graph. Forward arcs are uncapacitated; residual
// backward arcs carry the current flow.
double w1_discrete(const DiscreteDist& mu, const DiscreteDist& nu, const std::vector<std::vector<double>>& cost)
{
    const std::size_t n = mu.size();
    if (nu.size() != n || cost.size() != n) {
        throw validation_error("transport inputs differ in size");
    }

    std::vector<std::size_t> src;
    std::vector<std::size_t> dst;
    for (std::size_t i = 0; i < n; ++i) {
        if (cost[i].size() != n) {
            throw validation_error("cost matrix must be square");
        }
        if (mu[i] > mass_eps) {
            src.push_back(i);
        }
        if (nu[i] > mass_eps) {
            dst.push_back(i);
        }
    }
    const std::size_t a = src.size();
    const std::size_t b = dst.size();
    if (a == 0 || b == 0) {
        return 0.0;
    }

    std::vector<double> supply(a);
    std::vector<double> demand(b);
    for (std::size_t s = 0; s < a; ++s) {
        supply[s] = mu[src[s]];
    }
    for (std::size_t d = 0; d < b; ++d) {
        demand[d] = nu[dst[d]];
    }
    std::vector<double> flow(a * b, 0.0);
    auto c = [&](std::size_t s, std::size_t d) { return cost[src[s]][dst[d]]; };

    // Node ids: sources [0, a), sinks [a, a + b).
    const std::size_t m = a + b;
    std::vector<double> potential(m, 0.0);
    std::vector<double> dist(m);
    std::vector<std::size_t> parent(m);
    std::vector<char> done(m);

    for (;;) {
        double left_supply = 0.0;
        double left_demand = 0.0;
        for (double x : supply) {
            left_supply += x;
        }
        for (double x : demand) {
            left_demand += x;
        }
        if (left_supply <= mass_eps * static_cast<double>(a) || left_demand <= mass_eps * static_cast<double>(b)) {
            break;
        }

        std::fill(dist.begin(), dist.end(), inf);
        std::fill(done.begin(), done.end(), 0);
        for (std::size_t s = 0; s < a; ++s) {
            if (supply[s] > mass_eps) {
                dist[s] = 0.0;
                parent[s] = s;
            }
        }
        for (;;) {
            std::size_t u = m;
            for (std::size_t v = 0; v < m; ++v) {
                if (!done[v] && dist[v] < inf && (u == m || dist[v] < dist[u])) {
                    u = v;
                }
            }
            if (u == m) {
                break;
            }
            done[u] = 1;
            if (u < a) {
                for (std::size_t d = 0; d < b; ++d) {
                    const std::size_t v = a + d;
                    const double rc = std::max(0.0, c(u, d) + potential[u] - potential[v]);
                    if (dist[u] + rc < dist[v]) {
                        dist[v] = dist[u] + rc;
                        parent[v] = u;
                    }
                }
            } else {
                const std::size_t d = u - a;
                for (std::size_t s = 0; s < a; ++s) {
                    if (flow[s * b + d] <= mass_eps) {
                        continue;
                    }
                    const double rc = std::max(0.0, -c(s, d) + potential[u] - potential[s]);
                    if (dist[u] + rc < dist[s]) {
                        dist[s] = dist[u] + rc;
                        parent[s] = u;
                    }
                }
            }
        }

        std::size_t target = m;
        for (std::size_t d = 0; d < b; ++d) {
            if (demand[d] > mass_eps && dist[a + d] < inf && (target == m || dist[a + d] < dist[target])) {
                target = a + d;
            }
        }
        if (target == m) {
            break;
        }
        double reach = 0.0;
        for (std::size_t v = 0; v < m; ++v) {
            if (dist[v] < inf) {
                reach = std::max(reach, dist[v]);
            }
        }
        for (std::size_t v = 0; v < m; ++v) {
            potential[v] += dist[v] < inf ? dist[v] : reach;
        }

        // Bottleneck along the path back to a source.
        double amount = demand[target - a];
        std::size_t v = target;
        while (true) {
            const std::size_t p = parent[v];
            if (v < a && p == v) {
                amount = std::min(amount, supply[v]);
                break;
            }
            if (v < a) {
                amount = std::min(amount, flow[v * b + (p - a)]);
            }
            v = p;
        }
        v = target;
        while (true) {
            const std::size_t p = parent[v];
            if (v < a && p == v) {
                supply[v] -= amount;
                break;
            }
            if (v >= a) {
                flow[p * b + (v - a)] += amount;
            } else {
                flow[v * b + (p - a)] -= amount;
            }
            v = p;
        }
        demand[target - a] -= amount;
    }

    double total = 0.0;
    for (std::size_t s = 0; s < a; ++s) {
        for (std::size_t d = 0; d < b; ++d) {
            total += flow[s * b + d] * c(s, d);
        }
    }
    return total;
}

} // namespace imcv
