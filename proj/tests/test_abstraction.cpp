#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

#include "imcv/abstraction.hpp"
#include "imcv/io.hpp"

#include <cmath>
#include <random>

using namespace imcv;

namespace {

SystemSpec linear(double theta = 0.0)
{
    return parse_config_text("[system]\nn = 1\nf = \"0.5*x1\"\nb = 0.5\ntheta = " + std::to_string(theta) +
                             "\nW = [-1, 1]\n[labels]\ngoal = [0.5, 1]\n")
        .spec;
}

SystemSpec logistic()
{
    return parse_config_text("[system]\nn = 1\nf = \"2.5*x1*(1 - x1)\"\nb = 0.1\nW = [0, 1]\n").spec;
}

SystemSpec rotation()
{
    return parse_config_text(R"([system]
n = 2
noise_dim = 2
f = ["0.8*cos(0.5)*x1 - 0.8*sin(0.5)*x2", "0.8*sin(0.5)*x1 + 0.8*cos(0.5)*x2"]
b = [["0.2", "0"], ["0", "0.2"]]
W = [[-1, 1], [-1, 1]]
)")
        .spec;
}

// Exact one-step transition probabilities from x (sink last).
std::vector<double> kernel_row(const SystemSpec& spec, const Partition& part, const std::vector<double>& x)
{
    std::vector<double> m(spec.n);
    std::vector<double> s(spec.n, 0.0);
    for (std::size_t d = 0; d < spec.n; ++d) {
        m[d] = eval_point(spec.f[d], x);
        for (std::size_t k = 0; k < spec.k; ++k) {
            const double b = eval_point(spec.b[d][k], x);
            s[d] += b * b;
        }
        s[d] = std::sqrt(s[d]);
    }
    std::vector<double> row(part.state_count(), 0.0);
    double inside = 1.0;
    for (std::size_t d = 0; d < spec.n; ++d) {
        const auto& w = part.working_box()[d];
        inside *= oracle::normal_box_erf(w.lo(), w.hi(), m[d], s[d]);
    }
    for (std::size_t j = 0; j < part.cell_count(); ++j) {
        const IntervalBox c = part.cell(j);
        double p = 1.0;
        for (std::size_t d = 0; d < spec.n; ++d) {
            p *= oracle::normal_box_erf(c[d].lo(), c[d].hi(), m[d], s[d]);
        }
        row[j] = p;
    }
    row.back() = 1.0 - inside;
    return row;
}

int kernel_violations(const SystemSpec& spec, double eta, unsigned seed)
{
    const Partition part = build_partition(spec, eta);
    const Abstraction abs = build_imc(spec, part, default_kappa(eta));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int bad = 0;
    for (std::size_t i = 0; i < part.cell_count(); ++i) {
        const IntervalBox c = part.cell(i);
        for (int draw = 0; draw < 1000; ++draw) {
            std::vector<double> x(spec.n);
            for (std::size_t d = 0; d < spec.n; ++d) {
                x[d] = c[d].lo() + u(rng) * c[d].width();
            }
            const auto row = kernel_row(spec, part, x);
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (row[j] < abs.imc.lower(i, j) - 1e-12 || row[j] > abs.imc.upper(i, j) + 1e-12) {
                    ++bad;
                }
            }
        }
    }
    return bad;
}

} // namespace

TEST_CASE("deterministic fixed point gives point rows")
{
    const SystemSpec spec =
        parse_config_text("[system]\nn = 1\nf = \"0\"\nb = 0\nW = [-1, 1]\n").spec;
    const Partition part = build_partition(spec, 1.0);
    const Abstraction abs = build_imc(spec, part, 0.1);
    REQUIRE(abs.imc.size() == 3);
    CHECK(abs.imc.is_point());
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(abs.imc.lower(i, 0) == 0.0);
        CHECK(abs.imc.lower(i, 1) == 1.0);
        CHECK(abs.imc.lower(i, 2) == 0.0);
    }
    CHECK(abs.imc.lower(2, 2) == 1.0);
    CHECK(row_gap(abs.imc) == 0.0);
}

TEST_CASE("linear benchmark at eta = 1")
{
    const SystemSpec spec = parse_config_text("[system]\nn = 1\nf = \"0.5*x1\"\nb = 0.5\nW = [-1, 1]\n").spec;
    const Partition part = build_partition(spec, 1.0);
    const Abstraction abs = build_imc(spec, part, 0.1);
    // Extremes of P(N(m, 0.25) in [-1, 0)) over m in [-0.5, 0]: the maximum
    // sits at the cell midpoint m = -0.5, giving Phi(1) - Phi(-1).
    const double hi = oracle::normal_box_erf(-1.0, 0.0, -0.5, 0.5);
    const double lo = oracle::normal_box_erf(-1.0, 0.0, 0.0, 0.5);
    CHECK(hi == doctest::Approx(0.6827).epsilon(1e-3));
    CHECK(lo == doctest::Approx(0.4773).epsilon(1e-3));
    for (int i = 0; i <= 100; ++i) {
        const double p = oracle::normal_box_quadrature(-1.0, 0.0, -0.5 + 0.005 * i, 0.5);
        CHECK(p <= hi + 1e-12);
        CHECK(p >= lo - 1e-12);
    }
    CHECK(abs.imc.upper(0, 0) == doctest::Approx(hi).epsilon(1e-8));
    CHECK(abs.imc.lower(0, 0) == doctest::Approx(lo).epsilon(1e-8));
    CHECK(abs.imc.upper(0, 0) >= hi);
    CHECK(abs.imc.lower(0, 0) <= lo);
    CHECK(validate_imc(abs.imc).ok());
}

TEST_CASE("perturbation widens every bound")
{
    const Partition part = build_partition(linear(), 0.25);
    const Abstraction plain = build_imc(linear(), part, 0.025);
    const Abstraction noisy = build_imc(linear(0.1), part, 0.025);
    for (std::size_t i = 0; i < part.cell_count(); ++i) {
        for (std::size_t j = 0; j < part.state_count(); ++j) {
            CHECK(noisy.imc.upper(i, j) >= plain.imc.upper(i, j));
            CHECK(noisy.imc.lower(i, j) <= plain.imc.lower(i, j));
        }
    }
    CHECK(row_gap(noisy.imc) > row_gap(plain.imc));
}

TEST_CASE("kernel soundness")
{
    CHECK(kernel_violations(linear(), 0.25, 1) == 0);
    CHECK(kernel_violations(logistic(), 0.125, 2) == 0);
    CHECK(kernel_violations(rotation(), 0.5, 3) == 0);
}

TEST_CASE("row gap shrinks under refinement")
{
    const SystemSpec spec = parse_config_text("[system]\nn = 1\nf = \"0.5*x1\"\nb = 0.5\nW = [-1, 1]\n").spec;
    double previous = 2.0;
    for (double eta : {1.0, 0.5, 0.25, 0.125}) {
        const Abstraction abs = build_imc(spec, build_partition(spec, eta), default_kappa(eta));
        const double gap = row_gap(abs.imc);
        CHECK(gap < previous);
        previous = gap;
    }
}

TEST_CASE("reference ledger")
{
    const double eta = 0.25;
    const Partition part = build_partition(linear(), eta);
    const Abstraction abs = build_imc(linear(), part, 0.025);
    const auto& led = abs.ledger;
    CHECK(led.cells == 8);
    CHECK(led.ws == (std::sqrt(16.0) + 2.0) * eta);
    CHECK(led.tv == 8 * eta * led.ws);
    CHECK(led.claim1_radius == std::sqrt(16.0) * eta);
    REQUIRE(led.entries.size() == 8);
    for (const auto& e : led.entries) {
        REQUIRE_FALSE(e.references.empty());
        CHECK(e.measures.size() == e.references.size());
        for (const auto& r : e.references) {
            CHECK(r.mean[0] == eta * std::floor(r.mean[0] / eta));
            CHECK(r.var[0] == eta * eta * std::floor(r.var[0] / (eta * eta)));
        }
        for (const auto& m : e.measures) {
            double sum = 0.0;
            for (double p : m.probs) {
                CHECK(p >= 0.0);
                sum += p;
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("discretized Gaussian")
{
    const Partition part = build_partition(linear(), 0.5);
    const DiscreteDist d = discretize_gaussian(GaussianPoint{{0.0}, {0.25}}, part);
    REQUIRE(d.size() == 5);
    CHECK(d[1] == doctest::Approx(oracle::normal_box_erf(-0.5, 0.0, 0.0, 0.5)).epsilon(1e-12));
    CHECK(d[4] == doctest::Approx(1.0 - oracle::normal_box_erf(-1.0, 1.0, 0.0, 0.5)).epsilon(1e-12));
}
