#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "imcv/errors.hpp"
#include "imcv/expr.hpp"
#include "imcv/inclusion.hpp"
#include "imcv/interval.hpp"

#include <cmath>
#include <random>

using namespace imcv;

namespace {

// Random expression over n variables built from the supported operators.
Expr random_expr(std::mt19937_64& rng, std::size_t n, int depth)
{
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 10);
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    std::uniform_int_distribution<std::size_t> var(0, n - 1);
    switch (pick(rng)) {
    case 0: return Expr::constant(c(rng));
    case 1: return Expr::variable(var(rng));
    case 2: return random_expr(rng, n, depth - 1) + random_expr(rng, n, depth - 1);
    case 3: return random_expr(rng, n, depth - 1) - random_expr(rng, n, depth - 1);
    case 4:
    case 5: return random_expr(rng, n, depth - 1) * random_expr(rng, n, depth - 1);
    case 6: return Expr::unary(Expr::Kind::sin, random_expr(rng, n, depth - 1));
    case 7: return Expr::unary(Expr::Kind::cos, random_expr(rng, n, depth - 1));
    case 8: return Expr::binary(Expr::Kind::pow, random_expr(rng, n, depth - 1), Expr::constant(2.0));
    case 9: return Expr::binary(Expr::Kind::min, random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1));
    default: return Expr::unary(Expr::Kind::exp, Expr::constant(0.25) * random_expr(rng, n, depth - 1));
    }
}

IntervalBox random_box(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<Interval> dims;
    for (std::size_t d = 0; d < n; ++d) {
        const double a = u(rng);
        const double b = u(rng);
        dims.emplace_back(std::min(a, b), std::max(a, b));
    }
    return IntervalBox(std::move(dims));
}

std::vector<double> random_point(std::mt19937_64& rng, const IntervalBox& box)
{
    std::vector<double> x;
    for (const auto& iv : box) {
        x.push_back(std::uniform_real_distribution<double>(iv.lo(), iv.hi())(rng));
    }
    return x;
}

} // namespace

TEST_CASE("point evaluation")
{
    CHECK(eval_point(parse_expr("0.8*x1", 1), std::vector{0.5}) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(eval_point(parse_expr("x1*x2", 2), std::vector{2.0, 3.0}) == 6.0);
    CHECK(eval_point(parse_expr("exp(x1)", 1), std::vector{0.0}) == 1.0);
    CHECK(eval_point(parse_expr("2^3^2"), {}) == 512.0);
    CHECK(eval_point(parse_expr("-x1^2", 1), std::vector{3.0}) == -9.0);
    CHECK(eval_point(parse_expr("max(x1, 1) - min(x1, 1)", 1), std::vector{4.0}) == 3.0);
    CHECK_THROWS_AS(eval_point(parse_expr("1/x1", 1), std::vector{0.0}), domain_error);
    CHECK_THROWS_AS(eval_point(parse_expr("x1^0.5", 1), std::vector{-1.0}), domain_error);
}

TEST_CASE("parser reports the failing column")
{
    try {
        (void)parse_expr("0.5**", 1);
        FAIL("expected a parse error");
    } catch (const parse_error& e) {
        CHECK(e.column() == 5);
    }
    CHECK_THROWS_AS(parse_expr("x3", 2), error);
    CHECK_THROWS_AS(parse_expr("sin(x1", 1), parse_error);
    CHECK(parse_expr("0.5*x1", 1).to_string().find("x1") != std::string::npos);
}

TEST_CASE("interval evaluation examples")
{
    const Interval lin = eval_interval(parse_expr("0.8*x1", 1), IntervalBox{{-1.0, 1.0}});
    CHECK(lin.lo() <= -0.8);
    CHECK(lin.hi() >= 0.8);
    CHECK(lin.lo() == doctest::Approx(-0.8).epsilon(1e-14));
    CHECK(lin.hi() == doctest::Approx(0.8).epsilon(1e-14));

    const Interval sq = eval_interval(parse_expr("x1^2", 1), IntervalBox{{-1.0, 2.0}});
    CHECK(sq.contains(Interval(0.0, 4.0)));

    const Expr logistic = parse_expr("x1*(1 - x1)", 1);
    const Interval r = eval_interval(logistic, IntervalBox{{0.0, 1.0}});
    double lo = 1.0;
    double hi = -1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double v = eval_point(logistic, std::vector{i / 1000.0});
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(r.contains(Interval(lo, hi)));
    CHECK(r.contains(Interval(0.0, 0.25)));

    CHECK_THROWS_AS(eval_interval(parse_expr("1/x1", 1), IntervalBox{{-1.0, 1.0}}), domain_error);
}

TEST_CASE("containment on random expressions")
{
    std::mt19937_64 rng(11);
    int checked = 0;
    while (checked < 10000) {
        const std::size_t n = 1 + rng() % 3;
        const Expr e = random_expr(rng, n, 4);
        const IntervalBox box = random_box(rng, n);
        Interval iv;
        try {
            iv = eval_interval(e, box);
        } catch (const domain_error&) {
            continue;
        }
        for (int k = 0; k < 10; ++k) {
            const auto x = random_point(rng, box);
            const double v = eval_point(e, x);
            REQUIRE_MESSAGE(iv.contains(v), e.to_string() << " at " << box);
            ++checked;
        }
    }
}

TEST_CASE("inclusion monotonicity and convergence")
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng() % 2;
        const Expr e = random_expr(rng, n, 3);
        const IntervalBox outer = random_box(rng, n);
        std::vector<Interval> inner_dims;
        for (const auto& iv : outer) {
            std::uniform_real_distribution<double> u(iv.lo(), iv.hi());
            const double a = u(rng);
            const double b = u(rng);
            inner_dims.emplace_back(std::min(a, b), std::max(a, b));
        }
        const IntervalBox inner(std::move(inner_dims));
        try {
            CHECK(eval_interval(e, outer).contains(eval_interval(e, inner)));
        } catch (const domain_error&) {
        }
    }

    // Width of the inclusion shrinks as the box is halved.
    const std::vector<Expr> bench{parse_expr("0.5*x1", 1), parse_expr("x1*(1-x1)", 1), parse_expr("sin(x1)+x1^2", 1),
                                  parse_expr("exp(-x1)*cos(x1)", 1)};
    for (const auto& e : bench) {
        double width = eval_interval(e, IntervalBox{{0.0, 1.0}}).width();
        for (int k = 1; k <= 12; ++k) {
            const double w = eval_interval(e, IntervalBox{{0.0, std::ldexp(1.0, -k)}}).width();
            CHECK(w <= width);
            width = w;
        }
        CHECK(width < 1e-3);
    }
}

TEST_CASE("subdivision")
{
    const std::vector<Expr> one{Expr::constant(1.0)};
    auto pieces = subdivide_until(one, IntervalBox{{0.0, 1.0}}, 0.1);
    REQUIRE(pieces.size() == 1);
    CHECK(pieces[0].outputs[0] == Interval(1.0));

    const std::vector<Expr> id{parse_expr("x1", 1)};
    pieces = subdivide_until(id, IntervalBox{{0.0, 1.0}}, 0.25);
    CHECK(pieces.size() >= 4);
    double covered = 0.0;
    double cursor = 0.0;
    for (const auto& p : pieces) {
        CHECK(p.box[0].width() <= 0.25);
        CHECK(p.box[0].lo() == cursor);
        cursor = p.box[0].hi();
        covered += p.box.volume();
    }
    CHECK(cursor == 1.0);
    CHECK(covered == doctest::Approx(1.0));

    const std::vector<Expr> twice{parse_expr("2*x1", 1)};
    pieces = subdivide_until(twice, IntervalBox{{0.0, 1.0}}, 0.25);
    for (const auto& p : pieces) {
        CHECK(p.outputs[0].width() < 0.25);
        CHECK(eval_interval(twice[0], p.box).width() < 0.25);
    }

    // Mean and diffusion widths share the budget.
    const std::vector<Expr> mean{parse_expr("x1", 1)};
    const std::vector<Expr> diff{parse_expr("x1", 1)};
    pieces = subdivide_until(mean, diff, IntervalBox{{0.0, 1.0}}, 0.25);
    for (const auto& p : pieces) {
        const double wm = p.outputs[0].width();
        const double wd = p.outputs[1].width();
        CHECK(wm * wm + wd * wd < 0.0625);
    }

    CHECK_THROWS_AS(subdivide_until(id, IntervalBox{{0.0, 1.0}}, 1e-6, 16), budget_error);
}

TEST_CASE("2-D subdivision covers the box")
{
    const std::vector<Expr> e{parse_expr("x1*x2", 2)};
    const IntervalBox box{{-1.0, 1.0}, {0.0, 2.0}};
    const auto pieces = subdivide_until(e, box, 0.3);
    double vol = 0.0;
    for (const auto& p : pieces) {
        CHECK(box.contains(p.box));
        CHECK(p.outputs[0].width() < 0.3);
        vol += p.box.volume();
    }
    CHECK(vol == doctest::Approx(box.volume()).epsilon(1e-12));
}

TEST_CASE("Lipschitz estimate")
{
    const std::vector<Expr> f{parse_expr("0.5*x1", 1)};
    auto est = lipschitz_bound(f, IntervalBox{{-1.0, 1.0}});
    CHECK(est.finite);
    CHECK(est.value == doctest::Approx(0.5).epsilon(1e-12));

    const std::vector<Expr> g{parse_expr("x1^2 + x2", 2)};
    est = lipschitz_bound(g, IntervalBox{{-1.0, 2.0}, {0.0, 1.0}});
    CHECK(est.value >= 5.0);

    const std::vector<Expr> h{parse_expr("1/x1", 1)};
    est = lipschitz_bound(h, IntervalBox{{-1.0, 1.0}});
    CHECK_FALSE(est.finite);
    CHECK_FALSE(est.diagnostic.empty());
}
