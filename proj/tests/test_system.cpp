#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "imcv/errors.hpp"
#include "imcv/system.hpp"

#include <random>

using namespace imcv;

namespace {

SystemSpec one_d(double theta = 0.0)
{
    SystemSpec s;
    s.n = 1;
    s.k = 1;
    s.f = {parse_expr("0.5*x1", 1)};
    s.b = {{parse_expr("0.5", 1)}};
    s.theta = theta;
    s.working_box = IntervalBox{{-1.0, 1.0}};
    s.props = {in_prop, "goal"};
    s.regions = {{IntervalBox{{-1.0, 0.0}}, {in_prop}}, {IntervalBox{{0.0, 1.0}}, {in_prop, "goal"}}};
    return s;
}

} // namespace

TEST_CASE("two-cell partition")
{
    const Partition p = build_partition(one_d(), 1.0);
    CHECK(p.cell_count() == 2);
    CHECK(p.state_count() == 3);
    CHECK(p.sink() == 2);
    CHECK(p.labels(0) == Labels{in_prop});
    CHECK(p.labels(1) == Labels{in_prop, "goal"});
    CHECK(p.labels(2).empty());
}

TEST_CASE("misaligned grid is rejected")
{
    CHECK_THROWS_AS(build_partition(one_d(), 0.4), misaligned_labels);
    CHECK_NOTHROW(build_partition(one_d(), 0.5));
}

TEST_CASE("2-D grid diameter")
{
    SystemSpec s;
    s.n = 2;
    s.k = 2;
    s.f = {parse_expr("x1", 2), parse_expr("x2", 2)};
    s.b = {{parse_expr("0.1", 2), parse_expr("0", 2)}, {parse_expr("0", 2), parse_expr("0.1", 2)}};
    s.working_box = IntervalBox{{0.0, 1.0}, {0.0, 1.0}};
    s.props = {in_prop};
    s.regions = {{s.working_box, {in_prop}}};
    const Partition p = build_partition(s, 0.5);
    CHECK(p.cell_count() == 4);
    // Oracle: largest pairwise infinity-norm distance between centres.
    double diam = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            const auto a = p.center(i);
            const auto b = p.center(j);
            diam = std::max({diam, std::fabs(a[0] - b[0]), std::fabs(a[1] - b[1])});
        }
    }
    CHECK(diam == 0.5);
    CHECK(p.diameter() == diam);
    // Row-major order, last axis fastest.
    CHECK(p.cell(1)[1].lo() == 0.5);
    CHECK(p.cell(2)[0].lo() == 0.5);
}

TEST_CASE("locate")
{
    const Partition p = build_partition(one_d(), 0.25);
    CHECK(p.cell_count() == 8);
    CHECK(p.locate(std::vector{-0.9}) == 0);
    CHECK(p.locate(std::vector{-0.1}) == 3);
    CHECK(p.locate(std::vector{0.0}) == 4);   // shared face goes to the upper cell's lower face
    CHECK(p.locate(std::vector{-0.75}) == 1);
    CHECK(p.locate(std::vector{1.0}) == 7);   // last cell is closed
    CHECK(p.locate(std::vector{-1.0}) == 0);
    CHECK(p.locate(std::vector{1.0000001}) == p.sink());
    CHECK(p.locate(std::vector{-3.0}) == p.sink());
    for (std::size_t c = 0; c < p.cell_count(); ++c) {
        CHECK(p.locate(p.center(c)) == c);
    }
}

TEST_CASE("labels are constant on cells and in marks W")
{
    SystemSpec s = one_d();
    s.props.insert("mid");
    s.regions = regions_from_props(s.working_box, {{"goal", {IntervalBox{{0.5, 1.0}}}},
                                                   {"mid", {IntervalBox{{-0.25, 0.75}}}}});
    s.validate();
    const Partition p = build_partition(s, 0.25);
    std::mt19937_64 rng(3);
    for (std::size_t c = 0; c < p.cell_count(); ++c) {
        const IntervalBox cell = p.cell(c);
        std::uniform_real_distribution<double> u(cell[0].lo(), cell[0].hi());
        for (int k = 0; k < 100; ++k) {
            const std::vector<double> x{u(rng)};
            const std::size_t at = p.locate(x);
            CHECK(s.labels_at(x) == p.labels(at));
            CHECK((at != p.sink()) == p.labels(at).contains(in_prop));
        }
    }
    CHECK(p.labels(p.locate(std::vector{0.6})) == Labels{in_prop, "goal", "mid"});
    CHECK(p.labels(p.locate(std::vector{0.8})) == Labels{in_prop, "goal"});
    CHECK(p.labels(p.locate(std::vector{-0.5})) == Labels{in_prop});
}

TEST_CASE("spec validation")
{
    SystemSpec s = one_d();
    s.theta = -1.0;
    CHECK_THROWS_AS(s.validate(), validation_error);

    s = one_d();
    s.regions.pop_back();
    CHECK_THROWS_AS(s.validate(), validation_error); // no longer tiles W

    s = one_d();
    s.regions[1].props = {"goal"};
    CHECK_THROWS_AS(s.validate(), validation_error); // lacks "in"

    // A noise column driving two coordinates makes b b^T non-diagonal.
    SystemSpec t;
    t.n = 2;
    t.k = 1;
    t.f = {parse_expr("x1", 2), parse_expr("x2", 2)};
    t.b = {{parse_expr("0.1", 2)}, {parse_expr("0.1", 2)}};
    t.working_box = IntervalBox{{0.0, 1.0}, {0.0, 1.0}};
    t.props = {in_prop};
    t.regions = {{t.working_box, {in_prop}}};
    CHECK_THROWS_AS(t.validate(), validation_error);
}
