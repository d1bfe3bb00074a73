#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

#include "imcv/cli.hpp"
#include "imcv/errors.hpp"
#include "imcv/io.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace imcv;
namespace fs = std::filesystem;

namespace {

const fs::path examples{IMCV_EXAMPLES_DIR};

fs::path scratch_dir()
{
    const fs::path dir = fs::temp_directory_path() / "imcv_test_cli";
    fs::create_directories(dir);
    return dir;
}

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "imcverify");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("minimal config")
{
    const Config c = parse_config_text(R"(
[system]
n = 1
f = "0.5*x1"
b = "0.5"
theta = 0
W = [-1, 1]

[labels]
goal = [0.5, 1]
)");
    CHECK(c.spec.n == 1);
    CHECK(c.spec.k == 1);
    CHECK(c.spec.working_box[0].lo() == -1.0);
    CHECK(c.spec.props.contains("goal"));
    CHECK(c.spec.regions.size() == 2);
    CHECK_FALSE(c.verify.eta.has_value());
}

TEST_CASE("verify section")
{
    const Config c = load_config(examples / "linear_1d.toml");
    REQUIRE(c.verify.eta.has_value());
    CHECK(*c.verify.eta == 0.25);
    CHECK(*c.verify.paths == 100000);
    CHECK(*c.verify.property == "P[ in U<=10 goal ]");
    CHECK(*c.verify.x0 == std::vector<double>{0.0});
    CHECK(load_config(examples / "rotation_2d.toml").spec.n == 2);
    CHECK(parse_config(examples / "logistic_1d.toml").working_box[0].hi() == 1.0);
}

TEST_CASE("config errors")
{
    try {
        (void)parse_config_text("[system]\nn = 1\nf = \"0.5**\"\nb = 0.5\nW = [-1, 1]\n");
        FAIL("expected a parse error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 3);
        // The second '*' of the expression, which starts at column 6.
        CHECK(e.column() == 10);
    }

    try {
        (void)parse_config_text("[system]\nn = 1\nf = \"0.5*x1\"\nb = 0.5\n");
        FAIL("expected a validation error");
    } catch (const validation_error& e) {
        CHECK(std::string(e.what()).find("'W'") != std::string::npos);
    }

    try {
        (void)parse_config_text("[system]\nn = 1\nf = \"0.5*x1\"\nb = 0.5\nW = [-1, 1\n");
        FAIL("expected a parse error");
    } catch (const parse_error& e) {
        CHECK(e.line() >= 5);
    }

    CHECK_THROWS_AS((void)parse_config_text("[system]\nn = 1\nf = \"x2\"\nb = 0.5\nW = [-1, 1]\n"), parse_error);
    CHECK_THROWS_AS((void)parse_config_text("[system]\nn = 1\nf = \"x1\"\nb = 0.5\nW = [-1, 1]\nbogus = 1\n"),
                    validation_error);
    CHECK_THROWS_AS((void)parse_config_text("[nonsense]\n"), validation_error);
}

TEST_CASE("IMC round trip is bit-exact")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        Imc imc = oracle::random_imc(rng, 2 + trial % 6, trial % 2 == 0);
        imc.set_centers({});
        const fs::path file = scratch_dir() / "round.json";
        save_imc(imc, file);
        const Imc back = load_imc(file);
        CHECK(back.size() == imc.size());
        CHECK(back.has_sink() == imc.has_sink());
        CHECK(back.lower_matrix() == imc.lower_matrix());
        CHECK(back.upper_matrix() == imc.upper_matrix());
        CHECK(back.all_labels() == imc.all_labels());
        CHECK(imc_to_json(back).dump() == imc_to_json(imc).dump());
    }
    CHECK_THROWS_AS((void)imc_from_json(nlohmann::json::parse(R"({"n_states": 2, "lower": [[1]]})")),
                    validation_error);
}

TEST_CASE("DFA documents")
{
    const Dfa d = load_dfa(examples / "reach_goal_dfa.json");
    CHECK(d.size() == 3);
    CHECK(d.step(d.initial, {in_prop, "goal"}) == 1);
    CHECK(d.step(d.initial, {in_prop}) == 0);
    CHECK(d.step(d.initial, {}) == 2);
    CHECK_THROWS_AS((void)dfa_from_json(nlohmann::json::parse(R"({"initial": 3, "accepting": [true], "edges": [[]]})")),
                    validation_error);
}

TEST_CASE("fractions")
{
    CHECK(is_dyadic(0.75));
    CHECK(is_dyadic(3.0 / 16.0));
    CHECK_FALSE(is_dyadic(0.1));
    CHECK(format_fraction(12.0 / 16.0) == "3/4");
    CHECK(format_fraction(1.0 / 16.0) == "1/16");
    CHECK(format_fraction(0.0) == "0");
    CHECK(format_fraction(1.0) == "1");
}

TEST_CASE("CSV output")
{
    const ProbIntervals iv{{0.3, 0.5}, {0.8, 0.9}};
    std::ostringstream a;
    std::ostringstream b;
    write_results_csv(a, iv, winning_region(iv, 0.7, Comparison::ge));
    write_results_csv(b, iv, winning_region(iv, 0.7, Comparison::ge));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("state,lo,hi,verdict\n", 0) == 0);
    CHECK(a.str().find("1,0.80000000000000004,0.90000000000000002,guaranteed") != std::string::npos);
}

TEST_CASE("vertices command")
{
    const auto r = run({"vertices", "--imc", (examples / "example_imc.json").string(), "--init", "0", "--t", "2"});
    CHECK(r.code == exit_ok);
    for (const char* v : {"(1/16, 3/4, 3/16)", "(3/16, 3/4, 1/16)", "(3/16, 1/4, 9/16)", "(9/16, 1/4, 3/16)"}) {
        CHECK_MESSAGE(r.out.find(v) != std::string::npos, r.out);
    }
}

TEST_CASE("abstract and check commands")
{
    const fs::path imc_file = scratch_dir() / "linear.json";
    const auto a = run({"abstract", "--config", (examples / "linear_1d.toml").string(), "--eta", "0.25", "--out",
                        imc_file.string()});
    REQUIRE(a.code == exit_ok);
    const Imc imc = load_imc(imc_file);
    CHECK(imc.size() == 9);
    CHECK(validate_imc(imc).ok());
    CHECK(validate_imc(imc).tightening.empty());

    const fs::path csv1 = scratch_dir() / "r1.csv";
    const fs::path csv2 = scratch_dir() / "r2.csv";
    const auto c = run({"check", "--imc", imc_file.string(), "--property", "P[ in U<=10 goal ]", "--rho", "0.5",
                        "--op", "ge", "--out", csv1.string()});
    CHECK(c.code == exit_ok);
    CHECK(c.out.find("guaranteed") != std::string::npos);
    CHECK(c.out.find("undecided") != std::string::npos);
    (void)run({"check", "--imc", imc_file.string(), "--property", "P[ in U<=10 goal ]", "--rho", "0.5", "--op",
               "ge", "--out", csv2.string()});
    CHECK(slurp(csv1) == slurp(csv2));
    CHECK_FALSE(slurp(csv1).empty());
}

TEST_CASE("simulate command")
{
    const fs::path imc_file = scratch_dir() / "sim.json";
    REQUIRE(run({"abstract", "--config", (examples / "linear_1d.toml").string(), "--eta", "0.25", "--out",
                 imc_file.string()})
                .code == exit_ok);
    const auto s = run({"simulate", "--config", (examples / "linear_1d.toml").string(), "--paths", "5000", "--seed",
                        "3", "--imc", imc_file.string()});
    CHECK(s.code == exit_ok);
    CHECK(s.out.find("PASS") != std::string::npos);

    const auto again = run({"simulate", "--config", (examples / "linear_1d.toml").string(), "--paths", "5000",
                            "--seed", "3", "--imc", imc_file.string()});
    CHECK(again.out == s.out);

    // No ambient randomness: the seed is mandatory.
    CHECK(run({"simulate", "--config", (examples / "linear_1d.toml").string()}).code == exit_usage);
}

TEST_CASE("exit codes")
{
    CHECK(run({}).code == exit_usage);
    CHECK(run({"frobnicate"}).code == exit_usage);
    CHECK(run({"vertices", "--imc", "/nonexistent.json", "--init", "0", "--t", "1"}).code == exit_usage);

    const fs::path bad = scratch_dir() / "bad.toml";
    std::ofstream(bad) << "[system]\nn = 1\nf = \"0.5**\"\nb = 0.5\nW = [-1, 1]\n";
    const auto r = run({"abstract", "--config", bad.string(), "--eta", "0.5", "--out",
                        (scratch_dir() / "x.json").string()});
    CHECK(r.code == exit_usage);
    CHECK(r.err.find("column 10") != std::string::npos);

    const auto infeasible = run({"complete", "--config", (examples / "linear_1d.toml").string(), "--theta1", "0",
                                 "--theta2", "0.01", "--kappa", "0.01"});
    CHECK(infeasible.code == exit_fail);

    const auto certificate = run({"complete", "--config", (examples / "linear_1d.toml").string(), "--theta1", "0",
                                  "--theta2", "0.3", "--kappa", "0.01", "--property", ""});
    CHECK(certificate.code == exit_ok);
}
