#include "imcv/cli.hpp"

#include "imcv/abstraction.hpp"
#include "imcv/checker.hpp"
#include "imcv/errors.hpp"
#include "imcv/io.hpp"
#include "imcv/robustness.hpp"
#include "imcv/simulation.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <sstream>

namespace imcv {

namespace {

std::vector<double> parse_point(const std::string& text)
{
    std::vector<double> x;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
            throw validation_error("bad coordinate '" + item + "' in " + text);
        }
        x.push_back(v);
    }
    if (x.empty()) {
        throw validation_error("empty point");
    }
    return x;
}

Property load_property(const std::string& text)
{
    return parse_property(text, [](const std::string& path) { return load_dfa(path); });
}

// Turn an unbounded property into its T-step version.
Property with_horizon(Property p, int horizon)
{
    if (const auto* u = std::get_if<Until>(&p)) {
        return BoundedUntil{u->lhs, u->rhs, horizon};
    }
    if (auto* s = std::get_if<Safety>(&p)) {
        s->horizon = horizon;
    }
    return p;
}

Comparison parse_comparison(const std::string& op)
{
    if (op == "ge") {
        return Comparison::ge;
    }
    if (op == "gt") {
        return Comparison::gt;
    }
    if (op == "le") {
        return Comparison::le;
    }
    return Comparison::lt;
}

void print_set(std::ostream& out, const char* name, const std::vector<std::size_t>& states)
{
    out << name << ":";
    for (auto s : states) {
        out << ' ' << s;
    }
    out << '\n';
}

template <class T>
T pick(const std::optional<T>& flag, const std::optional<T>& config, const char* what)
{
    if (flag) {
        return *flag;
    }
    if (config) {
        return *config;
    }
    throw validation_error(std::string("missing ") + what);
}

} // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Interval Markov chain abstraction and verification of stochastic systems", "imcverify"};
    app.require_subcommand(1);

    std::string config_path;
    std::string imc_path;
    std::string out_path;
    std::string property_text;
    std::string x0_text;
    std::string traces_path;
    std::string report_path;
    std::string op = "ge";
    std::optional<double> eta;
    std::optional<double> kappa;
    std::optional<double> rho;
    std::optional<int> horizon;
    std::optional<std::size_t> paths;
    std::optional<std::size_t> policy_paths;
    std::optional<std::uint64_t> seed;
    std::optional<double> confidence;
    std::optional<double> theta1;
    std::optional<double> theta2;
    std::size_t init_state = 0;
    int steps = 0;
    double slack = 0.0;

    auto* abstract = app.add_subcommand("abstract", "build the IMC abstraction of a system");
    abstract->add_option("--config", config_path, "system config")->required()->check(CLI::ExistingFile);
    abstract->add_option("--eta", eta, "grid size");
    abstract->add_option("--kappa", kappa, "inclusion width budget (default eta/10)");
    abstract->add_option("--out", out_path, "IMC output file")->required();

    auto* check = app.add_subcommand("check", "bound satisfaction probabilities on an IMC");
    check->add_option("--imc", imc_path, "IMC file")->required()->check(CLI::ExistingFile);
    check->add_option("--property", property_text, "property, e.g. 'P[ in U<=10 goal ]'")->required();
    check->add_option("--horizon", horizon, "bound an unbounded property to this many steps");
    auto* rho_opt = check->add_option("--rho", rho, "probability threshold");
    check->add_option("--op", op, "threshold comparison")
        ->check(CLI::IsMember({"ge", "gt", "le", "lt"}))
        ->needs(rho_opt);
    check->add_option("--out", out_path, "CSV output file (default stdout)");

    auto* vertices = app.add_subcommand("vertices", "vertices of the marginal polytope at time t");
    vertices->add_option("--imc", imc_path, "IMC file")->required()->check(CLI::ExistingFile);
    vertices->add_option("--init", init_state, "initial state (0-based)")->required();
    vertices->add_option("--t", steps, "time step")->required()->check(CLI::NonNegativeNumber);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate on the concrete system");
    simulate->add_option("--config", config_path, "system config")->required()->check(CLI::ExistingFile);
    simulate->add_option("--x0", x0_text, "initial state, comma separated");
    simulate->add_option("--paths", paths, "number of paths");
    simulate->add_option("--horizon", horizon, "simulation horizon");
    simulate->add_option("--seed", seed, "random seed")->required();
    simulate->add_option("--property", property_text, "property");
    simulate->add_option("--eta", eta, "grid size used for labelling");
    simulate->add_option("--confidence", confidence, "confidence level (default 0.99)");
    simulate->add_option("--imc", imc_path, "compare against this IMC")->check(CLI::ExistingFile);
    simulate->add_option("--slack", slack, "slack of the soundness comparison");
    simulate->add_option("--traces", traces_path, "write traces to this file");

    auto* complete = app.add_subcommand("complete", "robust completeness certificate and sandwich report");
    complete->add_option("--config", config_path, "system config")->required()->check(CLI::ExistingFile);
    complete->add_option("--theta1", theta1, "perturbation of the abstracted system");
    complete->add_option("--theta2", theta2, "perturbation of the dominating system");
    complete->add_option("--kappa", kappa, "inclusion width budget");
    complete->add_option("--eta", eta, "grid size (default: largest admissible)");
    complete->add_option("--property", property_text, "property for the interval comparison");
    complete->add_option("--x0", x0_text, "initial state for the interval comparison");
    complete->add_option("--paths", paths, "paths for the theta1 Monte Carlo run");
    complete->add_option("--policy-paths", policy_paths, "paths per theta2 policy (default: --paths)");
    complete->add_option("--seed", seed, "random seed");
    complete->add_option("--report", report_path, "JSON report file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_usage;
    }

    try {
        if (*abstract) {
            const Config cfg = load_config(config_path);
            const double e = pick(eta, cfg.verify.eta, "--eta");
            const double k = kappa ? *kappa : cfg.verify.kappa.value_or(default_kappa(e));
            const Partition partition = build_partition(cfg.spec, e);
            BuildOptions options;
            options.store_reference_measures = false;
            const Abstraction abs = build_imc(cfg.spec, partition, k, options);
            save_imc(abs.imc, out_path);
            out << "states " << abs.imc.size() << " (" << partition.cell_count() << " cells + sink)\n";
            out << "row gap " << row_gap(abs.imc) << "\n";
            for (const auto& d : abs.ledger.diagnostics) {
                out << "note: " << d << "\n";
            }
            return exit_ok;
        }

        if (*check) {
            const Imc imc = load_imc(imc_path);
            Property prop = load_property(property_text);
            if (horizon) {
                prop = with_horizon(std::move(prop), *horizon);
            }
            const ProbIntervals iv = check_property(imc, prop);
            std::optional<WinningRegion> region;
            if (rho) {
                region = winning_region(iv, *rho, parse_comparison(op));
            }
            if (out_path.empty()) {
                write_results_csv(out, iv, region);
            } else {
                std::ofstream csv(out_path);
                write_results_csv(csv, iv, region);
            }
            if (region) {
                print_set(out, "guaranteed", region->guaranteed);
                print_set(out, "impossible", region->impossible);
                print_set(out, "undecided", region->undecided);
            }
            return exit_ok;
        }

        if (*vertices) {
            const Imc imc = load_imc(imc_path);
            if (init_state >= imc.size()) {
                throw validation_error("--init is not a state of the IMC");
            }
            DiscreteDist mu0;
            mu0.probs.assign(imc.size(), 0.0);
            mu0.probs[init_state] = 1.0;
            const auto& lo = imc.lower_matrix();
            const auto& hi = imc.upper_matrix();
            const bool exact = std::all_of(lo.begin(), lo.end(), [](double x) { return is_dyadic(x); }) &&
                               std::all_of(hi.begin(), hi.end(), [](double x) { return is_dyadic(x); });
            const auto verts = marginal_vertices(imc, mu0, steps);
            out.precision(17);
            for (const auto& v : verts) {
                out << '(';
                for (std::size_t i = 0; i < v.size(); ++i) {
                    out << (i ? ", " : "");
                    if (exact) {
                        out << format_fraction(v[i]);
                    } else {
                        out << v[i];
                    }
                }
                out << ")\n";
            }
            return exit_ok;
        }

        if (*simulate) {
            const Config cfg = load_config(config_path);
            const auto& v = cfg.verify;
            const std::vector<double> x0 = x0_text.empty() ? pick<std::vector<double>>({}, v.x0, "--x0")
                                                           : parse_point(x0_text);
            const Property prop = load_property(property_text.empty() ? pick<std::string>({}, v.property, "--property")
                                                                      : property_text);
            const Partition partition = build_partition(cfg.spec, pick(eta, v.eta, "--eta"));
            const int h = pick(horizon, v.horizon, "--horizon");
            const std::size_t n = pick(paths, v.paths, "--paths");
            const double conf = confidence.value_or(v.confidence.value_or(0.99));
            Estimate est;
            if (traces_path.empty()) {
                est = estimate_probability(cfg.spec, partition, x0, h, n, PerturbationPolicy::zero(), *seed, prop, conf);
            } else {
                const auto traces = simulate_paths(cfg.spec, partition, x0, h, n, PerturbationPolicy::zero(), *seed);
                std::ofstream t(traces_path);
                write_traces(t, traces);
                est = estimate_probability(traces, prop, partition.all_labels(), conf);
            }
            out.precision(10);
            out << "estimate " << est.point << " (" << est.successes << "/" << est.samples << ")\n";
            out << "confidence interval [" << est.ci.lo() << ", " << est.ci.hi() << "] at " << conf << "\n";
            if (!est.warning.empty()) {
                out << "warning: " << est.warning << "\n";
            }
            if (!imc_path.empty()) {
                const Imc imc = load_imc(imc_path);
                if (imc.size() != partition.state_count()) {
                    throw validation_error("the IMC does not match the partition at this eta");
                }
                const std::size_t s = partition.locate(x0);
                const ProbInterval iv = check_property(imc, prop)[s];
                const Verdict verdict = soundness_check(est.ci, iv, slack);
                out << "IMC interval [" << iv.lo << ", " << iv.hi << "] at state " << s << "\n";
                out << "soundness " << to_string(verdict) << "\n";
                return verdict == Verdict::fail ? exit_fail : exit_ok;
            }
            return exit_ok;
        }

        if (*complete) {
            const Config cfg = load_config(config_path);
            const auto& v = cfg.verify;
            const double t1 = pick(theta1, v.theta1, "--theta1");
            const double t2 = pick(theta2, v.theta2, "--theta2");
            const double k = pick(kappa, v.kappa, "--kappa");
            const double e = eta ? *eta : max_eta(cfg.spec, t1, t2, k);
            std::optional<SandwichQuery> query;
            const std::string prop_text = property_text.empty() ? v.property.value_or("") : property_text;
            if (!prop_text.empty()) {
                SandwichQuery q;
                q.property = load_property(prop_text);
                q.x0 = x0_text.empty() ? pick<std::vector<double>>({}, v.x0, "--x0") : parse_point(x0_text);
                q.paths = pick(paths, v.paths, "--paths");
                q.policy_paths = policy_paths.value_or(0);
                q.seed = pick(seed, v.seed, "--seed");
                q.horizon = v.horizon.value_or(0);
                q.confidence = v.confidence.value_or(0.99);
                query = std::move(q);
            }
            const SandwichReport report = sandwich_report(cfg.spec, e, k, t1, t2, query);
            out << summary(report);
            if (!report_path.empty()) {
                std::ofstream j(report_path);
                j << to_json(report).dump(2) << '\n';
            }
            const bool failed = !report.margin.satisfied ||
                                (report.intervals && report.intervals->lower_in_imc == Verdict::fail);
            return failed ? exit_fail : exit_ok;
        }
    } catch (const no_feasible_eta& e) {
        err << "error: " << e.what() << '\n';
        return exit_fail;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}

} // namespace imcv
