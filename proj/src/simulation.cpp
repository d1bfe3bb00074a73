#include "imcv/simulation.hpp"

#include "imcv/errors.hpp"
#include "imcv/parallel.hpp"

#include <boost/math/distributions/beta.hpp>

#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

namespace imcv {

namespace {

// SplitMix64: counter-based, one stream per path.
class SplitMix64 {
public:
    using result_type = std::uint64_t;
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()()
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

double inf_norm(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::fabs(x));
    }
    return m;
}

} // namespace

PerturbationPolicy PerturbationPolicy::corner(std::vector<double> direction)
{
    PerturbationPolicy p;
    p.kind = Kind::dirac_corner;
    p.direction = std::move(direction);
    return p;
}

PerturbationPolicy PerturbationPolicy::random_dirac()
{
    PerturbationPolicy p;
    p.kind = Kind::dirac_random;
    return p;
}

PerturbationPolicy PerturbationPolicy::two_point(double weight, std::vector<double> a, std::vector<double> b)
{
    PerturbationPolicy p;
    p.kind = Kind::two_point_l1;
    p.weight = weight;
    p.points = {std::move(a), std::move(b)};
    return p;
}

double PerturbationPolicy::expected_norm() const
{
    switch (kind) {
    case Kind::none: return 0.0;
    case Kind::dirac_corner: return inf_norm(direction);
    case Kind::dirac_random: return 1.0;
    case Kind::two_point_l1: return weight * inf_norm(points[0]) + (1.0 - weight) * inf_norm(points[1]);
    }
    return 0.0;
}

void PerturbationPolicy::validate(std::size_t n) const
{
    switch (kind) {
    case Kind::none:
    case Kind::dirac_random: return;
    case Kind::dirac_corner:
        if (direction.size() != n || inf_norm(direction) > 1.0) {
            throw validation_error("Dirac perturbation must be a point of the unit ball in R^" + std::to_string(n));
        }
        return;
    case Kind::two_point_l1:
        if (points.size() != 2 || points[0].size() != n || points[1].size() != n || weight < 0.0 || weight > 1.0) {
            throw validation_error("two-point perturbation needs two points in R^n and a weight in [0, 1]");
        }
        if (expected_norm() > 1.0 + 1e-12) {
            throw validation_error("two-point perturbation has expected norm above 1");
        }
        return;
    }
}

std::string PerturbationPolicy::describe() const
{
    std::ostringstream os;
    auto vec = [&](const std::vector<double>& v) {
        os << '(';
        for (std::size_t i = 0; i < v.size(); ++i) {
            os << (i ? "," : "") << v[i];
        }
        os << ')';
    };
    switch (kind) {
    case Kind::none: os << "none"; break;
    case Kind::dirac_corner: os << "dirac"; vec(direction); break;
    case Kind::dirac_random: os << "dirac-random"; break;
    case Kind::two_point_l1:
        os << "two-point[" << weight << "]";
        vec(points[0]);
        vec(points[1]);
        break;
    }
    return os.str();
}

std::vector<TraceSample> simulate_paths(const SystemSpec& spec, const Partition& partition,
                                        const std::vector<double>& x0, int horizon, std::size_t count,
                                        const PerturbationPolicy& policy, std::uint64_t seed, std::size_t first)
{
    spec.validate();
    policy.validate(spec.n);
    if (count == 0) {
        throw validation_error("at least one path is required");
    }
    if (horizon < 0) {
        throw validation_error("horizon must be nonnegative");
    }
    if (x0.size() != spec.n || !spec.working_box.contains(x0)) {
        throw validation_error("initial state must lie in W");
    }

    // Location of the random Dirac perturbation, shared by all paths.
    std::vector<double> random_point(spec.n, 0.0);
    if (policy.kind == PerturbationPolicy::Kind::dirac_random) {
        SplitMix64 g(seed ^ 0xd1b54a32d192ed03ULL);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (auto& c : random_point) {
            c = u(g);
        }
    }

    std::vector<TraceSample> traces(count);
    constexpr std::size_t chunk = 1024;
    const std::size_t chunks = (count + chunk - 1) / chunk;
    parallel_for(chunks, [&](std::size_t c) {
        std::vector<double> x(spec.n);
        std::vector<double> next(spec.n);
        std::vector<double> w(spec.k);
        for (std::size_t p = c * chunk; p < std::min(count, (c + 1) * chunk); ++p) {
            SplitMix64 gen(seed ^ static_cast<std::uint64_t>(first + p));
            std::normal_distribution<double> normal;
            std::uniform_real_distribution<double> unit;
            TraceSample& tr = traces[p];
            tr.horizon = horizon;
            tr.states.reserve(static_cast<std::size_t>(horizon) + 1);
            x = x0;
            tr.states.push_back(partition.locate(x));
            for (int t = 0; t < horizon; ++t) {
                for (auto& wi : w) {
                    wi = normal(gen);
                }
                const std::vector<double>* xi = nullptr;
                switch (policy.kind) {
                case PerturbationPolicy::Kind::none: break;
                case PerturbationPolicy::Kind::dirac_corner: xi = &policy.direction; break;
                case PerturbationPolicy::Kind::dirac_random: xi = &random_point; break;
                case PerturbationPolicy::Kind::two_point_l1:
                    xi = unit(gen) < policy.weight ? &policy.points[0] : &policy.points[1];
                    break;
                }
                for (std::size_t i = 0; i < spec.n; ++i) {
                    double v = eval_point(spec.f[i], x);
                    for (std::size_t j = 0; j < spec.k; ++j) {
                        if (!spec.b[i][j].is_zero()) {
                            v += eval_point(spec.b[i][j], x) * w[j];
                        }
                    }
                    if (xi != nullptr) {
                        v += spec.theta * (*xi)[i];
                    }
                    next[i] = v;
                }
                x.swap(next);
                const std::size_t s = partition.locate(x);
                tr.states.push_back(s);
                if (s == partition.sink()) {
                    tr.stopped = true;
                    break;
                }
            }
        }
    });
    return traces;
}

Interval clopper_pearson(std::size_t successes, std::size_t samples, double confidence)
{
    if (samples == 0 || successes > samples || !(confidence > 0.0 && confidence < 1.0)) {
        throw validation_error("invalid Clopper-Pearson arguments");
    }
    const double alpha = 1.0 - confidence;
    const auto k = static_cast<double>(successes);
    const auto n = static_cast<double>(samples);
    double lo = 0.0;
    double hi = 1.0;
    if (successes > 0) {
        lo = boost::math::quantile(boost::math::beta_distribution<double>(k, n - k + 1.0), alpha / 2.0);
    }
    if (successes < samples) {
        hi = boost::math::quantile(boost::math::beta_distribution<double>(k + 1.0, n - k), 1.0 - alpha / 2.0);
    }
    return {lo, hi};
}

namespace {

// Property evaluator with the label tests tabulated per state.
class TraceEvaluator {
public:
    TraceEvaluator(const Property& prop, const std::vector<Labels>& labels) : prop_(prop)
    {
        auto mask = [&](const StateFormula& f) {
            std::vector<char> m(labels.size());
            for (std::size_t s = 0; s < labels.size(); ++s) {
                m[s] = f.eval(labels[s]) ? 1 : 0;
            }
            return m;
        };
        if (const auto* p = std::get_if<BoundedUntil>(&prop)) {
            a_ = mask(p->lhs);
            b_ = mask(p->rhs);
            bound_ = static_cast<std::size_t>(p->horizon);
        } else if (const auto* p = std::get_if<Until>(&prop)) {
            a_ = mask(p->lhs);
            b_ = mask(p->rhs);
        } else if (const auto* p = std::get_if<Safety>(&prop)) {
            a_ = mask(p->safe);
            if (p->horizon) {
                bound_ = static_cast<std::size_t>(*p->horizon);
            }
        } else {
            const Dfa& dfa = std::get<DfaSpec>(prop).dfa;
            dfa_size_ = dfa.size();
            initial_ = dfa.initial;
            accepting_ = dfa.accepting;
            states_ = labels.size();
            step_.resize(dfa.size() * states_);
            for (std::size_t q = 0; q < dfa.size(); ++q) {
                for (std::size_t s = 0; s < states_; ++s) {
                    step_[q * states_ + s] = dfa.step(q, labels[s]);
                }
            }
        }
    }

    bool operator()(const TraceSample& trace, bool& truncated) const
    {
        const auto& st = trace.states;
        if (st.empty()) {
            throw validation_error("empty trace");
        }
        // A stopped process stays in the sink, so the last entry of a
        // stopped trace repeats forever.
        const std::size_t last = st.size() - 1;
        const bool stopped = trace.stopped;
        const bool open_end = !stopped && (!bound_ || *bound_ > last);
        auto at = [&](std::size_t t) { return st[std::min(t, last)]; };

        if (std::holds_alternative<BoundedUntil>(prop_) || std::holds_alternative<Until>(prop_)) {
            const std::size_t end = bound_ ? *bound_ : last;
            for (std::size_t t = 0; t <= end; ++t) {
                const std::size_t s = at(t);
                if (b_[s] != 0) {
                    return true;
                }
                if (a_[s] == 0) {
                    return false;
                }
                if (t >= last) {
                    truncated = truncated || open_end;
                    return false;
                }
            }
            return false;
        }
        if (std::holds_alternative<Safety>(prop_)) {
            const std::size_t end = bound_ ? *bound_ : last;
            for (std::size_t t = 0; t <= end; ++t) {
                if (a_[at(t)] == 0) {
                    return false;
                }
                if (t >= last) {
                    truncated = truncated || open_end;
                    return true;
                }
            }
            return true;
        }
        std::size_t q = initial_;
        const std::size_t end = stopped ? last + dfa_size_ : last;
        for (std::size_t t = 0; t <= end; ++t) {
            q = step_[q * states_ + at(t)];
            if (accepting_[q]) {
                return true;
            }
        }
        truncated = truncated || !stopped;
        return false;
    }

private:
    const Property& prop_;
    std::vector<char> a_;
    std::vector<char> b_;
    std::optional<std::size_t> bound_;
    std::size_t dfa_size_ = 0;
    std::size_t initial_ = 0;
    std::size_t states_ = 0;
    std::vector<bool> accepting_;
    std::vector<std::size_t> step_;
};

Estimate finish(Estimate est, double confidence)
{
    est.point = static_cast<double>(est.successes) / static_cast<double>(est.samples);
    est.ci = clopper_pearson(est.successes, est.samples, confidence);
    if (est.truncated) {
        est.warning = "unbounded property evaluated on horizon-truncated traces";
    }
    return est;
}

void accumulate(Estimate& est, const std::vector<TraceSample>& samples, const TraceEvaluator& eval)
{
    est.samples += samples.size();
    for (const auto& tr : samples) {
        bool truncated = false;
        if (eval(tr, truncated)) {
            ++est.successes;
        }
        est.truncated = est.truncated || truncated;
    }
}

} // namespace

bool trace_satisfies(const TraceSample& trace, const Property& prop, const std::vector<Labels>& labels,
                     bool& truncated)
{
    return TraceEvaluator(prop, labels)(trace, truncated);
}

Estimate estimate_probability(const std::vector<TraceSample>& samples, const Property& prop,
                              const std::vector<Labels>& labels, double confidence)
{
    Estimate est;
    accumulate(est, samples, TraceEvaluator(prop, labels));
    return finish(std::move(est), confidence);
}

Estimate estimate_probability(const SystemSpec& spec, const Partition& partition, const std::vector<double>& x0,
                              int horizon, std::size_t count, const PerturbationPolicy& policy,
                              std::uint64_t seed, const Property& prop, double confidence)
{
    constexpr std::size_t chunk = std::size_t{1} << 16;
    const TraceEvaluator eval(prop, partition.all_labels());
    Estimate est;
    for (std::size_t first = 0; first < count; first += chunk) {
        const std::size_t m = std::min(chunk, count - first);
        accumulate(est, simulate_paths(spec, partition, x0, horizon, m, policy, seed, first), eval);
    }
    return finish(std::move(est), confidence);
}

Estimate estimate_with_doubling(const SystemSpec& spec, const Partition& partition, const std::vector<double>& x0,
                                int horizon, std::size_t count, const PerturbationPolicy& policy,
                                std::uint64_t seed, const Property& prop, double confidence, int max_horizon)
{
    int h = std::max(1, horizon);
    Estimate prev = estimate_probability(spec, partition, x0, h, count, policy, seed, prop, confidence);
    while (prev.truncated && h < max_horizon) {
        h *= 2;
        Estimate cur = estimate_probability(spec, partition, x0, h, count, policy, seed, prop, confidence);
        const double moved = std::fabs(cur.point - prev.point);
        prev = std::move(cur);
        if (moved < 1e-3) {
            break;
        }
    }
    if (prev.truncated) {
        prev.warning = "unbounded property truncated at horizon " + std::to_string(h);
    }
    return prev;
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::inconclusive: return "INCONCLUSIVE";
    case Verdict::fail: return "FAIL";
    }
    return {};
}

Verdict soundness_check(const Interval& mc_ci, const ProbInterval& imc_iv, double slack)
{
    const double lo = imc_iv.lo - slack;
    const double hi = imc_iv.hi + slack;
    if (mc_ci.lo() >= lo && mc_ci.hi() <= hi) {
        return Verdict::pass;
    }
    if (mc_ci.hi() < lo || mc_ci.lo() > hi) {
        return Verdict::fail;
    }
    return Verdict::inconclusive;
}

void write_traces(std::ostream& os, const std::vector<TraceSample>& traces)
{
    for (const auto& tr : traces) {
        for (std::size_t t = 0; t < tr.states.size(); ++t) {
            os << (t ? "," : "") << tr.states[t];
        }
        os << '\n';
    }
}

} // namespace imcv
