#include "imcv/io.hpp"

#include "imcv/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace imcv {

namespace {

struct Value {
    enum class Kind { number, string, boolean, array };
    Kind kind = Kind::number;
    double number = 0.0;
    std::string text;
    bool flag = false;
    std::vector<Value> items;
    int line = 1;
    int column = 1;
};

struct Entry {
    Value value;
    int line = 1;
    int column = 1;
};

using Section = std::map<std::string, Entry>;

class ConfigReader {
public:
    explicit ConfigReader(std::string_view text) : text_(text) {}

    std::map<std::string, Section> read()
    {
        std::map<std::string, Section> out;
        std::string section;
        for (;;) {
            skip_blank(true);
            if (eof()) {
                break;
            }
            if (peek() == '[') {
                const int l = line_;
                const int c = col_;
                advance();
                skip_blank(false);
                section = identifier();
                skip_blank(false);
                expect(']');
                if (out.contains(section)) {
                    throw parse_error("duplicate section [" + section + "]", l, c);
                }
                out[section];
                end_of_line();
                continue;
            }
            if (section.empty()) {
                fail("key outside of a section");
            }
            Entry e;
            e.line = line_;
            e.column = col_;
            const std::string key = identifier();
            skip_blank(false);
            expect('=');
            skip_blank(false);
            e.value = value();
            end_of_line();
            if (!out[section].emplace(key, std::move(e)).second) {
                throw parse_error("duplicate key '" + key + "'", e.line, e.column);
            }
        }
        return out;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw parse_error(what, line_, col_); }

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return eof() ? '\0' : text_[pos_]; }

    void advance()
    {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_blank(bool newlines)
    {
        while (!eof()) {
            const char ch = peek();
            if (ch == '#') {
                while (!eof() && peek() != '\n') {
                    advance();
                }
            } else if (ch == ' ' || ch == '\t' || ch == '\r' || (newlines && ch == '\n')) {
                advance();
            } else {
                break;
            }
        }
    }

    void end_of_line()
    {
        skip_blank(false);
        if (!eof() && peek() != '\n') {
            fail("unexpected '" + std::string(1, peek()) + "'");
        }
    }

    void expect(char ch)
    {
        if (peek() != ch) {
            fail(std::string("expected '") + ch + "'");
        }
        advance();
    }

    std::string identifier()
    {
        std::string id;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) != 0 || peek() == '_' || peek() == '-')) {
            id += peek();
            advance();
        }
        if (id.empty()) {
            fail("expected a name");
        }
        return id;
    }

    Value value()
    {
        Value v;
        v.line = line_;
        v.column = col_;
        const char ch = peek();
        if (ch == '[') {
            v.kind = Value::Kind::array;
            advance();
            skip_blank(true);
            while (peek() != ']') {
                v.items.push_back(value());
                skip_blank(true);
                if (peek() == ',') {
                    advance();
                    skip_blank(true);
                } else if (peek() != ']') {
                    fail("expected ',' or ']'");
                }
            }
            advance();
        } else if (ch == '"') {
            v.kind = Value::Kind::string;
            advance();
            while (peek() != '"') {
                if (eof() || peek() == '\n') {
                    fail("unterminated string");
                }
                if (peek() == '\\') {
                    advance();
                    if (eof()) {
                        fail("unterminated string");
                    }
                }
                v.text += peek();
                advance();
            }
            advance();
        } else if (text_.substr(pos_, 4) == "true" || text_.substr(pos_, 5) == "false") {
            v.kind = Value::Kind::boolean;
            v.flag = ch == 't';
            for (int i = v.flag ? 4 : 5; i > 0; --i) {
                advance();
            }
        } else {
            std::size_t end = pos_;
            while (end < text_.size() && std::string_view("+-.0123456789eE").find(text_[end]) != std::string_view::npos) {
                ++end;
            }
            const char* first = text_.data() + pos_;
            const char* last = text_.data() + end;
            auto [ptr, ec] = std::from_chars(first + (*first == '+' ? 1 : 0), last, v.number);
            if (end == pos_ || ec != std::errc() || ptr != last) {
                fail("expected a value");
            }
            while (pos_ < end) {
                advance();
            }
        }
        return v;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

[[noreturn]] void invalid(const Value& v, const std::string& what)
{
    throw validation_error(what + " (line " + std::to_string(v.line) + ", column " + std::to_string(v.column) + ")");
}

double as_number(const Value& v, const std::string& key)
{
    if (v.kind != Value::Kind::number) {
        invalid(v, "'" + key + "' must be a number");
    }
    return v.number;
}

std::size_t as_count(const Value& v, const std::string& key)
{
    const double x = as_number(v, key);
    if (x < 0.0 || x != std::floor(x) || x > 9.0e15) {
        invalid(v, "'" + key + "' must be a nonnegative integer");
    }
    return static_cast<std::size_t>(x);
}

const std::vector<Value>& as_array(const Value& v, const std::string& key)
{
    if (v.kind != Value::Kind::array) {
        invalid(v, "'" + key + "' must be an array");
    }
    return v.items;
}

Expr as_expr(const Value& v, std::size_t n, const std::string& key)
{
    std::string text;
    if (v.kind == Value::Kind::string) {
        text = v.text;
    } else if (v.kind == Value::Kind::number) {
        std::ostringstream os;
        os.precision(17);
        os << v.number;
        text = os.str();
    } else {
        invalid(v, "'" + key + "' entries must be expressions");
    }
    try {
        return parse_expr(text, n);
    } catch (const parse_error& e) {
        // Columns inside the string start after the opening quote.
        const int offset = v.kind == Value::Kind::string ? 1 : 0;
        throw parse_error(key + ": " + e.message(), v.line, v.column + offset + e.column() - 1);
    }
}

bool is_pair(const Value& v)
{
    return v.kind == Value::Kind::array && v.items.size() == 2 && v.items[0].kind == Value::Kind::number &&
           v.items[1].kind == Value::Kind::number;
}

Interval as_interval(const Value& v, const std::string& key)
{
    if (!is_pair(v) || !(v.items[0].number <= v.items[1].number)) {
        invalid(v, "'" + key + "' needs [lo, hi] pairs with lo <= hi");
    }
    return {v.items[0].number, v.items[1].number};
}

bool is_box(const Value& v, std::size_t n)
{
    if (n == 1 && is_pair(v)) {
        return true;
    }
    return v.kind == Value::Kind::array && v.items.size() == n &&
           std::all_of(v.items.begin(), v.items.end(), is_pair);
}

IntervalBox as_box(const Value& v, std::size_t n, const std::string& key)
{
    if (!is_box(v, n)) {
        invalid(v, "'" + key + "' must be a box of " + std::to_string(n) + " [lo, hi] pairs");
    }
    if (n == 1 && is_pair(v)) {
        return IntervalBox({as_interval(v, key)});
    }
    std::vector<Interval> axes;
    for (const auto& item : v.items) {
        axes.push_back(as_interval(item, key));
    }
    return IntervalBox(std::move(axes));
}

std::vector<IntervalBox> as_boxes(const Value& v, std::size_t n, const std::string& key)
{
    if (is_box(v, n)) {
        return {as_box(v, n, key)};
    }
    std::vector<IntervalBox> out;
    for (const auto& item : as_array(v, key)) {
        out.push_back(as_box(item, n, key));
    }
    return out;
}

const Entry& require(const Section& s, const std::string& section, const std::string& key)
{
    const auto it = s.find(key);
    if (it == s.end()) {
        throw validation_error("missing key '" + key + "' in [" + section + "]");
    }
    return it->second;
}

const Entry* optional_entry(const Section& s, const std::string& key)
{
    const auto it = s.find(key);
    return it == s.end() ? nullptr : &it->second;
}

void reject_unknown(const Section& s, const std::string& section, std::initializer_list<std::string_view> known)
{
    for (const auto& [key, entry] : s) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            invalid(entry.value, "unknown key '" + key + "' in [" + section + "]");
        }
    }
}

std::vector<std::vector<Expr>> parse_diffusion(const Value& v, std::size_t n, std::optional<std::size_t> k)
{
    std::vector<std::vector<Expr>> b;
    if (v.kind != Value::Kind::array) {
        b.push_back({as_expr(v, n, "b")});
    } else if (!v.items.empty() && v.items[0].kind == Value::Kind::array) {
        for (const auto& row : v.items) {
            std::vector<Expr> r;
            for (const auto& e : as_array(row, "b")) {
                r.push_back(as_expr(e, n, "b"));
            }
            b.push_back(std::move(r));
        }
    } else if (n == 1) {
        std::vector<Expr> r;
        for (const auto& e : v.items) {
            r.push_back(as_expr(e, n, "b"));
        }
        b.push_back(std::move(r));
    } else {
        for (const auto& e : v.items) {
            b.push_back({as_expr(e, n, "b")});
        }
    }
    if (b.size() != n) {
        invalid(v, "'b' must have " + std::to_string(n) + " rows");
    }
    for (const auto& row : b) {
        if (row.size() != b[0].size() || row.empty() || (k && row.size() != *k)) {
            invalid(v, "'b' rows must all have noise_dim entries");
        }
    }
    return b;
}

} // namespace

Config parse_config_text(std::string_view text)
{
    auto sections = ConfigReader(text).read();
    for (const auto& [name, section] : sections) {
        if (name != "system" && name != "labels" && name != "verify") {
            throw validation_error("unknown section [" + name + "]");
        }
    }
    if (!sections.contains("system")) {
        throw validation_error("missing section [system]");
    }
    const Section& sys = sections["system"];
    reject_unknown(sys, "system", {"n", "noise_dim", "k", "f", "b", "theta", "W"});

    Config cfg;
    SystemSpec& spec = cfg.spec;
    const Entry& n_entry = require(sys, "system", "n");
    spec.n = as_count(n_entry.value, "n");
    if (spec.n == 0) {
        invalid(n_entry.value, "'n' must be positive");
    }
    std::optional<std::size_t> k;
    for (const char* key : {"noise_dim", "k"}) {
        if (const Entry* e = optional_entry(sys, key)) {
            k = as_count(e->value, key);
        }
    }

    const Entry& f_entry = require(sys, "system", "f");
    if (f_entry.value.kind == Value::Kind::array) {
        for (const auto& e : f_entry.value.items) {
            spec.f.push_back(as_expr(e, spec.n, "f"));
        }
    } else {
        spec.f.push_back(as_expr(f_entry.value, spec.n, "f"));
    }
    if (spec.f.size() != spec.n) {
        invalid(f_entry.value, "'f' must have n = " + std::to_string(spec.n) + " components");
    }
    spec.b = parse_diffusion(require(sys, "system", "b").value, spec.n, k);
    spec.k = spec.b[0].size();
    if (const Entry* e = optional_entry(sys, "theta")) {
        spec.theta = as_number(e->value, "theta");
    }
    spec.working_box = as_box(require(sys, "system", "W").value, spec.n, "W");

    std::map<std::string, std::vector<IntervalBox>> props;
    spec.props = {in_prop};
    if (sections.contains("labels")) {
        for (const auto& [name, entry] : sections["labels"]) {
            if (name == in_prop) {
                invalid(entry.value, "\"in\" is implicit and cannot be relabelled");
            }
            props[name] = as_boxes(entry.value, spec.n, name);
            spec.props.insert(name);
        }
    }
    spec.regions = regions_from_props(spec.working_box, props);
    spec.validate();

    if (sections.contains("verify")) {
        const Section& v = sections["verify"];
        reject_unknown(v, "verify",
                       {"eta", "kappa", "property", "x0", "paths", "seed", "horizon", "confidence", "theta1", "theta2"});
        VerifySettings& s = cfg.verify;
        auto num = [&](const char* key, std::optional<double>& out) {
            if (const Entry* e = optional_entry(v, key)) {
                out = as_number(e->value, key);
            }
        };
        num("eta", s.eta);
        num("kappa", s.kappa);
        num("confidence", s.confidence);
        num("theta1", s.theta1);
        num("theta2", s.theta2);
        if (const Entry* e = optional_entry(v, "property")) {
            if (e->value.kind != Value::Kind::string) {
                invalid(e->value, "'property' must be a string");
            }
            s.property = e->value.text;
        }
        if (const Entry* e = optional_entry(v, "x0")) {
            std::vector<double> x;
            if (e->value.kind == Value::Kind::number) {
                x.push_back(e->value.number);
            } else {
                for (const auto& item : as_array(e->value, "x0")) {
                    x.push_back(as_number(item, "x0"));
                }
            }
            s.x0 = std::move(x);
        }
        if (const Entry* e = optional_entry(v, "paths")) {
            s.paths = as_count(e->value, "paths");
        }
        if (const Entry* e = optional_entry(v, "seed")) {
            s.seed = as_count(e->value, "seed");
        }
        if (const Entry* e = optional_entry(v, "horizon")) {
            s.horizon = static_cast<int>(as_count(e->value, "horizon"));
        }
    }
    return cfg;
}

namespace {

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw validation_error("cannot open " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

nlohmann::json parse_json_file(const std::filesystem::path& path)
{
    const std::string text = read_file(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // nlohmann reports a byte offset; turn it into line and column.
        const std::size_t at = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
        int line = 1;
        int col = 1;
        for (std::size_t i = 0; i < at; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw parse_error(path.string() + ": malformed JSON", line, col);
    }
}

} // namespace

Config load_config(const std::filesystem::path& path)
{
    return parse_config_text(read_file(path));
}

SystemSpec parse_config(const std::filesystem::path& path)
{
    return load_config(path).spec;
}

nlohmann::json imc_to_json(const Imc& imc)
{
    const std::size_t n = imc.size();
    nlohmann::json doc;
    doc["n_states"] = n;
    doc["has_sink"] = imc.has_sink();
    doc["labels"] = nlohmann::json::array();
    for (const auto& l : imc.all_labels()) {
        doc["labels"].push_back(std::vector<std::string>(l.begin(), l.end()));
    }
    auto rows = [&](const std::vector<double>& m) {
        nlohmann::json out = nlohmann::json::array();
        for (std::size_t i = 0; i < n; ++i) {
            out.push_back(std::vector<double>(m.begin() + static_cast<std::ptrdiff_t>(i * n),
                                              m.begin() + static_cast<std::ptrdiff_t>((i + 1) * n)));
        }
        return out;
    };
    doc["lower"] = rows(imc.lower_matrix());
    doc["upper"] = rows(imc.upper_matrix());
    doc["centers"] = imc.centers();
    return doc;
}

Imc imc_from_json(const nlohmann::json& doc)
{
    try {
        const auto n = doc.at("n_states").get<std::size_t>();
        const bool has_sink = doc.value("has_sink", true);
        std::vector<Labels> labels;
        for (const auto& l : doc.at("labels")) {
            const auto names = l.get<std::vector<std::string>>();
            labels.emplace_back(names.begin(), names.end());
        }
        auto matrix = [&](const char* key) {
            std::vector<double> m;
            const auto& rows = doc.at(key);
            if (rows.size() != n) {
                throw validation_error(std::string("'") + key + "' must have n_states rows");
            }
            for (const auto& row : rows) {
                const auto r = row.get<std::vector<double>>();
                if (r.size() != n) {
                    throw validation_error(std::string("'") + key + "' rows must have n_states entries");
                }
                m.insert(m.end(), r.begin(), r.end());
            }
            return m;
        };
        if (labels.size() != n) {
            throw validation_error("'labels' must have n_states entries");
        }
        Imc imc(n, matrix("lower"), matrix("upper"), std::move(labels), has_sink);
        if (doc.contains("centers")) {
            imc.set_centers(doc.at("centers").get<std::vector<std::vector<double>>>());
        }
        return imc;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("malformed IMC document: ") + e.what());
    }
}

void save_imc(const Imc& imc, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw validation_error("cannot write " + path.string());
    }
    out << imc_to_json(imc).dump(1) << '\n';
}

Imc load_imc(const std::filesystem::path& path)
{
    return imc_from_json(parse_json_file(path));
}

Dfa dfa_from_json(const nlohmann::json& doc)
{
    Dfa dfa;
    try {
        dfa.initial = doc.at("initial").get<std::size_t>();
        dfa.accepting = doc.at("accepting").get<std::vector<bool>>();
        for (const auto& state : doc.at("edges")) {
            std::vector<Dfa::Edge> edges;
            for (const auto& e : state) {
                edges.push_back({StateFormula::parse(e.at("guard").get<std::string>()), e.at("target").get<std::size_t>()});
            }
            dfa.edges.push_back(std::move(edges));
        }
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("malformed DFA document: ") + e.what());
    }
    dfa.validate();
    return dfa;
}

Dfa load_dfa(const std::filesystem::path& path)
{
    return dfa_from_json(parse_json_file(path));
}

bool is_dyadic(double x, int max_exponent)
{
    if (!std::isfinite(x)) {
        return false;
    }
    const double scaled = std::ldexp(x, max_exponent);
    return std::fabs(scaled) < 9.0e15 && scaled == std::floor(scaled);
}

std::string format_fraction(double x)
{
    if (!is_dyadic(x, 52)) {
        std::ostringstream os;
        os.precision(17);
        os << x;
        return os.str();
    }
    int exp = 0;
    auto num = static_cast<long long>(x);
    long long den = 1;
    double frac = x;
    while (frac != std::floor(frac)) {
        frac *= 2.0;
        ++exp;
    }
    num = static_cast<long long>(frac);
    den = 1LL << exp;
    const long long g = std::gcd(num < 0 ? -num : num, den);
    num /= g;
    den /= g;
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

void write_results_csv(std::ostream& os, const ProbIntervals& iv, const std::optional<WinningRegion>& region)
{
    std::vector<std::string> verdict(iv.size());
    if (region) {
        for (auto s : region->guaranteed) {
            verdict[s] = "guaranteed";
        }
        for (auto s : region->impossible) {
            verdict[s] = "impossible";
        }
        for (auto s : region->undecided) {
            verdict[s] = "undecided";
        }
    }
    const auto old = os.precision(17);
    os << "state,lo,hi,verdict\n";
    for (std::size_t s = 0; s < iv.size(); ++s) {
        os << s << ',' << iv[s].lo << ',' << iv[s].hi << ',' << verdict[s] << '\n';
    }
    os.precision(old);
}

nlohmann::json to_json(const Estimate& e)
{
    nlohmann::json j;
    j["point"] = e.point;
    j["ci"] = {e.ci.lo(), e.ci.hi()};
    j["successes"] = e.successes;
    j["samples"] = e.samples;
    j["truncated"] = e.truncated;
    if (!e.warning.empty()) {
        j["warning"] = e.warning;
    }
    return j;
}

nlohmann::json to_json(const SandwichReport& r)
{
    nlohmann::json j;
    const auto& m = r.margin;
    j["theta1"] = r.theta1;
    j["theta2"] = r.theta2;
    j["completeness"] = {{"eta", m.eta}, {"cells", m.cells}, {"ws", m.ws},   {"tv", m.tv},
                         {"kappa", m.kappa}, {"lhs", m.lhs}, {"rhs", m.rhs}, {"satisfied", m.satisfied}};
    j["claim1_radius"] = r.claim1_radius;
    j["recovery_radius"] = r.recovery;
    j["row_gap"] = r.imc_row_gap;
    j["cells"] = nlohmann::json::array();
    for (std::size_t c = 0; c < r.radii.size(); ++c) {
        const auto& cr = r.radii[c];
        j["cells"].push_back({{"state", c},
                              {"references", cr.references},
                              {"nearest_reference_w1", cr.nearest},
                              {"within_claim1_radius", cr.within_claim1}});
    }
    if (r.intervals) {
        const auto& iv = *r.intervals;
        nlohmann::json s;
        s["state"] = iv.state;
        s["theta1_monte_carlo"] = to_json(iv.lower_system);
        s["imc"] = {iv.imc.lo, iv.imc.hi};
        s["theta2_policies"] = nlohmann::json::array();
        for (const auto& p : iv.upper_system) {
            nlohmann::json pj = to_json(p.estimate);
            pj["policy"] = p.policy;
            s["theta2_policies"].push_back(std::move(pj));
        }
        s["theta2_envelope"] = {iv.envelope.lo(), iv.envelope.hi()};
        s["theta1_inside_imc"] = to_string(iv.lower_in_imc);
        s["imc_inside_envelope"] = iv.imc_in_envelope;
        j["sandwich"] = std::move(s);
    }
    j["diagnostics"] = r.diagnostics;
    return j;
}

} // namespace imcv
