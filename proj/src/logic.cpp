#include "imcv/logic.hpp"

#include "imcv/errors.hpp"

#include <cctype>
#include <regex>

namespace imcv {

struct StateFormula::Node {
    enum class Kind { truth, atom, negation, conjunction, disjunction } kind;
    bool value = false;
    std::string name;
    std::vector<StateFormula> args;
};

StateFormula StateFormula::truth(bool value)
{
    return StateFormula(std::make_shared<const Node>(Node{Node::Kind::truth, value, {}, {}}));
}

StateFormula StateFormula::atom(std::string name)
{
    return StateFormula(std::make_shared<const Node>(Node{Node::Kind::atom, false, std::move(name), {}}));
}

StateFormula StateFormula::negation(StateFormula f)
{
    return StateFormula(std::make_shared<const Node>(Node{Node::Kind::negation, false, {}, {std::move(f)}}));
}

StateFormula StateFormula::conjunction(StateFormula a, StateFormula b)
{
    return StateFormula(
        std::make_shared<const Node>(Node{Node::Kind::conjunction, false, {}, {std::move(a), std::move(b)}}));
}

StateFormula StateFormula::disjunction(StateFormula a, StateFormula b)
{
    return StateFormula(
        std::make_shared<const Node>(Node{Node::Kind::disjunction, false, {}, {std::move(a), std::move(b)}}));
}

bool StateFormula::eval(const Labels& labels) const
{
    const auto& a = node_->args;
    switch (node_->kind) {
    case Node::Kind::truth: return node_->value;
    case Node::Kind::atom: return labels.contains(node_->name);
    case Node::Kind::negation: return !a[0].eval(labels);
    case Node::Kind::conjunction: return a[0].eval(labels) && a[1].eval(labels);
    case Node::Kind::disjunction: return a[0].eval(labels) || a[1].eval(labels);
    }
    return false;
}

Labels StateFormula::atoms() const
{
    Labels out;
    if (node_->kind == Node::Kind::atom) {
        out.insert(node_->name);
    }
    for (const auto& a : node_->args) {
        out.merge(a.atoms());
    }
    return out;
}

std::string StateFormula::to_string() const
{
    const auto& a = node_->args;
    switch (node_->kind) {
    case Node::Kind::truth: return node_->value ? "true" : "false";
    case Node::Kind::atom: return node_->name;
    case Node::Kind::negation: return "!" + a[0].to_string();
    case Node::Kind::conjunction: return "(" + a[0].to_string() + " & " + a[1].to_string() + ")";
    case Node::Kind::disjunction: return "(" + a[0].to_string() + " | " + a[1].to_string() + ")";
    }
    return {};
}

namespace {

class FormulaParser {
public:
    explicit FormulaParser(std::string_view text) : text_(text) {}

    StateFormula parse()
    {
        StateFormula f = parse_or();
        skip_ws();
        if (pos_ != text_.size()) {
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        return f;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const
    {
        throw parse_error("state formula: " + what, 1, static_cast<int>(pos_) + 1);
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    StateFormula parse_or()
    {
        StateFormula f = parse_and();
        while (accept('|')) {
            f = StateFormula::disjunction(std::move(f), parse_and());
        }
        return f;
    }

    StateFormula parse_and()
    {
        StateFormula f = parse_not();
        while (accept('&')) {
            f = StateFormula::conjunction(std::move(f), parse_not());
        }
        return f;
    }

    StateFormula parse_not()
    {
        if (accept('!')) {
            return StateFormula::negation(parse_not());
        }
        if (accept('(')) {
            StateFormula f = parse_or();
            if (!accept(')')) {
                fail("expected ')'");
            }
            return f;
        }
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        if (start == pos_) {
            fail(pos_ < text_.size() ? "unexpected '" + std::string(1, text_[pos_]) + "'" : "unexpected end");
        }
        const std::string word(text_.substr(start, pos_ - start));
        if (word == "true" || word == "false") {
            return StateFormula::truth(word == "true");
        }
        return StateFormula::atom(word);
    }
};

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

} // namespace

StateFormula StateFormula::parse(std::string_view text) { return FormulaParser(text).parse(); }

std::size_t Dfa::step(std::size_t state, const Labels& labels) const
{
    for (const auto& e : edges.at(state)) {
        if (e.guard.eval(labels)) {
            return e.target;
        }
    }
    std::string l;
    for (const auto& p : labels) {
        l += (l.empty() ? "" : ",") + p;
    }
    throw alphabet_mismatch("DFA state " + std::to_string(state) + " has no transition for label {" + l + "}");
}

void Dfa::validate() const
{
    if (accepting.empty()) {
        throw validation_error("DFA needs at least one state");
    }
    if (edges.size() != accepting.size()) {
        throw validation_error("DFA edge table does not match its state count");
    }
    if (initial >= size()) {
        throw validation_error("DFA initial state out of range");
    }
    for (const auto& out : edges) {
        for (const auto& e : out) {
            if (e.target >= size()) {
                throw validation_error("DFA transition target out of range");
            }
        }
    }
}

Property parse_property(std::string_view text, const DfaLoader& load_dfa)
{
    static const std::regex wrapper(R"(^\s*P\s*\[(.*)\]\s*$)");
    static const std::regex bounded_until(R"(^(.*)\bU\s*<=\s*(\d+)\s+(.*)$)");
    static const std::regex until(R"(^(.*)\bU\b(.*)$)");
    static const std::regex globally(R"(^\s*G\s*(<=\s*(\d+))?\s+(.*)$)");
    static const std::regex dfa(R"(^\s*DFA\s+(\S+)\s*$)");

    const std::string s(text);
    std::smatch m;
    if (!std::regex_match(s, m, wrapper)) {
        throw parse_error("property must have the form P[ ... ]", 1, 1);
    }
    const std::string body = m[1].str();
    std::smatch b;
    if (std::regex_match(body, b, dfa)) {
        if (!load_dfa) {
            throw validation_error("no DFA loader available for " + b[1].str());
        }
        return DfaSpec{load_dfa(b[1].str()), b[1].str()};
    }
    if (std::regex_match(body, b, globally)) {
        Safety p{StateFormula::parse(trim(b[3].str())), std::nullopt};
        if (b[2].matched) {
            p.horizon = std::stoi(b[2].str());
        }
        return p;
    }
    if (std::regex_match(body, b, bounded_until)) {
        return BoundedUntil{StateFormula::parse(trim(b[1].str())), StateFormula::parse(trim(b[3].str())),
                            std::stoi(b[2].str())};
    }
    if (std::regex_match(body, b, until)) {
        return Until{StateFormula::parse(trim(b[1].str())), StateFormula::parse(trim(b[2].str()))};
    }
    throw parse_error("unrecognised property body '" + trim(body) + "'", 1, 3);
}

std::string describe(const Property& property)
{
    struct Visitor {
        std::string operator()(const BoundedUntil& p) const
        {
            return "P[ " + p.lhs.to_string() + " U<=" + std::to_string(p.horizon) + " " + p.rhs.to_string() + " ]";
        }
        std::string operator()(const Until& p) const
        {
            return "P[ " + p.lhs.to_string() + " U " + p.rhs.to_string() + " ]";
        }
        std::string operator()(const Safety& p) const
        {
            return "P[ G" + (p.horizon ? "<=" + std::to_string(*p.horizon) : std::string()) + " " +
                   p.safe.to_string() + " ]";
        }
        std::string operator()(const DfaSpec& p) const { return "P[ DFA " + p.source + " ]"; }
    };
    return std::visit(Visitor{}, property);
}

} // namespace imcv
