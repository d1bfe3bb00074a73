#pragma once

#include "imcv/system.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace imcv {

/// Boolean combination of atomic propositions, evaluated on a label set.
///
/// Syntax: `true`, `false`, proposition names, `!`, `&`, `|` and parentheses
/// (`!` binds tightest, then `&`, then `|`).
class StateFormula {
public:
    StateFormula() : StateFormula(truth(true)) {}

    static StateFormula truth(bool value);
    static StateFormula atom(std::string name);
    static StateFormula negation(StateFormula f);
    static StateFormula conjunction(StateFormula a, StateFormula b);
    static StateFormula disjunction(StateFormula a, StateFormula b);

    static StateFormula parse(std::string_view text);

    [[nodiscard]] bool eval(const Labels& labels) const;
    [[nodiscard]] Labels atoms() const;
    [[nodiscard]] std::string to_string() const;

private:
    struct Node;
    explicit StateFormula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

/// Deterministic finite automaton reading one label set per time step.
///
/// Transitions out of a state are guarded by state formulas and tried in
/// order; the first guard that holds fires. A run is accepted as soon as it
/// enters an accepting state.
struct Dfa {
    struct Edge {
        StateFormula guard;
        std::size_t target = 0;
    };

    std::size_t initial = 0;
    std::vector<bool> accepting;
    std::vector<std::vector<Edge>> edges;

    [[nodiscard]] std::size_t size() const { return accepting.size(); }

    /// Successor of `state` on `labels`; throws alphabet_mismatch when no guard holds.
    [[nodiscard]] std::size_t step(std::size_t state, const Labels& labels) const;

    /// Throws validation_error on out-of-range indices.
    void validate() const;
};

struct BoundedUntil {
    StateFormula lhs;
    StateFormula rhs;
    int horizon = 0;
};

struct Until {
    StateFormula lhs;
    StateFormula rhs;
};

struct Safety {
    StateFormula safe;
    std::optional<int> horizon; // unbounded when empty
};

struct DfaSpec {
    Dfa dfa;
    std::string source;
};

using Property = std::variant<BoundedUntil, Until, Safety, DfaSpec>;

using DfaLoader = std::function<Dfa(const std::string& path)>;

/// Parse `P[ A U<=T B ]`, `P[ A U B ]`, `P[ G<=T A ]`, `P[ G A ]` or
/// `P[ DFA file ]`. The loader resolves DFA file names.
Property parse_property(std::string_view text, const DfaLoader& load_dfa = {});

std::string describe(const Property& property);

} // namespace imcv
