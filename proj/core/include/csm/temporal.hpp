#pragma once

#include "csm/graph.hpp"

#include <compare>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace csm {

/// Name-based global-state designator, written `<A.one,B.three>`. Parts are
/// kept sorted by automaton name; resolution against a concrete graph
/// happens late so designators survive graph transformations.
struct Designator {
    std::vector<std::pair<std::string, std::string>> parts; // (automaton, state)

    void normalize();
    bool operator==(const Designator&) const = default;
    auto operator<=>(const Designator&) const = default;
    std::string to_string() const;
};

/// Maps the designator onto a component tuple in system order. Throws
/// ResolveError for unknown names, duplicates, or missing automata.
StateTuple resolve_designator(const Designator& d, const SystemInfo& info);

/// Designator for an existing graph state.
Designator designator_of(const SystemInfo& info, const StateTuple& t);

struct AtomicProp {
    enum class Kind : std::uint8_t { Signal, InState, InSet, InProj };

    Kind kind = Kind::Signal;
    std::string signal;               // Signal
    Designator state;                 // InState
    std::vector<Designator> members;  // InSet, sorted
    std::string automaton, component; // InProj

    static AtomicProp make_signal(std::string name);
    static AtomicProp make_in_state(Designator d);
    static AtomicProp make_in_set(std::vector<Designator> ds);
    static AtomicProp make_in_proj(std::string automaton, std::string component);

    bool operator==(const AtomicProp&) const = default;
    auto operator<=>(const AtomicProp&) const = default;
    std::string to_string() const;
};

/// A state position in a formula: either a concrete designator or a
/// variable bound by an enclosing quantifier.
struct StateRef {
    std::string var; // nonempty means variable reference
    Designator des;

    bool is_var() const { return !var.empty(); }
    bool operator==(const StateRef&) const = default;
    std::string to_string() const;
};

struct QuantRange {
    enum class Kind : std::uint8_t { Explicit, All, Proj, Future };

    Kind kind = Kind::Explicit;
    std::vector<Designator> members;  // Explicit
    std::string automaton, component; // Proj
    Designator future_of;             // Future

    /// Future ranges depend on the run and cannot be enumerated up front.
    bool is_static() const { return kind != Kind::Future; }
    bool operator==(const QuantRange&) const = default;
    std::string to_string() const;
};

enum class TOp : std::uint8_t {
    Atom,
    ConstTrue,
    ConstFalse,
    InVar, // `in v` with a quantified variable
    Not,
    And,
    Or,
    Implies,
    AG,
    AF,
    AX,
    AW,
    AXa,
    Quant,
    At,
};

/// Immutable temporal formula. Only universal path modalities exist:
/// AG, AF, AX, weak until A[· W ·] and next-in-automaton AX@a.
class TemporalFormula {
public:
    TemporalFormula() = default;

    static TemporalFormula atom(AtomicProp p);
    static TemporalFormula constant(bool value);
    static TemporalFormula in_var(std::string var);
    static TemporalFormula negation(TemporalFormula f);
    static TemporalFormula conjunction(TemporalFormula a, TemporalFormula b);
    static TemporalFormula disjunction(TemporalFormula a, TemporalFormula b);
    static TemporalFormula implication(TemporalFormula a, TemporalFormula b);
    static TemporalFormula always(TemporalFormula f);
    static TemporalFormula eventually(TemporalFormula f);
    static TemporalFormula next(TemporalFormula f);
    static TemporalFormula weak_until(TemporalFormula a, TemporalFormula b);
    static TemporalFormula next_in(std::string automaton, TemporalFormula f);
    static TemporalFormula quantified(bool forall, std::string var, QuantRange range,
                                      TemporalFormula body);
    static TemporalFormula at(StateRef ref, TemporalFormula f);

    bool empty() const noexcept { return node_ == nullptr; }
    TOp op() const;
    const AtomicProp& prop() const;     // Atom
    const std::string& var() const;     // InVar, Quant
    const std::string& automaton() const; // AXa
    bool is_forall() const;             // Quant
    const QuantRange& range() const;    // Quant
    const StateRef& at_ref() const;     // At
    TemporalFormula lhs() const;        // first child
    TemporalFormula rhs() const;        // second child (And/Or/Implies/AW)

    bool operator==(const TemporalFormula& other) const;
    std::string to_string() const;

private:
    struct Node;
    explicit TemporalFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

/// Parses the temporal surface syntax:
///   `AG f`, `AF f`, `AX f`, `AX@<aut> f`, `A[ f W g ]`, `@<state> f`,
///   `in <A.s,B.r>`, `in <aut>.<state>`, `in { <...>, ... }`,
///   `forall|exists <v> in <range>: f` with ranges `{...}`, `all`,
///   `proj <aut>.<state>`, `FUT(<state>)`; boolean `! & | ->` and
///   constants `1`, `0`.
/// Quantifier variables bind lexically; free variables are rejected.
TemporalFormula parse_temporal(std::string_view text);

/// Syntactic atoms of a closed formula. Variable `in`/`@` occurrences are
/// expanded against explicit quantifier ranges; graph-dependent ranges are
/// expanded by complete_props instead.
std::vector<AtomicProp> collect_atoms(const TemporalFormula& f);

/// Atomic propositions plus the reduction permissions derived from them.
struct PropSet {
    std::vector<AtomicProp> atoms;             // sorted, unique
    bool reduction_allowed = true;
    std::vector<Designator> protected_states;  // sorted, unique

    bool has_atom(const AtomicProp& p) const;
};

/// Completes the atom set so reduction preserves every formula over it:
/// states referenced by a next-step operator gain `in s` atoms, component
/// projections referenced by next-in-automaton gain `in s/a` atoms (or the
/// whole automaton's projections when the reference is not static), nested
/// or non-static next-step references disable reduction, and quantifier
/// ranges that cannot be enumerated up front disable it too. At-targets and
/// static range members become protected states.
PropSet complete_props(const TemporalFormula& f, const Graph& g);

/// Graph-free completion for the on-line pipeline, anchored at the given
/// initial tuple. Quantifier ranges that enumerate graph states (`all`,
/// `proj`) throw ResolveError here; they need the built graph.
PropSet complete_props_online(const TemporalFormula& f, const SystemInfo& info,
                              const StateTuple& initial);

/// Replaces every reference to variable `var` with the designator. Inner
/// quantifiers that rebind the same name shadow it.
TemporalFormula substitute(const TemporalFormula& f, const std::string& var,
                           const Designator& d);

} // namespace csm
