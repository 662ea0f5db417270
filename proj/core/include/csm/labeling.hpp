#pragma once

#include "csm/graph.hpp"
#include "csm/temporal.hpp"

namespace csm {

/// Truth bits for a canonically ordered atom list.
using LabelBits = boost::dynamic_bitset<>;

/// Atom set resolved against a system. Every atom kind is local: it only
/// needs a state's tuple and output set, so states can be labeled as they
/// are discovered. Throws ResolveError for unknown names.
class LabelContext {
public:
    LabelContext() = default;
    LabelContext(const PropSet& props, std::shared_ptr<const SystemInfo> info);

    std::size_t atom_count() const { return atoms_.size(); }
    const std::vector<AtomicProp>& atoms() const { return atoms_; }
    const SystemInfo& info() const { return *info_; }

    LabelBits label_of(const StateTuple& t, const SignalSet& outputs) const;

private:
    struct Resolved {
        AtomicProp::Kind kind = AtomicProp::Kind::Signal;
        SignalId signal = 0;            // Signal
        StateTuple tuple;               // InState
        std::vector<StateTuple> tuples; // InSet, sorted
        std::uint32_t automaton = 0;    // InProj
        std::uint32_t component = 0;    // InProj
    };

    std::shared_ptr<const SystemInfo> info_;
    std::vector<AtomicProp> atoms_;
    std::vector<Resolved> resolved_;
};

/// Per-state labels over a prop set's atoms.
struct Labeling {
    std::vector<AtomicProp> atoms;
    std::vector<LabelBits> bits; // indexed by state id

    bool state_has(std::uint32_t state, std::size_t atom) const {
        return bits[state].test(atom);
    }
};

/// Labels every state of the graph with the props' atoms.
Labeling label(const Graph& g, const PropSet& props);

} // namespace csm
