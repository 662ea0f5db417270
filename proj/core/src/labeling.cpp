#include "csm/labeling.hpp"

#include "csm/errors.hpp"

#include <algorithm>

namespace csm {

LabelContext::LabelContext(const PropSet& props, std::shared_ptr<const SystemInfo> info)
    : info_(std::move(info)), atoms_(props.atoms) {
    resolved_.reserve(atoms_.size());
    for (const AtomicProp& p : atoms_) {
        Resolved r;
        r.kind = p.kind;
        switch (p.kind) {
        case AtomicProp::Kind::Signal: {
            auto id = info_->signals.find(p.signal);
            if (!id)
                throw ResolveError("unknown signal '" + p.signal + "'");
            r.signal = *id;
            break;
        }
        case AtomicProp::Kind::InState:
            r.tuple = resolve_designator(p.state, *info_);
            break;
        case AtomicProp::Kind::InSet:
            for (const Designator& d : p.members)
                r.tuples.push_back(resolve_designator(d, *info_));
            std::sort(r.tuples.begin(), r.tuples.end());
            break;
        case AtomicProp::Kind::InProj: {
            auto ai = info_->automaton_index(p.automaton);
            if (!ai)
                throw ResolveError("unknown automaton '" + p.automaton + "'");
            auto si = info_->state_index(*ai, p.component);
            if (!si)
                throw ResolveError("unknown state '" + p.component + "' of automaton '" +
                                   p.automaton + "'");
            r.automaton = *ai;
            r.component = *si;
            break;
        }
        }
        resolved_.push_back(std::move(r));
    }
}

LabelBits LabelContext::label_of(const StateTuple& t, const SignalSet& outputs) const {
    LabelBits bits(resolved_.size());
    for (std::size_t i = 0; i < resolved_.size(); ++i) {
        const Resolved& r = resolved_[i];
        bool value = false;
        switch (r.kind) {
        case AtomicProp::Kind::Signal:
            value = outputs.test(r.signal);
            break;
        case AtomicProp::Kind::InState:
            value = t == r.tuple;
            break;
        case AtomicProp::Kind::InSet:
            value = std::binary_search(r.tuples.begin(), r.tuples.end(), t);
            break;
        case AtomicProp::Kind::InProj:
            value = t[r.automaton] == r.component;
            break;
        }
        bits.set(i, value);
    }
    return bits;
}

Labeling label(const Graph& g, const PropSet& props) {
    LabelContext ctx(props, g.info);
    Labeling out;
    out.atoms = props.atoms;
    out.bits.reserve(g.states.size());
    for (const GlobalState& s : g.states)
        out.bits.push_back(ctx.label_of(s.components, s.outputs));
    return out;
}

} // namespace csm
