#include "csm/bisim.hpp"

#include "csm/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <stdexcept>

namespace csm {

namespace {

// Disjoint-union view used by the refinement.
struct Union {
    const Graph& g1;
    const Graph& g2;
    std::uint32_t n1, n;
    std::vector<std::vector<std::uint32_t>> succ, pred;

    Union(const Graph& a, const Graph& b)
        : g1(a), g2(b), n1(static_cast<std::uint32_t>(a.states.size())),
          n(static_cast<std::uint32_t>(a.states.size() + b.states.size())) {
        succ.resize(n);
        pred.resize(n);
        for (std::uint32_t s = 0; s < n1; ++s)
            succ[s] = g1.succ[s];
        for (std::uint32_t s = n1; s < n; ++s)
            for (std::uint32_t d : g2.succ[s - n1])
                succ[s].push_back(d + n1);
        for (std::uint32_t s = 0; s < n; ++s)
            for (std::uint32_t d : succ[s])
                pred[d].push_back(s);
    }
};

// Stutter-block view of one state: whether an infinite path can stay
// inside its label region, and the first states where the label changes.
// Two states match exactly when these agree recursively, which is strong
// bisimilarity of the derived block graph.
struct BlockView {
    std::vector<char> stay;                             // per combined id
    std::vector<std::vector<std::uint32_t>> entries;    // first-change states

    BlockView(const Union& u, const std::vector<LabelBits>& labels) {
        stay.assign(u.n, 0);
        entries.resize(u.n);
        for (std::uint32_t s = 0; s < u.n; ++s) {
            // Region of s: states with s's label reachable from s inside it.
            std::vector<char> in_region(u.n, 0);
            std::vector<std::uint32_t> region{s};
            in_region[s] = 1;
            std::set<std::uint32_t> out;
            for (std::size_t i = 0; i < region.size(); ++i) {
                std::uint32_t w = region[i];
                for (std::uint32_t d : u.succ[w]) {
                    if (labels[d] == labels[s]) {
                        if (!in_region[d]) {
                            in_region[d] = 1;
                            region.push_back(d);
                        }
                    } else {
                        out.insert(d);
                    }
                }
            }
            entries[s].assign(out.begin(), out.end());
            // An infinite same-label path exists iff stripping region states
            // without region successors leaves something.
            std::vector<char> alive = in_region;
            bool shrunk = true;
            while (shrunk) {
                shrunk = false;
                for (std::uint32_t w : region) {
                    if (!alive[w])
                        continue;
                    bool has = false;
                    for (std::uint32_t d : u.succ[w])
                        if (in_region[d] && alive[d]) {
                            has = true;
                            break;
                        }
                    if (!has) {
                        alive[w] = 0;
                        shrunk = true;
                    }
                }
            }
            for (std::uint32_t w : region)
                if (alive[w]) {
                    stay[s] = 1;
                    break;
                }
        }
    }
};

} // namespace

Partition stuttering_classes(const Graph& g1, const Labeling& l1, const Graph& g2,
                             const Labeling& l2) {
    if (l1.atoms != l2.atoms)
        throw std::invalid_argument("labelings use different atom lists");

    Union u(g1, g2);
    std::vector<LabelBits> labels;
    labels.reserve(u.n);
    for (std::uint32_t s = 0; s < u.n1; ++s)
        labels.push_back(l1.bits[s]);
    for (std::uint32_t s = 0; s < u.n - u.n1; ++s)
        labels.push_back(l2.bits[s]);

    BlockView view(u, labels);

    // Initial partition by (label, stay); refine by the set of blocks the
    // entry states fall into, until stable.
    Partition part;
    part.first_size = u.n1;
    part.block_of.assign(u.n, 0);
    {
        std::map<std::pair<LabelBits, char>, std::uint32_t> init;
        for (std::uint32_t s = 0; s < u.n; ++s) {
            auto key = std::make_pair(labels[s], view.stay[s]);
            auto [it, inserted] =
                init.emplace(key, static_cast<std::uint32_t>(init.size()));
            part.block_of[s] = it->second;
        }
        part.block_count = init.size();
    }

    for (;;) {
        std::map<std::pair<std::uint32_t, std::set<std::uint32_t>>, std::uint32_t> sig;
        std::vector<std::uint32_t> next(u.n);
        for (std::uint32_t s = 0; s < u.n; ++s) {
            std::set<std::uint32_t> succ_blocks;
            for (std::uint32_t e : view.entries[s])
                succ_blocks.insert(part.block_of[e]);
            auto key = std::make_pair(part.block_of[s], std::move(succ_blocks));
            auto [it, inserted] = sig.emplace(key, static_cast<std::uint32_t>(sig.size()));
            next[s] = it->second;
        }
        if (sig.size() == part.block_count)
            break;
        part.block_of = std::move(next);
        part.block_count = sig.size();
    }
    return part;
}

BisimCheck check_bisimilar(const Graph& full, const Labeling& lf, const Graph& reduced,
                           const Labeling& lr) {
    Partition part = stuttering_classes(full, lf, reduced, lr);
    BisimCheck check;
    if (part.block(false, full.initial) != part.block(true, reduced.initial)) {
        check.ok = false;
        check.offenders.push_back("initial state " + full.state_name(full.initial));
    }
    for (std::uint32_t r = 0; r < reduced.states.size(); ++r) {
        auto namesake = full.find(reduced.states[r].components);
        if (!namesake) {
            check.ok = false;
            check.offenders.push_back(reduced.state_name(r) + " (no namesake in full graph)");
            continue;
        }
        if (part.block(false, *namesake) != part.block(true, r)) {
            check.ok = false;
            check.offenders.push_back(reduced.state_name(r));
        }
    }
    return check;
}

// ---------------------------------------------------------------------------
// Formula corpus and differential check

namespace {

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    std::uint64_t next(std::uint64_t n) { return n ? gen() % n : 0; }
    bool chance(unsigned percent) { return next(100) < percent; }
};

struct CorpusBuilder {
    const PropSet& props;
    Rng rng;
    std::vector<Designator> anchors;                          // `in s` states
    std::vector<std::pair<Designator, std::string>> axa_anchors;

    CorpusBuilder(const PropSet& p, std::uint64_t seed) : props(p), rng(seed) {
        for (const AtomicProp& a : props.atoms)
            if (a.kind == AtomicProp::Kind::InState)
                anchors.push_back(a.state);
        for (const Designator& d : anchors)
            for (const AtomicProp& a : props.atoms)
                if (a.kind == AtomicProp::Kind::InProj)
                    for (const auto& [aut, st] : d.parts)
                        if (aut == a.automaton && st == a.component)
                            axa_anchors.emplace_back(d, aut);
    }

    TemporalFormula leaf() {
        if (props.atoms.empty())
            return TemporalFormula::constant(rng.chance(50));
        TemporalFormula f =
            TemporalFormula::atom(props.atoms[rng.next(props.atoms.size())]);
        if (rng.chance(35))
            f = TemporalFormula::negation(std::move(f));
        return f;
    }

    // Propositional operand for a modality.
    TemporalFormula operand(int depth) {
        if (depth <= 0)
            return leaf();
        switch (rng.next(4)) {
        case 0:
            return TemporalFormula::conjunction(operand(depth - 1), operand(depth - 1));
        case 1:
            return TemporalFormula::disjunction(operand(depth - 1), operand(depth - 1));
        case 2:
            return TemporalFormula::negation(operand(depth - 1));
        default:
            return leaf();
        }
    }

    // One modal unit over propositional operands. Deeper modal nesting is
    // deliberately absent: the reduction preserves path-shaped properties,
    // and branching-shaped nesting can tell a skipped interior state from
    // its bypass even when every label agrees along the way.
    TemporalFormula modal(int depth) {
        int d = depth > 0 ? depth - 1 : 0;
        switch (rng.next(6)) {
        case 0:
            return TemporalFormula::always(operand(d));
        case 1:
            return TemporalFormula::eventually(operand(d));
        case 2:
            return TemporalFormula::weak_until(operand(d), operand(d));
        case 3: // response shape, equal to its path reading
            return TemporalFormula::always(TemporalFormula::implication(
                operand(d), TemporalFormula::eventually(operand(d))));
        case 4:
            if (!anchors.empty()) {
                const Designator& des = anchors[rng.next(anchors.size())];
                return TemporalFormula::at(StateRef{"", des},
                                           TemporalFormula::next(operand(d)));
            }
            return TemporalFormula::eventually(operand(d));
        default:
            if (!axa_anchors.empty()) {
                const auto& [des, aut] = axa_anchors[rng.next(axa_anchors.size())];
                return TemporalFormula::at(StateRef{"", des},
                                           TemporalFormula::next_in(aut, operand(d)));
            }
            return TemporalFormula::always(operand(d));
        }
    }

    TemporalFormula gen(int depth) {
        if (depth <= 0)
            return leaf();
        switch (rng.next(8)) {
        case 0:
            return leaf();
        case 1:
            return TemporalFormula::negation(gen(depth - 1));
        case 2:
            return TemporalFormula::conjunction(gen(depth - 1), gen(depth - 1));
        case 3:
            return TemporalFormula::disjunction(gen(depth - 1), gen(depth - 1));
        case 4:
            return TemporalFormula::implication(gen(depth - 1), gen(depth - 1));
        default:
            return modal(depth - 1);
        }
    }
};

} // namespace

std::vector<TemporalFormula> generate_corpus(const PropSet& props, int max_depth,
                                             std::uint64_t seed, std::size_t count) {
    CorpusBuilder builder(props, seed);
    std::vector<TemporalFormula> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(builder.gen(static_cast<int>(
            builder.rng.next(static_cast<std::uint64_t>(std::max(0, max_depth)) + 1))));
    return out;
}

DiffReport check_theorem1(const Graph& full, const Graph& reduced, const PropSet& props,
                          const std::vector<TemporalFormula>& corpus) {
    (void)props;
    DiffReport report;

    // Shared states, matched by tuple.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> shared;
    for (std::uint32_t r = 0; r < reduced.states.size(); ++r)
        if (auto f = full.find(reduced.states[r].components))
            shared.emplace_back(*f, r);
    report.states_compared = shared.size();

    for (const TemporalFormula& f : corpus) {
        EvalResult on_full = evaluate(full, f);
        EvalResult on_reduced = evaluate(reduced, f);
        FormulaVerdict v;
        v.text = f.to_string();
        v.full_truth = on_full.at_initial;
        v.reduced_truth = on_reduced.at_initial;
        v.match = on_full.at_initial == on_reduced.at_initial;
        for (auto [fid, rid] : shared)
            if (on_full.sat[fid] != on_reduced.sat[rid]) {
                v.match = false;
                break;
            }
        if (!v.match)
            ++report.mismatches;
        report.verdicts.push_back(std::move(v));
    }
    return report;
}

nlohmann::json DiffReport::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["mismatches"] = mismatches;
    j["states_compared"] = states_compared;
    j["formulas"] = nlohmann::json::array();
    for (const auto& v : verdicts)
        j["formulas"].push_back({{"text", v.text},
                                 {"full", v.full_truth},
                                 {"reduced", v.reduced_truth},
                                 {"match", v.match}});
    return j;
}

} // namespace csm
