#include "csm/reducer.hpp"

#include "csm/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace csm {

std::string to_string(Verdict v) {
    return v == Verdict::Reduce ? "reduce" : "keep";
}

std::string to_string(Reason r) {
    switch (r) {
    case Reason::ok:
        return "ok";
    case Reason::ear_i:
        return "ear_i";
    case Reason::ear_ii:
        return "ear_ii";
    case Reason::back_edge_iii:
        return "back_edge_iii";
    case Reason::protected_iv:
        return "protected_iv";
    case Reason::exception_v:
        return "exception_v";
    case Reason::visible:
        return "visible";
    case Reason::cycle_guard_a:
        return "cycle_guard_a";
    case Reason::taken_guard_b:
        return "taken_guard_b";
    }
    return "?";
}

bool Decision::all_reduced() const {
    if (verdicts.empty())
        return false;
    for (const auto& v : verdicts)
        if (v.verdict != Verdict::Reduce)
            return false;
    return true;
}

nlohmann::json Decision::to_json(const SystemInfo& info) const {
    nlohmann::json j;
    j["from"] = info.tuple_name(from);
    j["via"] = info.tuple_name(via);
    j["invisible"] = invisible;
    j["verdicts"] = nlohmann::json::array();
    for (const auto& v : verdicts)
        j["verdicts"].push_back({{"target", info.tuple_name(v.target)},
                                 {"verdict", to_string(v.verdict)},
                                 {"reason", to_string(v.reason)}});
    return j;
}

ReductionContext make_reduction_context(const PropSet& props,
                                        std::shared_ptr<const SystemInfo> info) {
    ReductionContext ctx;
    ctx.labels = LabelContext(props, info);
    ctx.reduction_allowed = props.reduction_allowed;
    for (const Designator& d : props.protected_states)
        ctx.protected_states.insert(resolve_designator(d, *info));
    return ctx;
}

nlohmann::json ReductionReport::to_json(bool include_decisions) const {
    nlohmann::json j;
    j["version"] = 1;
    j["reduction_allowed"] = reduction_allowed;
    j["online"] = online;
    j["states_before"] = states_before;
    j["states_after"] = states_after;
    j["arcs_before"] = arcs_before;
    j["arcs_after"] = arcs_after;
    j["passes"] = passes;
    j["reduction_ratio"] = {{"num", ratio_num}, {"den", ratio_den}};
    if (online)
        j["peak_resident_states"] = peak_resident_states;
    auto names = [&](const std::vector<StateTuple>& ts) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& t : ts)
            arr.push_back(info->tuple_name(t));
        return arr;
    };
    auto arc_names = [&](const std::vector<std::pair<StateTuple, StateTuple>>& as) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [u, v] : as)
            arr.push_back({info->tuple_name(u), info->tuple_name(v)});
        return arr;
    };
    j["skipped_states"] = names(skipped_states);
    j["removed_arcs"] = arc_names(removed_arcs);
    j["added_arcs"] = arc_names(added_arcs);
    if (include_decisions) {
        j["decisions"] = nlohmann::json::array();
        for (const auto& d : decisions)
            j["decisions"].push_back(d.to_json(*info));
    }
    return j;
}

bool is_invisible(const Graph& g, std::uint32_t src, std::uint32_t dst,
                  const Labeling& labels) {
    (void)g;
    return labels.bits[src] == labels.bits[dst];
}

Decision check_restrictions(const Graph& g, std::uint32_t si, std::uint32_t sj,
                            const ReductionContext& ctx, const Labeling& labels) {
    Decision d;
    d.from = g.states[si].components;
    d.via = g.states[sj].components;
    d.invisible = labels.bits[si] == labels.bits[sj];

    const auto& succs = g.succ[sj];
    auto keep_all = [&](Reason r) {
        for (std::uint32_t k : succs)
            d.verdicts.push_back({g.states[k].components, Verdict::Keep, r});
    };

    if (si == sj) {
        keep_all(Reason::ear_i);
        return d;
    }
    if (succs.size() == 1 && succs[0] == sj) {
        keep_all(Reason::ear_ii);
        return d;
    }

    bool is_protected = ctx.protected_states.count(d.via) > 0;
    bool exception = false;
    if (is_protected) {
        // v: every successor of si other than sj is already a successor of sj.
        exception = true;
        for (std::uint32_t x : g.succ[si])
            if (x != sj && !g.has_arc(sj, x)) {
                exception = false;
                break;
            }
    }

    for (std::uint32_t k : succs) {
        if (k == si)
            d.verdicts.push_back({g.states[k].components, Verdict::Keep, Reason::back_edge_iii});
        else if (is_protected && !exception)
            d.verdicts.push_back({g.states[k].components, Verdict::Keep, Reason::protected_iv});
        else
            d.verdicts.push_back({g.states[k].components, Verdict::Reduce,
                                  is_protected ? Reason::exception_v : Reason::ok});
    }
    return d;
}

namespace {

Graph prune_unreachable(const Graph& g, GraphKind kind) {
    std::vector<char> seen(g.states.size(), 0);
    std::deque<std::uint32_t> frontier{g.initial};
    seen[g.initial] = 1;
    while (!frontier.empty()) {
        std::uint32_t s = frontier.front();
        frontier.pop_front();
        for (std::uint32_t d : g.succ[s])
            if (!seen[d]) {
                seen[d] = 1;
                frontier.push_back(d);
            }
    }
    Graph out;
    out.kind = kind;
    out.info = g.info;
    std::vector<std::uint32_t> remap(g.states.size(), 0);
    for (std::uint32_t s = 0; s < g.states.size(); ++s)
        if (seen[s])
            remap[s] = out.add_state(g.states[s]);
    out.initial = remap[g.initial];
    for (std::uint32_t s = 0; s < g.states.size(); ++s)
        if (seen[s])
            for (std::uint32_t d : g.succ[s])
                if (seen[d])
                    out.add_arc(remap[s], remap[d]);
    return out;
}

void remove_arc(Graph& g, std::uint32_t src, std::uint32_t dst) {
    auto& out = g.succ[src];
    auto it = std::lower_bound(out.begin(), out.end(), dst);
    if (it != out.end() && *it == dst)
        out.erase(it);
    auto& in = g.pred[dst];
    auto jt = std::lower_bound(in.begin(), in.end(), src);
    if (jt != in.end() && *jt == src)
        in.erase(jt);
}

} // namespace

Graph apply_reduction(const Graph& g, const Decision& d) {
    auto si = g.find(d.from);
    auto sj = g.find(d.via);
    if (!si || !sj)
        throw ResolveError("decision endpoints are not states of this graph");

    Graph work = g;
    work.kind = GraphKind::RRG;
    work.guards.clear();

    bool all_reduce = !d.verdicts.empty();
    for (const auto& v : d.verdicts) {
        if (v.verdict != Verdict::Reduce) {
            all_reduce = false;
            continue;
        }
        auto k = work.find(v.target);
        if (!k)
            throw ResolveError("verdict target is not a state of this graph");
        if (*k == *si)
            throw std::logic_error("reduction would create an ear");
        work.add_arc(*si, *k);
    }
    if (all_reduce)
        remove_arc(work, *si, *sj);
    return prune_unreachable(work, GraphKind::RRG);
}

// ---------------------------------------------------------------------------
// Worklist reduction shared by the off-line and on-line algorithms. States
// are addressed by discovery ids; every ordering decision uses the
// component tuple, so both algorithms traverse identically.

namespace {

class StateSpace {
public:
    virtual ~StateSpace() = default;
    virtual std::shared_ptr<const SystemInfo> info() const = 0;
    virtual std::uint32_t initial_id() = 0;
    virtual const StateTuple& tuple(std::uint32_t id) const = 0;
    virtual const SignalSet& outputs(std::uint32_t id) const = 0;
    virtual const LabelBits& labels(std::uint32_t id) const = 0;
    /// Successor ids in lexicographic tuple order.
    virtual const std::vector<std::uint32_t>& successors(std::uint32_t id) = 0;
    virtual std::size_t discovered() const = 0;
};

class OfflineSpace final : public StateSpace {
public:
    OfflineSpace(const Graph& g, const LabelContext& ctx) : g_(g) {
        labels_.reserve(g.states.size());
        for (const auto& s : g.states)
            labels_.push_back(ctx.label_of(s.components, s.outputs));
        sorted_.resize(g.states.size());
        done_.resize(g.states.size(), 0);
    }

    std::shared_ptr<const SystemInfo> info() const override { return g_.info; }
    std::uint32_t initial_id() override { return g_.initial; }
    const StateTuple& tuple(std::uint32_t id) const override {
        return g_.states[id].components;
    }
    const SignalSet& outputs(std::uint32_t id) const override {
        return g_.states[id].outputs;
    }
    const LabelBits& labels(std::uint32_t id) const override { return labels_[id]; }

    const std::vector<std::uint32_t>& successors(std::uint32_t id) override {
        if (!done_[id]) {
            sorted_[id] = g_.succ[id];
            std::sort(sorted_[id].begin(), sorted_[id].end(),
                      [&](std::uint32_t a, std::uint32_t b) { return tuple(a) < tuple(b); });
            done_[id] = 1;
        }
        return sorted_[id];
    }

    std::size_t discovered() const override { return g_.states.size(); }

private:
    const Graph& g_;
    std::vector<LabelBits> labels_;
    std::vector<std::vector<std::uint32_t>> sorted_;
    std::vector<char> done_;
};

class OnlineSpace final : public StateSpace {
public:
    OnlineSpace(const OnlineSource& src, const LabelContext& ctx) : src_(src), ctx_(ctx) {}

    std::shared_ptr<const SystemInfo> info() const override { return src_.info; }

    std::uint32_t initial_id() override { return id_of(src_.initial); }

    const StateTuple& tuple(std::uint32_t id) const override { return tuples_[id]; }
    const SignalSet& outputs(std::uint32_t id) const override { return outputs_[id]; }
    const LabelBits& labels(std::uint32_t id) const override { return labels_[id]; }

    const std::vector<std::uint32_t>& successors(std::uint32_t id) override {
        if (!succ_done_[id]) {
            std::vector<StateTuple> raw = src_.successors(tuples_[id]);
            std::vector<std::uint32_t> ids;
            ids.reserve(raw.size());
            for (const StateTuple& t : raw)
                ids.push_back(id_of(t));
            std::sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
                return tuples_[a] < tuples_[b];
            });
            arcs_fetched_ += ids.size();
            succ_[id] = std::move(ids);
            succ_done_[id] = 1;
        }
        return succ_[id];
    }

    std::size_t discovered() const override { return tuples_.size(); }

    /// Arcs obtained from the source so far, as id pairs.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> fetched_arcs() const {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
        for (std::uint32_t s = 0; s < succ_.size(); ++s)
            if (succ_done_[s])
                for (std::uint32_t d : succ_[s])
                    out.emplace_back(s, d);
        return out;
    }

    std::size_t fetched_arc_count() const { return arcs_fetched_; }

private:
    std::uint32_t id_of(const StateTuple& t) {
        auto it = ids_.find(t);
        if (it != ids_.end())
            return it->second;
        if (tuples_.size() >= src_.cap)
            throw LimitError("state cap of " + std::to_string(src_.cap) +
                                 " exceeded during on-line reduction",
                             tuples_.size(), arcs_fetched_);
        std::uint32_t id = static_cast<std::uint32_t>(tuples_.size());
        ids_.emplace(t, id);
        tuples_.push_back(t);
        SignalSet out = src_.outputs(t);
        labels_.push_back(ctx_.label_of(t, out));
        outputs_.push_back(std::move(out));
        succ_.emplace_back();
        succ_done_.push_back(0);
        return id;
    }

    const OnlineSource& src_;
    const LabelContext& ctx_;
    std::unordered_map<StateTuple, std::uint32_t, TupleHash> ids_;
    std::vector<StateTuple> tuples_;
    std::vector<SignalSet> outputs_;
    std::vector<LabelBits> labels_;
    std::vector<std::vector<std::uint32_t>> succ_;
    std::vector<char> succ_done_;
    std::size_t arcs_fetched_ = 0;
};

struct TupleLess {
    StateSpace* space;
    bool operator()(std::uint32_t a, std::uint32_t b) const {
        return space->tuple(a) < space->tuple(b);
    }
};

struct CoreOutput {
    std::vector<std::uint32_t> order; // preserved states, preservation order
    std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs;
    std::vector<Decision> decisions;
};

CoreOutput reduce_core(StateSpace& space, const ReductionContext& ctx) {
    CoreOutput out;
    TupleLess less{&space};
    std::set<std::uint32_t, TupleLess> pending(less);
    std::unordered_set<std::uint32_t> preserved;

    auto preserve = [&](std::uint32_t s) {
        if (preserved.insert(s).second) {
            pending.insert(s);
            out.order.push_back(s);
        }
    };
    preserve(space.initial_id());

    while (!pending.empty()) {
        std::uint32_t root = *pending.begin();
        pending.erase(pending.begin());

        std::set<std::uint32_t, TupleLess> agenda(less);
        std::unordered_set<std::uint32_t> tried;
        std::vector<std::uint32_t> committed;
        std::unordered_set<std::uint32_t> committed_set;
        bool stopped = false;

        for (std::uint32_t s : space.successors(root))
            agenda.insert(s);

        auto commit = [&](std::uint32_t c) {
            if (committed_set.insert(c).second)
                committed.push_back(c);
        };

        while (!agenda.empty()) {
            std::uint32_t cand = *agenda.begin();
            agenda.erase(agenda.begin());
            if (committed_set.count(cand))
                continue;

            Decision dec;
            if (ctx.record_decisions) {
                dec.from = space.tuple(root);
                dec.via = space.tuple(cand);
                dec.invisible = space.labels(root) == space.labels(cand);
            }

            auto keep_whole = [&](Reason r) {
                if (ctx.record_decisions)
                    for (std::uint32_t k : space.successors(cand))
                        dec.verdicts.push_back({space.tuple(k), Verdict::Keep, r});
                commit(cand);
            };

            if (stopped) {
                keep_whole(Reason::taken_guard_b);
            } else if (tried.count(cand)) {
                keep_whole(Reason::cycle_guard_a);
            } else {
                tried.insert(cand);
                if (preserved.count(cand)) {
                    keep_whole(Reason::taken_guard_b);
                    stopped = true;
                } else if (cand == root) {
                    keep_whole(Reason::ear_i);
                } else if (space.labels(root) != space.labels(cand)) {
                    keep_whole(Reason::visible);
                } else {
                    const auto& csucc = space.successors(cand);
                    bool terminal = csucc.size() == 1 && csucc[0] == cand;
                    bool back_edge =
                        std::find(csucc.begin(), csucc.end(), root) != csucc.end();
                    if (terminal) {
                        keep_whole(Reason::ear_ii);
                    } else if (back_edge) {
                        keep_whole(Reason::back_edge_iii);
                    } else {
                        bool is_protected = ctx.protected_states.count(space.tuple(cand)) > 0;
                        Reason reduce_reason = Reason::ok;
                        bool may_skip = true;
                        if (is_protected) {
                            auto succ_of_cand = [&](std::uint32_t x) {
                                return std::find(csucc.begin(), csucc.end(), x) != csucc.end();
                            };
                            // v: every current successor of the root other than the
                            // candidate must already be a successor of the candidate.
                            bool exception = true;
                            for (std::uint32_t x : committed)
                                if (x != cand && !succ_of_cand(x)) {
                                    exception = false;
                                    break;
                                }
                            if (exception)
                                for (std::uint32_t x : agenda)
                                    if (x != cand && !succ_of_cand(x)) {
                                        exception = false;
                                        break;
                                    }
                            if (!exception && ctx.relaxed_v) {
                                // Relaxed form: siblings that are themselves skip
                                // candidates may jointly cover the root's successors.
                                std::vector<std::uint32_t> group{cand};
                                for (std::uint32_t a : agenda)
                                    if (a != root && space.labels(root) == space.labels(a))
                                        group.push_back(a);
                                if (group.size() > 1) {
                                    auto in_group = [&](std::uint32_t x) {
                                        return std::find(group.begin(), group.end(), x) !=
                                               group.end();
                                    };
                                    auto covered = [&](std::uint32_t x) {
                                        for (std::uint32_t c : group) {
                                            const auto& cs = space.successors(c);
                                            if (std::find(cs.begin(), cs.end(), x) != cs.end())
                                                return true;
                                        }
                                        return false;
                                    };
                                    exception = true;
                                    for (std::uint32_t x : committed)
                                        if (!in_group(x) && !covered(x)) {
                                            exception = false;
                                            break;
                                        }
                                    if (exception)
                                        for (std::uint32_t x : agenda)
                                            if (!in_group(x) && !covered(x)) {
                                                exception = false;
                                                break;
                                            }
                                }
                            }
                            if (exception)
                                reduce_reason = Reason::exception_v;
                            else
                                may_skip = false;
                        }
                        if (!may_skip) {
                            keep_whole(Reason::protected_iv);
                        } else {
                            if (ctx.record_decisions)
                                for (std::uint32_t k : csucc)
                                    dec.verdicts.push_back(
                                        {space.tuple(k), Verdict::Reduce, reduce_reason});
                            for (std::uint32_t k : csucc)
                                if (!committed_set.count(k))
                                    agenda.insert(k);
                        }
                    }
                }
            }
            if (ctx.record_decisions)
                out.decisions.push_back(std::move(dec));
        }

        for (std::uint32_t f : committed) {
            if (f == root) {
                const auto& rs = space.successors(root);
                if (!(rs.size() == 1 && rs[0] == root))
                    throw std::logic_error("reduction would create an ear at " +
                                           space.info()->tuple_name(space.tuple(root)));
            }
            out.arcs.emplace_back(root, f);
            preserve(f);
        }
    }
    return out;
}

Graph assemble(StateSpace& space, const CoreOutput& core) {
    Graph g;
    g.kind = GraphKind::RRG;
    g.info = space.info();
    std::unordered_map<std::uint32_t, std::uint32_t> remap;
    for (std::uint32_t s : core.order)
        remap[s] = g.add_state(GlobalState{space.tuple(s), space.outputs(s)});
    g.initial = remap.at(space.initial_id());
    for (auto [u, v] : core.arcs)
        g.add_arc(remap.at(u), remap.at(v));
    return g;
}

void reject_stray_ears(const Graph& g) {
    for (std::uint32_t s = 0; s < g.states.size(); ++s)
        if (g.has_ear(s) && !g.terminal(s))
            throw std::invalid_argument("input graph has an ear at non-terminal state " +
                                        g.state_name(s) + "; reduce expects RG-@ form");
}

// Fills skipped/removed/added and the size counters of `report` from the
// graphs' tuple-keyed difference.
void fill_diff(ReductionReport& report, const Graph& before, const Graph& after) {
    report.states_after = after.states.size();
    report.arcs_after = after.arc_count();
    for (const auto& s : before.states)
        if (!after.find(s.components))
            report.skipped_states.push_back(s.components);
    for (std::uint32_t u = 0; u < before.states.size(); ++u) {
        auto nu = after.find(before.states[u].components);
        if (!nu)
            continue;
        for (std::uint32_t v : before.succ[u]) {
            auto nv = after.find(before.states[v].components);
            if (!nv || !after.has_arc(*nu, *nv))
                report.removed_arcs.emplace_back(before.states[u].components,
                                                 before.states[v].components);
        }
    }
    for (std::uint32_t u = 0; u < after.states.size(); ++u) {
        auto ou = before.find(after.states[u].components);
        for (std::uint32_t v : after.succ[u]) {
            auto ov = before.find(after.states[v].components);
            if (!ou || !ov || !before.has_arc(*ou, *ov))
                report.added_arcs.emplace_back(after.states[u].components,
                                               after.states[v].components);
        }
    }
    report.ratio_num = report.states_before + report.arcs_before;
    report.ratio_den = report.states_after + report.arcs_after;
}

bool same_shape(const Graph& a, const Graph& b) {
    if (a.states.size() != b.states.size() || a.arc_count() != b.arc_count())
        return false;
    for (std::uint32_t u = 0; u < a.states.size(); ++u) {
        auto bu = b.find(a.states[u].components);
        if (!bu)
            return false;
        for (std::uint32_t v : a.succ[u]) {
            auto bv = b.find(a.states[v].components);
            if (!bv || !b.has_arc(*bu, *bv))
                return false;
        }
    }
    return true;
}

} // namespace

std::pair<Graph, ReductionReport> reduce_offline(const Graph& g, const ReductionContext& ctx) {
    reject_stray_ears(g);

    ReductionReport report;
    report.info = g.info;
    report.reduction_allowed = ctx.reduction_allowed;
    report.states_before = g.states.size();
    report.arcs_before = g.arc_count();

    if (!ctx.reduction_allowed) {
        Graph copy = g;
        copy.kind = GraphKind::RRG;
        report.passes = 0;
        fill_diff(report, g, copy);
        return {std::move(copy), std::move(report)};
    }

    const Graph* current = &g;
    Graph result;
    for (std::size_t pass = 1; pass <= ctx.max_passes; ++pass) {
        OfflineSpace space(*current, ctx.labels);
        CoreOutput core = reduce_core(space, ctx);
        Graph next = assemble(space, core);
        report.passes = pass;
        report.decisions.insert(report.decisions.end(),
                                std::make_move_iterator(core.decisions.begin()),
                                std::make_move_iterator(core.decisions.end()));
        bool stable = same_shape(*current, next);
        result = std::move(next);
        if (stable)
            break;
        current = &result;
    }
    fill_diff(report, g, result);
    return {std::move(result), std::move(report)};
}

OnlineSource system_source(const CsmSystem& sys, std::size_t cap) {
    auto shared = std::make_shared<const CsmSystem>(sys);
    OnlineSource src;
    src.info = SystemInfo::from(*shared);
    src.cap = cap;
    src.initial.resize(shared->automata.size());
    for (std::size_t i = 0; i < shared->automata.size(); ++i)
        src.initial[i] = shared->automata[i].initial;
    src.outputs = [shared](const StateTuple& t) { return tuple_outputs(*shared, t); };
    src.successors = [shared](const StateTuple& t) {
        std::set<StateTuple> dests;
        for (const SignalSet& ext : shared->external_choices())
            for (StateTuple& d : step(*shared, t, ext))
                dests.insert(std::move(d));
        // RG₋@ view: drop the ear unless it is the only move.
        if (dests.size() > 1)
            dests.erase(t);
        return std::vector<StateTuple>(dests.begin(), dests.end());
    };
    return src;
}

std::pair<Graph, ReductionReport> reduce_online(const OnlineSource& source,
                                                const ReductionContext& ctx) {
    ReductionReport report;
    report.info = source.info;
    report.online = true;
    report.reduction_allowed = ctx.reduction_allowed;

    if (!ctx.reduction_allowed) {
        // Nothing may be skipped: materialize the full graph.
        Graph full;
        full.kind = GraphKind::RRG;
        full.info = source.info;
        full.initial = full.add_state(
            GlobalState{source.initial, source.outputs(source.initial)});
        std::deque<std::uint32_t> frontier{full.initial};
        while (!frontier.empty()) {
            std::uint32_t s = frontier.front();
            frontier.pop_front();
            for (const StateTuple& t : source.successors(full.states[s].components)) {
                auto id = full.find(t);
                if (!id) {
                    if (full.states.size() >= source.cap)
                        throw LimitError("state cap of " + std::to_string(source.cap) +
                                             " exceeded during on-line reduction",
                                         full.states.size(), full.arc_count());
                    id = full.add_state(GlobalState{t, source.outputs(t)});
                    frontier.push_back(*id);
                }
                full.add_arc(s, *id);
            }
        }
        report.passes = 0;
        report.states_before = full.states.size();
        report.arcs_before = full.arc_count();
        report.peak_resident_states = full.states.size();
        fill_diff(report, full, full);
        return {std::move(full), std::move(report)};
    }

    OnlineSpace space(source, ctx.labels);
    CoreOutput core = reduce_core(space, ctx);
    Graph result = assemble(space, core);
    report.passes = 1;
    report.decisions = std::move(core.decisions);
    report.peak_resident_states = space.discovered();

    // Extra passes re-reduce the materialized result off-line.
    const Graph* current = &result;
    for (std::size_t pass = 2; pass <= ctx.max_passes; ++pass) {
        OfflineSpace off(*current, ctx.labels);
        CoreOutput more = reduce_core(off, ctx);
        Graph next = assemble(off, more);
        report.passes = pass;
        report.decisions.insert(report.decisions.end(),
                                std::make_move_iterator(more.decisions.begin()),
                                std::make_move_iterator(more.decisions.end()));
        bool stable = same_shape(*current, next);
        result = std::move(next);
        if (stable)
            break;
        current = &result;
    }

    // "Before" for an on-line run is the discovered portion of the space.
    report.states_before = space.discovered();
    report.arcs_before = space.fetched_arc_count();
    report.states_after = result.states.size();
    report.arcs_after = result.arc_count();
    for (std::uint32_t s = 0; s < space.discovered(); ++s)
        if (!result.find(space.tuple(s)))
            report.skipped_states.push_back(space.tuple(s));
    std::set<std::pair<StateTuple, StateTuple>> fetched;
    for (auto [u, v] : space.fetched_arcs()) {
        fetched.emplace(space.tuple(u), space.tuple(v));
        auto nu = result.find(space.tuple(u));
        if (!nu)
            continue;
        auto nv = result.find(space.tuple(v));
        if (!nv || !result.has_arc(*nu, *nv))
            report.removed_arcs.emplace_back(space.tuple(u), space.tuple(v));
    }
    for (std::uint32_t u = 0; u < result.states.size(); ++u)
        for (std::uint32_t v : result.succ[u]) {
            auto pair = std::make_pair(result.states[u].components,
                                       result.states[v].components);
            if (!fetched.count(pair))
                report.added_arcs.push_back(std::move(pair));
        }
    report.ratio_num = report.states_before + report.arcs_before;
    report.ratio_den = report.states_after + report.arcs_after;
    return {std::move(result), std::move(report)};
}

} // namespace csm
