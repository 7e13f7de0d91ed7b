#include "pcalc/equivalence.hpp"

#include "pcalc/error.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace pcalc {

const char* to_string(EquivKind k) {
    switch (k) {
    case EquivKind::Strong:
        return "strong";
    case EquivKind::Weak:
        return "weak";
    case EquivKind::Branching:
        return "branching";
    case EquivKind::QuasiStrong:
        return "quasi-strong";
    case EquivKind::QsBranching:
        return "qs-branching";
    }
    return "?";
}

std::optional<EquivKind> parse_equiv_kind(std::string_view s) {
    for (auto k : {EquivKind::Strong, EquivKind::Weak, EquivKind::Branching, EquivKind::QuasiStrong,
                   EquivKind::QsBranching})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

const char* to_string(AttackerTrace::Terminal t) {
    return t == AttackerTrace::Terminal::NoMatch ? "no-match" : "divergence-mismatch";
}

const char* to_string(Verdict::Outcome o) {
    switch (o) {
    case Verdict::Outcome::Equivalent:
        return "equivalent";
    case Verdict::Outcome::Inequivalent:
        return "inequivalent";
    case Verdict::Outcome::Unknown:
        return "unknown";
    }
    return "?";
}

std::vector<std::pair<StateId, StateId>> PairRelation::pairs() const {
    std::vector<std::pair<StateId, StateId>> out;
    for (StateId s = 0; s < n; ++s)
        for (StateId t = 0; t < n; ++t)
            if (contains(s, t)) out.emplace_back(s, t);
    return out;
}

namespace {

bool definite_mismatch(const Lts& l, StateId s, StateId t) {
    auto a = l.diverges.at(s);
    auto b = l.diverges.at(t);
    return a != Divergence::UnknownTruncated && b != Divergence::UnknownTruncated && a != b;
}

bool divergence_split(EquivKind k) { return k != EquivKind::Strong; }

// A defender reply, abstracted to the states the continuation depends on.
//   Stay:        no move (branching tau); continue at (attacker dst, defender)
//   Closure:     tau path ending in dst
//   Step:        tau path to mid, then one `a` edge to dst
//   StepClosure: tau path to mid, `a` edge, tau path to dst
// `chain` replies also offer the attacker the position (attacker src, mid).
struct Reply {
    enum class Shape : std::uint8_t { Stay, Closure, Step, StepClosure };
    Shape shape = Shape::Step;
    bool chain = false;
    StateId mid = 0;
    StateId dst = 0;

    friend auto operator<=>(const Reply&, const Reply&) = default;
};

using Pos = std::pair<StateId, StateId>;

class Moves {
public:
    Moves(const Lts& l, EquivKind kind) : l_(l), kind_(kind) {}

    const Lts& lts() const { return l_; }
    EquivKind kind() const { return kind_; }

    // Replies of defender d to an `a` move; nullopt when they depend on
    // unexplored states.
    const std::optional<std::vector<Reply>>& replies(StateId d, const Action& a) {
        auto key = std::make_pair(d, a);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        return cache_.emplace(key, compute(d, a)).first->second;
    }

    // Continuations, oriented (attacker side, defender side).
    static void next(StateId att_src, StateId att_dst, const Reply& r, std::vector<Pos>& out) {
        out.clear();
        if (r.chain) out.emplace_back(att_src, r.mid);
        out.emplace_back(att_dst, r.dst);
    }

    std::vector<Edge> path(StateId d, const Action& a, const Reply& r) {
        std::vector<Edge> p;
        switch (r.shape) {
        case Reply::Shape::Stay:
            break;
        case Reply::Shape::Closure:
            p = tau_path(d, r.dst);
            break;
        case Reply::Shape::Step:
            p = tau_path(d, r.mid);
            p.push_back({r.mid, a, r.dst});
            break;
        case Reply::Shape::StepClosure: {
            p = tau_path(d, r.mid);
            for (const auto& e : l_.out(r.mid)) {
                if (e.action != a) continue;
                const auto& c = closure(e.dst);
                if (std::find(c.states.begin(), c.states.end(), r.dst) == c.states.end()) continue;
                p.push_back(e);
                auto tail = tau_path(e.dst, r.dst);
                p.insert(p.end(), tail.begin(), tail.end());
                break;
            }
            break;
        }
        }
        return p;
    }

    // States any reply of d (for any action) may lead to.
    std::vector<StateId> touched(StateId d, const std::vector<Action>& alphabet) {
        std::vector<StateId> out{d};
        for (const auto& a : alphabet) {
            const auto& rs = replies(d, a);
            if (!rs) continue;
            for (const auto& r : *rs) {
                out.push_back(r.mid);
                out.push_back(r.dst);
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    struct Closure {
        std::vector<StateId> states;  // BFS order
        std::unordered_map<StateId, Edge> parent;
        bool complete = true;
    };

    const Closure& closure(StateId s) {
        auto it = closures_.find(s);
        if (it != closures_.end()) return it->second;
        Closure c;
        c.states.push_back(s);
        std::set<StateId> seen{s};
        for (std::size_t i = 0; i < c.states.size(); ++i) {
            StateId u = c.states[i];
            if (!l_.expanded(u)) {
                c.complete = false;
                continue;
            }
            for (const auto& e : l_.out(u))
                if (!e.action.visible() && seen.insert(e.dst).second) {
                    c.parent.emplace(e.dst, e);
                    c.states.push_back(e.dst);
                }
        }
        return closures_.emplace(s, std::move(c)).first->second;
    }

    std::vector<Edge> tau_path(StateId from, StateId to) {
        const auto& c = closure(from);
        std::vector<Edge> p;
        for (StateId x = to; x != from;) {
            const Edge& e = c.parent.at(x);
            p.push_back(e);
            x = e.src;
        }
        std::reverse(p.begin(), p.end());
        return p;
    }

    std::optional<std::vector<Reply>> compute(StateId d, const Action& a) {
        using S = Reply::Shape;
        if (!l_.expanded(d)) return std::nullopt;
        std::vector<Reply> out;
        auto single = [&] {
            for (const auto& e : l_.out(d))
                if (e.action == a) out.push_back({S::Step, false, d, e.dst});
        };
        // tau* a, with or without the chain clause
        auto delayed = [&](bool chain) -> bool {
            const auto& c = closure(d);
            if (!c.complete) return false;
            for (auto u : c.states)
                for (const auto& e : l_.out(u))
                    if (e.action == a) out.push_back({S::Step, chain, u, e.dst});
            return true;
        };
        switch (kind_) {
        case EquivKind::Strong:
            single();
            break;
        case EquivKind::Weak: {
            const auto& c = closure(d);
            if (!c.complete) return std::nullopt;
            if (!a.visible()) {
                for (auto u : c.states) out.push_back({S::Closure, false, d, u});
                break;
            }
            for (auto u : c.states)
                for (const auto& e : l_.out(u)) {
                    if (e.action != a) continue;
                    const auto& c2 = closure(e.dst);
                    if (!c2.complete) return std::nullopt;
                    for (auto w : c2.states) out.push_back({S::StepClosure, false, u, w});
                }
            break;
        }
        case EquivKind::QuasiStrong:
            if (!a.visible())
                single();
            else if (!delayed(false))
                return std::nullopt;
            break;
        case EquivKind::Branching:
            if (!a.visible()) out.push_back({S::Stay, false, d, d});
            if (!delayed(true)) return std::nullopt;
            break;
        case EquivKind::QsBranching:
            if (!a.visible())
                single();
            else if (!delayed(true))
                return std::nullopt;
            break;
        }
        bool chained = kind_ == EquivKind::Branching || (kind_ == EquivKind::QsBranching && a.visible());
        if (!chained) {
            // Only dst matters: keep one reply per target.
            std::stable_sort(out.begin(), out.end(), [](const Reply& x, const Reply& y) { return x.dst < y.dst; });
            out.erase(std::unique(out.begin(), out.end(),
                                  [](const Reply& x, const Reply& y) { return x.dst == y.dst; }),
                      out.end());
        } else {
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
        }
        return out;
    }

    const Lts& l_;
    EquivKind kind_;
    std::map<std::pair<StateId, Action>, std::optional<std::vector<Reply>>> cache_;
    std::unordered_map<StateId, Closure> closures_;
};

std::vector<Action> alphabet(const Lts& l) {
    std::vector<Action> a;
    for (const auto& e : l.edges) a.push_back(e.action);
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

// Does the attacker's move e from `att` (against defender d) beat every
// reply, given a predicate on oriented continuation positions?
template <class Lost>
bool move_refutes(Moves& mv, const Edge& e, StateId d, Lost lost, const std::vector<Reply>& rs) {
    std::vector<Pos> nx;
    for (const auto& r : rs) {
        Moves::next(e.src, e.dst, r, nx);
        bool beaten = false;
        for (const auto& p : nx)
            if (lost(p)) {
                beaten = true;
                break;
            }
        if (!beaten) return false;
    }
    (void)mv;
    (void)d;
    return true;
}

Partition normalize(EquivKind kind, const std::vector<std::uint32_t>& raw) {
    Partition p;
    p.kind = kind;
    std::map<std::uint32_t, std::uint32_t> renum;
    p.block_of.resize(raw.size());
    for (StateId s = 0; s < raw.size(); ++s) {
        auto [it, fresh] = renum.emplace(raw[s], static_cast<std::uint32_t>(renum.size()));
        if (fresh) p.blocks.emplace_back();
        p.block_of[s] = it->second;
        p.blocks[it->second].push_back(s);
    }
    return p;
}

std::vector<std::uint32_t> divergence_blocks(const Lts& l) {
    std::vector<std::uint32_t> b(l.size());
    for (StateId s = 0; s < l.size(); ++s) b[s] = l.diverges.at(s) == Divergence::Yes ? 1 : 0;
    return b;
}

struct LabeledEdge {
    StateId src;
    std::uint32_t action;
    StateId dst;
};

// Naive splitter refinement (Kanellakis-Smolka): every block is used as a
// splitter for every action, and blocks created by a split are queued again.
std::vector<std::uint32_t> split_refine(std::size_t n, std::vector<std::uint32_t> block_of,
                                        const std::vector<LabeledEdge>& edges, std::uint32_t actions,
                                        std::size_t& splits) {
    std::vector<std::vector<std::vector<StateId>>> pred(actions, std::vector<std::vector<StateId>>(n));
    for (const auto& e : edges) pred[e.action][e.dst].push_back(e.src);

    std::vector<std::vector<StateId>> blocks;
    {
        std::map<std::uint32_t, std::uint32_t> renum;
        for (StateId s = 0; s < n; ++s) {
            auto [it, fresh] = renum.emplace(block_of[s], static_cast<std::uint32_t>(blocks.size()));
            if (fresh) blocks.emplace_back();
            block_of[s] = it->second;
            blocks[it->second].push_back(s);
        }
    }
    std::deque<std::uint32_t> work;
    std::vector<char> queued(blocks.size(), 1);
    for (std::uint32_t b = 0; b < blocks.size(); ++b) work.push_back(b);
    std::vector<char> mark(n, 0);
    while (!work.empty()) {
        auto b = work.front();
        work.pop_front();
        queued[b] = 0;
        const std::vector<StateId> splitter = blocks[b];
        for (std::uint32_t a = 0; a < actions; ++a) {
            std::vector<StateId> hit;
            for (auto s : splitter)
                for (auto p : pred[a][s])
                    if (!mark[p]) {
                        mark[p] = 1;
                        hit.push_back(p);
                    }
            std::set<std::uint32_t> touched;
            for (auto p : hit) touched.insert(block_of[p]);
            for (auto c : touched) {
                std::vector<StateId> in, out;
                for (auto s : blocks[c]) (mark[s] ? in : out).push_back(s);
                if (out.empty()) continue;
                ++splits;
                auto nb = static_cast<std::uint32_t>(blocks.size());
                blocks[c] = std::move(out);
                for (auto s : in) block_of[s] = nb;
                blocks.push_back(std::move(in));
                queued.push_back(0);
                for (auto x : {c, nb})
                    if (!queued[x]) {
                        queued[x] = 1;
                        work.push_back(x);
                    }
            }
            for (auto p : hit) mark[p] = 0;
        }
    }
    return block_of;
}

// Signature refinement for branching bisimulation: a state's signature
// collects the non-inert moves available after inert tau steps (tau steps
// that stay inside the current block).
std::vector<std::uint32_t> branching_refine(const Lts& l, std::vector<std::uint32_t> block_of,
                                            std::size_t& rounds) {
    const std::size_t n = l.size();
    std::size_t count = std::set<std::uint32_t>(block_of.begin(), block_of.end()).size();
    for (;;) {
        ++rounds;
        std::map<std::pair<std::uint32_t, std::set<std::pair<Action, std::uint32_t>>>, std::uint32_t> ids;
        std::vector<std::uint32_t> next(n);
        for (StateId s = 0; s < n; ++s) {
            std::set<std::pair<Action, std::uint32_t>> sig;
            std::vector<StateId> reach{s};
            std::set<StateId> seen{s};
            for (std::size_t i = 0; i < reach.size(); ++i)
                for (const auto& e : l.out(reach[i])) {
                    bool inert = !e.action.visible() && block_of[e.dst] == block_of[s];
                    if (inert) {
                        if (seen.insert(e.dst).second) reach.push_back(e.dst);
                    } else {
                        sig.emplace(e.action, block_of[e.dst]);
                    }
                }
            auto [it, fresh] = ids.emplace(std::make_pair(block_of[s], std::move(sig)),
                                           static_cast<std::uint32_t>(ids.size()));
            (void)fresh;
            next[s] = it->second;
        }
        block_of = std::move(next);
        if (ids.size() == count) return block_of;
        count = ids.size();
    }
}

}  // namespace

Partition compute_partition(const Lts& l, EquivKind kind) {
    if (l.truncated) throw TruncatedInput("partition refinement needs a fully explored LTS");
    std::size_t work = 0;
    auto init = divergence_blocks(l);
    switch (kind) {
    case EquivKind::Strong:
    case EquivKind::Weak: {
        std::map<Action, std::uint32_t> ids;
        std::vector<LabeledEdge> edges;
        auto id = [&](const Action& a) {
            return ids.emplace(a, static_cast<std::uint32_t>(ids.size())).first->second;
        };
        if (kind == EquivKind::Strong) {
            for (const auto& e : l.edges) edges.push_back({e.src, id(e.action), e.dst});
        } else {
            auto sat = saturate(l, SaturationMode::Weak);
            for (const auto& e : sat.edges) edges.push_back({e.src, id(e.action), e.dst});
        }
        auto raw = split_refine(l.size(), init, edges, static_cast<std::uint32_t>(ids.size()), work);
        return normalize(kind, raw);
    }
    case EquivKind::Branching:
        return normalize(kind, branching_refine(l, init, work));
    case EquivKind::QuasiStrong:
    case EquivKind::QsBranching:
        break;
    }
    throw InvalidRequest(std::string("no partition algorithm for ") + to_string(kind));
}

Refinement refine_pairs(const Lts& l, EquivKind kind) {
    if (l.truncated) throw TruncatedInput("relation refinement needs a fully explored LTS");
    const std::size_t n = l.size();
    Moves mv(l, kind);
    Refinement ref;
    ref.relation.kind = kind;
    ref.relation.n = n;
    ref.ranks.assign(n * n, -1);
    auto at = [n](StateId s, StateId t) { return std::size_t(s) * n + t; };
    if (divergence_split(kind))
        for (StateId s = 0; s < n; ++s)
            for (StateId t = 0; t < n; ++t)
                if (l.diverges[s] != l.diverges[t]) ref.ranks[at(s, t)] = 0;

    // Dependency indices for re-checking only affected pairs.
    auto alpha = alphabet(l);
    std::vector<std::vector<StateId>> att_dep(n), def_dep(n);
    for (StateId x = 0; x < n; ++x) {
        att_dep[x].push_back(x);
        for (const auto& e : l.out(x))
            if (e.dst != x) att_dep[e.dst].push_back(x);
        for (auto y : mv.touched(x, alpha)) def_dep[y].push_back(x);
    }
    for (auto& v : att_dep) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    auto related = [&](const Pos& p) { return ref.ranks[at(p.first, p.second)] == -1; };
    auto side_ok = [&](StateId a, StateId d) {
        for (const auto& e : l.out(a)) {
            const auto& rs = mv.replies(d, e.action);
            if (!rs) continue;
            if (move_refutes(mv, e, d, [&](const Pos& p) { return !related(p); }, *rs)) return false;
        }
        return true;
    };

    std::vector<Pos> cand;
    for (StateId s = 0; s < n; ++s)
        for (StateId t = s + 1; t < n; ++t)
            if (ref.ranks[at(s, t)] == -1) cand.emplace_back(s, t);
    while (!cand.empty()) {
        ++ref.rounds;
        std::vector<Pos> removed;
        for (const auto& [s, t] : cand)
            if (ref.ranks[at(s, t)] == -1 && !(side_ok(s, t) && side_ok(t, s))) removed.emplace_back(s, t);
        for (const auto& [s, t] : removed) ref.ranks[at(s, t)] = ref.ranks[at(t, s)] = ref.rounds;
        std::set<Pos> next;
        for (const auto& [a, d] : removed)
            for (const auto& [x, y] : {Pos{a, d}, Pos{d, a}})
                for (auto p : att_dep[x])
                    for (auto q : def_dep[y]) {
                        Pos c = p < q ? Pos{p, q} : Pos{q, p};
                        if (c.first != c.second && ref.ranks[at(c.first, c.second)] == -1) next.insert(c);
                    }
        cand.assign(next.begin(), next.end());
    }
    ref.relation.bits.assign(n * n, 0);
    for (std::size_t i = 0; i < n * n; ++i) ref.relation.bits[i] = ref.ranks[i] == -1 ? 1 : 0;
    return ref;
}

namespace {

bool shape_ok(EquivKind kind, const Action& a, const std::vector<Edge>& path) {
    auto all_tau = [&](std::size_t from, std::size_t to) {
        for (std::size_t i = from; i < to; ++i)
            if (path[i].action.visible()) return false;
        return true;
    };
    auto tau_then_a = [&] { return !path.empty() && path.back().action == a && all_tau(0, path.size() - 1); };
    switch (kind) {
    case EquivKind::Strong:
        return path.size() == 1 && path[0].action == a;
    case EquivKind::Weak: {
        if (!a.visible()) return all_tau(0, path.size());
        std::size_t vis = 0;
        for (const auto& e : path)
            if (e.action.visible()) {
                if (e.action != a) return false;
                ++vis;
            }
        return vis == 1;
    }
    case EquivKind::QuasiStrong:
    case EquivKind::QsBranching:
        if (!a.visible()) return path.size() == 1 && path[0].action == a;
        return tau_then_a();
    case EquivKind::Branching:
        if (!a.visible() && path.empty()) return true;
        return tau_then_a();
    }
    return false;
}

// Recovers the reply a concrete defender path stands for.
Reply reply_of(EquivKind kind, const Action& a, StateId d, const std::vector<Edge>& path) {
    using S = Reply::Shape;
    if (kind == EquivKind::Weak && !a.visible()) return {S::Closure, false, d, path.empty() ? d : path.back().dst};
    if (path.empty()) return {S::Stay, false, d, d};
    if (kind == EquivKind::Weak) {
        for (const auto& e : path)
            if (e.action.visible()) return {S::StepClosure, false, e.src, path.back().dst};
    }
    bool chain = (kind == EquivKind::Branching) || (kind == EquivKind::QsBranching && a.visible());
    return {S::Step, chain, path.back().src, path.back().dst};
}

bool same_reply(const Reply& x, const Reply& y) {
    if (x.shape != y.shape || x.dst != y.dst || x.chain != y.chain) return false;
    return !x.chain || x.mid == y.mid;
}

bool has_edge(const Lts& l, const Edge& e) {
    if (e.src >= l.size()) return false;
    auto out = l.out(e.src);
    return std::binary_search(out.begin(), out.end(), e);
}

// Principal line of a winning attacker strategy. `value(l, r)` is the number
// of attacker moves needed from (l, r), or -1 when the attacker cannot win.
AttackerTrace build_trace(Moves& mv, StateId left, StateId right, const std::function<int(StateId, StateId)>& value) {
    const Lts& l = mv.lts();
    AttackerTrace tr;
    tr.kind = mv.kind();
    tr.left = left;
    tr.right = right;
    StateId L = left, R = right;
    int r = value(L, R);
    if (r < 0) throw std::logic_error("trace requested for a defended position");
    auto lost = [&](const Pos& p, bool att_left, int bound) {
        int v = att_left ? value(p.first, p.second) : value(p.second, p.first);
        return v >= 0 && v < bound;
    };
    for (;;) {
        if (r == 0) {
            tr.terminal = AttackerTrace::Terminal::DivergenceMismatch;
            break;
        }
        bool moved = false;
        for (int side = 0; side < 2 && !moved; ++side) {
            bool att_left = side == 0;
            StateId a = att_left ? L : R;
            StateId d = att_left ? R : L;
            if (!l.expanded(a)) continue;
            for (const auto& e : l.out(a)) {
                const auto& rs = mv.replies(d, e.action);
                if (!rs) continue;
                if (!move_refutes(mv, e, d, [&](const Pos& p) { return lost(p, att_left, r); }, *rs)) continue;
                TraceStep st;
                st.attacker_left = att_left;
                st.attack = e;
                if (rs->empty()) {
                    st.left = att_left ? e.dst : L;
                    st.right = att_left ? R : e.dst;
                    tr.steps.push_back(st);
                    tr.terminal = AttackerTrace::Terminal::NoMatch;
                    return tr;
                }
                // Defender prolongs; attacker then takes the quickest win.
                int best = -1;
                Pos best_pos;
                const Reply* best_reply = nullptr;
                std::vector<Pos> nx;
                for (const auto& rep : *rs) {
                    Moves::next(e.src, e.dst, rep, nx);
                    int v_min = std::numeric_limits<int>::max();
                    Pos pick;
                    for (const auto& p : nx) {
                        if (!lost(p, att_left, r)) continue;
                        int v = att_left ? value(p.first, p.second) : value(p.second, p.first);
                        if (v < v_min) {
                            v_min = v;
                            pick = p;
                        }
                    }
                    if (v_min > best) {
                        best = v_min;
                        best_pos = pick;
                        best_reply = &rep;
                    }
                }
                st.answered = true;
                st.answer = mv.path(d, e.action, *best_reply);
                st.left = att_left ? best_pos.first : best_pos.second;
                st.right = att_left ? best_pos.second : best_pos.first;
                tr.steps.push_back(std::move(st));
                L = tr.steps.back().left;
                R = tr.steps.back().right;
                r = best;
                moved = true;
                break;
            }
        }
        if (!moved) throw std::logic_error("no winning attacker move at a losing position");
    }
    return tr;
}

class BoundedGame {
public:
    BoundedGame(const Lts& l, EquivKind kind) : mv_(l, kind) {}

    Moves& moves() { return mv_; }
    std::size_t positions() const { return positions_; }

    bool wins(StateId s, StateId t, int k) {
        const Lts& l = mv_.lts();
        if (divergence_split(mv_.kind()) && definite_mismatch(l, s, t)) return true;
        if (k <= 0 || s == t) return false;
        auto& m = memo_[{s, t}];
        if (k >= m.win_from) return true;
        if (k <= m.lose_upto) return false;
        ++positions_;
        bool w = attack(s, t, true, k) || attack(t, s, false, k);
        auto& m2 = memo_[{s, t}];
        if (w)
            m2.win_from = std::min(m2.win_from, k);
        else
            m2.lose_upto = std::max(m2.lose_upto, k);
        return w;
    }

    int need(StateId s, StateId t, int limit) {
        for (int k = 0; k <= limit; ++k)
            if (wins(s, t, k)) return k;
        return -1;
    }

private:
    struct Info {
        int lose_upto = 0;
        int win_from = std::numeric_limits<int>::max();
    };

    bool attack(StateId a, StateId d, bool att_left, int k) {
        const Lts& l = mv_.lts();
        if (!l.expanded(a)) return false;
        for (const auto& e : l.out(a)) {
            const auto& rs = mv_.replies(d, e.action);
            if (!rs) continue;
            auto lost = [&](const Pos& p) {
                return att_left ? wins(p.first, p.second, k - 1) : wins(p.second, p.first, k - 1);
            };
            if (move_refutes(mv_, e, d, lost, *rs)) return true;
        }
        return false;
    }

    Moves mv_;
    std::map<Pos, Info> memo_;
    std::size_t positions_ = 0;
};

Formula diamond(const Action& a, std::vector<Formula> conj) {
    Formula f;
    f.kind = Formula::Kind::Diamond;
    f.action = a;
    if (conj.empty()) {
        f.args.push_back(Formula{});
    } else if (conj.size() == 1) {
        f.args.push_back(std::move(conj.front()));
    } else {
        Formula c;
        c.kind = Formula::Kind::And;
        c.args = std::move(conj);
        f.args.push_back(std::move(c));
    }
    return f;
}

// `rank(s, t)` is the number of strong rounds separating s and t (< 0 when
// not separated). Works on truncated graphs as long as the ranks only come
// from positions whose moves were fully explored.
Formula strong_formula(const Lts& l, const std::function<int(StateId, StateId)>& rank, StateId s, StateId t,
                       std::map<Pos, Formula>& memo) {
    if (auto it = memo.find({s, t}); it != memo.end()) return it->second;
    int r = rank(s, t);
    if (r < 1) throw std::logic_error("formula requested for strongly related states");
    for (int side = 0; side < 2; ++side) {
        StateId a = side == 0 ? s : t;
        StateId d = side == 0 ? t : s;
        if (!l.expanded(a) || !l.expanded(d)) continue;
        for (const auto& e : l.out(a)) {
            std::vector<StateId> answers;
            bool ok = true;
            for (const auto& f : l.out(d)) {
                if (f.action != e.action) continue;
                int v = rank(e.dst, f.dst);
                if (v < 0 || v >= r) {
                    ok = false;
                    break;
                }
                answers.push_back(f.dst);
            }
            if (!ok) continue;
            std::vector<Formula> conj;
            for (auto x : answers) conj.push_back(strong_formula(l, rank, e.dst, x, memo));
            Formula f = diamond(e.action, std::move(conj));
            if (side == 1) {
                Formula neg;
                neg.kind = Formula::Kind::Not;
                neg.args.push_back(std::move(f));
                f = std::move(neg);
            }
            memo.emplace(Pos{s, t}, f);
            return f;
        }
    }
    throw std::logic_error("no distinguishing move at a strongly separated pair");
}

void validate(const Lts& l, const AttackerTrace& tr) {
    std::string why;
    if (!replay(l, tr, &why)) throw std::logic_error("attacker trace failed replay: " + why);
}

}  // namespace

bool replay(const Lts& l, const AttackerTrace& tr, std::string* why) {
    auto fail = [&](std::string msg) {
        if (why) *why = std::move(msg);
        return false;
    };
    if (tr.left >= l.size() || tr.right >= l.size()) return fail("start position outside the LTS");
    Moves mv(l, tr.kind);
    StateId L = tr.left, R = tr.right;
    for (std::size_t i = 0; i < tr.steps.size(); ++i) {
        const auto& st = tr.steps[i];
        StateId a = st.attacker_left ? L : R;
        StateId d = st.attacker_left ? R : L;
        if (st.attack.src != a || !has_edge(l, st.attack))
            return fail("step " + std::to_string(i) + ": attack is not a transition");
        bool last = i + 1 == tr.steps.size();
        if (!st.answered) {
            if (!last) return fail("unanswered step before the end");
            if (tr.terminal != AttackerTrace::Terminal::NoMatch) return fail("unanswered step without no-match");
            const auto& rs = mv.replies(d, st.attack.action);
            if (!rs || !rs->empty()) return fail("defender has a reply to the final move");
            return true;
        }
        StateId cur = d;
        for (const auto& e : st.answer) {
            if (e.src != cur || !has_edge(l, e)) return fail("step " + std::to_string(i) + ": broken reply path");
            cur = e.dst;
        }
        if (!shape_ok(tr.kind, st.attack.action, st.answer))
            return fail("step " + std::to_string(i) + ": reply has the wrong shape");
        Reply rep = reply_of(tr.kind, st.attack.action, d, st.answer);
        const auto& rs = mv.replies(d, st.attack.action);
        if (!rs || std::none_of(rs->begin(), rs->end(), [&](const Reply& x) { return same_reply(x, rep); }))
            return fail("step " + std::to_string(i) + ": reply not legal for " + to_string(tr.kind));
        std::vector<Pos> nx;
        Moves::next(st.attack.src, st.attack.dst, rep, nx);
        Pos here = st.attacker_left ? Pos{st.left, st.right} : Pos{st.right, st.left};
        if (std::find(nx.begin(), nx.end(), here) == nx.end())
            return fail("step " + std::to_string(i) + ": continuation does not follow from the reply");
        L = st.left;
        R = st.right;
    }
    if (tr.terminal != AttackerTrace::Terminal::DivergenceMismatch) return fail("trace ends without a terminal");
    if (!definite_mismatch(l, L, R)) return fail("final position agrees on divergence");
    return true;
}

std::string render(const Formula& f) {
    switch (f.kind) {
    case Formula::Kind::True:
        return "tt";
    case Formula::Kind::Diamond:
        return "<" + label(f.action) + ">" + render(f.args.at(0));
    case Formula::Kind::And: {
        std::string s = "(";
        for (std::size_t i = 0; i < f.args.size(); ++i) s += (i ? " & " : "") + render(f.args[i]);
        return s + ")";
    }
    case Formula::Kind::Not:
        return "~" + render(f.args.at(0));
    }
    return "?";
}

bool holds(const Lts& l, StateId s, const Formula& f) {
    switch (f.kind) {
    case Formula::Kind::True:
        return true;
    case Formula::Kind::Diamond:
        for (const auto& e : l.out(s))
            if (e.action == f.action && holds(l, e.dst, f.args.at(0))) return true;
        return false;
    case Formula::Kind::And:
        return std::all_of(f.args.begin(), f.args.end(), [&](const Formula& g) { return holds(l, s, g); });
    case Formula::Kind::Not:
        return !holds(l, s, f.args.at(0));
    }
    return false;
}

Verdict check_pair(const Lts& l, StateId s, StateId t, EquivKind kind) {
    if (l.truncated) throw TruncatedInput("exact checking needs a fully explored LTS");
    if (s >= l.size() || t >= l.size()) throw UnknownState("state outside the LTS");
    Verdict v;
    v.kind = kind;
    v.left = s;
    v.right = t;
    bool partition_kind = kind == EquivKind::Strong || kind == EquivKind::Weak || kind == EquivKind::Branching;
    if (partition_kind) {
        auto p = compute_partition(l, kind);
        v.iterations = p.blocks.size();
        if (p.same(s, t)) {
            v.outcome = Verdict::Outcome::Equivalent;
            v.partition = std::move(p);
            return v;
        }
    }
    auto ref = refine_pairs(l, kind);
    v.iterations = static_cast<std::size_t>(ref.rounds);
    if (ref.rank(s, t) < 0) {
        if (partition_kind) throw std::logic_error("partition and pair refinement disagree");
        v.outcome = Verdict::Outcome::Equivalent;
        v.relation = std::move(ref.relation);
        return v;
    }
    Moves mv(l, kind);
    v.outcome = Verdict::Outcome::Inequivalent;
    v.trace = build_trace(mv, s, t, [&](StateId x, StateId y) { return ref.rank(x, y); });
    validate(l, *v.trace);
    if (kind == EquivKind::Strong) {
        std::map<Pos, Formula> memo;
        v.formula = strong_formula(l, [&](StateId x, StateId y) { return ref.rank(x, y); }, s, t, memo);
        if (!holds(l, s, *v.formula) || holds(l, t, *v.formula))
            throw std::logic_error("distinguishing formula does not separate the states");
    }
    return v;
}

Verdict check_bounded(const Lts& l, StateId s, StateId t, EquivKind kind, int depth) {
    if (s >= l.size() || t >= l.size()) throw UnknownState("state outside the LTS");
    if (depth < 0) throw InvalidRequest("game depth must be nonnegative");
    Verdict v;
    v.kind = kind;
    v.left = s;
    v.right = t;
    BoundedGame g(l, kind);
    int k = g.need(s, t, depth);
    v.bound = BoundReport{depth, 0, l.size(), l.frontier.size()};
    if (k < 0) {
        v.outcome = Verdict::Outcome::Unknown;
        v.bound->positions = g.positions();
        v.iterations = static_cast<std::size_t>(depth);
        return v;
    }
    v.outcome = Verdict::Outcome::Inequivalent;
    v.iterations = static_cast<std::size_t>(k);
    v.trace = build_trace(g.moves(), s, t, [&](StateId x, StateId y) { return g.need(x, y, k); });
    validate(l, *v.trace);
    if (kind == EquivKind::Strong) {
        std::map<Pos, Formula> memo;
        v.formula = strong_formula(l, [&](StateId x, StateId y) { return g.need(x, y, k); }, s, t, memo);
        if (!holds(l, s, *v.formula) || holds(l, t, *v.formula))
            throw std::logic_error("distinguishing formula does not separate the states");
    }
    v.bound->positions = g.positions();
    return v;
}

Verdict decide(const Lts& l, StateId s, StateId t, EquivKind kind, int game_depth) {
    return l.truncated ? check_bounded(l, s, t, kind, game_depth) : check_pair(l, s, t, kind);
}

Evidence distinguishing_evidence(const Lts& l, StateId s, StateId t, EquivKind kind, int game_depth) {
    if (s == t) throw InvalidRequest("a state cannot be distinguished from itself");
    Verdict v = decide(l, s, t, kind, game_depth);
    if (v.outcome != Verdict::Outcome::Inequivalent)
        throw InvalidRequest(std::string("states are not distinguished under ") + to_string(kind));
    return {std::move(*v.trace), std::move(v.formula)};
}

namespace {

// Tarjan over tau edges; components come out sinks first.
std::vector<std::vector<StateId>> tau_sccs(const Lts& l) {
    const std::size_t n = l.size();
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<char> on(n, 0);
    std::vector<StateId> stack;
    std::vector<std::vector<StateId>> out;
    int counter = 0;
    auto succ = [&](StateId v) {
        std::vector<StateId> s;
        for (const auto& e : l.out(v))
            if (!e.action.visible()) s.push_back(e.dst);
        return s;
    };
    for (StateId root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<std::tuple<StateId, std::vector<StateId>, std::size_t>> call;
        auto enter = [&](StateId v) {
            index[v] = low[v] = counter++;
            stack.push_back(v);
            on[v] = 1;
            call.emplace_back(v, succ(v), 0);
        };
        enter(root);
        while (!call.empty()) {
            auto& [v, ss, i] = call.back();
            if (i < ss.size()) {
                StateId w = ss[i++];
                if (index[w] < 0)
                    enter(w);
                else if (on[w])
                    low[v] = std::min(low[v], index[w]);
                continue;
            }
            StateId vv = v;
            if (low[vv] == index[vv]) {
                std::vector<StateId> comp;
                StateId w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on[w] = 0;
                    comp.push_back(w);
                } while (w != vv);
                out.push_back(std::move(comp));
            }
            call.pop_back();
            if (!call.empty()) {
                StateId parent = std::get<0>(call.back());
                low[parent] = std::min(low[parent], low[vv]);
            }
        }
    }
    return out;
}

}  // namespace

TauClassification classify_tau(const Lts& l) {
    return classify_tau(l, compute_partition(l, EquivKind::Weak));
}

TauClassification classify_tau(const Lts& l, const Partition& weak) {
    if (l.truncated) throw TruncatedInput("tau classification needs a fully explored LTS");
    TauClassification c;
    for (const auto& e : l.edges)
        if (!e.action.visible()) {
            c.tau_edges.push_back(e);
            c.state_changing.push_back(!weak.same(e.src, e.dst));
        }
    auto changing = [&](StateId s, StateId t) { return !weak.same(s, t); };
    const std::size_t n = l.size();
    constexpr std::size_t unbounded = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> f(n, 0);
    std::vector<int> comp_of(n, -1);
    auto comps = tau_sccs(l);
    for (std::size_t ci = 0; ci < comps.size(); ++ci)
        for (auto s : comps[ci]) comp_of[s] = static_cast<int>(ci);
    for (std::size_t ci = 0; ci < comps.size(); ++ci) {
        const auto& comp = comps[ci];
        bool cyclic = comp.size() > 1;
        for (auto s : comp)
            for (const auto& e : l.out(s))
                if (!e.action.visible() && e.dst == s) cyclic = true;
        std::size_t val = 0;
        for (auto s : comp)
            for (const auto& e : l.out(s)) {
                if (e.action.visible()) continue;
                bool inside = comp_of[e.dst] == static_cast<int>(ci);
                bool sc = changing(s, e.dst);
                if (inside) {
                    if (sc) val = unbounded;
                    continue;
                }
                std::size_t fv = f[e.dst];
                std::size_t here;
                if (fv == unbounded)
                    here = unbounded;
                else if (sc || fv > 0)
                    here = cyclic ? unbounded : fv + 1;
                else
                    here = 0;
                val = std::max(val, here);
            }
        for (auto s : comp) f[s] = val;
    }
    c.k.resize(n);
    for (StateId s = 0; s < n; ++s)
        if (f[s] != unbounded) c.k[s] = f[s];
    return c;
}

CoincidenceReport coincidence_report(const Lts& l) {
    if (l.truncated) throw TruncatedInput("coincidence report needs a fully explored LTS");
    const std::size_t n = l.size();
    auto strong = compute_partition(l, EquivKind::Strong);
    auto weak = compute_partition(l, EquivKind::Weak);
    auto branching = compute_partition(l, EquivKind::Branching);
    auto qs = refine_pairs(l, EquivKind::QuasiStrong).relation;
    auto qsb = refine_pairs(l, EquivKind::QsBranching).relation;
    CoincidenceReport rep;
    rep.states = n;
    rep.related.assign(5, 0);
    rep.strong_equals_weak = true;
    constexpr std::size_t max_listed = 64;
    auto violate = [&](const char* law, StateId s, StateId t) {
        if (rep.violations.size() < max_listed) rep.violations.push_back({law, s, t});
    };
    for (StateId s = 0; s < n; ++s)
        for (StateId t = 0; t < n; ++t) {
            bool S = strong.same(s, t), W = weak.same(s, t), B = branching.same(s, t);
            bool Q = qs.contains(s, t), QB = qsb.contains(s, t);
            rep.related[0] += S;
            rep.related[1] += W;
            rep.related[2] += B;
            rep.related[3] += Q;
            rep.related[4] += QB;
            if (S != W) rep.strong_equals_weak = false;
            if (W != Q) violate("weak = quasi-strong", s, t);
            if (W != QB) violate("weak = qs-branching", s, t);
            if (W != B) violate("weak = branching", s, t);
            if (S && !Q) violate("strong <= quasi-strong", s, t);
            if (Q && !W) violate("quasi-strong <= weak", s, t);
        }
    return rep;
}

}  // namespace pcalc
