#include "pcalc/semantics.hpp"

#include "pcalc/error.hpp"
#include "pcalc/syntax.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace pcalc {

Action Action::complement() const {
    switch (kind) {
    case Kind::In:
        return out(name);
    case Kind::Out:
        return in(name);
    case Kind::Tau:
        break;
    }
    throw std::logic_error("tau has no complement");
}

std::string label(const Action& a) {
    switch (a.kind) {
    case Action::Kind::Tau:
        return "tau";
    case Action::Kind::In:
        return a.name;
    case Action::Kind::Out:
        return "'" + a.name;
    }
    return "?";
}

Action parse_label(const std::string& s) {
    if (s == "tau") return Action::tau();
    if (!s.empty() && s[0] == '\'') return Action::out(s.substr(1));
    return Action::in(s);
}

const char* to_string(Divergence d) {
    switch (d) {
    case Divergence::No:
        return "no";
    case Divergence::Yes:
        return "yes";
    case Divergence::UnknownTruncated:
        return "unknown";
    }
    return "?";
}

namespace {

// Transitions with raw (non-canonical) targets.
std::vector<Transition> derive(const Term& p) {
    switch (p.kind()) {
    case TermKind::Nil:
        return {};
    case TermKind::Var:
        throw DialectMismatch("process variable in a CCSm term");
    case TermKind::Input:
    case TermKind::Output:
        if (p.higher_order()) throw DialectMismatch("higher-order prefix in a CCSm term");
        return {{p.kind() == TermKind::Input ? Action::in(p.name()) : Action::out(p.name()), p.body()}};
    case TermKind::Repl: {
        auto inner = derive(p.body());
        std::vector<Transition> out;
        for (const auto& t : inner) out.push_back({t.action, Term::par({t.target, p})});
        for (const auto& x : inner) {
            if (x.action.kind != Action::Kind::In) continue;
            for (const auto& y : inner)
                if (y.action == x.action.complement())
                    out.push_back({Action::tau(), Term::par({x.target, y.target, p})});
        }
        return out;
    }
    case TermKind::Par: {
        auto parts = p.parts();
        // Equal components (adjacent in canonical terms) move alike: derive
        // each run once and let its first member act, or the first two for a
        // communication inside the run.
        std::vector<std::size_t> first, count;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i > 0 && parts[i] == parts[i - 1]) {
                ++count.back();
                continue;
            }
            first.push_back(i);
            count.push_back(1);
        }
        std::vector<std::vector<Transition>> moves;
        moves.reserve(first.size());
        for (auto i : first) moves.push_back(derive(parts[i]));
        auto with = [&](std::size_t i, const Term& ti, std::size_t j, const Term* tj) {
            std::vector<Term> next(parts.begin(), parts.end());
            next[i] = ti;
            if (tj) next[j] = *tj;
            return Term::par(std::move(next));
        };
        std::vector<Transition> out;
        for (std::size_t g = 0; g < first.size(); ++g)
            for (const auto& t : moves[g]) out.push_back({t.action, with(first[g], t.target, first[g], nullptr)});
        for (std::size_t g = 0; g < first.size(); ++g)
            for (std::size_t h = 0; h < first.size(); ++h) {
                if (g == h && count[g] < 2) continue;
                std::size_t i = first[g];
                std::size_t j = g == h ? first[g] + 1 : first[h];
                for (const auto& x : moves[g]) {
                    if (x.action.kind != Action::Kind::In) continue;
                    for (const auto& y : moves[h])
                        if (y.action == x.action.complement())
                            out.push_back({Action::tau(), with(i, x.target, j, &y.target)});
                }
            }
        return out;
    }
    }
    return {};
}

}  // namespace

std::vector<Transition> step(const Term& p) {
    auto out = derive(p);
    for (auto& t : out) t.target = canonicalize(t.target);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool Lts::expanded(StateId s) const {
    if (s >= states.size()) throw UnknownState("state " + std::to_string(s) + " is not in the LTS");
    return expanded_[s] != 0;
}

std::span<const Edge> Lts::out(StateId s) const {
    if (s >= states.size()) throw UnknownState("state " + std::to_string(s) + " is not in the LTS");
    return std::span<const Edge>(edges).subspan(offsets_[s], offsets_[s + 1] - offsets_[s]);
}

std::optional<StateId> Lts::find(const Term& t) const {
    Term c = canonicalize(t);
    for (StateId i = 0; i < states.size(); ++i)
        if (states[i] == c) return i;
    return std::nullopt;
}

void Lts::index() {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::sort(frontier.begin(), frontier.end());
    offsets_.assign(states.size() + 1, 0);
    for (const auto& e : edges) {
        if (e.src >= states.size() || e.dst >= states.size())
            throw UnknownState("edge endpoint outside the state set");
        ++offsets_[e.src + 1];
    }
    for (std::size_t i = 0; i < states.size(); ++i) offsets_[i + 1] += offsets_[i];
    expanded_.assign(states.size(), 1);
    for (auto f : frontier) expanded_[f] = 0;
    truncated = !frontier.empty();
}

Lts build_lts(const Term& p, const Bounds& b) { return build_lts(std::vector<Term>{p}, b); }

Lts build_lts(const std::vector<Term>& roots, const Bounds& b) {
    if (b.max_states < 1 || b.max_depth < 1) throw InvalidRequest("bounds must be at least 1");
    Lts l;
    std::unordered_map<Term, StateId> ids;
    std::vector<std::size_t> depth;
    std::deque<StateId> queue;

    auto add = [&](const Term& t, std::size_t d) {
        auto id = static_cast<StateId>(l.states.size());
        ids.emplace(t, id);
        l.states.push_back(t);
        depth.push_back(d);
        queue.push_back(id);
        return id;
    };

    for (const auto& r : roots) {
        Term c = canonicalize(r);
        auto it = ids.find(c);
        StateId id = it != ids.end() ? it->second : add(c, 0);
        l.roots.push_back(id);
    }
    if (l.roots.empty()) throw InvalidRequest("build_lts needs at least one root");
    l.initial = l.roots.front();

    while (!queue.empty()) {
        StateId s = queue.front();
        queue.pop_front();
        if (depth[s] >= b.max_depth) {
            l.frontier.push_back(s);
            continue;
        }
        auto trs = step(l.states[s]);
        std::size_t fresh = 0;
        {
            std::vector<const Term*> unseen;
            for (const auto& t : trs)
                if (!ids.contains(t.target)) unseen.push_back(&t.target);
            std::sort(unseen.begin(), unseen.end(), [](const Term* x, const Term* y) { return *x < *y; });
            fresh = static_cast<std::size_t>(
                std::unique(unseen.begin(), unseen.end(), [](const Term* x, const Term* y) { return *x == *y; }) -
                unseen.begin());
        }
        if (l.states.size() + fresh > b.max_states) {
            l.frontier.push_back(s);
            continue;
        }
        for (const auto& t : trs) {
            auto it = ids.find(t.target);
            StateId dst = it != ids.end() ? it->second : add(t.target, depth[s] + 1);
            l.edges.push_back({s, t.action, dst});
        }
    }
    l.index();
    compute_divergence(l);
    return l;
}

namespace {

std::vector<std::vector<StateId>> tau_succ(const Lts& l) {
    std::vector<std::vector<StateId>> succ(l.size());
    for (const auto& e : l.edges)
        if (e.action.kind == Action::Kind::Tau) succ[e.src].push_back(e.dst);
    return succ;
}

// Iterative Tarjan; returns per-state flag "lies on a tau cycle".
std::vector<char> on_tau_cycle(const Lts& l, const std::vector<std::vector<StateId>>& succ) {
    const std::size_t n = l.size();
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<char> on_stack(n, 0), cyclic(n, 0);
    std::vector<StateId> stack;
    int counter = 0;
    for (StateId root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<std::pair<StateId, std::size_t>> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            auto& [v, i] = call.back();
            if (i < succ[v].size()) {
                StateId w = succ[v][i++];
                if (w == v) cyclic[v] = 1;
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<StateId> scc;
                StateId w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    scc.push_back(w);
                } while (w != v);
                if (scc.size() > 1)
                    for (auto x : scc) cyclic[x] = 1;
            }
            StateId done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
        }
    }
    return cyclic;
}

bool strictly_contains(const std::vector<Term>& big, const std::vector<Term>& small) {
    return big.size() > small.size() && std::includes(big.begin(), big.end(), small.begin(), small.end());
}

std::vector<Term> sorted_components(const Term& t) {
    auto c = components(t);
    std::sort(c.begin(), c.end());
    return c;
}

// BFS over tau edges from s; parent links for path recovery.
std::optional<GrowthWitness> grows_from(const Lts& l, const std::vector<std::vector<StateId>>& succ,
                                        const std::vector<std::vector<Term>>& comps, StateId s) {
    std::unordered_map<StateId, StateId> parent{{s, s}};
    std::deque<StateId> q{s};
    while (!q.empty()) {
        StateId u = q.front();
        q.pop_front();
        for (auto v : succ[u]) {
            if (parent.contains(v)) continue;
            parent.emplace(v, u);
            if (strictly_contains(comps[v], comps[s])) {
                GrowthWitness w;
                for (StateId x = v;; x = parent[x]) {
                    w.path.push_back(x);
                    if (x == s) break;
                }
                std::reverse(w.path.begin(), w.path.end());
                return w;
            }
            q.push_back(v);
        }
    }
    (void)l;
    return std::nullopt;
}

std::vector<char> backward_reach(const std::vector<std::vector<StateId>>& succ, std::vector<char> marked) {
    const std::size_t n = succ.size();
    std::vector<std::vector<StateId>> pred(n);
    for (StateId u = 0; u < n; ++u)
        for (auto v : succ[u]) pred[v].push_back(u);
    std::deque<StateId> q;
    for (StateId u = 0; u < n; ++u)
        if (marked[u]) q.push_back(u);
    while (!q.empty()) {
        StateId v = q.front();
        q.pop_front();
        for (auto u : pred[v])
            if (!marked[u]) {
                marked[u] = 1;
                q.push_back(u);
            }
    }
    return marked;
}

}  // namespace

void compute_divergence(Lts& l) {
    const std::size_t n = l.size();
    auto succ = tau_succ(l);
    auto yes = backward_reach(succ, on_tau_cycle(l, succ));
    if (l.truncated) {
        std::vector<std::vector<Term>> comps;
        comps.reserve(n);
        for (const auto& t : l.states) comps.push_back(sorted_components(t));
        // Deepest states first, so searches usually stop at a state already
        // known to diverge.
        std::vector<char> seen(n, 0);
        for (StateId u = static_cast<StateId>(n); u-- > 0;) {
            if (yes[u]) continue;
            std::vector<StateId> reach{u};
            seen[u] = 1;
            for (std::size_t i = 0; i < reach.size() && !yes[u]; ++i)
                for (auto v : succ[reach[i]]) {
                    if (seen[v]) continue;
                    seen[v] = 1;
                    reach.push_back(v);
                    if (yes[v] || strictly_contains(comps[v], comps[u])) {
                        yes[u] = 1;
                        break;
                    }
                }
            for (auto v : reach) seen[v] = 0;
        }
        yes = backward_reach(succ, std::move(yes));
    }
    std::vector<char> open(n, 0);
    for (StateId u = 0; u < n; ++u) open[u] = l.expanded(u) ? 0 : 1;
    auto unknown = backward_reach(succ, open);
    l.diverges.assign(n, Divergence::No);
    for (StateId u = 0; u < n; ++u) {
        if (yes[u])
            l.diverges[u] = Divergence::Yes;
        else if (unknown[u])
            l.diverges[u] = Divergence::UnknownTruncated;
    }
}

Divergence diverges(const Lts& l, StateId s) {
    if (s >= l.size()) throw UnknownState("state " + std::to_string(s) + " is not in the LTS");
    return l.diverges.at(s);
}

bool reaches_tau_cycle(const Lts& l, StateId s) {
    if (s >= l.size()) throw UnknownState("state " + std::to_string(s) + " is not in the LTS");
    auto succ = tau_succ(l);
    auto cyc = on_tau_cycle(l, succ);
    std::vector<char> seen(l.size(), 0);
    std::vector<StateId> reach{s};
    seen[s] = 1;
    for (std::size_t i = 0; i < reach.size(); ++i) {
        if (cyc[reach[i]]) return true;
        for (auto v : succ[reach[i]])
            if (!seen[v]) {
                seen[v] = 1;
                reach.push_back(v);
            }
    }
    return false;
}

std::optional<GrowthWitness> growth_witness(const Lts& l, StateId s) {
    if (s >= l.size()) throw UnknownState("state " + std::to_string(s) + " is not in the LTS");
    auto succ = tau_succ(l);
    std::vector<std::vector<Term>> comps;
    for (const auto& t : l.states) comps.push_back(sorted_components(t));
    // Visit tau-reachable states in BFS order and return the first that grows.
    std::unordered_map<StateId, StateId> parent{{s, s}};
    std::deque<StateId> q{s};
    while (!q.empty()) {
        StateId u = q.front();
        q.pop_front();
        if (auto w = grows_from(l, succ, comps, u)) {
            std::vector<StateId> prefix;
            for (StateId x = u; x != s; x = parent[x]) prefix.push_back(x);
            prefix.push_back(s);
            std::reverse(prefix.begin(), prefix.end());
            GrowthWitness full;
            full.path = prefix;
            full.base = prefix.size() - 1;
            full.path.insert(full.path.end(), w->path.begin() + 1, w->path.end());
            return full;
        }
        for (auto v : succ[u])
            if (!parent.contains(v)) {
                parent.emplace(v, u);
                q.push_back(v);
            }
    }
    return std::nullopt;
}

std::vector<std::vector<StateId>> tau_closure(const Lts& l) {
    auto succ = tau_succ(l);
    std::vector<std::vector<StateId>> out(l.size());
    std::vector<char> seen(l.size(), 0);
    for (StateId s = 0; s < l.size(); ++s) {
        std::vector<StateId> reach{s};
        seen[s] = 1;
        for (std::size_t i = 0; i < reach.size(); ++i)
            for (auto v : succ[reach[i]])
                if (!seen[v]) {
                    seen[v] = 1;
                    reach.push_back(v);
                }
        for (auto v : reach) seen[v] = 0;
        std::sort(reach.begin(), reach.end());
        out[s] = std::move(reach);
    }
    return out;
}

Saturation saturate(const Lts& l, SaturationMode mode) {
    if (l.truncated) throw SaturationOnTruncated("saturation needs a fully explored LTS");
    auto closure = tau_closure(l);
    Saturation sat;
    sat.mode = mode;
    for (StateId s = 0; s < l.size(); ++s) {
        std::vector<SatEdge> local;
        for (auto t : closure[s]) local.push_back({s, Action::tau(), t, false});
        for (auto u : closure[s])
            for (const auto& e : l.out(u)) {
                if (!e.action.visible()) continue;
                if (mode == SaturationMode::Delay) {
                    local.push_back({s, e.action, e.dst, false});
                } else {
                    for (auto w : closure[e.dst]) local.push_back({s, e.action, w, false});
                }
            }
        std::sort(local.begin(), local.end());
        local.erase(std::unique(local.begin(), local.end()), local.end());
        auto prim = l.out(s);
        for (auto& e : local)
            e.primitive = std::binary_search(prim.begin(), prim.end(), Edge{e.src, e.action, e.dst});
        sat.edges.insert(sat.edges.end(), local.begin(), local.end());
    }
    sat.offsets.assign(l.size() + 1, 0);
    for (const auto& e : sat.edges) ++sat.offsets[e.src + 1];
    for (std::size_t i = 0; i < l.size(); ++i) sat.offsets[i + 1] += sat.offsets[i];
    return sat;
}

}  // namespace pcalc
