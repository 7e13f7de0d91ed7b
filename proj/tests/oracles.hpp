#pragma once

// Independent, deliberately naive reference implementations used to
// cross-check the library. Nothing here shares code with src/ beyond the
// Term/Lts data types and canonicalize().

#include "pcalc/equivalence.hpp"
#include "pcalc/semantics.hpp"
#include "pcalc/syntax.hpp"
#include "pcalc/term.hpp"

#include <algorithm>
#include <vector>

namespace oracle {

using pcalc::Action;
using pcalc::Lts;
using pcalc::StateId;
using pcalc::Term;
using pcalc::TermKind;
using pcalc::Transition;

// Binary view of an n-ary Par: p1 | (p2 | (... | pn)).
inline Term binary_tail(const std::vector<Term>& parts, std::size_t from) {
    if (from + 1 == parts.size()) return parts[from];
    return Term::par({parts[from], binary_tail(parts, from + 1)});
}

inline std::vector<Transition> raw_rules(const Term& p);

inline std::vector<Transition> par_rules(const Term& l, const Term& r) {
    std::vector<Transition> out;
    auto tl = raw_rules(l);
    auto tr = raw_rules(r);
    for (const auto& x : tl) out.push_back({x.action, Term::par({x.target, r})});
    for (const auto& y : tr) out.push_back({y.action, Term::par({l, y.target})});
    for (const auto& x : tl)
        for (const auto& y : tr)
            if (x.action.visible() && y.action == x.action.complement())
                out.push_back({Action::tau(), Term::par({x.target, y.target})});
    return out;
}

// The six rules, read off the term shape one node at a time. Targets are left
// unnormalised.
inline std::vector<Transition> raw_rules(const Term& p) {
    switch (p.kind()) {
    case TermKind::Input:
        return {{Action::in(p.name()), p.body()}};
    case TermKind::Output:
        return {{Action::out(p.name()), p.body()}};
    case TermKind::Par: {
        std::vector<Term> parts(p.parts().begin(), p.parts().end());
        if (parts.size() == 1) return raw_rules(parts[0]);
        return par_rules(parts[0], binary_tail(parts, 1));
    }
    case TermKind::Repl: {
        std::vector<Transition> out;
        auto body = raw_rules(p.body());
        for (const auto& x : body) out.push_back({x.action, Term::par({x.target, p})});
        for (const auto& x : body)
            for (const auto& y : body)
                if (x.action.visible() && y.action == x.action.complement())
                    out.push_back({Action::tau(), Term::par({Term::par({x.target, y.target}), p})});
        return out;
    }
    default:
        return {};
    }
}

inline std::vector<Transition> step(const Term& p) {
    auto out = raw_rules(p);
    for (auto& t : out) t.target = pcalc::canonicalize(t.target);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

using Matrix = std::vector<std::vector<char>>;

// s diverges iff it lies in the greatest set D where every member has a tau
// successor in D.
inline std::vector<char> divergent(const Lts& l) {
    std::vector<char> d(l.size(), 1);
    for (bool changed = true; changed;) {
        changed = false;
        for (StateId s = 0; s < l.size(); ++s) {
            if (!d[s]) continue;
            bool keep = false;
            for (const auto& e : l.edges)
                if (e.src == s && !e.action.visible() && d[e.dst]) keep = true;
            if (!keep) {
                d[s] = 0;
                changed = true;
            }
        }
    }
    return d;
}

// Reflexive-transitive tau reachability.
inline Matrix tau_star(const Lts& l) {
    const std::size_t n = l.size();
    Matrix m(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    for (const auto& e : l.edges)
        if (!e.action.visible()) m[e.src][e.dst] = 1;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (m[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (m[k][j]) m[i][j] = 1;
    return m;
}

class Gfp {
public:
    Gfp(const Lts& l, pcalc::EquivKind kind) : l_(l), kind_(kind), n_(l.size()), star_(tau_star(l)) {
        for (const auto& e : l.edges)
            if (std::find(actions_.begin(), actions_.end(), e.action) == actions_.end()) actions_.push_back(e.action);
        for (const auto& a : actions_) {
            Matrix adj(n_, std::vector<char>(n_, 0)), weak = adj, del = adj;
            for (const auto& e : l.edges)
                if (e.action == a) adj[e.src][e.dst] = 1;
            for (std::size_t t = 0; t < n_; ++t)
                for (std::size_t u = 0; u < n_; ++u)
                    if (star_[t][u])
                        for (std::size_t v = 0; v < n_; ++v)
                            if (adj[u][v]) {
                                del[t][v] = 1;
                                for (std::size_t w = 0; w < n_; ++w)
                                    if (star_[v][w]) weak[t][w] = 1;
                            }
            adj_.push_back(std::move(adj));
            weak_.push_back(std::move(weak));
            delay_.push_back(std::move(del));
        }
        auto div = divergent(l);
        r_.assign(n_, std::vector<char>(n_, 0));
        for (std::size_t s = 0; s < n_; ++s)
            for (std::size_t t = 0; t < n_; ++t) r_[s][t] = div[s] == div[t];
        for (bool changed = true; changed;) {
            changed = false;
            Matrix next = r_;
            for (std::size_t s = 0; s < n_; ++s)
                for (std::size_t t = 0; t < n_; ++t)
                    if (r_[s][t] && (!answers_all(s, t) || !answers_all(t, s))) {
                        next[s][t] = 0;
                        changed = true;
                    }
            r_ = std::move(next);
        }
    }

    bool related(StateId s, StateId t) const { return r_[s][t] != 0; }

private:
    bool answers_all(std::size_t s, std::size_t t) const {
        for (const auto& e : l_.edges)
            if (e.src == s && !answers(s, e, t)) return false;
        return true;
    }

    std::size_t slot(const Action& a) const {
        return std::size_t(std::find(actions_.begin(), actions_.end(), a) - actions_.begin());
    }

    // Does t answer the move s -a-> s2 under the current relation?
    bool answers(std::size_t s, const pcalc::Edge& m, std::size_t t) const {
        using K = pcalc::EquivKind;
        const std::size_t s2 = m.dst;
        const bool tau = !m.action.visible();
        const std::size_t a = slot(m.action);
        const Matrix& edge = adj_[a];
        for (std::size_t t2 = 0; t2 < n_; ++t2) {
            if (!r_[s2][t2]) continue;
            switch (kind_) {
            case K::Strong:
                if (edge[t][t2]) return true;
                break;
            case K::Weak:
                if (tau ? star_[t][t2] != 0 : weak_[a][t][t2] != 0) return true;
                break;
            case K::Branching:
                if (tau && t2 == t) return true;
                for (std::size_t mid = 0; mid < n_; ++mid)
                    if (star_[t][mid] && r_[s][mid] && edge[mid][t2]) return true;
                break;
            case K::QuasiStrong:
                if (tau ? edge[t][t2] != 0 : delay_[a][t][t2] != 0) return true;
                break;
            case K::QsBranching:
                if (tau) {
                    if (edge[t][t2]) return true;
                    break;
                }
                for (std::size_t mid = 0; mid < n_; ++mid)
                    if (star_[t][mid] && r_[s][mid] && edge[mid][t2]) return true;
                break;
            }
        }
        return false;
    }

    const Lts& l_;
    pcalc::EquivKind kind_;
    std::size_t n_;
    Matrix star_;
    Matrix r_;
    std::vector<Action> actions_;
    std::vector<Matrix> adj_, weak_, delay_;
};

}  // namespace oracle
