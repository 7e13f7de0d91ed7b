#include "pcalc/hocore.hpp"

#include "pcalc/error.hpp"
#include "pcalc/syntax.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace pcalc {

std::string render(const HoAction& a) {
    switch (a.kind) {
    case HoAction::Kind::Tau:
        return "tau";
    case HoAction::Kind::In:
        return a.channel + "(" + render(a.payload) + ")";
    case HoAction::Kind::Out:
        return "'" + a.channel + "<" + render(a.payload) + ">";
    }
    return "?";
}

namespace {

Term substitute(const Term& p, const std::string& var, const Term& a) {
    switch (p.kind()) {
    case TermKind::Nil:
        return p;
    case TermKind::Var:
        return p.name() == var ? a : p;
    case TermKind::Input:
        if (!p.higher_order()) return Term::input(p.name(), substitute(p.body(), var, a));
        if (p.binder() == var) return p;
        return Term::ho_input(p.name(), p.binder(), substitute(p.body(), var, a));
    case TermKind::Output:
        if (!p.higher_order()) return Term::output(p.name(), substitute(p.body(), var, a));
        return Term::ho_output(p.name(), substitute(p.message(), var, a), substitute(p.body(), var, a));
    case TermKind::Repl:
        return Term::repl(substitute(p.body(), var, a));
    case TermKind::Par: {
        std::vector<Term> parts;
        for (const auto& q : p.parts()) parts.push_back(substitute(q, var, a));
        return Term::par(std::move(parts));
    }
    }
    return p;
}

void all_vars(const Term& t, std::set<std::string>& out) {
    switch (t.kind()) {
    case TermKind::Nil:
        return;
    case TermKind::Var:
        out.insert(t.name());
        return;
    case TermKind::Input:
        if (t.higher_order()) out.insert(t.binder());
        all_vars(t.body(), out);
        return;
    case TermKind::Output:
        if (t.higher_order()) all_vars(t.message(), out);
        all_vars(t.body(), out);
        return;
    case TermKind::Repl:
        all_vars(t.body(), out);
        return;
    case TermKind::Par:
        for (const auto& p : t.parts()) all_vars(p, out);
        return;
    }
}

// Q-part of the encodings: c(X).wrap('c<X>.0 | X | P).
Term replicator_body(const std::string& c, const std::string& x, const Term& p) {
    return Term::par({Term::ho_output(c, Term::var(x), Term::nil()), Term::var(x), p});
}

void require_closed(const Term& p, const char* what) {
    if (!is_closed(p)) throw OpenTerm(std::string(what) + " needs a closed process, got " + render(p));
}

}  // namespace

Term ho_subst(const Term& p, const std::string& var, const Term& a) {
    if (!is_closed(a)) throw InvalidRequest("substituted process must be closed: " + render(a));
    return canonicalize(substitute(p, var, a));
}

Term apply_context(const Term& context, const Term& a) { return ho_subst(context, kHole, a); }

std::string fresh_replicator(const std::set<std::string>& used) {
    for (int i = 0;; ++i) {
        std::string c = "c" + std::to_string(i);
        if (!used.contains(c)) return c;
    }
}

Term derived_replication(const Term& p, const std::string& replicator) {
    require_closed(p, "derived replication");
    Term q = Term::ho_input(replicator, "X", replicator_body(replicator, "X", p));
    return canonicalize(Term::par({Term::ho_output(replicator, q, Term::nil()), q}));
}

Term derived_replication(const Term& p) { return derived_replication(p, fresh_replicator(names(p))); }

Term guarded_replication(const Term& guarded, const std::string& replicator) {
    if (guarded.kind() != TermKind::Input && guarded.kind() != TermKind::Output)
        throw InvalidRequest("guarded replication needs a prefixed process, got " + render(guarded));
    if (!guarded.higher_order()) throw DialectMismatch("guarded replication is a HOCCSm construct");
    require_closed(guarded, "guarded replication");
    std::set<std::string> vars;
    all_vars(guarded, vars);
    std::string x = "X";
    for (int i = 0; vars.contains(x); ++i) x = "X" + std::to_string(i) + "_";
    Term inner = replicator_body(replicator, x, guarded.body());
    Term phi = guarded.kind() == TermKind::Input
                   ? Term::ho_input(guarded.name(), guarded.binder(), inner)
                   : Term::ho_output(guarded.name(), guarded.message(), inner);
    Term q = Term::ho_input(replicator, x, phi);
    return canonicalize(Term::par({Term::ho_output(replicator, q, Term::nil()), q}));
}

Term guarded_replication(const Term& guarded) {
    return guarded_replication(guarded, fresh_replicator(names(guarded)));
}

namespace {

void collect_messages(const Term& t, std::vector<Term>& out) {
    switch (t.kind()) {
    case TermKind::Output:
        if (t.higher_order()) {
            if (is_closed(t.message())) out.push_back(canonicalize(t.message()));
            collect_messages(t.message(), out);
        }
        collect_messages(t.body(), out);
        return;
    case TermKind::Input:
    case TermKind::Repl:
        collect_messages(t.body(), out);
        return;
    case TermKind::Par:
        for (const auto& p : t.parts()) collect_messages(p, out);
        return;
    default:
        return;
    }
}

void sort_unique(std::vector<Term>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

TestFamilies default_families(const Term& p, const Term& q, std::size_t size_bound) {
    std::set<std::string> used = names(p);
    used.merge(names(q));
    std::string m = "m";
    for (int i = 0; used.contains(m); ++i) m = "m" + std::to_string(i);

    Term trigger_in = canonicalize(Term::ho_input(m, "Y", Term::nil()));
    Term trigger_out = Term::ho_output(m, Term::nil(), Term::nil());
    Term hole = Term::var(kHole);

    TestFamilies fam;
    fam.size_bound = size_bound;
    std::vector<Term> inputs{Term::nil(), trigger_in, trigger_out};
    collect_messages(p, inputs);
    collect_messages(q, inputs);
    for (auto& t : inputs)
        if (t.is_nil() || t.size() <= size_bound) fam.inputs.push_back(t);
    sort_unique(fam.inputs);

    std::vector<Term> contexts{hole, Term::par({hole, trigger_in}), Term::par({hole, trigger_out}),
                               Term::par({hole, hole})};
    for (auto& t : contexts) {
        Term c = canonicalize(t);
        if (c == hole || c.size() <= size_bound) fam.contexts.push_back(c);
    }
    sort_unique(fam.contexts);
    return fam;
}

std::vector<HoTransition> ho_step(const Term& p, const TestFamilies& fam) {
    if (!is_closed(p)) throw OpenTerm("transitions are defined on closed processes, got " + render(p));
    std::vector<Term> parts = components(p);
    std::vector<HoTransition> out;

    auto rebuild = [&](std::size_t i, const Term& replacement, std::optional<std::size_t> j = {},
                       const Term& replacement_j = Term::nil()) {
        std::vector<Term> next = parts;
        next[i] = replacement;
        if (j) next[*j] = replacement_j;
        return canonicalize(Term::par(std::move(next)));
    };

    for (std::size_t i = 0; i < parts.size(); ++i) {
        const Term& c = parts[i];
        if (c.kind() == TermKind::Output) {
            if (!c.higher_order()) throw DialectMismatch("first-order prefix in a HOCCSm term");
            out.push_back({HoAction::out(c.name(), c.message()), rebuild(i, c.body())});
            for (std::size_t j = 0; j < parts.size(); ++j) {
                const Term& r = parts[j];
                if (j == i || r.kind() != TermKind::Input || r.name() != c.name()) continue;
                Term received = ho_subst(r.body(), r.binder(), c.message());
                out.push_back({HoAction::tau(), rebuild(i, c.body(), j, received)});
            }
        } else if (c.kind() == TermKind::Input) {
            if (!c.higher_order()) throw DialectMismatch("first-order prefix in a HOCCSm term");
            for (const auto& a : fam.inputs)
                out.push_back({HoAction::in(c.name(), a), rebuild(i, ho_subst(c.body(), c.binder(), a))});
        } else if (c.kind() == TermKind::Repl) {
            throw DialectMismatch("primitive replication in a HOCCSm term");
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

struct PairKey {
    Term left;
    Term right;
    int depth;
    bool operator==(const PairKey&) const = default;
};

struct PairKeyHash {
    std::size_t operator()(const PairKey& k) const {
        return k.left.hash() * 31u ^ k.right.hash() * 1000003u ^ static_cast<std::size_t>(k.depth);
    }
};

struct Answer {
    HoAction action;
    Term target;
};

class ContextGame {
public:
    ContextGame(GameMode mode, const TestFamilies& fam, const GameLimits& limits)
        : mode_(mode), fam_(fam), limits_(limits) {}

    /// Smallest number of attacker moves <= depth that wins from (l, r), or 0.
    int winning_depth(const Term& l, const Term& r, int depth) {
        for (int k = 1; k <= depth; ++k)
            if (wins(l, r, k)) return k;
        return 0;
    }

    bool wins(const Term& l, const Term& r, int k) {
        if (k <= 0 || l == r) return false;
        PairKey key{l, r, k};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        bool result = false;
        for (int side = 0; side < 2 && !result; ++side) {
            const Term& a = side == 0 ? l : r;
            const Term& d = side == 0 ? r : l;
            for (const auto& tr : transitions(a)) {
                if (move_wins(side == 0, tr, d, k)) {
                    result = true;
                    break;
                }
            }
        }
        memo_.emplace(std::move(key), result);
        return result;
    }

    bool move_wins(bool attacker_left, const HoTransition& tr, const Term& d, int k) {
        auto answers = defender_answers(d, tr.action);
        if (!answers) return false;
        for (const auto& ans : *answers)
            if (!answer_loses(attacker_left, tr, ans, k - 1)) return false;
        return true;
    }

    /// Attacker wins the continuation within k moves (picking a context
    /// after outputs).
    bool answer_loses(bool attacker_left, const HoTransition& tr, const Answer& ans, int k) {
        for (const auto& [l, r] : continuations(attacker_left, tr, ans))
            if (wins(l, r, k)) return true;
        return false;
    }

    std::vector<std::pair<Term, Term>> continuations(bool attacker_left, const HoTransition& tr,
                                                     const Answer& ans) const {
        std::vector<std::pair<Term, Term>> out;
        auto orient = [&](Term a, Term d) {
            return attacker_left ? std::pair{std::move(a), std::move(d)} : std::pair{std::move(d), std::move(a)};
        };
        if (tr.action.kind != HoAction::Kind::Out) {
            out.push_back(orient(tr.target, ans.target));
            return out;
        }
        for (const auto& e : fam_.contexts) {
            Term a = canonicalize(Term::par({apply_context(e, tr.action.payload), tr.target}));
            Term d = canonicalize(Term::par({apply_context(e, ans.action.payload), ans.target}));
            out.push_back(orient(std::move(a), std::move(d)));
        }
        return out;
    }

    const std::vector<HoTransition>& transitions(const Term& t) {
        auto it = steps_.find(t);
        if (it == steps_.end()) it = steps_.emplace(t, ho_step(t, fam_)).first;
        return it->second;
    }

    /// Every defender answer to `act`, or nullopt if the answer set could
    /// not be enumerated completely.
    std::optional<std::vector<Answer>> defender_answers(const Term& d, const HoAction& act) {
        std::vector<Answer> out;
        auto matches = [&](const HoAction& b) {
            if (b.kind != act.kind) return false;
            if (act.kind == HoAction::Kind::Tau) return true;
            if (b.channel != act.channel) return false;
            return act.kind == HoAction::Kind::Out || b.payload == act.payload;
        };
        if (mode_ == GameMode::Strong) {
            for (const auto& tr : transitions(d))
                if (matches(tr.action)) out.push_back({tr.action, tr.target});
            return out;
        }
        auto start = closure(d);
        if (!start) return std::nullopt;
        if (act.kind == HoAction::Kind::Tau) {
            for (const auto& t : *start) out.push_back({HoAction::tau(), t});
            return out;
        }
        for (const auto& s : *start) {
            for (const auto& tr : transitions(s)) {
                if (!matches(tr.action)) continue;
                auto after = closure(tr.target);
                if (!after) return std::nullopt;
                for (const auto& t : *after) out.push_back({tr.action, t});
            }
        }
        return out;
    }

    /// Reflexive tau-closure, nullopt when it exceeds the cap.
    std::optional<std::vector<Term>> closure(const Term& t) {
        std::vector<Term> seen{t};
        std::unordered_set<Term> index{t};
        for (std::size_t i = 0; i < seen.size(); ++i) {
            for (const auto& tr : transitions(seen[i])) {
                if (tr.action.kind != HoAction::Kind::Tau || index.contains(tr.target)) continue;
                if (seen.size() >= limits_.closure_states) return std::nullopt;
                index.insert(tr.target);
                seen.push_back(tr.target);
            }
        }
        return seen;
    }

    std::size_t positions() const { return memo_.size(); }

private:
    GameMode mode_;
    const TestFamilies& fam_;
    GameLimits limits_;
    std::unordered_map<PairKey, bool, PairKeyHash> memo_;
    std::unordered_map<Term, std::vector<HoTransition>> steps_;
};

}  // namespace

HoVerdict context_game(const Term& p, const Term& q, GameMode mode, int depth, const TestFamilies& fam,
                       const GameLimits& limits) {
    if (!is_closed(p) || !is_closed(q)) throw OpenTerm("context bisimulation is defined on closed processes");
    if (fam.inputs.empty() || fam.contexts.empty()) throw InvalidRequest("test families must be nonempty");
    if (depth < 0) throw InvalidRequest("game depth must be nonnegative");

    Term l = canonicalize(p);
    Term r = canonicalize(q);
    ContextGame game(mode, fam, limits);
    HoVerdict v;
    v.depth = depth;
    int k = game.winning_depth(l, r, depth);
    if (k == 0) {
        v.outcome = HoVerdict::Outcome::NoDistinctionUpTo;
        v.positions = game.positions();
        return v;
    }
    v.outcome = HoVerdict::Outcome::Inequivalent;
    v.rounds = k;

    // Principal line: attacker's first winning move, defender's most
    // resilient answer, attacker's fastest context.
    while (k > 0) {
        bool found = false;
        for (int side = 0; side < 2 && !found; ++side) {
            const Term& a = side == 0 ? l : r;
            const Term& d = side == 0 ? r : l;
            for (const auto& tr : game.transitions(a)) {
                if (!game.move_wins(side == 0, tr, d, k)) continue;
                found = true;
                ContextRound round{.attacker_left = side == 0,
                                   .attack = tr.action,
                                   .attacker_target = tr.target,
                                   .answer = std::nullopt,
                                   .defender_target = std::nullopt,
                                   .context = std::nullopt,
                                   .next_left = l,
                                   .next_right = r};
                auto answers = *game.defender_answers(d, tr.action);
                if (answers.empty()) {
                    v.trace.push_back(std::move(round));
                    k = 0;
                    break;
                }
                int best_need = -1;
                std::pair<Term, Term> best_next;
                for (const auto& ans : answers) {
                    auto conts = game.continuations(side == 0, tr, ans);
                    int need = 0;
                    std::size_t pick = 0;
                    for (int j = 1; j < k && need == 0; ++j)
                        for (std::size_t c = 0; c < conts.size(); ++c)
                            if (game.wins(conts[c].first, conts[c].second, j)) {
                                need = j;
                                pick = c;
                                break;
                            }
                    if (need > best_need) {
                        best_need = need;
                        best_next = conts[pick];
                        round.answer = ans.action;
                        round.defender_target = ans.target;
                        round.context = tr.action.kind == HoAction::Kind::Out
                                            ? std::optional<Term>{fam.contexts[pick]}
                                            : std::nullopt;
                    }
                }
                round.next_left = best_next.first;
                round.next_right = best_next.second;
                l = best_next.first;
                r = best_next.second;
                v.trace.push_back(std::move(round));
                k = best_need;
                break;
            }
        }
        if (!found) throw std::logic_error("context game: lost the winning strategy while tracing");
    }
    v.positions = game.positions();
    return v;
}

}  // namespace pcalc
