#include "pcalc/evidence.hpp"

#include "pcalc/error.hpp"
#include "pcalc/syntax.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace pcalc {

const char* to_string(Discipline d) { return d == Discipline::Plain ? "plain" : "upto-context"; }

const char* to_string(Obligation::Via v) {
    switch (v) {
    case Obligation::Via::Certificate:
        return "certificate";
    case Obligation::Via::Syntactic:
        return "syntactic";
    case Obligation::Via::Known:
        return "known";
    case Obligation::Via::None:
        return "none";
    }
    return "?";
}

const char* to_string(CertResult::Outcome o) {
    switch (o) {
    case CertResult::Outcome::Certified:
        return "certified";
    case CertResult::Outcome::Refuted:
        return "refuted";
    case CertResult::Outcome::BudgetExhausted:
        return "budget-exhausted";
    }
    return "?";
}

namespace {

Term ccsm_term(const std::string& text) {
    auto r = parse(text, Dialect::Ccsm);
    return r.term;
}

using Multiset = std::vector<Term>;

Multiset sorted_components(const Term& t) {
    auto c = components(t);
    std::sort(c.begin(), c.end());
    return c;
}

// big - small, or nullopt if small is not contained in big.
std::optional<Multiset> minus(const Multiset& big, const Multiset& small) {
    if (!std::includes(big.begin(), big.end(), small.begin(), small.end())) return std::nullopt;
    Multiset out;
    std::set_difference(big.begin(), big.end(), small.begin(), small.end(), std::back_inserter(out));
    return out;
}

struct Decomposition {
    Term context;
    Term p1;
    Term q1;
    Obligation::Via via;
};

class Checker {
public:
    Checker(const Certificate& c, const KnownEquiv& known) : c_(c), known_(known) {
        for (const auto& [p, q] : c.pairs) {
            related_.emplace_back(p, q);
            related_.emplace_back(q, p);
        }
    }

    std::optional<Decomposition> decompose(const Term& p, const Term& q) const {
        if (p == q) return Decomposition{Term::nil(), p, q, Obligation::Via::Syntactic};
        if (c_.discipline == Discipline::Plain) {
            for (const auto& [a, b] : related_)
                if (a == p && b == q) return Decomposition{Term::nil(), p, q, Obligation::Via::Certificate};
            if (known_ && known_(p, q)) return Decomposition{Term::nil(), p, q, Obligation::Via::Known};
            return std::nullopt;
        }
        Multiset pm = sorted_components(p), qm = sorted_components(q);
        for (const auto& [a, b] : related_) {
            auto rp = minus(pm, sorted_components(a));
            if (!rp) continue;
            auto rq = minus(qm, sorted_components(b));
            if (rq && *rp == *rq) return Decomposition{canonicalize(Term::par(*rp)), a, b, Obligation::Via::Certificate};
        }
        if (known_) {
            Multiset common;
            std::set_intersection(pm.begin(), pm.end(), qm.begin(), qm.end(), std::back_inserter(common));
            // Enumerate shared contexts, smallest first, up to a fixed cap.
            constexpr std::size_t cap = 10;
            if (common.size() > cap) common.resize(cap);
            const std::size_t m = common.size();
            std::vector<std::size_t> masks(std::size_t(1) << m);
            for (std::size_t i = 0; i < masks.size(); ++i) masks[i] = i;
            std::stable_sort(masks.begin(), masks.end(), [](std::size_t x, std::size_t y) {
                return __builtin_popcountll(x) < __builtin_popcountll(y);
            });
            std::set<Multiset> tried;
            for (auto mask : masks) {
                Multiset t;
                for (std::size_t i = 0; i < m; ++i)
                    if (mask >> i & 1) t.push_back(common[i]);
                if (!tried.insert(t).second) continue;
                Term p1 = canonicalize(Term::par(*minus(pm, t)));
                Term q1 = canonicalize(Term::par(*minus(qm, t)));
                if (known_(p1, q1)) return Decomposition{canonicalize(Term::par(t)), p1, q1, Obligation::Via::Known};
            }
        }
        return std::nullopt;
    }

    // Searches the weak a-derivatives of q (BFS, tau before a, then tau after)
    // for one that decomposes against p_target. `complete` reports whether the
    // derivative set was exhausted within the budget.
    std::optional<std::pair<Term, Decomposition>> reply(const Term& q, const Action& a, const Term& p_target,
                                                        bool& complete) const {
        complete = true;
        std::deque<std::pair<Term, bool>> queue;
        std::unordered_set<Term> seen[2];
        auto visit = [&](const Term& t, bool after) -> std::optional<std::pair<Term, Decomposition>> {
            if (!seen[after].insert(t).second) return std::nullopt;
            queue.emplace_back(t, after);
            if (after || !a.visible())
                if (auto d = decompose(p_target, t)) return std::make_pair(t, *d);
            return std::nullopt;
        };
        if (auto hit = visit(q, false)) return hit;
        std::size_t explored = 0;
        while (!queue.empty()) {
            auto [t, after] = queue.front();
            queue.pop_front();
            if (++explored > c_.closure_budget) {
                complete = false;
                return std::nullopt;
            }
            for (const auto& tr : step(t)) {
                if (!tr.action.visible()) {
                    if (auto hit = visit(tr.target, after)) return hit;
                } else if (!after && a.visible() && tr.action == a) {
                    if (auto hit = visit(tr.target, true)) return hit;
                }
            }
        }
        return std::nullopt;
    }

private:
    const Certificate& c_;
    const KnownEquiv& known_;
    std::vector<std::pair<Term, Term>> related_;
};

Divergence root_divergence(const Term& t, std::size_t budget) {
    auto l = build_lts(t, Bounds{budget, budget});
    return l.diverges.at(l.initial);
}

}  // namespace

Certificate certificate_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidRequest(std::string("certificate is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("pairs") || !j["pairs"].is_array())
        throw InvalidRequest("certificate needs a \"pairs\" array");
    Certificate c;
    if (j.contains("discipline")) {
        auto d = j["discipline"].get<std::string>();
        if (d == "plain")
            c.discipline = Discipline::Plain;
        else if (d == "upto-context")
            c.discipline = Discipline::UptoContext;
        else
            throw InvalidRequest("unknown discipline \"" + d + "\"");
    }
    if (j.contains("budget")) {
        if (!j["budget"].is_number_integer() || j["budget"].get<long long>() < 0)
            throw InvalidRequest("budget must be a nonnegative integer");
        c.closure_budget = j["budget"].get<std::size_t>();
    }
    for (const auto& p : j["pairs"]) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
            throw InvalidRequest("each pair must be a two-element array of terms");
        c.pairs.emplace_back(ccsm_term(p[0].get<std::string>()), ccsm_term(p[1].get<std::string>()));
    }
    return c;
}

KnownEquiv known_from_partition(const Lts& l, const Partition& p) {
    auto index = std::make_shared<std::unordered_map<Term, StateId>>();
    for (StateId s = 0; s < l.size(); ++s) index->emplace(l.states[s], s);
    return [index, &p](const Term& a, const Term& b) {
        auto x = index->find(a);
        auto y = index->find(b);
        return x != index->end() && y != index->end() && p.same(x->second, y->second);
    };
}

CertResult check_certificate(const Certificate& c, const KnownEquiv& known) {
    if (c.closure_budget == 0) throw InvalidRequest("closure budget must be positive");
    for (const auto& [p, q] : c.pairs)
        for (const auto* t : {&p, &q})
            if (auto d = implied_dialect(*t); d && *d != Dialect::Ccsm)
                throw InvalidRequest("certificates relate CCSm terms only");

    Checker checker(c, known);
    CertResult res;
    auto fail = [&](CertResult::Outcome o, std::size_t pair, std::string reason, std::optional<Obligation> ob) {
        if (res.outcome == CertResult::Outcome::Refuted) return;
        if (o == CertResult::Outcome::BudgetExhausted && res.failed_pair) return;
        res.outcome = o;
        res.failed_pair = pair;
        res.reason = std::move(reason);
        res.failure = std::move(ob);
    };

    for (std::size_t i = 0; i < c.pairs.size(); ++i) {
        const auto& [p, q] = c.pairs[i];
        auto dp = root_divergence(p, c.closure_budget);
        auto dq = root_divergence(q, c.closure_budget);
        if (dp != dq) {
            if (dp == Divergence::UnknownTruncated || dq == Divergence::UnknownTruncated) {
                fail(CertResult::Outcome::BudgetExhausted, i, "divergence undetermined within budget", std::nullopt);
            } else {
                fail(CertResult::Outcome::Refuted, i, "divergence mismatch", std::nullopt);
            }
        }
        for (int side = 0; side < 2; ++side) {
            const Term& chal = side == 0 ? p : q;
            const Term& def = side == 0 ? q : p;
            for (const auto& tr : step(chal)) {
                Obligation ob;
                ob.pair = i;
                ob.challenger_left = side == 0;
                ob.action = tr.action;
                ob.challenger_target = tr.target;
                bool complete = true;
                if (auto hit = checker.reply(def, tr.action, tr.target, complete)) {
                    ob.reply_target = hit->first;
                    ob.context = hit->second.context;
                    ob.residual = std::make_pair(hit->second.p1, hit->second.q1);
                    ob.via = hit->second.via;
                    res.obligations.push_back(std::move(ob));
                    continue;
                }
                res.obligations.push_back(ob);
                if (complete) {
                    fail(CertResult::Outcome::Refuted, i, "no weak reply to " + label(tr.action) + " decomposes",
                         ob);
                } else {
                    fail(CertResult::Outcome::BudgetExhausted, i,
                         "no decomposing reply to " + label(tr.action) + " within budget", ob);
                }
            }
        }
    }
    return res;
}

}  // namespace pcalc
