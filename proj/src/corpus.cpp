#include "pcalc/corpus.hpp"

#include "pcalc/equivalence.hpp"
#include "pcalc/error.hpp"
#include "pcalc/evidence.hpp"
#include "pcalc/hocore.hpp"
#include "pcalc/syntax.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>

namespace pcalc {

std::uint64_t seed_from_env(std::uint64_t fallback) {
    const char* v = std::getenv("PCALC_SEED");
    if (!v || !*v) return fallback;
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v, v + std::strlen(v), out);
    if (ec != std::errc() || *ptr != '\0') return fallback;
    return out;
}

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

double unit(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

Term prefix(std::mt19937_64& rng, const RandomTermOptions& o, Term body) {
    const auto& n = o.names[pick(rng, o.names.size())];
    return unit(rng) < 0.5 ? Term::input(n, std::move(body)) : Term::output(n, std::move(body));
}

Term gen(std::mt19937_64& rng, const RandomTermOptions& o, int depth) {
    double r = unit(rng);
    if (r < o.replication) return Term::repl(prefix(rng, o, Term::nil()));
    if (depth <= 0) return unit(rng) < 0.15 ? Term::nil() : prefix(rng, o, Term::nil());
    r = unit(rng);
    if (r < 0.08) return Term::nil();
    if (r < 0.65) return prefix(rng, o, gen(rng, o, depth - 1));
    std::size_t width = 2 + pick(rng, std::max<std::size_t>(o.max_width, 2) - 1);
    std::vector<Term> parts;
    for (std::size_t i = 0; i < width; ++i) parts.push_back(gen(rng, o, depth - 1));
    return Term::par(std::move(parts));
}

Term perturb(std::mt19937_64& rng, const RandomTermOptions& o, const Term& t) {
    const auto& x = o.names[pick(rng, o.names.size())];
    switch (pick(rng, 4)) {
    case 0:
        return canonicalize(Term::par({t, prefix(rng, o, Term::nil())}));
    case 1:
        return canonicalize(Term::par({t, Term::repl(prefix(rng, o, Term::nil()))}));
    case 2:
        // An extra internal step that may or may not matter.
        return canonicalize(Term::par({t, Term::input(x, Term::nil()), Term::output(x, Term::nil())}));
    default: {
        auto parts = components(t);
        if (parts.empty()) return canonicalize(Term::repl(Term::input(x, Term::nil())));
        parts.push_back(parts[pick(rng, parts.size())]);
        return canonicalize(Term::par(std::move(parts)));
    }
    }
}

}  // namespace

Term random_ccsm_term(std::mt19937_64& rng, const RandomTermOptions& options) {
    if (options.names.empty()) throw InvalidRequest("random terms need at least one name");
    return canonicalize(gen(rng, options, options.max_depth));
}

std::vector<FiniteSample> finite_state_corpus(std::uint64_t seed, std::size_t count, std::size_t max_states) {
    std::mt19937_64 rng(seed);
    RandomTermOptions o;
    o.max_depth = 3;
    std::vector<FiniteSample> out;
    std::size_t attempts = 0;
    while (out.size() < count) {
        if (++attempts > count * 200) throw std::runtime_error("random corpus generation stalled");
        Term left = random_ccsm_term(rng, o);
        Term right = unit(rng) < 0.5 ? random_ccsm_term(rng, o) : perturb(rng, o, left);
        auto l = build_lts(std::vector<Term>{left, right}, Bounds{max_states, 64});
        if (l.truncated) continue;
        out.push_back({left, right, std::move(l)});
    }
    return out;
}

Lts random_lts(std::mt19937_64& rng, std::size_t max_states, std::size_t names) {
    if (max_states == 0 || names == 0) throw InvalidRequest("random LTS needs states and names");
    Lts l;
    std::size_t n = 1 + pick(rng, max_states);
    for (std::size_t i = 0; i < n; ++i) l.states.push_back(Term::input("s" + std::to_string(i), Term::nil()));
    auto action = [&] {
        if (unit(rng) < 0.35) return Action::tau();
        std::string nm(1, static_cast<char>('a' + pick(rng, names)));
        return unit(rng) < 0.5 ? Action::in(nm) : Action::out(nm);
    };
    for (StateId s = 0; s < n; ++s) {
        std::size_t deg = pick(rng, 4);
        for (std::size_t k = 0; k < deg; ++k)
            l.edges.push_back({s, action(), static_cast<StateId>(pick(rng, n))});
    }
    l.initial = 0;
    l.roots = {0};
    l.index();
    compute_divergence(l);
    return l;
}

const std::vector<CorpusEntry>& paper_corpus() {
    static const std::vector<CorpusEntry> entries = [] {
        const std::string p1 = "!c.d | !'c | d";
        const std::string p2 = "!c.d | !'c | !c";
        std::vector<CorpusEntry> v;
        auto add = [&](CorpusEntry e) { v.push_back(std::move(e)); };
        add({"growing-pair-sc", Dialect::Ccsm, {p1, p2}, "sc", "inequivalent",
             "the two growing replication terms differ syntactically", std::nullopt, 6});
        add({"growing-pair-strong", Dialect::Ccsm, {p1, p2}, "strong", "inequivalent:d",
             "P1 offers d at once, P2 only after an internal step", std::nullopt, 6});
        add({"growing-pair-weak", Dialect::Ccsm, {p1, p2}, "weak", "unknown@4",
             "weakly equivalent but infinite-state: only a bounded verdict", std::nullopt, 4});
        add({"growing-pair-qs", Dialect::Ccsm, {p1, p2}, "quasi-strong", "unknown@4",
             "delay matching absorbs the extra internal step", std::nullopt, 4});
        add({"repl-copies-sc", Dialect::Ccsm, {"!a", "!a | !a"}, "sc", "inequivalent",
             "replication is idempotent only up to bisimilarity", std::nullopt, 6});
        add({"repl-copies-strong", Dialect::Ccsm, {"!a", "!a | !a"}, "strong", "equivalent",
             "strongly bisimilar but not structurally congruent", std::nullopt, 6});
        add({"repl-copies-weak", Dialect::Ccsm, {"!a", "!a | !a"}, "weak", "equivalent",
             "weak bisimilarity follows from strong", std::nullopt, 6});
        add({"repl-unfold-remark", Dialect::Ccsm, {"!a.c", "c | !a.c"}, "weak", "inequivalent:c",
             "an input derivative of !P reveals c, which !P cannot match", std::nullopt, 6});
        add({"repl-unfold-remark-strong", Dialect::Ccsm, {"!a.c", "c | !a.c"}, "strong", "inequivalent:c",
             "same refutation with single steps", std::nullopt, 6});
        add({"ho-unfold-strong", Dialect::Hoccsm, {"!'d<0>", "!'d<0> | 'd<0>"}, "context-strong",
             "inequivalent:'d<0>", "the replicated term only acts on its replicator at once", std::nullopt, 4});
        add({"ho-unfold-weak", Dialect::Hoccsm, {"!'d<0>", "!'d<0> | 'd<0>"}, "context-weak",
             "no-distinction@4", "one unfolding step lets the left side catch up", std::nullopt, 4});
        add({"ho-unfold-self", Dialect::Hoccsm, {"!'d<0>", "!'d<0>"}, "context-strong", "no-distinction@3",
             "identical terms are never distinguished", std::nullopt, 3});
        add({"diverge-repl-pair", Dialect::Ccsm, {"!(a | 'a)"}, "diverges", "yes",
             "a replicated pair-action diverges", std::nullopt, 6});
        add({"diverge-repl-split", Dialect::Ccsm, {"!a | !'a"}, "diverges", "yes",
             "two replicated halves diverge", std::nullopt, 6});
        add({"diverge-finite", Dialect::Ccsm, {"a.'b | 'a"}, "diverges", "no",
             "a single internal step", std::nullopt, 6});
        add({"diverge-growth", Dialect::Ccsm, {p1}, "diverges", "yes+growth",
             "each internal step adds a d component", Bounds{8, 3}, 6});
        add({"lts-small", Dialect::Ccsm, {"a.'b.0 | 'a.0"}, "lts", "states=6,tau=1,truncated=no",
             "exhaustive exploration of a finite term", Bounds{100, 100}, 6});
        add({"lts-truncated", Dialect::Ccsm, {p1}, "lts", "states=5,tau=4,truncated=yes",
             "growth forces truncation", Bounds{8, 3}, 6});
        add({"tau-preserving", Dialect::Ccsm, {"!a | !'a"}, "tau-classify", "sc=0,sp=1,k0=0",
             "internal steps of a replicated term keep its weak class", std::nullopt, 6});
        add({"tau-changing", Dialect::Ccsm, {"a.'b | 'a"}, "tau-classify", "sc=1,sp=0,k0=1",
             "a non-divergent term only has state-changing internal steps", std::nullopt, 6});
        add({"rep-invar-chain", Dialect::Ccsm, {"a.'b | 'a"}, "rep-invar", "certified:2",
             "every internal derivative of !P is weakly equivalent to !P", std::nullopt, 6});
        add({"rep-invar-pair", Dialect::Ccsm, {"a | 'a"}, "rep-invar", "certified:2",
             "both internal derivatives of !P are weakly equivalent to it", std::nullopt, 6});
        add({"rep-invar-inert", Dialect::Ccsm, {"a.(b | 'b)"}, "rep-invar", "certified:0",
             "!P has no internal step, so the claim holds vacuously", std::nullopt, 6});
        add({"qs-gap-weak", Dialect::Ccsm, {"a | 'b.'a | !b | !'b", "a | 'a | !b | !'b"}, "weak", "equivalent",
             "the guard 'b is absorbed by the divergent !b | !'b", std::nullopt, 6});
        add({"qs-gap-branching", Dialect::Ccsm, {"a | 'b.'a | !b | !'b", "a | 'a | !b | !'b"}, "branching",
             "equivalent", "same pair, branching", std::nullopt, 6});
        add({"qs-gap-qs", Dialect::Ccsm, {"a | 'b.'a | !b | !'b", "a | 'a | !b | !'b"}, "quasi-strong",
             "inequivalent:tau a", "the a/'a sync on the right needs two taus on the left", std::nullopt, 6});
        return v;
    }();
    return entries;
}

namespace {

std::string attacks(const AttackerTrace& t) {
    std::string s;
    for (const auto& st : t.steps) s += (s.empty() ? "" : " ") + label(st.attack.action);
    return s;
}

std::string rep_invar(const Term& p) {
    Term bang = canonicalize(Term::repl(p));
    std::size_t n = 0;
    for (const auto& tr : step(bang)) {
        if (tr.action.visible()) continue;
        ++n;
        Certificate c;
        c.pairs = {{bang, tr.target}};
        c.discipline = Discipline::UptoContext;
        auto r = check_certificate(c);
        if (r.outcome != CertResult::Outcome::Certified) return to_string(r.outcome);
    }
    return "certified:" + std::to_string(n);
}

}  // namespace

CorpusRun run_entry(const CorpusEntry& e) {
    std::vector<Term> terms;
    for (const auto& t : e.terms) terms.push_back(parse(t, e.dialect).term);
    Bounds b = e.bounds.value_or(Bounds{});
    std::string obs;
    if (e.check == "sc") {
        obs = sc_equal(terms.at(0), terms.at(1)) ? "equivalent" : "inequivalent";
    } else if (auto kind = parse_equiv_kind(e.check)) {
        auto l = build_lts(terms, b);
        auto v = decide(l, l.roots.at(0), l.roots.at(1), *kind, e.game_depth);
        obs = to_string(v.outcome);
        if (v.trace) obs += ":" + attacks(*v.trace);
        if (v.outcome == Verdict::Outcome::Unknown) obs += "@" + std::to_string(e.game_depth);
    } else if (e.check == "context-strong" || e.check == "context-weak") {
        auto mode = e.check == "context-strong" ? GameMode::Strong : GameMode::Weak;
        auto fam = default_families(terms.at(0), terms.at(1));
        auto v = context_game(terms.at(0), terms.at(1), mode, e.game_depth, fam);
        if (v.outcome == HoVerdict::Outcome::Inequivalent)
            obs = "inequivalent:" + render(v.trace.at(0).attack);
        else
            obs = "no-distinction@" + std::to_string(v.depth);
    } else if (e.check == "diverges") {
        auto l = build_lts(terms.at(0), b);
        obs = to_string(l.diverges.at(l.initial));
        if (l.diverges.at(l.initial) == Divergence::Yes && !reaches_tau_cycle(l, l.initial))
            obs += "+growth";
    } else if (e.check == "lts") {
        auto l = build_lts(terms.at(0), b);
        auto taus = std::count_if(l.edges.begin(), l.edges.end(), [](const Edge& x) { return !x.action.visible(); });
        obs = "states=" + std::to_string(l.size()) + ",tau=" + std::to_string(taus) +
              ",truncated=" + (l.truncated ? "yes" : "no");
    } else if (e.check == "tau-classify") {
        auto l = build_lts(terms.at(0), b);
        auto c = classify_tau(l);
        auto sc = std::count(c.state_changing.begin(), c.state_changing.end(), true);
        auto k0 = c.k.at(l.initial);
        obs = "sc=" + std::to_string(sc) + ",sp=" + std::to_string(c.state_changing.size() - sc) +
              ",k0=" + (k0 ? std::to_string(*k0) : std::string("unbounded"));
    } else if (e.check == "rep-invar") {
        obs = rep_invar(terms.at(0));
    } else {
        throw InvalidRequest("unknown corpus check \"" + e.check + "\"");
    }
    return {obs, obs == e.expected};
}

}  // namespace pcalc
