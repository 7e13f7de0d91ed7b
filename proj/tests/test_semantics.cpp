#include "helpers.hpp"
#include "oracles.hpp"

#include "pcalc/corpus.hpp"
#include "pcalc/error.hpp"
#include "pcalc/semantics.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace pcalc;

TEST_CASE("step on prefixes and replication") {
    auto a = step(ccs("a.0"));
    REQUIRE(a.size() == 1);
    CHECK(a[0].action == Action::in("a"));
    CHECK(a[0].target.is_nil());

    auto r = step(ccs("!a.0"));
    REQUIRE(r.size() == 1);
    CHECK(r[0].action == Action::in("a"));
    CHECK(r[0].target == ccs("!a.0"));

    // Both the inner communication and the self-communication of two copies.
    auto s = step(ccs("!(a | 'a)"));
    std::set<std::pair<std::string, Term>> got;
    for (const auto& t : s) got.emplace(label(t.action), t.target);
    std::set<std::pair<std::string, Term>> want{
        {"a", ccs("'a | !(a | 'a)")},
        {"'a", ccs("a | !(a | 'a)")},
        {"tau", ccs("!(a | 'a)")},
        {"tau", ccs("a | 'a | !(a | 'a)")},
    };
    CHECK(got == want);
}

TEST_CASE("labels") {
    CHECK(label(Action::tau()) == "tau");
    CHECK(label(Action::out("b")) == "'b");
    CHECK(parse_label("'b") == Action::out("b"));
    CHECK(parse_label("c") == Action::in("c"));
    CHECK(parse_label("tau") == Action::tau());
}

TEST_CASE("step agrees with the binary rule matcher") {
    std::mt19937_64 rng(seed_from_env() + 10);
    RandomTermOptions opt;
    opt.replication = 0.3;
    for (int i = 0; i < 3000; ++i) {
        Term t = random_ccsm_term(rng, opt);
        CHECK(step(t) == oracle::step(t));
    }
}

TEST_CASE("every tau is a complementary pair of visible actions") {
    std::mt19937_64 rng(seed_from_env() + 11);
    for (int i = 0; i < 2000; ++i) {
        Term t = random_ccsm_term(rng);
        auto tr = step(t);
        std::set<Action> visible;
        for (const auto& x : tr)
            if (x.action.visible()) visible.insert(x.action);
        for (const auto& x : tr) {
            if (x.action.visible()) continue;
            bool found = false;
            for (const auto& v : visible)
                if (v.kind == Action::Kind::In && visible.contains(v.complement())) found = true;
            CHECK(found);
        }
    }
}

TEST_CASE("build_lts on a small finite system") {
    auto l = build_lts(ccs("a.'b.0 | 'a.0"), Bounds{100, 100});
    CHECK(l.size() == 6);
    CHECK_FALSE(l.truncated);
    CHECK(l.frontier.empty());
    std::size_t taus = 0;
    for (const auto& e : l.edges) taus += !e.action.visible();
    CHECK(taus == 1);
    CHECK(l.states[l.initial] == ccs("a.'b | 'a"));
    for (StateId s = 0; s < l.size(); ++s) CHECK(l.out(s).size() == step(l.states[s]).size());
}

TEST_CASE("replicated pair grows without bound") {
    auto l = build_lts(ccs("!(a | 'a)"), Bounds{10, 10});
    CHECK(l.truncated);
    CHECK(l.size() <= 10);
    bool self_loop = false;
    for (const auto& e : l.out(l.initial)) self_loop |= !e.action.visible() && e.dst == l.initial;
    CHECK(self_loop);
}

TEST_CASE("the growing pair is cut off and diverges by growth") {
    Term p1 = ccs("!c.d | !'c | d");
    auto l = build_lts(p1, Bounds{8, 3});
    CHECK(l.truncated);
    CHECK_FALSE(l.frontier.empty());
    CHECK(diverges(l, l.initial) == Divergence::Yes);
    CHECK_FALSE(reaches_tau_cycle(l, l.initial));
    auto w = growth_witness(l, l.initial);
    REQUIRE(w);
    auto base = components(l.states[w->path[w->base]]);
    auto last = components(l.states[w->path.back()]);
    CHECK(last.size() > base.size());
    std::sort(base.begin(), base.end());
    std::sort(last.begin(), last.end());
    CHECK(std::includes(last.begin(), last.end(), base.begin(), base.end()));
    for (std::size_t i = 0; i + 1 < w->path.size(); ++i) {
        bool tau = false;
        for (const auto& e : l.out(w->path[i])) tau |= !e.action.visible() && e.dst == w->path[i + 1];
        CHECK(tau);
    }
}

TEST_CASE("divergence verdicts") {
    auto yes1 = build_lts(ccs("!(a | 'a)"));
    CHECK(diverges(yes1, yes1.initial) == Divergence::Yes);
    auto yes2 = build_lts(ccs("!a | !'a"));
    CHECK_FALSE(yes2.truncated);
    CHECK(diverges(yes2, yes2.initial) == Divergence::Yes);
    auto no = build_lts(ccs("a.'b.0 | 'a.0"));
    for (StateId s = 0; s < no.size(); ++s) CHECK(no.diverges[s] == Divergence::No);
    // The cut-off part is not tau-reachable from the root.
    auto quiet = build_lts(ccs("a.a.a.a.a.(b | 'b)"), Bounds{100, 2});
    CHECK(quiet.diverges[quiet.initial] == Divergence::No);
    auto open = build_lts(ccs("a | 'a.(b | 'b.(c | 'c))"), Bounds{100, 1});
    CHECK(open.diverges[open.initial] == Divergence::UnknownTruncated);
}

TEST_CASE("divergence matches the greatest-fixpoint oracle on complete graphs") {
    std::mt19937_64 rng(seed_from_env() + 12);
    for (int i = 0; i < 200; ++i) {
        auto l = random_lts(rng, 30);
        auto d = oracle::divergent(l);
        for (StateId s = 0; s < l.size(); ++s) CHECK((l.diverges[s] == Divergence::Yes) == (d[s] != 0));
    }
}

TEST_CASE("build_lts is deterministic") {
    std::mt19937_64 rng(seed_from_env() + 13);
    for (int i = 0; i < 200; ++i) {
        Term t = random_ccsm_term(rng);
        auto a = build_lts(t, Bounds{300, 20});
        auto b = build_lts(t, Bounds{300, 20});
        CHECK(a.states == b.states);
        CHECK(a.edges == b.edges);
        CHECK(a.frontier == b.frontier);
        CHECK(a.diverges == b.diverges);
    }
}

TEST_CASE("saturation matches tau-closure composition") {
    std::mt19937_64 rng(seed_from_env() + 14);
    for (int i = 0; i < 100; ++i) {
        auto l = random_lts(rng, 25);
        auto star = oracle::tau_star(l);
        for (auto mode : {SaturationMode::Weak, SaturationMode::Delay}) {
            std::set<std::tuple<StateId, Action, StateId>> want;
            for (StateId s = 0; s < l.size(); ++s)
                for (StateId t = 0; t < l.size(); ++t)
                    if (star[s][t]) want.emplace(s, Action::tau(), t);
            for (StateId s = 0; s < l.size(); ++s)
                for (StateId u = 0; u < l.size(); ++u) {
                    if (!star[s][u]) continue;
                    for (const auto& e : l.out(u)) {
                        if (!e.action.visible()) continue;
                        if (mode == SaturationMode::Delay) {
                            want.emplace(s, e.action, e.dst);
                            continue;
                        }
                        for (StateId t = 0; t < l.size(); ++t)
                            if (star[e.dst][t]) want.emplace(s, e.action, t);
                    }
                }
            auto sat = saturate(l, mode);
            std::set<std::tuple<StateId, Action, StateId>> got;
            for (const auto& e : sat.edges) got.emplace(e.src, e.action, e.dst);
            CHECK(got == want);
            CHECK(got.size() == sat.edges.size());
        }
    }
}

TEST_CASE("saturation refuses truncated graphs") {
    auto l = build_lts(ccs("!(a | 'a)"), Bounds{10, 10});
    CHECK_THROWS_AS(saturate(l, SaturationMode::Weak), SaturationOnTruncated);
}
