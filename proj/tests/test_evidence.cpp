#include "helpers.hpp"

#include "pcalc/corpus.hpp"
#include "pcalc/error.hpp"
#include "pcalc/evidence.hpp"

#include <doctest.h>

#include <random>

using namespace pcalc;

TEST_CASE("one unfolded copy of a replicated pair is certified up to context") {
    Term rep = ccs("!(a.'b | 'a)");
    Term after = ccs("'b | !(a.'b | 'a)");
    auto r = check_certificate(Certificate{{{rep, after}}});
    CHECK_MESSAGE(r.outcome == CertResult::Outcome::Certified, r.reason);
    bool peeled = false;
    for (const auto& ob : r.obligations) {
        CHECK(ob.via != Obligation::Via::None);
        peeled |= ob.via == Obligation::Via::Certificate && ob.context == ccs("'b");
    }
    CHECK(peeled);
}

TEST_CASE("disjoint behaviour is refuted") {
    auto r = check_certificate(Certificate{{{ccs("a.0"), ccs("'a.0")}}});
    CHECK(r.outcome == CertResult::Outcome::Refuted);
    REQUIRE(r.failure);
    CHECK(r.failure->action == Action::in("a"));
    CHECK(r.failed_pair == 0u);
}

TEST_CASE("the identity pair is certified syntactically") {
    Term rep = ccs("!(a | 'b.c)");
    auto r = check_certificate(Certificate{{{rep, rep}}});
    CHECK(r.outcome == CertResult::Outcome::Certified);
    for (const auto& ob : r.obligations) {
        CHECK(ob.via == Obligation::Via::Syntactic);
        CHECK(ob.context.is_nil());
    }
}

TEST_CASE("plain discipline needs exact pairs") {
    Term rep = ccs("!(a.'b | 'a)");
    Term after = ccs("'b | !(a.'b | 'a)");
    Certificate c{{{rep, after}}, Discipline::Plain};
    CHECK(check_certificate(c).outcome != CertResult::Outcome::Certified);
}

TEST_CASE("small budgets are reported, divergence mismatches refute") {
    Certificate c{{{ccs("!c.d | !'c"), ccs("!c.d | !'c | d")}}, Discipline::UptoContext, 1};
    CHECK(check_certificate(c).outcome == CertResult::Outcome::BudgetExhausted);
    auto r = check_certificate(Certificate{{{ccs("a"), ccs("a | !b | !'b")}}});
    CHECK(r.outcome == CertResult::Outcome::Refuted);
    CHECK(r.reason == "divergence mismatch");
    CHECK_THROWS_AS(check_certificate(Certificate{{}, Discipline::UptoContext, 0}), InvalidRequest);
}

TEST_CASE("certificate JSON") {
    auto c = certificate_from_json(R"({"discipline": "plain", "budget": 40, "pairs": [["!a", "a | !a"]]})");
    CHECK(c.discipline == Discipline::Plain);
    CHECK(c.closure_budget == 40u);
    REQUIRE(c.pairs.size() == 1);
    CHECK(c.pairs[0].second == ccs("!a | a"));
    CHECK_THROWS_AS(certificate_from_json("{"), InvalidRequest);
    CHECK_THROWS_AS(certificate_from_json(R"({"pairs": [["a"]]})"), InvalidRequest);
    CHECK_THROWS_AS(certificate_from_json(R"({"discipline": "loose", "pairs": []})"), InvalidRequest);
    CHECK_THROWS_AS(certificate_from_json(R"({"pairs": [["a.(", "b"]]})"), SyntaxError);
}

TEST_CASE("certified pairs are weakly equivalent") {
    auto corpus = finite_state_corpus(seed_from_env() + 40, 25, 60);
    std::size_t certified = 0, tried = 0;
    for (const auto& sample : corpus) {
        const auto& l = sample.lts;
        auto weak = compute_partition(l, EquivKind::Weak);
        auto known = known_from_partition(l, weak);
        for (StateId s = 0; s < l.size() && tried < 600; ++s)
            for (StateId t = s + 1; t < l.size() && t < s + 6; ++t) {
                ++tried;
                auto plain = check_certificate(Certificate{{{l.states[s], l.states[t]}}, Discipline::UptoContext, 200});
                if (plain.outcome == CertResult::Outcome::Certified) {
                    ++certified;
                    CHECK(weak.same(s, t));
                }
                if (weak.same(s, t)) {
                    auto helped =
                        check_certificate(Certificate{{{l.states[s], l.states[t]}}, Discipline::UptoContext, 200}, known);
                    CHECK(helped.outcome == CertResult::Outcome::Certified);
                }
            }
    }
    CHECK(certified > 0);
}
