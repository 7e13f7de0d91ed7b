// Acceptance suite: one PASS/FAIL line per criterion, each with its own time
// limit. Exits non-zero if any criterion fails for a reason other than an
// oracle-confirmed counterexample to the law it checks.

#include "oracles.hpp"

#include "pcalc/cli.hpp"
#include "pcalc/corpus.hpp"
#include "pcalc/equivalence.hpp"
#include "pcalc/evidence.hpp"
#include "pcalc/hocore.hpp"
#include "pcalc/semantics.hpp"
#include "pcalc/syntax.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace pcalc;

namespace {

using Clock = std::chrono::steady_clock;

Term ccs(std::string_view s) { return parse(s, Dialect::Ccsm).term; }

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Collects failures and the slowest timed step of one criterion.
struct Check {
    std::vector<std::string> failures;
    double worst_ms = 0;
    std::string detail;

    // Failures that are confirmed counterexamples to the law under test
    // rather than defects; reported as FAIL but not counted by the exit code.
    std::vector<std::string> gaps;

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    void gap(const std::string& what) { gaps.push_back(what); }
    template <class F>
    void timed(double limit_ms, const std::string& what, F&& f) {
        auto t0 = Clock::now();
        f();
        double ms = ms_since(t0);
        worst_ms = std::max(worst_ms, ms);
        if (ms > limit_ms) failures.push_back(what + " took " + std::to_string(int(ms)) + " ms");
    }
};

int cli(std::vector<std::string> args, std::string* out = nullptr) {
    args.insert(args.begin(), "pcalc");
    std::ostringstream o, e;
    int code = run(args, o, e);
    if (out) *out = o.str();
    return code;
}

std::string write_temp(const std::string& name, const std::string& text) {
    std::string path = std::string(P_tmpdir) + "/pcalc-acceptance-" + name;
    FILE* f = std::fopen(path.c_str(), "w");
    std::fputs(text.c_str(), f);
    std::fclose(f);
    return path;
}

void criterion1(Check& c) {
    auto pair = write_temp("growing.proc", "!c.d | !'c | d\n---\n!c.d | !'c | !c\n");
    c.timed(1000, "strong check", [&] {
        std::string out;
        int code = cli({"check", "--equiv", "strong", "--json", pair}, &out);
        auto j = nlohmann::json::parse(out);
        c.expect(code == 1 && j["outcome"] == "inequivalent", "strong verdict");
        c.expect(j["trace"]["steps"].size() == 1, "trace length");
        c.expect(j["trace"]["steps"][0]["move"][1] == "d", "attacker plays d");
    });
    c.timed(1000, "weak check", [&] {
        std::string out;
        int code = cli({"check", "--equiv", "weak", "--game-depth", "4", "--json", pair}, &out);
        auto j = nlohmann::json::parse(out);
        c.expect(code == 2 && j["outcome"] == "unknown", "weak verdict");
        c.expect(j["bound"]["game_depth"] == 4, "weak bound");
    });
}

void criterion2(Check& c) {
    c.timed(5000, "context games", [&] {
        Term p = parse("'d<0>.0", Dialect::Hoccsm).term;
        Term left = derived_replication(p);
        Term right = canonicalize(Term::par({left, p}));
        auto fam = default_families(left, right);
        auto strong = context_game(left, right, GameMode::Strong, 4, fam);
        c.expect(strong.outcome == HoVerdict::Outcome::Inequivalent && strong.rounds == 1, "strong refutes");
        c.expect(!strong.trace.empty() && strong.trace[0].attack == HoAction::out("d", Term::nil()) &&
                     !strong.trace[0].answer,
                 "immediate 'd<0> is unanswered");
        auto weak = context_game(left, right, GameMode::Weak, 4, fam);
        c.expect(weak.outcome == HoVerdict::Outcome::NoDistinctionUpTo && weak.depth == 4, "weak bounded");
    });
}

void criterion3(Check& c) {
    std::size_t certified = 0;
    for (const char* text : {"a.'b | 'a", "a | 'a", "a.(b | 'b)"}) {
        c.timed(2000, text, [&] {
            Term rep = Term::repl(ccs(text));
            for (const auto& tr : step(rep)) {
                if (tr.action.visible()) continue;
                auto r = check_certificate(Certificate{{{rep, tr.target}}});
                c.expect(r.outcome == CertResult::Outcome::Certified, std::string(text) + ": " + r.reason);
                for (const auto& ob : r.obligations) {
                    if (!ob.residual) continue;
                    // Each discharge peels a common parallel context off both sides.
                    bool shaped = canonicalize(Term::par({ob.context, ob.residual->first})) == ob.challenger_target &&
                                  canonicalize(Term::par({ob.context, ob.residual->second})) == *ob.reply_target;
                    c.expect(shaped, "context shape");
                }
                ++certified;
            }
        });
    }
    c.detail = std::to_string(certified) + " certificates";
}

void criterion4(Check& c) {
    c.timed(1000, "weak check", [&] {
        auto pair = write_temp("remark.proc", "!a.c\n---\nc | !a.c\n");
        std::string out;
        int code = cli({"check", "--equiv", "weak", "--json", pair}, &out);
        auto j = nlohmann::json::parse(out);
        c.expect(code == 1 && j["outcome"] == "inequivalent", "verdict");
        c.expect(j["trace"]["steps"][0]["move"][1] == "c", "attacker plays c");
    });
}

void criterion5(Check& c) {
    auto verdict = [&](const char* text, Bounds b, Divergence want) {
        c.timed(1000, text, [&] {
            auto l = build_lts(ccs(text), b);
            c.expect(l.diverges[l.initial] == want, text);
        });
    };
    verdict("!(a | 'a)", {}, Divergence::Yes);
    verdict("!a | !'a", {}, Divergence::Yes);
    verdict("a.'b | 'a", {}, Divergence::No);
    c.timed(1000, "growth", [&] {
        auto l = build_lts(ccs("!c.d | !'c | d"), Bounds{8, 3});
        c.expect(l.truncated && l.diverges[l.initial] == Divergence::Yes, "growing pair diverges");
        c.expect(!reaches_tau_cycle(l, l.initial) && growth_witness(l, l.initial).has_value(), "via growth");
    });
}

const std::vector<FiniteSample>& corpus() {
    static const auto samples = finite_state_corpus(seed_from_env(), 200, 200);
    return samples;
}

bool replication_free(const Term& t) {
    if (t.kind() == TermKind::Repl) return false;
    if (t.kind() == TermKind::Par) {
        for (const auto& p : t.parts())
            if (!replication_free(p)) return false;
        return true;
    }
    if (t.kind() == TermKind::Input || t.kind() == TermKind::Output) return replication_free(t.body());
    return true;
}

void criterion6(Check& c) {
    std::size_t violations = 0, unconfirmed = 0, with_repl = 0, states = 0;
    std::string example;
    // Samples whose violations come with relations that all match the oracle.
    std::vector<char> confirmed;
    c.timed(60000, "coincidence suite", [&] {
        const auto& samples = corpus();
        c.expect(samples.size() >= 200, "corpus size");
        confirmed.assign(samples.size(), 0);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& s = samples[i];
            auto r = coincidence_report(s.lts);
            violations += r.violations.size();
            states += r.states;
            with_repl += !(replication_free(s.left) && replication_free(s.right));
            if (r.ok()) continue;
            bool agree = true;
            for (auto k : {EquivKind::Strong, EquivKind::Weak, EquivKind::Branching, EquivKind::QuasiStrong,
                           EquivKind::QsBranching}) {
                oracle::Gfp want(s.lts, k);
                auto rel = refine_pairs(s.lts, k).relation;
                for (StateId x = 0; x < s.lts.size(); ++x)
                    for (StateId y = 0; y < s.lts.size(); ++y) agree = agree && rel.contains(x, y) == want.related(x, y);
            }
            if (!agree) {
                ++unconfirmed;
                continue;
            }
            confirmed[i] = 1;
            if (example.empty()) {
                const auto& v = r.violations.front();
                example = "[" + v.law + "] " + render(s.lts.states[v.s], {.compact = true}) + "  vs  " +
                          render(s.lts.states[v.t], {.compact = true});
            }
        }
    });
    c.expect(unconfirmed == 0, std::to_string(unconfirmed) + " samples with violations the oracle does not confirm");
    if (violations > 0 && unconfirmed == 0)
        c.gap(std::to_string(violations) + " violations in " +
              std::to_string(std::count(confirmed.begin(), confirmed.end(), 1)) +
              " sample(s); all five relations match the naive oracle there; e.g. " + example);
    c.expect(with_repl > 0 && with_repl < corpus().size(), "corpus mixes replication-free and replicated terms");
    c.detail = std::to_string(corpus().size()) + " samples, " + std::to_string(states) + " states, " +
               std::to_string(with_repl) + " with replication";
}

// The inputs of the tau-classification properties for one LTS.
struct TauView {
    std::function<bool(StateId, StateId)> weak;
    std::vector<char> divergent;
    std::vector<std::vector<char>> preserving, changing;
    std::vector<std::optional<std::size_t>> k;
};

TauView library_view(const Lts& l) {
    auto part = std::make_shared<Partition>(compute_partition(l, EquivKind::Weak));
    auto tc = classify_tau(l, *part);
    TauView v;
    v.weak = [part](StateId s, StateId t) { return part->same(s, t); };
    for (auto d : l.diverges) v.divergent.push_back(d == Divergence::Yes);
    v.preserving.assign(l.size(), std::vector<char>(l.size(), 0));
    v.changing = v.preserving;
    for (std::size_t i = 0; i < tc.tau_edges.size(); ++i) {
        const auto& e = tc.tau_edges[i];
        (tc.state_changing[i] ? v.changing : v.preserving)[e.src][e.dst] = 1;
    }
    v.k = tc.k;
    return v;
}

// Everything recomputed from the naive fixpoint; k by Bellman-Ford style
// relaxation, unbounded when it keeps growing past n rounds.
TauView oracle_view(const Lts& l) {
    const std::size_t n = l.size();
    auto gfp = std::make_shared<oracle::Gfp>(l, EquivKind::Weak);
    TauView v;
    v.weak = [gfp](StateId s, StateId t) { return gfp->related(s, t); };
    v.divergent = oracle::divergent(l);
    v.preserving.assign(n, std::vector<char>(n, 0));
    v.changing = v.preserving;
    for (const auto& e : l.edges)
        if (!e.action.visible()) (gfp->related(e.src, e.dst) ? v.preserving : v.changing)[e.src][e.dst] = 1;
    std::vector<std::size_t> k(n, 0);
    std::vector<char> unbounded(n, 0);
    for (std::size_t round = 0; round <= n + 1; ++round) {
        bool changed = false;
        for (const auto& e : l.edges) {
            if (e.action.visible()) continue;
            std::size_t cand = (v.changing[e.src][e.dst] || k[e.dst] > 0) ? 1 + k[e.dst] : 0;
            if (cand > k[e.src]) {
                k[e.src] = cand;
                changed = true;
                if (round == n + 1) unbounded[e.src] = 1;
            }
        }
        if (!changed) break;
    }
    // Anything that can still reach a growing state is unbounded too.
    for (bool grew = true; grew;) {
        grew = false;
        for (const auto& e : l.edges)
            if (!e.action.visible() && unbounded[e.dst] && !unbounded[e.src]) unbounded[e.src] = grew = true;
    }
    for (std::size_t s = 0; s < n; ++s) v.k.push_back(unbounded[s] ? std::nullopt : std::optional(k[s]));
    return v;
}

struct PropertyCounts {
    std::array<std::size_t, 6> bad{};
    std::string example_b, example_e;
};

PropertyCounts property_counts(const Lts& l, const TauView& v) {
    const std::size_t n = l.size();
    PropertyCounts out;
    auto r = [&](StateId x) { return render(l.states[x], {.compact = true}); };
    // (a)
    for (StateId u = 0; u < n; ++u)
        for (StateId w = 0; w < n; ++w) out.bad[0] += !v.divergent[u] && v.preserving[u][w];
    // (b): nothing state-changing is tau-reachable after a state-preserving step.
    auto star = oracle::tau_star(l);
    for (StateId u = 0; u < n; ++u)
        for (StateId w = 0; w < n; ++w) {
            if (!v.preserving[u][w]) continue;
            for (StateId x = 0; x < n; ++x)
                if (star[w][x])
                    for (StateId y = 0; y < n; ++y)
                        if (v.changing[x][y]) {
                            ++out.bad[1];
                            if (out.example_b.empty())
                                out.example_b = r(u) + " -tau-> " + r(w) + " (state-preserving), then " + r(x) +
                                                " -tau-> " + r(y) + " (state-changing)";
                        }
        }
    // Closure under state-preserving taus, for delay answers.
    std::vector<std::vector<char>> sp_star(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i) sp_star[i][i] = 1;
    for (bool grew = true; grew;) {
        grew = false;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (sp_star[i][j])
                    for (std::size_t m = 0; m < n; ++m)
                        if (v.preserving[j][m] && !sp_star[i][m]) sp_star[i][m] = grew = true;
    }
    for (StateId s = 0; s < n; ++s)
        for (StateId t = 0; t < n; ++t) {
            if (s == t || !v.weak(s, t)) continue;
            for (const auto& e : l.out(s)) {
                auto lands = [&](StateId x) { return v.weak(x, e.dst); };
                bool immediate = false;
                for (const auto& f : l.out(t)) immediate |= f.action == e.action && lands(f.dst);
                if (!e.action.visible()) {
                    out.bad[2] += !immediate;  // (c)
                    continue;
                }
                bool delay = false;
                for (StateId m = 0; m < n; ++m)
                    if (sp_star[t][m])
                        for (const auto& f : l.out(m)) delay |= f.action == e.action && lands(f.dst);
                out.bad[3] += !delay;  // (d)
                if (!v.divergent[s] && !immediate) {  // (e)
                    ++out.bad[4];
                    if (out.example_e.empty())
                        out.example_e = r(s) + " -" + label(e.action) + "-> vs " + r(t) + ", both non-divergent";
                }
            }
            out.bad[5] += v.k[s] != v.k[t];  // (f)
        }
    return out;
}

void criterion7(Check& c) {
    std::array<std::size_t, 6> bad{}, confirmed{};
    std::array<std::string, 6> example;
    c.timed(60000, "property suite", [&] {
        for (const auto& sample : corpus()) {
            auto ours = property_counts(sample.lts, library_view(sample.lts));
            bool any = false;
            for (int i = 0; i < 6; ++i) {
                bad[i] += ours.bad[i];
                any |= ours.bad[i] > 0;
            }
            if (!any) continue;
            auto theirs = property_counts(sample.lts, oracle_view(sample.lts));
            for (int i = 0; i < 6; ++i) {
                if (ours.bad[i] == 0 || ours.bad[i] != theirs.bad[i]) continue;
                confirmed[i] += ours.bad[i];
                const std::string& ex = i == 1 ? ours.example_b : i == 4 ? ours.example_e : std::string();
                if (!ex.empty() && (example[i].empty() || ex.size() < example[i].size())) example[i] = ex;
            }
        }
    });
    std::string summary;
    for (int i = 0; i < 6; ++i) {
        const char p = char('a' + i);
        summary += std::string(i ? " " : "") + p + "=" + std::to_string(bad[i]);
        c.expect(bad[i] == confirmed[i], std::string("property ") + p + " has violations the oracle does not reproduce");
        if (confirmed[i] > 0)
            c.gap(std::string("property ") + p + ": " + std::to_string(confirmed[i]) +
                  " violations, reproduced from the naive oracle" + (example[i].empty() ? "" : "; e.g. " + example[i]));
    }
    c.detail = "violations " + summary;
}

void criterion8(Check& c) {
    std::size_t pairs = 0;
    c.timed(120000, "oracles", [&] {
        std::mt19937_64 rng(seed_from_env() + 8);
        constexpr EquivKind kinds[] = {EquivKind::Strong, EquivKind::Weak, EquivKind::Branching,
                                       EquivKind::QuasiStrong, EquivKind::QsBranching};
        for (int i = 0; i < 100; ++i) {
            auto l = random_lts(rng, 50);
            for (auto k : kinds) {
                oracle::Gfp want(l, k);
                auto rel = refine_pairs(l, k).relation;
                std::optional<Partition> part;
                if (k == EquivKind::Strong || k == EquivKind::Weak || k == EquivKind::Branching)
                    part = compute_partition(l, k);
                for (StateId s = 0; s < l.size(); ++s)
                    for (StateId t = 0; t < l.size(); ++t) {
                        ++pairs;
                        if (rel.contains(s, t) != want.related(s, t) || (part && part->same(s, t) != want.related(s, t)))
                            c.expect(false, std::string(to_string(k)) + " disagrees");
                    }
            }
        }
        RandomTermOptions opt;
        opt.replication = 0.3;
        std::size_t mismatched = 0;
        for (int i = 0; i < 10000; ++i) {
            Term t = random_ccsm_term(rng, opt);
            mismatched += step(t) != oracle::step(t);
        }
        c.expect(mismatched == 0, std::to_string(mismatched) + " step mismatches");
    });
    c.detail = std::to_string(pairs) + " state pairs, 10000 terms";
}

void criterion9(Check& c) {
    c.timed(60000, "run-all twice", [&] {
        std::string a, b, ja, jb;
        c.expect(cli({"paper-examples", "--run-all"}, &a) == 0, "run-all passes");
        c.expect(cli({"paper-examples", "--run-all"}, &b) == 0, "second run passes");
        c.expect(cli({"paper-examples", "--run-all", "--json"}, &ja) == 0, "json run passes");
        c.expect(cli({"paper-examples", "--run-all", "--json"}, &jb) == 0, "second json run passes");
        c.expect(a == b && ja == jb && !a.empty(), "byte-identical output");
        c.detail = std::to_string(std::count(a.begin(), a.end(), '\n')) + " examples";
    });
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::function<void(Check&)> body;
    };
    const std::vector<Criterion> all = {
        {1, "growing pair: strong refuted by d, weak open at depth 4", criterion1},
        {2, "HOCCSm unfolded replication: context-strong refuted, context-weak open", criterion2},
        {3, "replication invariance certified up to parallel context", criterion3},
        {4, "replicated input vs unfolded copy: weak refuted by c", criterion4},
        {5, "divergence verdicts", criterion5},
        {6, "coincidence of weak, quasi-strong, qs-branching and branching", criterion6},
        {7, "tau classification properties (a)-(f)", criterion7},
        {8, "checkers and step agree with naive oracles", criterion8},
        {9, "example corpus passes and is deterministic", criterion9},
    };
    std::cout << "seed " << seed_from_env() << "\n";
    int failed = 0, gaps = 0;
    for (const auto& cr : all) {
        Check c;
        try {
            cr.body(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        bool ok = c.failures.empty() && c.gaps.empty();
        failed += !c.failures.empty();
        gaps += !c.gaps.empty();
        std::printf("criterion %d: %s  %s  [max %.0f ms]%s%s\n", cr.id, ok ? "PASS" : "FAIL", cr.title, c.worst_ms,
                    c.detail.empty() ? "" : "  ", c.detail.c_str());
        for (const auto& f : c.failures) std::printf("    - %s\n", f.c_str());
        for (const auto& g : c.gaps) std::printf("    - counterexample: %s\n", g.c_str());
    }
    std::printf("%d criteria failed with defects, %d failed on confirmed counterexamples\n", failed, gaps);
    std::fflush(stdout);
    return failed == 0 ? 0 : 1;
}
