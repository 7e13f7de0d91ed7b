#pragma once

#include "pcalc/term.hpp"

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pcalc {

/// Variable standing for the hole of a context E[X].
inline constexpr const char* kHole = "X";

struct HoAction {
    enum class Kind : std::uint8_t { Tau, In, Out };
    Kind kind = Kind::Tau;
    std::string channel;
    Term payload;

    static HoAction tau() { return {}; }
    static HoAction in(std::string channel, Term payload) {
        return {Kind::In, std::move(channel), std::move(payload)};
    }
    static HoAction out(std::string channel, Term payload) {
        return {Kind::Out, std::move(channel), std::move(payload)};
    }

    friend bool operator==(const HoAction&, const HoAction&) = default;
    friend std::strong_ordering operator<=>(const HoAction&, const HoAction&) = default;
};

std::string render(const HoAction& a);

struct HoTransition {
    HoAction action;
    Term target;

    friend bool operator==(const HoTransition&, const HoTransition&) = default;
    friend std::strong_ordering operator<=>(const HoTransition&, const HoTransition&) = default;
};

/// Capture-avoiding P{A/X} for a closed A; the result is canonical.
Term ho_subst(const Term& p, const std::string& var, const Term& a);

/// E[A]: substitutes A for the hole variable of a context.
Term apply_context(const Term& context, const Term& a);

/// First of c0, c1, ... not in `used`.
std::string fresh_replicator(const std::set<std::string>& used);

/// !P encoded as 'c<Q>.0 | Q with Q = c(X).('c<X>.0 | X | P).
Term derived_replication(const Term& p, const std::string& replicator);
Term derived_replication(const Term& p);

/// !g phi.P encoded as 'c<Q>.0 | Q with Q = c(X).(phi.('c<X>.0 | X | P)).
/// `guarded` is the prefixed term phi.P.
Term guarded_replication(const Term& guarded, const std::string& replicator);
Term guarded_replication(const Term& guarded);

/// Finite stand-ins for "every payload" and "every context E[X]".
struct TestFamilies {
    std::vector<Term> inputs;
    std::vector<Term> contexts;
    std::size_t size_bound = 16;
};

/// Deterministic families for a pair: Nil, every closed message occurring in
/// either term, and fresh triggers m(Y).0 / 'm<0>.0 as inputs; the contexts
/// X, X | m(Y).0, X | 'm<0>.0, X | X. Members larger than `size_bound`
/// syntax nodes are left out, except that Nil and X are always kept.
TestFamilies default_families(const Term& p, const Term& q, std::size_t size_bound = 16);

/// Transitions of a closed canonical HOCCSm term. Inputs are instantiated
/// over `fam.inputs` only; communications use the transmitted message.
std::vector<HoTransition> ho_step(const Term& p, const TestFamilies& fam);

enum class GameMode { Strong, Weak };

struct GameLimits {
    /// Cap on the states of a weak tau-closure. A closure that does not
    /// complete within the cap cannot be used to refute.
    std::size_t closure_states = 256;
};

/// One round of a winning attacker strategy (principal line).
struct ContextRound {
    bool attacker_left = true;
    HoAction attack;
    Term attacker_target;
    /// Answer the defender picked for the continuation (absent when the
    /// defender had none).
    std::optional<HoAction> answer;
    std::optional<Term> defender_target;
    /// Receiving context chosen by the attacker after an output.
    std::optional<Term> context;
    Term next_left;
    Term next_right;
};

struct HoVerdict {
    enum class Outcome { Inequivalent, NoDistinctionUpTo };
    Outcome outcome = Outcome::NoDistinctionUpTo;
    int depth = 0;
    /// Number of attacker moves in the refutation (Inequivalent only).
    int rounds = 0;
    std::vector<ContextRound> trace;
    std::size_t positions = 0;
};

/// Depth-bounded context-bisimulation game. Inequivalent is sound; otherwise
/// the verdict only states that no distinction exists up to `depth` moves
/// over the given families.
HoVerdict context_game(const Term& p, const Term& q, GameMode mode, int depth,
                       const TestFamilies& fam, const GameLimits& limits = {});

}  // namespace pcalc
