#pragma once

#include "pcalc/semantics.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pcalc {

/// The five divergence-sensitive equivalences of the workbench.
enum class EquivKind : std::uint8_t { Strong, Weak, Branching, QuasiStrong, QsBranching };

const char* to_string(EquivKind k);
/// Accepts strong, weak, branching, quasi-strong, qs-branching.
std::optional<EquivKind> parse_equiv_kind(std::string_view s);

struct Partition {
    EquivKind kind = EquivKind::Strong;
    /// Sorted blocks, ordered by their least state.
    std::vector<std::vector<StateId>> blocks;
    std::vector<std::uint32_t> block_of;

    bool same(StateId s, StateId t) const { return block_of.at(s) == block_of.at(t); }
};

/// Coarsest divergence-respecting partition for Strong, Weak or Branching.
/// Throws TruncatedInput on truncated graphs, InvalidRequest for the
/// quasi-strong kinds.
Partition compute_partition(const Lts& l, EquivKind kind);

/// Symmetric relation over the states of one LTS, stored as a bit matrix.
struct PairRelation {
    EquivKind kind = EquivKind::QuasiStrong;
    std::size_t n = 0;
    std::vector<char> bits;

    bool contains(StateId s, StateId t) const { return bits.at(std::size_t(s) * n + t) != 0; }
    std::vector<std::pair<StateId, StateId>> pairs() const;
};

/// Greatest fixpoint of the kind's transfer condition by synchronous rounds.
/// rank(s, t) is the round in which the pair was removed: 0 for a divergence
/// mismatch, r >= 1 when round r found an unanswerable move; -1 while related.
struct Refinement {
    PairRelation relation;
    std::vector<int> ranks;
    int rounds = 0;

    int rank(StateId s, StateId t) const { return ranks.at(std::size_t(s) * relation.n + t); }
};

/// Any kind. Strong starts from all pairs (divergence is preserved anyway);
/// the other kinds start from divergence-consistent pairs.
Refinement refine_pairs(const Lts& l, EquivKind kind);

/// One attacker move with the defender's reply.
struct TraceStep {
    bool attacker_left = true;
    Edge attack;
    /// False when the defender had no legal reply (last step only).
    bool answered = false;
    /// Defender path; empty means the defender stayed put.
    std::vector<Edge> answer;
    /// Position the play continues from, as (left, right).
    StateId left = 0;
    StateId right = 0;
};

struct AttackerTrace {
    enum class Terminal { NoMatch, DivergenceMismatch };
    EquivKind kind = EquivKind::Strong;
    StateId left = 0;
    StateId right = 0;
    std::vector<TraceStep> steps;
    Terminal terminal = Terminal::NoMatch;
};

const char* to_string(AttackerTrace::Terminal t);

/// Replays a trace against the LTS: every step must be a real transition or
/// legal weak reply, and the final position must leave the defender without
/// a reply. `why` receives the first failure.
bool replay(const Lts& l, const AttackerTrace& trace, std::string* why = nullptr);

/// Hennessy-Milner formula over primitive edges.
struct Formula {
    enum class Kind { True, Diamond, And, Not };
    Kind kind = Kind::True;
    Action action;
    std::vector<Formula> args;
};

std::string render(const Formula& f);
bool holds(const Lts& l, StateId s, const Formula& f);

struct BoundReport {
    int game_depth = 0;
    std::size_t positions = 0;
    std::size_t states = 0;
    std::size_t frontier = 0;
};

struct Verdict {
    enum class Outcome { Equivalent, Inequivalent, Unknown };
    Outcome outcome = Outcome::Unknown;
    EquivKind kind = EquivKind::Strong;
    StateId left = 0;
    StateId right = 0;
    std::optional<Partition> partition;
    std::optional<PairRelation> relation;
    std::optional<AttackerTrace> trace;
    std::optional<Formula> formula;
    std::optional<BoundReport> bound;
    std::size_t iterations = 0;
};

const char* to_string(Verdict::Outcome o);

/// Exact decision on a fully explored LTS. Equivalent verdicts carry the
/// partition (strong, weak, branching) or the relation (quasi-strong kinds);
/// Inequivalent ones a minimal trace, plus a formula for Strong.
Verdict check_pair(const Lts& l, StateId s, StateId t, EquivKind kind);

/// Depth-bounded game that also runs on truncated graphs. A defender reply
/// set that touches unexplored states counts as a successful defence, so an
/// Inequivalent verdict is sound; otherwise the outcome is Unknown with a
/// BoundReport.
Verdict check_bounded(const Lts& l, StateId s, StateId t, EquivKind kind, int depth);

/// check_pair on complete graphs, check_bounded otherwise.
Verdict decide(const Lts& l, StateId s, StateId t, EquivKind kind, int game_depth);

struct Evidence {
    AttackerTrace trace;
    /// Strong only.
    std::optional<Formula> formula;
};

/// Minimal trace (and formula for Strong) for an inequivalent pair of a
/// complete LTS; for truncated graphs the bounded game with `game_depth`
/// is used. Throws InvalidRequest for equal or undistinguished states.
Evidence distinguishing_evidence(const Lts& l, StateId s, StateId t, EquivKind kind, int game_depth = 6);

struct TauClassification {
    /// Tau edges in edge order, with their labels.
    std::vector<Edge> tau_edges;
    std::vector<bool> state_changing;
    /// Per state: length of the longest tau path up to and including its
    /// last state-changing edge; nullopt if unbounded.
    std::vector<std::optional<std::size_t>> k;
};

TauClassification classify_tau(const Lts& l);
TauClassification classify_tau(const Lts& l, const Partition& weak);

struct CoincidenceReport {
    struct Violation {
        std::string law;
        StateId s = 0;
        StateId t = 0;
    };
    std::size_t states = 0;
    /// Number of ordered related pairs per kind, in EquivKind order.
    std::vector<std::size_t> related;
    bool strong_equals_weak = false;
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

/// Computes all five relations and checks weak = quasi-strong =
/// qs-branching = branching and strong <= quasi-strong <= weak.
CoincidenceReport coincidence_report(const Lts& l);

}  // namespace pcalc
