#pragma once

#include "pcalc/term.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pcalc {

/// CCSm action: tau, input a, or output 'a. Ordered tau < In < Out, then by
/// name.
struct Action {
    enum class Kind : std::uint8_t { Tau, In, Out };
    Kind kind = Kind::Tau;
    std::string name;

    static Action tau() { return {}; }
    static Action in(std::string n) { return {Kind::In, std::move(n)}; }
    static Action out(std::string n) { return {Kind::Out, std::move(n)}; }

    bool visible() const { return kind != Kind::Tau; }
    Action complement() const;

    friend bool operator==(const Action&, const Action&) = default;
    friend std::strong_ordering operator<=>(const Action&, const Action&) = default;
};

/// `tau`, `a` or `'a`.
std::string label(const Action& a);
/// Inverse of label().
Action parse_label(const std::string& s);

struct Transition {
    Action action;
    Term target;

    friend bool operator==(const Transition&, const Transition&) = default;
    friend std::strong_ordering operator<=>(const Transition&, const Transition&) = default;
};

/// All SOS transitions of a canonical CCSm term, targets canonical, sorted and
/// without duplicates.
std::vector<Transition> step(const Term& p);

using StateId = std::uint32_t;

struct Edge {
    StateId src = 0;
    Action action;
    StateId dst = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend std::strong_ordering operator<=>(const Edge&, const Edge&) = default;
};

enum class Divergence : std::uint8_t { No, Yes, UnknownTruncated };
const char* to_string(Divergence d);

struct Bounds {
    std::size_t max_states = 2000;
    std::size_t max_depth = 64;
};

/// Explored state graph over canonical terms.
///
/// States whose outgoing edges were not generated (cut off by a bound) are
/// listed in `frontier`; every other state carries its complete successor
/// set. `roots` holds the start states (one per term given to build_lts; the
/// same term twice yields the same state).
struct Lts {
    std::vector<Term> states;
    std::vector<Edge> edges;
    StateId initial = 0;
    std::vector<StateId> roots;
    bool truncated = false;
    std::vector<StateId> frontier;
    std::vector<Divergence> diverges;

    std::size_t size() const { return states.size(); }
    bool expanded(StateId s) const;
    /// Outgoing edges of s, sorted by (action, dst).
    std::span<const Edge> out(StateId s) const;
    std::optional<StateId> find(const Term& t) const;

    /// Sorts `edges` and rebuilds the adjacency index; call after editing
    /// states, edges or frontier by hand. build_lts calls it.
    void index();

private:
    std::vector<std::size_t> offsets_;
    std::vector<char> expanded_;
};

Lts build_lts(const Term& p, const Bounds& b = {});
/// One state space explored from several roots (cross-term checks).
Lts build_lts(const std::vector<Term>& roots, const Bounds& b = {});

/// Recomputes `diverges` for every state; build_lts already does this. Used
/// for hand-assembled graphs.
void compute_divergence(Lts& l);

Divergence diverges(const Lts& l, StateId s);

/// Divergence evidence on the explored part: a tau path through `path`
/// such that the parallel multiset of path.back() strictly contains that of
/// path[base]. The segment from `base` then repeats forever in parallel
/// context.
struct GrowthWitness {
    std::vector<StateId> path;
    std::size_t base = 0;
};

/// True if an explored tau cycle is tau-reachable from s.
bool reaches_tau_cycle(const Lts& l, StateId s);

/// Shortest growth witness starting at s (BFS order), if one exists.
std::optional<GrowthWitness> growth_witness(const Lts& l, StateId s);

enum class SaturationMode { Weak, Delay };

struct SatEdge {
    StateId src = 0;
    Action action;
    StateId dst = 0;
    bool primitive = false;

    friend bool operator==(const SatEdge&, const SatEdge&) = default;
    friend std::strong_ordering operator<=>(const SatEdge&, const SatEdge&) = default;
};

/// Weak: (s, a^, t) iff s => -a-> => t, and (s, tau, t) iff s => t (reflexive).
/// Delay: (s, a, t) iff s => -a-> t; tau edges as for weak.
struct Saturation {
    SaturationMode mode = SaturationMode::Weak;
    std::vector<SatEdge> edges;  // sorted
    std::vector<std::size_t> offsets;  // per-state slice of `edges`

    std::span<const SatEdge> from(StateId s) const {
        return std::span<const SatEdge>(edges).subspan(offsets[s], offsets[s + 1] - offsets[s]);
    }
};

Saturation saturate(const Lts& l, SaturationMode mode);

/// Reflexive tau-closure of every state (sorted).
std::vector<std::vector<StateId>> tau_closure(const Lts& l);

}  // namespace pcalc
