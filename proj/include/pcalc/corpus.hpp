#pragma once

#include "pcalc/semantics.hpp"
#include "pcalc/term.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace pcalc {

/// Seed from PCALC_SEED, or `fallback` when unset or malformed.
std::uint64_t seed_from_env(std::uint64_t fallback = 20261015);

struct RandomTermOptions {
    std::vector<std::string> names{"a", "b", "c"};
    int max_depth = 4;
    std::size_t max_width = 3;
    /// Probability of a replication node. Only the finite-state patterns
    /// !a.0 and !'a.0 are generated.
    double replication = 0.2;
};

/// Random canonical CCSm term.
Term random_ccsm_term(std::mt19937_64& rng, const RandomTermOptions& options = {});

/// A pair of random terms whose joint LTS is fully explored.
struct FiniteSample {
    Term left;
    Term right;
    Lts lts;
};

/// `count` samples with complete joint LTSs of at most `max_states` states.
/// Half of the right-hand terms are perturbations of the left-hand term so
/// that nontrivial equivalences show up.
std::vector<FiniteSample> finite_state_corpus(std::uint64_t seed, std::size_t count, std::size_t max_states = 200);

/// Random complete LTS over placeholder states, for checker cross-validation.
Lts random_lts(std::mt19937_64& rng, std::size_t max_states, std::size_t names = 2);

/// One built-in example with its expected outcome.
struct CorpusEntry {
    std::string name;
    Dialect dialect = Dialect::Ccsm;
    std::vector<std::string> terms;
    /// sc, strong, weak, quasi-strong, branching, qs-branching,
    /// context-strong, context-weak, diverges, lts, tau-classify, rep-invar.
    std::string check;
    std::string expected;
    std::string note;
    std::optional<Bounds> bounds;
    int game_depth = 6;
};

const std::vector<CorpusEntry>& paper_corpus();

struct CorpusRun {
    std::string observed;
    bool passed = false;
};

CorpusRun run_entry(const CorpusEntry& e);

}  // namespace pcalc
