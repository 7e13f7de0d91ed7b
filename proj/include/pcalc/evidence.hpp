#pragma once

#include "pcalc/equivalence.hpp"
#include "pcalc/semantics.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pcalc {

enum class Discipline { Plain, UptoContext };

const char* to_string(Discipline d);

/// A finite candidate relation over CCSm terms; its symmetric closure is
/// checked.
struct Certificate {
    std::vector<std::pair<Term, Term>> pairs;
    Discipline discipline = Discipline::UptoContext;
    /// Maximum number of terms explored when searching one weak reply, and
    /// the state bound for each divergence check.
    std::size_t closure_budget = 500;
};

/// `{"discipline": "upto-context"|"plain", "budget": N,
///   "pairs": [["P", "Q"], ...]}`. Throws InvalidRequest or SyntaxError.
Certificate certificate_from_json(const std::string& text);

/// Extra relation used to discharge residual pairs.
using KnownEquiv = std::function<bool(const Term&, const Term&)>;

/// Relates terms that are states of `l` in one block of `p`.
KnownEquiv known_from_partition(const Lts& l, const Partition& p);

/// One transition obligation: the challenger's move and how it was met.
struct Obligation {
    enum class Via { Certificate, Syntactic, Known, None };
    std::size_t pair = 0;
    bool challenger_left = true;
    Action action;
    Term challenger_target;
    std::optional<Term> reply_target;
    /// T in the decomposition P' = T | P1, Q' = T | Q1.
    Term context;
    std::optional<std::pair<Term, Term>> residual;
    Via via = Via::None;
};

const char* to_string(Obligation::Via v);

struct CertResult {
    enum class Outcome { Certified, Refuted, BudgetExhausted };
    Outcome outcome = Outcome::Certified;
    std::vector<Obligation> obligations;
    /// The first obligation (or divergence check) that failed.
    std::optional<Obligation> failure;
    std::optional<std::size_t> failed_pair;
    std::string reason;
};

const char* to_string(CertResult::Outcome o);

/// Checks the certificate as a weak bisimulation up to parallel context.
/// Refuted takes precedence over BudgetExhausted.
CertResult check_certificate(const Certificate& c, const KnownEquiv& known = {});

}  // namespace pcalc
