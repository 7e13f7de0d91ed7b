#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace pcalc {

enum class Dialect { Ccsm, Hoccsm };

const char* to_string(Dialect d);

// Declaration order is the term order used for canonical Par sorting.
enum class TermKind : std::uint8_t { Nil, Var, Input, Output, Repl, Par };

/// Immutable process term shared by both calculi.
///
/// First-order prefixes carry only a channel and a continuation. Higher-order
/// input additionally binds a process variable, and higher-order output
/// carries a message process. Replication only occurs in CCSm terms; Var and
/// the higher-order prefixes only occur in HOCCSm terms.
class Term {
public:
    Term();

    static Term nil();
    static Term var(std::string name);
    static Term input(std::string channel, Term body);
    static Term ho_input(std::string channel, std::string binder, Term body);
    static Term output(std::string channel, Term body);
    static Term ho_output(std::string channel, Term message, Term body);
    static Term repl(Term body);
    static Term par(std::vector<Term> parts);

    TermKind kind() const;
    bool is_nil() const { return kind() == TermKind::Nil; }
    bool higher_order() const;

    /// Channel of a prefix, or the identifier of a variable.
    const std::string& name() const;
    /// Bound variable of a higher-order input; empty otherwise.
    const std::string& binder() const;
    /// Continuation of a prefix, or the body of a replication.
    const Term& body() const;
    /// Message of a higher-order output.
    const Term& message() const;
    std::span<const Term> parts() const;

    std::size_t hash() const;
    /// Number of syntax nodes.
    std::size_t size() const;

    friend bool operator==(const Term& a, const Term& b);
    friend std::strong_ordering operator<=>(const Term& a, const Term& b);

private:
    struct Node;
    explicit Term(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

/// Components of a term viewed as a parallel multiset (Nil has none).
std::vector<Term> components(const Term& t);

std::set<std::string> free_vars(const Term& t);
std::set<std::string> names(const Term& t);
bool is_closed(const Term& t);

/// Dialect implied by the constructs a term uses; nullopt for terms that fit
/// both (built from 0, first-order-looking prefixes without payloads, and Par).
std::optional<Dialect> implied_dialect(const Term& t);

}  // namespace pcalc

template <>
struct std::hash<pcalc::Term> {
    std::size_t operator()(const pcalc::Term& t) const noexcept { return t.hash(); }
};
