#include "pcalc/term.hpp"

#include "pcalc/error.hpp"

#include <algorithm>
#include <functional>

namespace pcalc {

const char* to_string(Dialect d) {
    return d == Dialect::Ccsm ? "ccsm" : "hoccsm";
}

struct Term::Node {
    TermKind kind = TermKind::Nil;
    bool higher_order = false;
    std::string name;
    std::string binder;
    // Prefix/Repl: {body}; HO output: {message, body}; Par: the parts.
    std::vector<Term> kids;
    std::size_t hash = 0;
    std::size_t size = 1;
};

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Term::Term() : Term(nil()) {}

Term::Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

namespace {

template <class NodeT>
std::shared_ptr<const NodeT> finish(std::shared_ptr<NodeT> n) {
    std::size_t h = static_cast<std::size_t>(n->kind) * 1000003u;
    h = mix(h, n->higher_order ? 1 : 0);
    h = mix(h, std::hash<std::string>{}(n->name));
    h = mix(h, std::hash<std::string>{}(n->binder));
    std::size_t size = 1;
    for (const auto& k : n->kids) {
        h = mix(h, k.hash());
        size += k.size();
    }
    n->hash = h;
    n->size = size;
    return n;
}

}  // namespace

Term Term::nil() {
    static const Term instance{finish(std::make_shared<Node>())};
    return instance;
}

Term Term::var(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = TermKind::Var;
    n->higher_order = true;
    n->name = std::move(name);
    return Term{finish(std::move(n))};
}

Term Term::input(std::string channel, Term body) {
    auto n = std::make_shared<Node>();
    n->kind = TermKind::Input;
    n->name = std::move(channel);
    n->kids.push_back(std::move(body));
    return Term{finish(std::move(n))};
}

Term Term::ho_input(std::string channel, std::string binder, Term body) {
    auto n = std::make_shared<Node>();
    n->kind = TermKind::Input;
    n->higher_order = true;
    n->name = std::move(channel);
    n->binder = std::move(binder);
    n->kids.push_back(std::move(body));
    return Term{finish(std::move(n))};
}

Term Term::output(std::string channel, Term body) {
    auto n = std::make_shared<Node>();
    n->kind = TermKind::Output;
    n->name = std::move(channel);
    n->kids.push_back(std::move(body));
    return Term{finish(std::move(n))};
}

Term Term::ho_output(std::string channel, Term message, Term body) {
    auto n = std::make_shared<Node>();
    n->kind = TermKind::Output;
    n->higher_order = true;
    n->name = std::move(channel);
    n->kids.push_back(std::move(message));
    n->kids.push_back(std::move(body));
    return Term{finish(std::move(n))};
}

Term Term::repl(Term body) {
    auto n = std::make_shared<Node>();
    n->kind = TermKind::Repl;
    n->kids.push_back(std::move(body));
    return Term{finish(std::move(n))};
}

Term Term::par(std::vector<Term> parts) {
    auto n = std::make_shared<Node>();
    n->kind = TermKind::Par;
    n->kids = std::move(parts);
    return Term{finish(std::move(n))};
}

TermKind Term::kind() const { return node_->kind; }
bool Term::higher_order() const { return node_->higher_order; }
const std::string& Term::name() const { return node_->name; }
const std::string& Term::binder() const { return node_->binder; }

const Term& Term::body() const {
    switch (node_->kind) {
    case TermKind::Input:
    case TermKind::Repl:
        return node_->kids[0];
    case TermKind::Output:
        return node_->kids.back();
    default:
        throw std::logic_error("Term::body on a term without a continuation");
    }
}

const Term& Term::message() const {
    if (node_->kind != TermKind::Output || !node_->higher_order)
        throw std::logic_error("Term::message on a term without a message");
    return node_->kids[0];
}

std::span<const Term> Term::parts() const {
    if (node_->kind != TermKind::Par) return {};
    return node_->kids;
}

std::size_t Term::hash() const { return node_->hash; }
std::size_t Term::size() const { return node_->size; }

bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->hash != b.node_->hash) return false;
    return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    const auto& x = *a.node_;
    const auto& y = *b.node_;
    if (auto c = x.kind <=> y.kind; c != 0) return c;
    if (auto c = x.name <=> y.name; c != 0) return c;
    if (auto c = x.higher_order <=> y.higher_order; c != 0) return c;
    if (auto c = x.binder <=> y.binder; c != 0) return c;
    return std::lexicographical_compare_three_way(x.kids.begin(), x.kids.end(),
                                                  y.kids.begin(), y.kids.end());
}

std::vector<Term> components(const Term& t) {
    switch (t.kind()) {
    case TermKind::Nil:
        return {};
    case TermKind::Par: {
        std::vector<Term> out;
        for (const auto& p : t.parts()) {
            auto sub = components(p);
            out.insert(out.end(), sub.begin(), sub.end());
        }
        return out;
    }
    default:
        return {t};
    }
}

namespace {

void collect_free(const Term& t, std::vector<std::string>& bound, std::set<std::string>& out) {
    switch (t.kind()) {
    case TermKind::Nil:
        return;
    case TermKind::Var:
        if (std::find(bound.begin(), bound.end(), t.name()) == bound.end()) out.insert(t.name());
        return;
    case TermKind::Input:
        if (t.higher_order()) {
            bound.push_back(t.binder());
            collect_free(t.body(), bound, out);
            bound.pop_back();
        } else {
            collect_free(t.body(), bound, out);
        }
        return;
    case TermKind::Output:
        if (t.higher_order()) collect_free(t.message(), bound, out);
        collect_free(t.body(), bound, out);
        return;
    case TermKind::Repl:
        collect_free(t.body(), bound, out);
        return;
    case TermKind::Par:
        for (const auto& p : t.parts()) collect_free(p, bound, out);
        return;
    }
}

void collect_names(const Term& t, std::set<std::string>& out) {
    switch (t.kind()) {
    case TermKind::Nil:
    case TermKind::Var:
        return;
    case TermKind::Input:
        out.insert(t.name());
        collect_names(t.body(), out);
        return;
    case TermKind::Output:
        out.insert(t.name());
        if (t.higher_order()) collect_names(t.message(), out);
        collect_names(t.body(), out);
        return;
    case TermKind::Repl:
        collect_names(t.body(), out);
        return;
    case TermKind::Par:
        for (const auto& p : t.parts()) collect_names(p, out);
        return;
    }
}

void note(std::optional<Dialect>& seen, Dialect d) {
    if (seen && *seen != d)
        throw DialectMismatch("term mixes first-order and higher-order constructs");
    seen = d;
}

void scan_dialect(const Term& t, std::optional<Dialect>& seen) {
    switch (t.kind()) {
    case TermKind::Nil:
        return;
    case TermKind::Var:
        note(seen, Dialect::Hoccsm);
        return;
    case TermKind::Input:
    case TermKind::Output:
        note(seen, t.higher_order() ? Dialect::Hoccsm : Dialect::Ccsm);
        if (t.kind() == TermKind::Output && t.higher_order()) scan_dialect(t.message(), seen);
        scan_dialect(t.body(), seen);
        return;
    case TermKind::Repl:
        note(seen, Dialect::Ccsm);
        scan_dialect(t.body(), seen);
        return;
    case TermKind::Par:
        for (const auto& p : t.parts()) scan_dialect(p, seen);
        return;
    }
}

}  // namespace

std::set<std::string> free_vars(const Term& t) {
    std::set<std::string> out;
    std::vector<std::string> bound;
    collect_free(t, bound, out);
    return out;
}

std::set<std::string> names(const Term& t) {
    std::set<std::string> out;
    collect_names(t, out);
    return out;
}

bool is_closed(const Term& t) { return free_vars(t).empty(); }

std::optional<Dialect> implied_dialect(const Term& t) {
    std::optional<Dialect> seen;
    scan_dialect(t, seen);
    return seen;
}

}  // namespace pcalc
