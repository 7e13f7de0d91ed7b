#include "pcalc/syntax.hpp"

#include "pcalc/error.hpp"
#include "pcalc/hocore.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace pcalc {

namespace {

enum class Tok { Name, Var, Zero, Bar, Dot, LParen, RParen, Bang, BangG, Quote, LAngle, RAngle, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
};

const char* describe(Tok t) {
    switch (t) {
    case Tok::Name: return "name";
    case Tok::Var: return "process variable";
    case Tok::Zero: return "'0'";
    case Tok::Bar: return "'|'";
    case Tok::Dot: return "'.'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Bang: return "'!'";
    case Tok::BangG: return "'!g'";
    case Tok::Quote: return "\"'\"";
    case Tok::LAngle: return "'<'";
    case Tok::RAngle: return "'>'";
    case Tok::End: return "end of input";
    }
    return "?";
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<Token> lex(std::string_view text, Dialect dialect) {
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token tok;
        tok.line = line;
        tok.column = col;
        if (std::islower(static_cast<unsigned char>(c)) || std::isupper(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && ident_char(text[j])) ++j;
            tok.kind = std::islower(static_cast<unsigned char>(c)) ? Tok::Name : Tok::Var;
            tok.text = std::string(text.substr(i, j - i));
            advance(j - i);
            out.push_back(std::move(tok));
            continue;
        }
        switch (c) {
        case '0':
            if (i + 1 < text.size() && ident_char(text[i + 1]))
                throw SyntaxError("malformed token starting with '0'", line, col);
            tok.kind = Tok::Zero;
            break;
        case '|': tok.kind = Tok::Bar; break;
        case '.': tok.kind = Tok::Dot; break;
        case '(': tok.kind = Tok::LParen; break;
        case ')': tok.kind = Tok::RParen; break;
        case '\'': tok.kind = Tok::Quote; break;
        case '<': tok.kind = Tok::LAngle; break;
        case '>': tok.kind = Tok::RAngle; break;
        case '!':
            tok.kind = Tok::Bang;
            if (dialect == Dialect::Hoccsm && i + 2 < text.size() && text[i + 1] == 'g' &&
                (std::isspace(static_cast<unsigned char>(text[i + 2])) || text[i + 2] == '\'')) {
                tok.kind = Tok::BangG;
                advance(2);
                out.push_back(std::move(tok));
                continue;
            }
            break;
        default:
            throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
        }
        advance(1);
        out.push_back(std::move(tok));
    }
    Token end;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> toks, Dialect dialect, const ParseOptions& options)
        : toks_(std::move(toks)), dialect_(dialect), options_(options) {
        for (const auto& t : toks_) {
            if (t.kind == Tok::Name) used_names_.insert(t.text);
            if (t.kind == Tok::Var) used_vars_.insert(t.text);
        }
    }

    Term parse_all() {
        Term t = proc();
        if (peek().kind != Tok::End) fail("expected end of input, found " + std::string(describe(peek().kind)));
        return t;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    Token take() { return toks_[pos_++]; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(msg, peek().line, peek().column);
    }

    Token expect(Tok k) {
        if (peek().kind != k)
            fail(std::string("expected ") + describe(k) + ", found " + describe(peek().kind));
        return take();
    }

    bool ho() const { return dialect_ == Dialect::Hoccsm; }

    Term proc() {
        Term left = seq();
        while (peek().kind == Tok::Bar) {
            take();
            Term right = seq();
            left = Term::par({left, right});
        }
        return left;
    }

    Term seq() {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::Zero:
            take();
            return Term::nil();
        case Tok::LParen: {
            take();
            Term inner = proc();
            expect(Tok::RParen);
            return inner;
        }
        case Tok::Bang:
            return bang();
        case Tok::BangG:
            return guarded_bang();
        case Tok::Name:
        case Tok::Quote:
            return prefix();
        case Tok::Var:
            if (!ho()) fail("process variable '" + t.text + "' is not CCSm syntax");
            return Term::var(take().text);
        default:
            fail(std::string("expected a process, found ") + describe(t.kind));
        }
    }

    Term bang() {
        Token bang_tok = take();
        Term body = seq();
        if (!ho()) return Term::repl(body);
        if (!options_.expand_replication)
            throw SyntaxError("'!' in HOCCSm needs replication expansion", bang_tok.line, bang_tok.column);
        Term subject = canonicalize(body);
        if (!is_closed(subject))
            throw SyntaxError("replicated process must be closed", bang_tok.line, bang_tok.column);
        return derived_replication(subject, replicator_for("!" + render(subject)));
    }

    Term guarded_bang() {
        Token bang_tok = take();
        if (peek().kind != Tok::Name && peek().kind != Tok::Quote) fail("'!g' must be followed by a prefix");
        if (!options_.expand_replication)
            throw SyntaxError("'!g' needs replication expansion", bang_tok.line, bang_tok.column);
        Term guarded = canonicalize(prefix());
        if (!is_closed(guarded))
            throw SyntaxError("replicated process must be closed", bang_tok.line, bang_tok.column);
        return guarded_replication(guarded, replicator_for("!g" + render(guarded)));
    }

    std::string replicator_for(const std::string& key) {
        auto it = replicators_.find(key);
        if (it != replicators_.end()) return it->second;
        std::string c = fresh_replicator(used_names_);
        used_names_.insert(c);
        replicators_.emplace(key, c);
        return c;
    }

    std::string fresh_binder() {
        for (int n = 0;; ++n) {
            std::string v = n == 0 ? "Y" : "Y" + std::to_string(n);
            if (!used_vars_.contains(v)) {
                used_vars_.insert(v);
                return v;
            }
        }
    }

    Term continuation() {
        if (peek().kind == Tok::Dot) {
            take();
            return seq();
        }
        return Term::nil();
    }

    Term prefix() {
        if (peek().kind == Tok::Quote) {
            take();
            std::string chan = expect(Tok::Name).text;
            if (!ho()) {
                if (peek().kind == Tok::LAngle) fail("higher-order output is not CCSm syntax");
                return Term::output(chan, continuation());
            }
            Term message = Term::nil();
            if (peek().kind == Tok::LAngle) {
                take();
                message = proc();
                expect(Tok::RAngle);
            }
            return Term::ho_output(chan, message, continuation());
        }
        std::string chan = expect(Tok::Name).text;
        if (!ho()) {
            if (peek().kind == Tok::LParen) fail("higher-order input is not CCSm syntax");
            return Term::input(chan, continuation());
        }
        std::string binder;
        if (peek().kind == Tok::LParen) {
            take();
            binder = expect(Tok::Var).text;
            expect(Tok::RParen);
        } else {
            binder = fresh_binder();
        }
        return Term::ho_input(chan, binder, continuation());
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Dialect dialect_;
    ParseOptions options_;
    std::set<std::string> used_names_;
    std::set<std::string> used_vars_;
    std::map<std::string, std::string> replicators_;
};

bool is_binder_like(const std::string& v, const std::string& prefix) {
    if (v.size() <= prefix.size() || v.compare(0, prefix.size(), prefix) != 0) return false;
    return std::all_of(v.begin() + static_cast<long>(prefix.size()), v.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

struct Canonicalizer {
    std::string prefix;

    Term run(const Term& t, std::size_t level, std::map<std::string, std::string>& env) const {
        switch (t.kind()) {
        case TermKind::Nil:
            return t;
        case TermKind::Var: {
            auto it = env.find(t.name());
            return it == env.end() ? t : Term::var(it->second);
        }
        case TermKind::Input: {
            if (!t.higher_order()) return Term::input(t.name(), run(t.body(), level, env));
            std::string fresh = prefix + std::to_string(level);
            auto saved = env.find(t.binder()) == env.end()
                             ? std::optional<std::string>{}
                             : std::optional<std::string>{env[t.binder()]};
            env[t.binder()] = fresh;
            Term body = run(t.body(), level + 1, env);
            if (saved)
                env[t.binder()] = *saved;
            else
                env.erase(t.binder());
            return Term::ho_input(t.name(), fresh, body);
        }
        case TermKind::Output:
            if (!t.higher_order()) return Term::output(t.name(), run(t.body(), level, env));
            return Term::ho_output(t.name(), run(t.message(), level, env), run(t.body(), level, env));
        case TermKind::Repl:
            return Term::repl(run(t.body(), level, env));
        case TermKind::Par: {
            std::vector<Term> flat;
            for (const auto& p : t.parts()) {
                Term c = run(p, level, env);
                if (c.kind() == TermKind::Par) {
                    flat.insert(flat.end(), c.parts().begin(), c.parts().end());
                } else if (!c.is_nil()) {
                    flat.push_back(std::move(c));
                }
            }
            if (flat.empty()) return Term::nil();
            if (flat.size() == 1) return flat.front();
            std::sort(flat.begin(), flat.end());
            return Term::par(std::move(flat));
        }
        }
        return t;
    }
};

void render_seq(const Term& t, const RenderOptions& o, std::string& out);

void render_proc(const Term& t, const RenderOptions& o, std::string& out) {
    if (t.kind() != TermKind::Par) {
        render_seq(t, o, out);
        return;
    }
    bool first = true;
    for (const auto& p : t.parts()) {
        if (!first) out += " | ";
        first = false;
        if (p.kind() == TermKind::Par)
            render_proc(p, o, out);
        else
            render_seq(p, o, out);
    }
}

void render_continuation(const Term& body, const RenderOptions& o, std::string& out) {
    if (o.compact && body.is_nil()) return;
    out += '.';
    render_seq(body, o, out);
}

void render_seq(const Term& t, const RenderOptions& o, std::string& out) {
    switch (t.kind()) {
    case TermKind::Nil:
        out += '0';
        return;
    case TermKind::Var:
        out += t.name();
        return;
    case TermKind::Input:
        out += t.name();
        if (t.higher_order()) out += "(" + t.binder() + ")";
        render_continuation(t.body(), o, out);
        return;
    case TermKind::Output:
        out += '\'';
        out += t.name();
        if (t.higher_order()) {
            out += '<';
            render_proc(t.message(), o, out);
            out += '>';
        }
        render_continuation(t.body(), o, out);
        return;
    case TermKind::Repl:
        out += '!';
        render_seq(t.body(), o, out);
        return;
    case TermKind::Par:
        out += '(';
        render_proc(t, o, out);
        out += ')';
        return;
    }
}

}  // namespace

ParseResult parse_raw(std::string_view text, Dialect dialect, const ParseOptions& options) {
    Parser parser(lex(text, dialect), dialect, options);
    ParseResult r;
    r.term = parser.parse_all();
    r.dialect = dialect;
    r.open = !is_closed(r.term);
    return r;
}

ParseResult parse(std::string_view text, Dialect dialect, const ParseOptions& options) {
    ParseResult r = parse_raw(text, dialect, options);
    r.term = canonicalize(r.term);
    return r;
}

Dialect infer_dialect(std::string_view text) {
    bool in_comment = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_comment) {
            if (c == '\n') in_comment = false;
            continue;
        }
        if (c == '#') {
            in_comment = true;
            continue;
        }
        bool token_start = i == 0 || !ident_char(text[i - 1]);
        if (c == '<') return Dialect::Hoccsm;
        if (token_start && std::isupper(static_cast<unsigned char>(c))) return Dialect::Hoccsm;
        if (c == '!' && i + 2 < text.size() && text[i + 1] == 'g' &&
            (std::isspace(static_cast<unsigned char>(text[i + 2])) || text[i + 2] == '\''))
            return Dialect::Hoccsm;
    }
    return Dialect::Ccsm;
}

std::pair<std::string, std::string> split_pair(std::string_view text) {
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
        if (line == "---") {
            std::size_t rest = end < text.size() ? end + 1 : end;
            return {std::string(text.substr(0, start)), std::string(text.substr(rest))};
        }
        start = end + 1;
    }
    throw Error("pair file has no '---' separator line");
}

Term canonicalize(const Term& t) {
    Canonicalizer c{"X"};
    auto fv = free_vars(t);
    while (std::any_of(fv.begin(), fv.end(), [&](const std::string& v) { return is_binder_like(v, c.prefix); }))
        c.prefix += '_';
    std::map<std::string, std::string> env;
    return c.run(t, 0, env);
}

bool sc_equal(const Term& p, const Term& q) {
    auto dp = implied_dialect(p);
    auto dq = implied_dialect(q);
    if (dp && dq && *dp != *dq)
        throw DialectMismatch(std::string("cannot compare a ") + to_string(*dp) + " term with a " +
                              to_string(*dq) + " term");
    return canonicalize(p) == canonicalize(q);
}

std::string render(const Term& t, const RenderOptions& options) {
    std::string out;
    render_proc(t, options, out);
    return out;
}

}  // namespace pcalc
