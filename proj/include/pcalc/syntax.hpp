#pragma once

#include "pcalc/term.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace pcalc {

struct ParseOptions {
    /// Expand `!P` and `!g phi.P` in HOCCSm input through the derived
    /// replication encodings. When off, `!` in HOCCSm input is an error.
    bool expand_replication = true;
};

struct ParseResult {
    Term term;
    Dialect dialect = Dialect::Ccsm;
    /// The term has free process variables.
    bool open = false;
};

/// Parses one term. The result is canonical.
ParseResult parse(std::string_view text, Dialect dialect, const ParseOptions& options = {});

/// Parses a term without canonicalizing it (keeps source shape, binder names
/// and Nil components).
ParseResult parse_raw(std::string_view text, Dialect dialect, const ParseOptions& options = {});

/// Guesses the dialect from surface syntax: HOCCSm if the text uses process
/// variables, `<...>` payloads or `!g`; CCSm otherwise.
Dialect infer_dialect(std::string_view text);

/// Splits a pair file at the first line consisting only of `---`.
std::pair<std::string, std::string> split_pair(std::string_view text);

/// Structural-congruence normal form: Par flattened, Nil dropped, parts
/// sorted by the term order, HOCCSm binders renamed to canonical indices.
Term canonicalize(const Term& t);

bool sc_equal(const Term& p, const Term& q);

struct RenderOptions {
    /// Omit trailing `.0` on prefixes.
    bool compact = false;
};

std::string render(const Term& t, const RenderOptions& options = {});

}  // namespace pcalc
