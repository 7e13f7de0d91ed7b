#include "pcalc/cli.hpp"

#include "pcalc/corpus.hpp"
#include "pcalc/equivalence.hpp"
#include "pcalc/error.hpp"
#include "pcalc/evidence.hpp"
#include "pcalc/hocore.hpp"
#include "pcalc/semantics.hpp"
#include "pcalc/syntax.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace pcalc {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidRequest("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<Dialect> dialect_flag(const std::string& s) {
    if (s.empty()) return std::nullopt;
    if (s == "ccsm") return Dialect::Ccsm;
    if (s == "hoccsm") return Dialect::Hoccsm;
    throw InvalidRequest("unknown dialect \"" + s + "\" (expected ccsm or hoccsm)");
}

std::string compact(const Term& t) { return render(t, RenderOptions{true}); }

json edge_json(const Edge& e) { return json::array({e.src, label(e.action), e.dst}); }

json trace_json(const AttackerTrace& t) {
    json steps = json::array();
    for (const auto& s : t.steps) {
        json answer = nullptr;
        if (s.answered) {
            answer = json::array();
            for (const auto& e : s.answer) answer.push_back(edge_json(e));
        }
        steps.push_back({{"attacker", s.attacker_left ? "left" : "right"},
                         {"move", edge_json(s.attack)},
                         {"answer", answer},
                         {"position", json::array({s.left, s.right})}});
    }
    return {{"start", json::array({t.left, t.right})}, {"steps", steps}, {"terminal", to_string(t.terminal)}};
}

void print_trace(std::ostream& out, const Lts& l, const AttackerTrace& t) {
    std::string labels;
    for (const auto& s : t.steps) labels += (labels.empty() ? "" : " ") + label(s.attack.action);
    out << "trace: " << (labels.empty() ? "(empty)" : labels) << "\n";
    int i = 1;
    for (const auto& s : t.steps) {
        const char* att = s.attacker_left ? "left" : "right";
        const char* def = s.attacker_left ? "right" : "left";
        out << "  " << i++ << ". " << att << " plays " << label(s.attack.action) << " to "
            << compact(l.states[s.attack.dst]);
        if (!s.answered) {
            out << "; " << def << " has no reply\n";
            continue;
        }
        out << "; " << def << " replies";
        if (s.answer.empty()) out << " by staying";
        for (const auto& e : s.answer) out << " -" << label(e.action) << "->";
        out << "; play continues at (" << compact(l.states[s.left]) << ", " << compact(l.states[s.right])
            << ")\n";
    }
    out << "reason: " << to_string(t.terminal) << "\n";
}

struct Common {
    std::size_t max_states = 2000;
    std::size_t max_depth = 64;
    bool json_out = false;
    bool timing = false;
    std::string dialect;
};

Term load_ccsm(const std::string& path, const std::string& dialect) {
    auto text = read_file(path);
    Dialect d = dialect_flag(dialect).value_or(infer_dialect(text));
    if (d != Dialect::Ccsm) throw DialectMismatch(path + ": this command works on CCSm terms");
    return parse(text, d).term;
}

int cmd_parse(const std::string& file, const Common& c, bool compact_out, std::ostream& out) {
    auto text = read_file(file);
    Dialect d = dialect_flag(c.dialect).value_or(infer_dialect(text));
    auto r = parse(text, d);
    std::string s = render(r.term, RenderOptions{compact_out});
    if (c.json_out)
        out << json{{"dialect", to_string(r.dialect)}, {"term", s}, {"open", r.open}}.dump(2) << "\n";
    else
        out << s << (r.open ? "    # open term" : "") << "\n";
    return kExitTrue;
}

void write_dot(const Lts& l, std::ostream& os) {
    os << "digraph lts {\n  rankdir=LR;\n";
    for (StateId s = 0; s < l.size(); ++s) {
        std::string lab = json(compact(l.states[s])).dump();
        os << "  s" << s << " [label=" << lab << ", shape="
           << (l.diverges[s] == Divergence::Yes ? "doublecircle" : "circle")
           << (l.expanded(s) ? "" : ", style=dashed") << "];\n";
    }
    for (const auto& e : l.edges)
        os << "  s" << e.src << " -> s" << e.dst << " [label=" << json(label(e.action)).dump() << "];\n";
    os << "}\n";
}

json lts_json(const Lts& l) {
    json states = json::array(), edges = json::array(), div = json::array();
    for (const auto& s : l.states) states.push_back(compact(s));
    for (const auto& e : l.edges) edges.push_back(edge_json(e));
    for (auto d : l.diverges) div.push_back(to_string(d));
    return {{"states", states}, {"edges", edges},          {"initial", l.initial},
            {"truncated", l.truncated}, {"frontier", l.frontier}, {"diverges", div}};
}

int cmd_lts(const std::string& file, const Common& c, const std::string& dot, std::ostream& out) {
    auto l = build_lts(load_ccsm(file, c.dialect), Bounds{c.max_states, c.max_depth});
    if (!dot.empty()) {
        std::ofstream os(dot);
        if (!os) throw InvalidRequest("cannot write " + dot);
        write_dot(l, os);
    }
    if (c.json_out) {
        out << lts_json(l).dump(2) << "\n";
        return kExitTrue;
    }
    out << "states: " << l.size() << "\nedges: " << l.edges.size() << "\ntruncated: " << (l.truncated ? "yes" : "no")
        << "\n";
    for (StateId s = 0; s < l.size(); ++s) {
        out << "  " << s << ": " << compact(l.states[s]);
        if (!l.expanded(s)) out << "  [frontier]";
        if (l.diverges[s] != Divergence::No) out << "  [diverges: " << to_string(l.diverges[s]) << "]";
        out << "\n";
    }
    for (const auto& e : l.edges) out << "  " << e.src << " -" << label(e.action) << "-> " << e.dst << "\n";
    return kExitTrue;
}

int exit_for(Verdict::Outcome o) {
    switch (o) {
    case Verdict::Outcome::Equivalent:
        return kExitTrue;
    case Verdict::Outcome::Inequivalent:
        return kExitFalse;
    case Verdict::Outcome::Unknown:
        break;
    }
    return kExitUnknown;
}

std::pair<std::string, std::string> pair_texts(const std::vector<std::string>& files) {
    if (files.size() == 2) return {read_file(files[0]), read_file(files[1])};
    if (files.size() == 1) return split_pair(read_file(files[0]));
    throw InvalidRequest("check needs two term files or one pair file");
}

std::vector<Term> family(const std::vector<std::string>& items) {
    std::vector<Term> out;
    for (const auto& s : items) out.push_back(parse(s, Dialect::Hoccsm).term);
    return out;
}

int check_context(const std::string& equiv, const std::pair<std::string, std::string>& texts, int game_depth,
                  const std::vector<std::string>& inputs, const std::vector<std::string>& contexts,
                  const Common& c, std::ostream& out) {
    if (auto d = dialect_flag(c.dialect); d && *d != Dialect::Hoccsm)
        throw DialectMismatch(equiv + " compares HOCCSm terms");
    Term p = parse(texts.first, Dialect::Hoccsm).term;
    Term q = parse(texts.second, Dialect::Hoccsm).term;
    auto fam = default_families(p, q);
    if (!inputs.empty()) fam.inputs = family(inputs);
    if (!contexts.empty()) fam.contexts = family(contexts);
    auto mode = equiv == "context-strong" ? GameMode::Strong : GameMode::Weak;
    auto t0 = std::chrono::steady_clock::now();
    auto v = context_game(p, q, mode, game_depth, fam);
    auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    bool ineq = v.outcome == HoVerdict::Outcome::Inequivalent;
    const char* note = "equivalence is never asserted for HOCCSm terms";
    if (c.json_out) {
        json trace = json::array();
        for (const auto& r : v.trace) {
            json step{{"attacker", r.attacker_left ? "left" : "right"},
                      {"move", render(r.attack)},
                      {"target", compact(r.attacker_target)},
                      {"answer", r.answer ? json(render(*r.answer)) : json(nullptr)},
                      {"defender_target", r.defender_target ? json(compact(*r.defender_target)) : json(nullptr)},
                      {"context", r.context ? json(compact(*r.context)) : json(nullptr)},
                      {"position", json::array({compact(r.next_left), compact(r.next_right)})}};
            trace.push_back(step);
        }
        json fi = json::array(), fc = json::array();
        for (const auto& t : fam.inputs) fi.push_back(compact(t));
        for (const auto& t : fam.contexts) fc.push_back(compact(t));
        json j{{"outcome", ineq ? "inequivalent" : "no-distinction"},
               {"kind", equiv},
               {"left", compact(p)},
               {"right", compact(q)},
               {"depth", v.depth},
               {"families_used", {{"inputs", fi}, {"contexts", fc}, {"size_bound", fam.size_bound}}},
               {"note", note}};
        if (ineq)
            j["trace"] = trace;
        j["stats"] = {{"positions", v.positions}, {"iterations", ineq ? v.rounds : v.depth}};
        if (c.timing) j["stats"]["millis"] = ms;
        out << j.dump(2) << "\n";
    } else if (ineq) {
        out << "inequivalent (" << equiv << ") in " << v.rounds << (v.rounds == 1 ? " round" : " rounds") << "\n";
        int i = 1;
        for (const auto& r : v.trace) {
            out << "  " << i++ << ". " << (r.attacker_left ? "left" : "right") << " plays " << render(r.attack);
            if (!r.answer) {
                out << "; " << (r.attacker_left ? "right" : "left") << " has no reply\n";
                continue;
            }
            out << "; reply " << render(*r.answer);
            if (r.context) out << "; context " << compact(*r.context);
            out << "\n";
        }
    } else {
        out << "unknown: no distinction up to depth " << v.depth << " (" << equiv << "); " << note << "\n";
    }
    return ineq ? kExitFalse : kExitUnknown;
}

int cmd_check(const std::string& equiv, const std::vector<std::string>& files, int game_depth,
              const std::vector<std::string>& inputs, const std::vector<std::string>& contexts, const Common& c,
              std::ostream& out) {
    auto texts = pair_texts(files);
    if (equiv == "context-strong" || equiv == "context-weak")
        return check_context(equiv, texts, game_depth, inputs, contexts, c, out);
    if (!inputs.empty() || !contexts.empty())
        throw InvalidRequest("test families apply to context-strong and context-weak only");
    auto flag = dialect_flag(c.dialect);
    Dialect d = flag.value_or(infer_dialect(texts.first) == Dialect::Hoccsm ||
                                      infer_dialect(texts.second) == Dialect::Hoccsm
                                  ? Dialect::Hoccsm
                                  : Dialect::Ccsm);
    Term p = parse(texts.first, d).term;
    Term q = parse(texts.second, d).term;
    if (equiv == "sc") {
        bool eq = sc_equal(p, q);
        if (c.json_out)
            out << json{{"outcome", eq ? "equivalent" : "inequivalent"}, {"kind", "sc"}, {"left", compact(p)},
                        {"right", compact(q)}}
                       .dump(2)
                << "\n";
        else
            out << (eq ? "equivalent" : "inequivalent") << " (sc)\n";
        return eq ? kExitTrue : kExitFalse;
    }
    auto kind = parse_equiv_kind(equiv);
    if (!kind) throw InvalidRequest("unknown equivalence \"" + equiv + "\"");
    if (d != Dialect::Ccsm) throw DialectMismatch(equiv + " compares CCSm terms; use context-strong or context-weak");
    auto t0 = std::chrono::steady_clock::now();
    auto l = build_lts(std::vector<Term>{p, q}, Bounds{c.max_states, c.max_depth});
    auto v = decide(l, l.roots[0], l.roots[1], *kind, game_depth);
    auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (c.json_out) {
        json j{{"outcome", to_string(v.outcome)}, {"kind", equiv}, {"left", v.left}, {"right", v.right}};
        json states = json::array();
        for (const auto& s : l.states) states.push_back(compact(s));
        j["states"] = states;
        if (v.partition) j["witness"] = {{"type", "partition"}, {"blocks", v.partition->blocks}};
        if (v.relation) j["witness"] = {{"type", "relation"}, {"pairs", v.relation->pairs()}};
        if (v.trace) j["trace"] = trace_json(*v.trace);
        if (v.formula) j["formula"] = render(*v.formula);
        if (v.bound)
            j["bound"] = {{"game_depth", v.bound->game_depth},
                          {"positions", v.bound->positions},
                          {"frontier", v.bound->frontier}};
        j["stats"] = {{"states", l.size()}, {"truncated", l.truncated}, {"iterations", v.iterations}};
        if (c.timing) j["stats"]["millis"] = ms;
        out << j.dump(2) << "\n";
    } else {
        if (v.outcome == Verdict::Outcome::Unknown)
            out << "unknown: no distinction up to depth " << v.bound->game_depth << " (" << equiv << "; LTS truncated at "
                << l.size() << " states)\n";
        else
            out << to_string(v.outcome) << " (" << equiv << ")\n";
        if (v.trace) print_trace(out, l, *v.trace);
        if (v.formula) out << "formula: " << render(*v.formula) << "\n";
    }
    return exit_for(v.outcome);
}

int cmd_diverges(const std::string& file, const Common& c, std::ostream& out) {
    auto l = build_lts(load_ccsm(file, c.dialect), Bounds{c.max_states, c.max_depth});
    auto d = l.diverges[l.initial];
    std::optional<GrowthWitness> w;
    if (d == Divergence::Yes && l.truncated) w = growth_witness(l, l.initial);
    if (c.json_out) {
        json j{{"diverges", to_string(d)}, {"states", l.size()}, {"truncated", l.truncated}};
        if (w) {
            json path = json::array();
            for (auto s : w->path) path.push_back(compact(l.states[s]));
            j["growth_witness"] = {{"path", path}, {"base", w->base}};
        }
        out << j.dump(2) << "\n";
    } else {
        out << to_string(d) << "\n";
        if (w) {
            out << "growth witness:";
            for (std::size_t i = 0; i < w->path.size(); ++i)
                out << (i ? " -tau-> " : " ") << compact(l.states[w->path[i]]);
            out << "\n  the last term strictly extends " << compact(l.states[w->path[w->base]]) << "\n";
        }
    }
    switch (d) {
    case Divergence::Yes:
        return kExitTrue;
    case Divergence::No:
        return kExitFalse;
    case Divergence::UnknownTruncated:
        break;
    }
    return kExitUnknown;
}

int cmd_tau(const std::string& file, const Common& c, std::ostream& out) {
    auto l = build_lts(load_ccsm(file, c.dialect), Bounds{c.max_states, c.max_depth});
    auto tc = classify_tau(l);
    if (c.json_out) {
        json edges = json::array(), k = json::array(), states = json::array();
        for (std::size_t i = 0; i < tc.tau_edges.size(); ++i)
            edges.push_back({{"edge", edge_json(tc.tau_edges[i])},
                             {"class", tc.state_changing[i] ? "state-changing" : "state-preserving"}});
        for (const auto& x : tc.k) k.push_back(x ? json(*x) : json("unbounded"));
        for (const auto& s : l.states) states.push_back(compact(s));
        out << json{{"states", states}, {"tau_edges", edges}, {"k", k}}.dump(2) << "\n";
        return kExitTrue;
    }
    for (std::size_t i = 0; i < tc.tau_edges.size(); ++i) {
        const auto& e = tc.tau_edges[i];
        out << e.src << " -tau-> " << e.dst << "  " << (tc.state_changing[i] ? "state-changing" : "state-preserving")
            << "\n";
    }
    for (StateId s = 0; s < l.size(); ++s)
        out << "k[" << s << "] = " << (tc.k[s] ? std::to_string(*tc.k[s]) : "unbounded") << "  "
            << compact(l.states[s]) << "\n";
    return kExitTrue;
}

int cmd_certify(const std::string& file, std::optional<std::size_t> budget, bool known_weak, const Common& c,
                std::ostream& out) {
    auto cert = certificate_from_json(read_file(file));
    if (budget) cert.closure_budget = *budget;
    std::optional<Lts> lts;
    std::optional<Partition> part;
    KnownEquiv known;
    if (known_weak) {
        std::vector<Term> roots;
        for (const auto& [p, q] : cert.pairs) {
            roots.push_back(p);
            roots.push_back(q);
        }
        if (!roots.empty()) {
            lts = build_lts(roots, Bounds{c.max_states, c.max_depth});
            if (!lts->truncated) {
                part = compute_partition(*lts, EquivKind::Weak);
                known = known_from_partition(*lts, *part);
            }
        }
    }
    auto r = check_certificate(cert, known);
    auto ob_json = [](const Obligation& o) {
        json j{{"pair", o.pair},
               {"challenger", o.challenger_left ? "left" : "right"},
               {"action", label(o.action)},
               {"target", compact(o.challenger_target)},
               {"via", to_string(o.via)}};
        if (o.reply_target) j["reply"] = compact(*o.reply_target);
        if (o.residual) {
            j["context"] = compact(o.context) == "0" ? "[.]" : compact(o.context) + " | [.]";
            j["residual"] = json::array({compact(o.residual->first), compact(o.residual->second)});
        }
        return j;
    };
    if (c.json_out) {
        json obs = json::array();
        for (const auto& o : r.obligations) obs.push_back(ob_json(o));
        json j{{"outcome", to_string(r.outcome)},
               {"discipline", to_string(cert.discipline)},
               {"budget", cert.closure_budget},
               {"obligations", obs}};
        if (r.failed_pair) {
            j["failed_pair"] = *r.failed_pair;
            j["reason"] = r.reason;
        }
        out << j.dump(2) << "\n";
    } else {
        out << to_string(r.outcome) << " (" << r.obligations.size() << " obligations, "
            << to_string(cert.discipline) << ")\n";
        if (r.failed_pair) out << "pair " << *r.failed_pair << ": " << r.reason << "\n";
        for (const auto& o : r.obligations) {
            out << "  pair " << o.pair << " " << (o.challenger_left ? "left" : "right") << " -" << label(o.action)
                << "-> " << compact(o.challenger_target);
            if (o.residual)
                out << "  reply " << compact(*o.reply_target) << "  context "
                    << (o.context.is_nil() ? std::string("[.]") : compact(o.context) + " | [.]") << "  via "
                    << to_string(o.via);
            else
                out << "  unmatched";
            out << "\n";
        }
    }
    switch (r.outcome) {
    case CertResult::Outcome::Certified:
        return kExitTrue;
    case CertResult::Outcome::Refuted:
        return kExitFalse;
    case CertResult::Outcome::BudgetExhausted:
        break;
    }
    return kExitUnknown;
}

int cmd_examples(bool list, const std::string& name, bool all, const Common& c, std::ostream& out,
                 std::ostream& err) {
    const auto& corpus = paper_corpus();
    if (list || (name.empty() && !all)) {
        json arr = json::array();
        for (const auto& e : corpus) {
            if (c.json_out) {
                arr.push_back({{"name", e.name},
                               {"dialect", to_string(e.dialect)},
                               {"terms", e.terms},
                               {"check", e.check},
                               {"expected", e.expected},
                               {"note", e.note}});
            } else {
                out << e.name << "  [" << e.check << "]  " << e.note << "\n";
            }
        }
        if (c.json_out) out << arr.dump(2) << "\n";
        return kExitTrue;
    }
    std::vector<const CorpusEntry*> chosen;
    for (const auto& e : corpus)
        if (all || e.name == name) chosen.push_back(&e);
    if (chosen.empty()) {
        err << "unknown example \"" << name << "\"; see paper-examples --list\n";
        return kExitUsage;
    }
    bool ok = true;
    json arr = json::array();
    for (const auto* e : chosen) {
        auto r = run_entry(*e);
        ok = ok && r.passed;
        if (c.json_out)
            arr.push_back(
                {{"name", e->name}, {"expected", e->expected}, {"observed", r.observed}, {"passed", r.passed}});
        else
            out << (r.passed ? "PASS " : "FAIL ") << e->name << "  " << e->check << "  expected=" << e->expected
                << "  observed=" << r.observed << "\n";
    }
    if (c.json_out) out << arr.dump(2) << "\n";
    return ok ? kExitTrue : kExitFalse;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Workbench for the restriction-free calculi CCSm and HOCCSm", "pcalc"};
    app.require_subcommand(1);
    Common c;

    auto bounds = [&](CLI::App* sub) {
        sub->add_option("--max-states", c.max_states, "state bound for LTS exploration")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--max-depth", c.max_depth, "BFS depth bound for LTS exploration")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };
    auto json_flag = [&](CLI::App* sub) { sub->add_flag("--json", c.json_out, "emit JSON"); };
    auto dialect_opt = [&](CLI::App* sub) {
        sub->add_option("--dialect", c.dialect, "ccsm or hoccsm (inferred when omitted)")
            ->check(CLI::IsMember({"ccsm", "hoccsm"}));
    };

    std::string file;
    std::vector<std::string> files;
    bool compact_out = false;
    auto* parse_cmd = app.add_subcommand("parse", "parse a term and print its canonical form");
    dialect_opt(parse_cmd);
    json_flag(parse_cmd);
    parse_cmd->add_flag("--compact", compact_out, "omit trailing .0");
    parse_cmd->add_option("FILE", file, "term file")->required();

    std::string dot;
    auto* lts_cmd = app.add_subcommand("lts", "build the (bounded) labelled transition system");
    bounds(lts_cmd);
    json_flag(lts_cmd);
    dialect_opt(lts_cmd);
    lts_cmd->add_option("--dot", dot, "write Graphviz output to this file");
    lts_cmd->add_option("FILE", file, "term file")->required();

    std::string equiv;
    int game_depth = 6;
    std::vector<std::string> inputs, contexts;
    auto* check_cmd = app.add_subcommand("check", "compare two terms");
    check_cmd
        ->add_option("--equiv", equiv, "sc|strong|weak|quasi-strong|branching|qs-branching|context-strong|context-weak")
        ->required()
        ->check(CLI::IsMember({"sc", "strong", "weak", "quasi-strong", "branching", "qs-branching", "context-strong",
                               "context-weak"}));
    bounds(check_cmd);
    json_flag(check_cmd);
    dialect_opt(check_cmd);
    check_cmd->add_option("--game-depth", game_depth, "depth of bounded games (defaults to --max-depth when that is given)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    check_cmd->add_flag("--timing", c.timing, "add wall-clock time to JSON stats");
    check_cmd->add_option("--inputs-family", inputs, "payloads for received messages (';'-separated terms)")
        ->delimiter(';')
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    check_cmd->add_option("--contexts-family", contexts, "receiving contexts over X (';'-separated terms)")
        ->delimiter(';')
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    check_cmd->add_option("FILES", files, "two term files, or one file holding both terms separated by ---")
        ->required()
        ->expected(1, 2);

    auto* div_cmd = app.add_subcommand("diverges", "decide divergence of a term");
    bounds(div_cmd);
    json_flag(div_cmd);
    dialect_opt(div_cmd);
    div_cmd->add_option("FILE", file, "term file")->required();

    auto* tau_cmd = app.add_subcommand("tau-classify", "label internal steps as state-changing or state-preserving");
    bounds(tau_cmd);
    json_flag(tau_cmd);
    dialect_opt(tau_cmd);
    tau_cmd->add_option("FILE", file, "term file")->required();

    std::string relation;
    std::optional<std::size_t> budget;
    bool known_weak = false;
    auto* cert_cmd = app.add_subcommand("certify", "check a relation as a weak bisimulation up to context");
    cert_cmd->add_option("--relation", relation, "certificate JSON file")->required();
    cert_cmd->add_option("--budget", budget, "terms explored per reply search")->check(CLI::PositiveNumber);
    cert_cmd->add_flag("--known-weak", known_weak,
                       "discharge residual pairs with exact weak bisimilarity when the terms are finite-state");
    bounds(cert_cmd);
    json_flag(cert_cmd);

    bool list = false, run_all = false;
    std::string run_name;
    auto* ex_cmd = app.add_subcommand("paper-examples", "list or run the built-in example corpus");
    auto* list_opt = ex_cmd->add_flag("--list", list, "list the examples");
    auto* run_opt = ex_cmd->add_option("--run", run_name, "run one example");
    auto* all_opt = ex_cmd->add_flag("--run-all", run_all, "run every example");
    list_opt->excludes(run_opt)->excludes(all_opt);
    run_opt->excludes(all_opt);
    json_flag(ex_cmd);

    std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rev.begin(), rev.end());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitTrue;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitTrue;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*parse_cmd) return cmd_parse(file, c, compact_out, out);
        if (*lts_cmd) return cmd_lts(file, c, dot, out);
        if (*check_cmd) {
            // Without an explicit game depth the exploration depth also bounds the game.
            if (check_cmd->count("--game-depth") == 0 && check_cmd->count("--max-depth") > 0)
                game_depth = static_cast<int>(c.max_depth);
            return cmd_check(equiv, files, game_depth, inputs, contexts, c, out);
        }
        if (*div_cmd) return cmd_diverges(file, c, out);
        if (*tau_cmd) return cmd_tau(file, c, out);
        if (*cert_cmd) return cmd_certify(relation, budget, known_weak, c, out);
        if (*ex_cmd) return cmd_examples(list, run_name, run_all, c, out, err);
    } catch (const TruncatedInput& e) {
        err << "unknown: " << e.what() << "\n";
        return kExitUnknown;
    } catch (const SyntaxError& e) {
        err << "syntax error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace pcalc
