#include "cra/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cra/analysis.hpp"
#include "cra/mincost.hpp"
#include "cra/oracle.hpp"
#include "cra/semantics.hpp"
#include "cra/textio.hpp"
#include "cra/transforms.hpp"

namespace cra {

namespace {

using nlohmann::json;

int oracle_maxlen_default() {
    if (const char* env = std::getenv("CRA_ORACLE_MAXLEN")) {
        int v = std::atoi(env);
        if (v >= 0) return v;
    }
    return 6;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ParseError, "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct Report {
    std::string command;
    std::string outcome;
    std::optional<std::string> value;
    std::optional<std::string> witness;
    std::optional<std::string> infimum;
    std::vector<std::string> diagnostics;
    std::string plain;  // human-readable stdout
    int exit_code = 0;

    std::string render(bool as_json) const {
        if (!as_json) return plain;
        json j;
        j["command"] = command;
        j["outcome"] = outcome;
        if (value) j["value"] = *value;
        if (witness) j["witness"] = *witness;
        if (infimum) j["infimum"] = *infimum;
        j["diagnostics"] = diagnostics;
        return j.dump() + "\n";
    }
};

std::string witness_str(const Word& w, const std::vector<Symbol>& alphabet) {
    if (w.empty()) return "";
    return word_to_string(w, alphabet);
}

Report report_outcome(const std::string& command, const Cra& m, const SolveOutcome& r) {
    Report rep;
    rep.command = command;
    switch (r.kind) {
        case SolveOutcome::Kind::Finite: {
            rep.outcome = "finite";
            rep.value = r.value.str();
            rep.witness = witness_str(r.witness, m.alphabet);
            std::ostringstream os;
            os << r.value.str() << " witness="
               << (r.witness.empty() ? "\xce\xb5" : *rep.witness) << "\n";
            rep.plain = os.str();
            break;
        }
        case SolveOutcome::Kind::Unbounded: {
            rep.outcome = "unbounded";
            if (r.infimum) {
                rep.infimum = r.infimum->str();
                rep.plain = "unbounded infimum=" + *rep.infimum + "\n";
            } else {
                rep.plain = "unbounded\n";
            }
            break;
        }
        case SolveOutcome::Kind::Empty:
            rep.outcome = "empty";
            rep.plain = "empty\n";
            break;
    }
    return rep;
}

long max_global_increment(const Cra& m) {
    long best = 1;
    std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& e) {
        if (e->kind == ExprKind::PairIncr && e->incr_is_pair && e->k1.is_integer())
            best = std::max(best, static_cast<long>(e->k1.value().get_num().get_si()));
        for (const auto& a : e->args) walk(a);
    };
    for (const auto& e : m.rho) walk(e);
    for (const auto& e : m.mu)
        if (e) walk(e);
    return best;
}

}  // namespace

CommandResult run_command(const std::vector<std::string>& argv) {
    CLI::App app{"cost register automata toolkit"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable output");

    std::string file1, file2, word_arg, out_file, target_k;
    bool trace = false;
    std::string rla_file;
    int maxlen = oracle_maxlen_default();
    long bound = -1;
    std::string epsilon_s;

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a machine on a word");
    eval_cmd->add_option("file", file1)->required();
    eval_cmd->add_option("word", word_arg);
    eval_cmd->add_flag("--trace", trace, "print the run trace");
    eval_cmd->add_option("--rla", rla_file, "look-ahead dfa file");

    auto* mincost_cmd = app.add_subcommand("mincost", "minimum cost over all words");
    std::string model_override;
    mincost_cmd->add_option("file", file1)->required();
    mincost_cmd->add_option("--model", model_override, "re-tag the machine's cost model");
    mincost_cmd->add_option("--bound", bound, "unary increment bound (global discounts)");
    mincost_cmd->add_option("--epsilon", epsilon_s, "value-iteration tolerance");

    auto* equiv_cmd = app.add_subcommand("equiv", "decide machine equivalence");
    equiv_cmd->add_option("file1", file1)->required();
    equiv_cmd->add_option("file2", file2)->required();
    equiv_cmd->add_option("--maxlen", maxlen, "bound for semi-decision modes");

    auto* contains_cmd = app.add_subcommand("contains", "decide m1(w) <= m2(w) for all w");
    contains_cmd->add_option("file1", file1)->required();
    contains_cmd->add_option("file2", file2)->required();

    auto* range_cmd = app.add_subcommand("range", "is k in the machine's range");
    range_cmd->add_option("file", file1)->required();
    range_cmd->add_option("k", target_k)->required();

    auto* convert_cmd = app.add_subcommand("convert", "machine-to-machine constructions");
    std::string op;
    convert_cmd
        ->add_option("op", op)
        ->required()
        ->check(CLI::IsMember({"sum", "diff", "plus-to-inc", "to-sv-wa", "wa-to-cra",
                               "cra-to-wa", "pairs-to-linear"}));
    convert_cmd->add_option("file1", file1)->required();
    convert_cmd->add_option("file2", file2);
    convert_cmd->add_option("-o,--output", out_file);

    auto* check_cmd = app.add_subcommand("check", "validate a machine file");
    check_cmd->add_option("file", file1)->required();

    auto* oracle_cmd = app.add_subcommand("oracle", "brute-force ground truth");
    auto* oracle_min = oracle_cmd->add_subcommand("mincost", "exhaustive minimum");
    oracle_min->add_option("file", file1)->required();
    oracle_min->add_option("--maxlen", maxlen);
    auto* oracle_eq = oracle_cmd->add_subcommand("equiv", "exhaustive comparison");
    oracle_eq->add_option("file1", file1)->required();
    oracle_eq->add_option("file2", file2)->required();
    oracle_eq->add_option("--maxlen", maxlen);
    oracle_cmd->require_subcommand(1);

    auto* gen_cmd = app.add_subcommand("gen", "machine generators");
    auto* gen_modk = gen_cmd->add_subcommand("modk", "k-state unary machine");
    int modk = 1;
    gen_modk->add_option("k", modk)->required();
    auto* gen_sat = gen_cmd->add_subcommand("sat3", "3-sat reduction machine");
    std::string clauses_arg;
    gen_sat->add_option("clauses", clauses_arg, "e.g. \"1,-2,3; 2,2,-1\"")->required();
    int sat_vars = 0;
    gen_sat->add_option("--vars", sat_vars, "variable count (default: max index)");
    auto* gen_rand = gen_cmd->add_subcommand("random", "seeded random machine");
    RandomCraOptions ropt;
    unsigned seed = 1;
    std::string grammar_name_s = "plus-c";
    gen_rand->add_option("--grammar", grammar_name_s);
    gen_rand->add_option("--states", ropt.states);
    gen_rand->add_option("--registers", ropt.registers);
    gen_rand->add_option("--alphabet", ropt.alphabet_size);
    gen_rand->add_option("--seed", seed);
    gen_rand->add_flag("--copyless", ropt.copyless);
    gen_rand->add_flag("--nonneg", ropt.nonnegative);
    gen_cmd->require_subcommand(1);

    CommandResult result;
    try {
        std::vector<std::string> args(argv.rbegin(), argv.rend());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        std::ostringstream os;
        if (e.get_exit_code() == 0) {  // --help
            os << app.help();
            return {0, os.str(), ""};
        }
        return {3, "", std::string(e.what()) + "\n"};
    }

    Report rep;
    try {
        if (*eval_cmd) {
            rep.command = "eval";
            Cra m = parse_cra(slurp(file1));
            std::vector<Configuration> tr;
            EvalResult r;
            if (!rla_file.empty()) {
                LookaheadDfa a = parse_dfa(slurp(rla_file));
                Word w = parse_word(word_arg, a.alphabet);
                r = eval_cra_rla(m, a, w, trace ? &tr : nullptr);
            } else {
                Word w = parse_word(word_arg, m.alphabet);
                r = eval_cra(m, w, trace ? &tr : nullptr);
            }
            if (trace) rep.plain += render_trace(m, tr);
            if (r.defined()) {
                rep.outcome = "value";
                rep.value = r.value->str();
                rep.plain += r.value->str() + "\n";
            } else {
                rep.outcome = "undefined";
                rep.plain += "undefined\n";
            }
        } else if (*mincost_cmd) {
            rep.command = "mincost";
            Cra m = parse_cra(slurp(file1));
            if (!model_override.empty()) {
                auto g = grammar_from_name(model_override);
                if (!g) throw Error(Errc::ParseError, "unknown cost model keyword");
                m.grammar = *g;
                m.validate();
            }
            if (!epsilon_s.empty()) {
                auto eps = ExtRational::parse(epsilon_s);
                if (!eps || eps->sign() <= 0)
                    throw Error(Errc::ParseError, "--epsilon must be a positive rational");
                // Solvers are exact; the tolerance is accepted for
                // compatibility and only validated.
            }
            SolveOutcome r;
            switch (m.grammar) {
                case GrammarKind::PlusC:
                    r = mincost_inc(m);
                    break;
                case GrammarKind::Plus:
                    r = mincost_copyless_plus(m);
                    break;
                case GrammarKind::MinPlusC:
                    r = mincost_minplus(m);
                    break;
                case GrammarKind::PastDiscount:
                    r = mincost_past_discount(m);
                    break;
                case GrammarKind::FutureDiscount:
                    r = mincost_future_discount(m);
                    break;
                case GrammarKind::GlobalDiscount:
                    r = mincost_global_discount(m, bound >= 0 ? bound : max_global_increment(m));
                    break;
                case GrammarKind::PairMinPlus:
                    r = mincost_minplus(pair_cra_to_linear_cra(m));
                    break;
                default: {
                    rep.outcome = "inconclusive";
                    rep.diagnostics.push_back(
                        "min-cost for inc-scale regular functions is an open problem; "
                        "not attempted");
                    rep.plain = "inconclusive: no solver for this model\n";
                    rep.exit_code = 2;
                    result.out = rep.render(as_json);
                    result.exit_code = rep.exit_code;
                    return result;
                }
            }
            rep = report_outcome("mincost", m, r);
        } else if (*equiv_cmd) {
            rep.command = "equiv";
            Cra m1 = parse_cra(slurp(file1));
            Cra m2 = parse_cra(slurp(file2));
            bool pair_pipeline =
                m1.grammar == GrammarKind::IncScale && m2.grammar == GrammarKind::IncScale;
            if (pair_pipeline) {
                m1 = pair_cra_to_linear_cra(m1);
                m2 = pair_cra_to_linear_cra(m2);
            }
            if (check_linear(m1) && check_linear(m2) && !grammar_uses_pairs(m1.grammar) &&
                !grammar_uses_pairs(m2.grammar)) {
                EquivResult r = equiv_affine(m1, m2);
                if (r.kind == EquivResult::Kind::Equivalent) {
                    rep.outcome = "equivalent";
                    rep.plain = "equivalent\n";
                } else {
                    rep.outcome = "counterexample";
                    rep.witness = witness_str(r.counterexample, m1.alphabet);
                    rep.plain = "counterexample " +
                                (r.counterexample.empty() ? "\xce\xb5" : *rep.witness) + "\n";
                    rep.exit_code = 1;
                }
            } else {
                bool copyful_minplus =
                    (m1.grammar == GrammarKind::MinPlusC && !check_copyless(m1).ok) ||
                    (m2.grammar == GrammarKind::MinPlusC && !check_copyless(m2).ok);
                if (copyful_minplus) {
                    rep.outcome = "refused";
                    rep.diagnostics.push_back(
                        "equivalence of copyful min-plus machines is undecidable; "
                        "use `oracle equiv` for a bounded check");
                    rep.plain = "refused: undecidable for copyful min-plus machines\n";
                    rep.exit_code = 2;
                } else {
                    if (m1.grammar == GrammarKind::PairMinPlus) m1 = pair_cra_to_linear_cra(m1);
                    if (m2.grammar == GrammarKind::PairMinPlus) m2 = pair_cra_to_linear_cra(m2);
                    BruteEquiv r = brute_equiv(m1, m2, maxlen);
                    if (!r.agree) {
                        rep.outcome = "counterexample";
                        rep.witness = witness_str(r.differs, m1.alphabet);
                        rep.plain = "counterexample " +
                                    (r.differs.empty() ? "\xce\xb5" : *rep.witness) + "\n";
                        rep.exit_code = 1;
                    } else {
                        rep.outcome = "inconclusive";
                        rep.diagnostics.push_back("semi-decision: agree on all words up to length " +
                                                  std::to_string(maxlen));
                        rep.plain = "agree up to length " + std::to_string(maxlen) +
                                    " (semi-decision)\n";
                        rep.exit_code = 2;
                    }
                }
            }
        } else if (*contains_cmd) {
            rep.command = "contains";
            Cra m1 = parse_cra(slurp(file1));
            Cra m2 = parse_cra(slurp(file2));
            ContainsResult r = contains(m1, m2);
            switch (r.kind) {
                case ContainsResult::Kind::Holds:
                    rep.outcome = "holds";
                    rep.plain = "holds\n";
                    break;
                case ContainsResult::Kind::Violation:
                    rep.outcome = "violation";
                    rep.witness = witness_str(r.witness, m1.alphabet);
                    rep.plain = "violation " + (r.witness.empty() ? "\xce\xb5" : *rep.witness) + "\n";
                    rep.exit_code = 1;
                    break;
                case ContainsResult::Kind::Unbounded:
                    rep.outcome = "unbounded";
                    if (r.has_witness) rep.witness = witness_str(r.witness, m1.alphabet);
                    rep.plain = "unbounded" + (r.has_witness ? " witness=" + *rep.witness : "") + "\n";
                    rep.exit_code = 1;
                    break;
            }
        } else if (*range_cmd) {
            rep.command = "range";
            Cra m = parse_cra(slurp(file1));
            auto k = ExtRational::parse(target_k);
            if (!k) throw Error(Errc::ParseError, "k must be a rational constant");
            RangeResult r = in_range(m, *k);
            switch (r.kind) {
                case RangeResult::Kind::Yes:
                    rep.outcome = "yes";
                    rep.witness = witness_str(r.witness, m.alphabet);
                    rep.plain = "yes witness=" + (r.witness.empty() ? "\xce\xb5" : *rep.witness) + "\n";
                    break;
                case RangeResult::Kind::No:
                    rep.outcome = "no";
                    rep.plain = "no\n";
                    rep.exit_code = 1;
                    break;
                case RangeResult::Kind::Inconclusive:
                    rep.outcome = "inconclusive";
                    rep.diagnostics.push_back(r.bounds_note);
                    rep.plain = "inconclusive (" + r.bounds_note + ")\n";
                    rep.exit_code = 2;
                    break;
            }
        } else if (*convert_cmd) {
            rep.command = "convert";
            std::string printed;
            if (op == "sum" || op == "diff") {
                if (file2.empty()) throw Error(Errc::ParseError, op + " needs two machines");
                Cra a = parse_cra(slurp(file1));
                Cra b = parse_cra(slurp(file2));
                printed = print_machine(op == "sum" ? sum_cra(a, b) : diff_cra(a, b));
            } else if (op == "plus-to-inc") {
                printed = print_machine(copyless_plus_to_inc(parse_cra(slurp(file1))));
            } else if (op == "to-sv-wa") {
                printed = print_machine(inc_to_single_valued_wa(parse_cra(slurp(file1))));
            } else if (op == "wa-to-cra") {
                printed = print_machine(wa_to_cra(parse_wa(slurp(file1))));
            } else if (op == "cra-to-wa") {
                printed = print_machine(cra_to_wa(parse_cra(slurp(file1))));
            } else if (op == "pairs-to-linear") {
                printed = print_machine(pair_cra_to_linear_cra(parse_cra(slurp(file1))));
            }
            rep.outcome = "ok";
            if (!out_file.empty()) {
                std::ofstream of(out_file);
                of << printed;
                rep.plain = "";
            } else {
                rep.plain = printed;
            }
        } else if (*check_cmd) {
            rep.command = "check";
            ParsedMachine pm = parse_machine(slurp(file1));
            std::ostringstream os;
            if (std::holds_alternative<Cra>(pm)) {
                const Cra& m = std::get<Cra>(pm);
                os << "cra model=" << grammar_name(m.grammar) << " states=" << m.num_states()
                   << " registers=" << m.num_registers() << "\n";
                auto cl = check_copyless(m);
                os << "copyless: " << (cl.ok ? "yes" : "no") << "\n";
                if (!cl.ok)
                    for (const auto& v : cl.violations)
                        os << "  register " << m.registers[static_cast<size_t>(v.reg)] << " used "
                           << v.count << " times at " << m.states[static_cast<size_t>(v.state)]
                           << (v.symbol < 0 ? " (output)"
                                            : "/" + m.alphabet[static_cast<size_t>(v.symbol)])
                           << "\n";
                os << "linear: " << (check_linear(m) ? "yes" : "no") << "\n";
            } else if (std::holds_alternative<WeightedAutomaton>(pm)) {
                const auto& wa = std::get<WeightedAutomaton>(pm);
                os << "wa semiring="
                   << (wa.semiring == Semiring::MinPlus ? "min-plus" : "plus-times")
                   << " states=" << wa.num_states() << " transitions=" << wa.transitions.size()
                   << "\n";
            } else {
                const auto& a = std::get<LookaheadDfa>(pm);
                os << "dfa states=" << a.num_states() << "\n";
            }
            rep.outcome = "ok";
            rep.plain = os.str();
        } else if (*oracle_cmd) {
            if (*oracle_min) {
                rep.command = "oracle mincost";
                Cra m = parse_cra(slurp(file1));
                BruteMin r = brute_mincost(m, maxlen);
                if (r.empty) {
                    rep.outcome = "empty";
                    rep.plain = "empty\n";
                } else {
                    rep.outcome = "finite";
                    rep.value = r.value.str();
                    rep.witness = witness_str(r.witness, m.alphabet);
                    rep.plain = r.value.str() + " witness=" +
                                (r.witness.empty() ? "\xce\xb5" : *rep.witness) + "\n";
                }
            } else {
                rep.command = "oracle equiv";
                Cra m1 = parse_cra(slurp(file1));
                Cra m2 = parse_cra(slurp(file2));
                BruteEquiv r = brute_equiv(m1, m2, maxlen);
                if (r.agree) {
                    rep.outcome = "agree";
                    rep.plain = "agree up to length " + std::to_string(maxlen) + "\n";
                } else {
                    rep.outcome = "differ";
                    rep.witness = witness_str(r.differs, m1.alphabet);
                    rep.plain = "differ " + (r.differs.empty() ? "\xce\xb5" : *rep.witness) + "\n";
                    rep.exit_code = 1;
                }
            }
        } else if (*gen_cmd) {
            rep.command = "gen";
            std::string printed;
            if (*gen_modk) {
                printed = print_machine(gen_modk_cra(modk));
            } else if (*gen_sat) {
                Formula3Sat f;
                std::istringstream in(clauses_arg);
                std::string clause;
                int maxvar = 0;
                while (std::getline(in, clause, ';')) {
                    std::array<int, 3> lits{};
                    std::istringstream cin(clause);
                    std::string lit;
                    int i = 0;
                    while (std::getline(cin, lit, ',') && i < 3) {
                        lits[static_cast<size_t>(i++)] = std::stoi(lit);
                    }
                    if (i != 3) throw Error(Errc::ParseError, "each clause needs three literals");
                    for (int l : lits) maxvar = std::max(maxvar, std::abs(l));
                    f.clauses.push_back(lits);
                }
                f.variables = sat_vars > 0 ? sat_vars : maxvar;
                printed = print_machine(gen_sat3(f));
            } else {
                auto g = grammar_from_name(grammar_name_s);
                if (!g) throw Error(Errc::ParseError, "unknown grammar keyword");
                ropt.grammar = *g;
                printed = print_machine(random_cra(ropt, seed));
            }
            rep.outcome = "ok";
            rep.plain = printed;
        }
    } catch (const Error& e) {
        rep.outcome = "error";
        rep.diagnostics.push_back(e.what());
        result.err = std::string(e.what()) + "\n";
        result.exit_code = 3;
        if (as_json) result.out = rep.render(true);
        return result;
    }

    result.out = rep.render(as_json);
    result.exit_code = rep.exit_code;
    return result;
}

}  // namespace cra
