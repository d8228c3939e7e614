#include "cra/textio.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace cra {

namespace {

struct Token {
    enum Kind { Ident, Number, Punct, End } kind;
    std::string text;
    int col;
};

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$' ||
           c == '@';
}

[[noreturn]] void parse_fail(int line, int col, const std::string& expected) {
    std::ostringstream os;
    os << "line " << line << ", col " << col << ": expected " << expected;
    throw Error(Errc::ParseError, os.str());
}

class Lexer {
public:
    Lexer(const std::string& s, int line) : s_(s), line_(line) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }
    bool at_end() const { return tok_.kind == Token::End; }

    Token expect_ident(const std::string& what) {
        if (tok_.kind != Token::Ident) parse_fail(line_, tok_.col, what);
        return take();
    }
    void expect_punct(const std::string& p) {
        if (tok_.kind != Token::Punct || tok_.text != p) parse_fail(line_, tok_.col, "'" + p + "'");
        take();
    }
    bool accept_punct(const std::string& p) {
        if (tok_.kind == Token::Punct && tok_.text == p) {
            take();
            return true;
        }
        return false;
    }

    ExtRational expect_rational() {
        bool neg = false;
        if (tok_.kind == Token::Punct && tok_.text == "-") {
            neg = true;
            take();
        }
        if (tok_.kind == Token::Ident && tok_.text == "inf") {
            if (neg) parse_fail(line_, tok_.col, "a representable constant (-inf is not)");
            take();
            return ExtRational::infinity();
        }
        if (tok_.kind != Token::Number) parse_fail(line_, tok_.col, "a constant");
        Token t = take();
        auto r = ExtRational::parse(t.text);
        if (!r) parse_fail(line_, t.col, "a well-formed constant");
        return neg ? -*r : *r;
    }

    int line() const { return line_; }

private:
    void advance() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        int col = static_cast<int>(pos_) + 1;
        if (pos_ >= s_.size()) {
            tok_ = {Token::End, "", col};
            return;
        }
        char c = s_[pos_];
        if (ident_start(c)) {
            size_t start = pos_;
            while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
            tok_ = {Token::Ident, s_.substr(start, pos_ - start), col};
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                    s_[pos_] == '/'))
                ++pos_;
            tok_ = {Token::Number, s_.substr(start, pos_ - start), col};
            return;
        }
        if (c == ':' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '=') {
            pos_ += 2;
            tok_ = {Token::Punct, ":=", col};
            return;
        }
        ++pos_;
        tok_ = {Token::Punct, std::string(1, c), col};
    }

    const std::string& s_;
    size_t pos_ = 0;
    int line_;
    Token tok_{Token::End, "", 1};
};

// Expression grammar:
//   expr    := term ('+' term)*
//   term    := constant '*' postfix | postfix | constant
//   postfix := atom ('[' inner ']')*
//   atom    := ident | 'min' '(' expr, ... ')' | 'pairsum' '(' e, e ')'
//            | 'incr' '(' e, const-or-pair ')' | 'subst' '(' e, e ')'
//            | '(' const ',' const ')' | '(' expr ')'
class ExprParser {
public:
    ExprParser(Lexer& lx, const std::vector<std::string>& regs) : lx_(lx), regs_(regs) {}

    ExprPtr parse() { return parse_sum(); }

private:
    ExprPtr parse_sum() {
        ExprPtr e = parse_term();
        while (lx_.accept_punct("+")) e = Expr::plus(e, parse_term());
        return e;
    }

    bool at_constant() const {
        return lx_.peek().kind == Token::Number ||
               (lx_.peek().kind == Token::Punct && lx_.peek().text == "-") ||
               (lx_.peek().kind == Token::Ident && lx_.peek().text == "inf");
    }

    ExprPtr parse_term() {
        if (at_constant()) {
            ExtRational k = lx_.expect_rational();
            if (lx_.accept_punct("*")) return Expr::scale(k, parse_postfix());
            return Expr::constant(k);
        }
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_atom();
        while (lx_.accept_punct("[")) {
            if (at_constant()) {
                ExtRational c = lx_.expect_rational();
                lx_.expect_punct(",");
                ExtRational d = lx_.expect_rational();
                lx_.expect_punct("]");
                e = Expr::subst(e, Expr::pair_const(c, d));
            } else {
                ExprPtr inner = parse_sum();
                lx_.expect_punct("]");
                e = Expr::subst(e, inner);
            }
        }
        return e;
    }

    ExprPtr parse_atom() {
        if (lx_.accept_punct("(")) {
            if (at_constant()) {
                ExtRational c = lx_.expect_rational();
                if (lx_.accept_punct(",")) {
                    ExtRational d = lx_.expect_rational();
                    lx_.expect_punct(")");
                    return Expr::pair_const(c, d);
                }
                lx_.expect_punct(")");
                return Expr::constant(c);
            }
            ExprPtr e = parse_sum();
            lx_.expect_punct(")");
            return e;
        }
        Token t = lx_.expect_ident("an expression");
        if (t.text == "min") {
            lx_.expect_punct("(");
            std::vector<ExprPtr> args;
            args.push_back(parse_sum());
            while (lx_.accept_punct(",")) args.push_back(parse_sum());
            lx_.expect_punct(")");
            if (args.size() < 2) parse_fail(lx_.line(), t.col, "min with arity >= 2");
            return Expr::min_of(std::move(args));
        }
        if (t.text == "pairsum" || t.text == "subst") {
            lx_.expect_punct("(");
            ExprPtr a = parse_sum();
            lx_.expect_punct(",");
            ExprPtr b = parse_sum();
            lx_.expect_punct(")");
            return t.text == "pairsum" ? Expr::pair_sum(a, b) : Expr::subst(a, b);
        }
        if (t.text == "incr") {
            lx_.expect_punct("(");
            ExprPtr a = parse_sum();
            lx_.expect_punct(",");
            if (lx_.accept_punct("(")) {
                ExtRational c = lx_.expect_rational();
                lx_.expect_punct(",");
                ExtRational d = lx_.expect_rational();
                lx_.expect_punct(")");
                lx_.expect_punct(")");
                return Expr::pair_incr(a, c, d);
            }
            ExtRational d = lx_.expect_rational();
            lx_.expect_punct(")");
            return Expr::pair_incr(a, d);
        }
        int r = static_cast<int>(std::find(regs_.begin(), regs_.end(), t.text) - regs_.begin());
        if (r == static_cast<int>(regs_.size()))
            parse_fail(lx_.line(), t.col, "a register name (got '" + t.text + "')");
        return Expr::reg_ref(r);
    }

    Lexer& lx_;
    const std::vector<std::string>& regs_;
};

struct Line {
    int number;
    std::string text;
};

std::vector<Line> logical_lines(const std::string& text) {
    std::vector<Line> out;
    std::istringstream in(text);
    std::string raw;
    int n = 0;
    while (std::getline(in, raw)) {
        ++n;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)); };
        if (std::all_of(raw.begin(), raw.end(), is_space)) continue;
        out.push_back({n, raw});
    }
    return out;
}

std::vector<std::string> split_words(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

Cra parse_cra_lines(const std::vector<Line>& lines) {
    GrammarKind grammar = GrammarKind::PlusC;
    bool have_model = false;
    std::vector<Symbol> alphabet;
    std::vector<std::string> registers;
    std::vector<std::string> states;
    std::string initial;
    struct OutputLine { int number; std::string state, expr; };
    struct TransLine { int number; std::string from, sym, to, updates; };
    struct InitValLine { int number; std::string reg, value; };
    std::vector<OutputLine> outputs;
    std::vector<TransLine> transitions;
    std::vector<InitValLine> initvals;

    auto note_state = [&](const std::string& s) {
        if (std::find(states.begin(), states.end(), s) == states.end()) states.push_back(s);
    };

    for (size_t i = 1; i < lines.size(); ++i) {
        const Line& ln = lines[i];
        std::istringstream in(ln.text);
        std::string head;
        in >> head;
        std::string rest;
        std::getline(in, rest);
        if (head == "model") {
            auto ws = split_words(rest);
            if (ws.size() != 1) parse_fail(ln.number, 1, "model <name>");
            auto g = grammar_from_name(ws[0]);
            if (!g) parse_fail(ln.number, 1, "a known cost model keyword");
            grammar = *g;
            have_model = true;
        } else if (head == "alphabet") {
            alphabet = split_words(rest);
            if (alphabet.empty()) parse_fail(ln.number, 1, "at least one symbol");
        } else if (head == "registers") {
            registers = split_words(rest);
        } else if (head == "init") {
            auto ws = split_words(rest);
            if (ws.size() != 1) parse_fail(ln.number, 1, "init <state>");
            initial = ws[0];
            note_state(initial);
        } else if (head == "initval") {
            auto eq = rest.find('=');
            if (eq == std::string::npos) parse_fail(ln.number, 1, "initval <reg> = <value>");
            auto regw = split_words(rest.substr(0, eq));
            if (regw.size() != 1) parse_fail(ln.number, 1, "initval <reg> = <value>");
            initvals.push_back({ln.number, regw[0], rest.substr(eq + 1)});
        } else if (head == "output") {
            auto eq = rest.find('=');
            if (eq == std::string::npos) parse_fail(ln.number, 1, "output <state> = <expr>");
            auto sw = split_words(rest.substr(0, eq));
            if (sw.size() != 1) parse_fail(ln.number, 1, "output <state> = <expr>");
            // State order comes from init/trans lines; outputs only refer.
            outputs.push_back({ln.number, sw[0], rest.substr(eq + 1)});
        } else if (head == "trans") {
            auto colon = rest.find(':');
            std::string headpart = colon == std::string::npos ? rest : rest.substr(0, colon);
            std::string updates = colon == std::string::npos ? "" : rest.substr(colon + 1);
            auto ws = split_words(headpart);
            if (ws.size() != 3) parse_fail(ln.number, 1, "trans <state> <symbol> <state> [: updates]");
            note_state(ws[0]);
            note_state(ws[2]);
            transitions.push_back({ln.number, ws[0], ws[1], ws[2], updates});
        } else {
            parse_fail(ln.number, 1, "a cra section keyword");
        }
    }

    if (!have_model) parse_fail(lines.empty() ? 1 : lines[0].number, 1, "a model line");
    if (initial.empty()) parse_fail(lines[0].number, 1, "an init line");

    CraBuilder b(grammar, alphabet);
    for (const auto& r : registers) b.add_register(r);
    for (const auto& s : states) b.add_state(s);
    b.set_initial(static_cast<int>(std::find(states.begin(), states.end(), initial) - states.begin()));

    for (const auto& iv : initvals) {
        int r = static_cast<int>(std::find(registers.begin(), registers.end(), iv.reg) -
                                 registers.begin());
        if (r == static_cast<int>(registers.size()))
            parse_fail(iv.number, 1, "a declared register in initval");
        Lexer lx(iv.value, iv.number);
        if (grammar_uses_pairs(grammar)) {
            lx.expect_punct("(");
            ExtRational c = lx.expect_rational();
            lx.expect_punct(",");
            ExtRational d = lx.expect_rational();
            lx.expect_punct(")");
            if (!lx.at_end()) parse_fail(iv.number, 1, "end of line");
            b.set_init_value(r, Value::make_pair(c, d));
        } else {
            ExtRational v = lx.expect_rational();
            if (!lx.at_end()) parse_fail(iv.number, 1, "end of line");
            b.set_init_value(r, Value(v));
        }
    }

    for (const auto& o : outputs) {
        Lexer lx(o.expr, o.number);
        ExprParser p(lx, registers);
        ExprPtr e = p.parse();
        if (!lx.at_end()) parse_fail(o.number, lx.peek().col, "end of line");
        auto it = std::find(states.begin(), states.end(), o.state);
        if (it == states.end())
            parse_fail(o.number, 1, "a state with transitions (got '" + o.state + "')");
        b.set_output(static_cast<int>(it - states.begin()), e);
    }

    for (const auto& t : transitions) {
        int from = static_cast<int>(std::find(states.begin(), states.end(), t.from) - states.begin());
        int to = static_cast<int>(std::find(states.begin(), states.end(), t.to) - states.begin());
        b.set_transition(from, t.sym, to);
        Lexer lx(t.updates, t.number);
        bool first = true;
        while (!lx.at_end()) {
            if (!first) lx.expect_punct(";");
            if (lx.at_end()) break;
            first = false;
            Token reg = lx.expect_ident("a register name");
            int r = static_cast<int>(std::find(registers.begin(), registers.end(), reg.text) -
                                     registers.begin());
            if (r == static_cast<int>(registers.size()))
                parse_fail(t.number, reg.col, "a declared register");
            lx.expect_punct(":=");
            ExprParser p(lx, registers);
            b.set_update(from, t.sym, r, p.parse());
        }
    }

    return b.finish();
}

WeightedAutomaton parse_wa_lines(const std::vector<Line>& lines) {
    WeightedAutomaton wa;
    std::vector<std::string> states;
    struct WLine { int number; std::string state; std::string value; bool initial; };
    struct TLine { int number; std::string from, sym, cost, to; };
    std::vector<WLine> weights;
    std::vector<TLine> trans;
    auto note_state = [&](const std::string& s) {
        if (std::find(states.begin(), states.end(), s) == states.end()) states.push_back(s);
    };
    bool have_semiring = false;

    for (size_t i = 1; i < lines.size(); ++i) {
        const Line& ln = lines[i];
        std::istringstream in(ln.text);
        std::string head;
        in >> head;
        std::string rest;
        std::getline(in, rest);
        if (head == "semiring") {
            auto ws = split_words(rest);
            if (ws.size() != 1 || (ws[0] != "min-plus" && ws[0] != "plus-times"))
                parse_fail(ln.number, 1, "semiring min-plus | plus-times");
            wa.semiring = ws[0] == "min-plus" ? Semiring::MinPlus : Semiring::PlusTimes;
            have_semiring = true;
        } else if (head == "alphabet") {
            wa.alphabet = split_words(rest);
        } else if (head == "initw" || head == "finalw") {
            auto eq = rest.find('=');
            if (eq == std::string::npos) parse_fail(ln.number, 1, head + " <state> = <weight>");
            auto sw = split_words(rest.substr(0, eq));
            if (sw.size() != 1) parse_fail(ln.number, 1, head + " <state> = <weight>");
            note_state(sw[0]);
            weights.push_back({ln.number, sw[0], rest.substr(eq + 1), head == "initw"});
        } else if (head == "trans") {
            auto ws = split_words(rest);
            if (ws.size() != 4) parse_fail(ln.number, 1, "trans <state> <symbol> <cost> <state>");
            note_state(ws[0]);
            note_state(ws[3]);
            trans.push_back({ln.number, ws[0], ws[1], ws[2], ws[3]});
        } else {
            parse_fail(ln.number, 1, "a wa section keyword");
        }
    }
    if (!have_semiring) parse_fail(lines[0].number, 1, "a semiring line");

    wa.states = states;
    wa.initial_weights.assign(states.size(), std::nullopt);
    wa.final_weights.assign(states.size(), std::nullopt);
    for (const auto& w : weights) {
        auto v = ExtRational::parse(split_words(w.value).size() == 1 ? split_words(w.value)[0] : "");
        if (!v) parse_fail(w.number, 1, "a weight constant");
        size_t q = static_cast<size_t>(std::find(states.begin(), states.end(), w.state) -
                                       states.begin());
        (w.initial ? wa.initial_weights : wa.final_weights)[q] = *v;
    }
    for (const auto& t : trans) {
        int a = wa.symbol_index(t.sym);
        if (a < 0) parse_fail(t.number, 1, "a symbol from the alphabet");
        auto c = ExtRational::parse(t.cost);
        if (!c) parse_fail(t.number, 1, "a cost constant");
        wa.transitions.push_back({wa.state_index(t.from), a, *c, wa.state_index(t.to)});
    }
    wa.validate();
    return wa;
}

LookaheadDfa parse_dfa_lines(const std::vector<Line>& lines) {
    LookaheadDfa a;
    std::vector<std::string> states;
    struct TLine { int number; std::string from, sym, to; };
    std::vector<TLine> trans;
    std::string initial;
    auto note_state = [&](const std::string& s) {
        if (std::find(states.begin(), states.end(), s) == states.end()) states.push_back(s);
    };
    for (size_t i = 1; i < lines.size(); ++i) {
        const Line& ln = lines[i];
        std::istringstream in(ln.text);
        std::string head;
        in >> head;
        std::string rest;
        std::getline(in, rest);
        if (head == "alphabet") {
            a.alphabet = split_words(rest);
        } else if (head == "init") {
            auto ws = split_words(rest);
            if (ws.size() != 1) parse_fail(ln.number, 1, "init <state>");
            initial = ws[0];
            note_state(initial);
        } else if (head == "trans") {
            auto ws = split_words(rest);
            if (ws.size() != 3) parse_fail(ln.number, 1, "trans <state> <symbol> <state>");
            note_state(ws[0]);
            note_state(ws[2]);
            trans.push_back({ln.number, ws[0], ws[1], ws[2]});
        } else {
            parse_fail(ln.number, 1, "a dfa section keyword");
        }
    }
    if (initial.empty()) parse_fail(lines[0].number, 1, "an init line");
    a.states = states;
    a.initial = static_cast<int>(std::find(states.begin(), states.end(), initial) - states.begin());
    a.delta.assign(states.size() * a.alphabet.size(), -1);
    for (const auto& t : trans) {
        int s = a.symbol_index(t.sym);
        if (s < 0) parse_fail(t.number, 1, "a symbol from the alphabet");
        size_t from = static_cast<size_t>(std::find(states.begin(), states.end(), t.from) -
                                          states.begin());
        size_t to = static_cast<size_t>(std::find(states.begin(), states.end(), t.to) -
                                        states.begin());
        a.delta[from * a.alphabet.size() + static_cast<size_t>(s)] = static_cast<int>(to);
    }
    a.validate();
    return a;
}

}  // namespace

ParsedMachine parse_machine(const std::string& text) {
    auto lines = logical_lines(text);
    if (lines.empty()) parse_fail(1, 1, "header (cra | wa | dfa)");
    auto head = split_words(lines[0].text);
    if (head.size() != 1) parse_fail(lines[0].number, 1, "header (cra | wa | dfa)");
    if (head[0] == "cra") return parse_cra_lines(lines);
    if (head[0] == "wa") return parse_wa_lines(lines);
    if (head[0] == "dfa") return parse_dfa_lines(lines);
    parse_fail(lines[0].number, 1, "header (cra | wa | dfa)");
}

Cra parse_cra(const std::string& text) {
    auto m = parse_machine(text);
    if (!std::holds_alternative<Cra>(m))
        throw Error(Errc::ParseError, "expected a cra machine file");
    return std::get<Cra>(std::move(m));
}

WeightedAutomaton parse_wa(const std::string& text) {
    auto m = parse_machine(text);
    if (!std::holds_alternative<WeightedAutomaton>(m))
        throw Error(Errc::ParseError, "expected a wa machine file");
    return std::get<WeightedAutomaton>(std::move(m));
}

LookaheadDfa parse_dfa(const std::string& text) {
    auto m = parse_machine(text);
    if (!std::holds_alternative<LookaheadDfa>(m))
        throw Error(Errc::ParseError, "expected a dfa machine file");
    return std::get<LookaheadDfa>(std::move(m));
}

namespace {

void join_names(std::ostream& os, const std::vector<std::string>& names) {
    for (size_t i = 0; i < names.size(); ++i) os << (i ? " " : "") << names[i];
}

}  // namespace

std::string print_machine(const Cra& m) {
    std::ostringstream os;
    os << "cra\n";
    os << "model " << grammar_name(m.grammar) << "\n";
    os << "alphabet ";
    join_names(os, m.alphabet);
    os << "\n";
    if (!m.registers.empty()) {
        os << "registers ";
        join_names(os, m.registers);
        os << "\n";
    }
    os << "init " << m.states[static_cast<size_t>(m.initial)] << "\n";
    Value identity = grammar_identity(m.grammar);
    for (int r = 0; r < m.num_registers(); ++r)
        if (!(m.init_values[static_cast<size_t>(r)] == identity))
            os << "initval " << m.registers[static_cast<size_t>(r)] << " = "
               << m.init_values[static_cast<size_t>(r)].str() << "\n";
    for (int q = 0; q < m.num_states(); ++q)
        if (m.mu[static_cast<size_t>(q)])
            os << "output " << m.states[static_cast<size_t>(q)] << " = "
               << expr_to_string(m.mu[static_cast<size_t>(q)], m.registers) << "\n";
    for (int q = 0; q < m.num_states(); ++q) {
        for (int a = 0; a < m.num_symbols(); ++a) {
            os << "trans " << m.states[static_cast<size_t>(q)] << " "
               << m.alphabet[static_cast<size_t>(a)] << " "
               << m.states[static_cast<size_t>(m.next_state(q, a))];
            std::string sep = " : ";
            for (int r = 0; r < m.num_registers(); ++r) {
                const ExprPtr& e = m.update(q, a, r);
                if (e->kind == ExprKind::Reg && e->reg == r) continue;  // identity
                os << sep << m.registers[static_cast<size_t>(r)] << " := "
                   << expr_to_string(e, m.registers);
                sep = " ; ";
            }
            os << "\n";
        }
    }
    return os.str();
}

std::string print_machine(const WeightedAutomaton& wa) {
    std::ostringstream os;
    os << "wa\n";
    os << "semiring " << (wa.semiring == Semiring::MinPlus ? "min-plus" : "plus-times") << "\n";
    os << "alphabet ";
    join_names(os, wa.alphabet);
    os << "\n";
    for (size_t q = 0; q < wa.states.size(); ++q)
        if (wa.initial_weights[q])
            os << "initw " << wa.states[q] << " = " << wa.initial_weights[q]->str() << "\n";
    for (size_t q = 0; q < wa.states.size(); ++q)
        if (wa.final_weights[q])
            os << "finalw " << wa.states[q] << " = " << wa.final_weights[q]->str() << "\n";
    for (const auto& t : wa.transitions)
        os << "trans " << wa.states[static_cast<size_t>(t.from)] << " "
           << wa.alphabet[static_cast<size_t>(t.symbol)] << " " << t.cost.str() << " "
           << wa.states[static_cast<size_t>(t.to)] << "\n";
    return os.str();
}

std::string print_machine(const LookaheadDfa& a) {
    std::ostringstream os;
    os << "dfa\n";
    os << "alphabet ";
    join_names(os, a.alphabet);
    os << "\n";
    os << "init " << a.states[static_cast<size_t>(a.initial)] << "\n";
    for (int q = 0; q < a.num_states(); ++q)
        for (size_t s = 0; s < a.alphabet.size(); ++s)
            os << "trans " << a.states[static_cast<size_t>(q)] << " " << a.alphabet[s] << " "
               << a.states[static_cast<size_t>(a.next_state(q, static_cast<int>(s)))] << "\n";
    return os.str();
}

Word parse_word(const std::string& text, const std::vector<Symbol>& alphabet) {
    bool single_char = !alphabet.empty() &&
                       std::all_of(alphabet.begin(), alphabet.end(),
                                   [](const Symbol& s) { return s.size() == 1; });
    Word w;
    if (single_char && text.find(' ') == std::string::npos &&
        text.find(',') == std::string::npos) {
        for (char c : text) w.push_back(std::string(1, c));
        return w;
    }
    std::string cur;
    for (char c : text) {
        if (c == ' ' || c == ',' || c == '\t') {
            if (!cur.empty()) w.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) w.push_back(cur);
    return w;
}

std::string fresh_name(const std::vector<std::string>& taken, const std::string& base) {
    if (std::find(taken.begin(), taken.end(), base) == taken.end()) return base;
    for (int i = 2;; ++i) {
        std::string cand = base + "_" + std::to_string(i);
        if (std::find(taken.begin(), taken.end(), cand) == taken.end()) return cand;
    }
}

}  // namespace cra
