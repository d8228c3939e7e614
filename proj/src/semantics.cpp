#include "cra/semantics.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace cra {

Value eval_expr(const ExprPtr& e, const std::vector<Value>& valuation, GrammarKind g) {
    switch (e->kind) {
        case ExprKind::Const:
            return Value(e->k1);
        case ExprKind::Reg:
            return valuation.at(static_cast<size_t>(e->reg));
        case ExprKind::Plus: {
            Value a = eval_expr(e->args[0], valuation, g);
            Value b = eval_expr(e->args[1], valuation, g);
            return Value(a.c + b.c);
        }
        case ExprKind::Min: {
            Value acc = eval_expr(e->args[0], valuation, g);
            for (size_t i = 1; i < e->args.size(); ++i)
                acc = Value(min(acc.c, eval_expr(e->args[i], valuation, g).c));
            return acc;
        }
        case ExprKind::Scale: {
            Value a = eval_expr(e->args[0], valuation, g);
            return Value(e->k1 * a.c);
        }
        case ExprKind::PairConst:
            return Value::make_pair(e->k1, e->k2);
        case ExprKind::PairSum: {
            Semiring s = pair_semiring(g);
            Value a = eval_expr(e->args[0], valuation, g);
            Value b = eval_expr(e->args[1], valuation, g);
            return Value::make_pair(sr_plus(s, a.c, b.c), a.d);
        }
        case ExprKind::PairIncr: {
            Value a = eval_expr(e->args[0], valuation, g);
            if (e->incr_is_pair) {
                // Global discounts track (cost sum, discount product).
                return Value::make_pair(a.c + e->k1, a.d * e->k2);
            }
            Semiring s = pair_semiring(g);
            return Value::make_pair(sr_times(s, a.c, e->k1), sr_times(s, a.d, e->k1));
        }
        case ExprKind::Subst: {
            Semiring s = pair_semiring(g);
            Value a = eval_expr(e->args[0], valuation, g);
            Value b = eval_expr(e->args[1], valuation, g);
            return Value::make_pair(sr_plus(s, a.c, sr_times(s, a.d, b.c)),
                                    sr_times(s, a.d, b.d));
        }
    }
    throw Error(Errc::Internal, "unhandled expression kind");
}

ExtRational project_output(const Value& v, GrammarKind g) {
    if (!v.pair) return v.c;
    switch (g) {
        case GrammarKind::PairMinPlus:
            return min(v.c, v.d);  // (d + 0) min c
        case GrammarKind::GlobalDiscount:
            return v.c * v.d;
        default:
            return v.c;  // c + d*0
    }
}

EvalResult eval_cra(const Cra& m, const Word& w, std::vector<Configuration>* trace) {
    int q = m.initial;
    std::vector<Value> val = m.init_values;
    if (trace) trace->push_back({q, val});
    std::vector<Value> next(val.size());
    for (const Symbol& sym : w) {
        int a = m.symbol_index(sym);
        if (a < 0) throw Error(Errc::UnknownSymbol, "symbol '" + sym + "' not in alphabet");
        for (int r = 0; r < m.num_registers(); ++r)
            next[static_cast<size_t>(r)] = eval_expr(m.update(q, a, r), val, m.grammar);
        val.swap(next);
        q = m.next_state(q, a);
        if (trace) trace->push_back({q, val});
    }
    const ExprPtr& out = m.output(q);
    if (!out) return {};
    return {project_output(eval_expr(out, val, m.grammar), m.grammar)};
}

Word lookahead_labeling(const LookaheadDfa& a, const Word& w) {
    Word labels(w.size());
    int r = a.initial;
    for (size_t j = w.size(); j-- > 0;) {
        int s = a.symbol_index(w[j]);
        if (s < 0) throw Error(Errc::UnknownSymbol, "symbol '" + w[j] + "' not in dfa alphabet");
        r = a.next_state(r, s);
        labels[j] = a.states[static_cast<size_t>(r)];
    }
    return labels;
}

EvalResult eval_cra_rla(const Cra& m, const LookaheadDfa& a, const Word& w,
                        std::vector<Configuration>* trace) {
    std::set<std::string> ma(m.alphabet.begin(), m.alphabet.end());
    std::set<std::string> as(a.states.begin(), a.states.end());
    if (ma != as)
        throw Error(Errc::AlphabetMismatch,
                    "machine alphabet must equal the look-ahead automaton's state set");
    return eval_cra(m, lookahead_labeling(a, w), trace);
}

namespace {

struct PathEnum {
    const WeightedAutomaton& wa;
    const Word& w;
    std::vector<int> symbols;
    std::vector<std::vector<const WaTransition*>> by_source;  // outgoing edges per state
    std::uint64_t cap;
    std::uint64_t count = 0;
    std::function<void(const ExtRational&)> on_path;

    PathEnum(const WeightedAutomaton& wa_, const Word& w_, std::uint64_t cap_)
        : wa(wa_), w(w_), cap(cap_) {
        symbols.reserve(w.size());
        for (const Symbol& s : w) {
            int a = wa.symbol_index(s);
            if (a < 0) throw Error(Errc::UnknownSymbol, "symbol '" + s + "' not in alphabet");
            symbols.push_back(a);
        }
        by_source.resize(wa.states.size());
        for (const auto& t : wa.transitions)
            by_source[static_cast<size_t>(t.from)].push_back(&t);
    }

    void walk(size_t pos, int state, const ExtRational& acc) {
        if (pos == symbols.size()) {
            const auto& fw = wa.final_weights[static_cast<size_t>(state)];
            if (!fw) return;
            if (++count > cap)
                throw Error(Errc::PathExplosion, "accepting path count exceeds cap");
            on_path(sr_times(wa.semiring, acc, *fw));
            return;
        }
        for (const WaTransition* t : by_source[static_cast<size_t>(state)]) {
            if (t->symbol != symbols[pos]) continue;
            walk(pos + 1, t->to, sr_times(wa.semiring, acc, t->cost));
        }
    }

    void run() {
        for (int q = 0; q < wa.num_states(); ++q) {
            const auto& iw = wa.initial_weights[static_cast<size_t>(q)];
            if (iw) walk(0, q, *iw);
        }
    }
};

}  // namespace

EvalResult eval_wa(const WeightedAutomaton& wa, const Word& w, std::uint64_t path_cap) {
    PathEnum en(wa, w, path_cap);
    std::optional<ExtRational> agg;
    en.on_path = [&](const ExtRational& v) {
        agg = agg ? sr_plus(wa.semiring, *agg, v) : v;
    };
    en.run();
    if (!agg) return {};
    return {*agg};
}

std::uint64_t count_accepting_paths(const WeightedAutomaton& wa, const Word& w,
                                    std::uint64_t path_cap) {
    PathEnum en(wa, w, path_cap);
    en.on_path = [](const ExtRational&) {};
    en.run();
    return en.count;
}

std::string render_trace(const Cra& m, const std::vector<Configuration>& trace) {
    std::ostringstream os;
    for (const auto& cfg : trace) {
        os << m.states[static_cast<size_t>(cfg.state)] << " |";
        for (size_t r = 0; r < cfg.valuation.size(); ++r)
            os << " " << m.registers[r] << "=" << cfg.valuation[r].str();
        os << "\n";
    }
    return os.str();
}

}  // namespace cra
