#include "cra/transforms.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "cra/semantics.hpp"
#include "cra/textio.hpp"

namespace cra {

namespace {

// Additive-grammar decomposition: register multiset plus a constant.
struct SumForm {
    std::vector<RegIdx> regs;
    ExtRational constant = ExtRational(0);
};

SumForm sum_form(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::Const:
            return {{}, e->k1};
        case ExprKind::Reg:
            return {{e->reg}, ExtRational(0)};
        case ExprKind::Plus: {
            SumForm a = sum_form(e->args[0]);
            SumForm b = sum_form(e->args[1]);
            a.regs.insert(a.regs.end(), b.regs.begin(), b.regs.end());
            a.constant += b.constant;
            return a;
        }
        default:
            throw Error(Errc::GrammarMismatch, "expression outside the additive grammar");
    }
}

ExprPtr sum_to_expr(const std::vector<RegIdx>& regs, const ExtRational& c) {
    ExprPtr acc;
    for (RegIdx r : regs) {
        ExprPtr t = Expr::reg_ref(r);
        acc = acc ? Expr::plus(acc, t) : t;
    }
    if (!acc) return Expr::constant(c);
    if (c.is_zero()) return acc;
    return Expr::plus(acc, Expr::constant(c));
}

std::string join_names(const std::vector<std::string>& all, const std::vector<int>& members,
                       const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < members.size(); ++i) {
        if (i) out += sep;
        out += all[static_cast<size_t>(members[i])];
    }
    return out;
}

Cra combine_additive(const Cra& m1, const Cra& m2, bool subtract) {
    if (m1.alphabet != m2.alphabet)
        throw Error(Errc::AlphabetMismatch, "machines must share an alphabet");
    auto additive = [](GrammarKind g) { return g == GrammarKind::Plus || g == GrammarKind::PlusC; };
    if (!additive(m1.grammar) || !additive(m2.grammar))
        throw Error(Errc::GrammarMismatch, "sum/difference needs additive machines");

    if (subtract)
        for (const Value& v : m2.init_values)
            if (v.c.is_infinite())
                throw Error(Errc::UnsupportedConstants,
                            "subtraction needs a domain closed under negation");

    int n1 = m1.num_registers(), n2 = m2.num_registers();
    GrammarKind grammar =
        (m1.grammar == GrammarKind::PlusC && m2.grammar == GrammarKind::PlusC)
            ? GrammarKind::PlusC
            : GrammarKind::Plus;

    // Register layout: all pairs first, then the two singleton blocks.
    auto pair_idx = [&](RegIdx x, RegIdx y) { return x * n2 + y; };
    auto left_idx = [&](RegIdx x) { return n1 * n2 + x; };
    auto right_idx = [&](RegIdx y) { return n1 * n2 + n1 + y; };

    CraBuilder b(grammar, m1.alphabet);
    for (int x = 0; x < n1; ++x)
        for (int y = 0; y < n2; ++y)
            b.add_register("a_" + m1.registers[static_cast<size_t>(x)] + "@b_" +
                           m2.registers[static_cast<size_t>(y)]);
    for (int x = 0; x < n1; ++x) b.add_register("a_" + m1.registers[static_cast<size_t>(x)]);
    for (int y = 0; y < n2; ++y) b.add_register("b_" + m2.registers[static_cast<size_t>(y)]);

    auto right_init = [&](RegIdx y) {
        const ExtRational& v = m2.init_values[static_cast<size_t>(y)].c;
        return subtract ? -v : v;
    };
    for (int x = 0; x < n1; ++x)
        for (int y = 0; y < n2; ++y)
            b.set_init_value(pair_idx(x, y),
                             Value(m1.init_values[static_cast<size_t>(x)].c + right_init(y)));
    for (int x = 0; x < n1; ++x)
        b.set_init_value(left_idx(x), m1.init_values[static_cast<size_t>(x)]);
    for (int y = 0; y < n2; ++y) b.set_init_value(right_idx(y), Value(right_init(y)));

    for (int q1 = 0; q1 < m1.num_states(); ++q1)
        for (int q2 = 0; q2 < m2.num_states(); ++q2)
            b.add_state(m1.states[static_cast<size_t>(q1)] + "@" +
                        m2.states[static_cast<size_t>(q2)]);
    auto st = [&](int q1, int q2) { return q1 * m2.num_states() + q2; };
    b.set_initial(st(m1.initial, m2.initial));

    // Combined right-hand side for a pair register: collapse to a pair
    // register when one register flows on each side, otherwise spell the sum
    // over singletons.
    auto combine_exprs = [&](const ExprPtr& e1, const ExprPtr& e2) {
        SumForm s1 = sum_form(e1);
        SumForm s2 = sum_form(e2);
        ExtRational c = subtract ? s1.constant - s2.constant : s1.constant + s2.constant;
        if (s1.regs.size() == 1 && s2.regs.size() == 1) {
            RegIdx p = pair_idx(s1.regs[0], s2.regs[0]);
            return c.is_zero() ? Expr::reg_ref(p) : Expr::plus(Expr::reg_ref(p), Expr::constant(c));
        }
        std::vector<RegIdx> regs;
        for (RegIdx r : s1.regs) regs.push_back(left_idx(r));
        for (RegIdx r : s2.regs) regs.push_back(right_idx(r));
        return sum_to_expr(regs, c);
    };
    auto remap_side = [&](const ExprPtr& e, bool right) {
        SumForm s = sum_form(e);
        std::vector<RegIdx> regs;
        for (RegIdx r : s.regs) regs.push_back(right ? right_idx(r) : left_idx(r));
        ExtRational c = right && subtract ? -s.constant : s.constant;
        return sum_to_expr(regs, c);
    };

    for (int q1 = 0; q1 < m1.num_states(); ++q1) {
        for (int q2 = 0; q2 < m2.num_states(); ++q2) {
            int q = st(q1, q2);
            for (int a = 0; a < m1.num_symbols(); ++a) {
                const Symbol& sym = m1.alphabet[static_cast<size_t>(a)];
                int a2 = m2.symbol_index(sym);
                b.set_transition(q, sym, st(m1.next_state(q1, a), m2.next_state(q2, a2)));
                for (int x = 0; x < n1; ++x)
                    for (int y = 0; y < n2; ++y)
                        b.set_update(q, sym, pair_idx(x, y),
                                     combine_exprs(m1.update(q1, a, x), m2.update(q2, a2, y)));
                for (int x = 0; x < n1; ++x)
                    b.set_update(q, sym, left_idx(x), remap_side(m1.update(q1, a, x), false));
                for (int y = 0; y < n2; ++y)
                    b.set_update(q, sym, right_idx(y), remap_side(m2.update(q2, a2, y), true));
            }
            const ExprPtr& o1 = m1.output(q1);
            const ExprPtr& o2 = m2.output(q2);
            if (o1 && o2) b.set_output(q, combine_exprs(o1, o2));
        }
    }
    return prune_unreachable(b.finish());
}

}  // namespace

Cra sum_cra(const Cra& m1, const Cra& m2) { return combine_additive(m1, m2, false); }
Cra diff_cra(const Cra& m1, const Cra& m2) { return combine_additive(m1, m2, true); }

Cra copyless_plus_to_inc(const Cra& m) {
    if (m.grammar != GrammarKind::Plus && m.grammar != GrammarKind::PlusC)
        throw Error(Errc::GrammarMismatch, "translation needs an additive machine");
    auto rep = check_copyless(m);
    if (!rep.ok) throw Error(Errc::NotCopyless, "machine is not copyless");

    int k = m.num_registers();
    unsigned nmask = 1u << k;

    CraBuilder b(GrammarKind::PlusC, m.alphabet);
    for (unsigned mask = 0; mask < nmask; ++mask) {
        std::vector<int> members;
        for (int x = 0; x < k; ++x)
            if (mask & (1u << x)) members.push_back(x);
        b.add_register("s_" + join_names(m.registers, members, "."));
    }
    for (unsigned mask = 0; mask < nmask; ++mask) {
        ExtRational init(0);
        for (int x = 0; x < k; ++x)
            if (mask & (1u << x)) init += m.init_values[static_cast<size_t>(x)].c;
        b.set_init_value(static_cast<int>(mask), Value(init));
    }
    for (const auto& s : m.states) b.add_state(s);
    b.set_initial(m.initial);

    // u_S = sum over x in S of the source right-hand sides; target register
    // is the subset the mentioned registers form, offset by the summed
    // constants.
    auto subset_update = [&](unsigned mask, auto source_expr) {
        std::vector<RegIdx> regs;
        ExtRational co(0);
        for (int x = 0; x < k; ++x) {
            if (!(mask & (1u << x))) continue;
            SumForm f = sum_form(source_expr(x));
            regs.insert(regs.end(), f.regs.begin(), f.regs.end());
            co += f.constant;
        }
        unsigned target = 0;
        for (RegIdx r : regs) target |= 1u << r;
        if (regs.empty()) return Expr::constant(co);
        ExprPtr reg = Expr::reg_ref(static_cast<RegIdx>(target));
        return co.is_zero() ? reg : Expr::plus(reg, Expr::constant(co));
    };

    for (int q = 0; q < m.num_states(); ++q) {
        for (int a = 0; a < m.num_symbols(); ++a) {
            const Symbol& sym = m.alphabet[static_cast<size_t>(a)];
            b.set_transition(q, sym, m.next_state(q, a));
            for (unsigned mask = 0; mask < nmask; ++mask)
                b.set_update(q, sym, static_cast<int>(mask),
                             subset_update(mask, [&](int x) { return m.update(q, a, x); }));
        }
        if (m.output(q)) {
            SumForm f = sum_form(m.output(q));
            unsigned target = 0;
            for (RegIdx r : f.regs) target |= 1u << r;
            ExprPtr e = f.regs.empty()
                            ? Expr::constant(f.constant)
                            : (f.constant.is_zero()
                                   ? Expr::reg_ref(static_cast<RegIdx>(target))
                                   : Expr::plus(Expr::reg_ref(static_cast<RegIdx>(target)),
                                                Expr::constant(f.constant)));
            b.set_output(q, e);
        }
    }
    return prune_unreachable(b.finish());
}

WeightedAutomaton trim_wa(const WeightedAutomaton& wa) {
    size_t n = wa.states.size();
    std::vector<std::vector<int>> fwd(n), bwd(n);
    for (const auto& t : wa.transitions) {
        fwd[static_cast<size_t>(t.from)].push_back(t.to);
        bwd[static_cast<size_t>(t.to)].push_back(t.from);
    }
    auto closure = [&](std::vector<bool> seen, const std::vector<std::vector<int>>& adj) {
        std::deque<int> todo;
        for (size_t i = 0; i < n; ++i)
            if (seen[i]) todo.push_back(static_cast<int>(i));
        while (!todo.empty()) {
            int q = todo.front();
            todo.pop_front();
            for (int q2 : adj[static_cast<size_t>(q)])
                if (!seen[static_cast<size_t>(q2)]) {
                    seen[static_cast<size_t>(q2)] = true;
                    todo.push_back(q2);
                }
        }
        return seen;
    };
    std::vector<bool> from_init(n, false), to_final(n, false);
    for (size_t i = 0; i < n; ++i) {
        if (wa.initial_weights[i]) from_init[i] = true;
        if (wa.final_weights[i]) to_final[i] = true;
    }
    from_init = closure(std::move(from_init), fwd);
    to_final = closure(std::move(to_final), bwd);

    std::vector<int> remap(n, -1);
    WeightedAutomaton out;
    out.semiring = wa.semiring;
    out.alphabet = wa.alphabet;
    for (size_t i = 0; i < n; ++i) {
        if (!(from_init[i] && to_final[i])) continue;
        remap[i] = static_cast<int>(out.states.size());
        out.states.push_back(wa.states[i]);
        out.initial_weights.push_back(wa.initial_weights[i]);
        out.final_weights.push_back(wa.final_weights[i]);
    }
    for (const auto& t : wa.transitions)
        if (remap[static_cast<size_t>(t.from)] >= 0 && remap[static_cast<size_t>(t.to)] >= 0)
            out.transitions.push_back(
                {remap[static_cast<size_t>(t.from)], t.symbol, t.cost, remap[static_cast<size_t>(t.to)]});
    return out;
}

WeightedAutomaton inc_to_single_valued_wa(const Cra& m) {
    if (m.grammar != GrammarKind::PlusC)
        throw Error(Errc::GrammarMismatch, "construction needs an increment-only machine");
    int k = m.num_registers();

    WeightedAutomaton wa;
    wa.semiring = Semiring::MinPlus;
    wa.alphabet = m.alphabet;
    // State layout: (q, x) blocks then one reset-tracking state per q.
    auto reg_state = [&](int q, int x) { return q * k + x; };
    auto rst_state = [&](int q) { return m.num_states() * k + q; };
    for (int q = 0; q < m.num_states(); ++q)
        for (int x = 0; x < k; ++x)
            wa.states.push_back(m.states[static_cast<size_t>(q)] + "." +
                                m.registers[static_cast<size_t>(x)]);
    for (int q = 0; q < m.num_states(); ++q)
        wa.states.push_back(m.states[static_cast<size_t>(q)] + ".$r");
    wa.initial_weights.assign(wa.states.size(), std::nullopt);
    wa.final_weights.assign(wa.states.size(), std::nullopt);

    for (int x = 0; x < k; ++x) {
        const ExtRational& v = m.init_values[static_cast<size_t>(x)].c;
        if (v.is_finite()) wa.initial_weights[static_cast<size_t>(reg_state(m.initial, x))] = v;
    }
    wa.initial_weights[static_cast<size_t>(rst_state(m.initial))] = ExtRational(0);

    for (int q = 0; q < m.num_states(); ++q) {
        for (int a = 0; a < m.num_symbols(); ++a) {
            int q2 = m.next_state(q, a);
            for (int x = 0; x < k; ++x) {
                auto lc = lincomb_of_expr(m.update(q, a, x), Semiring::MinPlus);
                if (!lc) throw Error(Errc::NotLinearForm, "update is not in increment form");
                for (const auto& [y, c] : lc->terms)
                    wa.transitions.push_back({reg_state(q, y), a, c, reg_state(q2, x)});
                if (lc->constant)
                    wa.transitions.push_back({rst_state(q), a, *lc->constant, reg_state(q2, x)});
            }
            wa.transitions.push_back({rst_state(q), a, ExtRational(0), rst_state(q2)});
        }
        if (m.output(q)) {
            auto lc = lincomb_of_expr(m.output(q), Semiring::MinPlus);
            if (!lc) throw Error(Errc::NotLinearForm, "output is not in increment form");
            for (const auto& [y, c] : lc->terms)
                wa.final_weights[static_cast<size_t>(reg_state(q, y))] = c;
            if (lc->constant)
                wa.final_weights[static_cast<size_t>(rst_state(q))] = *lc->constant;
        }
    }
    return trim_wa(wa);
}

Cra wa_to_cra(const WeightedAutomaton& wa) {
    Semiring s = wa.semiring;
    GrammarKind grammar =
        s == Semiring::MinPlus ? GrammarKind::MinPlusC : GrammarKind::AffineLinear;
    int n = wa.num_states();
    if (n > 30) throw Error(Errc::ValidationError, "subset construction capped at 30 states");

    // Reachable subsets, breadth-first from the initial set.
    unsigned init_mask = 0;
    for (int p = 0; p < n; ++p)
        if (wa.initial_weights[static_cast<size_t>(p)]) init_mask |= 1u << p;
    std::vector<unsigned> subsets{init_mask};
    std::map<unsigned, int> subset_id{{init_mask, 0}};
    std::vector<std::vector<std::vector<const WaTransition*>>> into;  // [symbol][to] edges
    into.assign(wa.alphabet.size(), std::vector<std::vector<const WaTransition*>>(
                                        static_cast<size_t>(n)));
    for (const auto& t : wa.transitions)
        into[static_cast<size_t>(t.symbol)][static_cast<size_t>(t.to)].push_back(&t);

    for (size_t i = 0; i < subsets.size(); ++i) {
        unsigned mask = subsets[i];
        for (size_t a = 0; a < wa.alphabet.size(); ++a) {
            unsigned next = 0;
            for (int p2 = 0; p2 < n; ++p2)
                for (const WaTransition* t : into[a][static_cast<size_t>(p2)])
                    if (mask & (1u << t->from)) {
                        next |= 1u << p2;
                        break;
                    }
            if (!subset_id.count(next)) {
                subset_id[next] = static_cast<int>(subsets.size());
                subsets.push_back(next);
            }
        }
    }

    CraBuilder b(grammar, wa.alphabet);
    for (int p = 0; p < n; ++p) b.add_register("x_" + wa.states[static_cast<size_t>(p)]);
    for (unsigned mask : subsets) {
        std::vector<int> members;
        for (int p = 0; p < n; ++p)
            if (mask & (1u << p)) members.push_back(p);
        std::string name = mask == 0 ? "$empty" : join_names(wa.states, members, ".");
        b.add_state(fresh_name(std::vector<std::string>(), name));
    }
    b.set_initial(0);
    for (int p = 0; p < n; ++p) {
        const auto& lw = wa.initial_weights[static_cast<size_t>(p)];
        b.set_init_value(p, Value(lw ? *lw : sr_zero(s)));
    }

    for (size_t i = 0; i < subsets.size(); ++i) {
        unsigned mask = subsets[i];
        for (size_t a = 0; a < wa.alphabet.size(); ++a) {
            const Symbol& sym = wa.alphabet[a];
            unsigned next = 0;
            std::vector<LinComb> forms(static_cast<size_t>(n));
            for (int p2 = 0; p2 < n; ++p2) {
                LinComb lc;
                for (const WaTransition* t : into[a][static_cast<size_t>(p2)])
                    if (mask & (1u << t->from)) lc.add_term(t->from, t->cost, s);
                if (!lc.terms.empty()) next |= 1u << p2;
                forms[static_cast<size_t>(p2)] = std::move(lc);
            }
            b.set_transition(static_cast<int>(i), sym, subset_id.at(next));
            for (int p2 = 0; p2 < n; ++p2) {
                const LinComb& lc = forms[static_cast<size_t>(p2)];
                b.set_update(static_cast<int>(i), sym, p2,
                             lc.terms.empty() ? Expr::constant(sr_zero(s)) : lc.to_expr(s));
            }
        }
        LinComb out;
        for (int p = 0; p < n; ++p) {
            if (!(mask & (1u << p))) continue;
            const auto& fw = wa.final_weights[static_cast<size_t>(p)];
            if (fw) out.add_term(p, *fw, s);
        }
        if (!out.terms.empty()) b.set_output(static_cast<int>(i), out.to_expr(s));
    }
    return b.finish();
}

WeightedAutomaton cra_to_wa(const Cra& m) {
    Semiring s;
    if (m.grammar == GrammarKind::MinPlusC || m.grammar == GrammarKind::PlusC) {
        s = Semiring::MinPlus;
        if (!check_minplus_linear(m))
            throw Error(Errc::NotLinearForm, "updates are not min-plus linear");
    } else if (m.grammar == GrammarKind::Plus || m.grammar == GrammarKind::AffineLinear ||
               m.grammar == GrammarKind::PastDiscount) {
        s = Semiring::PlusTimes;
        if (!check_linear(m)) throw Error(Errc::NotLinearForm, "updates are not affine");
    } else {
        throw Error(Errc::GrammarMismatch, "construction needs a linear scalar machine");
    }

    int k = m.num_registers();
    WeightedAutomaton wa;
    wa.semiring = s;
    wa.alphabet = m.alphabet;
    auto reg_state = [&](int q, int x) { return q * k + x; };
    auto offset_state = [&](int q) { return m.num_states() * k + q; };
    for (int q = 0; q < m.num_states(); ++q)
        for (int x = 0; x < k; ++x)
            wa.states.push_back(m.states[static_cast<size_t>(q)] + "." +
                                m.registers[static_cast<size_t>(x)]);
    for (int q = 0; q < m.num_states(); ++q)
        wa.states.push_back(m.states[static_cast<size_t>(q)]);
    wa.initial_weights.assign(wa.states.size(), std::nullopt);
    wa.final_weights.assign(wa.states.size(), std::nullopt);

    // Initial weights carry the register seeds verbatim (including the
    // semiring's additive identity and +inf), so that for every word the
    // accepting paths exist exactly when the machine's output is defined.
    for (int x = 0; x < k; ++x)
        wa.initial_weights[static_cast<size_t>(reg_state(m.initial, x))] =
            m.init_values[static_cast<size_t>(x)].c;
    wa.initial_weights[static_cast<size_t>(offset_state(m.initial))] = sr_one(s);

    auto merge_final = [&](int state, const ExtRational& w) {
        auto& slot = wa.final_weights[static_cast<size_t>(state)];
        slot = slot ? sr_plus(s, *slot, w) : w;
    };

    for (int q = 0; q < m.num_states(); ++q) {
        for (int a = 0; a < m.num_symbols(); ++a) {
            int q2 = m.next_state(q, a);
            wa.transitions.push_back({offset_state(q), a, sr_one(s), offset_state(q2)});
            for (int x = 0; x < k; ++x) {
                auto lc = lincomb_of_expr(m.update(q, a, x), s);
                if (!lc) throw Error(Errc::NotLinearForm, "update is not linear");
                for (const auto& [y, w] : lc->terms)
                    wa.transitions.push_back({reg_state(q, y), a, w, reg_state(q2, x)});
                if (lc->constant)
                    wa.transitions.push_back({offset_state(q), a, *lc->constant, reg_state(q2, x)});
                if (lc->terms.empty() && !lc->constant)  // x := inf, min-plus only
                    wa.transitions.push_back(
                        {offset_state(q), a, ExtRational::infinity(), reg_state(q2, x)});
            }
        }
        if (m.output(q)) {
            auto lc = lincomb_of_expr(m.output(q), s);
            if (!lc) throw Error(Errc::NotLinearForm, "output is not linear");
            for (const auto& [y, w] : lc->terms) merge_final(reg_state(q, y), w);
            if (lc->constant) merge_final(offset_state(q), *lc->constant);
            if (lc->terms.empty() && !lc->constant)
                merge_final(offset_state(q), ExtRational::infinity());
        }
    }
    return trim_wa(wa);
}

void apply_elementary(const ElementaryUpdate& u, std::vector<Value>& val, GrammarKind g) {
    Semiring s = pair_semiring(g);
    switch (u.kind) {
        case ElementaryUpdate::Kind::Nop:
            return;
        case ElementaryUpdate::Kind::Swap:
            std::swap(val[static_cast<size_t>(u.x)], val[static_cast<size_t>(u.y)]);
            return;
        case ElementaryUpdate::Kind::Reset:
            val[static_cast<size_t>(u.x)] = u.k;
            return;
        case ElementaryUpdate::Kind::Incr: {
            Value& v = val[static_cast<size_t>(u.x)];
            v = Value::make_pair(sr_times(s, v.c, u.k.c), sr_times(s, v.d, u.k.c));
            return;
        }
        case ElementaryUpdate::Kind::PairAdd: {
            Value a = val[static_cast<size_t>(u.x)];
            Value b = val[static_cast<size_t>(u.y)];
            val[static_cast<size_t>(u.x)] = Value::make_pair(sr_plus(s, a.c, b.c), a.d);
            val[static_cast<size_t>(u.y)] = grammar_identity(g);
            return;
        }
        case ElementaryUpdate::Kind::PairSubst: {
            Value a = val[static_cast<size_t>(u.x)];
            Value b = val[static_cast<size_t>(u.y)];
            val[static_cast<size_t>(u.x)] = Value::make_pair(
                sr_plus(s, a.c, sr_times(s, a.d, b.c)), sr_times(s, a.d, b.d));
            val[static_cast<size_t>(u.y)] = grammar_identity(g);
            return;
        }
    }
}

std::vector<ElementaryUpdate> elementary_decompose(const std::vector<ExprPtr>& update,
                                                   GrammarKind g) {
    int k = static_cast<int>(update.size());
    std::vector<int> use_count(static_cast<size_t>(k), 0);
    std::vector<RegIdx> regs;
    for (const auto& e : update) {
        regs.clear();
        collect_registers(e, regs);
        for (RegIdx r : regs) {
            if (++use_count[static_cast<size_t>(r)] > 1)
                throw Error(Errc::NotCopyless, "update uses a register twice");
        }
    }

    // Scratch pool: registers nobody reads whose own new value is a constant.
    std::vector<RegIdx> scratch;
    auto expr_regs = [&](const ExprPtr& e) {
        std::vector<RegIdx> rs;
        collect_registers(e, rs);
        return rs;
    };
    for (int r = 0; r < k; ++r)
        if (use_count[static_cast<size_t>(r)] == 0 && expr_regs(update[static_cast<size_t>(r)]).empty())
            scratch.push_back(r);

    std::vector<ElementaryUpdate> seq;
    std::vector<Value> dummy;  // for evaluating constant subtrees

    // Computes the subtree in place; returns the register holding the result.
    auto compute = [&](auto&& self, const ExprPtr& e) -> RegIdx {
        switch (e->kind) {
            case ExprKind::Reg:
                return e->reg;
            case ExprKind::PairConst: {
                if (scratch.empty())
                    throw Error(Errc::NotDecomposable,
                                "constant operand needs a free scratch register");
                RegIdx s = scratch.front();
                seq.push_back({ElementaryUpdate::Kind::Reset, s, -1,
                               Value::make_pair(e->k1, e->k2)});
                return s;
            }
            case ExprKind::PairSum: {
                RegIdx a = self(self, e->args[0]);
                RegIdx b = self(self, e->args[1]);
                seq.push_back({ElementaryUpdate::Kind::PairAdd, a, b, Value()});
                return a;
            }
            case ExprKind::Subst: {
                RegIdx a = self(self, e->args[0]);
                RegIdx b = self(self, e->args[1]);
                seq.push_back({ElementaryUpdate::Kind::PairSubst, a, b, Value()});
                return a;
            }
            case ExprKind::PairIncr: {
                if (e->incr_is_pair)
                    throw Error(Errc::NotDecomposable, "pair-constant increment not sequencable");
                RegIdx a = self(self, e->args[0]);
                seq.push_back({ElementaryUpdate::Kind::Incr, a, -1, Value(e->k1)});
                return a;
            }
            default:
                throw Error(Errc::NotDecomposable, "scalar operator in a pair update");
        }
    };

    std::map<RegIdx, RegIdx> destination;  // home register -> target register
    std::vector<std::pair<RegIdx, Value>> resets;
    for (int t = 0; t < k; ++t) {
        const ExprPtr& e = update[static_cast<size_t>(t)];
        if (expr_regs(e).empty()) {
            resets.emplace_back(t, eval_expr(e, dummy, g));
            continue;
        }
        RegIdx home = compute(compute, e);
        if (home != t) destination[home] = t;
    }

    // Route results to their targets: values shift one step along each chain
    // or cycle of the mapping, realized by swaps from the far end.
    const std::map<RegIdx, RegIdx>& perm = destination;
    std::set<RegIdx> targets;
    for (const auto& [from, to] : perm) targets.insert(to);
    std::set<RegIdx> visited;
    auto emit_shift = [&](const std::vector<RegIdx>& chain) {
        for (size_t i = chain.size() - 1; i-- > 0;)
            seq.push_back({ElementaryUpdate::Kind::Swap, chain[i], chain[i + 1], Value()});
    };
    for (const auto& [head, to0] : perm) {
        if (targets.count(head) || visited.count(head)) continue;  // chains start at non-targets
        std::vector<RegIdx> chain{head};
        RegIdx cur = head;
        while (perm.count(cur)) {
            visited.insert(cur);
            cur = perm.at(cur);
            chain.push_back(cur);
        }
        emit_shift(chain);
    }
    for (const auto& [start, to0] : perm) {
        if (visited.count(start)) continue;  // what remains are pure cycles
        std::vector<RegIdx> cycle{start};
        visited.insert(start);
        for (RegIdx cur = to0; cur != start; cur = perm.at(cur)) {
            cycle.push_back(cur);
            visited.insert(cur);
        }
        emit_shift(cycle);
    }
    for (const auto& [r, v] : resets)
        seq.push_back({ElementaryUpdate::Kind::Reset, r, -1, v});
    if (seq.empty()) seq.push_back({ElementaryUpdate::Kind::Nop, -1, -1, Value()});
    return seq;
}

bool decomposition_matches(const std::vector<ExprPtr>& update,
                           const std::vector<ElementaryUpdate>& seq, GrammarKind g,
                           unsigned seed, int samples) {
    std::mt19937 rng(seed);
    Semiring s = pair_semiring(g);
    std::uniform_int_distribution<int> num(-4, 9);
    std::uniform_int_distribution<int> inf_roll(0, 7);
    size_t k = update.size();
    for (int it = 0; it < samples; ++it) {
        std::vector<Value> val(k);
        for (auto& v : val) {
            ExtRational c = (s == Semiring::MinPlus && inf_roll(rng) == 0)
                                ? ExtRational::infinity()
                                : ExtRational(num(rng));
            ExtRational d = ExtRational(std::abs(num(rng)));
            v = Value::make_pair(c, d);
        }
        std::vector<Value> parallel(k);
        for (size_t r = 0; r < k; ++r) parallel[r] = eval_expr(update[r], val, g);
        std::vector<Value> sequential = val;
        for (const auto& u : seq) apply_elementary(u, sequential, g);
        if (!(parallel == sequential)) return false;
    }
    return true;
}

namespace {

// Register layout of the linearized pair machine and the per-elementary
// update rules re-derived from the invariants d_S = prod_{x in S} x.d and
// xd[x,S] = x.c * d_S.
struct PairLayout {
    int n = 0;           // source registers
    unsigned nmask = 0;  // 1 << n
    Semiring s;
    std::vector<int> ds_base;              // index of d_S per mask
    std::vector<std::vector<int>> xd_idx;  // [mask][x] -> index or -1
    int total = 0;

    explicit PairLayout(int n_, Semiring s_) : n(n_), nmask(1u << n_), s(s_) {
        ds_base.resize(nmask);
        xd_idx.assign(nmask, std::vector<int>(static_cast<size_t>(n), -1));
        int next = 2 * n;
        for (unsigned mask = 0; mask < nmask; ++mask) {
            ds_base[mask] = next++;
            for (int x = 0; x < n; ++x)
                if (!(mask & (1u << x))) xd_idx[mask][static_cast<size_t>(x)] = next++;
        }
        total = next;
    }
    int c(int x) const { return x; }
    int d(int x) const { return n + x; }
    int ds(unsigned mask) const { return ds_base[mask]; }
    int xd(int x, unsigned mask) const { return xd_idx[mask][static_cast<size_t>(x)]; }
};

LinComb lc_reg(int idx, Semiring s) { return LinComb::of_reg(idx, s); }
LinComb lc_term(int idx, const ExtRational& w) {
    LinComb l;
    l.terms.emplace_back(idx, w);
    return l;
}

std::map<int, LinComb> elementary_forms(const PairLayout& L, const ElementaryUpdate& u) {
    Semiring s = L.s;
    std::map<int, LinComb> out;
    auto one = sr_one(s);
    switch (u.kind) {
        case ElementaryUpdate::Kind::Nop:
            break;
        case ElementaryUpdate::Kind::Swap: {
            int x = u.x, y = u.y;
            auto sw_mask = [&](unsigned mask) {
                bool hx = mask & (1u << x), hy = mask & (1u << y);
                if (hx == hy) return mask;
                return mask ^ (1u << x) ^ (1u << y);
            };
            out[L.c(x)] = lc_reg(L.c(y), s);
            out[L.c(y)] = lc_reg(L.c(x), s);
            out[L.d(x)] = lc_reg(L.d(y), s);
            out[L.d(y)] = lc_reg(L.d(x), s);
            for (unsigned mask = 0; mask < L.nmask; ++mask) {
                unsigned sm = sw_mask(mask);
                if (sm != mask) out[L.ds(mask)] = lc_reg(L.ds(sm), s);
                for (int z = 0; z < L.n; ++z) {
                    if (mask & (1u << z)) continue;
                    int zz = z == x ? y : (z == y ? x : z);
                    if (zz == z && sm == mask) continue;
                    out[L.xd(z, mask)] = lc_reg(L.xd(zz, sm), s);
                }
            }
            break;
        }
        case ElementaryUpdate::Kind::Reset: {
            int x = u.x;
            out[L.c(x)] = LinComb::of_const(u.k.c);
            out[L.d(x)] = LinComb::of_const(u.k.d);
            for (unsigned mask = 0; mask < L.nmask; ++mask) {
                bool hx = mask & (1u << x);
                if (hx) out[L.ds(mask)] = lc_term(L.ds(mask & ~(1u << x)), u.k.d);
                for (int z = 0; z < L.n; ++z) {
                    if (mask & (1u << z)) continue;
                    if (z == x)
                        out[L.xd(x, mask)] = lc_term(L.ds(mask), u.k.c);
                    else if (hx)
                        out[L.xd(z, mask)] = lc_term(L.xd(z, mask & ~(1u << x)), u.k.d);
                }
            }
            break;
        }
        case ElementaryUpdate::Kind::Incr: {
            int x = u.x;
            const ExtRational& kq = u.k.c;
            out[L.c(x)] = lc_term(L.c(x), kq);
            out[L.d(x)] = lc_term(L.d(x), kq);
            for (unsigned mask = 0; mask < L.nmask; ++mask) {
                bool hx = mask & (1u << x);
                if (hx) out[L.ds(mask)] = lc_term(L.ds(mask), kq);
                for (int z = 0; z < L.n; ++z) {
                    if (mask & (1u << z)) continue;
                    if (z == x || hx) out[L.xd(z, mask)] = lc_term(L.xd(z, mask), kq);
                }
            }
            break;
        }
        case ElementaryUpdate::Kind::PairAdd: {
            int x = u.x, y = u.y;
            LinComb cx;
            cx.add_term(L.c(x), one, s);
            cx.add_term(L.c(y), one, s);
            out[L.c(x)] = cx;
            out[L.c(y)] = LinComb::of_const(sr_zero(s));
            out[L.d(y)] = LinComb::of_const(one);
            for (unsigned mask = 0; mask < L.nmask; ++mask) {
                bool hy = mask & (1u << y);
                if (hy) out[L.ds(mask)] = lc_reg(L.ds(mask & ~(1u << y)), s);
                for (int z = 0; z < L.n; ++z) {
                    if (mask & (1u << z)) continue;
                    if (z == y) {
                        out[L.xd(y, mask)] = LinComb::of_const(sr_zero(s));
                    } else if (z == x) {
                        unsigned base = hy ? mask & ~(1u << y) : mask;
                        LinComb l;
                        l.add_term(L.xd(x, base), one, s);
                        l.add_term(L.xd(y, base), one, s);
                        out[L.xd(x, mask)] = l;
                    } else if (hy) {
                        out[L.xd(z, mask)] = lc_reg(L.xd(z, mask & ~(1u << y)), s);
                    }
                }
            }
            break;
        }
        case ElementaryUpdate::Kind::PairSubst: {
            int x = u.x, y = u.y;
            unsigned bx = 1u << x, by = 1u << y;
            LinComb cx;
            cx.add_term(L.c(x), one, s);
            cx.add_term(L.xd(y, bx), one, s);
            out[L.c(x)] = cx;
            out[L.d(x)] = lc_reg(L.ds(bx | by), s);
            out[L.c(y)] = LinComb::of_const(sr_zero(s));
            out[L.d(y)] = LinComb::of_const(one);
            for (unsigned mask = 0; mask < L.nmask; ++mask) {
                bool hx = mask & bx, hy = mask & by;
                if (hx && !hy) out[L.ds(mask)] = lc_reg(L.ds(mask | by), s);
                if (!hx && hy) out[L.ds(mask)] = lc_reg(L.ds(mask & ~by), s);
                for (int z = 0; z < L.n; ++z) {
                    if (mask & (1u << z)) continue;
                    if (z == y) {
                        out[L.xd(y, mask)] = LinComb::of_const(sr_zero(s));
                    } else if (z == x) {
                        unsigned base = hy ? mask & ~by : mask;
                        LinComb l;
                        l.add_term(L.xd(x, base), one, s);
                        l.add_term(L.xd(y, base | bx), one, s);
                        out[L.xd(x, mask)] = l;
                    } else {
                        if (hx && !hy) out[L.xd(z, mask)] = lc_reg(L.xd(z, mask | by), s);
                        if (!hx && hy) out[L.xd(z, mask)] = lc_reg(L.xd(z, mask & ~by), s);
                    }
                }
            }
            break;
        }
    }
    return out;
}

// Symbolic pair value: each component an OPLUS of monomials
// coef (x) [catom.c] (x) prod over dmask of r.d.  Copylessness keeps every
// monomial inside the maintained register family.
struct Mono {
    int catom = -1;
    unsigned dmask = 0;
    ExtRational coef;
};
struct PairSym {
    std::vector<Mono> c, d;
};

PairSym sym_eval(const ExprPtr& e, Semiring s) {
    switch (e->kind) {
        case ExprKind::PairConst:
            return {{{-1, 0, e->k1}}, {{-1, 0, e->k2}}};
        case ExprKind::Reg:
            return {{{e->reg, 0, sr_one(s)}},
                    {{-1, 1u << e->reg, sr_one(s)}}};
        case ExprKind::PairSum: {
            PairSym a = sym_eval(e->args[0], s);
            PairSym b = sym_eval(e->args[1], s);
            a.c.insert(a.c.end(), b.c.begin(), b.c.end());
            return a;
        }
        case ExprKind::PairIncr: {
            if (e->incr_is_pair)
                throw Error(Errc::NotDecomposable, "pair-constant increment not linearizable");
            PairSym a = sym_eval(e->args[0], s);
            for (auto& m : a.c) m.coef = sr_times(s, m.coef, e->k1);
            for (auto& m : a.d) m.coef = sr_times(s, m.coef, e->k1);
            return a;
        }
        case ExprKind::Subst: {
            PairSym a = sym_eval(e->args[0], s);
            PairSym b = sym_eval(e->args[1], s);
            PairSym out;
            out.c = a.c;
            for (const Mono& ma : a.d)
                for (const Mono& mb : b.c)
                    out.c.push_back({mb.catom, ma.dmask | mb.dmask,
                                     sr_times(s, ma.coef, mb.coef)});
            for (const Mono& ma : a.d)
                for (const Mono& mb : b.d)
                    out.d.push_back({-1, ma.dmask | mb.dmask, sr_times(s, ma.coef, mb.coef)});
            return out;
        }
        default:
            throw Error(Errc::GrammarMismatch, "scalar operator in a pair expression");
    }
}

void add_mono(LinComb& lc, const Mono& m, const PairLayout& L) {
    if (m.catom < 0 && m.dmask == 0)
        lc.add_const(m.coef, L.s);
    else if (m.catom < 0)
        lc.add_term(L.ds(m.dmask), m.coef, L.s);
    else
        lc.add_term(L.xd(m.catom, m.dmask), m.coef, L.s);
}

}  // namespace

Cra pair_cra_to_linear_cra(const Cra& m) {
    if (m.grammar != GrammarKind::PairMinPlus && m.grammar != GrammarKind::IncScale)
        throw Error(Errc::GrammarMismatch, "translation needs a copyless pair machine");
    auto rep = check_copyless(m);
    if (!rep.ok) throw Error(Errc::NotCopyless, "machine is not copyless");
    if (m.num_registers() > 12)
        throw Error(Errc::ValidationError, "register subset construction capped at 12 registers");

    Semiring s = pair_semiring(m.grammar);
    GrammarKind grammar =
        s == Semiring::MinPlus ? GrammarKind::MinPlusC : GrammarKind::AffineLinear;
    PairLayout L(m.num_registers(), s);

    CraBuilder b(grammar, m.alphabet);
    for (int x = 0; x < L.n; ++x) b.add_register(m.registers[static_cast<size_t>(x)] + ".c");
    for (int x = 0; x < L.n; ++x) b.add_register(m.registers[static_cast<size_t>(x)] + ".d");
    for (unsigned mask = 0; mask < L.nmask; ++mask) {
        std::vector<int> members;
        for (int x = 0; x < L.n; ++x)
            if (mask & (1u << x)) members.push_back(x);
        b.add_register("D@" + join_names(m.registers, members, "."));
        for (int x = 0; x < L.n; ++x)
            if (!(mask & (1u << x)))
                b.add_register(m.registers[static_cast<size_t>(x)] + "@" +
                               join_names(m.registers, members, "."));
    }

    for (int x = 0; x < L.n; ++x) {
        b.set_init_value(L.c(x), Value(m.init_values[static_cast<size_t>(x)].c));
        b.set_init_value(L.d(x), Value(m.init_values[static_cast<size_t>(x)].d));
    }
    for (unsigned mask = 0; mask < L.nmask; ++mask) {
        ExtRational dprod = sr_one(s);
        for (int x = 0; x < L.n; ++x)
            if (mask & (1u << x)) dprod = sr_times(s, dprod, m.init_values[static_cast<size_t>(x)].d);
        b.set_init_value(L.ds(mask), Value(dprod));
        for (int x = 0; x < L.n; ++x)
            if (!(mask & (1u << x)))
                b.set_init_value(L.xd(x, mask),
                                 Value(sr_times(s, m.init_values[static_cast<size_t>(x)].c, dprod)));
    }

    for (const auto& st : m.states) b.add_state(st);
    b.set_initial(m.initial);

    for (int q = 0; q < m.num_states(); ++q) {
        for (int a = 0; a < m.num_symbols(); ++a) {
            const Symbol& sym = m.alphabet[static_cast<size_t>(a)];
            b.set_transition(q, sym, m.next_state(q, a));

            std::vector<ExprPtr> update;
            update.reserve(static_cast<size_t>(L.n));
            for (int x = 0; x < L.n; ++x) update.push_back(m.update(q, a, x));
            auto seq = elementary_decompose(update, m.grammar);
            if (!decomposition_matches(update, seq, m.grammar,
                                       static_cast<unsigned>(q * 131 + a)))
                throw Error(Errc::Internal, "elementary decomposition mismatch");

            std::vector<LinComb> current;
            current.reserve(static_cast<size_t>(L.total));
            for (int r = 0; r < L.total; ++r) current.push_back(LinComb::of_reg(r, s));
            for (const auto& u : seq) {
                auto forms = elementary_forms(L, u);
                std::vector<LinComb> next = current;
                for (const auto& [r, f] : forms) next[static_cast<size_t>(r)] = f.substituted(current, s);
                current = std::move(next);
            }
            for (int r = 0; r < L.total; ++r)
                b.set_update(q, sym, r, current[static_cast<size_t>(r)].to_expr(s));
        }
        if (m.output(q)) {
            PairSym sv = sym_eval(m.output(q), s);
            LinComb out;
            for (const Mono& mo : sv.c) add_mono(out, mo, L);
            if (s == Semiring::MinPlus)  // parameter slot gets the constant 0
                for (const Mono& mo : sv.d) add_mono(out, mo, L);
            b.set_output(q, out.to_expr(s));
        }
    }
    return prune_unreachable(b.finish());
}

Cra gen_modk_cra(int k) {
    if (k < 1) throw Error(Errc::ValidationError, "k must be at least 1");
    CraBuilder b(GrammarKind::PlusC, {"1"});
    for (int j = 1; j <= k; ++j) b.add_register("v" + std::to_string(j));
    for (int i = 0; i < k; ++i) b.add_state("q" + std::to_string(i));
    b.set_initial(0);
    for (int i = 0; i < k; ++i) {
        b.set_transition(i, "1", (i + 1) % k);
        for (int j = 0; j < k; ++j)
            b.set_update(i, "1", j,
                         Expr::plus(Expr::reg_ref(j), Expr::constant(ExtRational(j + 1))));
        b.set_output(i, Expr::reg_ref(i));  // v_{i+1} holds (i+1)*|w| at q_i
    }
    return b.finish();
}

}  // namespace cra
