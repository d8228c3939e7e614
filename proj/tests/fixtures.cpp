#include "fixtures.hpp"

#include <algorithm>

namespace cra::fixtures {

namespace {

ExprPtr rc(long v) { return Expr::constant(ExtRational(v)); }
ExprPtr inc(RegIdx r, long c) { return Expr::plus(Expr::reg_ref(r), Expr::constant(ExtRational(c))); }

}  // namespace

Word make_word(const std::string& chars) {
    Word w;
    for (char c : chars) w.push_back(std::string(1, c));
    return w;
}

Cra m1() {
    CraBuilder b(GrammarKind::PlusC, {"a", "b", "e"});
    int x = b.add_register("x"), y = b.add_register("y");
    int q0 = b.add_state("q0");
    b.set_initial(q0);
    b.set_transition(q0, "a", q0);
    b.set_update(q0, "a", x, inc(x, 1));
    b.set_update(q0, "a", y, inc(y, 1));
    b.set_transition(q0, "b", q0);
    b.set_update(q0, "b", y, inc(y, 1));
    b.set_transition(q0, "e", q0);
    b.set_update(q0, "e", x, inc(y, 1));
    b.set_update(q0, "e", y, inc(y, 1));
    b.set_output(q0, Expr::reg_ref(x));
    return b.finish();
}

Cra m2() {
    CraBuilder b(GrammarKind::MinPlusC, {"a", "b", "e"});
    int x = b.add_register("x"), y = b.add_register("y"), z = b.add_register("z");
    b.set_init_value(x, Value(ExtRational::infinity()));
    int q0 = b.add_state("q0");
    b.set_initial(q0);
    b.set_transition(q0, "a", q0);
    b.set_update(q0, "a", y, inc(y, 1));
    b.set_transition(q0, "b", q0);
    b.set_update(q0, "b", z, inc(z, 1));
    b.set_transition(q0, "e", q0);
    b.set_update(q0, "e", x,
                 Expr::min_of({Expr::reg_ref(x), Expr::reg_ref(y), Expr::reg_ref(z)}));
    b.set_update(q0, "e", y, rc(0));
    b.set_update(q0, "e", z, rc(0));
    b.set_output(q0, Expr::reg_ref(x));
    return b.finish();
}

Cra m3() {
    CraBuilder b(GrammarKind::MinPlusC, {"a", "b", "e"});
    int x = b.add_register("x"), y = b.add_register("y");
    int q0 = b.add_state("q0"), q1 = b.add_state("q1");
    b.set_initial(q0);
    b.set_transition(q0, "a", q0);
    b.set_update(q0, "a", x, inc(x, 1));
    b.set_transition(q0, "b", q0);
    b.set_transition(q0, "e", q1);
    b.set_update(q0, "e", y, Expr::reg_ref(x));
    b.set_transition(q1, "a", q1);
    b.set_update(q1, "a", x, inc(x, 1));
    b.set_transition(q1, "b", q1);
    b.set_update(q1, "b", y, inc(y, 1));
    b.set_transition(q1, "e", q1);
    b.set_update(q1, "e", y, Expr::min_of({Expr::reg_ref(x), Expr::reg_ref(y)}));
    b.set_output(q0, Expr::reg_ref(x));
    b.set_output(q1, Expr::reg_ref(y));
    return b.finish();
}

Cra m4() {
    CraBuilder b(GrammarKind::PastDiscount, {"a", "b", "e"});
    int x = b.add_register("x");
    int q0 = b.add_state("q0"), q1 = b.add_state("q1");
    b.set_initial(q0);
    b.set_transition(q0, "a", q0);
    b.set_update(q0, "a", x, inc(x, 10));
    b.set_transition(q0, "e", q0);
    b.set_transition(q0, "b", q1);
    b.set_transition(q1, "e", q1);
    b.set_update(q1, "e", x, Expr::scale(ExtRational(19, 20), Expr::reg_ref(x)));
    b.set_transition(q1, "a", q1);
    b.set_transition(q1, "b", q1);
    b.set_output(q0, Expr::reg_ref(x));
    b.set_output(q1, Expr::reg_ref(x));
    return b.finish();
}

Cra m1_rla_machine() {
    CraBuilder b(GrammarKind::PlusC, {"r0", "r1", "r2", "r3"});
    int x = b.add_register("x");
    int q0 = b.add_state("q0");
    b.set_initial(q0);
    for (const char* r : {"r0", "r1", "r2", "r3"}) b.set_transition(q0, r, q0);
    b.set_update(q0, "r1", x, inc(x, 1));
    b.set_update(q0, "r3", x, inc(x, 1));
    b.set_output(q0, Expr::reg_ref(x));
    return b.finish();
}

LookaheadDfa m1_la_dfa() {
    // Reading the reversed suffix: r1 = last symbol a (no e yet), r2 = last
    // symbol b (no e yet), r3 = an e has been read, so this position precedes
    // the word's last e and always survives the deletion.
    LookaheadDfa a;
    a.alphabet = {"a", "b", "e"};
    a.states = {"r0", "r1", "r2", "r3"};
    a.initial = 0;
    a.delta.assign(12, -1);
    auto set = [&](int q, int sym, int t) { a.delta[static_cast<size_t>(q) * 3 + sym] = t; };
    // symbols: a=0 b=1 e=2
    set(0, 0, 1); set(0, 1, 2); set(0, 2, 3);
    set(1, 0, 1); set(1, 1, 2); set(1, 2, 3);
    set(2, 0, 1); set(2, 1, 2); set(2, 2, 3);
    set(3, 0, 3); set(3, 1, 3); set(3, 2, 3);
    a.validate();
    return a;
}

Cra subset_fig_machine() {
    CraBuilder b(GrammarKind::Plus, {"a", "b", "e"});
    int x = b.add_register("x"), y = b.add_register("y"), z = b.add_register("z");
    int q0 = b.add_state("q0");
    b.set_initial(q0);
    b.set_transition(q0, "a", q0);
    b.set_update(q0, "a", y, inc(y, 1));
    b.set_transition(q0, "b", q0);
    b.set_update(q0, "b", z, inc(z, 1));
    b.set_transition(q0, "e", q0);
    b.set_update(q0, "e", x,
                 Expr::plus(Expr::plus(Expr::reg_ref(x), Expr::reg_ref(y)), Expr::reg_ref(z)));
    b.set_update(q0, "e", y, rc(0));
    b.set_update(q0, "e", z, rc(0));
    b.set_output(q0, Expr::plus(Expr::plus(Expr::reg_ref(x), Expr::reg_ref(y)), Expr::reg_ref(z)));
    return b.finish();
}

Cra f1_pair_machine() {
    CraBuilder b(GrammarKind::PairMinPlus, {"a", "b", "e"});
    int x = b.add_register("x"), y = b.add_register("y");
    int q0 = b.add_state("q0");
    b.set_initial(q0);
    b.set_transition(q0, "a", q0);
    b.set_update(q0, "a", x, Expr::pair_incr(Expr::reg_ref(x), ExtRational(1)));
    b.set_transition(q0, "b", q0);
    b.set_update(q0, "b", y, Expr::pair_incr(Expr::reg_ref(y), ExtRational(1)));
    b.set_transition(q0, "e", q0);
    b.set_update(q0, "e", x,
                 Expr::pair_incr(Expr::subst(Expr::reg_ref(x), Expr::reg_ref(y)), ExtRational(1)));
    b.set_update(q0, "e", y, Expr::pair_const(ExtRational::infinity(), ExtRational(0)));
    b.set_output(q0, Expr::reg_ref(x));
    return b.finish();
}

Cra example51_machine() {
    CraBuilder b(GrammarKind::PairMinPlus, {"a", "b"});
    int x = b.add_register("x"), y = b.add_register("y");
    int q0 = b.add_state("q0"), q1 = b.add_state("q1"), q2 = b.add_state("q2");
    b.set_initial(q0);
    b.set_transition(q0, "a", q0);
    b.set_transition(q0, "b", q1);
    b.set_transition(q1, "a", q1);
    b.set_update(q1, "a", y, Expr::pair_incr(Expr::reg_ref(y), ExtRational(1)));
    b.set_transition(q1, "b", q2);
    b.set_update(q1, "b", x, Expr::reg_ref(y));
    b.set_update(q1, "b", y, Expr::pair_const(ExtRational::infinity(), ExtRational(0)));
    b.set_transition(q2, "a", q2);
    b.set_update(q2, "a", y, Expr::pair_incr(Expr::reg_ref(y), ExtRational(1)));
    b.set_transition(q2, "b", q2);
    b.set_update(q2, "b", x, Expr::pair_sum(Expr::reg_ref(x), Expr::reg_ref(y)));
    b.set_update(q2, "b", y, Expr::pair_const(ExtRational::infinity(), ExtRational(0)));
    b.set_output(q0, Expr::pair_const(ExtRational::infinity(), ExtRational::infinity()));
    b.set_output(q1, Expr::pair_const(ExtRational::infinity(), ExtRational::infinity()));
    b.set_output(q2, Expr::reg_ref(x));
    (void)q0;
    return b.finish();
}

Cra example51_incscale() {
    CraBuilder b(GrammarKind::IncScale, {"a", "b"});
    int x = b.add_register("x"), y = b.add_register("y");
    int q0 = b.add_state("q0"), q1 = b.add_state("q1"), q2 = b.add_state("q2");
    b.set_initial(q0);
    b.set_transition(q0, "a", q0);
    b.set_transition(q0, "b", q1);
    b.set_transition(q1, "a", q1);
    b.set_update(q1, "a", y, Expr::pair_incr(Expr::reg_ref(y), ExtRational(2)));
    b.set_transition(q1, "b", q2);
    b.set_update(q1, "b", x, Expr::reg_ref(y));
    b.set_update(q1, "b", y, Expr::pair_const(ExtRational(0), ExtRational(1)));
    b.set_transition(q2, "a", q2);
    b.set_update(q2, "a", y, Expr::pair_incr(Expr::reg_ref(y), ExtRational(2)));
    b.set_transition(q2, "b", q2);
    b.set_update(q2, "b", x, Expr::pair_sum(Expr::reg_ref(x), Expr::reg_ref(y)));
    b.set_update(q2, "b", y, Expr::pair_const(ExtRational(0), ExtRational(1)));
    b.set_output(q2, Expr::subst(Expr::reg_ref(x), Expr::pair_const(ExtRational(3), ExtRational(1))));
    (void)q0;
    (void)q1;
    return b.finish();
}

Cra counter_machine(char symbol) {
    CraBuilder b(GrammarKind::PlusC, {"a", "b"});
    int x = b.add_register("x");
    int q0 = b.add_state("q0");
    b.set_initial(q0);
    for (const char* s : {"a", "b"}) {
        b.set_transition(q0, s, q0);
        if (s[0] == symbol) b.set_update(q0, s, x, inc(x, 1));
    }
    b.set_output(q0, Expr::reg_ref(x));
    return b.finish();
}

Cra length_machine() {
    CraBuilder b(GrammarKind::PlusC, {"a", "b"});
    int x = b.add_register("x");
    int q0 = b.add_state("q0");
    b.set_initial(q0);
    for (const char* s : {"a", "b"}) {
        b.set_transition(q0, s, q0);
        b.set_update(q0, s, x, inc(x, 1));
    }
    b.set_output(q0, Expr::reg_ref(x));
    return b.finish();
}

Cra zero_machine(std::vector<Symbol> alphabet) {
    std::vector<Symbol> syms = alphabet;
    CraBuilder b(GrammarKind::PlusC, std::move(alphabet));
    b.add_register("z");
    int q0 = b.add_state("q0");
    b.set_initial(q0);
    for (const Symbol& s : syms) b.set_transition(q0, s, q0);
    b.set_output(q0, Expr::constant(ExtRational(0)));
    return b.finish();
}

Cra plus_two_machine() {
    CraBuilder b(GrammarKind::PlusC, {"a", "b"});
    int x = b.add_register("x");
    int q0 = b.add_state("q0");
    b.set_initial(q0);
    for (const char* s : {"a", "b"}) {
        b.set_transition(q0, s, q0);
        b.set_update(q0, s, x, inc(x, 2));
    }
    b.set_output(q0, Expr::reg_ref(x));
    return b.finish();
}

std::optional<ExtRational> f1(const Word& w) {
    size_t last_e = w.size();
    for (size_t i = 0; i < w.size(); ++i)
        if (w[i] == "e") last_e = i;
    long len = 0;
    for (size_t i = 0; i < w.size(); ++i) {
        bool after = last_e == w.size() || i > last_e;
        if (after && w[i] == "b") continue;
        ++len;
    }
    if (last_e == w.size()) {
        // No e: every b is "after the last e".
        len = 0;
        for (const auto& s : w)
            if (s != "b") ++len;
    }
    return ExtRational(len);
}

std::optional<ExtRational> f2(const Word& w) {
    // Minimum over completed blocks (prefixes ended by e) of min(#a, #b).
    ExtRational best = ExtRational::infinity();
    long na = 0, nb = 0;
    for (const auto& s : w) {
        if (s == "a") ++na;
        else if (s == "b") ++nb;
        else {
            best = min(best, ExtRational(std::min(na, nb)));
            na = nb = 0;
        }
    }
    return best;
}

std::optional<ExtRational> f3(const Word& w) {
    std::vector<std::pair<long, long>> blocks{{0, 0}};  // (#a, #b) per block
    for (const auto& s : w) {
        if (s == "a") blocks.back().first++;
        else if (s == "b") blocks.back().second++;
        else blocks.emplace_back(0, 0);
    }
    if (blocks.size() == 1) return ExtRational(blocks[0].first);
    ExtRational best = ExtRational::infinity();
    for (size_t j = 0; j + 1 < blocks.size(); ++j) {
        long total = 0;
        for (size_t i = 0; i <= j; ++i) total += blocks[i].first;
        for (size_t i = j + 1; i < blocks.size(); ++i) total += blocks[i].second;
        best = min(best, ExtRational(total));
    }
    return best;
}

std::optional<ExtRational> f4(const Word& w) {
    ExtRational x(0);
    bool seen_b = false;
    for (const auto& s : w) {
        if (!seen_b) {
            if (s == "a") x += ExtRational(10);
            else if (s == "b") seen_b = true;
        } else if (s == "e") {
            x *= ExtRational(19, 20);
        }
    }
    return x;
}

Cra split_state(const Cra& m, int q) {
    Cra out = m;
    size_t na = m.alphabet.size(), nr = m.registers.size();
    int q2 = out.num_states();
    out.states.push_back(m.states[static_cast<size_t>(q)] + "_split");
    out.mu.push_back(m.mu[static_cast<size_t>(q)]);
    out.delta.resize(static_cast<size_t>(q2 + 1) * na);
    out.rho.resize(static_cast<size_t>(q2 + 1) * na * nr);
    for (size_t a = 0; a < na; ++a) {
        out.delta[static_cast<size_t>(q2) * na + a] = m.next_state(q, static_cast<int>(a));
        for (size_t r = 0; r < nr; ++r)
            out.rho[(static_cast<size_t>(q2) * na + a) * nr + r] =
                m.update(q, static_cast<int>(a), static_cast<int>(r));
    }
    // Redirect the first incoming edge found (deterministic scan order).
    for (int p = 0; p < m.num_states(); ++p)
        for (size_t a = 0; a < na; ++a)
            if (out.delta[static_cast<size_t>(p) * na + a] == q) {
                out.delta[static_cast<size_t>(p) * na + a] = q2;
                out.validate();
                return out;
            }
    return m;  // no incoming edge to split
}

}  // namespace cra::fixtures
