#include <catch2/catch_amalgamated.hpp>

#include "cra/oracle.hpp"
#include "cra/transforms.hpp"
#include "helpers.hpp"

using namespace cra;
using namespace cra::testing;

namespace {

// eval(T(M), w) must equal eval(M, w), Undefined included.
void check_eval_equal(const Cra& a, const Cra& b, int maxlen) {
    BruteEquiv r = brute_equiv(a, b, maxlen);
    INFO("differs on: " << word_to_string(r.differs, a.alphabet));
    CHECK(r.agree);
}

WordFn wa_evaluator(const WeightedAutomaton& wa) {
    return [&wa](const Word& w) { return eval_wa(wa, w).value; };
}

}  // namespace

TEST_CASE("summing with the zero machine changes nothing") {
    Cra m = fixtures::counter_machine('a');
    Cra s = sum_cra(m, fixtures::zero_machine(m.alphabet));
    check_eval_equal(m, s, 6);
    CHECK(s.grammar == GrammarKind::PlusC);
}

TEST_CASE("doubling m1 by summing it with itself") {
    Cra s = sum_cra(fixtures::m1(), fixtures::m1());
    CHECK(*eval_cra(s, W("abeab")).value == R(8));
}

TEST_CASE("counter sum equals the length counter") {
    Cra s = sum_cra(fixtures::counter_machine('a'), fixtures::counter_machine('b'));
    check_eval_equal(s, fixtures::length_machine(), 8);
}

TEST_CASE("difference of a machine with itself is constantly zero") {
    Cra d = diff_cra(fixtures::m1(), fixtures::m1());
    for_each_word(d.alphabet, 6, [&](const Word& w) {
        CHECK(*eval_cra(d, w).value == R(0));
        return true;
    });
}

TEST_CASE("length minus a-count is the b-count") {
    Cra d = diff_cra(fixtures::length_machine(), fixtures::counter_machine('a'));
    check_eval_equal(d, fixtures::counter_machine('b'), 8);
}

TEST_CASE("difference of constant machines") {
    Cra five = fixtures::zero_machine({"a"});
    five.mu[0] = Expr::constant(R(5));
    Cra three = fixtures::zero_machine({"a"});
    three.mu[0] = Expr::constant(R(3));
    Cra d = diff_cra(five, three);
    CHECK(*eval_cra(d, W("aa")).value == R(2));
}

TEST_CASE("subset translation reproduces the figure's e-transition") {
    Cra src = fixtures::subset_fig_machine();
    Cra t = copyless_plus_to_inc(src);
    CHECK(t.grammar == GrammarKind::PlusC);
    CHECK(t.num_registers() == 8);  // 2^3 subsets including the empty one
    int e = t.symbol_index("e");
    int sx = t.reg_index("s_x");
    int sxyz = t.reg_index("s_x.y.z");
    int sy = t.reg_index("s_y");
    int sempty = t.reg_index("s_");
    REQUIRE(sx >= 0);
    REQUIRE(sxyz >= 0);
    // x_{x} := x_{x,y,z}; x_{y} := 0; x_{} stays 0
    CHECK(expr_equal(t.update(0, e, sx), Expr::reg_ref(sxyz)));
    CHECK(expr_equal(t.update(0, e, sy), Expr::constant(R(0))));
    CHECK(expr_equal(t.update(0, e, sempty), Expr::constant(R(0))));
    check_eval_equal(src, t, 6);
}

TEST_CASE("single-register increment machine gains only trivial subset registers") {
    Cra m = fixtures::length_machine();
    Cra plus = m;
    plus.grammar = GrammarKind::Plus;  // same shapes, additive tag
    Cra t = copyless_plus_to_inc(plus);
    CHECK(t.num_registers() == 2);  // s_ and s_x
    check_eval_equal(m, t, 6);
}

TEST_CASE("random copyless additive machines translate soundly") {
    for (unsigned seed = 1; seed <= 25; ++seed) {
        RandomCraOptions opt;
        opt.grammar = GrammarKind::Plus;
        opt.copyless = true;
        opt.states = 3;
        opt.registers = 3;
        Cra m = random_cra(opt, seed);
        check_eval_equal(m, copyless_plus_to_inc(m), 5);
    }
}

TEST_CASE("m1's weighted automaton matches the figure") {
    WeightedAutomaton wa = inc_to_single_valued_wa(fixtures::m1());
    REQUIRE(wa.num_states() == 2);  // the reset tracker is trimmed away
    int qx = wa.state_index("q0.x"), qy = wa.state_index("q0.y");
    REQUIRE(qx >= 0);
    REQUIRE(qy >= 0);
    CHECK(*wa.initial_weights[static_cast<size_t>(qx)] == R(0));
    CHECK(*wa.initial_weights[static_cast<size_t>(qy)] == R(0));
    CHECK(*wa.final_weights[static_cast<size_t>(qx)] == R(0));
    CHECK(!wa.final_weights[static_cast<size_t>(qy)]);
    int e = wa.symbol_index("e");
    bool has_transfer = false;
    for (const auto& t : wa.transitions)
        if (t.from == qy && t.to == qx && t.symbol == e && t.cost == R(1)) has_transfer = true;
    CHECK(has_transfer);

    BruteEquiv r = brute_equiv(evaluator_of(fixtures::m1()), wa_evaluator(wa),
                               fixtures::m1().alphabet, 6);
    CHECK(r.agree);
    for_each_word(wa.alphabet, 6, [&](const Word& w) {
        CHECK(count_accepting_paths(wa, w) <= 1);
        return true;
    });
}

TEST_CASE("constant-output machine accepts every word with that value") {
    Cra m = fixtures::zero_machine({"a", "b"});
    m.mu[0] = Expr::constant(R(5));
    WeightedAutomaton wa = inc_to_single_valued_wa(m);
    for_each_word(m.alphabet, 4, [&](const Word& w) {
        CHECK(*eval_wa(wa, w).value == R(5));
        return true;
    });
}

TEST_CASE("subset construction from weighted automata preserves values") {
    // parallel-edge wa: min of 3 and 5 on "a"
    WeightedAutomaton wa;
    wa.semiring = Semiring::MinPlus;
    wa.alphabet = {"a"};
    wa.states = {"p0", "p1"};
    wa.initial_weights = {R(0), std::nullopt};
    wa.final_weights = {std::nullopt, R(0)};
    wa.transitions.push_back({0, 0, R(3), 1});
    wa.transitions.push_back({0, 0, R(5), 1});
    Cra m = wa_to_cra(wa);
    CHECK(*eval_cra(m, W("a")).value == R(3));
    CHECK(!eval_cra(m, W("aa")).defined());

    for (unsigned seed = 1; seed <= 25; ++seed) {
        RandomWaOptions opt;
        opt.states = 4;
        WeightedAutomaton rwa = random_wa(opt, seed);
        Cra rm = wa_to_cra(rwa);
        BruteEquiv r = brute_equiv(wa_evaluator(rwa), evaluator_of(rm), rwa.alphabet, 5);
        INFO("seed " << seed << " differs on " << word_to_string(r.differs, rwa.alphabet));
        CHECK(r.agree);
    }
}

TEST_CASE("plus-times weighted automata determinize through the register construction") {
    // two parallel unit-cost edges: the (+, *) value of a^n is 2^n paths
    WeightedAutomaton wa;
    wa.semiring = Semiring::PlusTimes;
    wa.alphabet = {"a"};
    wa.states = {"p"};
    wa.initial_weights = {R(1)};
    wa.final_weights = {R(1)};
    wa.transitions.push_back({0, 0, R(1), 0});
    wa.transitions.push_back({0, 0, R(1), 0});
    CHECK(*eval_wa(wa, W("aaa")).value == R(8));
    Cra m = wa_to_cra(wa);
    CHECK(m.grammar == GrammarKind::AffineLinear);
    WordFn f = [&wa](const Word& w) { return eval_wa(wa, w).value; };
    CHECK(brute_equiv(f, evaluator_of(m), wa.alphabet, 6).agree);
}

TEST_CASE("affine machines embed into plus-times weighted automata") {
    Cra m = fixtures::m4();  // d*x + c updates
    WeightedAutomaton wa = cra_to_wa(m);
    CHECK(wa.semiring == Semiring::PlusTimes);
    WordFn g = [&wa](const Word& w) { return eval_wa(wa, w).value; };
    CHECK(brute_equiv(evaluator_of(m), g, m.alphabet, 5).agree);
}

TEST_CASE("linear machines embed into weighted automata") {
    for (const Cra& m : {fixtures::m2(), fixtures::m3()}) {
        WeightedAutomaton wa = cra_to_wa(m);
        // exact, including m2's infinite values on e-free words
        BruteEquiv r = brute_equiv(evaluator_of(m), wa_evaluator(wa), m.alphabet, 5);
        INFO("differs on " << word_to_string(r.differs, m.alphabet));
        CHECK(r.agree);
    }
    // chain machine: value |w|
    Cra len = fixtures::length_machine();
    WeightedAutomaton wa = cra_to_wa(len);
    CHECK(*eval_wa(wa, W("abab")).value == R(4));
}

TEST_CASE("elementary decomposition of the figure updates") {
    // identity update -> [Nop]
    Cra ex = fixtures::example51_machine();
    std::vector<ExprPtr> identity{Expr::reg_ref(0), Expr::reg_ref(1)};
    auto seq = elementary_decompose(identity, GrammarKind::PairMinPlus);
    REQUIRE(seq.size() == 1);
    CHECK(seq[0].kind == ElementaryUpdate::Kind::Nop);

    // swap
    std::vector<ExprPtr> swap{Expr::reg_ref(1), Expr::reg_ref(0)};
    seq = elementary_decompose(swap, GrammarKind::PairMinPlus);
    REQUIRE(seq.size() == 1);
    CHECK(seq[0].kind == ElementaryUpdate::Kind::Swap);
    CHECK(decomposition_matches(swap, seq, GrammarKind::PairMinPlus, 1));

    // x := x[y] (+) 1 ; y := (inf, 0)
    std::vector<ExprPtr> f1e{
        Expr::pair_incr(Expr::subst(Expr::reg_ref(0), Expr::reg_ref(1)), R(1)),
        Expr::pair_const(INF, R(0))};
    seq = elementary_decompose(f1e, GrammarKind::PairMinPlus);
    REQUIRE(seq.size() == 3);
    CHECK(seq[0].kind == ElementaryUpdate::Kind::PairSubst);
    CHECK(seq[1].kind == ElementaryUpdate::Kind::Incr);
    CHECK(seq[2].kind == ElementaryUpdate::Kind::Reset);
    CHECK(decomposition_matches(f1e, seq, GrammarKind::PairMinPlus, 2));
}

TEST_CASE("pair machines linearize: the substitution machine equals m1") {
    Cra lin = pair_cra_to_linear_cra(fixtures::f1_pair_machine());
    CHECK(lin.grammar == GrammarKind::MinPlusC);
    check_eval_equal(fixtures::f1_pair_machine(), lin, 7);
    check_eval_equal(fixtures::m1(), lin, 7);
}

TEST_CASE("pair machines linearize: a's between the closest pair of b's") {
    Cra src = fixtures::example51_machine();
    Cra lin = pair_cra_to_linear_cra(src);
    check_eval_equal(src, lin, 7);
    // register census: 2|X| + sum over S of (1 + |X \ S|)
    CHECK(lin.num_registers() == 2 * 2 + (1 + 2) + (1 + 1) + (1 + 1) + (1 + 0));
}

TEST_CASE("increment-only pair updates touch only the scaled registers") {
    CraBuilder b(GrammarKind::PairMinPlus, {"a"});
    int x = b.add_register("x");
    b.add_register("y");
    int q0 = b.add_state("q0");
    b.set_initial(q0);
    b.set_transition(q0, "a", q0);
    b.set_update(q0, "a", x, Expr::pair_incr(Expr::reg_ref(x), R(2)));
    b.set_output(q0, Expr::reg_ref(x));
    Cra src = b.finish();
    Cra lin = pair_cra_to_linear_cra(src);
    check_eval_equal(src, lin, 6);
}

TEST_CASE("subset register invariants hold after every step") {
    Cra src = fixtures::example51_machine();
    Cra lin = pair_cra_to_linear_cra(src);
    int cx = lin.reg_index("x.c"), dx = lin.reg_index("x.d");
    int cy = lin.reg_index("y.c"), dy = lin.reg_index("y.d");
    int d_xy = lin.reg_index("D@x.y");
    int d_x = lin.reg_index("D@x");
    int xd_y = lin.reg_index("x@y");   // x.c * d_{y}
    int yd_x = lin.reg_index("y@x");   // y.c * d_{x}
    REQUIRE(d_xy >= 0);
    for_each_word(lin.alphabet, 6, [&](const Word& w) {
        std::vector<Configuration> trace;
        eval_cra(lin, w, &trace);
        for (const auto& cfg : trace) {
            auto val = [&](int r) { return cfg.valuation[static_cast<size_t>(r)].c; };
            CHECK(val(d_x) == val(dx));
            CHECK(val(d_xy) == val(dx) + val(dy));
            CHECK(val(xd_y) == val(cx) + val(dy));
            CHECK(val(yd_x) == val(cy) + val(dx));
        }
        return true;
    });
}

TEST_CASE("random copyless pair machines linearize soundly") {
    for (unsigned seed = 1; seed <= 20; ++seed) {
        RandomCraOptions opt;
        opt.grammar = GrammarKind::PairMinPlus;
        opt.copyless = true;
        opt.states = 3;
        opt.registers = 3;
        Cra m = random_cra(opt, seed);
        check_eval_equal(m, pair_cra_to_linear_cra(m), 5);
    }
}

TEST_CASE("mod-k machines compute ((|w| mod k) + 1) * |w|") {
    Cra m3k = gen_modk_cra(3);
    Word w;
    for (int len = 0; len <= 8; ++len) {
        long expect = ((len % 3) + 1) * len;
        CHECK(*eval_cra(m3k, w).value == R(expect));
        w.push_back("1");
    }
    CHECK(*eval_cra(gen_modk_cra(1), W("")).value == R(0));
    Cra m2k = gen_modk_cra(2);
    CHECK(*eval_cra(m2k, Word{}).value == R(0));
    CHECK(*eval_cra(m2k, Word(4, "1")).value == R(4));  // f_2(4) = (0+1)*4
}

TEST_CASE("transforms refuse mismatched inputs") {
    CHECK_THROWS_AS(sum_cra(fixtures::m1(), fixtures::counter_machine('a')), Error);  // alphabets
    CHECK_THROWS_AS(copyless_plus_to_inc(fixtures::m1()), Error);                     // copyful
    CHECK_THROWS_AS(inc_to_single_valued_wa(fixtures::m2()), Error);                  // min-plus
    CHECK_THROWS_AS(pair_cra_to_linear_cra(fixtures::m1()), Error);                   // scalar
}
