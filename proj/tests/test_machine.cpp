#include <catch2/catch_amalgamated.hpp>

#include "cra/machine.hpp"
#include "fixtures.hpp"

using namespace cra;

TEST_CASE("the copyless figure machines check as copyless") {
    CHECK(check_copyless(fixtures::m2()).ok);
    CHECK(check_copyless(fixtures::m4()).ok);
    CHECK(check_copyless(fixtures::example51_machine()).ok);
}

TEST_CASE("m1 is not copyless: y feeds both updates on e") {
    auto rep = check_copyless(fixtures::m1());
    REQUIRE(!rep.ok);
    bool found = false;
    Cra m = fixtures::m1();
    for (const auto& v : rep.violations)
        if (v.symbol >= 0 && m.alphabet[static_cast<size_t>(v.symbol)] == "e" &&
            m.registers[static_cast<size_t>(v.reg)] == "y" && v.count == 2)
            found = true;
    CHECK(found);
    CHECK(!check_copyless(fixtures::m3()).ok);
}

TEST_CASE("single register incremented on every symbol is copyless") {
    CHECK(check_copyless(fixtures::length_machine()).ok);
}

TEST_CASE("check_linear accepts affine updates and rejects min") {
    CraBuilder b(GrammarKind::AffineLinear, {"a"});
    int x = b.add_register("x");
    int q0 = b.add_state("q0");
    b.set_initial(q0);
    b.set_transition(q0, "a", q0);
    b.set_update(q0, "a", x,
                 Expr::plus(Expr::scale(ExtRational(2), Expr::reg_ref(x)),
                            Expr::constant(ExtRational(3))));
    b.set_output(q0, Expr::reg_ref(x));
    CHECK(check_linear(b.finish()));

    CHECK(!check_linear(fixtures::m2()));  // min is not affine
    // x + x normalizes to 2x and passes
    CraBuilder b2(GrammarKind::Plus, {"a"});
    int y = b2.add_register("x");
    int p = b2.add_state("q0");
    b2.set_initial(p);
    b2.set_transition(p, "a", p);
    b2.set_update(p, "a", y, Expr::plus(Expr::reg_ref(y), Expr::reg_ref(y)));
    b2.set_output(p, Expr::reg_ref(y));
    CHECK(check_linear(b2.finish()));
}

TEST_CASE("validation rejects grammar violations and bad indices") {
    CraBuilder b(GrammarKind::PlusC, {"a"});
    int x = b.add_register("x");
    int q0 = b.add_state("q0");
    b.set_initial(q0);
    b.set_transition(q0, "a", q0);
    b.set_update(q0, "a", x, Expr::min_of({Expr::reg_ref(x), Expr::constant(ExtRational(0))}));
    CHECK_THROWS_AS(b.finish(), Error);
}

TEST_CASE("pruning drops states unreachable from the initial state") {
    CraBuilder b(GrammarKind::PlusC, {"a"});
    b.add_register("x");
    int q0 = b.add_state("q0");
    int q1 = b.add_state("orphan");
    b.set_initial(q0);
    b.set_transition(q0, "a", q0);
    b.set_transition(q1, "a", q1);
    b.set_output(q0, Expr::reg_ref(0));
    Cra m = b.finish();
    Cra p = prune_unreachable(m);
    CHECK(p.num_states() == 1);
    CHECK(p.states[0] == "q0");
}
