#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cra/rational.hpp"

namespace cra {

using RegIdx = int;

// Register contents: a scalar cost or a (c, d) pair.  Pair registers encode
// the one-parameter term (d ⊗ ?) ⊕ c; which semiring interprets ⊕/⊗ is
// decided by the machine's grammar kind.
struct Value {
    ExtRational c;
    ExtRational d;
    bool pair = false;

    Value() = default;
    Value(ExtRational scalar) : c(std::move(scalar)) {}
    static Value make_pair(ExtRational c, ExtRational d) {
        Value v;
        v.c = std::move(c);
        v.d = std::move(d);
        v.pair = true;
        return v;
    }
    const ExtRational& scalar() const { return c; }

    friend bool operator==(const Value& a, const Value& b) {
        return a.pair == b.pair && a.c == b.c && (!a.pair || a.d == b.d);
    }
    std::string str() const;
};

enum class ExprKind {
    Const,      // scalar constant
    Reg,        // register reference
    Plus,       // binary +
    Min,        // n-ary min, arity >= 2
    Scale,      // constant * expr
    PairConst,  // (c, d) literal
    PairSum,    // e1 (x) e2 on pairs
    PairIncr,   // e (+) k, k a scalar or a (c, d) constant
    Subst,      // e1[e2], parameter substitution
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind;
    ExtRational k1;  // Const / Scale factor / PairConst c / PairIncr c-or-d
    ExtRational k2;  // PairConst d / PairIncr d when the increment is a pair
    bool incr_is_pair = false;
    RegIdx reg = -1;
    std::vector<ExprPtr> args;

    static ExprPtr constant(ExtRational v);
    static ExprPtr reg_ref(RegIdx r);
    static ExprPtr plus(ExprPtr a, ExprPtr b);
    static ExprPtr min_of(std::vector<ExprPtr> args);
    static ExprPtr scale(ExtRational factor, ExprPtr e);
    static ExprPtr pair_const(ExtRational c, ExtRational d);
    static ExprPtr pair_sum(ExprPtr a, ExprPtr b);
    static ExprPtr pair_incr(ExprPtr e, ExtRational d);
    static ExprPtr pair_incr(ExprPtr e, ExtRational c, ExtRational d);
    static ExprPtr subst(ExprPtr a, ExprPtr b);
};

// Appends each register occurrence (with multiplicity) to `out`.
void collect_registers(const ExprPtr& e, std::vector<RegIdx>& out);
bool mentions_register(const ExprPtr& e, RegIdx r);
// Structural substitution of register references.
ExprPtr substitute_registers(const ExprPtr& e, const std::map<RegIdx, ExprPtr>& repl);
bool expr_equal(const ExprPtr& a, const ExprPtr& b);

enum class GrammarKind {
    PlusC,           // t := t + c | c, scalar registers
    Plus,            // t := t + t | c, scalar registers
    MinPlusC,        // t := min(t,..) | t + c | c, scalar registers
    IncScale,        // pair registers over (+, *): (c,d), (x), (+)d, [.]
    PairMinPlus,     // pair registers over (min, +): (c,d), (x), (+)d, [.]
    PastDiscount,    // t := d*t + c | c, scalar registers
    FutureDiscount,  // t := (c,d) | t[c,d], pair registers over (+, *)
    GlobalDiscount,  // t := (0,1) | t (+) (c,d), pair registers, cost = sum*product
    AffineLinear,    // t := c0 + sum ci*xi, scalar registers
};

const char* grammar_name(GrammarKind g);
std::optional<GrammarKind> grammar_from_name(std::string_view name);

bool grammar_uses_pairs(GrammarKind g);
// Default initial register value: 0 for the additive scalar models, the
// (additive identity, multiplicative identity) pair for pair models.
Value grammar_identity(GrammarKind g);

// Semiring carried by the pair models and by weighted automata.
enum class Semiring { MinPlus, PlusTimes };

ExtRational sr_plus(Semiring s, const ExtRational& a, const ExtRational& b);
ExtRational sr_times(Semiring s, const ExtRational& a, const ExtRational& b);
ExtRational sr_zero(Semiring s);  // additive identity: inf for min-plus, 0 for plus-times
ExtRational sr_one(Semiring s);   // multiplicative identity: 0 for min-plus, 1 for plus-times

// Semiring used by a pair grammar kind (PairMinPlus -> MinPlus, others PlusTimes).
Semiring pair_semiring(GrammarKind g);

struct GrammarCheck {
    bool ok = true;
    std::string diagnostic;  // names the first violating subterm when !ok
};

// Shape and constant-range membership of `e` in grammar `g`.
GrammarCheck validate_grammar(const ExprPtr& e, GrammarKind g);

// Affine normal form over (+, *): c0 + sum over registers of ci*xi.
// Extraction normalizes duplicate register mentions (x + x becomes 2x).
struct AffineForm {
    std::map<RegIdx, ExtRational> coeffs;
    ExtRational constant;
};
std::optional<AffineForm> affine_form(const ExprPtr& e);

// Min-plus linear normal form: min over {x_i + a_i} and an optional bare
// constant.  A plain PlusC expression extracts to a single term.
struct MinPlusForm {
    std::vector<std::pair<RegIdx, ExtRational>> terms;
    std::optional<ExtRational> constant;
};
std::optional<MinPlusForm> minplus_form(const ExprPtr& e);

// Generic "sum of monomials" linear combination used when composing linear
// updates: value = OPLUS over terms of (reg OTIMES weight), OPLUS constant.
// Interpreted under either semiring.
struct LinComb {
    std::vector<std::pair<RegIdx, ExtRational>> terms;
    std::optional<ExtRational> constant;

    static LinComb of_const(ExtRational c);
    static LinComb of_reg(RegIdx r, Semiring s);
    void add_term(RegIdx r, ExtRational w, Semiring s);
    void add_const(const ExtRational& c, Semiring s);
    // OPLUS-combine with another combination.
    void merge(const LinComb& o, Semiring s);
    // this := this OTIMES w.
    void scale_by(const ExtRational& w, Semiring s);
    // Substitute register references by the given combinations.
    LinComb substituted(const std::vector<LinComb>& reg_forms, Semiring s) const;
    ExtRational eval(const std::vector<ExtRational>& regs, Semiring s) const;
    ExprPtr to_expr(Semiring s) const;
};

std::optional<LinComb> lincomb_of_expr(const ExprPtr& e, Semiring s);

// Rendering used by the text format; register names supplied by the machine.
std::string expr_to_string(const ExprPtr& e, const std::vector<std::string>& reg_names);

}  // namespace cra
