#pragma once

#include "cra/machine.hpp"

namespace cra {

// Single-step register update touching at most two registers; any copyless
// parallel pair update factors into a sequence of these.
struct ElementaryUpdate {
    enum class Kind { Nop, Swap, Reset, Incr, PairAdd, PairSubst };
    Kind kind = Kind::Nop;
    RegIdx x = -1;
    RegIdx y = -1;
    Value k;  // Reset payload / Incr scalar
};

// Sequences a copyless parallel update (one expression per register) into
// elementary updates whose sequential execution equals the parallel one.
// Throws NotDecomposable when a constant operand needs a scratch register
// and no dead register is available.
std::vector<ElementaryUpdate> elementary_decompose(const std::vector<ExprPtr>& update,
                                                   GrammarKind g);

void apply_elementary(const ElementaryUpdate& u, std::vector<Value>& valuation, GrammarKind g);

// Dynamic check: sequential execution of `seq` equals the parallel update on
// `samples` random valuations.
bool decomposition_matches(const std::vector<ExprPtr>& update,
                           const std::vector<ElementaryUpdate>& seq, GrammarKind g,
                           unsigned seed, int samples = 50);

// Product machine computing m1(w) + m2(w); registers are pairs (x, y) with
// value v1(x) + v2(y) plus singletons from either side.  Inputs must share
// an alphabet and use the additive grammars; two plus-c inputs produce a
// plus-c output.
Cra sum_cra(const Cra& m1, const Cra& m2);
// Same construction with m(w) = m1(w) - m2(w); needs the domain closed
// under negation.
Cra diff_cra(const Cra& m1, const Cra& m2);

// Copyless additive machine to increment-only machine with one register per
// register subset (x_S holds the sum over S).  Output register count is
// exactly 2^|X|; the result is generally not copyless.
Cra copyless_plus_to_inc(const Cra& m);

// Increment-only machine to a single-valued weighted automaton on states
// (q, x) plus a reset-tracking state per q.  The result has at most one
// accepting path per word and the same word function.
WeightedAutomaton inc_to_single_valued_wa(const Cra& m);

// Subset construction: weighted automaton to a copyful linear machine with
// one register per automaton state; only subsets reachable from the initial
// set are materialized.
Cra wa_to_cra(const WeightedAutomaton& wa);

// Linear machine (updates of shape OPLUS_i (x_i OTIMES a_i) OPLUS c) to a
// weighted automaton on states (Q x X) u Q.
WeightedAutomaton cra_to_wa(const Cra& m);

// Copyless pair machine to a copyful linear machine over the underlying
// semiring.  Registers: x.c and x.d per original register, d_S per register
// subset and x.c*d_S per (x, S) with x not in S; the subset registers keep
// the invariants d_S = prod over S of x.d and xd_S = x.c * d_S after every
// input symbol.
Cra pair_cra_to_linear_cra(const Cra& m);

// The k-state, k-register unary machine computing ((|w| mod k) + 1) * |w|.
Cra gen_modk_cra(int k);

// Drops weighted-automaton states that lie on no accepting path.
WeightedAutomaton trim_wa(const WeightedAutomaton& wa);

}  // namespace cra
