#pragma once

#include <optional>

#include "cra/machine.hpp"

namespace cra::fixtures {

// The four running-example machines over {a, b, e}.
Cra m1();  // plus-c: length after deleting b's beyond the last e
Cra m2();  // min-plus, copyless: min over completed blocks of min(#a, #b)
Cra m3();  // min-plus, copyful: block-split min of leading a's + trailing b's
Cra m4();  // past-discount: 10 per early a, 5% off per e after the first b

// Look-ahead formulation of m1: machine over the labeling automaton's states.
Cra m1_rla_machine();
LookaheadDfa m1_la_dfa();

// Copyless additive machine from the subset-translation figure
// (x += y + z on e, mu = x + y + z).
Cra subset_fig_machine();

// Pair machine computing f1 via substitution (x := x[y] (+) 1 on e).
Cra f1_pair_machine();

// Pair machine counting a's between the closest pair of b's (three states).
Cra example51_machine();
// Same shape interpreted over (+, *) pairs; used by the inc-scale
// equivalence pipeline.
Cra example51_incscale();

Cra counter_machine(char symbol);  // occurrences of `symbol` over {a, b}
Cra length_machine();              // |w| over {a, b}
Cra zero_machine(std::vector<Symbol> alphabet);
Cra plus_two_machine();            // 2 * |w| over {a, b}

// Reference implementations of the figure functions, straight from the word.
std::optional<ExtRational> f1(const Word& w);
std::optional<ExtRational> f2(const Word& w);
std::optional<ExtRational> f3(const Word& w);
std::optional<ExtRational> f4(const Word& w);

// Behavior-preserving split: duplicates state q and redirects one incoming
// transition to the copy.
Cra split_state(const Cra& m, int q);

Word make_word(const std::string& chars);

}  // namespace cra::fixtures
