#pragma once

#include <functional>
#include <optional>

#include "cra/machine.hpp"

namespace cra {

// Words of length <= maxlen in breadth-first lexicographic order (alphabet
// order as given), applied to `fn` until it returns false.
void for_each_word(const std::vector<Symbol>& alphabet, int maxlen,
                   const std::function<bool(const Word&)>& fn);

using WordFn = std::function<std::optional<ExtRational>(const Word&)>;
WordFn evaluator_of(const Cra& m);

struct BruteMin {
    bool empty = true;  // no word had a defined finite output
    ExtRational value;
    Word witness;  // lexicographically least among shortest minimizers
};

// Exact minimum of eval over all words of length <= maxlen with defined
// finite output.  (+infinity outputs count as undefined: no graph solver can
// attain them.)
BruteMin brute_mincost(const Cra& m, int maxlen);
BruteMin brute_mincost_fn(const WordFn& fn, const std::vector<Symbol>& alphabet, int maxlen);

struct BruteEquiv {
    bool agree = true;
    Word differs;  // first word (breadth-first lexicographic) that separates
};

// Exhaustive comparison; Undefined-sensitive.  `identify_inf_undefined`
// treats a +infinity value and an undefined output as equal (the tropical
// reading used when comparing against weighted-automaton path semantics).
BruteEquiv brute_equiv(const WordFn& f, const WordFn& g, const std::vector<Symbol>& alphabet,
                       int maxlen, bool identify_inf_undefined = false);
BruteEquiv brute_equiv(const Cra& m1, const Cra& m2, int maxlen,
                       bool identify_inf_undefined = false);

struct Formula3Sat {
    int variables = 0;
    // Three literals per clause; positive index v means variable v true
    // satisfies, negative means variable -v false satisfies.  Indices 1-based.
    std::vector<std::array<int, 3>> clauses;
};

// The chain machine of the satisfiability reduction: reading an assignment
// word of n bits plus two padding symbols outputs the number of unsatisfied
// clauses; min cost 0 iff the formula is satisfiable.
Cra gen_sat3(const Formula3Sat& f);

// Exhaustive satisfiability check (2^n assignments, n <= 20).
bool sat3_satisfiable(const Formula3Sat& f);

struct RandomCraOptions {
    GrammarKind grammar = GrammarKind::PlusC;
    int states = 3;
    int registers = 2;
    long const_lo = -3;
    long const_hi = 5;
    bool copyless = false;
    bool nonnegative = false;
    int alphabet_size = 2;
    // Fraction of states with a defined output, in percent.
    int output_pct = 70;
};

// Seed-reproducible machine; always passes grammar validation and, when
// requested, the copyless check.  A spanning backbone keeps all states
// reachable.
Cra random_cra(const RandomCraOptions& opt, unsigned seed);

struct RandomWaOptions {
    Semiring semiring = Semiring::MinPlus;
    int states = 3;
    int alphabet_size = 2;
    long const_lo = 0;
    long const_hi = 5;
    int edges_per_state = 2;
};

WeightedAutomaton random_wa(const RandomWaOptions& opt, unsigned seed);

}  // namespace cra
