#pragma once

#include "cra/machine.hpp"
#include "cra/mincost.hpp"

namespace cra {

// Row space over the combined registers plus a homogenized constant column;
// rows are kept in reduced echelon form for span tests.
class AffineEquationSystem {
public:
    explicit AffineEquationSystem(size_t dim) : dim_(dim) {}
    // True when the row was independent of the current span (rank grew).
    bool insert(std::vector<ExtRational> row);
    size_t rank() const { return rref_.size(); }
    size_t dimension() const { return dim_; }

private:
    size_t dim_;
    std::vector<std::vector<ExtRational>> rref_;  // pivot-ordered rows
};

struct EquivStats {
    int product_states = 0;
    int variables = 0;  // k1 + k2 + 1 (homogenized)
    int basis_insertions = 0;
    int insertion_bound() const { return product_states * variables; }
};

struct EquivResult {
    enum class Kind { Equivalent, Counterexample } kind;
    Word counterexample;  // verified by evaluation before being returned
    EquivStats stats;
};

// Decides m1(w) = m2(w) for machines with affine updates by backward
// propagation of output-equality relations with per-state bases (Karr-style
// fixpoint).  Output domains must coincide; a reachable product state where
// exactly one output is defined yields a counterexample word.
EquivResult equiv_affine(const Cra& m1, const Cra& m2);

struct ContainsResult {
    enum class Kind { Holds, Violation, Unbounded } kind;
    Word witness;       // Violation: m1(witness) > m2(witness)
    bool has_witness = false;
};

// Decides m1(w) <= m2(w) over the common domain by minimizing m2 - m1.
// A diverging difference still yields Violation when the negative cycle
// unrolls to a verified witness word; Unbounded is the fallback when no
// concrete word could be extracted.
ContainsResult contains(const Cra& m1, const Cra& m2);

struct RangeResult {
    enum class Kind { Yes, No, Inconclusive } kind;
    Word witness;  // Yes: m(witness) = k exactly
    std::string bounds_note;
};

// Does some word evaluate to exactly k?  Explores (graph vertex, accumulated
// value) pairs inside a value window; No is returned only when the search
// space was exhausted or every escape from the window is provably
// monotone away from zero, otherwise Inconclusive with the bounds used.
RangeResult in_range(const Cra& m, const ExtRational& k);

}  // namespace cra
