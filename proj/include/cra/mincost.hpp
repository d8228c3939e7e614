#pragma once

#include <optional>

#include "cra/machine.hpp"

namespace cra {

// Graph with per-edge cost and multiplier; the cost of a path e1..en is
// c(e1) + w(e1)*(c(e2) + w(e2)*(...)).  Labels carry witness symbols.
struct CostGraphEdge {
    int from;
    int to;
    ExtRational cost;
    ExtRational weight;
    Symbol label;  // empty = structural edge
};

struct CostGraph {
    int vertices = 0;
    int source = 0;
    int target = 0;
    std::vector<CostGraphEdge> edges;
};

struct GspResult {
    enum class Kind { Finite, Unbounded, NoPath } kind;
    ExtRational value;            // Finite: attained min; Unbounded: limit infimum
    std::vector<int> path_edges;  // Finite: edge indices along a witness path
};

inline ExtRational default_epsilon() { return ExtRational(1, 1000000000); }

// Exact min over source-target paths of the discounted path cost.  Requires
// c(e) >= 0 and w(e) in [0, 1].  A strict fixpoint below every finite-path
// value is reported as Unbounded with the limit; value iteration is sharp
// beyond `epsilon` (exact here: a policy-iteration fixpoint plus a
// simple-path attainment check).
GspResult generalized_shortest_path(const CostGraph& g,
                                    const ExtRational& epsilon = default_epsilon());

struct SolveOutcome {
    enum class Kind { Finite, Unbounded, Empty } kind = Kind::Empty;
    ExtRational value;                   // Finite
    Word witness;                        // Finite: re-evaluates to value
    std::optional<ExtRational> infimum;  // Unbounded: known limit; absent = -infinity

    static SolveOutcome finite(ExtRational v, Word w) {
        return {Kind::Finite, std::move(v), std::move(w), std::nullopt};
    }
    static SolveOutcome unbounded(std::optional<ExtRational> inf = std::nullopt) {
        return {Kind::Unbounded, ExtRational(0), {}, std::move(inf)};
    }
    static SolveOutcome empty() { return {}; }
};

// Min over all words of m(w) for an increment-only machine, via the
// single-valued weighted automaton and a shortest-path run (Dijkstra when
// costs are nonnegative, Bellman-Ford with negative-cycle detection
// otherwise).
SolveOutcome mincost_inc(const Cra& m);

// Copyless additive machines: subset translation then mincost_inc.
SolveOutcome mincost_copyless_plus(const Cra& m);

// Linear min-plus machines: weighted-automaton construction then a
// single-source shortest path including initial/final weights.
SolveOutcome mincost_minplus(const Cra& m);

// Past-discount machines (updates d*x + c with d in (0,1], c >= 0): reversed
// generalized-shortest-path reduction.
SolveOutcome mincost_past_discount(const Cra& m);

// Future-discount machines (updates x[c,d]): forward generalized-shortest-
// path reduction after normalizing every update to substitution form.
SolveOutcome mincost_future_discount(const Cra& m);

// Global-discount machines with natural increments bounded by
// `unary_bound`: the round-indexed discount table (best discount per
// (vertex, cost sum)), with limit-infimum 0 reported when a reachable
// improving cycle with a discount < 1 exists.
SolveOutcome mincost_global_discount(const Cra& m, long unary_bound);

// A word with m(w) < 0 obtained by unrolling a negative cycle; present
// exactly when mincost_inc(m) is Unbounded.
std::optional<Word> negative_cycle_word(const Cra& m);

}  // namespace cra
