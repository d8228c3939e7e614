#pragma once

#include <cstdint>
#include <optional>

#include "cra/machine.hpp"

namespace cra {

struct Configuration {
    int state;
    std::vector<Value> valuation;  // one entry per machine register
};

struct EvalResult {
    std::optional<ExtRational> value;  // nullopt = output undefined
    bool defined() const { return value.has_value(); }
};

// Value of one expression under a register valuation; pair operators follow
// the grammar's semiring.
Value eval_expr(const ExprPtr& e, const std::vector<Value>& valuation, GrammarKind g);

// Final projection of an output value to a scalar.  Pair models instantiate
// the parameter slot with the constant 0, so min-plus pairs yield
// min(c, d) and (+, *) pairs yield c; global-discount pairs yield c * d
// (accumulated cost times accumulated discount).
ExtRational project_output(const Value& v, GrammarKind g);

EvalResult eval_cra(const Cra& m, const Word& w, std::vector<Configuration>* trace = nullptr);

// Relabels w by running the DFA over reversed suffixes (position j gets the
// DFA state after reading w_n ... w_j), then evaluates m on the labeling.
// m's alphabet must be exactly the DFA's state set.
Word lookahead_labeling(const LookaheadDfa& a, const Word& w);
EvalResult eval_cra_rla(const Cra& m, const LookaheadDfa& a, const Word& w,
                        std::vector<Configuration>* trace = nullptr);

inline constexpr std::uint64_t kDefaultPathCap = 1u << 20;

// Exact oracle: enumerates every accepting path, combines each path's costs
// (initial weight, edge costs, final weight) with the semiring product and
// aggregates with the semiring sum.  Undefined when no path accepts.
EvalResult eval_wa(const WeightedAutomaton& wa, const Word& w,
                   std::uint64_t path_cap = kDefaultPathCap);

std::uint64_t count_accepting_paths(const WeightedAutomaton& wa, const Word& w,
                                    std::uint64_t path_cap = kDefaultPathCap);

// One line per configuration: "state | reg=value ...", rationals as p/q.
std::string render_trace(const Cra& m, const std::vector<Configuration>& trace);

}  // namespace cra
