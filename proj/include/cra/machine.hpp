#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cra/expr.hpp"

namespace cra {

using Symbol = std::string;
using Word = std::vector<Symbol>;

std::string word_to_string(const Word& w, const std::vector<Symbol>& alphabet);

enum class Errc {
    UnknownSymbol,
    PathExplosion,
    AlphabetMismatch,
    GrammarMismatch,
    NotCopyless,
    NotLinearForm,
    NotDecomposable,
    UnsupportedConstants,
    InvalidEdge,
    IncrementOutOfRange,
    DomainMismatch,
    ParseError,
    ValidationError,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

// Deterministic cost register automaton.  delta and rho are total over
// (state, symbol); mu is partial.  Registers are write-only: expressions
// read them, control flow never does.
struct Cra {
    GrammarKind grammar = GrammarKind::PlusC;
    std::vector<Symbol> alphabet;
    std::vector<std::string> states;
    int initial = 0;
    std::vector<std::string> registers;
    std::vector<Value> init_values;           // one per register
    std::vector<int> delta;                   // [state * |alphabet| + symbol]
    std::vector<ExprPtr> rho;                 // [(state * |alphabet| + symbol) * |registers| + reg]
    std::vector<ExprPtr> mu;                  // [state], null = undefined

    int num_states() const { return static_cast<int>(states.size()); }
    int num_symbols() const { return static_cast<int>(alphabet.size()); }
    int num_registers() const { return static_cast<int>(registers.size()); }

    int symbol_index(const Symbol& a) const;  // -1 when absent
    int state_index(const std::string& name) const;
    int reg_index(const std::string& name) const;

    int next_state(int q, int a) const { return delta[static_cast<size_t>(q) * alphabet.size() + a]; }
    const ExprPtr& update(int q, int a, int r) const {
        return rho[(static_cast<size_t>(q) * alphabet.size() + a) * registers.size() + r];
    }
    ExprPtr& update(int q, int a, int r) {
        return rho[(static_cast<size_t>(q) * alphabet.size() + a) * registers.size() + r];
    }
    const ExprPtr& output(int q) const { return mu[static_cast<size_t>(q)]; }

    // Structural well-formedness: totality of delta/rho, index ranges,
    // grammar validity of every expression, init value shapes.
    void validate() const;
};

// Incremental builder keeping name -> index maps out of Cra itself.
class CraBuilder {
public:
    CraBuilder(GrammarKind g, std::vector<Symbol> alphabet);
    int add_state(const std::string& name);
    int state(const std::string& name);  // add-or-get
    int add_register(const std::string& name);
    void set_initial(int q) { m_.initial = q; }
    void set_init_value(int r, Value v);
    void set_update(int q, const Symbol& a, int r, ExprPtr e);
    void set_transition(int q, const Symbol& a, int q2);
    void set_output(int q, ExprPtr e);
    // Fills unset transitions as self loops and unset updates as identity,
    // then validates.
    Cra finish(bool fill_identity = false);

private:
    Cra m_;
    bool finished_ = false;
};

// Nondeterministic weighted automaton.  Transitions form a multiset;
// parallel edges with equal labels are meaningful.
struct WaTransition {
    int from;
    int symbol;
    ExtRational cost;
    int to;
};

struct WeightedAutomaton {
    Semiring semiring = Semiring::MinPlus;
    std::vector<Symbol> alphabet;
    std::vector<std::string> states;
    std::vector<std::optional<ExtRational>> initial_weights;  // lambda, per state
    std::vector<std::optional<ExtRational>> final_weights;    // per state
    std::vector<WaTransition> transitions;

    int num_states() const { return static_cast<int>(states.size()); }
    int symbol_index(const Symbol& a) const;
    int state_index(const std::string& name) const;
    void validate() const;
};

// Total deterministic automaton used for regular look-ahead labelings.
struct LookaheadDfa {
    std::vector<Symbol> alphabet;
    std::vector<std::string> states;
    int initial = 0;
    std::vector<int> delta;  // [state * |alphabet| + symbol]

    int num_states() const { return static_cast<int>(states.size()); }
    int symbol_index(const Symbol& a) const;
    int next_state(int q, int a) const { return delta[static_cast<size_t>(q) * alphabet.size() + a]; }
    void validate() const;
};

struct CopylessViolation {
    int state;
    int symbol;   // -1 when the violation is in mu(state)
    RegIdx reg;
    int count;
};

struct CopylessReport {
    bool ok = true;
    std::vector<CopylessViolation> violations;
};

// True iff at every (state, symbol) each register occurs at most once across
// all update right-hand sides, and at most once in each output expression.
CopylessReport check_copyless(const Cra& m);

// True iff every update and output expression is affine (c0 + sum ci*xi)
// with finite constants; duplicate register mentions normalize first.
bool check_linear(const Cra& m);

// True iff every update and output expression extracts to min-plus linear
// form min({x_i + a_i} ∪ {c}).
bool check_minplus_linear(const Cra& m);

// States reachable from the initial one, in BFS order.
std::vector<int> reachable_states(const Cra& m);
// Drops unreachable states (semantics only quantifies over runs from the
// initial state).
Cra prune_unreachable(const Cra& m);

}  // namespace cra
