#include "cra/machine.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace cra {

std::string word_to_string(const Word& w, const std::vector<Symbol>& alphabet) {
    bool single_char = std::all_of(alphabet.begin(), alphabet.end(),
                                   [](const Symbol& s) { return s.size() == 1; });
    std::string out;
    for (size_t i = 0; i < w.size(); ++i) {
        if (!single_char && i) out += " ";
        out += w[i];
    }
    return out;
}

namespace {

template <typename T>
int index_of(const std::vector<T>& v, const T& x) {
    auto it = std::find(v.begin(), v.end(), x);
    return it == v.end() ? -1 : static_cast<int>(it - v.begin());
}

}  // namespace

int Cra::symbol_index(const Symbol& a) const { return index_of(alphabet, a); }
int Cra::state_index(const std::string& name) const { return index_of(states, name); }
int Cra::reg_index(const std::string& name) const { return index_of(registers, name); }

void Cra::validate() const {
    size_t ns = states.size(), na = alphabet.size(), nr = registers.size();
    if (ns == 0) throw Error(Errc::ValidationError, "machine has no states");
    if (initial < 0 || initial >= static_cast<int>(ns))
        throw Error(Errc::ValidationError, "initial state out of range");
    if (delta.size() != ns * na || rho.size() != ns * na * nr || mu.size() != ns ||
        init_values.size() != nr)
        throw Error(Errc::ValidationError, "transition tables are not total");
    for (int t : delta)
        if (t < 0 || t >= static_cast<int>(ns))
            throw Error(Errc::ValidationError, "delta target out of range");

    bool pairs = grammar_uses_pairs(grammar);
    for (const Value& v : init_values)
        if (v.pair != pairs)
            throw Error(Errc::ValidationError, "initial value shape does not match grammar");

    auto check_expr = [&](const ExprPtr& e, const std::string& where) {
        if (!e) throw Error(Errc::ValidationError, "missing update expression at " + where);
        std::vector<RegIdx> regs;
        collect_registers(e, regs);
        for (RegIdx r : regs)
            if (r < 0 || r >= static_cast<int>(nr))
                throw Error(Errc::ValidationError, "register out of range at " + where);
        auto g = validate_grammar(e, grammar);
        if (!g.ok)
            throw Error(Errc::ValidationError,
                        "expression at " + where + " rejected by grammar: " + g.diagnostic);
    };

    for (size_t q = 0; q < ns; ++q) {
        for (size_t a = 0; a < na; ++a)
            for (size_t r = 0; r < nr; ++r)
                check_expr(rho[(q * na + a) * nr + r],
                           states[q] + "/" + alphabet[a] + "/" + registers[r]);
        if (mu[q]) check_expr(mu[q], "output of " + states[q]);
    }
}

CraBuilder::CraBuilder(GrammarKind g, std::vector<Symbol> alphabet) {
    m_.grammar = g;
    m_.alphabet = std::move(alphabet);
}

int CraBuilder::add_state(const std::string& name) {
    if (m_.state_index(name) >= 0)
        throw Error(Errc::ValidationError, "duplicate state " + name);
    m_.states.push_back(name);
    size_t na = m_.alphabet.size(), nr = m_.registers.size();
    m_.delta.resize(m_.states.size() * na, -1);
    m_.rho.resize(m_.states.size() * na * nr);
    m_.mu.resize(m_.states.size());
    return static_cast<int>(m_.states.size()) - 1;
}

int CraBuilder::state(const std::string& name) {
    int i = m_.state_index(name);
    return i >= 0 ? i : add_state(name);
}

int CraBuilder::add_register(const std::string& name) {
    if (!m_.states.empty())
        throw Error(Errc::ValidationError, "registers must be declared before states");
    if (m_.reg_index(name) >= 0)
        throw Error(Errc::ValidationError, "duplicate register " + name);
    m_.registers.push_back(name);
    m_.init_values.push_back(grammar_identity(m_.grammar));
    return static_cast<int>(m_.registers.size()) - 1;
}

void CraBuilder::set_init_value(int r, Value v) {
    m_.init_values.at(static_cast<size_t>(r)) = std::move(v);
}

void CraBuilder::set_transition(int q, const Symbol& a, int q2) {
    int ai = m_.symbol_index(a);
    if (ai < 0) throw Error(Errc::UnknownSymbol, "symbol " + a + " not in alphabet");
    m_.delta[static_cast<size_t>(q) * m_.alphabet.size() + ai] = q2;
}

void CraBuilder::set_update(int q, const Symbol& a, int r, ExprPtr e) {
    int ai = m_.symbol_index(a);
    if (ai < 0) throw Error(Errc::UnknownSymbol, "symbol " + a + " not in alphabet");
    m_.update(q, ai, r) = std::move(e);
}

void CraBuilder::set_output(int q, ExprPtr e) { m_.mu.at(static_cast<size_t>(q)) = std::move(e); }

Cra CraBuilder::finish(bool fill_identity) {
    if (finished_) throw Error(Errc::Internal, "builder already finished");
    finished_ = true;
    size_t na = m_.alphabet.size(), nr = m_.registers.size();
    for (size_t q = 0; q < m_.states.size(); ++q) {
        for (size_t a = 0; a < na; ++a) {
            auto& tgt = m_.delta[q * na + a];
            if (tgt < 0) {
                if (!fill_identity)
                    throw Error(Errc::ValidationError,
                                "missing transition " + m_.states[q] + "/" + m_.alphabet[a]);
                tgt = static_cast<int>(q);
            }
            for (size_t r = 0; r < nr; ++r) {
                auto& e = m_.rho[(q * na + a) * nr + r];
                if (!e) e = Expr::reg_ref(static_cast<RegIdx>(r));
            }
        }
    }
    m_.validate();
    return std::move(m_);
}

int WeightedAutomaton::symbol_index(const Symbol& a) const { return index_of(alphabet, a); }
int WeightedAutomaton::state_index(const std::string& name) const { return index_of(states, name); }

void WeightedAutomaton::validate() const {
    size_t ns = states.size();
    if (initial_weights.size() != ns || final_weights.size() != ns)
        throw Error(Errc::ValidationError, "weight maps sized wrong");
    for (const auto& t : transitions) {
        if (t.from < 0 || t.from >= static_cast<int>(ns) || t.to < 0 ||
            t.to >= static_cast<int>(ns))
            throw Error(Errc::ValidationError, "transition endpoint out of range");
        if (t.symbol < 0 || t.symbol >= static_cast<int>(alphabet.size()))
            throw Error(Errc::ValidationError, "transition symbol out of range");
    }
}

int LookaheadDfa::symbol_index(const Symbol& a) const { return index_of(alphabet, a); }

void LookaheadDfa::validate() const {
    if (states.empty()) throw Error(Errc::ValidationError, "dfa has no states");
    if (delta.size() != states.size() * alphabet.size())
        throw Error(Errc::ValidationError, "dfa transition table not total");
    for (int t : delta)
        if (t < 0 || t >= num_states())
            throw Error(Errc::ValidationError, "dfa target out of range");
}

CopylessReport check_copyless(const Cra& m) {
    CopylessReport rep;
    size_t na = m.alphabet.size(), nr = m.registers.size();
    for (int q = 0; q < m.num_states(); ++q) {
        for (int a = 0; a < static_cast<int>(na); ++a) {
            std::map<RegIdx, int> counts;
            std::vector<RegIdx> regs;
            for (size_t r = 0; r < nr; ++r) {
                regs.clear();
                collect_registers(m.update(q, a, static_cast<int>(r)), regs);
                for (RegIdx x : regs) counts[x]++;
            }
            for (const auto& [x, n] : counts)
                if (n > 1) {
                    rep.ok = false;
                    rep.violations.push_back({q, a, x, n});
                }
        }
        if (m.mu[static_cast<size_t>(q)]) {
            std::map<RegIdx, int> counts;
            std::vector<RegIdx> regs;
            collect_registers(m.mu[static_cast<size_t>(q)], regs);
            for (RegIdx x : regs) counts[x]++;
            for (const auto& [x, n] : counts)
                if (n > 1) {
                    rep.ok = false;
                    rep.violations.push_back({q, -1, x, n});
                }
        }
    }
    return rep;
}

bool check_linear(const Cra& m) {
    for (const auto& e : m.rho)
        if (!affine_form(e)) return false;
    for (const auto& e : m.mu)
        if (e && !affine_form(e)) return false;
    return true;
}

bool check_minplus_linear(const Cra& m) {
    for (const auto& e : m.rho)
        if (!minplus_form(e)) return false;
    for (const auto& e : m.mu)
        if (e && !minplus_form(e)) return false;
    return true;
}

std::vector<int> reachable_states(const Cra& m) {
    std::vector<bool> seen(m.states.size(), false);
    std::vector<int> order;
    std::deque<int> todo{m.initial};
    seen[static_cast<size_t>(m.initial)] = true;
    while (!todo.empty()) {
        int q = todo.front();
        todo.pop_front();
        order.push_back(q);
        for (int a = 0; a < m.num_symbols(); ++a) {
            int q2 = m.next_state(q, a);
            if (!seen[static_cast<size_t>(q2)]) {
                seen[static_cast<size_t>(q2)] = true;
                todo.push_back(q2);
            }
        }
    }
    return order;
}

Cra prune_unreachable(const Cra& m) {
    auto order = reachable_states(m);
    if (order.size() == m.states.size()) return m;
    std::vector<int> remap(m.states.size(), -1);
    for (size_t i = 0; i < order.size(); ++i) remap[static_cast<size_t>(order[i])] = static_cast<int>(i);

    Cra out;
    out.grammar = m.grammar;
    out.alphabet = m.alphabet;
    out.registers = m.registers;
    out.init_values = m.init_values;
    size_t na = m.alphabet.size(), nr = m.registers.size();
    out.states.reserve(order.size());
    for (int q : order) out.states.push_back(m.states[static_cast<size_t>(q)]);
    out.initial = remap[static_cast<size_t>(m.initial)];
    out.delta.resize(order.size() * na);
    out.rho.resize(order.size() * na * nr);
    out.mu.resize(order.size());
    for (size_t i = 0; i < order.size(); ++i) {
        int q = order[i];
        out.mu[i] = m.mu[static_cast<size_t>(q)];
        for (size_t a = 0; a < na; ++a) {
            out.delta[i * na + a] = remap[static_cast<size_t>(m.next_state(q, static_cast<int>(a)))];
            for (size_t r = 0; r < nr; ++r)
                out.rho[(i * na + a) * nr + r] = m.update(q, static_cast<int>(a), static_cast<int>(r));
        }
    }
    return out;
}

}  // namespace cra
