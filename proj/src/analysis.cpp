#include "cra/analysis.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "cra/oracle.hpp"
#include "cra/semantics.hpp"
#include "cra/transforms.hpp"

namespace cra {

bool AffineEquationSystem::insert(std::vector<ExtRational> row) {
    if (row.size() != dim_) throw Error(Errc::Internal, "row dimension mismatch");
    for (const auto& base : rref_) {
        size_t pivot = 0;
        while (pivot < dim_ && base[pivot].is_zero()) ++pivot;
        if (pivot == dim_) continue;
        if (row[pivot].is_zero()) continue;
        ExtRational f = row[pivot];
        for (size_t i = pivot; i < dim_; ++i) row[i] -= f * base[i];
    }
    size_t pivot = 0;
    while (pivot < dim_ && row[pivot].is_zero()) ++pivot;
    if (pivot == dim_) return false;
    ExtRational lead = row[pivot];
    for (size_t i = pivot; i < dim_; ++i) row[i] /= lead;
    for (auto& base : rref_) {
        if (base[pivot].is_zero()) continue;
        ExtRational f = base[pivot];
        for (size_t i = pivot; i < dim_; ++i) base[i] -= f * row[i];
    }
    auto pos = std::find_if(rref_.begin(), rref_.end(), [&](const std::vector<ExtRational>& b) {
        size_t p = 0;
        while (p < dim_ && b[p].is_zero()) ++p;
        return p > pivot;
    });
    rref_.insert(pos, std::move(row));
    return true;
}

namespace {

struct ProductSpace {
    const Cra& m1;
    const Cra& m2;
    std::vector<int> sym2;                    // m1 symbol index -> m2 symbol index
    std::vector<std::pair<int, int>> states;  // product states, BFS order
    std::map<std::pair<int, int>, int> index;
    std::vector<std::pair<int, int>> parent;  // (pred product state, symbol), -1 at root
    std::vector<std::vector<std::pair<int, int>>> incoming;  // per state: (pred, symbol)

    ProductSpace(const Cra& a, const Cra& b) : m1(a), m2(b) {
        if (m1.alphabet.size() != m2.alphabet.size())
            throw Error(Errc::AlphabetMismatch, "machines must share an alphabet");
        sym2.resize(m1.alphabet.size());
        for (size_t i = 0; i < m1.alphabet.size(); ++i) {
            int j = m2.symbol_index(m1.alphabet[i]);
            if (j < 0) throw Error(Errc::AlphabetMismatch, "machines must share an alphabet");
            sym2[i] = j;
        }
        auto root = std::make_pair(m1.initial, m2.initial);
        states.push_back(root);
        index[root] = 0;
        parent.emplace_back(-1, -1);
        incoming.emplace_back();
        for (size_t i = 0; i < states.size(); ++i) {
            auto [q1, q2] = states[i];
            for (int a = 0; a < m1.num_symbols(); ++a) {
                auto next = std::make_pair(m1.next_state(q1, a), m2.next_state(q2, sym2[a]));
                auto [it, fresh] = index.emplace(next, static_cast<int>(states.size()));
                if (fresh) {
                    states.push_back(next);
                    parent.emplace_back(static_cast<int>(i), a);
                    incoming.emplace_back();
                }
                incoming[static_cast<size_t>(it->second)].emplace_back(static_cast<int>(i), a);
            }
        }
    }

    Word word_to(int s) const {
        Word w;
        while (parent[static_cast<size_t>(s)].first >= 0) {
            w.push_back(m1.alphabet[static_cast<size_t>(parent[static_cast<size_t>(s)].second)]);
            s = parent[static_cast<size_t>(s)].first;
        }
        std::reverse(w.begin(), w.end());
        return w;
    }
};

std::vector<ExtRational> affine_row(const AffineForm& f, size_t offset, size_t dim) {
    std::vector<ExtRational> row(dim, ExtRational(0));
    for (const auto& [r, c] : f.coeffs) row[offset + static_cast<size_t>(r)] = c;
    row[dim - 1] = f.constant;
    return row;
}

bool counterexample_checks(const Cra& m1, const Cra& m2, const Word& w) {
    EvalResult a = eval_cra(m1, w);
    EvalResult b = eval_cra(m2, w);
    if (a.defined() != b.defined()) return true;
    return a.defined() && !(*a.value == *b.value);
}

}  // namespace

EquivResult equiv_affine(const Cra& m1, const Cra& m2) {
    if (!check_linear(m1) || !check_linear(m2))
        throw Error(Errc::NotLinearForm, "equivalence needs affine machines");
    for (const Value& v : m1.init_values)
        if (v.pair || v.c.is_infinite())
            throw Error(Errc::UnsupportedConstants, "initial values must be finite scalars");
    for (const Value& v : m2.init_values)
        if (v.pair || v.c.is_infinite())
            throw Error(Errc::UnsupportedConstants, "initial values must be finite scalars");

    ProductSpace prod(m1, m2);
    size_t k1 = static_cast<size_t>(m1.num_registers());
    size_t k2 = static_cast<size_t>(m2.num_registers());
    size_t dim = k1 + k2 + 1;

    EquivStats stats;
    stats.product_states = static_cast<int>(prod.states.size());
    stats.variables = static_cast<int>(dim);

    // Output-domain comparison first: the machines must accept the same words.
    for (size_t s = 0; s < prod.states.size(); ++s) {
        auto [q1, q2] = prod.states[s];
        bool d1 = m1.output(q1) != nullptr, d2 = m2.output(q2) != nullptr;
        if (d1 != d2) {
            Word w = prod.word_to(static_cast<int>(s));
            if (!counterexample_checks(m1, m2, w))
                throw Error(Errc::Internal, "domain counterexample failed verification");
            return {EquivResult::Kind::Counterexample, std::move(w), stats};
        }
    }

    // Per-(product state, symbol) affine update of the combined registers,
    // homogenized: row v of the matrix expresses new value of variable v.
    auto update_matrix = [&](int s, int a) {
        auto [q1, q2] = prod.states[static_cast<size_t>(s)];
        std::vector<std::vector<ExtRational>> rows;
        rows.reserve(dim);
        for (size_t x = 0; x < k1; ++x)
            rows.push_back(affine_row(*affine_form(m1.update(q1, a, static_cast<int>(x))), 0, dim));
        for (size_t x = 0; x < k2; ++x)
            rows.push_back(affine_row(
                *affine_form(m2.update(q2, prod.sym2[static_cast<size_t>(a)], static_cast<int>(x))),
                k1, dim));
        std::vector<ExtRational> one(dim, ExtRational(0));
        one[dim - 1] = ExtRational(1);
        rows.push_back(std::move(one));
        return rows;
    };
    std::map<std::pair<int, int>, std::vector<std::vector<ExtRational>>> matrices;
    auto matrix_for = [&](int s, int a) -> const std::vector<std::vector<ExtRational>>& {
        auto key = std::make_pair(s, a);
        auto it = matrices.find(key);
        if (it == matrices.end()) it = matrices.emplace(key, update_matrix(s, a)).first;
        return it->second;
    };

    auto pullback = [&](const std::vector<ExtRational>& row,
                        const std::vector<std::vector<ExtRational>>& mat) {
        std::vector<ExtRational> out(dim, ExtRational(0));
        for (size_t v = 0; v < dim; ++v) {
            if (row[v].is_zero()) continue;
            for (size_t u = 0; u < dim; ++u) out[u] += row[v] * mat[v][u];
        }
        return out;
    };

    std::vector<ExtRational> v0(dim, ExtRational(0));
    for (size_t x = 0; x < k1; ++x) v0[x] = m1.init_values[x].c;
    for (size_t x = 0; x < k2; ++x) v0[k1 + x] = m2.init_values[x].c;
    v0[dim - 1] = ExtRational(1);
    auto eval_row = [&](const std::vector<ExtRational>& row) {
        ExtRational acc(0);
        for (size_t i = 0; i < dim; ++i) acc += row[i] * v0[i];
        return acc;
    };

    std::vector<AffineEquationSystem> span(prod.states.size(), AffineEquationSystem(dim));
    std::vector<std::vector<std::pair<std::vector<ExtRational>, Word>>> stored(prod.states.size());
    std::deque<std::pair<int, int>> worklist;  // (state, stored row index)
    std::optional<Word> counterexample;

    auto insert_row = [&](int s, std::vector<ExtRational> row, Word suffix) {
        if (counterexample) return;
        if (s == 0 && !eval_row(row).is_zero()) {  // falsified at the initial valuation
            counterexample = std::move(suffix);
            return;
        }
        if (!span[static_cast<size_t>(s)].insert(row)) return;
        stats.basis_insertions++;
        stored[static_cast<size_t>(s)].emplace_back(std::move(row), std::move(suffix));
        worklist.emplace_back(s, static_cast<int>(stored[static_cast<size_t>(s)].size()) - 1);
    };

    for (size_t s = 0; s < prod.states.size() && !counterexample; ++s) {
        auto [q1, q2] = prod.states[s];
        if (!m1.output(q1)) continue;
        auto f1 = affine_form(m1.output(q1));
        auto f2 = affine_form(m2.output(q2));
        std::vector<ExtRational> row = affine_row(*f1, 0, dim);
        std::vector<ExtRational> row2 = affine_row(*f2, k1, dim);
        for (size_t i = 0; i < dim; ++i) row[i] -= row2[i];
        insert_row(static_cast<int>(s), std::move(row), {});
    }

    while (!worklist.empty() && !counterexample) {
        auto [s, idx] = worklist.front();
        worklist.pop_front();
        auto item = stored[static_cast<size_t>(s)][static_cast<size_t>(idx)];
        for (auto [pred, a] : prod.incoming[static_cast<size_t>(s)]) {
            Word suffix;
            suffix.push_back(m1.alphabet[static_cast<size_t>(a)]);
            suffix.insert(suffix.end(), item.second.begin(), item.second.end());
            insert_row(pred, pullback(item.first, matrix_for(pred, a)), std::move(suffix));
            if (counterexample) break;
        }
    }

    if (counterexample) {
        if (!counterexample_checks(m1, m2, *counterexample))
            throw Error(Errc::Internal, "equivalence counterexample failed verification");
        return {EquivResult::Kind::Counterexample, std::move(*counterexample), stats};
    }
    return {EquivResult::Kind::Equivalent, {}, stats};
}

ContainsResult contains(const Cra& m1, const Cra& m2) {
    Cra d = diff_cra(m2, m1);
    SolveOutcome r;
    if (d.grammar == GrammarKind::PlusC) {
        r = mincost_inc(d);
    } else if (check_copyless(d).ok) {
        r = mincost_copyless_plus(d);
    } else {
        throw Error(Errc::GrammarMismatch,
                    "containment needs machines whose difference stays in increment form");
    }
    switch (r.kind) {
        case SolveOutcome::Kind::Empty:
            return {ContainsResult::Kind::Holds, {}, false};  // empty common domain
        case SolveOutcome::Kind::Finite: {
            if (r.value.sign() >= 0) return {ContainsResult::Kind::Holds, {}, false};
            EvalResult a = eval_cra(m1, r.witness);
            EvalResult b = eval_cra(m2, r.witness);
            if (!a.defined() || !b.defined() || !(*b.value < *a.value))
                throw Error(Errc::Internal, "containment witness failed verification");
            return {ContainsResult::Kind::Violation, std::move(r.witness), true};
        }
        case SolveOutcome::Kind::Unbounded: {
            // The difference diverges below; unroll the negative cycle for a
            // concrete violating word, then canonicalize it with a short
            // breadth-first scan when feasible.
            Cra d_inc = d.grammar == GrammarKind::PlusC ? d : copyless_plus_to_inc(d);
            auto unrolled = negative_cycle_word(d_inc);
            if (!unrolled) return {ContainsResult::Kind::Unbounded, {}, false};
            auto violates = [&](const Word& w) {
                EvalResult a = eval_cra(m1, w);
                EvalResult b = eval_cra(m2, w);
                return a.defined() && b.defined() && *b.value < *a.value;
            };
            if (!violates(*unrolled))
                throw Error(Errc::Internal, "cycle unrolling failed verification");
            Word witness = std::move(*unrolled);
            if (witness.size() > 1 && witness.size() <= 12) {
                std::optional<Word> shortest;
                for_each_word(m1.alphabet, static_cast<int>(witness.size()) - 1,
                              [&](const Word& w) {
                                  if (violates(w)) {
                                      shortest = w;
                                      return false;
                                  }
                                  return true;
                              });
                if (shortest) witness = std::move(*shortest);
            }
            return {ContainsResult::Kind::Violation, std::move(witness), true};
        }
    }
    throw Error(Errc::Internal, "unreachable");
}

namespace {

struct ZeroSearchGraph {
    int n = 0;
    int source = 0;
    int target = 0;
    struct Edge {
        int from, to;
        ExtRational cost;  // integer
        Symbol label;
    };
    std::vector<Edge> edges;
};

// Minimum cycle mean over cycles reachable from the source (Karp); nullopt
// when the reachable subgraph is acyclic.
std::optional<ExtRational> min_cycle_mean(const ZeroSearchGraph& g) {
    int n = g.n;
    std::vector<std::vector<std::optional<ExtRational>>> d(
        static_cast<size_t>(n + 1),
        std::vector<std::optional<ExtRational>>(static_cast<size_t>(n)));
    d[0][static_cast<size_t>(g.source)] = ExtRational(0);
    for (int k = 1; k <= n; ++k)
        for (const auto& e : g.edges) {
            const auto& base = d[static_cast<size_t>(k - 1)][static_cast<size_t>(e.from)];
            if (!base) continue;
            ExtRational cand = *base + e.cost;
            auto& slot = d[static_cast<size_t>(k)][static_cast<size_t>(e.to)];
            if (!slot || cand < *slot) slot = cand;
        }
    std::optional<ExtRational> mu;
    for (int v = 0; v < n; ++v) {
        const auto& dn = d[static_cast<size_t>(n)][static_cast<size_t>(v)];
        if (!dn) continue;
        std::optional<ExtRational> worst;
        for (int k = 0; k < n; ++k) {
            const auto& dk = d[static_cast<size_t>(k)][static_cast<size_t>(v)];
            if (!dk) continue;
            ExtRational ratio = (*dn - *dk) / ExtRational(n - k);
            if (!worst || *worst < ratio) worst = ratio;
        }
        if (!worst) continue;
        if (!mu || *worst < *mu) mu = worst;
    }
    return mu;
}

}  // namespace

RangeResult in_range(const Cra& m, const ExtRational& k) {
    if (!k.is_finite() || !k.is_integer())
        return {RangeResult::Kind::No, {}, "target is not an integer"};

    // m - k as an increment machine.
    CraBuilder cb(m.grammar == GrammarKind::PlusC ? GrammarKind::PlusC : GrammarKind::Plus,
                  m.alphabet);
    int q0 = cb.add_state("q0");
    cb.set_initial(q0);
    for (const auto& a : m.alphabet) cb.set_transition(q0, a, q0);
    cb.set_output(q0, Expr::constant(k));
    Cra constk = cb.finish();
    Cra d = diff_cra(m, constk);
    if (d.grammar != GrammarKind::PlusC) {
        if (!check_copyless(d).ok)
            return {RangeResult::Kind::Inconclusive, {}, "difference is not in increment form"};
        d = copyless_plus_to_inc(d);
    }
    WeightedAutomaton wa = inc_to_single_valued_wa(d);

    ZeroSearchGraph g;
    g.n = wa.num_states() + 2;
    g.source = wa.num_states();
    g.target = wa.num_states() + 1;
    ExtRational maxabs(0);
    auto note_cost = [&](const ExtRational& c) {
        if (!c.is_integer()) throw Error(Errc::ValidationError, "range search needs integer costs");
        ExtRational a = c.sign() < 0 ? -c : c;
        if (maxabs < a) maxabs = a;
    };
    for (int q = 0; q < wa.num_states(); ++q) {
        const auto& iw = wa.initial_weights[static_cast<size_t>(q)];
        if (iw && iw->is_finite()) {
            note_cost(*iw);
            g.edges.push_back({g.source, q, *iw, ""});
        }
        const auto& fw = wa.final_weights[static_cast<size_t>(q)];
        if (fw && fw->is_finite()) {
            note_cost(*fw);
            g.edges.push_back({q, g.target, *fw, ""});
        }
    }
    for (const auto& t : wa.transitions) {
        note_cost(t.cost);
        g.edges.push_back({t.from, t.to, t.cost, wa.alphabet[static_cast<size_t>(t.symbol)]});
    }
    std::stable_sort(g.edges.begin(), g.edges.end(), [](const auto& a, const auto& b) {
        return std::tie(a.from, a.label, a.to) < std::tie(b.from, b.label, b.to);
    });

    // Window wide enough that with strictly signed cycles an escape can
    // never dip back across zero: 2nW covers one simple path plus one
    // partial cycle.
    ExtRational window = ExtRational(2) * ExtRational(g.n) * (maxabs + ExtRational(1));
    ExtRational lo = -window, hi = window;

    struct Config {
        int v;
        ExtRational val;
        bool operator<(const Config& o) const {
            return v != o.v ? v < o.v : val < o.val;
        }
    };
    std::map<Config, std::pair<Config, int>> parent;  // config -> (pred, edge)
    std::deque<Config> todo;
    Config start{g.source, ExtRational(0)};
    parent.emplace(start, std::make_pair(start, -1));
    todo.push_back(start);
    std::vector<std::vector<int>> out_edges(static_cast<size_t>(g.n));
    for (size_t i = 0; i < g.edges.size(); ++i)
        out_edges[static_cast<size_t>(g.edges[i].from)].push_back(static_cast<int>(i));

    bool escaped_above = false, escaped_below = false;
    std::optional<Config> hit;
    while (!todo.empty() && !hit) {
        Config c = todo.front();
        todo.pop_front();
        for (int ei : out_edges[static_cast<size_t>(c.v)]) {
            const auto& e = g.edges[static_cast<size_t>(ei)];
            Config next{e.to, c.val + e.cost};
            if (next.v == g.target) {
                if (next.val.is_zero()) {
                    parent.emplace(next, std::make_pair(c, ei));
                    hit = next;
                    break;
                }
                continue;
            }
            if (hi < next.val) {
                escaped_above = true;
                continue;
            }
            if (next.val < lo) {
                escaped_below = true;
                continue;
            }
            if (parent.emplace(next, std::make_pair(c, ei)).second) todo.push_back(next);
        }
    }

    if (hit) {
        Word w;
        Config c = *hit;
        while (true) {
            auto [pred, ei] = parent.at(c);
            if (ei < 0) break;
            const auto& e = g.edges[static_cast<size_t>(ei)];
            if (!e.label.empty()) w.push_back(e.label);
            c = pred;
        }
        std::reverse(w.begin(), w.end());
        EvalResult check = eval_cra(m, w);
        if (!check.defined() || !(*check.value == k))
            throw Error(Errc::Internal, "range witness failed verification");
        return {RangeResult::Kind::Yes, std::move(w), ""};
    }

    std::ostringstream note;
    note << "window [" << lo.str() << ", " << hi.str() << "]";
    if (!escaped_above && !escaped_below) return {RangeResult::Kind::No, {}, note.str()};

    auto mu_min = min_cycle_mean(g);
    bool cycles_positive = !mu_min || mu_min->sign() > 0;
    ZeroSearchGraph neg = g;
    for (auto& e : neg.edges) e.cost = -e.cost;
    auto mu_neg = min_cycle_mean(neg);
    bool cycles_negative = !mu_neg || mu_neg->sign() > 0;

    if (escaped_above && !escaped_below && cycles_positive)
        return {RangeResult::Kind::No, {}, note.str() + ", cycles strictly positive"};
    if (escaped_below && !escaped_above && cycles_negative)
        return {RangeResult::Kind::No, {}, note.str() + ", cycles strictly negative"};
    return {RangeResult::Kind::Inconclusive, {}, note.str()};
}

}  // namespace cra
