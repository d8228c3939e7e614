#include "cra/mincost.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <queue>
#include <set>

#include "cra/semantics.hpp"
#include "cra/transforms.hpp"

namespace cra {

namespace {

std::vector<bool> forward_closure(int n, const std::vector<std::pair<int, int>>& arcs,
                                  std::vector<bool> seen) {
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    for (auto [u, v] : arcs) adj[static_cast<size_t>(u)].push_back(v);
    std::deque<int> todo;
    for (int v = 0; v < n; ++v)
        if (seen[static_cast<size_t>(v)]) todo.push_back(v);
    while (!todo.empty()) {
        int v = todo.front();
        todo.pop_front();
        for (int u : adj[static_cast<size_t>(v)])
            if (!seen[static_cast<size_t>(u)]) {
                seen[static_cast<size_t>(u)] = true;
                todo.push_back(u);
            }
    }
    return seen;
}

// ---------------------------------------------------------------------------
// Plain shortest path over labeled graphs (used by the additive solvers).

struct SpEdge {
    int from;
    int to;
    ExtRational cost;
    Symbol label;
};

struct SpGraph {
    int n = 0;
    int source = 0;
    int target = 0;
    std::vector<SpEdge> edges;
};

struct SpResult {
    enum class Kind { Finite, NegCycle, NoPath } kind;
    ExtRational value;
    Word word;
    std::optional<Word> negative_word;  // NegCycle: concrete word with value < 0
};

using Dist = std::optional<ExtRational>;  // nullopt = unreachable

bool improves(const Dist& cand, const Dist& cur) {
    if (!cand) return false;
    return !cur || *cand < *cur;
}

SpResult solve_shortest_path(SpGraph g) {
    // Keep only vertices on some source-target walk.
    std::vector<std::pair<int, int>> fwd, bwd;
    for (const auto& e : g.edges) {
        fwd.emplace_back(e.from, e.to);
        bwd.emplace_back(e.to, e.from);
    }
    std::vector<bool> seed_s(static_cast<size_t>(g.n), false),
        seed_t(static_cast<size_t>(g.n), false);
    seed_s[static_cast<size_t>(g.source)] = true;
    seed_t[static_cast<size_t>(g.target)] = true;
    auto from_s = forward_closure(g.n, fwd, seed_s);
    auto to_t = forward_closure(g.n, bwd, seed_t);
    std::vector<bool> live(static_cast<size_t>(g.n));
    for (int v = 0; v < g.n; ++v)
        live[static_cast<size_t>(v)] = from_s[static_cast<size_t>(v)] && to_t[static_cast<size_t>(v)];
    if (!live[static_cast<size_t>(g.target)] || !live[static_cast<size_t>(g.source)])
        return {SpResult::Kind::NoPath, ExtRational(0), {}, std::nullopt};

    std::vector<int> order(g.edges.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const SpEdge& ea = g.edges[static_cast<size_t>(a)];
        const SpEdge& eb = g.edges[static_cast<size_t>(b)];
        return std::tie(ea.from, ea.label, ea.to) < std::tie(eb.from, eb.label, eb.to);
    });

    bool nonneg = std::all_of(g.edges.begin(), g.edges.end(),
                              [](const SpEdge& e) { return e.cost.sign() >= 0; });

    if (nonneg) {
        // Dijkstra with parent edges; deterministic by (dist, vertex).
        std::vector<Dist> dist(static_cast<size_t>(g.n));
        std::vector<int> parent(static_cast<size_t>(g.n), -1);
        std::vector<bool> done(static_cast<size_t>(g.n), false);
        dist[static_cast<size_t>(g.source)] = ExtRational(0);
        std::vector<std::vector<int>> out_edges(static_cast<size_t>(g.n));
        for (int i : order) {
            const SpEdge& e = g.edges[static_cast<size_t>(i)];
            if (live[static_cast<size_t>(e.from)] && live[static_cast<size_t>(e.to)])
                out_edges[static_cast<size_t>(e.from)].push_back(i);
        }
        for (;;) {
            int best = -1;
            for (int v = 0; v < g.n; ++v) {
                if (done[static_cast<size_t>(v)] || !dist[static_cast<size_t>(v)]) continue;
                if (best < 0 || *dist[static_cast<size_t>(v)] < *dist[static_cast<size_t>(best)])
                    best = v;
            }
            if (best < 0) break;
            done[static_cast<size_t>(best)] = true;
            for (int i : out_edges[static_cast<size_t>(best)]) {
                const SpEdge& e = g.edges[static_cast<size_t>(i)];
                Dist cand = *dist[static_cast<size_t>(best)] + e.cost;
                if (improves(cand, dist[static_cast<size_t>(e.to)])) {
                    dist[static_cast<size_t>(e.to)] = cand;
                    parent[static_cast<size_t>(e.to)] = i;
                }
            }
        }
        if (!dist[static_cast<size_t>(g.target)])
            return {SpResult::Kind::NoPath, ExtRational(0), {}, std::nullopt};
        Word word;
        for (int v = g.target; v != g.source;) {
            const SpEdge& e = g.edges[static_cast<size_t>(parent[static_cast<size_t>(v)])];
            if (!e.label.empty()) word.push_back(e.label);
            v = e.from;
        }
        std::reverse(word.begin(), word.end());
        return {SpResult::Kind::Finite, *dist[static_cast<size_t>(g.target)], std::move(word),
                std::nullopt};
    }

    // Bellman-Ford keeping the whole round table for witness reconstruction.
    int n_live = 0;
    for (int v = 0; v < g.n; ++v) n_live += live[static_cast<size_t>(v)] ? 1 : 0;
    int rounds = std::max(1, n_live - 1);
    std::vector<std::vector<Dist>> table(static_cast<size_t>(rounds + 2),
                                         std::vector<Dist>(static_cast<size_t>(g.n)));
    std::vector<std::vector<int>> pred(static_cast<size_t>(rounds + 2),
                                       std::vector<int>(static_cast<size_t>(g.n), -1));
    table[0][static_cast<size_t>(g.source)] = ExtRational(0);
    for (int i = 1; i <= rounds + 1; ++i) {
        table[static_cast<size_t>(i)] = table[static_cast<size_t>(i - 1)];
        for (int ei : order) {
            const SpEdge& e = g.edges[static_cast<size_t>(ei)];
            if (!live[static_cast<size_t>(e.from)] || !live[static_cast<size_t>(e.to)]) continue;
            const Dist& base = table[static_cast<size_t>(i - 1)][static_cast<size_t>(e.from)];
            if (!base) continue;
            Dist cand = *base + e.cost;
            if (improves(cand, table[static_cast<size_t>(i)][static_cast<size_t>(e.to)])) {
                table[static_cast<size_t>(i)][static_cast<size_t>(e.to)] = cand;
                pred[static_cast<size_t>(i)][static_cast<size_t>(e.to)] = ei;
            }
        }
    }

    int improved = -1;
    for (int v = 0; v < g.n && improved < 0; ++v)
        if (live[static_cast<size_t>(v)] &&
            improves(table[static_cast<size_t>(rounds + 1)][static_cast<size_t>(v)],
                     table[static_cast<size_t>(rounds)][static_cast<size_t>(v)]))
            improved = v;

    if (improved >= 0) {
        // Locate a vertex on the improving cycle by following predecessors.
        std::vector<int> chain_v;
        std::vector<int> chain_e;
        int round = rounds + 1, v = improved;
        while (round > 0) {
            int ei = pred[static_cast<size_t>(round)][static_cast<size_t>(v)];
            if (ei < 0) {
                --round;
                continue;
            }
            chain_v.push_back(v);
            chain_e.push_back(ei);
            v = g.edges[static_cast<size_t>(ei)].from;
            --round;
        }
        std::reverse(chain_v.begin(), chain_v.end());
        std::reverse(chain_e.begin(), chain_e.end());
        // chain: source -> ... -> improved; find a repeated vertex.
        std::map<int, size_t> first_pos;
        std::vector<int> verts{g.source};
        for (int ei : chain_e) verts.push_back(g.edges[static_cast<size_t>(ei)].to);
        size_t cyc_a = 0, cyc_b = 0;
        bool found = false;
        for (size_t i = 0; i < verts.size() && !found; ++i) {
            auto [it, fresh] = first_pos.emplace(verts[i], i);
            if (!fresh) {
                cyc_a = it->second;
                cyc_b = i;
                found = true;
            }
        }
        std::optional<Word> neg_word;
        if (found) {
            ExtRational cyc_cost(0);
            Word pre, cyc, post;
            for (size_t i = 0; i < chain_e.size(); ++i) {
                const SpEdge& e = g.edges[static_cast<size_t>(chain_e[i])];
                Word& tgt = i < cyc_a ? pre : (i < cyc_b ? cyc : post);
                if (!e.label.empty()) tgt.push_back(e.label);
                if (i >= cyc_a && i < cyc_b) cyc_cost += e.cost;
            }
            if (cyc_cost.sign() < 0) {
                // Suffix: cheapest continuation improved -> target.
                ExtRational walk_cost = *table[static_cast<size_t>(rounds + 1)]
                                               [static_cast<size_t>(improved)];
                SpGraph back = g;
                back.source = improved;
                // Cheap bound: rounds-limited best value improved -> target.
                std::vector<Dist> dt(static_cast<size_t>(g.n));
                std::vector<int> dt_pred(static_cast<size_t>(g.n), -1);
                dt[static_cast<size_t>(improved)] = ExtRational(0);
                std::vector<std::vector<Dist>> bt(static_cast<size_t>(rounds + 1),
                                                  std::vector<Dist>(static_cast<size_t>(g.n)));
                std::vector<std::vector<int>> bp(static_cast<size_t>(rounds + 1),
                                                 std::vector<int>(static_cast<size_t>(g.n), -1));
                bt[0][static_cast<size_t>(improved)] = ExtRational(0);
                for (int i = 1; i <= rounds; ++i) {
                    bt[static_cast<size_t>(i)] = bt[static_cast<size_t>(i - 1)];
                    for (int ei : order) {
                        const SpEdge& e = g.edges[static_cast<size_t>(ei)];
                        if (!live[static_cast<size_t>(e.from)] || !live[static_cast<size_t>(e.to)])
                            continue;
                        const Dist& base = bt[static_cast<size_t>(i - 1)][static_cast<size_t>(e.from)];
                        if (!base) continue;
                        Dist cand = *base + e.cost;
                        if (improves(cand, bt[static_cast<size_t>(i)][static_cast<size_t>(e.to)])) {
                            bt[static_cast<size_t>(i)][static_cast<size_t>(e.to)] = cand;
                            bp[static_cast<size_t>(i)][static_cast<size_t>(e.to)] = ei;
                        }
                    }
                }
                const Dist& suffix = bt[static_cast<size_t>(rounds)][static_cast<size_t>(g.target)];
                if (suffix) {
                    Word suf;
                    int round2 = rounds, v2 = g.target;
                    std::vector<Symbol> rev;
                    while (round2 > 0) {
                        int ei = bp[static_cast<size_t>(round2)][static_cast<size_t>(v2)];
                        if (ei < 0) {
                            --round2;
                            continue;
                        }
                        const SpEdge& e = g.edges[static_cast<size_t>(ei)];
                        if (!e.label.empty()) rev.push_back(e.label);
                        v2 = e.from;
                        --round2;
                    }
                    suf.insert(suf.end(), rev.rbegin(), rev.rend());

                    // total(j) = walk_cost + j*cyc_cost + suffix; pick j making it negative.
                    ExtRational need = walk_cost + *suffix;
                    long j = 0;
                    ExtRational total = need;
                    while (total.sign() >= 0) {
                        ++j;
                        total += cyc_cost;
                    }
                    Word w;
                    w.insert(w.end(), pre.begin(), pre.end());
                    for (long i = 0; i <= j; ++i) w.insert(w.end(), cyc.begin(), cyc.end());
                    w.insert(w.end(), post.begin(), post.end());
                    w.insert(w.end(), suf.begin(), suf.end());
                    neg_word = std::move(w);
                }
            }
        }
        return {SpResult::Kind::NegCycle, ExtRational(0), {}, std::move(neg_word)};
    }

    const Dist& best = table[static_cast<size_t>(rounds)][static_cast<size_t>(g.target)];
    if (!best) return {SpResult::Kind::NoPath, ExtRational(0), {}, std::nullopt};
    // Reconstruct a witness with the round-indexed table (budgeted, so zero
    // cycles cannot loop the reconstruction).
    Word word;
    int round = rounds, v = g.target;
    std::vector<Symbol> rev;
    while (round > 0) {
        int ei = pred[static_cast<size_t>(round)][static_cast<size_t>(v)];
        if (ei < 0) {
            --round;
            continue;
        }
        const SpEdge& e = g.edges[static_cast<size_t>(ei)];
        if (!e.label.empty()) rev.push_back(e.label);
        v = e.from;
        --round;
    }
    word.insert(word.end(), rev.rbegin(), rev.rend());
    return {SpResult::Kind::Finite, *best, std::move(word), std::nullopt};
}

// Shared graph building: virtual source/target around a weighted automaton.
// Infinite weights cannot participate in a minimum and are dropped here.
SpGraph wa_shortest_path_graph(const WeightedAutomaton& wa) {
    SpGraph g;
    int n = wa.num_states();
    g.n = n + 2;
    g.source = n;
    g.target = n + 1;
    for (int q = 0; q < n; ++q) {
        const auto& iw = wa.initial_weights[static_cast<size_t>(q)];
        if (iw && iw->is_finite()) g.edges.push_back({g.source, q, *iw, ""});
        const auto& fw = wa.final_weights[static_cast<size_t>(q)];
        if (fw && fw->is_finite()) g.edges.push_back({q, g.target, *fw, ""});
    }
    for (const auto& t : wa.transitions)
        if (t.cost.is_finite())
            g.edges.push_back({t.from, t.to, t.cost, wa.alphabet[static_cast<size_t>(t.symbol)]});
    return g;
}

SolveOutcome verify_witness(const Cra& m, const ExtRational& value, Word word) {
    EvalResult check = eval_cra(m, word);
    if (!check.defined() || !(*check.value == value))
        throw Error(Errc::Internal, "solver witness failed re-evaluation");
    return SolveOutcome::finite(value, std::move(word));
}

SolveOutcome mincost_over_wa(const WeightedAutomaton& wa, const Cra& source_machine) {
    SpResult r = solve_shortest_path(wa_shortest_path_graph(wa));
    switch (r.kind) {
        case SpResult::Kind::NoPath:
            return SolveOutcome::empty();
        case SpResult::Kind::NegCycle:
            return SolveOutcome::unbounded();
        case SpResult::Kind::Finite:
            return verify_witness(source_machine, r.value, std::move(r.word));
    }
    throw Error(Errc::Internal, "unreachable");
}

}  // namespace

SolveOutcome mincost_inc(const Cra& m) {
    return mincost_over_wa(inc_to_single_valued_wa(m), m);
}

std::optional<Word> negative_cycle_word(const Cra& m) {
    SpResult r = solve_shortest_path(wa_shortest_path_graph(inc_to_single_valued_wa(m)));
    if (r.kind != SpResult::Kind::NegCycle) return std::nullopt;
    return r.negative_word;
}

SolveOutcome mincost_copyless_plus(const Cra& m) {
    return mincost_over_wa(inc_to_single_valued_wa(copyless_plus_to_inc(m)), m);
}

SolveOutcome mincost_minplus(const Cra& m) {
    if (m.grammar != GrammarKind::MinPlusC && m.grammar != GrammarKind::PlusC)
        throw Error(Errc::GrammarMismatch, "solver needs a min-plus machine");
    if (!check_minplus_linear(m))
        throw Error(Errc::NotLinearForm, "updates are not min-plus linear");
    return mincost_over_wa(cra_to_wa(m), m);
}

// ---------------------------------------------------------------------------
// Generalized shortest paths.

namespace {

struct GspPrep {
    std::vector<bool> live;
    std::vector<int> edge_order;                  // deterministic iteration
    std::vector<std::vector<int>> out_edges;      // per vertex, live only
};

GspPrep gsp_prepare(const CostGraph& g) {
    for (const auto& e : g.edges) {
        if (e.cost.is_infinite() || e.cost.sign() < 0)
            throw Error(Errc::InvalidEdge, "edge cost must be a finite nonnegative rational");
        if (e.weight.is_infinite() || e.weight.sign() < 0 || ExtRational(1) < e.weight)
            throw Error(Errc::InvalidEdge, "edge weight must lie in [0, 1]");
    }
    GspPrep p;
    std::vector<std::pair<int, int>> fwd, bwd;
    for (const auto& e : g.edges) {
        fwd.emplace_back(e.from, e.to);
        bwd.emplace_back(e.to, e.from);
    }
    std::vector<bool> seed_s(static_cast<size_t>(g.vertices), false),
        seed_t(static_cast<size_t>(g.vertices), false);
    seed_s[static_cast<size_t>(g.source)] = true;
    seed_t[static_cast<size_t>(g.target)] = true;
    auto from_s = forward_closure(g.vertices, fwd, seed_s);
    auto to_t = forward_closure(g.vertices, bwd, seed_t);
    p.live.resize(static_cast<size_t>(g.vertices));
    for (int v = 0; v < g.vertices; ++v)
        p.live[static_cast<size_t>(v)] =
            from_s[static_cast<size_t>(v)] && to_t[static_cast<size_t>(v)];

    p.edge_order.resize(g.edges.size());
    for (size_t i = 0; i < g.edges.size(); ++i) p.edge_order[i] = static_cast<int>(i);
    std::stable_sort(p.edge_order.begin(), p.edge_order.end(), [&](int a, int b) {
        const auto& ea = g.edges[static_cast<size_t>(a)];
        const auto& eb = g.edges[static_cast<size_t>(b)];
        return std::tie(ea.from, ea.label, ea.to) < std::tie(eb.from, eb.label, eb.to);
    });
    p.out_edges.resize(static_cast<size_t>(g.vertices));
    for (int i : p.edge_order) {
        const auto& e = g.edges[static_cast<size_t>(i)];
        if (p.live[static_cast<size_t>(e.from)] && p.live[static_cast<size_t>(e.to)])
            p.out_edges[static_cast<size_t>(e.from)].push_back(i);
    }
    return p;
}

Dist gsp_step(const CostGraphEdge& e, const Dist& downstream) {
    if (!downstream) return std::nullopt;
    return e.cost + e.weight * *downstream;
}

}  // namespace

GspResult generalized_shortest_path(const CostGraph& g, const ExtRational& epsilon) {
    if (epsilon.sign() <= 0) throw Error(Errc::ValidationError, "epsilon must be positive");
    if (g.source == g.target) return {GspResult::Kind::Finite, ExtRational(0), {}};
    GspPrep p = gsp_prepare(g);
    if (!p.live[static_cast<size_t>(g.source)])
        return {GspResult::Kind::NoPath, ExtRational(0), {}};

    // Value table V_k(v) = min over walks v -> target with <= k edges.
    int n_live = 0;
    for (bool b : p.live) n_live += b ? 1 : 0;
    int rounds = std::max(1, n_live - 1);
    std::vector<std::vector<Dist>> table(static_cast<size_t>(rounds + 1),
                                         std::vector<Dist>(static_cast<size_t>(g.vertices)));
    table[0][static_cast<size_t>(g.target)] = ExtRational(0);
    bool stable_round = false;
    for (int k = 1; k <= rounds && !stable_round; ++k) {
        table[static_cast<size_t>(k)] = table[static_cast<size_t>(k - 1)];
        bool changed = false;
        for (int v = 0; v < g.vertices; ++v) {
            if (!p.live[static_cast<size_t>(v)] || v == g.target) continue;
            for (int ei : p.out_edges[static_cast<size_t>(v)]) {
                const auto& e = g.edges[static_cast<size_t>(ei)];
                Dist cand = gsp_step(e, table[static_cast<size_t>(k - 1)][static_cast<size_t>(e.to)]);
                if (improves(cand, table[static_cast<size_t>(k)][static_cast<size_t>(v)])) {
                    table[static_cast<size_t>(k)][static_cast<size_t>(v)] = cand;
                    changed = true;
                }
            }
        }
        if (!changed) {
            // Early fixpoint: pad remaining rounds.
            for (int k2 = k + 1; k2 <= rounds; ++k2)
                table[static_cast<size_t>(k2)] = table[static_cast<size_t>(k)];
            stable_round = true;
        }
    }
    const Dist& bounded = table[static_cast<size_t>(rounds)][static_cast<size_t>(g.source)];

    // Exact fixpoint by policy iteration; policies are evaluated with
    // weight-1 cycles worth +infinity and weight<1 cycles at their limit.
    std::vector<int> policy(static_cast<size_t>(g.vertices), -1);
    {
        // Start from a shortest-hop tree toward the target.
        std::vector<std::vector<std::pair<int, int>>> in_edges(static_cast<size_t>(g.vertices));
        for (int i : p.edge_order) {
            const auto& e = g.edges[static_cast<size_t>(i)];
            if (p.live[static_cast<size_t>(e.from)] && p.live[static_cast<size_t>(e.to)])
                in_edges[static_cast<size_t>(e.to)].emplace_back(e.from, i);
        }
        std::deque<int> todo{g.target};
        std::vector<bool> seen(static_cast<size_t>(g.vertices), false);
        seen[static_cast<size_t>(g.target)] = true;
        while (!todo.empty()) {
            int v = todo.front();
            todo.pop_front();
            for (auto [u, ei] : in_edges[static_cast<size_t>(v)]) {
                if (seen[static_cast<size_t>(u)]) continue;
                seen[static_cast<size_t>(u)] = true;
                policy[static_cast<size_t>(u)] = ei;
                todo.push_back(u);
            }
        }
    }

    std::vector<Dist> val(static_cast<size_t>(g.vertices));
    auto evaluate_policy = [&]() {
        std::fill(val.begin(), val.end(), std::nullopt);
        val[static_cast<size_t>(g.target)] = ExtRational(0);
        std::vector<int> state(static_cast<size_t>(g.vertices), 0);  // 0 new, 1 open, 2 done
        state[static_cast<size_t>(g.target)] = 2;
        for (int start = 0; start < g.vertices; ++start) {
            if (!p.live[static_cast<size_t>(start)] || state[static_cast<size_t>(start)] != 0)
                continue;
            std::vector<int> chain;
            int v = start;
            while (state[static_cast<size_t>(v)] == 0) {
                state[static_cast<size_t>(v)] = 1;
                chain.push_back(v);
                int ei = policy[static_cast<size_t>(v)];
                if (ei < 0) break;
                v = g.edges[static_cast<size_t>(ei)].to;
            }
            if (state[static_cast<size_t>(v)] == 1) {
                // Policy cycle starting at v: accumulate one lap.
                std::vector<int> cyc_edges;
                int u = v;
                do {
                    int ei = policy[static_cast<size_t>(u)];
                    cyc_edges.push_back(ei);
                    u = g.edges[static_cast<size_t>(ei)].to;
                } while (u != v);
                ExtRational lapA(0), lapB(1);
                for (auto it = cyc_edges.rbegin(); it != cyc_edges.rend(); ++it) {
                    const auto& e = g.edges[static_cast<size_t>(*it)];
                    lapA = e.cost + e.weight * lapA;
                    lapB = e.weight * lapB;
                }
                if (lapB == ExtRational(1)) {
                    // Weight-1 policy cycle never reaches the target.
                    int w = v;
                    do {
                        val[static_cast<size_t>(w)] = std::nullopt;
                        state[static_cast<size_t>(w)] = 2;
                        w = g.edges[static_cast<size_t>(policy[static_cast<size_t>(w)])].to;
                    } while (w != v);
                } else {
                    ExtRational vstart = lapA / (ExtRational(1) - lapB);
                    val[static_cast<size_t>(v)] = vstart;
                    state[static_cast<size_t>(v)] = 2;
                    // Fill the rest of the cycle backward from v.
                    for (size_t i = cyc_edges.size(); i-- > 1;) {
                        // value at cycle vertex i: fold edges i..end of the lap,
                        // then the known value at the cycle head.
                        ExtRational a(0), bweight(1);
                        for (size_t j = cyc_edges.size(); j-- > i;) {
                            const auto& e = g.edges[static_cast<size_t>(cyc_edges[j])];
                            a = e.cost + e.weight * a;
                            bweight = e.weight * bweight;
                        }
                        int vert = g.edges[static_cast<size_t>(cyc_edges[i - 1])].to;
                        val[static_cast<size_t>(vert)] = a + bweight * vstart;
                        state[static_cast<size_t>(vert)] = 2;
                    }
                }
            }
            // Unwind the entry chain.
            for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
                int u = *it;
                if (state[static_cast<size_t>(u)] == 2) continue;
                int ei = policy[static_cast<size_t>(u)];
                val[static_cast<size_t>(u)] =
                    ei < 0 ? std::nullopt
                           : gsp_step(g.edges[static_cast<size_t>(ei)],
                                      val[static_cast<size_t>(g.edges[static_cast<size_t>(ei)].to)]);
                state[static_cast<size_t>(u)] = 2;
            }
        }
    };

    evaluate_policy();
    int guard = 0;
    const int guard_max = 4 * (n_live + 2) * (n_live + 2) + 64;
    for (;;) {
        if (++guard > guard_max) throw Error(Errc::Internal, "policy iteration did not settle");
        bool changed = false;
        for (int v = 0; v < g.vertices; ++v) {
            if (!p.live[static_cast<size_t>(v)] || v == g.target) continue;
            Dist cur = val[static_cast<size_t>(v)];
            int best_edge = policy[static_cast<size_t>(v)];
            for (int ei : p.out_edges[static_cast<size_t>(v)]) {
                Dist cand = gsp_step(g.edges[static_cast<size_t>(ei)],
                                     val[static_cast<size_t>(g.edges[static_cast<size_t>(ei)].to)]);
                if (improves(cand, cur)) {
                    cur = cand;
                    best_edge = ei;
                    changed = true;
                }
            }
            policy[static_cast<size_t>(v)] = best_edge;
        }
        if (!changed) break;
        evaluate_policy();
    }
    // The settled values must solve the min-recursion exactly.
    for (int v = 0; v < g.vertices; ++v) {
        if (!p.live[static_cast<size_t>(v)] || v == g.target) continue;
        Dist best;
        for (int ei : p.out_edges[static_cast<size_t>(v)]) {
            Dist cand = gsp_step(g.edges[static_cast<size_t>(ei)],
                                 val[static_cast<size_t>(g.edges[static_cast<size_t>(ei)].to)]);
            if (improves(cand, best)) best = cand;
        }
        bool same = (!best && !val[static_cast<size_t>(v)]) ||
                    (best && val[static_cast<size_t>(v)] && *best == *val[static_cast<size_t>(v)]);
        if (!same) throw Error(Errc::Internal, "fixpoint residual nonzero");
    }

    const Dist& fix = val[static_cast<size_t>(g.source)];
    if (!fix && !bounded) return {GspResult::Kind::NoPath, ExtRational(0), {}};
    if (!fix || !bounded) throw Error(Errc::Internal, "fixpoint/table reachability mismatch");

    if (*bounded == *fix) {
        // Attained: reconstruct a witness from the round-indexed table.
        std::vector<int> path;
        int v = g.source, k = rounds;
        while (v != g.target) {
            if (k <= 0) throw Error(Errc::Internal, "witness reconstruction ran out of budget");
            const Dist& here = table[static_cast<size_t>(k)][static_cast<size_t>(v)];
            if (table[static_cast<size_t>(k - 1)][static_cast<size_t>(v)] &&
                *table[static_cast<size_t>(k - 1)][static_cast<size_t>(v)] == *here) {
                --k;
                continue;
            }
            bool stepped = false;
            for (int ei : p.out_edges[static_cast<size_t>(v)]) {
                const auto& e = g.edges[static_cast<size_t>(ei)];
                Dist cand = gsp_step(e, table[static_cast<size_t>(k - 1)][static_cast<size_t>(e.to)]);
                if (cand && *cand == *here) {
                    path.push_back(ei);
                    v = e.to;
                    --k;
                    stepped = true;
                    break;
                }
            }
            if (!stepped) throw Error(Errc::Internal, "witness reconstruction lost the path");
        }
        return {GspResult::Kind::Finite, *fix, std::move(path)};
    }
    return {GspResult::Kind::Unbounded, *fix, {}};
}

// ---------------------------------------------------------------------------
// Discounted solvers.

namespace {

struct ScaledForm {  // d * x + c, register optional
    std::optional<RegIdx> reg;
    ExtRational factor{1};
    ExtRational constant{0};
};

ScaledForm past_form(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::Const:
            return {std::nullopt, ExtRational(1), e->k1};
        case ExprKind::Reg:
            return {e->reg, ExtRational(1), ExtRational(0)};
        case ExprKind::Plus: {
            bool lc = e->args[0]->kind == ExprKind::Const;
            ScaledForm f = past_form(lc ? e->args[1] : e->args[0]);
            const ExprPtr& k = lc ? e->args[0] : e->args[1];
            if (k->kind != ExprKind::Const)
                throw Error(Errc::NotLinearForm, "update is not of the form d*x + c");
            f.constant += k->k1;
            return f;
        }
        case ExprKind::Scale: {
            ScaledForm f = past_form(e->args[0]);
            f.factor *= e->k1;
            f.constant *= e->k1;
            return f;
        }
        default:
            throw Error(Errc::NotLinearForm, "update is not of the form d*x + c");
    }
}

void check_past_range(const ScaledForm& f) {
    if (f.constant.is_infinite() || f.constant.sign() < 0)
        throw Error(Errc::UnsupportedConstants, "past-discount costs must be nonnegative");
    if (f.reg && (f.factor.sign() <= 0 || ExtRational(1) < f.factor))
        throw Error(Errc::UnsupportedConstants, "past-discount factors must lie in (0, 1]");
}

// x[c,d] composed to a single substitution against a base register or the
// identity register; (c, d) literals count as identity[c,d].
struct SubstForm {
    std::optional<RegIdx> reg;  // nullopt = the constant-(0,1) epsilon register
    ExtRational cost{0};
    ExtRational discount{1};
};

SubstForm future_form(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::Reg:
            return {e->reg, ExtRational(0), ExtRational(1)};
        case ExprKind::PairConst:
            return {std::nullopt, e->k1, e->k2};
        case ExprKind::Subst: {
            SubstForm f = future_form(e->args[0]);
            const ExprPtr& k = e->args[1];
            if (k->kind != ExprKind::PairConst)
                throw Error(Errc::NotLinearForm, "future-discount update needs x[c,d]");
            // e[c1,d1][c2,d2] = e[c1 + c2*d1, d1*d2]
            f.cost = f.cost + k->k1 * f.discount;
            f.discount = f.discount * k->k2;
            return f;
        }
        default:
            throw Error(Errc::NotLinearForm, "future-discount update needs x[c,d]");
    }
}

SubstForm global_form(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::Reg:
            return {e->reg, ExtRational(0), ExtRational(1)};
        case ExprKind::PairConst:
            return {std::nullopt, ExtRational(0), ExtRational(1)};
        case ExprKind::PairIncr: {
            if (!e->incr_is_pair)
                throw Error(Errc::NotLinearForm, "global-discount update needs e (+) (c,d)");
            SubstForm f = global_form(e->args[0]);
            f.cost = f.cost + e->k1;
            f.discount = f.discount * e->k2;
            return f;
        }
        default:
            throw Error(Errc::NotLinearForm, "global-discount update needs e (+) (c,d)");
    }
}

void check_future_range(const SubstForm& f) {
    if (f.cost.is_infinite() || f.cost.sign() < 0)
        throw Error(Errc::UnsupportedConstants, "future-discount costs must be nonnegative");
    if (f.discount.is_infinite() || f.discount.sign() <= 0 || ExtRational(1) < f.discount)
        throw Error(Errc::UnsupportedConstants, "future-discount factors must lie in (0, 1]");
}

SolveOutcome outcome_of_gsp(const Cra& m, const CostGraph& g, bool reverse_word) {
    GspResult r = generalized_shortest_path(g);
    switch (r.kind) {
        case GspResult::Kind::NoPath:
            return SolveOutcome::empty();
        case GspResult::Kind::Unbounded:
            return SolveOutcome::unbounded(r.value);
        case GspResult::Kind::Finite: {
            Word w;
            for (int ei : r.path_edges) {
                const auto& e = g.edges[static_cast<size_t>(ei)];
                if (!e.label.empty()) w.push_back(e.label);
            }
            if (reverse_word) std::reverse(w.begin(), w.end());
            return verify_witness(m, r.value, std::move(w));
        }
    }
    throw Error(Errc::Internal, "unreachable");
}

}  // namespace

SolveOutcome mincost_past_discount(const Cra& m) {
    if (m.grammar != GrammarKind::PastDiscount && m.grammar != GrammarKind::PlusC)
        throw Error(Errc::GrammarMismatch, "solver needs a past-discount machine");
    int k = m.num_registers();

    if (k == 0) {
        // Constant outputs only: breadth-first for the nearest defined output.
        std::vector<Value> no_regs;
        std::optional<ExtRational> best;
        Word best_word;
        std::deque<std::pair<int, Word>> todo{{m.initial, {}}};
        std::vector<bool> seen(static_cast<size_t>(m.num_states()), false);
        seen[static_cast<size_t>(m.initial)] = true;
        while (!todo.empty()) {
            auto [q, w] = todo.front();
            todo.pop_front();
            if (m.output(q)) {
                ExtRational v = eval_expr(m.output(q), no_regs, m.grammar).c;
                if (!best || v < *best) {
                    best = v;
                    best_word = w;
                }
            }
            for (int a = 0; a < m.num_symbols(); ++a) {
                int q2 = m.next_state(q, a);
                if (seen[static_cast<size_t>(q2)]) continue;
                seen[static_cast<size_t>(q2)] = true;
                Word w2 = w;
                w2.push_back(m.alphabet[static_cast<size_t>(a)]);
                todo.emplace_back(q2, w2);
            }
        }
        if (!best) return SolveOutcome::empty();
        return verify_witness(m, *best, std::move(best_word));
    }

    // Reversed provenance graph: vertices (q, x); an update y := d*x + c on
    // q -a-> q' contributes an edge (q', y) -> (q, x); resets end at the
    // target with weight 0; initial values enter through (q0, x) -> target.
    CostGraph g;
    auto vid = [&](int q, int x) { return q * k + x; };
    g.vertices = m.num_states() * k + 2;
    g.source = m.num_states() * k;
    g.target = m.num_states() * k + 1;

    for (int q = 0; q < m.num_states(); ++q) {
        for (int a = 0; a < m.num_symbols(); ++a) {
            int q2 = m.next_state(q, a);
            const Symbol& sym = m.alphabet[static_cast<size_t>(a)];
            for (int y = 0; y < k; ++y) {
                ScaledForm f = past_form(m.update(q, a, y));
                check_past_range(f);
                if (f.reg)
                    g.edges.push_back({vid(q2, y), vid(q, *f.reg), f.constant, f.factor, sym});
                else
                    g.edges.push_back({vid(q2, y), g.target, f.constant, ExtRational(0), sym});
            }
        }
        if (m.output(q)) {
            ScaledForm f = past_form(m.output(q));
            check_past_range(f);
            if (f.reg)
                g.edges.push_back({g.source, vid(q, *f.reg), f.constant, f.factor, ""});
            else
                g.edges.push_back({g.source, vid(q, 0), f.constant, ExtRational(0), ""});
        }
    }
    for (int x = 0; x < k; ++x) {
        const ExtRational& init = m.init_values[static_cast<size_t>(x)].c;
        if (init.is_finite() && init.sign() >= 0)
            g.edges.push_back({vid(m.initial, x), g.target, init, ExtRational(0), ""});
        else if (init.is_finite())
            throw Error(Errc::UnsupportedConstants, "negative initial value unsupported here");
    }
    return outcome_of_gsp(m, g, /*reverse_word=*/true);
}

SolveOutcome mincost_future_discount(const Cra& m) {
    if (m.grammar != GrammarKind::FutureDiscount)
        throw Error(Errc::GrammarMismatch, "solver needs a future-discount machine");
    int k = m.num_registers();

    // Forward graph over (q, x) plus a constant-(0,1) epsilon slot per state.
    CostGraph g;
    int slots = k + 1;
    auto vid = [&](int q, int x) { return q * slots + x; };  // x == k: epsilon
    g.vertices = m.num_states() * slots + 2;
    g.source = m.num_states() * slots;
    g.target = m.num_states() * slots + 1;

    for (int q = 0; q < m.num_states(); ++q) {
        for (int a = 0; a < m.num_symbols(); ++a) {
            int q2 = m.next_state(q, a);
            const Symbol& sym = m.alphabet[static_cast<size_t>(a)];
            for (int y = 0; y < k; ++y) {
                SubstForm f = future_form(m.update(q, a, y));
                check_future_range(f);
                int src = f.reg ? vid(q, *f.reg) : vid(q, k);
                g.edges.push_back({src, vid(q2, y), f.cost, f.discount, sym});
            }
            g.edges.push_back({vid(q, k), vid(q2, k), ExtRational(0), ExtRational(1), sym});
        }
        if (m.output(q)) {
            SubstForm f = future_form(m.output(q));
            check_future_range(f);
            int src = f.reg ? vid(q, *f.reg) : vid(q, k);
            g.edges.push_back({src, g.target, f.cost, f.discount, ""});
        }
    }
    for (int x = 0; x < k; ++x) {
        const Value& init = m.init_values[static_cast<size_t>(x)];
        if (init.c.is_infinite() || init.d.is_infinite()) continue;
        if (init.c.sign() < 0 || init.d.sign() < 0 || ExtRational(1) < init.d)
            throw Error(Errc::UnsupportedConstants, "initial pair outside supported range");
        g.edges.push_back({g.source, vid(m.initial, x), init.c, init.d, ""});
    }
    g.edges.push_back({g.source, vid(m.initial, k), ExtRational(0), ExtRational(1), ""});

    // Path cost reads the source edge first, matching c1 + d1*(c2 + ...).
    return outcome_of_gsp(m, g, /*reverse_word=*/false);
}

SolveOutcome mincost_global_discount(const Cra& m, long unary_bound) {
    if (m.grammar != GrammarKind::GlobalDiscount)
        throw Error(Errc::GrammarMismatch, "solver needs a global-discount machine");
    if (unary_bound < 0) throw Error(Errc::IncrementOutOfRange, "bound must be nonnegative");
    int k = m.num_registers();
    int slots = k + 1;

    struct GEdge {
        int from, to;
        long cost;
        ExtRational discount;
        Symbol label;
    };
    std::vector<GEdge> edges;
    int vertices = m.num_states() * slots + 2;
    int source = m.num_states() * slots;
    int target = m.num_states() * slots + 1;
    auto vid = [&](int q, int x) { return q * slots + x; };

    auto as_unary = [&](const ExtRational& c) {
        if (!c.is_integer() || c.sign() < 0 ||
            ExtRational(unary_bound) < c)
            throw Error(Errc::IncrementOutOfRange,
                        "increment must be a natural number within the unary bound");
        return static_cast<long>(c.value().get_num().get_si());
    };
    auto check_discount = [&](const ExtRational& d) {
        if (d.is_infinite() || d.sign() < 0 || ExtRational(1) < d)
            throw Error(Errc::UnsupportedConstants, "discount must lie in [0, 1]");
        return d;
    };

    for (int q = 0; q < m.num_states(); ++q) {
        for (int a = 0; a < m.num_symbols(); ++a) {
            int q2 = m.next_state(q, a);
            const Symbol& sym = m.alphabet[static_cast<size_t>(a)];
            for (int y = 0; y < k; ++y) {
                SubstForm f = global_form(m.update(q, a, y));
                int src = f.reg ? vid(q, *f.reg) : vid(q, k);
                edges.push_back({src, vid(q2, y), as_unary(f.cost), check_discount(f.discount), sym});
            }
            edges.push_back({vid(q, k), vid(q2, k), 0, ExtRational(1), sym});
        }
        if (m.output(q)) {
            SubstForm f = global_form(m.output(q));
            int src = f.reg ? vid(q, *f.reg) : vid(q, k);
            edges.push_back({src, target, as_unary(f.cost), check_discount(f.discount), ""});
        }
    }
    for (int x = 0; x < k; ++x) {
        const Value& init = m.init_values[static_cast<size_t>(x)];
        if (!(init == Value::make_pair(ExtRational(0), ExtRational(1))))
            throw Error(Errc::UnsupportedConstants, "global-discount registers start at (0, 1)");
        edges.push_back({source, vid(m.initial, x), 0, ExtRational(1), ""});
    }
    edges.push_back({source, vid(m.initial, k), 0, ExtRational(1), ""});

    // Trim to vertices on source-target walks.
    std::vector<std::pair<int, int>> fwd, bwd;
    for (const auto& e : edges) {
        fwd.emplace_back(e.from, e.to);
        bwd.emplace_back(e.to, e.from);
    }
    std::vector<bool> seed_s(static_cast<size_t>(vertices), false),
        seed_t(static_cast<size_t>(vertices), false);
    seed_s[static_cast<size_t>(source)] = true;
    seed_t[static_cast<size_t>(target)] = true;
    auto from_s = forward_closure(vertices, fwd, seed_s);
    auto to_t = forward_closure(vertices, bwd, seed_t);
    std::vector<bool> live(static_cast<size_t>(vertices));
    int n_live = 0;
    for (int v = 0; v < vertices; ++v) {
        live[static_cast<size_t>(v)] = from_s[static_cast<size_t>(v)] && to_t[static_cast<size_t>(v)];
        n_live += live[static_cast<size_t>(v)] ? 1 : 0;
    }
    if (!live[static_cast<size_t>(target)]) return SolveOutcome::empty();

    std::vector<GEdge> live_edges;
    long max_cost = 0;
    for (const auto& e : edges)
        if (live[static_cast<size_t>(e.from)] && live[static_cast<size_t>(e.to)]) {
            live_edges.push_back(e);
            max_cost = std::max(max_cost, e.cost);
        }
    std::stable_sort(live_edges.begin(), live_edges.end(), [](const GEdge& a, const GEdge& b) {
        return std::tie(a.from, a.label, a.to) < std::tie(b.from, b.label, b.to);
    });

    // Improving cycle: any strongly-connected pair of endpoints joined by an
    // edge with discount < 1 lets repetition drive the global discount to 0.
    bool improving_cycle = false;
    {
        // Tarjan-less SCC via double BFS per vertex would be quadratic but the
        // graphs here are tiny; use Kosaraju on the live subgraph.
        std::vector<std::vector<int>> adj(static_cast<size_t>(vertices)),
            radj(static_cast<size_t>(vertices));
        for (const auto& e : live_edges) {
            adj[static_cast<size_t>(e.from)].push_back(e.to);
            radj[static_cast<size_t>(e.to)].push_back(e.from);
        }
        std::vector<int> comp(static_cast<size_t>(vertices), -1);
        std::vector<int> finish_order;
        std::vector<bool> seen(static_cast<size_t>(vertices), false);
        for (int v0 = 0; v0 < vertices; ++v0) {
            if (seen[static_cast<size_t>(v0)] || !live[static_cast<size_t>(v0)]) continue;
            std::vector<std::pair<int, size_t>> stack{{v0, 0}};
            seen[static_cast<size_t>(v0)] = true;
            while (!stack.empty()) {
                auto& [v, i] = stack.back();
                if (i < adj[static_cast<size_t>(v)].size()) {
                    int u = adj[static_cast<size_t>(v)][i++];
                    if (!seen[static_cast<size_t>(u)] && live[static_cast<size_t>(u)]) {
                        seen[static_cast<size_t>(u)] = true;
                        stack.emplace_back(u, 0);
                    }
                } else {
                    finish_order.push_back(v);
                    stack.pop_back();
                }
            }
        }
        int ncomp = 0;
        for (auto it = finish_order.rbegin(); it != finish_order.rend(); ++it) {
            if (comp[static_cast<size_t>(*it)] >= 0) continue;
            std::deque<int> todo{*it};
            comp[static_cast<size_t>(*it)] = ncomp;
            while (!todo.empty()) {
                int v = todo.front();
                todo.pop_front();
                for (int u : radj[static_cast<size_t>(v)])
                    if (live[static_cast<size_t>(u)] && comp[static_cast<size_t>(u)] < 0) {
                        comp[static_cast<size_t>(u)] = ncomp;
                        todo.push_back(u);
                    }
            }
            ++ncomp;
        }
        for (const auto& e : live_edges)
            if (comp[static_cast<size_t>(e.from)] == comp[static_cast<size_t>(e.to)] &&
                e.discount < ExtRational(1))
                improving_cycle = true;
    }

    // Discount[i][v][c]: best discount product over walks from the source
    // with <= i edges and cost sum exactly c; indices below zero are absent.
    long cmax = static_cast<long>(n_live) * std::max(max_cost, 1L);
    int rounds = n_live;
    size_t width = static_cast<size_t>(cmax + 1);
    auto cell = [&](int v, long c) { return static_cast<size_t>(v) * width + static_cast<size_t>(c); };
    std::vector<std::vector<Dist>> disc(static_cast<size_t>(rounds + 1),
                                        std::vector<Dist>(static_cast<size_t>(vertices) * width));
    struct Parent {
        int edge = -1;  // -1 = carried from the previous round
    };
    std::vector<std::vector<Parent>> par(static_cast<size_t>(rounds + 1),
                                         std::vector<Parent>(static_cast<size_t>(vertices) * width));
    disc[0][cell(source, 0)] = ExtRational(1);
    for (int i = 1; i <= rounds; ++i) {
        disc[static_cast<size_t>(i)] = disc[static_cast<size_t>(i - 1)];
        for (size_t ei = 0; ei < live_edges.size(); ++ei) {
            const GEdge& e = live_edges[ei];
            for (long c = e.cost; c <= cmax; ++c) {
                const Dist& base = disc[static_cast<size_t>(i - 1)][cell(e.from, c - e.cost)];
                if (!base) continue;
                Dist cand = *base * e.discount;
                Dist& slot = disc[static_cast<size_t>(i)][cell(e.to, c)];
                if (improves(cand, slot)) {
                    slot = cand;
                    par[static_cast<size_t>(i)][cell(e.to, c)].edge = static_cast<int>(ei);
                }
            }
        }
    }

    std::optional<ExtRational> best;
    long best_c = -1;
    for (long c = 0; c <= cmax; ++c) {
        const Dist& d = disc[static_cast<size_t>(rounds - 1)][cell(target, c)];
        if (!d) continue;
        ExtRational v = *d * ExtRational(c);
        if (!best || v < *best) {
            best = v;
            best_c = c;
        }
    }
    if (best && best->is_zero()) {
        // Attained zero beats the limit report.
    } else if (improving_cycle) {
        // Repeating the cycle drives the discount product, hence the value,
        // toward 0; no finite word attains it.
        return SolveOutcome::unbounded(ExtRational(0));
    }
    if (!best) return SolveOutcome::empty();

    // Witness from the parent table.
    Word word;
    {
        int i = rounds - 1, v = target;
        long c = best_c;
        std::vector<Symbol> rev;
        while (!(v == source && c == 0)) {
            if (i <= 0) throw Error(Errc::Internal, "discount-table witness ran out of budget");
            const Parent& pr = par[static_cast<size_t>(i)][cell(v, c)];
            if (pr.edge < 0) {
                --i;
                continue;
            }
            const GEdge& e = live_edges[static_cast<size_t>(pr.edge)];
            if (!e.label.empty()) rev.push_back(e.label);
            v = e.from;
            c -= e.cost;
            --i;
        }
        word.insert(word.end(), rev.rbegin(), rev.rend());
    }
    return verify_witness(m, *best, std::move(word));
}

}  // namespace cra
