#include "cra/oracle.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <set>

#include "cra/semantics.hpp"

namespace cra {

void for_each_word(const std::vector<Symbol>& alphabet, int maxlen,
                   const std::function<bool(const Word&)>& fn) {
    // Length-major, then lexicographic in the given alphabet order, so the
    // first hit is the canonical witness.
    Word w;
    for (int len = 0; len <= maxlen; ++len) {
        bool go = true;
        std::function<void(int)> fixed = [&](int remaining) {
            if (!go) return;
            if (remaining == 0) {
                go = fn(w);
                return;
            }
            for (const Symbol& a : alphabet) {
                w.push_back(a);
                fixed(remaining - 1);
                w.pop_back();
                if (!go) return;
            }
        };
        fixed(len);
        if (!go) return;
    }
}

WordFn evaluator_of(const Cra& m) {
    return [&m](const Word& w) -> std::optional<ExtRational> {
        EvalResult r = eval_cra(m, w);
        return r.value;
    };
}

BruteMin brute_mincost_fn(const WordFn& fn, const std::vector<Symbol>& alphabet, int maxlen) {
    BruteMin best;
    for_each_word(alphabet, maxlen, [&](const Word& w) {
        auto v = fn(w);
        if (v && v->is_finite() && (best.empty || *v < best.value)) {
            best.empty = false;
            best.value = *v;
            best.witness = w;
        }
        return true;
    });
    return best;
}

BruteMin brute_mincost(const Cra& m, int maxlen) {
    return brute_mincost_fn(evaluator_of(m), m.alphabet, maxlen);
}

BruteEquiv brute_equiv(const WordFn& f, const WordFn& g, const std::vector<Symbol>& alphabet,
                       int maxlen, bool identify_inf_undefined) {
    BruteEquiv out;
    auto undefined_like = [&](const std::optional<ExtRational>& v) {
        return !v || (identify_inf_undefined && v->is_infinite());
    };
    for_each_word(alphabet, maxlen, [&](const Word& w) {
        auto a = f(w);
        auto b = g(w);
        bool ua = undefined_like(a), ub = undefined_like(b);
        bool same = ua == ub && (ua || *a == *b);
        if (!same) {
            out.agree = false;
            out.differs = w;
            return false;
        }
        return true;
    });
    return out;
}

BruteEquiv brute_equiv(const Cra& m1, const Cra& m2, int maxlen, bool identify_inf_undefined) {
    return brute_equiv(evaluator_of(m1), evaluator_of(m2), m1.alphabet, maxlen,
                       identify_inf_undefined);
}

Cra gen_sat3(const Formula3Sat& f) {
    int n = f.variables;
    int k = static_cast<int>(f.clauses.size());
    for (const auto& cl : f.clauses)
        for (int lit : cl)
            if (lit == 0 || std::abs(lit) > n)
                throw Error(Errc::ValidationError, "literal index out of range");

    CraBuilder b(GrammarKind::Plus, {"0", "1"});
    for (int j = 0; j < k; ++j) b.add_register("x" + std::to_string(j + 1));
    for (int i = 0; i <= n + 2; ++i) b.add_state("q" + std::to_string(i));
    b.set_initial(0);

    auto satisfies = [&](int clause, int var, bool bit) {
        for (int lit : f.clauses[static_cast<size_t>(clause)])
            if (std::abs(lit) == var && (lit > 0) == bit) return true;
        return false;
    };

    for (int i = 0; i <= n + 2; ++i) {
        for (int bit = 0; bit <= 1; ++bit) {
            const Symbol sym = bit ? "1" : "0";
            int next = std::min(i + 1, n + 2);
            b.set_transition(i, sym, next);
            if (i < n) {
                // Reading the assignment for variable i+1.
                for (int j = 0; j < k; ++j) {
                    bool sat = satisfies(j, i + 1, bit == 1);
                    ExprPtr e;
                    if (i == 0)
                        e = Expr::constant(ExtRational(sat ? 0 : 1));
                    else
                        e = sat ? Expr::constant(ExtRational(0)) : Expr::reg_ref(j);
                    b.set_update(i, sym, j, e);
                }
            } else if (i == n + 1) {
                // Collapse into x1 = sum of all clause penalties.
                if (k > 0) {
                    ExprPtr sum = Expr::reg_ref(0);
                    for (int j = 1; j < k; ++j) sum = Expr::plus(sum, Expr::reg_ref(j));
                    b.set_update(i, sym, 0, sum);
                    for (int j = 1; j < k; ++j)
                        b.set_update(i, sym, j, Expr::constant(ExtRational(0)));
                }
            } else if (i == n + 2) {
                for (int j = 0; j < k; ++j)
                    b.set_update(i, sym, j, Expr::reg_ref(j));
            }
            // i == n: plain padding step, identity updates.
        }
    }
    b.set_output(n + 2, k > 0 ? Expr::reg_ref(0) : Expr::constant(ExtRational(0)));
    return b.finish();
}

bool sat3_satisfiable(const Formula3Sat& f) {
    if (f.variables > 20) throw Error(Errc::ValidationError, "exhaustive check capped at 20 variables");
    for (unsigned long mask = 0; mask < (1ul << f.variables); ++mask) {
        bool all = true;
        for (const auto& cl : f.clauses) {
            bool sat = false;
            for (int lit : cl) {
                bool bit = mask & (1ul << (std::abs(lit) - 1));
                if ((lit > 0) == bit) sat = true;
            }
            if (!sat) {
                all = false;
                break;
            }
        }
        if (all) return true;
    }
    return f.clauses.empty();
}

namespace {

std::vector<Symbol> make_alphabet(int size) {
    std::vector<Symbol> a;
    for (int i = 0; i < size; ++i) a.push_back(std::string(1, static_cast<char>('a' + i)));
    return a;
}

ExtRational random_const(std::mt19937& rng, const RandomCraOptions& opt) {
    long lo = opt.nonnegative ? std::max(0L, opt.const_lo) : opt.const_lo;
    std::uniform_int_distribution<long> d(lo, opt.const_hi);
    return ExtRational(d(rng));
}

}  // namespace

Cra random_cra(const RandomCraOptions& opt, unsigned seed) {
    std::mt19937 rng(seed);
    auto alphabet = make_alphabet(opt.alphabet_size);
    CraBuilder b(opt.grammar, alphabet);
    bool pairs = grammar_uses_pairs(opt.grammar);
    Semiring sr = pair_semiring(opt.grammar);
    for (int x = 0; x < opt.registers; ++x) b.add_register("r" + std::to_string(x));
    for (int q = 0; q < opt.states; ++q) b.add_state("q" + std::to_string(q));
    b.set_initial(0);

    std::uniform_int_distribution<int> state_d(0, opt.states - 1);
    std::uniform_int_distribution<int> pct(0, 99);
    std::uniform_int_distribution<int> shape_d(0, 99);

    // Spanning backbone: state q reachable from some lower state, on a slot
    // no later backbone edge may overwrite.
    std::vector<std::vector<int>> target(static_cast<size_t>(opt.states),
                                         std::vector<int>(alphabet.size()));
    for (int q = 0; q < opt.states; ++q)
        for (size_t a = 0; a < alphabet.size(); ++a) target[static_cast<size_t>(q)][a] = state_d(rng);
    std::set<std::pair<int, int>> backbone;
    for (int q = 1; q < opt.states; ++q) {
        std::uniform_int_distribution<int> src(0, q - 1);
        std::uniform_int_distribution<int> sym(0, static_cast<int>(alphabet.size()) - 1);
        for (;;) {
            std::pair<int, int> slot{src(rng), sym(rng)};
            if (!backbone.insert(slot).second) continue;
            target[static_cast<size_t>(slot.first)][static_cast<size_t>(slot.second)] = q;
            break;
        }
    }

    auto scalar_expr = [&](std::vector<int>& pool) -> ExprPtr {
        int shape = shape_d(rng);
        auto take_reg = [&]() -> std::optional<RegIdx> {
            if (pool.empty()) return std::nullopt;
            std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
            size_t i = pick(rng);
            RegIdx r = pool[i];
            pool.erase(pool.begin() + static_cast<long>(i));
            return r;
        };
        switch (opt.grammar) {
            case GrammarKind::PlusC: {
                auto r = shape < 85 ? take_reg() : std::nullopt;
                if (!r) return Expr::constant(random_const(rng, opt));
                if (shape < 40) return Expr::reg_ref(*r);
                return Expr::plus(Expr::reg_ref(*r), Expr::constant(random_const(rng, opt)));
            }
            case GrammarKind::Plus: {
                auto r = shape < 85 ? take_reg() : std::nullopt;
                if (!r) return Expr::constant(random_const(rng, opt));
                ExprPtr e = Expr::reg_ref(*r);
                if (shape < 35) {
                    if (auto r2 = take_reg()) e = Expr::plus(e, Expr::reg_ref(*r2));
                }
                if (shape % 2 == 0) e = Expr::plus(e, Expr::constant(random_const(rng, opt)));
                return e;
            }
            case GrammarKind::MinPlusC: {
                auto term = [&]() -> ExprPtr {
                    auto r = take_reg();
                    if (!r) return Expr::constant(random_const(rng, opt));
                    if (pct(rng) < 50) return Expr::reg_ref(*r);
                    return Expr::plus(Expr::reg_ref(*r), Expr::constant(random_const(rng, opt)));
                };
                if (shape < 55) return term();
                std::vector<ExprPtr> args{term(), term()};
                if (shape >= 90) args.push_back(term());
                return Expr::min_of(std::move(args));
            }
            default:
                throw Error(Errc::Internal, "random generator: unsupported scalar grammar");
        }
    };

    auto pair_expr = [&](std::vector<int>& pool) -> ExprPtr {
        auto take_reg = [&]() -> std::optional<RegIdx> {
            if (pool.empty()) return std::nullopt;
            std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
            size_t i = pick(rng);
            RegIdx r = pool[i];
            pool.erase(pool.begin() + static_cast<long>(i));
            return r;
        };
        int shape = shape_d(rng);
        auto r = shape < 88 ? take_reg() : std::nullopt;
        if (!r) {
            Value id = grammar_identity(opt.grammar);
            if (pct(rng) < 50) return Expr::pair_const(id.c, id.d);
            ExtRational c = sr == Semiring::MinPlus && pct(rng) < 40 ? ExtRational::infinity()
                                                                     : random_const(rng, opt);
            ExtRational d = ExtRational(std::uniform_int_distribution<long>(0, 3)(rng));
            return Expr::pair_const(c, d);
        }
        ExprPtr e = Expr::reg_ref(*r);
        if (shape < 30) {
            if (auto r2 = take_reg()) e = Expr::pair_sum(e, Expr::reg_ref(*r2));
        } else if (shape < 55) {
            if (auto r2 = take_reg()) e = Expr::subst(e, Expr::reg_ref(*r2));
        }
        if (pct(rng) < 55) {
            ExtRational d = ExtRational(std::uniform_int_distribution<long>(0, 4)(rng));
            e = Expr::pair_incr(e, d);
        }
        return e;
    };

    for (int q = 0; q < opt.states; ++q) {
        for (size_t a = 0; a < alphabet.size(); ++a) {
            b.set_transition(q, alphabet[a], target[static_cast<size_t>(q)][a]);
            // Copyless mode: one shared pool per step; otherwise each update
            // draws from a fresh pool (reuse is fine).
            std::vector<int> pool;
            for (int x = 0; x < opt.registers; ++x) pool.push_back(x);
            std::shuffle(pool.begin(), pool.end(), rng);
            for (int x = 0; x < opt.registers; ++x) {
                std::vector<int> local = pool;
                std::vector<int>& use = opt.copyless ? pool : local;
                b.set_update(q, alphabet[a], x, pairs ? pair_expr(use) : scalar_expr(use));
            }
        }
        if (pct(rng) < opt.output_pct) {
            std::vector<int> pool;
            for (int x = 0; x < opt.registers; ++x) pool.push_back(x);
            std::shuffle(pool.begin(), pool.end(), rng);
            b.set_output(q, pairs ? pair_expr(pool) : scalar_expr(pool));
        }
    }
    return b.finish();
}

WeightedAutomaton random_wa(const RandomWaOptions& opt, unsigned seed) {
    std::mt19937 rng(seed);
    WeightedAutomaton wa;
    wa.semiring = opt.semiring;
    wa.alphabet = make_alphabet(opt.alphabet_size);
    for (int q = 0; q < opt.states; ++q) wa.states.push_back("p" + std::to_string(q));
    wa.initial_weights.assign(static_cast<size_t>(opt.states), std::nullopt);
    wa.final_weights.assign(static_cast<size_t>(opt.states), std::nullopt);
    std::uniform_int_distribution<long> cd(opt.const_lo, opt.const_hi);
    std::uniform_int_distribution<int> sd(0, opt.states - 1);
    std::uniform_int_distribution<int> pct(0, 99);

    wa.initial_weights[0] = ExtRational(cd(rng));
    for (int q = 1; q < opt.states; ++q)
        if (pct(rng) < 40) wa.initial_weights[static_cast<size_t>(q)] = ExtRational(cd(rng));
    int finals = 0;
    for (int q = 0; q < opt.states; ++q)
        if (pct(rng) < 50) {
            wa.final_weights[static_cast<size_t>(q)] = ExtRational(cd(rng));
            ++finals;
        }
    if (finals == 0) wa.final_weights[static_cast<size_t>(opt.states - 1)] = ExtRational(cd(rng));

    for (int q = 0; q < opt.states; ++q)
        for (size_t a = 0; a < wa.alphabet.size(); ++a)
            for (int e = 0; e < opt.edges_per_state; ++e) {
                if (pct(rng) < 30) continue;
                wa.transitions.push_back(
                    {q, static_cast<int>(a), ExtRational(cd(rng)), sd(rng)});
            }
    wa.validate();
    return wa;
}

}  // namespace cra
