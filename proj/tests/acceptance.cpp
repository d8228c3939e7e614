// Acceptance suite: runs every top-level correctness criterion and prints
// one pass/fail line each.  Exits nonzero if any fails.

#include <bit>
#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "cra/analysis.hpp"
#include "cra/mincost.hpp"
#include "cra/oracle.hpp"
#include "cra/semantics.hpp"
#include "cra/transforms.hpp"
#include "fixtures.hpp"

using namespace cra;
namespace fx = cra::fixtures;

namespace {

int failures = 0;
int index_ = 0;

void criterion(const std::string& name, const std::function<bool(std::string&)>& body) {
    ++index_;
    std::string detail;
    auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
    if (ok) {
        std::cout << "ok " << index_ << " - " << name << " (" << ms << " ms)\n";
    } else {
        ++failures;
        std::cout << "FAIL " << index_ << " - " << name << (detail.empty() ? "" : ": " + detail)
                  << " (" << ms << " ms)\n";
    }
}

bool same(const std::optional<ExtRational>& a, const std::optional<ExtRational>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || *a == *b;
}

std::optional<ExtRational> plus_opt(const std::optional<ExtRational>& a,
                                    const std::optional<ExtRational>& b, bool subtract) {
    if (!a || !b) return std::nullopt;
    return subtract ? *a - *b : *a + *b;
}

// ---- criterion 2 helpers ---------------------------------------------------

bool check_combine(unsigned seed, GrammarKind g, bool subtract, std::string& detail) {
    RandomCraOptions opt;
    opt.grammar = g;
    opt.states = 1 + seed % 4;
    opt.registers = 1 + seed % 3;
    Cra a = random_cra(opt, seed);
    Cra b = random_cra(opt, seed + 1000);
    Cra c = subtract ? diff_cra(a, b) : sum_cra(a, b);
    bool ok = true;
    for_each_word(a.alphabet, 5, [&](const Word& w) {
        auto expect = plus_opt(eval_cra(a, w).value, eval_cra(b, w).value, subtract);
        if (!same(expect, eval_cra(c, w).value)) {
            std::ostringstream os;
            os << (subtract ? "diff" : "sum") << " seed " << seed << " differs on '"
               << word_to_string(w, a.alphabet) << "'";
            detail = os.str();
            ok = false;
            return false;
        }
        return true;
    });
    return ok;
}

bool eval_equal_words(const WordFn& f, const WordFn& g, const std::vector<Symbol>& alphabet,
                      int maxlen, const std::string& what, unsigned seed, std::string& detail) {
    BruteEquiv r = brute_equiv(f, g, alphabet, maxlen);
    if (!r.agree) {
        std::ostringstream os;
        os << what << " seed " << seed << " differs on '" << word_to_string(r.differs, alphabet)
           << "'";
        detail = os.str();
        return false;
    }
    return true;
}

// Random global-discount machine small enough for the length-6 oracle.
Cra random_global_machine(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> cd(0, 3), dd(0, 2), pct(0, 99);
    const ExtRational discounts[3] = {ExtRational(1), ExtRational(1, 2), ExtRational(9, 10)};
    int states = 1 + static_cast<int>(seed % 2);
    int regs = 1 + static_cast<int>(seed % 2);
    CraBuilder b(GrammarKind::GlobalDiscount, {"a", "b"});
    for (int x = 0; x < regs; ++x) b.add_register("r" + std::to_string(x));
    for (int q = 0; q < states; ++q) b.add_state("q" + std::to_string(q));
    b.set_initial(0);
    std::uniform_int_distribution<int> sd(0, states - 1);
    for (int q = 0; q < states; ++q)
        for (const char* s : {"a", "b"}) {
            b.set_transition(q, s, sd(rng));
            for (int x = 0; x < regs; ++x) {
                int roll = pct(rng);
                ExprPtr e;
                if (roll < 20)
                    e = Expr::pair_const(ExtRational(0), ExtRational(1));
                else if (roll < 45)
                    e = Expr::reg_ref((x + 1) % regs);
                else
                    e = Expr::pair_incr(Expr::reg_ref(x), ExtRational(cd(rng)),
                                        discounts[dd(rng)]);
                b.set_update(q, s, x, e);
            }
        }
    for (int q = 0; q < states; ++q)
        if (q == states - 1 || pct(rng) < 60) b.set_output(q, Expr::reg_ref(0));
    return b.finish();
}

// Independent improving-cycle search for criterion 6: provenance graph over
// (state, register-or-identity slot), cycle containing a discount < 1.
bool has_improving_cycle(const Cra& m) {
    int k = m.num_registers();
    int slots = k + 1;
    int n = m.num_states() * slots + 2;
    int source = m.num_states() * slots, target = source + 1;
    struct E {
        int from, to;
        bool small;  // discount < 1
    };
    std::vector<E> edges;
    auto vid = [&](int q, int x) { return q * slots + x; };
    std::function<std::pair<std::optional<int>, ExtRational>(const ExprPtr&)> norm =
        [&](const ExprPtr& e) -> std::pair<std::optional<int>, ExtRational> {
        if (e->kind == ExprKind::Reg) return {e->reg, ExtRational(1)};
        if (e->kind == ExprKind::PairConst) return {std::nullopt, ExtRational(1)};
        auto base = norm(e->args[0]);
        return {base.first, base.second * e->k2};
    };
    for (int q = 0; q < m.num_states(); ++q) {
        for (int a = 0; a < m.num_symbols(); ++a) {
            int q2 = m.next_state(q, a);
            for (int y = 0; y < k; ++y) {
                auto [src, d] = norm(m.update(q, a, y));
                edges.push_back({src ? vid(q, *src) : vid(q, k), vid(q2, y), d < ExtRational(1)});
            }
            edges.push_back({vid(q, k), vid(q2, k), false});
        }
        if (m.output(q)) {
            auto [src, d] = norm(m.output(q));
            edges.push_back({src ? vid(q, *src) : vid(q, k), target, d < ExtRational(1)});
        }
    }
    for (int x = 0; x <= k; ++x) edges.push_back({source, vid(m.initial, std::min(x, k)), false});

    auto closure = [&](int start, bool reverse) {
        std::vector<bool> seen(static_cast<size_t>(n), false);
        seen[static_cast<size_t>(start)] = true;
        std::vector<int> todo{start};
        while (!todo.empty()) {
            int v = todo.back();
            todo.pop_back();
            for (const auto& e : edges) {
                int f = reverse ? e.to : e.from, t = reverse ? e.from : e.to;
                if (f == v && !seen[static_cast<size_t>(t)]) {
                    seen[static_cast<size_t>(t)] = true;
                    todo.push_back(t);
                }
            }
        }
        return seen;
    };
    auto live_s = closure(source, false);
    auto live_t = closure(target, true);
    for (size_t i = 0; i < edges.size(); ++i) {
        const auto& e = edges[i];
        if (!e.small) continue;
        if (!live_s[static_cast<size_t>(e.from)] || !live_t[static_cast<size_t>(e.to)]) continue;
        // cycle through e: path e.to -> e.from
        auto back = closure(e.to, false);
        if (back[static_cast<size_t>(e.from)]) return true;
    }
    return false;
}

Cra perturb_output(const Cra& m) {
    Cra out = m;
    for (int q : reachable_states(out))
        if (out.mu[static_cast<size_t>(q)]) {
            out.mu[static_cast<size_t>(q)] =
                Expr::plus(out.mu[static_cast<size_t>(q)], Expr::constant(ExtRational(1)));
            return out;
        }
    return out;
}

Cra rename_registers(const Cra& m) {
    // Reverse register order: rewrite references and permute update slots.
    int k = m.num_registers();
    Cra out = m;
    std::map<RegIdx, ExprPtr> repl;
    for (int x = 0; x < k; ++x) repl[x] = Expr::reg_ref(k - 1 - x);
    std::reverse(out.registers.begin(), out.registers.end());
    std::reverse(out.init_values.begin(), out.init_values.end());
    size_t na = m.alphabet.size(), nr = static_cast<size_t>(k);
    for (size_t qa = 0; qa < m.states.size() * na; ++qa)
        for (size_t r = 0; r < nr; ++r)
            out.rho[qa * nr + (nr - 1 - r)] = substitute_registers(m.rho[qa * nr + r], repl);
    for (auto& e : out.mu)
        if (e) e = substitute_registers(e, repl);
    out.validate();
    return out;
}

}  // namespace

int main() {
    criterion("figure machines match their reference functions on |w| <= 6", [](std::string& d) {
        struct Case {
            Cra m;
            WordFn f;
            const char* name;
        };
        std::vector<Case> cases;
        cases.push_back({fx::m1(), fx::f1, "f1"});
        cases.push_back({fx::m2(), fx::f2, "f2"});
        cases.push_back({fx::m3(), fx::f3, "f3"});
        cases.push_back({fx::m4(), fx::f4, "f4"});
        for (const auto& c : cases) {
            BruteEquiv r = brute_equiv(evaluator_of(c.m), c.f, c.m.alphabet, 6);
            if (!r.agree) {
                d = std::string(c.name) + " differs on '" + word_to_string(r.differs, c.m.alphabet) +
                    "'";
                return false;
            }
        }
        return true;
    });

    criterion("transform soundness on 210 seeded random machines, |w| <= 5", [](std::string& d) {
        for (unsigned seed = 1; seed <= 20; ++seed)
            if (!check_combine(seed, GrammarKind::PlusC, false, d)) return false;
        for (unsigned seed = 21; seed <= 30; ++seed)
            if (!check_combine(seed, GrammarKind::Plus, false, d)) return false;
        for (unsigned seed = 31; seed <= 50; ++seed)
            if (!check_combine(seed, GrammarKind::PlusC, true, d)) return false;
        for (unsigned seed = 51; seed <= 60; ++seed)
            if (!check_combine(seed, GrammarKind::Plus, true, d)) return false;

        for (unsigned seed = 61; seed <= 90; ++seed) {
            RandomCraOptions opt;
            opt.grammar = GrammarKind::Plus;
            opt.copyless = true;
            opt.states = 1 + seed % 4;
            opt.registers = 1 + seed % 3;
            Cra m = random_cra(opt, seed);
            Cra t = copyless_plus_to_inc(m);
            if (t.num_registers() != (1 << m.num_registers())) {
                d = "subset register census off";
                return false;
            }
            if (!eval_equal_words(evaluator_of(m), evaluator_of(t), m.alphabet, 5,
                                  "plus-to-inc", seed, d))
                return false;
        }
        for (unsigned seed = 91; seed <= 120; ++seed) {
            RandomCraOptions opt;
            opt.states = 1 + seed % 4;
            opt.registers = 1 + seed % 3;
            Cra m = random_cra(opt, seed);
            WeightedAutomaton wa = inc_to_single_valued_wa(m);
            WordFn g = [&wa](const Word& w) { return eval_wa(wa, w).value; };
            if (!eval_equal_words(evaluator_of(m), g, m.alphabet, 5, "to-sv-wa", seed, d))
                return false;
        }
        for (unsigned seed = 121; seed <= 150; ++seed) {
            RandomWaOptions opt;
            opt.states = 2 + static_cast<int>(seed % 3);
            WeightedAutomaton wa = random_wa(opt, seed);
            Cra m = wa_to_cra(wa);
            WordFn f = [&wa](const Word& w) { return eval_wa(wa, w).value; };
            if (!eval_equal_words(f, evaluator_of(m), wa.alphabet, 5, "wa-to-cra", seed, d))
                return false;
        }
        for (unsigned seed = 151; seed <= 180; ++seed) {
            RandomCraOptions opt;
            opt.grammar = GrammarKind::MinPlusC;
            opt.states = 1 + seed % 4;
            opt.registers = 1 + seed % 3;
            opt.nonnegative = seed % 2 == 0;
            Cra m = random_cra(opt, seed);
            WeightedAutomaton wa = cra_to_wa(m);
            WordFn g = [&wa](const Word& w) { return eval_wa(wa, w).value; };
            if (!eval_equal_words(evaluator_of(m), g, m.alphabet, 5, "cra-to-wa", seed, d))
                return false;
        }
        for (unsigned seed = 181; seed <= 210; ++seed) {
            RandomCraOptions opt;
            opt.grammar = GrammarKind::PairMinPlus;
            opt.copyless = true;
            opt.states = 1 + seed % 4;
            opt.registers = 1 + seed % 3;
            Cra m = random_cra(opt, seed);
            Cra t = pair_cra_to_linear_cra(m);
            if (!eval_equal_words(evaluator_of(m), evaluator_of(t), m.alphabet, 5,
                                  "pairs-to-linear", seed, d))
                return false;
        }
        return true;
    });

    criterion("single-valuedness of the increment automaton, |w| <= 6", [](std::string& d) {
        std::vector<Cra> fixtures_list{fx::m1(), fx::counter_machine('a'), fx::length_machine()};
        for (unsigned seed = 91; seed <= 120; ++seed) {
            RandomCraOptions opt;
            opt.states = 1 + seed % 4;
            opt.registers = 1 + seed % 3;
            fixtures_list.push_back(random_cra(opt, seed));
        }
        for (size_t i = 0; i < fixtures_list.size(); ++i) {
            WeightedAutomaton wa = inc_to_single_valued_wa(fixtures_list[i]);
            bool ok = true;
            for_each_word(wa.alphabet, 6, [&](const Word& w) {
                if (count_accepting_paths(wa, w) > 1) {
                    ok = false;
                    return false;
                }
                return true;
            });
            if (!ok) {
                d = "machine " + std::to_string(i) + " has a word with 2+ accepting paths";
                return false;
            }
        }
        return true;
    });

    criterion("mincost_inc equals the stable brute-force minimum (100 machines)",
              [](std::string& d) {
                  int checked = 0;
                  for (unsigned seed = 1; seed <= 100; ++seed) {
                      RandomCraOptions opt;
                      opt.nonnegative = true;
                      opt.const_lo = 0;
                      opt.states = 1 + seed % 4;
                      opt.registers = 1 + seed % 3;
                      Cra m = random_cra(opt, seed + 7000);
                      BruteMin b6 = brute_mincost(m, 6);
                      BruteMin b5 = brute_mincost(m, 5);
                      SolveOutcome r = mincost_inc(m);
                      if (b6.empty) {
                          if (r.kind != SolveOutcome::Kind::Empty &&
                              r.kind != SolveOutcome::Kind::Finite) {
                              d = "seed " + std::to_string(seed) + ": unexpected outcome";
                              return false;
                          }
                          continue;
                      }
                      if (b6.witness.size() >= 6 || b5.empty || !(b5.value == b6.value)) continue;
                      ++checked;
                      if (r.kind != SolveOutcome::Kind::Finite || !(r.value == b6.value)) {
                          d = "seed " + std::to_string(seed) + ": solver " +
                              (r.kind == SolveOutcome::Kind::Finite ? r.value.str() : "non-finite") +
                              " vs oracle " + b6.value.str();
                          return false;
                      }
                  }
                  if (checked < 50) {
                      d = "only " + std::to_string(checked) + " stable instances";
                      return false;
                  }
                  return true;
              });

    criterion("negative cycles are detected; containment family behaves", [](std::string& d) {
        CraBuilder b(GrammarKind::PlusC, {"a"});
        int x = b.add_register("x");
        int q0 = b.add_state("q0");
        b.set_initial(q0);
        b.set_transition(q0, "a", q0);
        b.set_update(q0, "a", x, Expr::plus(Expr::reg_ref(x), Expr::constant(ExtRational(-1))));
        b.set_output(q0, Expr::reg_ref(x));
        if (mincost_inc(b.finish()).kind != SolveOutcome::Kind::Unbounded) {
            d = "decrementing loop not reported unbounded";
            return false;
        }
        Cra len = fx::length_machine();
        Cra ca = fx::counter_machine('a');
        if (contains(ca, len).kind != ContainsResult::Kind::Holds) {
            d = "counter <= length should hold";
            return false;
        }
        ContainsResult v = contains(len, ca);
        if (v.kind != ContainsResult::Kind::Violation ||
            v.witness != fx::make_word("b")) {
            d = "length <= counter should fail on 'b'";
            return false;
        }
        if (contains(len, len).kind != ContainsResult::Kind::Holds) {
            d = "reflexive containment failed";
            return false;
        }
        return true;
    });

    criterion("discount table agrees with the oracle and flags improving cycles (50 machines)",
              [](std::string& d) {
                  for (unsigned seed = 1; seed <= 50; ++seed) {
                      Cra m = random_global_machine(seed);
                      SolveOutcome r = mincost_global_discount(m, 3);
                      BruteMin oracle = brute_mincost(m, 6);
                      bool cycle = has_improving_cycle(m);
                      if (r.kind == SolveOutcome::Kind::Unbounded) {
                          if (!cycle) {
                              d = "seed " + std::to_string(seed) +
                                  ": unbounded without an improving cycle";
                              return false;
                          }
                          if (!r.infimum || !r.infimum->is_zero()) {
                              d = "seed " + std::to_string(seed) + ": infimum not 0";
                              return false;
                          }
                          continue;
                      }
                      if (r.kind == SolveOutcome::Kind::Empty) {
                          if (!oracle.empty) {
                              d = "seed " + std::to_string(seed) + ": solver empty, oracle found " +
                                  oracle.value.str();
                              return false;
                          }
                          continue;
                      }
                      // attained minimum: exact oracle agreement, no improving
                      // cycle unless the attained value is already 0
                      if (cycle && !r.value.is_zero()) {
                          d = "seed " + std::to_string(seed) +
                              ": improving cycle but finite nonzero minimum";
                          return false;
                      }
                      if (oracle.empty || !(oracle.value == r.value)) {
                          d = "seed " + std::to_string(seed) + ": solver " + r.value.str() +
                              " vs oracle " + (oracle.empty ? "empty" : oracle.value.str());
                          return false;
                      }
                  }
                  return true;
              });

    criterion("generalized shortest paths: unit weights vs Bellman-Ford, DAGs vs brute force",
              [](std::string& d) {
                  std::mt19937 rng(99);
                  std::uniform_int_distribution<int> nd(3, 8), cd(0, 9), pd(0, 99), wd(0, 2);
                  const ExtRational weights[3] = {ExtRational(1), ExtRational(1, 2),
                                                  ExtRational(9, 10)};
                  for (int it = 0; it < 50; ++it) {
                      int n = nd(rng);
                      CostGraph g;
                      g.vertices = n;
                      g.source = 0;
                      g.target = n - 1;
                      for (int u = 0; u < n; ++u)
                          for (int v = 0; v < n; ++v) {
                              if (u == v || pd(rng) < 40) continue;
                              g.edges.push_back({u, v, ExtRational(cd(rng)), ExtRational(1), ""});
                          }
                      std::vector<std::optional<ExtRational>> dist(static_cast<size_t>(n));
                      dist[0] = ExtRational(0);
                      for (int round = 0; round < n; ++round)
                          for (const auto& e : g.edges) {
                              auto& du = dist[static_cast<size_t>(e.from)];
                              if (!du) continue;
                              ExtRational cand = *du + e.cost;
                              auto& dv = dist[static_cast<size_t>(e.to)];
                              if (!dv || cand < *dv) dv = cand;
                          }
                      GspResult r = generalized_shortest_path(g);
                      auto expect = dist[static_cast<size_t>(n - 1)];
                      if (expect.has_value() != (r.kind == GspResult::Kind::Finite) ||
                          (expect && !(r.value == *expect))) {
                          d = "unit-weight graph " + std::to_string(it) + " mismatch";
                          return false;
                      }
                  }
                  // random DAGs with discounts, exact path enumeration
                  for (int it = 0; it < 50; ++it) {
                      int n = nd(rng);
                      CostGraph g;
                      g.vertices = n;
                      g.source = 0;
                      g.target = n - 1;
                      for (int u = 0; u < n; ++u)
                          for (int v = u + 1; v < n; ++v) {
                              if (pd(rng) < 40) continue;
                              g.edges.push_back(
                                  {u, v, ExtRational(cd(rng)), weights[wd(rng)], ""});
                          }
                      // brute force: all paths (<= 12 edges; DAG paths are shorter)
                      std::optional<ExtRational> best;
                      std::function<void(int, int)> walk = [&](int v, int depth) {
                          if (depth > 12) return;
                          if (v == g.target) return;
                          for (const auto& e : g.edges) {
                              if (e.from != v) continue;
                              // value of path = fold; recompute by full paths
                              (void)e;
                          }
                      };
                      // enumerate paths explicitly
                      std::vector<int> stack;
                      std::function<void(int)> enumerate = [&](int v) {
                          if (stack.size() > 12) return;
                          if (v == g.target) {
                              ExtRational val(0);
                              for (size_t i = stack.size(); i-- > 0;) {
                                  const auto& e = g.edges[static_cast<size_t>(stack[i])];
                                  val = e.cost + e.weight * val;
                              }
                              if (!best || val < *best) best = val;
                              return;
                          }
                          for (size_t i = 0; i < g.edges.size(); ++i) {
                              if (g.edges[i].from != v) continue;
                              stack.push_back(static_cast<int>(i));
                              enumerate(g.edges[i].to);
                              stack.pop_back();
                          }
                      };
                      enumerate(0);
                      GspResult r = generalized_shortest_path(g);
                      if (best.has_value() != (r.kind == GspResult::Kind::Finite) ||
                          (best && !(r.value == *best))) {
                          d = "dag " + std::to_string(it) + " mismatch";
                          return false;
                      }
                  }
                  return true;
              });

    criterion("equivalence: 50 rewrites proved, 50 perturbations refuted with verified witnesses",
              [](std::string& d) {
                  for (unsigned seed = 1; seed <= 50; ++seed) {
                      RandomCraOptions opt;
                      opt.grammar = seed % 2 ? GrammarKind::PlusC : GrammarKind::Plus;
                      opt.states = 1 + seed % 3;
                      opt.registers = 1 + seed % 3;
                      opt.output_pct = 100;
                      Cra m = random_cra(opt, seed + 3000);
                      Cra rewrite = seed % 2 ? sum_cra(m, fx::zero_machine(m.alphabet))
                                             : rename_registers(m);
                      EquivResult r = equiv_affine(m, rewrite);
                      if (r.kind != EquivResult::Kind::Equivalent) {
                          d = "seed " + std::to_string(seed) + ": rewrite not proved equivalent";
                          return false;
                      }
                      if (r.stats.basis_insertions > r.stats.insertion_bound()) {
                          d = "seed " + std::to_string(seed) + ": insertion bound exceeded";
                          return false;
                      }

                      Cra bad = perturb_output(m);
                      EquivResult p = equiv_affine(m, bad);
                      if (p.kind != EquivResult::Kind::Counterexample) {
                          d = "seed " + std::to_string(seed) + ": perturbation not refuted";
                          return false;
                      }
                      auto v1 = eval_cra(m, p.counterexample).value;
                      auto v2 = eval_cra(bad, p.counterexample).value;
                      if (same(v1, v2)) {
                          d = "seed " + std::to_string(seed) + ": counterexample not verified";
                          return false;
                      }
                      if (p.stats.basis_insertions > p.stats.insertion_bound()) {
                          d = "seed " + std::to_string(seed) + ": insertion bound exceeded";
                          return false;
                      }
                  }
                  return true;
              });

    criterion("satisfiability reduction: min cost 0 iff satisfiable (30 + 30 formulas)",
              [](std::string& d) {
                  std::mt19937 rng(2024);
                  int sat_seen = 0, unsat_seen = 0, tries = 0;
                  while ((sat_seen < 30 || unsat_seen < 30) && ++tries < 20000) {
                      // Unsatisfiable instances want dense clauses over few
                      // variables; satisfiable ones come from sparse draws.
                      bool hunt_unsat = unsat_seen < 30;
                      std::uniform_int_distribution<int> nv(3, hunt_unsat ? 4 : 6);
                      int n = nv(rng);
                      std::uniform_int_distribution<int> nc(hunt_unsat ? 6 : 2,
                                                            hunt_unsat ? 8 : 5);
                      std::uniform_int_distribution<int> vd(1, n), sgn(0, 1);
                      Formula3Sat f;
                      f.variables = n;
                      int k = nc(rng);
                      for (int j = 0; j < k; ++j) {
                          std::array<int, 3> cl{};
                          for (int i = 0; i < 3; ++i) cl[static_cast<size_t>(i)] = sgn(rng) ? vd(rng) : -vd(rng);
                          f.clauses.push_back(cl);
                      }
                      bool sat = sat3_satisfiable(f);
                      if (sat && sat_seen >= 30) continue;
                      if (!sat && unsat_seen >= 30) continue;
                      (sat ? sat_seen : unsat_seen)++;
                      SolveOutcome r = mincost_copyless_plus(gen_sat3(f));
                      if (r.kind != SolveOutcome::Kind::Finite) {
                          d = "solver did not return a finite minimum";
                          return false;
                      }
                      if ((r.value.is_zero()) != sat) {
                          d = std::string("formula classified ") + (sat ? "sat" : "unsat") +
                              " but minimum is " + r.value.str();
                          return false;
                      }
                  }
                  if (sat_seen < 30 || unsat_seen < 30) {
                      d = "could not collect 30 formulas of each kind";
                      return false;
                  }
                  return true;
              });

    criterion("inc-scale pipeline: split proved equivalent, perturbation refuted, census exact",
              [](std::string& d) {
                  Cra a = fx::example51_incscale();
                  Cra lin = pair_cra_to_linear_cra(a);
                  int X = a.num_registers();
                  int expected = 2 * X;
                  for (unsigned mask = 0; mask < (1u << X); ++mask)
                      expected += 1 + (X - static_cast<int>(std::popcount(mask)));
                  if (lin.num_registers() != expected) {
                      d = "census: got " + std::to_string(lin.num_registers()) + ", expected " +
                          std::to_string(expected);
                      return false;
                  }

                  Cra split = fx::split_state(a, 2);
                  EquivResult ok = equiv_affine(lin, pair_cra_to_linear_cra(split));
                  if (ok.kind != EquivResult::Kind::Equivalent) {
                      d = "state split not proved equivalent";
                      return false;
                  }

                  Cra bad = a;
                  int sym_a = bad.symbol_index("a");
                  bad.update(1, sym_a, 1) =
                      Expr::pair_incr(Expr::reg_ref(1), ExtRational(5));  // was (+) 2
                  EquivResult refuted = equiv_affine(lin, pair_cra_to_linear_cra(bad));
                  if (refuted.kind != EquivResult::Kind::Counterexample) {
                      d = "perturbed variant not distinguished";
                      return false;
                  }
                  auto v1 = eval_cra(a, refuted.counterexample).value;
                  auto v2 = eval_cra(bad, refuted.counterexample).value;
                  if (same(v1, v2)) {
                      d = "counterexample does not separate the pair machines";
                      return false;
                  }
                  return true;
              });

    criterion("the look-ahead pair agrees with m1 on all |w| <= 6", [](std::string& d) {
        Cra rm = fx::m1_rla_machine();
        LookaheadDfa la = fx::m1_la_dfa();
        WordFn rla_fn = [&](const Word& w) { return eval_cra_rla(rm, la, w).value; };
        BruteEquiv r = brute_equiv(evaluator_of(fx::m1()), rla_fn, fx::m1().alphabet, 6);
        if (!r.agree) {
            d = "differs on '" + word_to_string(r.differs, fx::m1().alphabet) + "'";
            return false;
        }
        return true;
    });

    if (failures == 0) {
        std::cout << "all " << index_ << " acceptance criteria passed\n";
        return 0;
    }
    std::cout << failures << " of " << index_ << " criteria failed\n";
    return 1;
}
