#include "cra/expr.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cra {

std::string Value::str() const {
    if (!pair) return c.str();
    return "(" + c.str() + ", " + d.str() + ")";
}

ExprPtr Expr::constant(ExtRational v) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Const;
    e->k1 = std::move(v);
    return e;
}

ExprPtr Expr::reg_ref(RegIdx r) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Reg;
    e->reg = r;
    return e;
}

ExprPtr Expr::plus(ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Plus;
    e->args = {std::move(a), std::move(b)};
    return e;
}

ExprPtr Expr::min_of(std::vector<ExprPtr> args) {
    if (args.size() == 1) return args[0];
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Min;
    e->args = std::move(args);
    return e;
}

ExprPtr Expr::scale(ExtRational factor, ExprPtr inner) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Scale;
    e->k1 = std::move(factor);
    e->args = {std::move(inner)};
    return e;
}

ExprPtr Expr::pair_const(ExtRational c, ExtRational d) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::PairConst;
    e->k1 = std::move(c);
    e->k2 = std::move(d);
    return e;
}

ExprPtr Expr::pair_sum(ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::PairSum;
    e->args = {std::move(a), std::move(b)};
    return e;
}

ExprPtr Expr::pair_incr(ExprPtr inner, ExtRational d) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::PairIncr;
    e->k1 = std::move(d);
    e->args = {std::move(inner)};
    return e;
}

ExprPtr Expr::pair_incr(ExprPtr inner, ExtRational c, ExtRational d) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::PairIncr;
    e->k1 = std::move(c);
    e->k2 = std::move(d);
    e->incr_is_pair = true;
    e->args = {std::move(inner)};
    return e;
}

ExprPtr Expr::subst(ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Subst;
    e->args = {std::move(a), std::move(b)};
    return e;
}

void collect_registers(const ExprPtr& e, std::vector<RegIdx>& out) {
    if (!e) return;
    if (e->kind == ExprKind::Reg) {
        out.push_back(e->reg);
        return;
    }
    for (const auto& a : e->args) collect_registers(a, out);
}

bool mentions_register(const ExprPtr& e, RegIdx r) {
    if (!e) return false;
    if (e->kind == ExprKind::Reg) return e->reg == r;
    return std::any_of(e->args.begin(), e->args.end(),
                       [&](const ExprPtr& a) { return mentions_register(a, r); });
}

ExprPtr substitute_registers(const ExprPtr& e, const std::map<RegIdx, ExprPtr>& repl) {
    if (!e) return e;
    if (e->kind == ExprKind::Reg) {
        auto it = repl.find(e->reg);
        return it == repl.end() ? e : it->second;
    }
    if (e->args.empty()) return e;
    auto copy = std::make_shared<Expr>(*e);
    for (auto& a : copy->args) a = substitute_registers(a, repl);
    return copy;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->reg != b->reg || a->incr_is_pair != b->incr_is_pair)
        return false;
    if (a->kind == ExprKind::Const || a->kind == ExprKind::Scale ||
        a->kind == ExprKind::PairIncr) {
        if (!(a->k1 == b->k1)) return false;
    }
    if (a->kind == ExprKind::PairConst || a->incr_is_pair) {
        if (!(a->k1 == b->k1) || !(a->k2 == b->k2)) return false;
    }
    if (a->args.size() != b->args.size()) return false;
    for (size_t i = 0; i < a->args.size(); ++i)
        if (!expr_equal(a->args[i], b->args[i])) return false;
    return true;
}

const char* grammar_name(GrammarKind g) {
    switch (g) {
        case GrammarKind::PlusC: return "plus-c";
        case GrammarKind::Plus: return "plus";
        case GrammarKind::MinPlusC: return "min-plus";
        case GrammarKind::IncScale: return "inc-scale";
        case GrammarKind::PairMinPlus: return "pairs";
        case GrammarKind::PastDiscount: return "past-discount";
        case GrammarKind::FutureDiscount: return "future-discount";
        case GrammarKind::GlobalDiscount: return "global-discount";
        case GrammarKind::AffineLinear: return "affine";
    }
    return "?";
}

std::optional<GrammarKind> grammar_from_name(std::string_view name) {
    for (GrammarKind g : {GrammarKind::PlusC, GrammarKind::Plus, GrammarKind::MinPlusC,
                          GrammarKind::IncScale, GrammarKind::PairMinPlus,
                          GrammarKind::PastDiscount, GrammarKind::FutureDiscount,
                          GrammarKind::GlobalDiscount, GrammarKind::AffineLinear})
        if (name == grammar_name(g)) return g;
    return std::nullopt;
}

bool grammar_uses_pairs(GrammarKind g) {
    switch (g) {
        case GrammarKind::IncScale:
        case GrammarKind::PairMinPlus:
        case GrammarKind::FutureDiscount:
        case GrammarKind::GlobalDiscount:
            return true;
        default:
            return false;
    }
}

Semiring pair_semiring(GrammarKind g) {
    return g == GrammarKind::PairMinPlus ? Semiring::MinPlus : Semiring::PlusTimes;
}

Value grammar_identity(GrammarKind g) {
    if (!grammar_uses_pairs(g)) return Value(ExtRational(0));
    Semiring s = pair_semiring(g);
    return Value::make_pair(sr_zero(s), sr_one(s));
}

ExtRational sr_plus(Semiring s, const ExtRational& a, const ExtRational& b) {
    return s == Semiring::MinPlus ? min(a, b) : a + b;
}

ExtRational sr_times(Semiring s, const ExtRational& a, const ExtRational& b) {
    return s == Semiring::MinPlus ? a + b : a * b;
}

ExtRational sr_zero(Semiring s) {
    return s == Semiring::MinPlus ? ExtRational::infinity() : ExtRational(0);
}

ExtRational sr_one(Semiring s) {
    return s == Semiring::MinPlus ? ExtRational(0) : ExtRational(1);
}

namespace {

GrammarCheck fail(std::string msg) { return {false, std::move(msg)}; }

bool finite_const(const ExprPtr& e) {
    return e->kind == ExprKind::Const && e->k1.is_finite();
}

GrammarCheck check_scalar_inc(const ExprPtr& e, GrammarKind g);

// t := min(t, ...) | t + c | c | x  (min allowed only for MinPlusC)
GrammarCheck check_scalar_inc(const ExprPtr& e, GrammarKind g) {
    switch (e->kind) {
        case ExprKind::Const:
            if (g == GrammarKind::PlusC && e->k1.is_infinite())
                return fail("infinite constant outside a min grammar");
            return {};
        case ExprKind::Reg:
            return {};
        case ExprKind::Plus: {
            bool lc = e->args[0]->kind == ExprKind::Const;
            bool rc = e->args[1]->kind == ExprKind::Const;
            if (!lc && !rc) return fail("binary + over two registers");
            const ExprPtr& sub = lc ? e->args[1] : e->args[0];
            return check_scalar_inc(sub, g);
        }
        case ExprKind::Min: {
            if (g != GrammarKind::MinPlusC) return fail("min outside the min-plus grammar");
            if (e->args.size() < 2) return fail("min needs arity >= 2");
            for (const auto& a : e->args) {
                auto r = check_scalar_inc(a, g);
                if (!r.ok) return r;
            }
            return {};
        }
        default:
            return fail("operator not in the increment grammar");
    }
}

// t := t + t | c | x
GrammarCheck check_plus(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::Const:
            if (e->k1.is_infinite()) return fail("infinite constant in additive grammar");
            return {};
        case ExprKind::Reg:
            return {};
        case ExprKind::Plus:
            for (const auto& a : e->args) {
                auto r = check_plus(a);
                if (!r.ok) return r;
            }
            return {};
        default:
            return fail("operator not in the additive grammar");
    }
}

// t := d*t + c (any nesting of +c and *d around a register or constant)
GrammarCheck check_inc_scale_scalar(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::Const:
            if (e->k1.is_infinite()) return fail("infinite constant in inc-scale grammar");
            return {};
        case ExprKind::Reg:
            return {};
        case ExprKind::Plus: {
            bool lc = finite_const(e->args[0]);
            bool rc = finite_const(e->args[1]);
            if (!lc && !rc) return fail("binary + needs a constant argument here");
            return check_inc_scale_scalar(lc ? e->args[1] : e->args[0]);
        }
        case ExprKind::Scale:
            if (e->k1.is_infinite()) return fail("infinite scale factor");
            return check_inc_scale_scalar(e->args[0]);
        default:
            return fail("operator not in the inc-scale grammar");
    }
}

// e := (c,d) | x | e1 (x) e2 | e (+) d | e1[e2]
GrammarCheck check_pair(const ExprPtr& e, GrammarKind g) {
    bool allow_inf = g == GrammarKind::PairMinPlus;
    switch (e->kind) {
        case ExprKind::PairConst:
            if (!allow_inf && (e->k1.is_infinite() || e->k2.is_infinite()))
                return fail("infinite pair component outside min-plus pairs");
            return {};
        case ExprKind::Reg:
            return {};
        case ExprKind::PairSum:
        case ExprKind::Subst:
            for (const auto& a : e->args) {
                auto r = check_pair(a, g);
                if (!r.ok) return r;
            }
            return {};
        case ExprKind::PairIncr: {
            if (e->incr_is_pair) return fail("pair increment constant in a scalar-increment pair grammar");
            if (!allow_inf && e->k1.is_infinite()) return fail("infinite increment");
            return check_pair(e->args[0], g);
        }
        default:
            return fail("scalar operator in a pair grammar");
    }
}

// e := (c,d) | x | e[c,d]
GrammarCheck check_future(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::PairConst:
            if (e->k1.is_infinite() || e->k2.is_infinite())
                return fail("infinite constant in future-discount grammar");
            return {};
        case ExprKind::Reg:
            return {};
        case ExprKind::Subst:
            if (e->args[1]->kind != ExprKind::PairConst)
                return fail("future-discount substitution needs a (c, d) constant");
            if (e->args[1]->k1.is_infinite() || e->args[1]->k2.is_infinite())
                return fail("infinite constant in future-discount grammar");
            return check_future(e->args[0]);
        default:
            return fail("operator not in the future-discount grammar");
    }
}

// e := (0,1) | x | e (+) (c,d) with c in Q+, d in [0,1]
GrammarCheck check_global(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::PairConst:
            if (!(e->k1 == ExtRational(0) && e->k2 == ExtRational(1)))
                return fail("global-discount literal must be (0, 1)");
            return {};
        case ExprKind::Reg:
            return {};
        case ExprKind::PairIncr: {
            if (!e->incr_is_pair)
                return fail("global-discount increment needs a (c, d) constant");
            if (e->k1.is_infinite() || e->k1.sign() < 0)
                return fail("global-discount cost must be a nonnegative rational");
            if (e->k2.is_infinite() || e->k2.sign() < 0 || ExtRational(1) < e->k2)
                return fail("global-discount factor must lie in [0, 1]");
            return check_global(e->args[0]);
        }
        default:
            return fail("operator not in the global-discount grammar");
    }
}

}  // namespace

GrammarCheck validate_grammar(const ExprPtr& e, GrammarKind g) {
    if (!e) return fail("empty expression");
    switch (g) {
        case GrammarKind::PlusC:
        case GrammarKind::MinPlusC:
            return check_scalar_inc(e, g);
        case GrammarKind::Plus:
            return check_plus(e);
        case GrammarKind::PastDiscount:
            return check_inc_scale_scalar(e);
        case GrammarKind::AffineLinear:
            if (!affine_form(e)) return fail("expression is not affine");
            return {};
        case GrammarKind::IncScale:
        case GrammarKind::PairMinPlus:
            return check_pair(e, g);
        case GrammarKind::FutureDiscount:
            return check_future(e);
        case GrammarKind::GlobalDiscount:
            return check_global(e);
    }
    return fail("unknown grammar");
}

std::optional<AffineForm> affine_form(const ExprPtr& e) {
    if (!e) return std::nullopt;
    switch (e->kind) {
        case ExprKind::Const: {
            if (e->k1.is_infinite()) return std::nullopt;
            AffineForm f;
            f.constant = e->k1;
            return f;
        }
        case ExprKind::Reg: {
            AffineForm f;
            f.constant = ExtRational(0);
            f.coeffs[e->reg] = ExtRational(1);
            return f;
        }
        case ExprKind::Plus: {
            auto a = affine_form(e->args[0]);
            auto b = affine_form(e->args[1]);
            if (!a || !b) return std::nullopt;
            for (const auto& [r, c] : b->coeffs) {
                auto [it, fresh] = a->coeffs.emplace(r, c);
                if (!fresh) it->second += c;
            }
            a->constant += b->constant;
            return a;
        }
        case ExprKind::Scale: {
            if (e->k1.is_infinite()) return std::nullopt;
            auto a = affine_form(e->args[0]);
            if (!a) return std::nullopt;
            for (auto& [r, c] : a->coeffs) c *= e->k1;
            a->constant *= e->k1;
            return a;
        }
        default:
            return std::nullopt;
    }
}

std::optional<MinPlusForm> minplus_form(const ExprPtr& e) {
    if (!e) return std::nullopt;
    switch (e->kind) {
        case ExprKind::Const: {
            MinPlusForm f;
            f.constant = e->k1;
            return f;
        }
        case ExprKind::Reg: {
            MinPlusForm f;
            f.terms.emplace_back(e->reg, ExtRational(0));
            return f;
        }
        case ExprKind::Plus: {
            bool lc = e->args[0]->kind == ExprKind::Const;
            bool rc = e->args[1]->kind == ExprKind::Const;
            if (!lc && !rc) return std::nullopt;
            const ExtRational& k = (lc ? e->args[0] : e->args[1])->k1;
            auto f = minplus_form(lc ? e->args[1] : e->args[0]);
            if (!f) return std::nullopt;
            for (auto& [r, a] : f->terms) a += k;
            if (f->constant) *f->constant += k;
            return f;
        }
        case ExprKind::Min: {
            MinPlusForm f;
            for (const auto& arg : e->args) {
                auto g = minplus_form(arg);
                if (!g) return std::nullopt;
                f.terms.insert(f.terms.end(), g->terms.begin(), g->terms.end());
                if (g->constant)
                    f.constant = f.constant ? min(*f.constant, *g->constant) : *g->constant;
            }
            return f;
        }
        default:
            return std::nullopt;
    }
}

LinComb LinComb::of_const(ExtRational c) {
    LinComb l;
    l.constant = std::move(c);
    return l;
}

LinComb LinComb::of_reg(RegIdx r, Semiring s) {
    LinComb l;
    l.terms.emplace_back(r, sr_one(s));
    return l;
}

void LinComb::add_term(RegIdx r, ExtRational w, Semiring s) {
    for (auto& [tr, tw] : terms) {
        if (tr == r) {
            tw = sr_plus(s, tw, w);
            return;
        }
    }
    terms.emplace_back(r, std::move(w));
}

void LinComb::add_const(const ExtRational& c, Semiring s) {
    constant = constant ? sr_plus(s, *constant, c) : c;
}

void LinComb::merge(const LinComb& o, Semiring s) {
    for (const auto& [r, w] : o.terms) add_term(r, w, s);
    if (o.constant) add_const(*o.constant, s);
}

void LinComb::scale_by(const ExtRational& w, Semiring s) {
    for (auto& [r, tw] : terms) tw = sr_times(s, tw, w);
    if (constant) *constant = sr_times(s, *constant, w);
}

LinComb LinComb::substituted(const std::vector<LinComb>& reg_forms, Semiring s) const {
    LinComb out;
    out.constant = constant;
    for (const auto& [r, w] : terms) {
        LinComb part = reg_forms.at(static_cast<size_t>(r));
        part.scale_by(w, s);
        out.merge(part, s);
    }
    return out;
}

ExtRational LinComb::eval(const std::vector<ExtRational>& regs, Semiring s) const {
    ExtRational acc = constant ? *constant : sr_zero(s);
    for (const auto& [r, w] : terms)
        acc = sr_plus(s, acc, sr_times(s, regs.at(static_cast<size_t>(r)), w));
    return acc;
}

ExprPtr LinComb::to_expr(Semiring s) const {
    if (s == Semiring::MinPlus) {
        std::vector<ExprPtr> parts;
        for (const auto& [r, w] : terms) {
            if (w.is_infinite()) continue;  // inf offset: term never contributes
            parts.push_back(w.is_zero() ? Expr::reg_ref(r)
                                        : Expr::plus(Expr::reg_ref(r), Expr::constant(w)));
        }
        if (constant && (parts.empty() || constant->is_finite()))
            parts.push_back(Expr::constant(*constant));
        if (parts.empty()) return Expr::constant(ExtRational::infinity());
        return Expr::min_of(std::move(parts));
    }
    ExprPtr acc;
    for (const auto& [r, w] : terms) {
        if (w.is_zero()) continue;
        ExprPtr t = w == ExtRational(1) ? Expr::reg_ref(r) : Expr::scale(w, Expr::reg_ref(r));
        acc = acc ? Expr::plus(acc, t) : t;
    }
    if (constant && !constant->is_zero())
        acc = acc ? Expr::plus(acc, Expr::constant(*constant)) : Expr::constant(*constant);
    return acc ? acc : Expr::constant(ExtRational(0));
}

std::optional<LinComb> lincomb_of_expr(const ExprPtr& e, Semiring s) {
    if (s == Semiring::MinPlus) {
        auto f = minplus_form(e);
        if (!f) return std::nullopt;
        LinComb l;
        for (auto& [r, a] : f->terms) l.add_term(r, a, s);
        if (f->constant && f->constant->is_finite()) l.constant = *f->constant;
        return l;
    }
    auto f = affine_form(e);
    if (!f) return std::nullopt;
    LinComb l;
    for (auto& [r, c] : f->coeffs)
        if (!c.is_zero()) l.terms.emplace_back(r, c);
    if (!f->constant.is_zero()) l.constant = f->constant;
    return l;
}

namespace {

void render(const ExprPtr& e, const std::vector<std::string>& names, std::ostream& os,
            bool parenthesize_sum) {
    switch (e->kind) {
        case ExprKind::Const:
            os << e->k1.str();
            break;
        case ExprKind::Reg:
            os << names.at(static_cast<size_t>(e->reg));
            break;
        case ExprKind::Plus: {
            if (parenthesize_sum) os << "(";
            render(e->args[0], names, os, false);
            os << " + ";
            render(e->args[1], names, os, false);
            if (parenthesize_sum) os << ")";
            break;
        }
        case ExprKind::Min: {
            os << "min(";
            for (size_t i = 0; i < e->args.size(); ++i) {
                if (i) os << ", ";
                render(e->args[i], names, os, false);
            }
            os << ")";
            break;
        }
        case ExprKind::Scale:
            os << e->k1.str() << " * ";
            render(e->args[0], names, os, true);
            break;
        case ExprKind::PairConst:
            os << "(" << e->k1.str() << ", " << e->k2.str() << ")";
            break;
        case ExprKind::PairSum: {
            os << "pairsum(";
            render(e->args[0], names, os, false);
            os << ", ";
            render(e->args[1], names, os, false);
            os << ")";
            break;
        }
        case ExprKind::PairIncr: {
            os << "incr(";
            render(e->args[0], names, os, false);
            if (e->incr_is_pair)
                os << ", (" << e->k1.str() << ", " << e->k2.str() << "))";
            else
                os << ", " << e->k1.str() << ")";
            break;
        }
        case ExprKind::Subst: {
            if (e->args[1]->kind == ExprKind::PairConst &&
                e->args[0]->kind == ExprKind::Reg) {
                render(e->args[0], names, os, false);
                os << "[" << e->args[1]->k1.str() << ", " << e->args[1]->k2.str() << "]";
                break;
            }
            os << "subst(";
            render(e->args[0], names, os, false);
            os << ", ";
            render(e->args[1], names, os, false);
            os << ")";
            break;
        }
    }
}

}  // namespace

std::string expr_to_string(const ExprPtr& e, const std::vector<std::string>& reg_names) {
    std::ostringstream os;
    render(e, reg_names, os, false);
    return os.str();
}

}  // namespace cra
