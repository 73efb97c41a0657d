#include <algorithm>
#include <functional>
#include <optional>

#include "msq/sparql.hpp"

namespace msq::sparql {

Var fresh_name(const std::string& base, std::set<std::string>& used) {
    std::string name = base;
    for (int i = 1; used.count(name); ++i) name = base + std::to_string(i);
    used.insert(name);
    return name;
}

namespace {

bool subset(const VarSet& a, const VarSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

VarSet unite(VarSet a, const VarSet& b) {
    a.insert(b.begin(), b.end());
    return a;
}

PatternPtr widen(const PatternPtr& p, const VarSet& target) {
    return in_scope(p) == target ? p : p_select(target, p);
}

}  // namespace

bool is_normalized(const PatternPtr& p) {
    switch (p->kind) {
        case Pattern::Kind::Triple: return true;
        case Pattern::Kind::And: return is_normalized(p->left) && is_normalized(p->right);
        case Pattern::Kind::Union:
        case Pattern::Kind::Except:
            return in_scope(p->left) == in_scope(p->right) && is_normalized(p->left) && is_normalized(p->right);
        case Pattern::Kind::Filter: return subset(filter_vars(p->cond), in_scope(p->left)) && is_normalized(p->left);
        case Pattern::Kind::Select: return is_normalized(p->left);
    }
    return false;
}

bool filters_atomic(const PatternPtr& p) {
    switch (p->kind) {
        case Pattern::Kind::Triple: return true;
        case Pattern::Kind::Filter: return p->cond->atomic() && filters_atomic(p->left);
        case Pattern::Kind::Select: return filters_atomic(p->left);
        default: return filters_atomic(p->left) && filters_atomic(p->right);
    }
}

PatternPtr normalize(const PatternPtr& p) {
    switch (p->kind) {
        case Pattern::Kind::Triple: return p;
        case Pattern::Kind::And: {
            auto l = normalize(p->left), r = normalize(p->right);
            if (l == p->left && r == p->right) return p;
            return p_and(l, r);
        }
        case Pattern::Kind::Union:
        case Pattern::Kind::Except: {
            auto l = normalize(p->left), r = normalize(p->right);
            auto target = unite(in_scope(l), in_scope(r));
            auto l2 = widen(l, target), r2 = widen(r, target);
            if (l2 == p->left && r2 == p->right) return p;
            return p->kind == Pattern::Kind::Union ? p_union(l2, r2) : p_except(l2, r2);
        }
        case Pattern::Kind::Filter: {
            auto l = normalize(p->left);
            auto scope = in_scope(l);
            auto fv = filter_vars(p->cond);
            if (!subset(fv, scope)) l = p_select(unite(scope, fv), l);
            if (l == p->left) return p;
            return p_filter(l, p->cond);
        }
        case Pattern::Kind::Select: {
            auto l = normalize(p->left);
            if (l == p->left) return p;
            return p_select(p->vars, l);
        }
    }
    return p;
}

namespace {

bool is_true(const FilterPtr& f) { return f->kind == Filter::Kind::Not && f->a->kind == Filter::Kind::False; }
bool is_false(const FilterPtr& f) { return f->kind == Filter::Kind::False; }

// Constant folding that is sound in 3-valued logic, with true written !false:
// false AND x = false, true AND x = x, true OR x = true, false OR x = x, !!x = x.
FilterPtr fold(const FilterPtr& f) {
    switch (f->kind) {
        case Filter::Kind::And: {
            auto a = fold(f->a), b = fold(f->b);
            if (is_false(a) || is_true(b)) return a;
            if (is_false(b) || is_true(a)) return b;
            return (a == f->a && b == f->b) ? f : f_and(a, b);
        }
        case Filter::Kind::Or: {
            auto a = fold(f->a), b = fold(f->b);
            if (is_true(a) || is_false(b)) return a;
            if (is_true(b) || is_false(a)) return b;
            return (a == f->a && b == f->b) ? f : f_or(a, b);
        }
        case Filter::Kind::Not: {
            auto a = fold(f->a);
            if (a->kind == Filter::Kind::Not) return a->a;
            return a == f->a ? f : f_not(a);
        }
        default: return f;
    }
}

}  // namespace

FilterPtr error_condition(const FilterPtr& f) {
    switch (f->kind) {
        case Filter::Kind::Bound:
        case Filter::Kind::False: return f_false();
        case Filter::Kind::EqConst: return f_not(f_bound(f->x));
        case Filter::Kind::EqVar: {
            // Same truth table as the three-case disjunction over bound(?x), bound(?y).
            return f_not(f_and(f_bound(f->x), f_bound(f->y)));
        }
        case Filter::Kind::And: {
            auto e1 = error_condition(f->a), e2 = error_condition(f->b);
            return fold(f_or(f_or(f_and(f->a, e2), f_and(e1, f->b)), f_and(e1, e2)));
        }
        case Filter::Kind::Or: {
            auto e1 = error_condition(f->a), e2 = error_condition(f->b);
            return fold(f_or(f_or(f_and(f_not(f->a), e2), f_and(e1, f_not(f->b))), f_and(e1, e2)));
        }
        case Filter::Kind::Not: return error_condition(f->a);
    }
    return f_false();
}

namespace {

void collect_constants(const FilterPtr& f, std::set<Value>& out) {
    if (f->kind == Filter::Kind::EqConst) out.insert(f->c);
    if (f->a) collect_constants(f->a, out);
    if (f->b) collect_constants(f->b, out);
}

std::size_t filter_size(const FilterPtr& f) {
    return 1 + (f->a ? filter_size(f->a) : 0) + (f->b ? filter_size(f->b) : 0);
}

enum class Verdict { Unsat, Valid, Open };

// Runs fn on every mapping over the variables and constants of fs that can
// matter: each variable is unbound, one of the constants, or one of enough
// anonymous values to tell any two apart. Returns false if there are too
// many variables to enumerate; fn returns false to stop early.
template <class Fn>
bool for_each_mapping(const std::vector<FilterPtr>& fs, Fn&& fn) {
    VarSet vars;
    std::set<Value> consts;
    for (const auto& f : fs) {
        auto v = filter_vars(f);
        vars.insert(v.begin(), v.end());
        collect_constants(f, consts);
    }
    if (vars.size() > 5) return false;
    std::vector<std::optional<Value>> domain = {std::nullopt};
    for (const auto& c : consts) domain.push_back(c);
    for (std::size_t i = 0; i < vars.size(); ++i) domain.push_back(Value::reserved("anon" + std::to_string(i)));
    std::vector<Var> vs(vars.begin(), vars.end());
    std::vector<std::size_t> pick(vs.size(), 0);
    while (true) {
        Mapping mu;
        for (std::size_t i = 0; i < vs.size(); ++i)
            if (domain[pick[i]]) mu.emplace(vs[i], *domain[pick[i]]);
        if (!fn(mu)) return true;
        std::size_t i = 0;
        while (i < pick.size() && ++pick[i] == domain.size()) pick[i++] = 0;
        if (i == pick.size()) return true;
    }
}

// Whether f can be true, or must be true, in mappings satisfying all of ctx.
Verdict classify(std::vector<FilterPtr> ctx, const FilterPtr& f) {
    bool some_true = false, some_other = false;
    auto conds = ctx;
    conds.push_back(f);
    bool done = for_each_mapping(conds, [&](const Mapping& mu) {
        for (const auto& c : ctx)
            if (eval_filter(c, mu) != Truth::True) return true;
        (eval_filter(f, mu) == Truth::True ? some_true : some_other) = true;
        return !(some_true && some_other);
    });
    if (!done || (some_true && some_other)) return Verdict::Open;
    return some_true ? Verdict::Valid : Verdict::Unsat;
}

// Error(f) is equivalent to false when f never evaluates to error. Error
// conditions themselves are two-valued, so this cuts off Error(Error(..)).
FilterPtr error_of(const FilterPtr& f) {
    bool errs = false;
    bool done = for_each_mapping({f}, [&](const Mapping& mu) {
        errs = eval_filter(f, mu) == Truth::Error;
        return !errs;
    });
    return (done && !errs) ? f_false() : error_condition(f);
}

// Returns nullptr for the empty pattern (a filter that folded to false).
// Every mapping of p satisfies ctx, so branches contradicting it are dropped.
PatternPtr reduce_cond(const PatternPtr& p, const FilterPtr& raw, std::vector<FilterPtr>& ctx) {
    auto f = fold(raw);
    if (f->kind == Filter::Kind::False) return nullptr;
    switch (classify(ctx, f)) {
        case Verdict::Unsat: return nullptr;
        case Verdict::Valid: return p;
        case Verdict::Open: break;
    }
    switch (f->kind) {
        case Filter::Kind::False: return nullptr;
        case Filter::Kind::EqConst:
        case Filter::Kind::EqVar:
        case Filter::Kind::Bound: return p_filter(p, f);
        case Filter::Kind::And: {
            // Conjunction commutes; the smaller side goes first so it can prune the other.
            auto a = f->a, b = f->b;
            if (filter_size(b) < filter_size(a)) std::swap(a, b);
            auto first = reduce_cond(p, a, ctx);
            if (!first) return nullptr;
            ctx.push_back(a);
            auto out = reduce_cond(first, b, ctx);
            ctx.pop_back();
            return out;
        }
        case Filter::Kind::Or: {
            const auto& a = f->a;
            const auto& b = f->b;
            std::vector<FilterPtr> branches = {
                f_and(a, b),
                f_and(a, f_not(b)),
                f_and(f_not(a), b),
                f_and(a, error_of(b)),
                f_and(error_of(a), b),
            };
            PatternPtr out;
            for (const auto& br : branches) {
                auto q = reduce_cond(p, br, ctx);
                if (!q) continue;
                out = out ? p_union(out, q) : q;
            }
            return out;
        }
        case Filter::Kind::Not: {
            // De Morgan holds in three-valued logic; pushing the negation down
            // keeps the copies of p made below to atoms.
            const auto& g = f->a;
            if (g->kind == Filter::Kind::And) return reduce_cond(p, f_or(f_not(g->a), f_not(g->b)), ctx);
            if (g->kind == Filter::Kind::Or) return reduce_cond(p, f_and(f_not(g->a), f_not(g->b)), ctx);
            PatternPtr out = p;
            if (auto pos = reduce_cond(p, f->a, ctx)) out = p_except(out, pos);
            if (auto err = reduce_cond(p, error_of(f->a), ctx)) out = p_except(out, err);
            return out;
        }
    }
    return nullptr;
}

}  // namespace

PatternPtr reduce_filters(const PatternPtr& p) {
    switch (p->kind) {
        case Pattern::Kind::Triple: return p;
        case Pattern::Kind::Filter: {
            auto inner = reduce_filters(p->left);
            if (inner == p->left && p->cond->atomic() && p->cond->kind != Filter::Kind::False) return p;
            std::vector<FilterPtr> ctx;
            auto out = reduce_cond(inner, p->cond, ctx);
            return out ? out : p_except(inner, inner);
        }
        case Pattern::Kind::Select: {
            auto l = reduce_filters(p->left);
            return l == p->left ? p : p_select(p->vars, l);
        }
        default: {
            auto l = reduce_filters(p->left), r = reduce_filters(p->right);
            if (l == p->left && r == p->right) return p;
            if (p->kind == Pattern::Kind::And) return p_and(l, r);
            if (p->kind == Pattern::Kind::Union) return p_union(l, r);
            return p_except(l, r);
        }
    }
}

namespace {

FilterPtr rename_in_filter(const FilterPtr& f, const Var& x, const Var& y) {
    auto v = [&](const Var& z) { return z == x ? y : z; };
    switch (f->kind) {
        case Filter::Kind::EqConst: return f->x == x ? f_eq(y, f->c) : f;
        case Filter::Kind::EqVar: return (f->x == x || f->y == x) ? f_eq(v(f->x), v(f->y)) : f;
        case Filter::Kind::Bound: return f->x == x ? f_bound(y) : f;
        case Filter::Kind::False: return f;
        case Filter::Kind::Not: return f_not(rename_in_filter(f->a, x, y));
        case Filter::Kind::And: return f_and(rename_in_filter(f->a, x, y), rename_in_filter(f->b, x, y));
        case Filter::Kind::Or: return f_or(rename_in_filter(f->a, x, y), rename_in_filter(f->b, x, y));
    }
    return f;
}

Slot rename_slot(const Slot& s, const Var& x, const Var& y) {
    return (s.is_var && s.var == x) ? Slot::variable(y) : s;
}

// Requires y not in scope of p. Occurrences of y that the renaming could
// capture (hidden under SELECT, right of EXCEPT, or only in a filter) are
// first moved to a fresh variable.
PatternPtr subs(const PatternPtr& p, const Var& x, const Var& y, std::set<std::string>& used) {
    switch (p->kind) {
        case Pattern::Kind::Triple:
            return p_triple(rename_slot(p->s, x, y), rename_slot(p->p, x, y), rename_slot(p->o, x, y));
        case Pattern::Kind::And: return p_and(subs(p->left, x, y, used), subs(p->right, x, y, used));
        case Pattern::Kind::Union: return p_union(subs(p->left, x, y, used), subs(p->right, x, y, used));
        case Pattern::Kind::Except: {
            auto r = p->right;
            if (in_scope(r).count(y)) r = subs(r, y, fresh_name(y, used), used);
            return p_except(subs(p->left, x, y, used), subs(r, x, y, used));
        }
        case Pattern::Kind::Filter: {
            auto cond = p->cond;
            if (filter_vars(cond).count(y)) cond = rename_in_filter(cond, y, fresh_name(y, used));
            return p_filter(subs(p->left, x, y, used), rename_in_filter(cond, x, y));
        }
        case Pattern::Kind::Select: {
            if (!p->vars.count(x)) return p;
            auto inner = p->left;
            if (in_scope(inner).count(y)) inner = subs(inner, y, fresh_name(y, used), used);
            inner = subs(inner, x, y, used);
            VarSet w = p->vars;
            w.erase(x);
            w.insert(y);
            return p_select(w, inner);
        }
    }
    return p;
}

}  // namespace

PatternPtr rename_variable(const PatternPtr& p, const Var& x, const Var& y) {
    auto scope = in_scope(p);
    if (!scope.count(x)) throw Error(ErrorKind::InvalidRename, "?" + x + " is not in scope");
    if (scope.count(y)) throw Error(ErrorKind::InvalidRename, "?" + y + " is already in scope");
    auto used = all_vars(p);
    used.insert(x);
    used.insert(y);
    return subs(p, x, y, used);
}

}  // namespace msq::sparql
