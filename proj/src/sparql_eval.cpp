#include <algorithm>

#include "msq/sparql.hpp"

namespace msq::sparql {

void add_triple(Graph& g, const Triple& t) {
    if (!t.s.is_iri_like() || !t.p.is_iri_like())
        throw Error(ErrorKind::Precondition, "triple subject and predicate must be IRIs");
    g.insert(t);
}

std::set<Value> terms(const Graph& g) {
    std::set<Value> out;
    for (const auto& t : g) {
        out.insert(t.s);
        out.insert(t.p);
        out.insert(t.o);
    }
    return out;
}

// Kleene connectives, row by row.
Truth truth_and(Truth a, Truth b) {
    if (a == Truth::False || b == Truth::False) return Truth::False;
    if (a == Truth::True && b == Truth::True) return Truth::True;
    return Truth::Error;
}

Truth truth_or(Truth a, Truth b) {
    if (a == Truth::True || b == Truth::True) return Truth::True;
    if (a == Truth::False && b == Truth::False) return Truth::False;
    return Truth::Error;
}

Truth truth_not(Truth a) {
    switch (a) {
        case Truth::True: return Truth::False;
        case Truth::False: return Truth::True;
        default: return Truth::Error;
    }
}

const char* truth_name(Truth t) {
    switch (t) {
        case Truth::True: return "true";
        case Truth::False: return "false";
        default: return "error";
    }
}

namespace {

FilterPtr make_filter(Filter f) { return std::make_shared<const Filter>(std::move(f)); }

}  // namespace

FilterPtr f_eq(Var x, Value c) { return make_filter({Filter::Kind::EqConst, std::move(x), {}, std::move(c), nullptr, nullptr}); }
FilterPtr f_eq(Var x, Var y) { return make_filter({Filter::Kind::EqVar, std::move(x), std::move(y), {}, nullptr, nullptr}); }
FilterPtr f_bound(Var x) { return make_filter({Filter::Kind::Bound, std::move(x), {}, {}, nullptr, nullptr}); }
FilterPtr f_and(FilterPtr a, FilterPtr b) { return make_filter({Filter::Kind::And, {}, {}, {}, std::move(a), std::move(b)}); }
FilterPtr f_or(FilterPtr a, FilterPtr b) { return make_filter({Filter::Kind::Or, {}, {}, {}, std::move(a), std::move(b)}); }
FilterPtr f_not(FilterPtr a) { return make_filter({Filter::Kind::Not, {}, {}, {}, std::move(a), nullptr}); }
FilterPtr f_false() { return make_filter({Filter::Kind::False, {}, {}, {}, nullptr, nullptr}); }

bool equal(const FilterPtr& a, const FilterPtr& b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
        case Filter::Kind::EqConst: return a->x == b->x && a->c == b->c;
        case Filter::Kind::EqVar: return a->x == b->x && a->y == b->y;
        case Filter::Kind::Bound: return a->x == b->x;
        case Filter::Kind::False: return true;
        case Filter::Kind::Not: return equal(a->a, b->a);
        default: return equal(a->a, b->a) && equal(a->b, b->b);
    }
}

VarSet filter_vars(const FilterPtr& f) {
    VarSet out;
    switch (f->kind) {
        case Filter::Kind::EqConst:
        case Filter::Kind::Bound: out.insert(f->x); break;
        case Filter::Kind::EqVar:
            out.insert(f->x);
            out.insert(f->y);
            break;
        case Filter::Kind::False: break;
        case Filter::Kind::Not: out = filter_vars(f->a); break;
        default: {
            out = filter_vars(f->a);
            auto r = filter_vars(f->b);
            out.insert(r.begin(), r.end());
        }
    }
    return out;
}

int connectives(const FilterPtr& f) {
    switch (f->kind) {
        case Filter::Kind::Not: return 1 + connectives(f->a);
        case Filter::Kind::And:
        case Filter::Kind::Or: return 1 + connectives(f->a) + connectives(f->b);
        default: return 0;
    }
}

namespace {

PatternPtr make_pattern(Pattern p) { return std::make_shared<const Pattern>(std::move(p)); }

Pattern binary(Pattern::Kind k, PatternPtr a, PatternPtr b) {
    Pattern p{k, {}, {}, {}, std::move(a), std::move(b), nullptr, {}};
    return p;
}

}  // namespace

PatternPtr p_triple(Slot s, Slot p, Slot o) {
    if (!s.is_var && !p.is_var && !o.is_var)
        throw Error(ErrorKind::Precondition, "triple pattern needs at least one variable");
    if ((!s.is_var && !s.value.is_iri_like()) || (!p.is_var && !p.value.is_iri_like()))
        throw Error(ErrorKind::Precondition, "literal in subject or predicate position of a triple pattern");
    return make_pattern({Pattern::Kind::Triple, std::move(s), std::move(p), std::move(o), nullptr, nullptr, nullptr, {}});
}

PatternPtr p_and(PatternPtr a, PatternPtr b) { return make_pattern(binary(Pattern::Kind::And, std::move(a), std::move(b))); }
PatternPtr p_union(PatternPtr a, PatternPtr b) { return make_pattern(binary(Pattern::Kind::Union, std::move(a), std::move(b))); }
PatternPtr p_except(PatternPtr a, PatternPtr b) { return make_pattern(binary(Pattern::Kind::Except, std::move(a), std::move(b))); }

PatternPtr p_filter(PatternPtr a, FilterPtr f) {
    return make_pattern({Pattern::Kind::Filter, {}, {}, {}, std::move(a), nullptr, std::move(f), {}});
}

PatternPtr p_select(VarSet w, PatternPtr a) {
    return make_pattern({Pattern::Kind::Select, {}, {}, {}, std::move(a), nullptr, nullptr, std::move(w)});
}

bool equal(const PatternPtr& a, const PatternPtr& b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
        case Pattern::Kind::Triple: return a->s == b->s && a->p == b->p && a->o == b->o;
        case Pattern::Kind::Filter: return equal(a->cond, b->cond) && equal(a->left, b->left);
        case Pattern::Kind::Select: return a->vars == b->vars && equal(a->left, b->left);
        default: return equal(a->left, b->left) && equal(a->right, b->right);
    }
}

std::size_t node_count(const PatternPtr& p) {
    switch (p->kind) {
        case Pattern::Kind::Triple: return 1;
        case Pattern::Kind::Filter:
        case Pattern::Kind::Select: return 1 + node_count(p->left);
        default: return 1 + node_count(p->left) + node_count(p->right);
    }
}

VarSet in_scope(const PatternPtr& p) {
    switch (p->kind) {
        case Pattern::Kind::Triple: {
            VarSet out;
            for (const Slot* s : {&p->s, &p->p, &p->o})
                if (s->is_var) out.insert(s->var);
            return out;
        }
        case Pattern::Kind::And:
        case Pattern::Kind::Union: {
            auto out = in_scope(p->left);
            auto r = in_scope(p->right);
            out.insert(r.begin(), r.end());
            return out;
        }
        case Pattern::Kind::Except:
        case Pattern::Kind::Filter: return in_scope(p->left);
        case Pattern::Kind::Select: return p->vars;
    }
    return {};
}

VarSet all_vars(const PatternPtr& p) {
    VarSet out;
    switch (p->kind) {
        case Pattern::Kind::Triple: return in_scope(p);
        case Pattern::Kind::Filter:
            out = all_vars(p->left);
            for (auto& v : filter_vars(p->cond)) out.insert(v);
            return out;
        case Pattern::Kind::Select:
            out = all_vars(p->left);
            out.insert(p->vars.begin(), p->vars.end());
            return out;
        default:
            out = all_vars(p->left);
            for (auto& v : all_vars(p->right)) out.insert(v);
            return out;
    }
}

Truth eval_filter(const FilterPtr& f, const Mapping& mu) {
    switch (f->kind) {
        case Filter::Kind::EqConst: {
            auto it = mu.find(f->x);
            if (it == mu.end()) return Truth::Error;
            return it->second == f->c ? Truth::True : Truth::False;
        }
        case Filter::Kind::EqVar: {
            auto i = mu.find(f->x), j = mu.find(f->y);
            if (i == mu.end() || j == mu.end()) return Truth::Error;
            return i->second == j->second ? Truth::True : Truth::False;
        }
        case Filter::Kind::Bound: return mu.count(f->x) ? Truth::True : Truth::False;
        case Filter::Kind::False: return Truth::False;
        case Filter::Kind::Not: return truth_not(eval_filter(f->a, mu));
        case Filter::Kind::And: return truth_and(eval_filter(f->a, mu), eval_filter(f->b, mu));
        case Filter::Kind::Or: return truth_or(eval_filter(f->a, mu), eval_filter(f->b, mu));
    }
    return Truth::Error;
}

namespace {

bool compatible(const Mapping& a, const Mapping& b) {
    // Both maps are sorted; walk them in step.
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (i->first < j->first)
            ++i;
        else if (j->first < i->first)
            ++j;
        else {
            if (i->second != j->second) return false;
            ++i;
            ++j;
        }
    }
    return true;
}

bool match_slot(const Slot& s, const Value& v, Mapping& mu) {
    if (!s.is_var) return s.value == v;
    auto [it, inserted] = mu.emplace(s.var, v);
    return inserted || it->second == v;
}

Omega eval_and(const Omega& m1, const Omega& m2, const VarSet& shared) {
    // Group by the shared variables that every mapping on both sides binds;
    // pairs from different groups can never be compatible. Remaining shared
    // variables are checked pairwise, so unbound still acts as a wildcard.
    VarSet key_vars = shared;
    for (const Omega* m : {&m1, &m2})
        for (const auto& [mu, n] : *m)
            for (auto it = key_vars.begin(); it != key_vars.end();)
                it = mu.count(*it) ? std::next(it) : key_vars.erase(it);

    auto key_of = [&](const Mapping& mu) {
        std::vector<Value> k;
        for (const auto& v : key_vars) k.push_back(mu.at(v));
        return k;
    };
    std::map<std::vector<Value>, std::vector<std::pair<const Mapping*, Count>>> index;
    for (const auto& [mu, n] : m2) index[key_of(mu)].emplace_back(&mu, n);

    Omega out;
    for (const auto& [mu1, n1] : m1) {
        auto it = index.find(key_of(mu1));
        if (it == index.end()) continue;
        for (const auto& [mu2, n2] : it->second) {
            if (!compatible(mu1, *mu2)) continue;
            Mapping merged = mu1;
            merged.insert(mu2->begin(), mu2->end());
            out.add(merged, checked_mul(n1, n2));
        }
    }
    return out;
}

}  // namespace

Omega eval_pattern(const PatternPtr& p, const Graph& g, const EvalOptions& opts) {
    switch (p->kind) {
        case Pattern::Kind::Triple: {
            Omega out;
            for (const auto& t : g) {
                Mapping mu;
                if (match_slot(p->s, t.s, mu) && match_slot(p->p, t.p, mu) && match_slot(p->o, t.o, mu)) out.add(mu);
            }
            return out;
        }
        case Pattern::Kind::And: {
            auto l = in_scope(p->left), r = in_scope(p->right);
            VarSet shared;
            std::set_intersection(l.begin(), l.end(), r.begin(), r.end(), std::inserter(shared, shared.end()));
            return eval_and(eval_pattern(p->left, g, opts), eval_pattern(p->right, g, opts), shared);
        }
        case Pattern::Kind::Union: {
            auto a = eval_pattern(p->left, g, opts);
            auto b = eval_pattern(p->right, g, opts);
            if (!opts.union_as_product) return additive_union(a, b);
            Omega out;
            for (const auto& [mu, n] : a) out.add(mu, checked_mul(n, b.count(mu)));
            return out;
        }
        case Pattern::Kind::Except: {
            auto a = eval_pattern(p->left, g, opts);
            auto b = eval_pattern(p->right, g, opts);
            Omega out;
            for (const auto& [mu, n] : a) {
                Count m = b.count(mu);
                if (opts.except_as_difference)
                    out.add(mu, n > m ? n - m : 0);
                else if (m == 0)
                    out.add(mu, n);
            }
            return out;
        }
        case Pattern::Kind::Filter: {
            Omega out;
            for (const auto& [mu, n] : eval_pattern(p->left, g, opts))
                if (eval_filter(p->cond, mu) == Truth::True) out.add(mu, n);
            return out;
        }
        case Pattern::Kind::Select: {
            Omega out;
            for (const auto& [mu, n] : eval_pattern(p->left, g, opts)) {
                Mapping r;
                for (const auto& [v, c] : mu)
                    if (p->vars.count(v)) r.emplace(v, c);
                out.add(r, n);
            }
            return out;
        }
    }
    return {};
}

}  // namespace msq::sparql
