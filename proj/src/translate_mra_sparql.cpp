#include <algorithm>

#include "msq/translate.hpp"

namespace msq::translate {

using sparql::Slot;

sparql::Graph g31(const mra::Database& db) {
    sparql::Graph g;
    g.insert({Value::null(), Value::null(), Value::null()});
    for (const auto& [name, r] : db) {
        std::size_t k = 0;
        for (const auto& [t, n] : r.tuples) {
            ++k;
            for (Count i = 1; i <= n; ++i) {
                Value u = Value::reserved("t:" + name + ":" + std::to_string(k) + ":" + std::to_string(i));
                g.insert({u, iri_b(), relation_iri(name)});
                for (const auto& [a, v] : t) g.insert({u, attribute_iri(a), v});
            }
        }
    }
    return g;
}

namespace {

sparql::FilterPtr f_true() { return sparql::f_not(sparql::f_false()); }

// An equivalent filter condition. All attributes are bound in every mapping
// the translated pattern produces, so two-valued and three-valued readings agree.
sparql::FilterPtr to_filter(const mra::FormulaPtr& f) {
    switch (f->kind) {
        case mra::Formula::Kind::Eq: {
            const auto& l = f->l;
            const auto& r = f->r;
            if (l.is_attr && r.is_attr) return sparql::f_eq(l.attr, r.attr);
            if (l.is_attr) return sparql::f_eq(l.attr, r.value);
            if (r.is_attr) return sparql::f_eq(r.attr, l.value);
            return l.value == r.value ? f_true() : sparql::f_false();
        }
        case mra::Formula::Kind::And: return sparql::f_and(to_filter(f->a), to_filter(f->b));
        case mra::Formula::Kind::Or: return sparql::f_or(to_filter(f->a), to_filter(f->b));
        case mra::Formula::Kind::Not: return sparql::f_not(to_filter(f->a));
    }
    return sparql::f_false();
}

struct F31 {
    const mra::SchemaMap& db;
    std::string subject;

    sparql::PatternPtr visit(const mra::ExprPtr& e) {
        using K = mra::Expr::Kind;
        switch (e->kind) {
            case K::Rel: {
                const auto& schema = db.at(e->name);
                auto y = Slot::variable(subject);
                // Right-nested AND of the attribute triples.
                sparql::PatternPtr attrs;
                for (auto it = schema.rbegin(); it != schema.rend(); ++it) {
                    auto t = sparql::p_triple(y, Slot::constant(attribute_iri(*it)), Slot::variable(*it));
                    attrs = attrs ? sparql::p_and(t, attrs) : t;
                }
                auto member = sparql::p_triple(y, Slot::constant(iri_b()), Slot::constant(relation_iri(e->name)));
                return sparql::p_select(schema, attrs ? sparql::p_and(member, attrs) : member);
            }
            case K::Join: return sparql::p_and(visit(e->left), visit(e->right));
            case K::Union: return sparql::p_union(visit(e->left), visit(e->right));
            case K::Except: return sparql::p_except(visit(e->left), visit(e->right));
            case K::Project: return sparql::p_select(e->attrs, visit(e->left));
            case K::Rename: {
                auto p = visit(e->left);
                return e->from == e->to ? p : sparql::rename_variable(p, e->from, e->to);
            }
            case K::Select: {
                auto p = visit(e->left);
                auto f = to_filter(e->cond);
                if (f->kind == sparql::Filter::Kind::False) return sparql::p_except(p, p);
                if (f->kind == sparql::Filter::Kind::Not && f->a->kind == sparql::Filter::Kind::False) return p;
                return sparql::p_filter(p, f);
            }
        }
        return nullptr;
    }
};

}  // namespace

sparql::PatternPtr f31(const mra::ExprPtr& e, const mra::SchemaMap& schemas) {
    auto schema = mra::schema_of(e, schemas);
    if (schema.empty()) throw Error(ErrorKind::Precondition, "f31 needs a non-empty result schema");
    std::set<std::string> used = mra::all_attrs(e, schemas);
    F31 t{schemas, sparql::fresh_name("Y", used)};
    sparql::PatternPtr attr_query;
    for (const auto& a : schema) {
        auto q = sparql::p_triple(Slot::constant(Value::null()), Slot::constant(Value::null()), Slot::variable(a));
        attr_query = attr_query ? sparql::p_and(attr_query, q) : q;
    }
    return sparql::p_union(t.visit(e), attr_query);
}

mra::Database g13(const sparql::Graph& g) {
    mra::Database db;
    const Value bot = Value::bottom();
    mra::Relation trip{{"O", "P", "S"}, {}};
    for (const auto& t : g) trip.add({{"S", t.s}, {"P", t.p}, {"O", t.o}});
    mra::Relation null{{"N"}, {}};
    null.add({{"N", bot}});
    mra::Relation comp{{"A", "A1", "A2"}, {}};
    comp.add({{"A1", bot}, {"A2", bot}, {"A", bot}});
    for (const auto& a : sparql::terms(g)) {
        comp.add({{"A1", a}, {"A2", a}, {"A", a}});
        comp.add({{"A1", bot}, {"A2", a}, {"A", a}});
        comp.add({{"A1", a}, {"A2", bot}, {"A", a}});
    }
    db.emplace("Trip", std::move(trip));
    db.emplace("Null", std::move(null));
    db.emplace("Comp", std::move(comp));
    return db;
}

namespace {

using mra::Operand;

mra::FormulaPtr conj(mra::FormulaPtr a, mra::FormulaPtr b) { return a ? mra::f_and(a, b) : b; }

// Triple pattern over Trip{S,P,O}.
mra::ExprPtr lambda(const sparql::PatternPtr& t) {
    static const char* const pos[3] = {"S", "P", "O"};
    const Slot* slots[3] = {&t->s, &t->p, &t->o};
    mra::FormulaPtr cond;
    std::map<std::string, std::string> last;  // variable -> latest position
    std::vector<std::pair<mra::Attr, mra::Attr>> renaming;
    mra::Schema vars, sources;
    for (int i = 0; i < 3; ++i) {
        const Slot& s = *slots[i];
        auto here = Operand::attribute(pos[i]);
        if (!s.is_var) {
            cond = conj(cond, mra::f_eq(here, Operand::constant(s.value)));
            continue;
        }
        if (auto it = last.find(s.var); it != last.end()) {
            cond = conj(cond, mra::f_eq(Operand::attribute(it->second), here));
            it->second = pos[i];
            continue;
        }
        last.emplace(s.var, pos[i]);
        renaming.emplace_back(pos[i], s.var);
        vars.insert(s.var);
        sources.insert(pos[i]);
    }
    mra::ExprPtr e = mra::e_rel("Trip");
    if (cond) e = mra::e_select(cond, e);
    mra::Schema schema = {"O", "P", "S"};
    // A variable named like a column that is not renamed away needs that column dropped first.
    bool clash = std::any_of(vars.begin(), vars.end(), [&](const auto& v) { return schema.count(v) && !sources.count(v); });
    if (clash) {
        e = mra::e_project(sources, e);
        schema = sources;
    }
    e = mra::rename_all(e, renaming, schema);
    return mra::e_project(vars, e);
}

mra::ExprPtr rename_chain(mra::ExprPtr e, const std::map<std::string, std::string>& nu) {
    for (const auto& [x, y] : nu) e = mra::e_rename(x, y, e);
    return e;
}

struct F13 {
    mra::SchemaMap db;

    F13() : db(mra::schemas(g13({}))) {}

    mra::ExprPtr visit(const sparql::PatternPtr& p) {
        using K = sparql::Pattern::Kind;
        switch (p->kind) {
            case K::Triple: return lambda(p);
            case K::And: return star(visit(p->left), visit(p->right));
            case K::Union: return mra::e_union(visit(p->left), visit(p->right));
            case K::Except: return mra::e_except(visit(p->left), visit(p->right));
            case K::Select: {
                auto e = visit(p->left);
                auto inner = sparql::in_scope(p->left);
                mra::ExprPtr delta;
                for (const auto& y : p->vars) {
                    if (inner.count(y)) continue;
                    mra::ExprPtr n = mra::e_rel("Null");
                    if (y != "N") n = mra::e_rename("N", y, n);
                    delta = delta ? mra::e_join(delta, n) : n;
                }
                return mra::e_project(p->vars, delta ? mra::e_join(e, delta) : e);
            }
            case K::Filter: {
                auto e = visit(p->left);
                const auto& f = *p->cond;
                auto bot = Operand::constant(Value::bottom());
                auto bound = [&](const std::string& x) { return mra::f_not(mra::f_eq(Operand::attribute(x), bot)); };
                switch (f.kind) {
                    case sparql::Filter::Kind::EqConst:
                        return mra::e_select(
                            mra::f_and(bound(f.x), mra::f_eq(Operand::attribute(f.x), Operand::constant(f.c))), e);
                    case sparql::Filter::Kind::EqVar:
                        return mra::e_select(mra::f_and(mra::f_and(bound(f.x), bound(f.y)),
                                                        mra::f_eq(Operand::attribute(f.x), Operand::attribute(f.y))),
                                             e);
                    case sparql::Filter::Kind::Bound: return mra::e_select(bound(f.x), e);
                    case sparql::Filter::Kind::False: return mra::e_except(e, e);
                    default: throw Error(ErrorKind::Precondition, "f13 expects atomic filter conditions");
                }
            }
        }
        return nullptr;
    }

    // Compatibility join through Comp.
    mra::ExprPtr star(const mra::ExprPtr& e1, const mra::ExprPtr& e2) {
        auto s1 = mra::schema_of(e1, db), s2 = mra::schema_of(e2, db);
        mra::Schema shared, all = s1;
        all.insert(s2.begin(), s2.end());
        std::set_intersection(s1.begin(), s1.end(), s2.begin(), s2.end(), std::inserter(shared, shared.end()));
        if (shared.empty()) return mra::e_join(e1, e2);

        std::set<std::string> used = all;
        used.insert({"A", "A1", "A2"});
        std::map<std::string, std::string> nu1, nu2;
        for (const auto& x : shared) {
            nu1[x] = sparql::fresh_name(x + "1", used);
            nu2[x] = sparql::fresh_name(x + "2", used);
        }
        mra::ExprPtr comp;
        for (const auto& x : shared) {
            mra::ExprPtr c = mra::e_rename("A2", nu2[x], mra::e_rel("Comp"));
            c = mra::e_rename("A1", nu1[x], c);
            if (x != "A") c = mra::e_rename("A", x, c);
            comp = comp ? mra::e_join(comp, c) : c;
        }
        auto joined = mra::e_join(mra::e_join(comp, rename_chain(e1, nu1)), rename_chain(e2, nu2));
        return mra::e_project(all, joined);
    }
};

}  // namespace

mra::ExprPtr f13(const sparql::PatternPtr& p) {
    if (!sparql::is_normalized(p)) throw Error(ErrorKind::Precondition, "f13 expects a normalized pattern");
    auto q = sparql::filters_atomic(p) ? p : sparql::reduce_filters(p);
    F13 t;
    return t.visit(q);
}

}  // namespace msq::translate
