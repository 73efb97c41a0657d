#include <algorithm>
#include <functional>
#include <vector>

#include "msq/mra.hpp"

namespace msq::mra {

void Relation::add(const Tuple& t, Count n) {
    if (t.size() != schema.size())
        throw Error(ErrorKind::SchemaViolation, "tuple arity differs from the relation schema");
    for (const auto& [a, v] : t)
        if (!schema.count(a)) throw Error(ErrorKind::SchemaViolation, "tuple attribute " + a + " is not in the schema");
    tuples.add(t, n);
}

SchemaMap schemas(const Database& db) {
    SchemaMap out;
    for (const auto& [name, r] : db) out.emplace(name, r.schema);
    return out;
}

FormulaPtr f_eq(Operand l, Operand r) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Eq;
    f->l = std::move(l);
    f->r = std::move(r);
    return f;
}

namespace {

FormulaPtr connective(Formula::Kind k, FormulaPtr a, FormulaPtr b) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->a = std::move(a);
    f->b = std::move(b);
    return f;
}

}  // namespace

FormulaPtr f_and(FormulaPtr a, FormulaPtr b) { return connective(Formula::Kind::And, std::move(a), std::move(b)); }
FormulaPtr f_or(FormulaPtr a, FormulaPtr b) { return connective(Formula::Kind::Or, std::move(a), std::move(b)); }
FormulaPtr f_not(FormulaPtr a) { return connective(Formula::Kind::Not, std::move(a), nullptr); }

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
        case Formula::Kind::Eq: return a->l == b->l && a->r == b->r;
        case Formula::Kind::Not: return equal(a->a, b->a);
        default: return equal(a->a, b->a) && equal(a->b, b->b);
    }
}

Schema formula_attrs(const FormulaPtr& f) {
    Schema out;
    std::function<void(const FormulaPtr&)> go = [&](const FormulaPtr& g) {
        if (g->kind == Formula::Kind::Eq) {
            if (g->l.is_attr) out.insert(g->l.attr);
            if (g->r.is_attr) out.insert(g->r.attr);
            return;
        }
        go(g->a);
        if (g->b) go(g->b);
    };
    go(f);
    return out;
}

namespace {

std::shared_ptr<Expr> node(Expr::Kind k) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    return e;
}

}  // namespace

ExprPtr e_rel(std::string name) {
    auto e = node(Expr::Kind::Rel);
    e->name = std::move(name);
    return e;
}

ExprPtr e_select(FormulaPtr f, ExprPtr a) {
    auto e = node(Expr::Kind::Select);
    e->cond = std::move(f);
    e->left = std::move(a);
    return e;
}

ExprPtr e_project(Schema s, ExprPtr a) {
    auto e = node(Expr::Kind::Project);
    e->attrs = std::move(s);
    e->left = std::move(a);
    return e;
}

ExprPtr e_rename(Attr from, Attr to, ExprPtr a) {
    auto e = node(Expr::Kind::Rename);
    e->from = std::move(from);
    e->to = std::move(to);
    e->left = std::move(a);
    return e;
}

namespace {

ExprPtr binary(Expr::Kind k, ExprPtr a, ExprPtr b) {
    auto e = node(k);
    e->left = std::move(a);
    e->right = std::move(b);
    return e;
}

}  // namespace

ExprPtr e_join(ExprPtr a, ExprPtr b) { return binary(Expr::Kind::Join, std::move(a), std::move(b)); }
ExprPtr e_union(ExprPtr a, ExprPtr b) { return binary(Expr::Kind::Union, std::move(a), std::move(b)); }
ExprPtr e_except(ExprPtr a, ExprPtr b) { return binary(Expr::Kind::Except, std::move(a), std::move(b)); }

bool equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
        case Expr::Kind::Rel: return a->name == b->name;
        case Expr::Kind::Select: return equal(a->cond, b->cond) && equal(a->left, b->left);
        case Expr::Kind::Project: return a->attrs == b->attrs && equal(a->left, b->left);
        case Expr::Kind::Rename: return a->from == b->from && a->to == b->to && equal(a->left, b->left);
        default: return equal(a->left, b->left) && equal(a->right, b->right);
    }
}

std::size_t node_count(const ExprPtr& e) {
    if (!e) return 0;
    return 1 + node_count(e->left) + node_count(e->right);
}

std::set<std::string> relation_names(const ExprPtr& e) {
    std::set<std::string> out;
    std::function<void(const ExprPtr&)> go = [&](const ExprPtr& x) {
        if (!x) return;
        if (x->kind == Expr::Kind::Rel) out.insert(x->name);
        go(x->left);
        go(x->right);
    };
    go(e);
    return out;
}

Schema all_attrs(const ExprPtr& e, const SchemaMap& db) {
    Schema out;
    std::function<void(const ExprPtr&)> go = [&](const ExprPtr& x) {
        if (!x) return;
        switch (x->kind) {
            case Expr::Kind::Rel:
                if (auto it = db.find(x->name); it != db.end()) out.insert(it->second.begin(), it->second.end());
                break;
            case Expr::Kind::Select: {
                auto fa = formula_attrs(x->cond);
                out.insert(fa.begin(), fa.end());
                break;
            }
            case Expr::Kind::Project: out.insert(x->attrs.begin(), x->attrs.end()); break;
            case Expr::Kind::Rename:
                out.insert(x->from);
                out.insert(x->to);
                break;
            default: break;
        }
        go(x->left);
        go(x->right);
    };
    go(e);
    return out;
}

namespace {

std::string join_names(const Schema& s) {
    std::string out = "{";
    for (const auto& a : s) out += (out.size() > 1 ? "," : "") + a;
    return out + "}";
}

}  // namespace

Schema schema_of(const ExprPtr& e, const SchemaMap& db) {
    switch (e->kind) {
        case Expr::Kind::Rel: {
            auto it = db.find(e->name);
            if (it == db.end()) throw Error(ErrorKind::UnknownRelation, "unknown relation " + e->name);
            return it->second;
        }
        case Expr::Kind::Select: {
            auto s = schema_of(e->left, db);
            for (const auto& a : formula_attrs(e->cond))
                if (!s.count(a)) throw Error(ErrorKind::SchemaViolation, "select: attribute " + a + " not in " + join_names(s));
            return s;
        }
        case Expr::Kind::Project: {
            auto s = schema_of(e->left, db);
            for (const auto& a : e->attrs)
                if (!s.count(a)) throw Error(ErrorKind::SchemaViolation, "project: attribute " + a + " not in " + join_names(s));
            return e->attrs;
        }
        case Expr::Kind::Rename: {
            auto s = schema_of(e->left, db);
            if (!s.count(e->from))
                throw Error(ErrorKind::SchemaViolation, "rename: attribute " + e->from + " not in " + join_names(s));
            if (e->from == e->to) return s;
            if (s.count(e->to))
                throw Error(ErrorKind::SchemaViolation, "rename: attribute " + e->to + " already in " + join_names(s));
            s.erase(e->from);
            s.insert(e->to);
            return s;
        }
        case Expr::Kind::Join: {
            auto s = schema_of(e->left, db);
            auto r = schema_of(e->right, db);
            s.insert(r.begin(), r.end());
            return s;
        }
        case Expr::Kind::Union:
        case Expr::Kind::Except: {
            auto s = schema_of(e->left, db);
            auto r = schema_of(e->right, db);
            if (s != r)
                throw Error(ErrorKind::SchemaViolation, std::string(e->kind == Expr::Kind::Union ? "union" : "except") +
                                                            ": operand schemas " + join_names(s) + " and " + join_names(r) +
                                                            " differ");
            return s;
        }
    }
    return {};
}

namespace {

const Value& operand_value(const Operand& o, const Tuple& t) {
    if (!o.is_attr) return o.value;
    auto it = t.find(o.attr);
    if (it == t.end()) throw Error(ErrorKind::SchemaViolation, "selection attribute " + o.attr + " missing from tuple");
    return it->second;
}

}  // namespace

bool eval_selection(const FormulaPtr& f, const Tuple& t) {
    switch (f->kind) {
        case Formula::Kind::Eq: return operand_value(f->l, t) == operand_value(f->r, t);
        case Formula::Kind::And: return eval_selection(f->a, t) && eval_selection(f->b, t);
        case Formula::Kind::Or: return eval_selection(f->a, t) || eval_selection(f->b, t);
        case Formula::Kind::Not: return !eval_selection(f->a, t);
    }
    return false;
}

namespace {

Tuple restrict(const Tuple& t, const Schema& s) {
    Tuple out;
    for (const auto& a : s) out.emplace(a, t.at(a));
    return out;
}

Relation eval_checked(const ExprPtr& e, const Database& db) {
    switch (e->kind) {
        case Expr::Kind::Rel: return db.at(e->name);
        case Expr::Kind::Select: {
            auto r1 = eval_checked(e->left, db);
            Relation out{r1.schema, {}};
            for (const auto& [t, n] : r1.tuples)
                if (eval_selection(e->cond, t)) out.tuples.add(t, n);
            return out;
        }
        case Expr::Kind::Project: {
            auto r1 = eval_checked(e->left, db);
            Relation out{e->attrs, {}};
            for (const auto& [t, n] : r1.tuples) out.tuples.add(restrict(t, e->attrs), n);
            return out;
        }
        case Expr::Kind::Rename: {
            auto r1 = eval_checked(e->left, db);
            if (e->from == e->to) return r1;
            Relation out{r1.schema, {}};
            out.schema.erase(e->from);
            out.schema.insert(e->to);
            for (const auto& [t, n] : r1.tuples) {
                Tuple u = t;
                auto node = u.extract(e->from);
                node.key() = e->to;
                u.insert(std::move(node));
                out.tuples.add(u, n);
            }
            return out;
        }
        case Expr::Kind::Join: {
            auto r1 = eval_checked(e->left, db);
            auto r2 = eval_checked(e->right, db);
            Schema shared;
            std::set_intersection(r1.schema.begin(), r1.schema.end(), r2.schema.begin(), r2.schema.end(),
                                  std::inserter(shared, shared.end()));
            std::map<Tuple, std::vector<std::pair<const Tuple*, Count>>> index;
            for (const auto& [t, n] : r2.tuples) index[restrict(t, shared)].emplace_back(&t, n);
            Relation out{r1.schema, {}};
            out.schema.insert(r2.schema.begin(), r2.schema.end());
            for (const auto& [t1, n1] : r1.tuples) {
                auto it = index.find(restrict(t1, shared));
                if (it == index.end()) continue;
                for (const auto& [t2, n2] : it->second) {
                    Tuple merged = t1;
                    merged.insert(t2->begin(), t2->end());
                    out.tuples.add(merged, checked_mul(n1, n2));
                }
            }
            return out;
        }
        case Expr::Kind::Union: {
            auto r1 = eval_checked(e->left, db);
            auto r2 = eval_checked(e->right, db);
            for (const auto& [t, n] : r2.tuples) r1.tuples.add(t, n);
            return r1;
        }
        case Expr::Kind::Except: {
            auto r1 = eval_checked(e->left, db);
            auto r2 = eval_checked(e->right, db);
            Relation out{r1.schema, {}};
            for (const auto& [t, n] : r1.tuples)
                if (!r2.tuples.contains(t)) out.tuples.add(t, n);
            return out;
        }
    }
    return {};
}

}  // namespace

Relation eval_expr(const ExprPtr& e, const Database& db) {
    schema_of(e, schemas(db));
    return eval_checked(e, db);
}

bool selections_atomic(const ExprPtr& e) {
    if (!e) return true;
    if (e->kind == Expr::Kind::Select && !e->cond->atomic()) return false;
    return selections_atomic(e->left) && selections_atomic(e->right);
}

namespace {

ExprPtr reduce_formula(const FormulaPtr& f, const ExprPtr& e) {
    switch (f->kind) {
        case Formula::Kind::Eq: return e_select(f, e);
        case Formula::Kind::And: return reduce_formula(f->b, reduce_formula(f->a, e));
        case Formula::Kind::Not: return e_except(e, reduce_formula(f->a, e));
        case Formula::Kind::Or: {
            auto only_a = reduce_formula(f_and(f->a, f_not(f->b)), e);
            auto only_b = reduce_formula(f_and(f_not(f->a), f->b), e);
            auto both = reduce_formula(f_and(f->a, f->b), e);
            return e_union(e_union(only_a, only_b), both);
        }
    }
    return e;
}

}  // namespace

ExprPtr reduce_selections(const ExprPtr& e) {
    switch (e->kind) {
        case Expr::Kind::Rel: return e;
        case Expr::Kind::Select: {
            auto inner = reduce_selections(e->left);
            if (inner == e->left && e->cond->atomic()) return e;
            return reduce_formula(e->cond, inner);
        }
        case Expr::Kind::Project: {
            auto inner = reduce_selections(e->left);
            return inner == e->left ? e : e_project(e->attrs, inner);
        }
        case Expr::Kind::Rename: {
            auto inner = reduce_selections(e->left);
            return inner == e->left ? e : e_rename(e->from, e->to, inner);
        }
        default: {
            auto l = reduce_selections(e->left), r = reduce_selections(e->right);
            if (l == e->left && r == e->right) return e;
            return binary(e->kind, l, r);
        }
    }
}

ExprPtr rename_all(ExprPtr e, const std::vector<std::pair<Attr, Attr>>& renaming, const Schema& schema) {
    std::vector<std::pair<Attr, Attr>> pending;
    auto is_source = [&](const Attr& a) {
        return std::any_of(pending.begin(), pending.end(), [&](const auto& p) { return p.first == a; });
    };
    Schema taken = schema;
    for (const auto& [from, to] : renaming) {
        if (!schema.count(from)) throw Error(ErrorKind::SchemaViolation, "rename: attribute " + from + " not in schema");
        if (from != to) pending.emplace_back(from, to);
        taken.insert(to);
    }
    for (const auto& [from, to] : pending)
        if (schema.count(to) && !is_source(to))
            throw Error(ErrorKind::SchemaViolation, "rename: target " + to + " collides with a kept attribute");
    Schema current = schema;
    int tmp = 0;
    while (!pending.empty()) {
        bool progressed = false;
        for (auto it = pending.begin(); it != pending.end();) {
            if (current.count(it->second)) {
                ++it;
                continue;
            }
            e = e_rename(it->first, it->second, e);
            current.erase(it->first);
            current.insert(it->second);
            it = pending.erase(it);
            progressed = true;
        }
        if (progressed) continue;
        // Every remaining target is occupied: park one source on a temporary.
        auto it = pending.begin();
        Attr t;
        do t = "_t" + std::to_string(++tmp);
        while (taken.count(t) || current.count(t));
        taken.insert(t);
        e = e_rename(it->first, t, e);
        current.erase(it->first);
        current.insert(t);
        it->first = t;
    }
    return e;
}

}  // namespace msq::mra
