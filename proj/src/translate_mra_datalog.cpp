#include <algorithm>

#include "msq/translate.hpp"

namespace msq::translate {

using datalog::Atom;
using datalog::Fact;
using datalog::Rule;
using datalog::Term;

datalog::Facts g32(const mra::Database& db) {
    datalog::Facts d;
    std::set<Value> constants;
    for (const auto& [name, r] : db) {
        for (const auto& [t, n] : r.tuples) {
            Fact f{relation_predicate(name), {}};
            for (const auto& [a, v] : t) {  // attributes in lexicographic order
                f.args.push_back(v);
                constants.insert(v);
            }
            d.add(f, n);
        }
    }
    for (const auto& c : constants) d.add(Fact{"eq", {c, c}});
    return d;
}

namespace {

Atom over(const std::string& pred, const mra::Schema& vars) {
    Atom a{pred, {}};
    for (const auto& v : vars) a.args.push_back(Term::variable(v));
    return a;
}

Term operand_term(const mra::Operand& o) { return o.is_attr ? Term::variable(o.attr) : Term::constant(o.value); }

struct F32 {
    const mra::SchemaMap& db;
    std::vector<Rule> rules;
    int counter = 0;

    Atom visit(const mra::ExprPtr& e, bool root) {
        using K = mra::Expr::Kind;
        auto schema = mra::schema_of(e, db);
        if (schema.empty() && !root)
            throw Error(ErrorKind::Precondition, "a sub-expression with an empty schema has no Datalog encoding");
        switch (e->kind) {
            case K::Rel: {
                Atom head = over(next(), schema);
                rules.push_back({head, {{over(relation_predicate(e->name), schema), false}}});
                return head;
            }
            case K::Join: {
                Atom a1 = visit(e->left, false), a2 = visit(e->right, false);
                Atom head = over(next(), schema);
                rules.push_back({head, {{a1, false}, {a2, false}}});
                return head;
            }
            case K::Union: {
                Atom a1 = visit(e->left, false), a2 = visit(e->right, false);
                Atom head = over(next(), schema);
                rules.push_back({head, {{a1, false}}});
                rules.push_back({head, {{a2, false}}});
                return head;
            }
            case K::Except: {
                Atom a1 = visit(e->left, false), a2 = visit(e->right, false);
                Atom head = over(next(), schema);
                rules.push_back({head, {{a1, false}, {a2, true}}});
                return head;
            }
            case K::Project: {
                Atom a1 = visit(e->left, false);
                Atom head = over(next(), schema);
                rules.push_back({head, {{a1, false}}});
                return head;
            }
            case K::Rename: {
                Atom a1 = visit(e->left, false);
                Atom head = over(next(), schema);
                Rule r{head, {{a1, false}}};
                if (e->from != e->to)
                    r.body.push_back({Atom{"eq", {Term::variable(e->from), Term::variable(e->to)}}, false});
                rules.push_back(r);
                return head;
            }
            case K::Select: {
                if (!e->cond->atomic()) throw Error(ErrorKind::Precondition, "f32 expects atomic selection formulas");
                Atom a1 = visit(e->left, false);
                Atom head = over(next(), schema);
                Rule r{head, {{a1, false}}};
                const auto& l = e->cond->l;
                const auto& rt = e->cond->r;
                if (l.is_attr || rt.is_attr) {
                    // Keep the attribute first so that eq(A, c) reads naturally.
                    if (l.is_attr)
                        r.body.push_back({Atom{"eq", {operand_term(l), operand_term(rt)}}, false});
                    else
                        r.body.push_back({Atom{"eq", {operand_term(rt), operand_term(l)}}, false});
                } else if (l.value != rt.value) {
                    r.body.push_back({a1, true});
                }
                rules.push_back(r);
                return head;
            }
        }
        return {};
    }

    std::string next() { return "q" + std::to_string(++counter); }
};

}  // namespace

datalog::Query f32(const mra::ExprPtr& e, const mra::SchemaMap& schemas) {
    F32 t{schemas, {}, 0};
    Atom goal = t.visit(e, true);
    return {goal, {t.rules}};
}

mra::Database g23(const datalog::Facts& d, const std::map<std::string, std::size_t>& vocabulary) {
    std::map<std::string, std::size_t> arity = vocabulary;
    for (const auto& [f, n] : d) {
        auto [it, inserted] = arity.emplace(f.pred, f.args.size());
        if (!inserted && it->second != f.args.size())
            throw Error(ErrorKind::PredicateSortClash, "predicate " + f.pred + " used with arities " +
                                                           std::to_string(it->second) + " and " +
                                                           std::to_string(f.args.size()));
    }
    mra::Database db;
    for (const auto& [pred, n] : arity) {
        mra::Relation r;
        for (std::size_t i = 1; i <= n; ++i) r.schema.insert(position_attribute(i));
        db.emplace(pred, std::move(r));
    }
    for (const auto& [f, n] : d) {
        mra::Tuple t;
        for (std::size_t i = 0; i < f.args.size(); ++i) t.emplace(position_attribute(i + 1), f.args[i]);
        db.at(f.pred).add(t, n);
    }
    return db;
}

namespace {

// Turns an expression whose attributes are `positions` (one per argument)
// into one over the variables of `args`: constants and repeated variables
// become selections, then the surviving positions are renamed.
mra::ExprPtr adapt(mra::ExprPtr e, const std::vector<std::string>& positions, const std::vector<Term>& args) {
    std::map<std::string, std::string> first;  // variable -> its first position
    mra::Schema keep;
    std::vector<std::pair<mra::Attr, mra::Attr>> renaming;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& a = args[i];
        auto pos = mra::Operand::attribute(positions[i]);
        if (!a.is_var) {
            e = mra::e_select(mra::f_eq(pos, mra::Operand::constant(a.value)), e);
        } else if (auto it = first.find(a.var); it != first.end()) {
            e = mra::e_select(mra::f_eq(mra::Operand::attribute(it->second), pos), e);
        } else {
            first.emplace(a.var, positions[i]);
            keep.insert(positions[i]);
            renaming.emplace_back(positions[i], a.var);
        }
    }
    if (keep.size() != positions.size()) e = mra::e_project(keep, e);
    return mra::rename_all(e, renaming, keep);
}

struct F23 {
    const datalog::Program& prog;
    std::map<std::string, std::vector<const Rule*>> by_head;

    explicit F23(const datalog::Program& p) : prog(p) {
        for (const auto& r : p.rules) by_head[r.head.pred].push_back(&r);
    }

    mra::ExprPtr literal(const Atom& l) {
        auto it = by_head.find(l.pred);
        if (it == by_head.end()) {
            std::vector<std::string> positions;
            for (std::size_t i = 1; i <= l.args.size(); ++i) positions.push_back(position_attribute(i));
            return adapt(mra::e_rel(l.pred), positions, l.args);
        }
        // Right-nested union over the defining rules.
        mra::ExprPtr out;
        const auto& rules = it->second;
        for (auto r = rules.rbegin(); r != rules.rend(); ++r) {
            std::vector<std::string> positions;
            for (const auto& t : (*r)->head.args) positions.push_back(t.var);
            auto e = adapt(rule(**r), positions, l.args);
            out = out ? mra::e_union(e, out) : e;
        }
        return out;
    }

    mra::ExprPtr rule(const Rule& r) {
        std::vector<const Atom*> pos;
        const Atom* neg = nullptr;
        for (const auto& lit : r.body) {
            if (lit.negated)
                neg = &lit.atom;
            else
                pos.push_back(&lit.atom);
        }
        switch (datalog::rule_form(r)) {
            case datalog::RuleForm::Projection: return mra::e_project(datalog::vars_of(r.head), literal(*pos[0]));
            case datalog::RuleForm::Join: return mra::e_join(literal(*pos[0]), literal(*pos[1]));
            case datalog::RuleForm::Negation: return mra::e_except(literal(*pos[0]), literal(*neg));
            case datalog::RuleForm::Other: break;
        }
        throw Error(ErrorKind::Precondition, "f23 expects a normalized program");
    }
};

}  // namespace

mra::ExprPtr f23(const datalog::Query& q) {
    datalog::validate(q);
    if (!datalog::is_normalized(q.program)) throw Error(ErrorKind::Precondition, "f23 expects a normalized program");
    for (const auto& r : q.program.rules)
        if (datalog::ordered_vars(r.head).size() != r.head.args.size())
            throw Error(ErrorKind::Precondition, "rule head " + r.head.pred + " repeats a variable");
    F23 t(q.program);
    return t.literal(q.goal);
}

}  // namespace msq::translate
