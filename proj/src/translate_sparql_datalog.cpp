#include <algorithm>

#include "msq/translate.hpp"

namespace msq::translate {

using datalog::Atom;
using datalog::Fact;
using datalog::Literal;
using datalog::Rule;
using datalog::Term;

datalog::Facts g12(const sparql::Graph& g, const G12Options& opts) {
    datalog::Facts d;
    const Value bot = Value::bottom();
    for (const auto& t : sparql::terms(g)) {
        d.add(Fact{"term", {t}});
        d.add(Fact{"eq", {t, t}});
        d.add(Fact{"comp", {t, t, t}});
        if (!opts.omit_bottom_comp) {
            d.add(Fact{"comp", {t, bot, t}});
            d.add(Fact{"comp", {bot, t, t}});
        }
    }
    for (const auto& t : g) d.add(Fact{"triple", {t.s, t.p, t.o}});
    if (!opts.omit_bottom_comp) d.add(Fact{"comp", {bot, bot, bot}});
    d.add(Fact{"null", {bot}});
    return d;
}

namespace {

Atom over(const std::string& pred, const std::vector<std::string>& vars) {
    Atom a{pred, {}};
    for (const auto& v : vars) a.args.push_back(Term::variable(v));
    return a;
}

std::vector<std::string> sorted(const sparql::VarSet& s) { return {s.begin(), s.end()}; }

Term slot_term(const sparql::Slot& s) { return s.is_var ? Term::variable(s.var) : Term::constant(s.value); }

// Builds the rules bottom-up; nodes are numbered in post-order.
struct F12 {
    std::vector<Rule> rules;
    int counter = 0;

    Atom visit(const sparql::PatternPtr& p, bool root) {
        using K = sparql::Pattern::Kind;
        auto scope = sparql::in_scope(p);
        if (scope.empty() && !root)
            throw Error(ErrorKind::Precondition, "a sub-pattern with no in-scope variable has no Datalog encoding");
        switch (p->kind) {
            case K::Triple: {
                Atom head = over(next(), sorted(scope));
                rules.push_back({head, {{Atom{"triple", {slot_term(p->s), slot_term(p->p), slot_term(p->o)}}, false}}});
                return head;
            }
            case K::And: {
                Atom a1 = visit(p->left, false);
                Atom a2 = visit(p->right, false);
                Atom head = over(next(), sorted(scope));
                auto s1 = sparql::in_scope(p->left), s2 = sparql::in_scope(p->right);
                std::set<std::string> used = scope;
                std::map<std::string, std::string> v1, v2;
                for (const auto& x : s1)
                    if (s2.count(x)) {
                        v1[x] = sparql::fresh_name(x + "1", used);
                        v2[x] = sparql::fresh_name(x + "2", used);
                    }
                auto rename = [](Atom a, const std::map<std::string, std::string>& v) {
                    for (auto& t : a.args)
                        if (auto it = v.find(t.var); it != v.end()) t.var = it->second;
                    return a;
                };
                Rule r{head, {{rename(a1, v1), false}, {rename(a2, v2), false}}};
                for (const auto& [x, x1] : v1)
                    r.body.push_back({Atom{"comp", {Term::variable(x1), Term::variable(v2[x]), Term::variable(x)}}, false});
                rules.push_back(r);
                return head;
            }
            case K::Union: {
                Atom a1 = visit(p->left, false);
                Atom a2 = visit(p->right, false);
                Atom head = over(next(), sorted(scope));
                rules.push_back({head, {{a1, false}}});
                rules.push_back({head, {{a2, false}}});
                return head;
            }
            case K::Except: {
                Atom a1 = visit(p->left, false);
                Atom a2 = visit(p->right, false);
                Atom head = over(next(), sorted(scope));
                rules.push_back({head, {{a1, false}, {a2, true}}});
                return head;
            }
            case K::Filter: {
                Atom a1 = visit(p->left, false);
                Atom head = over(next(), sorted(scope));
                Rule r{head, {{a1, false}}};
                const auto& f = *p->cond;
                switch (f.kind) {
                    case sparql::Filter::Kind::EqConst:
                        r.body.push_back({Atom{"eq", {Term::variable(f.x), Term::constant(f.c)}}, false});
                        break;
                    case sparql::Filter::Kind::EqVar:
                        r.body.push_back({Atom{"eq", {Term::variable(f.x), Term::variable(f.y)}}, false});
                        break;
                    case sparql::Filter::Kind::Bound:
                        r.body.push_back({Atom{"term", {Term::variable(f.x)}}, false});
                        break;
                    case sparql::Filter::Kind::False: r.body.push_back({a1, true}); break;
                    default: throw Error(ErrorKind::Precondition, "filter conditions must be atomic");
                }
                rules.push_back(r);
                return head;
            }
            case K::Select: {
                Atom a1 = visit(p->left, false);
                Atom head = over(next(), sorted(p->vars));
                auto inner = sparql::in_scope(p->left);
                Rule r{head, {{a1, false}}};
                for (const auto& x : p->vars)
                    if (!inner.count(x)) r.body.push_back({Atom{"null", {Term::variable(x)}}, false});
                rules.push_back(r);
                return head;
            }
        }
        return {};
    }

    std::string next() { return "p" + std::to_string(++counter); }
};

}  // namespace

datalog::Query f12(const sparql::PatternPtr& p) {
    if (!sparql::is_normalized(p)) throw Error(ErrorKind::Precondition, "f12 expects a normalized pattern");
    if (!sparql::filters_atomic(p)) throw Error(ErrorKind::Precondition, "f12 expects atomic filter conditions");
    F12 t;
    Atom goal = t.visit(p, true);
    return {goal, {t.rules}};
}

sparql::Graph g21(const datalog::Facts& d) {
    sparql::Graph g;
    g.insert({Value::null(), Value::null(), Value::null()});
    std::size_t k = 0;
    for (const auto& [f, n] : d) {
        ++k;
        for (Count i = 1; i <= n; ++i) {
            Value u = Value::reserved("u:" + std::to_string(k) + ":" + std::to_string(i));
            g.insert({u, alpha(0), Value::iri(f.pred)});
            for (std::size_t j = 0; j < f.args.size(); ++j) g.insert({u, alpha(j + 1), f.args[j]});
        }
    }
    return g;
}

namespace {

sparql::Slot term_slot(const Term& t) { return t.is_var ? sparql::Slot::variable(t.var) : sparql::Slot::constant(t.value); }

sparql::PatternPtr var_query(const std::set<std::string>& vars) {
    sparql::PatternPtr out;
    for (const auto& x : vars) {
        auto t = sparql::p_triple(sparql::Slot::constant(Value::null()), sparql::Slot::constant(Value::null()),
                                  sparql::Slot::variable(x));
        out = out ? sparql::p_and(out, t) : t;
    }
    return out;
}

struct F21 {
    const datalog::Program& prog;
    std::map<std::string, std::vector<const Rule*>> by_head;

    explicit F21(const datalog::Program& p) : prog(p) {
        for (const auto& r : p.rules) by_head[r.head.pred].push_back(&r);
    }

    sparql::PatternPtr gp(const Atom& l) {
        auto it = by_head.find(l.pred);
        if (it == by_head.end()) return extensional(l);
        sparql::PatternPtr out;
        for (const Rule* r : it->second) {
            auto t = translate_rule(*r, l);
            out = out ? sparql::p_union(out, t) : t;
        }
        return out;
    }

    sparql::PatternPtr extensional(const Atom& l) {
        auto vars = datalog::vars_of(l);
        std::set<std::string> used = vars;
        auto u = sparql::Slot::variable(sparql::fresh_name("U", used));
        auto body = sparql::p_triple(u, sparql::Slot::constant(alpha(0)), sparql::Slot::constant(Value::iri(l.pred)));
        for (std::size_t i = 0; i < l.args.size(); ++i)
            body = sparql::p_and(body, sparql::p_triple(u, sparql::Slot::constant(alpha(i + 1)), term_slot(l.args[i])));
        return sparql::p_select(vars, body);
    }

    // The rule with its head unified with l: head variables take l's terms,
    // other variables that would clash with l's variables are renamed.
    static Rule renamed(const Rule& r, const Atom& l) {
        std::map<std::string, Term> sub;
        for (std::size_t i = 0; i < r.head.args.size(); ++i) sub.emplace(r.head.args[i].var, l.args[i]);
        auto lvars = datalog::vars_of(l);
        std::set<std::string> used = datalog::rule_vars(r);
        used.insert(lvars.begin(), lvars.end());
        for (const auto& v : datalog::rule_vars(r))
            if (!sub.count(v) && lvars.count(v)) sub.emplace(v, Term::variable(sparql::fresh_name(v, used)));
        auto apply = [&](Atom a) {
            for (auto& t : a.args)
                if (t.is_var)
                    if (auto it = sub.find(t.var); it != sub.end()) t = it->second;
            return a;
        };
        Rule out{apply(r.head), {}};
        for (const auto& lit : r.body) out.body.push_back({apply(lit.atom), lit.negated});
        return out;
    }

    sparql::PatternPtr translate_rule(const Rule& r, const Atom& l) {
        auto form = datalog::rule_form(r);
        Rule rr = renamed(r, l);
        const Atom* pos[2] = {nullptr, nullptr};
        const Atom* neg = nullptr;
        int np = 0;
        for (const auto& lit : rr.body) {
            if (lit.negated)
                neg = &lit.atom;
            else
                pos[np++] = &lit.atom;
        }
        switch (form) {
            case datalog::RuleForm::Projection: {
                auto p1 = gp(*pos[0]);
                // SELECT W (SELECT W' P) with W a subset of W' is SELECT W P.
                if (p1->kind == sparql::Pattern::Kind::Select) p1 = p1->left;
                return sparql::p_select(datalog::vars_of(rr.head), p1);
            }
            case datalog::RuleForm::Join: return sparql::p_and(gp(*pos[0]), gp(*pos[1]));
            case datalog::RuleForm::Negation: return sparql::p_except(gp(*pos[0]), gp(*neg));
            case datalog::RuleForm::Other: break;
        }
        throw Error(ErrorKind::Precondition, "f21 expects a normalized program");
    }
};

void require_distinct_heads(const datalog::Program& p) {
    for (const auto& r : p.rules)
        if (datalog::ordered_vars(r.head).size() != r.head.args.size())
            throw Error(ErrorKind::Precondition, "rule head " + r.head.pred + " repeats a variable");
}

}  // namespace

sparql::PatternPtr f21(const datalog::Query& q) {
    datalog::validate(q);
    if (!datalog::is_normalized(q.program)) throw Error(ErrorKind::Precondition, "f21 expects a normalized program");
    require_distinct_heads(q.program);
    auto vars = datalog::vars_of(q.goal);
    if (vars.empty()) throw Error(ErrorKind::Precondition, "f21 needs a goal with at least one variable");
    F21 t(q.program);
    return sparql::p_union(t.gp(q.goal), var_query(vars));
}

}  // namespace msq::translate
