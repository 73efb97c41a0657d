#include <algorithm>
#include <functional>
#include <memory>

#include "msq/datalog.hpp"

namespace msq::datalog {

std::set<std::string> vars_of(const Atom& a) {
    std::set<std::string> out;
    for (const auto& t : a.args)
        if (t.is_var) out.insert(t.var);
    return out;
}

std::vector<std::string> ordered_vars(const Atom& a) {
    std::vector<std::string> out;
    for (const auto& t : a.args)
        if (t.is_var && std::find(out.begin(), out.end(), t.var) == out.end()) out.push_back(t.var);
    return out;
}

std::set<std::string> rule_vars(const Rule& r) {
    auto out = vars_of(r.head);
    for (const auto& l : r.body)
        for (auto& v : vars_of(l.atom)) out.insert(v);
    return out;
}

std::set<std::string> intensional(const Program& p) {
    std::set<std::string> out;
    for (const auto& r : p.rules) out.insert(r.head.pred);
    return out;
}

std::set<std::string> extensional(const Query& q) {
    auto idb = intensional(q.program);
    std::set<std::string> out;
    if (!idb.count(q.goal.pred)) out.insert(q.goal.pred);
    for (const auto& r : q.program.rules)
        for (const auto& l : r.body)
            if (!idb.count(l.atom.pred)) out.insert(l.atom.pred);
    return out;
}

namespace {

void note_arity(std::map<std::string, std::size_t>& m, const std::string& pred, std::size_t n) {
    auto [it, inserted] = m.emplace(pred, n);
    if (!inserted && it->second != n)
        throw Error(ErrorKind::PredicateSortClash, "predicate " + pred + " used with arities " + std::to_string(it->second) +
                                                       " and " + std::to_string(n));
}

}  // namespace

std::map<std::string, std::size_t> arities(const Query& q) {
    std::map<std::string, std::size_t> m;
    note_arity(m, q.goal.pred, q.goal.args.size());
    for (const auto& r : q.program.rules) {
        note_arity(m, r.head.pred, r.head.args.size());
        for (const auto& l : r.body) note_arity(m, l.atom.pred, l.atom.args.size());
    }
    return m;
}

namespace {

// Intensional predicates ordered so that every predicate follows the ones
// its rules depend on. Throws on a cycle.
std::vector<std::string> topo_order(const Program& p) {
    auto idb = intensional(p);
    std::map<std::string, std::set<std::string>> deps;
    for (const auto& r : p.rules)
        for (const auto& l : r.body)
            if (idb.count(l.atom.pred)) deps[r.head.pred].insert(l.atom.pred);

    std::vector<std::string> order;
    std::map<std::string, int> state;  // 1 = on stack, 2 = done
    std::function<void(const std::string&)> visit = [&](const std::string& n) {
        int& s = state[n];
        if (s == 2) return;
        if (s == 1) throw Error(ErrorKind::RecursiveProgram, "predicate " + n + " depends on itself");
        s = 1;
        for (const auto& d : deps[n]) visit(d);
        state[n] = 2;
        order.push_back(n);
    };
    for (const auto& n : idb) visit(n);
    return order;
}

}  // namespace

void validate(const Query& q) {
    for (const auto& t : q.goal.args)
        if (!t.is_var) throw Error(ErrorKind::ConstantInHead, "goal " + q.goal.pred + " contains a constant");
    for (const auto& r : q.program.rules) {
        for (const auto& t : r.head.args)
            if (!t.is_var) throw Error(ErrorKind::ConstantInHead, "head of a rule for " + r.head.pred + " contains a constant");
        if (r.body.empty()) throw Error(ErrorKind::UnsafeRule, "rule for " + r.head.pred + " has an empty body");
        std::set<std::string> positive;
        for (const auto& l : r.body) {
            if (vars_of(l.atom).empty())
                throw Error(ErrorKind::VariableFreeLiteral, "literal " + l.atom.pred + " in a rule for " + r.head.pred + " has no variable");
            if (!l.negated)
                for (auto& v : vars_of(l.atom)) positive.insert(v);
        }
        for (const auto& v : rule_vars(r))
            if (!positive.count(v))
                throw Error(ErrorKind::UnsafeRule, "variable " + v + " of a rule for " + r.head.pred + " does not occur positively");
    }
    arities(q);
    topo_order(q.program);
}

void validate(const Query& q, const Facts& d) {
    validate(q);
    auto ar = arities(q);
    auto idb = intensional(q.program);
    for (const auto& [f, n] : d) {
        if (idb.count(f.pred))
            throw Error(ErrorKind::PredicateSortClash, "predicate " + f.pred + " is both extensional and intensional");
        note_arity(ar, f.pred, f.args.size());
    }
}

namespace {

using Relations = std::map<std::string, Multiset<std::vector<Value>>>;

bool unify(const std::vector<Term>& args, const std::vector<Value>& tuple, Subst& theta, std::vector<std::string>& bound) {
    if (args.size() != tuple.size()) return false;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& t = args[i];
        if (!t.is_var) {
            if (t.value != tuple[i]) return false;
            continue;
        }
        auto it = theta.find(t.var);
        if (it == theta.end()) {
            theta.emplace(t.var, tuple[i]);
            bound.push_back(t.var);
        } else if (it->second != tuple[i]) {
            return false;
        }
    }
    return true;
}

std::vector<Value> ground(const Atom& a, const Subst& theta) {
    std::vector<Value> out;
    out.reserve(a.args.size());
    for (const auto& t : a.args) out.push_back(t.is_var ? theta.at(t.var) : t.value);
    return out;
}

void eval_rule(const Rule& r, Relations& rel) {
    std::vector<const Atom*> pos, neg;
    for (const auto& l : r.body) (l.negated ? neg : pos).push_back(&l.atom);
    auto& out = rel[r.head.pred];
    Multiset<std::vector<Value>> derived;
    Subst theta;
    std::function<void(std::size_t, Count)> go = [&](std::size_t i, Count acc) {
        if (i == pos.size()) {
            for (const Atom* b : neg) {
                auto it = rel.find(b->pred);
                if (it != rel.end() && it->second.contains(ground(*b, theta))) return;
            }
            derived.add(ground(r.head, theta), acc);
            return;
        }
        auto it = rel.find(pos[i]->pred);
        if (it == rel.end()) return;
        for (const auto& [tuple, n] : it->second) {
            std::vector<std::string> bound;
            if (unify(pos[i]->args, tuple, theta, bound)) go(i + 1, checked_mul(acc, n));
            for (const auto& v : bound) theta.erase(v);
        }
    };
    go(0, 1);
    for (const auto& [t, n] : derived) out.add(t, n);
}

}  // namespace

Facts all_atoms(const Program& p, const Facts& d) {
    Relations rel;
    for (const auto& [f, n] : d) rel[f.pred].add(f.args, n);
    for (const auto& pred : topo_order(p))
        for (const auto& r : p.rules)
            if (r.head.pred == pred) eval_rule(r, rel);
    Facts out;
    for (const auto& [pred, m] : rel)
        for (const auto& [args, n] : m) out.add(Fact{pred, args}, n);
    return out;
}

Answer eval_query(const Query& q, const Facts& d) {
    validate(q, d);
    Relations rel;
    for (const auto& [f, n] : d) rel[f.pred].add(f.args, n);
    for (const auto& pred : topo_order(q.program))
        for (const auto& r : q.program.rules)
            if (r.head.pred == pred) eval_rule(r, rel);

    Answer ans;
    ans.vars = vars_of(q.goal);
    auto it = rel.find(q.goal.pred);
    if (it == rel.end()) return ans;
    for (const auto& [tuple, n] : it->second) {
        Subst theta;
        std::vector<std::string> bound;
        if (unify(q.goal.args, tuple, theta, bound)) ans.solutions.add(theta, n);
    }
    return ans;
}

namespace {

struct Tree {
    Fact label;
    int rule = -1;      // -1 for a leaf
    Count color = 0;    // leaves only
    std::vector<std::shared_ptr<const Tree>> children;
    std::string key;    // canonical identity
};

using TreePtr = std::shared_ptr<const Tree>;

std::string fact_key(const Fact& f) {
    std::string s = f.pred + "(";
    for (std::size_t i = 0; i < f.args.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(static_cast<int>(f.args[i].kind)) + ":" + f.args[i].text;
    }
    return s + ")";
}

}  // namespace

Facts derivation_trees(const Program& p, const Facts& d, std::size_t max_trees) {
    std::map<Fact, std::vector<TreePtr>> dt;
    std::set<std::string> seen;
    std::size_t total = 0;
    auto admit = [&](TreePtr t) {
        if (!seen.insert(t->key).second) return;
        if (++total > max_trees) throw Error(ErrorKind::InstanceTooLarge, "more than " + std::to_string(max_trees) + " derivation trees");
        dt[t->label].push_back(std::move(t));
    };

    // Step (1): one single-node tree per colored copy of a fact.
    for (const auto& [f, i] : coloring(d)) {
        auto t = std::make_shared<Tree>();
        t->label = f;
        t->color = i;
        t->key = "<" + fact_key(f) + "#" + std::to_string(i) + ">";
        admit(t);
    }

    // Step (2): a new tree for every rule and every sequence of existing
    // trees matching its positive body, provided no tree is rooted at a
    // ground negative literal. Non-recursion lets us go predicate by predicate.
    for (const auto& pred : topo_order(p)) {
        for (std::size_t ri = 0; ri < p.rules.size(); ++ri) {
            const Rule& r = p.rules[ri];
            if (r.head.pred != pred) continue;
            std::vector<const Atom*> pos, neg;
            for (const auto& l : r.body) (l.negated ? neg : pos).push_back(&l.atom);

            std::vector<TreePtr> produced;
            std::vector<TreePtr> chosen;
            Subst theta;
            std::function<void(std::size_t)> go = [&](std::size_t i) {
                if (i == pos.size()) {
                    for (const Atom* b : neg) {
                        auto it = dt.find(Fact{b->pred, ground(*b, theta)});
                        if (it != dt.end() && !it->second.empty()) return;
                    }
                    auto t = std::make_shared<Tree>();
                    t->label = Fact{r.head.pred, ground(r.head, theta)};
                    t->rule = static_cast<int>(ri);
                    t->children = chosen;
                    t->key = "[" + std::to_string(ri) + ":" + fact_key(t->label);
                    for (const auto& c : chosen) t->key += " " + c->key;
                    t->key += "]";
                    produced.push_back(t);
                    if (produced.size() + total > max_trees)
                        throw Error(ErrorKind::InstanceTooLarge, "more than " + std::to_string(max_trees) + " derivation trees");
                    return;
                }
                for (const auto& [label, trees] : dt) {
                    if (label.pred != pos[i]->pred) continue;
                    std::vector<std::string> bound;
                    if (unify(pos[i]->args, label.args, theta, bound)) {
                        for (const auto& t : trees) {
                            chosen.push_back(t);
                            go(i + 1);
                            chosen.pop_back();
                        }
                    }
                    for (const auto& v : bound) theta.erase(v);
                }
            };
            go(0);
            for (auto& t : produced) admit(t);
        }
    }

    Facts out;
    for (const auto& [f, trees] : dt) out.add(f, trees.size());
    return out;
}

RuleForm rule_form(const Rule& r) {
    std::vector<const Atom*> pos, neg;
    for (const auto& l : r.body) (l.negated ? neg : pos).push_back(&l.atom);
    auto head = vars_of(r.head);
    if (pos.size() == 1 && neg.empty()) {
        auto v1 = vars_of(*pos[0]);
        if (std::includes(v1.begin(), v1.end(), head.begin(), head.end())) return RuleForm::Projection;
    }
    if (pos.size() == 2 && neg.empty()) {
        auto u = vars_of(*pos[0]);
        for (auto& v : vars_of(*pos[1])) u.insert(v);
        if (u == head) return RuleForm::Join;
    }
    if (pos.size() == 1 && neg.size() == 1) {
        if (vars_of(*pos[0]) == head && vars_of(*neg[0]) == head) return RuleForm::Negation;
    }
    return RuleForm::Other;
}

bool is_normalized(const Program& p) {
    return std::all_of(p.rules.begin(), p.rules.end(), [](const Rule& r) { return rule_form(r) != RuleForm::Other; });
}

namespace {

std::string fresh_pred(const std::string& base, std::set<std::string>& used) {
    std::string name = base;
    for (int i = 2; used.count(name); ++i) name = base + "_" + std::to_string(i);
    used.insert(name);
    return name;
}

Atom over(const std::string& pred, const std::set<std::string>& vars) {
    Atom a{pred, {}};
    for (const auto& v : vars) a.args.push_back(Term::variable(v));
    return a;
}

}  // namespace

Query normalize_program(const Query& q) {
    validate(q);
    std::set<std::string> used;
    for (const auto& [pred, n] : arities(q)) used.insert(pred);

    Query out{q.goal, {}};
    for (const auto& r : q.program.rules) {
        if (rule_form(r) != RuleForm::Other) {
            out.program.rules.push_back(r);
            continue;
        }
        std::vector<Atom> pos, neg;
        for (const auto& l : r.body) (l.negated ? neg : pos).push_back(l.atom);
        const std::string& h = r.head.pred;

        // Positive chain: q2 <- A1, A2 ; qi <- q(i-1), Ai.
        std::set<std::string> ys = vars_of(pos[0]);
        Atom prev = pos[0];
        for (std::size_t i = 1; i < pos.size(); ++i) {
            for (auto& v : vars_of(pos[i])) ys.insert(v);
            Atom qi = over(fresh_pred(h + "__q" + std::to_string(i + 1), used), ys);
            out.program.rules.push_back({qi, {{prev, false}, {pos[i], false}}});
            prev = qi;
        }
        // Negation chain: r0 <- qm ; b'j <- r(j-1), Bj ; rj <- r(j-1), not b'j.
        Atom rj = over(fresh_pred(h + "__r0", used), ys);
        out.program.rules.push_back({rj, {{prev, false}}});
        for (std::size_t j = 0; j < neg.size(); ++j) {
            Atom bj = over(fresh_pred(h + "__b" + std::to_string(j + 1), used), ys);
            out.program.rules.push_back({bj, {{rj, false}, {neg[j], false}}});
            Atom next = over(fresh_pred(h + "__r" + std::to_string(j + 1), used), ys);
            out.program.rules.push_back({next, {{rj, false}, {bj, true}}});
            rj = next;
        }
        out.program.rules.push_back({r.head, {{rj, false}}});
    }
    return out;
}

}  // namespace msq::datalog
