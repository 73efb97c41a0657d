#include "msq/harness.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "msq/syntax.hpp"
#include "msq/translate.hpp"

namespace msq::harness {

namespace {

std::size_t below(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }
template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[below(rng, v.size())];
}

// Uppercase S and N collide with names the SPARQL->MRA translation uses.
const std::vector<std::string> kSparqlVars = {"x", "S", "N"};
const std::vector<std::string> kDatalogVars = {"X", "Y", "Z"};
const std::vector<std::string> kAttrs = {"A", "B", "Y", "D"};

const char* const kLanguages[] = {"", "sparql", "datalog", "mra"};

std::pair<int, int> endpoints(Direction d) {
    switch (d) {
        case Direction::S2D: return {1, 2};
        case Direction::D2S: return {2, 1};
        case Direction::M2D: return {3, 2};
        case Direction::D2M: return {2, 3};
        case Direction::M2S: return {3, 1};
        case Direction::S2M: return {1, 3};
    }
    return {0, 0};
}

}  // namespace

const std::vector<Direction>& all_directions() {
    static const std::vector<Direction> all = {Direction::S2D, Direction::D2S, Direction::M2D,
                                               Direction::D2M, Direction::M2S, Direction::S2M};
    return all;
}

std::string direction_name(Direction d) {
    auto [a, b] = endpoints(d);
    return std::to_string(a) + "->" + std::to_string(b);
}

std::optional<Direction> parse_direction(const std::string& s) {
    for (Direction d : all_directions()) {
        auto [a, b] = endpoints(d);
        std::string x = std::to_string(a), y = std::to_string(b);
        for (const auto& name : {x + "->" + y, x + "to" + y, x + y, std::string(kLanguages[a]) + "-" + kLanguages[b]})
            if (s == name) return d;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- generators

std::vector<Value> universe(std::size_t n) {
    std::vector<Value> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::string name(1, static_cast<char>('a' + i % 26));
        if (i >= 26) name += std::to_string(i / 26);
        out.push_back(Value::iri(name));
    }
    return out;
}

sparql::FilterPtr random_filter(Rng& rng, const std::vector<std::string>& vars, const std::vector<Value>& constants,
                                int connectives) {
    if (connectives <= 0) {
        switch (below(rng, 3)) {
            case 0:
                if (!constants.empty()) return sparql::f_eq(pick(rng, vars), pick(rng, constants));
                [[fallthrough]];
            case 1: return sparql::f_eq(pick(rng, vars), sparql::Var(pick(rng, vars)));
            default: return sparql::f_bound(pick(rng, vars));
        }
    }
    auto k = static_cast<std::size_t>(connectives);
    switch (below(rng, 3)) {
        case 0: return sparql::f_not(random_filter(rng, vars, constants, connectives - 1));
        case 1: {
            int a = static_cast<int>(below(rng, k));
            return sparql::f_and(random_filter(rng, vars, constants, a),
                                 random_filter(rng, vars, constants, connectives - 1 - a));
        }
        default: {
            int a = static_cast<int>(below(rng, k));
            return sparql::f_or(random_filter(rng, vars, constants, a),
                                random_filter(rng, vars, constants, connectives - 1 - a));
        }
    }
}

namespace {

struct PatternGen {
    Rng& rng;
    std::vector<Value> consts;

    sparql::PatternPtr triple() {
        sparql::Slot s[3];
        bool any = false;
        for (auto& slot : s) {
            if (consts.empty() || chance(rng, 0.5)) {
                slot = sparql::Slot::variable(pick(rng, kSparqlVars));
                any = true;
            } else {
                slot = sparql::Slot::constant(pick(rng, consts));
            }
        }
        if (!any) s[below(rng, 3)] = sparql::Slot::variable(pick(rng, kSparqlVars));
        return sparql::p_triple(s[0], s[1], s[2]);
    }

    sparql::PatternPtr gen(std::size_t depth, int excepts) {
        if (depth <= 1 || chance(rng, 0.25)) return triple();
        switch (below(rng, 5)) {
            case 0: return sparql::p_and(gen(depth - 1, excepts), gen(depth - 1, excepts));
            case 1: return sparql::p_union(gen(depth - 1, excepts), gen(depth - 1, excepts));
            case 2:
                if (excepts > 0) return sparql::p_except(gen(depth - 1, excepts - 1), gen(depth - 1, excepts - 1));
                return sparql::p_and(gen(depth - 1, excepts), gen(depth - 1, excepts));
            case 3: {
                auto p = gen(depth - 1, excepts);
                auto scope = sparql::in_scope(p);
                std::vector<std::string> vars(scope.begin(), scope.end());
                if (vars.empty() || chance(rng, 0.2)) vars = kSparqlVars;
                return sparql::p_filter(p, random_filter(rng, vars, consts, static_cast<int>(below(rng, 3))));
            }
            default: {
                auto p = gen(depth - 1, excepts);
                auto scope = sparql::in_scope(p);
                sparql::VarSet w;
                for (const auto& v : kSparqlVars)
                    if (chance(rng, scope.count(v) ? 0.7 : 0.2)) w.insert(v);
                if (w.empty()) w.insert(scope.empty() ? pick(rng, kSparqlVars) : *scope.begin());
                return sparql::p_select(w, p);
            }
        }
    }
};

}  // namespace

sparql::PatternPtr random_pattern(Rng& rng, const Bounds& b) {
    PatternGen g{rng, universe(b.max_terms)};
    return g.gen(b.max_depth, 2);
}

sparql::Graph random_graph(Rng& rng, const Bounds& b) {
    auto u = universe(b.max_terms);
    sparql::Graph g;
    if (u.empty()) return g;
    std::size_t n = below(rng, b.max_rows + 1);
    for (std::size_t i = 0; i < n; ++i) {
        Value o = pick(rng, u);
        if (chance(rng, 0.15)) o = Value::literal(o.text);
        g.insert({pick(rng, u), pick(rng, u), o});
    }
    return g;
}

namespace {

struct PredInfo {
    std::string name;
    std::size_t arity;
    int negation_depth;
};

const std::vector<PredInfo> kEdb = {{"r", 1, 0}, {"s", 2, 0}, {"t", 2, 0}};

datalog::Atom random_atom(Rng& rng, const PredInfo& p, const std::vector<std::string>& vars,
                          const std::vector<Value>& consts) {
    datalog::Atom a{p.name, {}};
    bool any = false;
    for (std::size_t i = 0; i < p.arity; ++i) {
        if (consts.empty() || chance(rng, 0.8)) {
            a.args.push_back(datalog::Term::variable(pick(rng, vars)));
            any = true;
        } else {
            a.args.push_back(datalog::Term::constant(pick(rng, consts)));
        }
    }
    if (!any) a.args[below(rng, p.arity)] = datalog::Term::variable(pick(rng, vars));
    return a;
}

}  // namespace

datalog::Query random_datalog(Rng& rng, const Bounds& b) {
    auto consts = universe(b.max_terms);
    std::vector<PredInfo> preds = kEdb;
    datalog::Program prog;
    std::size_t m = 1 + below(rng, 3);
    for (std::size_t i = 1; i <= m; ++i) {
        PredInfo q{"q" + std::to_string(i), 1 + below(rng, 2), 0};
        std::size_t nrules = 1 + below(rng, 2);
        for (std::size_t k = 0; k < nrules; ++k) {
            for (int attempt = 0; attempt < 50; ++attempt) {
                datalog::Rule r;
                std::set<std::string> pv;
                int depth = 0;
                std::size_t npos = 1 + below(rng, 2);
                for (std::size_t j = 0; j < npos; ++j) {
                    const auto& p = pick(rng, preds);
                    auto a = random_atom(rng, p, kDatalogVars, consts);
                    for (const auto& t : a.args)
                        if (t.is_var) pv.insert(t.var);
                    depth = std::max(depth, p.negation_depth);
                    r.body.push_back({a, false});
                }
                if (pv.size() < q.arity) continue;
                std::vector<std::string> vars(pv.begin(), pv.end());
                if (chance(rng, 0.35)) {
                    std::vector<PredInfo> negatable;
                    for (const auto& p : preds)
                        if (p.negation_depth < 2) negatable.push_back(p);
                    const auto& p = pick(rng, negatable);
                    r.body.push_back({random_atom(rng, p, vars, consts), true});
                    depth = std::max(depth, p.negation_depth + 1);
                }
                std::shuffle(vars.begin(), vars.end(), rng);
                r.head.pred = q.name;
                for (std::size_t j = 0; j < q.arity; ++j) r.head.args.push_back(datalog::Term::variable(vars[j]));
                q.negation_depth = std::max(q.negation_depth, depth);
                prog.rules.push_back(std::move(r));
                break;
            }
        }
        preds.push_back(q);
    }
    const PredInfo& g = chance(rng, 0.8) ? preds.back() : pick(rng, preds);
    std::vector<std::string> pool = kDatalogVars;
    std::shuffle(pool.begin(), pool.end(), rng);
    datalog::Atom goal{g.name, {}};
    for (std::size_t j = 0; j < g.arity; ++j) goal.args.push_back(datalog::Term::variable(pool[j]));
    if (g.arity > 1 && chance(rng, 0.15)) goal.args[1] = goal.args[0];
    return {goal, prog};
}

datalog::Facts random_facts(Rng& rng, const Bounds& b) {
    auto consts = universe(b.max_terms);
    datalog::Facts d;
    if (consts.empty()) return d;
    std::size_t n = below(rng, b.max_rows + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = pick(rng, kEdb);
        datalog::Fact f{p.name, {}};
        for (std::size_t j = 0; j < p.arity; ++j) f.args.push_back(pick(rng, consts));
        d.add(f, 1 + below(rng, 2));
    }
    return d;
}

mra::SchemaMap fuzz_schemas() { return {{"R", {"A", "B"}}, {"S", {"B", "Y"}}, {"T", {"A"}}}; }

mra::FormulaPtr random_formula(Rng& rng, const mra::Schema& attrs, const std::vector<Value>& constants,
                               int connectives) {
    using mra::Operand;
    std::vector<std::string> as(attrs.begin(), attrs.end());
    if (connectives <= 0) {
        auto attr = [&] { return Operand::attribute(pick(rng, as)); };
        if (constants.empty()) return mra::f_eq(attr(), attr());
        auto cst = [&] { return Operand::constant(pick(rng, constants)); };
        switch (below(rng, 7)) {
            case 0:
            case 1:
            case 2: return mra::f_eq(attr(), cst());
            case 3: return mra::f_eq(cst(), attr());
            case 4: return mra::f_eq(cst(), cst());
            default: return mra::f_eq(attr(), attr());
        }
    }
    auto k = static_cast<std::size_t>(connectives);
    switch (below(rng, 3)) {
        case 0: return mra::f_not(random_formula(rng, attrs, constants, connectives - 1));
        case 1: {
            int a = static_cast<int>(below(rng, k));
            return mra::f_and(random_formula(rng, attrs, constants, a),
                              random_formula(rng, attrs, constants, connectives - 1 - a));
        }
        default: {
            int a = static_cast<int>(below(rng, k));
            return mra::f_or(random_formula(rng, attrs, constants, a),
                             random_formula(rng, attrs, constants, connectives - 1 - a));
        }
    }
}

namespace {

struct ExprGen {
    Rng& rng;
    mra::SchemaMap db;
    std::vector<Value> consts;

    mra::ExprPtr rel() {
        auto it = db.begin();
        std::advance(it, static_cast<long>(below(rng, db.size())));
        return mra::e_rel(it->first);
    }

    mra::ExprPtr gen(std::size_t depth) {
        if (depth <= 1 || chance(rng, 0.25)) return rel();
        switch (below(rng, 6)) {
            case 0: return mra::e_join(gen(depth - 1), gen(depth - 1));
            case 1:
            case 2: {
                auto l = gen(depth - 1);
                auto r = conform(mra::schema_of(l, db), depth - 1, l);
                return below(rng, 2) ? mra::e_union(l, r) : mra::e_except(l, r);
            }
            case 3: {
                auto l = gen(depth - 1);
                mra::Schema s;
                std::vector<std::string> attrs;
                for (const auto& a : mra::schema_of(l, db)) {
                    attrs.push_back(a);
                    if (chance(rng, 0.6)) s.insert(a);
                }
                if (s.empty()) s.insert(pick(rng, attrs));
                return mra::e_project(s, l);
            }
            case 4: {
                auto l = gen(depth - 1);
                auto s = mra::schema_of(l, db);
                std::vector<std::string> from(s.begin(), s.end()), to;
                for (const auto& a : kAttrs)
                    if (!s.count(a)) to.push_back(a);
                if (to.empty()) return l;
                return mra::e_rename(pick(rng, from), pick(rng, to), l);
            }
            default: {
                auto l = gen(depth - 1);
                return mra::e_select(random_formula(rng, mra::schema_of(l, db), consts, static_cast<int>(below(rng, 3))), l);
            }
        }
    }

    // An expression with exactly the given schema.
    mra::ExprPtr conform(const mra::Schema& target, std::size_t depth, const mra::ExprPtr& fallback) {
        for (int i = 0; i < 8; ++i) {
            auto e = gen(depth);
            auto s = mra::schema_of(e, db);
            if (std::includes(s.begin(), s.end(), target.begin(), target.end()))
                return s == target ? e : mra::e_project(target, e);
        }
        return mra::e_select(random_formula(rng, target, consts, 0), fallback);
    }
};

}  // namespace

mra::ExprPtr random_expr(Rng& rng, const Bounds& b) {
    ExprGen g{rng, fuzz_schemas(), universe(b.max_terms)};
    return g.gen(b.max_depth);
}

mra::Database random_database(Rng& rng, const Bounds& b) {
    mra::Database db;
    for (const auto& [name, schema] : fuzz_schemas()) db.emplace(name, mra::Relation{schema, {}});
    auto consts = universe(b.max_terms);
    if (consts.empty()) return db;
    std::size_t n = below(rng, b.max_rows + 1);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = db.begin();
        std::advance(it, static_cast<long>(below(rng, db.size())));
        mra::Tuple t;
        for (const auto& a : it->second.schema) t.emplace(a, pick(rng, consts));
        it->second.add(t, 1 + below(rng, 2));
    }
    return db;
}

// ---------------------------------------------------------------- checks

namespace {

enum class Status { Pass, Mismatch, Invalid };

struct Outcome {
    Status status = Status::Pass;
    std::string expected, actual, difference;
    bool nonempty = false;  // the expected answer has rows
};

Outcome invalid() {
    Outcome o;
    o.status = Status::Invalid;
    return o;
}

std::string element_text(const std::map<std::string, Value>& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : m) j[k] = syntax::print_value(v);
    return j.dump();
}

template <class E>
std::string first_difference(const Multiset<E>& x, const Multiset<E>& y) {
    std::set<E> keys;
    for (const auto& [e, n] : x) keys.insert(e);
    for (const auto& [e, n] : y) keys.insert(e);
    for (const auto& k : keys)
        if (x.count(k) != y.count(k))
            return element_text(k) + ": expected count " + std::to_string(x.count(k)) + ", actual count " +
                   std::to_string(y.count(k));
    return "";
}

std::string names(const std::set<std::string>& s) {
    std::string out;
    for (const auto& x : s) out += (out.empty() ? "" : ",") + x;
    return "{" + out + "}";
}

std::string difference(const sparql::Omega& e, const sparql::Omega& a) { return first_difference(e, a); }
std::string difference(const datalog::Answer& e, const datalog::Answer& a) {
    if (e.vars != a.vars) return "variables: expected " + names(e.vars) + ", actual " + names(a.vars);
    return first_difference(e.solutions, a.solutions);
}
std::string difference(const mra::Relation& e, const mra::Relation& a) {
    if (e.schema != a.schema) return "schema: expected " + names(e.schema) + ", actual " + names(a.schema);
    return first_difference(e.tuples, a.tuples);
}

bool has_rows(const sparql::Omega& o) { return !o.empty(); }
bool has_rows(const datalog::Answer& a) { return !a.solutions.empty(); }
bool has_rows(const mra::Relation& r) { return !r.tuples.empty(); }

template <class A>
Outcome compare(const A& expected, const A& actual) {
    auto e = syntax::serialize_answer(expected), a = syntax::serialize_answer(actual);
    Outcome o;
    o.nonempty = has_rows(expected);
    if (e == a) return o;
    o.status = Status::Mismatch;
    o.expected = e;
    o.actual = a;
    o.difference = difference(expected, actual);
    return o;
}

Outcome raised(const std::string& expected, const std::exception& ex) {
    return {Status::Mismatch, expected, std::string("error: ") + ex.what() + "\n",
            std::string("translated side raised ") + ex.what()};
}

sparql::EvalOptions eval_options(const Mutations& m) { return {m.union_as_product, m.except_as_difference}; }

// Predicates a translated program reads without defining, with their arities.
std::map<std::string, std::size_t> extensional_vocabulary(const datalog::Query& q) {
    auto ar = datalog::arities(q);
    std::map<std::string, std::size_t> out;
    for (const auto& p : datalog::extensional(q)) out.emplace(p, ar.at(p));
    return out;
}

// Evaluates the source side; any error there means the input is invalid.
template <class F>
auto source(F&& f) -> std::optional<decltype(f())> {
    try {
        return f();
    } catch (const Error&) {
        return std::nullopt;
    }
}

template <class A, class F>
Outcome against(const A& expected, F&& translated) {
    try {
        return compare(expected, translated());
    } catch (const std::exception& ex) {
        return raised(syntax::serialize_answer(expected), ex);
    }
}

Outcome check_s2d(const sparql::PatternPtr& q, const sparql::Graph& g, const Mutations& m) {
    auto expected = source([&] { return sparql::eval_pattern(q, g, eval_options(m)); });
    if (!expected) return invalid();
    return against(*expected, [&] {
        auto fq = translate::f12(translate::prepare(q));
        return translate::h12(datalog::eval_query(fq, translate::g12(g, {m.omit_bottom_comp})));
    });
}

Outcome check_s2m(const sparql::PatternPtr& q, const sparql::Graph& g, const Mutations& m) {
    auto expected = source([&] { return sparql::eval_pattern(q, g, eval_options(m)); });
    if (!expected) return invalid();
    return against(*expected, [&] {
        return translate::h13(mra::eval_expr(translate::f13(translate::prepare(q)), translate::g13(g)));
    });
}

Outcome check_d2s(const datalog::Query& q, const datalog::Facts& d, const Mutations& m) {
    auto expected = source([&] { return datalog::eval_query(q, d); });
    if (!expected) return invalid();
    return against(*expected, [&] {
        auto fq = translate::f21(translate::prepare(q));
        return translate::h21(sparql::eval_pattern(fq, translate::g21(d), eval_options(m)));
    });
}

Outcome check_d2m(const datalog::Query& q, const datalog::Facts& d, const Mutations&) {
    auto expected = source([&] { return datalog::eval_query(q, d); });
    if (!expected) return invalid();
    return against(*expected, [&] {
        auto pq = translate::prepare(q);
        return translate::h23(mra::eval_expr(translate::f23(pq), translate::g23(d, extensional_vocabulary(pq))));
    });
}

Outcome check_m2d(const mra::ExprPtr& e, const mra::Database& db, const Mutations&) {
    auto expected = source([&] { return mra::eval_expr(e, db); });
    if (!expected) return invalid();
    return against(*expected, [&] {
        auto fq = translate::f32(translate::prepare(e), mra::schemas(db));
        return translate::h32(datalog::eval_query(fq, translate::g32(db)));
    });
}

Outcome check_m2s(const mra::ExprPtr& e, const mra::Database& db, const Mutations& m) {
    auto expected = source([&] { return mra::eval_expr(e, db); });
    if (!expected) return invalid();
    return against(*expected, [&] {
        auto fq = translate::f31(translate::prepare(e), mra::schemas(db));
        return translate::h31(sparql::eval_pattern(fq, translate::g31(db), eval_options(m)));
    });
}

// 1->2->3 against 1->3.
Outcome check_t123(const sparql::PatternPtr& q, const sparql::Graph& g, const Mutations& m) {
    sparql::PatternPtr pq;
    try {
        sparql::in_scope(q);
        pq = translate::prepare(q);
    } catch (const Error&) {
        return invalid();
    }
    sparql::Omega direct;
    try {
        direct = translate::h13(mra::eval_expr(translate::f13(pq), translate::g13(g)));
    } catch (const std::exception& ex) {
        return raised("", ex);
    }
    return against(direct, [&] {
        auto q2 = translate::prepare(translate::f12(pq));
        auto d3 = translate::g23(translate::g12(g, {m.omit_bottom_comp}), extensional_vocabulary(q2));
        return translate::h12(translate::h23(mra::eval_expr(translate::f23(q2), d3)));
    });
}

// 3->2->1 against 3->1.
Outcome check_t321(const mra::ExprPtr& e, const mra::Database& db, const Mutations& m) {
    mra::ExprPtr pe;
    auto schemas = mra::schemas(db);
    try {
        mra::schema_of(e, schemas);
        pe = translate::prepare(e);
    } catch (const Error&) {
        return invalid();
    }
    mra::Relation direct;
    try {
        direct = translate::h31(sparql::eval_pattern(translate::f31(pe, schemas), translate::g31(db), eval_options(m)));
    } catch (const std::exception& ex) {
        return raised("", ex);
    }
    return against(direct, [&] {
        auto q2 = translate::prepare(translate::f32(pe, schemas));
        auto omega = sparql::eval_pattern(translate::f21(q2), translate::g21(translate::g32(db)), eval_options(m));
        return translate::h32(translate::h21(omega));
    });
}

// ---------------------------------------------------------------- shrinking

sparql::PatternPtr rebuild(const sparql::PatternPtr& p, sparql::PatternPtr l, sparql::PatternPtr r) {
    using K = sparql::Pattern::Kind;
    switch (p->kind) {
        case K::And: return sparql::p_and(l, r);
        case K::Union: return sparql::p_union(l, r);
        case K::Except: return sparql::p_except(l, r);
        case K::Filter: return sparql::p_filter(l, p->cond);
        case K::Select: return sparql::p_select(p->vars, l);
        case K::Triple: break;
    }
    return p;
}

std::vector<sparql::PatternPtr> pattern_variants(const sparql::PatternPtr& p) {
    std::vector<sparql::PatternPtr> out;
    if (p->left) out.push_back(p->left);
    if (p->right) out.push_back(p->right);
    if (p->kind == sparql::Pattern::Kind::Filter && !p->cond->atomic()) {
        if (p->cond->a) out.push_back(sparql::p_filter(p->left, p->cond->a));
        if (p->cond->b) out.push_back(sparql::p_filter(p->left, p->cond->b));
    }
    if (p->left)
        for (const auto& v : pattern_variants(p->left)) out.push_back(rebuild(p, v, p->right));
    if (p->right)
        for (const auto& v : pattern_variants(p->right)) out.push_back(rebuild(p, p->left, v));
    return out;
}

mra::ExprPtr rebuild(const mra::ExprPtr& e, mra::ExprPtr l, mra::ExprPtr r) {
    using K = mra::Expr::Kind;
    switch (e->kind) {
        case K::Join: return mra::e_join(l, r);
        case K::Union: return mra::e_union(l, r);
        case K::Except: return mra::e_except(l, r);
        case K::Select: return mra::e_select(e->cond, l);
        case K::Project: return mra::e_project(e->attrs, l);
        case K::Rename: return mra::e_rename(e->from, e->to, l);
        case K::Rel: break;
    }
    return e;
}

std::vector<mra::ExprPtr> expr_variants(const mra::ExprPtr& e) {
    std::vector<mra::ExprPtr> out;
    if (e->left) out.push_back(e->left);
    if (e->right) out.push_back(e->right);
    if (e->kind == mra::Expr::Kind::Select && !e->cond->atomic()) {
        if (e->cond->a) out.push_back(mra::e_select(e->cond->a, e->left));
        if (e->cond->b) out.push_back(mra::e_select(e->cond->b, e->left));
    }
    if (e->left)
        for (const auto& v : expr_variants(e->left)) out.push_back(rebuild(e, v, e->right));
    if (e->right)
        for (const auto& v : expr_variants(e->right)) out.push_back(rebuild(e, e->left, v));
    return out;
}

std::vector<datalog::Query> query_variants(const datalog::Query& q) {
    std::vector<datalog::Query> out;
    const auto& rules = q.program.rules;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        auto c = q;
        c.program.rules.erase(c.program.rules.begin() + static_cast<long>(i));
        out.push_back(std::move(c));
    }
    for (std::size_t i = 0; i < rules.size(); ++i) {
        if (rules[i].body.size() < 2) continue;
        for (std::size_t j = 0; j < rules[i].body.size(); ++j) {
            auto c = q;
            auto& body = c.program.rules[i].body;
            body.erase(body.begin() + static_cast<long>(j));
            out.push_back(std::move(c));
        }
    }
    return out;
}

template <class E>
std::vector<Multiset<E>> multiset_variants(const Multiset<E>& m) {
    std::vector<Multiset<E>> out;
    for (const auto& [e, n] : m) {
        auto c = m;
        c.set(e, 0);
        out.push_back(std::move(c));
        if (n > 1) {
            auto c2 = m;
            c2.set(e, n - 1);
            out.push_back(std::move(c2));
        }
    }
    return out;
}

std::vector<sparql::Graph> graph_variants(const sparql::Graph& g) {
    std::vector<sparql::Graph> out;
    for (const auto& t : g) {
        auto c = g;
        c.erase(t);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<mra::Database> database_variants(const mra::Database& db) {
    std::vector<mra::Database> out;
    for (const auto& [name, r] : db) {
        for (auto& tuples : multiset_variants(r.tuples)) {
            auto c = db;
            c.at(name).tuples = std::move(tuples);
            out.push_back(std::move(c));
        }
    }
    return out;
}

template <class Q, class D>
struct Family {
    std::string name;
    unsigned index;  // stable per check, mixed into the per-iteration seed
    std::function<Q(Rng&)> gen_query;
    std::function<D(Rng&)> gen_data;
    std::function<Outcome(const Q&, const D&)> check;
    std::function<std::vector<Q>(const Q&)> query_variants;
    std::function<std::vector<D>(const D&)> data_variants;
    std::function<std::string(const Q&)> print_query;
    std::function<std::string(const D&)> print_data;
};

// Greedy one-step shrinking until no single removal keeps the mismatch.
template <class Q, class D>
void shrink(const Family<Q, D>& f, Q& q, D& d) {
    std::size_t budget = 2000;
    auto fails = [&](const Q& cq, const D& cd) {
        if (budget == 0) return false;
        --budget;
        return f.check(cq, cd).status == Status::Mismatch;
    };
    bool progress = true;
    while (progress && budget > 0) {
        progress = false;
        for (auto& c : f.query_variants(q)) {
            if (fails(c, d)) {
                q = std::move(c);
                progress = true;
                break;
            }
        }
        if (progress) continue;
        for (auto& c : f.data_variants(d)) {
            if (fails(q, c)) {
                d = std::move(c);
                progress = true;
                break;
            }
        }
    }
}

template <class Q, class D>
CheckStats run(const Family<Q, D>& f, std::size_t iterations, const Config& cfg, std::vector<Counterexample>& out) {
    CheckStats st{f.name};
    for (std::size_t it = 0; it < iterations; ++it) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(f.index), static_cast<std::uint32_t>(it)};
        Rng rng(seq);
        Q q = f.gen_query(rng);
        D d = f.gen_data(rng);
        auto o = f.check(q, d);
        if (o.status == Status::Pass) {
            ++st.passed;
            if (o.nonempty) ++st.nonempty;
            continue;
        }
        if (o.status == Status::Invalid) {
            ++st.skipped;
            continue;
        }
        ++st.failed;
        if (cfg.shrink) {
            shrink(f, q, d);
            o = f.check(q, d);
        }
        out.push_back({f.name, it, f.print_query(q), f.print_data(d), o.expected, o.actual, o.difference});
        if (cfg.stop_at_first) break;
    }
    return st;
}

using PatternFamily = Family<sparql::PatternPtr, sparql::Graph>;
using DatalogFamily = Family<datalog::Query, datalog::Facts>;
using MraFamily = Family<mra::ExprPtr, mra::Database>;

PatternFamily pattern_family(std::string name, unsigned index, const Config& cfg,
                             Outcome (*check)(const sparql::PatternPtr&, const sparql::Graph&, const Mutations&)) {
    Bounds b = cfg.bounds;
    Mutations m = cfg.mutations;
    return {std::move(name),
            index,
            [b](Rng& r) { return random_pattern(r, b); },
            [b](Rng& r) { return random_graph(r, b); },
            [m, check](const sparql::PatternPtr& q, const sparql::Graph& g) { return check(q, g, m); },
            pattern_variants,
            graph_variants,
            [](const sparql::PatternPtr& q) { return syntax::print_sparql(q) + "\n"; },
            syntax::print_rdf};
}

DatalogFamily datalog_family(std::string name, unsigned index, const Config& cfg,
                             Outcome (*check)(const datalog::Query&, const datalog::Facts&, const Mutations&)) {
    Bounds b = cfg.bounds;
    Mutations m = cfg.mutations;
    return {std::move(name),
            index,
            [b](Rng& r) { return random_datalog(r, b); },
            [b](Rng& r) { return random_facts(r, b); },
            [m, check](const datalog::Query& q, const datalog::Facts& d) { return check(q, d, m); },
            query_variants,
            multiset_variants<datalog::Fact>,
            syntax::print_datalog,
            syntax::print_facts};
}

MraFamily mra_family(std::string name, unsigned index, const Config& cfg,
                     Outcome (*check)(const mra::ExprPtr&, const mra::Database&, const Mutations&)) {
    Bounds b = cfg.bounds;
    Mutations m = cfg.mutations;
    return {std::move(name),
            index,
            [b](Rng& r) { return random_expr(r, b); },
            [b](Rng& r) { return random_database(r, b); },
            [m, check](const mra::ExprPtr& e, const mra::Database& db) { return check(e, db, m); },
            expr_variants,
            database_variants,
            [](const mra::ExprPtr& e) { return syntax::print_mra(e) + "\n"; },
            syntax::print_relations};
}

}  // namespace

Report fuzz_equivalence(const Config& cfg) {
    Report rep;
    rep.config = cfg;
    for (Direction d : cfg.directions) {
        auto name = direction_name(d);
        auto index = static_cast<unsigned>(d);
        switch (d) {
            case Direction::S2D:
                rep.stats.push_back(run(pattern_family(name, index, cfg, check_s2d), cfg.iterations, cfg, rep.counterexamples));
                break;
            case Direction::S2M:
                rep.stats.push_back(run(pattern_family(name, index, cfg, check_s2m), cfg.iterations, cfg, rep.counterexamples));
                break;
            case Direction::D2S:
                rep.stats.push_back(run(datalog_family(name, index, cfg, check_d2s), cfg.iterations, cfg, rep.counterexamples));
                break;
            case Direction::D2M:
                rep.stats.push_back(run(datalog_family(name, index, cfg, check_d2m), cfg.iterations, cfg, rep.counterexamples));
                break;
            case Direction::M2D:
                rep.stats.push_back(run(mra_family(name, index, cfg, check_m2d), cfg.iterations, cfg, rep.counterexamples));
                break;
            case Direction::M2S:
                rep.stats.push_back(run(mra_family(name, index, cfg, check_m2s), cfg.iterations, cfg, rep.counterexamples));
                break;
        }
    }
    if (cfg.triangle_iterations > 0) {
        rep.stats.push_back(run(pattern_family("1->2->3 vs 1->3", 6, cfg, check_t123), cfg.triangle_iterations, cfg,
                                rep.counterexamples));
        rep.stats.push_back(run(mra_family("3->2->1 vs 3->1", 7, cfg, check_t321), cfg.triangle_iterations, cfg,
                                rep.counterexamples));
    }
    return rep;
}

std::string Report::text() const {
    std::ostringstream out;
    const auto& b = config.bounds;
    out << "seed " << config.seed << ", " << config.iterations << " iterations per direction, "
        << config.triangle_iterations << " per triangle; terms <= " << b.max_terms << ", rows <= " << b.max_rows
        << ", depth <= " << b.max_depth << "\n";
    const auto& m = config.mutations;
    if (m.union_as_product || m.except_as_difference || m.omit_bottom_comp) {
        out << "mutations:";
        if (m.union_as_product) out << " union-as-product";
        if (m.except_as_difference) out << " except-as-difference";
        if (m.omit_bottom_comp) out << " omit-bottom-comp";
        out << "\n";
    }
    for (const auto& s : stats)
        out << s.check << ": passed " << s.passed << " (" << s.nonempty << " with non-empty answers), skipped "
            << s.skipped << ", counterexamples " << s.failed << "\n";
    out << "counterexamples: " << counterexamples.size() << "\n";
    for (std::size_t i = 0; i < counterexamples.size(); ++i) {
        const auto& c = counterexamples[i];
        out << "\n=== counterexample " << i + 1 << " (" << c.check << ", iteration " << c.iteration << ")\n"
            << "query:\n" << c.query << "database:\n" << c.database << "expected:\n" << c.expected << "actual:\n"
            << c.actual << "first difference: " << c.difference << "\n";
    }
    return out.str();
}

}  // namespace msq::harness
