// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. `--golden-update` rewrites tests/golden from the
// current translators instead of comparing against it.
#include <chrono>
#include <cstring>
#include <functional>
#include <iostream>

#include "msq/harness.hpp"
#include "msq/syntax.hpp"
#include "msq/translate.hpp"
#include "support.hpp"

using namespace msq;
using msq::test::data;

namespace {

bool g_update = false;
const syntax::ParseOptions kReserved{true};

// Collects failure reasons for one criterion.
struct Check {
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    template <class A, class B>
    void expect_eq(const A& actual, const B& expected, const std::string& what) {
        if (!(actual == expected))
            failures.push_back(what + " (got " + std::to_string(actual) + ", want " + std::to_string(expected) + ")");
    }
};

Value iri(const std::string& s) { return Value::iri(s); }

template <class M>
M with(std::initializer_list<std::pair<const std::string, Value>> kv) {
    M m;
    for (const auto& [k, v] : kv) m[k] = v;
    return m;
}

datalog::Fact fact(const std::string& p, std::initializer_list<Value> args) { return {p, args}; }

std::string golden_path(const std::string& name) { return std::string(MSQ_GOLDEN) + "/" + name; }

// Compares `actual` with the parsed golden file, or rewrites the file.
template <class T, class Parse, class Eq>
void golden(Check& c, const std::string& name, const T& actual, const std::string& printed, Parse parse, Eq eq) {
    if (g_update) {
        std::ofstream(golden_path(name)) << printed;
        return;
    }
    try {
        auto expected = parse(msq::test::slurp(golden_path(name)));
        c.expect(eq(actual, expected), "golden " + name + " differs");
    } catch (const std::exception& e) {
        c.failures.push_back("golden " + name + ": " + e.what());
    }
}

// ---------------------------------------------------------------- 1

void bags(Check& c) {
    auto db = syntax::parse_relations(data("bags.rel"));
    auto eval = [&](const std::string& e) { return mra::eval_expr(syntax::parse_mra(e), db).tuples; };
    auto t = [](std::initializer_list<std::pair<const std::string, Value>> kv) { return with<mra::Tuple>(kv); };
    Value a = iri("a"), b = iri("b"), cc = iri("c"), d = iri("d");

    auto sel = eval("select{X = b}(R)");
    c.expect_eq(sel.count(t({{"W", a}, {"X", b}})), 2u, "select X=b count");
    c.expect_eq(sel.total(), 2u, "select X=b size");

    auto join = eval("R join T");
    c.expect_eq(join.count(t({{"W", a}, {"X", b}, {"Y", b}, {"Z", cc}})), 4u, "join (a,b,b,c)");
    c.expect_eq(join.count(t({{"W", a}, {"X", d}, {"Y", b}, {"Z", cc}})), 2u, "join (a,d,b,c)");
    c.expect_eq(join.total(), 6u, "join size");

    auto uni = eval("R + S");
    c.expect_eq(uni.count(t({{"W", a}, {"X", b}})), 3u, "union (a,b)");
    c.expect_eq(uni.count(t({{"W", a}, {"X", d}})), 1u, "union (a,d)");
    c.expect_eq(uni.total(), 4u, "union size");

    auto diff = eval("R \\ S");
    c.expect_eq(diff.count(t({{"W", a}, {"X", d}})), 1u, "except (a,d)");
    c.expect_eq(diff.total(), 1u, "except size");

    auto proj = eval("project{W}(R)");
    c.expect_eq(proj.count(t({{"W", a}})), 3u, "project W");
    c.expect_eq(proj.total(), 3u, "project size");
}

// ---------------------------------------------------------------- 2

void proofs(Check& c) {
    auto q = syntax::parse_datalog_query(data("proofs.dl"));
    auto d = syntax::parse_facts(data("proofs.facts"));
    auto ans = datalog::eval_query(q, d);
    c.expect_eq(ans.solutions.count(with<datalog::Subst>({{"X", iri("a")}})), 4u, "eval_query q(a)");
    c.expect_eq(ans.solutions.total(), 4u, "eval_query size");

    auto trees = datalog::derivation_trees(q.program, d);
    auto atoms = datalog::all_atoms(q.program, d);
    for (auto [pred, n] : {std::pair<const char*, Count>{"r", 2}, {"p", 2}, {"q", 4}}) {
        c.expect_eq(trees.count(fact(pred, {iri("a")})), n, std::string("derivation trees for ") + pred + "(a)");
        c.expect_eq(atoms.count(fact(pred, {iri("a")})), n, std::string("proof count for ") + pred + "(a)");
    }
}

// ---------------------------------------------------------------- 3

auto facts_eq = [](const datalog::Facts& a, const datalog::Facts& b) { return a == b; };
auto graph_eq = [](const sparql::Graph& a, const sparql::Graph& b) { return a == b; };
auto db_eq = [](const mra::Database& a, const mra::Database& b) { return a == b; };
auto pattern_eq = [](const sparql::PatternPtr& a, const sparql::PatternPtr& b) { return sparql::equal(a, b); };
auto expr_eq = [](const mra::ExprPtr& a, const mra::ExprPtr& b) { return mra::equal(a, b); };
auto query_eq = [](const datalog::Query& a, const datalog::Query& b) { return a == b; };

auto parse_facts = [](const std::string& s) { return syntax::parse_facts(s, kReserved); };
auto parse_rdf = [](const std::string& s) { return syntax::parse_rdf(s, kReserved); };
auto parse_rel = [](const std::string& s) { return syntax::parse_relations(s, kReserved); };
auto parse_sparql = [](const std::string& s) { return syntax::parse_sparql(s, kReserved); };
auto parse_mra = [](const std::string& s) { return syntax::parse_mra(s, kReserved); };
auto parse_query = [](const std::string& s) { return syntax::parse_datalog_query(s, kReserved); };

std::map<std::string, Count> per_predicate(const datalog::Facts& d) {
    std::map<std::string, Count> out;
    for (const auto& [f, n] : d) out[f.pred] += n;
    return out;
}

void golden_translations(Check& c) {
    const auto people = syntax::parse_rdf(data("people.nt"));
    Value alice = iri("alice"), bob = iri("bob"), carol = iri("carol"), santiago = iri("santiago"),
          lima = iri("lima"), lives = iri("livesIn"), knows = iri("knows"), bot = Value::bottom();

    // g12 on the five-triple graph.
    auto d12 = translate::g12(people);
    golden(c, "g12_people.facts", d12, syntax::print_facts(d12), parse_facts, facts_eq);
    auto per = per_predicate(d12);
    c.expect_eq(per["term"], 7u, "g12 term facts");
    c.expect_eq(per["eq"], 7u, "g12 eq facts");
    c.expect_eq(per["comp"], 22u, "g12 comp facts");
    c.expect_eq(per["triple"], 5u, "g12 triple facts");
    c.expect_eq(per["null"], 1u, "g12 null facts");
    for (const auto& t : {alice, lima})
        for (const auto& f : {fact("term", {t}), fact("eq", {t, t}), fact("comp", {t, t, t}), fact("comp", {t, bot, t}),
                              fact("comp", {bot, t, t})})
            c.expect_eq(d12.count(f), 1u, "g12 contains " + f.pred + " for " + t.text);
    c.expect_eq(d12.count(fact("comp", {bot, bot, bot})), 1u, "g12 comp(bottom x3)");
    c.expect_eq(d12.count(fact("null", {bot})), 1u, "g12 null(bottom)");
    c.expect_eq(d12.count(fact("triple", {carol, lives, lima})), 1u, "g12 triple(carol, livesIn, lima)");

    // Normalization and f12 of the people query.
    auto raw = syntax::parse_sparql(data("people.rq"));
    auto normal = translate::prepare(raw);
    c.expect(sparql::equal(normal, syntax::parse_sparql(data("people_normalized.rq"))),
             "normalized people query differs from the hand-normalized form");
    golden(c, "people_normalized.rq", normal, syntax::print_sparql(normal) + "\n", parse_sparql, pattern_eq);
    auto q12 = translate::f12(normal);
    golden(c, "f12_people.dl", q12, syntax::print_datalog(q12), parse_query, query_eq);
    c.expect_eq(q12.program.rules.size(), 12u, "f12 rule count");
    std::vector<std::string> heads;
    for (const auto& r : q12.program.rules) heads.push_back(r.head.pred);
    c.expect(heads == std::vector<std::string>{"p1", "p2", "p3", "p4", "p5", "p6", "p7", "p8", "p9", "p10", "p11", "p11"},
             "f12 predicates are not numbered in post-order");
    c.expect(q12.goal.pred == "p11", "f12 goal predicate");
    if (q12.program.rules.size() == 12) {
        const auto& r9 = q12.program.rules[8];
        c.expect(r9.body.size() == 2 && r9.body[1].negated && r9.body[1].atom.pred == "p8", "f12 p9 negates p8");
        const auto& r10 = q12.program.rules[9];
        c.expect(r10.body.size() == 2 && r10.body[1].atom.pred == "null", "f12 p10 pads ?somebody with null");
        const auto& r3 = q12.program.rules[2];
        c.expect(r3.body.size() == 3 && r3.body[2].atom.pred == "comp", "f12 p3 joins through comp");
    }

    // g21 on the five facts.
    auto d616 = syntax::parse_facts(data("mixed_arity.facts"));
    auto g21 = translate::g21(d616);
    golden(c, "g21_mixed_arity.nt", g21, syntax::print_rdf(g21), parse_rdf, graph_eq);
    c.expect_eq(g21.size(), 18u, "g21 triple count");
    c.expect(g21.count({Value::null(), Value::null(), Value::null()}) == 1, "g21 NULL triple");
    std::map<Value, std::map<Value, Value>> by_subject;
    for (const auto& t : g21) by_subject[t.s][t.p] = t.o;
    std::multiset<std::vector<Value>> encoded;
    for (const auto& [s, props] : by_subject) {
        if (s.is_null()) continue;
        std::vector<Value> row;
        for (const auto& [p, o] : props) row.push_back(o);
        encoded.insert(row);
    }
    std::multiset<std::vector<Value>> expected616 = {{iri("p"), iri("a"), iri("b")},
                                                     {iri("p"), iri("a"), iri("b")},
                                                     {iri("p"), iri("a"), iri("c")},
                                                     {iri("q"), iri("b"), iri("d"), iri("a")},
                                                     {iri("q"), iri("b"), iri("e"), iri("a")}};
    c.expect(encoded == expected616, "g21 copies do not encode the five facts");

    // f21 of q(X) :- p(X, Y).
    auto q617 = syntax::parse_datalog_query(data("projection.dl"));
    auto p21 = translate::f21(translate::prepare(q617));
    golden(c, "f21_projection.rq", p21, syntax::print_sparql(p21) + "\n", parse_sparql, pattern_eq);
    c.expect(sparql::equal(p21, syntax::parse_sparql(data("projection_expected.rq"), kReserved)),
             "f21 differs from the expected pattern");
    auto on_empty = sparql::eval_pattern(p21, translate::g21({}));
    sparql::Omega null_only;
    null_only.add({{"X", Value::null()}});
    c.expect(on_empty == null_only, "f21 over g21(empty) is not {X -> NULL}");
    auto back = translate::h21(on_empty);
    c.expect(back.vars == std::set<std::string>{"X"} && back.solutions.empty(), "h21 of the empty case");

    // g32.
    auto db72 = syntax::parse_relations(data("two_relations.rel"));
    auto d32 = translate::g32(db72);
    golden(c, "g32_two_relations.facts", d32, syntax::print_facts(d32), parse_facts, facts_eq);
    datalog::Facts want32;
    want32.add(fact("p_r", {iri("a1"), iri("a2")}), 2);
    want32.add(fact("p_r", {iri("a1"), iri("a3")}));
    want32.add(fact("p_s", {iri("a1"), iri("a4")}));
    for (const char* x : {"a1", "a2", "a3", "a4"}) want32.add(fact("eq", {iri(x), iri(x)}));
    c.expect(d32 == want32, "g32 differs from the eight expected facts");

    // g23.
    auto d78 = syntax::parse_facts(data("two_predicates.facts"));
    auto db23 = translate::g23(d78);
    golden(c, "g23_two_predicates.rel", db23, syntax::print_relations(db23), parse_rel, db_eq);
    mra::Relation r1{{"att1", "att2"}, {}}, r2{{"att1", "att2"}, {}};
    r1.add(with<mra::Tuple>({{"att1", iri("c1")}, {"att2", iri("c2")}}), 2);
    r1.add(with<mra::Tuple>({{"att1", iri("c1")}, {"att2", iri("c3")}}));
    r2.add(with<mra::Tuple>({{"att1", iri("c1")}, {"att2", iri("c4")}}));
    c.expect(db23 == mra::Database{{"p1", r1}, {"p2", r2}}, "g23 differs from the two expected relations");

    // g31.
    auto g31 = translate::g31(db72);
    golden(c, "g31_two_relations.nt", g31, syntax::print_rdf(g31), parse_rdf, graph_eq);
    c.expect_eq(g31.size(), 13u, "g31 triple count");
    std::size_t members = 0;
    for (const auto& t : g31) members += t.p == translate::iri_b();
    c.expect_eq(members, 4u, "g31 tuple copies");

    // f31 of R join S and its two evaluations.
    auto s85 = mra::schemas(syntax::parse_relations(data("join.rel")));
    auto e85 = syntax::parse_mra(data("join.mra"));
    auto p31 = translate::f31(e85, s85);
    golden(c, "f31_join.rq", p31, syntax::print_sparql(p31) + "\n", parse_sparql, pattern_eq);
    sparql::Omega full, empty_case;
    full.add({{"A", iri("a")}, {"B", iri("b")}, {"C", iri("c")}}, 2);
    full.add({{"A", Value::null()}, {"B", Value::null()}, {"C", Value::null()}});
    empty_case.add({{"A", Value::null()}, {"B", Value::null()}, {"C", Value::null()}});
    auto db85 = syntax::parse_relations(data("join.rel"));
    auto db85e = syntax::parse_relations(data("join_empty.rel"));
    c.expect(sparql::eval_pattern(p31, translate::g31(db85)) == full, "f31 answer with R non-empty");
    c.expect(sparql::eval_pattern(p31, translate::g31(db85e)) == empty_case, "f31 answer with R empty");
    auto rel = translate::h31(sparql::eval_pattern(p31, translate::g31(db85e)));
    c.expect(rel.schema == mra::Schema{"A", "B", "C"} && rel.tuples.empty(), "h31 of the empty case");

    // g13.
    auto db13 = translate::g13(people);
    golden(c, "g13_people.rel", db13, syntax::print_relations(db13), parse_rel, db_eq);
    c.expect_eq(db13["Trip"].tuples.total(), 5u, "g13 Trip size");
    c.expect_eq(db13["Null"].tuples.total(), 1u, "g13 Null size");
    c.expect_eq(db13["Comp"].tuples.total(), 22u, "g13 Comp size");
    c.expect_eq(db13["Null"].tuples.count({{"N", bot}}), 1u, "g13 Null holds the unbound marker");
    for (const auto& row : {std::vector<Value>{bot, bot, bot}, {alice, alice, alice}, {alice, bot, alice},
                            {bot, alice, alice}, {lima, lima, lima}, {bot, lives, lives}})
        c.expect_eq(db13["Comp"].tuples.count({{"A1", row[0]}, {"A2", row[1]}, {"A", row[2]}}), 1u, "g13 Comp row");
    c.expect_eq(db13["Trip"].tuples.count({{"S", alice}, {"P", knows}, {"O", bob}}), 1u, "g13 Trip row");

    // f13 of the normalized people query, and the answer every route must give.
    auto e13 = translate::f13(normal);
    golden(c, "f13_people.mra", e13, syntax::print_mra(e13) + "\n", parse_mra, expr_eq);
    sparql::Omega want;
    want.add({{"person", alice}, {"somewhere", santiago}, {"somebody", bob}});
    want.add({{"person", bob}, {"somewhere", santiago}, {"somebody", carol}});
    want.add({{"person", carol}, {"somewhere", lima}});
    c.expect(sparql::eval_pattern(raw, people) == want, "people query, direct evaluation");
    c.expect(translate::h13(mra::eval_expr(e13, db13)) == want, "people query through MRA");
    c.expect(translate::h12(datalog::eval_query(q12, d12)) == want, "people query through Datalog");
}

// ---------------------------------------------------------------- 4

using sparql::Truth;
constexpr Truth T = Truth::True, F = Truth::False, E = Truth::Error;

// Bit set over {true, false, error}.
using Allowed = unsigned;
constexpr Allowed kT = 1, kF = 2, kE = 4, kFE = kF | kE;
Allowed bit(Truth t) { return t == T ? kT : t == F ? kF : kE; }

struct ErrorRow {
    Truth p1, p2, phi;
    Allowed e1, e2, psi1, psi2, psi3, err;
};

// Values of the error formula components for a conjunction and a disjunction.
const ErrorRow kConjunction[] = {
    {T, T, T, kFE, kFE, kFE, kFE, kFE, kFE}, {T, F, F, kFE, kFE, kFE, kF, kFE, kFE},
    {T, E, E, kFE, kT, kT, kFE, kFE, kT},    {F, T, F, kFE, kFE, kF, kFE, kFE, kFE},
    {F, F, F, kFE, kFE, kF, kF, kFE, kFE},   {F, E, F, kFE, kT, kF, kFE, kFE, kFE},
    {E, T, E, kT, kFE, kFE, kT, kFE, kT},    {E, F, F, kT, kFE, kFE, kF, kFE, kFE},
    {E, E, E, kT, kT, kE, kE, kT, kT},
};
const ErrorRow kDisjunction[] = {
    {T, T, T, kFE, kFE, kF, kF, kFE, kFE},   {T, F, T, kFE, kFE, kF, kFE, kFE, kFE},
    {T, E, T, kFE, kT, kF, kFE, kFE, kFE},   {F, T, T, kFE, kFE, kFE, kF, kFE, kFE},
    {F, F, F, kFE, kFE, kFE, kFE, kFE, kFE}, {F, E, E, kFE, kT, kT, kFE, kFE, kT},
    {E, T, T, kT, kFE, kFE, kF, kFE, kFE},   {E, F, E, kT, kFE, kFE, kT, kFE, kT},
    {E, E, E, kT, kT, kE, kE, kT, kT},
};

std::vector<sparql::FilterPtr> formulas_upto(int connectives, const std::vector<sparql::FilterPtr>& atoms) {
    std::vector<std::vector<sparql::FilterPtr>> by(connectives + 1);
    by[0] = atoms;
    for (int k = 1; k <= connectives; ++k) {
        for (const auto& f : by[k - 1]) by[k].push_back(sparql::f_not(f));
        for (int i = 0; i < k; ++i)
            for (const auto& a : by[i])
                for (const auto& b : by[k - 1 - i]) {
                    by[k].push_back(sparql::f_and(a, b));
                    by[k].push_back(sparql::f_or(a, b));
                }
    }
    std::vector<sparql::FilterPtr> out;
    for (const auto& level : by) out.insert(out.end(), level.begin(), level.end());
    return out;
}

std::vector<sparql::Mapping> assignments(const std::vector<std::string>& vars, const std::vector<Value>& values) {
    std::vector<sparql::Mapping> out{{}};
    for (const auto& v : vars) {
        std::vector<sparql::Mapping> next;
        for (const auto& mu : out) {
            next.push_back(mu);
            for (const auto& c : values) {
                auto m = mu;
                m[v] = c;
                next.push_back(m);
            }
        }
        out = std::move(next);
    }
    return out;
}

void three_valued(Check& c) {
    using sparql::eval_filter;
    // Connective tables, both as functions and through formulas whose atoms
    // take each truth value under mu = {x -> a}.
    const Truth table3[9][4] = {{T, T, T, T}, {T, F, F, T}, {T, E, E, T}, {F, T, F, T}, {F, F, F, F},
                                {F, E, F, E}, {E, T, E, T}, {E, F, F, E}, {E, E, E, E}};
    const Truth negation[3][2] = {{T, F}, {F, T}, {E, E}};
    sparql::Mapping mu{{"x", iri("a")}};
    auto atom_for = [](Truth t) {
        return t == T ? sparql::f_eq("x", iri("a")) : t == F ? sparql::f_eq("x", iri("b")) : sparql::f_eq("y", iri("a"));
    };
    int rows = 0;
    for (const auto& r : table3) {
        c.expect(sparql::truth_and(r[0], r[1]) == r[2], "conjunction table row");
        c.expect(sparql::truth_or(r[0], r[1]) == r[3], "disjunction table row");
        c.expect(eval_filter(sparql::f_and(atom_for(r[0]), atom_for(r[1])), mu) == r[2], "conjunction formula row");
        c.expect(eval_filter(sparql::f_or(atom_for(r[0]), atom_for(r[1])), mu) == r[3], "disjunction formula row");
        rows += 2;
    }
    for (const auto& r : negation) {
        c.expect(sparql::truth_not(r[0]) == r[1], "negation table row");
        c.expect(eval_filter(sparql::f_not(atom_for(r[0])), mu) == r[1], "negation formula row");
        ++rows;
    }
    c.expect_eq(rows, 21, "connective table rows");

    // Error formulas over every assignment of two variables.
    std::vector<sparql::FilterPtr> atoms = {sparql::f_eq("x", iri("a")), sparql::f_eq("y", iri("a")),
                                            sparql::f_eq("x", std::string("y")), sparql::f_bound("x"),
                                            sparql::f_bound("y")};
    auto mus = assignments({"x", "y"}, {iri("a"), iri("b")});
    auto all = formulas_upto(2, atoms);
    std::size_t checked = 0, row_hits[2][9] = {};
    for (const auto& f : all) {
        auto err = sparql::error_condition(f);
        const ErrorRow* table = nullptr;
        sparql::FilterPtr psi[3];
        if (f->kind == sparql::Filter::Kind::And || f->kind == sparql::Filter::Kind::Or) {
            auto e1 = sparql::error_condition(f->a), e2 = sparql::error_condition(f->b);
            bool conj = f->kind == sparql::Filter::Kind::And;
            table = conj ? kConjunction : kDisjunction;
            psi[0] = sparql::f_and(conj ? f->a : sparql::f_not(f->a), e2);
            psi[1] = sparql::f_and(e1, conj ? f->b : sparql::f_not(f->b));
            psi[2] = sparql::f_and(e1, e2);
        }
        for (const auto& m : mus) {
            Truth v = eval_filter(f, m);
            bool errs = eval_filter(err, m) == T;
            if (errs != (v == E)) {
                c.failures.push_back("error formula wrong for " + syntax::print_filter(f));
                break;
            }
            ++checked;
            if (!table) continue;
            Truth v1 = eval_filter(f->a, m), v2 = eval_filter(f->b, m);
            for (int i = 0; i < 9; ++i) {
                const auto& r = table[i];
                if (r.p1 != v1 || r.p2 != v2) continue;
                ++row_hits[table == kDisjunction][i];
                bool ok = bit(v) == bit(r.phi) && (bit(eval_filter(sparql::error_condition(f->a), m)) & r.e1) &&
                          (bit(eval_filter(sparql::error_condition(f->b), m)) & r.e2) &&
                          (bit(eval_filter(psi[0], m)) & r.psi1) && (bit(eval_filter(psi[1], m)) & r.psi2) &&
                          (bit(eval_filter(psi[2], m)) & r.psi3) && (bit(eval_filter(err, m)) & r.err);
                if (!ok) c.failures.push_back("error table row " + std::to_string(i + 1) + " for " + syntax::print_filter(f));
            }
        }
    }
    for (int t = 0; t < 2; ++t)
        for (int i = 0; i < 9; ++i)
            c.expect(row_hits[t][i] > 0, std::string(t ? "disjunction" : "conjunction") + " error row " +
                                             std::to_string(i + 1) + " never reached");
    c.expect(checked > 10000, "too few formula/assignment pairs");

    // x = a or not x = a: an error exactly when x is unbound.
    auto l = sparql::f_eq("x", iri("a"));
    auto phi = sparql::f_or(l, sparql::f_not(l));
    auto err = sparql::error_condition(phi);
    auto unbound = sparql::f_not(sparql::f_bound("x"));
    const std::pair<sparql::Mapping, std::pair<Truth, Truth>> cases[] = {
        {{{"x", iri("a")}}, {T, F}}, {{{"x", iri("b")}}, {T, F}}, {{}, {E, T}}};
    for (const auto& [m, want] : cases) {
        c.expect(eval_filter(phi, m) == want.first, "excluded-middle value");
        c.expect(eval_filter(err, m) == want.second, "excluded-middle error value");
        c.expect(eval_filter(err, m) == eval_filter(unbound, m), "error formula is not equivalent to !bound(?x)");
    }
}

// ---------------------------------------------------------------- 5

std::vector<sparql::Graph> all_graphs(const std::vector<sparql::Triple>& space) {
    std::vector<sparql::Graph> out;
    for (unsigned mask = 0; mask < (1u << space.size()); ++mask) {
        sparql::Graph g;
        for (std::size_t i = 0; i < space.size(); ++i)
            if (mask >> i & 1) g.insert(space[i]);
        out.push_back(std::move(g));
    }
    return out;
}

void rewrites(Check& c) {
    using namespace sparql;
    // Graphs over the terms a, b, p.
    std::vector<Triple> space;
    for (const char* s : {"a", "b"})
        for (const char* o : {"a", "b", "p"}) space.push_back({iri(s), iri("p"), iri(o)});
    auto graphs = all_graphs(space);
    std::vector<PatternPtr> bases = {
        syntax::parse_sparql("((?x, p, ?y) UNION (?x, p, ?y))"),
        syntax::parse_sparql("((?x, p, ?y) UNION (SELECT ?x WHERE (?x, p, ?w)))"),
        syntax::parse_sparql("((SELECT ?y WHERE (?x, p, ?y)) UNION (?x, p, ?y))"),
    };
    std::vector<FilterPtr> atoms = {f_eq("x", iri("a")), f_eq("y", iri("a")), f_eq("y", iri("b")),
                                    f_eq("x", std::string("y")), f_bound("y")};
    auto conds = formulas_upto(1, atoms);
    std::size_t instances = 0;
    auto same = [&](const PatternPtr& l, const PatternPtr& r, const Graph& g, const char* eq) {
        ++instances;
        if (eval_pattern(l, g) != eval_pattern(r, g))
            c.failures.push_back(std::string("equivalence ") + eq + " fails for " + syntax::print_sparql(l));
    };
    for (const auto& g : graphs)
        for (const auto& p : bases) {
            for (const auto& f1 : conds) {
                // Negation rewrite.
                same(p_filter(p, f_not(f1)),
                     p_except(p_except(p, p_filter(p, f1)), p_filter(p, error_condition(f1))), g, "(6)");
                for (const auto& f2 : atoms) {
                    same(p_filter(p, f_and(f1, f2)), p_filter(p_filter(p, f1), f2), g, "(1)");
                    auto rhs = p_union(
                        p_union(p_union(p_union(p_filter(p, f_and(f1, f2)), p_filter(p, f_and(f1, f_not(f2)))),
                                        p_filter(p, f_and(f_not(f1), f2))),
                                p_filter(p, f_and(f1, error_condition(f2)))),
                        p_filter(p, f_and(error_condition(f1), f2)));
                    same(p_filter(p, f_or(f1, f2)), rhs, g, "(5)");
                }
            }
            if (c.failures.size() > 5) return;
        }

    // Selection rewrites on every relation R(A, B) over {a, b} x {a, b, c}
    // with counts up to 2.
    using namespace mra;
    std::vector<Tuple> cells;
    for (const char* x : {"a", "b"})
        for (const char* y : {"a", "b", "c"}) cells.push_back({{"A", iri(x)}, {"B", iri(y)}});
    std::vector<FormulaPtr> psis = {f_eq(Operand::attribute("A"), Operand::constant(iri("a"))),
                                    f_eq(Operand::attribute("B"), Operand::constant(iri("a"))),
                                    f_eq(Operand::attribute("A"), Operand::attribute("B")),
                                    f_eq(Operand::attribute("B"), Operand::constant(iri("c")))};
    auto r = e_rel("R");
    std::size_t combos = 1;
    for (std::size_t i = 0; i < cells.size(); ++i) combos *= 3;
    for (std::size_t code = 0; code < combos; ++code) {
        Relation rel{{"A", "B"}, {}};
        std::size_t k = code;
        for (const auto& t : cells) {
            rel.add(t, k % 3);
            k /= 3;
        }
        Database db{{"R", rel}};
        auto check = [&](const ExprPtr& l, const ExprPtr& rr, const char* eq) {
            ++instances;
            if (!(eval_expr(l, db) == eval_expr(rr, db)))
                c.failures.push_back(std::string("equivalence ") + eq + " fails for " + syntax::print_mra(l));
        };
        for (const auto& p1 : psis) {
            check(e_select(f_not(p1), r), e_except(r, e_select(p1, r)), "(9)");
            for (const auto& p2 : psis) {
                check(e_select(f_and(p1, p2), r), e_select(p2, e_select(p1, r)), "(7)");
                check(e_select(f_or(p1, p2), r),
                      e_union(e_union(e_select(f_and(p1, f_not(p2)), r), e_select(f_and(f_not(p1), p2), r)),
                              e_select(f_and(p1, p2), r)),
                      "(8)");
            }
        }
        if (c.failures.size() > 5) return;
    }
    c.expect(instances > 100000, "too few rewrite instances");

    // Stored counterexamples to the naive splits.
    auto g2 = syntax::parse_rdf(data("disjunction_split.nt"));
    auto lhs2 = eval_pattern(syntax::parse_sparql(data("disjunction_split.rq")), g2);
    auto rhs2 = eval_pattern(syntax::parse_sparql(data("disjunction_split_naive.rq")), g2);
    sparql::Mapping m2{{"x", iri("a")}, {"y", iri("a")}};
    c.expect(lhs2.count(m2) == 1 && rhs2.count(m2) == 2, "naive disjunction split should double the count");
    auto g3 = syntax::parse_rdf(data("negation_split.nt"));
    auto lhs3 = eval_pattern(syntax::parse_sparql(data("negation_split.rq")), g3);
    auto rhs3 = eval_pattern(syntax::parse_sparql(data("negation_split_naive.rq")), g3);
    sparql::Mapping m3{{"x", iri("a")}, {"y", iri("b")}};
    c.expect(lhs3.count(m3) == 0 && rhs3.count(m3) == 1, "naive negation split should keep the error mapping");
    // The sound rewrites repair both.
    c.expect(eval_pattern(reduce_filters(normalize(syntax::parse_sparql(data("disjunction_split.rq")))), g2) == lhs2,
             "disjunction rewrite on the stored counterexample");
    c.expect(eval_pattern(reduce_filters(normalize(syntax::parse_sparql(data("negation_split.rq")))), g3) == lhs3,
             "negation rewrite on the stored counterexample");
}

// ---------------------------------------------------------------- 6

void normalization(Check& c) {
    harness::Bounds b;
    int bad[4] = {};
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        harness::Rng rng(seed);
        auto p = harness::random_pattern(rng, b);
        auto g = harness::random_graph(rng, b);
        auto want = sparql::eval_pattern(p, g);
        auto n = sparql::normalize(p);
        bad[0] += !sparql::is_normalized(n) || sparql::eval_pattern(n, g) != want;
        auto r = sparql::reduce_filters(n);
        bad[1] += !sparql::filters_atomic(r) || sparql::eval_pattern(r, g) != want;

        auto q = harness::random_datalog(rng, b);
        auto d = harness::random_facts(rng, b);
        auto qn = datalog::normalize_program(q);
        bad[2] += !datalog::is_normalized(qn.program) || !(datalog::eval_query(qn, d) == datalog::eval_query(q, d));

        auto e = harness::random_expr(rng, b);
        auto db = harness::random_database(rng, b);
        auto en = mra::reduce_selections(e);
        bad[3] += !mra::selections_atomic(en) || !(mra::eval_expr(en, db) == mra::eval_expr(e, db));
    }
    const char* names[] = {"normalize", "reduce_filters", "normalize_program", "reduce_selections"};
    for (int i = 0; i < 4; ++i) c.expect(bad[i] == 0, std::string(names[i]) + " broke " + std::to_string(bad[i]) + " of 200");

    harness::Rng rng(2024);
    auto base = sparql::normalize(syntax::parse_sparql("((?x, p, ?y) UNION (SELECT ?x ?y ?z WHERE (?x, q, ?z)))"));
    auto consts = harness::universe(3);
    int left = 0;
    for (int i = 0; i < 1000; ++i) {
        auto f = harness::random_filter(rng, {"x", "y", "z"}, consts, 1 + i % 4);
        left += !sparql::filters_atomic(sparql::reduce_filters(sparql::p_filter(base, f)));
    }
    c.expect(left == 0, "reduce_filters left connectives in " + std::to_string(left) + " of 1000");
}

// ---------------------------------------------------------------- 7, 8

std::string summary(const harness::Report& r) {
    std::size_t passed = 0, nonempty = 0, skipped = 0;
    for (const auto& s : r.stats) {
        passed += s.passed;
        nonempty += s.nonempty;
        skipped += s.skipped;
    }
    return std::to_string(passed) + " passed, " + std::to_string(nonempty) + " with rows, " + std::to_string(skipped) +
           " skipped";
}

std::string g_detail;

void simulations(Check& c) {
    harness::Config cfg;
    cfg.seed = 42;
    cfg.iterations = 500;
    cfg.triangle_iterations = 100;
    cfg.bounds = {3, 6, 4};
    auto r = harness::fuzz_equivalence(cfg);
    c.expect(r.stats.size() == 8, "expected six directions and two triangles");
    for (const auto& ce : r.counterexamples)
        c.failures.push_back("counterexample in " + ce.check + " at iteration " + std::to_string(ce.iteration));
    g_detail = summary(r);
}

void mutants(Check& c) {
    const char* names[] = {"union-as-product", "except-as-difference", "no-bottom-comp"};
    std::string found;
    for (int m = 0; m < 3; ++m) {
        harness::Config cfg;
        cfg.seed = 42;
        cfg.iterations = 100;
        cfg.bounds = {3, 6, 4};
        cfg.mutations = {m == 0, m == 1, m == 2};
        cfg.stop_at_first = true;
        cfg.shrink = false;
        auto r = harness::fuzz_equivalence(cfg);
        if (r.counterexamples.empty()) {
            c.failures.push_back(std::string(names[m]) + " survived");
            continue;
        }
        const auto& first = r.counterexamples.front();
        found += (found.empty() ? "" : ", ") + std::string(names[m]) + " caught by " + first.check + " at iteration " +
                 std::to_string(first.iteration);
    }
    g_detail = found;
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--golden-update") == 0) {
            g_update = true;
        } else {
            std::cerr << "usage: " << argv[0] << " [--golden-update]\n";
            return 1;
        }
    }
    const std::pair<const char*, std::function<void(Check&)>> criteria[] = {
        {"operator semantics on the multiset relations R, S, T", bags},
        {"proof counting r(a):2 p(a):2 q(a):4", proofs},
        {"golden translations", golden_translations},
        {"three-valued logic and error formulas", three_valued},
        {"filter and selection rewrites", rewrites},
        {"normalization soundness", normalization},
        {"simulations, seed 42, 500 per direction, 100 per triangle", simulations},
        {"mutation sensitivity", mutants},
    };
    int failed = 0, n = 0;
    for (const auto& [name, fn] : criteria) {
        ++n;
        Check c;
        g_detail.clear();
        auto t0 = std::chrono::steady_clock::now();
        try {
            fn(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char when[32];
        std::snprintf(when, sizeof when, "%.2f s", secs);
        bool ok = c.failures.empty();
        failed += !ok;
        std::cout << (ok ? "PASS" : "FAIL") << " " << n << " " << name << " (" << when;
        if (!g_detail.empty()) std::cout << "; " << g_detail;
        std::cout << ")";
        if (!ok) std::cout << ": " << c.failures.front();
        if (c.failures.size() > 1) std::cout << " (+" << c.failures.size() - 1 << " more)";
        std::cout << "\n";
    }
    if (g_update) std::cout << "goldens rewritten in " << MSQ_GOLDEN << "\n";
    return failed ? 1 : 0;
}
