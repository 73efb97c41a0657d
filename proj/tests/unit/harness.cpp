#include <doctest.h>

#include "msq/harness.hpp"
#include "msq/syntax.hpp"
#include "msq/translate.hpp"

using namespace msq;
using namespace msq::harness;

namespace {

Config small(std::size_t n) {
    Config c;
    c.iterations = n;
    c.triangle_iterations = n / 2;
    return c;
}

// The 1->2 check as the harness runs it, with a broken UNION on the SPARQL side.
bool mismatch_union_s2d(const sparql::PatternPtr& q, const sparql::Graph& g) {
    sparql::Omega expected;
    try {
        expected = sparql::eval_pattern(q, g, {true, false});
    } catch (const Error&) {
        return false;
    }
    try {
        auto got = translate::h12(datalog::eval_query(translate::f12(translate::prepare(q)), translate::g12(g)));
        return syntax::serialize_answer(got) != syntax::serialize_answer(expected);
    } catch (const std::exception&) {
        return true;
    }
}

sparql::PatternPtr with_children(const sparql::PatternPtr& p, sparql::PatternPtr l, sparql::PatternPtr r) {
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

// Every pattern obtained by replacing one operator node with one of its operands.
std::vector<sparql::PatternPtr> prunings(const sparql::PatternPtr& p) {
    std::vector<sparql::PatternPtr> out;
    if (p->left) out.push_back(p->left);
    if (p->right) out.push_back(p->right);
    if (p->left)
        for (auto& v : prunings(p->left)) out.push_back(with_children(p, v, p->right));
    if (p->right)
        for (auto& v : prunings(p->right)) out.push_back(with_children(p, p->left, v));
    return out;
}

}  // namespace

TEST_CASE("direction names") {
    CHECK(direction_name(Direction::S2D) == "1->2");
    CHECK(parse_direction("3to1") == Direction::M2S);
    CHECK(parse_direction("23") == Direction::D2M);
    CHECK(parse_direction("sparql-mra") == Direction::S2M);
    CHECK_FALSE(parse_direction("1->1"));
}

TEST_CASE("same config, same report") {
    auto a = fuzz_equivalence(small(40)).text();
    auto b = fuzz_equivalence(small(40)).text();
    CHECK(a == b);
    auto cfg = small(40);
    cfg.seed = 43;
    CHECK(fuzz_equivalence(cfg).text() != a);
}

TEST_CASE("generated inputs are valid") {
    Bounds b;
    auto schemas = fuzz_schemas();
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        auto p = random_pattern(rng, b);
        auto g = random_graph(rng, b);
        CHECK(g.size() <= b.max_rows);
        for (const auto& t : g) CHECK(t.s.is_iri_like());
        CHECK_NOTHROW(translate::prepare(p));
        auto q = random_datalog(rng, b);
        CHECK_NOTHROW(datalog::validate(q));
        auto d = random_facts(rng, b);
        CHECK(d.distinct() <= b.max_rows);
        CHECK_NOTHROW(datalog::validate(q, d));
        auto e = random_expr(rng, b);
        CHECK_NOTHROW(mra::schema_of(e, schemas));
        auto db = random_database(rng, b);
        CHECK(mra::schemas(db) == schemas);
        for (const auto& [name, r] : db)
            for (const auto& [t, n] : r.tuples) CHECK(mra::Schema{} == [&] {
                mra::Schema s;
                for (const auto& [a, v] : t) s.insert(a);
                for (const auto& a : r.schema) s.erase(a);
                return s;
            }());
    }
}

TEST_CASE("zero bounds pass trivially") {
    Config cfg = small(20);
    cfg.bounds = {0, 0, 0};
    auto r = fuzz_equivalence(cfg);
    CHECK(r.counterexamples.empty());
    for (const auto& s : r.stats) CHECK(s.nonempty == 0);
}

TEST_CASE("a healthy build has no counterexamples") {
    auto r = fuzz_equivalence(small(60));
    CHECK(r.counterexamples.empty());
    CHECK(r.stats.size() == 8);
}

TEST_CASE("each mutant is caught") {
    for (int m = 0; m < 3; ++m) {
        Config cfg = small(100);
        cfg.triangle_iterations = 0;
        cfg.stop_at_first = true;
        cfg.shrink = false;
        cfg.mutations = {m == 0, m == 1, m == 2};
        CAPTURE(m);
        CHECK_FALSE(fuzz_equivalence(cfg).counterexamples.empty());
    }
}

TEST_CASE("shrunk counterexamples are locally minimal") {
    Config cfg = small(100);
    cfg.triangle_iterations = 0;
    cfg.directions = {Direction::S2D};
    cfg.mutations.union_as_product = true;
    cfg.stop_at_first = true;
    auto r = fuzz_equivalence(cfg);
    REQUIRE(r.counterexamples.size() == 1);
    const auto& c = r.counterexamples[0];
    auto q = syntax::parse_sparql(c.query);
    auto g = syntax::parse_rdf(c.database);
    REQUIRE(mismatch_union_s2d(q, g));
    for (const auto& t : g) {
        auto smaller = g;
        smaller.erase(t);
        CHECK_FALSE(mismatch_union_s2d(q, smaller));
    }
    for (const auto& v : prunings(q)) CHECK_FALSE(mismatch_union_s2d(v, g));
}

TEST_CASE("report layout") {
    Config cfg = small(10);
    cfg.mutations.union_as_product = true;
    auto text = fuzz_equivalence(cfg).text();
    CHECK(text.rfind("seed 42, 10 iterations per direction", 0) == 0);
    CHECK(text.find("1->2->3 vs 1->3") != std::string::npos);
    CHECK(text.find("=== counterexample 1") != std::string::npos);
    CHECK(text.find("first difference:") != std::string::npos);
}
