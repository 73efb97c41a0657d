#include <doctest.h>

#include "msq/harness.hpp"
#include "msq/syntax.hpp"
#include "msq/translate.hpp"

using namespace msq;
using namespace msq::syntax;

TEST_CASE("random SPARQL patterns round-trip") {
    harness::Bounds b;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        harness::Rng rng(seed);
        auto p = harness::random_pattern(rng, b);
        auto text = print_sparql(p);
        CAPTURE(text);
        REQUIRE(sparql::equal(parse_sparql(text), p));
        auto g = harness::random_graph(rng, b);
        REQUIRE(parse_rdf(print_rdf(g)) == g);
    }
}

TEST_CASE("random Datalog programs round-trip") {
    harness::Bounds b;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        harness::Rng rng(seed);
        auto q = harness::random_datalog(rng, b);
        auto text = print_datalog(q);
        CAPTURE(text);
        REQUIRE(parse_datalog_query(text) == q);
        auto d = harness::random_facts(rng, b);
        REQUIRE(parse_facts(print_facts(d)) == d);
    }
}

TEST_CASE("random MRA expressions round-trip") {
    harness::Bounds b;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        harness::Rng rng(seed);
        auto e = harness::random_expr(rng, b);
        auto text = print_mra(e);
        CAPTURE(text);
        REQUIRE(mra::equal(parse_mra(text), e));
        auto db = harness::random_database(rng, b);
        REQUIRE(parse_relations(print_relations(db)) == db);
    }
}

TEST_CASE("translator output round-trips with reserved tokens") {
    ParseOptions reserved{true};
    auto g = parse_rdf("a p b .\nb p \"lit\" .\n");
    auto facts = translate::g12(g);
    CHECK(parse_facts(print_facts(facts), reserved) == facts);
    auto g2 = translate::g21(facts);
    CHECK(parse_rdf(print_rdf(g2), reserved) == g2);
    auto db = translate::g13(g);
    CHECK(parse_relations(print_relations(db), reserved) == db);
    CHECK_THROWS_AS(parse_facts(print_facts(facts)), ParseError);
}

TEST_CASE("parse errors carry positions") {
    try {
        parse_sparql("((?x, p, ?y)\n AND )");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.span().line == 2);
        CHECK(e.span().column == 6);
        CHECK(std::string(e.what()).find("2:6") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_mra("R join"), ParseError);
    CHECK_THROWS_AS(parse_datalog_query("q(X) :- r(X)"), ParseError);
    CHECK_THROWS_AS(parse_relations("relation R {A}\n(a, b)\n"), Error);
}

TEST_CASE("values and literals") {
    CHECK(print_value(Value::iri("abc")) == "abc");
    CHECK(print_value(Value::iri("Abc")) == "<Abc>");
    CHECK(print_value(Value::iri("join")) == "<join>");
    CHECK(print_value(Value::literal("a \"b\"")) == "\"a \\\"b\\\"\"");
    auto g = parse_rdf("<x:y> p \"a \\\"b\\\"\" .\n");
    CHECK(g.begin()->s == Value::iri("x:y"));
    CHECK(g.begin()->o == Value::literal("a \"b\""));
}

TEST_CASE("filters and formulas keep precedence") {
    auto f = parse_filter("?x = a || ?y = b && !bound(?z)");
    CHECK(f->kind == sparql::Filter::Kind::Or);
    CHECK(sparql::equal(parse_filter(print_filter(f)), f));
    auto m = parse_formula("A = b || !(A = B) && C = c");
    CHECK(m->kind == mra::Formula::Kind::Or);
    CHECK(mra::equal(parse_formula(print_formula(m)), m));
}

TEST_CASE("answer documents are canonical") {
    sparql::Omega a, b;
    a.add({{"x", Value::iri("a")}}, 2);
    a.add({});
    b.add({});
    b.add({{"x", Value::iri("a")}}, 2);
    CHECK(serialize_answer(a) == serialize_answer(b));
    auto j = answer_json(a);
    CHECK(j["kind"] == "sparql");
}
