#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "msq/datalog.hpp"
#include "msq/mra.hpp"
#include "msq/sparql.hpp"

// Concrete text syntax for queries, databases and answers.
//
// Constants are shared by all languages: lowercase or digit-initial
// identifiers and <...> are IRIs, "..." are literals. The reserved tokens
// _|_, NULL, @name and the filter constant `false` only parse with
// allow_reserved set, since they only appear in translator output.
namespace msq::syntax {

struct ParseOptions {
    bool allow_reserved = false;
};

std::string print_value(const Value& v);

// SPARQL: (?x, p, ?y), (P AND P), (P UNION P), (P EXCEPT P),
// (P FILTER(cond)), (SELECT ?x ?y WHERE P). Conditions use = && || !.
sparql::PatternPtr parse_sparql(const std::string& text, const ParseOptions& opts = {});
sparql::FilterPtr parse_filter(const std::string& text, const ParseOptions& opts = {});
std::string print_sparql(const sparql::PatternPtr& p);
std::string print_filter(const sparql::FilterPtr& f);

// RDF: one `s p o .` per line; duplicates collapse.
sparql::Graph parse_rdf(const std::string& text, const ParseOptions& opts = {});
std::string print_rdf(const sparql::Graph& g);

// Datalog: `h(X) :- a(X, Y), not b(X).`, facts `p(a, b) * 3.`, goal `?- h(X).`
// Variables are uppercase- or underscore-initial identifiers, or ?name.
struct DatalogFile {
    std::optional<datalog::Atom> goal;
    datalog::Program program;
    datalog::Facts facts;
};
DatalogFile parse_datalog(const std::string& text, const ParseOptions& opts = {});
datalog::Query parse_datalog_query(const std::string& text, const ParseOptions& opts = {});
datalog::Facts parse_facts(const std::string& text, const ParseOptions& opts = {});
std::string print_datalog(const datalog::Query& q);
std::string print_rule(const datalog::Rule& r);
std::string print_facts(const datalog::Facts& d);

// MRA: project{A,B}(E), select{A = b}(E), rename{A/B}(E), E join E, E + E,
// E \ E. Binary operators share one precedence and associate left.
// In formulas, attributes are uppercase- or underscore-initial identifiers
// or ?name.
mra::ExprPtr parse_mra(const std::string& text, const ParseOptions& opts = {});
mra::FormulaPtr parse_formula(const std::string& text, const ParseOptions& opts = {});
std::string print_mra(const mra::ExprPtr& e);
std::string print_formula(const mra::FormulaPtr& f);

// Relations: `relation R {A, B}` followed by rows `(a, b) * 2`.
mra::Database parse_relations(const std::string& text, const ParseOptions& opts = {});
std::string print_relations(const mra::Database& db);

// Canonical answer documents: equal answers serialize byte-identically.
nlohmann::json answer_json(const sparql::Omega& omega);
nlohmann::json answer_json(const datalog::Answer& a);
nlohmann::json answer_json(const mra::Relation& r);

template <class A>
std::string serialize_answer(const A& a) {
    return answer_json(a).dump(2) + "\n";
}

}  // namespace msq::syntax
