#pragma once

#include <map>
#include <string>

#include "msq/datalog.hpp"
#include "msq/mra.hpp"
#include "msq/sparql.hpp"

// Query, database and answer translators between the three languages.
// Language numbering: 1 = SPARQL, 2 = Datalog, 3 = MRA. fij maps queries
// of i to queries of j, gij maps databases of i to databases of j, and hij
// maps answers of j back to answers of i.
namespace msq::translate {

// Reserved RDF vocabulary.
Value alpha(std::size_t i);                 // position IRIs alpha0, alpha1, ...
Value iri_b();                              // "is a tuple of"
Value relation_iri(const std::string& r);   // identifies a relation
Value attribute_iri(const std::string& a);  // identifies an attribute

// Predicate used for an MRA relation in the Datalog encoding.
std::string relation_predicate(const std::string& r);
// Attribute for position i (1-based) of a Datalog predicate in MRA.
std::string position_attribute(std::size_t i);

// Input preparation: the normal forms each f-translator expects.
sparql::PatternPtr prepare(const sparql::PatternPtr& p);
datalog::Query prepare(const datalog::Query& q);
mra::ExprPtr prepare(const mra::ExprPtr& e);

// SPARQL -> Datalog.
struct G12Options {
    bool omit_bottom_comp = false;  // mutation hook: drop comp facts mentioning the unbound marker
};
datalog::Facts g12(const sparql::Graph& g, const G12Options& opts = {});
// Expects a normalized pattern with atomic filters.
datalog::Query f12(const sparql::PatternPtr& p);
sparql::Omega h12(const datalog::Answer& a);

// Datalog -> SPARQL.
sparql::Graph g21(const datalog::Facts& d);
// Expects a normalized program, rule heads with distinct variables, and a
// goal with at least one variable.
sparql::PatternPtr f21(const datalog::Query& q);
datalog::Answer h21(const sparql::Omega& omega);

// MRA -> Datalog.
datalog::Facts g32(const mra::Database& db);
// Expects atomic selection formulas.
datalog::Query f32(const mra::ExprPtr& e, const mra::SchemaMap& schemas);
mra::Relation h32(const datalog::Answer& a);

// Datalog -> MRA. `vocabulary` lists extra predicates (with arities) that
// need a relation even when d has no facts for them.
mra::Database g23(const datalog::Facts& d, const std::map<std::string, std::size_t>& vocabulary = {});
// Expects a normalized program whose rule heads have distinct variables.
mra::ExprPtr f23(const datalog::Query& q);
datalog::Answer h23(const mra::Relation& r);

// MRA -> SPARQL.
sparql::Graph g31(const mra::Database& db);
// Expects a non-empty result schema.
sparql::PatternPtr f31(const mra::ExprPtr& e, const mra::SchemaMap& schemas);
mra::Relation h31(const sparql::Omega& omega);

// SPARQL -> MRA.
mra::Database g13(const sparql::Graph& g);
// Expects a normalized pattern; complex filters are reduced here.
mra::ExprPtr f13(const sparql::PatternPtr& p);
sparql::Omega h13(const mra::Relation& r);

}  // namespace msq::translate
