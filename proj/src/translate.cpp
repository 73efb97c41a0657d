#include "msq/translate.hpp"

namespace msq::translate {

Value alpha(std::size_t i) { return Value::reserved("alpha" + std::to_string(i)); }
Value iri_b() { return Value::reserved("iri_b"); }
Value relation_iri(const std::string& r) { return Value::reserved("rel:" + r); }
Value attribute_iri(const std::string& a) { return Value::reserved("attr:" + a); }

std::string relation_predicate(const std::string& r) { return "p_" + r; }
std::string position_attribute(std::size_t i) { return "att" + std::to_string(i); }

sparql::PatternPtr prepare(const sparql::PatternPtr& p) {
    auto n = sparql::normalize(p);
    return sparql::filters_atomic(n) ? n : sparql::reduce_filters(n);
}

datalog::Query prepare(const datalog::Query& q) { return datalog::normalize_program(q); }

mra::ExprPtr prepare(const mra::ExprPtr& e) { return mra::reduce_selections(e); }

// Answer translators.

sparql::Omega h12(const datalog::Answer& a) {
    sparql::Omega out;
    for (const auto& [theta, n] : a.solutions) {
        sparql::Mapping mu;
        for (const auto& [x, v] : theta)
            if (!v.is_bottom()) mu.emplace(x, v);
        out.add(mu, n);
    }
    return out;
}

sparql::Omega h13(const mra::Relation& r) {
    sparql::Omega out;
    for (const auto& [t, n] : r.tuples) {
        sparql::Mapping mu;
        for (const auto& [a, v] : t)
            if (!v.is_bottom()) mu.emplace(a, v);
        out.add(mu, n);
    }
    return out;
}

mra::Relation h32(const datalog::Answer& a) {
    mra::Relation r{a.vars, {}};
    for (const auto& [theta, n] : a.solutions) r.add(theta, n);
    return r;
}

datalog::Answer h23(const mra::Relation& r) {
    datalog::Answer a;
    a.vars = r.schema;
    for (const auto& [t, n] : r.tuples) a.solutions.add(t, n);
    return a;
}

namespace {

bool is_marker(const sparql::Mapping& mu) {
    if (mu.empty()) return false;
    for (const auto& [x, v] : mu)
        if (!v.is_null()) return false;
    return true;
}

// Splits off the all-NULL mapping that carries the answer variables.
std::pair<sparql::VarSet, sparql::Omega> strip_marker(const sparql::Omega& omega) {
    const sparql::Mapping* marker = nullptr;
    for (const auto& [mu, n] : omega) {
        if (!is_marker(mu)) continue;
        if (marker) throw Error(ErrorKind::MalformedAnswer, "more than one NULL marker mapping");
        if (n != 1) throw Error(ErrorKind::MalformedAnswer, "NULL marker mapping has cardinality " + std::to_string(n));
        marker = &mu;
    }
    if (!marker) throw Error(ErrorKind::MalformedAnswer, "answer has no NULL marker mapping");
    sparql::VarSet vars;
    for (const auto& [x, v] : *marker) vars.insert(x);
    sparql::Omega rest;
    for (const auto& [mu, n] : omega) {
        if (&mu == marker) continue;
        if (mu.size() != vars.size())
            throw Error(ErrorKind::MalformedAnswer, "a mapping's domain differs from the marker's");
        for (const auto& [x, v] : mu) {
            if (!vars.count(x)) throw Error(ErrorKind::MalformedAnswer, "a mapping's domain differs from the marker's");
            if (v.is_null()) throw Error(ErrorKind::MalformedAnswer, "NULL inside an answer mapping");
        }
        rest.add(mu, n);
    }
    return {vars, rest};
}

}  // namespace

datalog::Answer h21(const sparql::Omega& omega) {
    auto [vars, rest] = strip_marker(omega);
    datalog::Answer a;
    a.vars = vars;
    for (const auto& [mu, n] : rest) a.solutions.add(mu, n);
    return a;
}

mra::Relation h31(const sparql::Omega& omega) {
    auto [vars, rest] = strip_marker(omega);
    mra::Relation r{vars, {}};
    for (const auto& [mu, n] : rest) r.add(mu, n);
    return r;
}

}  // namespace msq::translate
