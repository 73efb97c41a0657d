#pragma once

#include <compare>
#include <string>

namespace msq {

// A constant shared by all three languages. IRIs and literals are user
// terms; the remaining kinds are the reserved vocabulary the translators
// introduce, and can never compare equal to a user term.
enum class ValueKind : unsigned char {
    Iri,
    Literal,
    Bottom,    // the unbound marker inside Datalog facts and MRA tuples
    Null,      // the NULL IRI carrying answer variables through RDF
    Reserved,  // position IRIs, copy IRIs, relation/attribute IRIs
};

struct Value {
    ValueKind kind = ValueKind::Iri;
    std::string text;

    static Value iri(std::string s) { return {ValueKind::Iri, std::move(s)}; }
    static Value literal(std::string s) { return {ValueKind::Literal, std::move(s)}; }
    static Value bottom() { return {ValueKind::Bottom, {}}; }
    static Value null() { return {ValueKind::Null, {}}; }
    static Value reserved(std::string s) { return {ValueKind::Reserved, std::move(s)}; }

    bool is_user() const { return kind == ValueKind::Iri || kind == ValueKind::Literal; }
    bool is_bottom() const { return kind == ValueKind::Bottom; }
    bool is_null() const { return kind == ValueKind::Null; }
    // Everything except literals may stand in subject/predicate position.
    bool is_iri_like() const { return kind != ValueKind::Literal; }

    auto operator<=>(const Value&) const = default;
    bool operator==(const Value&) const = default;
};

// Debug rendering; the canonical concrete syntax lives in syntax.hpp.
std::string debug_string(const Value& v);

}  // namespace msq
