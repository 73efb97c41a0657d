#include <limits>

#include "msq/error.hpp"
#include "msq/multiset.hpp"
#include "msq/value.hpp"

namespace msq {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MalformedColoring: return "malformed-coloring";
        case ErrorKind::CountOverflow: return "count-overflow";
        case ErrorKind::UnsafeRule: return "unsafe-rule";
        case ErrorKind::RecursiveProgram: return "recursive-program";
        case ErrorKind::ConstantInHead: return "constant-in-head";
        case ErrorKind::VariableFreeLiteral: return "variable-free-literal";
        case ErrorKind::PredicateSortClash: return "predicate-sort-clash";
        case ErrorKind::InstanceTooLarge: return "instance-too-large";
        case ErrorKind::SchemaViolation: return "schema-violation";
        case ErrorKind::UnknownRelation: return "unknown-relation";
        case ErrorKind::InvalidRename: return "invalid-rename";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::MalformedAnswer: return "malformed-answer";
        case ErrorKind::ReservedName: return "reserved-name";
        case ErrorKind::Parse: return "parse-error";
    }
    return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {}

ParseError::ParseError(const std::string& message, SourceSpan span, std::vector<std::string> expected)
    : Error(ErrorKind::Parse, std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + message),
      span_(span),
      expected_(std::move(expected)) {}

Count checked_add(Count a, Count b) {
    if (a > std::numeric_limits<Count>::max() - b) throw Error(ErrorKind::CountOverflow, "cardinality sum overflows 64 bits");
    return a + b;
}

Count checked_mul(Count a, Count b) {
    if (a != 0 && b > std::numeric_limits<Count>::max() / a)
        throw Error(ErrorKind::CountOverflow, "cardinality product overflows 64 bits");
    return a * b;
}

std::string debug_string(const Value& v) {
    switch (v.kind) {
        case ValueKind::Iri: return v.text;
        case ValueKind::Literal: return "\"" + v.text + "\"";
        case ValueKind::Bottom: return "_|_";
        case ValueKind::Null: return "NULL";
        case ValueKind::Reserved: return "@" + v.text;
    }
    return v.text;
}

}  // namespace msq
