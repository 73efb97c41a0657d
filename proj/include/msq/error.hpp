#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace msq {

enum class ErrorKind {
    MalformedColoring,
    CountOverflow,
    UnsafeRule,
    RecursiveProgram,
    ConstantInHead,
    VariableFreeLiteral,
    PredicateSortClash,
    InstanceTooLarge,
    SchemaViolation,
    UnknownRelation,
    InvalidRename,
    Precondition,
    MalformedAnswer,
    ReservedName,
    Parse,
};

// Stable kebab-case name, used in messages and by the CLI.
const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct SourceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t line = 1;
    std::size_t column = 1;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, SourceSpan span, std::vector<std::string> expected = {});
    const SourceSpan& span() const noexcept { return span_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    SourceSpan span_;
    std::vector<std::string> expected_;
};

}  // namespace msq
