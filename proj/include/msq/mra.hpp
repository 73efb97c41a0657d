#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "msq/multiset.hpp"
#include "msq/value.hpp"

namespace msq::mra {

using Attr = std::string;
using Schema = std::set<Attr>;
using Tuple = std::map<Attr, Value>;

struct Relation {
    Schema schema;
    Multiset<Tuple> tuples;

    // Throws SchemaViolation unless the tuple is total over the schema.
    void add(const Tuple& t, Count n = 1);
    bool operator==(const Relation&) const = default;
};

using Database = std::map<std::string, Relation>;
using SchemaMap = std::map<std::string, Schema>;

SchemaMap schemas(const Database& db);

// One side of an equality atom.
struct Operand {
    bool is_attr = false;
    Attr attr;
    Value value;

    static Operand attribute(Attr a) { return {true, std::move(a), {}}; }
    static Operand constant(Value c) { return {false, {}, std::move(c)}; }
    auto operator<=>(const Operand&) const = default;
    bool operator==(const Operand&) const = default;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    enum class Kind { Eq, And, Or, Not };
    Kind kind;
    Operand l, r;     // Eq
    FormulaPtr a, b;  // connectives

    bool atomic() const { return kind == Kind::Eq; }
};

FormulaPtr f_eq(Operand l, Operand r);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_not(FormulaPtr a);

bool equal(const FormulaPtr& a, const FormulaPtr& b);
Schema formula_attrs(const FormulaPtr& f);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Rel, Select, Project, Rename, Join, Union, Except };
    Kind kind;
    std::string name;        // Rel
    FormulaPtr cond;         // Select
    Schema attrs;            // Project
    Attr from, to;           // Rename from/to
    ExprPtr left, right;     // left is the operand of unary operators
};

ExprPtr e_rel(std::string name);
ExprPtr e_select(FormulaPtr f, ExprPtr e);
ExprPtr e_project(Schema s, ExprPtr e);
ExprPtr e_rename(Attr from, Attr to, ExprPtr e);
ExprPtr e_join(ExprPtr a, ExprPtr b);
ExprPtr e_union(ExprPtr a, ExprPtr b);
ExprPtr e_except(ExprPtr a, ExprPtr b);

bool equal(const ExprPtr& a, const ExprPtr& b);
std::size_t node_count(const ExprPtr& e);
std::set<std::string> relation_names(const ExprPtr& e);
// Every attribute mentioned anywhere: schemas of leaves, projections,
// rename sources and targets, selection formulas.
Schema all_attrs(const ExprPtr& e, const SchemaMap& db);

// Static attribute set. Throws UnknownRelation or SchemaViolation.
Schema schema_of(const ExprPtr& e, const SchemaMap& db);

// Two-valued. Throws SchemaViolation on an attribute the tuple lacks.
bool eval_selection(const FormulaPtr& f, const Tuple& t);
Relation eval_expr(const ExprPtr& e, const Database& db);

bool selections_atomic(const ExprPtr& e);
ExprPtr reduce_selections(const ExprPtr& e);

// Renames several attributes at once, in the given order where possible and
// through temporaries when a target is still taken. `schema` is the schema of e.
ExprPtr rename_all(ExprPtr e, const std::vector<std::pair<Attr, Attr>>& renaming, const Schema& schema);

}  // namespace msq::mra
