#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "msq/multiset.hpp"
#include "msq/value.hpp"

namespace msq::sparql {

using Var = std::string;  // stored without the leading '?'
using VarSet = std::set<Var>;

struct Triple {
    Value s, p, o;
    auto operator<=>(const Triple&) const = default;
    bool operator==(const Triple&) const = default;
};

using Graph = std::set<Triple>;

// Subject must be IRI-like; throws Precondition otherwise.
void add_triple(Graph& g, const Triple& t);
std::set<Value> terms(const Graph& g);

using Mapping = std::map<Var, Value>;
using Omega = Multiset<Mapping>;

enum class Truth { True, False, Error };

Truth truth_and(Truth a, Truth b);
Truth truth_or(Truth a, Truth b);
Truth truth_not(Truth a);
const char* truth_name(Truth t);

struct Filter;
using FilterPtr = std::shared_ptr<const Filter>;

struct Filter {
    enum class Kind { EqConst, EqVar, Bound, And, Or, Not, False };
    Kind kind;
    Var x, y;
    Value c;
    FilterPtr a, b;

    bool atomic() const { return kind == Kind::EqConst || kind == Kind::EqVar || kind == Kind::Bound || kind == Kind::False; }
};

FilterPtr f_eq(Var x, Value c);
FilterPtr f_eq(Var x, Var y);
FilterPtr f_bound(Var x);
FilterPtr f_and(FilterPtr a, FilterPtr b);
FilterPtr f_or(FilterPtr a, FilterPtr b);
FilterPtr f_not(FilterPtr a);
FilterPtr f_false();

bool equal(const FilterPtr& a, const FilterPtr& b);
VarSet filter_vars(const FilterPtr& f);
int connectives(const FilterPtr& f);

// A triple-pattern position: a variable or a constant.
struct Slot {
    bool is_var = false;
    Var var;
    Value value;

    static Slot variable(Var v) { return {true, std::move(v), {}}; }
    static Slot constant(Value c) { return {false, {}, std::move(c)}; }
    auto operator<=>(const Slot&) const = default;
    bool operator==(const Slot&) const = default;
};

struct Pattern;
using PatternPtr = std::shared_ptr<const Pattern>;

struct Pattern {
    enum class Kind { Triple, And, Union, Except, Filter, Select };
    Kind kind;
    Slot s, p, o;            // Triple
    PatternPtr left, right;  // binary operators; left is the operand of Filter/Select
    FilterPtr cond;          // Filter
    VarSet vars;             // Select
};

// Throws Precondition when the triple has no variable or a literal in
// subject/predicate position.
PatternPtr p_triple(Slot s, Slot p, Slot o);
PatternPtr p_and(PatternPtr a, PatternPtr b);
PatternPtr p_union(PatternPtr a, PatternPtr b);
PatternPtr p_except(PatternPtr a, PatternPtr b);
PatternPtr p_filter(PatternPtr a, FilterPtr f);
PatternPtr p_select(VarSet w, PatternPtr a);

bool equal(const PatternPtr& a, const PatternPtr& b);
std::size_t node_count(const PatternPtr& p);
VarSet in_scope(const PatternPtr& p);
// Every variable occurring anywhere, including hidden ones and filter-only ones.
VarSet all_vars(const PatternPtr& p);

// Test hooks for mutation testing of the differential harness.
struct EvalOptions {
    bool union_as_product = false;
    bool except_as_difference = false;
};

Truth eval_filter(const FilterPtr& f, const Mapping& mu);
Omega eval_pattern(const PatternPtr& p, const Graph& g, const EvalOptions& opts = {});

bool is_normalized(const PatternPtr& p);
bool filters_atomic(const PatternPtr& p);
PatternPtr normalize(const PatternPtr& p);

FilterPtr error_condition(const FilterPtr& f);
// Expects a normalized pattern; output contains only atomic conditions.
PatternPtr reduce_filters(const PatternPtr& p);

// Renames ?x to ?y. Requires x in scope and y not in scope.
PatternPtr rename_variable(const PatternPtr& p, const Var& x, const Var& y);

// Picks the first of base, base1, base2, ... not in `used`, and adds it.
Var fresh_name(const std::string& base, std::set<std::string>& used);

}  // namespace msq::sparql
