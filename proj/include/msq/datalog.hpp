#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "msq/multiset.hpp"
#include "msq/value.hpp"

namespace msq::datalog {

struct Term {
    bool is_var = false;
    std::string var;
    Value value;

    static Term variable(std::string v) { return {true, std::move(v), {}}; }
    static Term constant(Value c) { return {false, {}, std::move(c)}; }
    auto operator<=>(const Term&) const = default;
    bool operator==(const Term&) const = default;
};

struct Atom {
    std::string pred;
    std::vector<Term> args;
    auto operator<=>(const Atom&) const = default;
    bool operator==(const Atom&) const = default;
};

struct Literal {
    Atom atom;
    bool negated = false;
    auto operator<=>(const Literal&) const = default;
    bool operator==(const Literal&) const = default;
};

struct Rule {
    Atom head;
    std::vector<Literal> body;
    auto operator<=>(const Rule&) const = default;
    bool operator==(const Rule&) const = default;
};

struct Program {
    std::vector<Rule> rules;
    bool operator==(const Program&) const = default;
};

struct Query {
    Atom goal;
    Program program;
    bool operator==(const Query&) const = default;
};

struct Fact {
    std::string pred;
    std::vector<Value> args;
    auto operator<=>(const Fact&) const = default;
    bool operator==(const Fact&) const = default;
};

using Facts = Multiset<Fact>;
using Subst = std::map<std::string, Value>;

struct Answer {
    std::set<std::string> vars;
    Multiset<Subst> solutions;
    bool operator==(const Answer&) const = default;
};

std::set<std::string> vars_of(const Atom& a);
// Distinct variables in first-occurrence order.
std::vector<std::string> ordered_vars(const Atom& a);
std::set<std::string> rule_vars(const Rule& r);
std::set<std::string> intensional(const Program& p);
// Predicates that occur in bodies or the goal but head no rule.
std::set<std::string> extensional(const Query& q);
std::map<std::string, std::size_t> arities(const Query& q);

void validate(const Query& q);
// Also checks the facts against the program's vocabulary.
void validate(const Query& q, const Facts& d);

// Proof counts of every derivable ground atom (facts included).
Facts all_atoms(const Program& p, const Facts& d);
Answer eval_query(const Query& q, const Facts& d);

// Materializes derivation trees one by one and counts them per root atom.
// Throws InstanceTooLarge once more than max_trees trees exist.
Facts derivation_trees(const Program& p, const Facts& d, std::size_t max_trees = 200000);

enum class RuleForm { Projection, Join, Negation, Other };
RuleForm rule_form(const Rule& r);
bool is_normalized(const Program& p);
Query normalize_program(const Query& q);

}  // namespace msq::datalog
