#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "msq/datalog.hpp"
#include "msq/mra.hpp"
#include "msq/sparql.hpp"

// Differential testing of the six simulations: generate a query and a
// database in the source language, evaluate directly, evaluate the
// translation, map the answer back and compare canonical serializations.
namespace msq::harness {

enum class Direction { S2D, D2S, M2D, D2M, M2S, S2M };

const std::vector<Direction>& all_directions();
std::string direction_name(Direction d);  // "1->2" style, 1 = SPARQL, 2 = Datalog, 3 = MRA
// Accepts "1->2", "1to2", "12" and "sparql-datalog" style names.
std::optional<Direction> parse_direction(const std::string& s);

struct Bounds {
    std::size_t max_terms = 3;  // size of the constant universe
    std::size_t max_rows = 6;   // triples, distinct facts or distinct tuples
    std::size_t max_depth = 4;  // query AST depth
};

// Deliberate defects, used to check that the harness notices them.
struct Mutations {
    bool union_as_product = false;
    bool except_as_difference = false;
    bool omit_bottom_comp = false;
};

struct Config {
    std::uint64_t seed = 42;
    std::size_t iterations = 100;           // per direction
    std::size_t triangle_iterations = 0;    // per triangle; 0 disables
    std::vector<Direction> directions = all_directions();
    Bounds bounds;
    Mutations mutations;
    bool shrink = true;
    bool stop_at_first = false;  // stop a direction at its first counterexample
};

struct Counterexample {
    std::string check;  // direction or triangle name
    std::size_t iteration = 0;
    std::string query;
    std::string database;
    std::string expected;
    std::string actual;
    std::string difference;  // first differing element and its counts
};

struct CheckStats {
    std::string check;
    std::size_t passed = 0;
    std::size_t nonempty = 0;  // passes whose expected answer was not empty
    std::size_t skipped = 0;  // generated input rejected by the source validator
    std::size_t failed = 0;
};

struct Report {
    Config config;
    std::vector<CheckStats> stats;
    std::vector<Counterexample> counterexamples;

    std::string text() const;
};

Report fuzz_equivalence(const Config& cfg);

// Generators, exposed for tests. All draws come from the given engine.
using Rng = std::mt19937_64;

std::vector<Value> universe(std::size_t n);
sparql::PatternPtr random_pattern(Rng& rng, const Bounds& b);
sparql::Graph random_graph(Rng& rng, const Bounds& b);
sparql::FilterPtr random_filter(Rng& rng, const std::vector<std::string>& vars, const std::vector<Value>& constants,
                                int connectives);
datalog::Query random_datalog(Rng& rng, const Bounds& b);
datalog::Facts random_facts(Rng& rng, const Bounds& b);
mra::SchemaMap fuzz_schemas();
mra::ExprPtr random_expr(Rng& rng, const Bounds& b);
mra::FormulaPtr random_formula(Rng& rng, const mra::Schema& attrs, const std::vector<Value>& constants, int connectives);
mra::Database random_database(Rng& rng, const Bounds& b);

}  // namespace msq::harness
