// Command-line front end: eval, translate, normalize, fuzz.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "msq/harness.hpp"
#include "msq/syntax.hpp"
#include "msq/translate.hpp"

using namespace msq;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kCounterexample = 3 };

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CLI::ValidationError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int lang_number(const std::string& lang) {
    if (lang == "sparql" || lang == "1") return 1;
    if (lang == "datalog" || lang == "2") return 2;
    if (lang == "mra" || lang == "3") return 3;
    return 0;
}

const std::vector<std::string> kLangs = {"sparql", "datalog", "mra", "1", "2", "3"};

struct Inputs {
    int lang = 0;
    sparql::PatternPtr pattern;
    sparql::Graph graph;
    datalog::Query query;
    datalog::Facts facts;
    mra::ExprPtr expr;
    mra::Database db;
    bool has_data = false;
};

Inputs load(int lang, const std::string& query_path, const std::string& data_path, const syntax::ParseOptions& opts) {
    Inputs in;
    in.lang = lang;
    in.has_data = !data_path.empty();
    auto query = slurp(query_path);
    std::string data = in.has_data ? slurp(data_path) : "";
    switch (lang) {
        case 1:
            in.pattern = syntax::parse_sparql(query, opts);
            in.graph = syntax::parse_rdf(data, opts);
            break;
        case 2:
            in.query = syntax::parse_datalog_query(query, opts);
            in.facts = syntax::parse_facts(data, opts);
            break;
        default:
            in.expr = syntax::parse_mra(query, opts);
            in.db = syntax::parse_relations(data, opts);
            break;
    }
    return in;
}

int eval(const Inputs& in) {
    switch (in.lang) {
        case 1: std::cout << syntax::serialize_answer(sparql::eval_pattern(in.pattern, in.graph)); break;
        case 2: std::cout << syntax::serialize_answer(datalog::eval_query(in.query, in.facts)); break;
        default: std::cout << syntax::serialize_answer(mra::eval_expr(in.expr, in.db)); break;
    }
    return kOk;
}

void notice_if(bool changed, const char* what) {
    if (changed) std::cerr << "note: input " << what << " was normalized before translation\n";
}

int translate_cmd(const Inputs& in, int to) {
    std::string q, d;
    if (in.lang == 1) {
        sparql::in_scope(in.pattern);
        auto p = translate::prepare(in.pattern);
        notice_if(!sparql::equal(p, in.pattern), "pattern");
        if (to == 2) {
            q = syntax::print_datalog(translate::f12(p));
            if (in.has_data) d = syntax::print_facts(translate::g12(in.graph));
        } else {
            q = syntax::print_mra(translate::f13(p)) + "\n";
            if (in.has_data) d = syntax::print_relations(translate::g13(in.graph));
        }
    } else if (in.lang == 2) {
        datalog::validate(in.query);
        auto p = translate::prepare(in.query);
        notice_if(!datalog::is_normalized(in.query.program), "program");
        if (to == 1) {
            q = syntax::print_sparql(translate::f21(p)) + "\n";
            if (in.has_data) d = syntax::print_rdf(translate::g21(in.facts));
        } else {
            q = syntax::print_mra(translate::f23(p)) + "\n";
            if (in.has_data) {
                std::map<std::string, std::size_t> vocab;
                auto ar = datalog::arities(p);
                for (const auto& name : datalog::extensional(p)) vocab.emplace(name, ar.at(name));
                d = syntax::print_relations(translate::g23(in.facts, vocab));
            }
        }
    } else {
        if (!in.has_data) throw CLI::ValidationError("translating MRA needs a relations file for the schemas");
        auto schemas = mra::schemas(in.db);
        mra::schema_of(in.expr, schemas);
        auto e = translate::prepare(in.expr);
        notice_if(!mra::equal(e, in.expr), "expression");
        if (to == 1) {
            q = syntax::print_sparql(translate::f31(e, schemas)) + "\n";
            d = syntax::print_rdf(translate::g31(in.db));
        } else {
            q = syntax::print_datalog(translate::f32(e, schemas));
            d = syntax::print_facts(translate::g32(in.db));
        }
    }
    std::cout << q;
    if (!d.empty() || in.has_data) std::cout << "\n# database\n" << d;
    return kOk;
}

int normalize_cmd(const Inputs& in) {
    switch (in.lang) {
        case 1:
            sparql::in_scope(in.pattern);
            std::cout << syntax::print_sparql(translate::prepare(in.pattern)) << "\n";
            break;
        case 2:
            datalog::validate(in.query);
            std::cout << syntax::print_datalog(translate::prepare(in.query));
            break;
        default: std::cout << syntax::print_mra(translate::prepare(in.expr)) << "\n"; break;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiset query languages: evaluate, translate, normalize and fuzz"};
    app.require_subcommand(1);

    std::string lang, from, to, query_path, data_path;
    bool allow_reserved = false;

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a query over a database and print the answer");
    eval_cmd->add_option("--lang", lang, "sparql, datalog or mra")->required()->check(CLI::IsMember(kLangs));
    eval_cmd->add_option("query", query_path)->required();
    eval_cmd->add_option("data", data_path)->required();
    eval_cmd->add_flag("--allow-reserved", allow_reserved, "accept translator-only tokens");

    auto* tr = app.add_subcommand("translate", "translate a query, and a database if given");
    tr->add_option("--from", from)->required()->check(CLI::IsMember(kLangs));
    tr->add_option("--to", to)->required()->check(CLI::IsMember(kLangs));
    tr->add_option("query", query_path)->required();
    tr->add_option("data", data_path);

    auto* norm = app.add_subcommand("normalize", "print the normal form of a query");
    norm->add_option("--lang", lang)->required()->check(CLI::IsMember(kLangs));
    norm->add_option("query", query_path)->required();
    norm->add_option("data", data_path, "relations file, only used for MRA schema checks");

    harness::Config cfg;
    std::vector<std::string> directions;
    bool triangles = false, no_shrink = false;
    auto* fz = app.add_subcommand("fuzz", "differential testing of all translations");
    fz->add_option("--seed", cfg.seed);
    fz->add_option("--iterations", cfg.iterations);
    fz->add_option("--triangle-iterations", cfg.triangle_iterations);
    fz->add_flag("--triangles", triangles, "run the triangles with --iterations if no count is given");
    fz->add_option("--max-terms", cfg.bounds.max_terms);
    fz->add_option("--max-rows", cfg.bounds.max_rows, "triples, facts or tuples");
    fz->add_option("--max-depth", cfg.bounds.max_depth);
    fz->add_option("--direction", directions, "e.g. 1->2 or sparql-datalog; repeatable");
    fz->add_flag("--mutate-union", cfg.mutations.union_as_product);
    fz->add_flag("--mutate-except", cfg.mutations.except_as_difference);
    fz->add_flag("--mutate-comp", cfg.mutations.omit_bottom_comp);
    fz->add_flag("--no-shrink", no_shrink);
    fz->add_flag("--stop-at-first", cfg.stop_at_first);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        syntax::ParseOptions opts{allow_reserved};
        if (eval_cmd->parsed()) return eval(load(lang_number(lang), query_path, data_path, opts));
        if (norm->parsed()) return normalize_cmd(load(lang_number(lang), query_path, data_path, opts));
        if (tr->parsed()) {
            int a = lang_number(from), b = lang_number(to);
            if (a == b) {
                std::cerr << "error: --from and --to name the same language\n";
                return kUsage;
            }
            return translate_cmd(load(a, query_path, data_path, opts), b);
        }
        if (fz->parsed()) {
            if (!directions.empty()) {
                cfg.directions.clear();
                for (const auto& s : directions) {
                    auto d = harness::parse_direction(s);
                    if (!d) {
                        std::cerr << "error: unknown direction " << s << "\n";
                        return kUsage;
                    }
                    cfg.directions.push_back(*d);
                }
            }
            if (triangles && cfg.triangle_iterations == 0) cfg.triangle_iterations = cfg.iterations;
            cfg.shrink = !no_shrink;
            auto report = harness::fuzz_equivalence(cfg);
            std::cout << report.text();
            return report.counterexamples.empty() ? kOk : kCounterexample;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    }
    return kUsage;
}
