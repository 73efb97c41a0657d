#include "msq/syntax.hpp"

#include <cctype>
#include <sstream>

namespace msq::syntax {

namespace {

// ---------------------------------------------------------------- lexer

enum class Tok { Ident, Var, Iri, Lit, Reserved, Bottom, Null, Punct, End };

struct Token {
    Tok kind;
    std::string text;
    SourceSpan span;
};

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool variable_style(const std::string& name) {
    return !name.empty() && (std::isupper(static_cast<unsigned char>(name[0])) || name[0] == '_');
}

bool plain_identifier(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!ident_char(c)) return false;
    return true;
}

struct Alias {
    const char* utf8;
    Tok kind;
    const char* text;
};

// Unicode spellings and the ASCII tokens they stand for.
const Alias kAliases[] = {
    {"⋈", Tok::Ident, "join"},    {"∪", Tok::Punct, "+"},       {"⊎", Tok::Punct, "+"},
    {"∖", Tok::Punct, "\\"},      {"∧", Tok::Punct, "&&"},      {"∨", Tok::Punct, "||"},
    {"¬", Tok::Punct, "!"},       {"←", Tok::Punct, ":-"},      {"⊥", Tok::Bottom, "_|_"},
    {"π", Tok::Ident, "project"}, {"σ", Tok::Ident, "select"}, {"ρ", Tok::Ident, "rename"},
};

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < s.size(); ++k, ++i) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto span_from = [&](std::size_t b, std::size_t l, std::size_t c) { return SourceSpan{b, i, l, c}; };

    while (true) {
        while (i < s.size()) {
            if (std::isspace(static_cast<unsigned char>(s[i]))) {
                advance(1);
            } else if (s[i] == '#' || s[i] == '%') {
                while (i < s.size() && s[i] != '\n') advance(1);
            } else {
                break;
            }
        }
        std::size_t b = i, l = line, c = col;
        if (i >= s.size()) {
            out.push_back({Tok::End, "", span_from(b, l, c)});
            return out;
        }
        bool aliased = false;
        for (const auto& a : kAliases) {
            std::size_t n = std::char_traits<char>::length(a.utf8);
            if (s.compare(i, n, a.utf8) == 0) {
                advance(n);
                out.push_back({a.kind, a.text, span_from(b, l, c)});
                aliased = true;
                break;
            }
        }
        if (aliased) continue;

        char ch = s[i];
        if (s.compare(i, 3, "_|_") == 0) {
            advance(3);
            out.push_back({Tok::Bottom, "_|_", span_from(b, l, c)});
        } else if (ident_char(ch)) {
            std::size_t j = i;
            while (j < s.size() && ident_char(s[j])) ++j;
            std::string word = s.substr(i, j - i);
            advance(j - i);
            out.push_back({word == "NULL" ? Tok::Null : Tok::Ident, word, span_from(b, l, c)});
        } else if (ch == '?' && i + 1 < s.size() && ident_char(s[i + 1])) {
            std::size_t j = i + 1;
            while (j < s.size() && ident_char(s[j])) ++j;
            std::string name = s.substr(i + 1, j - i - 1);
            advance(j - i);
            out.push_back({Tok::Var, name, span_from(b, l, c)});
        } else if (ch == '<') {
            std::size_t j = s.find_first_of(">\n \t", i + 1);
            if (j == std::string::npos || s[j] != '>')
                throw ParseError("unterminated IRI", span_from(b, l, c), {">"});
            std::string iri = s.substr(i + 1, j - i - 1);
            advance(j - i + 1);
            out.push_back({Tok::Iri, iri, span_from(b, l, c)});
        } else if (ch == '"') {
            std::string lit;
            advance(1);
            while (true) {
                if (i >= s.size() || s[i] == '\n') throw ParseError("unterminated literal", span_from(b, l, c), {"\""});
                if (s[i] == '"') break;
                if (s[i] == '\\' && i + 1 < s.size()) {
                    char e = s[i + 1];
                    lit += e == 'n' ? '\n' : e == 't' ? '\t' : e;
                    advance(2);
                } else {
                    lit += s[i];
                    advance(1);
                }
            }
            advance(1);
            out.push_back({Tok::Lit, lit, span_from(b, l, c)});
        } else if (ch == '@') {
            std::size_t j = i + 1;
            while (j < s.size() && (ident_char(s[j]) || s[j] == ':')) ++j;
            if (j == i + 1) throw ParseError("empty reserved name", span_from(b, l, c));
            std::string name = s.substr(i + 1, j - i - 1);
            advance(j - i);
            out.push_back({Tok::Reserved, name, span_from(b, l, c)});
        } else {
            static const char* const two[] = {":-", "?-", "&&", "||"};
            bool matched = false;
            for (const char* p : two) {
                if (s.compare(i, 2, p) == 0) {
                    advance(2);
                    out.push_back({Tok::Punct, p, span_from(b, l, c)});
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
            if (std::string("(),.{}/=*+\\!").find(ch) == std::string::npos)
                throw ParseError(std::string("unexpected character '") + ch + "'", span_from(b, l, c));
            advance(1);
            out.push_back({Tok::Punct, std::string(1, ch), span_from(b, l, c)});
        }
    }
}

// ---------------------------------------------------------------- parser base

class Parser {
public:
    Parser(const std::string& text, const ParseOptions& opts) : toks_(lex(text)), opts_(opts) {}

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& next() {
        const Token& t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    bool at_end() const { return peek().kind == Tok::End; }
    bool at_punct(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }
    bool at_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }

    void expect_punct(const char* p) {
        if (!at_punct(p)) fail(std::string("expected '") + p + "'", {p});
        next();
    }
    void expect_word(const char* w) {
        if (!at_word(w)) fail(std::string("expected '") + w + "'", {w});
        next();
    }
    void expect_end() {
        if (!at_end()) fail("unexpected trailing input", {"end of input"});
    }

    [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected = {}) const {
        fail_at(peek(), msg, std::move(expected));
    }
    [[noreturn]] static void fail_at(const Token& t, const std::string& msg, std::vector<std::string> expected = {}) {
        std::string where = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(msg + " at " + where, t.span, std::move(expected));
    }

    bool at_constant() const {
        switch (peek().kind) {
            case Tok::Ident:
            case Tok::Iri:
            case Tok::Lit:
            case Tok::Reserved:
            case Tok::Bottom:
            case Tok::Null: return true;
            default: return false;
        }
    }

    Value constant() {
        const Token& t = next();
        auto reserved = [&](Value v) {
            if (!opts_.allow_reserved) fail_at(t, "reserved token in user input");
            return v;
        };
        switch (t.kind) {
            case Tok::Ident:
            case Tok::Iri: return Value::iri(t.text);
            case Tok::Lit: return Value::literal(t.text);
            case Tok::Reserved: return reserved(Value::reserved(t.text));
            case Tok::Bottom: return reserved(Value::bottom());
            case Tok::Null: return reserved(Value::null());
            default: fail_at(t, "expected a constant", {"constant"});
        }
    }

    Count count() {
        const Token& t = next();
        if (t.kind != Tok::Ident || t.text.find_first_not_of("0123456789") != std::string::npos)
            fail_at(t, "expected a positive count", {"count"});
        try {
            Count n = std::stoull(t.text);
            if (n == 0) fail_at(t, "counts must be positive");
            return n;
        } catch (const std::out_of_range&) {
            fail_at(t, "count does not fit in 64 bits");
        }
    }

    const ParseOptions& opts() const { return opts_; }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    ParseOptions opts_;
};

// Runs f, turning structural errors from AST builders into parse errors at `at`.
template <class F>
auto located(const Token& at, F&& f) {
    try {
        return f();
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(e.what(), at.span);
    }
}

const std::set<std::string> kKeywords = {"bound", "false", "true", "not", "join", "union", "except",
                                         "project", "select", "rename", "relation", "and", "or"};

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

std::string print_name(const std::string& name, bool bare) { return bare ? name : "?" + name; }

// ---------------------------------------------------------------- SPARQL

class SparqlParser : public Parser {
public:
    using Parser::Parser;

    sparql::PatternPtr pattern() {
        const Token& open = peek();
        expect_punct("(");
        if (at_word("SELECT")) {
            next();
            sparql::VarSet vars;
            while (peek().kind == Tok::Var) vars.insert(next().text);
            if (at_word("WHERE")) next();
            auto p = pattern();
            expect_punct(")");
            return sparql::p_select(vars, p);
        }
        if (at_punct("(")) {
            auto p = pattern();
            while (true) {
                if (at_word("AND") || at_word("UNION") || at_word("EXCEPT")) {
                    std::string op = next().text;
                    auto r = pattern();
                    p = op == "AND" ? sparql::p_and(p, r) : op == "UNION" ? sparql::p_union(p, r) : sparql::p_except(p, r);
                } else if (at_word("FILTER")) {
                    next();
                    expect_punct("(");
                    auto f = condition();
                    expect_punct(")");
                    p = sparql::p_filter(p, f);
                } else {
                    break;
                }
            }
            expect_punct(")");
            return p;
        }
        auto s = slot();
        expect_punct(",");
        auto pr = slot();
        expect_punct(",");
        auto o = slot();
        expect_punct(")");
        return located(open, [&] { return sparql::p_triple(s, pr, o); });
    }

    sparql::FilterPtr condition() {
        auto f = conjunction();
        while (at_punct("||")) {
            next();
            f = sparql::f_or(f, conjunction());
        }
        return f;
    }

private:
    sparql::Slot slot() {
        if (peek().kind == Tok::Var) return sparql::Slot::variable(next().text);
        if (!at_constant()) fail("expected a variable or constant", {"?var", "constant"});
        return sparql::Slot::constant(constant());
    }

    sparql::FilterPtr conjunction() {
        auto f = unary();
        while (at_punct("&&")) {
            next();
            f = sparql::f_and(f, unary());
        }
        return f;
    }

    sparql::FilterPtr unary() {
        if (at_punct("!")) {
            next();
            return sparql::f_not(unary());
        }
        if (at_punct("(")) {
            next();
            auto f = condition();
            expect_punct(")");
            return f;
        }
        if (at_word("bound")) {
            next();
            expect_punct("(");
            if (peek().kind != Tok::Var) fail("expected a variable", {"?var"});
            auto x = next().text;
            expect_punct(")");
            return sparql::f_bound(x);
        }
        if (at_word("false")) {
            if (!opts().allow_reserved) fail("the constant false is reserved");
            next();
            return sparql::f_false();
        }
        const Token& first = peek();
        auto l = slot();
        expect_punct("=");
        auto r = slot();
        if (l.is_var && r.is_var) return sparql::f_eq(l.var, r.var);
        if (l.is_var) return sparql::f_eq(l.var, r.value);
        if (r.is_var) return sparql::f_eq(r.var, l.value);
        fail_at(first, "an equality between two constants is not a filter condition");
    }
};

std::string print_slot(const sparql::Slot& s) { return s.is_var ? "?" + s.var : print_value(s.value); }

// ---------------------------------------------------------------- Datalog

bool datalog_var_token(const Token& t) { return t.kind == Tok::Var || (t.kind == Tok::Ident && variable_style(t.text)); }

class DatalogParser : public Parser {
public:
    using Parser::Parser;

    DatalogFile file() {
        DatalogFile out;
        while (!at_end()) {
            if (at_punct("?-")) {
                const Token& t = next();
                if (out.goal) fail_at(t, "more than one goal");
                out.goal = atom();
                expect_punct(".");
                continue;
            }
            const Token& start = peek();
            auto head = atom();
            if (at_punct(":-")) {
                next();
                datalog::Rule r{head, {}};
                r.body.push_back(literal());
                while (at_punct(",")) {
                    next();
                    r.body.push_back(literal());
                }
                expect_punct(".");
                out.program.rules.push_back(std::move(r));
                continue;
            }
            Count n = 1;
            if (at_punct("*")) {
                next();
                n = count();
            }
            expect_punct(".");
            datalog::Fact f{head.pred, {}};
            for (const auto& t : head.args) {
                if (t.is_var) fail_at(start, "a fact cannot contain variables");
                f.args.push_back(t.value);
            }
            located(start, [&] {
                out.facts.add(f, n);
                return 0;
            });
        }
        return out;
    }

private:
    datalog::Atom atom() {
        if (peek().kind != Tok::Ident || kKeywords.count(peek().text)) fail("expected a predicate name", {"predicate"});
        datalog::Atom a{next().text, {}};
        if (!at_punct("(")) return a;
        next();
        if (!at_punct(")")) {
            a.args.push_back(term());
            while (at_punct(",")) {
                next();
                a.args.push_back(term());
            }
        }
        expect_punct(")");
        return a;
    }

    datalog::Term term() {
        if (datalog_var_token(peek())) return datalog::Term::variable(next().text);
        if (!at_constant()) fail("expected a term", {"variable", "constant"});
        return datalog::Term::constant(constant());
    }

    datalog::Literal literal() {
        bool negated = false;
        if (at_word("not") || at_punct("!")) {
            next();
            negated = true;
        }
        return {atom(), negated};
    }
};

std::string print_term(const datalog::Term& t) {
    if (!t.is_var) return print_value(t.value);
    return print_name(t.var, variable_style(t.var) && plain_identifier(t.var));
}

std::string print_atom(const datalog::Atom& a) {
    if (a.args.empty()) return a.pred;
    std::vector<std::string> parts;
    for (const auto& t : a.args) parts.push_back(print_term(t));
    return a.pred + "(" + join(parts, ", ") + ")";
}

// ---------------------------------------------------------------- MRA

class MraParser : public Parser {
public:
    using Parser::Parser;

    mra::ExprPtr expr() {
        auto e = term();
        while (true) {
            if (at_word("join")) {
                next();
                e = mra::e_join(e, term());
            } else if (at_punct("+") || at_word("union")) {
                next();
                e = mra::e_union(e, term());
            } else if (at_punct("\\") || at_word("except")) {
                next();
                e = mra::e_except(e, term());
            } else {
                return e;
            }
        }
    }

    mra::FormulaPtr formula() {
        auto f = conjunction();
        while (at_punct("||") || at_word("or")) {
            next();
            f = mra::f_or(f, conjunction());
        }
        return f;
    }

    mra::Database relations() {
        mra::Database db;
        while (!at_end()) {
            expect_word("relation");
            const Token& name_tok = peek();
            if (name_tok.kind != Tok::Ident || kKeywords.count(name_tok.text)) fail("expected a relation name");
            std::string name = next().text;
            if (db.count(name)) fail_at(name_tok, "relation " + name + " defined twice");
            expect_punct("{");
            std::vector<std::string> header;
            mra::Schema schema;
            if (!at_punct("}")) {
                do {
                    if (!header.empty()) next();
                    const Token& at = peek();
                    header.push_back(attribute());
                    if (!schema.insert(header.back()).second) fail_at(at, "attribute listed twice");
                } while (at_punct(","));
            }
            expect_punct("}");
            mra::Relation r{schema, {}};
            while (at_punct("(")) {
                const Token& open = next();
                std::vector<Value> row;
                if (!at_punct(")")) {
                    row.push_back(constant());
                    while (at_punct(",")) {
                        next();
                        row.push_back(constant());
                    }
                }
                expect_punct(")");
                if (row.size() != header.size())
                    fail_at(open, "row has " + std::to_string(row.size()) + " values, relation " + name + " has " +
                                      std::to_string(header.size()) + " attributes");
                Count n = 1;
                if (at_punct("*")) {
                    next();
                    n = count();
                }
                mra::Tuple t;
                for (std::size_t i = 0; i < row.size(); ++i) t.emplace(header[i], row[i]);
                located(open, [&] {
                    r.add(t, n);
                    return 0;
                });
            }
            db.emplace(name, std::move(r));
        }
        return db;
    }

private:
    std::string attribute() {
        if (peek().kind == Tok::Var || (peek().kind == Tok::Ident && !kKeywords.count(peek().text))) return next().text;
        fail("expected an attribute", {"attribute"});
    }

    mra::ExprPtr term() {
        if (at_word("project")) {
            next();
            expect_punct("{");
            mra::Schema s;
            if (!at_punct("}")) {
                s.insert(attribute());
                while (at_punct(",")) {
                    next();
                    s.insert(attribute());
                }
            }
            expect_punct("}");
            return mra::e_project(s, operand());
        }
        if (at_word("select")) {
            next();
            expect_punct("{");
            auto f = formula();
            expect_punct("}");
            return mra::e_select(f, operand());
        }
        if (at_word("rename")) {
            next();
            expect_punct("{");
            auto from = attribute();
            expect_punct("/");
            auto to = attribute();
            expect_punct("}");
            return mra::e_rename(from, to, operand());
        }
        if (at_punct("(")) return operand();
        if (peek().kind == Tok::Ident && !kKeywords.count(peek().text)) return mra::e_rel(next().text);
        fail("expected an expression", {"relation", "project", "select", "rename", "("});
    }

    mra::ExprPtr operand() {
        expect_punct("(");
        auto e = expr();
        expect_punct(")");
        return e;
    }

    mra::FormulaPtr conjunction() {
        auto f = unary();
        while (at_punct("&&") || at_word("and")) {
            next();
            f = mra::f_and(f, unary());
        }
        return f;
    }

    mra::FormulaPtr unary() {
        if (at_punct("!") || at_word("not")) {
            next();
            return mra::f_not(unary());
        }
        if (at_punct("(")) {
            next();
            auto f = formula();
            expect_punct(")");
            return f;
        }
        auto l = side();
        expect_punct("=");
        return mra::f_eq(l, side());
    }

    mra::Operand side() {
        if (datalog_var_token(peek())) return mra::Operand::attribute(next().text);
        if (!at_constant()) fail("expected an attribute or constant", {"attribute", "constant"});
        return mra::Operand::constant(constant());
    }
};

std::string print_side(const mra::Operand& o) {
    if (!o.is_attr) return print_value(o.value);
    return print_name(o.attr, variable_style(o.attr) && plain_identifier(o.attr));
}

// ---------------------------------------------------------------- RDF

std::string rdf_term(const Value& v) { return v.kind == ValueKind::Iri ? "<" + v.text + ">" : print_value(v); }

}  // namespace

std::string print_value(const Value& v) {
    switch (v.kind) {
        case ValueKind::Iri: {
            bool bare = plain_identifier(v.text) && !variable_style(v.text) && !kKeywords.count(v.text);
            return bare ? v.text : "<" + v.text + ">";
        }
        case ValueKind::Literal: return quote(v.text);
        case ValueKind::Bottom: return "_|_";
        case ValueKind::Null: return "NULL";
        case ValueKind::Reserved: return "@" + v.text;
    }
    return v.text;
}

sparql::PatternPtr parse_sparql(const std::string& text, const ParseOptions& opts) {
    SparqlParser p(text, opts);
    auto out = p.pattern();
    p.expect_end();
    return out;
}

sparql::FilterPtr parse_filter(const std::string& text, const ParseOptions& opts) {
    SparqlParser p(text, opts);
    auto out = p.condition();
    p.expect_end();
    return out;
}

std::string print_filter(const sparql::FilterPtr& f) {
    using K = sparql::Filter::Kind;
    switch (f->kind) {
        case K::EqConst: return "?" + f->x + " = " + print_value(f->c);
        case K::EqVar: return "?" + f->x + " = ?" + f->y;
        case K::Bound: return "bound(?" + f->x + ")";
        case K::False: return "false";
        case K::And: return "(" + print_filter(f->a) + " && " + print_filter(f->b) + ")";
        case K::Or: return "(" + print_filter(f->a) + " || " + print_filter(f->b) + ")";
        case K::Not: {
            auto inner = print_filter(f->a);
            bool eq = f->a->kind == K::EqConst || f->a->kind == K::EqVar;
            return "!" + (eq ? "(" + inner + ")" : inner);
        }
    }
    return "";
}

std::string print_sparql(const sparql::PatternPtr& p) {
    using K = sparql::Pattern::Kind;
    switch (p->kind) {
        case K::Triple: return "(" + print_slot(p->s) + ", " + print_slot(p->p) + ", " + print_slot(p->o) + ")";
        case K::And: return "(" + print_sparql(p->left) + " AND " + print_sparql(p->right) + ")";
        case K::Union: return "(" + print_sparql(p->left) + " UNION " + print_sparql(p->right) + ")";
        case K::Except: return "(" + print_sparql(p->left) + " EXCEPT " + print_sparql(p->right) + ")";
        case K::Filter: return "(" + print_sparql(p->left) + " FILTER(" + print_filter(p->cond) + "))";
        case K::Select: {
            std::string out = "(SELECT";
            for (const auto& x : p->vars) out += " ?" + x;
            return out + " WHERE " + print_sparql(p->left) + ")";
        }
    }
    return "";
}

sparql::Graph parse_rdf(const std::string& text, const ParseOptions& opts) {
    Parser p(text, opts);
    sparql::Graph g;
    while (!p.at_end()) {
        const Token& start = p.peek();
        Value s = p.constant();
        const Token& pt = p.peek();
        Value pr = p.constant();
        Value o = p.constant();
        p.expect_punct(".");
        if (!s.is_iri_like()) Parser::fail_at(start, "a literal cannot be a subject");
        if (!pr.is_iri_like()) Parser::fail_at(pt, "a literal cannot be a predicate");
        sparql::add_triple(g, {s, pr, o});
    }
    return g;
}

std::string print_rdf(const sparql::Graph& g) {
    std::string out;
    for (const auto& t : g) out += rdf_term(t.s) + " " + rdf_term(t.p) + " " + rdf_term(t.o) + " .\n";
    return out;
}

DatalogFile parse_datalog(const std::string& text, const ParseOptions& opts) {
    DatalogParser p(text, opts);
    return p.file();
}

datalog::Query parse_datalog_query(const std::string& text, const ParseOptions& opts) {
    auto f = parse_datalog(text, opts);
    if (!f.goal) throw ParseError("the program has no goal (?- atom.)", {}, {"?-"});
    if (!f.facts.empty()) throw ParseError("facts belong in the database file, not the query", {});
    return {*f.goal, f.program};
}

datalog::Facts parse_facts(const std::string& text, const ParseOptions& opts) {
    auto f = parse_datalog(text, opts);
    if (f.goal || !f.program.rules.empty()) throw ParseError("a fact file cannot contain rules or a goal", {});
    return f.facts;
}

std::string print_rule(const datalog::Rule& r) {
    std::vector<std::string> body;
    for (const auto& l : r.body) body.push_back((l.negated ? "not " : "") + print_atom(l.atom));
    return print_atom(r.head) + " :- " + join(body, ", ") + ".";
}

std::string print_datalog(const datalog::Query& q) {
    std::string out;
    for (const auto& r : q.program.rules) out += print_rule(r) + "\n";
    return out + "?- " + print_atom(q.goal) + ".\n";
}

std::string print_facts(const datalog::Facts& d) {
    std::string out;
    for (const auto& [f, n] : d) {
        datalog::Atom a{f.pred, {}};
        for (const auto& v : f.args) a.args.push_back(datalog::Term::constant(v));
        out += print_atom(a);
        if (n != 1) out += " * " + std::to_string(n);
        out += ".\n";
    }
    return out;
}

mra::ExprPtr parse_mra(const std::string& text, const ParseOptions& opts) {
    MraParser p(text, opts);
    auto e = p.expr();
    p.expect_end();
    return e;
}

mra::FormulaPtr parse_formula(const std::string& text, const ParseOptions& opts) {
    MraParser p(text, opts);
    auto f = p.formula();
    p.expect_end();
    return f;
}

std::string print_formula(const mra::FormulaPtr& f) {
    using K = mra::Formula::Kind;
    switch (f->kind) {
        case K::Eq: return print_side(f->l) + " = " + print_side(f->r);
        case K::And: return "(" + print_formula(f->a) + " && " + print_formula(f->b) + ")";
        case K::Or: return "(" + print_formula(f->a) + " || " + print_formula(f->b) + ")";
        case K::Not: {
            auto inner = print_formula(f->a);
            return "!" + (f->a->kind == K::Eq ? "(" + inner + ")" : inner);
        }
    }
    return "";
}

std::string print_mra(const mra::ExprPtr& e) {
    using K = mra::Expr::Kind;
    switch (e->kind) {
        case K::Rel: return e->name;
        case K::Join: return "(" + print_mra(e->left) + " join " + print_mra(e->right) + ")";
        case K::Union: return "(" + print_mra(e->left) + " + " + print_mra(e->right) + ")";
        case K::Except: return "(" + print_mra(e->left) + " \\ " + print_mra(e->right) + ")";
        case K::Project: return "project{" + join({e->attrs.begin(), e->attrs.end()}, ",") + "}(" + print_mra(e->left) + ")";
        case K::Select: return "select{" + print_formula(e->cond) + "}(" + print_mra(e->left) + ")";
        case K::Rename: return "rename{" + e->from + "/" + e->to + "}(" + print_mra(e->left) + ")";
    }
    return "";
}

mra::Database parse_relations(const std::string& text, const ParseOptions& opts) {
    MraParser p(text, opts);
    return p.relations();
}

std::string print_relations(const mra::Database& db) {
    std::string out;
    for (const auto& [name, r] : db) {
        if (!out.empty()) out += "\n";
        out += "relation " + name + " {" + join({r.schema.begin(), r.schema.end()}, ", ") + "}\n";
        for (const auto& [t, n] : r.tuples) {
            std::vector<std::string> row;
            for (const auto& [a, v] : t) row.push_back(print_value(v));
            out += "(" + join(row, ", ") + ")";
            if (n != 1) out += " * " + std::to_string(n);
            out += "\n";
        }
    }
    return out;
}

namespace {

template <class M>
nlohmann::json bindings(const M& m) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [k, v] : m) out[k] = print_value(v);
    return out;
}

}  // namespace

nlohmann::json answer_json(const sparql::Omega& omega) {
    nlohmann::json sols = nlohmann::json::array();
    for (const auto& [mu, n] : omega) sols.push_back({{"bindings", bindings(mu)}, {"count", n}});
    return {{"kind", "sparql"}, {"solutions", sols}};
}

nlohmann::json answer_json(const datalog::Answer& a) {
    nlohmann::json sols = nlohmann::json::array();
    for (const auto& [theta, n] : a.solutions) sols.push_back({{"bindings", bindings(theta)}, {"count", n}});
    return {{"kind", "datalog"}, {"vars", a.vars}, {"solutions", sols}};
}

nlohmann::json answer_json(const mra::Relation& r) {
    nlohmann::json tuples = nlohmann::json::array();
    for (const auto& [t, n] : r.tuples) tuples.push_back({{"values", bindings(t)}, {"count", n}});
    return {{"kind", "mra"}, {"schema", r.schema}, {"tuples", tuples}};
}

}  // namespace msq::syntax
