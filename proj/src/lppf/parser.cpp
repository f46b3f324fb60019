// Copyright 2026 The lppf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <lppf/parser.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace lppf {

std::string Diagnostic::format() const {
    std::ostringstream out;
    out << origin << ':' << line << ':' << column << ": " << message;
    return out.str();
}

namespace {

std::string summarize(const std::vector<Diagnostic>& errors) {
    if (errors.empty()) return "parse error";
    std::string msg = errors.front().format();
    if (errors.size() > 1) msg += " (and " + std::to_string(errors.size() - 1) + " more)";
    return msg;
}

}  // namespace

ParseError::ParseError(std::vector<Diagnostic> errors)
    : std::runtime_error(summarize(errors)), errors_(std::move(errors)) {}

std::vector<LabelPiece> split_label(const std::string& label) {
    std::vector<LabelPiece> pieces;
    std::string literal;
    for (std::size_t i = 0; i < label.size(); ++i) {
        char c = label[i];
        if (c == '%' && i + 1 < label.size()) {
            char n = label[i + 1];
            if (n == '%') {
                literal += '%';
                ++i;
                continue;
            }
            if (std::isupper(static_cast<unsigned char>(n))) {
                std::size_t j = i + 1;
                while (j < label.size() && (std::isalnum(static_cast<unsigned char>(label[j])) || label[j] == '_')) ++j;
                if (!literal.empty()) pieces.push_back({std::move(literal), {}});
                literal.clear();
                pieces.push_back({{}, label.substr(i + 1, j - i - 1)});
                i = j - 1;
                continue;
            }
        }
        literal += c;
    }
    if (!literal.empty()) pieces.push_back({std::move(literal), {}});
    return pieces;
}

namespace {

enum class Tok {
    Ident,
    Variable,
    Integer,
    String,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Colon,
    Semicolon,
    If,
    Assign,
    DefaultAssign,
    DoubleColon,
    Tilde,
    Plus,
    Minus,
    Star,
    Slash,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    HashLabel,
    HashExplain,
    HashSum,
    Not,
    End,
};

struct Token {
    Tok type = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
};

const char* describe(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::Variable: return "variable";
        case Tok::Integer: return "integer";
        case Tok::String: return "string";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::Comma: return "','";
        case Tok::Dot: return "'.'";
        case Tok::Colon: return "':'";
        case Tok::Semicolon: return "';'";
        case Tok::If: return "':-'";
        case Tok::Assign: return "':='";
        case Tok::DefaultAssign: return "'^='";
        case Tok::DoubleColon: return "'::'";
        case Tok::Tilde: return "'~'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Eq: return "'='";
        case Tok::Ne: return "'!='";
        case Tok::Lt: return "'<'";
        case Tok::Le: return "'<='";
        case Tok::Gt: return "'>'";
        case Tok::Ge: return "'>='";
        case Tok::HashLabel: return "'#label'";
        case Tok::HashExplain: return "'#explain'";
        case Tok::HashSum: return "'#sum'";
        case Tok::Not: return "'not'";
        case Tok::End: return "end of input";
    }
    return "token";
}

class Lexer {
public:
    Lexer(std::string_view src, const std::string& origin, std::vector<Diagnostic>& errors)
        : src_(src), origin_(origin), errors_(errors) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = pos_;
                while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) bump();
                t.text = std::string(src_.substr(start, pos_ - start));
                if (std::isupper(static_cast<unsigned char>(c))) {
                    t.type = Tok::Variable;
                } else if (c == '_') {
                    error(t, "identifiers must start with a letter");
                    continue;
                } else {
                    t.type = t.text == "not" ? Tok::Not : Tok::Ident;
                }
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t start = pos_;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
                t.type = Tok::Integer;
                t.text = std::string(src_.substr(start, pos_ - start));
            } else if (c == '"') {
                if (!lex_string(t)) continue;
            } else if (c == '#') {
                std::size_t start = pos_;
                bump();
                while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) bump();
                std::string_view word = src_.substr(start, pos_ - start);
                if (word == "#label") {
                    t.type = Tok::HashLabel;
                } else if (word == "#explain") {
                    t.type = Tok::HashExplain;
                } else if (word == "#sum") {
                    t.type = Tok::HashSum;
                } else {
                    error(t, "unknown directive '" + std::string(word) + "'");
                    continue;
                }
                t.text = std::string(word);
            } else if (!lex_punct(t)) {
                error(t, std::string("unexpected character '") + c + "'");
                bump();
                continue;
            }
            out.push_back(std::move(t));
        }
    }

private:
    std::string_view src_;
    const std::string& origin_;
    std::vector<Diagnostic>& errors_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void error(const Token& at, std::string message) { errors_.push_back({origin_, at.line, at.column, std::move(message)}); }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n') bump();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                bump();
            } else {
                break;
            }
        }
    }

    bool lex_string(Token& t) {
        bump();
        std::string value;
        while (pos_ < src_.size() && src_[pos_] != '"') {
            char c = src_[pos_];
            if (c == '\\' && pos_ + 1 < src_.size()) {
                bump();
                char e = src_[pos_];
                switch (e) {
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    case '"': value += '"'; break;
                    case '\\': value += '\\'; break;
                    default: value += '\\'; value += e;
                }
                bump();
                continue;
            }
            value += c;
            bump();
        }
        if (pos_ >= src_.size()) {
            error(t, "unterminated string");
            return false;
        }
        bump();
        t.type = Tok::String;
        t.text = std::move(value);
        return true;
    }

    bool lex_punct(Token& t) {
        auto next = [&](char c) { return pos_ + 1 < src_.size() && src_[pos_ + 1] == c; };
        auto take = [&](Tok type, int n) {
            t.type = type;
            t.text = std::string(src_.substr(pos_, static_cast<std::size_t>(n)));
            for (int i = 0; i < n; ++i) bump();
            return true;
        };
        switch (src_[pos_]) {
            case '(': return take(Tok::LParen, 1);
            case ')': return take(Tok::RParen, 1);
            case '{': return take(Tok::LBrace, 1);
            case '}': return take(Tok::RBrace, 1);
            case ',': return take(Tok::Comma, 1);
            case '.': return take(Tok::Dot, 1);
            case ';': return take(Tok::Semicolon, 1);
            case '~': return take(Tok::Tilde, 1);
            case '+': return take(Tok::Plus, 1);
            case '-': return take(Tok::Minus, 1);
            case '*': return take(Tok::Star, 1);
            case '/': return take(Tok::Slash, 1);
            case '=': return take(Tok::Eq, 1);
            case ':':
                if (next('-')) return take(Tok::If, 2);
                if (next('=')) return take(Tok::Assign, 2);
                if (next(':')) return take(Tok::DoubleColon, 2);
                return take(Tok::Colon, 1);
            case '^':
                if (next('=')) return take(Tok::DefaultAssign, 2);
                return false;
            case '!':
                if (next('=')) return take(Tok::Ne, 2);
                return false;
            case '<':
                if (next('=')) return take(Tok::Le, 2);
                return take(Tok::Lt, 1);
            case '>':
                if (next('=')) return take(Tok::Ge, 2);
                return take(Tok::Gt, 1);
            default: return false;
        }
    }
};

struct StatementError {
    int line;
    int column;
    std::string message;
};

class Parser {
public:
    Parser(std::vector<Token> tokens, std::string origin, std::vector<Diagnostic>& errors)
        : toks_(std::move(tokens)), origin_(std::move(origin)), errors_(errors) {}

    Program run() {
        Program program;
        while (peek().type != Tok::End) {
            std::size_t start = pos_;
            try {
                statement(program);
            } catch (const StatementError& e) {
                errors_.push_back({origin_, e.line, e.column, e.message});
                recover(start);
            }
        }
        return program;
    }

    // Used for standalone queries.
    std::pair<Term, Term> assignment() {
        bool negated = accept(Tok::Tilde);
        Term target = function_term();
        Term value = Term::boolean(!negated);
        if (!negated && accept(Tok::Eq)) value = term();
        expect(Tok::End);
        return {std::move(target), std::move(value)};
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::string origin_;
    std::vector<Diagnostic>& errors_;

    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    const Token& advance() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    bool accept(Tok t) {
        if (peek().type != t) return false;
        advance();
        return true;
    }
    [[noreturn]] void fail(const Token& at, std::string message) const {
        throw StatementError{at.line, at.column, std::move(message)};
    }
    [[noreturn]] void unexpected(const char* wanted) const {
        const Token& t = peek();
        std::string got = t.type == Tok::End ? "end of input" : "'" + t.text + "'";
        fail(t, std::string("syntax error: expected ") + wanted + ", got " + got);
    }
    const Token& expect(Tok t) {
        if (peek().type != t) unexpected(describe(t));
        return advance();
    }

    void recover(std::size_t start) {
        if (pos_ == start) advance();
        while (peek().type != Tok::End) {
            if (advance().type == Tok::Dot) break;
        }
    }

    SourceSpan span_at(const Token& t) const { return SourceSpan{origin_, t.line, t.column, t.line}; }

    void statement(Program& program) {
        const Token& first = peek();
        SourceSpan span = span_at(first);
        if (accept(Tok::HashLabel)) {
            LabelDirective d;
            d.label = term();
            expect(Tok::DoubleColon);
            d.pattern = function_term();
            span.last_line = expect(Tok::Dot).line;
            d.span = span;
            check_label_directive(d, first);
            program.directives.emplace_back(std::move(d));
            return;
        }
        if (accept(Tok::HashExplain)) {
            ExplainDirective d;
            d.target = function_term();
            if (accept(Tok::If)) d.conditions = body();
            span.last_line = expect(Tok::Dot).line;
            d.span = span;
            check_explain_directive(d, first);
            program.directives.emplace_back(std::move(d));
            return;
        }

        Rule rule;
        if (peek().type == Tok::String) {
            rule.label = TextLabel{advance().text};
            accept(Tok::DoubleColon);
        } else if (has_term_label()) {
            rule.label = TermLabel{term()};
            expect(Tok::DoubleColon);
        }
        rule.head = head();
        if (accept(Tok::If)) {
            rule.body = body();
        } else if (std::holds_alternative<ConstraintHead>(rule.head)) {
            unexpected("':-'");
        }
        span.last_line = expect(Tok::Dot).line;
        rule.span = span;
        check_safety(rule, first);
        program.rules.push_back(std::move(rule));
    }

    // A `::` before the end of the statement head marks a term label.
    bool has_term_label() const {
        int depth = 0;
        for (std::size_t i = pos_; i < toks_.size(); ++i) {
            switch (toks_[i].type) {
                case Tok::LParen: ++depth; break;
                case Tok::RParen: --depth; break;
                case Tok::DoubleColon:
                    if (depth == 0) return true;
                    break;
                case Tok::Dot:
                case Tok::If:
                case Tok::Assign:
                case Tok::DefaultAssign:
                case Tok::End: return false;
                default: break;
            }
        }
        return false;
    }

    RuleHead head() {
        if (peek().type == Tok::If) return ConstraintHead{};
        if (accept(Tok::Tilde)) return DenyHead{function_term()};
        Term target = function_term();
        if (accept(Tok::Assign)) {
            if (peek().type == Tok::HashSum) return AggregateHead{std::move(target), aggregate()};
            return AssignHead{std::move(target), expression()};
        }
        if (accept(Tok::DefaultAssign)) return DefaultHead{std::move(target), expression()};
        return AssertHead{std::move(target)};
    }

    SumAggregate aggregate() {
        expect(Tok::HashSum);
        expect(Tok::LBrace);
        SumAggregate agg;
        if (accept(Tok::RBrace)) return agg;
        do {
            AggregateElement el;
            el.term = function_term();
            if (accept(Tok::Colon)) {
                do {
                    el.conditions.push_back(literal());
                } while (accept(Tok::Comma));
            }
            agg.elements.push_back(std::move(el));
        } while (accept(Tok::Semicolon));
        expect(Tok::RBrace);
        return agg;
    }

    std::vector<BodyLiteral> body() {
        std::vector<BodyLiteral> out;
        do {
            out.push_back(literal());
        } while (accept(Tok::Comma));
        return out;
    }

    BodyLiteral literal() {
        BodyLiteral lit;
        lit.default_negated = accept(Tok::Not);
        if (accept(Tok::Tilde)) {
            lit.payload = NegativeAtom{function_term()};
            return lit;
        }
        const Token& at = peek();
        Expression lhs = expression();
        if (auto op = compare_op()) {
            lit.payload = Comparison{std::move(lhs), *op, expression()};
            return lit;
        }
        if (lhs.is_leaf() && lhs.leaf.kind == Term::Kind::Function) {
            lit.payload = PositiveAtom{std::move(lhs.leaf)};
        } else if (lhs.is_leaf() && lhs.leaf.kind == Term::Kind::Symbol) {
            lit.payload = PositiveAtom{Term::function(lhs.leaf.name)};
        } else {
            fail(at, "syntax error: expected an atom or a comparison");
        }
        return lit;
    }

    std::optional<CompareOp> compare_op() {
        switch (peek().type) {
            case Tok::Eq: advance(); return CompareOp::Eq;
            case Tok::Ne: advance(); return CompareOp::Ne;
            case Tok::Lt: advance(); return CompareOp::Lt;
            case Tok::Le: advance(); return CompareOp::Le;
            case Tok::Gt: advance(); return CompareOp::Gt;
            case Tok::Ge: advance(); return CompareOp::Ge;
            default: return std::nullopt;
        }
    }

    Expression expression() {
        Expression lhs = product();
        for (;;) {
            if (accept(Tok::Plus)) {
                lhs = Expression::binary(ArithOp::Add, std::move(lhs), product());
            } else if (accept(Tok::Minus)) {
                lhs = Expression::binary(ArithOp::Sub, std::move(lhs), product());
            } else {
                return lhs;
            }
        }
    }

    Expression product() {
        Expression lhs = unary();
        for (;;) {
            if (accept(Tok::Star)) {
                lhs = Expression::binary(ArithOp::Mul, std::move(lhs), unary());
            } else if (accept(Tok::Slash)) {
                lhs = Expression::binary(ArithOp::Div, std::move(lhs), unary());
            } else {
                return lhs;
            }
        }
    }

    Expression unary() {
        if (peek().type == Tok::Minus) {
            if (peek(1).type == Tok::Integer) {
                advance();
                return Expression(integer(advance(), true));
            }
            advance();
            return Expression::binary(ArithOp::Sub, Expression(Term::integer(0)), unary());
        }
        if (accept(Tok::LParen)) {
            Expression inner = expression();
            expect(Tok::RParen);
            return inner;
        }
        return Expression(term());
    }

    Term integer(const Token& t, bool negative) {
        std::int64_t v = 0;
        std::string digits = negative ? "-" + t.text : t.text;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (ec != std::errc() || ptr != digits.data() + digits.size()) fail(t, "integer literal out of range");
        return Term::integer(v);
    }

    // A bare lowercase identifier is a symbol; `f()` is a nullary function term.
    Term term() {
        const Token& t = peek();
        switch (t.type) {
            case Tok::Variable: return Term::variable(advance().text);
            case Tok::Integer: return integer(advance(), false);
            case Tok::Minus:
                if (peek(1).type == Tok::Integer) {
                    advance();
                    return integer(advance(), true);
                }
                unexpected("term");
            case Tok::String: return Term::text(advance().text);
            case Tok::Ident: {
                std::string name = advance().text;
                if (!accept(Tok::LParen)) return Term::symbol(std::move(name));
                return Term::function(std::move(name), arguments());
            }
            default: unexpected("term");
        }
    }

    std::vector<Term> arguments() {
        std::vector<Term> args;
        if (accept(Tok::RParen)) return args;
        do {
            args.push_back(term());
        } while (accept(Tok::Comma));
        expect(Tok::RParen);
        return args;
    }

    Term function_term() {
        const Token& t = peek();
        if (t.type != Tok::Ident) unexpected("function term");
        std::string name = advance().text;
        if (!accept(Tok::LParen)) return Term::function(std::move(name));
        return Term::function(std::move(name), arguments());
    }

    // ---- safety ----------------------------------------------------------

    static void bind_positions(const Term& term, std::set<std::string>& bound) {
        if (!term.is_function()) return;
        for (const auto& a : term.args) {
            if (a.is_variable()) bound.insert(a.name);
            bind_positions(a, bound);
        }
    }

    static void bind_literals(const std::vector<BodyLiteral>& lits, std::set<std::string>& bound) {
        for (const auto& lit : lits) {
            if (lit.default_negated) continue;
            std::vector<const Term*> fns;
            std::visit(
                [&](const auto& p) {
                    using P = std::decay_t<decltype(p)>;
                    if constexpr (std::is_same_v<P, Comparison>) {
                        collect_function_terms(p.lhs, fns);
                        collect_function_terms(p.rhs, fns);
                    } else {
                        collect_function_terms(p.term, fns);
                    }
                },
                lit.payload);
            for (const Term* f : fns) bind_positions(*f, bound);
        }
        // Aliases: `V = expr` with expr fully bound.
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& lit : lits) {
                const auto* cmp = std::get_if<Comparison>(&lit.payload);
                if (lit.default_negated || !cmp || cmp->op != CompareOp::Eq) continue;
                auto try_alias = [&](const Expression& var, const Expression& other) {
                    if (!var.is_leaf() || !var.leaf.is_variable() || bound.count(var.leaf.name)) return;
                    std::vector<std::string> vs;
                    collect_variables(other, vs);
                    if (std::all_of(vs.begin(), vs.end(), [&](const std::string& v) { return bound.count(v) > 0; })) {
                        bound.insert(var.leaf.name);
                        changed = true;
                    }
                };
                try_alias(cmp->lhs, cmp->rhs);
                try_alias(cmp->rhs, cmp->lhs);
            }
        }
    }

    void require_bound(const std::vector<std::string>& vars, const std::set<std::string>& bound, const Token& at,
                       const char* where) const {
        for (const auto& v : vars) {
            if (!bound.count(v)) fail(at, "unsafe variable '" + v + "' in " + where);
        }
    }

    void check_safety(const Rule& rule, const Token& at) const {
        std::set<std::string> bound;
        bind_literals(rule.body, bound);

        std::vector<std::string> outer;
        if (const Term* t = head_target(rule.head)) collect_variables(*t, outer);
        if (const auto* a = std::get_if<AssignHead>(&rule.head)) collect_variables(a->value, outer);
        if (const auto* d = std::get_if<DefaultHead>(&rule.head)) collect_variables(d->value, outer);
        for (const auto& lit : rule.body) collect_variables(lit, outer);
        if (rule.label) {
            if (const auto* tl = std::get_if<TermLabel>(&*rule.label)) collect_variables(tl->term, outer);
        }
        require_bound(outer, bound, at, "rule");

        if (rule.label) {
            if (const auto* tl = std::get_if<TextLabel>(&*rule.label)) {
                for (const auto& piece : split_label(tl->text)) {
                    if (!piece.variable.empty() && !bound.count(piece.variable)) {
                        fail(at, "label refers to unknown variable '" + piece.variable + "'");
                    }
                }
            }
        }

        if (const auto* agg = std::get_if<AggregateHead>(&rule.head)) {
            for (const auto& el : agg->aggregate.elements) {
                std::set<std::string> local = bound;
                bind_positions(el.term, local);
                for (const auto& a : el.term.args) {
                    if (a.is_variable()) local.insert(a.name);
                }
                bind_literals(el.conditions, local);
                std::vector<std::string> vars;
                collect_variables(el.term, vars);
                for (const auto& c : el.conditions) collect_variables(c, vars);
                require_bound(vars, local, at, "aggregate element");
            }
        }
    }

    void check_label_directive(const LabelDirective& d, const Token& at) const {
        std::set<std::string> bound;
        std::vector<std::string> pattern_vars;
        collect_variables(d.pattern, pattern_vars);
        bound.insert(pattern_vars.begin(), pattern_vars.end());
        std::vector<std::string> vars;
        collect_variables(d.label, vars);
        require_bound(vars, bound, at, "#label directive");
    }

    void check_explain_directive(const ExplainDirective& d, const Token& at) const {
        std::set<std::string> bound;
        std::vector<std::string> target_vars;
        collect_variables(d.target, target_vars);
        bound.insert(target_vars.begin(), target_vars.end());
        bind_literals(d.conditions, bound);
        std::vector<std::string> vars;
        for (const auto& c : d.conditions) collect_variables(c, vars);
        require_bound(vars, bound, at, "#explain directive");
    }
};

}  // namespace

ParseResult parse(std::string_view source, const std::string& origin) {
    ParseResult result;
    auto tokens = Lexer(source, origin, result.errors).run();
    result.program = Parser(std::move(tokens), origin, result.errors).run();
    std::stable_sort(result.errors.begin(), result.errors.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.line, a.column) < std::tie(b.line, b.column);
    });
    return result;
}

Program parse_or_throw(std::string_view source, const std::string& origin) {
    auto result = parse(source, origin);
    if (!result.ok()) throw ParseError(std::move(result.errors));
    return std::move(result.program);
}

std::pair<Term, Term> parse_assignment(std::string_view text) {
    std::vector<Diagnostic> errors;
    auto tokens = Lexer(text, "<query>", errors).run();
    if (!errors.empty()) throw ParseError(std::move(errors));
    Parser parser(std::move(tokens), "<query>", errors);
    try {
        return parser.assignment();
    } catch (const StatementError& e) {
        throw ParseError({{"<query>", e.line, e.column, e.message}});
    }
}

}  // namespace lppf
