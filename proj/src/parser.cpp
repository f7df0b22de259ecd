/*
 * Copyright 2026 The psni authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <functional>

#include "errors.hpp"

namespace pepa {
namespace {

enum class Tok {
    Ident,    // lowercase-initial identifier (action)
    Const,    // uppercase-initial identifier (constant)
    Number,   // digits, optionally with one decimal point
    Define,   // :=
    Semi,
    Equals,
    LBrace,
    RBrace,
    Comma,
    LParen,
    RParen,
    Dot,
    Plus,
    Lt,
    Gt,
    Slash,
    Star,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

const char* tok_name(Tok t) {
    switch (t) {
        case Tok::Ident: return "action name";
        case Tok::Const: return "constant name";
        case Tok::Number: return "number";
        case Tok::Define: return "':='";
        case Tok::Semi: return "';'";
        case Tok::Equals: return "'='";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::Comma: return "','";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Dot: return "'.'";
        case Tok::Plus: return "'+'";
        case Tok::Lt: return "'<'";
        case Tok::Gt: return "'>'";
        case Tok::Slash: return "'/'";
        case Tok::Star: return "'*'";
        case Tok::End: return "end of input";
    }
    return "?";
}

class Lexer {
public:
    Lexer(std::string_view src, std::vector<ParseDiagnostic>& diags)
        : src_(src), diags_(diags) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_trivia();
            int line = line_, col = col_;
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, "", line, col});
                break;
            }
            char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c))) {
                std::string text;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                        src_[pos_] == '_'))
                    text.push_back(take());
                Tok kind = std::isupper(static_cast<unsigned char>(text[0]))
                               ? Tok::Const
                               : Tok::Ident;
                out.push_back({kind, std::move(text), line, col});
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::string text;
                while (pos_ < src_.size() &&
                       std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    text.push_back(take());
                if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
                    std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
                    text.push_back(take());
                    while (pos_ < src_.size() &&
                           std::isdigit(static_cast<unsigned char>(src_[pos_])))
                        text.push_back(take());
                }
                out.push_back({Tok::Number, std::move(text), line, col});
                continue;
            }
            switch (c) {
                case ':':
                    if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
                        take();
                        take();
                        out.push_back({Tok::Define, ":=", line, col});
                    } else {
                        take();
                        diags_.push_back({line, col, ParseDiagnostic::Severity::Error,
                                          "stray ':' (did you mean ':='?)"});
                    }
                    continue;
                case ';': take(); out.push_back({Tok::Semi, ";", line, col}); continue;
                case '=': take(); out.push_back({Tok::Equals, "=", line, col}); continue;
                case '{': take(); out.push_back({Tok::LBrace, "{", line, col}); continue;
                case '}': take(); out.push_back({Tok::RBrace, "}", line, col}); continue;
                case ',': take(); out.push_back({Tok::Comma, ",", line, col}); continue;
                case '(': take(); out.push_back({Tok::LParen, "(", line, col}); continue;
                case ')': take(); out.push_back({Tok::RParen, ")", line, col}); continue;
                case '.': take(); out.push_back({Tok::Dot, ".", line, col}); continue;
                case '+': take(); out.push_back({Tok::Plus, "+", line, col}); continue;
                case '<': take(); out.push_back({Tok::Lt, "<", line, col}); continue;
                case '>': take(); out.push_back({Tok::Gt, ">", line, col}); continue;
                case '/': take(); out.push_back({Tok::Slash, "/", line, col}); continue;
                case '*': take(); out.push_back({Tok::Star, "*", line, col}); continue;
                default:
                    take();
                    diags_.push_back({line, col, ParseDiagnostic::Severity::Error,
                                      std::string("unexpected character '") + c + "'"});
                    continue;
            }
        }
        return out;
    }

private:
    char take() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_trivia() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n') take();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                take();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::vector<ParseDiagnostic>& diags_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

struct Pos {
    int line, column;
};

class Parser {
public:
    explicit Parser(std::string_view source) : lexer_(source, diagnostics_) {
        tokens_ = lexer_.run();
    }

    ParseResult run() {
        bool saw_def = false;
        bool saw_system = false;
        while (peek().kind != Tok::End) {
            const Token& t = peek();
            if (saw_system) {
                error(t, "nothing may follow the system declaration");
                sync_statement();
                continue;
            }
            if (t.kind == Tok::Ident && t.text == "high") {
                if (saw_def)
                    error(t, "high declaration must appear before definitions");
                parse_header();
            } else if (t.kind == Tok::Ident && t.text == "system") {
                parse_sysdecl();
                saw_system = true;
            } else if (t.kind == Tok::Const) {
                parse_def();
                saw_def = true;
            } else {
                error(t, std::string("expected a definition, high declaration, or "
                                     "system declaration, found ") +
                             tok_name(t.kind));
                sync_statement();
            }
        }
        if (!saw_def)
            error(peek(), "model has no constant definitions");
        if (!saw_system)
            error(peek(), "model has no system declaration");

        run_semantic_checks();

        ParseResult result;
        std::stable_sort(diagnostics_.begin(), diagnostics_.end(),
                         [](const ParseDiagnostic& a, const ParseDiagnostic& b) {
                             if (a.line != b.line) return a.line < b.line;
                             return a.column < b.column;
                         });
        result.diagnostics = std::move(diagnostics_);
        bool has_error = std::any_of(result.diagnostics.begin(), result.diagnostics.end(),
                                     [](const ParseDiagnostic& d) {
                                         return d.severity == ParseDiagnostic::Severity::Error;
                                     });
        if (!has_error) {
            ModelEnv env;
            for (auto& [name, def] : defs_) env.defs.emplace(name, def.term);
            for (auto& [name, pos] : high_) env.high.insert(name);
            env.system = system_;
            result.env = std::move(env);
        }
        return result;
    }

private:
    struct Def {
        TermPtr term;
        Pos pos;
    };

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }

    const Token& advance() {
        const Token& t = tokens_[pos_];
        if (pos_ + 1 < tokens_.size()) ++pos_;
        return t;
    }

    bool match(Tok kind) {
        if (peek().kind != kind) return false;
        advance();
        return true;
    }

    bool expect(Tok kind) {
        if (match(kind)) return true;
        error(peek(), std::string("expected ") + tok_name(kind) + ", found " +
                          tok_name(peek().kind));
        return false;
    }

    void error(const Token& at, std::string message) {
        diagnostics_.push_back(
            {at.line, at.column, ParseDiagnostic::Severity::Error, std::move(message)});
    }

    void warning(Pos at, std::string message) {
        diagnostics_.push_back(
            {at.line, at.column, ParseDiagnostic::Severity::Warning, std::move(message)});
    }

    /// Skip past the next ';' so later statements still produce diagnostics.
    void sync_statement() {
        while (peek().kind != Tok::End) {
            if (advance().kind == Tok::Semi) return;
        }
    }

    // header := "high" "=" "{" identlist "}" ";"
    void parse_header() {
        advance();  // "high"
        expect(Tok::Equals);
        expect(Tok::LBrace);
        if (peek().kind != Tok::RBrace) {
            do {
                if (peek().kind == Tok::Ident) {
                    const Token& t = advance();
                    if (is_tau(t.text)) {
                        error(t, "'tau' is reserved and cannot be declared high");
                    } else if (!high_.count(t.text)) {
                        high_.emplace(t.text, Pos{t.line, t.column});
                    }
                } else {
                    error(peek(), std::string("expected action name, found ") +
                                      tok_name(peek().kind));
                    break;
                }
            } while (match(Tok::Comma));
        }
        expect(Tok::RBrace);
        if (!expect(Tok::Semi)) sync_statement();
    }

    // def := CONST ":=" term ";"
    void parse_def() {
        const Token& name = advance();
        if (defs_.count(name.text)) {
            error(name, "duplicate definition of constant '" + name.text + "'");
        }
        if (!expect(Tok::Define)) {
            defs_.emplace(name.text, Def{nullptr, Pos{name.line, name.column}});
            sync_statement();
            return;
        }
        TermPtr body = parse_term();
        if (!defs_.count(name.text))
            defs_.emplace(name.text, Def{body, Pos{name.line, name.column}});
        if (!expect(Tok::Semi)) sync_statement();
    }

    // sysdecl := "system" term ";"
    void parse_sysdecl() {
        const Token& kw = advance();
        system_pos_ = Pos{kw.line, kw.column};
        system_ = parse_term();
        if (!expect(Tok::Semi)) sync_statement();
    }

    // term := coop; coop := hiding ( "<" identlist? ">" hiding )*
    TermPtr parse_term() {
        TermPtr left = parse_hiding();
        while (peek().kind == Tok::Lt) {
            advance();
            std::vector<std::string> set = parse_identlist_until(Tok::Gt);
            expect(Tok::Gt);
            TermPtr right = parse_hiding();
            if (left && right)
                left = Term::cooperation(left, std::move(set), right);
            else
                left = left ? left : right;
        }
        return left ? left : Term::constant("_error_");
    }

    // hiding := choice ( "/" "{" identlist "}" )*
    TermPtr parse_hiding() {
        TermPtr t = parse_choice();
        while (peek().kind == Tok::Slash) {
            advance();
            expect(Tok::LBrace);
            std::vector<std::string> set = parse_identlist_until(Tok::RBrace);
            expect(Tok::RBrace);
            if (t) t = Term::hiding(t, std::move(set));
        }
        return t;
    }

    // choice := prefix ( "+" prefix )*
    TermPtr parse_choice() {
        TermPtr t = parse_prefix();
        while (peek().kind == Tok::Plus) {
            advance();
            TermPtr r = parse_prefix();
            if (t && r) t = Term::choice(t, r);
        }
        return t;
    }

    // prefix := "(" IDENT "," rate ")" "." prefix | CONST | "(" term ")"
    TermPtr parse_prefix() {
        const Token& t = peek();
        if (t.kind == Tok::Const) {
            advance();
            refs_.push_back({t.text, Pos{t.line, t.column}});
            return Term::constant(t.text);
        }
        if (t.kind == Tok::LParen) {
            // (IDENT , ...) starts an activity; anything else is a grouped term.
            if (peek(1).kind == Tok::Ident && peek(2).kind == Tok::Comma)
                return parse_activity_prefix();
            advance();
            TermPtr inner = parse_term();
            expect(Tok::RParen);
            return inner;
        }
        error(t, std::string("expected a prefix, constant, or '(', found ") +
                     tok_name(t.kind));
        advance();
        return nullptr;
    }

    TermPtr parse_activity_prefix() {
        advance();  // '('
        const Token& action = advance();
        if (is_tau(action.text))
            error(action, "'tau' is reserved; hide an action to obtain tau");
        expect(Tok::Comma);
        Rate rate = parse_rate();
        expect(Tok::RParen);
        expect(Tok::Dot);
        TermPtr cont = parse_prefix();
        if (!cont) return nullptr;
        return Term::prefix(Activity{action.text, std::move(rate)}, cont);
    }

    // rate := RATIONAL | INT "*" "T" | "T"
    Rate parse_rate() {
        const Token& t = peek();
        if (t.kind == Tok::Const && t.text == "T") {
            advance();
            return Rate::passive(1);
        }
        if (t.kind != Tok::Number) {
            error(t, std::string("expected a rate, found ") + tok_name(t.kind));
            advance();
            return Rate::finite(1);
        }
        advance();
        bool is_decimal = t.text.find('.') != std::string::npos;
        Rational value = decimal_to_rational(t.text);
        if (peek().kind == Tok::Star) {
            advance();
            const Token& sym = peek();
            if (sym.kind == Tok::Const && sym.text == "T") {
                advance();
                if (is_decimal || value.get_den() != 1) {
                    error(t, "passive weight must be a positive integer");
                    return Rate::passive(1);
                }
                if (value <= 0) {
                    error(t, "passive weight must be a positive integer");
                    return Rate::passive(1);
                }
                return Rate::passive(value);
            }
            error(sym, std::string("expected 'T' after '*', found ") +
                           tok_name(sym.kind));
            return Rate::finite(1);
        }
        if (peek().kind == Tok::Slash && peek(1).kind == Tok::Number) {
            advance();
            const Token& den_tok = advance();
            if (is_decimal || den_tok.text.find('.') != std::string::npos) {
                error(den_tok, "fraction parts must be integers");
                return Rate::finite(1);
            }
            Rational den = decimal_to_rational(den_tok.text);
            if (den == 0) {
                error(den_tok, "fraction with zero denominator");
                return Rate::finite(1);
            }
            value /= den;
        }
        if (value <= 0) {
            error(t, "rates must be strictly positive");
            return Rate::finite(1);
        }
        return Rate::finite(value);
    }

    static Rational decimal_to_rational(const std::string& text) {
        auto dot = text.find('.');
        if (dot == std::string::npos) {
            Rational q(mpz_class(text, 10));
            q.canonicalize();
            return q;
        }
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        std::size_t frac_digits = text.size() - dot - 1;
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_digits);
        Rational q(mpz_class(digits, 10), den);
        q.canonicalize();
        return q;
    }

    std::vector<std::string> parse_identlist_until(Tok closer) {
        std::vector<std::string> out;
        if (peek().kind == closer) return out;
        do {
            const Token& t = peek();
            if (t.kind == Tok::Ident) {
                advance();
                if (is_tau(t.text))
                    error(t, "'tau' may not appear in a cooperation or hiding set");
                else
                    out.push_back(t.text);
            } else {
                error(t, std::string("expected action name, found ") +
                             tok_name(t.kind));
                break;
            }
        } while (match(Tok::Comma));
        return out;
    }

    void run_semantic_checks() {
        // Binding: every referenced constant must have a definition.
        bool binding_ok = true;
        for (const auto& [name, pos] : refs_) {
            if (!defs_.count(name)) {
                diagnostics_.push_back({pos.line, pos.column,
                                        ParseDiagnostic::Severity::Error,
                                        "undefined constant '" + name + "'"});
                binding_ok = false;
            }
        }

        // Stratification of each parsed term.
        for (const auto& [name, def] : defs_) {
            if (!def.term) continue;
            std::string v = check_stratification(def.term);
            if (!v.empty())
                diagnostics_.push_back({def.pos.line, def.pos.column,
                                        ParseDiagnostic::Severity::Error,
                                        "in definition of '" + name + "': " + v});
        }
        if (system_) {
            std::string v = check_stratification(system_);
            if (!v.empty())
                diagnostics_.push_back({system_pos_.line, system_pos_.column,
                                        ParseDiagnostic::Severity::Error,
                                        "in system declaration: " + v});
        }

        if (binding_ok) check_guardedness();
        emit_high_warnings();
    }

    // Constants reachable without passing a prefix; a cycle here makes
    // one-step derivation diverge, so it is rejected up front.
    static void unguarded_refs(const TermPtr& t, std::set<std::string>& out) {
        if (!t) return;
        switch (t->kind()) {
            case TermKind::Constant: out.insert(t->name()); return;
            case TermKind::Prefix: return;
            case TermKind::Choice:
                unguarded_refs(t->left(), out);
                unguarded_refs(t->right(), out);
                return;
            case TermKind::Cooperation:
                unguarded_refs(t->left(), out);
                unguarded_refs(t->right(), out);
                return;
            case TermKind::Hiding: unguarded_refs(t->inner(), out); return;
        }
    }

    void check_guardedness() {
        std::map<std::string, std::set<std::string>> dep;
        for (const auto& [name, def] : defs_) {
            if (def.term) unguarded_refs(def.term, dep[name]);
        }
        // Colors: 0 unvisited, 1 on stack, 2 done.
        std::map<std::string, int> color;
        std::set<std::string> reported;
        auto dfs = [&](auto&& self, const std::string& n) -> bool {
            color[n] = 1;
            for (const auto& m : dep[n]) {
                if (!defs_.count(m)) continue;
                if (color[m] == 1) return true;
                if (color[m] == 0 && self(self, m)) return true;
            }
            color[n] = 2;
            return false;
        };
        for (const auto& [name, def] : defs_) {
            if (color[name] == 0 && dfs(dfs, name) && !reported.count(name)) {
                reported.insert(name);
                diagnostics_.push_back({def.pos.line, def.pos.column,
                                        ParseDiagnostic::Severity::Error,
                                        "unguarded recursion in definition of '" +
                                            name + "'"});
            }
        }
    }

    static void collect_actions(const TermPtr& t, std::set<std::string>& occurring,
                                std::set<std::string>& in_coop_sets) {
        if (!t) return;
        switch (t->kind()) {
            case TermKind::Constant: return;
            case TermKind::Prefix:
                occurring.insert(t->activity().action);
                collect_actions(t->continuation(), occurring, in_coop_sets);
                return;
            case TermKind::Choice:
            case TermKind::Cooperation:
                if (t->kind() == TermKind::Cooperation)
                    for (const auto& a : t->action_set()) {
                        occurring.insert(a);
                        in_coop_sets.insert(a);
                    }
                collect_actions(t->left(), occurring, in_coop_sets);
                collect_actions(t->right(), occurring, in_coop_sets);
                return;
            case TermKind::Hiding:
                for (const auto& a : t->action_set()) occurring.insert(a);
                collect_actions(t->inner(), occurring, in_coop_sets);
                return;
        }
    }

    void emit_high_warnings() {
        std::set<std::string> occurring, in_coop_sets;
        for (const auto& [name, def] : defs_)
            collect_actions(def.term, occurring, in_coop_sets);
        collect_actions(system_, occurring, in_coop_sets);
        for (const auto& [name, pos] : high_) {
            if (!occurring.count(name))
                warning(pos, "high action '" + name + "' never occurs in the model");
            else if (in_coop_sets.count(name))
                warning(pos, "high action '" + name +
                                 "' appears in a cooperation set; security "
                                 "verdicts assume high actions synchronize only "
                                 "with the environment");
        }
    }

    Lexer lexer_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::vector<ParseDiagnostic> diagnostics_;
    std::map<std::string, Def> defs_;
    std::map<std::string, Pos> high_;
    std::vector<std::pair<std::string, Pos>> refs_;
    TermPtr system_;
    Pos system_pos_{1, 1};
};

}  // namespace

ParseResult parse_model(std::string_view source) {
    return Parser(source).run();
}

namespace {

void render(const Term& t, std::string& out);

void render_child(const TermPtr& t, std::string& out, bool needs_parens) {
    if (needs_parens) {
        out.push_back('(');
        render(*t, out);
        out.push_back(')');
    } else {
        render(*t, out);
    }
}

void render_set(const std::vector<std::string>& set, std::string& out) {
    bool first = true;
    for (const auto& a : set) {
        if (!first) out += ", ";
        out += a;
        first = false;
    }
}

bool is_model_operator(const Term& t) {
    return t.kind() == TermKind::Cooperation || t.kind() == TermKind::Hiding;
}

void render(const Term& t, std::string& out) {
    switch (t.kind()) {
        case TermKind::Constant:
            out += t.name();
            return;
        case TermKind::Prefix: {
            out.push_back('(');
            out += t.activity().action;
            out += ", ";
            out += to_string(t.activity().rate);
            out += ").";
            const Term& cont = *t.continuation();
            render_child(t.continuation(), out,
                         is_model_operator(cont) || cont.kind() == TermKind::Choice);
            return;
        }
        case TermKind::Choice: {
            render_child(t.left(), out, is_model_operator(*t.left()));
            out += " + ";
            const Term& r = *t.right();
            render_child(t.right(), out,
                         is_model_operator(r) || r.kind() == TermKind::Choice);
            return;
        }
        case TermKind::Hiding: {
            render_child(t.inner(), out, t.inner()->kind() == TermKind::Cooperation);
            out += " / {";
            render_set(t.action_set(), out);
            out.push_back('}');
            return;
        }
        case TermKind::Cooperation: {
            render_child(t.left(), out, false);
            out += " <";
            render_set(t.action_set(), out);
            out += "> ";
            render_child(t.right(), out,
                         t.right()->kind() == TermKind::Cooperation);
            return;
        }
    }
}

}  // namespace

std::string render_term(const Term& t) {
    std::string out;
    render(t, out);
    return out;
}

std::string render_term(const TermPtr& t) {
    return render_term(*t);
}

std::string render_model(const ModelEnv& env) {
    std::string out;
    if (!env.high.empty()) {
        out += "high = {";
        bool first = true;
        for (const auto& a : env.high) {
            if (!first) out += ", ";
            out += a;
            first = false;
        }
        out += "};\n";
    }
    for (const auto& [name, term] : env.defs) {
        out += name;
        out += " := ";
        out += render_term(term);
        out += ";\n";
    }
    out += "system ";
    out += render_term(env.system);
    out += ";\n";
    return out;
}

std::vector<ParseDiagnostic> high_usage_warnings(const ModelEnv& env) {
    std::vector<ParseDiagnostic> out;
    std::set<std::string> occurring, in_coop_sets;
    std::function<void(const TermPtr&)> walk = [&](const TermPtr& t) {
        if (!t) return;
        switch (t->kind()) {
            case TermKind::Constant: return;
            case TermKind::Prefix:
                occurring.insert(t->activity().action);
                walk(t->continuation());
                return;
            case TermKind::Choice:
                walk(t->left());
                walk(t->right());
                return;
            case TermKind::Cooperation:
                for (const auto& a : t->action_set()) {
                    occurring.insert(a);
                    in_coop_sets.insert(a);
                }
                walk(t->left());
                walk(t->right());
                return;
            case TermKind::Hiding:
                for (const auto& a : t->action_set()) occurring.insert(a);
                walk(t->inner());
                return;
        }
    };
    for (const auto& [name, term] : env.defs) walk(term);
    walk(env.system);
    for (const auto& h : env.high) {
        if (!occurring.count(h))
            out.push_back({1, 1, ParseDiagnostic::Severity::Warning,
                           "high action '" + h + "' never occurs in the model"});
        else if (in_coop_sets.count(h))
            out.push_back({1, 1, ParseDiagnostic::Severity::Warning,
                           "high action '" + h +
                               "' appears in a cooperation set; security verdicts "
                               "assume high actions synchronize only with the "
                               "environment"});
    }
    return out;
}

}  // namespace pepa
