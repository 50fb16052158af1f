#ifndef FOURFOLD_SCRIPT_HPP
#define FOURFOLD_SCRIPT_HPP

#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"

namespace fourfold::script {

// Construction-script statements. Grammar (see README for the EBNF):
//   let <id> = E(2) | E(4) | S2xS2 | CP2 | CP2bar | S4
//            | logt(<id>, nucleus=<n>, p=<n>) | csum(<id>, <id>)
//            | fsum(<id>, <id>, <n>, <n>) | Z(p=<n>, r=<n>, s=<n>)
//   fam <id> = base(q=<n>) on <id> | suspend(<id>) | commstep(<id>)
//            | compose(<id>, <id>)
//   eval <id> ell=<lo>..<hi>
//   certify <id>, <id>, ...
//   check <id> | rewrite <id> | export <id> <path>

struct SourceSpan {
    int line = 0;
    int col = 0;
};

struct ParseError : EngineError {
    ParseError(const SourceSpan& where, const std::string& what)
        : EngineError(ErrorCode::ParseError,
                      "line " + std::to_string(where.line) + ", col " + std::to_string(where.col) +
                          ": " + what),
          span(where)
    {
    }
    SourceSpan span;
};

struct ModelExpr {
    enum class Kind { elliptic, standard, logt, csum, fsum, zbuild };
    Kind kind = Kind::standard;
    int n = 0;                // elliptic
    std::string piece;        // standard
    std::string arg0, arg1;   // referenced names
    long long nucleus = 0, multiplicity = 0;
    long long nucleus_left = 0, nucleus_right = 0;
    long long zp = 0, zr = 0, zs = 0;
};

struct FamExpr {
    enum class Kind { base, suspend, commstep, compose };
    Kind kind = Kind::base;
    long long q = 0;
    std::string on;         // base host
    std::string arg0, arg1; // referenced families
};

struct Statement {
    enum class Kind { let_model, let_family, eval, certify, check, rewrite, export_ };
    Kind kind = Kind::let_model;
    SourceSpan span;
    std::string name; // binding name or command subject
    ModelExpr model;
    FamExpr family;
    long long ell_lo = 0, ell_hi = 0;
    std::vector<std::string> ids; // certify list
    std::string path;             // export target
};

struct Script {
    std::vector<Statement> statements;
};

// ---------------------------------------------------------------------------
// Tokenizer.
// ---------------------------------------------------------------------------

namespace detail {

struct Token {
    enum class Kind { ident, integer, punct, eol, eof };
    Kind kind = Kind::eof;
    std::string text;
    long long value = 0;
    SourceSpan span;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next()
    {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') { // comment to end of line
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
                continue;
            }
            break;
        }
        Token t;
        t.span = {line_, col_};
        if (pos_ >= src_.size()) {
            t.kind = Token::Kind::eof;
            return t;
        }
        char c = src_[pos_];
        if (c == '\n') {
            advance();
            t.kind = Token::Kind::eol;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                t.text += src_[pos_];
                advance();
            }
            t.kind = Token::Kind::ident;
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && pos_ + 1 < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            std::string num;
            if (c == '-') {
                num += c;
                advance();
            }
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                num += src_[pos_];
                advance();
            }
            t.kind = Token::Kind::integer;
            t.text = num;
            try {
                t.value = std::stoll(num);
            } catch (const std::exception&) {
                throw ParseError(t.span, "integer literal out of range");
            }
            return t;
        }
        if (c == '.' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '.') {
            advance();
            advance();
            t.kind = Token::Kind::punct;
            t.text = "..";
            return t;
        }
        if (c == '(' || c == ')' || c == ',' || c == '=') {
            advance();
            t.kind = Token::Kind::punct;
            t.text = std::string(1, c);
            return t;
        }
        throw ParseError(t.span, std::string("unexpected character '") + c + "'");
    }

    /// Rest of the current line, trimmed; used for file paths.
    std::string rest_of_line()
    {
        std::string out;
        while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '#') {
            out += src_[pos_];
            advance();
        }
        size_t b = out.find_first_not_of(" \t\r");
        size_t e = out.find_last_not_of(" \t\r");
        if (b == std::string::npos) return "";
        return out.substr(b, e - b + 1);
    }

private:
    void advance()
    {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

} // namespace detail

// ---------------------------------------------------------------------------
// Parser.
// ---------------------------------------------------------------------------

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) { advance(); }

    Script parse()
    {
        Script out;
        while (cur_.kind != detail::Token::Kind::eof) {
            if (cur_.kind == detail::Token::Kind::eol) {
                advance();
                continue;
            }
            out.statements.push_back(statement());
            if (cur_.kind != detail::Token::Kind::eol && cur_.kind != detail::Token::Kind::eof)
                throw ParseError(cur_.span, "unexpected trailing input '" + cur_.text + "'");
        }
        return out;
    }

private:
    using Token = detail::Token;

    void advance() { cur_ = lex_.next(); }

    Token expect_ident()
    {
        if (cur_.kind != Token::Kind::ident) throw ParseError(cur_.span, "expected identifier");
        Token t = cur_;
        advance();
        return t;
    }

    long long expect_int()
    {
        if (cur_.kind != Token::Kind::integer) throw ParseError(cur_.span, "expected integer");
        long long v = cur_.value;
        advance();
        return v;
    }

    void expect_punct(const std::string& p)
    {
        if (cur_.kind != Token::Kind::punct || cur_.text != p)
            throw ParseError(cur_.span, "expected '" + p + "'");
        advance();
    }

    long long keyword_int(const std::string& key)
    {
        Token k = expect_ident();
        if (k.text != key) throw ParseError(k.span, "expected '" + key + "='");
        expect_punct("=");
        return expect_int();
    }

    std::string model_ref()
    {
        Token t = expect_ident();
        if (!models_.count(t.text))
            throw ParseError(t.span, "unknown model identifier '" + t.text + "'");
        return t.text;
    }

    std::string family_ref()
    {
        Token t = expect_ident();
        if (!families_.count(t.text))
            throw ParseError(t.span, "unknown family identifier '" + t.text + "'");
        return t.text;
    }

    void bind(const Token& name, bool family)
    {
        if (models_.count(name.text) || families_.count(name.text))
            throw ParseError(name.span, "name '" + name.text + "' is already bound");
        (family ? families_ : models_).insert(name.text);
    }

    Statement statement()
    {
        Token head = expect_ident();
        Statement st;
        st.span = head.span;
        if (head.text == "let") {
            st.kind = Statement::Kind::let_model;
            Token name = expect_ident();
            st.name = name.text;
            expect_punct("=");
            st.model = model_expr();
            bind(name, false);
        } else if (head.text == "fam") {
            st.kind = Statement::Kind::let_family;
            Token name = expect_ident();
            st.name = name.text;
            expect_punct("=");
            st.family = fam_expr();
            bind(name, true);
        } else if (head.text == "eval") {
            st.kind = Statement::Kind::eval;
            Token t = expect_ident();
            if (!models_.count(t.text) && !families_.count(t.text))
                throw ParseError(t.span, "unknown identifier '" + t.text + "'");
            st.name = t.text;
            Token k = expect_ident();
            if (k.text != "ell") throw ParseError(k.span, "expected 'ell=<lo>..<hi>'");
            expect_punct("=");
            st.ell_lo = expect_int();
            expect_punct("..");
            st.ell_hi = expect_int();
            if (st.ell_lo > st.ell_hi) throw ParseError(k.span, "empty ell range");
        } else if (head.text == "certify") {
            st.kind = Statement::Kind::certify;
            st.ids.push_back(family_ref());
            while (cur_.kind == Token::Kind::punct && cur_.text == ",") {
                advance();
                st.ids.push_back(family_ref());
            }
        } else if (head.text == "check") {
            st.kind = Statement::Kind::check;
            Token t = expect_ident();
            if (!models_.count(t.text) && !families_.count(t.text))
                throw ParseError(t.span, "unknown identifier '" + t.text + "'");
            st.name = t.text;
        } else if (head.text == "rewrite") {
            st.kind = Statement::Kind::rewrite;
            st.name = model_ref();
        } else if (head.text == "export") {
            st.kind = Statement::Kind::export_;
            Token t = expect_ident();
            if (!models_.count(t.text) && !families_.count(t.text))
                throw ParseError(t.span, "unknown identifier '" + t.text + "'");
            st.name = t.text;
            // the path runs to the end of the line; the current token is its head
            if (cur_.kind == Token::Kind::eol || cur_.kind == Token::Kind::eof)
                throw ParseError(cur_.span, "export needs a target path");
            st.path = cur_.text + lex_.rest_of_line();
            advance();
        } else {
            throw ParseError(head.span, "unknown statement '" + head.text + "'");
        }
        return st;
    }

    ModelExpr model_expr()
    {
        Token head = expect_ident();
        ModelExpr e;
        if (head.text == "E") {
            expect_punct("(");
            e.kind = ModelExpr::Kind::elliptic;
            e.n = static_cast<int>(expect_int());
            expect_punct(")");
        } else if (head.text == "S2xS2" || head.text == "CP2" || head.text == "CP2bar" ||
                   head.text == "S4") {
            e.kind = ModelExpr::Kind::standard;
            e.piece = head.text;
        } else if (head.text == "logt") {
            e.kind = ModelExpr::Kind::logt;
            expect_punct("(");
            e.arg0 = model_ref();
            expect_punct(",");
            e.nucleus = keyword_int("nucleus");
            expect_punct(",");
            e.multiplicity = keyword_int("p");
            expect_punct(")");
        } else if (head.text == "csum") {
            e.kind = ModelExpr::Kind::csum;
            expect_punct("(");
            e.arg0 = model_ref();
            expect_punct(",");
            e.arg1 = model_ref();
            expect_punct(")");
        } else if (head.text == "fsum") {
            e.kind = ModelExpr::Kind::fsum;
            expect_punct("(");
            e.arg0 = model_ref();
            expect_punct(",");
            e.arg1 = model_ref();
            expect_punct(",");
            e.nucleus_left = expect_int();
            expect_punct(",");
            e.nucleus_right = expect_int();
            expect_punct(")");
        } else if (head.text == "Z") {
            e.kind = ModelExpr::Kind::zbuild;
            expect_punct("(");
            e.zp = keyword_int("p");
            expect_punct(",");
            e.zr = keyword_int("r");
            expect_punct(",");
            e.zs = keyword_int("s");
            expect_punct(")");
        } else {
            throw ParseError(head.span, "unknown constructor '" + head.text + "'");
        }
        return e;
    }

    FamExpr fam_expr()
    {
        Token head = expect_ident();
        FamExpr e;
        if (head.text == "base") {
            e.kind = FamExpr::Kind::base;
            expect_punct("(");
            e.q = keyword_int("q");
            expect_punct(")");
            Token on = expect_ident();
            if (on.text != "on") throw ParseError(on.span, "expected 'on <model>'");
            e.on = model_ref();
        } else if (head.text == "suspend") {
            e.kind = FamExpr::Kind::suspend;
            expect_punct("(");
            e.arg0 = family_ref();
            expect_punct(")");
        } else if (head.text == "commstep") {
            e.kind = FamExpr::Kind::commstep;
            expect_punct("(");
            e.arg0 = family_ref();
            expect_punct(")");
        } else if (head.text == "compose") {
            e.kind = FamExpr::Kind::compose;
            expect_punct("(");
            e.arg0 = family_ref();
            expect_punct(",");
            e.arg1 = family_ref();
            expect_punct(")");
        } else {
            throw ParseError(head.span, "unknown family constructor '" + head.text + "'");
        }
        return e;
    }

    detail::Lexer lex_;
    detail::Token cur_;
    std::set<std::string> models_;
    std::set<std::string> families_;
};

inline Script parse(std::string_view source) { return Parser(source).parse(); }

} // namespace fourfold::script

#endif
