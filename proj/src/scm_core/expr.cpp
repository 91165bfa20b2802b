#include "causabs/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <functional>
#include <optional>

#include "causabs/errors.hpp"

namespace causabs {

namespace {

using Env = std::vector<long>;
using Fn = std::function<long(const Env&)>;

struct Token {
    enum Kind { Num, Ident, Op, End } kind;
    std::string text;
    long num = 0;
    std::size_t pos = 0;
};

std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        std::size_t b = i;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            out.push_back({Token::Num, s.substr(b, i - b), std::stol(s.substr(b, i - b)), b});
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' || s[i] == '.')) ++i;
            out.push_back({Token::Ident, s.substr(b, i - b), 0, b});
            continue;
        }
        static const char* two[] = {"||", "&&", "==", "!=", "<=", ">="};
        bool matched = false;
        for (const char* t : two) {
            if (s.compare(i, 2, t) == 0) {
                out.push_back({Token::Op, t, 0, b});
                i += 2;
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (std::string("|&^!<>+-*/%(),").find(c) != std::string::npos) {
            out.push_back({Token::Op, std::string(1, c), 0, b});
            ++i;
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "' in expression", i);
    }
    out.push_back({Token::End, "", 0, s.size()});
    return out;
}

class ExprParser {
public:
    ExprParser(const std::string& s, const std::vector<Variable>& inputs) : toks_(tokenize(s)), in_(inputs) {}

    Fn parse() {
        Fn f = parse_or();
        if (cur().kind != Token::End) throw ParseError("trailing tokens in expression", cur().pos);
        return f;
    }

private:
    std::vector<Token> toks_;
    const std::vector<Variable>& in_;
    std::size_t k_ = 0;

    const Token& cur() const { return toks_[k_]; }
    bool is(const char* op) const {
        return (cur().kind == Token::Op || cur().kind == Token::Ident) && cur().text == op;
    }
    bool accept(std::initializer_list<const char*> ops, std::string& which) {
        for (const char* o : ops)
            if (is(o)) {
                which = o;
                ++k_;
                return true;
            }
        return false;
    }
    void expect(const char* op) {
        if (!is(op)) throw ParseError(std::string("expected '") + op + "' in expression", cur().pos);
        ++k_;
    }

    Fn parse_or() {
        Fn l = parse_xor();
        std::string op;
        while (accept({"or", "||", "|"}, op)) {
            Fn r = parse_xor();
            l = [l, r](const Env& e) -> long { return (l(e) != 0 || r(e) != 0) ? 1 : 0; };
        }
        return l;
    }
    Fn parse_xor() {
        Fn l = parse_and();
        std::string op;
        while (accept({"xor", "^"}, op)) {
            Fn r = parse_and();
            l = [l, r](const Env& e) -> long { return ((l(e) != 0) != (r(e) != 0)) ? 1 : 0; };
        }
        return l;
    }
    Fn parse_and() {
        Fn l = parse_cmp();
        std::string op;
        while (accept({"and", "&&", "&"}, op)) {
            Fn r = parse_cmp();
            l = [l, r](const Env& e) -> long { return (l(e) != 0 && r(e) != 0) ? 1 : 0; };
        }
        return l;
    }
    Fn parse_cmp() {
        Fn l = parse_add();
        std::string op;
        while (accept({"==", "!=", "<=", ">=", "<", ">"}, op)) {
            Fn r = parse_add();
            if (op == "==") l = [l, r](const Env& e) -> long { return l(e) == r(e); };
            else if (op == "!=") l = [l, r](const Env& e) -> long { return l(e) != r(e); };
            else if (op == "<=") l = [l, r](const Env& e) -> long { return l(e) <= r(e); };
            else if (op == ">=") l = [l, r](const Env& e) -> long { return l(e) >= r(e); };
            else if (op == "<") l = [l, r](const Env& e) -> long { return l(e) < r(e); };
            else l = [l, r](const Env& e) -> long { return l(e) > r(e); };
        }
        return l;
    }
    Fn parse_add() {
        Fn l = parse_mul();
        std::string op;
        while (accept({"+", "-"}, op)) {
            Fn r = parse_mul();
            if (op == "+") l = [l, r](const Env& e) { return l(e) + r(e); };
            else l = [l, r](const Env& e) { return l(e) - r(e); };
        }
        return l;
    }
    Fn parse_mul() {
        Fn l = parse_unary();
        std::string op;
        while (accept({"*", "/", "%"}, op)) {
            Fn r = parse_unary();
            if (op == "*") {
                l = [l, r](const Env& e) { return l(e) * r(e); };
            } else {
                bool div = op == "/";
                l = [l, r, div](const Env& e) {
                    long d = r(e);
                    if (d == 0) throw ValidationError("division by zero in expression");
                    return div ? l(e) / d : l(e) % d;
                };
            }
        }
        return l;
    }
    Fn parse_unary() {
        std::string op;
        if (accept({"not", "!"}, op)) {
            Fn a = parse_unary();
            return [a](const Env& e) -> long { return a(e) == 0 ? 1 : 0; };
        }
        if (accept({"-"}, op)) {
            Fn a = parse_unary();
            return [a](const Env& e) { return -a(e); };
        }
        return parse_atom();
    }
    std::vector<Fn> args(std::size_t n, const std::string& name) {
        expect("(");
        std::vector<Fn> out;
        for (std::size_t i = 0; i < n; ++i) {
            if (i) expect(",");
            out.push_back(parse_or());
        }
        expect(")");
        (void)name;
        return out;
    }
    Fn parse_atom() {
        const Token t = cur();
        if (t.kind == Token::Num) {
            ++k_;
            long v = t.num;
            return [v](const Env&) { return v; };
        }
        if (t.kind == Token::Op && t.text == "(") {
            ++k_;
            Fn f = parse_or();
            expect(")");
            return f;
        }
        if (t.kind == Token::Ident) {
            ++k_;
            if (t.text == "true") return [](const Env&) { return 1L; };
            if (t.text == "false") return [](const Env&) { return 0L; };
            if (t.text == "ite") {
                auto a = args(3, t.text);
                return [a](const Env& e) { return a[0](e) != 0 ? a[1](e) : a[2](e); };
            }
            if (t.text == "ind") {
                auto a = args(1, t.text);
                return [a](const Env& e) -> long { return a[0](e) != 0 ? 1 : 0; };
            }
            if (t.text == "min" || t.text == "max") {
                auto a = args(2, t.text);
                if (t.text == "min") return [a](const Env& e) { return std::min(a[0](e), a[1](e)); };
                return [a](const Env& e) { return std::max(a[0](e), a[1](e)); };
            }
            if (t.text == "abs") {
                auto a = args(1, t.text);
                return [a](const Env& e) { return std::labs(a[0](e)); };
            }
            for (std::size_t i = 0; i < in_.size(); ++i)
                if (in_[i].name == t.text) return [i](const Env& e) { return e[i]; };
            throw ParseError("unknown name '" + t.text + "' in expression", t.pos);
        }
        throw ParseError("unexpected token '" + t.text + "' in expression", t.pos);
    }
};

std::optional<long> as_integer(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (*end != '\0') return std::nullopt;
    return v;
}

} // namespace

std::vector<int> compile_expression(const std::string& expr, const std::vector<Variable>& inputs,
                                    const Domain& output) {
    Fn f = ExprParser(expr, inputs).parse();
    std::vector<int> radix;
    std::vector<std::vector<long>> num(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        radix.push_back(inputs[i].domain.size());
        for (int j = 0; j < inputs[i].domain.size(); ++j) {
            auto v = as_integer(inputs[i].domain.values[j]);
            num[i].push_back(v ? *v : j);
        }
    }
    std::vector<int> table;
    std::vector<int> d(inputs.size(), 0);
    Env env(inputs.size());
    do {
        for (std::size_t i = 0; i < d.size(); ++i) env[i] = num[i][d[i]];
        long r = f(env);
        int ix = output.find(std::to_string(r));
        if (ix < 0) throw ValidationError("expression '" + expr + "' yields " + std::to_string(r) +
                                          ", which is not in the output domain");
        table.push_back(ix);
    } while (next_digits(d, radix));
    return table;
}

} // namespace causabs
