#include "causabs/query.hpp"

#include <algorithm>
#include <cctype>

#include "causabs/errors.hpp"

namespace causabs {

namespace {

class QueryParser {
public:
    explicit QueryParser(std::string_view s) : s_(s) {}

    CtfQuery parse() {
        CtfQuery q;
        skip();
        expect('P');
        skip();
        expect('(');
        skip();
        if (peek() == ')') {
            ++i_;
            finish();
            return q;
        }
        events(q.terms);
        skip();
        if (peek() == '|') {
            ++i_;
            events(q.given);
            skip();
        }
        expect(')');
        finish();
        return q;
    }

private:
    std::string_view s_;
    std::size_t i_ = 0;

    char peek() const { return i_ < s_.size() ? s_[i_] : '\0'; }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    void expect(char c) {
        if (peek() != c) throw ParseError(std::string("expected '") + c + "'", i_);
        ++i_;
    }
    void finish() {
        skip();
        if (i_ != s_.size()) throw ParseError("trailing input", i_);
    }

    std::string var() {
        skip();
        std::size_t b = i_;
        while (i_ < s_.size()) {
            char c = s_[i_];
            if (c == '=' || c == ',' || c == '|' || c == ')' || c == '(' || c == '{' || c == '}' ||
                std::isspace(static_cast<unsigned char>(c)))
                break;
            if (c == '_' && i_ + 1 < s_.size() && s_[i_ + 1] == '{') break;
            ++i_;
        }
        if (i_ == b) throw ParseError("expected variable name", b);
        return std::string(s_.substr(b, i_ - b));
    }

    std::string val() {
        skip();
        std::size_t b = i_;
        while (i_ < s_.size()) {
            char c = s_[i_];
            if (c == ',' || c == '|' || c == ')' || c == '(' || c == '{' || c == '}' || c == '=' ||
                std::isspace(static_cast<unsigned char>(c)))
                break;
            ++i_;
        }
        if (i_ == b) throw ParseError("expected value", b);
        return std::string(s_.substr(b, i_ - b));
    }

    void events(std::vector<Term>& out) {
        for (;;) {
            std::string y = var();
            std::vector<Setting> x;
            if (peek() == '_') {
                i_ += 2;  // "_{"
                for (;;) {
                    std::string xv = var();
                    skip();
                    expect('=');
                    std::string xval = val();
                    for (const auto& [n, _] : x)
                        if (n == xv) throw ParseError("variable " + xv + " intervened twice", i_);
                    x.emplace_back(xv, xval);
                    skip();
                    if (peek() == ',') {
                        ++i_;
                        continue;
                    }
                    expect('}');
                    break;
                }
            }
            skip();
            expect('=');
            std::string yval = val();
            for (const auto& [n, _] : x)
                if (n == y) throw ParseError("outcome " + y + " is also intervened", i_);
            add(out, y, yval, x);
            skip();
            if (peek() != ',') break;
            ++i_;
        }
    }

    static void add(std::vector<Term>& out, const std::string& y, const std::string& v,
                    const std::vector<Setting>& x) {
        for (auto& t : out) {
            if (same_intervention(t.intervention, x)) {
                t.outcome.emplace_back(y, v);
                return;
            }
        }
        out.push_back(Term{{{y, v}}, x});
    }
};

void print_events(std::string& s, const std::vector<Term>& terms) {
    bool first = true;
    for (const auto& t : terms) {
        for (const auto& [y, v] : t.outcome) {
            if (!first) s += ", ";
            first = false;
            s += y;
            if (!t.intervention.empty()) {
                s += "_{";
                for (std::size_t i = 0; i < t.intervention.size(); ++i) {
                    if (i) s += ",";
                    s += t.intervention[i].first + "=" + t.intervention[i].second;
                }
                s += "}";
            }
            s += "=" + v;
        }
    }
}

} // namespace

bool same_intervention(const std::vector<Setting>& a, const std::vector<Setting>& b) {
    if (a.size() != b.size()) return false;
    auto sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    return sa == sb;
}

CtfQuery parse_query(std::string_view text) { return QueryParser(text).parse(); }

std::string print_query(const CtfQuery& q) {
    std::string s = "P(";
    print_events(s, q.terms);
    if (!q.given.empty()) {
        s += " | ";
        print_events(s, q.given);
    }
    s += ")";
    return s;
}

} // namespace causabs
