#ifndef KOSZUL_TEXT_HPP
#define KOSZUL_TEXT_HPP

// Text form of polynomials.
//
//   poly     := [sign] term (sign term)*
//   term     := factor ('*' factor)*
//   factor   := number ['i'] | 'i' | '(' gaussian ')' | var ['^' digits]
//   gaussian := [sign] number ['i'] (sign number ['i'])*   |  [sign] 'i' ...
//   number   := digits ['/' digits] | digits '.' digits
//   var      := 'z' digits | 'zb' digits        (1-based; zb is conj(z), psi only)
//
// Whitespace is ignored except inside numbers. Examples:
//   "z1^2*z2 - 3/2 i * z3",  "(1/2+1/3 i)*z1",  "1/4*z1*zb1 + 1/4*z2*zb2".

#include "koszul/gaussian_rational.hpp"
#include "koszul/polynomial.hpp"

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace koszul::text {

class ParseError : public std::invalid_argument {
public:
    ParseError(std::size_t column, const std::string& msg)
        : std::invalid_argument("column " + std::to_string(column) + ": " + msg), column_(column) {}
    std::size_t column() const { return column_; }

private:
    std::size_t column_;
};

struct ParsedTerm {
    std::map<unsigned, unsigned> hol;   // 0-based variable -> exponent
    std::map<unsigned, unsigned> anti;
    GaussianRational coeff{1};
};

struct Parsed {
    std::vector<ParsedTerm> terms;
    std::size_t max_var = 0;  // number of variables referenced (highest 1-based index)
    bool has_anti = false;
};

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    Parsed run() {
        Parsed out;
        skip();
        if (pos_ == s_.size()) throw error("empty polynomial");
        bool first = true;
        while (pos_ < s_.size()) {
            int sign = 1;
            if (peek() == '+' || peek() == '-') {
                sign = peek() == '-' ? -1 : 1;
                ++pos_;
                skip();
            } else if (!first) {
                throw error(std::string("expected '+' or '-', found '") + peek() + "'");
            }
            ParsedTerm t = term(out);
            if (sign < 0) t.coeff = -t.coeff;
            out.terms.push_back(std::move(t));
            first = false;
        }
        return out;
    }

private:
    ParseError error(const std::string& msg) const { return ParseError(pos_ + 1, msg); }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    std::string digits() {
        const std::size_t b = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (b == pos_) throw error("expected digits");
        return std::string(s_.substr(b, pos_ - b));
    }

    mpq_class number() {
        const std::string whole = digits();
        if (peek() == '/') {
            ++pos_;
            const std::size_t at = pos_;
            const std::string den = digits();
            if (mpz_class(den, 10) == 0) throw ParseError(at + 1, "zero denominator");
            mpq_class q{mpz_class(whole, 10), mpz_class(den, 10)};
            q.canonicalize();
            return q;
        }
        if (peek() == '.') {
            ++pos_;
            const std::string frac = digits();
            mpz_class den;
            mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
            mpq_class q{mpz_class(whole + frac, 10), den};
            q.canonicalize();
            return q;
        }
        return mpq_class(mpz_class(whole, 10));
    }

    // number ['i'] or 'i'
    GaussianRational scalar() {
        if (peek() == 'i') {
            ++pos_;
            skip();
            return kImaginaryUnit;
        }
        const mpq_class v = number();
        skip();
        if (peek() == 'i') {
            ++pos_;
            skip();
            return {0, v};
        }
        return {v, 0};
    }

    GaussianRational gaussian() {
        GaussianRational acc;
        bool first = true;
        while (true) {
            skip();
            if (peek() == ')') {
                if (first) throw error("empty parentheses");
                return acc;
            }
            int sign = 1;
            if (peek() == '+' || peek() == '-') {
                sign = peek() == '-' ? -1 : 1;
                ++pos_;
                skip();
            } else if (!first) {
                throw error("expected '+', '-' or ')'");
            }
            if (!(std::isdigit(static_cast<unsigned char>(peek())) || peek() == 'i'))
                throw error("expected a number inside parentheses");
            const GaussianRational v = scalar();
            acc += sign < 0 ? -v : v;
            first = false;
        }
    }

    void factor(ParsedTerm& t, Parsed& out) {
        skip();
        const char c = peek();
        if (c == '(') {
            ++pos_;
            t.coeff *= gaussian();
            ++pos_;  // ')'
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == 'i') {
            t.coeff *= scalar();
        } else if (c == 'z') {
            ++pos_;
            bool anti = false;
            if (peek() == 'b') {
                anti = true;
                ++pos_;
            }
            if (!std::isdigit(static_cast<unsigned char>(peek()))) throw error("expected a variable index after 'z'");
            const std::size_t at = pos_;
            const unsigned long idx = std::stoul(digits());
            if (idx == 0) throw ParseError(at + 1, "variable indices start at 1");
            skip();
            unsigned e = 1;
            if (peek() == '^') {
                ++pos_;
                skip();
                e = static_cast<unsigned>(std::stoul(digits()));
            }
            (anti ? t.anti : t.hol)[static_cast<unsigned>(idx - 1)] += e;
            out.max_var = std::max<std::size_t>(out.max_var, idx);
            out.has_anti = out.has_anti || anti;
        } else if (c == '\0') {
            throw error("unexpected end of input");
        } else {
            throw error(std::string("unexpected character '") + c + "'");
        }
        skip();
    }

    ParsedTerm term(Parsed& out) {
        ParsedTerm t;
        factor(t, out);
        while (peek() == '*') {
            ++pos_;
            factor(t, out);
        }
        return t;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

inline Monomial expand(const std::map<unsigned, unsigned>& m, std::size_t n) {
    Monomial e(n, 0);
    for (const auto& [v, k] : m) e[v] = k;
    return e;
}

}  // namespace detail

inline Parsed parse(std::string_view s) { return detail::Parser(s).run(); }

/// Holomorphic polynomial in n variables (n = 0: the highest referenced index).
inline Polynomial parse_polynomial(std::string_view s, std::size_t n = 0) {
    const Parsed p = parse(s);
    if (p.has_anti) throw std::invalid_argument("holomorphic polynomial may not use zb variables");
    if (n == 0) n = std::max<std::size_t>(p.max_var, 1);
    if (p.max_var > n)
        throw std::invalid_argument("polynomial references z" + std::to_string(p.max_var) + " but n = " + std::to_string(n));
    Polynomial out(n);
    for (const auto& t : p.terms) out.add_term(detail::expand(t.hol, n), t.coeff);
    return out;
}

inline HermitianPolynomial parse_hermitian(std::string_view s, std::size_t n) {
    const Parsed p = parse(s);
    if (p.max_var > n)
        throw std::invalid_argument("psi references z" + std::to_string(p.max_var) + " but n = " + std::to_string(n));
    HermitianPolynomial out(n);
    for (const auto& t : p.terms) out.add_term(detail::expand(t.hol, n), detail::expand(t.anti, n), t.coeff);
    return out;
}

inline std::string coefficient_text(const GaussianRational& c) {
    if (c.im() == 0) return c.re_string();
    if (c.re() == 0) return c.im_string() + " i";
    std::string im = c.im_string();
    if (im.front() != '-') im = "+" + im;
    return "(" + c.re_string() + im + " i)";
}

/// Inverse of parse_polynomial, in the same grammar.
inline std::string to_text(const Polynomial& q) {
    if (q.is_zero()) return "0";
    std::string out;
    for (const auto& [m, c] : q.terms()) {
        std::string t = coefficient_text(c);
        if (!out.empty()) {
            if (t.front() == '-')
                t = " - " + t.substr(1);
            else
                t = " + " + t;
        }
        out += t;
        for (std::size_t v = 0; v < m.size(); ++v) {
            if (m[v] == 0) continue;
            out += "*z" + std::to_string(v + 1);
            if (m[v] > 1) out += "^" + std::to_string(m[v]);
        }
    }
    return out;
}

}  // namespace koszul::text

#endif  // KOSZUL_TEXT_HPP
