#pragma once

/*
 * Tokenizer and term-level parser for the polynomial literal grammar used by
 * config files and the CLI:
 *
 *   poly   := [sign] term ((+|-) term)*
 *   term   := factor (* factor)*
 *   factor := rational | i | (rational [+|- rational] i) | name[index][^uint]
 *
 * Whitespace-insensitive. Names are lowercase/uppercase letter runs with an
 * optional numeric suffix (x1, xi3, lambda, pi, t, E, cos, sin). Context
 * builders decide which names are legal and what they mean.
 */

#include "starprod/chart_poly.hpp"
#include "starprod/gauss_rational.hpp"

#include <cctype>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace starprod {

struct ParseError : std::runtime_error {
    size_t pos;
    ParseError(const std::string& msg, size_t at)
        : std::runtime_error(msg + " (at offset " + std::to_string(at) + ")"), pos(at) {}
};

struct ParsedFactor {
    std::string name;  // empty for scalar factors
    int index = 0;     // 1-based suffix, 0 if none
    unsigned exp = 1;
    GaussRational scalar;  // meaningful when name is empty
};

struct ParsedTerm {
    GaussRational coeff{1};
    std::vector<ParsedFactor> vars;  // named factors only, scalars folded into coeff
};

class PolyLexer {
public:
    explicit PolyLexer(const std::string& s) : s_(s) {}

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool done() {
        skip_ws();
        return pos_ >= s_.size();
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    size_t pos() const { return pos_; }

    // True when the next token is the bare imaginary unit (an 'i' not starting
    // a longer name), as in "1/2i".
    bool at_imag_unit() {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != 'i') return false;
        return pos_ + 1 >= s_.size() ||
               !std::isalpha(static_cast<unsigned char>(s_[pos_ + 1]));
    }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos_); }

    BigInt integer() {
        skip_ws();
        size_t start = pos_;
        std::string digits;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            digits += s_[pos_++];
        if (digits.empty()) throw ParseError("expected integer", start);
        return BigInt(digits);
    }

    BigRational rational() {
        BigInt num = integer();
        if (eat('/')) {
            BigInt den = integer();
            if (den.is_zero()) fail("zero denominator");
            return BigRational(num, den);
        }
        return BigRational(num);
    }

    std::optional<std::string> name() {
        skip_ws();
        if (pos_ >= s_.size() || !std::isalpha(static_cast<unsigned char>(s_[pos_])))
            return std::nullopt;
        std::string id;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_])))
            id += s_[pos_++];
        return id;
    }

    int index_suffix() {
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            size_t at = pos_;
            BigInt v = integer();
            if (v < 1 || v > kMaxVars) throw ParseError("variable index out of range", at);
            return static_cast<int>(v);
        }
        return 0;
    }

    unsigned exponent() {
        if (!eat('^')) return 1;
        size_t at = pos_;
        BigInt v = integer();
        if (v < 0 || v > 255) throw ParseError("exponent out of range", at);
        return static_cast<unsigned>(v);
    }

private:
    const std::string& s_;
    size_t pos_ = 0;
};

// Parenthesized Gaussian constant: (a), (a+b i), (a - b i), (a i).
inline GaussRational parse_paren_const(PolyLexer& lx) {
    BigRational re(0), im(0);
    bool neg = lx.eat('-');
    if (lx.peek() == 'i') {
        lx.eat('i');
        im = neg ? -1 : 1;
    } else {
        BigRational first = lx.rational();
        if (neg) first = -first;
        if (lx.peek() == 'i') {
            lx.eat('i');
            im = first;
        } else if (lx.eat('*')) {
            if (!lx.eat('i')) lx.fail("expected i");
            im = first;
        } else {
            re = first;
            if (lx.peek() == '+' || lx.peek() == '-') {
                bool neg2 = lx.peek() == '-';
                lx.eat(neg2 ? '-' : '+');
                if (lx.peek() == 'i') {
                    lx.eat('i');
                    im = neg2 ? -1 : 1;
                } else {
                    BigRational second = lx.rational();
                    lx.eat('*');
                    if (!lx.eat('i')) lx.fail("expected i");
                    im = neg2 ? -second : second;
                }
            }
        }
    }
    if (!lx.eat(')')) lx.fail("expected )");
    return GaussRational(re, im);
}

inline std::vector<ParsedTerm> parse_terms(const std::string& text) {
    PolyLexer lx(text);
    std::vector<ParsedTerm> terms;
    if (lx.done()) lx.fail("empty expression");
    bool first = true;
    while (!lx.done()) {
        GaussRational sign(1);
        if (lx.eat('-'))
            sign = GaussRational(-1);
        else if (lx.eat('+')) {
            if (first) lx.fail("unexpected +");
        } else if (!first) {
            lx.fail("expected + or - between terms");
        }
        first = false;

        ParsedTerm term;
        term.coeff = sign;
        bool expect_factor = true;
        while (expect_factor) {
            if (lx.eat('(')) {
                GaussRational c = parse_paren_const(lx);
                unsigned e = lx.exponent();
                term.coeff *= pow(c, e);
            } else if (std::isdigit(static_cast<unsigned char>(lx.peek()))) {
                BigRational r = lx.rational();
                if (lx.at_imag_unit()) {
                    lx.eat('i');
                    unsigned e = lx.exponent();
                    term.coeff *= GaussRational(r) * pow(GaussRational::i(), e);
                } else {
                    unsigned e = lx.exponent();
                    term.coeff *= pow(GaussRational(r), e);
                }
            } else if (auto id = lx.name()) {
                if (*id == "i") {
                    unsigned e = lx.exponent();
                    term.coeff *= pow(GaussRational::i(), e);
                } else {
                    ParsedFactor f;
                    f.name = *id;
                    f.index = lx.index_suffix();
                    f.exp = lx.exponent();
                    term.vars.push_back(f);
                }
            } else {
                lx.fail("expected factor");
            }
            expect_factor = lx.eat('*');
        }
        terms.push_back(std::move(term));
    }
    return terms;
}

// Chart polynomial: variables x1..xdim only.
inline ChartPoly parse_chart_poly(const std::string& text, int dim) {
    ChartPoly out(dim);
    for (const auto& t : parse_terms(text)) {
        MultiIndex m;
        for (const auto& f : t.vars) {
            if (f.name != "x") throw ParseError("unknown variable '" + f.name + "'", 0);
            if (f.index < 1 || f.index > dim)
                throw ParseError("variable index out of range for dimension", 0);
            m.bump(f.index - 1, static_cast<int>(f.exp));
        }
        out.add_term(m, t.coeff);
    }
    return out;
}

// Action expression in the spectral parameter: variables E and pi. Returned as
// coefficients c[j][p] of E^j * pi^p with j <= 1 enforced by the caller.
struct ActionExpr {
    // c[pi_power] as polynomials in E represented by (E-degree -> coeff)
    std::map<unsigned, std::map<unsigned, GaussRational>> coeff;
};

inline ActionExpr parse_action_expr(const std::string& text) {
    ActionExpr out;
    for (const auto& t : parse_terms(text)) {
        unsigned edeg = 0, pideg = 0;
        for (const auto& f : t.vars) {
            if (f.name == "E" && f.index == 0)
                edeg += f.exp;
            else if (f.name == "pi" && f.index == 0)
                pideg += f.exp;
            else
                throw ParseError("unknown variable '" + f.name + "' in action", 0);
        }
        auto& slot = out.coeff[pideg][edeg];
        slot += t.coeff;
        if (slot.is_zero()) {
            out.coeff[pideg].erase(edeg);
            if (out.coeff[pideg].empty()) out.coeff.erase(pideg);
        }
    }
    return out;
}

}  // namespace starprod
