#pragma once

/*
 * Line-oriented config files describing a quantization setup plus optional
 * spectral and winding problems. Sections in any order:
 *
 *   [chart]       dim = 2n
 *   [omega]       darboux            (default)      or entries  i,j = <const>
 *   [christoffel] l,j,k = <poly>     raised symbols, 1-based, jk-mirrored
 *   [Omega]       k: i,j = <poly>    normalizing 2-form at lambda^k
 *   [ordering]    weyl | standard
 *   [s]           <weyl monomials>   one per line, factors x<k>, xi<k>, lambda
 *   [lagrangian]  p-axes = a,b,...   1-based marked axes; h1_trivial = true
 *   [truncation]  lambda_order = N   and optional degree_cap = D
 *   [bs]          action, maslov, kappa, lambda, window, c_mu
 *   [maslov]      frame = circle | constant, turns, size
 *
 * '#' starts a comment. Syntax problems raise ConfigError with the 1-based
 * line number; semantic problems raise ValidationError naming the offending
 * index triple or lambda power.
 */

#include "starprod/bohr_sommerfeld.hpp"
#include "starprod/fedosov.hpp"
#include "starprod/poly_io.hpp"
#include "starprod/symplectic.hpp"

#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace starprod {

struct ConfigError : std::runtime_error {
    int line;
    ConfigError(int at, const std::string& msg)
        : std::runtime_error("line " + std::to_string(at) + ": " + msg), line(at) {}
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct BSConfig {
    bool present = false;
    BSProblem problem;
    bool has_window = false;
    BigRational window_lo, window_hi;
    std::string action_text;
};

struct MaslovConfig {
    bool present = false;
    std::string frame = "circle";
    long turns = 1;
    int size = 1;
};

struct RunConfig {
    bool has_chart = false;
    FedosovProblem problem;
    bool omega_explicit = false;
    bool has_lagrangian = false;
    LagrangianSplit split;
    bool h1_trivial = true;
    std::vector<std::string> section_lines;
    BSConfig bs;
    MaslovConfig maslov;
};

namespace detail {

inline std::string cfg_trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct CfgLine {
    int no;
    std::string text;
};

inline long cfg_long(const std::string& s, int line, const std::string& what) {
    std::string t = cfg_trim(s);
    if (t.empty()) throw ConfigError(line, "expected " + what);
    size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(t, &pos);
    } catch (const std::exception&) {
        throw ConfigError(line, "expected " + what);
    }
    if (pos != t.size()) throw ConfigError(line, "trailing characters after " + what);
    return v;
}

inline BigRational cfg_signed_rational(PolyLexer& lx) {
    bool neg = lx.eat('-');
    if (!neg) lx.eat('+');
    BigRational r = lx.rational();
    return neg ? -r : r;
}

// Constant Gaussian-rational expression such as "3/2", "-i", "1/2 + 1/3*i".
inline GaussRational cfg_const(const std::string& s, int line) {
    GaussRational out;
    try {
        for (const auto& t : parse_terms(s)) {
            if (!t.vars.empty())
                throw ConfigError(line, "expected a constant, found '" + t.vars[0].name + "'");
            out += t.coeff;
        }
    } catch (const ParseError& e) {
        throw ConfigError(line, e.what());
    }
    return out;
}

inline BigRational cfg_rational(const std::string& s, int line, const std::string& what) {
    GaussRational c = cfg_const(s, line);
    if (!c.im().is_zero()) throw ConfigError(line, what + " must be real");
    return c.re();
}

// "a,b,..." of 1-based integers.
inline std::vector<int> cfg_index_list(const std::string& s, int line) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string piece;
    while (std::getline(ss, piece, ','))
        out.push_back(static_cast<int>(cfg_long(piece, line, "index")));
    if (out.empty()) throw ConfigError(line, "expected index list");
    return out;
}

inline std::pair<std::string, std::string> cfg_key_value(const CfgLine& ln) {
    size_t eq = ln.text.find('=');
    if (eq == std::string::npos) throw ConfigError(ln.no, "expected key = value");
    return {cfg_trim(ln.text.substr(0, eq)), cfg_trim(ln.text.substr(eq + 1))};
}

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
    using detail::CfgLine;
    using detail::cfg_trim;

    std::map<std::string, std::vector<CfgLine>> sections;
    {
        std::stringstream ss(text);
        std::string raw;
        int no = 0;
        std::string current;
        while (std::getline(ss, raw)) {
            ++no;
            size_t hash = raw.find('#');
            if (hash != std::string::npos) raw = raw.substr(0, hash);
            std::string line = cfg_trim(raw);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') throw ConfigError(no, "unterminated section header");
                current = cfg_trim(line.substr(1, line.size() - 2));
                static const char* known[] = {"chart",      "omega",      "christoffel", "Omega",
                                              "ordering",   "s",          "lagrangian",  "truncation",
                                              "bs",         "maslov"};
                bool ok = false;
                for (const char* k : known) ok = ok || current == k;
                if (!ok) throw ConfigError(no, "unknown section [" + current + "]");
                sections.try_emplace(current);
                continue;
            }
            if (current.empty()) throw ConfigError(no, "content before any section header");
            sections[current].push_back({no, line});
        }
    }

    RunConfig cfg;

    // chart dimension first; every polynomial needs it
    int dim = 0;
    if (auto it = sections.find("chart"); it != sections.end()) {
        for (const auto& ln : it->second) {
            auto [key, val] = detail::cfg_key_value(ln);
            if (key != "dim") throw ConfigError(ln.no, "unknown chart key '" + key + "'");
            long d = detail::cfg_long(val, ln.no, "dimension");
            if (d <= 0 || d % 2 != 0 || d > kMaxVars)
                throw ValidationError("chart dimension must be even, positive and at most " +
                                      std::to_string(kMaxVars));
            dim = static_cast<int>(d);
        }
        if (dim == 0) throw ValidationError("chart section must set dim");
        cfg.has_chart = true;
    }

    auto need_chart = [&](const CfgLine& ln) {
        if (!cfg.has_chart)
            throw ConfigError(ln.no, "section requires a [chart] declaration");
    };

    // truncation before the heavy sections so the section budget is known
    unsigned lambda_order = 3, degree_cap = 0;
    if (auto it = sections.find("truncation"); it != sections.end()) {
        for (const auto& ln : it->second) {
            auto [key, val] = detail::cfg_key_value(ln);
            long v = detail::cfg_long(val, ln.no, "order");
            if (v < 0) throw ValidationError("truncation orders must be nonnegative");
            if (key == "lambda_order")
                lambda_order = static_cast<unsigned>(v);
            else if (key == "degree_cap")
                degree_cap = static_cast<unsigned>(v);
            else
                throw ConfigError(ln.no, "unknown truncation key '" + key + "'");
        }
    }

    // symplectic form
    SymplecticChart chart;
    if (cfg.has_chart) {
        bool darboux = true;
        std::map<std::pair<int, int>, GaussRational> entries;
        if (auto it = sections.find("omega"); it != sections.end()) {
            for (const auto& ln : it->second) {
                need_chart(ln);
                if (ln.text == "darboux") continue;
                darboux = false;
                auto [key, val] = detail::cfg_key_value(ln);
                auto idx = detail::cfg_index_list(key, ln.no);
                if (idx.size() != 2) throw ConfigError(ln.no, "omega entries use i,j = value");
                int i = idx[0] - 1, j = idx[1] - 1;
                if (i < 0 || j < 0 || i >= dim || j >= dim)
                    throw ValidationError("omega index out of range at (" +
                                          std::to_string(idx[0]) + "," + std::to_string(idx[1]) +
                                          ")");
                if (i == j)
                    throw ValidationError("omega diagonal entry must vanish at (" +
                                          std::to_string(idx[0]) + "," + std::to_string(idx[1]) +
                                          ")");
                GaussRational c = detail::cfg_const(val, ln.no);
                auto put = [&](int a, int b, const GaussRational& v) {
                    auto [slot, fresh] = entries.try_emplace({a, b}, v);
                    if (!fresh && slot->second != v)
                        throw ValidationError("conflicting omega entries at (" +
                                              std::to_string(a + 1) + "," + std::to_string(b + 1) +
                                              ")");
                };
                put(i, j, c);
                put(j, i, -c);
            }
        }
        if (darboux) {
            chart = SymplecticChart::darboux(dim);
        } else {
            Mat form = zero_mat(dim);
            for (const auto& [ij, c] : entries)
                form[static_cast<size_t>(ij.first)][static_cast<size_t>(ij.second)] = c;
            try {
                chart = SymplecticChart::from_form(form);
            } catch (const std::invalid_argument& e) {
                throw ValidationError(std::string("omega: ") + e.what());
            }
        }
    }

    // lagrangian marker
    if (auto it = sections.find("lagrangian"); it != sections.end()) {
        for (const auto& ln : it->second) {
            need_chart(ln);
            auto [key, val] = detail::cfg_key_value(ln);
            if (key == "p-axes") {
                for (int a : detail::cfg_index_list(val, ln.no)) {
                    if (a < 1 || a > dim)
                        throw ValidationError("marked axis " + std::to_string(a) +
                                              " out of range");
                    cfg.split.p_axes.insert(a - 1);
                }
                cfg.has_lagrangian = true;
            } else if (key == "h1_trivial") {
                if (val == "true")
                    cfg.h1_trivial = true;
                else if (val == "false")
                    cfg.h1_trivial = false;
                else
                    throw ConfigError(ln.no, "h1_trivial must be true or false");
            } else {
                throw ConfigError(ln.no, "unknown lagrangian key '" + key + "'");
            }
        }
        if (cfg.has_lagrangian) {
            try {
                cfg.split.validate(chart);
            } catch (const std::invalid_argument& e) {
                throw ValidationError(std::string("lagrangian: ") + e.what());
            }
        }
    }

    // ordering
    OrderingSpec ordering;
    bool ordering_set = false;
    if (auto it = sections.find("ordering"); it != sections.end()) {
        for (const auto& ln : it->second) {
            need_chart(ln);
            if (ln.text == "weyl") {
                ordering = OrderingSpec::weyl(chart);
            } else if (ln.text == "standard") {
                if (!cfg.has_lagrangian)
                    throw ValidationError(
                        "standard ordering needs marked axes from a lagrangian section");
                ordering = OrderingSpec::standard(chart, cfg.split);
            } else {
                throw ConfigError(ln.no, "ordering must be weyl or standard");
            }
            ordering_set = true;
        }
    }
    if (cfg.has_chart && !ordering_set) ordering = OrderingSpec::weyl(chart);

    // connection, raised symbols
    Connection conn(dim);
    if (auto it = sections.find("christoffel"); it != sections.end()) {
        std::map<std::array<int, 3>, ChartPoly> given;
        for (const auto& ln : it->second) {
            need_chart(ln);
            auto [key, val] = detail::cfg_key_value(ln);
            auto idx = detail::cfg_index_list(key, ln.no);
            if (idx.size() != 3) throw ConfigError(ln.no, "christoffel entries use l,j,k = poly");
            for (int a : idx)
                if (a < 1 || a > dim)
                    throw ValidationError("christoffel index out of range at (" +
                                          std::to_string(idx[0]) + "," + std::to_string(idx[1]) +
                                          "," + std::to_string(idx[2]) + ")");
            ChartPoly g(dim);
            try {
                g = parse_chart_poly(val, dim);
            } catch (const ParseError& e) {
                throw ConfigError(ln.no, e.what());
            }
            auto [slot, fresh] = given.try_emplace({idx[0] - 1, idx[1] - 1, idx[2] - 1}, g);
            if (!fresh && slot->second != g)
                throw ValidationError("conflicting christoffel entries at (" +
                                      std::to_string(idx[0]) + "," + std::to_string(idx[1]) + "," +
                                      std::to_string(idx[2]) + ")");
        }
        for (const auto& [idx, g] : given) {
            auto mirror = given.find({idx[0], idx[2], idx[1]});
            if (mirror != given.end() && mirror->second != g)
                throw ValidationError("connection has torsion at (" + std::to_string(idx[0] + 1) +
                                      "," + std::to_string(idx[1] + 1) + "," +
                                      std::to_string(idx[2] + 1) + ")");
        }
        for (const auto& [idx, g] : given) conn.set_symmetric(idx[0], idx[1], idx[2], g);
        for (int i = 0; i < dim; ++i)
            for (int j = i + 1; j < dim; ++j)
                for (int k = 0; k < dim; ++k)
                    if (conn.lowered(chart, i, j, k) != conn.lowered(chart, j, i, k))
                        throw ValidationError(
                            "lowered christoffel symbol is not totally symmetric at (" +
                            std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                            std::to_string(k + 1) + ")");
    }

    // normalizing 2-forms per lambda power
    std::map<unsigned, ScalarForm> omega_series;
    if (auto it = sections.find("Omega"); it != sections.end()) {
        std::map<std::array<int, 3>, bool> seen;
        for (const auto& ln : it->second) {
            need_chart(ln);
            size_t colon = ln.text.find(':');
            if (colon == std::string::npos)
                throw ConfigError(ln.no, "Omega entries use k: i,j = poly");
            long k = detail::cfg_long(ln.text.substr(0, colon), ln.no, "lambda power");
            if (k < 1) throw ValidationError("normalizing power must be at least one");
            CfgLine rest{ln.no, cfg_trim(ln.text.substr(colon + 1))};
            auto [key, val] = detail::cfg_key_value(rest);
            auto idx = detail::cfg_index_list(key, ln.no);
            if (idx.size() != 2) throw ConfigError(ln.no, "Omega entries use k: i,j = poly");
            int i = idx[0] - 1, j = idx[1] - 1;
            if (i < 0 || j < 0 || i >= dim || j >= dim || i == j)
                throw ValidationError("Omega index pair invalid at lambda power " +
                                      std::to_string(k));
            ChartPoly g(dim);
            try {
                g = parse_chart_poly(val, dim);
            } catch (const ParseError& e) {
                throw ConfigError(ln.no, e.what());
            }
            std::array<int, 3> canon{static_cast<int>(k), std::min(i, j), std::max(i, j)};
            if (!seen.insert({canon, true}).second)
                throw ValidationError("duplicate Omega entry at lambda power " +
                                      std::to_string(k));
            auto [slot, fresh] =
                omega_series.try_emplace(static_cast<unsigned>(k), ScalarForm(dim, 2));
            slot->second.add_signed({i, j}, g);
        }
        for (const auto& [k, F] : omega_series)
            if (!F.exterior_d().is_zero())
                throw ValidationError("normalizing 2-form at lambda power " + std::to_string(k) +
                                      " is not closed");
    }

    // normalization section
    WeylElem<ChartPoly> s(dim, 2 * lambda_order + 2 + 2);
    if (degree_cap) s = WeylElem<ChartPoly>(dim, degree_cap + 2);
    if (auto it = sections.find("s"); it != sections.end()) {
        for (const auto& ln : it->second) {
            need_chart(ln);
            cfg.section_lines.push_back(ln.text);
            std::vector<ParsedTerm> terms;
            try {
                terms = parse_terms(ln.text);
            } catch (const ParseError& e) {
                throw ConfigError(ln.no, e.what());
            }
            for (const auto& t : terms) {
                MultiIndex xi, xm;
                unsigned lam = 0;
                for (const auto& f : t.vars) {
                    if (f.name == "x" && f.index >= 1 && f.index <= dim)
                        xm.bump(f.index - 1, static_cast<int>(f.exp));
                    else if (f.name == "xi" && f.index >= 1 && f.index <= dim)
                        xi.bump(f.index - 1, static_cast<int>(f.exp));
                    else if (f.name == "lambda" && f.index == 0)
                        lam += f.exp;
                    else
                        throw ConfigError(ln.no, "unknown factor '" + f.name +
                                                     (f.index ? std::to_string(f.index) : "") +
                                                     "' in section monomial");
                }
                WeylKey key{xi, lam};
                if (xi.degree() == 0)
                    throw ValidationError(
                        "normalization section must have vanishing symbol part");
                if (key.total() < 3)
                    throw ValidationError(
                        "normalization section must start at total degree three");
                ChartPoly c(dim);
                c.add_term(xm, t.coeff);
                s.add_term(key, c);
            }
        }
    }

    if (cfg.has_chart) {
        cfg.problem.chart = chart;
        cfg.problem.ordering = ordering;
        cfg.problem.connection = conn;
        cfg.problem.omega = std::move(omega_series);
        cfg.problem.s = std::move(s);
        cfg.problem.lambda_order = lambda_order;
        cfg.problem.degree_cap = degree_cap;
        cfg.omega_explicit = !sections.count("omega") ? false
                                                      : [&] {
                                                            for (const auto& ln :
                                                                 sections["omega"])
                                                                if (ln.text != "darboux")
                                                                    return true;
                                                            return false;
                                                        }();
    } else {
        for (const char* sec : {"omega", "christoffel", "Omega", "ordering", "s", "lagrangian"})
            if (auto it = sections.find(sec); it != sections.end() && !it->second.empty())
                throw ConfigError(it->second.front().no,
                                  "section requires a [chart] declaration");
    }

    // spectral family
    if (auto it = sections.find("bs"); it != sections.end()) {
        cfg.bs.present = true;
        bool has_action = false, has_lambda = false;
        for (const auto& ln : it->second) {
            auto [key, val] = detail::cfg_key_value(ln);
            if (key == "action") {
                ActionExpr ex;
                try {
                    ex = parse_action_expr(val);
                } catch (const ParseError& e) {
                    throw ConfigError(ln.no, e.what());
                }
                for (const auto& [pideg, by_e] : ex.coeff) {
                    if (pideg != 1)
                        throw ValidationError(
                            "action must be a pi-multiple affine in the spectral parameter");
                    for (const auto& [edeg, c] : by_e) {
                        if (edeg > 1)
                            throw ValidationError(
                                "action must be a pi-multiple affine in the spectral parameter");
                        if (!c.im().is_zero())
                            throw ValidationError("action coefficients must be real");
                        if (edeg == 0)
                            cfg.bs.problem.action_base = c.re();
                        else
                            cfg.bs.problem.action_slope = c.re();
                    }
                }
                cfg.bs.action_text = val;
                has_action = true;
            } else if (key == "maslov") {
                cfg.bs.problem.maslov = detail::cfg_long(val, ln.no, "maslov index");
            } else if (key == "kappa") {
                cfg.bs.problem.kappa = detail::cfg_const(val, ln.no);
            } else if (key == "lambda") {
                cfg.bs.problem.lambda = detail::cfg_rational(val, ln.no, "lambda");
                has_lambda = true;
            } else if (key == "c_mu") {
                cfg.bs.problem.maslov_weight = detail::cfg_rational(val, ln.no, "c_mu");
            } else if (key == "window") {
                PolyLexer lx(val);
                try {
                    if (!lx.eat('[')) lx.fail("expected [");
                    cfg.bs.window_lo = detail::cfg_signed_rational(lx);
                    if (!lx.eat(',')) lx.fail("expected ,");
                    cfg.bs.window_hi = detail::cfg_signed_rational(lx);
                    if (!lx.eat(']')) lx.fail("expected ]");
                    if (!lx.done()) lx.fail("trailing characters after window");
                } catch (const ParseError& e) {
                    throw ConfigError(ln.no, e.what());
                }
                cfg.bs.has_window = true;
            } else {
                throw ConfigError(ln.no, "unknown bs key '" + key + "'");
            }
        }
        if (!has_action) throw ValidationError("bs section needs an action");
        if (!has_lambda) throw ValidationError("bs section needs a lambda value");
    }

    // winding problem
    if (auto it = sections.find("maslov"); it != sections.end()) {
        cfg.maslov.present = true;
        for (const auto& ln : it->second) {
            auto [key, val] = detail::cfg_key_value(ln);
            if (key == "frame") {
                if (val != "circle" && val != "constant")
                    throw ConfigError(ln.no, "frame must be circle or constant");
                cfg.maslov.frame = val;
            } else if (key == "turns") {
                cfg.maslov.turns = detail::cfg_long(val, ln.no, "turn count");
            } else if (key == "size") {
                long n = detail::cfg_long(val, ln.no, "frame size");
                if (n < 1) throw ValidationError("frame size must be positive");
                cfg.maslov.size = static_cast<int>(n);
            } else {
                throw ConfigError(ln.no, "unknown maslov key '" + key + "'");
            }
        }
    }

    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace starprod
