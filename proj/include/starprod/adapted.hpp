#pragma once

/*
 * Lagrangian coordinate subspaces. When the product preserves the ideal of
 * functions vanishing on {marked = 0}, the quotient by that ideal carries a
 * left module action, realized here on polynomials of the unmarked variables.
 *
 * Four conditions on construction data guarantee preservation:
 *   i    the subspace is totally geodesic for the connection,
 *   ii   the normalizing 2-forms pull back to zero on it,
 *   iii  every monomial of the normalization section carries a marked fiber
 *        factor,
 *   iv   the pairing is the standard-ordered tensor for the split.
 * The report records each verdict with a witness on failure; the monomial scan
 * checks preservation directly and produces concrete counterexamples.
 */

#include "starprod/chart_poly.hpp"
#include "starprod/fedosov.hpp"
#include "starprod/ordering.hpp"
#include "starprod/symplectic.hpp"

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace starprod {

struct ConditionVerdict {
    bool pass = true;
    std::string witness;
};

struct AdaptednessReport {
    ConditionVerdict geodesic_subspace;   // i
    ConditionVerdict normalizing_forms;   // ii
    ConditionVerdict section_in_ideal;    // iii
    ConditionVerdict standard_pairing;    // iv

    bool all_pass() const {
        return geodesic_subspace.pass && normalizing_forms.pass && section_in_ideal.pass &&
               standard_pairing.pass;
    }
};

namespace detail {

inline std::string axis_name(int axis) { return "x" + std::to_string(axis + 1); }

inline std::string xi_monomial_str(const MultiIndex& m) {
    std::string out;
    for (int ax = 0; ax <= m.max_axis(); ++ax) {
        if (m[ax] == 0) continue;
        if (!out.empty()) out += "*";
        out += "xi" + std::to_string(ax + 1);
        if (m[ax] > 1) out += "^" + std::to_string(m[ax]);
    }
    return out.empty() ? "1" : out;
}

}  // namespace detail

inline AdaptednessReport check_adapted_data(const FedosovProblem& p, const LagrangianSplit& L) {
    L.validate(p.chart);
    AdaptednessReport rep;
    const std::set<int> marked = L.p_axes;

    for (int l : L.p_axes) {
        for (int j = 0; j < p.chart.dim && rep.geodesic_subspace.pass; ++j) {
            if (L.is_p(j)) continue;
            for (int k = 0; k < p.chart.dim; ++k) {
                if (L.is_p(k)) continue;
                ChartPoly g = p.connection.christoffel(l, j, k).restrict_zero(marked);
                if (!g.is_zero()) {
                    rep.geodesic_subspace.pass = false;
                    rep.geodesic_subspace.witness =
                        "christoffel[" + std::to_string(l + 1) + "," + std::to_string(j + 1) +
                        "," + std::to_string(k + 1) + "] restricts to " + g.str();
                    break;
                }
            }
        }
        if (!rep.geodesic_subspace.pass) break;
    }

    for (const auto& [k, F] : p.omega) {
        for (int i = 0; i < p.chart.dim && rep.normalizing_forms.pass; ++i) {
            if (L.is_p(i)) continue;
            for (int j = i + 1; j < p.chart.dim; ++j) {
                if (L.is_p(j)) continue;
                ChartPoly c = F.coeff_at({i, j}).restrict_zero(marked);
                if (!c.is_zero()) {
                    rep.normalizing_forms.pass = false;
                    rep.normalizing_forms.witness =
                        "form at power " + std::to_string(k) + ", component dx" +
                        std::to_string(i + 1) + "^dx" + std::to_string(j + 1) +
                        " restricts to " + c.str();
                    break;
                }
            }
        }
        if (!rep.normalizing_forms.pass) break;
    }

    for (const auto& [key, c] : p.s.terms()) {
        bool has_marked = false;
        for (int a : L.p_axes)
            if (key.xi[a] > 0) {
                has_marked = true;
                break;
            }
        if (!has_marked) {
            rep.section_in_ideal.pass = false;
            rep.section_in_ideal.witness =
                "section monomial " + detail::xi_monomial_str(key.xi) + " has no marked factor";
            break;
        }
    }

    if (!p.ordering.matches_standard_shape(p.chart, L)) {
        Mat expect = OrderingSpec::standard(p.chart, L).mu;
        rep.standard_pairing.pass = false;
        for (int a = 0; a < p.chart.dim && rep.standard_pairing.witness.empty(); ++a)
            for (int b = 0; b < p.chart.dim; ++b) {
                const GaussRational& have = p.ordering.mu[static_cast<size_t>(a)][static_cast<size_t>(b)];
                const GaussRational& want = expect[static_cast<size_t>(a)][static_cast<size_t>(b)];
                if (have != want) {
                    rep.standard_pairing.witness = "pairing entry (" + std::to_string(a + 1) +
                                                   "," + std::to_string(b + 1) + ") is " +
                                                   have.str() + ", standard split needs " +
                                                   want.str();
                    break;
                }
            }
    }
    return rep;
}

// First counterexample data from the monomial scan, when there is one.
struct IdealScanResult {
    bool pass = true;
    ChartPoly left;             // the multiplying symbol
    ChartPoly ideal_element;    // marked coordinate times cofactor
    unsigned lambda_level = 0;  // first order whose restriction survives
    ChartPoly leakage;          // that restriction
    std::string witness;
};

namespace detail {

inline void monomials_up_to(int dim, unsigned maxdeg, std::vector<MultiIndex>& out) {
    MultiIndex m;
    auto rec = [&](auto&& self, int axis, unsigned left) -> void {
        if (axis == dim) {
            out.push_back(m);
            return;
        }
        for (unsigned e = 0; e <= left; ++e) {
            if (e) m.bump(axis, 1);
            self(self, axis + 1, left - e);
        }
        m.bump(axis, -static_cast<int>(left));
    };
    rec(rec, 0, maxdeg);
}

}  // namespace detail

// Checks (f * g)|subspace = 0 mod lambda^{order+1} for every monomial f of
// degree <= max_degree and every g = marked coordinate times a monomial of
// degree <= max_degree - 1, reading the product off its level tables.
inline IdealScanResult scan_tables_ideal(const StarTables& tables, const LagrangianSplit& L,
                                         unsigned max_degree, unsigned order) {
    const int dim = tables.dim();
    if (order > tables.order()) throw std::invalid_argument("scan order exceeds the built tables");
    const std::set<int> marked = L.p_axes;

    std::vector<MultiIndex> lefts;
    detail::monomials_up_to(dim, max_degree, lefts);
    std::vector<MultiIndex> cofactors;
    detail::monomials_up_to(dim, max_degree ? max_degree - 1 : 0, cofactors);

    IdealScanResult res;
    for (const MultiIndex& mf : lefts) {
        ChartPoly f = ChartPoly::monomial(dim, mf, GaussRational(1));
        for (int j : L.p_axes)
            for (const MultiIndex& mh : cofactors) {
                MultiIndex mg = mh;
                mg.bump(j, 1);
                ChartPoly g = ChartPoly::monomial(dim, mg, GaussRational(1));
                LambdaPoly prod = tables.apply(LambdaPoly(f, order), LambdaPoly(g, order));
                for (unsigned k = 0; k <= order; ++k) {
                    ChartPoly leak = prod.coeff(k).restrict_zero(marked);
                    if (leak.is_zero()) continue;
                    res.pass = false;
                    res.left = f;
                    res.ideal_element = g;
                    res.lambda_level = k;
                    res.leakage = leak;
                    res.witness = "(" + f.str() + ") * (" + g.str() + ") leaks " + leak.str() +
                                  " at order " + std::to_string(k);
                    return res;
                }
            }
    }
    return res;
}

inline IdealScanResult verify_ideal_preservation(const StarProduct& sp, const LagrangianSplit& L,
                                                 unsigned max_degree, unsigned order) {
    L.validate(sp.problem().chart);
    if (order > sp.order()) throw std::invalid_argument("scan order exceeds the built product");
    return scan_tables_ideal(sp.tables(), L, max_degree, order);
}

// Left action on polynomials of the unmarked variables: extend, multiply,
// restrict. Construction refuses products that fail the preservation scan,
// since the action would then depend on the extension.
class QuotientModule {
public:
    static QuotientModule build(const StarProduct& sp, const LagrangianSplit& L,
                                unsigned scan_degree = 4) {
        IdealScanResult scan = verify_ideal_preservation(sp, L, scan_degree, sp.order());
        if (!scan.pass)
            throw std::invalid_argument("product does not preserve the vanishing ideal: " +
                                        scan.witness);
        QuotientModule m;
        m.dim_ = sp.problem().chart.dim;
        m.order_ = sp.order();
        m.split_ = L;
        m.tables_ = sp.tables();
        return m;
    }

    int dim() const noexcept { return dim_; }
    unsigned order() const noexcept { return order_; }
    const LagrangianSplit& split() const noexcept { return split_; }

    LambdaPoly act(const LambdaPoly& f, const LambdaPoly& phi) const {
        require_on_subspace(phi);
        LambdaPoly prod = tables_.apply(f.truncated(order_), phi.truncated(order_));
        LambdaPoly out(dim_, prod.order());
        for (unsigned k = 0; k <= prod.order(); ++k)
            out.set_coeff(k, prod.coeff(k).restrict_zero(split_.p_axes));
        return out;
    }

    LambdaPoly act(const ChartPoly& f, const ChartPoly& phi) const {
        return act(LambdaPoly(f, order_), LambdaPoly(phi, order_));
    }

private:
    void require_on_subspace(const LambdaPoly& phi) const {
        for (const auto& [k, ck] : phi.coeffs())
            for (const auto& [m, c] : ck.terms())
                for (int a : split_.p_axes)
                    if (m[a] > 0)
                        throw std::invalid_argument(
                            "module argument must not involve the marked coordinates");
    }

    int dim_ = 0;
    unsigned order_ = 0;
    LagrangianSplit split_;
    StarTables tables_;
};

}  // namespace starprod
