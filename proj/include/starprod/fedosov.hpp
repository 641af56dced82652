#pragma once

/*
 * The recursive flatness construction. Given a chart, a pairing, a symplectic
 * connection, a closed normalizing 2-form series and a normalization section
 * s of total degree >= 3, solve
 *
 *   delta gamma = D gamma + (i/lambda) gamma * gamma - R + Omega,
 *   deltainv gamma = s,
 *
 * degree by degree for the connection 1-form gamma. That right hand side is
 * forced: with D^2 = -(i/lambda) ad(R) the square of the derivative
 *
 *   grad = -delta + D + (i/lambda) ad(gamma)
 *
 * is (i/lambda) ad(-delta gamma + D gamma + (i/lambda) gamma * gamma - R),
 * so the equation makes the bracket argument central and grad flat. Symbols
 * are then transported to flat sections and products read back through the
 * fiber-constant part. The same fixpoint
 * run with operator-valued coefficients yields closed bidifferential tables
 * for the product, level k collecting everything at the k-th power of the
 * parameter.
 *
 * The normalizing series enters scaled: Omega = 2i sum_k lambda^k Omega_k.
 * With that calibration two products differing only in Omega_k first deviate
 * at power k+1, and the deviation is exactly Omega_k contracted with the two
 * Hamiltonian fields.
 */

#include "starprod/chart_poly.hpp"
#include "starprod/connection.hpp"
#include "starprod/diff_op.hpp"
#include "starprod/ordering.hpp"
#include "starprod/scalar_form.hpp"
#include "starprod/symplectic.hpp"
#include "starprod/weyl.hpp"

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace starprod {

struct FedosovProblem {
    SymplecticChart chart;
    OrderingSpec ordering;
    Connection connection;
    std::map<unsigned, ScalarForm> omega;  // normalizing 2-forms, power >= 1
    WeylElem<ChartPoly> s;                 // normalization section, degree >= 3
    unsigned lambda_order = 3;
    unsigned degree_cap = 0;  // 0 picks 2 * lambda_order + 2

    unsigned effective_cap() const {
        return degree_cap ? degree_cap : 2 * lambda_order + 2;
    }
};

struct FedosovSolution {
    unsigned degree_cap = 0;
    unsigned budget = 0;
    WeylForm<ChartPoly> gamma;
    WeylForm<ChartPoly> curvature;
    WeylForm<ChartPoly> omega_eng;
    WeylForm<ChartPoly> residual;
    unsigned certified_degree = 0;
    bool residual_clean = false;
    bool degree3_normalization = false;
};

// D + (i/lambda) ad(gamma); the non-nilpotent half of the flat derivative.
template <class C>
WeylForm<C> transport_term(const WeylForm<C>& a, const WeylForm<ChartPoly>& gamma,
                           const Connection& conn, const OrderingSpec& ord) {
    WeylForm<C> r = covariant_D(a, conn, ord);
    if (!gamma.is_zero() && !a.is_zero()) {
        WeylForm<C> br = super_commutator(gamma, a, ord.mu);
        br = br.lambda_shifted(-1);
        br *= GaussRational::i();
        r += br;
    }
    return r;
}

// The flat derivative -delta + D + (i/lambda) ad(gamma).
template <class C>
WeylForm<C> fedosov_derivative(const WeylForm<C>& a, const WeylForm<ChartPoly>& gamma,
                               const Connection& conn, const OrderingSpec& ord) {
    return transport_term(a, gamma, conn, ord) - delta_op(a);
}

inline FedosovSolution solve_gamma(const FedosovProblem& p) {
    p.ordering.validate(p.chart);
    p.connection.validate(p.chart);
    const unsigned N = p.lambda_order;
    const unsigned dmax = p.effective_cap();
    if (2 * N > dmax)
        throw std::invalid_argument("degree cap too small for the requested order");
    const unsigned W = dmax + 2;
    const int dim = p.chart.dim;

    FedosovSolution sol;
    sol.degree_cap = dmax;
    sol.budget = W;

    WeylElem<ChartPoly> s(dim, W);
    for (const auto& [key, c] : p.s.terms()) {
        if (key.total() < 3)
            throw std::invalid_argument("normalization section must start at total degree three");
        if (key.total() == 3) sol.degree3_normalization = true;
        s.add_term(key, c);
    }

    WeylForm<ChartPoly> omega_eng(dim, 2, W);
    const GaussRational scale(BigRational(0), BigRational(2));  // 2i
    for (const auto& [k, F] : p.omega) {
        if (k < 1)
            throw std::invalid_argument("normalizing series starts at the first power");
        if (F.dim() != dim || F.degree() != 2)
            throw std::invalid_argument("normalizing series must consist of chart 2-forms");
        if (!F.exterior_d().is_zero())
            throw std::invalid_argument("normalizing 2-forms must be closed");
        for (const auto& [idx, c] : F.components())
            omega_eng.add_term(idx, WeylKey{MultiIndex{}, k}, scale * c);
    }
    sol.omega_eng = omega_eng;
    sol.curvature = curvature_weyl_form(p.connection, p.chart, W);

    WeylForm<ChartPoly> gamma(dim, 1, W);
    std::vector<WeylForm<ChartPoly>> parts(dmax + 1, WeylForm<ChartPoly>(dim, 1, W));
    for (unsigned d = 2; d <= dmax; ++d) {
        WeylForm<ChartPoly> rhs = omega_eng.graded_part(d - 1);
        rhs -= sol.curvature.graded_part(d - 1);
        if (d >= 3) rhs += covariant_D(parts[d - 1], p.connection, p.ordering);
        WeylForm<ChartPoly> prod(dim, 2, W);
        for (unsigned a = 2; a + 2 <= d + 1; ++a) {
            unsigned b = d + 1 - a;
            if (b < 2 || b > dmax) continue;
            if (parts[a].is_zero() || parts[b].is_zero()) continue;
            prod += fiber_mul(parts[a], parts[b], p.ordering.mu);
        }
        if (!prod.is_zero()) {
            WeylForm<ChartPoly> quad = prod.lambda_shifted(-1);
            quad *= GaussRational::i();
            rhs += quad;
        }

        WeylForm<ChartPoly> gd = delta_inv_op(rhs);
        gd += delta_op(WeylForm<ChartPoly>::scalar(s.graded_part(d + 1)));
        parts[d] = gd;
        gamma += gd;
    }
    sol.gamma = gamma;

    WeylForm<ChartPoly> res = delta_op(gamma);
    res -= covariant_D(gamma, p.connection, p.ordering);
    WeylForm<ChartPoly> gg = fiber_mul(gamma, gamma, p.ordering.mu);
    if (!gg.is_zero()) {
        WeylForm<ChartPoly> quad = gg.lambda_shifted(-1);
        quad *= GaussRational::i();
        res -= quad;
    }
    res += sol.curvature;
    res -= omega_eng;
    sol.residual = res;
    sol.certified_degree = dmax - 1;
    sol.residual_clean = true;
    for (unsigned d = 0; d <= sol.certified_degree; ++d)
        if (!res.graded_part(d).is_zero()) {
            sol.residual_clean = false;
            break;
        }
    return sol;
}

// Unique flat section with the given fiber-constant part. Works for any
// coefficient type the Weyl containers accept; polynomial coefficients give
// symbol lifts, operator coefficients give the lift of the identity whose
// pairing yields product tables.
template <class C>
WeylElem<C> flat_section_from(const C& symbol, const WeylForm<ChartPoly>& gamma,
                              const Connection& conn, const OrderingSpec& ord,
                              unsigned budget) {
    const int dim = conn.dim();
    WeylElem<C> seed(dim, budget);
    seed.add_term(WeylKey{}, symbol);
    WeylElem<C> cur = seed;
    for (unsigned it = 0; it <= budget + 2; ++it) {
        WeylForm<C> a = transport_term(WeylForm<C>::scalar(cur), gamma, conn, ord);
        WeylElem<C> next = seed + delta_inv_op(a).as_element();
        if (next == cur) return cur;
        cur = std::move(next);
    }
    throw std::logic_error("parallel lift did not stabilize within the budget");
}

// Neumann inverse of the flat derivative on forms in its image:
// grad^{-1} alpha = -deltainv sum_k K^k alpha with
// K b = deltainv(A b) + A(deltainv b).
template <class C>
WeylForm<C> fedosov_inverse(const WeylForm<C>& alpha, const WeylForm<ChartPoly>& gamma,
                            const Connection& conn, const OrderingSpec& ord) {
    WeylForm<C> acc = alpha;
    WeylForm<C> total = alpha;
    for (unsigned it = 0; it <= alpha.budget() + 2; ++it) {
        if (acc.is_zero()) break;
        WeylForm<C> next = delta_inv_op(transport_term(acc, gamma, conn, ord));
        next += transport_term(delta_inv_op(acc), gamma, conn, ord);
        total += next;
        acc = std::move(next);
    }
    WeylForm<C> r = delta_inv_op(total);
    r *= GaussRational(-1);
    return r;
}

// Apply an operator-valued section to a symbol, coefficient by coefficient.
inline WeylElem<ChartPoly> apply_operator_lift(const WeylElem<DiffOp1>& tau,
                                               const ChartPoly& f) {
    WeylElem<ChartPoly> r(tau.dim(), tau.budget());
    for (const auto& [key, T] : tau.terms()) r.add_term(key, T.apply(f));
    return r;
}

namespace detail {

// Sum over contraction matrices nu with row margins A and column margins B of
// prod mu^{nu}/nu!, times (-i/2)^{|A|} A! B!. This is the scalar weight with
// which a fiber monomial pair contributes to the fiber-constant part of a
// product; zero unless the degrees match and the pairing can consume both.
inline GaussRational full_contraction_weight(const MultiIndex& A, const MultiIndex& B,
                                             const Mat& mu) {
    if (A.degree() != B.degree()) return GaussRational(0);
    unsigned k = A.degree();
    auto entries = nonzero_entries(mu);
    const int dim = mat_dim(mu);
    std::vector<unsigned> rowuse(static_cast<size_t>(dim), 0);
    std::vector<unsigned> coluse(static_cast<size_t>(dim), 0);
    GaussRational sum(0);
    auto rec = [&](auto&& self, size_t e, const GaussRational& factor) -> void {
        if (e == entries.size()) {
            for (int ax = 0; ax < dim; ++ax)
                if (rowuse[static_cast<size_t>(ax)] != A[ax] ||
                    coluse[static_cast<size_t>(ax)] != B[ax])
                    return;
            sum += factor;
            return;
        }
        const auto& [i, j, v] = entries[e];
        unsigned cap_i = A[i] - rowuse[static_cast<size_t>(i)];
        unsigned cap_j = B[j] - coluse[static_cast<size_t>(j)];
        unsigned cap = cap_i < cap_j ? cap_i : cap_j;
        GaussRational f = factor;
        for (unsigned nu = 0; nu <= cap; ++nu) {
            if (nu) {
                rowuse[static_cast<size_t>(i)] += 1;
                coluse[static_cast<size_t>(j)] += 1;
                f = f * v / GaussRational(static_cast<long>(nu));
            }
            self(self, e + 1, f);
        }
        rowuse[static_cast<size_t>(i)] -= cap;
        coluse[static_cast<size_t>(j)] -= cap;
    };
    rec(rec, 0, GaussRational(1));
    if (sum.is_zero()) return sum;
    GaussRational scale = pow(GaussRational(BigRational(0), BigRational(-1, 2)), k);
    scale *= rational_of(A.factorial_product() * B.factorial_product());
    return sum * scale;
}

}  // namespace detail

// Pair the operator-valued lift of the identity with itself and keep the
// fiber-constant part: closed bidifferential tables of the product.
inline StarTables star_tables_from_lift(const WeylElem<DiffOp1>& tau, const Mat& mu,
                                        unsigned order) {
    StarTables t(tau.dim(), order);
    for (const auto& [ka, Ta] : tau.terms()) {
        unsigned k = ka.xi.degree();
        if (ka.lam + k > order) continue;
        for (const auto& [kb, Tb] : tau.terms()) {
            if (kb.xi.degree() != k) continue;
            unsigned level = ka.lam + kb.lam + k;
            if (level > order) continue;
            GaussRational w = detail::full_contraction_weight(ka.xi, kb.xi, mu);
            if (w.is_zero()) continue;
            for (const auto& [alpha, c] : Ta.ops())
                for (const auto& [beta, d] : Tb.ops())
                    t.level(level).add_op({alpha, beta}, w * (c * d));
        }
    }
    return t;
}

class StarProduct {
public:
    static StarProduct build(const FedosovProblem& p) {
        StarProduct sp;
        sp.prob_ = p;
        sp.sol_ = solve_gamma(p);
        WeylElem<DiffOp1> tau = flat_section_from(DiffOp1::identity(p.chart.dim), sp.sol_.gamma,
                                                  p.connection, p.ordering, sp.sol_.budget);
        sp.tau_op_ = tau;
        sp.tables_ = star_tables_from_lift(tau, p.ordering.mu, p.lambda_order);
        return sp;
    }

    const FedosovProblem& problem() const noexcept { return prob_; }
    const FedosovSolution& solution() const noexcept { return sol_; }
    const StarTables& tables() const noexcept { return tables_; }
    const WeylElem<DiffOp1>& operator_lift() const noexcept { return tau_op_; }
    unsigned order() const noexcept { return prob_.lambda_order; }

    WeylElem<ChartPoly> lift(const ChartPoly& f) const {
        return flat_section_from(f, sol_.gamma, prob_.connection, prob_.ordering, sol_.budget);
    }

    LambdaPoly star(const LambdaPoly& f, const LambdaPoly& g) const {
        return tables_.apply(f, g);
    }

    LambdaPoly star(const ChartPoly& f, const ChartPoly& g) const {
        return tables_.apply(LambdaPoly(f, prob_.lambda_order),
                             LambdaPoly(g, prob_.lambda_order));
    }

    // Slow path through two symbol lifts; the tables must agree with this.
    LambdaPoly star_direct(const ChartPoly& f, const ChartPoly& g) const {
        WeylElem<ChartPoly> a = lift(f);
        WeylElem<ChartPoly> b = lift(g);
        return central_lambda(fiber_mul(a, b, prob_.ordering.mu), prob_.lambda_order);
    }

private:
    FedosovProblem prob_;
    FedosovSolution sol_;
    WeylElem<DiffOp1> tau_op_;
    StarTables tables_;
};

}  // namespace starprod
