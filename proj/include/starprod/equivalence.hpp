#pragma once

/*
 * Order-by-order comparison of two products built on the same chart. When the
 * first disagreeing level k has been reached, that level difference of two
 * associative products is a cocycle; its antisymmetric principal part is a
 * closed 2-form F. A primitive alpha of F generates the order-k equivalence
 *
 *   S = 1 + lambda^{k-1} V,   V = -2i * (alpha raised through the Poisson
 *                                 tensor, as a first-order operator),
 *
 * and transporting the second product through S matches the first at level k
 * up to a symmetric (coboundary) remainder; the certificate checks that the
 * remainder antisymmetrizes to zero. In the Lagrangian-relative scope the
 * primitive is taken with vanishing pullback when possible, and a nonzero
 * pullback of F is the obstruction: the pair is then inequivalent through
 * subspace-respecting maps at this order.
 */

#include "starprod/adapted.hpp"
#include "starprod/chart_poly.hpp"
#include "starprod/diff_op.hpp"
#include "starprod/fedosov.hpp"
#include "starprod/scalar_form.hpp"
#include "starprod/symplectic.hpp"

#include <stdexcept>
#include <vector>

namespace starprod {

struct LichnerowiczSplit {
    unsigned level = 0;
    MultiDiffOp difference;  // second minus first at that level
    ScalarForm two_form;     // antisymmetric principal part, as a 2-form
    bool closed = false;
    ScalarForm alpha;  // primitive: d(alpha) == two_form
    bool coboundary_certified = false;
};

// Splits the first level difference into an exact-2-form part and a symmetric
// remainder. Levels below k must agree; the level-k difference must be a
// cocycle, which is what the associativity of both inputs guarantees.
inline LichnerowiczSplit lichnerowicz_split(const StarTables& A, const StarTables& B, unsigned k,
                                            const SymplecticChart& chart,
                                            const LagrangianSplit* relative = nullptr) {
    if (A.dim() != B.dim() || A.dim() != chart.dim)
        throw std::invalid_argument("table dimension mismatch");
    if (k > A.order() || k > B.order())
        throw std::invalid_argument("comparison level beyond the built order");
    for (unsigned j = 0; j < k; ++j)
        if (!(A.level(j) - B.level(j)).is_zero())
            throw std::invalid_argument("products already differ below the requested level");

    LichnerowiczSplit out;
    out.level = k;
    out.difference = B.level(k) - A.level(k);
    if (!hochschild_b(out.difference).is_zero())
        throw std::logic_error("level difference is not a cocycle");
    out.two_form = hkr_form(out.difference, chart);
    out.closed = out.two_form.exterior_d().is_zero();
    if (out.closed) {
        out.alpha = relative ? fiber_primitive(out.two_form, relative->p_axes)
                             : radial_primitive(out.two_form);
        if (out.alpha.exterior_d() != out.two_form)
            throw std::logic_error("primitive reconstruction failed");
        MultiDiffOp remainder = out.difference - form_to_bidiff(out.two_form, chart);
        out.coboundary_certified = hkr_form(remainder, chart).is_zero();
    }
    return out;
}

// S = 1 + lambda^{jump} V with V a vector field; inverse by the finite
// Neumann series at the working order.
struct EquivalenceMap {
    unsigned level = 0;  // first order the pair differs at; jump is level - 1
    unsigned truncation = 0;
    ScalarForm alpha;
    DiffOp1 generator;

    unsigned jump() const noexcept { return level ? level - 1 : 0; }

    bool is_identity() const noexcept { return generator.ops().empty(); }

    LambdaPoly apply(const LambdaPoly& f) const {
        LambdaPoly r = f;
        if (is_identity()) return r;
        for (unsigned m = 0; m + jump() <= truncation; ++m) {
            ChartPoly fm = f.coeff(m);
            if (fm.is_zero()) continue;
            r.add_coeff(m + jump(), generator.apply(fm));
        }
        return r;
    }

    LambdaPoly apply_inverse(const LambdaPoly& f) const {
        if (is_identity()) return f;
        if (jump() == 0) throw std::logic_error("zero-jump map has no series inverse");
        LambdaPoly r = f;
        LambdaPoly acc = f;
        for (unsigned step = jump(); step <= truncation; step += jump()) {
            LambdaPoly next(f.dim(), f.order());
            for (unsigned m = 0; m + jump() <= truncation; ++m) {
                ChartPoly am = acc.coeff(m);
                if (am.is_zero()) continue;
                next.add_coeff(m + jump(), ChartPoly(f.dim()) - generator.apply(am));
            }
            r += next;
            acc = next;
            if (acc.is_zero()) break;
        }
        return r;
    }
};

// The transported product S^{-1}(S f * S g), assembled level by level from
// the tables of the input product and powers of the generator.
inline StarTables transport_tables(const StarTables& tb, const DiffOp1& V, unsigned jump,
                                   unsigned order) {
    StarTables out(tb.dim(), order);
    if (V.ops().empty() || jump == 0) {
        for (unsigned n = 0; n <= order && n <= tb.order(); ++n) out.level(n) = tb.level(n);
        return out;
    }
    std::vector<DiffOp1> powers{DiffOp1::identity(tb.dim()), V};
    while (powers.size() * jump <= order) powers.push_back(compose(powers.back(), V));

    for (unsigned n = 0; n <= order; ++n) {
        MultiDiffOp acc(tb.dim(), 2);
        // the map is affine, so each argument slot carries at most one V;
        // only the inverse contributes the full alternating power series
        for (unsigned a = 0; a * jump <= n; ++a)
            for (unsigned b = 0; b <= 1 && a * jump + b * jump <= n; ++b)
                for (unsigned c = 0; c <= 1 && (a + b + c) * jump <= n; ++c) {
                    unsigned r = n - (a + b + c) * jump;
                    if (r > tb.order()) continue;
                    MultiDiffOp term = tb.level(r);
                    if (term.is_zero()) continue;
                    if (b) term = pre_compose(term, 0, powers[b]);
                    if (c) term = pre_compose(term, 1, powers[c]);
                    if (a) {
                        term = post_compose(powers[a], term);
                        if (a % 2) term *= GaussRational(-1);
                    }
                    acc += term;
                }
        out.level(n) = acc;
    }
    return out;
}

struct EquivalenceOutcome {
    unsigned level = 0;
    bool relative_scope = false;
    bool equivalent = true;       // false only on a relative-class obstruction
    ScalarForm obstruction;       // restricted 2-form when not
    LichnerowiczSplit split;
    EquivalenceMap map;
    bool intertwine_certified = false;
    bool transported_ideal_pass = false;  // relative scope only
};

// Finds the equivalence between two products first differing at level k.
// The relative variant demands a generator with vanishing pullback and
// re-checks ideal preservation after transport.
inline EquivalenceOutcome equivalence_step(const StarProduct& A, const StarProduct& B, unsigned k,
                                           const LagrangianSplit* relative = nullptr) {
    if (A.order() != B.order()) throw std::invalid_argument("products built at different orders");
    const SymplecticChart& chart = A.problem().chart;
    EquivalenceOutcome out;
    out.level = k;
    out.relative_scope = relative != nullptr;

    if (relative) {
        // Obstruction first: the tangential pullback of the level difference's
        // 2-form at {marked = 0} must vanish for a subspace-respecting map.
        LichnerowiczSplit probe = lichnerowicz_split(A.tables(), B.tables(), k, chart);
        ScalarForm restricted(chart.dim, 2);
        for (int i = 0; i < chart.dim; ++i) {
            if (relative->is_p(i)) continue;
            for (int j = i + 1; j < chart.dim; ++j) {
                if (relative->is_p(j)) continue;
                ChartPoly c = probe.two_form.coeff_at({i, j}).restrict_zero(relative->p_axes);
                if (!c.is_zero()) restricted.add_signed({i, j}, c);
            }
        }
        if (!restricted.is_zero()) {
            out.equivalent = false;
            out.obstruction = restricted;
            out.split = probe;
            out.map.level = k;
            out.map.truncation = A.order();
            out.map.alpha = ScalarForm(chart.dim, 1);
            out.map.generator = DiffOp1(chart.dim);
            return out;
        }
    }

    out.split = lichnerowicz_split(A.tables(), B.tables(), k, chart, relative);
    out.map.level = k;
    out.map.truncation = A.order();
    out.map.alpha = out.split.alpha;
    out.map.generator = DiffOp1(chart.dim);
    // the level-k antisymmetric defect cancels at exactly this normalization
    const GaussRational minus_two_i(BigRational(0), BigRational(-2));
    for (int i = 0; i < chart.dim; ++i) {
        ChartPoly vi(chart.dim);
        for (int j = 0; j < chart.dim; ++j) {
            const GaussRational& w = chart.poisson[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (w.is_zero()) continue;
            vi += (minus_two_i * w) * out.split.alpha.coeff_at({j});
        }
        if (!vi.is_zero()) out.map.generator.add_op(MultiIndex::unit(i), vi);
    }

    StarTables transported =
        transport_tables(B.tables(), out.map.generator, out.map.jump(), A.order());
    bool below_ok = true;
    for (unsigned j = 0; j < k; ++j)
        if (!(transported.level(j) - A.tables().level(j)).is_zero()) below_ok = false;
    MultiDiffOp residual = transported.level(k) - A.tables().level(k);
    out.intertwine_certified = below_ok && hkr_form(residual, chart).is_zero();

    if (relative) {
        IdealScanResult scan = scan_tables_ideal(transported, *relative, 3, A.order());
        out.transported_ideal_pass = scan.pass;
    }
    return out;
}

}  // namespace starprod
