#pragma once

/*
 * Symplectic connections on a chart and the covariant derivative they induce
 * on Weyl-bundle sections. Christoffel symbols are polynomial; validation
 * demands torsion freedom and total symmetry of the lowered symbol
 * Gamma_{ijk} = omega_{il} Gamma^l_{jk}, which together make the connection
 * preserve the symplectic form.
 *
 * On a section a (x) dx^I the derivative is
 *
 *   D a = sum_k [ d_k a
 *               - Gamma^m_{kj} xi^j d_{xi^m} a
 *               + (i/2) lambda Delta^{ij} Gamma^m_{kj} d_{xi^i} d_{xi^m} a
 *               ] (x) dx^k ^ dx^I,
 *
 * Delta the symmetric part of the ordering pairing. The second-derivative
 * correction vanishes for the totally antisymmetric (Weyl) pairing and is
 * exactly what keeps D a derivation of the fiberwise product for the others.
 * D preserves total degree and raises form degree by one.
 */

#include "starprod/chart_poly.hpp"
#include "starprod/linalg.hpp"
#include "starprod/ordering.hpp"
#include "starprod/symplectic.hpp"
#include "starprod/weyl.hpp"

#include <array>
#include <map>
#include <stdexcept>

namespace starprod {

class Connection {
public:
    Connection() = default;
    explicit Connection(int dim) : dim_(dim) {}

    static Connection flat(int dim) { return Connection(dim); }

    int dim() const noexcept { return dim_; }
    bool is_flat() const noexcept { return gamma_.empty(); }

    const std::map<std::array<int, 3>, ChartPoly>& entries() const noexcept { return gamma_; }

    ChartPoly christoffel(int l, int j, int k) const {
        auto it = gamma_.find({l, j, k});
        return it == gamma_.end() ? ChartPoly(dim_) : it->second;
    }

    // Store Gamma^l_{jk} together with its mirror in the lower pair.
    void set_symmetric(int l, int j, int k, const ChartPoly& g) {
        check_axis(l);
        check_axis(j);
        check_axis(k);
        if (g.is_zero()) {
            gamma_.erase({l, j, k});
            gamma_.erase({l, k, j});
            return;
        }
        gamma_[{l, j, k}] = g;
        gamma_[{l, k, j}] = g;
    }

    ChartPoly lowered(const SymplecticChart& chart, int i, int j, int k) const {
        ChartPoly r(dim_);
        for (int l = 0; l < dim_; ++l) {
            const GaussRational& w = chart.form[static_cast<size_t>(i)][static_cast<size_t>(l)];
            if (w.is_zero()) continue;
            r += w * christoffel(l, j, k);
        }
        return r;
    }

    // Raise the first index of a totally symmetric lowered symbol with the
    // inverse of the symplectic form.
    static Connection from_lowered(const SymplecticChart& chart,
                                   const std::map<std::array<int, 3>, ChartPoly>& low) {
        Mat forminv = mat_inverse(chart.form);
        Connection c(chart.dim);
        for (int l = 0; l < chart.dim; ++l)
            for (int j = 0; j < chart.dim; ++j)
                for (int k = j; k < chart.dim; ++k) {
                    ChartPoly g(chart.dim);
                    for (const auto& [idx, p] : low) {
                        if (idx[1] != j || idx[2] != k) continue;
                        const GaussRational& w =
                            forminv[static_cast<size_t>(l)][static_cast<size_t>(idx[0])];
                        if (!w.is_zero()) g += w * p;
                    }
                    if (!g.is_zero()) c.set_symmetric(l, j, k, g);
                }
        return c;
    }

    void validate(const SymplecticChart& chart) const {
        if (dim_ != chart.dim) throw std::invalid_argument("connection dimension mismatch");
        for (const auto& [idx, g] : gamma_) {
            if (idx[0] >= dim_ || idx[1] >= dim_ || idx[2] >= dim_)
                throw std::invalid_argument("christoffel axis beyond dimension");
            if (g != christoffel(idx[0], idx[2], idx[1]))
                throw std::invalid_argument("connection has torsion");
        }
        for (int i = 0; i < dim_; ++i)
            for (int j = i + 1; j < dim_; ++j)
                for (int k = 0; k < dim_; ++k)
                    if (lowered(chart, i, j, k) != lowered(chart, j, i, k))
                        throw std::invalid_argument(
                            "lowered symbol is not symmetric; the connection does not "
                            "preserve the symplectic form");
    }

private:
    void check_axis(int a) const {
        if (a < 0 || a >= dim_) throw std::invalid_argument("christoffel axis beyond dimension");
    }

    int dim_ = 0;
    std::map<std::array<int, 3>, ChartPoly> gamma_;
};

// R^n_{jlk} = d_l Gamma^n_{kj} - d_k Gamma^n_{lj}
//           + Gamma^n_{lm} Gamma^m_{kj} - Gamma^n_{km} Gamma^m_{lj}
inline ChartPoly curvature_raised(const Connection& c, int n, int j, int l, int k) {
    ChartPoly r = c.christoffel(n, k, j).derivative(l) - c.christoffel(n, l, j).derivative(k);
    for (int m = 0; m < c.dim(); ++m) {
        r += c.christoffel(n, l, m) * c.christoffel(m, k, j);
        r -= c.christoffel(n, k, m) * c.christoffel(m, l, j);
    }
    return r;
}

inline ChartPoly curvature_lowered(const Connection& c, const SymplecticChart& chart, int n,
                                   int j, int l, int k) {
    ChartPoly r(c.dim());
    for (int m = 0; m < c.dim(); ++m) {
        const GaussRational& w = chart.form[static_cast<size_t>(n)][static_cast<size_t>(m)];
        if (w.is_zero()) continue;
        r += w * curvature_raised(c, m, j, l, k);
    }
    return r;
}

// The fiber-quadratic curvature 2-form (1/4) R_{njlk} xi^n xi^j dx^l ^ dx^k.
inline WeylForm<ChartPoly> curvature_weyl_form(const Connection& c, const SymplecticChart& chart,
                                               unsigned budget) {
    WeylForm<ChartPoly> R(c.dim(), 2, budget);
    const GaussRational quarter(1, 4);
    for (int n = 0; n < c.dim(); ++n)
        for (int j = 0; j < c.dim(); ++j)
            for (int l = 0; l < c.dim(); ++l)
                for (int k = 0; k < c.dim(); ++k) {
                    if (l == k) continue;
                    ChartPoly r = curvature_lowered(c, chart, n, j, l, k);
                    if (r.is_zero()) continue;
                    MultiIndex xi = MultiIndex::unit(n).plus(MultiIndex::unit(j));
                    R.add_signed({l, k}, WeylKey{xi, 0}, quarter * r);
                }
    return R;
}

template <class C>
WeylForm<C> covariant_D(const WeylForm<C>& a, const Connection& conn, const OrderingSpec& ord) {
    int dim = a.dim();
    Mat delta = ord.symmetric_part();
    const GaussRational half_i(BigRational(0), BigRational(1, 2));
    WeylForm<C> r(dim, a.degree() + 1, a.budget());

    for (const auto& [idx, e] : a.components()) {
        for (int k = 0; k < dim; ++k) {
            WeylElem<C> t = base_derivative(e, k);
            for (int m = 0; m < dim; ++m)
                for (int j = 0; j < dim; ++j) {
                    ChartPoly g = conn.christoffel(m, k, j);
                    if (g.is_zero()) continue;
                    WeylElem<C> dm = xi_derivative(e, m);
                    if (dm.is_zero()) continue;
                    t -= poly_scale(g, xi_multiply(dm, j));
                    for (int i = 0; i < dim; ++i) {
                        const GaussRational& dij =
                            delta[static_cast<size_t>(i)][static_cast<size_t>(j)];
                        if (dij.is_zero()) continue;
                        WeylElem<C> u = xi_derivative(dm, i);
                        if (u.is_zero()) continue;
                        u = poly_scale(g, u);
                        u *= half_i * dij;
                        t += u.lambda_shifted(1);
                    }
                }
            if (t.is_zero()) continue;
            std::vector<int> axes{k};
            for (int q = 0; q < idx.count; ++q) axes.push_back(idx.axes[static_cast<size_t>(q)]);
            auto [nidx, sign] = normalize_axes(std::move(axes));
            if (sign == 0) continue;
            if (sign < 0) t *= GaussRational(-1);
            r.add_component(nidx, t);
        }
    }
    return r;
}

template <class C>
WeylForm<C> covariant_D(const WeylElem<C>& a, const Connection& conn, const OrderingSpec& ord) {
    return covariant_D(WeylForm<C>::scalar(a), conn, ord);
}

}  // namespace starprod
