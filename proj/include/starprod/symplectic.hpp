#pragma once

/*
 * Constant symplectic structure on a chart of even dimension 2n.
 *
 * Conventions fixed here and relied on everywhere else:
 *   - axes 0..n-1 are position-like, axes n..2n-1 momentum-like in the
 *     Darboux chart; the form matrix is J = [[0, I], [-I, 0]],
 *   - the Poisson tensor is minus the inverse of the form matrix (for J they
 *     coincide),
 *   - {f, g} = sum_ij poisson[i][j] d_i f d_j g, so {x1, x_{n+1}} = +1,
 *   - (X_f)^i = sum_j poisson[i][j] d_j f.
 */

#include "starprod/chart_poly.hpp"
#include "starprod/linalg.hpp"
#include "starprod/scalar_form.hpp"

#include <set>
#include <stdexcept>
#include <vector>

namespace starprod {

struct SymplecticChart {
    int dim = 0;
    Mat form;     // omega_ij
    Mat poisson;  // omega^ij

    static SymplecticChart darboux(int dim) {
        if (dim <= 0 || dim % 2 != 0 || dim > kMaxVars)
            throw std::invalid_argument("chart dimension must be even and at most 16");
        int n = dim / 2;
        Mat J = zero_mat(dim);
        for (int k = 0; k < n; ++k) {
            J[static_cast<size_t>(k)][static_cast<size_t>(n + k)] = GaussRational(1);
            J[static_cast<size_t>(n + k)][static_cast<size_t>(k)] = GaussRational(-1);
        }
        return SymplecticChart{dim, J, J};
    }

    static SymplecticChart from_form(const Mat& form) {
        int dim = mat_dim(form);
        if (dim <= 0 || dim % 2 != 0 || dim > kMaxVars)
            throw std::invalid_argument("chart dimension must be even and at most 16");
        if (!mat_is_antisymmetric(form))
            throw std::invalid_argument("symplectic form must be antisymmetric");
        Mat poisson = mat_negate(mat_inverse(form));
        return SymplecticChart{dim, form, poisson};
    }

    ChartPoly poisson_bracket(const ChartPoly& f, const ChartPoly& g) const {
        ChartPoly out(dim);
        for (int i = 0; i < dim; ++i) {
            ChartPoly fi = f.derivative(i);
            if (fi.is_zero()) continue;
            for (int j = 0; j < dim; ++j) {
                const GaussRational& w = poisson[static_cast<size_t>(i)][static_cast<size_t>(j)];
                if (w.is_zero()) continue;
                out += w * (fi * g.derivative(j));
            }
        }
        return out;
    }

    std::vector<ChartPoly> hamiltonian_field(const ChartPoly& f) const {
        std::vector<ChartPoly> X(static_cast<size_t>(dim), ChartPoly(dim));
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                const GaussRational& w = poisson[static_cast<size_t>(i)][static_cast<size_t>(j)];
                if (w.is_zero()) continue;
                X[static_cast<size_t>(i)] += w * f.derivative(j);
            }
        return X;
    }

    // Pairing of a 2-form with two vector fields: F(X, Y).
    ChartPoly pair_form(const ScalarForm& F, const std::vector<ChartPoly>& X,
                        const std::vector<ChartPoly>& Y) const {
        if (F.degree() != 2) throw std::invalid_argument("need a 2-form");
        ChartPoly out(dim);
        for (const auto& [idx, c] : F.components()) {
            int i = idx.axes[0], j = idx.axes[1];
            out += c * (X[static_cast<size_t>(i)] * Y[static_cast<size_t>(j)] -
                        X[static_cast<size_t>(j)] * Y[static_cast<size_t>(i)]);
        }
        return out;
    }

    ScalarForm form_as_2form() const {
        ScalarForm w(dim, 2);
        for (int i = 0; i < dim; ++i)
            for (int j = i + 1; j < dim; ++j) {
                const GaussRational& c = form[static_cast<size_t>(i)][static_cast<size_t>(j)];
                if (c.is_zero()) continue;
                w.add_signed({i, j}, ChartPoly(dim, c));
            }
        return w;
    }
};

// Marked momentum-like axes cutting out the coordinate Lagrangian {p = 0}.
struct LagrangianSplit {
    std::set<int> p_axes;

    static LagrangianSplit standard_half(int dim) {
        LagrangianSplit L;
        for (int k = dim / 2; k < dim; ++k) L.p_axes.insert(k);
        return L;
    }

    bool is_p(int axis) const { return p_axes.count(axis) > 0; }

    std::set<int> q_axes(int dim) const {
        std::set<int> q;
        for (int k = 0; k < dim; ++k)
            if (!is_p(k)) q.insert(k);
        return q;
    }

    void validate(const SymplecticChart& chart) const {
        for (int a : p_axes)
            if (a < 0 || a >= chart.dim) throw std::invalid_argument("marked axis out of range");
        if (static_cast<int>(p_axes.size()) * 2 != chart.dim)
            throw std::invalid_argument("marked axes must number half the dimension");
        // both coordinate subspaces must be isotropic for the split to be a
        // Lagrangian pair
        auto isotropic = [&](const std::set<int>& axes) {
            for (int a : axes)
                for (int b : axes)
                    if (!chart.poisson[static_cast<size_t>(a)][static_cast<size_t>(b)].is_zero())
                        return false;
            return true;
        };
        if (!isotropic(p_axes) || !isotropic(q_axes(chart.dim)))
            throw std::invalid_argument("marked split is not Lagrangian for this form");
    }
};

}  // namespace starprod
