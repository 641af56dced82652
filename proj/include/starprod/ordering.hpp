#pragma once

/*
 * Fiber pairing tensor mu^{ij} driving the fiberwise product
 *
 *   a * b = sum over contraction multisets nu of
 *           prod (mu^{ij})^{nu_ij} / nu_ij! * (lambda/(2i))^{|nu|}
 *           * (d_xi^{rows} a)(d_xi^{cols} b).
 *
 * Totally antisymmetric pairing mu = omega^{ij} is the symmetric (Weyl)
 * ordering. The standard ordering keeps only momentum-against-position
 * contractions at twice the strength: mu^{ab} = 2 omega^{ab} for a marked
 * (momentum-like) and b unmarked, zero otherwise. In both cases the
 * antisymmetric part of mu is exactly omega^{ij}, which is what validation
 * checks; the choice of symmetric part is the ordering.
 */

#include "starprod/linalg.hpp"
#include "starprod/symplectic.hpp"

#include <stdexcept>

namespace starprod {

enum class OrderingMode { weyl, standard };

struct OrderingSpec {
    OrderingMode mode = OrderingMode::weyl;
    Mat mu;

    static OrderingSpec weyl(const SymplecticChart& chart) {
        return OrderingSpec{OrderingMode::weyl, chart.poisson};
    }

    static OrderingSpec standard(const SymplecticChart& chart, const LagrangianSplit& L) {
        L.validate(chart);
        int n = chart.dim;
        Mat mu = zero_mat(n);
        for (int a = 0; a < n; ++a) {
            if (!L.is_p(a)) continue;
            for (int b = 0; b < n; ++b) {
                if (L.is_p(b)) continue;
                mu[static_cast<size_t>(a)][static_cast<size_t>(b)] =
                    GaussRational(2) * chart.poisson[static_cast<size_t>(a)][static_cast<size_t>(b)];
            }
        }
        return OrderingSpec{OrderingMode::standard, mu};
    }

    // The antisymmetric part of the pairing must reproduce the Poisson tensor;
    // anything else does not quantize this chart.
    void validate(const SymplecticChart& chart) const {
        if (mat_dim(mu) != chart.dim) throw std::invalid_argument("pairing size mismatch");
        for (int i = 0; i < chart.dim; ++i)
            for (int j = 0; j < chart.dim; ++j) {
                GaussRational anti =
                    (mu[static_cast<size_t>(i)][static_cast<size_t>(j)] -
                     mu[static_cast<size_t>(j)][static_cast<size_t>(i)]) /
                    GaussRational(2);
                if (anti != chart.poisson[static_cast<size_t>(i)][static_cast<size_t>(j)])
                    throw std::invalid_argument(
                        "antisymmetric part of the pairing must equal the Poisson tensor");
            }
    }

    // Symmetric part: the ordering's deviation from Weyl.
    Mat symmetric_part() const {
        int n = mat_dim(mu);
        Mat d = zero_mat(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                d[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    (mu[static_cast<size_t>(i)][static_cast<size_t>(j)] +
                     mu[static_cast<size_t>(j)][static_cast<size_t>(i)]) /
                    GaussRational(2);
        return d;
    }

    // Exact shape test for the standard ordering against a given split
    // (momentum-against-position contractions only, at doubled strength).
    bool matches_standard_shape(const SymplecticChart& chart, const LagrangianSplit& L) const {
        return mu == standard(chart, L).mu;
    }
};

}  // namespace starprod
