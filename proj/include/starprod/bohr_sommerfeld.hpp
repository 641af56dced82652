#pragma once

/*
 * Quantization-condition evaluation for one-parameter integrable families,
 * plus the two index computations the condition consumes: the winding number
 * of det^2 along a frame path, and the trace-integral index of a gauge path.
 *
 * The action functional is restricted to pi-multiples affine in the spectral
 * parameter, A(E) = pi*(a + b*E) with rational a, b and b != 0. With Maslov
 * weight c and subprincipal term kappa the condition
 *
 *   A(E)/(2*pi*lambda) - c*mu + kappa in Z
 *
 * solves exactly to E_n = (2*lambda*(n + c*mu - kappa) - a)/b, and window
 * enumeration is pure rational arithmetic.
 *
 * The index computations are the single numeric code path in the library:
 * winding numbers are integers, so float accumulation with a certified
 * rounding margin is safe here. Everything feeding the spectrum stays exact.
 */

#include "starprod/gauss_rational.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace starprod {

struct BSProblem {
    BigRational action_base;       // a in A(E) = pi*(a + b*E)
    BigRational action_slope;      // b, nonzero
    long maslov = 0;               // mu per basis loop
    GaussRational kappa;           // subprincipal term
    BigRational lambda;            // deformation value, positive
    BigRational maslov_weight = BigRational(1, 4);

    void validate() const {
        if (action_slope.is_zero())
            throw std::invalid_argument(
                "action must be strictly monotone in the spectral parameter");
        if (lambda <= 0) throw std::invalid_argument("lambda must be positive");
    }

    // Left side of the integrality condition at E.
    GaussRational condition_value(const BigRational& E) const {
        validate();
        BigRational a = (action_base + action_slope * E) / (2 * lambda);
        return GaussRational(a - maslov_weight * BigRational(maslov)) + kappa;
    }

    BigRational level(long n) const {
        validate();
        BigRational target =
            2 * lambda * (BigRational(n) + maslov_weight * BigRational(maslov) - kappa.re());
        return (target - action_base) / action_slope;
    }
};

namespace detail {

inline BigInt rational_floor(const BigRational& q) {
    BigInt num = boost::multiprecision::numerator(q);
    BigInt den = boost::multiprecision::denominator(q);
    BigInt d = num / den;
    if (num < 0 && d * den != num) d -= 1;
    return d;
}

inline BigInt rational_ceil(const BigRational& q) { return -rational_floor(-q); }

}  // namespace detail

// All condition solutions inside the closed window, ascending. A complex
// subprincipal term admits no integer level, so the list is empty.
inline std::vector<BigRational> bs_spectrum(const BSProblem& p, const BigRational& lo,
                                            const BigRational& hi) {
    p.validate();
    if (lo > hi) throw std::invalid_argument("empty search window");
    if (!p.kappa.im().is_zero()) return {};
    BigRational shift = p.maslov_weight * BigRational(p.maslov) - p.kappa.re();
    // n(E) = (a + b*E)/(2*lambda) - shift, monotone with sign of b
    auto level_index = [&](const BigRational& E) {
        return (p.action_base + p.action_slope * E) / (2 * p.lambda) - shift;
    };
    BigRational n_at_lo = level_index(lo), n_at_hi = level_index(hi);
    BigRational n_min = p.action_slope > 0 ? n_at_lo : n_at_hi;
    BigRational n_max = p.action_slope > 0 ? n_at_hi : n_at_lo;
    std::vector<BigRational> out;
    for (BigInt n = detail::rational_ceil(n_min); n <= detail::rational_floor(n_max); ++n)
        out.push_back(p.level(static_cast<long>(n)));
    if (p.action_slope < 0) std::reverse(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Index computations (numeric).

using CMatD = std::vector<std::vector<std::complex<double>>>;
using FramePath = std::function<CMatD(double)>;
using GaugePath = FramePath;

namespace detail {

inline std::complex<double> det_complex(CMatD m) {
    const size_t n = m.size();
    for (const auto& row : m)
        if (row.size() != n) throw std::invalid_argument("matrix is not square");
    std::complex<double> det(1.0, 0.0);
    for (size_t c = 0; c < n; ++c) {
        size_t pivot = c;
        for (size_t r = c + 1; r < n; ++r)
            if (std::abs(m[r][c]) > std::abs(m[pivot][c])) pivot = r;
        if (std::abs(m[pivot][c]) < 1e-12)
            throw std::runtime_error("singular matrix along path");
        if (pivot != c) {
            std::swap(m[pivot], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (size_t r = c + 1; r < n; ++r) {
            std::complex<double> f = m[r][c] / m[c][c];
            for (size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return det;
}

// Total argument change of f over [0,1] divided by 2*pi. Sampling doubles
// until every step moves the argument by at most pi/2.
inline double arg_winding(const std::function<std::complex<double>(double)>& f) {
    constexpr double kPi = 3.14159265358979323846;
    for (size_t samples = 64; samples <= (1u << 20); samples *= 2) {
        double total = 0.0;
        bool fine = true;
        std::complex<double> prev = f(0.0);
        if (std::abs(prev) < 1e-12) throw std::runtime_error("singular value along path");
        for (size_t k = 1; k <= samples; ++k) {
            std::complex<double> cur = f(static_cast<double>(k) / static_cast<double>(samples));
            if (std::abs(cur) < 1e-12)
                throw std::runtime_error("singular value along path");
            double step = std::arg(cur / prev);
            if (std::abs(step) > kPi / 2) {
                fine = false;
                break;
            }
            total += step;
            prev = cur;
        }
        if (fine) return total / (2 * kPi);
    }
    throw std::runtime_error("argument tracking did not converge under refinement");
}

inline int rounded_winding(double w) {
    double nearest = std::round(w);
    if (std::abs(w - nearest) >= 0.1)
        throw std::runtime_error("winding residual exceeds tolerance");
    return static_cast<int>(nearest);
}

}  // namespace detail

// Winding number of det^2 of the frame path over one circuit.
inline int maslov_winding(const FramePath& frame) {
    auto f = [&frame](double t) {
        std::complex<double> d = detail::det_complex(frame(t));
        return d * d;
    };
    return detail::rounded_winding(detail::arg_winding(f));
}

// (i/2pi) * integral of tr(g^{-1} dg): since tr(g^{-1} dg) = d log det g,
// this is minus the winding of det(g). Returned unrounded for reporting.
inline double gauge_trace_integral(const GaugePath& g) {
    auto f = [&g](double t) { return detail::det_complex(g(t)); };
    return -detail::arg_winding(f);
}

// Index carried by a gauge path: twice the negated trace integral, matching
// the frame-path winding on the standard circle comparison.
inline int maslov_from_gauge(const GaugePath& g) {
    return detail::rounded_winding(-2.0 * gauge_trace_integral(g));
}

// ---------------------------------------------------------------------------
// Stock paths.

// 1x1 frame e^{2 pi i turns t}; det^2 winds twice per turn.
inline FramePath circle_frame(int turns = 1) {
    return [turns](double t) -> CMatD {
        constexpr double kTau = 2 * 3.14159265358979323846;
        double a = kTau * turns * t;
        return {{std::complex<double>(std::cos(a), std::sin(a))}};
    };
}

inline FramePath constant_frame(int n) {
    CMatD id(static_cast<size_t>(n),
             std::vector<std::complex<double>>(static_cast<size_t>(n), {0.0, 0.0}));
    for (int k = 0; k < n; ++k) id[static_cast<size_t>(k)][static_cast<size_t>(k)] = {1.0, 0.0};
    return [id](double) { return id; };
}

inline FramePath reversed_path(FramePath f) {
    return [f = std::move(f)](double t) { return f(1.0 - t); };
}

inline FramePath concat_paths(FramePath a, FramePath b) {
    return [a = std::move(a), b = std::move(b)](double t) {
        return t < 0.5 ? a(2.0 * t) : b(2.0 * t - 1.0);
    };
}

}  // namespace starprod
