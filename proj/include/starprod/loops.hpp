#pragma once

/*
 * Exact line integrals over piecewise loops. Segments are either polynomial
 * in the parameter (with pi-polynomial coefficients, so angle sweeps like
 * x(t) = 2*pi*t stay exact) or a trigonometric pair
 *
 *   x_a(t) = base + c*cos(2 pi f t) + s*sin(2 pi f t),  t in [0,1],
 *
 * one shared integer frequency per segment. Both classes integrate 1-forms
 * with polynomial coefficients in closed form: polynomial segments by power
 * integration, trigonometric ones through full-period cosine/sine moments.
 * Values live in Q[i][pi].
 *
 * Holonomy of a closed 1-form around a loop is the formal exponential
 * exp(i * lambda * integral), returned as its coefficient list.
 */

#include "starprod/chart_poly.hpp"
#include "starprod/scalar_form.hpp"

#include <array>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace starprod {

// Polynomial in pi with Gauss-rational coefficients.
class PiScalar {
public:
    PiScalar() = default;
    PiScalar(const GaussRational& c) {
        if (!c.is_zero()) c_[0] = c;
    }
    static PiScalar pi_times(const GaussRational& c, unsigned power = 1) {
        PiScalar r;
        if (!c.is_zero()) c_insert(r, power, c);
        return r;
    }

    bool is_zero() const noexcept { return c_.empty(); }
    const std::map<unsigned, GaussRational>& terms() const noexcept { return c_; }

    GaussRational coeff(unsigned power) const {
        auto it = c_.find(power);
        return it == c_.end() ? GaussRational() : it->second;
    }

    // Nonzero only at the requested power, whose coefficient is returned.
    bool pure_power(unsigned power, GaussRational& out) const {
        if (c_.empty()) {
            out = GaussRational();
            return true;
        }
        if (c_.size() != 1 || c_.begin()->first != power) return false;
        out = c_.begin()->second;
        return true;
    }

    PiScalar& operator+=(const PiScalar& o) {
        for (const auto& [p, c] : o.c_) c_insert(*this, p, c);
        return *this;
    }
    PiScalar& operator-=(const PiScalar& o) {
        for (const auto& [p, c] : o.c_) c_insert(*this, p, -c);
        return *this;
    }
    PiScalar& operator*=(const GaussRational& s) {
        if (s.is_zero()) {
            c_.clear();
            return *this;
        }
        for (auto& [p, c] : c_) c *= s;
        return *this;
    }
    friend PiScalar operator+(PiScalar a, const PiScalar& b) { return a += b; }
    friend PiScalar operator-(PiScalar a, const PiScalar& b) { return a -= b; }
    friend PiScalar operator*(PiScalar a, const GaussRational& s) { return a *= s; }
    friend PiScalar operator*(const GaussRational& s, PiScalar a) { return a *= s; }
    friend PiScalar operator*(const PiScalar& a, const PiScalar& b) {
        PiScalar r;
        for (const auto& [pa, ca] : a.c_)
            for (const auto& [pb, cb] : b.c_) c_insert(r, pa + pb, ca * cb);
        return r;
    }
    friend bool operator==(const PiScalar& a, const PiScalar& b) { return a.c_ == b.c_; }
    friend bool operator!=(const PiScalar& a, const PiScalar& b) { return !(a == b); }

    std::string str() const {
        if (c_.empty()) return "0";
        std::string out;
        for (const auto& [p, c] : c_) {
            if (!out.empty()) out += " + ";
            std::string cs = c.str();
            bool composite = cs.find('+') != std::string::npos ||
                             cs.find('-', 1) != std::string::npos;
            if (p == 0) {
                out += composite ? "(" + cs + ")" : cs;
                continue;
            }
            std::string pi = p == 1 ? "pi" : "pi^" + std::to_string(p);
            if (cs == "1")
                out += pi;
            else if (cs == "-1")
                out += "-" + pi;
            else
                out += (composite ? "(" + cs + ")" : cs) + "*" + pi;
        }
        return out;
    }

private:
    static void c_insert(PiScalar& r, unsigned p, const GaussRational& c) {
        if (c.is_zero()) return;
        auto [it, fresh] = r.c_.try_emplace(p, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) r.c_.erase(it);
        }
    }

    std::map<unsigned, GaussRational> c_;
};

namespace detail {

// Dense univariate polynomial in the segment parameter.
struct Poly1 {
    std::vector<PiScalar> c;

    void trim() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }
    bool is_zero() const noexcept { return c.empty(); }

    static Poly1 constant(const PiScalar& v) {
        Poly1 p;
        p.c.push_back(v);
        p.trim();
        return p;
    }

    PiScalar eval0() const { return c.empty() ? PiScalar() : c[0]; }
    PiScalar eval1() const {
        PiScalar s;
        for (const auto& v : c) s += v;
        return s;
    }

    Poly1& operator+=(const Poly1& o) {
        if (o.c.size() > c.size()) c.resize(o.c.size());
        for (size_t k = 0; k < o.c.size(); ++k) c[k] += o.c[k];
        trim();
        return *this;
    }
    friend Poly1 operator*(const Poly1& a, const Poly1& b) {
        Poly1 r;
        if (a.is_zero() || b.is_zero()) return r;
        r.c.assign(a.c.size() + b.c.size() - 1, PiScalar());
        for (size_t i = 0; i < a.c.size(); ++i)
            for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
        r.trim();
        return r;
    }

    Poly1 derivative() const {
        Poly1 r;
        for (size_t k = 1; k < c.size(); ++k)
            r.c.push_back(c[k] * GaussRational(static_cast<long>(k)));
        r.trim();
        return r;
    }

    PiScalar integral01() const {
        PiScalar s;
        for (size_t k = 0; k < c.size(); ++k)
            s += c[k] * GaussRational(BigRational(1, static_cast<long>(k + 1)));
        return s;
    }

    // Substitutes t -> 1 - t.
    Poly1 flipped() const {
        Poly1 r;
        r.c.assign(c.size(), PiScalar());
        for (size_t k = 0; k < c.size(); ++k) {
            BigInt binom(1);
            for (size_t j = 0; j <= k; ++j) {
                GaussRational w = rational_of(binom);
                if (j % 2) w = -w;
                r.c[j] += c[k] * w;
                binom = binom * BigInt(static_cast<long>(k - j)) / BigInt(static_cast<long>(j + 1));
            }
        }
        r.trim();
        return r;
    }
};

inline BigInt double_factorial(unsigned n) {
    BigInt r(1);
    while (n > 1) {
        r *= BigInt(static_cast<long>(n));
        n -= 2;
    }
    return r;
}

// Full-period average of cos^a sin^b.
inline GaussRational trig_moment(unsigned a, unsigned b) {
    if (a % 2 || b % 2) return GaussRational();
    BigInt num = double_factorial(a ? a - 1 : 0) * double_factorial(b ? b - 1 : 0);
    BigInt den = double_factorial(a + b);
    return GaussRational(BigRational(num, den));
}

// Finite combination of cos^a sin^b with rational coefficients.
using TrigExpr = std::map<std::array<unsigned, 2>, GaussRational>;

inline void trig_add(TrigExpr& e, std::array<unsigned, 2> key, const GaussRational& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = e.try_emplace(key, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) e.erase(it);
    }
}

inline TrigExpr trig_mul(const TrigExpr& a, const TrigExpr& b) {
    TrigExpr r;
    for (const auto& [ka, ca] : a)
        for (const auto& [kb, cb] : b) trig_add(r, {ka[0] + kb[0], ka[1] + kb[1]}, ca * cb);
    return r;
}

}  // namespace detail

// Coordinates polynomial in t; coefficients may carry pi.
struct PolySegment {
    std::vector<detail::Poly1> coords;
};

// Shared-frequency trigonometric pair coordinates.
struct TrigSegment {
    struct Coord {
        GaussRational base, cos_c, sin_c;
    };
    int frequency = 1;
    std::vector<Coord> coords;
};

using LoopSegment = std::variant<PolySegment, TrigSegment>;

namespace detail {

inline std::vector<PiScalar> segment_start(const LoopSegment& s) {
    std::vector<PiScalar> x;
    if (const auto* p = std::get_if<PolySegment>(&s)) {
        for (const auto& c : p->coords) x.push_back(c.eval0());
    } else {
        const auto& t = std::get<TrigSegment>(s);
        for (const auto& c : t.coords) x.push_back(PiScalar(c.base + c.cos_c));
    }
    return x;
}

inline std::vector<PiScalar> segment_end(const LoopSegment& s) {
    std::vector<PiScalar> x;
    if (const auto* p = std::get_if<PolySegment>(&s)) {
        for (const auto& c : p->coords) x.push_back(c.eval1());
    } else {
        // integer frequency: the pair returns to its start
        return segment_start(s);
    }
    return x;
}

inline int segment_dim(const LoopSegment& s) {
    if (const auto* p = std::get_if<PolySegment>(&s)) return static_cast<int>(p->coords.size());
    return static_cast<int>(std::get<TrigSegment>(s).coords.size());
}

inline LoopSegment segment_reversed(const LoopSegment& s) {
    if (const auto* p = std::get_if<PolySegment>(&s)) {
        PolySegment r;
        for (const auto& c : p->coords) r.coords.push_back(c.flipped());
        return r;
    }
    TrigSegment r = std::get<TrigSegment>(s);
    for (auto& c : r.coords) c.sin_c = -c.sin_c;
    return r;
}

}  // namespace detail

// Piecewise path. Axes listed as angular close up to shifts by 2 pi times an
// integer, so angle sweeps count their winding.
struct LoopPath {
    int dim = 0;
    std::vector<LoopSegment> segments;
    std::set<int> angular_axes;

    void validate(bool require_closed = true) const {
        if (segments.empty()) throw std::invalid_argument("empty path");
        for (const auto& s : segments)
            if (detail::segment_dim(s) != dim)
                throw std::invalid_argument("segment dimension mismatch");
        for (size_t k = 0; k + 1 < segments.size(); ++k)
            if (!points_match(detail::segment_end(segments[k]),
                              detail::segment_start(segments[k + 1])))
                throw std::invalid_argument("segments do not join");
        if (require_closed &&
            !points_match(detail::segment_end(segments.back()),
                          detail::segment_start(segments.front())))
            throw std::invalid_argument("path does not close");
    }

    LoopPath reversed() const {
        LoopPath r;
        r.dim = dim;
        r.angular_axes = angular_axes;
        for (auto it = segments.rbegin(); it != segments.rend(); ++it)
            r.segments.push_back(detail::segment_reversed(*it));
        return r;
    }

    friend LoopPath concat(LoopPath a, const LoopPath& b) {
        if (a.dim != b.dim) throw std::invalid_argument("dimension mismatch");
        for (const auto& s : b.segments) a.segments.push_back(s);
        for (int ax : b.angular_axes) a.angular_axes.insert(ax);
        return a;
    }

    // cos/sin circle in the (q_axis, p_axis) plane. Positive turns follow the
    // (cos, sin) orientation; negative turns reverse it.
    static LoopPath circle(int dim, int q_axis, int p_axis, const GaussRational& radius,
                           int turns = 1) {
        if (turns == 0) throw std::invalid_argument("circle needs a nonzero turn count");
        TrigSegment s;
        s.frequency = turns;
        s.coords.assign(static_cast<size_t>(dim), TrigSegment::Coord{});
        s.coords[static_cast<size_t>(q_axis)].cos_c = radius;
        s.coords[static_cast<size_t>(p_axis)].sin_c = radius;
        LoopPath loop;
        loop.dim = dim;
        loop.segments.push_back(std::move(s));
        return loop;
    }

    // Sweeps the named angular coordinate by 2 pi * winding, others fixed at 0.
    static LoopPath angle_sweep(int dim, int axis, int winding) {
        detail::Poly1 ramp;
        ramp.c.assign(2, PiScalar());
        ramp.c[1] = PiScalar::pi_times(GaussRational(2 * static_cast<long>(winding)));
        ramp.trim();
        PolySegment s;
        s.coords.assign(static_cast<size_t>(dim), detail::Poly1{});
        s.coords[static_cast<size_t>(axis)] = std::move(ramp);
        LoopPath loop;
        loop.dim = dim;
        loop.segments.push_back(std::move(s));
        loop.angular_axes.insert(axis);
        return loop;
    }

    // Straight polynomial segment between two rational points.
    static LoopSegment line(const std::vector<GaussRational>& from,
                            const std::vector<GaussRational>& to) {
        PolySegment s;
        for (size_t a = 0; a < from.size(); ++a) {
            detail::Poly1 c;
            c.c.push_back(PiScalar(from[a]));
            c.c.push_back(PiScalar(to[a] - from[a]));
            c.trim();
            s.coords.push_back(std::move(c));
        }
        return s;
    }

private:
    bool points_match(const std::vector<PiScalar>& a, const std::vector<PiScalar>& b) const {
        for (int ax = 0; ax < dim; ++ax) {
            PiScalar d = a[static_cast<size_t>(ax)] - b[static_cast<size_t>(ax)];
            if (d.is_zero()) continue;
            if (!angular_axes.count(ax)) return false;
            GaussRational c;
            if (!d.pure_power(1, c)) return false;
            // shift must be 2 pi times an integer
            GaussRational half = c / GaussRational(2);
            if (!half.im().is_zero() ||
                boost::multiprecision::denominator(half.re()) != 1)
                return false;
        }
        return true;
    }
};

namespace detail {

inline PiScalar integrate_poly_segment(const PolySegment& seg, const ScalarForm& theta) {
    Poly1 total;
    const int dim = static_cast<int>(seg.coords.size());
    for (int a = 0; a < dim; ++a) {
        ChartPoly ta = theta.coeff_at({a});
        if (ta.is_zero()) continue;
        Poly1 da = seg.coords[static_cast<size_t>(a)].derivative();
        if (da.is_zero()) continue;
        Poly1 comp;
        for (const auto& [m, c] : ta.terms()) {
            Poly1 mono = Poly1::constant(PiScalar(c));
            for (int ax = 0; ax <= m.max_axis(); ++ax)
                for (unsigned e = 0; e < m[ax]; ++e)
                    mono = mono * seg.coords[static_cast<size_t>(ax)];
            comp += mono;
        }
        total += comp * da;
    }
    return total.integral01();
}

inline PiScalar integrate_trig_segment(const TrigSegment& seg, const ScalarForm& theta) {
    if (seg.frequency == 0) return PiScalar();
    const int dim = static_cast<int>(seg.coords.size());
    GaussRational moment_sum;
    for (int a = 0; a < dim; ++a) {
        ChartPoly ta = theta.coeff_at({a});
        if (ta.is_zero()) continue;
        const auto& ca = seg.coords[static_cast<size_t>(a)];
        TrigExpr deriv;  // x_a' up to the shared 2 pi f factor
        trig_add(deriv, {1, 0}, ca.sin_c);
        trig_add(deriv, {0, 1}, -ca.cos_c);
        if (deriv.empty()) continue;
        TrigExpr comp;
        for (const auto& [m, c] : ta.terms()) {
            TrigExpr mono{{{0, 0}, c}};
            for (int ax = 0; ax <= m.max_axis(); ++ax) {
                const auto& cx = seg.coords[static_cast<size_t>(ax)];
                TrigExpr lin;
                trig_add(lin, {0, 0}, cx.base);
                trig_add(lin, {1, 0}, cx.cos_c);
                trig_add(lin, {0, 1}, cx.sin_c);
                for (unsigned e = 0; e < m[ax]; ++e) mono = trig_mul(mono, lin);
            }
            for (const auto& [k, v] : mono) trig_add(comp, k, v);
        }
        for (const auto& [k, v] : trig_mul(comp, deriv))
            moment_sum += v * trig_moment(k[0], k[1]);
    }
    return PiScalar::pi_times(GaussRational(2 * static_cast<long>(seg.frequency)) * moment_sum);
}

}  // namespace detail

// Exact integral of a polynomial-coefficient 1-form along the path.
inline PiScalar path_integral(const LoopPath& loop, const ScalarForm& theta,
                              bool require_closed = true) {
    if (theta.degree() != 1) throw std::invalid_argument("path integral needs a 1-form");
    if (theta.dim() != loop.dim) throw std::invalid_argument("dimension mismatch");
    loop.validate(require_closed);
    PiScalar total;
    for (const auto& s : loop.segments) {
        if (const auto* p = std::get_if<PolySegment>(&s))
            total += detail::integrate_poly_segment(*p, theta);
        else
            total += detail::integrate_trig_segment(std::get<TrigSegment>(s), theta);
    }
    return total;
}

inline PiScalar liouville_integral(const LoopPath& loop, const ScalarForm& theta) {
    return path_integral(loop, theta, true);
}

// Coefficient list of exp(i * lambda * integral) up to the given order.
struct HolonomySeries {
    PiScalar integral;
    std::vector<PiScalar> coeffs;  // coeffs[k] multiplies lambda^k

    bool is_one() const {
        for (size_t k = 1; k < coeffs.size(); ++k)
            if (!coeffs[k].is_zero()) return false;
        return !coeffs.empty() && coeffs[0] == PiScalar(GaussRational(1));
    }

    friend HolonomySeries operator*(const HolonomySeries& a, const HolonomySeries& b) {
        HolonomySeries r;
        r.integral = a.integral + b.integral;
        size_t n = std::min(a.coeffs.size(), b.coeffs.size());
        r.coeffs.assign(n, PiScalar());
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; i + j < n; ++j) r.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
        return r;
    }
};

inline HolonomySeries holonomy_series(const LoopPath& loop, const ScalarForm& alpha,
                                      unsigned order) {
    if (alpha.degree() != 1) throw std::invalid_argument("holonomy needs a 1-form");
    if (!alpha.exterior_d().is_zero())
        throw std::invalid_argument("holonomy needs a closed 1-form");
    HolonomySeries h;
    h.integral = liouville_integral(loop, alpha);
    PiScalar power(GaussRational(1));
    GaussRational iu(BigRational(0), BigRational(1));
    GaussRational ipow(1);
    BigInt fact(1);
    for (unsigned k = 0; k <= order; ++k) {
        if (k) {
            power = power * h.integral;
            ipow *= iu;
            fact *= BigInt(static_cast<long>(k));
        }
        h.coeffs.push_back(power * (ipow / rational_of(fact)));
    }
    return h;
}

}  // namespace starprod
