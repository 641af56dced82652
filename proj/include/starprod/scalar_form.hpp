#pragma once

/*
 * Scalar-valued differential forms on a chart: degree 0..3 with ChartPoly
 * coefficients over strictly increasing axis tuples. Degree 3 exists so
 * closedness of degree-2 data can be checked honestly.
 *
 * Includes the two chart homotopies used to produce primitives of closed
 * 2-forms: the radial one, and the fiber-scaling one that vanishes on the
 * marked coordinate subspace.
 */

#include "starprod/chart_poly.hpp"

#include <array>
#include <compare>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace starprod {

struct FormIdx {
    int8_t count = 0;
    std::array<int8_t, 3> axes{-1, -1, -1};

    auto operator<=>(const FormIdx&) const = default;

    bool contains(int axis) const {
        for (int k = 0; k < count; ++k)
            if (axes[static_cast<size_t>(k)] == axis) return true;
        return false;
    }

    std::string str() const {
        if (count == 0) return "1";
        std::string out;
        for (int k = 0; k < count; ++k) {
            if (k) out += "^";
            out += "dx" + std::to_string(axes[static_cast<size_t>(k)] + 1);
        }
        return out;
    }
};

// Sort axes into a canonical FormIdx; sign is the permutation parity, 0 if an
// axis repeats.
inline std::pair<FormIdx, int> normalize_axes(std::vector<int> ax) {
    int sign = 1;
    for (size_t a = 0; a + 1 < ax.size(); ++a)
        for (size_t b = 0; b + 1 < ax.size() - a; ++b)
            if (ax[b] > ax[b + 1]) {
                std::swap(ax[b], ax[b + 1]);
                sign = -sign;
            }
    for (size_t a = 0; a + 1 < ax.size(); ++a)
        if (ax[a] == ax[a + 1]) return {FormIdx{}, 0};
    FormIdx idx;
    idx.count = static_cast<int8_t>(ax.size());
    for (size_t a = 0; a < ax.size(); ++a) idx.axes[a] = static_cast<int8_t>(ax[a]);
    return {idx, sign};
}

class ScalarForm {
public:
    ScalarForm() = default;
    ScalarForm(int dim, int degree) : dim_(dim), degree_(degree) {
        if (degree < 0 || degree > 3) throw std::invalid_argument("form degree out of range");
    }

    static ScalarForm wedge_monomial(int dim, std::vector<int> axes, const ChartPoly& c) {
        ScalarForm f(dim, static_cast<int>(axes.size()));
        auto [idx, sign] = normalize_axes(std::move(axes));
        if (sign == 0) return f;
        ChartPoly v = c;
        if (sign < 0) v *= GaussRational(-1);
        f.add_component(idx, v);
        return f;
    }

    int dim() const noexcept { return dim_; }
    int degree() const noexcept { return degree_; }
    bool is_zero() const noexcept { return comps_.empty(); }

    const std::map<FormIdx, ChartPoly>& components() const noexcept { return comps_; }

    ChartPoly component(const FormIdx& idx) const {
        auto it = comps_.find(idx);
        return it == comps_.end() ? ChartPoly(dim_) : it->second;
    }

    // Signed coefficient for an arbitrary (possibly unsorted) axis tuple.
    ChartPoly coeff_at(std::vector<int> axes) const {
        auto [idx, sign] = normalize_axes(std::move(axes));
        if (sign == 0) return ChartPoly(dim_);
        ChartPoly c = component(idx);
        if (sign < 0) c *= GaussRational(-1);
        return c;
    }

    void add_component(const FormIdx& idx, const ChartPoly& c) {
        if (static_cast<int>(idx.count) != degree_)
            throw std::invalid_argument("component degree mismatch");
        if (c.is_zero()) return;
        auto [it, fresh] = comps_.try_emplace(idx, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) comps_.erase(it);
        }
    }

    void add_signed(std::vector<int> axes, const ChartPoly& c) {
        auto [idx, sign] = normalize_axes(std::move(axes));
        if (sign == 0) return;
        ChartPoly v = c;
        if (sign < 0) v *= GaussRational(-1);
        add_component(idx, v);
    }

    ScalarForm& operator+=(const ScalarForm& o) {
        require_same_shape(o);
        for (const auto& [idx, c] : o.comps_) add_component(idx, c);
        return *this;
    }
    ScalarForm& operator-=(const ScalarForm& o) {
        require_same_shape(o);
        for (const auto& [idx, c] : o.comps_) add_component(idx, ChartPoly(dim_) - c);
        return *this;
    }
    ScalarForm& operator*=(const GaussRational& s) {
        std::map<FormIdx, ChartPoly> out;
        for (auto& [idx, c] : comps_) {
            c *= s;
            if (!c.is_zero()) out.emplace(idx, std::move(c));
        }
        comps_ = std::move(out);
        return *this;
    }

    friend ScalarForm operator+(ScalarForm a, const ScalarForm& b) { return a += b; }
    friend ScalarForm operator-(ScalarForm a, const ScalarForm& b) { return a -= b; }
    friend ScalarForm operator*(ScalarForm a, const GaussRational& s) { return a *= s; }
    friend ScalarForm operator*(const GaussRational& s, ScalarForm a) { return a *= s; }

    friend bool operator==(const ScalarForm& a, const ScalarForm& b) {
        return a.dim_ == b.dim_ && a.degree_ == b.degree_ && a.comps_ == b.comps_;
    }
    friend bool operator!=(const ScalarForm& a, const ScalarForm& b) { return !(a == b); }

    ScalarForm exterior_d() const {
        ScalarForm out(dim_, degree_ + 1);
        for (const auto& [idx, c] : comps_)
            for (int k = 0; k < dim_; ++k) {
                ChartPoly dc = c.derivative(k);
                if (dc.is_zero()) continue;
                std::vector<int> axes{k};
                for (int j = 0; j < idx.count; ++j) axes.push_back(idx.axes[static_cast<size_t>(j)]);
                out.add_signed(std::move(axes), dc);
            }
        return out;
    }

    friend ScalarForm wedge(const ScalarForm& a, const ScalarForm& b) {
        if (a.dim_ != b.dim_) throw std::invalid_argument("dimension mismatch");
        ScalarForm out(a.dim_, a.degree_ + b.degree_);
        for (const auto& [ia, ca] : a.comps_)
            for (const auto& [ib, cb] : b.comps_) {
                std::vector<int> axes;
                for (int j = 0; j < ia.count; ++j) axes.push_back(ia.axes[static_cast<size_t>(j)]);
                for (int j = 0; j < ib.count; ++j) axes.push_back(ib.axes[static_cast<size_t>(j)]);
                out.add_signed(std::move(axes), ca * cb);
            }
        return out;
    }

    // Pullback along the inclusion of the coordinate subspace {marked axes = 0}:
    // drops components touching marked axes and sets those coordinates to zero
    // in the surviving coefficients.
    ScalarForm tangential_pullback(const std::set<int>& marked) const {
        ScalarForm out(dim_, degree_);
        for (const auto& [idx, c] : comps_) {
            bool drop = false;
            for (int a : marked)
                if (idx.contains(a)) {
                    drop = true;
                    break;
                }
            if (drop) continue;
            out.add_component(idx, c.restrict_zero(marked));
        }
        return out;
    }

    std::string str() const {
        if (comps_.empty()) return "0";
        std::string out;
        for (const auto& [idx, c] : comps_) {
            if (!out.empty()) out += " + ";
            out += "(" + c.str() + ")";
            if (idx.count) out += "*" + idx.str();
        }
        return out;
    }

private:
    void require_same_shape(const ScalarForm& o) const {
        if (dim_ != o.dim_ || degree_ != o.degree_)
            throw std::invalid_argument("form shape mismatch");
    }

    int dim_ = 0;
    int degree_ = 0;
    std::map<FormIdx, ChartPoly> comps_;
};

// Radial chart homotopy: for closed F of degree 2, d(primitive) == F. Each
// monomial of F_{ij} of degree s contributes weight 1/(s+2).
inline ScalarForm radial_primitive(const ScalarForm& F) {
    if (F.degree() != 2) throw std::invalid_argument("radial primitive needs a 2-form");
    ScalarForm alpha(F.dim(), 1);
    for (int j = 0; j < F.dim(); ++j) {
        ChartPoly aj(F.dim());
        for (int i = 0; i < F.dim(); ++i) {
            if (i == j) continue;
            ChartPoly fij = F.coeff_at({i, j});
            for (const auto& [m, c] : fij.terms()) {
                MultiIndex mi = m;
                mi.bump(i, 1);
                aj.add_term(mi, c / GaussRational(static_cast<long>(m.degree() + 2)));
            }
        }
        if (!aj.is_zero()) alpha.add_signed({j}, aj);
    }
    return alpha;
}

// Fiber-scaling homotopy along the marked axes: for closed F of degree 2 whose
// tangential pullback vanishes, returns alpha with d(alpha) == F and with
// vanishing pullback to {marked = 0}. Weight per monomial: the exponent total
// over marked axes, +1 if the component axis is marked, +1.
inline ScalarForm fiber_primitive(const ScalarForm& F, const std::set<int>& marked) {
    if (F.degree() != 2) throw std::invalid_argument("fiber primitive needs a 2-form");
    ScalarForm alpha(F.dim(), 1);
    for (int j = 0; j < F.dim(); ++j) {
        bool j_marked = marked.count(j) > 0;
        ChartPoly aj(F.dim());
        for (int a : marked) {
            if (a == j) continue;
            ChartPoly faj = F.coeff_at({a, j});
            for (const auto& [m, c] : faj.terms()) {
                unsigned fiber_deg = 0;
                for (int b : marked) fiber_deg += m[b];
                unsigned w = fiber_deg + (j_marked ? 1 : 0) + 1;
                MultiIndex mi = m;
                mi.bump(a, 1);
                aj.add_term(mi, c / GaussRational(static_cast<long>(w)));
            }
        }
        if (!aj.is_zero()) alpha.add_signed({j}, aj);
    }
    return alpha;
}

// Formal series of forms indexed by grading power (used for the closed 2-form
// series in construction data).
using FormSeries = std::map<unsigned, ScalarForm>;

}  // namespace starprod
