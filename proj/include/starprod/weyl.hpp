#pragma once

/*
 * The formal Weyl algebra over a chart: elements are finite sums
 *
 *   c(x) * xi^m * lambda^k,
 *
 * coefficient type C templated so the same machinery runs with polynomial
 * coefficients (the usual case) and with differential-operator coefficients
 * (used to extract the star product's bidifferential tables exactly). Total
 * degree = |m| + 2k grades everything; every container carries a hard budget
 * and silently drops terms beyond it, which is the truncation model: all
 * computations are exact below the budget and never consult anything above
 * it.
 *
 * Form-valued elements carry an exterior factor dx^I with I strictly
 * increasing. Products keep coefficients to the left of the exterior part, so
 * no extra signs appear beyond the wedge.
 */

#include "starprod/chart_poly.hpp"
#include "starprod/ordering.hpp"
#include "starprod/scalar_form.hpp"

#include <compare>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace starprod {

struct WeylKey {
    MultiIndex xi;
    unsigned lam = 0;

    unsigned total() const noexcept { return xi.degree() + 2 * lam; }

    friend bool operator==(const WeylKey&, const WeylKey&) = default;
};

struct WeylKeyOrder {
    bool operator()(const WeylKey& a, const WeylKey& b) const noexcept {
        unsigned ta = a.total(), tb = b.total();
        if (ta != tb) return ta < tb;
        if (a.lam != b.lam) return a.lam < b.lam;
        return GradedLex{}(a.xi, b.xi);
    }
};

// Coefficient operations for the polynomial instantiation; the operator-valued
// instantiation supplies its own overloads.
inline ChartPoly mul_coeff(const ChartPoly& a, const ChartPoly& b) { return a * b; }
inline ChartPoly coeff_xderiv(const ChartPoly& c, int axis) { return c.derivative(axis); }
inline ChartPoly scale_by_poly(const ChartPoly& p, const ChartPoly& c) { return p * c; }

template <class C>
class WeylElem {
public:
    WeylElem() = default;
    WeylElem(int dim, unsigned budget) : dim_(dim), budget_(budget) {}

    int dim() const noexcept { return dim_; }
    unsigned budget() const noexcept { return budget_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    const std::map<WeylKey, C, WeylKeyOrder>& terms() const noexcept { return terms_; }

    C coeff(const WeylKey& k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? C(dim_) : it->second;
    }

    void add_term(const WeylKey& k, const C& c) {
        if (k.total() > budget_ || c.is_zero()) return;
        if (k.xi.max_axis() >= dim_) throw std::invalid_argument("fiber axis beyond dimension");
        auto [it, fresh] = terms_.try_emplace(k, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    WeylElem& operator+=(const WeylElem& o) {
        require_same_space(o);
        for (const auto& [k, c] : o.terms_) add_term(k, c);
        return *this;
    }
    WeylElem& operator-=(const WeylElem& o) {
        require_same_space(o);
        for (const auto& [k, c] : o.terms_) {
            C n = c;
            n *= GaussRational(-1);
            add_term(k, n);
        }
        return *this;
    }
    WeylElem& operator*=(const GaussRational& s) {
        if (s.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [k, c] : terms_) c *= s;
        return *this;
    }

    friend WeylElem operator+(WeylElem a, const WeylElem& b) { return a += b; }
    friend WeylElem operator-(WeylElem a, const WeylElem& b) { return a -= b; }
    friend WeylElem operator*(WeylElem a, const GaussRational& s) { return a *= s; }
    friend WeylElem operator*(const GaussRational& s, WeylElem a) { return a *= s; }

    // Budgets are administrative, equality is semantic.
    friend bool operator==(const WeylElem& a, const WeylElem& b) {
        return a.dim_ == b.dim_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const WeylElem& a, const WeylElem& b) { return !(a == b); }

    unsigned min_lambda() const {
        unsigned m = budget_;
        for (const auto& [k, c] : terms_)
            if (k.lam < m) m = k.lam;
        return terms_.empty() ? 0 : m;
    }

    unsigned max_total() const {
        return terms_.empty() ? 0 : terms_.rbegin()->first.total();
    }

    WeylElem truncated_total(unsigned new_budget) const {
        WeylElem r(dim_, new_budget);
        for (const auto& [k, c] : terms_) r.add_term(k, c);
        return r;
    }

    WeylElem truncated_lambda(unsigned max_lam) const {
        WeylElem r(dim_, budget_);
        for (const auto& [k, c] : terms_)
            if (k.lam <= max_lam) r.add_term(k, c);
        return r;
    }

    // Part of exact total degree d.
    WeylElem graded_part(unsigned d) const {
        WeylElem r(dim_, budget_);
        for (const auto& [k, c] : terms_)
            if (k.total() == d) r.add_term(k, c);
        return r;
    }

    // Multiply by lambda^by; negative shifts require divisibility.
    WeylElem lambda_shifted(int by) const {
        WeylElem r(dim_, budget_);
        for (const auto& [k, c] : terms_) {
            int nl = static_cast<int>(k.lam) + by;
            if (nl < 0)
                throw std::domain_error("element is not divisible by the formal parameter");
            r.add_term(WeylKey{k.xi, static_cast<unsigned>(nl)}, c);
        }
        return r;
    }

private:
    void require_same_space(const WeylElem& o) const {
        if (dim_ != o.dim_ || budget_ != o.budget_)
            throw std::invalid_argument("mismatched fiber spaces");
    }

    int dim_ = 0;
    unsigned budget_ = 0;
    std::map<WeylKey, C, WeylKeyOrder> terms_;
};

template <class C>
class WeylForm {
public:
    WeylForm() = default;
    WeylForm(int dim, int form_deg, unsigned budget)
        : dim_(dim), deg_(form_deg), budget_(budget) {
        if (form_deg < 0 || form_deg > 3) throw std::invalid_argument("form degree out of range");
    }

    static WeylForm scalar(const WeylElem<C>& e) {
        WeylForm f(e.dim(), 0, e.budget());
        if (!e.is_zero()) f.comps_.emplace(FormIdx{}, e);
        return f;
    }

    int dim() const noexcept { return dim_; }
    int degree() const noexcept { return deg_; }
    unsigned budget() const noexcept { return budget_; }
    bool is_zero() const noexcept { return comps_.empty(); }

    const std::map<FormIdx, WeylElem<C>>& components() const noexcept { return comps_; }

    WeylElem<C> component(const FormIdx& idx) const {
        auto it = comps_.find(idx);
        return it == comps_.end() ? WeylElem<C>(dim_, budget_) : it->second;
    }

    WeylElem<C> as_element() const {
        if (deg_ != 0) throw std::logic_error("only 0-forms convert to elements");
        return component(FormIdx{});
    }

    void add_component(const FormIdx& idx, const WeylElem<C>& e) {
        if (static_cast<int>(idx.count) != deg_)
            throw std::invalid_argument("component degree mismatch");
        if (e.is_zero()) return;
        auto [it, fresh] = comps_.try_emplace(idx, e);
        if (!fresh) {
            it->second += e;
            if (it->second.is_zero()) comps_.erase(it);
        }
    }

    void add_term(const FormIdx& idx, const WeylKey& k, const C& c) {
        if (static_cast<int>(idx.count) != deg_)
            throw std::invalid_argument("component degree mismatch");
        if (c.is_zero()) return;
        auto it = comps_.find(idx);
        if (it == comps_.end()) it = comps_.emplace(idx, WeylElem<C>(dim_, budget_)).first;
        it->second.add_term(k, c);
        if (it->second.is_zero()) comps_.erase(it);
    }

    void add_signed(std::vector<int> axes, const WeylKey& k, const C& c) {
        auto [idx, sign] = normalize_axes(std::move(axes));
        if (sign == 0) return;
        if (sign > 0) {
            add_term(idx, k, c);
        } else {
            C n = c;
            n *= GaussRational(-1);
            add_term(idx, k, n);
        }
    }

    WeylForm& operator+=(const WeylForm& o) {
        require_same_shape(o);
        for (const auto& [idx, e] : o.comps_) add_component(idx, e);
        return *this;
    }
    WeylForm& operator-=(const WeylForm& o) {
        require_same_shape(o);
        for (const auto& [idx, e] : o.comps_) {
            WeylElem<C> n = e;
            n *= GaussRational(-1);
            add_component(idx, n);
        }
        return *this;
    }
    WeylForm& operator*=(const GaussRational& s) {
        if (s.is_zero()) {
            comps_.clear();
            return *this;
        }
        std::map<FormIdx, WeylElem<C>> out;
        for (auto& [idx, e] : comps_) {
            e *= s;
            if (!e.is_zero()) out.emplace(idx, std::move(e));
        }
        comps_ = std::move(out);
        return *this;
    }

    friend WeylForm operator+(WeylForm a, const WeylForm& b) { return a += b; }
    friend WeylForm operator-(WeylForm a, const WeylForm& b) { return a -= b; }
    friend WeylForm operator*(WeylForm a, const GaussRational& s) { return a *= s; }
    friend WeylForm operator*(const GaussRational& s, WeylForm a) { return a *= s; }

    friend bool operator==(const WeylForm& a, const WeylForm& b) {
        return a.dim_ == b.dim_ && a.deg_ == b.deg_ && a.comps_ == b.comps_;
    }
    friend bool operator!=(const WeylForm& a, const WeylForm& b) { return !(a == b); }

    unsigned max_total() const {
        unsigned m = 0;
        for (const auto& [idx, e] : comps_)
            if (!e.is_zero() && e.max_total() > m) m = e.max_total();
        return m;
    }

    WeylForm graded_part(unsigned d) const {
        WeylForm r(dim_, deg_, budget_);
        for (const auto& [idx, e] : comps_) r.add_component(idx, e.graded_part(d));
        return r;
    }

    WeylForm lambda_shifted(int by) const {
        WeylForm r(dim_, deg_, budget_);
        for (const auto& [idx, e] : comps_) r.add_component(idx, e.lambda_shifted(by));
        return r;
    }

    WeylForm truncated_total(unsigned new_budget) const {
        WeylForm r(dim_, deg_, new_budget);
        for (const auto& [idx, e] : comps_) {
            WeylElem<C> t = e.truncated_total(new_budget);
            if (!t.is_zero()) r.comps_.emplace(idx, std::move(t));
        }
        return r;
    }

private:
    void require_same_shape(const WeylForm& o) const {
        if (dim_ != o.dim_ || deg_ != o.deg_ || budget_ != o.budget_)
            throw std::invalid_argument("mismatched form spaces");
    }

    int dim_ = 0;
    int deg_ = 0;
    unsigned budget_ = 0;
    std::map<FormIdx, WeylElem<C>> comps_;
};

namespace detail {

inline std::vector<std::tuple<int, int, GaussRational>> nonzero_entries(const Mat& mu) {
    std::vector<std::tuple<int, int, GaussRational>> out;
    int n = mat_dim(mu);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const GaussRational& v = mu[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (!v.is_zero()) out.emplace_back(i, j, v);
        }
    return out;
}

inline BigInt falling(unsigned m, unsigned r) {
    BigInt f = 1;
    for (unsigned k = 0; k < r; ++k) f *= (m - k);
    return f;
}

}  // namespace detail

/*
 * Fiberwise product for a pairing tensor mu. Each contraction multiset nu over
 * nonzero entries of mu contributes
 *
 *   (-i/2)^{|nu|} * prod (mu^{ij})^{nu_ij}/nu_ij!
 *   * [d_xi^{rows(nu)} xi^{m_a}] [d_xi^{cols(nu)} xi^{m_b}] * lambda^{|nu|}.
 *
 * Total degree is additive, which drives the early break.
 */
template <class A, class B>
auto fiber_mul(const WeylElem<A>& a, const WeylElem<B>& b, const Mat& mu)
    -> WeylElem<decltype(mul_coeff(std::declval<const A&>(), std::declval<const B&>()))> {
    using C = decltype(mul_coeff(std::declval<const A&>(), std::declval<const B&>()));
    if (a.dim() != b.dim() || a.budget() != b.budget())
        throw std::invalid_argument("mismatched fiber spaces");
    WeylElem<C> r(a.dim(), a.budget());
    auto entries = detail::nonzero_entries(mu);
    const GaussRational half_i(BigRational(0), BigRational(-1, 2));

    for (const auto& [ka, ca] : a.terms()) {
        for (const auto& [kb, cb] : b.terms()) {
            if (ka.total() + kb.total() > a.budget()) break;
            C cc = mul_coeff(ca, cb);
            if (cc.is_zero()) continue;

            // enumerate contraction multisets
            std::vector<unsigned> rowuse(static_cast<size_t>(a.dim()), 0);
            std::vector<unsigned> coluse(static_cast<size_t>(a.dim()), 0);
            auto emit = [&](unsigned order, const GaussRational& factor) {
                BigInt fall = 1;
                MultiIndex xa = ka.xi, xb = kb.xi;
                for (int ax = 0; ax < a.dim(); ++ax) {
                    unsigned ru = rowuse[static_cast<size_t>(ax)];
                    unsigned cu = coluse[static_cast<size_t>(ax)];
                    if (ru) {
                        fall *= detail::falling(ka.xi[ax], ru);
                        xa.bump(ax, -static_cast<int>(ru));
                    }
                    if (cu) {
                        fall *= detail::falling(kb.xi[ax], cu);
                        xb.bump(ax, -static_cast<int>(cu));
                    }
                }
                GaussRational scalar = factor * pow(half_i, order) * rational_of(fall);
                WeylKey key{xa.plus(xb), ka.lam + kb.lam + order};
                C term = cc;
                term *= scalar;
                r.add_term(key, term);
            };
            auto rec = [&](auto&& self, size_t e, unsigned order,
                           GaussRational factor) -> void {
                if (e == entries.size()) {
                    emit(order, factor);
                    return;
                }
                const auto& [i, j, v] = entries[e];
                unsigned cap_i = ka.xi[i] - rowuse[static_cast<size_t>(i)];
                unsigned cap_j = kb.xi[j] - coluse[static_cast<size_t>(j)];
                unsigned cap = cap_i < cap_j ? cap_i : cap_j;
                GaussRational f = factor;
                for (unsigned nu = 0; nu <= cap; ++nu) {
                    if (nu) {
                        rowuse[static_cast<size_t>(i)] += 1;
                        coluse[static_cast<size_t>(j)] += 1;
                        f = f * v / GaussRational(static_cast<long>(nu));
                    }
                    self(self, e + 1, order + nu, f);
                }
                rowuse[static_cast<size_t>(i)] -= cap;
                coluse[static_cast<size_t>(j)] -= cap;
            };
            rec(rec, 0, 0, GaussRational(1));
        }
    }
    return r;
}

template <class A, class B>
auto fiber_mul(const WeylForm<A>& a, const WeylForm<B>& b, const Mat& mu)
    -> WeylForm<decltype(mul_coeff(std::declval<const A&>(), std::declval<const B&>()))> {
    using C = decltype(mul_coeff(std::declval<const A&>(), std::declval<const B&>()));
    WeylForm<C> r(a.dim(), a.degree() + b.degree(), a.budget());
    for (const auto& [ia, ea] : a.components())
        for (const auto& [ib, eb] : b.components()) {
            std::vector<int> axes;
            for (int k = 0; k < ia.count; ++k) axes.push_back(ia.axes[static_cast<size_t>(k)]);
            for (int k = 0; k < ib.count; ++k) axes.push_back(ib.axes[static_cast<size_t>(k)]);
            auto [idx, sign] = normalize_axes(std::move(axes));
            if (sign == 0) continue;
            WeylElem<C> prod = fiber_mul(ea, eb, mu);
            if (sign < 0) prod *= GaussRational(-1);
            r.add_component(idx, prod);
        }
    return r;
}

// Graded commutator of form-valued elements; the sign follows form degrees.
template <class A, class B>
auto super_commutator(const WeylForm<A>& a, const WeylForm<B>& b, const Mat& mu) {
    auto left = fiber_mul(a, b, mu);
    auto right = fiber_mul(b, a, mu);
    if ((a.degree() * b.degree()) % 2 != 0)
        return left + right;
    return left - right;
}

// delta: moves one fiber variable into a new leftmost exterior leg.
template <class C>
WeylForm<C> delta_op(const WeylForm<C>& a) {
    WeylForm<C> r(a.dim(), a.degree() + 1, a.budget());
    for (const auto& [idx, e] : a.components())
        for (const auto& [key, c] : e.terms())
            for (int i = 0; i < a.dim(); ++i) {
                if (!key.xi[i]) continue;
                MultiIndex m = key.xi;
                m.bump(i, -1);
                C scaled = c;
                scaled *= GaussRational(static_cast<long>(key.xi[i]));
                std::vector<int> axes{i};
                for (int k = 0; k < idx.count; ++k)
                    axes.push_back(idx.axes[static_cast<size_t>(k)]);
                r.add_signed(std::move(axes), WeylKey{m, key.lam}, scaled);
            }
    return r;
}

// delta^{-1}: the normalized homotopy inverse. On a term of fiber degree s in
// a p-form it contracts each exterior leg into a fiber variable with weight
// 1/(s+p); zero on 0-forms.
template <class C>
WeylForm<C> delta_inv_op(const WeylForm<C>& a) {
    if (a.degree() == 0) return WeylForm<C>(a.dim(), 0, a.budget());
    WeylForm<C> r(a.dim(), a.degree() - 1, a.budget());
    for (const auto& [idx, e] : a.components())
        for (const auto& [key, c] : e.terms()) {
            unsigned s = key.xi.degree();
            GaussRational w(1, static_cast<long>(s) + a.degree());
            for (int pos = 0; pos < idx.count; ++pos) {
                int axis = idx.axes[static_cast<size_t>(pos)];
                MultiIndex m = key.xi;
                m.bump(axis, 1);
                C scaled = c;
                scaled *= (pos % 2 == 0 ? w : -w);
                FormIdx rest;
                for (int k = 0; k < idx.count; ++k) {
                    if (k == pos) continue;
                    rest.axes[static_cast<size_t>(rest.count)] = idx.axes[static_cast<size_t>(k)];
                    rest.count += 1;
                }
                r.add_term(rest, WeylKey{m, key.lam}, scaled);
            }
        }
    return r;
}

// d/d xi^axis on fiber monomials.
template <class C>
WeylElem<C> xi_derivative(const WeylElem<C>& a, int axis) {
    WeylElem<C> r(a.dim(), a.budget());
    for (const auto& [key, c] : a.terms()) {
        if (!key.xi[axis]) continue;
        MultiIndex m = key.xi;
        m.bump(axis, -1);
        C scaled = c;
        scaled *= GaussRational(static_cast<long>(key.xi[axis]));
        r.add_term(WeylKey{m, key.lam}, scaled);
    }
    return r;
}

// xi^axis times a; terms pushed over the budget are dropped.
template <class C>
WeylElem<C> xi_multiply(const WeylElem<C>& a, int axis) {
    WeylElem<C> r(a.dim(), a.budget());
    for (const auto& [key, c] : a.terms()) {
        MultiIndex m = key.xi;
        m.bump(axis, 1);
        r.add_term(WeylKey{m, key.lam}, c);
    }
    return r;
}

// Chart derivative of every coefficient; fiber content untouched.
template <class C>
WeylElem<C> base_derivative(const WeylElem<C>& a, int axis) {
    WeylElem<C> r(a.dim(), a.budget());
    for (const auto& [key, c] : a.terms()) r.add_term(key, coeff_xderiv(c, axis));
    return r;
}

// Multiply every coefficient by a chart polynomial.
template <class C>
WeylElem<C> poly_scale(const ChartPoly& p, const WeylElem<C>& a) {
    WeylElem<C> r(a.dim(), a.budget());
    if (p.is_zero()) return r;
    for (const auto& [key, c] : a.terms()) r.add_term(key, scale_by_poly(p, c));
    return r;
}

// Central (fiber-constant) part of a 0-form, per power of the parameter.
template <class C>
std::map<unsigned, C> central_part(const WeylElem<C>& a) {
    std::map<unsigned, C> out;
    for (const auto& [key, c] : a.terms())
        if (key.xi.is_zero()) out.emplace(key.lam, c);
    return out;
}

inline LambdaPoly central_lambda(const WeylElem<ChartPoly>& a, unsigned order) {
    LambdaPoly f(a.dim(), order);
    for (const auto& [key, c] : a.terms())
        if (key.xi.is_zero() && key.lam <= order) f.add_coeff(key.lam, c);
    return f;
}

inline WeylElem<ChartPoly> embed_scalar(const LambdaPoly& f, unsigned budget) {
    WeylElem<ChartPoly> r(f.dim(), budget);
    for (const auto& [k, p] : f.coeffs()) r.add_term(WeylKey{MultiIndex{}, k}, p);
    return r;
}

inline WeylElem<ChartPoly> embed_poly(const ChartPoly& f, unsigned budget) {
    WeylElem<ChartPoly> r(f.dim(), budget);
    r.add_term(WeylKey{}, f);
    return r;
}

inline WeylElem<ChartPoly> weyl_unit(int dim, unsigned budget) {
    return embed_poly(ChartPoly(dim, GaussRational(1)), budget);
}

// Fiberwise Taylor lift sum_m (d^m f / m!) xi^m; the flat-connection section.
inline WeylElem<ChartPoly> xi_taylor_lift(const ChartPoly& f, unsigned budget) {
    WeylElem<ChartPoly> r(f.dim(), budget);
    for (const auto& m : monomials_up_to(f.dim(), budget)) {
        ChartPoly d = f.derivative(m);
        if (d.is_zero()) continue;
        GaussRational w = rational_of(BigInt(1), m.factorial_product());
        r.add_term(WeylKey{m, 0}, w * d);
    }
    return r;
}

inline std::string weyl_str(const WeylElem<ChartPoly>& a) {
    if (a.is_zero()) return "0";
    std::string out;
    for (const auto& [key, c] : a.terms()) {
        if (!out.empty()) out += " + ";
        out += "(" + c.str() + ")";
        if (!key.xi.is_zero()) out += "*" + key.xi.str("xi");
        if (key.lam == 1)
            out += "*lambda";
        else if (key.lam > 1)
            out += "*lambda^" + std::to_string(key.lam);
    }
    return out;
}

inline std::string weyl_str(const WeylForm<ChartPoly>& a) {
    if (a.is_zero()) return "0";
    std::string out;
    for (const auto& [idx, e] : a.components()) {
        if (!out.empty()) out += " + ";
        out += "[" + weyl_str(e) + "]";
        if (idx.count) out += "*" + idx.str();
    }
    return out;
}

}  // namespace starprod
