#pragma once

/*
 * ChartPoly: polynomial in chart coordinates x1..xdim with GaussRational
 * coefficients, stored sparsely (no zero coefficients survive any operation).
 * LambdaPoly: polynomial in the formal parameter with ChartPoly coefficients
 * and a hard truncation order; arithmetic drops every power above it. The
 * formal parameter is a grading index, never a chart variable.
 */

#include "starprod/gauss_rational.hpp"
#include "starprod/multi_index.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace starprod {

class ChartPoly {
public:
    ChartPoly() = default;
    explicit ChartPoly(int dim) : dim_(dim) { check_dim(dim); }
    ChartPoly(int dim, const GaussRational& c) : dim_(dim) {
        check_dim(dim);
        if (!c.is_zero()) terms_[MultiIndex{}] = c;
    }

    static ChartPoly monomial(int dim, const MultiIndex& m, const GaussRational& c) {
        ChartPoly p(dim);
        if (m.max_axis() >= dim) throw std::invalid_argument("monomial axis beyond dimension");
        if (!c.is_zero()) p.terms_[m] = c;
        return p;
    }
    static ChartPoly variable(int dim, int axis) {
        return monomial(dim, MultiIndex::unit(axis), GaussRational(1));
    }

    int dim() const noexcept { return dim_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    size_t term_count() const noexcept { return terms_.size(); }

    unsigned degree() const noexcept {
        // graded order: last term has maximal degree
        return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
    }

    const std::map<MultiIndex, GaussRational, GradedLex>& terms() const noexcept {
        return terms_;
    }

    GaussRational coeff(const MultiIndex& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? GaussRational() : it->second;
    }

    void add_term(const MultiIndex& m, const GaussRational& c) {
        if (c.is_zero()) return;
        if (m.max_axis() >= dim_) throw std::invalid_argument("term axis beyond dimension");
        auto [it, fresh] = terms_.try_emplace(m, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    ChartPoly& operator+=(const ChartPoly& o) {
        require_same_dim(o);
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    ChartPoly& operator-=(const ChartPoly& o) {
        require_same_dim(o);
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    ChartPoly& operator*=(const GaussRational& s) {
        if (s.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, c] : terms_) c *= s;
        return *this;
    }

    friend ChartPoly operator+(ChartPoly a, const ChartPoly& b) { return a += b; }
    friend ChartPoly operator-(ChartPoly a, const ChartPoly& b) { return a -= b; }
    friend ChartPoly operator*(ChartPoly a, const GaussRational& s) { return a *= s; }
    friend ChartPoly operator*(const GaussRational& s, ChartPoly a) { return a *= s; }

    friend ChartPoly operator*(const ChartPoly& a, const ChartPoly& b) {
        a.require_same_dim(b);
        ChartPoly r(a.dim_);
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) r.add_term(ma.plus(mb), ca * cb);
        return r;
    }

    friend bool operator==(const ChartPoly& a, const ChartPoly& b) {
        return a.dim_ == b.dim_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const ChartPoly& a, const ChartPoly& b) { return !(a == b); }

    ChartPoly derivative(int axis) const {
        ChartPoly r(dim_);
        for (const auto& [m, c] : terms_) {
            if (!m[axis]) continue;
            MultiIndex d = m;
            d.bump(axis, -1);
            r.add_term(d, c * GaussRational(static_cast<long>(m[axis])));
        }
        return r;
    }

    ChartPoly derivative(const MultiIndex& order) const {
        ChartPoly r = *this;
        for (int k = 0; k < kMaxVars; ++k)
            for (unsigned j = 0; j < order[k]; ++j) r = r.derivative(k);
        return r;
    }

    // Substitute 0 for every axis in `axes`; the result is a polynomial in the
    // remaining coordinates (dimension unchanged).
    ChartPoly restrict_zero(const std::set<int>& axes) const {
        ChartPoly r(dim_);
        for (const auto& [m, c] : terms_) {
            bool kill = false;
            for (int a : axes)
                if (m[a]) {
                    kill = true;
                    break;
                }
            if (!kill) r.add_term(m, c);
        }
        return r;
    }

    bool depends_on(int axis) const noexcept {
        for (const auto& [m, c] : terms_)
            if (m[axis]) return true;
        return false;
    }

    // Full evaluation at a rational point.
    GaussRational eval(const std::vector<GaussRational>& x) const {
        if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("point dimension");
        GaussRational acc;
        for (const auto& [m, c] : terms_) {
            GaussRational t = c;
            for (int k = 0; k < dim_; ++k)
                if (m[k]) t *= pow(x[static_cast<size_t>(k)], m[k]);
            acc += t;
        }
        return acc;
    }

    std::string str(const std::string& stem = "x") const {
        if (terms_.empty()) return "0";
        std::string out;
        for (const auto& [m, c] : terms_) {
            std::string cs = c.str();
            bool single_component = c.is_real() || c.re().is_zero();
            if (!out.empty()) {
                if (single_component && cs.size() && cs[0] == '-') {
                    out += " - ";
                    cs = cs.substr(1);
                } else {
                    out += " + ";
                }
            }
            if (m.is_zero()) {
                out += cs;
            } else if (cs == "1") {
                out += m.str(stem);
            } else if (cs == "-1" && out.empty()) {
                out += "-" + m.str(stem);
            } else {
                bool wrap = cs.find('+') != std::string::npos ||
                            cs.find('-', 1) != std::string::npos;
                out += (wrap ? "(" + cs + ")" : cs) + "*" + m.str(stem);
            }
        }
        return out;
    }

private:
    static void check_dim(int dim) {
        if (dim < 0 || dim > kMaxVars) throw std::invalid_argument("dimension out of range");
    }
    void require_same_dim(const ChartPoly& o) const {
        if (dim_ != o.dim_) throw std::invalid_argument("dimension mismatch");
    }

    int dim_ = 0;
    std::map<MultiIndex, GaussRational, GradedLex> terms_;
};

class LambdaPoly {
public:
    LambdaPoly() = default;
    LambdaPoly(int dim, unsigned order) : dim_(dim), order_(order) {}
    LambdaPoly(const ChartPoly& constant, unsigned order)
        : dim_(constant.dim()), order_(order) {
        set_coeff(0, constant);
    }

    int dim() const noexcept { return dim_; }
    unsigned order() const noexcept { return order_; }
    bool is_zero() const noexcept { return coeffs_.empty(); }

    const std::map<unsigned, ChartPoly>& coeffs() const noexcept { return coeffs_; }

    ChartPoly coeff(unsigned k) const {
        auto it = coeffs_.find(k);
        return it == coeffs_.end() ? ChartPoly(dim_) : it->second;
    }

    void set_coeff(unsigned k, const ChartPoly& p) {
        if (p.dim() != dim_) throw std::invalid_argument("dimension mismatch");
        if (k > order_ || p.is_zero())
            coeffs_.erase(k);
        else
            coeffs_[k] = p;
    }

    void add_coeff(unsigned k, const ChartPoly& p) {
        if (k > order_) return;
        set_coeff(k, coeff(k) + p);
    }

    LambdaPoly truncated(unsigned new_order) const {
        LambdaPoly r(dim_, new_order);
        for (const auto& [k, p] : coeffs_)
            if (k <= new_order) r.coeffs_[k] = p;
        return r;
    }

    LambdaPoly& operator+=(const LambdaPoly& o) {
        require_compatible(o);
        for (const auto& [k, p] : o.coeffs_) add_coeff(k, p);
        return *this;
    }
    LambdaPoly& operator-=(const LambdaPoly& o) {
        require_compatible(o);
        for (const auto& [k, p] : o.coeffs_) add_coeff(k, ChartPoly(dim_) - p);
        return *this;
    }
    LambdaPoly& operator*=(const GaussRational& s) {
        std::map<unsigned, ChartPoly> out;
        for (auto& [k, p] : coeffs_) {
            p *= s;
            if (!p.is_zero()) out.emplace(k, std::move(p));
        }
        coeffs_ = std::move(out);
        return *this;
    }

    friend LambdaPoly operator+(LambdaPoly a, const LambdaPoly& b) { return a += b; }
    friend LambdaPoly operator-(LambdaPoly a, const LambdaPoly& b) { return a -= b; }
    friend LambdaPoly operator*(LambdaPoly a, const GaussRational& s) { return a *= s; }

    friend LambdaPoly operator*(const LambdaPoly& a, const LambdaPoly& b) {
        a.require_compatible(b);
        LambdaPoly r(a.dim_, a.order_);
        for (const auto& [ka, pa] : a.coeffs_)
            for (const auto& [kb, pb] : b.coeffs_) {
                if (ka + kb > a.order_) continue;
                r.add_coeff(ka + kb, pa * pb);
            }
        return r;
    }

    friend bool operator==(const LambdaPoly& a, const LambdaPoly& b) {
        return a.dim_ == b.dim_ && a.order_ == b.order_ && a.coeffs_ == b.coeffs_;
    }
    friend bool operator!=(const LambdaPoly& a, const LambdaPoly& b) { return !(a == b); }

    LambdaPoly restrict_zero(const std::set<int>& axes) const {
        LambdaPoly r(dim_, order_);
        for (const auto& [k, p] : coeffs_) r.set_coeff(k, p.restrict_zero(axes));
        return r;
    }

    std::string str(const std::string& stem = "x") const {
        if (coeffs_.empty()) return "0";
        std::string out;
        for (const auto& [k, p] : coeffs_) {
            if (!out.empty()) out += " + ";
            std::string ps = p.str(stem);
            if (k == 0) {
                out += ps;
                continue;
            }
            std::string lam = k == 1 ? "lambda" : "lambda^" + std::to_string(k);
            if (ps == "1")
                out += lam;
            else
                out += lam + "*(" + ps + ")";
        }
        return out;
    }

private:
    void require_compatible(const LambdaPoly& o) const {
        if (dim_ != o.dim_ || order_ != o.order_)
            throw std::invalid_argument("lambda-poly shape mismatch");
    }

    int dim_ = 0;
    unsigned order_ = 0;
    std::map<unsigned, ChartPoly> coeffs_;
};

}  // namespace starprod
