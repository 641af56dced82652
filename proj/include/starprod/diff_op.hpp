#pragma once

/*
 * Differential operators with polynomial coefficients, unary and multilinear,
 * plus the Hochschild complex of the function algebra in its
 * multidifferential model:
 *
 *   - DiffOp1: sum c_alpha(x) d^alpha, also usable as the coefficient type of
 *     the Weyl containers (that instantiation computes sections of the Weyl
 *     bundle whose coefficients are operators acting on an argument),
 *   - MultiDiffOp: n-linear operator, table (alpha_1..alpha_n) -> c(x),
 *   - differential b (literal simplicial formula), Gerstenhaber circle
 *     product and bracket, order-by-order associativity residual
 *     2 b(star_n) - sum_{i=1}^{n-1} [star_i, star_{n-i}],
 *   - the principal-part correspondence between bidifferential 2-cochains,
 *     bivectors, and 2-forms through the symplectic tensor.
 *
 * Everything is exact; coefficients never leave ChartPoly.
 */

#include "starprod/chart_poly.hpp"
#include "starprod/scalar_form.hpp"
#include "starprod/symplectic.hpp"
#include "starprod/weyl.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace starprod {

inline constexpr int kMaxArity = 5;

// All beta with beta <= a componentwise.
inline std::vector<MultiIndex> sub_indices(const MultiIndex& a) {
    std::vector<MultiIndex> out{MultiIndex{}};
    for (int ax = 0; ax < kMaxVars; ++ax) {
        if (!a[ax]) continue;
        std::vector<MultiIndex> next;
        next.reserve(out.size() * (a[ax] + 1u));
        for (const auto& m : out)
            for (unsigned e = 0; e <= a[ax]; ++e) {
                MultiIndex t = m;
                if (e) t.bump(ax, static_cast<int>(e));
                next.push_back(t);
            }
        out = std::move(next);
    }
    return out;
}

// Every ordered split of alpha into `parts` multi-indices, with the
// multinomial coefficient alpha! / prod(part!).
template <class F>
void for_each_split(const MultiIndex& alpha, int parts, F&& fn) {
    std::vector<MultiIndex> cur(static_cast<size_t>(parts));
    auto rec = [&](auto&& self, int at, const MultiIndex& left, const BigInt& acc) -> void {
        if (at == parts - 1) {
            cur[static_cast<size_t>(at)] = left;
            fn(cur, acc);
            return;
        }
        for (const auto& b : sub_indices(left)) {
            cur[static_cast<size_t>(at)] = b;
            self(self, at + 1, left.minus(b), acc * left.binomial_product(b));
        }
    };
    rec(rec, 0, alpha, BigInt(1));
}

class DiffOp1 {
public:
    DiffOp1() = default;
    explicit DiffOp1(int dim) : dim_(dim) {}

    static DiffOp1 identity(int dim) {
        DiffOp1 t(dim);
        t.add_op(MultiIndex{}, ChartPoly(dim, GaussRational(1)));
        return t;
    }

    int dim() const noexcept { return dim_; }
    bool is_zero() const noexcept { return ops_.empty(); }

    const std::map<MultiIndex, ChartPoly, GradedLex>& ops() const noexcept { return ops_; }

    ChartPoly coeff(const MultiIndex& a) const {
        auto it = ops_.find(a);
        return it == ops_.end() ? ChartPoly(dim_) : it->second;
    }

    void add_op(const MultiIndex& a, const ChartPoly& c) {
        if (c.is_zero()) return;
        if (a.max_axis() >= dim_) throw std::invalid_argument("operator axis beyond dimension");
        auto [it, fresh] = ops_.try_emplace(a, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) ops_.erase(it);
        }
    }

    DiffOp1& operator+=(const DiffOp1& o) {
        require_same(o);
        for (const auto& [a, c] : o.ops_) add_op(a, c);
        return *this;
    }
    DiffOp1& operator-=(const DiffOp1& o) {
        require_same(o);
        for (const auto& [a, c] : o.ops_) add_op(a, ChartPoly(dim_) - c);
        return *this;
    }
    DiffOp1& operator*=(const GaussRational& s) {
        if (s.is_zero()) {
            ops_.clear();
            return *this;
        }
        for (auto& [a, c] : ops_) c *= s;
        return *this;
    }

    friend DiffOp1 operator+(DiffOp1 a, const DiffOp1& b) { return a += b; }
    friend DiffOp1 operator-(DiffOp1 a, const DiffOp1& b) { return a -= b; }
    friend DiffOp1 operator*(DiffOp1 a, const GaussRational& s) { return a *= s; }
    friend DiffOp1 operator*(const GaussRational& s, DiffOp1 a) { return a *= s; }

    friend bool operator==(const DiffOp1& a, const DiffOp1& b) {
        return a.dim_ == b.dim_ && a.ops_ == b.ops_;
    }
    friend bool operator!=(const DiffOp1& a, const DiffOp1& b) { return !(a == b); }

    ChartPoly apply(const ChartPoly& f) const {
        ChartPoly r(dim_);
        for (const auto& [a, c] : ops_) r += c * f.derivative(a);
        return r;
    }

    unsigned max_order() const {
        unsigned m = 0;
        for (const auto& [a, c] : ops_)
            if (a.degree() > m) m = a.degree();
        return m;
    }

private:
    void require_same(const DiffOp1& o) const {
        if (dim_ != o.dim_) throw std::invalid_argument("dimension mismatch");
    }

    int dim_ = 0;
    std::map<MultiIndex, ChartPoly, GradedLex> ops_;
};

// A then B applied first: (A o B)(f) = A(B(f)).
inline DiffOp1 compose(const DiffOp1& A, const DiffOp1& B) {
    DiffOp1 r(A.dim());
    for (const auto& [g, a] : A.ops())
        for (const auto& [d, b] : B.ops())
            for_each_split(g, 2, [&](const std::vector<MultiIndex>& parts, const BigInt& mn) {
                ChartPoly db = b.derivative(parts[0]);
                if (db.is_zero()) return;
                r.add_op(d.plus(parts[1]), rational_of(mn) * (a * db));
            });
    return r;
}

// Coefficient-trait overloads: these make WeylElem<DiffOp1> work. The scalar
// multiplying an operator-valued coefficient always multiplies the output
// function, so both sides act identically.
inline DiffOp1 mul_coeff(const ChartPoly& p, const DiffOp1& t) {
    DiffOp1 r(t.dim());
    for (const auto& [a, c] : t.ops()) r.add_op(a, p * c);
    return r;
}
inline DiffOp1 mul_coeff(const DiffOp1& t, const ChartPoly& p) { return mul_coeff(p, t); }
inline DiffOp1 scale_by_poly(const ChartPoly& p, const DiffOp1& t) { return mul_coeff(p, t); }

// d_axis after t: the x-derivative of the operator-valued coefficient.
inline DiffOp1 coeff_xderiv(const DiffOp1& t, int axis) {
    DiffOp1 r(t.dim());
    for (const auto& [a, c] : t.ops()) {
        r.add_op(a, c.derivative(axis));
        MultiIndex up = a;
        up.bump(axis, 1);
        r.add_op(up, c);
    }
    return r;
}

class MultiDiffOp {
public:
    using Key = std::vector<MultiIndex>;

    MultiDiffOp() = default;
    MultiDiffOp(int dim, int arity) : dim_(dim), arity_(arity) {
        if (arity < 1 || arity > kMaxArity) throw std::invalid_argument("arity out of range");
    }

    // The pointwise multiplication cochain.
    static MultiDiffOp mult(int dim, int arity) {
        MultiDiffOp m(dim, arity);
        m.add_op(Key(static_cast<size_t>(arity)), ChartPoly(dim, GaussRational(1)));
        return m;
    }

    int dim() const noexcept { return dim_; }
    int arity() const noexcept { return arity_; }
    bool is_zero() const noexcept { return ops_.empty(); }

    const std::map<Key, ChartPoly>& ops() const noexcept { return ops_; }

    ChartPoly coeff(const Key& k) const {
        auto it = ops_.find(k);
        return it == ops_.end() ? ChartPoly(dim_) : it->second;
    }

    void add_op(const Key& k, const ChartPoly& c) {
        if (c.is_zero()) return;
        if (static_cast<int>(k.size()) != arity_)
            throw std::invalid_argument("entry arity mismatch");
        for (const auto& a : k)
            if (a.max_axis() >= dim_)
                throw std::invalid_argument("operator axis beyond dimension");
        auto [it, fresh] = ops_.try_emplace(k, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) ops_.erase(it);
        }
    }

    MultiDiffOp& operator+=(const MultiDiffOp& o) {
        require_same(o);
        for (const auto& [k, c] : o.ops_) add_op(k, c);
        return *this;
    }
    MultiDiffOp& operator-=(const MultiDiffOp& o) {
        require_same(o);
        for (const auto& [k, c] : o.ops_) add_op(k, ChartPoly(dim_) - c);
        return *this;
    }
    MultiDiffOp& operator*=(const GaussRational& s) {
        if (s.is_zero()) {
            ops_.clear();
            return *this;
        }
        for (auto& [k, c] : ops_) c *= s;
        return *this;
    }

    friend MultiDiffOp operator+(MultiDiffOp a, const MultiDiffOp& b) { return a += b; }
    friend MultiDiffOp operator-(MultiDiffOp a, const MultiDiffOp& b) { return a -= b; }
    friend MultiDiffOp operator*(MultiDiffOp a, const GaussRational& s) { return a *= s; }
    friend MultiDiffOp operator*(const GaussRational& s, MultiDiffOp a) { return a *= s; }

    friend bool operator==(const MultiDiffOp& a, const MultiDiffOp& b) {
        return a.dim_ == b.dim_ && a.arity_ == b.arity_ && a.ops_ == b.ops_;
    }
    friend bool operator!=(const MultiDiffOp& a, const MultiDiffOp& b) { return !(a == b); }

    ChartPoly apply(const std::vector<ChartPoly>& args) const {
        if (static_cast<int>(args.size()) != arity_)
            throw std::invalid_argument("argument count mismatch");
        ChartPoly r(dim_);
        for (const auto& [k, c] : ops_) {
            ChartPoly t = c;
            for (size_t j = 0; j < args.size() && !t.is_zero(); ++j)
                t = t * args[j].derivative(k[j]);
            r += t;
        }
        return r;
    }

    // Largest derivative order hitting argument `slot`.
    unsigned max_order(int slot) const {
        unsigned m = 0;
        for (const auto& [k, c] : ops_)
            if (k[static_cast<size_t>(slot)].degree() > m) m = k[static_cast<size_t>(slot)].degree();
        return m;
    }

    unsigned max_order_any() const {
        unsigned m = 0;
        for (int s = 0; s < arity_; ++s)
            if (max_order(s) > m) m = max_order(s);
        return m;
    }

private:
    void require_same(const MultiDiffOp& o) const {
        if (dim_ != o.dim_ || arity_ != o.arity_)
            throw std::invalid_argument("cochain shape mismatch");
    }

    int dim_ = 0;
    int arity_ = 2;
    std::map<Key, ChartPoly> ops_;
};

/*
 * Hochschild differential, literally
 *
 *   (bC)(f0..fn) = f0 C(f1..fn)
 *                + sum_{i=0}^{n-1} (-1)^{i+1} C(f0 .. f_i f_{i+1} .. fn)
 *                + (-1)^{n-1} C(f0..f_{n-1}) fn
 *
 * for C of arity n, realized on tables through the Leibniz rule.
 */
inline MultiDiffOp hochschild_b(const MultiDiffOp& C) {
    int n = C.arity();
    if (n + 1 > kMaxArity) throw std::invalid_argument("arity out of range");
    MultiDiffOp r(C.dim(), n + 1);
    for (const auto& [alphas, c] : C.ops()) {
        MultiDiffOp::Key k;
        k.reserve(static_cast<size_t>(n) + 1);

        // leading multiplication by the fresh first argument
        k.assign(1, MultiIndex{});
        k.insert(k.end(), alphas.begin(), alphas.end());
        r.add_op(k, c);

        // interior face maps: the product lands in slot i
        for (int i = 0; i < n; ++i) {
            GaussRational sign(i % 2 == 0 ? -1 : 1);
            for (const auto& beta : sub_indices(alphas[static_cast<size_t>(i)])) {
                k.assign(alphas.begin(), alphas.begin() + i);
                k.push_back(beta);
                k.push_back(alphas[static_cast<size_t>(i)].minus(beta));
                k.insert(k.end(), alphas.begin() + i + 1, alphas.end());
                GaussRational w =
                    sign * rational_of(alphas[static_cast<size_t>(i)].binomial_product(beta));
                r.add_op(k, w * c);
            }
        }

        // trailing multiplication by the fresh last argument
        GaussRational tail((n - 1) % 2 == 0 ? 1 : -1);
        k.assign(alphas.begin(), alphas.end());
        k.push_back(MultiIndex{});
        r.add_op(k, tail * c);
    }
    return r;
}

/*
 * Gerstenhaber circle product: insert D into each slot of C,
 *
 *   C o D = sum_{i=0}^{k} (-1)^{i l} C(f0.., D(f_i..f_{i+l}), ..),
 *
 * degrees k = arity(C)-1, l = arity(D)-1. The derivative d^{alpha_i} spreads
 * over D's coefficient and arguments by the multinomial Leibniz rule.
 */
inline MultiDiffOp gerstenhaber_compose(const MultiDiffOp& C, const MultiDiffOp& D) {
    int k = C.arity() - 1;
    int l = D.arity() - 1;
    if (k + l + 1 > kMaxArity) throw std::invalid_argument("arity out of range");
    MultiDiffOp r(C.dim(), k + l + 1);
    for (const auto& [alphas, c] : C.ops())
        for (int i = 0; i <= k; ++i) {
            GaussRational sign((i * l) % 2 == 0 ? 1 : -1);
            for (const auto& [betas, d] : D.ops())
                for_each_split(
                    alphas[static_cast<size_t>(i)], l + 2,
                    [&](const std::vector<MultiIndex>& parts, const BigInt& mn) {
                        ChartPoly dd = d.derivative(parts[0]);
                        if (dd.is_zero()) return;
                        MultiDiffOp::Key key;
                        key.reserve(static_cast<size_t>(k + l) + 1);
                        key.assign(alphas.begin(), alphas.begin() + i);
                        for (int j = 0; j <= l; ++j)
                            key.push_back(betas[static_cast<size_t>(j)].plus(
                                parts[static_cast<size_t>(j) + 1]));
                        key.insert(key.end(), alphas.begin() + i + 1, alphas.end());
                        r.add_op(key, sign * rational_of(mn) * (c * dd));
                    });
        }
    return r;
}

inline MultiDiffOp gerstenhaber_bracket(const MultiDiffOp& C, const MultiDiffOp& D) {
    int k = C.arity() - 1;
    int l = D.arity() - 1;
    MultiDiffOp cd = gerstenhaber_compose(C, D);
    MultiDiffOp dc = gerstenhaber_compose(D, C);
    return (k * l) % 2 == 0 ? cd - dc : cd + dc;
}

// T after C: post-compose the output with a unary operator.
inline MultiDiffOp post_compose(const DiffOp1& T, const MultiDiffOp& C) {
    MultiDiffOp r(C.dim(), C.arity());
    int n = C.arity();
    for (const auto& [gamma, t] : T.ops())
        for (const auto& [alphas, c] : C.ops())
            for_each_split(gamma, n + 1,
                           [&](const std::vector<MultiIndex>& parts, const BigInt& mn) {
                               ChartPoly dc = c.derivative(parts[0]);
                               if (dc.is_zero()) return;
                               MultiDiffOp::Key key;
                               key.reserve(static_cast<size_t>(n));
                               for (int j = 0; j < n; ++j)
                                   key.push_back(alphas[static_cast<size_t>(j)].plus(
                                       parts[static_cast<size_t>(j) + 1]));
                               r.add_op(key, rational_of(mn) * (t * dc));
                           });
    return r;
}

// C with a unary operator feeding one slot: C(.., T f_slot, ..).
inline MultiDiffOp pre_compose(const MultiDiffOp& C, int slot, const DiffOp1& T) {
    if (slot < 0 || slot >= C.arity()) throw std::invalid_argument("slot out of range");
    MultiDiffOp r(C.dim(), C.arity());
    for (const auto& [alphas, c] : C.ops())
        for (const auto& [delta, t] : T.ops())
            for (const auto& gamma : sub_indices(alphas[static_cast<size_t>(slot)])) {
                ChartPoly dt = t.derivative(gamma);
                if (dt.is_zero()) continue;
                MultiDiffOp::Key key = alphas;
                key[static_cast<size_t>(slot)] =
                    alphas[static_cast<size_t>(slot)].minus(gamma).plus(delta);
                GaussRational w =
                    rational_of(alphas[static_cast<size_t>(slot)].binomial_product(gamma));
                r.add_op(key, w * (c * dt));
            }
    return r;
}

// Bidifferential tables of a product, one per power of the parameter; level 0
// is pointwise multiplication for every product this library builds.
class StarTables {
public:
    StarTables() = default;
    StarTables(int dim, unsigned order)
        : dim_(dim), order_(order), levels_(order + 1, MultiDiffOp(dim, 2)) {}

    int dim() const noexcept { return dim_; }
    unsigned order() const noexcept { return order_; }

    const MultiDiffOp& level(unsigned k) const { return levels_.at(k); }
    MultiDiffOp& level(unsigned k) { return levels_.at(k); }

    friend bool operator==(const StarTables& a, const StarTables& b) {
        return a.dim_ == b.dim_ && a.order_ == b.order_ && a.levels_ == b.levels_;
    }
    friend bool operator!=(const StarTables& a, const StarTables& b) { return !(a == b); }

    StarTables truncated(unsigned new_order) const {
        StarTables r(dim_, new_order);
        for (unsigned k = 0; k <= new_order && k <= order_; ++k) r.levels_[k] = levels_[k];
        return r;
    }

    ChartPoly apply_level(unsigned k, const ChartPoly& f, const ChartPoly& g) const {
        return levels_.at(k).apply({f, g});
    }

    // Parameter-bilinear evaluation on truncated series.
    LambdaPoly apply(const LambdaPoly& f, const LambdaPoly& g) const {
        if (f.dim() != dim_ || g.dim() != dim_ || f.order() != g.order())
            throw std::invalid_argument("operand shape mismatch");
        LambdaPoly r(dim_, f.order());
        for (unsigned k = 0; k <= order_; ++k) {
            if (k > r.order()) break;
            if (levels_[k].is_zero()) continue;
            for (const auto& [a, fa] : f.coeffs())
                for (const auto& [b, gb] : g.coeffs()) {
                    if (k + a + b > r.order()) continue;
                    r.add_coeff(k + a + b, levels_[k].apply({fa, gb}));
                }
        }
        return r;
    }

    LambdaPoly commutator(const LambdaPoly& f, const LambdaPoly& g) const {
        return apply(f, g) - apply(g, f);
    }

private:
    int dim_ = 0;
    unsigned order_ = 0;
    std::vector<MultiDiffOp> levels_;
};

// The order-n obstruction to associativity. Zero for all n <= order iff the
// tables associate modulo the order. Level 0 must be pointwise
// multiplication.
inline MultiDiffOp associativity_residual(const StarTables& s, unsigned n) {
    MultiDiffOp r = GaussRational(2) * hochschild_b(s.level(n));
    for (unsigned i = 1; i < n; ++i)
        r -= gerstenhaber_bracket(s.level(i), s.level(n - i));
    return r;
}

using BivectorField = std::vector<std::vector<ChartPoly>>;

// Principal antisymmetric part of a bidifferential 2-cochain: the (e_i, e_j)
// entries, antisymmetrized.
inline BivectorField principal_bivector(const MultiDiffOp& D) {
    if (D.arity() != 2) throw std::invalid_argument("need a 2-cochain");
    int n = D.dim();
    BivectorField a(static_cast<size_t>(n),
                    std::vector<ChartPoly>(static_cast<size_t>(n), ChartPoly(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            ChartPoly cij = D.coeff({MultiIndex::unit(i), MultiIndex::unit(j)});
            ChartPoly cji = D.coeff({MultiIndex::unit(j), MultiIndex::unit(i)});
            a[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                GaussRational(1, 2) * (cij - cji);
        }
    return a;
}

// Lower both indices with the symplectic form: F_kl = omega_ki omega_lj a^ij.
inline ScalarForm bivector_to_form(const BivectorField& a, const SymplecticChart& chart) {
    int n = chart.dim;
    ScalarForm F(n, 2);
    for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
            ChartPoly fkl(n);
            for (int i = 0; i < n; ++i) {
                const GaussRational& wki = chart.form[static_cast<size_t>(k)][static_cast<size_t>(i)];
                if (wki.is_zero()) continue;
                for (int j = 0; j < n; ++j) {
                    const GaussRational& wlj =
                        chart.form[static_cast<size_t>(l)][static_cast<size_t>(j)];
                    if (wlj.is_zero()) continue;
                    fkl += (wki * wlj) * a[static_cast<size_t>(i)][static_cast<size_t>(j)];
                }
            }
            if (!fkl.is_zero()) F.add_signed({k, l}, fkl);
        }
    return F;
}

// Raise both indices back: a^kl = omega^ik F_ij omega^jl, returned as the
// first-order bidifferential cochain a^kl d_k (x) d_l.
inline MultiDiffOp form_to_bidiff(const ScalarForm& F, const SymplecticChart& chart) {
    if (F.degree() != 2) throw std::invalid_argument("need a 2-form");
    int n = chart.dim;
    MultiDiffOp D(n, 2);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            ChartPoly akl(n);
            for (int i = 0; i < n; ++i) {
                const GaussRational& wik = chart.poisson[static_cast<size_t>(i)][static_cast<size_t>(k)];
                if (wik.is_zero()) continue;
                for (int j = 0; j < n; ++j) {
                    const GaussRational& wjl =
                        chart.poisson[static_cast<size_t>(j)][static_cast<size_t>(l)];
                    if (wjl.is_zero()) continue;
                    ChartPoly fij = F.coeff_at({i, j});
                    if (fij.is_zero()) continue;
                    akl += (wik * wjl) * fij;
                }
            }
            D.add_op({MultiIndex::unit(k), MultiIndex::unit(l)}, akl);
        }
    return D;
}

// Composite: 2-cochain -> antisymmetric principal part -> 2-form.
inline ScalarForm hkr_form(const MultiDiffOp& D, const SymplecticChart& chart) {
    return bivector_to_form(principal_bivector(D), chart);
}

}  // namespace starprod
