#pragma once

/*
 * Packed exponent vectors. A MultiIndex holds up to kMaxVars exponents, each
 * 0..255; coordinates beyond the active dimension stay zero, so lexicographic
 * comparison over the full array is dimension-safe. The same type indexes
 * chart monomials, fiber monomials, and differentiation orders.
 */

#include "starprod/gauss_rational.hpp"

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace starprod {

inline constexpr int kMaxVars = 16;

class MultiIndex {
public:
    MultiIndex() { e_.fill(0); }

    static MultiIndex unit(int axis) {
        MultiIndex m;
        m.bump(axis, 1);
        return m;
    }

    uint8_t operator[](int axis) const { return e_[static_cast<size_t>(axis)]; }

    void bump(int axis, int by) {
        if (axis < 0 || axis >= kMaxVars) throw std::out_of_range("axis");
        int v = e_[static_cast<size_t>(axis)] + by;
        if (v < 0 || v > 255) throw std::overflow_error("exponent out of range");
        e_[static_cast<size_t>(axis)] = static_cast<uint8_t>(v);
    }

    unsigned degree() const noexcept {
        unsigned d = 0;
        for (uint8_t v : e_) d += v;
        return d;
    }

    bool is_zero() const noexcept { return degree() == 0; }

    // Componentwise partial order (divisibility of monomials).
    bool leq(const MultiIndex& o) const noexcept {
        for (size_t k = 0; k < e_.size(); ++k)
            if (e_[k] > o.e_[k]) return false;
        return true;
    }

    MultiIndex plus(const MultiIndex& o) const {
        MultiIndex r;
        for (size_t k = 0; k < e_.size(); ++k) {
            int v = e_[k] + o.e_[k];
            if (v > 255) throw std::overflow_error("exponent out of range");
            r.e_[k] = static_cast<uint8_t>(v);
        }
        return r;
    }

    // Caller must ensure o.leq(*this).
    MultiIndex minus(const MultiIndex& o) const {
        MultiIndex r;
        for (size_t k = 0; k < e_.size(); ++k)
            r.e_[k] = static_cast<uint8_t>(e_[k] - o.e_[k]);
        return r;
    }

    int max_axis() const noexcept {
        for (int k = kMaxVars - 1; k >= 0; --k)
            if (e_[static_cast<size_t>(k)]) return k;
        return -1;
    }

    BigInt factorial_product() const {
        BigInt f = 1;
        for (uint8_t v : e_) f *= factorial(v);
        return f;
    }

    // prod over axes of binomial(this[k], o[k])
    BigInt binomial_product(const MultiIndex& o) const {
        BigInt b = 1;
        for (size_t k = 0; k < e_.size(); ++k) b *= binomial(e_[k], o.e_[k]);
        return b;
    }

    auto operator<=>(const MultiIndex& o) const = default;

    std::string str(const std::string& stem = "x") const {
        std::string out;
        for (int k = 0; k < kMaxVars; ++k) {
            uint8_t v = e_[static_cast<size_t>(k)];
            if (!v) continue;
            if (!out.empty()) out += "*";
            out += stem + std::to_string(k + 1);
            if (v > 1) out += "^" + std::to_string(v);
        }
        return out.empty() ? "1" : out;
    }

private:
    std::array<uint8_t, kMaxVars> e_;
};

// Graded-lexicographic order: by total degree, then descending lexicographic,
// so x1^2 sorts before x1*x2 before x2^2. Canonical term order for all
// polynomial maps and serialized output.
struct GradedLex {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const noexcept {
        unsigned da = a.degree(), db = b.degree();
        if (da != db) return da < db;
        return b < a;
    }
};

// All exponent vectors over `dim` axes with total degree <= deg, graded-lex
// order.
inline std::vector<MultiIndex> monomials_up_to(int dim, unsigned deg) {
    std::vector<MultiIndex> out;
    MultiIndex cur;
    std::function<void(int, unsigned)> rec = [&](int axis, unsigned left) {
        if (axis == dim) {
            out.push_back(cur);
            return;
        }
        for (unsigned v = 0; v <= left; ++v) {
            if (v) cur.bump(axis, 1);
            rec(axis + 1, left - v);
        }
        cur.bump(axis, -static_cast<int>(cur[axis]));
    };
    rec(0, deg);
    std::sort(out.begin(), out.end(), GradedLex{});
    return out;
}

}  // namespace starprod
