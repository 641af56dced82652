#pragma once

/*
 * Exact scalar type for the whole library: Gaussian rationals a + b*i with
 * arbitrary-precision rational components. Values are always canonical
 * (cpp_rational keeps numerator/denominator reduced, denominator positive),
 * so operator== is structural equality.
 */

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace starprod {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

class GaussRational {
public:
    GaussRational() = default;
    GaussRational(long v) : re_(v) {}
    GaussRational(BigRational re) : re_(std::move(re)) {}
    GaussRational(BigRational re, BigRational im)
        : re_(std::move(re)), im_(std::move(im)) {}
    GaussRational(long num, long den) : re_(BigRational(num, den)) {
        if (den == 0) throw std::domain_error("zero denominator");
    }

    static GaussRational i() { return GaussRational(BigRational(0), BigRational(1)); }

    const BigRational& re() const noexcept { return re_; }
    const BigRational& im() const noexcept { return im_; }

    bool is_zero() const noexcept { return re_.is_zero() && im_.is_zero(); }
    bool is_real() const noexcept { return im_.is_zero(); }
    bool is_one() const noexcept { return im_.is_zero() && re_ == 1; }

    GaussRational operator-() const { return {-re_, -im_}; }
    GaussRational conj() const { return {re_, -im_}; }

    GaussRational& operator+=(const GaussRational& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussRational& operator-=(const GaussRational& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussRational& operator*=(const GaussRational& o) {
        BigRational r = re_ * o.re_ - im_ * o.im_;
        BigRational i2 = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(i2);
        return *this;
    }
    GaussRational& operator/=(const GaussRational& o) {
        BigRational n = o.re_ * o.re_ + o.im_ * o.im_;
        if (n.is_zero()) throw std::domain_error("division by zero");
        BigRational r = (re_ * o.re_ + im_ * o.im_) / n;
        BigRational i2 = (im_ * o.re_ - re_ * o.im_) / n;
        re_ = std::move(r);
        im_ = std::move(i2);
        return *this;
    }

    friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
    friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
    friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
    friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }

    friend bool operator==(const GaussRational& a, const GaussRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussRational& a, const GaussRational& b) { return !(a == b); }

    // Total order for use as a map key; no arithmetic meaning.
    friend bool operator<(const GaussRational& a, const GaussRational& b) {
        if (a.re_ != b.re_) return a.re_ < b.re_;
        return a.im_ < b.im_;
    }

    GaussRational inverse() const {
        GaussRational one(1);
        one /= *this;
        return one;
    }

    // Serialization: "3/2", "-1/3i", "1/2+1/3i", "1/2-2i", "0".
    std::string str() const {
        if (is_zero()) return "0";
        std::string out;
        if (!re_.is_zero()) out += re_.str();
        if (!im_.is_zero()) {
            if (im_ > 0 && !re_.is_zero()) out += "+";
            if (im_ == -1)
                out += "-";
            else if (im_ != 1)
                out += im_.str();
            out += "i";
        }
        return out;
    }

private:
    BigRational re_;
    BigRational im_;
};

inline GaussRational pow(GaussRational base, unsigned e) {
    GaussRational acc(1);
    while (e) {
        if (e & 1u) acc *= base;
        base *= base;
        e >>= 1u;
    }
    return acc;
}

inline BigInt factorial(unsigned n) {
    BigInt f = 1;
    for (unsigned k = 2; k <= n; ++k) f *= k;
    return f;
}

inline BigInt binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    BigInt num = 1;
    for (unsigned j = 0; j < k; ++j) num *= (n - j);
    return num / factorial(k);
}

inline GaussRational rational_of(const BigInt& num, const BigInt& den = 1) {
    return GaussRational(BigRational(num, den));
}

}  // namespace starprod
