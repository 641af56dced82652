#pragma once

// Small dense exact matrices (chart dimension sized: at most 16x16).

#include "starprod/gauss_rational.hpp"

#include <stdexcept>
#include <vector>

namespace starprod {

using Mat = std::vector<std::vector<GaussRational>>;

inline Mat zero_mat(int n) {
    return Mat(static_cast<size_t>(n), std::vector<GaussRational>(static_cast<size_t>(n)));
}

inline Mat identity_mat(int n) {
    Mat m = zero_mat(n);
    for (int k = 0; k < n; ++k) m[static_cast<size_t>(k)][static_cast<size_t>(k)] = GaussRational(1);
    return m;
}

inline int mat_dim(const Mat& m) { return static_cast<int>(m.size()); }

inline Mat mat_transpose(const Mat& m) {
    int n = mat_dim(m);
    Mat r = zero_mat(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            r[static_cast<size_t>(j)][static_cast<size_t>(i)] =
                m[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return r;
}

inline Mat mat_mul(const Mat& a, const Mat& b) {
    int n = mat_dim(a);
    if (mat_dim(b) != n) throw std::invalid_argument("matrix size mismatch");
    Mat r = zero_mat(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const GaussRational& aik = a[static_cast<size_t>(i)][static_cast<size_t>(k)];
            if (aik.is_zero()) continue;
            for (int j = 0; j < n; ++j)
                r[static_cast<size_t>(i)][static_cast<size_t>(j)] +=
                    aik * b[static_cast<size_t>(k)][static_cast<size_t>(j)];
        }
    return r;
}

inline Mat mat_negate(Mat m) {
    for (auto& row : m)
        for (auto& v : row) v = -v;
    return m;
}

inline bool mat_is_antisymmetric(const Mat& m) {
    int n = mat_dim(m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (m[static_cast<size_t>(i)][static_cast<size_t>(j)] !=
                -m[static_cast<size_t>(j)][static_cast<size_t>(i)])
                return false;
    return true;
}

// Gauss-Jordan over exact scalars; throws on a singular input.
inline Mat mat_inverse(Mat a) {
    int n = mat_dim(a);
    Mat inv = identity_mat(n);
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (!a[static_cast<size_t>(r)][static_cast<size_t>(col)].is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) throw std::domain_error("matrix is singular");
        std::swap(a[static_cast<size_t>(piv)], a[static_cast<size_t>(col)]);
        std::swap(inv[static_cast<size_t>(piv)], inv[static_cast<size_t>(col)]);
        GaussRational d = a[static_cast<size_t>(col)][static_cast<size_t>(col)].inverse();
        for (int j = 0; j < n; ++j) {
            a[static_cast<size_t>(col)][static_cast<size_t>(j)] *= d;
            inv[static_cast<size_t>(col)][static_cast<size_t>(j)] *= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            GaussRational f = a[static_cast<size_t>(r)][static_cast<size_t>(col)];
            if (f.is_zero()) continue;
            for (int j = 0; j < n; ++j) {
                a[static_cast<size_t>(r)][static_cast<size_t>(j)] -=
                    f * a[static_cast<size_t>(col)][static_cast<size_t>(j)];
                inv[static_cast<size_t>(r)][static_cast<size_t>(j)] -=
                    f * inv[static_cast<size_t>(col)][static_cast<size_t>(j)];
            }
        }
    }
    return inv;
}

}  // namespace starprod
