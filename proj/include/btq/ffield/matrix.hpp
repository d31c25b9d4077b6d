#pragma once

#include <string>
#include <vector>

#include "btq/ffield/ratfunc.hpp"

namespace btq {

/// Dense row-major matrix over Poly or RatFunc.
template <class T>
class Mat {
public:
    Mat() = default;
    Mat(const Field* F, int rows, int cols) : r_(rows), c_(cols), a_(rows * cols, T(F)) {}

    static Mat identity(const Field* F, int d) {
        Mat m(F, d, d);
        for (int i = 0; i < d; ++i)
            m(i, i) = T(Poly::one(F));
        return m;
    }

    static Mat from_rows(const std::vector<std::vector<T>>& rows) {
        Mat m;
        m.r_ = static_cast<int>(rows.size());
        m.c_ = m.r_ ? static_cast<int>(rows[0].size()) : 0;
        for (const auto& row : rows) {
            require(static_cast<int>(row.size()) == m.c_, ErrorKind::InvalidArgument,
                    "ragged matrix rows");
            m.a_.insert(m.a_.end(), row.begin(), row.end());
        }
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }
    T& operator()(int i, int j) { return a_[i * c_ + j]; }
    const T& operator()(int i, int j) const { return a_[i * c_ + j]; }

    const Field* field() const {
        for (const auto& x : a_)
            if (x.field())
                return x.field();
        return nullptr;
    }

    std::vector<T> row(int i) const { return {a_.begin() + i * c_, a_.begin() + (i + 1) * c_}; }
    void set_row(int i, const std::vector<T>& v) {
        for (int j = 0; j < c_; ++j)
            (*this)(i, j) = v[j];
    }
    void swap_rows(int i, int k) {
        for (int j = 0; j < c_; ++j)
            std::swap((*this)(i, j), (*this)(k, j));
    }

    Mat transpose() const {
        Mat m;
        m.r_ = c_;
        m.c_ = r_;
        m.a_.resize(a_.size());
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j)
                m(j, i) = (*this)(i, j);
        return m;
    }

    friend Mat operator*(const Mat& x, const Mat& y) {
        require(x.c_ == y.r_, ErrorKind::InvalidArgument, "matrix shape mismatch");
        const Field* F = x.field() ? x.field() : y.field();
        Mat m(F, x.r_, y.c_);
        for (int i = 0; i < x.r_; ++i)
            for (int k = 0; k < x.c_; ++k) {
                if (x(i, k).is_zero())
                    continue;
                for (int j = 0; j < y.c_; ++j)
                    if (!y(k, j).is_zero())
                        m(i, j) += x(i, k) * y(k, j);
            }
        return m;
    }

    Mat scaled(const T& s) const {
        Mat m = *this;
        for (auto& x : m.a_)
            x = x * s;
        return m;
    }

    bool operator==(const Mat& o) const = default;

    std::string to_string() const {
        std::string s = "[";
        for (int i = 0; i < r_; ++i) {
            s += i ? "; " : "";
            for (int j = 0; j < c_; ++j)
                s += (j ? ", " : "") + (*this)(i, j).to_string();
        }
        return s + "]";
    }

private:
    int r_ = 0, c_ = 0;
    std::vector<T> a_;
};

using PolyMatrix = Mat<Poly>;
using RatMatrix = Mat<RatFunc>;

inline RatMatrix to_rat(const PolyMatrix& m) {
    RatMatrix r(m.field(), m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            r(i, j) = RatFunc(m(i, j));
    return r;
}

inline PolyMatrix to_poly(const RatMatrix& m) {
    PolyMatrix r(m.field(), m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            require(m(i, j).is_poly(), ErrorKind::InvalidArgument, "matrix entry is not a polynomial");
            r(i, j) = m(i, j).num();
        }
    return r;
}

/// Determinant by Gaussian elimination over F_q(t).
inline RatFunc det(RatMatrix m) {
    const int d = m.rows();
    const Field* F = m.field();
    RatFunc acc = RatFunc::constant(F, 1);
    for (int c = 0; c < d; ++c) {
        int piv = -1;
        for (int i = c; i < d; ++i)
            if (!m(i, c).is_zero()) {
                piv = i;
                break;
            }
        if (piv < 0)
            return RatFunc(F);
        if (piv != c) {
            m.swap_rows(piv, c);
            acc = -acc;
        }
        acc *= m(c, c);
        RatFunc inv = m(c, c).inverse();
        for (int i = c + 1; i < d; ++i) {
            if (m(i, c).is_zero())
                continue;
            RatFunc f = m(i, c) * inv;
            for (int j = c; j < d; ++j)
                m(i, j) -= f * m(c, j);
        }
    }
    return acc;
}

inline Poly det(const PolyMatrix& m) { return det(to_rat(m)).num(); }

/// Inverse by Gauss-Jordan elimination; throws SingularMatrix.
inline RatMatrix inverse(RatMatrix m) {
    const int d = m.rows();
    const Field* F = m.field();
    RatMatrix inv = RatMatrix::identity(F, d);
    for (int c = 0; c < d; ++c) {
        int piv = -1;
        for (int i = c; i < d; ++i)
            if (!m(i, c).is_zero()) {
                piv = i;
                break;
            }
        require(piv >= 0, ErrorKind::SingularMatrix, "matrix is singular");
        m.swap_rows(piv, c);
        inv.swap_rows(piv, c);
        RatFunc s = m(c, c).inverse();
        for (int j = 0; j < d; ++j) {
            m(c, j) *= s;
            inv(c, j) *= s;
        }
        for (int i = 0; i < d; ++i) {
            if (i == c || m(i, c).is_zero())
                continue;
            RatFunc f = m(i, c);
            for (int j = 0; j < d; ++j) {
                if (!m(c, j).is_zero())
                    m(i, j) -= f * m(c, j);
                if (!inv(c, j).is_zero())
                    inv(i, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

/// Inverse of a matrix over F_q[t] whose determinant is a nonzero constant.
inline PolyMatrix inverse_unimodular(const PolyMatrix& m) {
    Poly dt = det(m);
    require(!dt.is_zero() && dt.is_constant(), ErrorKind::InvalidArgument, "matrix is not unimodular");
    return to_poly(inverse(to_rat(m)));
}

inline int max_degree(const PolyMatrix& m) {
    int d = -1;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            d = std::max(d, m(i, j).degree());
    return d;
}

} // namespace btq
