#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "btq/ffield/fq_linalg.hpp"
#include "btq/ffield/popov.hpp"

namespace btq {

struct Limits {
    int series_ceiling = 4096; // max Laurent terms per entry
    int m_max = 512;           // max |m| for section counts
};

/// The O_inf-span of the rows of an invertible matrix over F_q(t),
/// O_inf = F_q[[1/t]].
class InfinityLattice {
public:
    InfinityLattice() = default;
    explicit InfinityLattice(RatMatrix basis) : B_(std::move(basis)) {
        require(B_.rows() == B_.cols() && B_.rows() >= 1, ErrorKind::InvalidArgument,
                "lattice basis must be square");
        require(!det(B_).is_zero(), ErrorKind::SingularMatrix, "lattice basis is singular");
    }

    static InfinityLattice standard(const Field* F, int d) {
        return InfinityLattice(RatMatrix::identity(F, d));
    }

    /// Rows t^{a_i} e_i.
    static InfinityLattice diagonal(const Field* F, const std::vector<int>& a) {
        const int d = static_cast<int>(a.size());
        RatMatrix B(F, d, d);
        for (int i = 0; i < d; ++i)
            B(i, i) = RatFunc::monomial(F, 1, a[i]);
        return InfinityLattice(std::move(B));
    }

    int dim() const { return B_.rows(); }
    const Field* field() const { return B_.field(); }
    const RatMatrix& basis() const { return B_; }

    /// t^k * L.
    InfinityLattice twisted(int k) const {
        return InfinityLattice(B_.scaled(RatFunc::monomial(field(), 1, k)));
    }

    /// L * g for g in GL_d(F).
    InfinityLattice operator*(const RatMatrix& g) const { return InfinityLattice(B_ * g); }
    InfinityLattice operator*(const PolyMatrix& g) const { return InfinityLattice(B_ * to_rat(g)); }

    /// Degree of the associated bundle: deg_t det(B).
    int degree() const { return det(B_).degree(); }

private:
    RatMatrix B_;
};

/// Polynomial h (monic) and matrix P over F_q[t] with B = P / h.
inline std::pair<Poly, PolyMatrix> clear_denominators(const RatMatrix& B) {
    const Field* F = B.field();
    Poly h = Poly::one(F);
    for (int i = 0; i < B.rows(); ++i)
        for (int j = 0; j < B.cols(); ++j) {
            const Poly& dn = B(i, j).den();
            if (!dn.is_one())
                h = h * (dn / gcd(h, dn));
        }
    PolyMatrix P(F, B.rows(), B.cols());
    for (int i = 0; i < B.rows(); ++i)
        for (int j = 0; j < B.cols(); ++j)
            P(i, j) = B(i, j).num() * (h / B(i, j).den());
    return {h, P};
}

/// Splitting of the bundle (F_q[t]^d, L): L * gamma = span of t^{type_i} e_i,
/// with gamma in GL_d(F_q[t]) and type descending.
struct Splitting {
    std::vector<int> type;
    PolyMatrix gamma;
    PolyMatrix gamma_inv;
};

inline Splitting split_lattice(const InfinityLattice& L) {
    const int d = L.dim();
    const Field* F = L.field();
    auto [h, P] = clear_denominators(L.basis());
    // U * P^T = R row reduced, so L * U^T = O^d diag(t^{rowdeg(R) - deg h}).
    WeakPopovResult wp = weak_popov(P.transpose());
    std::vector<int> m(d);
    for (int i = 0; i < d; ++i) {
        int r = -1;
        for (int j = 0; j < d; ++j)
            r = std::max(r, wp.R(i, j).degree());
        m[i] = r - h.degree();
    }
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return m[a] > m[b]; });
    PolyMatrix Ut = wp.U.transpose();
    PolyMatrix Uinv = inverse_unimodular(wp.U);
    Splitting s;
    s.type.resize(d);
    s.gamma = PolyMatrix(F, d, d);
    s.gamma_inv = PolyMatrix(F, d, d);
    for (int k = 0; k < d; ++k) {
        s.type[k] = m[order[k]];
        for (int i = 0; i < d; ++i) {
            s.gamma(i, k) = Ut(i, order[k]);
            // gamma^{-1} = P^T (U^{-1})^T: row k is column order[k] of U^{-1}.
            s.gamma_inv(k, i) = Uinv(i, order[k]);
        }
    }
    return s;
}

namespace detail {

inline int max_entry_degree(const RatMatrix& B) {
    int c = kNegInfDeg;
    for (int i = 0; i < B.rows(); ++i)
        for (int j = 0; j < B.cols(); ++j)
            c = std::max(c, B(i, j).degree());
    return c;
}

} // namespace detail

/// dim over F_q of { v in F_q[t]^d : v in t^m L }.
inline int h0_dimension(const InfinityLattice& L, int m, const Limits& lim = {}) {
    require(std::abs(m) <= lim.m_max, ErrorKind::PrecisionExceeded,
            "|m| = " + std::to_string(std::abs(m)) + " exceeds the configured bound");
    const int d = L.dim();
    const Field& F = *L.field();
    const RatMatrix& B = L.basis();
    const int cB = detail::max_entry_degree(B);
    const int D = m + cB; // degree bound for the entries of v
    if (D < 0)
        return 0;
    RatMatrix N = inverse(B);
    const int cN = detail::max_entry_degree(N);
    const int lo = 1 - cB; // lowest exponent of N needed
    require(D + 1 <= lim.series_ceiling && cN - lo + 1 <= lim.series_ceiling,
            ErrorKind::PrecisionExceeded, "section count needs more Laurent terms than allowed");
    // Laurent coefficients of N(k,j) at exponents cN down to lo.
    std::vector<std::vector<Elt>> ser(d * d);
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) {
            std::vector<Elt> full(cN - lo + 1, 0);
            const RatFunc& x = N(k, j);
            if (!x.is_zero() && x.degree() >= lo) {
                auto c = x.laurent(lo);
                std::copy(c.begin(), c.end(), full.begin() + (cN - x.degree()));
            }
            ser[k * d + j] = std::move(full);
        }
    auto ncoef = [&](int k, int j, int s) -> Elt {
        if (s > cN || s < lo)
            return 0;
        return ser[k * d + j][cN - s];
    };
    const int nunk = d * (D + 1);
    // One constraint per (j, s) with m < s <= D + cN: coefficient of t^s in (vN)_j vanishes.
    FqRows rows;
    for (int j = 0; j < d; ++j)
        for (int s = m + 1; s <= D + cN; ++s) {
            FqVec row(nunk, 0);
            bool any = false;
            for (int k = 0; k < d; ++k)
                for (int e = 0; e <= D; ++e) {
                    Elt c = ncoef(k, j, s - e);
                    row[k * (D + 1) + e] = c;
                    any = any || c != 0;
                }
            if (any)
                rows.push_back(std::move(row));
        }
    return nunk - fq_rank(F, std::move(rows));
}

/// Splitting type (descending) recovered from jumps of h0_dimension.
inline std::vector<int> bundle_type(const InfinityLattice& L, const Limits& lim = {}) {
    const int d = L.dim();
    const int cB = detail::max_entry_degree(L.basis());
    const int cN = detail::max_entry_degree(inverse(L.basis()));
    // c(m) = #{i : n_i >= -m-1}; every n_i lies in [-cN, cB].
    auto c = [&](int m) { return h0_dimension(L, m + 1, lim) - h0_dimension(L, m, lim); };
    std::vector<int> type;
    int above = 0; // #{n_i >= n+1}
    for (int n = cB; n >= -cN && static_cast<int>(type.size()) < d; --n) {
        int atleast = c(-n - 1);
        for (int k = above; k < atleast; ++k)
            type.push_back(n);
        above = atleast;
    }
    require(static_cast<int>(type.size()) == d, ErrorKind::PrecisionExceeded,
            "section counts did not account for every summand");
    return type;
}

/// Dual lattice { w : w . v in O_inf for all v in L }, basis (B^{-1})^T.
inline InfinityLattice dual_lattice(const InfinityLattice& L) {
    return InfinityLattice(inverse(L.basis()).transpose());
}

} // namespace btq
