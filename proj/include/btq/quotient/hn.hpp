#pragma once

#include <functional>
#include <numeric>
#include <vector>

#include "btq/ffield.hpp"

namespace btq {

/// Values p(0..d) of the Harder-Narasimhan polygon, p(0) = 0.
struct HNPolygon {
    std::vector<int> p;

    int rank() const { return static_cast<int>(p.size()) - 1; }
    /// 2p(i) - p(i-1) - p(i+1) for 1 <= i <= d-1.
    int delta(int i) const { return 2 * p[i] - p[i - 1] - p[i + 1]; }
    bool operator==(const HNPolygon&) const = default;
};

/// Polygon of the split bundle with descending type n.
inline HNPolygon hn_polygon(const std::vector<int>& type) {
    HNPolygon h;
    h.p.push_back(0);
    for (int x : type)
        h.p.push_back(h.p.back() + x);
    return h;
}

/// Delta p(1..d-1) of a descending type.
inline std::vector<int> delta_p(const std::vector<int>& type) {
    std::vector<int> out;
    for (size_t i = 0; i + 1 < type.size(); ++i)
        out.push_back(type[i] - type[i + 1]);
    return out;
}

/// Rank over F_q(t) of an arbitrary matrix.
inline int rat_rank(RatMatrix m) {
    int r = 0;
    for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
        int piv = -1;
        for (int i = r; i < m.rows(); ++i)
            if (!m(i, c).is_zero()) {
                piv = i;
                break;
            }
        if (piv < 0)
            continue;
        m.swap_rows(piv, r);
        RatFunc inv = m(r, c).inverse();
        for (int i = r + 1; i < m.rows(); ++i) {
            if (m(i, c).is_zero())
                continue;
            RatFunc f = m(i, c) * inv;
            for (int j = c; j < m.cols(); ++j)
                m(i, j) -= f * m(r, j);
        }
        ++r;
    }
    return r;
}

namespace detail {

// All i x i minors of an i x d matrix, columns chosen in lexicographic order.
inline std::vector<RatFunc> maximal_minors(const RatMatrix& W) {
    const int i = W.rows(), d = W.cols();
    std::vector<RatFunc> out;
    std::vector<int> cols(i);
    std::function<void(int, int)> rec = [&](int pos, int start) {
        if (pos == i) {
            RatMatrix sub(W.field(), i, i);
            for (int r = 0; r < i; ++r)
                for (int c = 0; c < i; ++c)
                    sub(r, c) = W(r, cols[c]);
            out.push_back(det(sub));
            return;
        }
        for (int c = start; c < d; ++c) {
            cols[pos] = c;
            rec(pos + 1, c + 1);
        }
    };
    rec(0, 0);
    return out;
}

} // namespace detail

/// Degree of the saturated subsheaf of the bundle (F_q[t]^d, L) generated by
/// the rows of W: deg gcd(minors of W) + min valuation at infinity of the
/// minors of W * B^{-1}.
inline int subbundle_degree(const InfinityLattice& L, const PolyMatrix& W) {
    auto finite = detail::maximal_minors(to_rat(W));
    Poly g(L.field());
    for (const auto& m : finite)
        g = gcd(g, m.num());
    require(!g.is_zero(), ErrorKind::SingularMatrix, "rows are linearly dependent");
    auto at_inf = detail::maximal_minors(to_rat(W) * inverse(L.basis()));
    int best = kNegInfDeg;
    for (const auto& m : at_inf)
        if (!m.is_zero())
            best = std::max(best, m.degree());
    return g.degree() - best;
}

/// Polynomial rows spanning the destabilizing subsheaf F_(i): the first i
/// rows of gamma^{-1} for a splitting L * gamma = span(t^{n_k} e_k).
inline PolyMatrix hn_flag(const InfinityLattice& L, int i) {
    const int d = L.dim();
    require(i >= 1 && i < d, ErrorKind::NotInSupport, "index outside 1..d-1");
    Splitting sp = split_lattice(L);
    require(sp.type[i - 1] > sp.type[i], ErrorKind::NotInSupport, "Delta p vanishes at this index");
    PolyMatrix W(L.field(), i, d);
    for (int r = 0; r < i; ++r)
        for (int c = 0; c < d; ++c)
            W(r, c) = sp.gamma_inv(r, c);
    return W;
}

/// True when the rows of X and Y span the same F_q(t)-subspace.
inline bool same_span(const RatMatrix& X, const RatMatrix& Y) {
    int rx = rat_rank(X), ry = rat_rank(Y);
    if (rx != ry)
        return false;
    RatMatrix both(X.field() ? X.field() : Y.field(), X.rows() + Y.rows(), X.cols());
    for (int r = 0; r < X.rows(); ++r)
        for (int c = 0; c < X.cols(); ++c)
            both(r, c) = X(r, c);
    for (int r = 0; r < Y.rows(); ++r)
        for (int c = 0; c < Y.cols(); ++c)
            both(X.rows() + r, c) = Y(r, c);
    return rat_rank(both) == rx;
}

} // namespace btq
