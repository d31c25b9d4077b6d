#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "btq/ffield/matrix.hpp"

namespace btq {

struct WeakPopovResult {
    PolyMatrix R;
    PolyMatrix U;
    std::vector<int> degs; // row degrees of R, descending
};

namespace detail {

// Rightmost column attaining the row degree; -1 for a zero row.
inline int pivot_column(const PolyMatrix& M, int i, int& deg) {
    deg = -1;
    int col = -1;
    for (int j = 0; j < M.cols(); ++j) {
        int dj = M(i, j).degree();
        if (dj >= 0 && dj >= deg) {
            deg = dj;
            col = j;
        }
    }
    return col;
}

} // namespace detail

/// Row reduction to weak Popov form: R = U*M with U unimodular and the pivot
/// columns of R pairwise distinct.
inline WeakPopovResult weak_popov(const PolyMatrix& M) {
    const int n = M.rows();
    const Field* F = M.field();
    require(F != nullptr, ErrorKind::SingularMatrix, "zero matrix");
    PolyMatrix R = M;
    PolyMatrix U = PolyMatrix::identity(F, n);
    std::vector<int> piv(n), deg(n);
    for (;;) {
        for (int i = 0; i < n; ++i) {
            piv[i] = detail::pivot_column(R, i, deg[i]);
            require(piv[i] >= 0, ErrorKind::SingularMatrix, "rows are linearly dependent");
        }
        bool changed = false;
        for (int c = 0; c < R.cols() && !changed; ++c) {
            // Row of smallest degree (then index) with this pivot reduces the others.
            int best = -1;
            for (int i = 0; i < n; ++i)
                if (piv[i] == c && (best < 0 || deg[i] < deg[best]))
                    best = i;
            if (best < 0)
                continue;
            Elt lb = R(best, c).lc();
            for (int i = 0; i < n; ++i) {
                if (i == best || piv[i] != c)
                    continue;
                Elt f = F->div(R(i, c).lc(), lb);
                int sh = deg[i] - deg[best];
                for (int j = 0; j < R.cols(); ++j)
                    R(i, j).sub_scaled_shift(R(best, j), f, sh);
                for (int j = 0; j < n; ++j)
                    U(i, j).sub_scaled_shift(U(best, j), f, sh);
                changed = true;
            }
        }
        if (!changed)
            break;
    }
    std::vector<int> degs = deg;
    std::sort(degs.begin(), degs.end(), std::greater<>());
    return {std::move(R), std::move(U), std::move(degs)};
}

} // namespace btq
