#pragma once

#include <vector>

#include "btq/ffield/field.hpp"

namespace btq {

using FqVec = std::vector<Elt>;
using FqRows = std::vector<FqVec>;

/// Reduced row echelon form over F_q in place; returns the pivot columns.
inline std::vector<int> fq_rref(const Field& F, FqRows& rows) {
    std::vector<int> pivots;
    if (rows.empty())
        return pivots;
    const int ncols = static_cast<int>(rows[0].size());
    size_t r = 0;
    for (int c = 0; c < ncols && r < rows.size(); ++c) {
        size_t p = r;
        while (p < rows.size() && rows[p][c] == 0)
            ++p;
        if (p == rows.size())
            continue;
        std::swap(rows[p], rows[r]);
        Elt s = F.inv(rows[r][c]);
        for (auto& x : rows[r])
            x = F.mul(x, s);
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0)
                continue;
            Elt f = rows[i][c];
            for (int j = c; j < ncols; ++j)
                if (rows[r][j] != 0)
                    rows[i][j] = F.sub(rows[i][j], F.mul(f, rows[r][j]));
        }
        pivots.push_back(c);
        ++r;
    }
    rows.resize(r);
    return pivots;
}

inline int fq_rank(const Field& F, FqRows rows) { return static_cast<int>(fq_rref(F, rows).size()); }

/// Row-space basis in RREF (canonical for the subspace).
inline FqRows fq_span(const Field& F, FqRows rows) {
    fq_rref(F, rows);
    return rows;
}

} // namespace btq
