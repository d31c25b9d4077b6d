#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <unordered_map>
#include <optional>
#include <utility>
#include <vector>

namespace btq {

using Rational = mpq_class;

/// Sparse vector: (index, value) pairs, indices strictly increasing, no zeros.
using SparseVec = std::vector<std::pair<int, Rational>>;

inline Rational sv_get(const SparseVec& v, int i) {
    auto it = std::lower_bound(v.begin(), v.end(), i, [](const auto& e, int k) { return e.first < k; });
    return it != v.end() && it->first == i ? it->second : Rational(0);
}

/// x + s*y.
inline SparseVec sv_axpy(const SparseVec& x, const Rational& s, const SparseVec& y) {
    SparseVec out;
    out.reserve(x.size() + y.size());
    size_t i = 0, j = 0;
    while (i < x.size() || j < y.size()) {
        if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
            out.push_back(x[i++]);
        } else if (i == x.size() || y[j].first < x[i].first) {
            out.emplace_back(y[j].first, s * y[j].second);
            ++j;
        } else {
            Rational v = x[i].second + s * y[j].second;
            if (sgn(v) != 0)
                out.emplace_back(x[i].first, std::move(v));
            ++i;
            ++j;
        }
    }
    return out;
}

inline SparseVec sv_scale(SparseVec v, const Rational& s) {
    if (sgn(s) == 0)
        return {};
    for (auto& e : v)
        e.second *= s;
    return v;
}

/// Build from an unsorted list of contributions, summing duplicates.
inline SparseVec sv_from(std::vector<std::pair<int, Rational>> entries) {
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    SparseVec out;
    for (auto& e : entries) {
        if (!out.empty() && out.back().first == e.first)
            out.back().second += e.second;
        else
            out.push_back(std::move(e));
        if (!out.empty() && sgn(out.back().second) == 0)
            out.pop_back();
    }
    return out;
}

/// Column-major sparse matrix.
struct SparseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<SparseVec> columns;

    SparseVec apply(const SparseVec& x) const {
        SparseVec out;
        for (const auto& [j, s] : x)
            out = sv_axpy(out, s, columns[j]);
        return out;
    }

    SparseMatrix transpose() const {
        SparseMatrix t{cols, rows, std::vector<SparseVec>(rows)};
        for (int j = 0; j < cols; ++j)
            for (const auto& [i, v] : columns[j])
                t.columns[i].emplace_back(j, v);
        return t;
    }
};

/// Incremental echelon basis of a subspace of Q^n. Each basis vector has a
/// distinct pivot (its last nonzero index) and tracks its combination of
/// inserted vectors. Reduction stops as soon as the pivot is new, so
/// residuals are only partially reduced.
class Echelon {
public:
    explicit Echelon(bool track = false) : track_(track) {}

    /// Residual of v; empty exactly when v lies in the span.
    SparseVec reduce(SparseVec v, SparseVec* comb = nullptr) const {
        while (!v.empty()) {
            auto it = rows_.find(v.back().first);
            if (it == rows_.end())
                break;
            Rational s = -v.back().second;
            if (comb && track_)
                *comb = sv_axpy(*comb, s, it->second.second);
            v = sv_axpy(v, s, it->second.first);
        }
        return v;
    }

    /// Inserts v (labelled id); returns true when v was independent.
    bool insert(const SparseVec& v, int id = -1) {
        SparseVec comb;
        if (track_)
            comb.emplace_back(id, Rational(1));
        SparseVec r = reduce(v, track_ ? &comb : nullptr);
        if (r.empty())
            return false;
        insert_reduced(std::move(r), std::move(comb));
        return true;
    }

    /// Stores a nonzero residual r returned by reduce, with its combination.
    void insert_reduced(SparseVec r, SparseVec comb) {
        Rational inv = 1 / r.back().second;
        int piv = r.back().first;
        rows_.emplace(piv, std::make_pair(sv_scale(std::move(r), inv), sv_scale(std::move(comb), inv)));
    }

    bool contains(const SparseVec& v) const { return reduce(v).empty(); }

    /// Combination of inserted ids equal to v, if v lies in the span.
    std::optional<SparseVec> express(const SparseVec& v) const {
        SparseVec comb;
        SparseVec r = reduce(v, &comb);
        if (!r.empty())
            return std::nullopt;
        return sv_scale(std::move(comb), Rational(-1));
    }

    int rank() const { return static_cast<int>(rows_.size()); }

private:
    bool track_;
    std::unordered_map<int, std::pair<SparseVec, SparseVec>> rows_;
};

inline int rank(const SparseMatrix& A) {
    Echelon e;
    for (const auto& c : A.columns)
        e.insert(c);
    return e.rank();
}

/// Kernel basis of A: inserting the columns in order, each column that
/// depends on earlier ones yields the relation it satisfies (x_j = 1 at its
/// own index j, support on earlier columns only).
inline std::vector<SparseVec> kernel(const SparseMatrix& A) {
    Echelon e(true);
    std::vector<SparseVec> out;
    for (int j = 0; j < A.cols; ++j) {
        const SparseVec& c = A.columns[j];
        if (c.empty()) {
            out.push_back({{j, Rational(1)}});
            continue;
        }
        SparseVec comb{{j, Rational(1)}};
        SparseVec r = e.reduce(c, &comb);
        if (r.empty())
            out.push_back(std::move(comb));
        else
            e.insert_reduced(std::move(r), std::move(comb));
    }
    return out;
}

} // namespace btq
