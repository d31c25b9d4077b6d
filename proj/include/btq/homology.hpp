#pragma once

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "btq/linalg.hpp"
#include "btq/scomplex.hpp"

namespace btq {

/// Finitely supported chain; coefficients are relative to the ascending
/// vertex orientation of each simplex.
struct OrientedChain {
    int degree = 0;
    std::map<Key, Rational> coeffs;

    void add(const OrientedSimplexRef& r, const Rational& v) {
        Rational& c = coeffs[r.key];
        c += r.parity > 0 ? v : Rational(-v);
        if (sgn(c) == 0)
            coeffs.erase(r.key);
    }
    Rational at(const Key& k) const {
        auto it = coeffs.find(k);
        return it == coeffs.end() ? Rational(0) : it->second;
    }
    bool is_zero() const { return coeffs.empty(); }
    bool operator==(const OrientedChain&) const = default;
};

/// Indexed list of simplex keys of one degree (sorted).
class ChainBasis {
public:
    ChainBasis() = default;
    explicit ChainBasis(std::vector<Key> keys) : keys_(std::move(keys)) {
        std::sort(keys_.begin(), keys_.end());
        keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
        for (size_t i = 0; i < keys_.size(); ++i)
            idx_[keys_[i]] = static_cast<int>(i);
    }
    int size() const { return static_cast<int>(keys_.size()); }
    const std::vector<Key>& keys() const { return keys_; }
    const Key& operator[](int i) const { return keys_[i]; }
    int find(const Key& k) const {
        auto it = idx_.find(k);
        return it == idx_.end() ? -1 : it->second;
    }

    /// Coordinates of c; entries outside the basis are dropped.
    SparseVec coords(const OrientedChain& c) const {
        std::vector<std::pair<int, Rational>> e;
        for (const auto& [k, v] : c.coeffs)
            if (int i = find(k); i >= 0)
                e.emplace_back(i, v);
        return sv_from(std::move(e));
    }
    OrientedChain chain(int degree, const SparseVec& v) const {
        OrientedChain c{degree, {}};
        for (const auto& [i, x] : v)
            c.coeffs[keys_[i]] = x;
        return c;
    }

private:
    std::vector<Key> keys_;
    std::unordered_map<Key, int> idx_;
};

/// Boundary of an oriented simplex, faces outside `rows` dropped.
inline SparseVec boundary_column(const Complex& C, const Key& k, const ChainBasis& rows) {
    const SimplexRec& s = C.at(k);
    std::vector<std::pair<int, Rational>> e;
    if (s.dim() == 0)
        return {};
    for (int p = 0; p <= s.dim(); ++p) {
        OrientedSimplexRef r = orientation_face_sign(C, k, s.vertices[p], OrientedSimplexRef{k, 1});
        if (int i = rows.find(r.key); i >= 0)
            e.emplace_back(i, Rational(r.parity));
    }
    return sv_from(std::move(e));
}

/// Matrix of d_i from chains on `cols` (degree i) to chains on `rows`
/// (degree i-1); boundary terms outside `rows` are discarded.
inline SparseMatrix boundary_matrix(const Complex& C, const ChainBasis& cols, const ChainBasis& rows) {
    SparseMatrix M{rows.size(), cols.size(), {}};
    M.columns.reserve(cols.size());
    for (const auto& k : cols.keys())
        M.columns.push_back(boundary_column(C, k, rows));
    return M;
}

inline ChainBasis all_simplices(const Complex& C, int i) { return ChainBasis(C.sorted_keys(i)); }

inline SparseMatrix boundary_matrix(const Complex& C, int i) {
    return boundary_matrix(C, all_simplices(C, i), all_simplices(C, i - 1));
}

inline OrientedChain boundary(const Complex& C, const OrientedChain& c) {
    OrientedChain out{c.degree - 1, {}};
    if (c.degree == 0)
        return out;
    for (const auto& [k, v] : c.coeffs) {
        const SimplexRec& s = C.at(k);
        for (int p = 0; p <= s.dim(); ++p)
            out.add(orientation_face_sign(C, k, s.vertices[p], OrientedSimplexRef{k, 1}), v);
    }
    return out;
}

/// Number of nonzero entries of d_{i-1} d_i over all degrees.
inline long boundary_square_violations(const Complex& C) {
    long bad = 0;
    for (int i = 2; i <= C.max_dim(); ++i) {
        SparseMatrix a = boundary_matrix(C, i), b = boundary_matrix(C, i - 1);
        for (const auto& col : a.columns)
            bad += static_cast<long>(b.apply(col).size());
    }
    return bad;
}

struct HomologyResult {
    int degree = 0;
    int dimension = 0;
    std::vector<OrientedChain> basis; // cycle representatives
    int rank_boundary_out = 0;        // rank of d_i
    int rank_boundary_in = 0;         // rank of d_{i+1}
    int chains = 0;                   // number of i-cells
};

/// Homology of the chain complex spanned by `cells` (per degree), with
/// boundary terms leaving the cell set discarded. `cells[i]` lists degree-i cells.
inline HomologyResult homology_of_cells(const Complex& C, const std::vector<ChainBasis>& cells, int i) {
    static const ChainBasis empty;
    auto at = [&](int k) -> const ChainBasis& { return k >= 0 && k < static_cast<int>(cells.size()) ? cells[k] : empty; };
    HomologyResult r;
    r.degree = i;
    r.chains = at(i).size();
    SparseMatrix out = boundary_matrix(C, at(i), at(i - 1));
    SparseMatrix in = boundary_matrix(C, at(i + 1), at(i));
    auto cycles = kernel(out);
    r.rank_boundary_out = at(i).size() - static_cast<int>(cycles.size());
    Echelon im;
    for (const auto& c : in.columns)
        im.insert(c);
    r.rank_boundary_in = im.rank();
    for (const auto& z : cycles)
        if (in.columns.empty() || im.insert(z))
            r.basis.push_back(at(i).chain(i, z));
    r.dimension = static_cast<int>(r.basis.size());
    return r;
}

inline HomologyResult homology(const Complex& C, int i) {
    std::vector<ChainBasis> cells;
    for (int k = 0; k <= std::max(C.max_dim(), i + 1); ++k)
        cells.push_back(all_simplices(C, k));
    return homology_of_cells(C, cells, i);
}

/// Homology of C relative to the subcomplex A.
inline HomologyResult relative_homology(const Complex& C, const Complex& A, int i) {
    std::vector<ChainBasis> cells;
    for (int k = 0; k <= std::max(C.max_dim(), i + 1); ++k) {
        std::vector<Key> ks;
        for (const auto& s : C.simplices(k))
            if (!A.contains(s.key))
                ks.push_back(s.key);
        cells.push_back(ChainBasis(std::move(ks)));
    }
    return homology_of_cells(C, cells, i);
}

struct CohomologyResult {
    int degree = 0;
    int dimension = 0;
    std::vector<SparseVec> basis; // cocycles in coordinates of the degree-i cells
};

/// Cohomology computed from the transposed (coboundary) matrices.
inline CohomologyResult cohomology_of_cells(const Complex& C, const std::vector<ChainBasis>& cells, int i) {
    static const ChainBasis empty;
    auto at = [&](int k) -> const ChainBasis& { return k >= 0 && k < static_cast<int>(cells.size()) ? cells[k] : empty; };
    SparseMatrix delta_out = boundary_matrix(C, at(i + 1), at(i)).transpose(); // C^i -> C^{i+1}
    SparseMatrix delta_in = boundary_matrix(C, at(i), at(i - 1)).transpose();  // C^{i-1} -> C^i
    CohomologyResult r;
    r.degree = i;
    Echelon im;
    for (const auto& c : delta_in.columns)
        im.insert(c);
    for (const auto& z : kernel(delta_out))
        if (im.insert(z))
            r.basis.push_back(z);
    r.dimension = static_cast<int>(r.basis.size());
    return r;
}

inline CohomologyResult cohomology(const Complex& C, int i) {
    std::vector<ChainBasis> cells;
    for (int k = 0; k <= std::max(C.max_dim(), i + 1); ++k)
        cells.push_back(all_simplices(C, k));
    return cohomology_of_cells(C, cells, i);
}

/// A complex presented through finite truncations: for each alpha on an
/// integer grid, the closure of core(alpha) and the cells of core(alpha)
/// (simplices not in the frontier subcomplex).
struct CoreView {
    std::shared_ptr<const Complex> closure;
    std::vector<ChainBasis> open; // per degree
    int alpha = 0;

    bool in_core(const Key& k) const {
        for (const auto& b : open)
            if (b.find(k) >= 0)
                return true;
        return false;
    }
    int dim() const { return static_cast<int>(open.size()) - 1; }
};

class ExhaustedComplex {
public:
    virtual ~ExhaustedComplex() = default;
    virtual int dimension() const = 0;
    virtual CoreView core(int alpha) const = 0;
};

/// A finite complex viewed as exhausted by itself (empty frontier).
class FiniteExhaustion : public ExhaustedComplex {
public:
    explicit FiniteExhaustion(Complex C) : C_(std::make_shared<const Complex>(std::move(C))) {}
    int dimension() const override { return C_->max_dim(); }
    CoreView core(int alpha) const override {
        CoreView v{C_, {}, alpha};
        for (int k = 0; k <= C_->max_dim(); ++k)
            v.open.push_back(all_simplices(*C_, k));
        return v;
    }

private:
    std::shared_ptr<const Complex> C_;
};

/// Relative homology H_i(closure, frontier) of one core.
inline HomologyResult core_relative_homology(const CoreView& v, int i) {
    auto cells = v.open;
    while (static_cast<int>(cells.size()) <= i + 1)
        cells.emplace_back();
    return homology_of_cells(*v.closure, cells, i);
}

inline CohomologyResult core_relative_cohomology(const CoreView& v, int i) {
    auto cells = v.open;
    while (static_cast<int>(cells.size()) <= i + 1)
        cells.emplace_back();
    return cohomology_of_cells(*v.closure, cells, i);
}

struct BMResult {
    int degree = 0;
    std::vector<int> alphas;
    std::vector<int> dims;             // dim H_i(X, X^(alpha))
    std::vector<int> transition_ranks; // rank of restriction alpha[k+1] -> alpha[k]
    std::vector<int> core_sizes;       // number of cells of core(alpha) in degree i
    bool stabilized = false;
    int stable_dim = -1;
    std::vector<OrientedChain> basis; // relative cycles on the largest core
};

namespace detail {

// Rank of the images of `classes` (chains on a larger core) in H_i of core v.
inline int restriction_rank(const CoreView& v, int i, const std::vector<OrientedChain>& classes) {
    auto cells = v.open;
    while (static_cast<int>(cells.size()) <= i + 1)
        cells.emplace_back();
    SparseMatrix in = boundary_matrix(*v.closure, cells[i + 1], cells[i]);
    Echelon e;
    for (const auto& c : in.columns)
        e.insert(c);
    int base = e.rank();
    for (const auto& z : classes)
        e.insert(cells[i].coords(z));
    return e.rank() - base;
}

inline bool window_stable(const std::vector<int>& dims, const std::vector<int>& ranks, int G) {
    const int n = static_cast<int>(dims.size());
    if (n < G)
        return false;
    for (int k = n - G; k < n; ++k)
        if (dims[k] != dims[n - 1])
            return false;
    for (int k = n - G; k + 1 < n; ++k)
        if (ranks[k] != dims[n - 1])
            return false;
    return true;
}

} // namespace detail

/// Borel-Moore homology as the stabilized inverse limit of relative
/// homology over the cores alpha_lo..alpha_max.
inline BMResult bm_homology(const ExhaustedComplex& E, int degree, int alpha_lo, int alpha_max, int G = 3) {
    require(alpha_max - alpha_lo + 1 >= G, ErrorKind::CoreUnavailable,
            "need at least " + std::to_string(G) + " cores for the stabilization window");
    BMResult r;
    r.degree = degree;
    std::vector<CoreView> views;
    std::vector<std::vector<OrientedChain>> bases;
    for (int a = alpha_lo; a <= alpha_max; ++a) {
        views.push_back(E.core(a));
        auto h = core_relative_homology(views.back(), degree);
        r.alphas.push_back(a);
        r.dims.push_back(h.dimension);
        r.core_sizes.push_back(h.chains);
        bases.push_back(std::move(h.basis));
    }
    for (size_t k = 0; k + 1 < views.size(); ++k)
        r.transition_ranks.push_back(detail::restriction_rank(views[k], degree, bases[k + 1]));
    r.stabilized = detail::window_stable(r.dims, r.transition_ranks, G);
    if (r.stabilized)
        r.stable_dim = r.dims.back();
    r.basis = bases.back();
    return r;
}

struct CompactCohomologyResult {
    std::vector<int> alphas;
    std::vector<int> dims;             // dim H^i(X, X^(alpha))
    std::vector<int> transition_ranks; // rank of extension by zero alpha[k] -> alpha[k+1]
    bool stabilized = false;
    int stable_dim = -1;
};

/// Compact-support cohomology as the stabilized colimit of relative
/// cohomology; transition maps extend cochains by zero.
inline CompactCohomologyResult compact_support_cohomology(const ExhaustedComplex& E, int degree, int alpha_lo,
                                                          int alpha_max, int G = 3) {
    require(alpha_max - alpha_lo + 1 >= G, ErrorKind::CoreUnavailable,
            "need at least " + std::to_string(G) + " cores for the stabilization window");
    CompactCohomologyResult r;
    std::vector<CoreView> views;
    std::vector<CohomologyResult> res;
    for (int a = alpha_lo; a <= alpha_max; ++a) {
        views.push_back(E.core(a));
        res.push_back(core_relative_cohomology(views.back(), degree));
        r.alphas.push_back(a);
        r.dims.push_back(res.back().dimension);
    }
    for (size_t k = 0; k + 1 < views.size(); ++k) {
        // Image of H^i(alpha_k) in H^i(alpha_{k+1}): extend, then reduce modulo coboundaries.
        const CoreView& big = views[k + 1];
        auto cells = big.open;
        while (static_cast<int>(cells.size()) <= degree + 1)
            cells.emplace_back();
        SparseMatrix delta_in = boundary_matrix(*big.closure, cells[degree], degree > 0 ? cells[degree - 1] : ChainBasis{})
                                    .transpose();
        Echelon e;
        for (const auto& c : delta_in.columns)
            e.insert(c);
        int base = e.rank();
        const ChainBasis& small = views[k].open.size() > size_t(degree) ? views[k].open[degree] : ChainBasis{};
        for (const auto& f : res[k].basis) {
            std::vector<std::pair<int, Rational>> ext;
            for (const auto& [i, x] : f) {
                int j = cells[degree].find(small[i]);
                require(j >= 0, ErrorKind::CoreUnavailable, "cores are not nested");
                ext.emplace_back(j, x);
            }
            e.insert(sv_from(std::move(ext)));
        }
        r.transition_ranks.push_back(e.rank() - base);
    }
    r.stabilized = detail::window_stable(r.dims, r.transition_ranks, G);
    if (r.stabilized)
        r.stable_dim = r.dims.back();
    return r;
}

/// Restrictions of a finitely supported cycle to each core: the image under
/// H_i -> H_i^BM, as relative chains. Support must lie in the largest core.
inline std::vector<OrientedChain> canonical_map(const OrientedChain& z, const ExhaustedComplex& E,
                                                const std::vector<int>& alphas) {
    std::vector<OrientedChain> out;
    if (alphas.empty())
        return out;
    CoreView top = E.core(alphas.back());
    for (const auto& [k, v] : z.coeffs)
        require(top.in_core(k), ErrorKind::SupportExceedsCore, "cycle support leaves the largest core");
    for (int a : alphas) {
        CoreView v = a == alphas.back() ? top : E.core(a);
        OrientedChain r{z.degree, {}};
        for (const auto& [k, x] : z.coeffs)
            if (v.in_core(k))
                r.coeffs[k] = x;
        out.push_back(std::move(r));
    }
    return out;
}

/// Pushforward along a simplicial map: each source simplex contributes its
/// coefficient times the parity of the target's vertex order induced from
/// the source's ascending order. `vertex_map` sends source vertices to target vertices.
inline OrientedChain pushforward(const Complex& S, const OrientedChain& c, const SimplicialMap& f) {
    OrientedChain out{c.degree, {}};
    for (const auto& [k, x] : c.coeffs) {
        const SimplexRec& s = S.at(k);
        std::vector<Key> img;
        for (const auto& v : s.vertices)
            img.push_back(f(v));
        out.add({f(k), permutation_parity(img)}, x);
    }
    return out;
}

/// Pushforward of a possibly infinite chain presented on finite pieces:
/// checks finiteness of fibers over `probes` before summing.
inline OrientedChain pushforward_bm(const Complex& S, const OrientedChain& c, const SimplicialMap& f,
                                    long fiber_ceiling) {
    std::map<Key, long> fibers;
    for (const auto& [k, x] : c.coeffs)
        if (++fibers[f(k)] > fiber_ceiling)
            throw Error(ErrorKind::NonFiniteFiber, "fiber over " + hex(f(k)) + " exceeds the ceiling");
    return pushforward(S, c, f);
}

/// Per fine simplex: its coarse image, the orientation parity of the
/// coarse vertex order induced from the fine ascending order, and the
/// ramification index.
struct RamifiedMap {
    struct Entry {
        Key coarse;
        int parity = 1;
        long e = 1;
    };
    std::unordered_map<Key, Entry> fine;
};

/// m'[s'] = e(s') * m[f(s')] for every fine simplex in `domain`.
inline OrientedChain pullback_ramified(const RamifiedMap& f, const OrientedChain& m, const std::vector<Key>& domain) {
    OrientedChain out{m.degree, {}};
    for (const auto& k : domain) {
        auto it = f.fine.find(k);
        require(it != f.fine.end(), ErrorKind::MissingRamificationData, "no ramification index for " + hex(k));
        Rational v = m.at(it->second.coarse);
        if (sgn(v) != 0)
            out.add({k, it->second.parity}, v * it->second.e);
    }
    return out;
}

} // namespace btq
