#pragma once

// Independent reference computations used by the tests and by `btq verify`.

#include <random>
#include <set>

#include "btq/building.hpp"
#include "btq/quotient/hn.hpp"

namespace btq::check {

using Rng = std::mt19937_64;

inline Elt rand_elt(const Field& F, Rng& rng) {
    return static_cast<Elt>(std::uniform_int_distribution<int>(0, F.q() - 1)(rng));
}

inline Poly rand_poly(const Field& F, int maxdeg, Rng& rng) {
    std::vector<Elt> c(maxdeg + 1);
    for (auto& x : c)
        x = rand_elt(F, rng);
    return Poly(&F, c);
}

/// Product of random elementary and diagonal matrices, rejected until every
/// entry has degree <= maxdeg.
inline PolyMatrix rand_gamma(const Field& F, int d, int maxdeg, Rng& rng, int steps = 6) {
    for (;;) {
        PolyMatrix g = PolyMatrix::identity(&F, d);
        for (int s = 0; s < steps; ++s) {
            PolyMatrix e = PolyMatrix::identity(&F, d);
            int i = static_cast<int>(rng() % d);
            if (d == 1 || rng() % 4 == 0) {
                e(i, i) = Poly::constant(&F, static_cast<Elt>(1 + rng() % (F.q() - 1)));
            } else {
                int j = static_cast<int>(rng() % (d - 1));
                if (j >= i)
                    ++j;
                e(i, j) = rand_poly(F, maxdeg, rng);
            }
            g = g * e;
        }
        if (max_degree(g) <= maxdeg)
            return g;
    }
}

/// Random lattice with entries p / t^k or p / (t+1)^k.
inline InfinityLattice rand_lattice(const Field& F, int d, int maxdeg, Rng& rng) {
    for (;;) {
        RatMatrix B(&F, d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Poly den = Poly::one(&F);
                Poly base = rng() % 2 ? Poly::t(&F) : Poly::t(&F) + Poly::one(&F);
                for (int r = static_cast<int>(rng() % 3); r > 0; --r)
                    den = den * base;
                B(i, j) = RatFunc(rand_poly(F, maxdeg, rng), den);
            }
        if (!det(B).is_zero())
            return InfinityLattice(B);
    }
}

/// Random chain L_0 > L_1 > ... > L_i > pi L_0 with 0 <= i < d.
inline std::vector<InfinityLattice> rand_chain(const Field& F, const InfinityLattice& L0, Rng& rng) {
    const int d = L0.dim();
    std::vector<InfinityLattice> chain{L0};
    FqRows cur;
    int dim = d;
    for (;;) {
        if (dim <= 1 || rng() % 3 == 0)
            break;
        int k = 1 + static_cast<int>(rng() % (dim - 1));
        // random k-dim subspace of the current one
        FqRows basis = dim == d ? FqRows{} : cur;
        if (dim == d)
            for (int r = 0; r < d; ++r) {
                FqVec e(d, 0);
                e[r] = 1;
                basis.push_back(e);
            }
        FqRows W;
        while (fq_rank(F, W) < k) {
            FqVec v(d, 0);
            for (const auto& b : basis) {
                Elt c = rand_elt(F, rng);
                for (int j = 0; j < d; ++j)
                    v[j] = F.add(v[j], F.mul(c, b[j]));
            }
            W.push_back(v);
            W = fq_span(F, W);
        }
        chain.push_back(sublattice_from_subspace(L0, W));
        cur = W;
        dim = k;
    }
    return chain;
}

/// Simple graph on integer labels.
struct Graph {
    std::set<int> vertices;
    std::set<std::pair<int, int>> edges; // (min, max)

    void add_edge(int a, int b) {
        vertices.insert(a);
        vertices.insert(b);
        edges.emplace(std::min(a, b), std::max(a, b));
    }
};

/// Backtracking isomorphism test for small graphs.
inline bool isomorphic(const Graph& a, const Graph& b) {
    if (a.vertices.size() != b.vertices.size() || a.edges.size() != b.edges.size())
        return false;
    std::vector<int> va(a.vertices.begin(), a.vertices.end()), vb(b.vertices.begin(), b.vertices.end());
    const size_t n = va.size();
    auto adj = [](const Graph& g, const std::vector<int>& vs) {
        std::vector<std::vector<char>> m(vs.size(), std::vector<char>(vs.size(), 0));
        for (auto [x, y] : g.edges) {
            size_t i = std::find(vs.begin(), vs.end(), x) - vs.begin();
            size_t j = std::find(vs.begin(), vs.end(), y) - vs.begin();
            m[i][j] = m[j][i] = 1;
        }
        return m;
    };
    auto A = adj(a, va), B = adj(b, vb);
    std::vector<int> map(n, -1);
    std::vector<char> used(n, 0);
    std::function<bool(size_t)> rec = [&](size_t i) {
        if (i == n)
            return true;
        for (size_t j = 0; j < n; ++j) {
            if (used[j])
                continue;
            bool ok = true;
            for (size_t k = 0; k < i && ok; ++k)
                ok = A[i][k] == B[j][map[k]];
            if (!ok)
                continue;
            map[i] = static_cast<int>(j);
            used[j] = 1;
            if (rec(i + 1))
                return true;
            used[j] = 0;
        }
        return false;
    };
    return rec(0);
}

/// n_1 - n_2 for a rank-2 lattice, read off from section counts.
inline int rank2_gap(const InfinityLattice& L) {
    auto n = bundle_type(L);
    return n[0] - n[1];
}

/// The quotient of the tree by GL_2(F_q[t]) near the core, explored from the
/// standard vertex by breadth-first search with vertex classes labelled by
/// the gap n_1 - n_2. Returns the graph on classes with gap < alpha together
/// with every edge leaving them.
inline Graph tree_oracle(const Field& F, int alpha) {
    Graph g;
    std::map<Key, VertexRef> frontier;
    VertexRef root = vertex_canonical(InfinityLattice::standard(&F, 2));
    std::set<Key> seen{root.key};
    std::vector<VertexRef> layer{root};
    std::set<int> expanded;
    g.vertices.insert(rank2_gap(root.lattice));
    while (!layer.empty()) {
        std::vector<VertexRef> next;
        for (const auto& v : layer) {
            int a = rank2_gap(v.lattice);
            if (a >= alpha)
                continue;
            for (const auto& nb : neighbors(v)) {
                int b = rank2_gap(nb.vertex.lattice);
                g.add_edge(a, b);
                if (seen.insert(nb.vertex.key).second && !expanded.count(b))
                    next.push_back(nb.vertex);
            }
            expanded.insert(a);
        }
        layer = std::move(next);
    }
    return g;
}

/// max{k : H^0(F(-k)) != 0}, the largest degree of a line subbundle.
inline int brute_max_line_degree(const InfinityLattice& L, int hi) {
    for (int k = hi;; --k)
        if (h0_dimension(L, -k) > 0)
            return k;
}

/// p(0..d) for d <= 3 from section counts: p(1) is the maximal line
/// subbundle degree, p(d-1) = deg F + p_{F^dual}(1).
inline HNPolygon brute_polygon(const InfinityLattice& L, int hi) {
    const int d = L.dim();
    HNPolygon h;
    h.p.assign(d + 1, 0);
    h.p[d] = L.degree();
    if (d >= 2)
        h.p[1] = brute_max_line_degree(L, hi);
    if (d >= 3)
        h.p[d - 1] = L.degree() + brute_max_line_degree(dual_lattice(L), hi);
    return h;
}

} // namespace btq::check
