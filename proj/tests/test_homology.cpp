#include <gtest/gtest.h>

#include <cstdio>

#include "btq/homology.hpp"

using namespace btq;

namespace {

Key vk(int x) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%05d", x + 50000);
    return buf;
}

Complex line_segment(int lo, int hi) {
    Complex C;
    C.add_vertex(vk(lo));
    for (int x = lo; x < hi; ++x)
        add_strict(C, {vk(x), vk(x + 1)});
    return C;
}

// Ray 0-1-2-...; core(n) = simplices with a vertex < n.
class Ray : public ExhaustedComplex {
public:
    int dimension() const override { return 1; }
    CoreView core(int n) const override {
        auto C = std::make_shared<Complex>(line_segment(0, n));
        CoreView v{C, {}, n};
        std::vector<Key> vs, es;
        for (int x = 0; x < n; ++x) {
            vs.push_back(vk(x));
            es.push_back(strict_key({vk(x), vk(x + 1)}));
        }
        v.open = {ChainBasis(vs), ChainBasis(es)};
        return v;
    }
};

// The line Z, frontier(n) = simplices with all vertices |x| >= n.
class Line : public ExhaustedComplex {
public:
    int dimension() const override { return 1; }
    CoreView core(int n) const override {
        auto C = std::make_shared<Complex>(line_segment(-n, n));
        CoreView v{C, {}, n};
        std::vector<Key> vs, es;
        for (int x = -n + 1; x < n; ++x)
            vs.push_back(vk(x));
        for (int x = -n; x < n; ++x)
            es.push_back(strict_key({vk(x), vk(x + 1)}));
        v.open = {ChainBasis(vs), ChainBasis(es)};
        return v;
    }
};

Complex triangle_boundary() {
    Complex C;
    add_strict(C, {"a", "b"});
    add_strict(C, {"b", "c"});
    add_strict(C, {"a", "c"});
    return C;
}

} // namespace

TEST(Boundary, EdgeAndSquare) {
    Complex C;
    add_strict(C, {"a", "b"});
    auto M = boundary_matrix(C, 1);
    ASSERT_EQ(M.columns.size(), 1u);
    // Rows sorted: a, b. d[a,b] = [a] - [b] with the (-1)^position convention.
    EXPECT_EQ(M.columns[0], (SparseVec{{0, 1}, {1, -1}}));
    Complex T;
    add_strict(T, {"a", "b", "c", "d"});
    EXPECT_EQ(boundary_square_violations(T), 0);
}

TEST(Homology, Circle) {
    auto C = triangle_boundary();
    EXPECT_EQ(homology(C, 1).dimension, 1);
    EXPECT_EQ(homology(C, 0).dimension, 1);
    EXPECT_EQ(cohomology(C, 1).dimension, 1);
    EXPECT_EQ(cohomology(C, 0).dimension, 1);
    auto h = homology(C, 1);
    EXPECT_TRUE(boundary(C, h.basis[0]).is_zero());
}

TEST(Homology, PathAndFilledTriangle) {
    EXPECT_EQ(homology(line_segment(0, 5), 1).dimension, 0);
    EXPECT_EQ(homology(line_segment(0, 5), 0).dimension, 1);
    Complex T;
    add_strict(T, {"a", "b", "c"});
    EXPECT_EQ(homology(T, 1).dimension, 0);
    EXPECT_EQ(homology(T, 2).dimension, 0);
}

TEST(Homology, NonstrictBigon) {
    Complex C;
    C.add_vertex("a");
    C.add_vertex("b");
    C.add_simplex("e1", {"a", "b"}, {});
    C.add_simplex("e2", {"a", "b"}, {});
    auto h = homology(C, 1);
    EXPECT_EQ(h.dimension, 1);
    EXPECT_EQ(h.basis[0].coeffs.size(), 2u);
}

TEST(Homology, UniversalCoefficientsOnSmallComplexes) {
    std::vector<Complex> cs;
    cs.push_back(triangle_boundary());
    cs.push_back(line_segment(0, 3));
    Complex S; // boundary of a tetrahedron: a 2-sphere
    for (auto f : std::vector<std::vector<Key>>{{"a", "b", "c"}, {"a", "b", "d"}, {"a", "c", "d"}, {"b", "c", "d"}})
        add_strict(S, f);
    cs.push_back(S);
    for (const auto& C : cs)
        for (int i = 0; i <= C.max_dim(); ++i)
            EXPECT_EQ(homology(C, i).dimension, cohomology(C, i).dimension);
    EXPECT_EQ(homology(S, 2).dimension, 1);
    EXPECT_EQ(homology(S, 1).dimension, 0);
}

TEST(Homology, RelativeSegment) {
    auto C = line_segment(0, 3);
    Complex A;
    A.add_vertex(vk(3));
    EXPECT_EQ(relative_homology(C, A, 1).dimension, 0);
    A.add_vertex(vk(0));
    EXPECT_EQ(relative_homology(C, A, 1).dimension, 1);
}

TEST(BorelMoore, RayIsZero) {
    Ray R;
    // Oracle: relative boundary on core(n) is the n x n bidiagonal matrix with
    // unit diagonal, hence invertible; no relative cycles in any degree.
    for (int n = 1; n <= 6; ++n) {
        auto v = R.core(n);
        auto M = boundary_matrix(*v.closure, v.open[1], v.open[0]);
        ASSERT_EQ(M.rows, n);
        ASSERT_EQ(M.cols, n);
        EXPECT_EQ(rank(M), n);
    }
    auto bm = bm_homology(R, 1, 2, 7);
    EXPECT_TRUE(bm.stabilized);
    EXPECT_EQ(bm.stable_dim, 0);
    auto hc = compact_support_cohomology(R, 1, 2, 7);
    EXPECT_TRUE(hc.stabilized);
    EXPECT_EQ(hc.stable_dim, 0);
}

TEST(BorelMoore, LineCarriesFundamentalClass) {
    Line L;
    auto bm = bm_homology(L, 1, 2, 6);
    EXPECT_TRUE(bm.stabilized);
    EXPECT_EQ(bm.stable_dim, 1);
    // The class is the sum of all edges oriented upward.
    ASSERT_EQ(bm.basis.size(), 1u);
    Rational c0 = bm.basis[0].coeffs.begin()->second;
    for (const auto& [k, x] : bm.basis[0].coeffs)
        EXPECT_EQ(x, c0);
    auto hc = compact_support_cohomology(L, 1, 2, 6);
    EXPECT_EQ(hc.stable_dim, 1);
}

TEST(BorelMoore, FiniteComplexMatchesHomology) {
    FiniteExhaustion E(triangle_boundary());
    auto bm = bm_homology(E, 1, 0, 3);
    EXPECT_TRUE(bm.stabilized);
    EXPECT_EQ(bm.stable_dim, homology(triangle_boundary(), 1).dimension);
}

TEST(BorelMoore, TooFewCores) {
    Ray R;
    try {
        bm_homology(R, 1, 2, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::CoreUnavailable);
    }
}

TEST(CanonicalMap, ZeroAndSupport) {
    Line L;
    OrientedChain z{1, {}};
    for (const auto& r : canonical_map(z, L, {2, 3}))
        EXPECT_TRUE(r.is_zero());
    OrientedChain far{1, {{strict_key({vk(10), vk(11)}), 1}}};
    try {
        canonical_map(far, L, {2, 3});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SupportExceedsCore);
    }
}

TEST(Pushforward, FoldLineOntoRay) {
    // Fold x -> |x| from [-4,4] onto [0,4].
    auto S = line_segment(-4, 4);
    auto T = line_segment(0, 4);
    SimplicialMap f;
    for (int x = -4; x <= 4; ++x)
        f.f[vk(x)] = vk(std::abs(x));
    for (int x = -4; x < 4; ++x)
        f.f[strict_key({vk(x), vk(x + 1)})] = strict_key({vk(std::abs(x)), vk(std::abs(x + 1))});
    EXPECT_TRUE(validate_map(f, S, T).empty());
    OrientedChain beta{1, {}};
    for (int x = -4; x < 4; ++x)
        beta.coeffs[strict_key({vk(x), vk(x + 1)})] = 1;
    auto img = pushforward_bm(S, beta, f, 2);
    // Oracle: each ray edge {k,k+1} has preimages [k,k+1] (order kept, +1) and
    // [-k-1,-k] (order reversed, -1).
    for (int k = 0; k < 4; ++k) {
        Rational expect = 0;
        for (int x = -4; x < 4; ++x) {
            int a = std::abs(x), b = std::abs(x + 1);
            if (std::min(a, b) == k && std::max(a, b) == k + 1)
                expect += a < b ? 1 : -1;
        }
        EXPECT_EQ(img.at(strict_key({vk(k), vk(k + 1)})), expect);
    }
    EXPECT_THROW(pushforward_bm(S, beta, f, 1), Error);

    SimplicialMap id;
    for (int x = 0; x <= 4; ++x)
        id.f[vk(x)] = vk(x);
    for (int x = 0; x < 4; ++x)
        id.f[strict_key({vk(x), vk(x + 1)})] = strict_key({vk(x), vk(x + 1)});
    EXPECT_EQ(pushforward(T, img, id), img);
    EXPECT_EQ(pushforward(S, beta, compose(id, f)), pushforward(T, pushforward(S, beta, f), id));
}

TEST(Pullback, TrivialCoverAndMissingData) {
    auto C = line_segment(0, 3);
    RamifiedMap f;
    for (const auto& k : C.sorted_keys(1))
        f.fine[k] = {k, 1, 1};
    OrientedChain m{1, {}};
    for (const auto& k : C.sorted_keys(1))
        m.coeffs[k] = 3;
    EXPECT_EQ(pullback_ramified(f, m, C.sorted_keys(1)), m);
    RamifiedMap empty;
    EXPECT_THROW(pullback_ramified(empty, m, C.sorted_keys(1)), Error);
}
