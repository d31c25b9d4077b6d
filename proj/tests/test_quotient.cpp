#include <gtest/gtest.h>

#include "btq/check/oracles.hpp"
#include "btq/quotient.hpp"

using namespace btq;
using check::Rng;

namespace {

std::shared_ptr<QuotientContext> make_ctx(int q, int d, std::vector<int> level = {1}) {
    QuotientParams P;
    P.field = FieldSpec::of_order(q);
    P.d = d;
    P.level = std::move(level);
    return std::make_shared<QuotientContext>(P);
}

std::vector<std::vector<int>> descending_types(int d, int top) {
    std::vector<std::vector<int>> out;
    std::vector<int> n(d);
    std::function<void(int, int)> rec = [&](int i, int hi) {
        if (i == d) {
            out.push_back(n);
            return;
        }
        for (int x = 0; x <= hi; ++x) {
            n[i] = x;
            rec(i + 1, x);
        }
    };
    rec(0, top);
    return out;
}

// Inverse of a unimodular matrix as a rational matrix.
RatMatrix rat_inverse(const PolyMatrix& Y) { return inverse(to_rat(Y)); }

PolyMatrix rand_nonsingular(const Field& F, int d, Rng& rng) {
    for (;;) {
        PolyMatrix Y(&F, d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                Y(i, j) = check::rand_poly(F, i == j ? 1 : 0, rng);
        if (!det(Y).is_zero())
            return Y;
    }
}

} // namespace

TEST(HN, PolygonOfSplitTypes) {
    EXPECT_EQ(delta_p({0, 0, 0}), (std::vector<int>{0, 0}));
    auto h = hn_polygon({4, 0});
    EXPECT_EQ(h.p, (std::vector<int>{0, 4, 4}));
    EXPECT_EQ(h.delta(1), 4);
    auto g = hn_polygon({5, 2, -1});
    EXPECT_EQ(g.delta(1), 3);
    EXPECT_EQ(g.delta(2), 3);
}

TEST(HN, PolygonMatchesSectionSearch) {
    Rng rng(11);
    for (int q : {2, 3}) {
        Field F(FieldSpec::of_order(q));
        for (int d : {2, 3})
            for (const auto& n : descending_types(d, d == 2 ? 5 : 3)) {
                auto L = InfinityLattice::diagonal(&F, n) * check::rand_gamma(F, d, 2, rng);
                HNPolygon expect = hn_polygon(split_lattice(L).type);
                EXPECT_EQ(check::brute_polygon(L, 20), expect);
            }
    }
}

TEST(HN, SandwichBoundAtInfinityAndFinitePlaces) {
    Rng rng(12);
    Field F(FieldSpec::of_order(2));
    for (int trial = 0; trial < 60; ++trial) {
        int d = 2 + trial % 2;
        auto L = check::rand_lattice(F, d, 2, rng);
        auto pL = hn_polygon(split_lattice(L).type);
        // infinity: a descending chain of elementary modifications
        auto Lp = L;
        for (int s = 0, steps = 1 + static_cast<int>(rng() % 3); s < steps; ++s) {
            auto c = check::rand_chain(F, Lp, rng);
            Lp = c.size() > 1 ? c[1] : Lp.twisted(-1);
        }
        auto pLp = hn_polygon(split_lattice(Lp).type);
        int gap = L.degree() - Lp.degree();
        for (int i = 0; i <= d; ++i) {
            EXPECT_GE(pL.p[i] - pLp.p[i], 0);
            EXPECT_LE(pL.p[i] - pLp.p[i], gap);
        }
        // finite places: F' = (A^d Y, L) is isomorphic to (A^d, L Y^{-1})
        PolyMatrix Y = rand_nonsingular(F, d, rng);
        auto Lf = L * rat_inverse(Y);
        auto pLf = hn_polygon(split_lattice(Lf).type);
        int gapf = det(Y).degree();
        EXPECT_EQ(L.degree() - Lf.degree(), gapf);
        for (int i = 0; i <= d; ++i) {
            EXPECT_GE(pL.p[i] - pLf.p[i], 0);
            EXPECT_LE(pL.p[i] - pLf.p[i], gapf);
        }
    }
}

TEST(HN, FlagDegreeNestingAndModification) {
    Rng rng(13);
    Field F(FieldSpec::of_order(3));
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        int d = 2 + trial % 2;
        std::vector<int> n = d == 2 ? std::vector<int>{4 + trial % 3, 0} : std::vector<int>{7, 3 + trial % 2, 0};
        auto L = InfinityLattice::diagonal(&F, n) * check::rand_gamma(F, d, 2, rng);
        auto pL = hn_polygon(n);
        for (int i = 1; i < d; ++i) {
            PolyMatrix W = hn_flag(L, i);
            EXPECT_EQ(subbundle_degree(L, W), pL.p[i]);
            EXPECT_EQ(rat_rank(to_rat(W)), i);
        }
        if (d == 3) {
            auto W1 = to_rat(hn_flag(L, 1)), W2 = to_rat(hn_flag(L, 2));
            RatMatrix both(&F, 3, 3);
            for (int c = 0; c < 3; ++c) {
                both(0, c) = W1(0, c);
                both(1, c) = W2(0, c);
                both(2, c) = W2(1, c);
            }
            EXPECT_EQ(rat_rank(both), 2);
        }
        auto c = check::rand_chain(F, L, rng);
        auto Lp = c.size() > 1 ? c[1] : L.twisted(-1);
        int gap = L.degree() - Lp.degree();
        for (int i = 1; i < d; ++i)
            if (pL.delta(i) > gap) {
                EXPECT_TRUE(same_span(to_rat(hn_flag(Lp, i)), to_rat(hn_flag(L, i))));
                ++checked;
            }
        PolyMatrix Y = rand_nonsingular(F, d, rng);
        auto Lf = L * rat_inverse(Y);
        for (int i = 1; i < d; ++i)
            if (pL.delta(i) > det(Y).degree()) {
                EXPECT_TRUE(same_span(to_rat(hn_flag(Lf, i) * Y), to_rat(hn_flag(L, i))));
                ++checked;
            }
    }
    EXPECT_GT(checked, 40);
    EXPECT_THROW(hn_flag(InfinityLattice::standard(&F, 2), 1), Error);
}

TEST(Quotient, RankTwoCoreIsARay) {
    for (int q : {2, 3}) {
        auto ctx = make_ctx(q, 2);
        QuotientComplex X(ctx);
        const int alpha = 5;
        CoreView v = X.core(alpha);
        EXPECT_EQ(v.open[0].size(), alpha);
        EXPECT_EQ(v.open[1].size(), alpha); // includes the edge leaving the core
        EXPECT_TRUE(validate_complex(*v.closure).empty());
        check::Graph core;
        for (const auto& k : v.closure->sorted_keys(1)) {
            const auto& s = ctx->simplex(k);
            auto a = s.canon.types[0], b = s.canon.types[1];
            core.add_edge(a[0] - a[1], b[0] - b[1]);
        }
        Field F(FieldSpec::of_order(q));
        EXPECT_TRUE(check::isomorphic(core, check::tree_oracle(F, alpha)));
        for (const auto& k : v.open[0].keys())
            EXPECT_LT(ctx->decode(k).type[0], alpha);
    }
}

TEST(Quotient, RankThreeVertexCount) {
    auto ctx = make_ctx(2, 3);
    QuotientComplex X(ctx);
    CoreView v = X.core(3);
    EXPECT_EQ(v.open[0].size(), 9);
    EXPECT_TRUE(validate_complex(*v.closure).empty());
    EXPECT_EQ(anticommutation_violations(*v.closure), 0);
    EXPECT_EQ(boundary_square_violations(*v.closure), 0);
}

TEST(Quotient, CoresAreNestedAndFaceClosed) {
    auto ctx = make_ctx(2, 3);
    QuotientComplex X(ctx);
    std::set<Key> prev;
    for (int alpha = 1; alpha <= 4; ++alpha) {
        CoreView v = X.core(alpha);
        std::set<Key> cur;
        for (const auto& b : v.open)
            cur.insert(b.keys().begin(), b.keys().end());
        EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
        prev = cur;
        for (const auto& k : cur) {
            const auto& s = ctx->simplex(k);
            EXPECT_EQ(s.canon.self_identifications, 0);
        }
    }
    CoreView v = X.core(4);
    std::map<Key, int> degree;
    for (const auto& e : v.closure->sorted_keys(1))
        for (const auto& w : v.closure->at(e).vertices)
            ++degree[w];
    // 7 + 7 neighbours of a vertex in the building for q = 2, d = 3
    for (const auto& k : v.open[0].keys())
        EXPECT_LE(degree[k], 14);
}

TEST(Quotient, GammaInvariance) {
    struct Cfg {
        int q, d;
        std::vector<int> level;
    };
    Rng rng(21);
    for (const Cfg& c : {Cfg{2, 2, {1}}, Cfg{3, 2, {0, 1}}, Cfg{2, 3, {0, 1}}, Cfg{3, 3, {1}}}) {
        auto ctx = make_ctx(c.q, c.d, c.level);
        const Field& F = *ctx->field();
        const auto& G = ctx->level_group();
        const auto& dom = ctx->level_domain();
        for (int trial = 0; trial < 15; ++trial) {
            auto chain = check::rand_chain(F, check::rand_lattice(F, c.d, 1, rng), rng);
            uint64_t g = dom[rng() % dom.size()];
            Key k = ctx->canon_chain(chain, g).key;
            PolyMatrix gamma = check::rand_gamma(F, c.d, 2, rng);
            std::vector<InfinityLattice> moved;
            for (const auto& L : chain)
                moved.push_back(L * gamma);
            uint64_t g2 = G.mul(G.reduce(inverse_unimodular(gamma)), g);
            EXPECT_EQ(ctx->canon_chain(moved, g2).key, k);
            // idempotent: canonical representative maps to itself
            auto p = ctx->decode(k);
            std::vector<InfinityLattice> rep{InfinityLattice::diagonal(&F, p.type)};
            for (const auto& W : p.flag)
                rep.push_back(sublattice_from_subspace(rep[0], W));
            EXPECT_EQ(ctx->canon_chain(rep, p.level).pointed[0], k);
        }
    }
}

TEST(Quotient, LevelDataSeparateOrbits) {
    // Level (t) at d = 2, q = 2: the standard vertex has stabilizer GL_2(F_2),
    // which acts simply transitively on GL_2(F_2).
    auto ctx = make_ctx(2, 2, {0, 1});
    EXPECT_EQ(ctx->level_domain().size(), 6u);
    EXPECT_EQ(ctx->type_data({0, 0}).reps.size(), 1u);
    EXPECT_EQ(ctx->vertex_stabilizer_order({0, 0}, ctx->level_domain()[0]), 1);
    auto full = make_ctx(2, 2);
    EXPECT_EQ(full->vertex_stabilizer_order({0, 0}, 0), 6);
    EXPECT_EQ(full->vertex_stabilizer_order({2, 0}, 0), 8); // F_2^x squared times q^3
}

TEST(Quotient, LevelMapFibersAndPullback) {
    auto coarse = make_ctx(2, 2);
    auto fine = make_ctx(2, 2, {0, 1});
    QuotientComplex Xc(coarse), Xf(fine);
    const int alpha = 4;
    CoreView vf = Xf.core(alpha), vc = Xc.core(alpha);
    RamifiedMap m = level_map(*fine, *coarse, *vf.closure);
    std::map<Key, long> weight;
    for (const auto& [k, e] : m.fine)
        weight[e.coarse] += e.e;
    for (int i = 0; i <= 1; ++i)
        for (const auto& k : vc.open[i].keys())
            EXPECT_EQ(weight[k], 6) << "fiber weight over a core simplex";
    // boundary commutes with pullback on core chains
    Rng rng(5);
    OrientedChain c{1, {}};
    for (const auto& k : vc.open[1].keys())
        c.coeffs[k] = Rational(static_cast<int>(rng() % 7) - 3);
    auto dom1 = vf.open[1].keys();
    auto dom0 = vf.closure->sorted_keys(0);
    auto lhs = boundary(*vf.closure, pullback_ramified(m, c, dom1));
    auto rhs = pullback_ramified(m, boundary(*vc.closure, c), dom0);
    for (const auto& k : dom0)
        EXPECT_EQ(lhs.at(k), rhs.at(k)) << "vertex " << hex(k);
}
