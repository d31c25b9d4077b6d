#include <gtest/gtest.h>

#include "btq/building.hpp"
#include "support.hpp"

using namespace btq;
using btq::gen::Rng;

namespace {

// Random element of GL_d(O_inf) with finitely many terms: products of
// elementary matrices with entries in F_q[1/t] and constant diagonal units.
RatMatrix rand_integral_unit(const Field& F, int d, Rng& rng) {
    RatMatrix u = RatMatrix::identity(&F, d);
    for (int s = 0; s < 6; ++s) {
        RatMatrix e = RatMatrix::identity(&F, d);
        int i = static_cast<int>(rng() % d);
        if (d == 1 || rng() % 3 == 0) {
            e(i, i) = RatFunc::constant(&F, gen::rand_unit(F, rng));
        } else {
            int j = static_cast<int>(rng() % (d - 1));
            if (j >= i)
                ++j;
            RatFunc x(&F);
            for (int k = 0; k <= 2; ++k)
                x += RatFunc::monomial(&F, gen::rand_elt(F, rng), -k);
            e(i, j) = x;
        }
        u = u * e;
    }
    return u;
}

RatMatrix standard_basis(const Field& F, int d) { return RatMatrix::identity(&F, d); }

} // namespace

TEST(Hermite, StandardAndHomothety) {
    Field F(FieldSpec::of_order(3));
    auto L = InfinityLattice::standard(&F, 3);
    auto v = vertex_canonical(L);
    EXPECT_EQ(v.diag, std::vector<int>({0, 0, 0}));
    EXPECT_EQ(v.key, vertex_key(L.twisted(-1)));
    EXPECT_EQ(v.key, vertex_key(L.twisted(5)));
    EXPECT_NE(v.key, vertex_key(InfinityLattice::diagonal(&F, {1, 0, 0})));
}

TEST(Hermite, RandomIntegralUnitsAndHomotheties) {
    for (int q : {2, 3}) {
        Field F(FieldSpec::of_order(q));
        Rng rng(100 + q);
        for (int it = 0; it < 200; ++it) {
            int d = 2 + it % 3;
            auto L = gen::rand_lattice(F, d, 2, rng);
            Key k = vertex_key(L);
            RatMatrix u = rand_integral_unit(F, d, rng);
            int shift = static_cast<int>(rng() % 7) - 3;
            InfinityLattice M(u * L.basis());
            ASSERT_EQ(vertex_key(M.twisted(shift)), k) << L.basis().to_string();
            auto v = vertex_canonical(L);
            EXPECT_EQ(vertex_key(v.lattice), k);
        }
    }
}

TEST(Hermite, FormShape) {
    Field F(FieldSpec::of_order(2));
    Rng rng(3);
    for (int it = 0; it < 50; ++it) {
        auto L = gen::rand_lattice(F, 3, 2, rng);
        auto h = hermite_form(L.basis());
        EXPECT_EQ(*std::min_element(h.a.begin(), h.a.end()), 0);
        for (int i = 0; i < 3; ++i) {
            EXPECT_EQ(h.H(i, i), RatFunc::monomial(&F, 1, -h.a[i]));
            for (int j = 0; j < i; ++j)
                EXPECT_TRUE(h.H(i, j).is_zero());
            for (int j = i + 1; j < 3; ++j)
                EXPECT_EQ(truncate_mod_pi(h.H(i, j), h.a[j]), h.H(i, j));
        }
        // Same lattice class: H and B generate homothetic lattices.
        auto B = L.basis();
        RatMatrix X = h.H * inverse(B);
        int shift = -det(X).degree() / 3;
        InfinityLattice HL(h.H);
        EXPECT_TRUE(lattice_contains(L.twisted(-shift), HL) && lattice_contains(HL, L.twisted(-shift)));
    }
}

TEST(Neighbors, Counts) {
    for (int q : {2, 3}) {
        Field F(FieldSpec::of_order(q));
        for (int d : {2, 3}) {
            auto v = vertex_canonical(InfinityLattice::standard(&F, d));
            auto ns = neighbors(v);
            long expect = 0;
            for (int k = 1; k < d; ++k)
                expect += static_cast<long>(subspaces(F, d, k).size());
            EXPECT_EQ(static_cast<long>(ns.size()), expect);
            long gauss = 0;
            for (int k = 1; k < d; ++k)
                gauss += gaussian_binomial(q, d, k);
            EXPECT_EQ(expect, gauss);
            std::set<Key> distinct;
            for (const auto& n : ns)
                distinct.insert(n.vertex.key);
            EXPECT_EQ(static_cast<long>(distinct.size()), expect);
            if (d == 2)
                EXPECT_EQ(expect, q + 1);
            if (d == 3 && q == 2)
                EXPECT_EQ(expect, 14);
        }
    }
}

TEST(Neighbors, Symmetric) {
    Field F(FieldSpec::of_order(2));
    Rng rng(9);
    for (int it = 0; it < 10; ++it) {
        auto v = vertex_canonical(gen::rand_lattice(F, 3, 1, rng));
        for (const auto& n : neighbors(v)) {
            bool back = false;
            for (const auto& m : neighbors(n.vertex))
                back = back || m.vertex.key == v.key;
            EXPECT_TRUE(back);
        }
    }
}

TEST(Ball, ValidAndSignCalculus) {
    Field F(FieldSpec::of_order(2));
    auto v = vertex_canonical(InfinityLattice::standard(&F, 3));
    Complex C = building_ball(v, 1);
    EXPECT_TRUE(validate_complex(C).empty());
    EXPECT_EQ(C.count(0), 15u);
    EXPECT_EQ(C.count(2), 21u); // full flags in F_2^3: 7 * 3
    EXPECT_EQ(anticommutation_violations(C), 0);
    EXPECT_EQ(boundary_square_violations(C), 0);
}

TEST(Apartment, StandardSimplices) {
    Field F(FieldSpec::of_order(2));
    auto V = standard_basis(F, 2);
    auto s0 = apartment_simplex(V, {{0, 0}});
    EXPECT_EQ(s0.key(), vertex_key(InfinityLattice::standard(&F, 2)));
    auto e = apartment_simplex(V, {{0, 0}, {1, 0}});
    std::set<Key> got(e.vertex_keys.begin(), e.vertex_keys.end());
    std::set<Key> want = {vertex_key(InfinityLattice::standard(&F, 2)),
                          vertex_key(InfinityLattice::diagonal(&F, {-1, 0}))};
    EXPECT_EQ(got, want);
    EXPECT_TRUE(lattice_contains(e.chain[0], e.chain[1]));
    EXPECT_THROW(apartment_simplex(V, {{0, 0}, {2, 0}}), Error);
    RatMatrix sing = RatMatrix::from_rows({{RatFunc::constant(&F, 1), RatFunc::constant(&F, 1)},
                                          {RatFunc::constant(&F, 1), RatFunc::constant(&F, 1)}});
    try {
        apartment_simplex(sing, {{0, 0}});
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::SingularBasis);
    }
}

TEST(Apartment, OrientationExamples) {
    Field F(FieldSpec::of_order(2));
    Apartment A(standard_basis(F, 2));
    auto o1 = apartment_orientation_order({{0, 0}, {1, 0}});
    EXPECT_EQ(o1, (std::vector<Point>{{1, 0}, {0, 0}}));
    auto o2 = apartment_orientation_order({{0, 0}, {0, 1}});
    EXPECT_EQ(o2, (std::vector<Point>{{0, 0}, {0, 1}}));
    // Both edges contain (0,0) in the same slot-relative role: the orderings
    // put (0,0) second in one and first in the other.
    EXPECT_EQ(std::find(o1.begin(), o1.end(), Point{0, 0}) - o1.begin(), 1);
    EXPECT_EQ(std::find(o2.begin(), o2.end(), Point{0, 0}) - o2.begin(), 0);
    EXPECT_THROW(apartment_orientation_order({{0, 0}}), Error);
}

TEST(Apartment, LiftIndependence) {
    Field F(FieldSpec::of_order(3));
    Rng rng(11);
    for (int it = 0; it < 60; ++it) {
        int d = 2 + it % 3;
        RatMatrix V = gen::rand_lattice(F, d, 1, rng).basis();
        Apartment A(V);
        auto window = apartment_window(d, 2);
        const auto& chain = window[rng() % window.size()];
        int i = static_cast<int>(rng() % d);
        std::vector<Point> sub(chain.begin(), chain.begin() + i + 1);
        // All small lifts: rotations of the periodic chain, and global shifts.
        Key ref = apartment_simplex(V, sub).key();
        OrientedSimplexRef oref;
        if (i == d - 1)
            oref = apartment_orientation(A, sub);
        for (int r = 0; r <= i; ++r)
            for (int sh = -2; sh <= 2; ++sh) {
                std::vector<Point> lift;
                for (int k = 0; k <= i; ++k) {
                    Point x = sub[(r + k) % (i + 1)];
                    int m = sh + ((r + k) >= i + 1 ? 1 : 0);
                    for (auto& c : x)
                        c += m;
                    lift.push_back(x);
                }
                EXPECT_EQ(apartment_simplex(V, lift).key(), ref);
                if (i == d - 1)
                    EXPECT_EQ(apartment_orientation(A, lift), oref);
            }
    }
}

TEST(Apartment, IotaInjectiveOnWindow) {
    Field F(FieldSpec::of_order(2));
    Rng rng(12);
    for (int d : {2, 3}) {
        Apartment A(gen::rand_lattice(F, d, 1, rng).basis());
        auto window = apartment_window(d, 3);
        std::set<Key> keys;
        for (const auto& s : window)
            keys.insert(cyclic_simplex_key(A.cyclic_keys(s)));
        EXPECT_EQ(keys.size(), window.size());
        std::set<Key> vs;
        std::set<Point> pts;
        for (const auto& s : window)
            for (const auto& x : s) {
                pts.insert(normalize_point(x));
                vs.insert(A.vertex(x));
            }
        EXPECT_EQ(vs.size(), pts.size());
    }
}

TEST(Apartment, FundamentalChainIsCycle) {
    Field F(FieldSpec::of_order(2));
    Rng rng(13);
    for (int d : {2, 3, 4}) {
        int R = d == 4 ? 3 : 5;
        Apartment A(gen::rand_lattice(F, d, 1, rng).basis());
        auto window = apartment_window(d, R);
        auto beta = fundamental_chain(A, window);
        EXPECT_EQ(beta.coeffs.size(), window.size());
        for (const auto& [k, c] : beta.coeffs)
            EXPECT_TRUE(c == 1 || c == -1);
        Complex C = apartment_complex(A, window);
        EXPECT_TRUE(validate_complex(C).empty());
        auto db = boundary(C, beta);
        auto interior = interior_faces(A, window);
        EXPECT_FALSE(interior.empty());
        for (const auto& k : interior)
            EXPECT_EQ(db.at(k), 0) << "d=" << d;
    }
    Apartment A1(standard_basis(F, 1));
    auto b1 = fundamental_chain(A1, {});
    EXPECT_EQ(b1.coeffs.size(), 1u);
}
