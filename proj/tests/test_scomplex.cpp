#include <gtest/gtest.h>

#include <sstream>

#include "btq/scomplex.hpp"

using namespace btq;

namespace {

Complex triangle() {
    Complex C;
    add_strict(C, {"a", "b", "c"});
    return C;
}

// Two edges on the same vertex pair: a circle made of two 1-simplices.
Complex bigon() {
    Complex C;
    C.add_vertex("a");
    C.add_vertex("b");
    C.add_simplex("e1", {"a", "b"}, {});
    C.add_simplex("e2", {"a", "b"}, {});
    return C;
}

} // namespace

TEST(Complex, StrictTriangleIsValid) {
    auto C = triangle();
    EXPECT_TRUE(validate_complex(C).empty());
    EXPECT_EQ(C.count(0), 3u);
    EXPECT_EQ(C.count(1), 3u);
    EXPECT_EQ(C.count(2), 1u);
}

TEST(Complex, NonstrictSimplicesAllowed) {
    auto C = bigon();
    EXPECT_TRUE(validate_complex(C).empty());
    EXPECT_EQ(C.count(1), 2u);
}

TEST(Complex, WrongFaceVertexSetReported) {
    Complex C;
    add_strict(C, {"a", "b"});
    add_strict(C, {"a", "c"});
    add_strict(C, {"b", "c"});
    // Face over {a,b} (mask 0b011) points at the edge {a,c}.
    std::vector<Key> faces(8);
    faces[3] = strict_key({"a", "c"});
    faces[5] = strict_key({"a", "c"});
    faces[6] = strict_key({"b", "c"});
    C.add_simplex("T", {"a", "b", "c"}, faces);
    EXPECT_FALSE(validate_complex(C).empty());
}

TEST(Complex, FaceAxioms) {
    auto C = triangle();
    Key s = strict_key({"a", "b", "c"});
    EXPECT_EQ(C.face(s, {"a", "b", "c"}), s);
    Key e = C.face(s, {"a", "c"});
    EXPECT_EQ(C.face(e, {"c"}), C.face(s, {"c"}));
    EXPECT_EQ(C.face("a", {"a"}), "a");
    try {
        C.face(e, {"b"});
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::NotASubset);
    }
}

TEST(Orientation, EdgeSigns) {
    Complex C;
    add_strict(C, {"a", "b"});
    Key e = strict_key({"a", "b"});
    auto drop_b = orientation_face_sign(C, e, "b", OrientedSimplexRef{e, 1});
    EXPECT_EQ(drop_b, (OrientedSimplexRef{"a", 1}));
    auto drop_a = orientation_face_sign(C, e, "a", OrientedSimplexRef{e, 1});
    EXPECT_EQ(drop_a, (OrientedSimplexRef{"b", -1}));
    auto flipped = orientation_face_sign(C, e, "a", OrientedSimplexRef{e, -1});
    EXPECT_EQ(flipped.parity, 1);
    try {
        orientation_face_sign(C, e, "z", OrientedSimplexRef{e, 1});
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::VertexNotInSimplex);
    }
}

TEST(Orientation, AnticommutationOnSimplices) {
    Complex C;
    add_strict(C, {"a", "b", "c", "d"});
    add_strict(C, {"c", "d", "e"});
    EXPECT_EQ(anticommutation_violations(C), 0);
}

TEST(Maps, IdentityCompositeAndFibers) {
    auto C = triangle();
    SimplicialMap id;
    for (int i = 0; i <= C.max_dim(); ++i)
        for (const auto& s : C.simplices(i))
            id.f[s.key] = s.key;
    EXPECT_TRUE(validate_map(id, C, C).empty());
    EXPECT_TRUE(validate_map(compose(id, id), C, C).empty());

    // Rotation a->b->c->a composed with itself stays simplicial.
    std::map<Key, Key> rot = {{"a", "b"}, {"b", "c"}, {"c", "a"}};
    SimplicialMap r;
    for (int i = 0; i <= C.max_dim(); ++i)
        for (const auto& s : C.simplices(i)) {
            std::vector<Key> img;
            for (const auto& v : s.vertices)
                img.push_back(rot[v]);
            r.f[s.key] = strict_key(img);
        }
    EXPECT_TRUE(validate_map(r, C, C).empty());
    EXPECT_TRUE(validate_map(compose(r, r), C, C).empty());

    std::vector<Key> src = C.sorted_keys(1);
    size_t pos = 0;
    auto next = [&]() -> std::optional<Key> {
        if (pos == src.size())
            return std::nullopt;
        return src[pos++];
    };
    auto rep = check_finite_map(next, [&](const Key& k) { return id(k); }, {src.begin(), src.end()}, 1);
    EXPECT_TRUE(rep.finite());
    for (const auto& [k, n] : rep.fiber_size)
        EXPECT_EQ(n, 1);

    long i = 0;
    auto infinite = [&]() -> std::optional<Key> { return "v" + std::to_string(i++); };
    auto flagged = check_finite_map(infinite, [](const Key&) { return Key("p"); }, {"p"}, 1000);
    EXPECT_FALSE(flagged.finite());
}

TEST(Serialization, RoundTrip) {
    Complex C = bigon();
    add_strict(C, {"b", "c", "d"});
    std::ostringstream os;
    write_complex(os, C);
    std::istringstream is(os.str());
    Complex D = read_complex(is);
    std::ostringstream os2;
    write_complex(os2, D);
    EXPECT_EQ(os.str(), os2.str());
    EXPECT_TRUE(validate_complex(D).empty());
}
