#pragma once

#include <chrono>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "btq/check/oracles.hpp"
#include "btq/modsym.hpp"

namespace btq::acceptance {

struct Outcome {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
    double budget = 0;
};

struct Options {
    std::set<int> only;     // empty selects every criterion
    std::string golden_dir; // directory holding the pinned automorphic table
    std::function<void(const std::string&)> progress;
    struct ScanRowSink* scan = nullptr; // receives the span scan table when set
};

namespace detail {

// Collects failed checks; the first few messages are kept for the report.
struct Tally {
    long checks = 0;
    long failures = 0;
    std::vector<std::string> notes;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (ok)
            return;
        ++failures;
        if (notes.size() < 5)
            notes.push_back(what);
    }

    std::string summary() const {
        std::ostringstream os;
        os << checks << " checks, " << failures << " failed";
        for (const auto& n : notes)
            os << "; " << n;
        return os.str();
    }
};

inline std::shared_ptr<QuotientContext> context(int q, int d, std::vector<int> level = {1},
                                                bool identity_component = false) {
    QuotientParams P;
    P.field = FieldSpec::of_order(q);
    P.d = d;
    P.level = std::move(level);
    P.identity_component = identity_component;
    return std::make_shared<QuotientContext>(P);
}

inline std::string level_name(const std::vector<int>& f) {
    std::string s;
    for (int k = static_cast<int>(f.size()) - 1; k >= 0; --k)
        s += std::to_string(f[k]);
    return "(" + s + ")";
}

inline void sign_calculus(Tally& t, const Complex& C, const std::string& what) {
    t.expect(validate_complex(C).empty(), what + ": invalid complex");
    t.expect(anticommutation_violations(C) == 0, what + ": anticommutation");
    t.expect(boundary_square_violations(C) == 0, what + ": boundary squared");
}

inline std::vector<std::vector<int>> descending_types(int d, int top) {
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

inline PolyMatrix rand_nonsingular(const Field& F, int d, int maxdeg, check::Rng& rng) {
    for (;;) {
        PolyMatrix Y(&F, d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                Y(i, j) = check::rand_poly(F, maxdeg, rng);
        if (!det(Y).is_zero())
            return Y;
    }
}

// Independent first Betti number of a graph: E - V + components.
inline int graph_betti1(const Complex& C) {
    auto vs = C.sorted_keys(0);
    std::map<Key, int> idx;
    for (size_t i = 0; i < vs.size(); ++i)
        idx[vs[i]] = static_cast<int>(i);
    std::vector<int> parent(vs.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    int comps = static_cast<int>(vs.size());
    auto es = C.sorted_keys(1);
    for (const auto& e : es) {
        const auto& w = C.at(e).vertices;
        int a = find(idx.at(w[0])), b = find(idx.at(w[1]));
        if (a != b) {
            parent[a] = b;
            --comps;
        }
    }
    return static_cast<int>(es.size()) - static_cast<int>(vs.size()) + comps;
}

struct QuotientConfig {
    int q, d;
    std::vector<int> level;
    bool identity_component;
    int alpha_lo, alpha_max;
};

// The configurations on which stabilization and duality are checked.
inline std::vector<QuotientConfig> test_configs() {
    return {
        {2, 2, {1}, false, 2, 7},       {3, 2, {1}, false, 2, 7},    {2, 2, {0, 1}, false, 2, 7},
        {3, 2, {0, 1}, false, 2, 6},    {2, 2, {1, 1, 1}, true, 2, 7}, {3, 2, {1, 0, 1}, true, 2, 6},
        {2, 3, {1}, false, 3, 5},
    };
}

inline std::string config_name(const QuotientConfig& c) {
    return "q=" + std::to_string(c.q) + " d=" + std::to_string(c.d) + " level " + level_name(c.level) +
           (c.identity_component ? " id" : "");
}

} // namespace detail

/// Sign calculus on building balls, quotient cores and apartments.
inline Outcome sign_calculus() {
    detail::Tally t;
    for (int q : {2, 3}) {
        Field F(FieldSpec::of_order(q));
        for (int d : {2, 3, 4}) {
            Complex C = building_ball(vertex_canonical(InfinityLattice::standard(&F, d)), 1);
            detail::sign_calculus(t, C, "ball q=" + std::to_string(q) + " d=" + std::to_string(d));
        }
    }
    for (const auto& c : detail::test_configs()) {
        QuotientComplex X(detail::context(c.q, c.d, c.level, c.identity_component));
        detail::sign_calculus(t, *X.core_ref(c.alpha_lo + 1).closure, "core " + detail::config_name(c));
    }
    Field F(FieldSpec::of_order(3));
    check::Rng rng(101);
    for (int d : {2, 3, 4}) {
        Apartment A(check::rand_lattice(F, d, 1, rng).basis());
        detail::sign_calculus(t, apartment_complex(A, apartment_window(d, 3)), "apartment d=" + std::to_string(d));
    }
    return {1, "sign calculus", t.failures == 0, t.summary(), 0, 60};
}

/// The fundamental chain has no boundary at interior faces.
inline Outcome fundamental_cycle() {
    detail::Tally t;
    Field F(FieldSpec::of_order(2));
    check::Rng rng(102);
    for (int d : {2, 3, 4})
        for (int R = 1; R <= 6; ++R) {
            Apartment A(check::rand_lattice(F, d, 1, rng).basis());
            auto window = apartment_window(d, R);
            auto beta = fundamental_chain(A, window);
            Complex C = apartment_complex(A, window);
            auto db = boundary(C, beta);
            auto interior = interior_faces(A, window);
            t.expect(beta.coeffs.size() == window.size(), "window simplices collide");
            for (const auto& k : interior)
                t.expect(db.at(k) == 0, "d=" + std::to_string(d) + " R=" + std::to_string(R) + " boundary at " + hex(k));
        }
    return {2, "fundamental chain is a cycle", t.failures == 0, t.summary(), 0, 60};
}

/// Every small lift of a simplex gives the same key and orientation.
inline Outcome lift_independence() {
    detail::Tally t;
    Field F(FieldSpec::of_order(3));
    check::Rng rng(103);
    for (int it = 0; it < 200; ++it) {
        int d = 2 + it % 3;
        RatMatrix V = check::rand_lattice(F, d, 1, rng).basis();
        Apartment A(V);
        auto window = apartment_window(d, 3);
        const auto& chain = window[rng() % window.size()];
        int i = static_cast<int>(rng() % d);
        std::vector<Point> sub(chain.begin(), chain.begin() + i + 1);
        Key ref = apartment_simplex(V, sub).key();
        OrientedSimplexRef oref;
        if (i == d - 1)
            oref = apartment_orientation(A, sub);
        // small lifts are the rotations of the periodic chain and their shifts
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
                t.expect(apartment_simplex(V, lift).key() == ref, "key depends on the lift");
                if (i == d - 1)
                    t.expect(apartment_orientation(A, lift) == oref, "orientation depends on the lift");
            }
    }
    return {3, "lift independence", t.failures == 0, t.summary(), 0, 60};
}

/// Rank two full-level cores against breadth-first search on the tree.
inline Outcome tree_oracle_equivalence() {
    detail::Tally t;
    for (int q : {2, 3}) {
        auto ctx = detail::context(q, 2);
        QuotientComplex X(ctx);
        Field F(FieldSpec::of_order(q));
        for (int alpha = 1; alpha <= 8; ++alpha) {
            const CoreView& v = X.core_ref(alpha);
            check::Graph g;
            for (const auto& k : v.closure->sorted_keys(0)) {
                auto n = ctx->decode(k).type;
                g.vertices.insert(n[0] - n[1]);
            }
            for (const auto& k : v.closure->sorted_keys(1)) {
                const auto& s = ctx->simplex(k);
                auto a = ctx->decode(s.vertices[0]).type, b = ctx->decode(s.vertices[1]).type;
                g.add_edge(a[0] - a[1], b[0] - b[1]);
            }
            t.expect(check::isomorphic(g, check::tree_oracle(F, alpha)),
                     "q=" + std::to_string(q) + " alpha=" + std::to_string(alpha));
        }
    }
    return {4, "rank two oracle equivalence", t.failures == 0, t.summary(), 0, 300};
}

/// Canonical keys are invariant under the arithmetic group.
inline Outcome gamma_invariance() {
    detail::Tally t;
    check::Rng rng(105);
    for (int q : {2, 3})
        for (int d : {2, 3})
            for (std::vector<int> level : {std::vector<int>{1}, std::vector<int>{0, 1}}) {
                auto ctx = detail::context(q, d, level);
                const Field& F = *ctx->field();
                const auto& G = ctx->level_group();
                const auto& dom = ctx->level_domain();
                for (int trial = 0; trial < 200; ++trial) {
                    auto chain = check::rand_chain(F, check::rand_lattice(F, d, 1, rng), rng);
                    uint64_t g = dom[rng() % dom.size()];
                    Key k = ctx->canon_chain(chain, g).key;
                    PolyMatrix gamma = check::rand_gamma(F, d, 2, rng);
                    std::vector<InfinityLattice> moved;
                    for (const auto& L : chain)
                        moved.push_back(L * gamma);
                    uint64_t g2 = G.mul(G.reduce(inverse_unimodular(gamma)), g);
                    t.expect(ctx->canon_chain(moved, g2).key == k, "q=" + std::to_string(q) + " d=" +
                                                                       std::to_string(d) + " level " +
                                                                       detail::level_name(level));
                }
            }
    return {5, "arithmetic group invariance", t.failures == 0, t.summary(), 0, 600};
}

/// Polygons against brute force, the sandwich bound and the flag identity.
inline Outcome hn_machinery() {
    detail::Tally t;
    check::Rng rng(106);
    for (int q : {2, 3}) {
        Field F(FieldSpec::of_order(q));
        for (int d : {2, 3})
            for (const auto& n : detail::descending_types(d, 5)) {
                auto L = InfinityLattice::diagonal(&F, n) * check::rand_gamma(F, d, 2, rng);
                t.expect(check::brute_polygon(L, 20) == hn_polygon(split_lattice(L).type), "polygon mismatch");
            }
    }
    Field F(FieldSpec::of_order(2));
    for (int trial = 0; trial < 500; ++trial) {
        int d = 2 + trial % 2;
        auto L = check::rand_lattice(F, d, 2, rng);
        auto pL = hn_polygon(split_lattice(L).type);
        InfinityLattice Lp = L;
        int gap = 0;
        if (trial % 4 < 2) {
            for (int s = 0, steps = 1 + static_cast<int>(rng() % 3); s < steps; ++s) {
                auto c = check::rand_chain(F, Lp, rng);
                Lp = c.size() > 1 ? c[1] : Lp.twisted(-1);
            }
            gap = L.degree() - Lp.degree();
        } else {
            PolyMatrix Y = detail::rand_nonsingular(F, d, 1, rng);
            Lp = L * inverse(to_rat(Y));
            gap = det(Y).degree();
            t.expect(L.degree() - Lp.degree() == gap, "degree of a finite modification");
        }
        auto pLp = hn_polygon(split_lattice(Lp).type);
        for (int i = 0; i <= d; ++i)
            t.expect(pL.p[i] - pLp.p[i] >= 0 && pL.p[i] - pLp.p[i] <= gap, "sandwich bound");
    }
    long identities = 0;
    Field F3(FieldSpec::of_order(3));
    for (int trial = 0; trial < 200; ++trial) {
        int d = 2 + trial % 2;
        std::vector<int> n = d == 2 ? std::vector<int>{3 + trial % 4, 0} : std::vector<int>{7, 2 + trial % 3, 0};
        auto L = InfinityLattice::diagonal(&F3, n) * check::rand_gamma(F3, d, 2, rng);
        auto pL = hn_polygon(n);
        auto c = check::rand_chain(F3, L, rng);
        auto Lp = c.size() > 1 ? c[1] : L.twisted(-1);
        int gap = L.degree() - Lp.degree();
        for (int i = 1; i < d; ++i)
            if (pL.delta(i) > gap) {
                t.expect(same_span(to_rat(hn_flag(Lp, i)), to_rat(hn_flag(L, i))), "flag of a sublattice");
                ++identities;
            }
        PolyMatrix Y = detail::rand_nonsingular(F3, d, 1, rng);
        auto Lf = L * inverse(to_rat(Y));
        for (int i = 1; i < d; ++i)
            if (pL.delta(i) > det(Y).degree()) {
                t.expect(same_span(to_rat(hn_flag(Lf, i) * Y), to_rat(hn_flag(L, i))), "flag at a finite place");
                ++identities;
            }
    }
    t.expect(identities >= 100, "too few flag identities exercised");
    return {6, "HN machinery", t.failures == 0, t.summary(), 0, 600};
}

/// Cores are finite and nested; relative (co)homology and transitions are constant.
inline Outcome stabilization() {
    detail::Tally t;
    std::string dims;
    for (const auto& c : detail::test_configs()) {
        QuotientComplex X(detail::context(c.q, c.d, c.level, c.identity_component));
        const std::string name = detail::config_name(c);
        std::set<Key> prev;
        for (int a = c.alpha_lo; a <= c.alpha_max; ++a) {
            const CoreView& v = X.core_ref(a);
            std::set<Key> cur;
            for (const auto& b : v.open)
                cur.insert(b.keys().begin(), b.keys().end());
            t.expect(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()), name + ": cores not nested");
            prev = std::move(cur);
        }
        const int top = c.d - 1;
        auto bm = bm_homology(X, top, c.alpha_lo, c.alpha_max);
        auto hc = compact_support_cohomology(X, top, c.alpha_lo, c.alpha_max);
        for (size_t k = 0; k < bm.dims.size(); ++k) {
            t.expect(bm.dims[k] == bm.dims[0], name + ": relative homology varies");
            t.expect(hc.dims[k] == hc.dims[0], name + ": relative cohomology varies");
        }
        for (size_t k = 0; k < bm.transition_ranks.size(); ++k) {
            t.expect(bm.transition_ranks[k] == bm.dims[0], name + ": restriction not an isomorphism");
            t.expect(hc.transition_ranks[k] == hc.dims[0], name + ": extension not an isomorphism");
        }
        t.expect(bm.stabilized && hc.stabilized, name + ": not stabilized");
        dims += (dims.empty() ? "" : ", ") + std::to_string(bm.dims.back());
    }
    return {7, "truncation and stabilization", t.failures == 0, "stable dims " + dims + "; " + t.summary(), 0, 600};
}

/// Homology and cohomology dimensions agree, also after stabilization.
inline Outcome duality() {
    detail::Tally t;
    for (const auto& c : detail::test_configs()) {
        QuotientComplex X(detail::context(c.q, c.d, c.level, c.identity_component));
        const std::string name = detail::config_name(c);
        for (int a : {c.alpha_lo, c.alpha_max}) {
            const Complex& C = *X.core_ref(a).closure;
            for (int i = 0; i < c.d; ++i)
                t.expect(homology(C, i).dimension == cohomology(C, i).dimension,
                         name + ": H_" + std::to_string(i) + " vs H^" + std::to_string(i));
        }
        const int top = c.d - 1;
        auto bm = bm_homology(X, top, c.alpha_lo, c.alpha_max);
        auto hc = compact_support_cohomology(X, top, c.alpha_lo, c.alpha_max);
        t.expect(bm.stabilized && hc.stabilized && bm.stable_dim == hc.stable_dim, name + ": BM vs compact support");
    }
    return {8, "duality", t.failures == 0, t.summary(), 0, 300};
}

/// Modular symbols: relative cycles, coherent across alpha, certified collars.
inline Outcome modular_symbols(const std::string& golden_dir) {
    detail::Tally t;
    struct Case {
        int q, d;
        std::vector<int> level;
        bool identity;
        int bases;
    };
    check::Rng rng(109);
    for (const Case& c : {Case{2, 2, {1}, false, 3}, Case{2, 2, {1, 1, 1}, true, 5}, Case{3, 2, {1, 0, 1}, true, 3},
                          Case{2, 3, {1}, false, 2}}) {
        auto ctx = detail::context(c.q, c.d, c.level, c.identity);
        QuotientComplex X(ctx);
        const Field& F = *ctx->field();
        const std::string name = "q=" + std::to_string(c.q) + " d=" + std::to_string(c.d) + " level " +
                                 detail::level_name(c.level);
        for (int b = 0; b < c.bases; ++b) {
            RatMatrix V = b == 0 ? RatMatrix::identity(&F, c.d) : to_rat(detail::rand_nonsingular(F, c.d, 1, rng));
            uint64_t g = ctx->level_domain()[rng() % ctx->level_domain().size()];
            const int lo = c.d, hi = c.d == 2 ? 6 : 4;
            std::optional<ModularSymbol> prev;
            for (int a = lo; a <= hi; ++a) {
                ModularSymbol m = modular_symbol(X, V, a, g);
                const auto& cert = m.certificate;
                t.expect(cert.relative_cycle, name + ": not a relative cycle");
                t.expect(cert.max_fiber > 0 || m.chain.coeffs.empty(), name + ": empty fibers");
                // the collar is re-checked from bundle types alone
                for (const auto& x : shell_points(c.d, cert.radius)) {
                    auto dp = delta_p(bundle_type(apartment_lattice(V, x)));
                    t.expect(std::any_of(dp.begin(), dp.end(), [&](int v) { return v >= a + cert.margin; }),
                             name + ": shell vertex inside the collar");
                }
                if (prev) {
                    const CoreView& v = X.core_ref(a - 1);
                    std::map<Key, Rational> restricted;
                    for (const auto& [k, x] : m.chain.coeffs)
                        if (v.open[c.d - 1].find(k) >= 0)
                            restricted.emplace(k, x);
                    t.expect(restricted == prev->chain.coeffs, name + ": restriction mismatch");
                }
                prev = std::move(m);
            }
        }
    }
    if (!golden_dir.empty()) {
        auto ctx = detail::context(2, 2);
        QuotientComplex X(ctx);
        auto m = modular_symbol(X, RatMatrix::identity(ctx->field(), 2), 5, 0);
        std::ifstream in(golden_dir + "/modsym_d2_q2_standard.csv");
        std::stringstream ss;
        ss << in.rdbuf();
        t.expect(in.is_open(), "golden file unreadable");
        t.expect(ss.str() == automorphic_csv(automorphic_export(X, m.chain, 5)), "golden table mismatch");
    }
    return {9, "modular symbols", t.failures == 0, t.summary(), 0, 600};
}

/// One row of the span scan.
struct ScanRow {
    int q = 0;
    std::vector<int> level;
    int alpha = 0;
    int betti = 0;     // E - V + components on the closure at alpha
    int image_dim = 0; // columns of the homology image
    SpanStatus status = SpanStatus::Vacuous;
    int degree_used = -1;
    bool verified = false;
    std::string error;
    double seconds = 0;
};

struct ScanRowSink {
    std::vector<ScanRow> rows;
};

/// Span containment over every monic level of degree <= 3, q in {2, 3}, d = 2.
inline Outcome span_scan(std::vector<ScanRow>* rows_out = nullptr,
                         const std::function<void(const std::string&)>& progress = {}) {
    detail::Tally t;
    std::vector<ScanRow> rows;
    long vacuous = 0, contained = 0;
    SpanPolicy pol;
    pol.max_degree = 3;
    for (int q : {2, 3})
        for (int deg = 0; deg <= 3; ++deg) {
            int count = 1;
            for (int i = 0; i < deg; ++i)
                count *= q;
            for (int code = 0; code < count; ++code) {
                ScanRow r;
                r.q = q;
                for (int i = 0, x = code; i < deg; ++i, x /= q)
                    r.level.push_back(x % q);
                r.level.push_back(1);
                auto t0 = std::chrono::steady_clock::now();
                try {
                    QuotientComplex X(detail::context(q, 2, r.level, true));
                    auto img = homology_image(X, 2, 4);
                    r.alpha = img.alpha;
                    r.image_dim = static_cast<int>(img.columns.size());
                    r.betti = detail::graph_betti1(*X.core_ref(img.alpha).closure);
                    auto cert = span_test(X, img, pol);
                    r.status = cert.status;
                    r.degree_used = cert.degree_used;
                    r.verified = cert.verified;
                } catch (const Error& e) {
                    r.error = e.what();
                }
                r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                const std::string name = "q=" + std::to_string(q) + " level " + detail::level_name(r.level);
                t.expect(r.error.empty(), name + ": " + r.error);
                t.expect(r.image_dim == r.betti, name + ": image dimension differs from the graph rank");
                if (r.error.empty()) {
                    if (r.betti == 0) {
                        t.expect(r.status == SpanStatus::Vacuous, name + ": expected vacuous");
                        ++vacuous;
                    } else {
                        t.expect(r.status == SpanStatus::Contained && r.verified, name + ": " + to_string(r.status));
                        contained += r.status == SpanStatus::Contained;
                    }
                }
                if (progress)
                    progress(name + " H1=" + std::to_string(r.betti) + " " + to_string(r.status));
                rows.push_back(std::move(r));
            }
        }
    std::string detail = std::to_string(rows.size()) + " levels, " + std::to_string(contained) + " contained, " +
                         std::to_string(vacuous) + " vacuous; " + t.summary();
    if (rows_out)
        *rows_out = std::move(rows);
    return {10, "span containment scan", t.failures == 0, detail, 0, 3600};
}

/// Pullback along the level map (1) -> (t) at q = 2, d = 2.
inline Outcome ramified_pullback() {
    detail::Tally t;
    int fine_dim = 0, coarse_dim = 0;
    auto coarse = detail::context(2, 2);
    auto fine = detail::context(2, 2, {0, 1});
    QuotientComplex Xc(coarse), Xf(fine);
    const auto& group = fine->level_domain(); // GL_2(F_2), the deck group
    for (int alpha = 2; alpha <= 6; ++alpha) {
        const CoreView& vf = Xf.core_ref(alpha);
        const CoreView& vc = Xc.core_ref(alpha);
        RamifiedMap m = level_map(*fine, *coarse, *vf.closure);
        const std::string at = " alpha=" + std::to_string(alpha);
        for (int i = 0; i <= 1; ++i) {
            // boundary commutes with pullback on each coarse cell
            for (const auto& k : vc.open[i].keys()) {
                if (i == 0)
                    break;
                OrientedChain c{i, {{k, Rational(1)}}};
                auto lhs = boundary(*vf.closure, pullback_ramified(m, c, vf.closure->sorted_keys(i)));
                auto rhs = pullback_ramified(m, boundary(*vc.closure, c), vf.closure->sorted_keys(i - 1));
                for (const auto& v : vf.closure->sorted_keys(i - 1))
                    t.expect(lhs.at(v) == rhs.at(v), "boundary does not commute" + at);
            }
            // invariant relative chains are exactly the pulled back coarse cells
            const ChainBasis& cells = vf.open[i];
            Echelon moved;
            for (int j = 0; j < cells.size(); ++j) {
                SparseVec col;
                for (size_t g = 0; g < group.size(); ++g) {
                    OrientedSimplexRef r = level_action(*fine, cells[j], group[g]);
                    int pos = cells.find(r.key);
                    t.expect(pos >= 0, "deck group leaves the core" + at);
                    if (pos < 0)
                        continue;
                    std::vector<std::pair<int, Rational>> e = {{static_cast<int>(g) * cells.size() + pos,
                                                                Rational(r.parity)},
                                                               {static_cast<int>(g) * cells.size() + j, Rational(-1)}};
                    for (auto& x : sv_from(std::move(e)))
                        col.push_back(std::move(x));
                }
                moved.insert(col);
            }
            const int invariant_chains = cells.size() - moved.rank();
            t.expect(invariant_chains == vc.open[i].size(), "invariant chains vs coarse cells" + at);
            Echelon image;
            for (const auto& k : vc.open[i].keys()) {
                OrientedChain p = pullback_ramified(m, OrientedChain{i, {{k, Rational(1)}}}, cells.keys());
                image.insert(cells.coords(p));
                for (const auto& g : group) {
                    OrientedChain gp{i, {}};
                    for (const auto& [key, x] : p.coeffs) {
                        auto r = level_action(*fine, key, g);
                        gp.add(r, x);
                    }
                    t.expect(gp.coeffs == p.coeffs, "pullback not invariant" + at);
                }
            }
            t.expect(image.rank() == vc.open[i].size(), "pullback not injective" + at);
        }
        // on relative top homology the invariants match the coarse dimension
        auto hf = core_relative_homology(vf, 1);
        auto hc = core_relative_homology(vc, 1);
        Echelon fixed;
        const ChainBasis& top = vf.open[1];
        for (const auto& z : hf.basis) {
            SparseVec col;
            for (size_t g = 0; g < group.size(); ++g) {
                OrientedChain gz{1, {}};
                for (const auto& [key, x] : z.coeffs)
                    gz.add(level_action(*fine, key, group[g]), x);
                SparseVec diff = sv_axpy(top.coords(gz), Rational(-1), top.coords(z));
                for (auto& [j, x] : diff)
                    col.emplace_back(static_cast<int>(g) * top.size() + j, x);
            }
            fixed.insert(col);
        }
        t.expect(hf.dimension - fixed.rank() == hc.dimension, "invariant classes vs coarse classes" + at);
        fine_dim = hf.dimension;
        coarse_dim = hc.dimension;
    }
    return {11, "ramified pullback", t.failures == 0,
            "relative H_1 fine " + std::to_string(fine_dim) + ", coarse " + std::to_string(coarse_dim) + "; " +
                t.summary(),
            0, 300};
}

inline const std::vector<std::pair<int, std::string>>& criteria() {
    static const std::vector<std::pair<int, std::string>> list = {
        {1, "sign calculus"},           {2, "fundamental chain is a cycle"}, {3, "lift independence"},
        {4, "rank two oracle equivalence"}, {5, "arithmetic group invariance"}, {6, "HN machinery"},
        {7, "truncation and stabilization"}, {8, "duality"},                  {9, "modular symbols"},
        {10, "span containment scan"},  {11, "ramified pullback"},
    };
    return list;
}

inline Outcome run_one(int id, const Options& opt) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        switch (id) {
        case 1: o = sign_calculus(); break;
        case 2: o = fundamental_cycle(); break;
        case 3: o = lift_independence(); break;
        case 4: o = tree_oracle_equivalence(); break;
        case 5: o = gamma_invariance(); break;
        case 6: o = hn_machinery(); break;
        case 7: o = stabilization(); break;
        case 8: o = duality(); break;
        case 9: o = modular_symbols(opt.golden_dir); break;
        case 10: o = span_scan(opt.scan ? &opt.scan->rows : nullptr, opt.progress); break;
        case 11: o = ramified_pullback(); break;
        default: throw Error(ErrorKind::Config, "unknown criterion " + std::to_string(id));
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config)
            throw;
        o.id = id;
        o.name = criteria()[id - 1].second;
        o.pass = false;
        o.detail = e.what();
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.budget > 0 && o.seconds > o.budget) {
        o.pass = false;
        o.detail += "; over the time budget";
    }
    return o;
}

/// Runs the selected criteria in order; an empty selection is an error.
inline std::vector<Outcome> run(const Options& opt) {
    std::vector<int> ids;
    for (const auto& [id, name] : criteria())
        if (opt.only.empty() || opt.only.count(id))
            ids.push_back(id);
    for (int id : opt.only)
        require(id >= 1 && id <= static_cast<int>(criteria().size()), ErrorKind::Config,
                "unknown criterion " + std::to_string(id));
    require(!ids.empty(), ErrorKind::Config, "no criteria selected");
    std::vector<Outcome> out;
    for (int id : ids)
        out.push_back(run_one(id, opt));
    return out;
}

inline std::string format(const Outcome& o) {
    std::ostringstream os;
    os << (o.pass ? "PASS" : "FAIL") << "  [" << o.id << "] " << o.name << " (" << std::fixed;
    os.precision(1);
    os << o.seconds << " s): " << o.detail;
    return os.str();
}

} // namespace btq::acceptance
