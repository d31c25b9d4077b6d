#pragma once

#include <gmpxx.h>

#include <optional>
#include <sstream>

#include "btq/quotient.hpp"

namespace btq {

/// Evidence that the apartment window used for a symbol is large enough:
/// every apartment vertex of spread exactly `radius` has some Delta p(i)
/// >= alpha + margin, so no simplex through the shell meets core(alpha).
struct CollarCertificate {
    int initial_radius = 0;
    int radius = 0;
    int margin = 0;
    long shell_vertices = 0;
    long window_simplices = 0;
    long contributing_simplices = 0;
    long max_fiber = 0;
    bool relative_cycle = false;
    std::map<Key, long> fiber_sizes; // apartment preimages per quotient simplex
};

struct ModularSymbol {
    RatMatrix V;
    uint64_t level = 0;
    int alpha = 0;
    OrientedChain chain;
    CollarCertificate certificate;
};

inline int collar_initial_radius(const RatMatrix& V) {
    auto [h, P] = clear_denominators(V);
    return 2 * V.rows() * (1 + std::max(max_degree(P), h.degree()));
}

/// Normalized points of Z^d (min coordinate 0) with max coordinate exactly R.
inline std::vector<Point> shell_points(int d, int R) {
    std::vector<Point> out;
    Point x(d, 0);
    std::function<void(int)> rec = [&](int c) {
        if (c == d) {
            if (*std::min_element(x.begin(), x.end()) == 0 && *std::max_element(x.begin(), x.end()) == R)
                out.push_back(x);
            return;
        }
        for (int v = 0; v <= R; ++v) {
            x[c] = v;
            rec(c + 1);
        }
    };
    rec(0);
    return out;
}

/// The class of the apartment of V (rows an F-basis) with level datum
/// `level`, as a relative cycle on core(alpha).
inline ModularSymbol modular_symbol(const QuotientComplex& X, const RatMatrix& V, int alpha, uint64_t level,
                                    int radius_ceiling = 0) {
    QuotientContext& q = X.context();
    const int d = q.dim();
    require(d >= 2, ErrorKind::WrongDimension, "modular symbols need rank at least 2");
    check_basis(V);
    require(V.rows() == d, ErrorKind::WrongDimension, "basis rank differs from the quotient rank");
    ModularSymbol m;
    m.V = V;
    m.level = level;
    m.alpha = alpha;
    CollarCertificate& cert = m.certificate;
    cert.margin = 2 * (d - 1);
    cert.initial_radius = collar_initial_radius(V);
    if (radius_ceiling <= 0)
        radius_ceiling = cert.initial_radius + 4 * (alpha + cert.margin) + 8;
    for (int R = cert.initial_radius;; ++R) {
        require(R <= radius_ceiling, ErrorKind::CollarCheckFailed,
                "shell vertices still meet the core at radius " + std::to_string(radius_ceiling));
        bool ok = true;
        auto shell = shell_points(d, R);
        for (const auto& x : shell) {
            std::vector<int> n;
            q.pointed_key({apartment_lattice(V, x)}, level, &n);
            auto dp = delta_p(n);
            ok = std::any_of(dp.begin(), dp.end(), [&](int v) { return v >= alpha + cert.margin; });
            if (!ok)
                break;
        }
        if (ok) {
            cert.radius = R;
            cert.shell_vertices = static_cast<long>(shell.size());
            break;
        }
    }
    const CoreView& core = X.core_ref(alpha);
    const ChainBasis& top = core.open.size() >= size_t(d) ? core.open[d - 1] : ChainBasis{};
    m.chain = OrientedChain{d - 1, {}};
    auto window = apartment_window(d, cert.radius);
    cert.window_simplices = static_cast<long>(window.size());
    for (const auto& pts : window) {
        auto lift = order_small_lift(pts);
        std::vector<InfinityLattice> chain;
        for (const auto& x : lift)
            chain.push_back(apartment_lattice(V, x));
        ChainCanon cc = q.canon_chain(chain, level);
        if (top.find(cc.key) < 0)
            continue;
        std::vector<Key> keys;
        for (const auto& x : apartment_orientation_order(pts)) {
            size_t j = 0;
            while (normalize_point(lift[j]) != x)
                ++j;
            keys.push_back(cc.vertex_keys[j]);
        }
        m.chain.add({cc.key, permutation_parity(keys)}, Rational(1));
        ++cert.contributing_simplices;
        cert.max_fiber = std::max(cert.max_fiber, ++cert.fiber_sizes[cc.key]);
    }
    m.chain.coeffs = [&] {
        std::map<Key, Rational> nz;
        for (auto& [k, v] : m.chain.coeffs)
            if (v != 0)
                nz.emplace(k, v);
        return nz;
    }();
    OrientedChain b = boundary(*core.closure, m.chain);
    cert.relative_cycle = true;
    if (core.open.size() >= size_t(d - 1))
        for (const auto& [k, v] : b.coeffs)
            if (v != 0 && core.open[d - 2].find(k) >= 0)
                cert.relative_cycle = false;
    return m;
}

/// Images of an H_{d-1} basis of the quotient under the map to Borel-Moore
/// homology, as coordinates on the open top cells of core(alpha).
struct HomologyImage {
    int alpha = 0;
    BMResult bm;
    std::vector<int> closure_dims; // dim H_{d-1}(closure of core(alpha)) per alpha
    ChainBasis cells;
    std::vector<OrientedChain> cycles;
    std::vector<SparseVec> columns;
};

inline HomologyImage homology_image(const QuotientComplex& X, int alpha_lo, int alpha_max, int G = 3) {
    const int top = X.dimension();
    HomologyImage img;
    img.bm = bm_homology(X, top, alpha_lo, alpha_max, G);
    require(img.bm.stabilized, ErrorKind::NotStabilized, "Borel-Moore homology not stabilized by alpha_max");
    std::vector<HomologyResult> closure_h;
    for (int a : img.bm.alphas) {
        closure_h.push_back(homology(*X.core(a).closure, top));
        img.closure_dims.push_back(closure_h.back().dimension);
    }
    const int n = static_cast<int>(img.bm.alphas.size());
    int first = -1;
    for (int k = 0; k + G <= n && first < 0; ++k) {
        bool ok = true;
        for (int j = k; j < n; ++j) {
            ok = ok && img.bm.dims[j] == img.bm.dims.back() && img.closure_dims[j] == img.closure_dims.back();
            if (j + 1 < n)
                ok = ok && img.bm.transition_ranks[j] == img.bm.dims.back();
        }
        if (ok)
            first = k;
    }
    require(first >= 0, ErrorKind::NotStabilized, "homology of the core closures not stabilized by alpha_max");
    img.alpha = img.bm.alphas[first];
    CoreView v = X.core(img.alpha);
    img.cells = v.open.size() > size_t(top) ? v.open[top] : ChainBasis{};
    img.cycles = std::move(closure_h[first].basis);
    for (const auto& z : img.cycles)
        img.columns.push_back(img.cells.coords(z));
    return img;
}

struct SpanPolicy {
    int max_degree = 2; // D_gen
    long generator_ceiling = 400000;
};

enum class SpanStatus { Vacuous, Contained, NotContained };

inline const char* to_string(SpanStatus s) {
    switch (s) {
    case SpanStatus::Vacuous: return "vacuous";
    case SpanStatus::Contained: return "contained";
    case SpanStatus::NotContained: return "not_contained_with_generators";
    }
    return "?";
}

/// A generator of the span test: the apartment of the rows of V carrying
/// level datum g.
struct SymbolGenerator {
    PolyMatrix V;
    uint64_t level = 0;
};

struct SpanCertificate {
    SpanStatus status = SpanStatus::Vacuous;
    int alpha = 0;
    int image_dim = 0;
    int degree_used = -1;
    long candidates = 0;
    long distinct_symbols = 0;
    int symbol_rank = 0;
    std::vector<SymbolGenerator> generators; // those with a nonzero coefficient
    std::vector<std::vector<Rational>> coefficients;     // per image column, per generator
    bool verified = false;                               // exact recomputation of every column
};

/// Polynomial bases with every entry of degree <= D and some entry of degree
/// exactly D; rows scaled so the first nonzero entry is monic, rows in
/// strictly increasing order. Calls visit(V) until it returns false.
inline void for_each_basis(const Field& F, int d, int D, const std::function<bool(const PolyMatrix&)>& visit) {
    const int q = F.q();
    const int per = D + 1;
    long rows_total = 1;
    for (int i = 0; i < d * per; ++i)
        rows_total *= q;
    auto row_of = [&](long code) {
        std::vector<Poly> r;
        for (int j = 0; j < d; ++j) {
            std::vector<Elt> c(per);
            for (auto& x : c) {
                x = static_cast<Elt>(code % q);
                code /= q;
            }
            r.emplace_back(&F, c);
        }
        return r;
    };
    std::vector<long> rows;
    for (long c = 1; c < rows_total; ++c) {
        auto r = row_of(c);
        auto first = std::find_if(r.begin(), r.end(), [](const Poly& p) { return !p.is_zero(); });
        if (first->lc() == 1)
            rows.push_back(c);
    }
    std::vector<int> pick(d);
    PolyMatrix V(&F, d, d);
    std::function<bool(int, size_t, bool)> rec = [&](int i, size_t start, bool hit) -> bool {
        if (i == d) {
            if (!hit || det(V).is_zero())
                return true;
            return visit(V);
        }
        for (size_t k = start; k < rows.size(); ++k) {
            auto r = row_of(rows[k]);
            bool h = hit;
            for (int j = 0; j < d; ++j) {
                V(i, j) = r[j];
                h = h || r[j].degree() == D;
            }
            if (!rec(i + 1, k + 1, h))
                return false;
        }
        return true;
    };
    rec(0, 0, false);
}

/// Tests whether the image of H_{d-1} lies in the span of apartment classes.
/// Candidates are (V, g) with V from for_each_basis in increasing degree and
/// g running over the level group; (V, g) has the class of (V * gamma, 1)
/// for any lift gamma of g.
inline SpanCertificate span_test(const QuotientComplex& X, const HomologyImage& img, const SpanPolicy& pol) {
    QuotientContext& q = X.context();
    const Field& F = *q.field();
    const int d = q.dim();
    SpanCertificate cert;
    cert.alpha = img.alpha;
    cert.image_dim = static_cast<int>(img.columns.size());
    if (img.columns.empty())
        return cert;
    Echelon E(true);
    std::vector<SymbolGenerator> gens;
    std::vector<SparseVec> vecs;
    std::set<SparseVec> seen;
    size_t next_column = 0; // columns before this one are known to be contained
    bool done = false;
    for (int D = 0; D <= pol.max_degree && !done; ++D) {
        for_each_basis(F, d, D, [&](const PolyMatrix& V) {
            for (uint64_t g : q.level_domain()) {
                require(++cert.candidates <= pol.generator_ceiling, ErrorKind::GeneratorCeiling,
                        "candidate symbols exceed the generator ceiling");
                ModularSymbol m = modular_symbol(X, to_rat(V), img.alpha, g);
                require(m.certificate.relative_cycle, ErrorKind::InvalidArgument, "symbol is not a relative cycle");
                SparseVec v = img.cells.coords(m.chain);
                if (v.empty() || !seen.insert(v).second)
                    continue;
                if (!E.insert(v, static_cast<int>(gens.size())))
                    continue;
                gens.push_back({V, g});
                vecs.push_back(v);
                while (next_column < img.columns.size() && E.contains(img.columns[next_column]))
                    ++next_column;
                if (next_column == img.columns.size()) {
                    done = true;
                    cert.degree_used = D;
                    return false;
                }
            }
            return true;
        });
    }
    cert.distinct_symbols = static_cast<long>(seen.size());
    cert.symbol_rank = E.rank();
    if (!done) {
        cert.status = SpanStatus::NotContained;
        return cert;
    }
    cert.status = SpanStatus::Contained;
    std::vector<char> used(gens.size(), 0);
    std::vector<SparseVec> combos;
    for (const auto& c : img.columns) {
        auto x = E.express(c);
        require(x.has_value(), ErrorKind::InvalidArgument, "span solve inconsistent");
        combos.push_back(*x);
        for (const auto& [i, v] : *x)
            used[i] = 1;
    }
    std::vector<int> remap(gens.size(), -1);
    for (size_t i = 0; i < gens.size(); ++i)
        if (used[i]) {
            remap[i] = static_cast<int>(cert.generators.size());
            cert.generators.push_back(gens[i]);
        }
    cert.verified = true;
    for (size_t c = 0; c < combos.size(); ++c) {
        std::vector<Rational> row(cert.generators.size(), Rational(0));
        SparseVec sum;
        for (const auto& [i, v] : combos[c]) {
            row[remap[i]] = v;
            sum = sv_axpy(sum, v, vecs[i]);
        }
        cert.verified = cert.verified && sum == img.columns[c];
        cert.coefficients.push_back(std::move(row));
    }
    return cert;
}

struct AutomorphicRow {
    Key simplex;
    int rotation = 0;
    Rational value;
};

/// Values of a relative top-degree chain on pointed top simplices: rotation
/// j of a simplex lists its vertices in chain order starting from position
/// j after the canonical one, and carries c(sigma) times the parity of that
/// order against ascending keys.
inline std::vector<AutomorphicRow> automorphic_export(const QuotientComplex& X, const OrientedChain& c, int alpha) {
    QuotientContext& q = X.context();
    const int d = q.dim();
    const CoreView& core = X.core_ref(alpha);
    std::vector<AutomorphicRow> out;
    if (core.open.size() < size_t(d))
        return out;
    for (const auto& k : core.open[d - 1].keys()) {
        const QSimplex& s = q.simplex(k);
        const int m = static_cast<int>(s.chain.size());
        for (int j = 0; j < m; ++j) {
            std::vector<Key> order;
            for (int r = 0; r < m; ++r)
                order.push_back(s.canon.vertex_keys[(s.canon.best + j + r) % m]);
            out.push_back({k, j, c.at(k) * permutation_parity(order)});
        }
    }
    return out;
}

inline std::string automorphic_csv(const std::vector<AutomorphicRow>& rows) {
    std::ostringstream os;
    os << "simplex,rotation,numerator,denominator\n";
    for (const auto& r : rows)
        os << hex(r.simplex) << ',' << r.rotation << ',' << r.value.get_num().get_str() << ','
           << r.value.get_den().get_str() << '\n';
    return os.str();
}

/// log_q of sup_i |f(v_i)| q^{-1/t_i} over i with t_i > 0; nullopt stands
/// for -infinity.
inline std::optional<mpq_class> seminorm_exponent(const std::vector<std::vector<RatFunc>>& v,
                                                  const std::vector<mpq_class>& t,
                                                  const std::vector<RatFunc>& f) {
    require(v.size() == t.size() && !t.empty(), ErrorKind::BadSimplexPoint, "one weight per vector required");
    mpq_class total = 0;
    for (const auto& x : t) {
        require(x >= 0 && x <= 1, ErrorKind::BadSimplexPoint, "weights must lie in [0, 1]");
        total += x;
    }
    require(total == 1, ErrorKind::BadSimplexPoint, "weights must sum to 1");
    std::optional<mpq_class> best;
    for (size_t i = 0; i < v.size(); ++i) {
        if (t[i] == 0)
            continue;
        require(v[i].size() == f.size(), ErrorKind::BadSimplexPoint, "dimension mismatch");
        RatFunc s(f.empty() ? nullptr : f[0].field());
        for (size_t j = 0; j < f.size(); ++j)
            s += f[j] * v[i][j];
        if (s.is_zero())
            continue;
        mpq_class e = mpq_class(s.degree()) - 1 / t[i];
        if (!best || e > *best)
            best = e;
    }
    return best;
}

} // namespace btq
