#pragma once

#include <algorithm>
#include <climits>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "btq/ffield.hpp"
#include "btq/homology.hpp"
#include "btq/scomplex.hpp"

namespace btq {

// ---------------------------------------------------------------------------
// Canonical form of lattice classes

/// Laurent polynomial part of x with t-exponents > -a (x reduced mod pi^a O).
inline RatFunc truncate_mod_pi(const RatFunc& x, int a) {
    const Field* F = x.field();
    if (x.is_zero() || x.degree() <= -a)
        return RatFunc(F);
    int lo = -a + 1;
    auto c = x.laurent(lo); // exponents deg .. lo
    int top = x.degree();
    // sum_e c[top-e] t^e = (sum c[top-e] t^{e-lo}) / t^{-lo}
    std::vector<Elt> num(top - lo + 1, 0);
    for (int e = lo; e <= top; ++e)
        num[e - lo] = c[top - e];
    Poly p(F, num);
    if (lo >= 0)
        return RatFunc(p.shifted(lo));
    return RatFunc(p, Poly::monomial(F, 1, -lo));
}

/// Upper triangular basis of an O_inf-lattice with diagonal pi^{a_i}
/// (pi = 1/t), entries above the diagonal reduced mod pi^{a_j}, min a_i = 0.
struct HermiteForm {
    std::vector<int> a;
    RatMatrix H;
};

inline HermiteForm hermite_form(const RatMatrix& B0) {
    RatMatrix B = B0;
    const int d = B.rows();
    const Field* F = B.field();
    std::vector<int> a(d);
    for (int j = 0; j < d; ++j) {
        int piv = -1;
        for (int i = j; i < d; ++i)
            if (!B(i, j).is_zero() && (piv < 0 || B(i, j).degree() > B(piv, j).degree()))
                piv = i;
        require(piv >= 0, ErrorKind::SingularMatrix, "lattice basis is singular");
        B.swap_rows(piv, j);
        RatFunc inv = B(j, j).inverse();
        for (int i = j + 1; i < d; ++i) {
            if (B(i, j).is_zero())
                continue;
            RatFunc f = B(i, j) * inv;
            for (int k = j; k < d; ++k)
                B(i, k) -= f * B(j, k);
        }
    }
    for (int j = 0; j < d; ++j) {
        a[j] = -B(j, j).degree();
        RatFunc u = RatFunc::monomial(F, 1, -a[j]) / B(j, j);
        for (int k = j; k < d; ++k)
            B(j, k) *= u;
    }
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            RatFunc x = B(i, j);
            RatFunc r = truncate_mod_pi(x, a[j]);
            if (x == r)
                continue;
            RatFunc c = (x - r) * RatFunc::monomial(F, 1, a[j]);
            for (int k = j; k < d; ++k)
                B(i, k) -= c * B(j, k);
            B(i, j) = r;
        }
    int m = *std::min_element(a.begin(), a.end());
    if (m != 0) {
        RatFunc s = RatFunc::monomial(F, 1, m);
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j)
                B(i, j) *= s;
        for (auto& x : a)
            x -= m;
    }
    return {std::move(a), std::move(B)};
}

namespace detail {

inline void put_i16(Key& k, int v) {
    unsigned u = static_cast<unsigned>(v + 0x8000);
    k += static_cast<char>((u >> 8) & 0xff);
    k += static_cast<char>(u & 0xff);
}

} // namespace detail

/// Byte key of a Hermite form: 'V', d, a_1..a_d, then each entry above the
/// diagonal as (number of terms, top exponent, coefficients).
inline Key hermite_key(const HermiteForm& h) {
    const int d = static_cast<int>(h.a.size());
    Key k = "V";
    k += static_cast<char>(d);
    for (int x : h.a)
        detail::put_i16(k, x);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const RatFunc& x = h.H(i, j);
            if (x.is_zero()) {
                detail::put_i16(k, 0);
                continue;
            }
            auto c = x.laurent(-h.a[j] + 1);
            detail::put_i16(k, static_cast<int>(c.size()));
            detail::put_i16(k, x.degree());
            for (Elt e : c)
                k += static_cast<char>(e);
        }
    return k;
}

/// A vertex of the building: its key and the normalized Hermite lattice.
struct VertexRef {
    Key key;
    InfinityLattice lattice;
    std::vector<int> diag;
};

inline VertexRef vertex_canonical(const InfinityLattice& L) {
    HermiteForm h = hermite_form(L.basis());
    Key k = hermite_key(h);
    return {std::move(k), InfinityLattice(std::move(h.H)), std::move(h.a)};
}

inline Key vertex_key(const InfinityLattice& L) { return hermite_key(hermite_form(L.basis())); }

/// True when L' is contained in L.
inline bool lattice_contains(const InfinityLattice& L, const InfinityLattice& Lp) {
    RatMatrix X = Lp.basis() * inverse(L.basis());
    for (int i = 0; i < X.rows(); ++i)
        for (int j = 0; j < X.cols(); ++j)
            if (!X(i, j).is_zero() && X(i, j).degree() > 0)
                return false;
    return true;
}

// ---------------------------------------------------------------------------
// Subspaces of F_q^d

/// All k-dimensional subspaces of F_q^d, each as its RREF basis, in a
/// fixed order (pivot pattern, then free entries).
inline std::vector<FqRows> subspaces(const Field& F, int d, int k) {
    std::vector<FqRows> out;
    std::vector<int> piv(k);
    std::function<void(int, int)> choose = [&](int pos, int start) {
        if (pos == k) {
            // Free positions: (r, c) with c > piv[r], c not a pivot.
            std::vector<std::pair<int, int>> freepos;
            for (int r = 0; r < k; ++r)
                for (int c = piv[r] + 1; c < d; ++c)
                    if (std::find(piv.begin(), piv.end(), c) == piv.end())
                        freepos.emplace_back(r, c);
            long total = 1;
            for (size_t i = 0; i < freepos.size(); ++i)
                total *= F.q();
            for (long code = 0; code < total; ++code) {
                FqRows W(k, FqVec(d, 0));
                for (int r = 0; r < k; ++r)
                    W[r][piv[r]] = 1;
                long x = code;
                for (auto [r, c] : freepos) {
                    W[r][c] = static_cast<Elt>(x % F.q());
                    x /= F.q();
                }
                out.push_back(std::move(W));
            }
            return;
        }
        for (int c = start; c < d; ++c) {
            piv[pos] = c;
            choose(pos + 1, c + 1);
        }
    };
    choose(0, 0);
    return out;
}

inline long gaussian_binomial(int q, int d, int k) {
    long num = 1, den = 1;
    for (int i = 0; i < k; ++i) {
        long a = 1, b = 1;
        for (int j = 0; j < d - i; ++j)
            a *= q;
        for (int j = 0; j < i + 1; ++j)
            b *= q;
        num *= a - 1;
        den *= b - 1;
    }
    return num / den;
}

/// The lattice W*H + pi*L for a subspace W of L / pi L (rows of H a basis of L).
inline InfinityLattice sublattice_from_subspace(const InfinityLattice& L, const FqRows& W) {
    const int d = L.dim();
    const Field* F = L.field();
    const RatMatrix& H = L.basis();
    RatMatrix B(F, d, d);
    std::vector<char> pivot(d, 0);
    int r = 0;
    for (const auto& w : W) {
        for (int c = 0; c < d; ++c)
            if (w[c] != 0) {
                pivot[c] = 1;
                break;
            }
        for (int j = 0; j < d; ++j) {
            RatFunc s(F);
            for (int k = 0; k < d; ++k)
                if (w[k] != 0)
                    s += RatFunc::constant(F, w[k]) * H(k, j);
            B(r, j) = s;
        }
        ++r;
    }
    RatFunc pi = RatFunc::monomial(F, 1, -1);
    for (int c = 0; c < d; ++c)
        if (!pivot[c]) {
            for (int j = 0; j < d; ++j)
                B(r, j) = pi * H(c, j);
            ++r;
        }
    return InfinityLattice(std::move(B));
}

struct Neighbor {
    VertexRef vertex;
    InfinityLattice sublattice; // L' with L > L' > pi L, L the Hermite lattice of the source
};

/// All vertices adjacent to v, via proper nonzero subspaces of L / pi L.
inline std::vector<Neighbor> neighbors(const VertexRef& v) {
    const Field& F = *v.lattice.field();
    const int d = v.lattice.dim();
    std::vector<Neighbor> out;
    for (int k = 1; k < d; ++k)
        for (const auto& W : subspaces(F, d, k)) {
            InfinityLattice Lp = sublattice_from_subspace(v.lattice, W);
            out.push_back({vertex_canonical(Lp), Lp});
        }
    return out;
}

// ---------------------------------------------------------------------------
// Simplices as lattice chains

/// Key of a simplex given the cyclic sequence of its vertex keys along the
/// chain: the lexicographic minimum over rotations of the length-prefixed
/// concatenation. A single vertex keeps its own key.
inline Key cyclic_simplex_key(const std::vector<Key>& cyc) {
    if (cyc.size() == 1)
        return cyc[0];
    Key best;
    const size_t n = cyc.size();
    for (size_t r = 0; r < n; ++r) {
        Key k = "C";
        for (size_t i = 0; i < n; ++i) {
            const Key& v = cyc[(r + i) % n];
            detail::put_i16(k, static_cast<int>(v.size()));
            k += v;
        }
        if (r == 0 || k < best)
            best = std::move(k);
    }
    return best;
}

/// Chain L_0 > L_1 > ... > L_i > pi L_0 with its vertex keys.
struct BuildingSimplex {
    std::vector<InfinityLattice> chain;
    std::vector<Key> vertex_keys; // in chain order

    int dim() const { return static_cast<int>(chain.size()) - 1; }
    Key key() const { return cyclic_simplex_key(vertex_keys); }
};

inline BuildingSimplex make_building_simplex(std::vector<InfinityLattice> chain) {
    BuildingSimplex s;
    for (const auto& L : chain)
        s.vertex_keys.push_back(vertex_key(L));
    s.chain = std::move(chain);
    return s;
}

/// Adds the simplex with the given cyclic vertex order and all its faces
/// (faces keep the induced cyclic order).
inline void add_cyclic_simplex(Complex& C, const std::vector<Key>& cyc) {
    const int n = static_cast<int>(cyc.size());
    if (n == 1) {
        C.add_vertex(cyc[0]);
        return;
    }
    Key key = cyclic_simplex_key(cyc);
    if (C.contains(key))
        return;
    std::vector<Key> sorted = cyc;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Key> faces(size_t(1) << n);
    for (size_t mask = 1; mask + 1 < faces.size(); ++mask) {
        std::vector<Key> sub;
        for (const auto& v : cyc) {
            int pos = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
            if (mask >> pos & 1)
                sub.push_back(v);
        }
        add_cyclic_simplex(C, sub);
        faces[mask] = cyclic_simplex_key(sub);
    }
    C.add_simplex(key, sorted, faces);
}

/// Star of a vertex: every chain through v (one per flag of subspaces of
/// L / pi L), with all faces. `radius` > 1 repeats from every vertex found.
inline Complex building_ball(const VertexRef& center, int radius) {
    Complex C;
    const Field& F = *center.lattice.field();
    const int d = center.lattice.dim();
    std::set<Key> done;
    std::vector<std::vector<FqRows>> subs(d);
    for (int k = 1; k < d; ++k)
        subs[k] = subspaces(F, d, k);
    std::vector<VertexRef> frontier = {center};
    for (int r = 0; r < radius; ++r) {
        std::vector<VertexRef> next;
        for (const auto& v : frontier) {
            if (!done.insert(v.key).second)
                continue;
            C.add_vertex(v.key);
            std::map<FqRows, VertexRef> sub;
            auto vertex_of = [&](const FqRows& W) -> const VertexRef& {
                auto it = sub.find(W);
                if (it == sub.end())
                    it = sub.emplace(W, vertex_canonical(sublattice_from_subspace(v.lattice, W))).first;
                return it->second;
            };
            // Flags W_1 > W_2 > ... of proper nonzero subspaces, by depth-first extension.
            std::function<void(std::vector<Key>&, const FqRows&)> extend = [&](std::vector<Key>& cyc,
                                                                            const FqRows& last) {
                int dim_last = last.empty() ? d : static_cast<int>(last.size());
                for (int k = 1; k < dim_last; ++k)
                    for (const auto& W : subs[k]) {
                        if (!last.empty()) {
                            FqRows both = last;
                            both.insert(both.end(), W.begin(), W.end());
                            if (fq_rank(F, both) != dim_last)
                                continue;
                        }
                        const VertexRef& w = vertex_of(W);
                        cyc.push_back(w.key);
                        add_cyclic_simplex(C, cyc);
                        if (cyc.size() == 2 && r + 1 < radius)
                            next.push_back(w);
                        extend(cyc, W);
                        cyc.pop_back();
                    }
            };
            std::vector<Key> cyc = {v.key};
            extend(cyc, {});
        }
        frontier = std::move(next);
    }
    return C;
}

// ---------------------------------------------------------------------------
// Apartments

using Point = std::vector<int>;

/// Representative of x in Z^d / Z(1,...,1) with minimum coordinate 0.
inline Point normalize_point(Point x) {
    int m = *std::min_element(x.begin(), x.end());
    for (auto& c : x)
        c -= m;
    return x;
}

inline int spread(const Point& x) {
    return *std::max_element(x.begin(), x.end()) - *std::min_element(x.begin(), x.end());
}

inline Key point_key(const Point& x) {
    Key k = "P";
    for (int c : normalize_point(x))
        detail::put_i16(k, c);
    return k;
}

/// Orders a small subset of Z^d into its chain x_0 < x_1 < ... < x_i < x_0 + 1;
/// throws NotSmall otherwise.
inline std::vector<Point> order_small_lift(std::vector<Point> pts) {
    require(!pts.empty(), ErrorKind::NotSmall, "empty point set");
    const size_t d = pts[0].size();
    auto sum = [](const Point& x) { return std::accumulate(x.begin(), x.end(), 0L); };
    std::sort(pts.begin(), pts.end(), [&](const Point& a, const Point& b) { return sum(a) < sum(b); });
    for (size_t k = 0; k < pts.size(); ++k) {
        require(pts[k].size() == d, ErrorKind::NotSmall, "points of different dimension");
        const Point& lo = pts[0];
        const Point& x = pts[k];
        bool ok = true, below_top = false;
        for (size_t c = 0; c < d; ++c) {
            int diff = x[c] - lo[c];
            ok = ok && diff >= 0 && diff <= 1;
            below_top = below_top || diff == 0;
        }
        require(ok && below_top, ErrorKind::NotSmall, "point set is not small");
        if (k > 0) {
            const Point& y = pts[k - 1];
            bool ge = true, strict = false;
            for (size_t c = 0; c < d; ++c) {
                ge = ge && x[c] >= y[c];
                strict = strict || x[c] > y[c];
            }
            require(ge && strict, ErrorKind::NotSmall, "point set is not small");
        }
    }
    return pts;
}

/// A small lift of a set of classes in Z^d / Z(1,...,1), ordered as a chain.
inline std::vector<Point> small_lift(const std::vector<Point>& classes) {
    require(!classes.empty(), ErrorKind::NotSmall, "empty simplex");
    const Point base = normalize_point(classes[0]);
    std::vector<Point> lift = {base};
    for (size_t k = 1; k < classes.size(); ++k) {
        Point y = normalize_point(classes[k]);
        // Shift y so that base <= y <= base + 1.
        int lo = INT_MIN, hi = INT_MAX;
        for (size_t c = 0; c < y.size(); ++c) {
            lo = std::max(lo, base[c] - y[c]);
            hi = std::min(hi, base[c] + 1 - y[c]);
        }
        require(lo <= hi, ErrorKind::NotSmall, "classes have no small lift");
        for (auto& c : y)
            c += lo;
        lift.push_back(std::move(y));
    }
    return order_small_lift(lift);
}

/// iota_V(x): the lattice spanned by t^{-x_k} v_k.
inline InfinityLattice apartment_lattice(const RatMatrix& V, const Point& x) {
    const Field* F = V.field();
    RatMatrix B = V;
    for (int k = 0; k < V.rows(); ++k) {
        RatFunc s = RatFunc::monomial(F, 1, -x[k]);
        for (int j = 0; j < V.cols(); ++j)
            B(k, j) *= s;
    }
    return InfinityLattice(std::move(B));
}

inline void check_basis(const RatMatrix& V) {
    require(V.rows() == V.cols() && V.rows() >= 1, ErrorKind::SingularBasis, "basis must be square");
    require(!det(V).is_zero(), ErrorKind::SingularBasis, "basis rows are linearly dependent");
}

/// The simplex iota_V(sigma) for a small subset of Z^d (any order).
inline BuildingSimplex apartment_simplex(const RatMatrix& V, const std::vector<Point>& pts) {
    check_basis(V);
    std::vector<InfinityLattice> chain;
    for (const auto& x : order_small_lift(pts))
        chain.push_back(apartment_lattice(V, x));
    return make_building_simplex(std::move(chain));
}

/// Caches vertex keys of iota_V(x) per class of x.
class Apartment {
public:
    explicit Apartment(RatMatrix V) : V_(std::move(V)) { check_basis(V_); }

    int dim() const { return V_.rows(); }
    const RatMatrix& basis() const { return V_; }

    const Key& vertex(const Point& x) {
        Point n = normalize_point(x);
        auto it = cache_.find(n);
        if (it != cache_.end())
            return it->second;
        return cache_.emplace(n, vertex_key(apartment_lattice(V_, n))).first->second;
    }

    /// Vertex keys in chain order for a small subset.
    std::vector<Key> cyclic_keys(const std::vector<Point>& pts) {
        std::vector<Key> out;
        for (const auto& x : order_small_lift(pts))
            out.push_back(vertex(x));
        return out;
    }

private:
    RatMatrix V_;
    std::map<Point, Key> cache_;
};

/// Orientation [sigma] of an apartment (d-1)-simplex as the vertex ordering
/// i -> class of x_{w^{-1}(i)}, where x_i - x_{i-1} = e_{w(i)} along the
/// chain x_1 < ... < x_d and x_0 = x_d - (1,...,1).
inline std::vector<Point> apartment_orientation_order(const std::vector<Point>& pts) {
    const size_t d = pts.empty() ? 0 : pts[0].size();
    require(pts.size() == d, ErrorKind::WrongDimension, "orientation needs a top-dimensional simplex");
    auto x = order_small_lift(pts); // x[0..d-1] = x_1..x_d
    Point x0 = x.back();
    for (auto& c : x0)
        c -= 1;
    std::vector<Point> order(d);
    for (size_t i = 0; i < d; ++i) {
        const Point& prev = i == 0 ? x0 : x[i - 1];
        int coord = -1;
        for (size_t c = 0; c < d; ++c)
            if (x[i][c] != prev[c])
                coord = static_cast<int>(c);
        order[coord] = normalize_point(x[i]);
    }
    return order;
}

/// Parity of [sigma] relative to ascending building vertex keys of iota_V(sigma).
inline OrientedSimplexRef apartment_orientation(Apartment& A, const std::vector<Point>& pts) {
    auto order = apartment_orientation_order(pts);
    std::vector<Key> keys;
    for (const auto& x : order)
        keys.push_back(A.vertex(x));
    return {cyclic_simplex_key(A.cyclic_keys(pts)), permutation_parity(keys)};
}

/// Top simplices (as chain-ordered point lists) with every vertex of spread <= R.
inline std::vector<std::vector<Point>> apartment_window(int d, int R) {
    std::vector<std::vector<Point>> out;
    std::set<std::vector<Point>> seen;
    std::vector<int> perm(d);
    Point x(d, 0);
    std::function<void(int)> each_point = [&](int c) {
        if (c == d) {
            if (*std::min_element(x.begin(), x.end()) != 0)
                return;
            std::iota(perm.begin(), perm.end(), 0);
            do {
                std::vector<Point> chain = {x};
                bool inside = true;
                for (int k = 0; k + 1 < d; ++k) {
                    Point y = chain.back();
                    y[perm[k]] += 1;
                    inside = inside && spread(y) <= R;
                    chain.push_back(y);
                }
                if (!inside)
                    continue;
                std::vector<Point> cls;
                for (const auto& y : chain)
                    cls.push_back(normalize_point(y));
                std::sort(cls.begin(), cls.end());
                if (seen.insert(cls).second)
                    out.push_back(chain);
            } while (std::next_permutation(perm.begin(), perm.end()));
            return;
        }
        for (int v = 0; v <= R; ++v) {
            x[c] = v;
            each_point(c + 1);
        }
    };
    each_point(0);
    return out;
}

/// The restriction of beta to a window: coefficient +-1 per top simplex,
/// relative to ascending vertex keys of iota_V.
inline OrientedChain fundamental_chain(Apartment& A, const std::vector<std::vector<Point>>& window) {
    const int d = A.dim();
    OrientedChain c{d - 1, {}};
    if (d == 1) {
        c.coeffs[A.vertex(Point{0})] = 1;
        return c;
    }
    for (const auto& s : window)
        c.add(apartment_orientation(A, s), Rational(1));
    return c;
}

/// Complex spanned by the window's simplices (with faces) under iota_V.
inline Complex apartment_complex(Apartment& A, const std::vector<std::vector<Point>>& window) {
    Complex C;
    for (const auto& s : window)
        add_cyclic_simplex(C, A.cyclic_keys(s));
    return C;
}

/// Codimension-one faces of the window all of whose apartment cofaces lie
/// in the window (each interior face has exactly two).
inline std::vector<Key> interior_faces(Apartment& A, const std::vector<std::vector<Point>>& window) {
    std::map<Key, int> count;
    for (const auto& s : window)
        for (size_t k = 0; k < s.size(); ++k) {
            std::vector<Point> f;
            for (size_t j = 0; j < s.size(); ++j)
                if (j != k)
                    f.push_back(s[j]);
            if (f.empty())
                continue;
            ++count[cyclic_simplex_key(A.cyclic_keys(f))];
        }
    std::vector<Key> out;
    for (const auto& [k, n] : count)
        if (n == 2)
            out.push_back(k);
    return out;
}

} // namespace btq
