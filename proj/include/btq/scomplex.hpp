#pragma once

#include <algorithm>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "btq/error.hpp"

namespace btq {

/// Opaque byte-string key for vertices and simplices. A vertex is the
/// 0-simplex with the same key.
using Key = std::string;

inline std::string hex(const Key& k) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (unsigned char c : k) {
        s += digits[c >> 4];
        s += digits[c & 15];
    }
    return s.empty() ? "-" : s;
}

inline Key unhex(const std::string& s) {
    if (s == "-")
        return {};
    require(s.size() % 2 == 0, ErrorKind::InvalidArgument, "odd-length hex key");
    Key k;
    auto val = [](char c) { return c <= '9' ? c - '0' : c - 'a' + 10; };
    for (size_t i = 0; i < s.size(); i += 2)
        k += static_cast<char>(val(s[i]) * 16 + val(s[i + 1]));
    return k;
}

/// Sign of the permutation sorting `order` ascending (entries distinct).
template <class T>
int permutation_parity(std::vector<T> order) {
    int sign = 1;
    for (size_t i = 0; i < order.size(); ++i)
        for (size_t j = i + 1; j < order.size(); ++j)
            if (order[j] < order[i])
                sign = -sign;
    return sign;
}

struct OrientedSimplexRef {
    Key key;
    int parity = 1; // relative to ascending vertex order

    bool operator==(const OrientedSimplexRef&) const = default;
};

/// A simplex: ascending vertex list and faces indexed by bitmask over vertex
/// positions (bit k set = vertex k kept). faces[full mask] is the simplex itself.
struct SimplexRec {
    Key key;
    std::vector<Key> vertices;
    std::vector<Key> faces;

    int dim() const { return static_cast<int>(vertices.size()) - 1; }
};

/// Generalized simplicial complex: simplices are records with their own
/// face tables, so distinct simplices may share a vertex set.
class Complex {
public:
    /// Adds a vertex (0-simplex).
    void add_vertex(const Key& v) {
        if (index_.count(v))
            return;
        add({v, {v}, {Key{}, v}});
    }

    /// Adds a simplex; `faces` maps each proper nonempty vertex subset
    /// (bitmask over ascending vertices) to a simplex key. Entries for
    /// singletons and the full mask are filled in automatically.
    void add_simplex(const Key& key, std::vector<Key> vertices, std::vector<Key> faces) {
        std::vector<Key> sorted = vertices;
        std::sort(sorted.begin(), sorted.end());
        require(sorted == vertices, ErrorKind::InvalidArgument, "vertex list must be ascending");
        const int n = static_cast<int>(vertices.size());
        faces.resize(size_t(1) << n);
        for (int k = 0; k < n; ++k)
            faces[size_t(1) << k] = vertices[k];
        faces[(size_t(1) << n) - 1] = key;
        if (index_.count(key))
            return;
        add({key, std::move(vertices), std::move(faces)});
    }

    bool contains(const Key& k) const { return index_.count(k) != 0; }
    const SimplexRec& at(const Key& k) const {
        auto it = index_.find(k);
        require(it != index_.end(), ErrorKind::InvalidArgument, "unknown simplex " + hex(k));
        return by_dim_[it->second.first][it->second.second];
    }

    int max_dim() const { return static_cast<int>(by_dim_.size()) - 1; }
    size_t count(int i) const { return i >= 0 && i < static_cast<int>(by_dim_.size()) ? by_dim_[i].size() : 0; }
    const std::vector<SimplexRec>& simplices(int i) const {
        static const std::vector<SimplexRec> none;
        return i >= 0 && i < static_cast<int>(by_dim_.size()) ? by_dim_[i] : none;
    }

    /// Simplex keys of dimension i, sorted.
    std::vector<Key> sorted_keys(int i) const {
        std::vector<Key> ks;
        for (const auto& s : simplices(i))
            ks.push_back(s.key);
        std::sort(ks.begin(), ks.end());
        return ks;
    }

    /// The face of sigma with vertex set vsub.
    Key face(const Key& sigma, const std::vector<Key>& vsub) const {
        const SimplexRec& s = at(sigma);
        require(!vsub.empty(), ErrorKind::NotASubset, "empty vertex subset");
        size_t mask = 0;
        for (const auto& v : vsub) {
            auto it = std::find(s.vertices.begin(), s.vertices.end(), v);
            require(it != s.vertices.end(), ErrorKind::NotASubset, "vertex not in simplex");
            mask |= size_t(1) << (it - s.vertices.begin());
        }
        return s.faces[mask];
    }

    /// Codimension-one face opposite position k.
    Key facet(const SimplexRec& s, int k) const {
        return s.faces[((size_t(1) << s.vertices.size()) - 1) & ~(size_t(1) << k)];
    }

private:
    void add(SimplexRec rec) {
        int i = rec.dim();
        if (static_cast<int>(by_dim_.size()) <= i)
            by_dim_.resize(i + 1);
        index_[rec.key] = {i, by_dim_[i].size()};
        by_dim_[i].push_back(std::move(rec));
    }

    std::vector<std::vector<SimplexRec>> by_dim_;
    std::unordered_map<Key, std::pair<int, size_t>> index_;
};

/// Key of the simplex spanned by `vs` in a strict complex.
inline Key strict_key(std::vector<Key> vs) {
    std::sort(vs.begin(), vs.end());
    if (vs.size() == 1)
        return vs[0];
    Key k = "S";
    for (const auto& v : vs)
        k += std::to_string(v.size()) + ":" + v;
    return k;
}

/// Adds the simplex spanned by `vs` and all its faces, strict convention.
inline void add_strict(Complex& C, std::vector<Key> vs) {
    std::sort(vs.begin(), vs.end());
    const int n = static_cast<int>(vs.size());
    if (n == 1) {
        C.add_vertex(vs[0]);
        return;
    }
    std::vector<Key> faces(size_t(1) << n);
    for (size_t mask = 1; mask + 1 < faces.size(); ++mask) {
        std::vector<Key> sub;
        for (int k = 0; k < n; ++k)
            if (mask >> k & 1)
                sub.push_back(vs[k]);
        add_strict(C, sub);
        faces[mask] = strict_key(sub);
    }
    C.add_simplex(strict_key(vs), vs, faces);
}

/// Axiom violations of a complex (empty means valid).
inline std::vector<std::string> validate_complex(const Complex& C) {
    std::vector<std::string> out;
    for (int i = 0; i <= C.max_dim(); ++i)
        for (const auto& s : C.simplices(i)) {
            const int n = static_cast<int>(s.vertices.size());
            std::set<Key> vs(s.vertices.begin(), s.vertices.end());
            if (static_cast<int>(vs.size()) != n)
                out.push_back("simplex " + hex(s.key) + " has repeated vertices");
            if (s.faces.size() != (size_t(1) << n)) {
                out.push_back("simplex " + hex(s.key) + " has a malformed face table");
                continue;
            }
            for (size_t mask = 1; mask < s.faces.size(); ++mask) {
                std::vector<Key> sub;
                for (int k = 0; k < n; ++k)
                    if (mask >> k & 1)
                        sub.push_back(s.vertices[k]);
                const Key& f = s.faces[mask];
                if (!C.contains(f)) {
                    out.push_back("simplex " + hex(s.key) + " has missing face " + hex(f));
                    continue;
                }
                const SimplexRec& fr = C.at(f);
                if (fr.vertices != sub) {
                    out.push_back("face of " + hex(s.key) + " has the wrong vertex set");
                    continue;
                }
                // Associativity: faces of the face agree with faces of s.
                for (size_t m2 = 1; m2 < fr.faces.size(); ++m2) {
                    size_t full = 0;
                    int pos = 0;
                    for (int k = 0; k < n; ++k)
                        if (mask >> k & 1) {
                            if (m2 >> pos & 1)
                                full |= size_t(1) << k;
                            ++pos;
                        }
                    if (fr.faces[m2] != s.faces[full])
                        out.push_back("face table of " + hex(s.key) + " is not associative");
                }
            }
        }
    return out;
}

/// s_v applied to the orientation given by an explicit vertex ordering:
/// (-1)^{position of v, 1-based} times the induced ordering of the facet.
inline OrientedSimplexRef orientation_face_sign(const Complex& C, const Key& sigma, const Key& v,
                                                const std::vector<Key>& ordering) {
    const SimplexRec& s = C.at(sigma);
    require(s.dim() >= 1, ErrorKind::VertexNotInSimplex, "no faces of a vertex");
    auto it = std::find(ordering.begin(), ordering.end(), v);
    require(it != ordering.end(), ErrorKind::VertexNotInSimplex, "vertex not in simplex");
    int pos = static_cast<int>(it - ordering.begin()) + 1;
    std::vector<Key> rest;
    for (const auto& w : ordering)
        if (w != v)
            rest.push_back(w);
    int sign = (pos % 2 ? -1 : 1) * permutation_parity(rest);
    return {C.face(sigma, rest), sign};
}

/// s_v on an oriented simplex given by parity relative to ascending order.
inline OrientedSimplexRef orientation_face_sign(const Complex& C, const Key& sigma, const Key& v,
                                                const OrientedSimplexRef& nu) {
    std::vector<Key> ord = C.at(sigma).vertices;
    if (nu.parity < 0)
        std::swap(ord[0], ord[1]);
    return orientation_face_sign(C, sigma, v, ord);
}

/// Number of (simplex, orientation, vertex pair) triples violating
/// s_{v'} s_v = - s_v s_{v'}.
inline long anticommutation_violations(const Complex& C) {
    long bad = 0;
    for (int i = 2; i <= C.max_dim(); ++i)
        for (const auto& s : C.simplices(i))
            for (int parity : {1, -1})
                for (const auto& v : s.vertices)
                    for (const auto& w : s.vertices) {
                        if (v == w)
                            continue;
                        OrientedSimplexRef nu{s.key, parity};
                        auto a1 = orientation_face_sign(C, s.key, v, nu);
                        auto a = orientation_face_sign(C, a1.key, w, a1);
                        auto b1 = orientation_face_sign(C, s.key, w, nu);
                        auto b = orientation_face_sign(C, b1.key, v, b1);
                        if (a.key != b.key || a.parity != -b.parity)
                            ++bad;
                    }
    return bad;
}

/// Simplex maps per key; vertices map through f_0 = map on 0-simplices.
struct SimplicialMap {
    std::unordered_map<Key, Key> f;

    const Key& operator()(const Key& k) const {
        auto it = f.find(k);
        require(it != f.end(), ErrorKind::InvalidArgument, "simplex outside the map's domain");
        return it->second;
    }
};

/// Axiom violations of f : S -> T over its whole domain.
inline std::vector<std::string> validate_map(const SimplicialMap& f, const Complex& S, const Complex& T) {
    std::vector<std::string> out;
    for (int i = 0; i <= S.max_dim(); ++i)
        for (const auto& s : S.simplices(i)) {
            auto it = f.f.find(s.key);
            if (it == f.f.end()) {
                out.push_back("unmapped simplex " + hex(s.key));
                continue;
            }
            if (!T.contains(it->second)) {
                out.push_back("image of " + hex(s.key) + " missing from target");
                continue;
            }
            const SimplexRec& t = T.at(it->second);
            std::vector<Key> img;
            for (const auto& v : s.vertices)
                img.push_back(f(v));
            std::vector<Key> sorted = img;
            std::sort(sorted.begin(), sorted.end());
            if (t.dim() != s.dim() || sorted != t.vertices) {
                out.push_back("vertices of " + hex(s.key) + " do not map onto its image");
                continue;
            }
            const int n = static_cast<int>(s.vertices.size());
            for (size_t mask = 1; mask + 1 < (size_t(1) << n); ++mask) {
                std::vector<Key> sub;
                for (int k = 0; k < n; ++k)
                    if (mask >> k & 1)
                        sub.push_back(img[k]);
                if (f(s.faces[mask]) != T.face(t.key, sub))
                    out.push_back("map is not compatible with faces of " + hex(s.key));
            }
        }
    return out;
}

inline SimplicialMap compose(const SimplicialMap& g, const SimplicialMap& f) {
    SimplicialMap h;
    for (const auto& [k, v] : f.f)
        h.f[k] = g(v);
    return h;
}

struct FiberReport {
    std::map<Key, long> fiber_size;
    std::vector<Key> over_ceiling;
    bool finite() const { return over_ceiling.empty(); }
};

/// Fiber cardinalities over a probe set. `next_source` yields source
/// simplices one at a time (nullopt when exhausted); enumeration stops once
/// some probe fiber exceeds the ceiling or `max_steps` sources were drawn.
inline FiberReport check_finite_map(const std::function<std::optional<Key>()>& next_source,
                                    const std::function<Key(const Key&)>& f, const std::set<Key>& probes,
                                    long ceiling, long max_steps = 1000000) {
    FiberReport r;
    for (const auto& p : probes)
        r.fiber_size[p] = 0;
    for (long step = 0; step < max_steps; ++step) {
        auto s = next_source();
        if (!s)
            return r;
        Key img = f(*s);
        auto it = r.fiber_size.find(img);
        if (it == r.fiber_size.end())
            continue;
        if (++it->second > ceiling) {
            r.over_ceiling.push_back(img);
            return r;
        }
    }
    // Source not exhausted within the step budget: every probe is suspect.
    for (const auto& [k, n] : r.fiber_size)
        if (n > 0)
            r.over_ceiling.push_back(k);
    return r;
}

/// Text format: one line per simplex, "dim key v_0 .. v_i : f_0 .. f_i"
/// where f_k is the facet opposite v_k; keys hex-encoded.
inline void write_complex(std::ostream& os, const Complex& C) {
    for (int i = 0; i <= C.max_dim(); ++i)
        for (const auto& k : C.sorted_keys(i)) {
            const SimplexRec& s = C.at(k);
            os << i << ' ' << hex(k);
            for (const auto& v : s.vertices)
                os << ' ' << hex(v);
            if (i > 0) {
                os << " :";
                for (int p = 0; p <= i; ++p)
                    os << ' ' << hex(C.facet(s, p));
            }
            os << '\n';
        }
}

/// Reads the text format back; faces of codimension > 1 are recovered
/// through the facets' own tables.
inline Complex read_complex(std::istream& is) {
    Complex C;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        int dim;
        std::string key;
        ls >> dim >> key;
        std::vector<Key> vs, facets;
        std::string tok;
        for (int k = 0; k <= dim; ++k) {
            ls >> tok;
            vs.push_back(unhex(tok));
        }
        if (dim == 0) {
            C.add_vertex(unhex(key));
            continue;
        }
        ls >> tok;
        require(tok == ":", ErrorKind::InvalidArgument, "malformed complex line");
        for (int k = 0; k <= dim; ++k) {
            ls >> tok;
            facets.push_back(unhex(tok));
        }
        const int n = dim + 1;
        std::vector<Key> faces(size_t(1) << n);
        for (size_t mask = 1; mask + 1 < faces.size(); ++mask) {
            int missing = 0;
            while (mask >> missing & 1)
                ++missing;
            if (__builtin_popcountll(mask) == n - 1) {
                faces[mask] = facets[missing];
                continue;
            }
            const SimplexRec& fr = C.at(facets[missing]);
            size_t sub = 0;
            int pos = 0;
            for (int k = 0; k < n; ++k) {
                if (k == missing)
                    continue;
                if (mask >> k & 1)
                    sub |= size_t(1) << pos;
                ++pos;
            }
            faces[mask] = fr.faces[sub];
        }
        C.add_simplex(unhex(key), vs, faces);
    }
    return C;
}

} // namespace btq
