#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "btq/building.hpp"
#include "btq/homology.hpp"
#include "btq/quotient/hn.hpp"
#include "btq/quotient/level.hpp"

namespace btq {

struct QuotientParams {
    FieldSpec field;
    int d = 2;
    std::vector<int> level{1}; // coefficients of the monic level f, lowest first
    bool identity_component = false;
    long aut_ceiling = 10'000'000;        // effective automorphism image per type
    long enumeration_ceiling = 2'000'000; // simplices per core, level group size
    Limits limits;
};

using Flag = std::vector<FqRows>;

namespace detail {

inline void put_u64(Key& k, uint64_t v) {
    for (int s = 56; s >= 0; s -= 8)
        k += static_cast<char>((v >> s) & 0xff);
}

inline uint64_t get_u64(const Key& k, size_t pos) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v = (v << 8) | static_cast<unsigned char>(k[pos + i]);
    return v;
}

inline int get_i16(const Key& k, size_t pos) {
    unsigned u = (static_cast<unsigned char>(k[pos]) << 8) | static_cast<unsigned char>(k[pos + 1]);
    return static_cast<int>(u) - 0x8000;
}

inline Key flag_bytes(const Flag& f) {
    Key k;
    k += static_cast<char>(f.size());
    for (const auto& W : f) {
        k += static_cast<char>(W.size());
        for (const auto& row : W)
            for (Elt e : row)
                k += static_cast<char>(e);
    }
    return k;
}

inline Flag flag_from_bytes(const Key& k, size_t pos, int d) {
    Flag f(static_cast<unsigned char>(k[pos++]));
    for (auto& W : f) {
        W.resize(static_cast<unsigned char>(k[pos++]));
        for (auto& row : W) {
            row.resize(d);
            for (auto& e : row)
                e = static_cast<Elt>(k[pos++]);
        }
    }
    return f;
}

inline bool subspace_contains(const Field& F, const FqRows& big, const FqRows& small) {
    FqRows both = big;
    both.insert(both.end(), small.begin(), small.end());
    return fq_rank(F, both) == static_cast<int>(big.size());
}

inline mpz_class gl_order(int q, int m) {
    mpz_class r = 1, qm, qi = 1;
    mpz_ui_pow_ui(qm.get_mpz_t(), q, m);
    for (int i = 0; i < m; ++i) {
        r *= qm - qi;
        qi *= q;
    }
    return r;
}

} // namespace detail

/// |Aut| of the split bundle of descending type n: block GL's for equal
/// entries times q^{n_j - n_i + 1} for each pair n_i < n_j.
inline mpz_class aut_order(int q, const std::vector<int>& n) {
    mpz_class r = 1;
    const int d = static_cast<int>(n.size());
    for (int i = 0; i < d;) {
        int j = i;
        while (j < d && n[j] == n[i])
            ++j;
        r *= detail::gl_order(q, j - i);
        i = j;
    }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (n[i] < n[j]) {
                mpz_class p;
                mpz_ui_pow_ui(p.get_mpz_t(), q, n[j] - n[i] + 1);
                r *= p;
            }
    return r;
}

/// Decoded pointed key.
struct PointedKey {
    std::vector<int> type;
    uint64_t level = 0;
    Flag flag;
};

/// Canonical data of a chain L_0 > ... > L_i > pi L_0 with level datum.
struct ChainCanon {
    Key key;                              // unpointed: min over rotations
    std::vector<Key> pointed;             // per rotation
    std::vector<Key> vertex_keys;         // chain order
    std::vector<std::vector<int>> types;  // chain order, normalized
    int best = 0;                         // rotation realizing the key
    int self_identifications = 0;         // other rotations with the same key
};

/// A simplex of the quotient with a witness chain.
struct QSimplex {
    Key key;
    std::vector<InfinityLattice> chain;
    uint64_t level = 0;
    ChainCanon canon;
    std::vector<Key> vertices; // ascending
    std::vector<Key> faces;    // by vertex mask, filled on demand

    int dim() const { return static_cast<int>(chain.size()) - 1; }
};

/// Canonicalization of simplices of Gamma(f) \ BT modulo Gamma, where
/// Gamma = GL_d(F_q[t]) acts on (L, g) by (L gamma, gamma^{-1} g).
class QuotientContext {
public:
    explicit QuotientContext(QuotientParams P)
        : P_(std::move(P)), F_(std::make_shared<Field>(P_.field)),
          G_(F_.get(), P_.d, Poly(F_.get(), to_elts(P_.level))), fib_(F_.get(), P_.d) {
        require(P_.d >= 1, ErrorKind::Config, "rank must be positive");
        domain_ = G_.enumerate(P_.identity_component, static_cast<size_t>(P_.enumeration_ceiling));
        for (size_t i = 0; i < domain_.size(); ++i)
            index_[domain_[i]] = static_cast<int>(i);
    }
    QuotientContext(const QuotientContext&) = delete;
    QuotientContext& operator=(const QuotientContext&) = delete;

    const QuotientParams& params() const { return P_; }
    const Field* field() const { return F_.get(); }
    int dim() const { return P_.d; }
    const LevelGroup& level_group() const { return G_; }
    const std::vector<uint64_t>& level_domain() const { return domain_; }
    bool in_domain(uint64_t g) const { return index_.count(g) > 0; }

    /// Per-type orbit data of Aut(F_n) acting on level data and fibers.
    struct TypeData {
        std::vector<int> n;
        std::vector<std::pair<uint64_t, uint64_t>> gens; // (level, fiber), closed under inverse
        std::vector<uint64_t> P_gens;                    // fiber images of Aut
        std::vector<uint64_t> S_gens;                    // fiber image of Aut cap Gamma(f)
        std::vector<int32_t> rep;                        // orbit representative per domain index
        std::vector<uint64_t> phi;                       // fiber transport to the representative
        std::vector<int32_t> reps;
        std::unordered_map<int32_t, long> orbit_size;
        std::unordered_map<Key, std::pair<Key, long>> S_cache;
        std::unordered_map<Key, long> P_cache;
    };

    TypeData& type_data(const std::vector<int>& n) {
        auto it = types_.find(n);
        if (it != types_.end())
            return it->second;
        return types_.emplace(n, build_type(n)).first->second;
    }

    /// Vertex key: 'Q', d, type, level representative.
    Key vertex_prefix(const std::vector<int>& n, uint64_t rep) const {
        Key k = "Q";
        k += static_cast<char>(P_.d);
        for (int x : n)
            detail::put_i16(k, x);
        detail::put_u64(k, rep);
        return k;
    }

    PointedKey decode(const Key& k) const {
        PointedKey p;
        size_t pos = 2;
        for (int i = 0; i < P_.d; ++i, pos += 2)
            p.type.push_back(detail::get_i16(k, pos));
        p.level = detail::get_u64(k, pos);
        p.flag = detail::flag_from_bytes(k, pos + 8, P_.d);
        return p;
    }

    /// Canonical form of a flag under S_n, with the S_n-orbit size.
    std::pair<Flag, long> canonical_flag(TypeData& T, const Flag& f) {
        Key fb = detail::flag_bytes(f);
        auto it = T.S_cache.find(fb);
        if (it == T.S_cache.end()) {
            auto [best, size] = orbit_min(T.S_gens, f);
            it = T.S_cache.emplace(fb, std::make_pair(best, size)).first;
        }
        return {detail::flag_from_bytes(it->second.first, 0, P_.d), it->second.second};
    }

    /// Size of the orbit of a flag under the full fiber image of Aut(F_n).
    long fiber_orbit_size(TypeData& T, const Flag& f) {
        Key fb = detail::flag_bytes(f);
        auto it = T.P_cache.find(fb);
        if (it == T.P_cache.end())
            it = T.P_cache.emplace(fb, orbit_min(T.P_gens, f).second).first;
        return it->second;
    }

    /// Pointed key of the chain M_0 > M_1 > ... (all containing pi M_0).
    Key pointed_key(const std::vector<InfinityLattice>& M, uint64_t level, std::vector<int>* type_out = nullptr) {
        const int d = P_.d;
        const Field* F = F_.get();
        Splitting sp = split_lattice(M[0]);
        const int s = sp.type.back();
        std::vector<int> n = sp.type;
        for (auto& x : n)
            x -= s;
        RatMatrix Gm = to_rat(sp.gamma).scaled(RatFunc::monomial(F, 1, -s));
        Flag flag;
        for (size_t j = 1; j < M.size(); ++j) {
            RatMatrix X = M[j].basis() * Gm;
            FqRows W;
            for (int r = 0; r < d; ++r) {
                FqVec v(d);
                for (int k = 0; k < d; ++k) {
                    require(X(r, k).degree() <= n[k], ErrorKind::InvalidArgument,
                            "chain member not contained in its first lattice");
                    v[k] = X(r, k).coeff_at(n[k]);
                }
                W.push_back(std::move(v));
            }
            fq_rref(*F, W);
            flag.push_back(std::move(W));
        }
        uint64_t g = G_.mul(G_.reduce(sp.gamma_inv), level);
        TypeData& T = type_data(n);
        auto idx = index_.find(g);
        require(idx != index_.end(), ErrorKind::InvalidArgument, "level datum outside the enumerated level group");
        uint64_t ph = T.phi[idx->second];
        for (auto& W : flag)
            W = fib_.act(W, ph);
        Flag canon = canonical_flag(T, flag).first;
        if (type_out)
            *type_out = n;
        return vertex_prefix(n, domain_[T.rep[idx->second]]) + detail::flag_bytes(canon);
    }

    Key vertex_key(const InfinityLattice& L, uint64_t level) { return pointed_key({L}, level); }

    /// Canonical data of a chain L_0 > L_1 > ... > L_i > pi L_0.
    ChainCanon canon_chain(const std::vector<InfinityLattice>& chain, uint64_t level) {
        const int m = static_cast<int>(chain.size());
        ChainCanon c;
        c.pointed.resize(m);
        c.types.resize(m);
        for (int r = 0; r < m; ++r) {
            std::vector<InfinityLattice> M;
            for (int j = 0; j < m; ++j) {
                int idx = r + j;
                M.push_back(idx < m ? chain[idx] : chain[idx - m].twisted(-1));
            }
            c.pointed[r] = pointed_key(M, level, &c.types[r]);
            c.vertex_keys.push_back(c.pointed[r].substr(0, 10 + 2 * P_.d) + '\0');
        }
        c.best = static_cast<int>(std::min_element(c.pointed.begin(), c.pointed.end()) - c.pointed.begin());
        c.key = c.pointed[c.best];
        for (int r = 0; r < m; ++r)
            if (r != c.best && c.pointed[r] == c.key)
                ++c.self_identifications;
        return c;
    }

    /// The quotient simplex through a chain (cached by key).
    const QSimplex& simplex(const std::vector<InfinityLattice>& chain, uint64_t level) {
        ChainCanon c = canon_chain(chain, level);
        auto it = simplices_.find(c.key);
        if (it != simplices_.end())
            return it->second;
        QSimplex s;
        s.key = c.key;
        s.chain = chain;
        s.level = level;
        s.vertices = c.vertex_keys;
        std::sort(s.vertices.begin(), s.vertices.end());
        require(std::adjacent_find(s.vertices.begin(), s.vertices.end()) == s.vertices.end(),
                ErrorKind::InvalidArgument, "quotient simplex with repeated vertices");
        s.canon = std::move(c);
        return simplices_.emplace(s.key, std::move(s)).first->second;
    }

    const QSimplex& simplex(const Key& k) const {
        auto it = simplices_.find(k);
        require(it != simplices_.end(), ErrorKind::InvalidArgument, "unknown quotient simplex");
        return it->second;
    }

    /// Face keys by vertex mask (ascending vertex order).
    const std::vector<Key>& faces(const Key& k) {
        QSimplex& s = simplices_.at(k);
        if (!s.faces.empty())
            return s.faces;
        const int m = static_cast<int>(s.chain.size());
        std::vector<Key> faces(size_t(1) << m);
        for (size_t mask = 1; mask + 1 < faces.size(); ++mask) {
            std::vector<InfinityLattice> sub;
            for (int j = 0; j < m; ++j) {
                int pos = static_cast<int>(std::find(s.vertices.begin(), s.vertices.end(),
                                                     s.canon.vertex_keys[j]) - s.vertices.begin());
                if (mask >> pos & 1)
                    sub.push_back(s.chain[j]);
            }
            faces[mask] = simplex(sub, s.level).key;
        }
        faces.back() = k;
        QSimplex& again = simplices_.at(k); // the map may have rehashed
        again.faces = std::move(faces);
        return again.faces;
    }

    /// Delta p of every vertex type of a simplex; core test for alpha.
    bool in_core(const QSimplex& s, int alpha) const {
        for (int i = 0; i + 1 < P_.d; ++i) {
            bool low = false;
            for (const auto& n : s.canon.types)
                low = low || n[i] - n[i + 1] < alpha;
            if (!low)
                return false;
        }
        return true;
    }

    /// All pointed simplices at the vertex (n, rep), as simplex keys.
    const std::vector<Key>& star(const std::vector<int>& n, uint64_t rep) {
        Key vk = vertex_prefix(n, rep) + '\0';
        auto it = stars_.find(vk);
        if (it != stars_.end())
            return it->second;
        const int d = P_.d;
        const Field& F = *F_;
        TypeData& T = type_data(n);
        InfinityLattice L0 = InfinityLattice::diagonal(F_.get(), n);
        std::vector<FqRows> subs;
        for (int k = d - 1; k >= 1; --k) {
            auto s = subspaces(F, d, k);
            subs.insert(subs.end(), s.begin(), s.end());
        }
        std::set<Key> seen_flags;
        std::vector<Key> out;
        Flag cur;
        std::function<void(size_t)> rec = [&](size_t start) {
            if (!cur.empty()) {
                Key cb = detail::flag_bytes(canonical_flag(T, cur).first);
                if (seen_flags.insert(cb).second) {
                    std::vector<InfinityLattice> chain{L0};
                    for (const auto& W : cur)
                        chain.push_back(sublattice_from_subspace(L0, W));
                    out.push_back(simplex(chain, rep).key);
                }
            }
            for (size_t i = start; i < subs.size(); ++i) {
                if (!cur.empty() && (subs[i].size() >= cur.back().size() ||
                                     !detail::subspace_contains(F, cur.back(), subs[i])))
                    continue;
                cur.push_back(subs[i]);
                rec(i + 1);
                cur.pop_back();
            }
        };
        simplex({L0}, rep);
        out.push_back(vk);
        rec(0);
        return stars_.emplace(vk, std::move(out)).first->second;
    }

    /// Normalized types (n_d = 0) with every Delta p below `bound`.
    std::vector<std::vector<int>> types_below(int bound) const {
        std::vector<std::vector<int>> out;
        std::vector<int> n(P_.d, 0);
        std::function<void(int)> rec = [&](int i) {
            if (i < 0) {
                out.push_back(n);
                return;
            }
            for (int delta = 0; delta < bound; ++delta) {
                n[i] = n[i + 1] + delta;
                rec(i - 1);
            }
        };
        if (P_.d == 1)
            return {n};
        rec(P_.d - 2);
        return out;
    }

    /// Size of the orbit of level data identified with `rep` at type n.
    long level_orbit_size(const std::vector<int>& n, uint64_t rep) {
        return type_data(n).orbit_size.at(index_.at(rep));
    }

    /// |Aut(F_n) cap Gamma(f)|.
    mpz_class vertex_stabilizer_order(const std::vector<int>& n, uint64_t rep) {
        TypeData& T = type_data(n);
        return aut_order(F_->q(), n) / T.orbit_size.at(index_.at(rep));
    }

    /// Stabilizer index of a simplex relative to full level: the size of the
    /// Aut-orbit of (flag, level) over the Aut-orbit of the flag alone.
    long ramification(const Key& pointed) {
        PointedKey p = decode(pointed);
        TypeData& T = type_data(p.type);
        long level_orbit = T.orbit_size.at(index_.at(p.level));
        long s_orbit = canonical_flag(T, p.flag).second;
        long p_orbit = fiber_orbit_size(T, p.flag);
        require((level_orbit * s_orbit) % p_orbit == 0, ErrorKind::InvalidArgument,
                "inconsistent orbit sizes");
        return level_orbit * s_orbit / p_orbit;
    }

    size_t simplex_count() const { return simplices_.size(); }

private:
    static std::vector<Elt> to_elts(const std::vector<int>& v) {
        std::vector<Elt> out;
        for (int x : v)
            out.push_back(static_cast<Elt>(x));
        return out;
    }

    std::pair<Key, long> orbit_min(const std::vector<uint64_t>& gens, const Flag& f) const {
        Key start = detail::flag_bytes(f);
        std::unordered_set<Key> seen{start};
        std::vector<Flag> queue{f};
        Key best = start;
        for (size_t h = 0; h < queue.size(); ++h)
            for (uint64_t g : gens) {
                Flag nf;
                for (const auto& W : queue[h])
                    nf.push_back(fib_.act(W, g));
                Key b = detail::flag_bytes(nf);
                if (seen.insert(b).second) {
                    best = std::min(best, b);
                    queue.push_back(std::move(nf));
                }
            }
        return {best, static_cast<long>(seen.size())};
    }

    uint64_t fiber_image(const PolyMatrix& g, const std::vector<int>& n) const {
        const int d = P_.d;
        std::vector<Elt> m(d * d, 0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (n[j] >= n[i])
                    m[i * d + j] = g(i, j).coeff(n[j] - n[i]);
        return fib_.encode(m);
    }

    TypeData build_type(const std::vector<int>& n) {
        const int d = P_.d;
        const Field* F = F_.get();
        TypeData T;
        T.n = n;
        std::set<std::pair<uint64_t, uint64_t>> gset;
        auto add = [&](const PolyMatrix& g) { gset.emplace(G_.reduce(g), fiber_image(g, n)); };
        for (int i = 0; i < d; ++i)
            for (Elt z : {F->primitive(), F->inv(F->primitive())}) {
                PolyMatrix g = PolyMatrix::identity(F, d);
                g(i, i) = Poly::constant(F, z);
                add(g);
            }
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                if (i == j || n[j] < n[i])
                    continue;
                for (int k = 0; k <= n[j] - n[i]; ++k)
                    for (Elt b : F->additive_basis())
                        for (Elt c : {b, F->neg(b)}) {
                            PolyMatrix g = PolyMatrix::identity(F, d);
                            g(i, j) = Poly::monomial(F, c, k);
                            add(g);
                        }
            }
        T.gens.assign(gset.begin(), gset.end());
        std::set<uint64_t> pset;
        for (auto& [l, f] : T.gens)
            pset.insert(f);
        T.P_gens.assign(pset.begin(), pset.end());

        const size_t N = domain_.size();
        T.rep.assign(N, -1);
        T.phi.assign(N, 0);
        std::vector<uint64_t> schreier;
        std::unordered_map<uint64_t, uint64_t> finv;
        auto fiber_inv = [&](uint64_t x) {
            auto it = finv.find(x);
            return it != finv.end() ? it->second : finv[x] = fib_.inv(x);
        };
        std::vector<int32_t> queue;
        for (size_t start = 0; start < N; ++start) {
            if (T.rep[start] >= 0)
                continue;
            T.rep[start] = static_cast<int32_t>(start);
            T.phi[start] = fib_.identity();
            T.reps.push_back(static_cast<int32_t>(start));
            queue.assign(1, static_cast<int32_t>(start));
            for (size_t h = 0; h < queue.size(); ++h) {
                int32_t y = queue[h];
                for (auto& [lv, fv] : T.gens) {
                    auto it = index_.find(G_.mul(lv, domain_[y]));
                    require(it != index_.end(), ErrorKind::InvalidArgument, "level domain not Aut-stable");
                    int32_t y2 = it->second;
                    if (T.rep[y2] < 0) {
                        T.rep[y2] = static_cast<int32_t>(start);
                        T.phi[y2] = fib_.mul(fv, T.phi[y]);
                        queue.push_back(y2);
                    } else if (start == 0) {
                        uint64_t s = fib_.mul(fib_.mul(fiber_inv(T.phi[y]), fiber_inv(fv)), T.phi[y2]);
                        if (s != fib_.identity())
                            schreier.push_back(s);
                    }
                }
            }
            T.orbit_size[static_cast<int32_t>(start)] = static_cast<long>(queue.size());
        }
        for (size_t i = 0; i < N; ++i)
            if (T.rep[i] != static_cast<int32_t>(i))
                T.orbit_size[static_cast<int32_t>(i)] = T.orbit_size.at(T.rep[i]);

        if (G_.trivial()) {
            T.S_gens = T.P_gens;
            mpz_class pord = fiber_parabolic_order(n);
            require(pord <= P_.aut_ceiling, ErrorKind::AutGroupTooLarge,
                    "automorphism image exceeds the configured ceiling");
        } else {
            mpz_class glo = detail::gl_order(F->q(), d);
            require(glo <= P_.aut_ceiling, ErrorKind::AutGroupTooLarge,
                    "fiber group exceeds the configured ceiling");
            std::sort(schreier.begin(), schreier.end());
            schreier.erase(std::unique(schreier.begin(), schreier.end()), schreier.end());
            std::unordered_set<uint64_t> S{fib_.identity()};
            for (uint64_t s : schreier) {
                if (S.count(s))
                    continue;
                T.S_gens.push_back(s);
                std::vector<uint64_t> elems(S.begin(), S.end());
                for (size_t h = 0; h < elems.size(); ++h)
                    for (uint64_t g : T.S_gens) {
                        uint64_t y = fib_.mul(elems[h], g);
                        if (S.insert(y).second)
                            elems.push_back(y);
                    }
            }
            require(mpz_class(T.orbit_size.at(0)) * S.size() <= P_.aut_ceiling, ErrorKind::AutGroupTooLarge,
                    "automorphism image exceeds the configured ceiling");
        }
        return T;
    }

    mpz_class fiber_parabolic_order(const std::vector<int>& n) const {
        const int d = P_.d;
        mpz_class r = 1;
        for (int i = 0; i < d;) {
            int j = i;
            while (j < d && n[j] == n[i])
                ++j;
            r *= detail::gl_order(F_->q(), j - i);
            i = j;
        }
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (n[i] < n[j])
                    r *= F_->q();
        return r;
    }

    QuotientParams P_;
    std::shared_ptr<Field> F_;
    LevelGroup G_;
    FiberOps fib_;
    std::vector<uint64_t> domain_;
    std::unordered_map<uint64_t, int> index_;
    std::map<std::vector<int>, TypeData> types_;
    std::unordered_map<Key, QSimplex> simplices_;
    std::unordered_map<Key, std::vector<Key>> stars_;
};

/// The exhaustion of Gamma(f) \ BT by the cores X \ X^(alpha).
class QuotientComplex : public ExhaustedComplex {
public:
    explicit QuotientComplex(std::shared_ptr<QuotientContext> ctx) : ctx_(std::move(ctx)) {}

    int dimension() const override { return ctx_->dim() - 1; }
    QuotientContext& context() const { return *ctx_; }

    /// Open core simplices per degree.
    std::vector<std::vector<Key>> core_simplices(int alpha) const {
        QuotientContext& q = *ctx_;
        const int d = q.dim();
        std::vector<std::set<Key>> open(d);
        size_t total = 0;
        for (const auto& n : q.types_below(alpha + 2 * (d - 1))) {
            auto& T = q.type_data(n);
            for (int32_t r : T.reps)
                for (const Key& k : q.star(n, q.level_domain()[r])) {
                    const QSimplex& s = q.simplex(k);
                    if (q.in_core(s, alpha) && open[s.dim()].insert(k).second)
                        require(++total <= static_cast<size_t>(q.params().enumeration_ceiling),
                                ErrorKind::EnumerationCeiling, "core larger than the enumeration ceiling");
                }
        }
        std::vector<std::vector<Key>> out;
        for (auto& s : open)
            out.emplace_back(s.begin(), s.end());
        return out;
    }

    /// Closure of a set of quotient simplices as a complex.
    Complex closure(const std::vector<std::vector<Key>>& open) const {
        QuotientContext& q = *ctx_;
        Complex C;
        std::set<Key> done;
        std::function<void(const Key&)> add = [&](const Key& k) {
            if (!done.insert(k).second)
                return;
            const QSimplex& s = q.simplex(k);
            if (s.dim() == 0) {
                C.add_vertex(k);
                return;
            }
            std::vector<Key> faces = q.faces(k);
            for (size_t m = 1; m + 1 < faces.size(); ++m)
                add(faces[m]);
            C.add_simplex(k, q.simplex(k).vertices, faces);
        };
        for (const auto& level : open)
            for (const auto& k : level)
                add(k);
        return C;
    }

    CoreView core(int alpha) const override { return core_ref(alpha); }

    /// The cached core, without copying its cell lists.
    const CoreView& core_ref(int alpha) const {
        auto it = cache_.find(alpha);
        if (it != cache_.end())
            return it->second;
        auto open = core_simplices(alpha);
        CoreView v{std::make_shared<const Complex>(closure(open)), {}, alpha};
        for (auto& keys : open)
            v.open.emplace_back(keys);
        return cache_.emplace(alpha, v).first->second;
    }

private:
    std::shared_ptr<QuotientContext> ctx_;
    mutable std::map<int, CoreView> cache_;
};

/// Right action of k in GL_d(A/f) on level data: the image of a quotient
/// simplex with the parity of its vertex order relative to ascending keys.
inline OrientedSimplexRef level_action(QuotientContext& q, const Key& k, uint64_t g) {
    const QSimplex& s = q.simplex(k);
    uint64_t lv = q.level_group().mul(s.level, g);
    ChainCanon cc = q.canon_chain(s.chain, lv);
    const QSimplex& t = q.simplex(s.chain, lv);
    std::vector<Key> image;
    for (const auto& v : s.vertices) {
        int pos = static_cast<int>(std::find(s.canon.vertex_keys.begin(), s.canon.vertex_keys.end(), v) -
                                   s.canon.vertex_keys.begin());
        image.push_back(cc.vertex_keys[pos]);
    }
    return {t.key, permutation_parity(image)};
}

/// Projection between quotient levels f' -> f (f dividing f'): each fine
/// simplex maps to the coarse simplex of the same chain with reduced level.
inline RamifiedMap level_map(QuotientContext& fine, QuotientContext& coarse, const Complex& fine_core) {
    const auto& fp = fine.params();
    const auto& cp = coarse.params();
    require(fp.field == cp.field && fp.d == cp.d, ErrorKind::LevelsIncompatible, "field or rank differ");
    const Poly& ff = fine.level_group().ring().modulus();
    const Poly& cf = coarse.level_group().ring().modulus();
    require((ff % cf).is_zero(), ErrorKind::LevelsIncompatible, "coarse level does not divide the fine level");
    RamifiedMap m;
    for (int i = 0; i <= fine_core.max_dim(); ++i)
        for (const auto& k : fine_core.sorted_keys(i)) {
            const QSimplex& s = fine.simplex(k);
            uint64_t g = fine.level_group().reduce_to(coarse.level_group(), s.level);
            ChainCanon cc = coarse.canon_chain(s.chain, g);
            const QSimplex& t = coarse.simplex(s.chain, g);
            std::vector<Key> image;
            for (const auto& v : s.vertices) {
                int pos = static_cast<int>(std::find(s.canon.vertex_keys.begin(), s.canon.vertex_keys.end(), v) -
                                           s.canon.vertex_keys.begin());
                image.push_back(cc.vertex_keys[pos]);
            }
            long e = fine.ramification(s.canon.pointed[0]);
            long ec = coarse.ramification(t.canon.pointed[0]);
            require(e % ec == 0, ErrorKind::InvalidArgument, "ramification indices do not divide");
            m.fine[k] = {t.key, permutation_parity(image), e / ec};
        }
    return m;
}

} // namespace btq
