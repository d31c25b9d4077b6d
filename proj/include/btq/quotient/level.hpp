#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "btq/ffield.hpp"

namespace btq {

/// The residue ring F_q[t]/(f). Elements are codes whose base-q digits are
/// the coefficients of the reduced representative.
class LevelRing {
public:
    LevelRing(const Field* F, Poly f) : F_(F), f_(std::move(f)) {
        require(!f_.is_zero() && f_.lc() == 1, ErrorKind::Config, "level must be a monic polynomial");
        deg_ = f_.degree();
        Q_ = 1;
        for (int i = 0; i < deg_; ++i)
            Q_ *= F->q();
        require(Q_ <= 1024, ErrorKind::EnumerationCeiling, "residue ring F_q[t]/(f) too large");
        add_.assign(Q_ * Q_, 0);
        mul_.assign(Q_ * Q_, 0);
        for (int a = 0; a < Q_; ++a)
            for (int b = 0; b < Q_; ++b) {
                add_[a * Q_ + b] = encode(decode(a) + decode(b));
                mul_[a * Q_ + b] = encode(decode(a) * decode(b));
            }
        neg_.resize(Q_);
        for (int a = 0; a < Q_; ++a) {
            neg_[a] = encode(-decode(a));
            bool u = false;
            for (int b = 0; b < Q_ && !u; ++b)
                u = mul_[a * Q_ + b] == one();
            if (u)
                units_.push_back(a);
        }
    }

    const Field* field() const { return F_; }
    const Poly& modulus() const { return f_; }
    int degree() const { return deg_; }
    int size() const { return Q_; }
    bool trivial() const { return deg_ == 0; }

    uint16_t one() const { return trivial() ? 0 : 1; }
    uint16_t add(uint16_t a, uint16_t b) const { return add_[a * Q_ + b]; }
    uint16_t mul(uint16_t a, uint16_t b) const { return mul_[a * Q_ + b]; }
    uint16_t neg(uint16_t a) const { return neg_[a]; }
    const std::vector<uint16_t>& units() const { return units_; }

    uint16_t encode(const Poly& x) const {
        if (trivial())
            return 0;
        Poly r = x % f_;
        int code = 0;
        for (int k = deg_ - 1; k >= 0; --k)
            code = code * F_->q() + r.coeff(k);
        return static_cast<uint16_t>(code);
    }
    Poly decode(int code) const {
        std::vector<Elt> c;
        for (int k = 0; k < deg_; ++k) {
            c.push_back(static_cast<Elt>(code % F_->q()));
            code /= F_->q();
        }
        return Poly(F_, std::move(c));
    }

private:
    const Field* F_;
    Poly f_;
    int deg_ = 0, Q_ = 1;
    std::vector<uint16_t> add_, mul_, neg_, units_;
};

/// GL_d(F_q[t]/(f)); elements are mixed-radix codes of their entries.
class LevelGroup {
public:
    LevelGroup(const Field* F, int d, const Poly& f) : R_(F, f), d_(d) {
        double bits = d * d * std::log2(static_cast<double>(R_.size()));
        require(bits < 63, ErrorKind::EnumerationCeiling, "level group codes exceed 64 bits");
        pow_.resize(d * d);
        uint64_t p = 1;
        for (int i = 0; i < d * d; ++i) {
            pow_[i] = p;
            p *= static_cast<uint64_t>(R_.size());
        }
    }

    const LevelRing& ring() const { return R_; }
    int dim() const { return d_; }
    bool trivial() const { return R_.trivial(); }

    std::vector<uint16_t> entries(uint64_t code) const {
        std::vector<uint16_t> e(d_ * d_);
        for (int i = 0; i < d_ * d_; ++i) {
            e[i] = static_cast<uint16_t>(code % R_.size());
            code /= R_.size();
        }
        return e;
    }
    uint64_t code(const std::vector<uint16_t>& e) const {
        uint64_t c = 0;
        for (int i = d_ * d_ - 1; i >= 0; --i)
            c = c * R_.size() + e[i];
        return c;
    }

    uint64_t identity() const {
        std::vector<uint16_t> e(d_ * d_, 0);
        for (int i = 0; i < d_; ++i)
            e[i * d_ + i] = R_.one();
        return code(e);
    }

    uint64_t mul(uint64_t a, uint64_t b) const {
        if (trivial())
            return 0;
        auto x = entries(a), y = entries(b);
        std::vector<uint16_t> z(d_ * d_, 0);
        for (int i = 0; i < d_; ++i)
            for (int k = 0; k < d_; ++k) {
                uint16_t xv = x[i * d_ + k];
                if (!xv)
                    continue;
                for (int j = 0; j < d_; ++j)
                    z[i * d_ + j] = R_.add(z[i * d_ + j], R_.mul(xv, y[k * d_ + j]));
            }
        return code(z);
    }

    uint64_t reduce(const PolyMatrix& g) const {
        std::vector<uint16_t> e(d_ * d_);
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j)
                e[i * d_ + j] = R_.encode(g(i, j));
        return code(e);
    }

    PolyMatrix lift(uint64_t c) const {
        auto e = entries(c);
        PolyMatrix m(R_.field(), d_, d_);
        for (int i = 0; i < d_ * d_; ++i)
            m(i / d_, i % d_) = R_.decode(e[i]);
        return m;
    }

    /// Determinant as a ring code.
    uint16_t det(uint64_t c) const { return R_.encode(btq::det(lift(c))); }

    /// The group, or the subgroup of elements with determinant in F_q^x,
    /// sorted by code. Generated by elementary matrices and diagonal units.
    std::vector<uint64_t> enumerate(bool identity_component, size_t ceiling) const {
        if (trivial())
            return {0};
        std::vector<uint64_t> gens;
        const Field* F = R_.field();
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j) {
                if (i == j)
                    continue;
                for (int k = 0; k < R_.degree(); ++k)
                    for (Elt b : F->additive_basis()) {
                        auto e = entries(identity());
                        e[i * d_ + j] = R_.encode(Poly::monomial(F, b, k));
                        gens.push_back(code(e));
                    }
            }
        std::vector<uint16_t> diag_units;
        if (identity_component)
            diag_units.push_back(R_.encode(Poly::constant(F, F->primitive())));
        else
            diag_units = R_.units();
        for (uint16_t u : diag_units) {
            auto e = entries(identity());
            e[0] = u;
            gens.push_back(code(e));
        }
        std::unordered_map<uint64_t, char> seen;
        std::deque<uint64_t> queue{identity()};
        seen[identity()] = 1;
        while (!queue.empty()) {
            uint64_t x = queue.front();
            queue.pop_front();
            for (uint64_t s : gens) {
                uint64_t y = mul(s, x);
                if (seen.emplace(y, 1).second) {
                    require(seen.size() <= ceiling, ErrorKind::EnumerationCeiling,
                            "level group larger than the enumeration ceiling");
                    queue.push_back(y);
                }
            }
        }
        std::vector<uint64_t> out;
        out.reserve(seen.size());
        for (auto& [c, _] : seen)
            out.push_back(c);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Image in GL_d(F_q[t]/(f')) for f' dividing f.
    uint64_t reduce_to(const LevelGroup& coarse, uint64_t c) const {
        return coarse.reduce(lift(c));
    }

    std::string to_string(uint64_t c) const { return lift(c).to_string(); }

private:
    LevelRing R_;
    int d_;
    std::vector<uint64_t> pow_;
};

/// GL_d(F_q) with elements coded in base q, used for the action of
/// automorphism groups on the fiber L/pi L.
class FiberOps {
public:
    FiberOps(const Field* F, int d) : F_(F), d_(d) {
        double bits = d * d * std::log2(static_cast<double>(F->q()));
        require(bits < 63, ErrorKind::EnumerationCeiling, "fiber matrices exceed 64 bits");
    }

    int dim() const { return d_; }
    const Field& field() const { return *F_; }

    using M = std::vector<Elt>;
    M decode(uint64_t c) const {
        M m(d_ * d_);
        for (auto& x : m) {
            x = static_cast<Elt>(c % F_->q());
            c /= F_->q();
        }
        return m;
    }
    uint64_t encode(const M& m) const {
        uint64_t c = 0;
        for (int i = d_ * d_ - 1; i >= 0; --i)
            c = c * F_->q() + m[i];
        return c;
    }
    uint64_t identity() const {
        M m(d_ * d_, 0);
        for (int i = 0; i < d_; ++i)
            m[i * d_ + i] = 1;
        return encode(m);
    }
    uint64_t mul(uint64_t a, uint64_t b) const {
        M x = decode(a), y = decode(b), z(d_ * d_, 0);
        for (int i = 0; i < d_; ++i)
            for (int k = 0; k < d_; ++k) {
                if (!x[i * d_ + k])
                    continue;
                for (int j = 0; j < d_; ++j)
                    z[i * d_ + j] = F_->add(z[i * d_ + j], F_->mul(x[i * d_ + k], y[k * d_ + j]));
            }
        return encode(z);
    }
    uint64_t inv(uint64_t a) const {
        M x = decode(a);
        FqRows aug(d_, FqVec(2 * d_, 0));
        for (int i = 0; i < d_; ++i) {
            for (int j = 0; j < d_; ++j)
                aug[i][j] = x[i * d_ + j];
            aug[i][d_ + i] = 1;
        }
        auto piv = fq_rref(*F_, aug);
        require(static_cast<int>(piv.size()) == d_ && piv.back() == d_ - 1, ErrorKind::SingularMatrix,
                "fiber matrix is singular");
        M r(d_ * d_);
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j)
                r[i * d_ + j] = aug[i][d_ + j];
        return encode(r);
    }
    /// Row space of rows * m, in RREF.
    FqRows act(const FqRows& rows, uint64_t c) const {
        M m = decode(c);
        FqRows out;
        for (const auto& v : rows) {
            FqVec w(d_, 0);
            for (int k = 0; k < d_; ++k) {
                if (!v[k])
                    continue;
                for (int j = 0; j < d_; ++j)
                    w[j] = F_->add(w[j], F_->mul(v[k], m[k * d_ + j]));
            }
            out.push_back(std::move(w));
        }
        fq_rref(*F_, out);
        return out;
    }

private:
    const Field* F_;
    int d_;
};

} // namespace btq
