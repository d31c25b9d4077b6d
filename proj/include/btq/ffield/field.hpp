#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "btq/error.hpp"

namespace btq {

using Elt = std::uint8_t;

struct FieldSpec {
    int p = 2;
    int e = 1;
    // Coefficients of the defining polynomial over F_p, lowest degree first,
    // including the leading 1. Empty when e == 1.
    std::vector<int> modulus;

    int q() const {
        int r = 1;
        for (int i = 0; i < e; ++i)
            r *= p;
        return r;
    }

    // Default moduli: q=4 x^2+x+1, q=8 x^3+x+1, q=16 x^4+x+1, q=9 x^2+1.
    static FieldSpec of_order(int q);

    bool operator==(const FieldSpec&) const = default;
};

namespace detail {

inline bool is_prime(int n) {
    if (n < 2)
        return false;
    for (int k = 2; k * k <= n; ++k)
        if (n % k == 0)
            return false;
    return true;
}

// Remainder of a by b over F_p, coefficient vectors lowest first.
inline std::vector<int> fp_rem(std::vector<int> a, const std::vector<int>& b, int p) {
    int db = static_cast<int>(b.size()) - 1;
    while (db >= 0 && b[db] == 0)
        --db;
    int inv = 1;
    while ((b[db] * inv) % p != 1)
        ++inv;
    for (int i = static_cast<int>(a.size()) - 1; i >= db; --i) {
        int c = (a[i] % p + p) % p;
        if (c == 0)
            continue;
        int f = (c * inv) % p;
        for (int j = 0; j <= db; ++j)
            a[i - db + j] = ((a[i - db + j] - f * b[j]) % p + p) % p;
    }
    a.resize(db > 0 ? db : 0);
    return a;
}

// Trial division by every monic polynomial of degree 1..e/2.
inline bool fp_irreducible(const std::vector<int>& m, int p) {
    int e = static_cast<int>(m.size()) - 1;
    for (int k = 1; 2 * k <= e; ++k) {
        int count = 1;
        for (int i = 0; i < k; ++i)
            count *= p;
        for (int code = 0; code < count; ++code) {
            std::vector<int> g(k + 1);
            int c = code;
            for (int i = 0; i < k; ++i) {
                g[i] = c % p;
                c /= p;
            }
            g[k] = 1;
            auto r = fp_rem(m, g, p);
            bool zero = true;
            for (int x : r)
                zero = zero && x == 0;
            if (zero)
                return false;
        }
    }
    return true;
}

} // namespace detail

inline FieldSpec FieldSpec::of_order(int q) {
    switch (q) {
    case 4: return {2, 2, {1, 1, 1}};
    case 8: return {2, 3, {1, 1, 0, 1}};
    case 16: return {2, 4, {1, 1, 0, 0, 1}};
    case 9: return {3, 2, {1, 0, 1}};
    default:
        require(detail::is_prime(q) && q <= 16, ErrorKind::Config,
                "unsupported field order " + std::to_string(q));
        return {q, 1, {}};
    }
}

/// F_q with q <= 16. Element k encodes the polynomial whose coefficient of
/// x^i is the i-th base-p digit of k.
class Field {
public:
    explicit Field(FieldSpec spec) : spec_(std::move(spec)) {
        require(detail::is_prime(spec_.p), ErrorKind::Config,
                "characteristic " + std::to_string(spec_.p) + " is not prime");
        require(spec_.e >= 1, ErrorKind::Config, "extension degree must be >= 1");
        q_ = spec_.q();
        require(q_ <= 16, ErrorKind::Config, "field order exceeds 16");
        if (spec_.e > 1) {
            require(static_cast<int>(spec_.modulus.size()) == spec_.e + 1, ErrorKind::Config,
                    "modulus must have degree e");
            for (int& c : spec_.modulus)
                c = ((c % spec_.p) + spec_.p) % spec_.p;
            require(spec_.modulus.back() == 1, ErrorKind::Config, "modulus must be monic");
            require(detail::fp_irreducible(spec_.modulus, spec_.p), ErrorKind::Config,
                    "modulus is reducible over F_p");
        } else {
            spec_.modulus.clear();
        }
        build_tables();
    }

    const FieldSpec& spec() const { return spec_; }
    int q() const { return q_; }
    int p() const { return spec_.p; }
    int e() const { return spec_.e; }

    Elt add(Elt a, Elt b) const { return add_[a][b]; }
    Elt sub(Elt a, Elt b) const { return add_[a][neg_[b]]; }
    Elt neg(Elt a) const { return neg_[a]; }
    Elt mul(Elt a, Elt b) const { return mul_[a][b]; }
    Elt inv(Elt a) const {
        require(a != 0, ErrorKind::InvalidArgument, "inverse of zero in F_q");
        return inv_[a];
    }
    Elt div(Elt a, Elt b) const { return mul(a, inv(b)); }

    /// Generator of the cyclic group F_q^x.
    Elt primitive() const { return primitive_; }

    /// The elements x^0, ..., x^{e-1}: a basis of F_q over F_p.
    const std::vector<Elt>& additive_basis() const { return basis_; }

    /// Image of an integer under Z -> F_p -> F_q.
    Elt from_int(long v) const {
        long r = ((v % spec_.p) + spec_.p) % spec_.p;
        return static_cast<Elt>(r);
    }

    bool operator==(const Field& o) const { return spec_ == o.spec_; }

private:
    void build_tables() {
        const int p = spec_.p, e = spec_.e;
        auto digits = [&](int k) {
            std::vector<int> d(e);
            for (int i = 0; i < e; ++i) {
                d[i] = k % p;
                k /= p;
            }
            return d;
        };
        auto encode = [&](const std::vector<int>& d) {
            int k = 0;
            for (int i = e - 1; i >= 0; --i)
                k = k * p + d[i];
            return static_cast<Elt>(k);
        };
        for (int a = 0; a < q_; ++a) {
            auto da = digits(a);
            std::vector<int> n(e);
            for (int i = 0; i < e; ++i)
                n[i] = (p - da[i]) % p;
            neg_[a] = encode(n);
            for (int b = 0; b < q_; ++b) {
                auto db = digits(b);
                std::vector<int> s(e);
                for (int i = 0; i < e; ++i)
                    s[i] = (da[i] + db[i]) % p;
                add_[a][b] = encode(s);
                std::vector<int> prod(2 * e - 1, 0);
                for (int i = 0; i < e; ++i)
                    for (int j = 0; j < e; ++j)
                        prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
                if (e > 1)
                    prod = detail::fp_rem(prod, spec_.modulus, p);
                prod.resize(e, 0);
                mul_[a][b] = encode(prod);
            }
        }
        for (int a = 1; a < q_; ++a)
            for (int b = 1; b < q_; ++b)
                if (mul_[a][b] == 1)
                    inv_[a] = static_cast<Elt>(b);
        for (int g = 1; g < q_; ++g) {
            int order = 1;
            Elt x = static_cast<Elt>(g);
            while (x != 1) {
                x = mul_[x][g];
                ++order;
            }
            if (order == q_ - 1) {
                primitive_ = static_cast<Elt>(g);
                break;
            }
        }
        int pw = 1;
        for (int i = 0; i < e; ++i) {
            basis_.push_back(static_cast<Elt>(pw));
            pw *= p;
        }
    }

    FieldSpec spec_;
    int q_ = 0;
    std::array<std::array<Elt, 16>, 16> add_{}, mul_{};
    std::array<Elt, 16> neg_{}, inv_{};
    Elt primitive_ = 1;
    std::vector<Elt> basis_;
};

} // namespace btq
