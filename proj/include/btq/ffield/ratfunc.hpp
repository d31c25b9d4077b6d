#pragma once

#include <climits>
#include <string>
#include <vector>

#include "btq/ffield/poly.hpp"

namespace btq {

/// Degree of the zero function.
inline constexpr int kNegInfDeg = INT_MIN / 4;

/// Element of F_q(t) in lowest terms with monic denominator.
class RatFunc {
public:
    RatFunc() = default;
    explicit RatFunc(const Field* F) : num_(F), den_(Poly::one(F)) {}
    RatFunc(const Poly& p) : num_(p), den_(Poly::one(p.field())) {}
    RatFunc(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

    static RatFunc constant(const Field* F, Elt c) { return RatFunc(Poly::constant(F, c)); }

    /// c * t^k for any integer k.
    static RatFunc monomial(const Field* F, Elt c, int k) {
        if (k >= 0)
            return RatFunc(Poly::monomial(F, c, k));
        RatFunc r;
        r.num_ = Poly::constant(F, c);
        r.den_ = Poly::monomial(F, 1, -k);
        if (c == 0)
            r.den_ = Poly::one(F);
        return r;
    }

    const Field* field() const { return num_.field() ? num_.field() : den_.field(); }
    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_poly() const { return den_.is_one(); }

    /// deg(num) - deg(den), i.e. minus the valuation at infinity.
    int degree() const { return is_zero() ? kNegInfDeg : num_.degree() - den_.degree(); }

    /// Leading coefficient of the expansion in 1/t.
    Elt lc() const { return is_zero() ? Elt{0} : field()->div(num_.lc(), den_.lc()); }

    /// Coefficients of t^deg, t^{deg-1}, ..., t^{kmin} in the expansion at infinity.
    std::vector<Elt> laurent(int kmin) const {
        if (is_zero() || degree() < kmin)
            return {};
        const Field& F = *field();
        int n = degree() - kmin + 1;
        int da = num_.degree(), db = den_.degree();
        std::vector<Elt> c(n, 0);
        Elt inv0 = F.inv(den_.lc());
        for (int j = 0; j < n; ++j) {
            Elt acc = da - j >= 0 ? num_.coeff(da - j) : Elt{0};
            int lim = std::min(j, db);
            for (int i = 1; i <= lim; ++i)
                acc = F.sub(acc, F.mul(den_.coeff(db - i), c[j - i]));
            c[j] = F.mul(acc, inv0);
        }
        return c;
    }

    /// Coefficient of t^k in the expansion at infinity.
    Elt coeff_at(int k) const {
        if (is_zero() || k > degree())
            return 0;
        return laurent(k).back();
    }

    RatFunc operator-() const {
        RatFunc r = *this;
        r.num_ = -r.num_;
        return r;
    }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
        if (a.is_zero())
            return b;
        if (b.is_zero())
            return a;
        if (a.den_ == b.den_)
            return RatFunc(a.num_ + b.num_, a.den_);
        return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        if (a.is_zero() || b.is_zero())
            return RatFunc(a.field() ? a.field() : b.field());
        if (a.is_poly() && b.is_poly()) {
            RatFunc r;
            r.num_ = a.num_ * b.num_;
            r.den_ = a.den_;
            return r;
        }
        return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
    }
    RatFunc inverse() const {
        require(!is_zero(), ErrorKind::InvalidArgument, "inverse of zero rational function");
        return RatFunc(den_, num_);
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) { return a * b.inverse(); }

    RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
    RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
    RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }

    bool operator==(const RatFunc& o) const { return num_ == o.num_ && den_ == o.den_; }
    std::strong_ordering operator<=>(const RatFunc& o) const {
        if (auto c = num_ <=> o.num_; c != 0)
            return c;
        return den_ <=> o.den_;
    }

    std::string to_string() const {
        if (is_poly())
            return num_.to_string();
        return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
    }

private:
    void normalize() {
        require(!den_.is_zero(), ErrorKind::InvalidArgument, "zero denominator");
        const Field* F = field();
        if (num_.is_zero()) {
            den_ = Poly::one(F);
            return;
        }
        if (!den_.is_constant()) {
            Poly g = gcd(num_, den_);
            if (!g.is_one()) {
                num_ = num_ / g;
                den_ = den_ / g;
            }
        }
        Elt s = F->inv(den_.lc());
        if (s != 1) {
            num_ = num_.scaled(s);
            den_ = den_.scaled(s);
        }
    }

    Poly num_, den_;
};

} // namespace btq
