#pragma once

#include <algorithm>
#include <compare>
#include <string>
#include <utility>
#include <vector>

#include "btq/ffield/field.hpp"

namespace btq {

/// Polynomial in t over F_q, coefficients lowest degree first, no trailing zeros.
class Poly {
public:
    Poly() = default;
    explicit Poly(const Field* F) : F_(F) {}
    Poly(const Field* F, std::vector<Elt> c) : F_(F), c_(std::move(c)) { trim(); }

    static Poly constant(const Field* F, Elt c) { return Poly(F, {c}); }
    static Poly one(const Field* F) { return constant(F, 1); }
    static Poly monomial(const Field* F, Elt c, int k) {
        if (c == 0)
            return Poly(F);
        std::vector<Elt> v(k + 1, 0);
        v[k] = c;
        return Poly(F, std::move(v));
    }
    static Poly t(const Field* F) { return monomial(F, 1, 1); }

    const Field* field() const { return F_; }
    const std::vector<Elt>& coeffs() const { return c_; }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
    bool is_constant() const { return c_.size() <= 1; }
    Elt lc() const { return c_.empty() ? Elt{0} : c_.back(); }
    Elt coeff(int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : Elt{0}; }

    Poly operator-() const {
        Poly r(F_, c_);
        for (auto& x : r.c_)
            x = F_->neg(x);
        return r;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        const Field* F = a.F_ ? a.F_ : b.F_;
        std::vector<Elt> r(std::max(a.c_.size(), b.c_.size()), 0);
        for (size_t i = 0; i < r.size(); ++i)
            r[i] = F->add(a.coeff(static_cast<int>(i)), b.coeff(static_cast<int>(i)));
        return Poly(F, std::move(r));
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

    friend Poly operator*(const Poly& a, const Poly& b) {
        const Field* F = a.F_ ? a.F_ : b.F_;
        if (a.is_zero() || b.is_zero())
            return Poly(F);
        std::vector<Elt> r(a.c_.size() + b.c_.size() - 1, 0);
        for (size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == 0)
                continue;
            for (size_t j = 0; j < b.c_.size(); ++j)
                r[i + j] = F->add(r[i + j], F->mul(a.c_[i], b.c_[j]));
        }
        return Poly(F, std::move(r));
    }

    Poly scaled(Elt s) const {
        if (s == 0)
            return Poly(F_);
        Poly r(F_, c_);
        for (auto& x : r.c_)
            x = F_->mul(x, s);
        return r;
    }

    /// Multiplication by t^k, k >= 0.
    Poly shifted(int k) const {
        if (is_zero())
            return *this;
        std::vector<Elt> r(k, 0);
        r.insert(r.end(), c_.begin(), c_.end());
        return Poly(F_, std::move(r));
    }

    Poly& operator+=(const Poly& o) { return *this = *this + o; }
    Poly& operator-=(const Poly& o) { return *this = *this - o; }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    /// this -= c * t^k * o, in place.
    void sub_scaled_shift(const Poly& o, Elt c, int k) {
        if (o.is_zero() || c == 0)
            return;
        if (!F_)
            F_ = o.F_;
        if (c_.size() < o.c_.size() + k)
            c_.resize(o.c_.size() + k, 0);
        for (size_t j = 0; j < o.c_.size(); ++j)
            c_[j + k] = F_->sub(c_[j + k], F_->mul(c, o.c_[j]));
        trim();
    }

    /// Euclidean division; throws on zero divisor.
    std::pair<Poly, Poly> divmod(const Poly& b) const {
        require(!b.is_zero(), ErrorKind::InvalidArgument, "polynomial division by zero");
        const Field* F = F_ ? F_ : b.F_;
        Poly r(F, c_);
        if (degree() < b.degree())
            return {Poly(F), r};
        std::vector<Elt> qc(degree() - b.degree() + 1, 0);
        Elt inv = F->inv(b.lc());
        while (!r.is_zero() && r.degree() >= b.degree()) {
            int k = r.degree() - b.degree();
            Elt c = F->mul(r.lc(), inv);
            qc[k] = c;
            r.sub_scaled_shift(b, c, k);
        }
        return {Poly(F, std::move(qc)), r};
    }
    Poly operator/(const Poly& b) const { return divmod(b).first; }
    Poly operator%(const Poly& b) const { return divmod(b).second; }

    Poly monic() const { return is_zero() ? *this : scaled(F_->inv(lc())); }

    friend Poly gcd(Poly a, Poly b) {
        while (!b.is_zero()) {
            Poly r = a % b;
            a = std::move(b);
            b = std::move(r);
        }
        return a.monic();
    }

    Elt eval(Elt x) const {
        Elt r = 0;
        for (int i = degree(); i >= 0; --i)
            r = F_->add(F_->mul(r, x), c_[i]);
        return r;
    }

    bool operator==(const Poly& o) const { return c_ == o.c_; }

    /// Total order: by degree, then coefficients from the top down.
    std::strong_ordering operator<=>(const Poly& o) const {
        if (auto c = c_.size() <=> o.c_.size(); c != 0)
            return c;
        for (int i = degree(); i >= 0; --i)
            if (auto c = c_[i] <=> o.c_[i]; c != 0)
                return c;
        return std::strong_ordering::equal;
    }

    std::string to_string() const {
        if (is_zero())
            return "0";
        std::string s;
        for (int i = degree(); i >= 0; --i) {
            if (c_[i] == 0)
                continue;
            if (!s.empty())
                s += " + ";
            if (c_[i] != 1 || i == 0)
                s += std::to_string(c_[i]);
            if (i > 0)
                s += (c_[i] != 1 ? "*t" : "t") + (i > 1 ? "^" + std::to_string(i) : std::string());
        }
        return s;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0)
            c_.pop_back();
    }

    const Field* F_ = nullptr;
    std::vector<Elt> c_;
};

} // namespace btq
