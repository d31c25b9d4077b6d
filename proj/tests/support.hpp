#pragma once

#include <random>
#include <vector>

#include "btq/ffield.hpp"

namespace btq::gen {

using Rng = std::mt19937_64;

inline Elt rand_elt(const Field& F, Rng& rng) {
    return static_cast<Elt>(std::uniform_int_distribution<int>(0, F.q() - 1)(rng));
}

inline Elt rand_unit(const Field& F, Rng& rng) {
    return static_cast<Elt>(std::uniform_int_distribution<int>(1, F.q() - 1)(rng));
}

inline Poly rand_poly(const Field& F, int maxdeg, Rng& rng) {
    std::vector<Elt> c(maxdeg + 1);
    for (auto& x : c)
        x = rand_elt(F, rng);
    return Poly(&F, c);
}

/// Random element of GL_d(F_q[t]) as a product of elementary and diagonal
/// matrices, rejected until all entries have degree <= maxdeg.
inline PolyMatrix rand_unimodular(const Field& F, int d, int maxdeg, Rng& rng, int steps = 6) {
    for (;;) {
        PolyMatrix g = PolyMatrix::identity(&F, d);
        for (int s = 0; s < steps; ++s) {
            PolyMatrix e = PolyMatrix::identity(&F, d);
            if (d == 1 || rng() % 4 == 0) {
                int i = static_cast<int>(rng() % d);
                e(i, i) = Poly::constant(&F, rand_unit(F, rng));
            } else {
                int i = static_cast<int>(rng() % d), j = static_cast<int>(rng() % (d - 1));
                if (j >= i)
                    ++j;
                e(i, j) = rand_poly(F, std::max(0, maxdeg), rng);
            }
            g = g * e;
        }
        if (max_degree(g) <= maxdeg)
            return g;
    }
}

/// Random lattice basis with entries p/t^k or p/(t+1)^k.
inline InfinityLattice rand_lattice(const Field& F, int d, int maxdeg, Rng& rng) {
    for (;;) {
        RatMatrix B(&F, d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Poly num = rand_poly(F, maxdeg, rng);
                int k = static_cast<int>(rng() % 3);
                Poly den = Poly::one(&F);
                Poly base = rng() % 2 ? Poly::t(&F) : Poly::t(&F) + Poly::one(&F);
                for (int r = 0; r < k; ++r)
                    den = den * base;
                B(i, j) = RatFunc(num, den);
            }
        if (!det(B).is_zero())
            return InfinityLattice(B);
    }
}

} // namespace btq::gen
