#pragma once
// Random inputs shared by the tower-level tests and the acceptance run.

#include <ltkit/anticyclo.hpp>

#include <random>
#include <vector>

namespace ltkit::testing {

inline UnramifiedElement random_unit(const PrimeContext& ctx, std::mt19937_64& rng) {
    const auto m = ctx.modulus(ctx.precision);
    for (;;) {
        auto x = UnramifiedElement::from_residues(ctx, rng() % m, rng() % m, ctx.precision);
        if (x.is_unit()) return x;
    }
}

/// A product of two or three norm-coherent factors with random twists and
/// exponents, and a random unit twist coordinate.
inline ColemanDatum random_datum(const FormalGroup& fg, std::mt19937_64& rng) {
    const auto& ctx = fg.context();
    std::vector<ColemanFactor> fac;
    const int k = 2 + static_cast<int>(rng() % 2);
    for (int i = 0; i < k; ++i) {
        int e = 1 + static_cast<int>(rng() % 2);
        if (rng() % 3 == 0) e = -e;
        ColemanFactor f;
        if (i == 0 || rng() % 2) {
            std::int64_t r0 = static_cast<std::int64_t>(rng() % ctx.p), r1 = static_cast<std::int64_t>(rng() % ctx.p);
            if (r0 == 0 && r1 == 0) r0 = 1;
            f = ColemanFactor::linear(fixed_point(ctx, r0, r1), e);
        } else {
            f = ColemanFactor::ratio(random_unit(ctx, rng), e);
        }
        f.w = random_unit(ctx, rng);
        fac.push_back(f);
    }
    return ColemanDatum::from_factors(fg, fac, random_unit(ctx, rng));
}

/// Random element of positive valuation at level L, at full working precision.
inline TowerElement random_small(const LevelPtr& L, std::mt19937_64& rng, int jmin = 1) {
    std::vector<Zq> c(static_cast<std::size_t>(L->degree()));
    for (int j = jmin; j < L->degree(); ++j) c[j] = {rng() % L->modulus(), rng() % L->modulus()};
    return TowerElement(L, c, L->degree() * L->working_digits());
}

/// A point of F(Phi) = F(Psi_0) at level L: p times a random element of O.
inline TowerElement random_base_point(const LevelPtr& L, std::mt19937_64& rng) {
    const auto& ctx = L->context();
    const auto m = ctx.modulus(ctx.precision - 1);
    auto x = UnramifiedElement::from_residues(ctx, rng() % m, rng() % m, ctx.precision - 1).scale(1);
    return TowerElement::constant(L, x);
}

/// A point of F(Psi_n): the H_n-trace of a random element of positive valuation.
inline FormalPoint random_point(const LevelPtr& L, std::mt19937_64& rng) {
    return FormalPoint::certify(psi_trace(random_small(L, rng)));
}

} // namespace ltkit::testing
