#pragma once
// Coates-Wiles logarithmic derivatives of Coleman data.
//
// A datum is a Coleman series f with unit constant term and a twist
// coordinate a.  Data built from norm-coherent factors h([w]X)^e, with
// h = [b](X)/X or h = X - r (r a fixed point of f), keep their
// factorization, which gives delta_n in closed form at torsion points.
// The series route evaluates f'/f directly and is kept as the oracle.

#include <ltkit/characters.hpp>
#include <ltkit/lubin_tate.hpp>
#include <ltkit/tower.hpp>

#include <vector>

namespace ltkit {

/// f_b(X) = [b](X)/X up to degree D - 1.
inline Series coleman_unit(const FormalGroup& fg, const UnramifiedElement& b, int D) {
    const Series m = fg.mult_by(b, D);
    Series r(fg.context(), D - 1);
    for (int k = 0; k < D; ++k) r[k] = m[k + 1];
    return r;
}

/// Multiplicative inverse of a series with unit constant term.
inline Series series_unit_inverse(const Series& g) {
    if (!g[0].is_unit()) throw InvalidArgument("series has no multiplicative inverse");
    Series r(g.context(), g.bound());
    const UnramifiedElement r0 = g[0].inverse();
    r[0] = r0;
    for (int k = 1; k <= g.bound(); ++k) {
        UnramifiedElement acc = UnramifiedElement::exact(g.context(), 0);
        for (int i = 1; i <= k; ++i)
            if (!is_exact_zero(g[i])) acc += g[i] * r[k - i];
        r[k] = -(r0 * acc);
    }
    return r;
}

/// A fixed point r != 0 of f: r^{q-1} = 1 + p, r = zeta * (1 + p)^{1/(q-1)}
/// with zeta the Teichmuller lift of the residue (r0, r1).
inline UnramifiedElement fixed_point(const PrimeContext& ctx, std::int64_t r0, std::int64_t r1) {
    const auto zeta = teichmuller(ctx, r0, r1);
    const auto one = UnramifiedElement::exact(ctx, 1);
    const auto target = UnramifiedElement::exact(ctx, static_cast<std::int64_t>(ctx.p) + 1);
    const auto e = UnramifiedElement::exact(ctx, static_cast<std::int64_t>(ctx.q) - 1);
    UnramifiedElement c = one;
    for (int it = 0; it < 2 * ctx.cap; ++it) {
        const auto cm = c.pow(ctx.q - 2);
        const auto next = c - (cm * c - target) * (e * cm).inverse();
        if (next == c) break;
        c = next;
    }
    return zeta * c;
}

/// One factor h([w]X)^e of a Coleman series, with h either
/// f_b(X) = [b](X)/X or X - r for a fixed point r of f.  Both give
/// norm-coherent units h([w]v_n).
struct ColemanFactor {
    enum class Kind { TorsionRatio, FixedPoint };
    Kind kind = Kind::TorsionRatio;
    UnramifiedElement b; // [b](X)/X, or the fixed point r
    UnramifiedElement w; // unit
    int e = 1;

    static ColemanFactor ratio(const UnramifiedElement& b, int e = 1) {
        return {Kind::TorsionRatio, b, UnramifiedElement::exact(b.context(), 1), e};
    }
    static ColemanFactor linear(const UnramifiedElement& r, int e = 1) {
        return {Kind::FixedPoint, r, UnramifiedElement::exact(r.context(), 1), e};
    }
};

class ColemanDatum {
public:
    static ColemanDatum from_series(const FormalGroup& fg, Series f, UnramifiedElement a) {
        if (!f[0].is_unit()) throw InvalidArgument("Coleman series must have a unit constant term");
        ColemanDatum x;
        x.fg_ = &fg;
        x.f_ = std::move(f);
        x.a_ = std::move(a);
        return x;
    }

    /// f = prod h_i([w_i]X)^{e_i}, kept to degree D - 1.
    static ColemanDatum from_factors(const FormalGroup& fg, std::vector<ColemanFactor> factors,
                                     UnramifiedElement a, int D = 0) {
        if (D <= 0) D = fg.bound();
        const PrimeContext& ctx = fg.context();
        ColemanDatum x;
        x.fg_ = &fg;
        x.a_ = std::move(a);
        x.f_ = Series::constant(ctx, D - 1, UnramifiedElement::exact(ctx, 1));
        for (const auto& fac : factors) {
            if (!fac.w.is_unit()) throw InvalidArgument("Coleman factor needs a unit twist");
            if (fac.e == 0) continue;
            Series h(ctx, D - 1);
            if (fac.kind == ColemanFactor::Kind::TorsionRatio) {
                if (!fac.b.is_unit()) throw InvalidArgument("[b](X)/X needs a unit b");
                h = coleman_unit(fg, fac.b, D);
            } else {
                if (!fac.b.is_unit()) throw InvalidArgument("X - r needs a unit r");
                h[0] = -fac.b;
                h[1] = UnramifiedElement::exact(ctx, 1);
            }
            if (!(fac.w == UnramifiedElement::exact(ctx, 1))) h = h.compose(fg.mult_by(fac.w, D - 1));
            if (fac.e < 0) h = series_unit_inverse(h);
            for (int i = 0; i < std::abs(fac.e); ++i) x.f_ = x.f_ * h;
        }
        x.factors_ = std::move(factors);
        x.structured_ = true;
        return x;
    }

    const FormalGroup& formal_group() const { return *fg_; }
    const Series& series() const noexcept { return f_; }
    const UnramifiedElement& a() const noexcept { return a_; }
    bool structured() const noexcept { return structured_; }
    const std::vector<ColemanFactor>& factors() const noexcept { return factors_; }

    /// x^sigma for sigma = kappa^{-1}(u): f -> f o [u^{-1}], a -> u a.
    ColemanDatum twist(const UnramifiedElement& u) const {
        if (!u.is_unit()) throw InvalidArgument("twist needs a unit");
        const UnramifiedElement uinv = u.inverse();
        ColemanDatum r = *this;
        r.a_ = u * a_;
        r.f_ = f_.compose(fg_->mult_by(uinv, f_.bound()));
        for (auto& fac : r.factors_) fac.w = fac.w * uinv;
        return r;
    }

private:
    const FormalGroup* fg_ = nullptr;
    Series f_;
    UnramifiedElement a_;
    std::vector<ColemanFactor> factors_;
    bool structured_ = false;
};

/// delta(x) = a f'(0)/f(0).
inline UnramifiedElement delta(const ColemanDatum& x) {
    const Series& f = x.series();
    const UnramifiedElement f1 = f.bound() >= 1 ? f[1] : UnramifiedElement::exact(f.context(), 0);
    return x.a() * f1 * f[0].inverse();
}

/// lambda'(Y) for Y a primitive pi^{n+1}-torsion point of level n:
/// lambda'(X) = (1 - p X^{q-1}) lambda'(f(X)) and f^{(n+1)}(Y) = 0.
inline TowerElement lambda_prime_at_torsion(const TowerElement& Y) {
    const TowerLevel& L = Y.level();
    const auto& ctx = L.context();
    const unsigned q1 = static_cast<unsigned>(ctx.q - 1);
    const Polynomial f = Polynomial::from_series(L.formal_group().distinguished());
    const TowerElement one = TowerElement::constant(Y.level_ptr(), 1);
    TowerElement prod = one;
    TowerElement z = Y;
    for (int i = 0; i <= L.n(); ++i) {
        prod = prod * (one - z.pow(q1).scale_p(1));
        z = evaluate(f, z);
    }
    if (!z.is_zero()) throw InvalidArgument("point is not pi^{n+1}-torsion");
    return prod;
}

namespace detail {

inline TowerElement G_at(const TowerElement& Y) { return (Y * lambda_prime_at_torsion(Y)).inverse(); }

} // namespace detail

/// delta_n(x) = (a / lambda'(v_n)) f'(v_n)/f(v_n), from the factorization.
/// A factor h([w]X) contributes w h'(Y)/(h(Y) lambda'(Y)) at Y = [w]v_n.
inline TowerElement delta_n(const ColemanDatum& x, const LevelPtr& L) {
    if (!x.structured()) throw InvalidArgument("delta_n needs a factored datum; use delta_n_series");
    const PrimeContext& ctx = L->context();
    TowerElement s(L);
    for (const auto& fac : x.factors()) {
        if (fac.e == 0) continue;
        const TowerElement Y = L->torsion_image(fac.w);
        TowerElement term(L);
        if (fac.kind == ColemanFactor::Kind::TorsionRatio) {
            term = fac.b * detail::G_at(L->torsion_image(fac.b * fac.w)) - detail::G_at(Y);
        } else {
            const TowerElement h = Y - TowerElement::constant(L, fac.b);
            term = (h * lambda_prime_at_torsion(Y)).inverse();
        }
        s += (UnramifiedElement::exact(ctx, fac.e) * fac.w) * term;
    }
    return x.a() * s;
}

/// Series route: evaluates f, f' and lambda' at v_n.  Precision is limited
/// by the truncation degree.
inline TowerElement delta_n_series(const ColemanDatum& x, const LevelPtr& L) {
    const TowerElement v = TowerElement::uniformizer(L);
    const Series& f = x.series();
    const TowerElement fv = evaluate(f, v);
    const TowerElement dfv = evaluate(f.derivative(), v);
    const TowerElement lp = evaluate(x.formal_group().log_derivative(), v);
    return x.a() * (dfv * (fv * lp).inverse());
}

/// S_k = sum of sigma_u(z) over the units u in coset k of H_n.
inline std::vector<TowerElement> coset_sums(const TowerLevel& L, const TowerElement& z) {
    std::vector<TowerElement> S(static_cast<std::size_t>(L.quotient_order()), TowerElement(z.level_ptr()));
    for (int i = 0; i < static_cast<int>(L.units().size()); ++i) S[L.coset_index(i)] += L.galois_act_index(i, z);
    return S;
}

namespace detail {

/// pi^{-k} as an element of the fraction field.
inline FieldElement pi_power_inverse(const PrimeContext& ctx, int k) {
    return FieldElement(UnramifiedElement::exact(ctx, k % 2 == 0 ? 1 : -1), k);
}

inline CyclotomicElement character_sum(const LevelPtr& L, const AnticyclotomicCharacter& chi,
                                       const std::vector<TowerElement>& S, int sign) {
    CyclotomicElement r(L, L->n());
    for (int k = 0; k < static_cast<int>(S.size()); ++k) r.add_monomial(S[k], sign * chi.exponent(k));
    return r;
}

} // namespace detail

/// delta_chi(x) = pi^{-(n+1)} sum over Gal(Phi_n/Phi) of chi(g) delta_n(x)^g.
inline CyclotomicElement delta_chi(const TowerElement& dn, const AnticyclotomicCharacter& chi) {
    const LevelPtr& L = dn.level_ptr();
    if (chi.n != L->n()) throw InvalidArgument("character and level differ");
    const auto S = coset_sums(*L, dn);
    return detail::pi_power_inverse(L->context(), L->n() + 1) * detail::character_sum(L, chi, S, 1);
}

inline CyclotomicElement delta_chi(const ColemanDatum& x, const AnticyclotomicCharacter& chi, const LevelPtr& L) {
    return delta_chi(delta_n(x, L), chi);
}

/// The same sum taken through Psi_n: first the H_n-trace, then the cosets.
inline CyclotomicElement delta_chi_psi(const TowerElement& dn, const AnticyclotomicCharacter& chi) {
    const LevelPtr& L = dn.level_ptr();
    if (chi.n != L->n()) throw InvalidArgument("character and level differ");
    TowerElement t(L);
    for (int h : L->H_indices()) t += L->galois_act_index(h, dn);
    std::vector<TowerElement> S;
    for (int rep : L->coset_representatives()) S.push_back(L->galois_act_index(rep, t));
    return detail::pi_power_inverse(L->context(), L->n() + 1) * detail::character_sum(L, chi, S, 1);
}

} // namespace ltkit
