#pragma once
// Formal logarithms of tower points, the character projections lambda_chi,
// A+/- membership at finite level and the explicit Kummer pairing.
//
// lambda_chi(y) = p^{-n} sum_{g in Gal(Psi_n/Phi)} chi^{-1}(g) lambda(y)^g.
// The p^{-n} factor makes lambda_chi independent of the level y is viewed
// at, and gives lambda = sum_chi lambda_chi.

#include <ltkit/characters.hpp>
#include <ltkit/coates_wiles.hpp>
#include <ltkit/lubin_tate.hpp>
#include <ltkit/tower.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace ltkit {

namespace detail {

/// floor(log_q j).
inline int floor_log(std::uint64_t q, std::uint64_t j) {
    int k = 0;
    for (std::uint64_t t = q; t <= j; t *= q) ++k;
    return k;
}

/// Lower bound (in 1/d units) for the tail sum_{j > D} lambda_j y^j when
/// v(y) = vy units, using v(lambda_j) >= -floor(log_q j).
inline long long log_tail_bound(std::uint64_t q, int D, int d, int vy) {
    long long best = -1;
    // j v - d log_q j is increasing once j v grows faster than the log;
    // scanning a generous window of j is enough
    for (long long j = D + 1; j <= 64LL * (D + 1); ++j) {
        const long long t = j * vy - static_cast<long long>(d) * floor_log(q, static_cast<std::uint64_t>(j));
        if (best < 0 || t < best) best = t;
    }
    return best;
}

inline TowerElement evaluate_field_series(const FieldSeries& g, const TowerElement& x) {
    const LevelPtr& L = x.level_ptr();
    const int D = g.bound();
    TowerElement r = TowerElement::constant(L, g[D]);
    for (int k = D - 1; k >= 0; --k) r = r * x + TowerElement::constant(L, g[k]);
    return r;
}

} // namespace detail

/// lambda(y) for y of positive valuation.  f is applied until the truncated
/// logarithm converges to working precision, then lambda(y) = pi^{-k} lambda(f^{(k)}(y)).
inline TowerElement formal_log(const FormalGroup& fg, const TowerElement& y) {
    const LevelPtr& L = y.level_ptr();
    if (y.is_zero()) return TowerElement(L);
    if (y.valuation().value <= 0) throw InvalidArgument("formal_log needs a point of positive valuation");
    const FieldSeries& lam = fg.logarithm();
    const Polynomial f = Polynomial::from_series(fg.distinguished());
    const int d = L->degree();
    const long long target = static_cast<long long>(d) * L->working_digits();
    TowerElement z = y;
    int k = 0;
    for (;; ++k) {
        if (z.is_zero()) return TowerElement(L); // y is torsion
        const int vz = z.valuation().value;
        if (vz <= 0) throw IdentityViolation("iterate of a point left the maximal ideal");
        const long long tail = detail::log_tail_bound(L->context().q, lam.bound(), d, vz);
        if (tail >= target || tail >= z.precision_units() + d * k) break;
        if (k > 4 * L->working_digits()) throw PrecisionShortfall("formal_log", static_cast<int>(tail), static_cast<int>(target));
        z = evaluate(f, z);
    }
    const long long tail = detail::log_tail_bound(L->context().q, lam.bound(), d, z.valuation().value);
    TowerElement r = detail::evaluate_field_series(lam, z);
    r = r.with_precision_units(static_cast<int>(std::min<long long>(tail, r.precision_units())));
    return detail::pi_power_inverse(L->context(), k) * r;
}

/// F(x, y) with the truncated group law; precision is capped by the
/// truncation error (D + 1) * min(v(x), v(y)).
inline TowerElement formal_add(const FormalGroup& fg, const TowerElement& x, const TowerElement& y) {
    const LevelPtr& L = x.level_ptr();
    if (y.level_ptr() != L) throw ContextMismatch();
    if (x.is_zero()) return y;
    if (y.is_zero()) return x;
    const LawSeries& F = fg.law();
    const int D = F.bound();
    std::vector<TowerElement> ypow{TowerElement::constant(L, 1)};
    for (int j = 1; j <= D; ++j) ypow.push_back(ypow.back() * y);
    TowerElement r(L);
    for (int i = D; i >= 0; --i) {
        TowerElement inner(L);
        for (int j = 0; j <= D - i; ++j) {
            const auto& c = F.at(i, j);
            if (!c.is_zero()) inner += c * ypow[j];
        }
        r = r * x + inner;
    }
    const int v = std::min(x.valuation().value, y.valuation().value);
    return r.with_precision_units((D + 1) * v);
}

/// A point of F(Phi_n) with an optional certificate that it lies in F(Psi_n).
struct FormalPoint {
    TowerElement y;
    bool psi_fixed = false;

    static FormalPoint certify(const TowerElement& y) {
        const TowerLevel& L = y.level();
        if (!y.is_zero() && y.valuation().value <= 0) throw InvalidArgument("formal point needs positive valuation");
        for (int h : L.H_indices())
            if (!(L.galois_act_index(h, y) - y).is_zero()) return {y, false};
        return {y, true};
    }
};

/// sum_{h in H_n} sigma_h(z): a point of F(Psi_n) for v(z) > 0.
inline TowerElement psi_trace(const TowerElement& z) {
    const TowerLevel& L = z.level();
    TowerElement t(z.level_ptr());
    for (int h : L.H_indices()) t += L.galois_act_index(h, z);
    return t;
}

/// lambda_chi(y) for y in F(Psi_n), chi a character of Gal(Psi_n/Phi).
inline CyclotomicElement lambda_chi_from_log(const TowerElement& lam, const AnticyclotomicCharacter& chi) {
    const LevelPtr& L = lam.level_ptr();
    if (chi.n != L->n()) throw InvalidArgument("character and level differ");
    CyclotomicElement r(L, L->n());
    const auto& reps = L->coset_representatives();
    for (int k = 0; k < static_cast<int>(reps.size()); ++k)
        r.add_monomial(L->galois_act_index(reps[k], lam), -chi.exponent(k));
    return FieldElement(UnramifiedElement::exact(L->context(), 1), L->n()) * r;
}

inline CyclotomicElement lambda_chi(const FormalGroup& fg, const FormalPoint& y, const AnticyclotomicCharacter& chi) {
    if (!y.psi_fixed) throw InvalidArgument("lambda_chi needs a point certified in F(Psi_n)");
    return lambda_chi_from_log(formal_log(fg, y.y), chi);
}

/// N_{m/(m-1)} y: formal-group sum of the Gal(Psi_m/Psi_{m-1}) conjugates of
/// y, i.e. sigma_{gamma^{k p^{m-1}}}(y) for k < p.
inline TowerElement psi_norm_step(const FormalGroup& fg, const TowerElement& y) {
    const TowerLevel& L = y.level();
    if (L.n() == 0) throw InvalidArgument("no layer below level 0");
    const auto& reps = L.coset_representatives();
    const int step = L.quotient_order() / static_cast<int>(L.context().p);
    TowerElement s = y;
    for (int k = 1; k < static_cast<int>(L.context().p); ++k) s = formal_add(fg, s, L.galois_act_index(reps[k * step], y));
    return s;
}

/// Verdict of the finite-level A+/- test.
struct MembershipCertificate {
    bool even = true;                // tested parity class
    std::vector<int> characters;     // indices tested
    std::vector<CyclotomicElement> values;
    int precision_units = 0;         // smallest certified precision
    bool member = true;              // all tested values vanish to that precision
};

inline MembershipCertificate a_membership(const FormalGroup& fg, const FormalPoint& y, bool even) {
    MembershipCertificate c;
    c.even = even;
    const TowerElement lam = formal_log(fg, y.y);
    c.precision_units = lam.precision_units();
    for (const auto& chi : characters(y.y.level())) {
        if (chi.even() != even) continue;
        c.characters.push_back(chi.index);
        c.values.push_back(lambda_chi_from_log(lam, chi));
        c.precision_units = std::min(c.precision_units, c.values.back().precision_units());
        if (!c.values.back().is_zero()) c.member = false;
    }
    return c;
}

/// An element of Phi/O: a representative and the absolute precision it is
/// known to.
struct PairingValue {
    FieldElement value;

    bool integral() const { return value.valuation().value >= 0 || value.valuation().exact == false; }
    /// Equal in Phi/O.
    bool equals_mod_O(const PairingValue& o) const {
        const FieldElement d = value - o.value;
        if (d.abs_precision() < 0) throw PrecisionShortfall("pairing comparison", d.abs_precision(), 0);
        return PairingValue{d}.integral();
    }
    /// Canonical representative: numerator reduced modulo p^shift.
    std::string to_string() const {
        if (value.shift() <= 0) return "0";
        const auto& num = value.numerator();
        const std::uint64_t m = num.context().modulus(value.shift());
        return FieldElement(UnramifiedElement::from_residues(num.context(), num.a() % m, num.b() % m,
                                                             num.precision()),
                            value.shift())
            .to_string();
    }
};

namespace detail {

inline TowerElement lift_to(const TowerElement& x, const LevelPtr& target) {
    if (x.level_ptr() == target) return x;
    if (!target->lower()) throw InvalidArgument("target level is below the element");
    return target->embed(lift_to(x, target->lower()));
}

} // namespace detail

/// <y (x) pi^{-n}, x> = pi^{-1-m-n} Tr_{Phi_m/Phi}(delta_m(x) lambda(y)) mod O,
/// with y at level n <= m = Lm->n().
inline PairingValue kummer_pair(const FormalGroup& fg, const TowerElement& y, const ColemanDatum& x, const LevelPtr& Lm) {
    const int n = y.level().n();
    const int m = Lm->n();
    if (n > m) throw InvalidArgument("pairing level m must be at least the level of y");
    const TowerElement lam = detail::lift_to(formal_log(fg, y), Lm);
    const FieldElement tr = (delta_n(x, Lm) * lam).trace();
    return {detail::pi_power_inverse(Lm->context(), 1 + m + n) * tr};
}

/// Same pairing from a precomputed delta_m(x) and lambda(y) at level m.
inline PairingValue kummer_pair_from(const TowerElement& dm, const TowerElement& lam_m, int n) {
    const int m = dm.level().n();
    return {detail::pi_power_inverse(dm.level().context(), 1 + m + n) * (dm * lam_m).trace()};
}

/// sum_chi delta_chi(x) lambda_chi(y) over the characters of level n, which
/// lands in Phi.
inline FieldElement character_expansion(const TowerElement& dn, const TowerElement& lam) {
    const LevelPtr& L = dn.level_ptr();
    CyclotomicElement acc(L, L->n());
    for (const auto& chi : characters(*L)) acc += delta_chi(dn, chi) * lambda_chi_from_log(lam, chi);
    for (int i = 1; i < acc.rank(); ++i)
        if (!acc[i].is_zero()) throw IdentityViolation("character expansion has a nonconstant Z-part");
    return acc[0].to_base();
}

} // namespace ltkit
