#pragma once
// Elliptic curves over small finite fields by exhaustive enumeration:
// point counts, group structure, scalar Frobenius, automorphisms found by
// searching Weierstrass substitutions, and Aut-orbits of cyclic subgroups.

#include <ltkit/errors.hpp>
#include <ltkit/modular.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace ltkit {

/// F_{p^k} with elements 0..q-1 (base-p digits are polynomial coefficients)
/// and log tables for a primitive modulus.
class FiniteField {
public:
    using Elt = std::uint32_t;
    static constexpr std::uint64_t budget = std::uint64_t{1} << 20;

    FiniteField(std::uint32_t p, int k) : p_(p), k_(k) {
        if (!is_small_prime(p)) throw InvalidArgument("field characteristic must be prime");
        if (k < 1) throw InvalidArgument("field degree must be positive");
        q_ = 1;
        for (int i = 0; i < k; ++i) {
            q_ *= p;
            if (q_ > budget) throw ResourceLimit("field size exceeds the enumeration budget");
        }
        pw_.assign(static_cast<std::size_t>(k + 1), 1);
        for (int i = 1; i <= k; ++i) pw_[i] = pw_[i - 1] * p;
        find_primitive_modulus();
    }

    std::uint32_t p() const noexcept { return p_; }
    int degree() const noexcept { return k_; }
    std::uint64_t size() const noexcept { return q_; }
    const std::vector<std::uint32_t>& modulus() const noexcept { return mod_; }

    Elt from_int(std::int64_t n) const {
        const std::int64_t m = ((n % static_cast<std::int64_t>(p_)) + p_) % p_;
        return static_cast<Elt>(m);
    }
    Elt zero() const noexcept { return 0; }
    Elt one() const noexcept { return 1; }
    /// The primitive element X.
    Elt generator() const noexcept { return k_ == 1 ? exp_[1] : p_; }

    Elt add(Elt a, Elt b) const {
        if (k_ == 1) return static_cast<Elt>((a + b) % p_);
        Elt r = 0;
        for (int i = 0; i < k_; ++i) r += static_cast<Elt>(((a / pw_[i] % p_) + (b / pw_[i] % p_)) % p_ * pw_[i]);
        return r;
    }
    Elt neg(Elt a) const {
        Elt r = 0;
        for (int i = 0; i < k_; ++i) r += static_cast<Elt>((p_ - a / pw_[i] % p_) % p_ * pw_[i]);
        return r;
    }
    Elt sub(Elt a, Elt b) const { return add(a, neg(b)); }
    Elt mul(Elt a, Elt b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[log_[a] + log_[b]];
    }
    Elt inv(Elt a) const {
        if (a == 0) throw InvalidArgument("inverse of zero");
        return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
    }
    Elt div(Elt a, Elt b) const { return mul(a, inv(b)); }
    Elt pow(Elt a, std::uint64_t e) const {
        if (e == 0) return 1;
        if (a == 0) return 0;
        return exp_[static_cast<std::size_t>((static_cast<unsigned __int128>(log_[a]) * e) % (q_ - 1))];
    }
    bool is_square(Elt a) const { return a == 0 || p_ == 2 || log_[a] % 2 == 0; }
    /// A square root of a square (odd characteristic).
    Elt sqrt(Elt a) const {
        if (a == 0) return 0;
        if (p_ == 2) return pow(a, q_ / 2);
        if (log_[a] % 2 != 0) throw InvalidArgument("not a square");
        return exp_[log_[a] / 2];
    }
    /// Elements x with x^Q = x, i.e. the subfield of order Q.
    std::vector<Elt> subfield(std::uint64_t Q) const {
        std::uint64_t t = 1;
        int e = 0;
        while (t < Q) {
            t *= p_;
            ++e;
        }
        if (t != Q || k_ % e != 0) throw InvalidArgument("no subfield of order " + std::to_string(Q));
        std::vector<Elt> out;
        for (Elt x = 0; x < q_; ++x)
            if (pow(x, Q) == x) out.push_back(x);
        return out;
    }
    std::string to_string(Elt a) const {
        if (k_ == 1) return std::to_string(a);
        std::string s;
        for (int i = k_ - 1; i >= 0; --i) {
            const Elt c = a / pw_[i] % p_;
            if (c == 0) continue;
            if (!s.empty()) s += "+";
            std::string mono = i == 0 ? "" : (i == 1 ? "X" : "X^" + std::to_string(i));
            s += (c != 1 || i == 0 ? std::to_string(c) + (i ? "*" : "") : "") + mono;
        }
        return s.empty() ? "0" : s;
    }

private:
    static bool is_small_prime(std::uint32_t p) {
        if (p < 2) return false;
        for (std::uint32_t d = 2; d * d <= p; ++d)
            if (p % d == 0) return false;
        return true;
    }

    // multiply by X modulo the candidate modulus (monic, coefficients mod_)
    Elt times_x(Elt a, const std::vector<std::uint32_t>& m) const {
        const std::uint32_t top = a / pw_[k_ - 1] % p_;
        Elt shifted = (a % pw_[k_ - 1]) * p_;
        if (top == 0) return shifted;
        Elt r = 0;
        for (int i = 0; i < k_; ++i) {
            const std::uint32_t c = (shifted / pw_[i] % p_ + (p_ - top) * m[i] % p_) % p_;
            r += c * pw_[i];
        }
        return r;
    }

    void find_primitive_modulus() {
        exp_.assign(static_cast<std::size_t>(2 * q_), 0);
        log_.assign(static_cast<std::size_t>(q_), 0);
        if (k_ == 1) {
            for (std::uint32_t g = 1; g < p_; ++g) {
                std::uint64_t x = g, ord = 1;
                for (; x != 1; ++ord) x = x * g % p_;
                if (ord != q_ - 1) continue;
                fill_tables([&](Elt a) { return static_cast<Elt>(a * g % p_); });
                mod_ = {static_cast<std::uint32_t>((p_ - g) % p_)};
                return;
            }
            throw IdentityViolation("no primitive root");
        }
        std::vector<std::uint32_t> m(static_cast<std::size_t>(k_), 0);
        for (std::uint64_t code = 0; code < q_; ++code) {
            for (int i = 0; i < k_; ++i) m[i] = static_cast<std::uint32_t>(code / pw_[i] % p_);
            if (m[0] == 0) continue;
            // X has order q - 1 iff the walk 1, X, X^2, ... first returns to 1 after q - 1 steps
            Elt x = 1;
            std::uint64_t ord = 0;
            do {
                x = times_x(x, m);
                ++ord;
            } while (x != 1 && ord < q_);
            if (ord != q_ - 1) continue;
            mod_ = m;
            fill_tables([&](Elt a) { return times_x(a, m); });
            return;
        }
        throw IdentityViolation("no primitive modulus found");
    }

    template <class Step>
    void fill_tables(Step step) {
        Elt x = 1;
        for (std::uint64_t i = 0; i < q_ - 1; ++i) {
            exp_[i] = x;
            log_[x] = static_cast<std::uint32_t>(i);
            x = step(x);
        }
        for (std::uint64_t i = q_ - 1; i < 2 * q_; ++i) exp_[i] = exp_[i - (q_ - 1)];
    }

    std::uint32_t p_;
    int k_;
    std::uint64_t q_ = 1;
    std::vector<std::uint32_t> pw_;
    std::vector<std::uint32_t> mod_; // X^k = -sum mod_[i] X^i
    std::vector<Elt> exp_;
    std::vector<std::uint32_t> log_;
};

struct ECPoint {
    std::int64_t x = -1; // x < 0 is the point at infinity
    std::int64_t y = -1;
    bool infinity() const noexcept { return x < 0; }
    friend bool operator==(const ECPoint& a, const ECPoint& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator<(const ECPoint& a, const ECPoint& b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); }
};

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over a finite field.
class EllipticCurve {
public:
    using Elt = FiniteField::Elt;

    /// Coefficients [a1, a2, a3, a4, a6] given as integers.
    EllipticCurve(const FiniteField& F, const std::array<std::int64_t, 5>& a) : F_(&F), ints_(a) {
        for (int i = 0; i < 5; ++i) a_[i] = F.from_int(a[i]);
        if (discriminant() == 0) throw InvalidArgument("singular curve");
    }

    const FiniteField& field() const noexcept { return *F_; }
    const std::array<std::int64_t, 5>& integer_coefficients() const noexcept { return ints_; }
    Elt a1() const { return a_[0]; }
    Elt a2() const { return a_[1]; }
    Elt a3() const { return a_[2]; }
    Elt a4() const { return a_[3]; }
    Elt a6() const { return a_[4]; }

    Elt discriminant() const {
        const auto& F = *F_;
        const Elt b2 = F.add(F.mul(a1(), a1()), F.mul(F.from_int(4), a2()));
        const Elt b4 = F.add(F.mul(F.from_int(2), a4()), F.mul(a1(), a3()));
        const Elt b6 = F.add(F.mul(a3(), a3()), F.mul(F.from_int(4), a6()));
        const Elt b8 = F.sub(F.add(F.add(F.mul(F.mul(a1(), a1()), a6()), F.mul(F.from_int(4), F.mul(a2(), a6()))),
                                   F.mul(a2(), F.mul(a3(), a3()))),
                             F.add(F.mul(a1(), F.mul(a3(), a4())), F.mul(a4(), a4())));
        Elt d = F.neg(F.mul(F.mul(b2, b2), b8));
        d = F.sub(d, F.mul(F.from_int(8), F.mul(b4, F.mul(b4, b4))));
        d = F.sub(d, F.mul(F.from_int(27), F.mul(b6, b6)));
        d = F.add(d, F.mul(F.from_int(9), F.mul(b2, F.mul(b4, b6))));
        return d;
    }
    Elt j_invariant() const {
        const auto& F = *F_;
        const Elt b2 = F.add(F.mul(a1(), a1()), F.mul(F.from_int(4), a2()));
        const Elt b4 = F.add(F.mul(F.from_int(2), a4()), F.mul(a1(), a3()));
        const Elt c4 = F.sub(F.mul(b2, b2), F.mul(F.from_int(24), b4));
        return F.div(F.mul(c4, F.mul(c4, c4)), discriminant());
    }

    bool on_curve(const ECPoint& P) const {
        if (P.infinity()) return true;
        const Elt x = static_cast<Elt>(P.x), y = static_cast<Elt>(P.y);
        return lhs(x, y) == rhs(x);
    }

    ECPoint neg(const ECPoint& P) const {
        if (P.infinity()) return P;
        const auto& F = *F_;
        const Elt x = static_cast<Elt>(P.x), y = static_cast<Elt>(P.y);
        return {P.x, F.sub(F.neg(y), F.add(F.mul(a1(), x), a3()))};
    }
    ECPoint add(const ECPoint& P, const ECPoint& Q) const {
        if (P.infinity()) return Q;
        if (Q.infinity()) return P;
        const auto& F = *F_;
        const Elt x1 = static_cast<Elt>(P.x), y1 = static_cast<Elt>(P.y), x2 = static_cast<Elt>(Q.x), y2 = static_cast<Elt>(Q.y);
        Elt lam, nu;
        if (x1 == x2) {
            const Elt den = F.add(F.add(F.add(y1, y2), F.mul(a1(), x2)), a3());
            if (den == 0) return {};
            // tangent: den = 2 y1 + a1 x1 + a3
            const Elt num = F.sub(F.add(F.add(F.mul(F.from_int(3), F.mul(x1, x1)), F.mul(F.from_int(2), F.mul(a2(), x1))), a4()),
                                  F.mul(a1(), y1));
            const Elt num2 = F.sub(F.add(F.add(F.neg(F.mul(x1, F.mul(x1, x1))), F.mul(a4(), x1)), F.mul(F.from_int(2), a6())),
                                   F.mul(a3(), y1));
            lam = F.div(num, den);
            nu = F.div(num2, den);
        } else {
            const Elt dx = F.sub(x2, x1);
            lam = F.div(F.sub(y2, y1), dx);
            nu = F.div(F.sub(F.mul(y1, x2), F.mul(y2, x1)), dx);
        }
        const Elt x3 = F.sub(F.sub(F.sub(F.add(F.mul(lam, lam), F.mul(a1(), lam)), a2()), x1), x2);
        const Elt y3 = F.sub(F.sub(F.neg(F.mul(F.add(lam, a1()), x3)), nu), a3());
        return {x3, y3};
    }
    ECPoint mul(std::int64_t n, const ECPoint& P) const {
        if (n < 0) return mul(-n, neg(P));
        ECPoint r, b = P;
        for (; n; n >>= 1) {
            if (n & 1) r = add(r, b);
            b = add(b, b);
        }
        return r;
    }
    /// Frobenius (x, y) -> (x^Q, y^Q).
    ECPoint frobenius(const ECPoint& P, std::uint64_t Q) const {
        if (P.infinity()) return P;
        return {F_->pow(static_cast<Elt>(P.x), Q), F_->pow(static_cast<Elt>(P.y), Q)};
    }

    /// All points, O first, then by (x, y).
    std::vector<ECPoint> points() const {
        std::vector<ECPoint> out{ECPoint{}};
        const auto& F = *F_;
        for (Elt x = 0; x < F.size(); ++x) {
            const Elt b = F.add(F.mul(a1(), x), a3());
            const Elt c = rhs(x);
            if (F.p() == 2) {
                for (Elt y = 0; y < F.size(); ++y)
                    if (lhs(x, y) == c) out.push_back({x, y});
                continue;
            }
            // (2y + b)^2 = b^2 + 4c
            const Elt D = F.add(F.mul(b, b), F.mul(F.from_int(4), c));
            if (!F.is_square(D)) continue;
            const Elt s = F.sqrt(D), inv2 = F.inv(F.from_int(2));
            std::set<Elt> ys{F.mul(F.sub(s, b), inv2), F.mul(F.sub(F.neg(s), b), inv2)};
            for (Elt y : ys) out.push_back({x, y});
        }
        return out;
    }

    /// Order of a point dividing n.
    std::uint64_t point_order(const ECPoint& P, std::uint64_t n) const {
        if (!mul(static_cast<std::int64_t>(n), P).infinity()) throw IdentityViolation("point order does not divide the group order");
        std::uint64_t o = n;
        for (const auto& [l, e] : factorize(n))
            while (o % l == 0 && mul(static_cast<std::int64_t>(o / l), P).infinity()) o /= l;
        return o;
    }

private:
    Elt lhs(Elt x, Elt y) const {
        const auto& F = *F_;
        return F.add(F.mul(y, y), F.mul(y, F.add(F.mul(a1(), x), a3())));
    }
    Elt rhs(Elt x) const {
        const auto& F = *F_;
        return F.add(F.mul(F.add(F.mul(F.add(x, a2()), x), a4()), x), a6());
    }

    const FiniteField* F_;
    std::array<std::int64_t, 5> ints_;
    std::array<Elt, 5> a_{};
};

struct PointCount {
    std::uint64_t q = 0;
    std::uint64_t points = 0;
    std::int64_t trace = 0; // a_q = q + 1 - #E
};

/// #E(F_q) by x-enumeration.
inline PointCount count_points(const EllipticCurve& E) {
    const auto& F = E.field();
    std::uint64_t n = 1;
    for (FiniteField::Elt x = 0; x < F.size(); ++x) {
        if (F.p() == 2) {
            for (FiniteField::Elt y = 0; y < F.size(); ++y)
                if (E.on_curve({x, y})) ++n;
            continue;
        }
        const auto b = F.add(F.mul(E.a1(), x), E.a3());
        const auto c = F.add(F.mul(F.add(F.mul(F.add(x, E.a2()), x), E.a4()), x), E.a6());
        const auto D = F.add(F.mul(b, b), F.mul(F.from_int(4), c));
        n += D == 0 ? 1 : (F.is_square(D) ? 2 : 0);
    }
    return {F.size(), n, static_cast<std::int64_t>(F.size()) + 1 - static_cast<std::int64_t>(n)};
}

struct GroupStructure {
    std::uint64_t d1 = 1, d2 = 1; // E = Z/d1 x Z/d2, d1 | d2
};

/// Invariant factors: d2 is the exponent, d1 = #E / d2.
inline GroupStructure group_structure(const EllipticCurve& E) {
    const auto pts = E.points();
    const std::uint64_t n = pts.size();
    std::uint64_t expo = 1;
    for (const auto& P : pts) expo = std::lcm(expo, E.point_order(P, n));
    GroupStructure g{n / expo, expo};
    if (g.d2 % g.d1 != 0) throw IdentityViolation("invariant factors do not divide");
    return g;
}

struct FrobeniusVerdict {
    std::int64_t a_q = 0;        // trace over F_{p^2}
    std::int64_t scalar = 0;     // a_q / 2
    std::vector<int> degrees;    // k with E(F_{q^k}) checked
    std::vector<std::uint64_t> points_checked;
    bool holds = true;
};

/// With a_q = +-2p over F_q, q = p^2, Frobenius is the scalar a_q/2: checks
/// phi(P) = [a_q/2] P on E(F_{q^k}).  The curve has coefficients in F_p.
inline FrobeniusVerdict scalar_frobenius_check(std::uint32_t p, const std::array<std::int64_t, 5>& a, const std::vector<int>& ks) {
    FiniteField Fq(p, 2);
    const EllipticCurve Eq(Fq, a);
    FrobeniusVerdict v;
    v.a_q = count_points(Eq).trace;
    if (v.a_q != 2 * static_cast<std::int64_t>(p) && v.a_q != -2 * static_cast<std::int64_t>(p))
        throw InvalidArgument("a_q = " + std::to_string(v.a_q) + " is not +-2p");
    v.scalar = v.a_q / 2;
    for (int k : ks) {
        FiniteField F(p, 2 * k);
        const EllipticCurve E(F, a);
        const auto pts = E.points();
        for (const auto& P : pts)
            if (!(E.frobenius(P, Fq.size()) == E.mul(v.scalar, P))) v.holds = false;
        v.degrees.push_back(k);
        v.points_checked.push_back(pts.size());
    }
    return v;
}

/// (x, y) -> (u^2 x + r, u^3 y + u^2 s x + t).
struct WeierstrassSubstitution {
    FiniteField::Elt u = 1, r = 0, s = 0, t = 0;
    friend bool operator==(const WeierstrassSubstitution& a, const WeierstrassSubstitution& b) {
        return a.u == b.u && a.r == b.r && a.s == b.s && a.t == b.t;
    }
};

class AutomorphismGroup {
public:
    AutomorphismGroup(const EllipticCurve& E, std::vector<WeierstrassSubstitution> elts) : E_(&E), g_(std::move(elts)) {
        const std::size_t n = g_.size();
        table_.assign(n, std::vector<int>(n, -1));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const auto c = compose(g_[i], g_[j]);
                const auto it = std::find(g_.begin(), g_.end(), c);
                if (it == g_.end()) throw IdentityViolation("automorphisms are not closed under composition");
                table_[i][j] = static_cast<int>(it - g_.begin());
            }
        const auto& F = E.field();
        identity_ = index_of({1, 0, 0, 0});
        minus_one_ = index_of({F.neg(1), 0, F.neg(E.a1()), F.neg(E.a3())});
        if (identity_ < 0 || minus_one_ < 0) throw IdentityViolation("automorphism group lacks +-1");
    }

    std::size_t order() const noexcept { return g_.size(); }
    const std::vector<WeierstrassSubstitution>& elements() const noexcept { return g_; }
    /// table[i][j] = index of g_i o g_j.
    const std::vector<std::vector<int>>& table() const noexcept { return table_; }
    int identity() const noexcept { return identity_; }
    int minus_one() const noexcept { return minus_one_; }

    int element_order(int i) const {
        int k = 1, x = i;
        while (x != identity_) {
            x = table_[x][i];
            ++k;
        }
        return k;
    }

    /// g_i o g_j as substitutions: apply g_j, then g_i.
    WeierstrassSubstitution compose(const WeierstrassSubstitution& a, const WeierstrassSubstitution& b) const {
        const auto& F = E_->field();
        const auto u2 = F.mul(a.u, a.u);
        return {F.mul(a.u, b.u), F.add(a.r, F.mul(u2, b.r)), F.add(a.s, F.mul(a.u, b.s)),
                F.add(F.add(a.t, F.mul(F.mul(u2, a.u), b.t)), F.mul(u2, F.mul(a.s, b.r)))};
    }

    ECPoint act(int i, const ECPoint& P) const {
        if (P.infinity()) return P;
        const auto& F = E_->field();
        const auto& g = g_[static_cast<std::size_t>(i)];
        const auto x = static_cast<FiniteField::Elt>(P.x), y = static_cast<FiniteField::Elt>(P.y);
        const auto u2 = F.mul(g.u, g.u);
        return {F.add(F.mul(u2, x), g.r), F.add(F.add(F.mul(F.mul(u2, g.u), y), F.mul(F.mul(u2, g.s), x)), g.t)};
    }

private:
    int index_of(const WeierstrassSubstitution& w) const {
        const auto it = std::find(g_.begin(), g_.end(), w);
        return it == g_.end() ? -1 : static_cast<int>(it - g_.begin());
    }

    const EllipticCurve* E_;
    std::vector<WeierstrassSubstitution> g_;
    std::vector<std::vector<int>> table_;
    int identity_ = -1, minus_one_ = -1;
};

/// All substitutions with coefficients in the subfield of order Q that map
/// E to itself.  The search is pruned coefficient by coefficient:
///   u a1' = a1 + 2s
///   u^2 a2' = a2 - s a1 + 3r - s^2
///   u^3 a3' = a3 + r a1 + 2t
///   u^4 a4' = a4 - s a3 + 2r a2 - (t + rs) a1 + 3r^2 - 2st
///   u^6 a6' = a6 + r a4 + r^2 a2 + r^3 - t a3 - t^2 - rt a1
inline AutomorphismGroup automorphisms(const EllipticCurve& E, std::uint64_t Q) {
    const auto& F = E.field();
    const auto sub = F.subfield(Q);
    const auto a1 = E.a1(), a2 = E.a2(), a3 = E.a3(), a4 = E.a4(), a6 = E.a6();
    auto k = [&](std::int64_t n) { return F.from_int(n); };
    std::vector<WeierstrassSubstitution> found;
    for (auto u : sub) {
        if (u == 0) continue;
        const auto u2 = F.mul(u, u), u3 = F.mul(u2, u), u4 = F.mul(u2, u2), u6 = F.mul(u3, u3);
        for (auto s : sub) {
            if (F.mul(u, a1) != F.add(a1, F.mul(k(2), s))) continue;
            for (auto r : sub) {
                if (F.mul(u2, a2) != F.sub(F.add(F.sub(a2, F.mul(s, a1)), F.mul(k(3), r)), F.mul(s, s))) continue;
                for (auto t : sub) {
                    if (F.mul(u3, a3) != F.add(F.add(a3, F.mul(r, a1)), F.mul(k(2), t))) continue;
                    auto e4 = F.sub(a4, F.mul(s, a3));
                    e4 = F.add(e4, F.mul(k(2), F.mul(r, a2)));
                    e4 = F.sub(e4, F.mul(F.add(t, F.mul(r, s)), a1));
                    e4 = F.add(e4, F.mul(k(3), F.mul(r, r)));
                    e4 = F.sub(e4, F.mul(k(2), F.mul(s, t)));
                    if (F.mul(u4, a4) != e4) continue;
                    auto e6 = F.add(a6, F.mul(r, a4));
                    e6 = F.add(e6, F.mul(F.mul(r, r), a2));
                    e6 = F.add(e6, F.mul(r, F.mul(r, r)));
                    e6 = F.sub(e6, F.mul(t, a3));
                    e6 = F.sub(e6, F.mul(t, t));
                    e6 = F.sub(e6, F.mul(F.mul(r, t), a1));
                    if (F.mul(u6, a6) != e6) continue;
                    found.push_back({u, r, s, t});
                }
            }
        }
    }
    return AutomorphismGroup(E, std::move(found));
}

struct KernelRecord {
    int element = 0;
    int order = 0;            // order in Aut
    std::uint64_t ker_minus = 0; // #ker(g - 1)
    std::uint64_t ker_plus = 0;  // #ker(g + 1)
    std::uint64_t union_size = 0;
};

struct KernelBound {
    std::vector<KernelRecord> records;
    std::uint64_t bound = 0; // B = max union size
};

/// #(ker(g+1) u ker(g-1)) over E(F) for every g != +-1 whose image in
/// Aut/{+-1} has order 2 or 3.  For such g, |tr g| <= 1, so g -+ 1 has degree
/// at most 3 and the kernels lie in E[2] u E[3]; the field must contain the
/// prime-to-p part of that torsion.
inline KernelBound kernel_union_size(const EllipticCurve& E, const AutomorphismGroup& G) {
    const auto pts = E.points();
    const std::uint32_t p = E.field().p();
    for (std::uint64_t l : {2u, 3u}) {
        if (l == p) {
            if (count_points(E).trace % static_cast<std::int64_t>(p) != 0)
                throw ResourceLimit("p-torsion of an ordinary curve is not covered by enumeration");
            continue;
        }
        std::uint64_t c = 0;
        for (const auto& P : pts)
            if (E.mul(static_cast<std::int64_t>(l), P).infinity()) ++c;
        if (c != l * l)
            throw ResourceLimit("E[" + std::to_string(l) + "] is not rational over F_" + std::to_string(E.field().size()) +
                                "; enlarge the field");
    }
    KernelBound kb;
    for (int i = 0; i < static_cast<int>(G.order()); ++i) {
        if (i == G.identity() || i == G.minus_one()) continue;
        const int sq = G.table()[i][i], cu = G.table()[sq][i];
        const bool order2 = sq == G.identity() || sq == G.minus_one();
        const bool order3 = cu == G.identity() || cu == G.minus_one();
        if (!order2 && !order3) continue;
        KernelRecord r{i, G.element_order(i), 0, 0, 0};
        for (const auto& P : pts) {
            const ECPoint gP = G.act(i, P);
            const bool fixed = gP == P, negated = gP == E.neg(P);
            r.ker_minus += fixed;
            r.ker_plus += negated;
            r.union_size += fixed || negated;
        }
        kb.bound = std::max(kb.bound, r.union_size);
        kb.records.push_back(r);
    }
    return kb;
}

struct SubgroupOrbit {
    std::vector<std::size_t> members;  // indices into the subgroup list
    std::vector<int> stabilizer;       // Aut elements fixing the representative
    bool stabilizer_is_pm1 = false;
};

struct CyclicSubgroupReport {
    std::uint64_t N = 0;
    std::uint64_t mu = 0;                              // N prod (1 + 1/l)
    std::vector<std::vector<std::size_t>> subgroups;   // point indices
    std::vector<SubgroupOrbit> orbits;
    std::uint64_t aut_order = 0;
    bool count_matches = false;       // #subgroups = mu
    bool orbit_bound = false;         // 6 #orbits >= mu
    bool orbit_stabilizer = false;    // sum |Aut| / |Stab| = #subgroups
};

/// Cyclic subgroups of order N in E(F) and their Aut-orbits.  E[N] must be
/// rational over F.
inline CyclicSubgroupReport cyclic_subgroup_orbits(const EllipticCurve& E, const AutomorphismGroup& G, std::uint64_t N) {
    if (N < 1) throw InvalidArgument("N must be positive");
    if (N % E.field().p() == 0) throw InvalidArgument("N must be prime to p");
    const auto pts = E.points();
    const std::uint64_t n = pts.size();
    std::map<ECPoint, std::size_t> index;
    for (std::size_t i = 0; i < pts.size(); ++i) index[pts[i]] = i;
    std::uint64_t torsion = 0;
    for (const auto& P : pts)
        if (E.mul(static_cast<std::int64_t>(N), P).infinity()) ++torsion;
    if (torsion != N * N)
        throw ResourceLimit("E[" + std::to_string(N) + "] is not rational over F_" + std::to_string(E.field().size()));

    CyclicSubgroupReport rep;
    rep.N = N;
    rep.mu = degree_mu(N);
    rep.aut_order = G.order();
    std::map<std::vector<std::size_t>, std::size_t> ids;
    for (const auto& P : pts) {
        if (n % N != 0 || E.point_order(P, n) != N) continue;
        std::vector<std::size_t> S;
        ECPoint Q;
        for (std::uint64_t k = 0; k < N; ++k) {
            S.push_back(index.at(Q));
            Q = E.add(Q, P);
        }
        std::sort(S.begin(), S.end());
        if (!ids.count(S)) {
            ids[S] = rep.subgroups.size();
            rep.subgroups.push_back(S);
        }
    }
    auto image = [&](int g, const std::vector<std::size_t>& S) {
        std::vector<std::size_t> T;
        for (auto i : S) T.push_back(index.at(G.act(g, pts[i])));
        std::sort(T.begin(), T.end());
        return ids.at(T);
    };
    std::vector<int> orbit_of(rep.subgroups.size(), -1);
    std::uint64_t total = 0;
    for (std::size_t s = 0; s < rep.subgroups.size(); ++s) {
        if (orbit_of[s] >= 0) continue;
        SubgroupOrbit o;
        std::set<std::size_t> mem;
        for (int g = 0; g < static_cast<int>(G.order()); ++g) {
            const std::size_t t = image(g, rep.subgroups[s]);
            mem.insert(t);
            if (t == s) o.stabilizer.push_back(g);
        }
        o.members.assign(mem.begin(), mem.end());
        for (auto t : mem) orbit_of[t] = static_cast<int>(rep.orbits.size());
        o.stabilizer_is_pm1 = o.stabilizer.size() == 2;
        total += G.order() / o.stabilizer.size();
        rep.orbits.push_back(o);
    }
    rep.count_matches = rep.subgroups.size() == rep.mu;
    rep.orbit_bound = 6 * rep.orbits.size() >= rep.mu;
    rep.orbit_stabilizer = total == rep.subgroups.size();
    return rep;
}

} // namespace ltkit
