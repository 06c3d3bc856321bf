#pragma once
// Index-p overlattices of T_s = p^{-s} Z_p t + T, T = O t, modeled inside
// p^{-k}T/T = (Z/p^k)^2 with coordinates (x, y) <-> p^{-k}(x t + y wt).
//
// The overlattices of T_s split as
//   TypeA(a): Z_p (1 + a p^s w) p^{-s-1} t + T,   a = 0..p-1,
//   TypeB:    p^{-s} Z_p t + p^{-1} T,
// and units 1 + c p^s w permute the TypeA lattices.

#include <ltkit/errors.hpp>
#include <ltkit/padic.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

namespace ltkit {

struct LatticeVec {
    std::int64_t x = 0;
    std::int64_t y = 0;
};

/// Subgroup of (Z/M)^2 stored as the Hermite form of its preimage in Z^2:
/// rows (a, b), (0, d) with a, d | M and 0 <= b < d.
class Subgroup {
public:
    explicit Subgroup(std::int64_t M = 1) : M_(M), a_(M), b_(0), d_(M) {}

    static Subgroup generated(std::int64_t M, const std::vector<LatticeVec>& gens) {
        Subgroup H(M);
        for (const auto& g : gens) H.add(g);
        return H;
    }

    void add(LatticeVec v) {
        v.x = mod(v.x);
        v.y = mod(v.y);
        // gcd of the first coordinates, tracking the second
        auto [g, s, t] = ext_gcd(a_, v.x);
        const std::int64_t nb = mod(mul(s, b_) + mul(t, v.y));
        const std::int64_t rest = mod(mul(v.x / g, b_) - mul(a_ / g, v.y));
        a_ = g;
        b_ = nb;
        d_ = std::gcd(d_, rest);
        if (d_ == 0) d_ = M_;
        b_ %= d_;
    }

    bool contains(const LatticeVec& v) const {
        const std::int64_t x = mod(v.x), y = mod(v.y);
        if (x % a_ != 0) return false;
        return mod(y - mul(x / a_, b_)) % d_ == 0;
    }
    bool contains(const Subgroup& o) const {
        for (const auto& g : o.generators())
            if (!contains(g)) return false;
        return true;
    }
    /// Number of elements of the subgroup.
    std::int64_t order() const { return (M_ / a_) * (M_ / d_); }
    std::vector<LatticeVec> generators() const { return {{a_, b_}, {0, d_}}; }

    std::int64_t modulus() const noexcept { return M_; }
    std::tuple<std::int64_t, std::int64_t, std::int64_t> hermite() const { return {a_, b_, d_}; }

    friend bool operator==(const Subgroup& u, const Subgroup& v) {
        return u.M_ == v.M_ && u.a_ == v.a_ && u.b_ == v.b_ && u.d_ == v.d_;
    }
    friend bool operator<(const Subgroup& u, const Subgroup& v) { return u.hermite() < v.hermite(); }

private:
    std::int64_t mod(std::int64_t v) const {
        v %= M_;
        return v < 0 ? v + M_ : v;
    }
    std::int64_t mul(std::int64_t u, std::int64_t v) const {
        return static_cast<std::int64_t>((static_cast<__int128>(u) * v) % M_);
    }
    static std::tuple<std::int64_t, std::int64_t, std::int64_t> ext_gcd(std::int64_t u, std::int64_t v) {
        std::int64_t r0 = u, r1 = v, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
        while (r1 != 0) {
            const std::int64_t k = r0 / r1;
            std::tie(r0, r1) = std::make_tuple(r1, r0 - k * r1);
            std::tie(s0, s1) = std::make_tuple(s1, s0 - k * s1);
            std::tie(t0, t1) = std::make_tuple(t1, t0 - k * t1);
        }
        return {r0, s0, t0};
    }

    std::int64_t M_;
    std::int64_t a_, b_, d_;
};

struct LatticeClass {
    enum class Kind { TypeA, TypeB };
    Kind kind = Kind::TypeA;
    int a = 0;                        // TypeA parameter
    std::vector<LatticeVec> witness;  // TypeB: images under [p] of the generators, spanning T_{s-1}

    std::string to_string() const { return kind == Kind::TypeA ? "TypeA(" + std::to_string(a) + ")" : "TypeB"; }
};

class LatticeModel {
public:
    LatticeModel(std::uint32_t p, int s, int k) : p_(p), s_(s), k_(k) {
        if (!is_prime(p) || p < 3) throw InvalidArgument("p not an odd prime");
        if (s < 0) throw InvalidArgument("s must be non-negative");
        if (k < s + 2) throw InvalidArgument("working level k must be at least s + 2");
        M_ = 1;
        for (int i = 0; i < k; ++i) {
            if (M_ > (std::int64_t{1} << 40)) throw ResourceLimit("lattice model modulus");
            M_ *= p;
        }
        c_ = make_context(p, 1).nonresidue;
    }

    std::uint32_t p() const noexcept { return p_; }
    int s() const noexcept { return s_; }
    int k() const noexcept { return k_; }
    std::int64_t modulus() const noexcept { return M_; }
    /// w^2 = c.
    std::int64_t omega_square() const noexcept { return c_; }

    std::int64_t ppow(int e) const {
        std::int64_t r = 1;
        for (int i = 0; i < e; ++i) r *= p_;
        return r;
    }

    Subgroup span(const std::vector<LatticeVec>& gens) const { return Subgroup::generated(M_, gens); }
    Subgroup T() const { return Subgroup(M_); }
    /// T_j = p^{-j} Z_p t + T.
    Subgroup T_level(int j) const {
        if (j < 0 || j > k_) throw InvalidArgument("T_j outside the model");
        return span({{ppow(k_ - j), 0}});
    }
    Subgroup type_a(int a) const { return span({{ppow(k_ - s_ - 1), a * ppow(k_ - 1)}}); }
    Subgroup type_b() const { return span({{ppow(k_ - s_), 0}, {0, ppow(k_ - 1)}}); }

    /// Multiplication by u0 + u1 w on the lattice.
    Subgroup act(std::int64_t u0, std::int64_t u1, const Subgroup& L) const {
        std::vector<LatticeVec> img;
        for (const auto& g : L.generators()) img.push_back(times(u0, u1, g));
        return span(img);
    }
    LatticeVec times(std::int64_t u0, std::int64_t u1, const LatticeVec& v) const {
        auto m = [&](std::int64_t u, std::int64_t w) {
            return static_cast<std::int64_t>((static_cast<__int128>(u) * w) % M_);
        };
        return {m(u0, v.x) + m(m(c_, u1), v.y), m(u1, v.x) + m(u0, v.y)};
    }
    /// [p] L + T.
    Subgroup scale_p(const Subgroup& L) const {
        std::vector<LatticeVec> img;
        for (const auto& g : L.generators()) img.push_back({g.x * p_, g.y * p_});
        return span(img);
    }

private:
    std::uint32_t p_;
    int s_, k_;
    std::int64_t M_ = 1;
    std::int64_t c_ = -1;
};

/// The p + 1 lattices L with T_s subset L, [L : T_s] = p, in Hermite order.
inline std::vector<Subgroup> enumerate_overlattices(const LatticeModel& m) {
    if (m.s() < 1) throw InvalidArgument("overlattices are enumerated for s >= 1");
    const Subgroup Ts = m.T_level(m.s());
    // p^{-1} T_s / T_s has the basis p^{-s-1} t, p^{-1} wt
    const std::int64_t ex = m.ppow(m.k() - m.s() - 1), ey = m.ppow(m.k() - 1);
    std::vector<Subgroup> out;
    for (std::int64_t i = 0; i < m.p(); ++i)
        for (std::int64_t j = 0; j < m.p(); ++j) {
            if (i == 0 && j == 0) continue;
            Subgroup L = Ts;
            L.add({i * ex, j * ey});
            if (std::find(out.begin(), out.end(), L) == out.end()) out.push_back(L);
        }
    std::sort(out.begin(), out.end());
    if (out.size() != m.p() + 1u) throw IdentityViolation("overlattice count is not p + 1");
    return out;
}

inline LatticeClass classify_overlattice(const LatticeModel& m, const Subgroup& L) {
    for (int a = 0; a < static_cast<int>(m.p()); ++a)
        if (L == m.type_a(a)) return {LatticeClass::Kind::TypeA, a, {}};
    if (L == m.type_b()) {
        LatticeClass c{LatticeClass::Kind::TypeB, 0, {}};
        const Subgroup pL = m.scale_p(L);
        if (!(pL == m.T_level(m.s() - 1))) throw IdentityViolation("[p] TypeB is not T_{s-1}");
        for (const auto& g : L.generators()) c.witness.push_back({g.x * m.p() % m.modulus(), g.y * m.p() % m.modulus()});
        return c;
    }
    throw IdentityViolation("unclassifiable overlattice");
}

struct TransitivityReport {
    std::uint32_t p = 3;
    int s = 1;
    /// image[c][a]: u_c * TypeA(a) = TypeA(image[c][a]), u_c = 1 + c p^s w
    std::vector<std::vector<int>> image;
    int orbit_size = 0;         // orbit of TypeA(0)
    bool simply_transitive = false;
    bool type_b_fixed = false;
};

inline TransitivityReport galois_transitivity_check(const LatticeModel& m) {
    if (m.s() < 1) throw InvalidArgument("transitivity is checked for s >= 1");
    const int p = static_cast<int>(m.p());
    TransitivityReport r{m.p(), m.s(), {}, 0, true, true};
    const std::int64_t ps = m.ppow(m.s());
    for (int c = 0; c < p; ++c) {
        std::vector<int> row;
        for (int a = 0; a < p; ++a) {
            const LatticeClass cl = classify_overlattice(m, m.act(1, c * ps, m.type_a(a)));
            if (cl.kind != LatticeClass::Kind::TypeA) throw IdentityViolation("unit moved a TypeA lattice to TypeB");
            row.push_back(cl.a);
        }
        r.image.push_back(row);
        if (!(m.act(1, c * ps, m.type_b()) == m.type_b())) r.type_b_fixed = false;
    }
    for (int a = 0; a < p; ++a) {
        std::vector<int> hit(static_cast<std::size_t>(p), 0);
        for (int c = 0; c < p; ++c) ++hit[static_cast<std::size_t>(r.image[c][a])];
        for (int h : hit)
            if (h != 1) r.simply_transitive = false;
        if (a == 0) r.orbit_size = static_cast<int>(std::count_if(hit.begin(), hit.end(), [](int h) { return h > 0; }));
    }
    return r;
}

/// Counts of (TypeA, TypeB) among the overlattices at the given level.
inline std::pair<int, int> classification_counts(const LatticeModel& m) {
    int a = 0, b = 0;
    for (const auto& L : enumerate_overlattices(m))
        (classify_overlattice(m, L).kind == LatticeClass::Kind::TypeA ? a : b) += 1;
    return {a, b};
}

/// Reruns the classification at level k + 1.
inline bool classification_stable(const LatticeModel& m) {
    return classification_counts(m) == classification_counts(LatticeModel(m.p(), m.s(), m.k() + 1));
}

struct HeckeTerm {
    std::string label;  // "sigma_a x_{s+1}" or "x_{s-1}"
    LatticeClass lattice;
};

struct HeckeIdentity {
    std::uint32_t p = 3;
    int s = 1;
    std::vector<HeckeTerm> terms;

    std::string to_string() const {
        std::string r = "T_p x_" + std::to_string(s) + " =";
        for (std::size_t i = 0; i < terms.size(); ++i) r += (i ? " + " : " ") + terms[i].label;
        return r;
    }
};

/// T_p x_s = sum_sigma sigma x_{s+1} + x_{s-1}, one term per overlattice.
inline HeckeIdentity hecke_identity(const LatticeModel& m) {
    if (m.s() < 1) throw InvalidArgument("the Hecke relation is stated for s >= 1");
    HeckeIdentity h{m.p(), m.s(), {}};
    HeckeTerm lower;
    for (const auto& L : enumerate_overlattices(m)) {
        const LatticeClass c = classify_overlattice(m, L);
        if (c.kind == LatticeClass::Kind::TypeA)
            h.terms.push_back({"sigma_" + std::to_string(c.a) + " x_" + std::to_string(m.s() + 1), c});
        else
            lower = {"x_" + std::to_string(m.s() - 1), c};
    }
    std::sort(h.terms.begin(), h.terms.end(), [](const HeckeTerm& u, const HeckeTerm& v) { return u.lattice.a < v.lattice.a; });
    h.terms.push_back(lower);
    return h;
}

} // namespace ltkit
