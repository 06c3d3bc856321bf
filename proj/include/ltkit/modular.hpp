#pragma once
// Genus arithmetic of X_0(N), the ramification bound chain for a map
// X_0(N) -> E, the degree of the Gamma_1(4) cover and the search for
// twist conductors N = l^2 N_E.

#include <ltkit/errors.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace ltkit {

/// Exact rational with positive denominator.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
        if (d == 0) throw InvalidArgument("zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    friend Rational operator+(const Rational& a, const Rational& b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
    friend Rational operator-(const Rational& a, const Rational& b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
    friend Rational operator*(const Rational& a, const Rational& b) { return {a.num * b.num, a.den * b.den}; }
    friend bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.num * b.den < b.num * a.den; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    bool is_integer() const noexcept { return den == 1; }
    std::string to_string() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }
};

/// Prime factorization by trial division.
inline std::map<std::uint64_t, int> factorize(std::uint64_t n) {
    std::map<std::uint64_t, int> f;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        while (n % d == 0) {
            ++f[d];
            n /= d;
        }
    if (n > 1) ++f[n];
    return f;
}

inline std::uint64_t euler_phi(std::uint64_t n) {
    std::uint64_t r = n;
    for (const auto& [l, e] : factorize(n)) r = r / l * (l - 1);
    return r;
}

/// Kronecker-style symbol (a/l) for an odd prime l, by Euler's criterion.
inline int legendre(std::int64_t a, std::uint64_t l) {
    const std::uint64_t x = static_cast<std::uint64_t>(((a % static_cast<std::int64_t>(l)) + static_cast<std::int64_t>(l)) %
                                                      static_cast<std::int64_t>(l));
    if (x == 0) return 0;
    std::uint64_t r = 1, b = x, e = (l - 1) / 2;
    for (; e; e >>= 1) {
        if (e & 1) r = static_cast<std::uint64_t>(static_cast<unsigned __int128>(r) * b % l);
        b = static_cast<std::uint64_t>(static_cast<unsigned __int128>(b) * b % l);
    }
    return r == 1 ? 1 : -1;
}

/// mu = [SL_2(Z) : Gamma_0(N)] = N prod_{l | N} (1 + 1/l).
inline std::uint64_t degree_mu(std::uint64_t N) {
    if (N < 1) throw InvalidArgument("N must be positive");
    std::uint64_t r = N;
    for (const auto& [l, e] : factorize(N)) r = r / l * (l + 1);
    return r;
}

struct GenusData {
    std::uint64_t N = 1;
    std::uint64_t mu = 1;
    std::uint64_t eps2 = 0, eps3 = 0, eps_inf = 0;
    std::int64_t g = 0;
    Rational ram_bound_strict; // mu/6 - eps2/2 - 2 eps3/3 - eps_inf
};

inline std::uint64_t elliptic_points_2(std::uint64_t N) {
    if (N % 4 == 0) return 0;
    std::uint64_t r = 1;
    for (const auto& [l, e] : factorize(N)) r *= static_cast<std::uint64_t>(1 + (l == 2 ? 0 : legendre(-1, l)));
    return r;
}

inline std::uint64_t elliptic_points_3(std::uint64_t N) {
    if (N % 9 == 0) return 0;
    std::uint64_t r = 1;
    for (const auto& [l, e] : factorize(N)) {
        const int chi = l == 3 ? 0 : (l == 2 ? -1 : legendre(-3, l));
        r *= static_cast<std::uint64_t>(1 + chi);
    }
    return r;
}

inline std::uint64_t cusp_count(std::uint64_t N) {
    std::uint64_t r = 0;
    for (std::uint64_t d = 1; d <= N; ++d)
        if (N % d == 0) r += euler_phi(std::gcd(d, N / d));
    return r;
}

/// g = 1 + mu/12 - eps2/4 - eps3/3 - eps_inf/2.
inline GenusData genus_x0(std::uint64_t N) {
    GenusData G;
    G.N = N;
    G.mu = degree_mu(N);
    G.eps2 = elliptic_points_2(N);
    G.eps3 = elliptic_points_3(N);
    G.eps_inf = cusp_count(N);
    const Rational g = Rational(1) + Rational(static_cast<std::int64_t>(G.mu), 12) - Rational(static_cast<std::int64_t>(G.eps2), 4) -
                       Rational(static_cast<std::int64_t>(G.eps3), 3) - Rational(static_cast<std::int64_t>(G.eps_inf), 2);
    if (!g.is_integer() || g.num < 0) throw IdentityViolation("genus of X_0(" + std::to_string(N) + ") is " + g.to_string());
    G.g = g.num;
    G.ram_bound_strict = Rational(static_cast<std::int64_t>(G.mu), 6) - Rational(static_cast<std::int64_t>(G.eps2), 2) -
                         Rational(2 * static_cast<std::int64_t>(G.eps3), 3) - Rational(static_cast<std::int64_t>(G.eps_inf));
    return G;
}

/// #S_ram <= 2g - 2 = mu/6 - eps2/2 - 2 eps3/3 - eps_inf < mu/6.
struct RamBoundChain {
    GenusData genus;
    std::int64_t two_g_minus_two = 0;
    Rational middle;   // mu/6 - eps2/2 - 2 eps3/3 - eps_inf
    Rational mu_over_6;
    bool equality_holds = false;
    bool strict = false;
    bool applicable = false; // g >= 1
    std::string strictness_reason;
};

inline RamBoundChain ram_bound(std::uint64_t N) {
    RamBoundChain c;
    c.genus = genus_x0(N);
    c.two_g_minus_two = 2 * c.genus.g - 2;
    c.middle = c.genus.ram_bound_strict;
    c.mu_over_6 = Rational(static_cast<std::int64_t>(c.genus.mu), 6);
    c.equality_holds = Rational(c.two_g_minus_two) == c.middle;
    c.strict = c.middle < c.mu_over_6;
    c.applicable = c.genus.g >= 1;
    c.strictness_reason = "eps_inf = " + std::to_string(c.genus.eps_inf) + " >= 1 (the cusp at infinity)";
    return c;
}

struct CoverDegree {
    std::uint64_t index_formula = 0;    // N^2 prod (1 - 1/l^2) at N = 4
    std::uint64_t index_cosets = 0;     // right cosets of Gamma_1(4) in SL_2(Z/4)
    std::uint64_t degree = 0;           // index / 2, since -1 is not in Gamma_1(4)
    std::string note;
};

/// Degree of X(Gamma_0(N), Gamma_1(4)) -> X_0(N).
inline CoverDegree gamma1_4_cover_degree() {
    CoverDegree c;
    const int N = 4;
    std::uint64_t idx = N * N;
    for (const auto& [l, e] : factorize(N)) idx = idx / (l * l) * (l * l - 1);
    c.index_formula = idx;
    // SL_2(Z) -> SL_2(Z/4) is onto, so cosets can be counted mod 4
    struct M {
        int a, b, c, d;
    };
    std::vector<M> sl2, gamma1;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int cc = 0; cc < N; ++cc)
                for (int d = 0; d < N; ++d)
                    if (((a * d - b * cc) % N + N) % N == 1) {
                        sl2.push_back({a, b, cc, d});
                        if (a == 1 && cc == 0 && d == 1) gamma1.push_back({a, b, cc, d});
                    }
    auto mul = [&](const M& x, const M& y) {
        return M{(x.a * y.a + x.b * y.c) % N, (x.a * y.b + x.b * y.d) % N, (x.c * y.a + x.d * y.c) % N, (x.c * y.b + x.d * y.d) % N};
    };
    auto key = [&](const M& m) { return ((m.a * N + m.b) * N + m.c) * N + m.d; };
    std::vector<int> seen;
    for (const auto& g : sl2) {
        int best = 1 << 30;
        for (const auto& h : gamma1) best = std::min(best, key(mul(h, g)));
        if (std::find(seen.begin(), seen.end(), best) == seen.end()) seen.push_back(best);
    }
    c.index_cosets = seen.size();
    c.degree = c.index_cosets / 2;
    c.note = "unramified iff every fiber has exactly `degree` points";
    return c;
}

/// Per-prime evidence that -3 is or is not a square modulo l^e.
struct ResidueEvidence {
    std::uint64_t prime = 0;
    int exponent = 0;
    int legendre = 0;          // (-3/l) for odd l != 3, 0 otherwise
    bool square = false;       // -3 is a square mod l^e
};

struct NCandidate {
    std::uint64_t ell = 0;
    std::uint64_t N = 0;
    std::uint64_t phi = 0;
    std::uint64_t kernel_bound = 0;
    std::vector<ResidueEvidence> evidence;
    bool minus3_nonsquare = false;  // condition c)
    bool phi_exceeds_bound = false; // condition b)
    std::string hypothesis;         // condition a), not decided here
};

/// Is -3 a square modulo l^e.
inline bool minus3_square_mod(std::uint64_t l, int e) {
    std::uint64_t m = 1;
    for (int i = 0; i < e; ++i) m *= l;
    if (l != 2 && l != 3) return legendre(-3, l) == 1; // Hensel
    const std::uint64_t target = (m * 3 - 3) % m;
    for (std::uint64_t x = 0; x < m; ++x)
        if (x * x % m == target) return true;
    return false;
}

inline std::vector<ResidueEvidence> minus3_evidence(std::uint64_t N) {
    std::vector<ResidueEvidence> out;
    for (const auto& [l, e] : factorize(N)) {
        ResidueEvidence r{l, e, (l == 2 || l == 3) ? 0 : legendre(-3, l), false};
        r.square = minus3_square_mod(l, e);
        out.push_back(r);
    }
    return out;
}

/// N = l^2 N_E for the first `count` primes l = 5 mod 12 prime to N_E.
inline std::vector<NCandidate> search_N(std::uint64_t base_conductor, int count, std::uint64_t kernel_bound,
                                        std::uint64_t ell_limit = 100000) {
    if (base_conductor < 1) throw InvalidArgument("base conductor must be positive");
    std::vector<NCandidate> out;
    for (std::uint64_t l = 5; l <= ell_limit && static_cast<int>(out.size()) < count; l += 12) {
        if (factorize(l).size() != 1 || factorize(l).begin()->second != 1) continue;
        if (base_conductor % l == 0) continue;
        NCandidate c;
        c.ell = l;
        c.N = l * l * base_conductor;
        c.phi = euler_phi(c.N);
        c.kernel_bound = kernel_bound;
        c.evidence = minus3_evidence(c.N);
        c.minus3_nonsquare = false;
        for (const auto& r : c.evidence)
            if (!r.square) c.minus3_nonsquare = true;
        c.phi_exceeds_bound = c.phi > kernel_bound;
        c.hypothesis = "N_E = " + std::to_string(base_conductor) + " is assumed to be the conductor of a CM curve good at 2, 3 with a_3 = 0";
        out.push_back(c);
    }
    return out;
}

/// Residues n mod N with n^2 = 1 or n^3 = 1 but n != +-1.
inline std::vector<std::uint64_t> order_argument_exceptions(std::uint64_t N) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = 0; n < N; ++n) {
        const std::uint64_t n2 = n * n % N, n3 = n2 * n % N;
        if ((n2 == 1 % N || n3 == 1 % N) && n != 1 % N && n != (N - 1) % N) out.push_back(n);
    }
    return out;
}

} // namespace ltkit
