#pragma once
// Symbolic trace relations of a system of local points
//   Tr_{s+1/s} y_{s+1} = a_p y_s - y_{s-1}  (s >= 1),
//   Tr_{1/0} y_1 = a_p y_0 - y,   y_0 = a_p x_0,
// over Z[a_p, p].  The trace of a point already defined one level down is
// the formal-group sum of p equal conjugates, i.e. multiplication by p.

#include <ltkit/errors.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace ltkit {

/// Integer polynomial in a_p and p.
class ApPoly {
public:
    using Monomial = std::pair<int, int>; // (deg a_p, deg p)

    ApPoly() = default;
    static ApPoly constant(std::int64_t c) { return monomial(c, 0, 0); }
    static ApPoly monomial(std::int64_t c, int i, int j) {
        ApPoly r;
        if (c != 0) r.c_[{i, j}] = c;
        return r;
    }
    static ApPoly ap() { return monomial(1, 1, 0); }
    static ApPoly p() { return monomial(1, 0, 1); }

    bool is_zero() const noexcept { return c_.empty(); }
    const std::map<Monomial, std::int64_t>& terms() const noexcept { return c_; }

    ApPoly& operator+=(const ApPoly& o) {
        for (const auto& [m, v] : o.c_) add(m, v);
        return *this;
    }
    ApPoly& operator-=(const ApPoly& o) {
        for (const auto& [m, v] : o.c_) add(m, -v);
        return *this;
    }
    friend ApPoly operator+(ApPoly a, const ApPoly& b) { return a += b; }
    friend ApPoly operator-(ApPoly a, const ApPoly& b) { return a -= b; }
    friend ApPoly operator-(ApPoly a) {
        for (auto& [m, v] : a.c_) v = -v;
        return a;
    }
    friend ApPoly operator*(const ApPoly& a, const ApPoly& b) {
        ApPoly r;
        for (const auto& [m, u] : a.c_)
            for (const auto& [n, v] : b.c_) r.add({m.first + n.first, m.second + n.second}, u * v);
        return r;
    }
    friend bool operator==(const ApPoly& a, const ApPoly& b) { return a.c_ == b.c_; }

    std::int64_t evaluate(std::int64_t ap, std::int64_t p) const {
        std::int64_t r = 0;
        for (const auto& [m, v] : c_) {
            std::int64_t t = v;
            for (int i = 0; i < m.first; ++i) t *= ap;
            for (int j = 0; j < m.second; ++j) t *= p;
            r += t;
        }
        return r;
    }
    /// a_p -> value, keeping p symbolic.
    ApPoly specialize_ap(std::int64_t ap) const {
        ApPoly r;
        for (const auto& [m, v] : c_) {
            std::int64_t t = v;
            for (int i = 0; i < m.first; ++i) t *= ap;
            r.add({0, m.second}, t);
        }
        return r;
    }

    std::string to_string() const {
        if (c_.empty()) return "0";
        std::string s;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            const auto [m, v] = *it;
            std::string mono;
            if (m.first > 0) mono += m.first == 1 ? "a_p" : "a_p^" + std::to_string(m.first);
            if (m.second > 0) mono += (mono.empty() ? "" : "*") + (m.second == 1 ? std::string("p") : "p^" + std::to_string(m.second));
            std::int64_t a = v < 0 ? -v : v;
            std::string term = mono.empty() ? std::to_string(a) : (a == 1 ? mono : std::to_string(a) + "*" + mono);
            if (s.empty())
                s = (v < 0 ? "-" : "") + term;
            else
                s += (v < 0 ? " - " : " + ") + term;
        }
        return s;
    }

private:
    void add(const Monomial& m, std::int64_t v) {
        if (v == 0) return;
        auto& slot = c_[m];
        slot += v;
        if (slot == 0) c_.erase(m);
    }
    std::map<Monomial, std::int64_t> c_;
};

/// Point symbols: y_j for j >= 0, the boundary point y and x_0.
struct PointSymbol {
    static constexpr int y = -1;
    static constexpr int x0 = -2;

    static std::string name(int s) {
        if (s == y) return "y";
        if (s == x0) return "x_0";
        return "y_" + std::to_string(s);
    }
    /// Level at which the point is defined.
    static int level(int s) { return s < 0 ? 0 : s; }
};

/// Z[a_p, p]-linear combination of point symbols.
class PointExpr {
public:
    PointExpr() = default;
    static PointExpr symbol(int s, ApPoly c = ApPoly::constant(1)) {
        PointExpr e;
        e.add(s, c);
        return e;
    }

    void add(int s, const ApPoly& c) {
        auto& slot = t_[s];
        slot += c;
        if (slot.is_zero()) t_.erase(s);
    }
    const std::map<int, ApPoly>& terms() const noexcept { return t_; }
    bool is_zero() const noexcept { return t_.empty(); }

    PointExpr specialize_ap(std::int64_t ap) const {
        PointExpr r;
        for (const auto& [s, c] : t_) r.add(s, c.specialize_ap(ap));
        return r;
    }
    /// y_0 -> a_p x_0.
    PointExpr substitute_y0() const {
        PointExpr r;
        for (const auto& [s, c] : t_) {
            if (s == 0)
                r.add(PointSymbol::x0, c * ApPoly::ap());
            else
                r.add(s, c);
        }
        return r;
    }

    friend bool operator==(const PointExpr& a, const PointExpr& b) { return a.t_ == b.t_; }

    std::string to_string() const {
        if (t_.empty()) return "0";
        std::string r;
        for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
            const auto& [s, c] = *it;
            if (!r.empty()) r += " + ";
            const std::string cs = c.to_string();
            r += cs == "1" ? PointSymbol::name(s) : "(" + cs + ")*" + PointSymbol::name(s);
        }
        return r;
    }

private:
    std::map<int, ApPoly> t_;
};

namespace detail {

struct TraceTerm {
    ApPoly c;
    int symbol;
    int level; // level of the field the term currently lives in
};

/// One trace step Tr_{L/L-1} on a single term.
inline std::vector<TraceTerm> trace_step(const TraceTerm& t) {
    const int L = t.level;
    if (L <= 0) throw InvalidArgument("no trace below level 0");
    if (t.symbol == L) {
        // Tr y_L = a_p y_{L-1} - y_{L-2}, with y_{-1} := y
        const int lower = L >= 2 ? L - 2 : PointSymbol::y;
        return {{t.c * ApPoly::ap(), L - 1, L - 1}, {-t.c, lower, L - 1}};
    }
    if (PointSymbol::level(t.symbol) > L) throw InvalidArgument("symbol above the current level");
    return {{t.c * ApPoly::p(), t.symbol, L - 1}};
}

inline PointExpr collect(const std::vector<TraceTerm>& ts) {
    PointExpr e;
    for (const auto& t : ts) e.add(t.symbol, t.c);
    return e;
}

} // namespace detail

/// Tr_{k+1/k} o ... o Tr_{from/from-1} applied to an expression living at
/// level `from`.  Steps are taken level by level; `chain` receives the
/// expression after each step.
inline PointExpr apply_norm(const PointExpr& e, int from, int to, std::vector<PointExpr>* chain = nullptr) {
    if (to < 0 || to > from) throw InvalidArgument("norm needs 0 <= k <= s");
    std::vector<detail::TraceTerm> cur;
    for (const auto& [s, c] : e.terms()) cur.push_back({c, s, from});
    for (int L = from; L > to; --L) {
        std::vector<detail::TraceTerm> next;
        for (const auto& t : cur)
            for (auto& u : detail::trace_step(t)) next.push_back(std::move(u));
        PointExpr merged = detail::collect(next);
        cur.clear();
        for (const auto& [s, c] : merged.terms()) cur.push_back({c, s, L - 1});
        if (chain) chain->push_back(merged);
    }
    return detail::collect(cur);
}

/// N_{s/k}(y_s) in normal form, a_p symbolic.
inline PointExpr norm_down(int s, int k, std::vector<PointExpr>* chain = nullptr) {
    if (s < 0) throw InvalidArgument("s must be non-negative");
    return apply_norm(PointExpr::symbol(s), s, k, chain);
}

/// The same reduction with terms reduced in a random order, merging like
/// terms and substituting y_0 = a_p x_0 at random moments.
inline PointExpr norm_down_random(int s, int k, std::mt19937_64& rng, bool substitute_y0) {
    if (k < 0 || k > s) throw InvalidArgument("norm needs 0 <= k <= s");
    std::vector<detail::TraceTerm> pool{{ApPoly::constant(1), s, s}};
    std::bernoulli_distribution coin(0.25);
    for (;;) {
        std::vector<std::size_t> open;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (pool[i].level > k) open.push_back(i);
        if (open.empty()) break;
        const std::size_t pick = open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)];
        const detail::TraceTerm t = pool[pick];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        for (auto& u : detail::trace_step(t)) pool.push_back(std::move(u));
        if (coin(rng)) {
            // merge like terms sitting at the same level
            std::map<std::pair<int, int>, ApPoly> m;
            for (const auto& u : pool) m[{u.symbol, u.level}] += u.c;
            pool.clear();
            for (auto& [key, c] : m)
                if (!c.is_zero()) pool.push_back({c, key.first, key.second});
            std::shuffle(pool.begin(), pool.end(), rng);
        }
        if (substitute_y0 && coin(rng))
            for (auto& u : pool)
                if (u.symbol == 0) {
                    u.symbol = PointSymbol::x0;
                    u.c = u.c * ApPoly::ap();
                }
    }
    PointExpr r = detail::collect(pool);
    return substitute_y0 ? r.substitute_y0() : r;
}

struct ParityCertificate {
    int s = 0, k = 0;
    PointExpr claimed;               // -(-p)^{(s-k-1)/2} y_{k-1}
    std::vector<PointExpr> chain;    // expression after each trace step (a_p = 0)
    bool holds = false;
};

/// -(-p)^e as an element of Z[p].
inline ApPoly minus_p_power(int e, bool negate) {
    ApPoly c = ApPoly::monomial((e % 2 == 0) ? 1 : -1, 0, e);
    return negate ? -c : c;
}

/// N_{s/k} y_s = -(-p)^{(s-k-1)/2} y_{k-1} at a_p = 0 (y_{-1} = y).
inline ParityCertificate verify_parity_identity(int s, int k) {
    if (k < 0 || k > s) throw InvalidArgument("need 0 <= k <= s");
    if ((s - k) % 2 == 0) throw InvalidArgument("parity violation: s - k must be odd");
    ParityCertificate c{s, k, {}, {}, false};
    const int lower = k >= 1 ? k - 1 : PointSymbol::y;
    c.claimed = PointExpr::symbol(lower, minus_p_power((s - k - 1) / 2, true));
    std::vector<PointExpr> raw;
    const PointExpr r = norm_down(s, k, &raw).specialize_ap(0);
    for (const auto& e : raw) c.chain.push_back(e.specialize_ap(0));
    c.holds = r == c.claimed;
    return c;
}

/// N_{s/k} y_s = (-p)^{(s-k)/2} y_k at a_p = 0.
inline bool verify_even_identity(int s, int k) {
    if (k < 0 || k > s || (s - k) % 2 != 0) throw InvalidArgument("need 0 <= k <= s with s - k even");
    return norm_down(s, k).specialize_ap(0) == PointExpr::symbol(k, minus_p_power((s - k) / 2, false));
}

/// One conductor class in the proof that y_s lies in A^+ or A^-.
struct ParityDeduction {
    int conductor_exponent = 0;       // chi of conductor p^e, e = 0 trivial
    std::string parity;               // "Xi+" / "Xi-"
    bool required = false;            // needed for the membership claim
    std::string case_label;
    std::vector<std::string> steps;   // rules and identities used
    bool vanishes = false;            // lambda_chi(y_s) = 0 is deduced
};

struct ParityReport {
    int s = 0;
    std::string claim;                // "y_s in A-" for odd s, "y_s in A+" for even s
    std::vector<ParityDeduction> cases;
    bool complete = false;            // every required class vanishes

    /// Rendering of the trivial-class branch at k = 0 when y_0 is kept
    /// symbolic instead of set to a_p x_0 = 0.
    std::string y0_symbolic_branch;
};

inline ParityReport parity_vanishing_report(int s) {
    if (s < 0) throw InvalidArgument("s must be non-negative");
    ParityReport r;
    r.s = s;
    const bool odd = s % 2 != 0;
    r.claim = "y_" + std::to_string(s) + (odd ? " in A-" : " in A+");
    const std::string ys = "y_" + std::to_string(s);

    // trivial character
    {
        ParityDeduction d{0, "Xi+", !odd, "", {}, false};
        if (!odd) {
            d.case_label = "trivial, s even";
            const PointExpr n = norm_down(s, 0).specialize_ap(0);
            d.steps.push_back("norm scaling: p^" + std::to_string(s) + " lambda_chi(" + ys + ") = lambda_chi(N_{" +
                              std::to_string(s) + "/0} " + ys + ")");
            d.steps.push_back("norm identity: N_{" + std::to_string(s) + "/0} " + ys + " = " + n.to_string());
            d.steps.push_back("y_0 = a_p x_0 = 0: " + n.substitute_y0().specialize_ap(0).to_string());
            d.vanishes = n.substitute_y0().specialize_ap(0).is_zero();
            r.y0_symbolic_branch = n.to_string();
        } else {
            d.case_label = "trivial, s odd (not needed for A-)";
            d.steps.push_back("no constraint");
        }
        r.cases.push_back(d);
    }
    // conductor p^{k+1}, k = 1 .. s + 1 (k > s is one case)
    for (int k = 1; k <= s + 1; ++k) {
        ParityDeduction d;
        d.conductor_exponent = k + 1;
        d.parity = (k + 1) % 2 == 0 ? "Xi+" : "Xi-";
        d.required = (d.parity == "Xi-") == odd;
        if (s < k) {
            d.case_label = "s < k";
            d.steps.push_back("conductor vanishing: " + ys + " is defined over Psi_" + std::to_string(s) +
                              " and the conductor p^" + std::to_string(k + 1) + " exceeds p^" + std::to_string(s + 1));
            d.vanishes = true;
        } else if ((s - k) % 2 != 0) {
            d.case_label = "s >= k, s - k odd";
            const ParityCertificate c = verify_parity_identity(s, k);
            d.steps.push_back("norm scaling: p^" + std::to_string(s - k) + " lambda_chi(" + ys + ") = lambda_chi(N_{" +
                              std::to_string(s) + "/" + std::to_string(k) + "} " + ys + ")");
            d.steps.push_back("norm identity: N_{" + std::to_string(s) + "/" + std::to_string(k) + "} " + ys + " = " +
                              c.claimed.to_string() + (c.holds ? " (verified)" : " (FAILED)"));
            d.steps.push_back("conductor vanishing: y_" + std::to_string(k - 1) + " is defined over Psi_" + std::to_string(k - 1) +
                              " and the conductor p^" + std::to_string(k + 1) + " exceeds p^" + std::to_string(k));
            d.vanishes = c.holds;
        } else {
            d.case_label = "s >= k, s - k even";
            d.steps.push_back("norm identity: N_{" + std::to_string(s) + "/" + std::to_string(k) + "} " + ys + " = " +
                              norm_down(s, k).specialize_ap(0).to_string() + "; no conclusion");
        }
        r.cases.push_back(d);
    }
    r.complete = std::all_of(r.cases.begin(), r.cases.end(), [](const ParityDeduction& d) { return !d.required || d.vanishes; });
    return r;
}

} // namespace ltkit
