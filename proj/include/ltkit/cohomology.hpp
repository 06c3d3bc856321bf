#pragma once
// Tate cohomology of a cyclic group G = <gamma> of order p^n acting on a
// finite abelian group M = C / R, C and R full-rank lattices in Z^r
// (C = Z^r unless M is a submodule).  Orders of kernels and images come
// from Hermite forms: |phi(M)| = [phi(C) + R : R].

#include <ltkit/errors.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace ltkit {

using IntVec = std::vector<std::int64_t>;
using IntMatrix = std::vector<IntVec>; // row-major, square

/// Full-rank lattice in Z^r containing E Z^r, kept in Hermite form.
class ModLattice {
public:
    ModLattice() = default;
    ModLattice(int r, std::int64_t E, const std::vector<IntVec>& gens) : r_(r), E_(E) {
        std::vector<IntVec> pool;
        for (const auto& g : gens) pool.push_back(reduced(g));
        for (int j = 0; j < r; ++j) {
            IntVec e(static_cast<std::size_t>(r), 0);
            e[j] = E;
            pool.push_back(e);
        }
        rows_.assign(static_cast<std::size_t>(r), IntVec{});
        for (int j = 0; j < r; ++j) {
            IntVec P(static_cast<std::size_t>(r), 0);
            bool have = false;
            std::vector<IntVec> rest;
            for (auto& R : pool) {
                if (R[j] == 0) {
                    rest.push_back(std::move(R));
                    continue;
                }
                if (!have) {
                    P = std::move(R);
                    have = true;
                    continue;
                }
                // (P, R) -> (s P + t R, (R_j/g) P - (P_j/g) R)
                const auto [g, s, t] = ext_gcd(P[j], R[j]);
                const std::int64_t u = R[j] / g, w = P[j] / g;
                IntVec nP(static_cast<std::size_t>(r)), nR(static_cast<std::size_t>(r));
                for (int k = 0; k < r; ++k) {
                    nP[k] = comb(s, P[k], t, R[k], k == j);
                    nR[k] = comb(u, P[k], -w, R[k], k == j);
                }
                P = std::move(nP);
                if (nR[j] != 0) throw IdentityViolation("Hermite elimination left a nonzero entry");
                rest.push_back(std::move(nR));
            }
            if (!have) throw IdentityViolation("lattice is not of full rank");
            if (P[j] < 0)
                for (auto& x : P) x = -x;
            rows_[j] = std::move(P);
            pool = std::move(rest);
        }
    }

    int rank() const noexcept { return r_; }
    std::int64_t exponent() const noexcept { return E_; }
    const std::vector<IntVec>& basis() const noexcept { return rows_; }

    /// [Z^r : L].
    std::uint64_t index() const {
        unsigned __int128 d = 1;
        for (int j = 0; j < r_; ++j) {
            d *= static_cast<unsigned __int128>(rows_[j][j]);
            if (d > static_cast<unsigned __int128>(UINT64_MAX)) throw ResourceLimit("lattice index overflows 64 bits");
        }
        return static_cast<std::uint64_t>(d);
    }

    bool contains(IntVec v) const {
        v = reduced(v);
        for (int j = 0; j < r_; ++j) {
            const std::int64_t pj = rows_[j][j];
            if (v[j] % pj != 0) return false;
            const std::int64_t c = v[j] / pj;
            for (int k = j; k < r_; ++k) v[k] = red(v[k] - mulmod(c, rows_[j][k]), k == j);
        }
        return true;
    }
    bool contains(const ModLattice& o) const {
        for (const auto& b : o.rows_)
            if (!contains(b)) return false;
        return true;
    }

private:
    IntVec reduced(const IntVec& v) const {
        if (static_cast<int>(v.size()) != r_) throw InvalidArgument("vector of the wrong rank");
        IntVec w(v);
        for (auto& x : w) x = red(x, false);
        return w;
    }
    std::int64_t red(std::int64_t x, bool exact) const {
        if (exact) return x;
        x %= E_;
        return x < 0 ? x + E_ : x;
    }
    std::int64_t mulmod(std::int64_t a, std::int64_t b) const {
        return static_cast<std::int64_t>((static_cast<__int128>(a) * b) % E_);
    }
    // entries in the pivot column stay exact (they divide E); the others live mod E
    std::int64_t comb(std::int64_t a, std::int64_t x, std::int64_t b, std::int64_t y, bool exact) const {
        const __int128 v = static_cast<__int128>(a) * x + static_cast<__int128>(b) * y;
        if (exact) return static_cast<std::int64_t>(v);
        std::int64_t m = static_cast<std::int64_t>(v % E_);
        return m < 0 ? m + E_ : m;
    }
    static std::tuple<std::int64_t, std::int64_t, std::int64_t> ext_gcd(std::int64_t a, std::int64_t b) {
        std::int64_t r0 = a, r1 = b, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
        while (r1 != 0) {
            const std::int64_t k = r0 / r1;
            std::tie(r0, r1) = std::make_tuple(r1, r0 - k * r1);
            std::tie(s0, s1) = std::make_tuple(s1, s0 - k * s1);
            std::tie(t0, t1) = std::make_tuple(t1, t0 - k * t1);
        }
        if (r0 < 0) return {-r0, -s0, -t0};
        return {r0, s0, t0};
    }

    int r_ = 0;
    std::int64_t E_ = 1;
    std::vector<IntVec> rows_;
};

class CyclicAction {
public:
    /// M = (+) Z/d_i with gamma acting by A (column j is the image of e_j).
    CyclicAction(std::uint32_t p, int n, const std::vector<std::int64_t>& orders, const IntMatrix& A)
        : p_(p), n_(n), r_(static_cast<int>(orders.size())), orders_(orders), A_(A) {
        if (p < 2 || n < 0) throw InvalidArgument("group order must be p^n");
        E_ = 1;
        for (auto d : orders) {
            if (d < 1) throw InvalidArgument("cyclic factor orders must be positive");
            E_ = std::lcm(E_, d);
        }
        std::vector<IntVec> rel;
        for (int i = 0; i < r_; ++i) {
            IntVec e(static_cast<std::size_t>(r_), 0);
            e[i] = orders[i];
            rel.push_back(e);
        }
        build({}, rel, true);
    }

    std::uint32_t p() const noexcept { return p_; }
    int n() const noexcept { return n_; }
    std::uint64_t group_order() const {
        std::uint64_t g = 1;
        for (int i = 0; i < n_; ++i) g *= p_;
        return g;
    }
    int rank() const noexcept { return r_; }
    /// d_i of the ambient (+) Z/d_i.
    const std::vector<std::int64_t>& factor_orders() const noexcept { return orders_; }
    const IntMatrix& matrix() const noexcept { return A_; }
    std::uint64_t order() const { return R_.index() / C_.index(); }

    /// |phi(M)| for an integer matrix phi preserving C and R.
    std::uint64_t image_order(const IntMatrix& phi) const {
        std::vector<IntVec> g;
        for (const auto& b : C_.basis()) g.push_back(apply(phi, b));
        for (const auto& b : R_.basis()) g.push_back(b);
        return R_.index() / ModLattice(r_, E_, g).index();
    }
    std::uint64_t kernel_order(const IntMatrix& phi) const { return order() / image_order(phi); }

    /// gamma - 1 and the norm element sum_{i < p^n} gamma^i, reduced mod E.
    IntMatrix gamma_minus_one() const {
        IntMatrix m = A_;
        for (int i = 0; i < r_; ++i) m[i][i] = mod(m[i][i] - 1);
        return m;
    }
    IntMatrix norm_element() const {
        IntMatrix s = identity(), pw = identity();
        const std::uint64_t g = group_order();
        for (std::uint64_t i = 1; i < g; ++i) {
            pw = multiply(pw, A_);
            for (int a = 0; a < r_; ++a)
                for (int b = 0; b < r_; ++b) s[a][b] = mod(s[a][b] + pw[a][b]);
        }
        return s;
    }

    /// The same module with generator gamma^u.
    CyclicAction with_generator_power(std::uint64_t u) const {
        if (u % p_ == 0) throw InvalidArgument("gamma^u generates only for u prime to p");
        CyclicAction r = *this;
        r.A_ = power(A_, u);
        return r;
    }

    /// Submodule generated by the given vectors (and their G-orbits).
    CyclicAction submodule(const std::vector<IntVec>& gens) const {
        CyclicAction r = *this;
        r.build(orbit_closure(gens), R_.basis(), false);
        return r;
    }
    /// M / (submodule generated by gens).
    CyclicAction quotient(const std::vector<IntVec>& gens) const {
        CyclicAction r = *this;
        std::vector<IntVec> rel = orbit_closure(gens);
        for (const auto& b : R_.basis()) rel.push_back(b);
        r.build(C_.basis(), rel, false);
        return r;
    }

    IntVec apply(const IntMatrix& m, const IntVec& v) const {
        IntVec w(static_cast<std::size_t>(r_), 0);
        for (int i = 0; i < r_; ++i) {
            __int128 acc = 0;
            for (int j = 0; j < r_; ++j) acc += static_cast<__int128>(m[i][j]) * v[j];
            w[i] = mod(static_cast<std::int64_t>(acc % E_));
        }
        return w;
    }
    IntMatrix power(const IntMatrix& m, std::uint64_t e) const {
        IntMatrix r = identity(), b = m;
        for (; e; e >>= 1) {
            if (e & 1) r = multiply(r, b);
            b = multiply(b, b);
        }
        return r;
    }
    IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) const {
        IntMatrix c(static_cast<std::size_t>(r_), IntVec(static_cast<std::size_t>(r_), 0));
        for (int i = 0; i < r_; ++i)
            for (int k = 0; k < r_; ++k) {
                if (a[i][k] == 0) continue;
                for (int j = 0; j < r_; ++j)
                    c[i][j] = mod(static_cast<std::int64_t>((c[i][j] + static_cast<__int128>(a[i][k]) * b[k][j]) % E_));
            }
        return c;
    }
    IntMatrix identity() const {
        IntMatrix m(static_cast<std::size_t>(r_), IntVec(static_cast<std::size_t>(r_), 0));
        for (int i = 0; i < r_; ++i) m[i][i] = 1 % E_;
        return m;
    }

    const ModLattice& carrier() const noexcept { return C_; }
    const ModLattice& relations() const noexcept { return R_; }
    std::int64_t exponent() const noexcept { return E_; }

private:
    std::int64_t mod(std::int64_t x) const {
        x %= E_;
        return x < 0 ? x + E_ : x;
    }

    std::vector<IntVec> orbit_closure(const std::vector<IntVec>& gens) const {
        std::vector<IntVec> out;
        for (const auto& g : gens) {
            IntVec v(g.begin(), g.end());
            for (std::uint64_t i = 0; i < group_order(); ++i) {
                out.push_back(v);
                v = apply(A_, v);
            }
        }
        if (out.empty()) out.push_back(IntVec(static_cast<std::size_t>(r_), 0));
        return out;
    }

    void build(const std::vector<IntVec>& carrier, const std::vector<IntVec>& rel, bool full_carrier) {
        if (static_cast<int>(A_.size()) != r_) throw InvalidArgument("action matrix has the wrong size");
        for (auto& row : A_) {
            if (static_cast<int>(row.size()) != r_) throw InvalidArgument("action matrix has the wrong size");
            for (auto& x : row) x = mod(x);
        }
        R_ = ModLattice(r_, E_, rel);
        if (full_carrier) {
            std::vector<IntVec> id;
            for (int i = 0; i < r_; ++i) {
                IntVec e(static_cast<std::size_t>(r_), 0);
                e[i] = 1;
                id.push_back(e);
            }
            C_ = ModLattice(r_, E_, id);
        } else {
            std::vector<IntVec> c = carrier;
            for (const auto& b : R_.basis()) c.push_back(b);
            C_ = ModLattice(r_, E_, c);
        }
        // the action must preserve C and R and satisfy gamma^{p^n} = 1 on C/R
        for (const auto& b : C_.basis())
            if (!C_.contains(apply(A_, b))) throw InvalidArgument("inconsistent action: gamma does not preserve the module");
        for (const auto& b : R_.basis())
            if (!R_.contains(apply(A_, b))) throw InvalidArgument("inconsistent action: gamma does not respect the relations");
        const IntMatrix top = power(A_, group_order());
        for (const auto& b : C_.basis()) {
            IntVec d = apply(top, b);
            for (int i = 0; i < r_; ++i) d[i] = mod(d[i] - b[i]);
            if (!R_.contains(d)) throw InvalidArgument("inconsistent action: gamma^(p^n) is not the identity");
        }
    }

    std::uint32_t p_;
    int n_;
    int r_;
    std::vector<std::int64_t> orders_;
    std::int64_t E_ = 1;
    IntMatrix A_;
    ModLattice C_, R_;
};

/// |H^0| = |M^G / N M|.
inline std::uint64_t tate_h0(const CyclicAction& M) {
    return M.kernel_order(M.gamma_minus_one()) / M.image_order(M.norm_element());
}

/// |H^1| = |ker N / (gamma - 1) M|.
inline std::uint64_t tate_h1(const CyclicAction& M) {
    return M.kernel_order(M.norm_element()) / M.image_order(M.gamma_minus_one());
}

struct HerbrandQuotient {
    std::uint64_t h0 = 1;
    std::uint64_t h1 = 1;
    bool is_one() const noexcept { return h0 == h1; }
    std::string to_string() const { return std::to_string(h0) + "/" + std::to_string(h1); }
};

/// h = |H^0| / |H^1|; finite modules have h = 1.
inline HerbrandQuotient herbrand(const CyclicAction& M) {
    HerbrandQuotient h{tate_h0(M), tate_h1(M)};
    if (!h.is_one()) throw IdentityViolation("Herbrand quotient of a finite module is " + h.to_string());
    return h;
}

/// A random action of Z/p^n on a finite module: direct sum of blocks over
/// Z/d, each a cyclic shift of length p^j, a scalar of p-power order or a
/// unipotent Jordan block, conjugated by a random invertible matrix.
inline CyclicAction random_cyclic_action(std::uint32_t p, int n, std::mt19937_64& rng, int max_rank = 5) {
    std::vector<std::int64_t> orders;
    std::vector<IntMatrix> blocks;
    auto pick = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };
    std::uint64_t G = 1;
    for (int i = 0; i < n; ++i) G *= p;
    const std::vector<std::int64_t> moduli{2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 25, 27};
    int rank = 0;
    while (rank < max_rank) {
        const std::int64_t d = moduli[static_cast<std::size_t>(pick(0, static_cast<std::int64_t>(moduli.size()) - 1))];
        const int kind = static_cast<int>(pick(0, 2));
        IntMatrix B;
        if (kind == 0) {
            // cyclic shift of length p^j
            int j = static_cast<int>(pick(0, n));
            std::int64_t len = 1;
            for (int i = 0; i < j; ++i) len *= p;
            if (rank + len > max_rank) len = 1;
            B.assign(static_cast<std::size_t>(len), IntVec(static_cast<std::size_t>(len), 0));
            for (std::int64_t i = 0; i < len; ++i) B[(i + 1) % len][i] = 1;
        } else if (kind == 1) {
            // scalar u with u^{p^n} = 1 mod d
            std::vector<std::int64_t> us;
            for (std::int64_t u = 1; u < d; ++u) {
                if (std::gcd(u, d) != 1) continue;
                std::int64_t x = 1;
                for (std::uint64_t i = 0; i < G; ++i) x = x * u % d;
                if (x == 1 % d) us.push_back(u);
            }
            B = {{us[static_cast<std::size_t>(pick(0, static_cast<std::int64_t>(us.size()) - 1))]}};
        } else {
            // unipotent [[1, 1], [0, 1]] over Z/p^a with a <= n
            if (n == 0 || rank + 2 > max_rank) {
                B = {{1}};
            } else {
                const int a = static_cast<int>(pick(1, n));
                std::int64_t q = 1;
                for (int i = 0; i < a; ++i) q *= p;
                orders.push_back(q);
                orders.push_back(q);
                blocks.push_back({{1, 1}, {0, 1}});
                rank += 2;
                continue;
            }
        }
        for (std::size_t i = 0; i < B.size(); ++i) orders.push_back(d);
        rank += static_cast<int>(B.size());
        blocks.push_back(std::move(B));
    }
    const int r = rank;
    IntMatrix A(static_cast<std::size_t>(r), IntVec(static_cast<std::size_t>(r), 0));
    int off = 0;
    for (const auto& B : blocks) {
        for (std::size_t i = 0; i < B.size(); ++i)
            for (std::size_t j = 0; j < B.size(); ++j) A[off + i][off + j] = B[i][j];
        off += static_cast<int>(B.size());
    }
    // conjugate by elementary matrices x_i += c x_j between factors of equal order
    for (int t = 0; t < 2 * r; ++t) {
        const int i = static_cast<int>(pick(0, r - 1)), j = static_cast<int>(pick(0, r - 1));
        if (i == j || orders[i] != orders[j]) continue;
        const std::int64_t c = pick(1, orders[i] - 1 > 0 ? orders[i] - 1 : 1);
        // A -> S A S^{-1}, S = I + c E_ij
        for (int k = 0; k < r; ++k) A[i][k] += c * A[j][k];
        for (int k = 0; k < r; ++k) A[k][j] -= c * A[k][i];
    }
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            A[i][j] %= orders[i];
            if (A[i][j] < 0) A[i][j] += orders[i];
        }
    return CyclicAction(p, n, orders, A);
}

} // namespace ltkit
