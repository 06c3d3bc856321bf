#pragma once

// The Lubin-Tate formal group over O with parameter pi = -p and distinguished
// series f(X) = pi*X + X^q.

#include <memory>
#include <string>
#include <vector>

#include "errors.hpp"
#include "padic.hpp"
#include "series.hpp"

namespace ltkit {

using LawSeries = MultiSeries<UnramifiedElement>;

/// Binomial coefficient C(n, k) as an exact element of O.
inline UnramifiedElement binomial(const PrimeContext& ctx, std::uint64_t n, std::uint64_t k) {
    if (k > n) return UnramifiedElement::exact(ctx, 0);
    const std::uint64_t m = ctx.modulus(ctx.cap);
    std::uint64_t unit = 1;
    int v = 0;
    for (std::uint64_t i = 0; i < k; ++i) {
        std::uint64_t num = n - i, den = i + 1;
        while (num % ctx.p == 0) { num /= ctx.p; ++v; }
        while (den % ctx.p == 0) { den /= ctx.p; --v; }
        unit = detail::mulmod(unit, num % m, m);
        unit = detail::mulmod(unit, detail::invmod(den % m, m), m);
    }
    return UnramifiedElement::from_residues(ctx, unit, 0, ctx.cap).scale(v);
}

/// C(n, k) for n <= N from tables of p-free factorial parts.
class BinomialTable {
public:
    BinomialTable(const PrimeContext& ctx, int N) : ctx_(&ctx), m_(ctx.modulus(ctx.cap)) {
        unit_.assign(static_cast<std::size_t>(N) + 1, 1);
        inv_.assign(unit_.size(), 1);
        v_.assign(unit_.size(), 0);
        for (int i = 1; i <= N; ++i) {
            std::uint64_t x = static_cast<std::uint64_t>(i);
            int e = 0;
            while (x % ctx.p == 0) { x /= ctx.p; ++e; }
            unit_[i] = detail::mulmod(unit_[i - 1], x % m_, m_);
            v_[i] = v_[i - 1] + e;
        }
        inv_[N] = detail::invmod(unit_[N], m_);
        for (int i = N; i >= 1; --i) {
            std::uint64_t x = static_cast<std::uint64_t>(i);
            while (x % ctx.p == 0) x /= ctx.p;
            inv_[i - 1] = detail::mulmod(inv_[i], x % m_, m_);
        }
    }
    UnramifiedElement operator()(int n, int k) const {
        if (k < 0 || k > n) return UnramifiedElement::exact(*ctx_, 0);
        const std::uint64_t u = detail::mulmod(unit_[n], detail::mulmod(inv_[k], inv_[n - k], m_), m_);
        return UnramifiedElement::from_residues(*ctx_, u, 0, ctx_->cap).scale(v_[n] - v_[k] - v_[n - k]);
    }

private:
    const PrimeContext* ctx_;
    std::uint64_t m_;
    std::vector<std::uint64_t> unit_, inv_;
    std::vector<int> v_;
};

class FormalGroup {
public:
    /// Builds f, the logarithm, the exponential and the group law up to
    /// degree D.  The law's coefficients are checked to be integral.
    FormalGroup(const PrimeContext& ctx, int D, bool with_law = true) : ctx_(&ctx), D_(D) {
        if (D < static_cast<int>(ctx.q))
            throw InvalidArgument("degree bound must be at least q = " + std::to_string(ctx.q));
        pi_ = UnramifiedElement::exact(ctx, -static_cast<std::int64_t>(ctx.p));
        f_ = Series(ctx, D);
        f_[1] = pi_;
        f_[static_cast<int>(ctx.q)] = UnramifiedElement::exact(ctx, 1);

        log_ = solve_logarithm(ctx, D);
        exp_ = log_.revert();
        if (with_law) {
            using FMulti = MultiSeries<FieldElement>;
            FMulti sum = FMulti::from_univariate(log_, 2, D, 0) + FMulti::from_univariate(log_, 2, D, 1);
            FMulti law = sum.substitute_into(exp_);
            law_ = std::make_shared<LawSeries>(ctx, 2, D);
            law.for_each([&](const FMulti::Exp& e, const FieldElement& x) {
                if (!x.is_integral())
                    throw IdentityViolation("group law coefficient of bidegree (" + std::to_string(e[0]) + "," +
                                            std::to_string(e[1]) + ") is not integral");
                law_->at(e) = x.to_integral();
            });
        }
    }

    const PrimeContext& context() const { return *ctx_; }
    int bound() const noexcept { return D_; }
    const UnramifiedElement& pi() const noexcept { return pi_; }

    /// f(X) = pi*X + X^q.
    const Series& distinguished() const noexcept { return f_; }
    /// The logarithm of the group: lambda(f(X)) = pi * lambda(X), lambda'(0) = 1.
    const FieldSeries& logarithm() const noexcept { return log_; }
    /// The compositional inverse of lambda.  Its coefficients have denominators.
    const FieldSeries& exponential() const noexcept { return exp_; }

    /// F(X, Y), truncated at total degree D.
    const LawSeries& law() const {
        if (!law_) throw InvalidArgument("formal group was built without its group law");
        return *law_;
    }

    /// lambda'(X); integral (the invariant differential of a Lubin-Tate group).
    Series log_derivative() const { return to_integral(log_.derivative(), "lambda'"); }

    /// The endomorphism [a](X): the unique series with linear term a that
    /// commutes with f.  Coefficients are solved degree by degree from
    /// (pi - pi^r) g_r = [g_{<r}(f)]_r - [g_{<r}^q]_r.
    Series mult_by(const UnramifiedElement& a) const { return mult_by(a, D_); }

    Series mult_by(const UnramifiedElement& a, int D) const {
        const PrimeContext& ctx = *ctx_;
        const int q = static_cast<int>(ctx.q);
        const auto zero = UnramifiedElement::exact(ctx, 0);
        Series g(ctx, D);
        if (D >= 1) g[1] = a;
        // P[j][k]: coefficient of X^k in g^j for j = 1..q
        std::vector<std::vector<UnramifiedElement>> P(static_cast<std::size_t>(q) + 1,
                                                      std::vector<UnramifiedElement>(static_cast<std::size_t>(D) + 1, zero));
        if (D >= 1) P[1][1] = a;
        for (int j = 2; j <= q && j <= D; ++j) P[j][j] = P[j - 1][j - 1] * a;
        // pi^k for the coefficients of f^k
        std::vector<UnramifiedElement> pipow(static_cast<std::size_t>(D) + 1, UnramifiedElement::exact(ctx, 1));
        for (int k = 1; k <= D; ++k) pipow[k] = pipow[k - 1] * pi_;
        const BinomialTable binom(ctx, D);
        for (int r = 2; r <= D; ++r) {
            for (int j = 2; j <= q; ++j) {
                if (j >= r) break; // P[j][r] for j == r was set above
                UnramifiedElement acc = zero;
                for (int i = 1; i <= r - j + 1; ++i) {
                    if (is_exact_zero(g[i]) || is_exact_zero(P[j - 1][r - i])) continue;
                    acc += g[i] * P[j - 1][r - i];
                }
                P[j][r] = acc;
            }
            UnramifiedElement s = zero;
            // [f^k]_r = C(k, j) pi^{k-j} with r = k + j(q-1), 1 <= j <= k
            for (int j = 1; j * (q - 1) < r; ++j) {
                const int k = r - j * (q - 1);
                if (k < j || is_exact_zero(g[k])) continue;
                s += g[k] * binom(k, j) * pipow[k - j];
            }
            UnramifiedElement rhs = s - P[q][r];
            if (rhs.vmin() < 1)
                throw IdentityViolation("[a]: degree " + std::to_string(r) + " coefficient not divisible by pi");
            const UnramifiedElement denom = UnramifiedElement::exact(ctx, 1) - pipow[r - 1];
            g[r] = -(rhs.shift(1) * denom.inverse());
            P[1][r] = g[r];
        }
        return g;
    }

    /// Oracle route: [a] = exp(a * lambda(X)), only practical for small D.
    FieldSeries mult_by_via_log(const UnramifiedElement& a) const {
        return exp_.compose(FieldElement(a) * log_);
    }

    /// f^{(n)} = f o ... o f (n times) as an exact polynomial; f^{(0)} = Y.
    Polynomial iterate(int n) const {
        Polynomial f = Polynomial::from_series(f_);
        Polynomial r = Polynomial::monomial(*ctx_, UnramifiedElement::exact(*ctx_, 1), 1);
        for (int i = 0; i < n; ++i) r = f.compose(r);
        return r;
    }

    /// E_n = f^{(n+1)} / f^{(n)}: the minimal polynomial of a primitive
    /// pi^{n+1}-torsion point, Eisenstein of degree q^n (q - 1).
    Polynomial torsion_polynomial(int n) const {
        if (n < 0) throw InvalidArgument("torsion level must be non-negative");
        Polynomial lower = iterate(n);
        Polynomial upper = Polynomial::from_series(f_).compose(lower);
        auto [quo, rem] = upper.divmod(lower);
        for (const auto& c : rem.coefficients())
            if (!c.is_zero()) throw IdentityViolation("f^(n) does not divide f^(n+1)");
        return quo;
    }

    /// The two three-variable expansions F(F(X,Y),Z) and F(X,F(Y,Z)).  Both
    /// reduce to bivariate arithmetic in the powers of F.
    LawSeries assoc_left() const {
        // F(F(X,Y), Z) = sum_j (sum_i c_ij F(X,Y)^i) Z^j
        return expand_outer(law(), /*inner_first=*/true);
    }
    LawSeries assoc_right() const {
        // F(X, F(Y,Z)) = sum_i X^i (sum_j c_ij F(Y,Z)^j)
        return expand_outer(law(), /*inner_first=*/false);
    }

private:
    /// Solves lambda(f(X)) = pi * lambda(X) one degree at a time:
    /// (pi - pi^r) lambda_r = sum_{k<r} lambda_k [f^k]_r.  Only degrees
    /// r = 1 mod (q-1) are nonzero.
    FieldSeries solve_logarithm(const PrimeContext& ctx, int D) const {
        const int q = static_cast<int>(ctx.q);
        FieldSeries lam(ctx, D);
        lam[1] = FieldElement::exact(ctx, 1);
        std::vector<UnramifiedElement> pipow(static_cast<std::size_t>(D) + 1, UnramifiedElement::exact(ctx, 1));
        for (int k = 1; k <= D; ++k) pipow[k] = pipow[k - 1] * pi_;
        const BinomialTable binom(ctx, D);
        for (int r = 2; r <= D; ++r) {
            if ((r - 1) % (q - 1) != 0) continue;
            FieldElement s = FieldElement::exact(ctx, 0);
            for (int j = 1; j * (q - 1) < r; ++j) {
                const int k = r - j * (q - 1);
                if (k < j || is_exact_zero(lam[k])) continue;
                s += lam[k] * FieldElement(binom(k, j) * pipow[k - j]);
            }
            lam[r] = s * FieldElement(pi_ - pipow[r]).inverse();
        }
        return lam;
    }

    LawSeries expand_outer(const LawSeries& F, bool inner_first) const {
        const PrimeContext& ctx = *ctx_;
        const int D = D_;
        // powers of the inner law
        std::vector<LawSeries> pw;
        pw.emplace_back(ctx, 2, D);
        pw[0].at({0, 0, 0}) = UnramifiedElement::exact(ctx, 1);
        for (int i = 1; i <= D; ++i) pw.push_back(pw.back() * F);
        LawSeries out(ctx, 3, D);
        for (int outer = 0; outer <= D; ++outer) {
            // W = sum_inner c * F^inner, with c = c_{inner,outer} or c_{outer,inner}
            LawSeries W(ctx, 2, D);
            for (int inner = 0; inner + outer <= D; ++inner) {
                const UnramifiedElement& c = inner_first ? F.at(inner, outer) : F.at(outer, inner);
                if (is_exact_zero(c)) continue;
                pw[inner].for_each([&](const LawSeries::Exp& e, const UnramifiedElement& x) {
                    if (e[0] + e[1] + outer > D || is_exact_zero(x)) return;
                    W.at(e) += c * x;
                });
            }
            W.for_each([&](const LawSeries::Exp& e, const UnramifiedElement& x) {
                if (e[0] + e[1] + outer > D) return;
                if (inner_first)
                    out.at({e[0], e[1], outer}) = x;  // (X, Y) from inner, Z outer
                else
                    out.at({outer, e[0], e[1]}) = x;  // X outer, (Y, Z) from inner
            });
        }
        return out;
    }

    const PrimeContext* ctx_;
    int D_;
    UnramifiedElement pi_;
    Series f_;
    FieldSeries log_;
    FieldSeries exp_;
    std::shared_ptr<LawSeries> law_;
};

inline FormalGroup build_formal_group(const PrimeContext& ctx, int D, bool with_law = true) {
    return FormalGroup(ctx, D, with_law);
}

/// F(g(X), h(Y)) for univariate g, h with zero constant term.
inline LawSeries apply_law(const LawSeries& F, const Series& g, const Series& h) {
    const PrimeContext& ctx = F.context();
    const int D = F.bound();
    std::vector<Series> gp{Series::constant(ctx, D, UnramifiedElement::exact(ctx, 1))};
    std::vector<Series> hp = gp;
    for (int i = 1; i <= D; ++i) {
        gp.push_back(gp.back() * g.truncate(D));
        hp.push_back(hp.back() * h.truncate(D));
    }
    LawSeries out(ctx, 2, D);
    F.for_each([&](const LawSeries::Exp& e, const UnramifiedElement& c) {
        if (is_exact_zero(c)) return;
        const Series& a = gp[e[0]];
        const Series& b = hp[e[1]];
        for (int i = e[0]; i <= D; ++i) {
            if (is_exact_zero(a[i])) continue;
            for (int j = e[1]; i + j <= D; ++j) {
                if (is_exact_zero(b[j])) continue;
                out.at({i, j, 0}) += c * a[i] * b[j];
            }
        }
    });
    return out;
}

} // namespace ltkit
