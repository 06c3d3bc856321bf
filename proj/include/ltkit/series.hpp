#pragma once

// Truncated power series and polynomials over O or its fraction field.
//
// TruncatedSeries<T> keeps the coefficients of degrees 0..D; everything above
// D is unknown.  T is UnramifiedElement (integral series) or FieldElement
// (series with denominators, such as the logarithm).  Exact zero coefficients
// (zero at the storage cap) are skipped in products, which keeps sparse inputs
// like X + X^q/p cheap without a separate sparse representation.

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "padic.hpp"

namespace ltkit {

template <class T>
inline bool is_exact_zero(const T& x) {
    return x.is_zero() && x.precision() >= x.context().cap;
}

template <class T>
class TruncatedSeries {
public:
    TruncatedSeries() = default;

    /// Exact zero series with degree bound D.
    TruncatedSeries(const PrimeContext& ctx, int D)
        : ctx_(&ctx), c_(static_cast<std::size_t>(checked_bound(D)) + 1, T::exact(ctx, 0)) {}

    static TruncatedSeries variable(const PrimeContext& ctx, int D) {
        TruncatedSeries s(ctx, D);
        if (D >= 1) s.c_[1] = T::exact(ctx, 1);
        return s;
    }

    static TruncatedSeries constant(const PrimeContext& ctx, int D, const T& c) {
        TruncatedSeries s(ctx, D);
        s.c_[0] = c;
        return s;
    }

    /// Monomial c * X^k (zero if k > D).
    static TruncatedSeries monomial(const PrimeContext& ctx, int D, const T& c, int k) {
        TruncatedSeries s(ctx, D);
        if (k <= D) s.c_[static_cast<std::size_t>(k)] = c;
        return s;
    }

    const PrimeContext& context() const { return *ctx_; }
    int bound() const noexcept { return static_cast<int>(c_.size()) - 1; }
    const T& operator[](int k) const { return c_.at(static_cast<std::size_t>(k)); }
    T& operator[](int k) { return c_.at(static_cast<std::size_t>(k)); }
    const std::vector<T>& coefficients() const noexcept { return c_; }

    /// Coefficient k, or exact zero for k > D (used for polynomials only).
    T coeff_or_zero(int k) const {
        if (k < 0 || k > bound()) return T::exact(*ctx_, 0);
        return c_[static_cast<std::size_t>(k)];
    }

    /// Smallest tracked coefficient precision (absolute).
    int precision() const {
        int m = ctx_->cap;
        for (const auto& x : c_) m = std::min(m, x.precision());
        return m;
    }

    /// Largest power of p in any coefficient denominator (0 for integral series).
    int denominator_exponent() const {
        int e = 0;
        for (const auto& x : c_)
            if (!x.is_zero()) e = std::max(e, -x.vmin());
        return e;
    }

    TruncatedSeries truncate(int D) const {
        TruncatedSeries r(*ctx_, std::min(D, bound()));
        for (int k = 0; k <= r.bound(); ++k) r.c_[k] = c_[k];
        return r;
    }

    /// All coefficients reduced to at most `prec` digits.
    TruncatedSeries reduce(int prec) const {
        TruncatedSeries r = *this;
        for (auto& x : r.c_) x = reduce_elem(x, prec);
        return r;
    }

    TruncatedSeries operator-() const {
        TruncatedSeries r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
        check_same(a, b);
        TruncatedSeries r(*a.ctx_, std::min(a.bound(), b.bound()));
        for (int k = 0; k <= r.bound(); ++k) r.c_[k] = a.c_[k] + b.c_[k];
        return r;
    }
    friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
        return a + (-b);
    }

    friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
        check_same(a, b);
        const int D = std::min(a.bound(), b.bound());
        TruncatedSeries r(*a.ctx_, D);
        std::vector<int> nzb;
        for (int j = 0; j <= D; ++j)
            if (!is_exact_zero(b.c_[j])) nzb.push_back(j);
        for (int i = 0; i <= D; ++i) {
            if (is_exact_zero(a.c_[i])) continue;
            for (int j : nzb) {
                if (i + j > D) break;
                r.c_[i + j] += a.c_[i] * b.c_[j];
            }
        }
        return r;
    }

    friend TruncatedSeries operator*(const T& s, const TruncatedSeries& a) {
        TruncatedSeries r = a;
        for (auto& x : r.c_)
            if (!is_exact_zero(x)) x = s * x;
        return r;
    }

    TruncatedSeries& operator+=(const TruncatedSeries& b) { return *this = *this + b; }
    TruncatedSeries& operator-=(const TruncatedSeries& b) { return *this = *this - b; }
    TruncatedSeries& operator*=(const TruncatedSeries& b) { return *this = *this * b; }

    TruncatedSeries pow(unsigned e) const {
        TruncatedSeries r = constant(*ctx_, bound(), T::exact(*ctx_, 1)), b = *this;
        while (e) {
            if (e & 1) r *= b;
            e >>= 1;
            if (e) b *= b;
        }
        return r;
    }

    /// Formal derivative; the result has degree bound D-1.
    TruncatedSeries derivative() const {
        TruncatedSeries r(*ctx_, std::max(bound() - 1, 0));
        for (int k = 1; k <= bound(); ++k) r.c_[k - 1] = T::exact(*ctx_, k) * c_[k];
        return r;
    }

    /// g(h(X)) truncated at min(D_g, D_h).  Requires h(0) = 0, so the unknown
    /// tail of g only touches degrees above the bound.
    TruncatedSeries compose(const TruncatedSeries& h) const {
        check_same(*this, h);
        if (!h.c_[0].is_zero()) throw InvalidArgument("compose: inner series has nonzero constant term");
        const int D = std::min(bound(), h.bound());
        TruncatedSeries hh = h.truncate(D);
        hh.c_[0] = T::exact(*ctx_, 0);
        TruncatedSeries r = constant(*ctx_, D, c_[D]);
        for (int k = D - 1; k >= 0; --k) {
            r = r * hh;
            r.c_[0] += c_[k];
        }
        return r;
    }

    /// Compositional inverse r with h(r(X)) = X mod X^{D+1}.  Requires h(0) = 0
    /// and a unit linear coefficient.  Coefficients are solved one degree at a
    /// time with a table of powers of r.
    TruncatedSeries revert() const {
        const int D = bound();
        if (D < 1) throw InvalidArgument("revert: degree bound must be at least 1");
        if (!c_[0].is_zero()) throw InvalidArgument("revert: nonzero constant term");
        if (!(c_[1].valuation() == Valuation{0, true}))
            throw InvalidArgument("revert: linear coefficient is not a unit");
        const T inv1 = c_[1].inverse();
        TruncatedSeries r(*ctx_, D);
        // P[j][k] = coefficient of X^k in r^j, for 1 <= j <= k <= D
        std::vector<std::vector<T>> P(static_cast<std::size_t>(D) + 1);
        for (int j = 1; j <= D; ++j) P[j].assign(static_cast<std::size_t>(D) + 1, T::exact(*ctx_, 0));
        for (int k = 1; k <= D; ++k) {
            T s = T::exact(*ctx_, 0);
            for (int j = 2; j <= k; ++j) {
                T acc = T::exact(*ctx_, 0);
                for (int i = 1; i <= k - j + 1; ++i) {
                    if (is_exact_zero(r.c_[i]) || is_exact_zero(P[j - 1][k - i])) continue;
                    acc += r.c_[i] * P[j - 1][k - i];
                }
                P[j][k] = acc;
                if (!is_exact_zero(c_[j])) s += c_[j] * acc;
            }
            r.c_[k] = k == 1 ? inv1 : -(s * inv1);
            P[1][k] = r.c_[k];
        }
        return r;
    }

    /// Equality of all coefficients up to their tracked precision.
    bool equals(const TruncatedSeries& b) const {
        const int D = std::min(bound(), b.bound());
        for (int k = 0; k <= D; ++k)
            if (!(c_[k] - b.c_[k]).is_zero()) return false;
        return true;
    }

    /// Equality modulo p^digits (coefficient-wise), up to degree D.
    bool equals_mod(const TruncatedSeries& b, int digits) const {
        const int D = std::min(bound(), b.bound());
        for (int k = 0; k <= D; ++k) {
            auto d = c_[k] - b.c_[k];
            if (d.precision() < digits) throw PrecisionShortfall("series comparison", d.precision(), digits);
            if (d.vmin() < digits) return false;
        }
        return true;
    }

    std::string to_string(char var = 'X') const {
        std::string out;
        for (int k = 0; k <= bound(); ++k) {
            if (c_[k].is_zero()) continue;
            if (!out.empty()) out += " + ";
            out += "(" + c_[k].to_string() + ")";
            if (k >= 1) out += std::string("*") + var;
            if (k >= 2) out += "^" + std::to_string(k);
        }
        if (out.empty()) out = "0";
        return out + " + O(" + var + "^" + std::to_string(bound() + 1) + ")";
    }

private:
    static int checked_bound(int D) {
        if (D < 0) throw InvalidArgument("degree bound must be non-negative");
        return D;
    }
    static void check_same(const TruncatedSeries& a, const TruncatedSeries& b) {
        if (a.ctx_ != b.ctx_ || a.ctx_ == nullptr) throw ContextMismatch();
    }
    static T reduce_elem(const T& x, int prec) {
        if constexpr (std::is_same_v<T, UnramifiedElement>) {
            return x.reduce(prec);
        } else {
            return T(x.numerator().reduce(prec + x.shift()), x.shift());
        }
    }

    const PrimeContext* ctx_ = nullptr;
    std::vector<T> c_;
};

using Series = TruncatedSeries<UnramifiedElement>;
using FieldSeries = TruncatedSeries<FieldElement>;

inline FieldSeries to_field(const Series& s) {
    FieldSeries r(s.context(), s.bound());
    for (int k = 0; k <= s.bound(); ++k) r[k] = FieldElement(s[k]);
    return r;
}

/// Integral series from a field series; throws IdentityViolation when some
/// coefficient keeps a denominator.
inline Series to_integral(const FieldSeries& s, const std::string& what = "series") {
    Series r(s.context(), s.bound());
    for (int k = 0; k <= s.bound(); ++k) {
        if (!s[k].is_integral())
            throw IdentityViolation(what + ": coefficient of degree " + std::to_string(k) +
                                    " is not integral (valuation " + std::to_string(s[k].vmin()) + ")");
        r[k] = s[k].to_integral();
    }
    return r;
}

/// Power series in up to three variables truncated at total degree D.
/// Storage is a dense cube; entries of total degree above D are ignored.
template <class T>
class MultiSeries {
public:
    using Exp = std::array<int, 3>;

    MultiSeries() = default;
    MultiSeries(const PrimeContext& ctx, int nvars, int D)
        : ctx_(&ctx), nvars_(nvars), D_(D),
          c_(static_cast<std::size_t>(cube(nvars, D)), T::exact(ctx, 0)) {
        if (nvars < 1 || nvars > 3) throw InvalidArgument("MultiSeries supports 1 to 3 variables");
    }

    static MultiSeries variable(const PrimeContext& ctx, int nvars, int D, int which) {
        MultiSeries s(ctx, nvars, D);
        Exp e{0, 0, 0};
        e[which] = 1;
        if (D >= 1) s.at(e) = T::exact(ctx, 1);
        return s;
    }

    /// Embeds a univariate series g as g(x_which).
    static MultiSeries from_univariate(const TruncatedSeries<T>& g, int nvars, int D, int which) {
        MultiSeries s(g.context(), nvars, D);
        for (int k = 0; k <= std::min(D, g.bound()); ++k) {
            Exp e{0, 0, 0};
            e[which] = k;
            s.at(e) = g[k];
        }
        return s;
    }

    const PrimeContext& context() const { return *ctx_; }
    int nvars() const noexcept { return nvars_; }
    int bound() const noexcept { return D_; }

    T& at(const Exp& e) { return c_[index(e)]; }
    const T& at(const Exp& e) const { return c_[index(e)]; }
    const T& at(int i, int j = 0, int k = 0) const { return c_[index({i, j, k})]; }

    /// Calls fn(exponent, coefficient) for every coefficient of total degree <= D.
    template <class Fn>
    void for_each(Fn&& fn) const {
        const int D = D_;
        for (int k = 0; k <= (nvars_ >= 3 ? D : 0); ++k)
            for (int j = 0; j <= (nvars_ >= 2 ? D - k : 0); ++j)
                for (int i = 0; i <= D - j - k; ++i) fn(Exp{i, j, k}, c_[index({i, j, k})]);
    }

    MultiSeries operator-() const {
        MultiSeries r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }
    friend MultiSeries operator+(const MultiSeries& a, const MultiSeries& b) {
        check_same(a, b);
        MultiSeries r = a;
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
        return r;
    }
    friend MultiSeries operator-(const MultiSeries& a, const MultiSeries& b) { return a + (-b); }

    friend MultiSeries operator*(const MultiSeries& a, const MultiSeries& b) {
        check_same(a, b);
        MultiSeries r(*a.ctx_, a.nvars_, a.D_);
        auto ta = a.terms(), tb = b.terms();
        for (const auto& [ea, da, xa] : ta) {
            for (const auto& [eb, db, xb] : tb) {
                if (da + db > a.D_) break;
                r.at({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}) += *xa * *xb;
            }
        }
        return r;
    }

    MultiSeries pow(unsigned e) const {
        MultiSeries r(*ctx_, nvars_, D_), b = *this;
        r.at({0, 0, 0}) = T::exact(*ctx_, 1);
        while (e) {
            if (e & 1) r = r * b;
            e >>= 1;
            if (e) b = b * b;
        }
        return r;
    }

    /// g(this) for a univariate g; requires zero constant term.  Sparse g
    /// (such as the logarithm) is handled by powering only the needed degrees.
    MultiSeries substitute_into(const TruncatedSeries<T>& g) const {
        if (!at(0, 0, 0).is_zero()) throw InvalidArgument("substitution needs zero constant term");
        const int D = std::min(D_, g.bound());
        std::vector<int> nz;
        for (int k = 0; k <= D; ++k)
            if (!is_exact_zero(g[k])) nz.push_back(k);
        if (nz.size() * 8 < static_cast<std::size_t>(D)) {
            MultiSeries r(*ctx_, nvars_, D_);
            for (int k : nz) {
                MultiSeries t = pow(static_cast<unsigned>(k));
                for (auto& x : t.c_) x = g[k] * x;
                r = r + t;
            }
            return r;
        }
        MultiSeries r(*ctx_, nvars_, D_);
        r.at({0, 0, 0}) = g[D];
        for (int k = D - 1; k >= 0; --k) {
            r = r * *this;
            r.at({0, 0, 0}) += g[k];
        }
        return r;
    }

    bool equals(const MultiSeries& b) const {
        bool ok = true;
        for_each([&](const Exp& e, const T& x) {
            if (ok && !(x - b.at(e)).is_zero()) ok = false;
        });
        return ok;
    }

    /// Equality modulo p^digits; throws when a coefficient is not tracked that far.
    bool equals_mod(const MultiSeries& b, int digits) const {
        bool ok = true;
        for_each([&](const Exp& e, const T& x) {
            auto d = x - b.at(e);
            if (d.precision() < digits) throw PrecisionShortfall("multivariate comparison", d.precision(), digits);
            if (d.vmin() < digits) ok = false;
        });
        return ok;
    }

    int precision() const {
        int m = ctx_->cap;
        for_each([&](const Exp&, const T& x) { m = std::min(m, x.precision()); });
        return m;
    }

private:
    struct Term {
        Exp e;
        int deg;
        const T* x;
    };

    std::vector<Term> terms() const {
        std::vector<Term> t;
        for_each([&](const Exp& e, const T& x) {
            if (!is_exact_zero(x)) t.push_back({e, e[0] + e[1] + e[2], &x});
        });
        std::stable_sort(t.begin(), t.end(), [](const Term& a, const Term& b) { return a.deg < b.deg; });
        return t;
    }

    static long cube(int nvars, int D) {
        long n = 1;
        for (int i = 0; i < nvars; ++i) n *= D + 1;
        return n;
    }
    std::size_t index(const Exp& e) const {
        const std::size_t w = static_cast<std::size_t>(D_) + 1;
        return static_cast<std::size_t>(e[0]) + w * (static_cast<std::size_t>(e[1]) + w * static_cast<std::size_t>(e[2]));
    }
    static void check_same(const MultiSeries& a, const MultiSeries& b) {
        if (a.ctx_ != b.ctx_ || a.nvars_ != b.nvars_ || a.D_ != b.D_) throw ContextMismatch();
    }

    const PrimeContext* ctx_ = nullptr;
    int nvars_ = 1;
    int D_ = 0;
    std::vector<T> c_;
};

/// Polynomial over O with exact coefficients, stored low degree first.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(const PrimeContext& ctx) : ctx_(&ctx) {}
    Polynomial(const PrimeContext& ctx, std::vector<UnramifiedElement> c) : ctx_(&ctx), c_(std::move(c)) {
        trim();
    }

    static Polynomial monomial(const PrimeContext& ctx, const UnramifiedElement& a, int k) {
        std::vector<UnramifiedElement> c(static_cast<std::size_t>(k) + 1, UnramifiedElement::exact(ctx, 0));
        c[static_cast<std::size_t>(k)] = a;
        return Polynomial(ctx, std::move(c));
    }

    /// Polynomial with the coefficients of a series (degree <= its bound).
    static Polynomial from_series(const Series& s) {
        return Polynomial(s.context(), s.coefficients());
    }

    const PrimeContext& context() const { return *ctx_; }
    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    const std::vector<UnramifiedElement>& coefficients() const noexcept { return c_; }
    UnramifiedElement operator[](int k) const {
        if (k < 0 || k > degree()) return UnramifiedElement::exact(*ctx_, 0);
        return c_[static_cast<std::size_t>(k)];
    }

    Series to_series(int D) const {
        Series s(*ctx_, D);
        for (int k = 0; k <= std::min(D, degree()); ++k) s[k] = c_[k];
        return s;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<UnramifiedElement> c(static_cast<std::size_t>(std::max(a.degree(), b.degree()) + 1),
                                         UnramifiedElement::exact(*a.ctx_, 0));
        for (int k = 0; k < static_cast<int>(c.size()); ++k) c[k] = a[k] + b[k];
        return Polynomial(*a.ctx_, std::move(c));
    }
    Polynomial operator-() const {
        Polynomial r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.c_.empty() || b.c_.empty()) return Polynomial(*a.ctx_);
        std::vector<UnramifiedElement> c(a.c_.size() + b.c_.size() - 1, UnramifiedElement::exact(*a.ctx_, 0));
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (is_exact_zero(a.c_[i])) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) {
                if (is_exact_zero(b.c_[j])) continue;
                c[i + j] += a.c_[i] * b.c_[j];
            }
        }
        return Polynomial(*a.ctx_, std::move(c));
    }

    Polynomial pow(unsigned e) const {
        Polynomial r = monomial(*ctx_, UnramifiedElement::exact(*ctx_, 1), 0), b = *this;
        while (e) {
            if (e & 1) r = r * b;
            e >>= 1;
            if (e) b = b * b;
        }
        return r;
    }

    /// this(h(Y)) by Horner's rule.
    Polynomial compose(const Polynomial& h) const {
        Polynomial r(*ctx_);
        for (int k = degree(); k >= 0; --k)
            r = r * h + monomial(*ctx_, c_[static_cast<std::size_t>(k)], 0);
        return r;
    }

    /// Quotient and remainder by a monic divisor.
    std::pair<Polynomial, Polynomial> divmod(const Polynomial& m) const {
        const int dm = m.degree();
        if (dm < 0 || !(m[dm] - UnramifiedElement::exact(*ctx_, 1)).is_zero())
            throw InvalidArgument("divmod: divisor must be monic");
        std::vector<UnramifiedElement> rem = c_;
        if (degree() < dm) return {Polynomial(*ctx_), *this};
        std::vector<UnramifiedElement> quo(static_cast<std::size_t>(degree() - dm + 1),
                                           UnramifiedElement::exact(*ctx_, 0));
        for (int k = degree(); k >= dm; --k) {
            UnramifiedElement lead = rem[k];
            quo[k - dm] = lead;
            if (is_exact_zero(lead)) continue;
            for (int j = 0; j <= dm; ++j) rem[k - dm + j] -= lead * m[j];
        }
        rem.resize(static_cast<std::size_t>(dm));
        return {Polynomial(*ctx_, std::move(quo)), Polynomial(*ctx_, std::move(rem))};
    }

    bool is_monic() const {
        return degree() >= 0 && (c_.back() - UnramifiedElement::exact(*ctx_, 1)).is_zero();
    }

    /// Monic, constant term of valuation exactly 1, other coefficients divisible by p.
    bool is_eisenstein() const {
        if (!is_monic() || degree() < 1) return false;
        if (!(c_[0].valuation() == Valuation{1, true})) return false;
        for (int k = 1; k < degree(); ++k)
            if (c_[k].vmin() < 1) return false;
        return true;
    }

    bool equals(const Polynomial& b) const {
        for (int k = 0; k <= std::max(degree(), b.degree()); ++k)
            if (!((*this)[k] - b[k]).is_zero()) return false;
        return true;
    }

private:
    void trim() {
        while (!c_.empty() && is_exact_zero(c_.back())) c_.pop_back();
    }

    const PrimeContext* ctx_ = nullptr;
    std::vector<UnramifiedElement> c_;
};

namespace detail {

/// Splits "a + b - c" at top-level signs; signs[i] is the sign before term i.
inline std::vector<std::string_view> split_top_level(std::string_view s, std::vector<int>& signs) {
    std::vector<std::string_view> out;
    int depth = 0;
    std::size_t start = 0;
    int sign = 1;
    auto flush = [&](std::size_t end, bool at_sign) {
        std::string_view t = s.substr(start, end - start);
        while (!t.empty() && t.front() == ' ') t.remove_prefix(1);
        while (!t.empty() && t.back() == ' ') t.remove_suffix(1);
        if (t.empty()) {
            // only a leading sign may have nothing before it
            if (!(at_sign && out.empty() && sign == 1)) throw InvalidArgument("empty term in literal");
            return;
        }
        out.push_back(t);
        signs.push_back(sign);
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
        char ch = s[i];
        if (ch == '(') ++depth;
        else if (ch == ')') --depth;
        else if ((ch == '+' || ch == '-') && depth == 0) {
            flush(i, true);
            sign = ch == '-' ? -1 : 1;
            start = i + 1;
        }
        if (depth < 0) throw InvalidArgument("unbalanced parentheses");
    }
    if (depth != 0) throw InvalidArgument("unbalanced parentheses");
    flush(s.size(), false);
    return out;
}

} // namespace detail

/// Parses a polynomial literal such as "(1+2*w) + 3*X^2 - w*X^5" in the given
/// variable.  Coefficients are integers, w, or parenthesised element literals.
inline Polynomial parse_polynomial(const PrimeContext& ctx, std::string_view s, char var = 'X') {
    std::vector<int> signs;
    auto terms = detail::split_top_level(s, signs);
    if (terms.empty()) throw InvalidArgument("empty polynomial literal");
    Polynomial acc(ctx);
    for (std::size_t t = 0; t < terms.size(); ++t) {
        std::string_view term = terms[t];
        UnramifiedElement coef = UnramifiedElement::exact(ctx, signs[t]);
        int expo = 0;
        int depth = 0;
        std::size_t start = 0;
        std::vector<std::string_view> factors;
        for (std::size_t i = 0; i <= term.size(); ++i) {
            if (i < term.size() && term[i] == '(') ++depth;
            if (i < term.size() && term[i] == ')') --depth;
            if (i == term.size() || (term[i] == '*' && depth == 0)) {
                std::string_view f = term.substr(start, i - start);
                while (!f.empty() && f.front() == ' ') f.remove_prefix(1);
                while (!f.empty() && f.back() == ' ') f.remove_suffix(1);
                if (f.empty()) throw InvalidArgument("empty factor in '" + std::string(term) + "'");
                factors.push_back(f);
                start = i + 1;
            }
        }
        for (auto f : factors) {
            if (f.front() == '(') {
                if (f.back() != ')') throw InvalidArgument("bad factor '" + std::string(f) + "'");
                coef = coef * parse_element(ctx, f.substr(1, f.size() - 2));
            } else if (f.front() == var) {
                int e = 1;
                if (f.size() > 1) {
                    std::size_t i = 1;
                    detail::skip_ws(f, i);
                    if (i >= f.size() || f[i] != '^') throw InvalidArgument("bad power '" + std::string(f) + "'");
                    ++i;
                    auto v = detail::parse_int(f, i);
                    detail::skip_ws(f, i);
                    if (!v || *v < 0 || i != f.size()) throw InvalidArgument("bad exponent '" + std::string(f) + "'");
                    e = static_cast<int>(*v);
                }
                expo += e;
            } else {
                coef = coef * parse_element(ctx, f);
            }
        }
        acc = acc + Polynomial::monomial(ctx, coef, expo);
    }
    return acc;
}

inline Series parse_series(const PrimeContext& ctx, std::string_view s, int D, char var = 'X') {
    Polynomial p = parse_polynomial(ctx, s, var);
    if (p.degree() > D) throw InvalidArgument("series literal exceeds degree bound");
    return p.to_series(D);
}

} // namespace ltkit
