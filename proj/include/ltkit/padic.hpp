#pragma once

// Fixed-precision arithmetic in Z_p and in the ring of integers O of the
// unramified quadratic extension of Q_p.  O = Z_p[w] with w^2 = c, c a
// quadratic non-residue mod p.  Precision is absolute: an element carries the
// exponent k such that it is known modulo p^k.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace ltkit {

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t addmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    std::uint64_t s = a + b; // a, b < m < 2^62, no overflow
    return s >= m ? s - m : s;
}

inline std::uint64_t submod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return a >= b ? a - b : a + m - b;
}

inline std::uint64_t reduce_signed(std::int64_t x, std::uint64_t m) {
    __int128 r = static_cast<__int128>(x) % static_cast<__int128>(m);
    if (r < 0) r += m;
    return static_cast<std::uint64_t>(r);
}

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

/// Inverse of a modulo m; requires gcd(a, m) = 1.
inline std::uint64_t invmod(std::uint64_t a, std::uint64_t m) {
    __int128 t = 0, nt = 1, r = m, nr = a % m;
    while (nr != 0) {
        __int128 qt = r / nr;
        std::tie(t, nt) = std::make_pair(nt, t - qt * nt);
        std::tie(r, nr) = std::make_pair(nr, r - qt * nr);
    }
    if (r != 1) throw InvalidArgument("invmod: not invertible");
    if (t < 0) t += m;
    return static_cast<std::uint64_t>(t);
}

inline int vp_u64(std::uint64_t x, std::uint64_t p) {
    int v = 0;
    while (x != 0 && x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

} // namespace detail

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

/// Legendre-style quadratic residue test for c mod an odd prime p.
inline bool is_square_mod(std::int64_t c, std::uint64_t p) {
    std::uint64_t r = detail::reduce_signed(c, p);
    if (r == 0) return true;
    return detail::powmod(r, (p - 1) / 2, p) == 1;
}

/// Prime, working precision and the quadratic generator w^2 = c.
struct PrimeContext {
    std::uint32_t p = 3;
    std::uint64_t q = 9;
    int precision = 12;      ///< default digits for user-created elements
    int cap = 39;            ///< largest storable precision (p^cap < 2^62)
    std::int64_t nonresidue = -1; ///< c in the residue generator X^2 - c
    std::vector<std::uint64_t> powers; ///< p^0 .. p^cap

    std::uint64_t modulus(int k) const { return powers.at(static_cast<std::size_t>(k)); }

    /// Residue generator as "X^2+1" / "X^2-2".
    std::string residue_generator() const {
        std::ostringstream os;
        os << "X^2";
        if (nonresidue < 0)
            os << "+" << -nonresidue;
        else
            os << "-" << nonresidue;
        return os.str();
    }

    /// c mod p^k as an unsigned residue.
    std::uint64_t c_mod(int k) const { return detail::reduce_signed(nonresidue, modulus(k)); }
};

/// Interned context for (p, N).  The returned reference stays valid for the
/// lifetime of the program; equal (p, N) yield the same object.
inline const PrimeContext& make_context(std::int64_t p, int N) {
    if (p < 3 || p % 2 == 0 || !is_prime(static_cast<std::uint64_t>(p)))
        throw InvalidArgument("p not an odd prime");
    if (N < 1) throw InvalidArgument("precision must be positive");
    static std::mutex mu;
    static std::map<std::pair<std::int64_t, int>, std::unique_ptr<PrimeContext>> registry;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(p, N);
    auto it = registry.find(key);
    if (it != registry.end()) return *it->second;

    auto ctx = std::make_unique<PrimeContext>();
    ctx->p = static_cast<std::uint32_t>(p);
    ctx->q = static_cast<std::uint64_t>(p) * static_cast<std::uint64_t>(p);
    std::uint64_t pw = 1;
    ctx->powers.push_back(1);
    const std::uint64_t limit = std::uint64_t{1} << 62;
    while (pw <= limit / static_cast<std::uint64_t>(p)) {
        pw *= static_cast<std::uint64_t>(p);
        ctx->powers.push_back(pw);
    }
    ctx->cap = static_cast<int>(ctx->powers.size()) - 1;
    if (N > ctx->cap)
        throw InvalidArgument("precision " + std::to_string(N) + " exceeds storable maximum " +
                              std::to_string(ctx->cap) + " for p=" + std::to_string(p));
    ctx->precision = N;
    if (p % 4 == 3) {
        ctx->nonresidue = -1;
    } else {
        std::int64_t c = 2;
        while (is_square_mod(c, static_cast<std::uint64_t>(p))) ++c;
        ctx->nonresidue = c;
    }
    const PrimeContext& ref = *ctx;
    registry.emplace(key, std::move(ctx));
    return ref;
}

/// p-adic valuation with an exactness flag: when `exact` is false the element
/// is zero to its precision and `value` only bounds the valuation from below.
struct Valuation {
    int value = 0;
    bool exact = true;

    bool operator==(const Valuation&) const = default;
};

/// Element a + b*w of O known modulo p^precision.
class UnramifiedElement {
public:
    UnramifiedElement() = default;

    UnramifiedElement(const PrimeContext& ctx, std::int64_t a, std::int64_t b = 0)
        : UnramifiedElement(ctx, a, b, ctx.precision) {}

    UnramifiedElement(const PrimeContext& ctx, std::int64_t a, std::int64_t b, int prec)
        : ctx_(&ctx), prec_(std::clamp(prec, 0, ctx.cap)) {
        const std::uint64_t m = ctx.modulus(prec_);
        a_ = detail::reduce_signed(a, m);
        b_ = detail::reduce_signed(b, m);
    }

    /// Element from residues already reduced modulo p^prec.
    static UnramifiedElement from_residues(const PrimeContext& ctx, std::uint64_t a,
                                           std::uint64_t b, int prec) {
        UnramifiedElement x;
        x.ctx_ = &ctx;
        x.prec_ = std::clamp(prec, 0, ctx.cap);
        const std::uint64_t m = ctx.modulus(x.prec_);
        x.a_ = a % m;
        x.b_ = b % m;
        return x;
    }

    /// Exact constant: stored at the maximal precision of the context.
    static UnramifiedElement exact(const PrimeContext& ctx, std::int64_t a, std::int64_t b = 0) {
        return UnramifiedElement(ctx, a, b, ctx.cap);
    }

    static UnramifiedElement zero(const PrimeContext& ctx, int prec) {
        return UnramifiedElement(ctx, 0, 0, prec);
    }

    /// Same context and precision as `like`, value zero.
    static UnramifiedElement zero_like(const UnramifiedElement& like) {
        return UnramifiedElement(like.context(), 0, 0, like.prec_);
    }

    const PrimeContext& context() const {
        if (!ctx_) throw InvalidArgument("uninitialised element");
        return *ctx_;
    }
    const PrimeContext* context_ptr() const noexcept { return ctx_; }
    int precision() const noexcept { return prec_; }
    std::uint64_t a() const noexcept { return a_; }
    std::uint64_t b() const noexcept { return b_; }

    bool is_zero() const noexcept { return a_ == 0 && b_ == 0; }

    Valuation valuation() const {
        if (is_zero()) return {prec_, false};
        const std::uint64_t p = ctx_->p;
        int va = a_ == 0 ? prec_ : detail::vp_u64(a_, p);
        int vb = b_ == 0 ? prec_ : detail::vp_u64(b_, p);
        return {std::min(va, vb), true};
    }

    /// Lower bound for the valuation (equal to it unless the element is zero).
    int vmin() const { return valuation().value; }

    bool is_unit() const { return prec_ > 0 && valuation() == Valuation{0, true}; }

    /// Residue class in F_q as (a mod p, b mod p).
    std::pair<std::uint32_t, std::uint32_t> residue() const {
        if (prec_ == 0) throw PrecisionShortfall("residue", 0, 1);
        return {static_cast<std::uint32_t>(a_ % ctx_->p), static_cast<std::uint32_t>(b_ % ctx_->p)};
    }

    /// Same value known to fewer digits.
    UnramifiedElement reduce(int prec) const {
        return from_residues(*ctx_, a_, b_, std::min(prec, prec_));
    }

    /// Raise the recorded precision; only valid when the caller knows the
    /// stored representative is exact to `prec` digits.
    UnramifiedElement assume_precision(int prec) const {
        UnramifiedElement x = *this;
        x.prec_ = std::clamp(prec, 0, ctx_->cap);
        return x;
    }

    UnramifiedElement operator-() const {
        const std::uint64_t m = ctx_->modulus(prec_);
        return from_residues(*ctx_, a_ == 0 ? 0 : m - a_, b_ == 0 ? 0 : m - b_, prec_);
    }

    friend UnramifiedElement operator+(const UnramifiedElement& x, const UnramifiedElement& y) {
        check_same(x, y);
        const int prec = std::min(x.prec_, y.prec_);
        const std::uint64_t m = x.ctx_->modulus(prec);
        return from_residues(*x.ctx_, detail::addmod(x.a_ % m, y.a_ % m, m),
                             detail::addmod(x.b_ % m, y.b_ % m, m), prec);
    }

    friend UnramifiedElement operator-(const UnramifiedElement& x, const UnramifiedElement& y) {
        check_same(x, y);
        const int prec = std::min(x.prec_, y.prec_);
        const std::uint64_t m = x.ctx_->modulus(prec);
        return from_residues(*x.ctx_, detail::submod(x.a_ % m, y.a_ % m, m),
                             detail::submod(x.b_ % m, y.b_ % m, m), prec);
    }

    friend UnramifiedElement operator*(const UnramifiedElement& x, const UnramifiedElement& y) {
        check_same(x, y);
        const int prec = std::min({x.prec_ + y.vmin(), y.prec_ + x.vmin(), x.ctx_->cap});
        const std::uint64_t m = x.ctx_->modulus(prec);
        const std::uint64_t a1 = x.a_ % m, b1 = x.b_ % m, a2 = y.a_ % m, b2 = y.b_ % m;
        const std::uint64_t c = x.ctx_->c_mod(prec);
        std::uint64_t re = detail::addmod(detail::mulmod(a1, a2, m),
                                          detail::mulmod(c, detail::mulmod(b1, b2, m), m), m);
        std::uint64_t im = detail::addmod(detail::mulmod(a1, b2, m), detail::mulmod(b1, a2, m), m);
        return from_residues(*x.ctx_, re, im, prec);
    }

    UnramifiedElement& operator+=(const UnramifiedElement& y) { return *this = *this + y; }
    UnramifiedElement& operator-=(const UnramifiedElement& y) { return *this = *this - y; }
    UnramifiedElement& operator*=(const UnramifiedElement& y) { return *this = *this * y; }

    UnramifiedElement pow(std::uint64_t e) const {
        UnramifiedElement r = exact(*ctx_, 1), b = *this;
        while (e) {
            if (e & 1) r *= b;
            e >>= 1;
            if (e) b *= b;
        }
        return r;
    }

    /// Inverse of a unit.
    UnramifiedElement inverse() const {
        if (!is_unit()) throw InvalidArgument("inverse of a non-unit in O");
        const std::uint64_t m = ctx_->modulus(prec_);
        const std::uint64_t c = ctx_->c_mod(prec_);
        std::uint64_t norm = detail::submod(detail::mulmod(a_, a_, m),
                                            detail::mulmod(c, detail::mulmod(b_, b_, m), m), m);
        std::uint64_t ninv = detail::invmod(norm, m);
        return from_residues(*ctx_, detail::mulmod(a_, ninv, m),
                             detail::submod(0, detail::mulmod(b_, ninv, m), m), prec_);
    }

    /// The arithmetic Frobenius: the non-trivial automorphism w -> -w.
    UnramifiedElement frobenius() const {
        const std::uint64_t m = ctx_->modulus(prec_);
        return from_residues(*ctx_, a_, b_ == 0 ? 0 : m - b_, prec_);
    }

    /// Exact division by p^k; the result is known to k fewer digits.
    UnramifiedElement shift(int k) const {
        if (k < 0) return scale(-k);
        if (k > prec_ || vmin() < k)
            throw InvalidArgument("shift: element not divisible by p^" + std::to_string(k));
        const std::uint64_t d = ctx_->modulus(k);
        return from_residues(*ctx_, a_ / d, b_ / d, prec_ - k);
    }

    /// Multiplication by p^k; gains k digits up to the storage cap.
    UnramifiedElement scale(int k) const {
        const int prec = std::min(prec_ + k, ctx_->cap);
        const std::uint64_t m = ctx_->modulus(prec);
        const std::uint64_t pk = ctx_->modulus(std::min(k, ctx_->cap));
        return from_residues(*ctx_, detail::mulmod(a_, pk, m), detail::mulmod(b_, pk, m), prec);
    }

    /// Equality up to the smaller of the two precisions.
    bool equals(const UnramifiedElement& y) const { return (*this - y).is_zero(); }
    friend bool operator==(const UnramifiedElement& x, const UnramifiedElement& y) {
        return x.equals(y);
    }

    /// Canonical text form "a+b*w mod p^N".
    std::string to_string() const {
        std::ostringstream os;
        os << a_ << "+" << b_ << "*w mod " << ctx_->p << "^" << prec_;
        return os.str();
    }

private:
    static void check_same(const UnramifiedElement& x, const UnramifiedElement& y) {
        if (x.ctx_ != y.ctx_ || x.ctx_ == nullptr) throw ContextMismatch();
    }

    const PrimeContext* ctx_ = nullptr;
    std::uint64_t a_ = 0;
    std::uint64_t b_ = 0;
    int prec_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const UnramifiedElement& x) {
    return os << x.to_string();
}

/// Teichmuller lift of the residue r0 + r1*w in F_q: the unique root of
/// x^q = x reducing to it.
inline UnramifiedElement teichmuller(const PrimeContext& ctx, std::int64_t r0, std::int64_t r1,
                                     int prec) {
    UnramifiedElement x(ctx, detail::reduce_signed(r0, ctx.p), detail::reduce_signed(r1, ctx.p),
                        prec);
    for (int it = 0; it <= prec + 1; ++it) {
        UnramifiedElement y = x.pow(ctx.q);
        y = y.reduce(prec);
        if (y.a() == x.a() && y.b() == x.b()) return x;
        x = y;
    }
    return x;
}

inline UnramifiedElement teichmuller(const PrimeContext& ctx, std::int64_t r0, std::int64_t r1 = 0) {
    return teichmuller(ctx, r0, r1, ctx.precision);
}

namespace detail {

inline void skip_ws(std::string_view s, std::size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline std::optional<std::int64_t> parse_int(std::string_view s, std::size_t& i) {
    skip_ws(s, i);
    bool neg = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
        neg = s[i] == '-';
        ++i;
    }
    skip_ws(s, i);
    if (i >= s.size() || s[i] < '0' || s[i] > '9') return std::nullopt;
    __int128 v = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
        v = v * 10 + (s[i] - '0');
        if (v > std::numeric_limits<std::int64_t>::max())
            throw InvalidArgument("integer literal too large");
        ++i;
    }
    return static_cast<std::int64_t>(neg ? -v : v);
}

} // namespace detail

/// Parses "a+b*w mod p^N", "a+b*w", "a", "b*w", "w" (with optional signs).
/// Without a " mod p^N" suffix the context precision is used.
inline UnramifiedElement parse_element(const PrimeContext& ctx, std::string_view s) {
    std::string_view body = s;
    int prec = ctx.precision;
    if (auto pos = s.find("mod"); pos != std::string_view::npos) {
        body = s.substr(0, pos);
        std::size_t i = pos + 3;
        auto pp = detail::parse_int(s, i);
        detail::skip_ws(s, i);
        if (!pp || i >= s.size() || s[i] != '^') throw InvalidArgument("bad modulus in '" + std::string(s) + "'");
        ++i;
        auto nn = detail::parse_int(s, i);
        detail::skip_ws(s, i);
        if (!nn || i != s.size()) throw InvalidArgument("bad modulus in '" + std::string(s) + "'");
        if (*pp != ctx.p) throw InvalidArgument("element prime does not match context");
        if (*nn < 0 || *nn > ctx.cap) throw InvalidArgument("element precision out of range");
        prec = static_cast<int>(*nn);
    }
    std::int64_t a = 0, b = 0;
    std::size_t i = 0;
    bool any = false;
    while (true) {
        detail::skip_ws(body, i);
        if (i >= body.size()) break;
        int sign = 1;
        if (body[i] == '+' || body[i] == '-') {
            sign = body[i] == '-' ? -1 : 1;
            ++i;
            detail::skip_ws(body, i);
        } else if (any) {
            throw InvalidArgument("bad element literal '" + std::string(s) + "'");
        }
        std::int64_t coef = 1;
        bool have_num = false;
        if (i < body.size() && body[i] >= '0' && body[i] <= '9') {
            coef = *detail::parse_int(body, i);
            have_num = true;
            detail::skip_ws(body, i);
        }
        bool is_w = false;
        if (i < body.size() && body[i] == '*') {
            if (!have_num) throw InvalidArgument("bad element literal '" + std::string(s) + "'");
            ++i;
            detail::skip_ws(body, i);
            if (i >= body.size() || body[i] != 'w') throw InvalidArgument("expected 'w' in '" + std::string(s) + "'");
            ++i;
            is_w = true;
        } else if (i < body.size() && body[i] == 'w') {
            if (have_num) throw InvalidArgument("expected '*' before 'w'");
            ++i;
            is_w = true;
        } else if (!have_num) {
            throw InvalidArgument("bad element literal '" + std::string(s) + "'");
        }
        (is_w ? b : a) += sign * coef;
        any = true;
    }
    if (!any) throw InvalidArgument("empty element literal");
    return UnramifiedElement(ctx, a, b, prec);
}

/// Element of the fraction field: num / p^shift with num in O.  After
/// normalisation shift > 0 only when num is a unit (or nothing is known).
class FieldElement {
public:
    FieldElement() = default;
    FieldElement(UnramifiedElement num, int shift = 0) : num_(std::move(num)), shift_(shift) {
        normalize();
    }

    static FieldElement exact(const PrimeContext& ctx, std::int64_t a, std::int64_t b = 0) {
        return FieldElement(UnramifiedElement::exact(ctx, a, b));
    }
    static FieldElement zero(const PrimeContext& ctx, int prec) {
        return FieldElement(UnramifiedElement::zero(ctx, prec));
    }
    static FieldElement zero_like(const FieldElement& like) {
        return FieldElement(UnramifiedElement::zero(like.context(), like.num_.precision()), like.shift_);
    }
    /// Exact rational a / p^k.
    static FieldElement ratio(const PrimeContext& ctx, std::int64_t a, int k) {
        return FieldElement(UnramifiedElement::exact(ctx, a), k);
    }

    const PrimeContext& context() const { return num_.context(); }
    const PrimeContext* context_ptr() const noexcept { return num_.context_ptr(); }
    const UnramifiedElement& numerator() const noexcept { return num_; }
    int shift() const noexcept { return shift_; }

    /// Absolute precision: the value is known modulo p^abs_precision().
    int abs_precision() const noexcept { return num_.precision() - shift_; }
    int precision() const noexcept { return abs_precision(); }

    Valuation valuation() const {
        Valuation v = num_.valuation();
        return {v.value - shift_, v.exact};
    }
    int vmin() const { return valuation().value; }
    bool is_zero() const noexcept { return num_.is_zero(); }
    bool is_integral() const { return shift_ == 0 || num_.is_zero(); }

    /// The element as a member of O; throws when it has a denominator.
    UnramifiedElement to_integral() const {
        if (shift_ == 0) return num_;
        if (num_.is_zero()) return UnramifiedElement::zero(context(), 0);
        throw InvalidArgument("element is not integral");
    }

    FieldElement operator-() const { return FieldElement(-num_, shift_); }

    friend FieldElement operator+(const FieldElement& x, const FieldElement& y) {
        const int s = std::max(x.shift_, y.shift_);
        return FieldElement(x.num_.scale(s - x.shift_) + y.num_.scale(s - y.shift_), s);
    }
    friend FieldElement operator-(const FieldElement& x, const FieldElement& y) { return x + (-y); }
    friend FieldElement operator*(const FieldElement& x, const FieldElement& y) {
        return FieldElement(x.num_ * y.num_, x.shift_ + y.shift_);
    }
    FieldElement& operator+=(const FieldElement& y) { return *this = *this + y; }
    FieldElement& operator-=(const FieldElement& y) { return *this = *this - y; }
    FieldElement& operator*=(const FieldElement& y) { return *this = *this * y; }

    FieldElement inverse() const {
        Valuation v = num_.valuation();
        if (!v.exact) throw InvalidArgument("inverse of zero");
        UnramifiedElement u = num_.shift(v.value).inverse();
        const int e = shift_ - v.value; // value = p^{-e} u
        if (e >= 0) return FieldElement(u.scale(e));
        return FieldElement(u, -e);
    }

    FieldElement pow(std::uint64_t e) const {
        FieldElement r = exact(context(), 1), b = *this;
        while (e) {
            if (e & 1) r *= b;
            e >>= 1;
            if (e) b *= b;
        }
        return r;
    }

    /// Multiplication by p^k (k may be negative).
    FieldElement scale(int k) const {
        if (k >= 0) return FieldElement(num_.scale(k), shift_);
        return FieldElement(num_, shift_ - k);
    }

    FieldElement frobenius() const { return FieldElement(num_.frobenius(), shift_); }

    bool equals(const FieldElement& y) const { return (*this - y).is_zero(); }
    friend bool operator==(const FieldElement& x, const FieldElement& y) { return x.equals(y); }

    std::string to_string() const {
        if (shift_ == 0) return num_.to_string();
        return "(" + num_.to_string() + ")/" + std::to_string(context().p) + "^" + std::to_string(shift_);
    }

private:
    void normalize() {
        if (!num_.context_ptr()) return;
        if (shift_ < 0) {
            num_ = num_.scale(-shift_);
            shift_ = 0;
        }
        if (shift_ == 0) return;
        int k = std::min({shift_, num_.vmin(), num_.precision()});
        if (k > 0) {
            num_ = num_.shift(k);
            shift_ -= k;
        }
    }

    UnramifiedElement num_;
    int shift_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const FieldElement& x) { return os << x.to_string(); }

} // namespace ltkit
