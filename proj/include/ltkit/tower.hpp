#pragma once

// The torsion tower Phi_n = Phi(F[pi^{n+1}]).  Elements are polynomials of
// degree < d_n = q^n (q-1) in the torsion point v_n with coefficients in O,
// reduced modulo the Eisenstein polynomial E_n.
//
// Precision of a tower element is measured in units of v(v_n) = 1/d_n: an
// element with precision K is known modulo v_n^K.  Coordinates are stored
// modulo p^W for a per-level working exponent W chosen so that products of
// coordinates can be accumulated in 128-bit integers without reduction.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "lubin_tate.hpp"
#include "padic.hpp"
#include "series.hpp"

namespace ltkit {

/// Residues a + b*w modulo the working modulus of a level.
struct Zq {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    bool is_zero() const noexcept { return a == 0 && b == 0; }
    bool operator==(const Zq&) const = default;
};

/// A unit of O modulo p^{n+1}.
struct UnitClass {
    std::uint64_t a = 1;
    std::uint64_t b = 0;
    bool operator==(const UnitClass&) const = default;
    bool operator<(const UnitClass& o) const { return a != o.a ? a < o.a : b < o.b; }
};

class TowerLevel;
using LevelPtr = std::shared_ptr<const TowerLevel>;

class TowerElement;

namespace detail {

inline int ceil_div(int a, int b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }

} // namespace detail

class TowerLevel : public std::enable_shared_from_this<TowerLevel> {
public:
    /// Use build_level(); the constructor only fills the tables that do not
    /// need tower elements of this level.
    TowerLevel(const FormalGroup& fg, int n, LevelPtr lower);

    const PrimeContext& context() const { return *ctx_; }
    const FormalGroup& formal_group() const { return fg_; }
    int n() const noexcept { return n_; }
    int degree() const noexcept { return d_; }
    int ramification_index() const noexcept { return d_; }
    /// Working exponent: coordinates are stored modulo p^W.
    int working_digits() const noexcept { return W_; }
    std::uint64_t modulus() const noexcept { return M_; }
    std::uint64_t c_mod() const noexcept { return cm_; }
    const Polynomial& minimal_polynomial() const { return E_; }
    const LevelPtr& lower() const noexcept { return lower_; }
    /// v(E_n'(v_n)) in units of 1/d: the different exponent.
    int different_units() const noexcept { return different_; }

    /// Trace of v_n^j, j < d (integers mod p^W).
    const std::vector<std::uint64_t>& power_sums() const noexcept { return ps_; }

    // -- unit group (O / p^{n+1})^x --------------------------------------
    std::uint64_t unit_modulus() const noexcept { return um_; }
    const std::vector<UnitClass>& units() const noexcept { return units_; }
    int unit_index(const UnitClass& u) const {
        auto it = unit_pos_.find(u);
        if (it == unit_pos_.end()) throw InvalidArgument("not a unit class at this level");
        return it->second;
    }
    UnitClass unit_of(const UnramifiedElement& u) const {
        if (!u.is_unit()) throw InvalidArgument("not a unit");
        return {u.a() % um_, u.b() % um_};
    }
    UnitClass unit_mul(const UnitClass& x, const UnitClass& y) const {
        const std::uint64_t m = um_;
        const std::uint64_t c = detail::reduce_signed(ctx_->nonresidue, m);
        return {detail::addmod(detail::mulmod(x.a, y.a, m), detail::mulmod(c, detail::mulmod(x.b, y.b, m), m), m),
                detail::addmod(detail::mulmod(x.a, y.b, m), detail::mulmod(x.b, y.a, m), m)};
    }
    UnitClass unit_inverse(const UnitClass& x) const {
        auto e = UnramifiedElement::from_residues(*ctx_, x.a, x.b, n_ + 1).inverse();
        return {e.a(), e.b()};
    }
    /// The class as an exact element of O (canonical representative).
    UnramifiedElement unit_element(const UnitClass& u) const {
        return UnramifiedElement::from_residues(*ctx_, u.a, u.b, ctx_->cap);
    }

    /// H_n = mu_{q-1} * (Z/p^{n+1})^x and the cyclic quotient generated by 1 + p*w.
    bool in_H(const UnitClass& u) const { return coset_[unit_index(u)] == 0; }
    int coset_index(const UnitClass& u) const { return coset_[unit_index(u)]; }
    int coset_index(int unit_idx) const { return coset_[unit_idx]; }
    /// Number of cosets: p^n = [Psi_n : Phi].
    int quotient_order() const noexcept { return qorder_; }
    /// Unit indices of gamma^k, k = 0 .. p^n - 1.
    const std::vector<int>& coset_representatives() const noexcept { return reps_; }
    std::vector<int> H_indices() const {
        std::vector<int> out;
        for (int i = 0; i < static_cast<int>(units_.size()); ++i)
            if (coset_[i] == 0) out.push_back(i);
        return out;
    }

    bool has_galois() const noexcept { return !images_.empty(); }

    /// [c](v_n) for a unit c, as the root of f(Y) = [c](v_{n-1}) nearest the truncated series.
    TowerElement torsion_image(const UnramifiedElement& c) const;

    /// sigma_u(x) with sigma_u(v_n) = [u^{-1}](v_n).  Needs the Galois tables.
    TowerElement galois_act(const UnitClass& u, const TowerElement& x) const;
    TowerElement galois_act_index(int unit_idx, const TowerElement& x) const;

    /// x(v_{n-1}) for x at the level below, using v_{n-1} = f(v_n).
    TowerElement embed(const TowerElement& x) const;

    // -- raw coordinate arithmetic (used by TowerElement) ---------------------
    Zq zmul(const Zq& x, const Zq& y) const {
        const std::uint64_t m = M_;
        std::uint64_t re = detail::addmod(detail::mulmod(x.a, y.a, m), detail::mulmod(cm_, detail::mulmod(x.b, y.b, m), m), m);
        std::uint64_t im = detail::addmod(detail::mulmod(x.a, y.b, m), detail::mulmod(x.b, y.a, m), m);
        return {re, im};
    }
    Zq zadd(const Zq& x, const Zq& y) const { return {detail::addmod(x.a, y.a, M_), detail::addmod(x.b, y.b, M_)}; }
    Zq zsub(const Zq& x, const Zq& y) const { return {detail::submod(x.a, y.a, M_), detail::submod(x.b, y.b, M_)}; }
    Zq zscale(const Zq& x, std::uint64_t k) const { return {detail::mulmod(x.a, k, M_), detail::mulmod(x.b, k, M_)}; }

    /// Product of coordinate vectors reduced modulo E_n.
    std::vector<Zq> multiply(const std::vector<Zq>& x, const std::vector<Zq>& y) const;
    /// Coordinates of v_n * x.
    std::vector<Zq> shift_by_v(const std::vector<Zq>& x) const;

private:
    friend class TowerElement;
    friend LevelPtr build_level(const FormalGroup& fg, int n, bool allow_expensive);

    void build_embedding();
    void build_galois();

    const PrimeContext* ctx_;
    FormalGroup fg_;
    int n_;
    int d_;
    int W_;
    std::uint64_t M_;
    std::uint64_t cm_;
    Polynomial E_;
    std::vector<std::pair<int, std::uint64_t>> red_; // v^d = sum red_j v^j
    std::vector<std::uint64_t> ps_;
    int different_ = 0;
    LevelPtr lower_;
    std::vector<std::vector<Zq>> lower_basis_; // f(v_n)^j for j < d_{n-1}

    std::uint64_t um_;
    std::vector<UnitClass> units_;
    std::map<UnitClass, int> unit_pos_;
    std::vector<int> coset_;
    std::vector<int> reps_;
    int qorder_ = 1;

    // images_[u][j] = coordinates of sigma_u(v_n)^j
    std::vector<std::vector<std::vector<Zq>>> images_;
    std::vector<int> image_prec_;

    mutable std::mutex cache_mu_;
    mutable std::map<UnitClass, std::pair<std::vector<Zq>, int>> torsion_cache_;
};

/// Element p^{-s} * sum_j c_j v_n^j of Phi_n.
class TowerElement {
public:
    TowerElement() = default;

    /// Exact zero.
    explicit TowerElement(LevelPtr L) : L_(std::move(L)) {
        c_.assign(static_cast<std::size_t>(L_->d_), Zq{});
        K_ = max_K();
    }

    TowerElement(LevelPtr L, std::vector<Zq> coords, int K, int s = 0)
        : L_(std::move(L)), c_(std::move(coords)), K_(K), s_(s) {
        if (static_cast<int>(c_.size()) != L_->d_) throw InvalidArgument("coordinate vector has wrong length");
        normalize();
    }

    static TowerElement constant(LevelPtr L, const UnramifiedElement& x) {
        TowerElement r(L);
        r.c_[0] = {x.a() % L->modulus(), x.b() % L->modulus()};
        r.K_ = std::min(r.max_K(), x.precision() * L->degree());
        r.normalize();
        return r;
    }
    static TowerElement constant(LevelPtr L, const FieldElement& x) {
        TowerElement r = constant(L, x.numerator());
        r.s_ = x.shift();
        r.normalize();
        return r;
    }
    static TowerElement constant(LevelPtr L, std::int64_t k) {
        return constant(L, UnramifiedElement::exact(L->context(), k));
    }
    /// The torsion point v_n.
    static TowerElement uniformizer(LevelPtr L) {
        TowerElement r(L);
        if (L->degree() == 1) throw InvalidArgument("degenerate level");
        r.c_[1] = {1, 0};
        return r;
    }

    const TowerLevel& level() const { return *L_; }
    const LevelPtr& level_ptr() const noexcept { return L_; }
    int degree() const { return L_->d_; }
    const std::vector<Zq>& raw() const noexcept { return c_; }
    /// Precision of the numerator in units of 1/d.
    int raw_precision() const noexcept { return K_; }
    int denominator_exponent() const noexcept { return s_; }

    /// Absolute precision of the value, in units of 1/d.
    int precision_units() const noexcept { return K_ - L_->d_ * s_; }
    /// Absolute precision in whole p-adic digits (rounded down).
    int precision_digits() const {
        int u = precision_units();
        return u >= 0 ? u / L_->d_ : -detail::ceil_div(-u, L_->d_);
    }

    /// Valuation of the value in units of 1/d; exact == false means the
    /// element is zero to its precision and the value is a lower bound.
    Valuation valuation() const {
        auto [v, exact] = num_valuation();
        return {v - L_->d_ * s_, exact};
    }
    bool is_zero() const { return !num_valuation().second; }

    /// Coordinate j of the value, as an element of the fraction field of O.
    FieldElement coordinate(int j) const {
        const auto& x = c_.at(static_cast<std::size_t>(j));
        return FieldElement(UnramifiedElement::from_residues(L_->context(), x.a, x.b, coord_prec(j)), s_);
    }

    /// True when every coordinate of positive degree vanishes to precision.
    bool in_base() const {
        for (int j = 1; j < L_->d_; ++j)
            if (!c_[j].is_zero()) return false;
        return true;
    }
    FieldElement to_base() const {
        if (!in_base()) throw IdentityViolation("tower element does not lie in the base field");
        return coordinate(0);
    }

    TowerElement operator-() const {
        TowerElement r = *this;
        for (auto& x : r.c_) x = L_->zsub(Zq{}, x);
        return r;
    }

    friend TowerElement operator+(const TowerElement& x, const TowerElement& y) {
        check_same(x, y);
        if (x.s_ < y.s_) return y + x;
        // x has the larger denominator; bring y to it
        const int delta = x.s_ - y.s_;
        const TowerLevel& L = *x.L_;
        const std::uint64_t pk = delta >= L.working_digits() ? 0 : L.context().modulus(delta);
        TowerElement r = x;
        for (int j = 0; j < L.degree(); ++j) r.c_[j] = L.zadd(x.c_[j], L.zscale(y.c_[j], pk));
        r.K_ = std::min(x.K_, y.K_ + L.degree() * delta);
        r.normalize();
        return r;
    }
    friend TowerElement operator-(const TowerElement& x, const TowerElement& y) { return x + (-y); }

    friend TowerElement operator*(const TowerElement& x, const TowerElement& y) {
        check_same(x, y);
        auto [vx, ex] = x.num_valuation();
        auto [vy, ey] = y.num_valuation();
        TowerElement r(x.L_, x.L_->multiply(x.c_, y.c_), std::min(x.K_ + vy, y.K_ + vx), x.s_ + y.s_);
        return r;
    }

    friend TowerElement operator*(const UnramifiedElement& a, const TowerElement& x) {
        const TowerLevel& L = *x.L_;
        Zq z{a.a() % L.modulus(), a.b() % L.modulus()};
        TowerElement r = x;
        for (auto& c : r.c_) c = L.zmul(c, z);
        auto [vx, ex] = x.num_valuation();
        r.K_ = std::min(x.K_ + L.degree() * a.vmin(), a.precision() * L.degree() + vx);
        r.normalize();
        return r;
    }
    friend TowerElement operator*(const FieldElement& a, const TowerElement& x) {
        TowerElement r = a.numerator() * x;
        r.s_ += a.shift();
        r.normalize();
        return r;
    }

    TowerElement& operator+=(const TowerElement& y) { return *this = *this + y; }
    TowerElement& operator-=(const TowerElement& y) { return *this = *this - y; }
    TowerElement& operator*=(const TowerElement& y) { return *this = *this * y; }

    /// Multiplication by p^k (k may be negative).
    TowerElement scale_p(int k) const {
        TowerElement r = *this;
        r.s_ -= k;
        r.normalize();
        return r;
    }

    TowerElement mul_v() const {
        TowerElement r(L_, L_->shift_by_v(c_), K_ + 1, s_);
        return r;
    }

    TowerElement pow(unsigned e) const {
        TowerElement r = constant(L_, 1), b = *this;
        while (e) {
            if (e & 1) r *= b;
            e >>= 1;
            if (e) b *= b;
        }
        return r;
    }

    /// Multiplicative inverse.  x = v^{val} * unit; the unit is inverted by
    /// Newton's iteration y <- y (2 - u y).
    TowerElement inverse() const {
        auto [val, exact] = num_valuation();
        if (!exact) throw InvalidArgument("inverse of zero in the tower");
        const int d = L_->d_;
        // v^t * num has valuation divisible by d
        const int t = (d - val % d) % d;
        TowerElement m = *this;
        m.s_ = 0;
        for (int i = 0; i < t; ++i) m = m.mul_v();
        const int k = (val + t) / d; // m = p^k * unit
        TowerElement u = m.scale_p(-k);
        u.s_ = 0;
        // residue inverse from the constant coordinate
        auto c0 = UnramifiedElement::from_residues(L_->context(), u.c_[0].a, u.c_[0].b, 1).inverse();
        // u = c0 + O(v), so the starting guess is good to one unit of 1/d
        TowerElement y = constant(L_, c0.assume_precision(1));
        y.K_ = 1;
        y.normalize();
        const TowerElement two = constant(L_, 2);
        const int target = u.K_;
        for (int it = 0; it < 64; ++it) {
            TowerElement ny = y * (two - u * y);
            ny.K_ = std::min(2 * y.K_, target);
            ny.normalize();
            const bool done = ny.K_ >= target && y.K_ >= target;
            y = ny;
            if (done) break;
        }
        // precision of an inverse of a unit equals that of the unit
        y.K_ = std::min(y.K_, target);
        y.normalize();
        // num^{-1} = v^t * p^{-k} * u^{-1}; value^{-1} = p^{s} * num^{-1}
        TowerElement r = y;
        for (int i = 0; i < t; ++i) r = r.mul_v();
        r.s_ += k - s_;
        r.normalize();
        return r;
    }

    /// Lowers the absolute precision to at most K units.
    TowerElement with_precision_units(int K) const {
        TowerElement r = *this;
        r.K_ = std::min(r.K_, K + L_->d_ * s_);
        r.normalize();
        return r;
    }

    /// Marks the stored coordinates as exact to storage (used after a
    /// separate certificate has bounded the error).
    TowerElement assume_exact() const {
        TowerElement r = *this;
        r.K_ = max_K();
        return r;
    }

    bool equals(const TowerElement& y) const { return (*this - y).is_zero(); }

    /// Trace to Phi through the power sums of E_n.
    FieldElement trace() const {
        const TowerLevel& L = *L_;
        const std::uint64_t M = L.modulus();
        std::uint64_t ta = 0, tb = 0;
        for (int j = 0; j < L.degree(); ++j) {
            ta = detail::addmod(ta, detail::mulmod(c_[j].a, L.ps_[j], M), M);
            tb = detail::addmod(tb, detail::mulmod(c_[j].b, L.ps_[j], M), M);
        }
        // Tr(m^K) = p^{floor((K + different) / d)}
        int prec = std::min((K_ + L.different_) / L.degree(), L.working_digits());
        return FieldElement(UnramifiedElement::from_residues(L.context(), ta, tb, prec), s_);
    }

    std::string to_string() const {
        std::ostringstream os;
        bool any = false;
        for (int j = 0; j < L_->d_; ++j) {
            if (c_[j].is_zero()) continue;
            if (any) os << " + ";
            any = true;
            os << "(" << c_[j].a << "+" << c_[j].b << "*w)";
            if (j >= 1) os << "*v";
            if (j >= 2) os << "^" << j;
        }
        if (!any) os << "0";
        if (s_ != 0) os << " / " << L_->context().p << "^" << s_;
        os << " [prec " << precision_units() << "/" << L_->d_ << "]";
        return os.str();
    }

private:
    friend class TowerLevel;

    int max_K() const { return L_->d_ * L_->W_; }

    int coord_prec(int j) const {
        return std::clamp(detail::ceil_div(K_ - j, L_->d_), 0, L_->W_);
    }

    /// (valuation of the numerator in 1/d units, exact?).  Coordinates are
    /// reduced below their precision, so a nonzero one always has valuation < K.
    std::pair<int, bool> num_valuation() const {
        const int d = L_->d_;
        const std::uint64_t p = L_->context().p;
        int best = K_;
        bool exact = false;
        for (int j = 0; j < d; ++j) {
            const Zq& x = c_[j];
            if (x.is_zero()) continue;
            const int va = x.a == 0 ? L_->W_ : detail::vp_u64(x.a, p);
            const int vb = x.b == 0 ? L_->W_ : detail::vp_u64(x.b, p);
            const int v = d * std::min(va, vb) + j;
            if (!exact || v < best) best = v;
            exact = true;
        }
        return {best, exact};
    }

    void normalize() {
        const TowerLevel& L = *L_;
        const int d = L.degree();
        K_ = std::min(K_, max_K());
        if (s_ < 0) {
            const int k = -s_;
            const std::uint64_t pk = k >= L.working_digits() ? 0 : L.context().modulus(k);
            for (auto& x : c_) x = L.zscale(x, pk);
            K_ = std::min(K_ + d * k, max_K());
            s_ = 0;
        }
        for (int j = 0; j < d; ++j) {
            const std::uint64_t m = L.context().modulus(coord_prec(j));
            c_[j].a %= m;
            c_[j].b %= m;
        }
        while (s_ > 0) {
            auto [v, exact] = num_valuation();
            if (v < d || K_ < d) break;
            const std::uint64_t p = L.context().p;
            for (auto& x : c_) {
                x.a /= p;
                x.b /= p;
            }
            K_ -= d;
            --s_;
        }
    }

    static void check_same(const TowerElement& x, const TowerElement& y) {
        if (!x.L_ || x.L_ != y.L_) throw ContextMismatch();
    }

    LevelPtr L_;
    std::vector<Zq> c_;
    int K_ = 0;
    int s_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const TowerElement& x) { return os << x.to_string(); }

/// Evaluates an integral series at a tower element by Horner's rule.
/// The truncation error sum_{k>D} c_k x^k has valuation >= (D+1) v(x), which
/// bounds the precision of the result.
inline TowerElement evaluate(const Series& g, const TowerElement& x) {
    const LevelPtr& L = x.level_ptr();
    auto v = x.valuation();
    if (v.value <= 0) throw InvalidArgument("series evaluation needs a point of positive valuation");
    const int D = g.bound();
    const bool is_v = [&] {
        const auto& c = x.raw();
        if (x.denominator_exponent() != 0 || !(c[1] == Zq{1, 0})) return false;
        for (int j = 0; j < x.degree(); ++j)
            if (j != 1 && !c[j].is_zero()) return false;
        return true;
    }();
    TowerElement r = TowerElement::constant(L, g[D]);
    for (int k = D - 1; k >= 0; --k) {
        r = is_v ? r.mul_v() : r * x;
        r += TowerElement::constant(L, g[k]);
    }
    return r.with_precision_units((D + 1) * v.value);
}

/// Evaluates a polynomial over O (exactly, no truncation).
inline TowerElement evaluate(const Polynomial& g, const TowerElement& x) {
    const LevelPtr& L = x.level_ptr();
    TowerElement r(L);
    for (int k = g.degree(); k >= 0; --k) r = r * x + TowerElement::constant(L, g[k]);
    return r;
}

inline TowerElement parse_tower_element(const LevelPtr& L, std::string_view s) {
    Polynomial poly = parse_polynomial(L->context(), s, 'v');
    return evaluate(poly, TowerElement::uniformizer(L));
}


// ---------------------------------------------------------------------------
// TowerLevel implementation

inline TowerLevel::TowerLevel(const FormalGroup& fg, int n, LevelPtr lower)
    : ctx_(&fg.context()), fg_(fg), n_(n), lower_(std::move(lower)) {
    const PrimeContext& ctx = *ctx_;
    std::uint64_t dd = ctx.q - 1;
    for (int i = 0; i < n; ++i) dd *= ctx.q;
    d_ = static_cast<int>(dd);
    // working modulus: p^W < 2^50 keeps 128-bit accumulation safe
    W_ = 0;
    while (W_ + 1 <= ctx.cap && ctx.modulus(W_ + 1) < (std::uint64_t{1} << 50)) ++W_;
    M_ = ctx.modulus(W_);
    cm_ = ctx.c_mod(W_) % M_;

    E_ = fg.torsion_polynomial(n);
    if (E_.degree() != d_ || !E_.is_eisenstein())
        throw IdentityViolation("E_n is not Eisenstein of the expected degree");
    for (int j = 0; j < d_; ++j) {
        auto e = E_[j];
        if (e.is_zero()) continue;
        if (e.b() != 0) throw IdentityViolation("E_n has non-rational coefficients");
        red_.emplace_back(j, detail::submod(0, e.a() % M_, M_));
    }
    // power sums by Newton's identities, E = Y^d + a_{d-1} Y^{d-1} + ... + a_0
    ps_.assign(static_cast<std::size_t>(d_), 0);
    ps_[0] = static_cast<std::uint64_t>(d_) % M_;
    std::vector<std::uint64_t> a(static_cast<std::size_t>(d_) + 1);
    for (int j = 0; j <= d_; ++j) a[j] = E_[j].a() % M_;
    for (int k = 1; k < d_; ++k) {
        std::uint64_t acc = detail::mulmod(static_cast<std::uint64_t>(k) % M_, a[d_ - k], M_);
        for (int i = 1; i < k; ++i) {
            if (a[d_ - i] == 0) continue;
            acc = detail::addmod(acc, detail::mulmod(a[d_ - i], ps_[k - i], M_), M_);
        }
        ps_[k] = detail::submod(0, acc, M_);
    }

    // unit group modulo p^{n+1}
    um_ = ctx.modulus(n + 1);
    for (std::uint64_t x = 0; x < um_; ++x)
        for (std::uint64_t y = 0; y < um_; ++y) {
            if (x % ctx.p == 0 && y % ctx.p == 0) continue;
            unit_pos_[{x, y}] = static_cast<int>(units_.size());
            units_.push_back({x, y});
        }
    // u = zeta * b with zeta in mu_{q-1}, b in 1 + pO; the coset of u is the k
    // with b * gamma^{-k} rational, gamma = 1 + p*w
    qorder_ = 1;
    for (int i = 0; i < n; ++i) qorder_ *= static_cast<int>(ctx.p);
    const UnitClass gamma{1 % um_, ctx.p % um_};
    std::vector<UnitClass> gpow{UnitClass{1 % um_, 0}};
    for (int k = 1; k < qorder_; ++k) gpow.push_back(unit_mul(gpow.back(), gamma));
    std::vector<UnitClass> ginv;
    for (const auto& g : gpow) ginv.push_back(unit_inverse(g));
    coset_.assign(units_.size(), -1);
    for (std::size_t i = 0; i < units_.size(); ++i) {
        const UnitClass& u = units_[i];
        auto zeta = teichmuller(ctx, static_cast<std::int64_t>(u.a % ctx.p), static_cast<std::int64_t>(u.b % ctx.p), n + 1);
        UnitClass b = unit_mul(u, unit_inverse({zeta.a(), zeta.b()}));
        for (int k = 0; k < qorder_; ++k) {
            if (unit_mul(b, ginv[k]).b == 0) {
                coset_[i] = k;
                break;
            }
        }
        if (coset_[i] < 0) throw IdentityViolation("unit outside every coset of H_n");
    }
    for (const auto& g : gpow) reps_.push_back(unit_pos_.at(g));
}

inline std::vector<Zq> TowerLevel::multiply(const std::vector<Zq>& x, const std::vector<Zq>& y) const {
    const int d = d_;
    std::vector<int> nx, ny;
    for (int i = 0; i < d; ++i) {
        if (!x[i].is_zero()) nx.push_back(i);
        if (!y[i].is_zero()) ny.push_back(i);
    }
    if (nx.empty() || ny.empty()) return std::vector<Zq>(static_cast<std::size_t>(d));
    using u128 = unsigned __int128;
    const std::size_t len = static_cast<std::size_t>(2 * d - 1);
    std::vector<u128> A(len, 0), B(len, 0), C(len, 0);
    for (int i : nx) {
        const u128 xa = x[i].a, xb = x[i].b;
        for (int j : ny) {
            const u128 ya = y[j].a, yb = y[j].b;
            A[i + j] += xa * ya;
            B[i + j] += xb * yb;
            C[i + j] += xa * yb + xb * ya;
        }
    }
    const std::uint64_t M = M_;
    std::vector<Zq> t(len);
    for (std::size_t k = 0; k < len; ++k) {
        if (A[k] == 0 && B[k] == 0 && C[k] == 0) continue;
        const std::uint64_t ra = static_cast<std::uint64_t>(A[k] % M);
        const std::uint64_t rb = static_cast<std::uint64_t>(B[k] % M);
        t[k] = {detail::addmod(ra, detail::mulmod(cm_, rb, M), M), static_cast<std::uint64_t>(C[k] % M)};
    }
    for (int k = 2 * d - 2; k >= d; --k) {
        const Zq top = t[k];
        if (top.is_zero()) continue;
        for (const auto& [j, r] : red_) t[k - d + j] = zadd(t[k - d + j], zscale(top, r));
    }
    t.resize(static_cast<std::size_t>(d));
    return t;
}

inline std::vector<Zq> TowerLevel::shift_by_v(const std::vector<Zq>& x) const {
    const int d = d_;
    std::vector<Zq> r(static_cast<std::size_t>(d));
    for (int j = 0; j + 1 < d; ++j) r[j + 1] = x[j];
    const Zq top = x[d - 1];
    if (!top.is_zero())
        for (const auto& [j, c] : red_) r[j] = zadd(r[j], zscale(top, c));
    return r;
}

inline void TowerLevel::build_embedding() {
    LevelPtr self = shared_from_this();
    const TowerElement v = TowerElement::uniformizer(self);
    // different exponent v(E_n'(v_n))
    std::vector<UnramifiedElement> dc;
    for (int j = 1; j <= E_.degree(); ++j) dc.push_back(UnramifiedElement::exact(*ctx_, j) * E_[j]);
    different_ = evaluate(Polynomial(*ctx_, dc), v).valuation().value;
    if (!lower_) return;
    const TowerElement fv = evaluate(Polynomial::from_series(fg_.distinguished()), v);
    TowerElement pw = TowerElement::constant(self, 1);
    for (int j = 0; j < lower_->d_; ++j) {
        lower_basis_.push_back(pw.raw());
        pw = pw * fv;
    }
}

inline TowerElement TowerLevel::embed(const TowerElement& x) const {
    if (!lower_ || x.level_ptr() != lower_) throw InvalidArgument("embed: element is not from the level below");
    const int dl = lower_->d_;
    using u128 = unsigned __int128;
    std::vector<u128> A(static_cast<std::size_t>(d_), 0), B(A.size(), 0), C(A.size(), 0);
    const auto& xc = x.raw();
    for (int j = 0; j < dl; ++j) {
        if (xc[j].is_zero()) continue;
        const u128 xa = xc[j].a, xb = xc[j].b;
        const auto& col = lower_basis_[j];
        for (int i = 0; i < d_; ++i) {
            if (col[i].is_zero()) continue;
            A[i] += xa * col[i].a;
            B[i] += xb * col[i].b;
            C[i] += xa * col[i].b + xb * col[i].a;
        }
    }
    std::vector<Zq> out(static_cast<std::size_t>(d_));
    for (int i = 0; i < d_; ++i) {
        const std::uint64_t ra = static_cast<std::uint64_t>(A[i] % M_);
        const std::uint64_t rb = static_cast<std::uint64_t>(B[i] % M_);
        out[i] = {detail::addmod(ra, detail::mulmod(cm_, rb, M_), M_), static_cast<std::uint64_t>(C[i] % M_)};
    }
    // v_{n-1} has valuation q units of 1/d_n
    const int ratio = d_ / dl;
    return TowerElement(shared_from_this(), std::move(out), x.raw_precision() * ratio, x.denominator_exponent());
}

inline TowerElement TowerLevel::torsion_image(const UnramifiedElement& c) const {
    const UnitClass key = unit_of(c);
    LevelPtr self = shared_from_this();
    {
        std::lock_guard<std::mutex> lock(cache_mu_);
        auto it = torsion_cache_.find(key);
        if (it != torsion_cache_.end()) return TowerElement(self, it->second.first, it->second.second);
    }
    const PrimeContext& ctx = *ctx_;
    const TowerElement v = TowerElement::uniformizer(self);
    TowerElement result;
    if (n_ == 0) {
        // [c] v_0 = [zeta] v_0 = zeta v_0 with zeta the Teichmuller lift of c mod p
        auto zeta = teichmuller(ctx, static_cast<std::int64_t>(c.a() % ctx.p), static_cast<std::int64_t>(c.b() % ctx.p), W_);
        result = zeta * v;
    } else {
        const TowerElement target = embed(lower_->torsion_image(c));
        // Roots of f(Y) = target differ by level-0 torsion points, at distance
        // 1/(q-1).  The series [c] truncated past degree d/(q-1) lands inside
        // the right basin; y <- (target - y^q)/pi then contracts by more than
        // one digit per step.
        const int q = static_cast<int>(ctx.q);
        const int D = d_ / (q - 1) + 2 * q;
        const TowerElement y0 = evaluate(fg_.mult_by(unit_element(key), D), v);
        const Polynomial f = Polynomial::from_series(fg_.distinguished());
        const TowerElement tgt = target.assume_exact();
        const UnramifiedElement minus_one = UnramifiedElement::exact(ctx, -1); // 1/pi = -1/p
        TowerElement y = y0.assume_exact();
        for (int it = 0; it < 4 * W_ + 8; ++it) {
            TowerElement ny = minus_one * (tgt - y.pow(static_cast<unsigned>(q))).scale_p(-1);
            ny = ny.assume_exact();
            const bool done = (ny - y).is_zero();
            y = ny;
            if (done) break;
        }
        // certificate: v(y - root) = v(f(y) - target) - v(f'(root)) = v(residual) - 1
        TowerElement resid = evaluate(f, y) - tgt;
        const int rv = resid.is_zero() ? resid.raw_precision() : resid.valuation().value;
        const int K = std::min(rv, target.precision_units()) - d_;
        // the root must be the one the truncated series pointed at
        if ((y - y0.assume_exact()).valuation().value <= d_ / (q - 1))
            throw IdentityViolation("torsion image iteration converged to a different root");
        result = y.with_precision_units(K);
    }
    std::lock_guard<std::mutex> lock(cache_mu_);
    torsion_cache_[key] = {result.raw(), result.raw_precision()};
    return result;
}

inline void TowerLevel::build_galois() {
    LevelPtr self = shared_from_this();
    images_.resize(units_.size());
    image_prec_.resize(units_.size());
    for (std::size_t i = 0; i < units_.size(); ++i) {
        const UnitClass uinv = unit_inverse(units_[i]);
        TowerElement s = torsion_image(unit_element(uinv));
        TowerElement pw = TowerElement::constant(self, 1);
        int K = s.precision_units();
        images_[i].reserve(static_cast<std::size_t>(d_));
        for (int j = 0; j < d_; ++j) {
            images_[i].push_back(pw.raw());
            K = std::min(K, pw.precision_units() + (d_ - j));
            pw = pw * s;
        }
        image_prec_[i] = std::min(K, s.precision_units());
    }
}

inline TowerElement TowerLevel::galois_act_index(int idx, const TowerElement& x) const {
    if (images_.empty())
        throw ResourceLimit("Galois tables are only built up to level 1");
    if (x.level_ptr().get() != this) throw ContextMismatch();
    using u128 = unsigned __int128;
    std::vector<u128> A(static_cast<std::size_t>(d_), 0), B(A.size(), 0), C(A.size(), 0);
    const auto& xc = x.raw();
    const auto& img = images_[static_cast<std::size_t>(idx)];
    for (int j = 0; j < d_; ++j) {
        if (xc[j].is_zero()) continue;
        const u128 xa = xc[j].a, xb = xc[j].b;
        const auto& col = img[j];
        for (int i = 0; i < d_; ++i) {
            if (col[i].is_zero()) continue;
            A[i] += xa * col[i].a;
            B[i] += xb * col[i].b;
            C[i] += xa * col[i].b + xb * col[i].a;
        }
    }
    std::vector<Zq> out(static_cast<std::size_t>(d_));
    for (int i = 0; i < d_; ++i) {
        const std::uint64_t ra = static_cast<std::uint64_t>(A[i] % M_);
        const std::uint64_t rb = static_cast<std::uint64_t>(B[i] % M_);
        out[i] = {detail::addmod(ra, detail::mulmod(cm_, rb, M_), M_), static_cast<std::uint64_t>(C[i] % M_)};
    }
    // the Galois action is an isometry; the tables add their own error
    const int K = std::min(x.raw_precision(), image_prec_[idx] + d_ * x.denominator_exponent());
    return TowerElement(shared_from_this(), std::move(out), K, x.denominator_exponent());
}

inline TowerElement TowerLevel::galois_act(const UnitClass& u, const TowerElement& x) const {
    return galois_act_index(unit_index(u), x);
}

/// Builds level n (and the levels below it).  Levels above 1 have degree
/// q^n (q-1) >= 648 and are only built when `allow_expensive` is set; they
/// carry no Galois tables.
inline LevelPtr build_level(const FormalGroup& fg, int n, bool allow_expensive = false) {
    if (n < 0) throw InvalidArgument("level must be non-negative");
    if (n >= 2 && !allow_expensive)
        throw ResourceLimit("level " + std::to_string(n) + " has degree above the default bound; opt in explicitly");
    if (n >= 3) throw ResourceLimit("levels above 2 are not supported");
    LevelPtr lower = n > 0 ? build_level(fg, n - 1, allow_expensive) : nullptr;
    auto L = std::make_shared<TowerLevel>(fg, n, lower);
    L->build_embedding();
    if (n <= 1) L->build_galois();
    return L;
}

/// Sum of all Galois conjugates (requires the Galois tables).
inline FieldElement trace_by_conjugates(const TowerElement& x) {
    const TowerLevel& L = x.level();
    TowerElement s(x.level_ptr());
    for (int i = 0; i < static_cast<int>(L.units().size()); ++i) s += L.galois_act_index(i, x);
    return s.to_base();
}

/// Product of all Galois conjugates.
inline FieldElement norm_by_conjugates(const TowerElement& x) {
    const TowerLevel& L = x.level();
    TowerElement s = TowerElement::constant(x.level_ptr(), 1);
    for (int i = 0; i < static_cast<int>(L.units().size()); ++i) s *= L.galois_act_index(i, x);
    return s.to_base();
}

} // namespace ltkit
