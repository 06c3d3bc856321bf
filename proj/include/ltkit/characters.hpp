#pragma once
// Anticyclotomic characters of Gal(Psi_n/Phi) and the coefficient ring
// R_n = Phi_n[Z]/(Phi_{p^n}(Z)) their values live in.
//
// Labeling: gamma = 1 + p*w generates the quotient (O/p^{n+1})^x / H_n and
// chi_j(gamma^k) = Z^{jk}.  The choice of gamma is a convention.

#include <ltkit/tower.hpp>

#include <numeric>
#include <string>
#include <vector>

namespace ltkit {

/// Element of R_n with coefficients in a tower level, stored in the basis
/// 1, Z, ..., Z^{phi-1}, phi = phi(p^n) (phi = 1 at n = 0).
class CyclotomicElement {
public:
    CyclotomicElement() = default;
    CyclotomicElement(LevelPtr L, int n) : L_(std::move(L)), n_(n) {
        const int p = static_cast<int>(L_->context().p);
        pn_ = 1;
        for (int i = 0; i < n; ++i) pn_ *= p;
        phi_ = n == 0 ? 1 : pn_ / p * (p - 1);
        c_.assign(static_cast<std::size_t>(phi_), TowerElement(L_));
    }

    static CyclotomicElement constant(LevelPtr L, int n, const TowerElement& x) {
        CyclotomicElement r(std::move(L), n);
        r.c_[0] = x;
        return r;
    }
    /// x * Z^m.
    static CyclotomicElement monomial(LevelPtr L, int n, const TowerElement& x, long long m) {
        CyclotomicElement r(std::move(L), n);
        r.add_monomial(x, m);
        return r;
    }

    int n() const noexcept { return n_; }
    int rank() const noexcept { return phi_; }
    const LevelPtr& level_ptr() const noexcept { return L_; }
    const TowerElement& operator[](int i) const { return c_.at(static_cast<std::size_t>(i)); }
    const std::vector<TowerElement>& coefficients() const noexcept { return c_; }

    /// this += x * Z^m, reducing Z^m with Z^{p^n} = 1 and Phi_{p^n}(Z) = 0.
    void add_monomial(const TowerElement& x, long long m) {
        int e = static_cast<int>(((m % pn_) + pn_) % pn_);
        if (e < phi_) {
            c_[e] += x;
            return;
        }
        // Z^e = -sum_{i=1}^{p-1} Z^{e - i p^{n-1}} with e - (p-1)p^{n-1} < p^{n-1}
        const int step = pn_ / static_cast<int>(L_->context().p);
        for (int t = e - step; t >= 0 && t > e - pn_; t -= step) c_[t] -= x;
    }

    CyclotomicElement& operator+=(const CyclotomicElement& o) {
        check(o);
        for (int i = 0; i < phi_; ++i) c_[i] += o.c_[i];
        return *this;
    }
    CyclotomicElement& operator-=(const CyclotomicElement& o) {
        check(o);
        for (int i = 0; i < phi_; ++i) c_[i] -= o.c_[i];
        return *this;
    }
    friend CyclotomicElement operator+(CyclotomicElement a, const CyclotomicElement& b) { return a += b; }
    friend CyclotomicElement operator-(CyclotomicElement a, const CyclotomicElement& b) { return a -= b; }

    friend CyclotomicElement operator*(const CyclotomicElement& a, const CyclotomicElement& b) {
        a.check(b);
        CyclotomicElement r(a.L_, a.n_);
        for (int i = 0; i < a.phi_; ++i) {
            if (a.c_[i].is_zero()) continue;
            for (int j = 0; j < b.phi_; ++j)
                if (!b.c_[j].is_zero()) r.add_monomial(a.c_[i] * b.c_[j], i + j);
        }
        return r;
    }
    friend CyclotomicElement operator*(const TowerElement& x, const CyclotomicElement& a) {
        CyclotomicElement r = a;
        for (auto& c : r.c_) c = x * c;
        return r;
    }
    friend CyclotomicElement operator*(const FieldElement& x, const CyclotomicElement& a) {
        CyclotomicElement r = a;
        for (auto& c : r.c_) c = x * c;
        return r;
    }

    /// Multiplication by Z^m.
    CyclotomicElement times_Z(long long m) const {
        CyclotomicElement r(L_, n_);
        for (int i = 0; i < phi_; ++i)
            if (!c_[i].is_zero()) r.add_monomial(c_[i], i + m);
        return r;
    }

    /// Coefficient-wise map (e.g. embedding into a higher level).
    template <class F>
    CyclotomicElement map(LevelPtr L, F&& f) const {
        CyclotomicElement r(std::move(L), n_);
        for (int i = 0; i < phi_; ++i) r.c_[i] = f(c_[i]);
        return r;
    }

    bool is_zero() const {
        for (const auto& c : c_)
            if (!c.is_zero()) return false;
        return true;
    }
    bool equals(const CyclotomicElement& o) const { return (*this - o).is_zero(); }

    /// Smallest absolute precision (in 1/d units) among the coefficients.
    int precision_units() const {
        int k = c_[0].precision_units();
        for (const auto& c : c_) k = std::min(k, c.precision_units());
        return k;
    }
    int valuation_units() const {
        int v = c_[0].raw_precision() + 1000000;
        for (const auto& c : c_) v = std::min(v, c.valuation().value);
        return v;
    }

    std::string to_string() const {
        std::string s;
        for (int i = 0; i < phi_; ++i) {
            if (c_[i].is_zero()) continue;
            if (!s.empty()) s += " + ";
            s += "(" + c_[i].to_string() + ")";
            if (i > 0) s += "*Z^" + std::to_string(i);
        }
        return s.empty() ? "0" : s;
    }

private:
    void check(const CyclotomicElement& o) const {
        if (n_ != o.n_ || L_ != o.L_) throw ContextMismatch();
    }

    LevelPtr L_;
    int n_ = 0;
    int pn_ = 1;
    int phi_ = 1;
    std::vector<TowerElement> c_;
};

struct AnticyclotomicCharacter {
    int n = 0;             // level: chi is a character of Gal(Psi_n/Phi)
    int index = 0;         // chi(gamma^k) = Z^{index * k}
    std::uint64_t p = 3;
    int conductor_exponent = 0; // conductor p^e, trivial character e = 0

    std::uint64_t conductor() const {
        std::uint64_t c = 1;
        for (int i = 0; i < conductor_exponent; ++i) c *= p;
        return c;
    }
    bool even() const noexcept { return conductor_exponent % 2 == 0; }
    bool trivial() const noexcept { return index == 0; }
    /// Exponent m with chi(gamma^k) = Z^m.
    long long exponent(int k) const { return static_cast<long long>(index) * k; }
    std::string parity() const { return even() ? "Xi+" : "Xi-"; }
};

/// All p^n characters of Gal(Psi_n/Phi).
inline std::vector<AnticyclotomicCharacter> characters(const TowerLevel& L) {
    const int pn = L.quotient_order();
    const std::uint64_t p = L.context().p;
    std::vector<AnticyclotomicCharacter> out;
    for (int j = 0; j < pn; ++j) {
        AnticyclotomicCharacter chi{L.n(), j, p, 0};
        if (j != 0) {
            // order p^r gives conductor p^{r+1}
            int order = pn / std::gcd(j, pn);
            int r = 0;
            while (order > 1) {
                order /= static_cast<int>(p);
                ++r;
            }
            chi.conductor_exponent = r + 1;
        }
        out.push_back(chi);
    }
    return out;
}

/// chi(sigma_u) as an exponent of Z.
inline long long character_exponent(const TowerLevel& L, const AnticyclotomicCharacter& chi, int unit_idx) {
    return chi.exponent(L.coset_index(unit_idx));
}

} // namespace ltkit
