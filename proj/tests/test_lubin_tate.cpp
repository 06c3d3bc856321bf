#include <ltkit/lubin_tate.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace ltkit;

namespace {

const PrimeContext& ctx3() { return make_context(3, 10); }

UnramifiedElement E(std::int64_t a, std::int64_t b = 0) { return UnramifiedElement::exact(ctx3(), a, b); }

const FormalGroup& group20() {
    static const FormalGroup fg(ctx3(), 20);
    return fg;
}

using FMulti = MultiSeries<FieldElement>;

FMulti to_field(const LawSeries& F) {
    FMulti r(F.context(), F.nvars(), F.bound());
    F.for_each([&](const LawSeries::Exp& e, const UnramifiedElement& c) { r.at(e) = FieldElement(c); });
    return r;
}

// Integer polynomial product, used to expand E_1 independently.
std::vector<std::int64_t> imul(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    std::vector<std::int64_t> r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

UnramifiedElement random_unit(std::mt19937_64& rng) {
    std::int64_t a = 1 + static_cast<std::int64_t>(rng() % 1000) * 3, b = static_cast<std::int64_t>(rng() % 1000);
    if (rng() % 2) std::swap(a, b);
    return UnramifiedElement(ctx3(), a, b);
}

} // namespace

TEST(FormalGroup, DistinguishedSeries) {
    const auto& fg = group20();
    Series f = parse_series(ctx3(), "-3*X + X^9", 20);
    EXPECT_TRUE(fg.distinguished().equals(f));
    // f = X^q mod p and f = pi X mod degree 2
    for (int k = 0; k <= 20; ++k) {
        auto d = fg.distinguished()[k] - (k == 9 ? E(1) : E(0));
        EXPECT_GE(d.vmin(), 1);
    }
    EXPECT_TRUE(fg.distinguished()[1].equals(fg.pi()));
    EXPECT_THROW(FormalGroup(ctx3(), 8), InvalidArgument);
}

TEST(FormalGroup, LawLinearTermAndAxioms) {
    const auto& fg = group20();
    const auto& F = fg.law();
    F.for_each([&](const LawSeries::Exp& e, const UnramifiedElement& c) {
        const int deg = e[0] + e[1];
        if (deg == 1) {
            EXPECT_TRUE(c.equals(E(1)));
        }
        if (deg == 0 || (e[1] == 0 && e[0] >= 2)) {
            EXPECT_TRUE(c.is_zero()) << "F(X,0) = X";
        }
        EXPECT_TRUE(c.equals(F.at(e[1], e[0]))) << "symmetry";
    });
    EXPECT_TRUE(fg.assoc_left().equals(fg.assoc_right()));
}

TEST(FormalGroup, LogarithmIsAdditive) {
    const auto& fg = group20();
    FMulti lhs = to_field(fg.law()).substitute_into(fg.logarithm());
    FMulti rhs = FMulti::from_univariate(fg.logarithm(), 2, 20, 0) + FMulti::from_univariate(fg.logarithm(), 2, 20, 1);
    EXPECT_TRUE(lhs.equals(rhs));
}

TEST(FormalGroup, LogarithmSolvesFunctionalEquation) {
    const auto& fg = group20();
    FieldSeries lhs = fg.logarithm().compose(ltkit::to_field(fg.distinguished()));
    FieldSeries rhs = FieldElement(fg.pi()) * fg.logarithm();
    EXPECT_TRUE(lhs.equals(rhs));
    EXPECT_TRUE(fg.logarithm()[1].equals(FieldElement(E(1))));
    FieldSeries id = fg.logarithm().compose(fg.exponential());
    for (int k = 0; k <= 20; ++k) EXPECT_TRUE(id[k].equals(FieldElement(E(k == 1 ? 1 : 0))));
}

TEST(FormalGroup, TruncationOracle) {
    const auto& a = group20();
    FormalGroup b(ctx3(), 30);
    a.law().for_each([&](const LawSeries::Exp& e, const UnramifiedElement& c) {
        EXPECT_TRUE(c.equals(b.law().at(e[0], e[1]))) << e[0] << "," << e[1];
    });
}

TEST(Endomorphisms, Examples) {
    const auto& fg = group20();
    EXPECT_TRUE(fg.mult_by(E(1)).equals(Series::variable(ctx3(), 20)));
    EXPECT_TRUE(fg.mult_by(fg.pi()).equals(fg.distinguished()));
    // lambda^{-1}(pi lambda(X)) = f, through the exponential
    FieldSeries via_log = fg.mult_by_via_log(fg.pi());
    EXPECT_TRUE(via_log.equals(ltkit::to_field(fg.distinguished())));
    for (auto [r0, r1] : {std::pair{1, 1}, {2, 0}, {0, 1}, {2, 2}}) {
        auto z = teichmuller(ctx3(), r0, r1);
        Series g = fg.mult_by(z);
        EXPECT_TRUE(g[1].equals(z));
        for (int k = 2; k <= 20; ++k) EXPECT_TRUE(g[k].is_zero()) << k;
    }
}

TEST(Endomorphisms, AgreeWithLogarithmRoute) {
    const auto& fg = group20();
    std::mt19937_64 rng(7);
    for (int t = 0; t < 5; ++t) {
        auto a = random_unit(rng);
        Series g = fg.mult_by(a);
        FieldSeries h = fg.mult_by_via_log(a);
        for (int k = 0; k <= 20; ++k) {
            auto d = FieldElement(g[k]) - h[k];
            EXPECT_GE(d.vmin(), std::min(g[k].precision(), h[k].precision())) << k;
        }
    }
}

TEST(Endomorphisms, Properties) {
    const auto& fg = group20();
    std::mt19937_64 rng(8);
    const Series f = fg.distinguished();
    for (int t = 0; t < 5; ++t) {
        auto a = random_unit(rng), b = random_unit(rng);
        Series ga = fg.mult_by(a), gb = fg.mult_by(b);
        EXPECT_TRUE(ga.compose(gb).equals(fg.mult_by(a * b)));
        EXPECT_TRUE(f.compose(ga).equals(ga.compose(f)));
        LawSeries lhs = fg.law().substitute_into(ga);
        LawSeries rhs = apply_law(fg.law(), ga, ga);
        EXPECT_TRUE(lhs.equals(rhs));
    }
}

TEST(TorsionPolynomial, E0) {
    const auto& fg = group20();
    Polynomial e0 = fg.torsion_polynomial(0);
    EXPECT_TRUE(e0.equals(parse_polynomial(ctx3(), "Y^8 - 3", 'Y')));
    EXPECT_TRUE(e0.is_eisenstein());
}

TEST(TorsionPolynomial, E1ByDirectExpansion) {
    const auto& fg = group20();
    Polynomial e1 = fg.torsion_polynomial(1);
    ASSERT_EQ(e1.degree(), 72);
    EXPECT_TRUE(e1.is_monic());
    EXPECT_TRUE(e1.is_eisenstein());
    std::vector<std::int64_t> f{0, -3, 0, 0, 0, 0, 0, 0, 0, 1}, pw{1};
    for (int i = 0; i < 8; ++i) pw = imul(pw, f);
    pw[0] += -3;
    for (int k = 0; k <= 72; ++k) EXPECT_TRUE(e1[k].equals(E(pw[k]))) << k;
}

TEST(TorsionPolynomial, ProductIsIterate) {
    const auto& fg = group20();
    for (int n = 0; n <= 2; ++n) {
        Polynomial prod = parse_polynomial(ctx3(), "Y", 'Y');
        for (int k = 0; k <= n; ++k) prod = prod * fg.torsion_polynomial(k);
        EXPECT_TRUE(prod.equals(fg.iterate(n + 1)));
        Polynomial en = fg.torsion_polynomial(n);
        int q = 9, d = 8;
        for (int k = 0; k < n; ++k) d *= q;
        EXPECT_EQ(en.degree(), d);
        EXPECT_EQ(en[0].valuation(), (Valuation{1, true}));
        EXPECT_TRUE(en[0].shift(1).is_unit());
    }
    EXPECT_THROW(fg.torsion_polynomial(-1), InvalidArgument);
}

TEST(FormalGroup, OtherPrime) {
    const auto& ctx = make_context(5, 6);
    FormalGroup fg(ctx, 30);
    EXPECT_TRUE(fg.torsion_polynomial(0).equals(parse_polynomial(ctx, "Y^24 - 5", 'Y')));
    EXPECT_TRUE(fg.assoc_left().equals(fg.assoc_right()));
    EXPECT_TRUE(fg.mult_by(fg.pi()).equals(fg.distinguished()));
}
