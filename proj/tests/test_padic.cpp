#include <ltkit/padic.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace ltkit;

namespace {

// Schoolbook arithmetic in Z[w]/(w^2 - c, p^N) with 128-bit integers.
struct Pair {
    __int128 a, b;
};

__int128 md(__int128 x, __int128 m) {
    x %= m;
    return x < 0 ? x + m : x;
}

Pair oracle_mul(Pair x, Pair y, __int128 c, __int128 m) {
    return {md(x.a * y.a % m + md(c, m) * (x.b * y.b % m), m), md(x.a * y.b + x.b * y.a, m)};
}

bool same(const UnramifiedElement& x, Pair y, __int128 m) {
    return md(x.a(), m) == md(y.a, m) && md(x.b(), m) == md(y.b, m);
}

UnramifiedElement random_element(const PrimeContext& ctx, std::mt19937_64& rng) {
    const auto m = ctx.modulus(ctx.precision);
    return UnramifiedElement::from_residues(ctx, rng() % m, rng() % m, ctx.precision);
}

} // namespace

TEST(PrimeContext, ResidueGenerators) {
    EXPECT_EQ(make_context(3, 12).residue_generator(), "X^2+1");
    EXPECT_EQ(make_context(5, 8).residue_generator(), "X^2-2");
    EXPECT_EQ(make_context(7, 8).residue_generator(), "X^2+1");
    EXPECT_EQ(make_context(3, 12).q, 9u);
}

TEST(PrimeContext, GeneratorIrreducibleByRootSearch) {
    for (int p : {3, 5, 7, 11, 13, 17, 19, 23}) {
        const auto& ctx = make_context(p, 4);
        for (int x = 0; x < p; ++x) EXPECT_NE(((x * x - ctx.nonresidue) % p + p) % p, 0) << p << " " << x;
    }
}

TEST(PrimeContext, RejectsBadInput) {
    try {
        make_context(4, 8);
        FAIL();
    } catch (const InvalidArgument& e) {
        EXPECT_STREQ(e.what(), "p not an odd prime");
    }
    EXPECT_THROW(make_context(2, 8), InvalidArgument);
    EXPECT_THROW(make_context(9, 8), InvalidArgument);
    EXPECT_THROW(make_context(3, 0), InvalidArgument);
    EXPECT_THROW(make_context(3, 100), InvalidArgument);
}

TEST(Teichmuller, Examples) {
    const auto& ctx = make_context(3, 12);
    EXPECT_TRUE(teichmuller(ctx, 1).equals(UnramifiedElement(ctx, 1)));
    EXPECT_TRUE(teichmuller(ctx, 0).is_zero());
    // iterate x -> x^9 from w until it stabilises
    UnramifiedElement x(ctx, 0, 1);
    for (int i = 0; i < 20; ++i) x = x.pow(9);
    const auto t = teichmuller(ctx, 0, 1);
    EXPECT_TRUE(t.equals(x));
    EXPECT_TRUE((t * t).equals(UnramifiedElement(ctx, -1)));
    EXPECT_TRUE(t.pow(9).equals(t));
}

TEST(Teichmuller, RootsOfUnity) {
    for (int p : {3, 5, 7}) {
        const auto& ctx = make_context(p, 10);
        for (int r0 = 0; r0 < p; ++r0)
            for (int r1 = 0; r1 < p; ++r1) {
                if (r0 == 0 && r1 == 0) continue;
                const auto t = teichmuller(ctx, r0, r1);
                EXPECT_TRUE(t.pow(ctx.q - 1).equals(UnramifiedElement(ctx, 1)));
                EXPECT_EQ(t.residue(), std::make_pair(static_cast<std::uint32_t>(r0), static_cast<std::uint32_t>(r1)));
            }
    }
}

TEST(Frobenius, Examples) {
    const auto& ctx = make_context(3, 12);
    EXPECT_TRUE(UnramifiedElement(ctx, 7).frobenius().equals(UnramifiedElement(ctx, 7)));
    const auto t = teichmuller(ctx, 2, 1);
    EXPECT_TRUE(t.frobenius().equals(t.pow(3)));
    // (a + b w)^3 = a - b w mod 3 with w^2 = -1, checked by cubing
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            UnramifiedElement x(ctx, a, b);
            auto cube = x.pow(3).reduce(1);
            EXPECT_TRUE(cube.equals(x.frobenius().reduce(1)));
            EXPECT_TRUE(x.frobenius().equals(UnramifiedElement(ctx, a, -b)));
        }
}

TEST(Frobenius, MultiplicativeAndInvolutive) {
    const auto& ctx = make_context(5, 9);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        auto x = random_element(ctx, rng), y = random_element(ctx, rng);
        EXPECT_TRUE((x * y).frobenius().equals(x.frobenius() * y.frobenius()));
        EXPECT_TRUE(x.frobenius().frobenius().equals(x));
    }
}

TEST(Valuation, Examples) {
    const auto& ctx = make_context(3, 12);
    EXPECT_EQ(UnramifiedElement(ctx, 3).valuation(), (Valuation{1, true}));
    EXPECT_EQ(UnramifiedElement(ctx, 1, 3).valuation(), (Valuation{0, true}));
    EXPECT_EQ(UnramifiedElement(ctx, 0).valuation(), (Valuation{12, false}));
    EXPECT_EQ(UnramifiedElement(ctx, 27, 81).valuation(), (Valuation{3, true}));
}

TEST(Arithmetic, AgreesWithOracle) {
    for (int p : {3, 5, 13}) {
        const auto& ctx = make_context(p, 9);
        const __int128 m = ctx.modulus(9);
        std::mt19937_64 rng(p);
        for (int i = 0; i < 300; ++i) {
            auto x = random_element(ctx, rng), y = random_element(ctx, rng);
            Pair X{x.a(), x.b()}, Y{y.a(), y.b()};
            EXPECT_TRUE(same(x * y, oracle_mul(X, Y, ctx.nonresidue, m), m));
            EXPECT_TRUE(same(x + y, {X.a + Y.a, X.b + Y.b}, m));
            EXPECT_TRUE(same(x - y, {X.a - Y.a, X.b - Y.b}, m));
        }
    }
}

TEST(Arithmetic, RingAxiomsAndInverse) {
    const auto& ctx = make_context(3, 12);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        auto x = random_element(ctx, rng), y = random_element(ctx, rng), z = random_element(ctx, rng);
        EXPECT_TRUE(((x * y) * z).equals(x * (y * z)));
        EXPECT_TRUE((x * (y + z)).equals(x * y + x * z));
        if (x.is_unit()) {
            EXPECT_TRUE((x * x.inverse()).equals(UnramifiedElement(ctx, 1)));
        }
        auto vx = x.valuation(), vy = y.valuation();
        if (vx.exact && vy.exact && vx.value + vy.value < 12) {
            EXPECT_EQ((x * y).valuation().value, vx.value + vy.value);
        }
    }
    EXPECT_THROW(UnramifiedElement(ctx, 3).inverse(), InvalidArgument);
}

TEST(Arithmetic, PrecisionIsTracked) {
    const auto& ctx = make_context(3, 12);
    UnramifiedElement x(ctx, 9, 18, 12);
    auto s = x.shift(2);
    EXPECT_EQ(s.precision(), 10);
    EXPECT_TRUE(s.equals(UnramifiedElement(ctx, 1, 2, 10)));
    EXPECT_EQ((x + UnramifiedElement(ctx, 1, 0, 5)).precision(), 5);
    EXPECT_THROW(UnramifiedElement(ctx, 1).shift(1), InvalidArgument);
    EXPECT_THROW(UnramifiedElement(ctx, 1) + UnramifiedElement(make_context(5, 4), 1), ContextMismatch);
}

TEST(TextFormat, RoundTrip) {
    const auto& ctx = make_context(3, 12);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        auto x = random_element(ctx, rng);
        auto y = parse_element(ctx, x.to_string());
        EXPECT_EQ(y.to_string(), x.to_string());
    }
    EXPECT_EQ(parse_element(ctx, "2-w").to_string(), "2+531440*w mod 3^12");
    EXPECT_EQ(parse_element(ctx, "4+5*w mod 3^2").to_string(), "4+5*w mod 3^2");
    EXPECT_THROW(parse_element(ctx, "1+2*w mod 5^3"), InvalidArgument);
    EXPECT_THROW(parse_element(ctx, "1+*w"), InvalidArgument);
    EXPECT_THROW(parse_element(ctx, ""), InvalidArgument);
}
