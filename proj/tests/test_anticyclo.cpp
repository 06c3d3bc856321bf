#include <ltkit/anticyclo.hpp>

#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace ltkit;
using ltkit::testing::random_base_point;
using ltkit::testing::random_datum;
using ltkit::testing::random_point;
using ltkit::testing::random_small;

namespace {

const PrimeContext& ctx3() { return make_context(3, 30); }

const FormalGroup& group() {
    static const FormalGroup fg(ctx3(), 40);
    return fg;
}

const LevelPtr& level2() {
    static const LevelPtr L = build_level(group(), 2, true);
    return L;
}
const LevelPtr& level1() { return level2()->lower(); }
const LevelPtr& level0() { return level1()->lower(); }

UnramifiedElement E(std::int64_t a, std::int64_t b = 0) { return UnramifiedElement::exact(ctx3(), a, b); }

CyclotomicElement scalar(const LevelPtr& L, const TowerElement& x) { return CyclotomicElement::constant(L, L->n(), x); }

} // namespace

TEST(FormalLog, Examples) {
    EXPECT_TRUE(formal_log(group(), TowerElement(level0())).is_zero());
    // v_0 is torsion, so its logarithm vanishes; the direct sum over a long
    // truncation of lambda agrees
    auto v0 = TowerElement::uniformizer(level0());
    EXPECT_TRUE(formal_log(group(), v0).is_zero());
    FormalGroup big(ctx3(), 200, false);
    auto direct = detail::evaluate_field_series(big.logarithm(), v0);
    EXPECT_GE(direct.valuation().value, 200);
}

TEST(FormalLog, AgreesWithTruncatedSeriesAtSmallPoints) {
    std::mt19937_64 rng(1);
    FormalGroup big(ctx3(), 200, false);
    for (int t = 0; t < 3; ++t) {
        auto y = random_small(level1(), rng, 30);
        auto a = formal_log(group(), y);
        auto b = detail::evaluate_field_series(big.logarithm(), y);
        auto d = a - b;
        EXPECT_GE(d.valuation().value, std::min(a.precision_units(), 201 * 30));
    }
}

TEST(FormalLog, AdditiveAndScaled) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 3; ++t) {
        auto y1 = random_small(level1(), rng, 16), y2 = random_small(level1(), rng, 16);
        auto s = formal_add(group(), y1, y2);
        auto r = formal_log(group(), s) - formal_log(group(), y1) - formal_log(group(), y2);
        EXPECT_TRUE(r.is_zero());
        EXPECT_GT(r.precision_units(), 72 * 6);
        // lambda([3] y) = 3 lambda(y)
        auto y3 = formal_add(group(), y1, formal_add(group(), y1, y1));
        EXPECT_TRUE(formal_log(group(), y3).equals(E(3) * formal_log(group(), y1)));
    }
    EXPECT_THROW(formal_log(group(), TowerElement::constant(level0(), 1)), InvalidArgument);
}

TEST(LambdaChi, LevelZeroTrivial) {
    std::mt19937_64 rng(3);
    auto y = FormalPoint::certify(random_base_point(level0(), rng));
    ASSERT_TRUE(y.psi_fixed);
    auto chi = characters(*level0())[0];
    EXPECT_TRUE(lambda_chi(group(), y, chi).equals(scalar(level0(), formal_log(group(), y.y))));
}

TEST(LambdaChi, NeedsCertifiedPoint) {
    auto v1 = TowerElement::uniformizer(level1());
    auto y = FormalPoint::certify(v1);
    EXPECT_FALSE(y.psi_fixed);
    EXPECT_THROW(lambda_chi(group(), y, characters(*level1())[0]), InvalidArgument);
}

TEST(LambdaChi, Equivariance) {
    const auto& L = level1();
    std::mt19937_64 rng(4);
    auto y = random_point(L, rng);
    ASSERT_TRUE(y.psi_fixed);
    auto chis = characters(*L);
    for (int i = 0; i < 72; i += 5) {
        auto ys = FormalPoint::certify(L->galois_act_index(i, y.y));
        for (const auto& chi : chis) {
            auto lhs = lambda_chi(group(), ys, chi);
            auto rhs = lambda_chi(group(), y, chi).times_Z(character_exponent(*L, chi, i));
            EXPECT_TRUE(lhs.equals(rhs));
        }
    }
}

TEST(LambdaChi, DecompositionAndInversion) {
    const auto& L = level1();
    std::mt19937_64 rng(5);
    auto y = random_point(L, rng);
    auto lam = formal_log(group(), y.y);
    auto chis = characters(*L);
    CyclotomicElement sum(L, 1);
    for (const auto& chi : chis) sum += lambda_chi(group(), y, chi);
    EXPECT_TRUE(sum.equals(scalar(L, lam)));
    // Fourier inversion: lambda(y)^{gamma^k} = sum_chi chi(gamma^k) lambda_chi(y)
    const auto& reps = L->coset_representatives();
    for (int k = 0; k < 3; ++k) {
        CyclotomicElement s(L, 1);
        for (const auto& chi : chis) s += lambda_chi(group(), y, chi).times_Z(chi.exponent(k));
        EXPECT_TRUE(s.equals(scalar(L, L->galois_act_index(reps[k], lam))));
    }
}

TEST(LambdaChi, LinearInThePoint) {
    const auto& L = level1();
    std::mt19937_64 rng(6);
    auto y1 = random_point(L, rng), y2 = random_point(L, rng);
    auto s = FormalPoint::certify(formal_add(group(), y1.y, y2.y));
    ASSERT_TRUE(s.psi_fixed);
    for (const auto& chi : characters(*L))
        EXPECT_TRUE(lambda_chi(group(), s, chi).equals(lambda_chi(group(), y1, chi) + lambda_chi(group(), y2, chi)));
}

TEST(NormCompatibility, LevelOneToZero) {
    const auto& L = level1();
    std::mt19937_64 rng(7);
    auto y = random_point(L, rng);
    auto Ny = psi_norm_step(group(), y.y);
    ASSERT_TRUE(Ny.in_base());
    auto lhs = formal_log(group(), Ny);
    auto rhs = lambda_chi(group(), y, characters(*L)[0]);
    EXPECT_TRUE(scalar(L, lhs).equals(E(3) * rhs));
    EXPECT_THROW(psi_norm_step(group(), TowerElement::uniformizer(level0())), InvalidArgument);
}

TEST(NormCompatibility, LowerPointsKillConductorNine) {
    std::mt19937_64 rng(8);
    auto y0 = random_base_point(level0(), rng);
    auto y = FormalPoint::certify(level1()->embed(y0));
    ASSERT_TRUE(y.psi_fixed);
    for (const auto& chi : characters(*level1())) {
        auto v = lambda_chi(group(), y, chi);
        if (chi.conductor() == 9) {
            EXPECT_TRUE(v.is_zero());
        } else {
            EXPECT_TRUE(v.equals(scalar(level1(), formal_log(group(), y.y))));
        }
    }
}

TEST(Membership, Certificates) {
    auto zero = FormalPoint::certify(TowerElement(level1()));
    EXPECT_TRUE(a_membership(group(), zero, true).member);
    EXPECT_TRUE(a_membership(group(), zero, false).member);
    std::mt19937_64 rng(9);
    auto y0 = FormalPoint::certify(random_base_point(level0(), rng));
    auto odd0 = a_membership(group(), y0, false);
    EXPECT_TRUE(odd0.characters.empty());
    EXPECT_TRUE(odd0.member);
    auto y = random_point(level1(), rng);
    auto even = a_membership(group(), y, true);
    EXPECT_EQ(even.characters, (std::vector<int>{0, 1, 2}));
    EXPECT_FALSE(even.member);
    EXPECT_GT(even.precision_units, 72 * 6);
}

TEST(Pairing, ConstantSeriesPairsToZero) {
    std::mt19937_64 rng(10);
    auto x = ColemanDatum::from_factors(group(), {}, E(1));
    auto y = random_point(level1(), rng);
    EXPECT_TRUE(kummer_pair(group(), y.y, x, level1()).equals_mod_O(PairingValue{FieldElement(E(0))}));
}

TEST(Pairing, BilinearInThePoint) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 3; ++t) {
        auto x = random_datum(group(), rng);
        auto y1 = random_point(level1(), rng), y2 = random_point(level1(), rng);
        auto s = formal_add(group(), y1.y, y2.y);
        auto lhs = kummer_pair(group(), s, x, level1());
        auto a = kummer_pair(group(), y1.y, x, level1()), b = kummer_pair(group(), y2.y, x, level1());
        EXPECT_TRUE(lhs.equals_mod_O(PairingValue{a.value + b.value}));
    }
}

TEST(Pairing, StableInM) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 3; ++t) {
        auto x = random_datum(group(), rng);
        auto y0 = random_base_point(level0(), rng);
        EXPECT_TRUE(kummer_pair(group(), y0, x, level0()).equals_mod_O(kummer_pair(group(), y0, x, level1())));
        auto y1 = random_point(level1(), rng).y;
        EXPECT_TRUE(kummer_pair(group(), y1, x, level1()).equals_mod_O(kummer_pair(group(), y1, x, level2())));
    }
}

TEST(Pairing, CharacterExpansion) {
    // At level 0 the expansion equals the pairing.  At level n the trace
    // computation gives pi^{-n} times the character sum.
    std::mt19937_64 rng(13);
    int nontrivial = 0;
    for (int t = 0; t < 5; ++t) {
        auto x = random_datum(group(), rng);
        for (int n : {0, 1}) {
            const auto& L = n == 0 ? level0() : level1();
            auto y = n == 0 ? random_base_point(L, rng) : random_point(L, rng).y;
            auto pair = kummer_pair(group(), y, x, L);
            auto ex = character_expansion(delta_n(x, L), formal_log(group(), y));
            EXPECT_TRUE(pair.equals_mod_O(PairingValue{detail::pi_power_inverse(ctx3(), n) * ex}));
            if (n == 0) {
                EXPECT_TRUE(pair.equals_mod_O(PairingValue{ex}));
            }
            if (!pair.integral()) ++nontrivial;
        }
    }
    EXPECT_GT(nontrivial, 0);
}
