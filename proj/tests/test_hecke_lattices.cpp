#include <ltkit/hecke_lattices.hpp>

#include <gtest/gtest.h>

#include <set>

using namespace ltkit;

namespace {

using Elem = std::pair<std::int64_t, std::int64_t>;
using ElemSet = std::set<Elem>;

// Closure of a generating set under addition in (Z/M)^2.
ElemSet closure(std::int64_t M, const std::vector<Elem>& gens) {
    ElemSet S{{0, 0}};
    std::vector<Elem> todo{{0, 0}};
    while (!todo.empty()) {
        auto e = todo.back();
        todo.pop_back();
        for (const auto& g : gens) {
            Elem n{(e.first + g.first) % M, (e.second + g.second) % M};
            if (S.insert(n).second) todo.push_back(n);
        }
    }
    return S;
}

ElemSet elements(const Subgroup& H) {
    ElemSet S;
    const auto M = H.modulus();
    for (std::int64_t x = 0; x < M; ++x)
        for (std::int64_t y = 0; y < M; ++y)
            if (H.contains(LatticeVec{x, y})) S.insert({x, y});
    return S;
}

// All index-p overlattices of T_s found by scanning every element of the
// ambient group.
std::set<ElemSet> brute_overlattices(const LatticeModel& m) {
    const auto M = m.modulus();
    const Elem g{m.ppow(m.k() - m.s()), 0};
    const ElemSet Ts = closure(M, {g});
    std::set<ElemSet> out;
    for (std::int64_t x = 0; x < M; ++x)
        for (std::int64_t y = 0; y < M; ++y) {
            if (Ts.count({x, y})) continue;
            Elem px{x * m.p() % M, y * m.p() % M};
            if (!Ts.count(px)) continue;
            out.insert(closure(M, {g, {x, y}}));
        }
    return out;
}

} // namespace

TEST(LatticeModel, Levels) {
    LatticeModel m(3, 2, 4);
    EXPECT_EQ(m.T().order(), 1);
    for (int j = 0; j <= 3; ++j) {
        EXPECT_EQ(m.T_level(j).order(), m.ppow(j));
        EXPECT_TRUE(m.T_level(j + 1).contains(m.T_level(j)));
        EXPECT_FALSE(m.T_level(j).contains(m.T_level(j + 1)));
    }
    EXPECT_THROW(LatticeModel(3, 2, 3), InvalidArgument);
    EXPECT_THROW(LatticeModel(4, 1, 3), InvalidArgument);
    EXPECT_THROW(enumerate_overlattices(LatticeModel(3, 0, 2)), InvalidArgument);
    EXPECT_THROW(hecke_identity(LatticeModel(3, 0, 2)), InvalidArgument);
}

TEST(Overlattices, MatchBruteForce) {
    for (auto [p, s] : {std::pair{3u, 1}, {3u, 2}, {5u, 1}}) {
        LatticeModel m(p, s, s + 2);
        auto Ls = enumerate_overlattices(m);
        std::set<ElemSet> lib;
        for (const auto& L : Ls) lib.insert(elements(L));
        auto want = brute_overlattices(m);
        EXPECT_EQ(want.size(), p + 1);
        EXPECT_EQ(lib, want) << p << " " << s;
    }
}

TEST(Overlattices, CountsAndContainment) {
    for (unsigned p : {3u, 5u})
        for (int s = 1; s <= 4; ++s) {
            LatticeModel m(p, s, s + 2);
            auto Ls = enumerate_overlattices(m);
            ASSERT_EQ(Ls.size(), p + 1);
            const auto Ts = m.T_level(s);
            for (std::size_t i = 0; i < Ls.size(); ++i) {
                EXPECT_TRUE(Ls[i].contains(Ts));
                EXPECT_EQ(Ls[i].order(), Ts.order() * p);
                for (std::size_t j = 0; j < i; ++j) EXPECT_FALSE(Ls[i] == Ls[j]);
            }
        }
}

TEST(Classification, Examples) {
    LatticeModel m(3, 1, 3);
    auto [a, b] = classification_counts(m);
    EXPECT_EQ(a, 3);
    EXPECT_EQ(b, 1);
    std::set<int> seen;
    for (const auto& L : enumerate_overlattices(m)) {
        auto c = classify_overlattice(m, L);
        if (c.kind == LatticeClass::Kind::TypeA) seen.insert(c.a);
    }
    EXPECT_EQ(seen, (std::set<int>{0, 1, 2}));
    // TypeB at s = 2 is p^{-2} Z_p t + p^{-1} T
    LatticeModel m2(3, 2, 4);
    auto tb = m2.span({{m2.ppow(2), 0}, {m2.ppow(3), 0}, {0, m2.ppow(3)}});
    EXPECT_EQ(classify_overlattice(m2, tb).kind, LatticeClass::Kind::TypeB);
    EXPECT_TRUE(m2.scale_p(tb) == m2.T_level(1));
    EXPECT_EQ(classify_overlattice(m2, m2.T_level(3)).a, 0);
    EXPECT_THROW(classify_overlattice(m2, m2.T_level(2)), IdentityViolation);
}

TEST(Classification, TypeAByElementFormula) {
    // TypeA(a) contains (1 + a p^s w) p^{-s-1} t, checked on element sets
    for (unsigned p : {3u, 5u}) {
        LatticeModel m(p, 1, 3);
        const auto M = m.modulus();
        for (int a = 0; a < static_cast<int>(p); ++a) {
            Elem v{m.ppow(m.k() - 2), a * m.ppow(m.k() - 1) % M};
            auto want = closure(M, {{m.ppow(m.k() - 1), 0}, v});
            EXPECT_EQ(elements(m.type_a(a)), want);
        }
    }
}

TEST(Classification, WitnessAndStability) {
    for (unsigned p : {3u, 5u})
        for (int s = 1; s <= 4; ++s) {
            LatticeModel m(p, s, s + 2);
            auto [a, b] = classification_counts(m);
            EXPECT_EQ(a, static_cast<int>(p));
            EXPECT_EQ(b, 1);
            EXPECT_TRUE(classification_stable(m));
            auto c = classify_overlattice(m, m.type_b());
            ASSERT_EQ(c.kind, LatticeClass::Kind::TypeB);
            std::vector<LatticeVec> w = c.witness;
            EXPECT_TRUE(m.span(w) == m.T_level(s - 1));
        }
}

TEST(Transitivity, ElementOracle) {
    // units 1 + c p^s w act on element sets; the image must be TypeA(a') for
    // exactly one a', and a -> a' must be a bijection for every c != 0
    for (unsigned p : {3u, 5u}) {
        LatticeModel m(p, 1, 3);
        const auto M = m.modulus();
        const auto w2 = ((m.omega_square() % M) + M) % M;
        std::vector<ElemSet> A;
        for (int a = 0; a < static_cast<int>(p); ++a) A.push_back(elements(m.type_a(a)));
        auto B = elements(m.type_b());
        for (std::int64_t c = 0; c < p; ++c) {
            const std::int64_t u1 = c * m.ppow(1);
            auto act = [&](const ElemSet& S) {
                ElemSet r;
                for (auto [x, y] : S) r.insert({(x + u1 * w2 % M * y) % M, (y + u1 * x) % M});
                return r;
            };
            std::set<int> targets;
            for (int a = 0; a < static_cast<int>(p); ++a) {
                auto img = act(A[a]);
                int hit = -1;
                for (int b = 0; b < static_cast<int>(p); ++b)
                    if (img == A[b]) hit = b;
                ASSERT_GE(hit, 0);
                targets.insert(hit);
                if (c != 0) {
                    EXPECT_NE(hit, a);
                }
            }
            EXPECT_EQ(targets.size(), p);
            EXPECT_EQ(act(B), B);
        }
        auto r = galois_transitivity_check(m);
        EXPECT_EQ(r.orbit_size, static_cast<int>(p));
        EXPECT_TRUE(r.simply_transitive);
        EXPECT_TRUE(r.type_b_fixed);
    }
}

TEST(Transitivity, AllLevels) {
    for (unsigned p : {3u, 5u})
        for (int s = 1; s <= 4; ++s) {
            auto r = galois_transitivity_check(LatticeModel(p, s, s + 2));
            EXPECT_EQ(r.orbit_size, static_cast<int>(p));
            EXPECT_TRUE(r.simply_transitive);
            EXPECT_TRUE(r.type_b_fixed);
        }
}

TEST(Hecke, Identity) {
    EXPECT_EQ(hecke_identity(LatticeModel(3, 1, 3)).to_string(), "T_p x_1 = sigma_0 x_2 + sigma_1 x_2 + sigma_2 x_2 + x_0");
    EXPECT_EQ(hecke_identity(LatticeModel(3, 2, 4)).to_string(), "T_p x_2 = sigma_0 x_3 + sigma_1 x_3 + sigma_2 x_3 + x_1");
    auto h = hecke_identity(LatticeModel(5, 3, 5));
    ASSERT_EQ(h.terms.size(), 6u);
    EXPECT_EQ(h.terms.back().label, "x_2");
    EXPECT_EQ(h.terms.back().lattice.kind, LatticeClass::Kind::TypeB);
}
