#include <ltkit/cohomology.hpp>

#include <gtest/gtest.h>

#include <functional>
#include <map>
#include <set>

using namespace ltkit;

namespace {

// Finite G-module given by its elements, each a canonical vector in
// (+) Z/d_i, with gamma and addition acting on canonical forms.
struct Brute {
    std::vector<IntVec> elems;
    std::function<IntVec(const IntVec&)> canon;
    std::function<IntVec(const IntVec&)> gamma;
    std::uint64_t G;

    IntVec add(const IntVec& a, const IntVec& b) const {
        IntVec c(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
        return canon(c);
    }
    IntVec minus_one(const IntVec& v) const {
        IntVec g = gamma(v), c(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) c[i] = g[i] - v[i];
        return canon(c);
    }
    IntVec norm(const IntVec& v) const {
        IntVec s = canon(IntVec(v.size(), 0)), w = v;
        for (std::uint64_t i = 0; i < G; ++i) {
            s = add(s, w);
            w = gamma(w);
        }
        return s;
    }
    std::pair<std::uint64_t, std::uint64_t> tate() const {
        std::set<IntVec> ker_a, im_a, ker_n, im_n;
        const IntVec zero = canon(IntVec(elems.front().size(), 0));
        for (const auto& e : elems) {
            auto a = minus_one(e), n = norm(e);
            im_a.insert(a);
            im_n.insert(n);
            if (a == zero) ker_a.insert(e);
            if (n == zero) ker_n.insert(e);
        }
        return {ker_a.size() / im_n.size(), ker_n.size() / im_a.size()};
    }
};

IntVec reduce(IntVec v, const std::vector<std::int64_t>& d) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = ((v[i] % d[i]) + d[i]) % d[i];
    return v;
}

std::vector<IntVec> all_vectors(const std::vector<std::int64_t>& d) {
    std::vector<IntVec> out{{}};
    for (auto di : d) {
        std::vector<IntVec> next;
        for (const auto& v : out)
            for (std::int64_t x = 0; x < di; ++x) {
                auto w = v;
                w.push_back(x);
                next.push_back(w);
            }
        out = next;
    }
    return out;
}

Brute brute_full(const CyclicAction& M) {
    const auto d = M.factor_orders();
    const auto A = M.matrix();
    Brute b;
    b.G = M.group_order();
    b.canon = [d](const IntVec& v) { return reduce(v, d); };
    b.gamma = [d, A](const IntVec& v) {
        IntVec w(v.size(), 0);
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = 0; j < v.size(); ++j) w[i] += A[i][j] * v[j];
        return reduce(w, d);
    };
    b.elems = all_vectors(d);
    return b;
}

// The G-stable subgroup generated by g, as a set of elements.
std::set<IntVec> orbit_span(const Brute& b, const IntVec& g) {
    std::set<IntVec> S{b.canon(IntVec(g.size(), 0))};
    std::vector<IntVec> gens;
    IntVec w = b.canon(g);
    for (std::uint64_t i = 0; i < b.G; ++i) {
        gens.push_back(w);
        w = b.gamma(w);
    }
    std::vector<IntVec> todo(S.begin(), S.end());
    while (!todo.empty()) {
        auto e = todo.back();
        todo.pop_back();
        for (const auto& h : gens) {
            auto n = b.add(e, h);
            if (S.insert(n).second) todo.push_back(n);
        }
    }
    return S;
}

} // namespace

TEST(Tate, Examples) {
    CyclicAction triv(3, 1, {3}, {{1}});
    EXPECT_EQ(tate_h0(triv), 3u);
    EXPECT_EQ(tate_h1(triv), 3u);
    CyclicAction zero(3, 1, {}, {});
    EXPECT_EQ(tate_h0(zero), 1u);
    EXPECT_EQ(tate_h1(zero), 1u);
    CyclicAction shift(3, 1, {5, 5, 5}, {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}});
    EXPECT_EQ(tate_h0(shift), 1u);
    EXPECT_EQ(tate_h1(shift), 1u);
    for (const auto* M : {&triv, &zero, &shift}) EXPECT_TRUE(herbrand(*M).is_one());
    for (const auto* M : {&triv, &shift}) {
        auto [h0, h1] = brute_full(*M).tate();
        EXPECT_EQ(h0, tate_h0(*M));
        EXPECT_EQ(h1, tate_h1(*M));
    }
}

TEST(Tate, RejectsInconsistentActions) {
    // 2 has order 4 mod 5, so it cannot define an action of Z/3
    EXPECT_THROW(CyclicAction(3, 1, {5}, {{2}}), InvalidArgument);
    EXPECT_THROW(CyclicAction(3, 1, {5, 5}, {{1}}), InvalidArgument);
    EXPECT_THROW(CyclicAction(3, 1, {0}, {{1}}), InvalidArgument);
    // gamma e_2 = e_1 + e_2 sends 3 e_2 = 0 to 3 e_1, nonzero in Z/9
    EXPECT_THROW(CyclicAction(3, 1, {9, 3}, {{1, 1}, {0, 1}}), InvalidArgument);
}

TEST(Tate, RandomModulesAgainstBruteForce) {
    std::mt19937_64 rng(21);
    int checked = 0;
    for (int t = 0; t < 120; ++t) {
        const int n = 1 + t % 2;
        auto M = random_cyclic_action(3, n, rng, 4);
        EXPECT_TRUE(herbrand(M).is_one());
        if (M.order() > 5000) continue;
        auto [h0, h1] = brute_full(M).tate();
        EXPECT_EQ(h0, tate_h0(M)) << t;
        EXPECT_EQ(h1, tate_h1(M)) << t;
        ++checked;
    }
    EXPECT_GE(checked, 60);
}

TEST(Tate, OtherPrime) {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 30; ++t) {
        auto M = random_cyclic_action(5, 1, rng, 3);
        EXPECT_TRUE(herbrand(M).is_one());
        if (M.order() > 5000) continue;
        auto [h0, h1] = brute_full(M).tate();
        EXPECT_EQ(h0, tate_h0(M));
        EXPECT_EQ(h1, tate_h1(M));
    }
}

TEST(Tate, GeneratorChangeInvariance) {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 40; ++t) {
        auto M = random_cyclic_action(3, 2, rng, 4);
        for (std::uint64_t u : {2ull, 4ull, 5ull, 7ull}) {
            auto Mu = M.with_generator_power(u);
            EXPECT_EQ(tate_h0(Mu), tate_h0(M));
            EXPECT_EQ(tate_h1(Mu), tate_h1(M));
        }
    }
    EXPECT_THROW(CyclicAction(3, 1, {3}, {{1}}).with_generator_power(3), InvalidArgument);
}

TEST(Herbrand, SubmoduleAndQuotient) {
    std::mt19937_64 rng(24);
    int checked = 0;
    for (int t = 0; t < 40; ++t) {
        auto M = random_cyclic_action(3, 1 + t % 2, rng, 3);
        IntVec g(static_cast<std::size_t>(M.rank()));
        for (auto& x : g) x = static_cast<std::int64_t>(rng() % 11);
        auto S = M.submodule({g});
        auto Q = M.quotient({g});
        EXPECT_EQ(S.order() * Q.order(), M.order());
        auto hS = herbrand(S), hQ = herbrand(Q);
        EXPECT_TRUE(hS.is_one() && hQ.is_one());
        if (M.order() > 3000) continue;
        // brute force on the submodule and on the quotient by cosets
        auto full = brute_full(M);
        auto span = orbit_span(full, g);
        EXPECT_EQ(span.size(), S.order());
        Brute sub = full;
        sub.elems.assign(span.begin(), span.end());
        auto [s0, s1] = sub.tate();
        EXPECT_EQ(s0, tate_h0(S));
        EXPECT_EQ(s1, tate_h1(S));
        std::map<IntVec, IntVec> rep;
        for (const auto& e : full.elems) {
            IntVec m = e;
            for (const auto& s : span) m = std::min(m, full.add(e, s));
            rep[e] = m;
        }
        Brute quo = full;
        quo.canon = [&full, &rep](const IntVec& v) { return rep.at(full.canon(v)); };
        quo.gamma = [&full, &quo](const IntVec& v) { return quo.canon(full.gamma(v)); };
        std::set<IntVec> reps;
        for (const auto& [e, r] : rep) reps.insert(r);
        quo.elems.assign(reps.begin(), reps.end());
        EXPECT_EQ(quo.elems.size(), Q.order());
        auto [q0, q1] = quo.tate();
        EXPECT_EQ(q0, tate_h0(Q));
        EXPECT_EQ(q1, tate_h1(Q));
        ++checked;
    }
    EXPECT_GE(checked, 20);
}
