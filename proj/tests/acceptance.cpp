// Acceptance run: one PASS/FAIL line per criterion, with diagnostics
// indented below.  Exit status is 0 only if every criterion passes.

#include <ltkit/ltkit.hpp>

#include "fixtures.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

using namespace ltkit;
using ltkit::testing::random_base_point;
using ltkit::testing::random_datum;
using ltkit::testing::random_point;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("violated: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

int failures = 0;

void run(int id, const std::string& title, double limit_s, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.note(std::string("exception: ") + e.what());
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_s > 0 && dt >= limit_s) {
        o.pass = false;
        o.note("runtime limit " + std::to_string(limit_s) + " s exceeded");
    }
    std::ostringstream head;
    head.setf(std::ios::fixed);
    head.precision(2);
    head << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << title << "  (" << dt << " s)";
    std::cout << head.str() << "\n";
    for (const auto& n : o.notes) std::cout << "    " << n << "\n";
    std::cout.flush();
    if (!o.pass) ++failures;
}

using FMulti = MultiSeries<FieldElement>;

FMulti to_field_multi(const LawSeries& F) {
    FMulti r(F.context(), F.nvars(), F.bound());
    F.for_each([&](const LawSeries::Exp& e, const UnramifiedElement& c) { r.at(e) = FieldElement(c); });
    return r;
}

const std::array<std::int64_t, 5> kCurve{0, 0, 0, -1, 0}; // y^2 = x^3 - x

int digits(const CyclotomicElement& c) { return c.precision_units() / c.level_ptr()->degree(); }

CyclotomicElement scalar(const LevelPtr& L, const TowerElement& x) { return CyclotomicElement::constant(L, L->n(), x); }

FieldElement scalar_part(const CyclotomicElement& c, bool& ok) {
    for (int i = 1; i < c.rank(); ++i) ok &= c[i].is_zero();
    return c[0].to_base();
}

} // namespace

int main() {
    run(1, "formal group suite, p = 3, D = 40, N = 10", 10, [](Outcome& o) {
        const auto& ctx = make_context(3, 10);
        FormalGroup fg(ctx, 40);
        const auto& F = fg.law();
        bool sym = true;
        F.for_each([&](const LawSeries::Exp& e, const UnramifiedElement& c) { sym &= c.equals(F.at(e[1], e[0])); });
        o.require(sym, "F(X,Y) = F(Y,X)");
        o.require(fg.assoc_left().equals(fg.assoc_right()), "F(F(X,Y),Z) = F(X,F(Y,Z))");
        FMulti lhs = to_field_multi(F).substitute_into(fg.logarithm());
        FMulti rhs = FMulti::from_univariate(fg.logarithm(), 2, 40, 0) + FMulti::from_univariate(fg.logarithm(), 2, 40, 1);
        o.require(lhs.equals(rhs), "lambda(F(X,Y)) = lambda(X) + lambda(Y)");
        std::mt19937_64 rng(101);
        int pairs = 0;
        for (int t = 0; t < 4; ++t) {
            auto a = ltkit::testing::random_unit(ctx, rng), b = ltkit::testing::random_unit(ctx, rng);
            o.require(fg.mult_by(a).compose(fg.mult_by(b)).equals(fg.mult_by(a * b)), "[a][b] = [ab]");
            ++pairs;
        }
        o.require(fg.mult_by(fg.pi()).equals(fg.distinguished()), "[pi] = f");
        o.note("[a][b] = [ab] checked on " + std::to_string(pairs) + " random unit pairs");
    });

    run(2, "torsion polynomials E_0, E_1 and Y E_0 E_1 = f(f)", 5, [](Outcome& o) {
        const auto& ctx = make_context(3, 10);
        FormalGroup fg(ctx, 20);
        auto e0 = fg.torsion_polynomial(0), e1 = fg.torsion_polynomial(1);
        o.require(e0.equals(parse_polynomial(ctx, "Y^8 - 3", 'Y')), "E_0 = Y^8 - 3");
        o.require(e1.degree() == 72 && e1.is_monic() && e1.is_eisenstein(), "E_1 monic of degree 72, Eisenstein");
        auto prod = parse_polynomial(ctx, "Y", 'Y') * e0 * e1;
        o.require(prod.equals(fg.iterate(2)), "Y E_0 E_1 = f(f(Y))");
    });

    run(3, "curve y^2 = x^3 - x over F_3", 5, [](Outcome& o) {
        FiniteField F3(3, 1), F9(3, 2);
        EllipticCurve E3(F3, kCurve), E9(F9, kCurve);
        auto c3 = count_points(E3), c9 = count_points(E9);
        o.require(c3.trace == 0, "a_3 = 0");
        o.require(c9.trace == -6, "a_9 = -6");
        auto g3 = group_structure(E3), g9 = group_structure(E9);
        o.require(g3.d1 == 2 && g3.d2 == 2, "E(F_3) = (Z/2)^2");
        o.require(g9.d1 == 4 && g9.d2 == 4, "E(F_9) = (Z/4)^2");
        o.require(automorphisms(E9, 9).order() == 12, "#Aut = 12");
        o.require(E3.j_invariant() == 0 && F3.from_int(1728) == 0, "j = 0 = 1728");
        o.note("#E(F_3) = " + std::to_string(c3.points) + ", #E(F_9) = " + std::to_string(c9.points));
    });

    run(4, "Frobenius over F_9 acts as [-3] on E(F_9), E(F_81), E(F_729)", 30, [](Outcome& o) {
        auto v = scalar_frobenius_check(3, kCurve, {1, 2, 3});
        o.require(v.scalar == -3, "Frobenius scalar -3");
        o.require(v.holds, "(x^9, y^9) = [-3](x, y) on every point");
        o.require(v.points_checked == std::vector<std::uint64_t>{16, 64, 784}, "point counts 16, 64, 784");
    });

    run(5, "cyclic subgroups of order N in {2, 4, 7}", 0, [](Outcome& o) {
        FiniteField F9(3, 2), F729(3, 6);
        EllipticCurve E9(F9, kCurve), E729(F729, kCurve);
        auto G9 = automorphisms(E9, 9), G729 = automorphisms(E729, 9);
        const std::map<std::uint64_t, std::uint64_t> mu{{2, 3}, {4, 6}, {7, 8}};
        for (auto [N, want] : mu) {
            auto r = N == 7 ? cyclic_subgroup_orbits(E729, G729, N) : cyclic_subgroup_orbits(E9, G9, N);
            const auto tag = "N = " + std::to_string(N);
            o.require(r.mu == want && r.subgroups.size() == want, tag + ": subgroup count = mu");
            o.require(r.orbits.size() * 6 >= r.mu, tag + ": orbits >= mu/6");
            std::uint64_t total = 0;
            bool os = true;
            for (const auto& orb : r.orbits) {
                total += orb.members.size();
                os &= orb.members.size() * orb.stabilizer.size() == r.aut_order;
            }
            o.require(os && total == r.subgroups.size() && r.orbit_stabilizer, tag + ": orbit-stabilizer");
            o.note(tag + ": " + std::to_string(r.subgroups.size()) + " subgroups, " + std::to_string(r.orbits.size()) + " orbits");
        }
    });

    run(6, "genus chain for X_0(N), N <= 300", 5, [](Outcome& o) {
        int strict = 0;
        for (std::uint64_t N = 1; N <= 300; ++N) {
            auto c = ram_bound(N);
            const auto& G = c.genus;
            const auto lhs = 12 * (G.g - 1) + 3 * static_cast<std::int64_t>(G.eps2) + 4 * static_cast<std::int64_t>(G.eps3) +
                             6 * static_cast<std::int64_t>(G.eps_inf);
            o.require(lhs == static_cast<std::int64_t>(G.mu), "12(g-1) + 3e2 + 4e3 + 6einf = mu at N = " + std::to_string(N));
            const Rational middle = Rational(static_cast<std::int64_t>(G.mu), 6) - Rational(static_cast<std::int64_t>(G.eps2), 2) -
                                    Rational(2 * static_cast<std::int64_t>(G.eps3), 3) - Rational(static_cast<std::int64_t>(G.eps_inf));
            o.require(middle == Rational(2 * G.g - 2), "2g - 2 = mu/6 - e2/2 - 2e3/3 - einf at N = " + std::to_string(N));
            if (G.g >= 1) {
                o.require(middle < Rational(static_cast<std::int64_t>(G.mu), 6), "2g - 2 < mu/6 at N = " + std::to_string(N));
                ++strict;
            }
        }
        o.note(std::to_string(strict) + " levels with g >= 1");
    });

    // Criteria 7 and 8 share the 30-digit tower; delta_chi runs at 12 digits.
    const auto& ctx12 = make_context(3, 12);
    const auto& ctx30 = make_context(3, 30);

    run(7, "character identities at p = 3, levels 0 and 1", 600, [&](Outcome& o) {
        FormalGroup fg12(ctx12, 40);
        const LevelPtr d1 = build_level(fg12, 1);
        const LevelPtr d0 = d1->lower();
        FormalGroup fg(ctx30, 40);
        const LevelPtr L1 = build_level(fg, 1);
        const LevelPtr L0 = L1->lower();
        std::mt19937_64 rng(701);
        int min_digits = 1 << 30;
        auto track = [&](int d) { min_digits = std::min(min_digits, d); };
        const auto chis0 = characters(*d0), chis1 = characters(*d1);

        int data = 0, twists = 0;
        for (int t = 0; t < 20; ++t, ++data) {
            auto x = random_datum(fg12, rng);
            bool pure = true;
            auto a = scalar_part(delta_chi(x, chis0[0], d0), pure);
            auto b = scalar_part(delta_chi(x, chis1[0], d1), pure);
            track(std::min(a.precision(), b.precision()));
            o.require(pure && a.equals(b), "delta_chi independent of n");
            for (const auto* lev : {&d0, &d1}) {
                const auto& L = *lev;
                const auto& chis = L == d0 ? chis0 : chis1;
                auto d = delta_n(x, L);
                const int nunits = static_cast<int>(L->units().size());
                for (int k = 0; k < 3; ++k) {
                    const int i = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(nunits - 1));
                    auto dx = delta_n(x.twist(L->unit_element(L->units()[i])), L);
                    for (const auto& chi : chis) {
                        auto lhs = delta_chi(dx, chi), rhs = delta_chi(d, chi).times_Z(-character_exponent(*L, chi, i));
                        track(std::min(digits(lhs), digits(rhs)));
                        o.require(lhs.equals(rhs), "delta_chi(x^sigma) = chi(sigma)^-1 delta_chi(x)");
                    }
                    ++twists;
                }
            }
        }

        const auto lchis0 = characters(*L0), lchis1 = characters(*L1);
        int points = 0;
        for (int t = 0; t < 20; ++t, ++points) {
            auto y = random_point(L1, rng);
            o.require(y.psi_fixed, "random point lies in F(Psi_1)");
            auto lam = formal_log(fg, y.y);
            CyclotomicElement sum(L1, 1);
            for (const auto& chi : lchis1) {
                auto v = lambda_chi(fg, y, chi);
                track(digits(v));
                sum += v;
            }
            o.require(sum.equals(scalar(L1, lam)), "sum_chi lambda_chi(y) = lambda(y) at level 1");
            for (int k = 0; k < 3; ++k) {
                const int i = 1 + static_cast<int>(rng() % 71);
                auto ys = FormalPoint::certify(L1->galois_act_index(i, y.y));
                for (const auto& chi : lchis1) {
                    auto lhs = lambda_chi(fg, ys, chi), rhs = lambda_chi(fg, y, chi).times_Z(character_exponent(*L1, chi, i));
                    track(std::min(digits(lhs), digits(rhs)));
                    o.require(lhs.equals(rhs), "lambda_chi(y^sigma) = chi(sigma) lambda_chi(y)");
                }
            }
            auto Ny = psi_norm_step(fg, y.y);
            auto rhs = UnramifiedElement::exact(ctx30, 3) * lambda_chi(fg, y, lchis1[0]);
            auto lhs = scalar(L1, formal_log(fg, Ny));
            track(std::min(digits(lhs), digits(rhs)));
            o.require(Ny.in_base() && lhs.equals(rhs), "lambda_chi(N_{1/0} y) = 3 lambda_chi(y)");

            auto y0 = FormalPoint::certify(random_base_point(L0, rng));
            auto l0 = lambda_chi(fg, y0, lchis0[0]);
            track(digits(l0));
            o.require(l0.equals(scalar(L0, formal_log(fg, y0.y))), "sum_chi lambda_chi(y) = lambda(y) at level 0");
            auto up = FormalPoint::certify(L1->embed(y0.y));
            for (const auto& chi : lchis1)
                if (chi.conductor() == 9) {
                    auto v = lambda_chi(fg, up, chi);
                    track(digits(v));
                    o.require(v.is_zero(), "lambda_chi = 0 on level-0 points for conductor 9");
                }
        }
        o.require(min_digits >= 6, "at least 6 certified digits");
        o.note(std::to_string(data) + " Coleman data, " + std::to_string(twists) + " twists, " + std::to_string(points) +
               " points per level; minimum certified digits " + std::to_string(min_digits));
    });

    run(8, "pairing expansion at n = 0, 1 with m-stability", 600, [&](Outcome& o) {
        FormalGroup fg(ctx30, 40);
        const LevelPtr L2 = build_level(fg, 2, true);
        const LevelPtr L1 = L2->lower();
        const LevelPtr L0 = L1->lower();
        std::mt19937_64 rng(801);
        int pairs = 0, literal_bad = 0, corrected_bad = 0, nonintegral = 0;
        std::map<int, int> bad_by_n;
        for (int t = 0; t < 6; ++t) {
            auto x = random_datum(fg, rng);
            for (int n : {0, 1}) {
                const auto& Ln = n == 0 ? L0 : L1;
                const auto& Lm1 = n == 0 ? L1 : L2;
                auto y = n == 0 ? random_base_point(Ln, rng) : random_point(Ln, rng).y;
                auto pm = kummer_pair(fg, y, x, Ln), pm1 = kummer_pair(fg, y, x, Lm1);
                o.require(pm.equals_mod_O(pm1), "pairing stable from m to m+1");
                auto ex = character_expansion(delta_n(x, Ln), formal_log(fg, y));
                const bool literal = pm.equals_mod_O(PairingValue{ex});
                const bool corrected = pm.equals_mod_O(PairingValue{detail::pi_power_inverse(ctx30, n) * ex});
                if (!literal) {
                    ++literal_bad;
                    ++bad_by_n[n];
                }
                corrected_bad += !corrected;
                nonintegral += !pm.integral();
                ++pairs;
            }
        }
        o.require(literal_bad == 0, "<y (x) pi^-n, x> = sum_chi delta_chi(x) lambda_chi(y) mod O");
        o.note(std::to_string(pairs) + " pairs, " + std::to_string(nonintegral) + " with a nonintegral pairing");
        o.note("literal form mismatches: n = 0: " + std::to_string(bad_by_n[0]) + ", n = 1: " + std::to_string(bad_by_n[1]));
        o.note("diagnostic: pairing = pi^-n * sum_chi delta_chi(x) lambda_chi(y) mod O fails on " +
               std::to_string(corrected_bad) + " of " + std::to_string(pairs) + " pairs");
    });

    run(9, "overlattices of T_s for p in {3, 5}, s = 1..4", 0, [](Outcome& o) {
        for (unsigned p : {3u, 5u})
            for (int s = 1; s <= 4; ++s) {
                LatticeModel m(p, s, s + 2);
                const auto tag = "p = " + std::to_string(p) + ", s = " + std::to_string(s);
                o.require(enumerate_overlattices(m).size() == p + 1, tag + ": p + 1 overlattices");
                auto [a, b] = classification_counts(m);
                o.require(a == static_cast<int>(p) && b == 1, tag + ": p TypeA and one TypeB");
                auto r = galois_transitivity_check(m);
                o.require(r.orbit_size == static_cast<int>(p) && r.simply_transitive, tag + ": TypeA orbit simply transitive");
                o.require(r.type_b_fixed, tag + ": TypeB fixed");
            }
    });

    run(10, "norm_down certificates for s <= 9", 0, [](Outcome& o) {
        for (int s = 0; s <= 9; ++s)
            for (int k = 0; k <= s; ++k) {
                const auto tag = std::to_string(s) + "/" + std::to_string(k);
                if ((s - k) % 2) {
                    o.require(verify_parity_identity(s, k).holds, "odd identity at " + tag);
                } else {
                    o.require(verify_even_identity(s, k), "even identity at " + tag);
                }
            }
        for (int s = 1; s <= 9; ++s)
            o.require(norm_down(s, s - 1).specialize_ap(0) ==
                          PointExpr::symbol(s >= 2 ? s - 2 : PointSymbol::y, ApPoly::monomial(-1, 0, 0)),
                      "tr y_s = -y_{s-2} at a_p = 0, s = " + std::to_string(s));
        std::mt19937_64 rng(1001);
        int orders = 0;
        for (int s = 0; s <= 9; ++s)
            for (int k = 0; k <= s; ++k) {
                const auto want = norm_down(s, k), want0 = want.substitute_y0();
                for (int t = 0; t < 100; ++t, ++orders) {
                    o.require(norm_down_random(s, k, rng, false) == want, "confluence at " + std::to_string(s) + "/" + std::to_string(k));
                    o.require(norm_down_random(s, k, rng, true) == want0, "confluence with y_0 substituted");
                }
            }
        o.note(std::to_string(orders) + " random reduction orders per substitution mode");
    });

    run(11, "Herbrand quotient of finite cyclic-action modules", 0, [](Outcome& o) {
        std::mt19937_64 rng(1101);
        for (int t = 0; t < 100; ++t) {
            auto M = random_cyclic_action(3, 1 + t % 2, rng, 4);
            o.require(tate_h0(M) == tate_h1(M), "h(M) = 1");
        }
        for (int t = 0; t < 20; ++t) {
            auto M = random_cyclic_action(3, 1 + t % 2, rng, 3);
            IntVec g(static_cast<std::size_t>(M.rank()));
            for (auto& x : g) x = static_cast<std::int64_t>(rng() % 11);
            auto S = M.submodule({g});
            auto Q = M.quotient({g});
            o.require(S.order() * Q.order() == M.order(), "|M| = |S| |M/S|");
            // h(M) = h(S) h(M/S) as rationals
            o.require(tate_h0(M) * tate_h1(S) * tate_h1(Q) == tate_h1(M) * tate_h0(S) * tate_h0(Q), "h multiplicative");
        }
    });

    run(12, "nsearch from N_E = 361 with B from the kernel bound", 0, [](Outcome& o) {
        FiniteField F81(3, 4);
        EllipticCurve E(F81, kCurve);
        const auto B = kernel_union_size(E, automorphisms(E, 9)).bound;
        o.note("B = " + std::to_string(B) + " [DERIVED]");
        o.require(B <= 6, "B <= 6");
        auto out = search_N(361, 3, B);
        const std::uint64_t ells[] = {5, 17, 29};
        o.require(out.size() == 3, "three candidates");
        for (std::size_t i = 0; i < out.size() && i < 3; ++i) {
            const auto& c = out[i];
            o.require(c.ell == ells[i], "ell = " + std::to_string(ells[i]));
            bool cert = false;
            for (const auto& e : c.evidence) cert |= !e.square && (e.legendre == -1 || e.prime <= 3);
            o.require(cert && c.minus3_nonsquare, "-3 non-residue certificate for N = " + std::to_string(c.N));
            o.require(c.phi > B, "phi(N) > B for N = " + std::to_string(c.N));
            o.note("ell = " + std::to_string(c.ell) + ", N = " + std::to_string(c.N) + ", phi(N) = " + std::to_string(c.phi));
        }
    });

    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << "\n";
    return failures == 0 ? 0 : 1;
}
