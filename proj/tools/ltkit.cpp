// ltkit command-line driver.  Results go to stdout as JSON (or flattened
// text), diagnostics to stderr.  Exit codes: 0 success, 1 identity
// violation, 2 input error.

#include <ltkit/ltkit.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace ltkit;
using json = nlohmann::ordered_json;

namespace {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::int64_t p = 3;
    int prec = 12;
    int deg = 0; // 0: pick from the precision rule
    bool deg_auto = true;
    int level = 1;
    std::uint64_t seed = 1;
    std::string format = "json";
    int max_degree = 400;

    /// Smallest D with (D+1)/e_0 >= N, at least 40.
    void resolve() {
        if (p < 2) throw InputError("--p must be a prime");
        if (level < 0 || level > 2) throw InputError("--level must be 0, 1 or 2");
        if (const char* env = std::getenv("LTKIT_MAX_DEGREE")) {
            try {
                max_degree = std::stoi(env);
            } catch (const std::exception&) {
                throw InputError("LTKIT_MAX_DEGREE is not an integer");
            }
        }
        if (deg == 0) {
            deg_auto = true;
            deg = std::max<int>(40, static_cast<int>((p * p - 1) * prec - 1));
        } else {
            deg_auto = false;
        }
        if (deg > max_degree)
            throw InputError("series degree " + std::to_string(deg) + " exceeds the budget " + std::to_string(max_degree) +
                             " (LTKIT_MAX_DEGREE)");
    }

    json to_json() const {
        return json{{"p", p},       {"prec", prec},     {"deg", deg},       {"deg_auto", deg_auto},
                    {"level", level}, {"seed", seed}, {"format", format}, {"max_degree", max_degree}};
    }
};

/// Identity checks with both sides serialized.
struct Checks {
    json list = json::array();
    bool ok = true;

    void add(const std::string& identity, bool holds, const json& lhs = nullptr, const json& rhs = nullptr) {
        json c{{"identity", identity}, {"holds", holds}};
        if (!lhs.is_null()) c["lhs"] = lhs;
        if (!rhs.is_null()) c["rhs"] = rhs;
        list.push_back(c);
        ok &= holds;
    }
};

void render_text(const json& j, const std::string& path, std::ostream& os) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) render_text(v, path.empty() ? k : path + "." + k, os);
    } else if (j.is_array()) {
        if (j.empty()) os << path << ": []\n";
        for (std::size_t i = 0; i < j.size(); ++i) render_text(j[i], path + "[" + std::to_string(i) + "]", os);
    } else {
        os << path << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
    }
}

int emit(const RunConfig& cfg, const std::string& command, json result, bool ok) {
    json report{{"schema", 1}, {"command", command}, {"config", cfg.to_json()}, {"status", ok ? "ok" : "violation"},
                {"result", std::move(result)}};
    if (cfg.format == "text") {
        render_text(report, "", std::cout);
    } else {
        std::cout << report.dump(2) << "\n";
    }
    return ok ? 0 : 1;
}

// -- formatting ----------------------------------------------------------

/// Coefficient as a signed integer when it is rational and small, otherwise
/// in the element format.
std::string coefficient(const UnramifiedElement& c, bool& is_int, std::int64_t& value) {
    const auto& ctx = c.context();
    is_int = false;
    if (c.b() != 0) return c.to_string();
    const std::uint64_t m = ctx.modulus(c.precision());
    const std::uint64_t a = c.a() % m;
    is_int = true;
    value = a <= m / 2 ? static_cast<std::int64_t>(a) : -static_cast<std::int64_t>(m - a);
    return std::to_string(value);
}

std::string polynomial_string(const Polynomial& g, char var) {
    std::string out;
    for (int k = g.degree(); k >= 0; --k) {
        const auto& c = g[k];
        if (c.is_zero()) continue;
        bool is_int = false;
        std::int64_t v = 0;
        std::string cs = coefficient(c, is_int, v);
        std::string mono = k == 0 ? "" : k == 1 ? std::string(1, var) : std::string(1, var) + "^" + std::to_string(k);
        std::string term;
        bool neg = false;
        if (is_int) {
            neg = v < 0;
            const std::int64_t a = neg ? -v : v;
            term = (a == 1 && k > 0) ? mono : std::to_string(a) + (k > 0 ? "*" + mono : "");
        } else {
            term = "(" + cs + ")" + (k > 0 ? "*" + mono : "");
        }
        if (out.empty()) {
            out = (neg ? "-" : "") + term;
        } else {
            out += (neg ? " - " : " + ") + term;
        }
    }
    return out.empty() ? "0" : out;
}

json element_json(const UnramifiedElement& c) { return json{{"value", c.to_string()}, {"precision", c.precision()}}; }

json field_json(const FieldElement& c) { return json{{"value", c.to_string()}, {"precision", c.abs_precision()}}; }

json tower_json(const TowerElement& x) {
    return json{{"value", x.to_string()}, {"precision_units", x.precision_units()}, {"degree", x.degree()}};
}

json cyclo_json(const CyclotomicElement& x) {
    return json{{"value", x.to_string()}, {"precision_units", x.precision_units()}};
}

template <class S>
json series_table(const S& s) {
    json t = json::array();
    for (int k = 0; k <= s.bound(); ++k) {
        if (s[k].is_zero()) continue;
        if constexpr (std::is_same_v<S, FieldSeries>) {
            t.push_back(json{{"k", k}, {"c", s[k].to_string()}, {"precision", s[k].abs_precision()}});
        } else {
            t.push_back(json{{"k", k}, {"c", s[k].to_string()}, {"precision", s[k].precision()}});
        }
    }
    return t;
}

// -- shared objects --------------------------------------------------------

std::vector<IntVec> parse_matrix(const std::string& text);

struct Session {
    const RunConfig& cfg;
    const PrimeContext* ctx = nullptr;
    std::unique_ptr<FormalGroup> fg;
    std::vector<LevelPtr> levels;

    explicit Session(const RunConfig& c) : cfg(c) {
        if (cfg.prec < 1) throw InputError("--prec must be positive");
        ctx = &make_context(cfg.p, cfg.prec);
        fg = std::make_unique<FormalGroup>(*ctx, cfg.deg);
    }

    const LevelPtr& level(int n) {
        if (n < 0) throw InputError("level must be non-negative");
        if (n > cfg.level) throw InputError("level " + std::to_string(n) + " exceeds --level " + std::to_string(cfg.level));
        if (levels.empty()) {
            LevelPtr top = build_level(*fg, cfg.level, cfg.level >= 2);
            levels.assign(static_cast<std::size_t>(cfg.level) + 1, nullptr);
            for (int k = cfg.level; k >= 0; --k) {
                levels[static_cast<std::size_t>(k)] = top;
                top = top->lower();
            }
        }
        return levels[static_cast<std::size_t>(n)];
    }
};

/// "fixed:r0,r1" is X - r for the fixed point r with residue r0 + r1 w,
/// "ratio:ELEM" is [b](X)/X; either may end in ":e" for the exponent.
ColemanFactor parse_factor(const PrimeContext& ctx, const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InputError("factor must start with fixed: or ratio:");
    const std::string kind = text.substr(0, colon);
    std::string body = text.substr(colon + 1);
    int e = 1;
    if (auto last = body.rfind(':'); last != std::string::npos) {
        try {
            std::size_t used = 0;
            e = std::stoi(body.substr(last + 1), &used);
            if (used != body.size() - last - 1) throw std::invalid_argument("trailing");
        } catch (const std::logic_error&) {
            throw InputError("bad exponent in factor '" + text + "'");
        }
        body = body.substr(0, last);
    }
    if (kind == "fixed") {
        auto v = parse_matrix(body);
        if (v.size() != 1 || v[0].size() != 2) throw InputError("fixed factor needs r0,r1");
        return ColemanFactor::linear(fixed_point(ctx, v[0][0], v[0][1]), e);
    }
    if (kind == "ratio") return ColemanFactor::ratio(parse_element(ctx, body), e);
    throw InputError("factor must start with fixed: or ratio:");
}

ColemanDatum parse_datum(Session& s, const std::string& series, const std::vector<std::string>& factors, const std::string& a) {
    if (series.empty() == factors.empty()) throw InputError("give exactly one of --coleman and --factor");
    const auto av = parse_element(*s.ctx, a);
    if (!factors.empty()) {
        std::vector<ColemanFactor> fac;
        for (const auto& f : factors) fac.push_back(parse_factor(*s.ctx, f));
        return ColemanDatum::from_factors(*s.fg, fac, av);
    }
    return ColemanDatum::from_series(*s.fg, parse_series(*s.ctx, series, s.cfg.deg - 1), av);
}

/// The factored route when available; a bare series goes through truncated
/// evaluation, whose precision the result carries.
TowerElement delta_at(const ColemanDatum& x, const LevelPtr& L) { return x.structured() ? delta_n(x, L) : delta_n_series(x, L); }

UnramifiedElement random_unit(const PrimeContext& ctx, std::mt19937_64& rng) {
    const auto m = ctx.modulus(ctx.precision);
    for (;;) {
        auto x = UnramifiedElement::from_residues(ctx, rng() % m, rng() % m, ctx.precision);
        if (x.is_unit()) return x;
    }
}

/// Product of norm-coherent factors: [b](X)/X and X - r for fixed points r.
ColemanDatum random_datum(const FormalGroup& fg, std::mt19937_64& rng) {
    const auto& ctx = fg.context();
    std::vector<ColemanFactor> fac;
    for (int i = 0; i < 2; ++i) {
        ColemanFactor f;
        if (i == 0) {
            std::int64_t r0 = static_cast<std::int64_t>(rng() % ctx.p), r1 = static_cast<std::int64_t>(rng() % ctx.p);
            if (r0 == 0 && r1 == 0) r0 = 1;
            f = ColemanFactor::linear(fixed_point(ctx, r0, r1), 1 + static_cast<int>(rng() % 2));
        } else {
            f = ColemanFactor::ratio(random_unit(ctx, rng), 1);
        }
        f.w = random_unit(ctx, rng);
        fac.push_back(f);
    }
    return ColemanDatum::from_factors(fg, fac, random_unit(ctx, rng));
}

/// H_n-trace of a random element of positive valuation: a point of F(Psi_n).
FormalPoint random_point(const LevelPtr& L, std::mt19937_64& rng, int jmin) {
    std::vector<Zq> c(static_cast<std::size_t>(L->degree()));
    for (int j = jmin; j < L->degree(); ++j) c[j] = {rng() % L->modulus(), rng() % L->modulus()};
    return FormalPoint::certify(psi_trace(TowerElement(L, c, L->degree() * L->working_digits())));
}

// -- curve literals --------------------------------------------------------

/// "y2=x3-x", "y^2 + xy = x^3 + 2x + 1": integer coefficients a1..a6.
std::array<std::int64_t, 5> parse_curve(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (ch != ' ' && ch != '^' && ch != '*') s += ch;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw InputError("curve needs '=': " + text);
    std::array<std::int64_t, 5> a{0, 0, 0, 0, 0};
    auto terms = [&](std::string side, const std::function<void(std::int64_t, const std::string&)>& take) {
        std::size_t i = 0;
        while (i < side.size()) {
            std::int64_t sign = 1;
            if (side[i] == '+' || side[i] == '-') {
                sign = side[i] == '-' ? -1 : 1;
                ++i;
            }
            std::size_t j = i;
            while (j < side.size() && std::isdigit(static_cast<unsigned char>(side[j]))) ++j;
            std::size_t k = j;
            while (k < side.size() && side[k] != '+' && side[k] != '-') ++k;
            const std::string mono = side.substr(j, k - j);
            // a leading digit run belongs to the monomial when it follows x or y
            const std::int64_t c = j > i ? std::stoll(side.substr(i, j - i)) : 1;
            if (j == i && mono.empty()) throw InputError("empty term in curve: " + text);
            take(sign * c, mono);
            i = k;
        }
    };
    std::string lhs = s.substr(0, eq), rhs = s.substr(eq + 1);
    if (lhs.rfind("y2", 0) != 0) throw InputError("curve must start with y^2: " + text);
    terms(lhs.substr(2), [&](std::int64_t c, const std::string& m) {
        if (m == "xy") {
            a[0] += c;
        } else if (m == "y") {
            a[2] += c;
        } else {
            throw InputError("unsupported left-hand term '" + m + "'");
        }
    });
    bool cubic = false;
    terms(rhs, [&](std::int64_t c, const std::string& m) {
        if (m == "x3") {
            if (c != 1) throw InputError("x^3 must have coefficient 1");
            cubic = true;
        } else if (m == "x2") {
            a[1] += c;
        } else if (m == "x") {
            a[3] += c;
        } else if (m.empty()) {
            a[4] += c;
        } else {
            throw InputError("unsupported right-hand term '" + m + "'");
        }
    });
    if (!cubic) throw InputError("curve needs an x^3 term");
    return a;
}

/// Rows separated by ';', entries by ',' or spaces.
std::vector<IntVec> parse_matrix(const std::string& text) {
    std::vector<IntVec> rows;
    std::stringstream ss(text);
    std::string row;
    while (std::getline(ss, row, ';')) {
        for (char& ch : row)
            if (ch == ',') ch = ' ';
        std::istringstream rs(row);
        IntVec r;
        std::string tok;
        while (rs >> tok) {
            try {
                std::size_t used = 0;
                r.push_back(std::stoll(tok, &used));
                if (used != tok.size()) throw InputError("bad matrix entry '" + tok + "'");
            } catch (const std::logic_error&) {
                throw InputError("bad matrix entry '" + tok + "'");
            }
        }
        if (!r.empty()) rows.push_back(r);
    }
    return rows;
}

std::pair<std::uint32_t, int> parse_group(const std::string& g) {
    const auto c = g.find('^');
    try {
        if (c == std::string::npos) return {static_cast<std::uint32_t>(std::stoul(g)), 1};
        return {static_cast<std::uint32_t>(std::stoul(g.substr(0, c))), std::stoi(g.substr(c + 1))};
    } catch (const std::logic_error&) {
        throw InputError("--group must look like 3^n");
    }
}

json lattice_json(const Subgroup& H) {
    auto [a, b, d] = H.hermite();
    return json{{"hermite", {a, b, d}}, {"order", H.order()}};
}

// -- verify-all suites -------------------------------------------------------

using Suite = std::function<void(Checks&)>;

json run_suites(const std::vector<std::pair<std::string, Suite>>& suites, bool& ok) {
    json out = json::array();
    for (const auto& [name, body] : suites) {
        Checks c;
        try {
            body(c);
        } catch (const std::exception& e) {
            c.add(std::string("completed without error: ") + e.what(), false);
        }
        ok &= c.ok;
        int held = 0;
        for (const auto& x : c.list) held += x["holds"].get<bool>();
        out.push_back(json{{"suite", name}, {"ok", c.ok}, {"checks", c.list.size()}, {"held", held}, {"details", c.list}});
    }
    return out;
}

json verify_all(const RunConfig& cfg, bool& ok) {
    Session S(cfg);
    const auto& ctx = *S.ctx;
    const auto& fg = *S.fg;
    std::vector<std::pair<std::string, Suite>> suites;

    suites.emplace_back("padic_core", [&](Checks& c) {
        std::mt19937_64 rng(cfg.seed);
        bool assoc = true, dist = true, inv = true;
        for (int t = 0; t < 20; ++t) {
            auto x = random_unit(ctx, rng), y = random_unit(ctx, rng), z = random_unit(ctx, rng);
            assoc &= ((x * y) * z).equals(x * (y * z));
            dist &= (x * (y + z)).equals(x * y + x * z);
            inv &= (x * x.inverse()).equals(UnramifiedElement::exact(ctx, 1));
        }
        c.add("(xy)z = x(yz)", assoc);
        c.add("x(y+z) = xy + xz", dist);
        c.add("x x^-1 = 1", inv);
    });

    suites.emplace_back("series", [&](Checks& c) {
        FieldSeries id = fg.logarithm().compose(fg.exponential());
        bool ok1 = true;
        for (int k = 0; k <= fg.bound(); ++k) ok1 &= id[k].equals(FieldElement(UnramifiedElement::exact(ctx, k == 1 ? 1 : 0)));
        c.add("lambda(exp(X)) = X", ok1);
    });

    suites.emplace_back("lubin_tate", [&](Checks& c) {
        const auto& F = fg.law();
        bool sym = true;
        F.for_each([&](const LawSeries::Exp& e, const UnramifiedElement& x) { sym &= x.equals(F.at(e[1], e[0])); });
        c.add("F(X,Y) = F(Y,X)", sym);
        c.add("F(F(X,Y),Z) = F(X,F(Y,Z))", fg.assoc_left().equals(fg.assoc_right()));
        c.add("[pi] = f", fg.mult_by(fg.pi()).equals(fg.distinguished()));
        auto e0 = fg.torsion_polynomial(0);
        c.add("E_0 Eisenstein of degree q - 1", e0.is_eisenstein() && e0.degree() == static_cast<int>(ctx.q - 1),
              polynomial_string(e0, 'Y'));
        auto prod = parse_polynomial(ctx, "Y", 'Y');
        for (int n = 0; n <= std::min(cfg.level, 1); ++n) prod = prod * fg.torsion_polynomial(n);
        c.add("Y prod E_k = f^(n+1)", prod.equals(fg.iterate(std::min(cfg.level, 1) + 1)));
    });

    suites.emplace_back("tower", [&](Checks& c) {
        for (int n = 0; n <= cfg.level; ++n) {
            const auto& L = S.level(n);
            std::uint64_t pn = 1;
            for (int i = 0; i < n; ++i) pn *= ctx.p;
            const auto tag = " at level " + std::to_string(n);
            c.add("quotient order p^n" + tag, static_cast<std::uint64_t>(L->quotient_order()) == pn);
            if (L->has_galois()) c.add("|H_n| = (q-1) p^n" + tag, L->H_indices().size() == (ctx.q - 1) * pn);
            auto tr = TowerElement::constant(L, 1).trace();
            c.add("Tr(1) = d" + tag, tr.equals(FieldElement(UnramifiedElement::exact(ctx, L->degree()))), field_json(tr));
        }
    });

    suites.emplace_back("coates_wiles", [&](Checks& c) {
        if (cfg.level < 1) return;
        std::mt19937_64 rng(cfg.seed + 1);
        const auto& L1 = S.level(1);
        const auto& L0 = S.level(0);
        const auto chis = characters(*L1);
        for (int t = 0; t < 3; ++t) {
            auto x = random_datum(fg, rng);
            // trivial character: the values lie in Phi, compared across levels there
            auto a = delta_chi(x, characters(*L0)[0], L0), b = delta_chi(x, chis[0], L1);
            bool scalar = true;
            for (int i = 1; i < b.rank(); ++i) scalar &= b[i].is_zero();
            const auto fa = a[0].to_base(), fb = b[0].to_base();
            c.add("delta_chi independent of n", scalar && fa.equals(fb), field_json(fa), field_json(fb));
            auto d = delta_n(x, L1);
            bool eq = true;
            for (int k = 0; k < 3; ++k) {
                const int i = 1 + static_cast<int>(rng() % (L1->units().size() - 1));
                auto dx = delta_n(x.twist(L1->unit_element(L1->units()[i])), L1);
                for (const auto& chi : chis)
                    eq &= delta_chi(dx, chi).equals(delta_chi(d, chi).times_Z(-character_exponent(*L1, chi, i)));
            }
            c.add("delta_chi(x^sigma) = chi(sigma)^-1 delta_chi(x)", eq);
        }
    });

    suites.emplace_back("anticyclo", [&](Checks& c) {
        if (cfg.level < 1) return;
        std::mt19937_64 rng(cfg.seed + 2);
        const auto& L1 = S.level(1);
        const auto& L0 = S.level(0);
        const auto chis = characters(*L1);
        // (D+1) v(y) must exceed the working precision of the level
        const int jmin = 2 + (L1->degree() * L1->working_digits()) / (cfg.deg + 1);
        for (int t = 0; t < 3; ++t) {
            auto y = random_point(L1, rng, jmin);
            auto lam = formal_log(fg, y.y);
            CyclotomicElement sum(L1, 1);
            for (const auto& chi : chis) sum += lambda_chi(fg, y, chi);
            auto whole = CyclotomicElement::constant(L1, 1, lam);
            c.add("sum_chi lambda_chi(y) = lambda(y)", sum.equals(whole), cyclo_json(sum), cyclo_json(whole));
            auto Ny = psi_norm_step(fg, y.y);
            auto lhs = CyclotomicElement::constant(L1, 1, formal_log(fg, Ny));
            auto rhs = UnramifiedElement::exact(ctx, static_cast<std::int64_t>(ctx.p)) * lambda_chi(fg, y, chis[0]);
            c.add("lambda_chi(N y) = p lambda_chi(y)", lhs.equals(rhs), cyclo_json(lhs), cyclo_json(rhs));
        }
        auto x = random_datum(fg, rng);
        const auto m = ctx.modulus(ctx.precision - 1);
        auto y0 = TowerElement::constant(
            L0, UnramifiedElement::from_residues(ctx, rng() % m, rng() % m, ctx.precision - 1).scale(1));
        auto p0 = kummer_pair(fg, y0, x, L0), p1 = kummer_pair(fg, y0, x, L1);
        c.add("pairing stable from m = 0 to m = 1", p0.equals_mod_O(p1), p0.to_string(), p1.to_string());
        auto ex = character_expansion(delta_n(x, L0), formal_log(fg, y0));
        c.add("<y, x> = sum_chi delta_chi(x) lambda_chi(y) at n = 0", p0.equals_mod_O(PairingValue{ex}), p0.to_string(),
              PairingValue{ex}.to_string());
    });

    suites.emplace_back("hecke_lattices", [&](Checks& c) {
        const auto p = static_cast<unsigned>(cfg.p);
        for (int s = 1; s <= 3; ++s) {
            LatticeModel m(p, s, s + 2);
            auto [a, b] = classification_counts(m);
            const auto tag = " at s = " + std::to_string(s);
            c.add("p + 1 overlattices" + tag, enumerate_overlattices(m).size() == p + 1);
            c.add("p TypeA and one TypeB" + tag, a == static_cast<int>(p) && b == 1);
            auto r = galois_transitivity_check(m);
            c.add("TypeA simply transitive, TypeB fixed" + tag, r.simply_transitive && r.type_b_fixed);
        }
    });

    suites.emplace_back("trace_systems", [&](Checks& c) {
        std::mt19937_64 rng(cfg.seed + 3);
        bool parity = true, conf = true;
        for (int s = 0; s <= 9; ++s)
            for (int k = 0; k <= s; ++k) {
                parity &= (s - k) % 2 ? verify_parity_identity(s, k).holds : verify_even_identity(s, k);
                const auto want = norm_down(s, k);
                for (int t = 0; t < 10; ++t) conf &= norm_down_random(s, k, rng, false) == want;
            }
        c.add("N_{s/k} y_s = closed form for s <= 9", parity);
        c.add("norm_down confluent under random orders", conf);
    });

    suites.emplace_back("cyclic_cohomology", [&](Checks& c) {
        std::mt19937_64 rng(cfg.seed + 4);
        bool one = true;
        for (int t = 0; t < 20; ++t) {
            auto M = random_cyclic_action(static_cast<std::uint32_t>(cfg.p), 1 + t % 2, rng, 3);
            one &= tate_h0(M) == tate_h1(M);
        }
        c.add("h(M) = 1 on random finite modules", one);
    });

    suites.emplace_back("finite_ec", [&](Checks& c) {
        const std::array<std::int64_t, 5> curve{0, 0, 0, -1, 0};
        FiniteField F3(3, 1), F9(3, 2), F81(3, 4);
        EllipticCurve E3(F3, curve), E9(F9, curve), E81(F81, curve);
        c.add("a_3 = 0 for y^2 = x^3 - x", count_points(E3).trace == 0);
        c.add("a_9 = -6", count_points(E9).trace == -6);
        c.add("#Aut = 12 over F_9", automorphisms(E9, 9).order() == 12);
        c.add("Frobenius over F_9 is [-3] on E(F_9), E(F_81)", scalar_frobenius_check(3, curve, {1, 2}).holds);
        auto kb = kernel_union_size(E81, automorphisms(E81, 9));
        c.add("kernel union bound B <= 6", kb.bound <= 6, kb.bound);
    });

    suites.emplace_back("modular_genus", [&](Checks& c) {
        bool chain = true;
        for (std::uint64_t N = 1; N <= 300; ++N) {
            auto r = ram_bound(N);
            chain &= r.equality_holds && (!r.applicable || r.strict);
        }
        c.add("genus chain for N <= 300", chain);
        auto out = search_N(361, 3, 2);
        bool ells = out.size() == 3 && out[0].ell == 5 && out[1].ell == 17 && out[2].ell == 29;
        for (const auto& x : out) ells &= x.minus3_nonsquare && x.phi_exceeds_bound;
        c.add("nsearch from 361 gives ell = 5, 17, 29 with certificates", ells);
    });

    return run_suites(suites, ok);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ltkit: Lubin-Tate towers, Coates-Wiles derivatives and the finite arithmetic around them"};
    app.require_subcommand(1);
    RunConfig cfg;
    bool want_json = false, want_text = false;
    app.add_option("--p", cfg.p, "prime")->capture_default_str();
    app.add_option("--prec", cfg.prec, "precision in p-adic digits")->capture_default_str();
    app.add_option("--deg", cfg.deg, "series degree bound D (0: automatic)")->capture_default_str();
    app.add_option("--level", cfg.level, "highest tower level (2 is opt-in and slow)")->capture_default_str();
    app.add_option("--seed", cfg.seed, "seed for random inputs")->capture_default_str();
    app.add_flag("--json", want_json, "JSON output (default)");
    app.add_flag("--text", want_text, "flattened key: value output");

    auto sub = [&](const std::string& name, const std::string& help) {
        auto* s = app.add_subcommand(name, help);
        s->fallthrough();
        return s;
    };
    auto action = [](CLI::App* parent, const std::string& name, const std::string& help) {
        auto* s = parent->add_subcommand(name, help);
        s->fallthrough();
        return s;
    };

    // fg
    auto* fg = sub("fg", "formal group tables");
    fg->require_subcommand(1);
    auto* fg_law = action(fg, "law", "coefficients of F(X,Y)");
    auto* fg_log = action(fg, "log", "coefficients of lambda");
    auto* fg_exp = action(fg, "exp", "coefficients of lambda^-1");
    auto* fg_mult = action(fg, "mult", "coefficients of [a](X)");
    std::string mult_a;
    fg_mult->add_option("A", mult_a, "element of O")->required();
    auto* fg_torsion = action(fg, "torsion", "torsion polynomial E_n");
    int torsion_n = 0;
    fg_torsion->add_option("n", torsion_n)->required();

    // tower
    auto* tower = sub("tower", "tower level data");
    tower->require_subcommand(1);
    std::string tower_elem = "v";
    tower->add_option("--elem", tower_elem, "element as a polynomial in v")->capture_default_str();
    auto* tw_info = action(tower, "info", "level invariants");
    auto* tw_trace = action(tower, "trace", "trace of --elem to Phi");
    auto* tw_act = action(tower, "act", "Galois action of the unit U on --elem");
    std::string act_u;
    tw_act->add_option("U", act_u)->required();
    auto* tw_chars = action(tower, "chars", "anticyclotomic characters");

    // cw
    auto* cw = sub("cw", "Coates-Wiles derivatives");
    cw->require_subcommand(1);
    std::string coleman, coleman_a = "1";
    std::vector<std::string> factor_specs;
    cw->add_option("--coleman", coleman, "Coleman series in X");
    cw->add_option("--factor", factor_specs, "factor fixed:r0,r1[:e] or ratio:ELEM[:e], repeatable");
    cw->add_option("--a", coleman_a, "twist coordinate")->capture_default_str();
    auto* cw_delta = action(cw, "delta", "delta(x)");
    auto* cw_delta_n = action(cw, "delta-n", "delta_n(x) at level n");
    int cw_n = 0, cw_k = 0;
    cw_delta_n->add_option("n", cw_n)->required();
    auto* cw_delta_chi = action(cw, "delta-chi", "delta_chi(x) for character k of level n");
    cw_delta_chi->add_option("n", cw_n)->required();
    cw_delta_chi->add_option("k", cw_k)->required();

    // pair
    auto* pair = sub("pair", "Kummer pairing and its character expansion");
    std::string point;
    int denom = 0, pair_m = -1;
    bool use_trace = false;
    pair->add_option("--point", point, "point as a polynomial in v_n")->required();
    pair->add_option("--denom", denom, "n in y (x) pi^-n")->capture_default_str();
    pair->add_option("--coleman", coleman, "Coleman series in X");
    pair->add_option("--factor", factor_specs, "factor fixed:r0,r1[:e] or ratio:ELEM[:e], repeatable");
    pair->add_option("--a", coleman_a, "twist coordinate")->capture_default_str();
    pair->add_option("--m", pair_m, "pairing level m >= n (default n)");
    pair->add_flag("--psi-trace", use_trace, "replace the point by its H_n-trace");

    // lambda-chi
    auto* lchi = sub("lambda-chi", "lambda_chi of a point of F(Psi_n)");
    int chi_k = 0;
    lchi->add_option("--point", point, "point as a polynomial in v_n")->required();
    lchi->add_option("--chi", chi_k, "character index")->required();
    lchi->add_flag("--psi-trace", use_trace, "replace the point by its H_n-trace");

    // lattice
    auto* lattice = sub("lattice", "overlattices of T_s");
    lattice->require_subcommand(1);
    int lat_s = 1;
    lattice->add_option("--s", lat_s)->capture_default_str();
    auto* la_enum = action(lattice, "enumerate", "index-p overlattices");
    auto* la_class = action(lattice, "classify", "TypeA / TypeB classification");
    auto* la_trans = action(lattice, "transitivity", "Galois action on TypeA");
    auto* la_hecke = action(lattice, "hecke", "Hecke identity");

    // traces
    auto* traces = sub("traces", "symbolic trace relations");
    traces->require_subcommand(1);
    std::optional<std::int64_t> ap;
    int S_bound = 9;
    traces->add_option("--ap", ap, "specialize a_p");
    traces->add_option("--S", S_bound, "largest level s")->capture_default_str();
    auto* tr_norm = action(traces, "norm", "N_{s/k}(y_s)");
    int tr_s = 0, tr_k = 0;
    tr_norm->add_option("s", tr_s)->required();
    tr_norm->add_option("k", tr_k)->required();
    auto* tr_parity = action(traces, "parity", "parity-vanishing deduction for y_s");
    tr_parity->add_option("s", tr_s)->required();

    // herbrand
    auto* herb = sub("herbrand", "Tate cohomology of a cyclic action");
    std::string group = "3", module, matrix;
    herb->add_option("--group", group, "p^n")->capture_default_str();
    herb->add_option("--module", module, "cyclic factor orders d1,d2,..")->required();
    herb->add_option("--matrix", matrix, "generator matrix, rows separated by ';'")->required();

    // ec
    auto* ec = sub("ec", "elliptic curves over finite fields");
    ec->require_subcommand(1);
    std::string curve = "y2=x3-x";
    ec->add_option("--curve", curve)->capture_default_str();
    int ec_k = 1;
    std::uint64_t ec_N = 2;
    auto* ec_count = action(ec, "count", "#E(F_{p^k})");
    ec_count->add_option("k", ec_k)->required();
    auto* ec_struct = action(ec, "structure", "group structure over F_{p^k}");
    ec_struct->add_option("k", ec_k)->required();
    auto* ec_auts = action(ec, "auts", "automorphisms over F_{p^2}");
    auto* ec_orbits = action(ec, "orbits", "cyclic subgroups of order N and Aut-orbits");
    ec_orbits->add_option("N", ec_N)->required();
    auto* ec_kernels = action(ec, "kernels", "kernel union bound B");

    // x0
    auto* x0 = sub("x0", "genus of X_0(N)");
    x0->require_subcommand(1);
    std::uint64_t level_N = 1;
    x0->add_option("--N", level_N)->required();
    auto* x0_genus = action(x0, "genus", "genus data");
    auto* x0_ram = action(x0, "rambound", "Hurwitz bound chain");

    // nsearch
    auto* ns = sub("nsearch", "conductor search N = l^2 N_E");
    std::uint64_t base = 0, kbound = 0;
    int count = 3;
    ns->add_option("--base-conductor", base)->required();
    ns->add_option("--count", count)->capture_default_str();
    ns->add_option("--kernel-bound", kbound)->required();

    auto* va = sub("verify-all", "every module's invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "ltkit: " << e.what() << "\n";
        return 2;
    }

    try {
        if (want_json && want_text) throw InputError("--json and --text are exclusive");
        cfg.format = want_text ? "text" : "json";
        cfg.resolve();

        if (fg->parsed()) {
            Session S(cfg);
            json r;
            std::string cmd = "fg";
            if (fg_law->parsed()) {
                cmd += " law";
                json t = json::array();
                S.fg->law().for_each([&](const LawSeries::Exp& e, const UnramifiedElement& c) {
                    if (!c.is_zero()) t.push_back(json{{"i", e[0]}, {"j", e[1]}, {"c", c.to_string()}, {"precision", c.precision()}});
                });
                r["coefficients"] = t;
            } else if (fg_log->parsed()) {
                cmd += " log";
                r["coefficients"] = series_table(S.fg->logarithm());
            } else if (fg_exp->parsed()) {
                cmd += " exp";
                r["coefficients"] = series_table(S.fg->exponential());
            } else if (fg_mult->parsed()) {
                cmd += " mult";
                auto a = parse_element(*S.ctx, mult_a);
                r["a"] = element_json(a);
                r["coefficients"] = series_table(S.fg->mult_by(a));
            } else if (fg_torsion->parsed()) {
                cmd += " torsion";
                if (torsion_n < 0 || torsion_n > 2) throw InputError("torsion level must be 0, 1 or 2");
                auto e = S.fg->torsion_polynomial(torsion_n);
                r["n"] = torsion_n;
                r["polynomial"] = polynomial_string(e, 'Y');
                r["degree"] = e.degree();
                r["eisenstein"] = e.is_eisenstein();
            }
            return emit(cfg, cmd, r, true);
        }

        if (tower->parsed()) {
            Session S(cfg);
            const auto& L = S.level(cfg.level);
            json r{{"n", L->n()}};
            std::string cmd = "tower";
            if (tw_info->parsed()) {
                cmd += " info";
                r["degree"] = L->degree();
                r["ramification_index"] = L->ramification_index();
                r["working_digits"] = L->working_digits();
                r["different_units"] = L->different_units();
                r["units"] = L->units().size();
                r["quotient_order"] = L->quotient_order();
                r["galois_tables"] = L->has_galois();
                if (L->has_galois()) r["H_order"] = L->H_indices().size();
                r["minimal_polynomial_eisenstein"] = L->minimal_polynomial().is_eisenstein();
                if (L->degree() <= 16) r["minimal_polynomial"] = polynomial_string(L->minimal_polynomial(), 'Y');
            } else if (tw_trace->parsed()) {
                cmd += " trace";
                auto x = parse_tower_element(L, tower_elem);
                r["element"] = tower_json(x);
                r["trace"] = field_json(x.trace());
            } else if (tw_act->parsed()) {
                cmd += " act";
                auto u = parse_element(*S.ctx, act_u);
                auto x = parse_tower_element(L, tower_elem);
                r["unit"] = element_json(u);
                r["element"] = tower_json(x);
                r["image"] = tower_json(L->galois_act(L->unit_of(u), x));
            } else if (tw_chars->parsed()) {
                cmd += " chars";
                json t = json::array();
                for (const auto& chi : characters(*L))
                    t.push_back(json{{"index", chi.index}, {"conductor", chi.conductor()}, {"parity", chi.parity()}});
                r["characters"] = t;
            }
            return emit(cfg, cmd, r, true);
        }

        if (cw->parsed()) {
            Session S(cfg);
            auto x = parse_datum(S, coleman, factor_specs, coleman_a);
            json r{{"coleman", coleman}, {"factors", factor_specs}, {"a", coleman_a}, {"factored", x.structured()}};
            std::string cmd = "cw";
            Checks checks;
            if (cw_delta->parsed()) {
                cmd += " delta";
                r["delta"] = element_json(delta(x));
            } else if (cw_delta_n->parsed()) {
                cmd += " delta-n";
                r["n"] = cw_n;
                auto d = delta_at(x, S.level(cw_n));
                if (d.precision_units() <= 0) throw PrecisionShortfall("delta_n", d.precision_units(), 1);
                r["delta_n"] = tower_json(d);
            } else if (cw_delta_chi->parsed()) {
                cmd += " delta-chi";
                const auto& L = S.level(cw_n);
                const auto chis = characters(*L);
                if (cw_k < 0 || cw_k >= static_cast<int>(chis.size()))
                    throw InputError("character index out of range 0.." + std::to_string(chis.size() - 1));
                const auto& chi = chis[static_cast<std::size_t>(cw_k)];
                auto d = delta_at(x, L);
                auto full = delta_chi(d, chi), psi = delta_chi_psi(d, chi);
                if (full.precision_units() <= 0) throw PrecisionShortfall("delta_chi", full.precision_units(), 1);
                r["n"] = cw_n;
                r["character"] = json{{"index", chi.index}, {"conductor", chi.conductor()}};
                r["delta_chi"] = cyclo_json(full);
                checks.add("inflated sum = Psi-level sum", full.equals(psi), cyclo_json(full), cyclo_json(psi));
            }
            r["checks"] = checks.list;
            return emit(cfg, cmd, r, checks.ok);
        }

        if (pair->parsed()) {
            if (pair_m < 0) pair_m = denom;
            if (pair_m < denom) throw InputError("--m must be at least --denom");
            Session S(cfg);
            auto x = parse_datum(S, coleman, factor_specs, coleman_a);
            const auto& Ln = S.level(denom);
            auto y = parse_tower_element(Ln, point);
            if (use_trace) y = psi_trace(y);
            const auto& Lm = S.level(pair_m);
            const auto lam = formal_log(*S.fg, y);
            auto pm = kummer_pair_from(delta_at(x, Lm), detail::lift_to(lam, Lm), denom);
            auto ex = character_expansion(delta_at(x, Ln), lam);
            PairingValue literal{ex}, scaled{detail::pi_power_inverse(*S.ctx, denom) * ex};
            Checks checks;
            checks.add("<y (x) pi^-n, x> = pi^-n sum_chi delta_chi(x) lambda_chi(y) mod O", pm.equals_mod_O(scaled),
                       pm.to_string(), scaled.to_string());
            json r{{"n", denom},
                   {"m", pair_m},
                   {"point", tower_json(y)},
                   {"pairing", pm.to_string()},
                   {"expansion", literal.to_string()},
                   {"expansion_times_pi_minus_n", scaled.to_string()},
                   {"literal_form_holds", pm.equals_mod_O(literal)},
                   {"checks", checks.list}};
            return emit(cfg, "pair", r, checks.ok);
        }

        if (lchi->parsed()) {
            Session S(cfg);
            const auto& L = S.level(cfg.level);
            auto y0 = parse_tower_element(L, point);
            if (use_trace) y0 = psi_trace(y0);
            auto y = FormalPoint::certify(y0);
            if (!y.psi_fixed) throw InputError("point is not fixed by H_n; pass --psi-trace");
            const auto chis = characters(*L);
            if (chi_k < 0 || chi_k >= static_cast<int>(chis.size()))
                throw InputError("character index out of range 0.." + std::to_string(chis.size() - 1));
            auto lam = formal_log(*S.fg, y.y);
            CyclotomicElement sum(L, L->n());
            for (const auto& chi : chis) sum += lambda_chi(*S.fg, y, chi);
            auto whole = CyclotomicElement::constant(L, L->n(), lam);
            Checks checks;
            checks.add("sum_chi lambda_chi(y) = lambda(y)", sum.equals(whole), cyclo_json(sum), cyclo_json(whole));
            const auto& chi = chis[static_cast<std::size_t>(chi_k)];
            json r{{"n", L->n()},
                   {"point", tower_json(y.y)},
                   {"character", json{{"index", chi.index}, {"conductor", chi.conductor()}}},
                   {"lambda", tower_json(lam)},
                   {"lambda_chi", cyclo_json(lambda_chi(*S.fg, y, chi))},
                   {"checks", checks.list}};
            return emit(cfg, "lambda-chi", r, checks.ok);
        }

        if (lattice->parsed()) {
            if (cfg.p > 1000) throw InputError("--p too large for the lattice model");
            LatticeModel m(static_cast<std::uint32_t>(cfg.p), lat_s, lat_s + 2);
            json r{{"s", lat_s}, {"model_exponent", lat_s + 2}};
            std::string cmd = "lattice";
            bool ok = true;
            if (la_enum->parsed()) {
                cmd += " enumerate";
                json t = json::array();
                for (const auto& L : enumerate_overlattices(m)) t.push_back(lattice_json(L));
                r["overlattices"] = t;
                r["count"] = t.size();
            } else if (la_class->parsed()) {
                cmd += " classify";
                json t = json::array();
                for (const auto& L : enumerate_overlattices(m)) {
                    auto c = classify_overlattice(m, L);
                    auto j = lattice_json(L);
                    j["class"] = c.to_string();
                    t.push_back(j);
                }
                auto [a, b] = classification_counts(m);
                r["overlattices"] = t;
                r["type_a"] = a;
                r["type_b"] = b;
            } else if (la_trans->parsed()) {
                cmd += " transitivity";
                auto t = galois_transitivity_check(m);
                r["image"] = t.image;
                r["orbit_size"] = t.orbit_size;
                r["simply_transitive"] = t.simply_transitive;
                r["type_b_fixed"] = t.type_b_fixed;
                ok = t.simply_transitive && t.type_b_fixed;
            } else if (la_hecke->parsed()) {
                cmd += " hecke";
                auto h = hecke_identity(m);
                r["identity"] = h.to_string();
                json t = json::array();
                for (const auto& term : h.terms) t.push_back(json{{"label", term.label}, {"lattice", term.lattice.to_string()}});
                r["terms"] = t;
            }
            return emit(cfg, cmd, r, ok);
        }

        if (traces->parsed()) {
            if (tr_s > S_bound) throw InputError("s exceeds --S");
            auto render = [&](const PointExpr& e) { return ap ? e.specialize_ap(*ap).to_string() : e.to_string(); };
            json r{{"a_p", ap ? json(*ap) : json("symbolic")}, {"S", S_bound}};
            if (tr_norm->parsed()) {
                std::vector<PointExpr> chain;
                auto e = norm_down(tr_s, tr_k, &chain);
                r["s"] = tr_s;
                r["k"] = tr_k;
                r["norm"] = render(e);
                json steps = json::array();
                for (const auto& c : chain) steps.push_back(render(c));
                r["chain"] = steps;
                return emit(cfg, "traces norm", r, true);
            }
            auto rep = parity_vanishing_report(tr_s);
            r["s"] = tr_s;
            r["claim"] = rep.claim;
            json cases = json::array();
            for (const auto& d : rep.cases)
                cases.push_back(json{{"conductor_exponent", d.conductor_exponent},
                                     {"parity", d.parity},
                                     {"required", d.required},
                                     {"case", d.case_label},
                                     {"steps", d.steps},
                                     {"vanishes", d.vanishes}});
            r["cases"] = cases;
            r["complete"] = rep.complete;
            r["y0_symbolic_branch"] = rep.y0_symbolic_branch;
            return emit(cfg, "traces parity", r, rep.complete);
        }

        if (herb->parsed()) {
            auto [gp, gn] = parse_group(group);
            IntVec orders;
            for (const auto& row : parse_matrix(module))
                for (auto d : row) orders.push_back(d);
            auto A = parse_matrix(matrix);
            CyclicAction M(gp, gn, orders, A);
            const auto h0 = tate_h0(M), h1 = tate_h1(M);
            Checks checks;
            checks.add("|H^0| = |H^1|", h0 == h1, h0, h1);
            json r{{"group_order", M.group_order()}, {"module_order", M.order()}, {"h0", h0}, {"h1", h1},
                   {"herbrand", std::to_string(h0) + "/" + std::to_string(h1)}, {"checks", checks.list}};
            return emit(cfg, "herbrand", r, checks.ok);
        }

        if (ec->parsed()) {
            if (cfg.p > 1000) throw InputError("--p too large for enumeration");
            const auto a = parse_curve(curve);
            const auto p = static_cast<std::uint32_t>(cfg.p);
            json r{{"curve", curve}, {"a", a}};
            std::string cmd = "ec";
            bool ok = true;
            if (ec_count->parsed() || ec_struct->parsed()) {
                if (ec_k < 1) throw InputError("k must be positive");
                FiniteField F(p, ec_k);
                EllipticCurve E(F, a);
                r["field"] = F.size();
                if (ec_count->parsed()) {
                    cmd += " count";
                    auto c = count_points(E);
                    r["points"] = c.points;
                    r["trace"] = c.trace;
                    r["j"] = F.to_string(E.j_invariant());
                } else {
                    cmd += " structure";
                    auto g = group_structure(E);
                    r["d1"] = g.d1;
                    r["d2"] = g.d2;
                }
            } else if (ec_auts->parsed()) {
                cmd += " auts";
                FiniteField F(p, 2);
                EllipticCurve E(F, a);
                auto G = automorphisms(E, F.size());
                json orders = json::array();
                for (int i = 0; i < static_cast<int>(G.order()); ++i) orders.push_back(G.element_order(i));
                r["field"] = F.size();
                r["order"] = G.order();
                r["element_orders"] = orders;
            } else if (ec_orbits->parsed()) {
                cmd += " orbits";
                // smallest even degree with E[N] rational
                std::optional<CyclicSubgroupReport> rep;
                std::uint64_t field = 0;
                for (int k = 2; k <= 12 && !rep; k += 2) {
                    FiniteField F(p, k);
                    EllipticCurve E(F, a);
                    try {
                        rep = cyclic_subgroup_orbits(E, automorphisms(E, static_cast<std::uint64_t>(p) * p), ec_N);
                        field = F.size();
                    } catch (const ResourceLimit&) {
                    }
                }
                if (!rep) throw InputError("E[N] is not rational over any field within the budget");
                r["field"] = field;
                r["N"] = rep->N;
                r["mu"] = rep->mu;
                r["subgroups"] = rep->subgroups.size();
                json orbits = json::array();
                for (const auto& o : rep->orbits)
                    orbits.push_back(json{{"size", o.members.size()}, {"stabilizer", o.stabilizer.size()}, {"stabilizer_is_pm1", o.stabilizer_is_pm1}});
                r["orbits"] = orbits;
                Checks checks;
                checks.add("#subgroups = mu", rep->count_matches, rep->subgroups.size(), rep->mu);
                checks.add("6 #orbits >= mu", rep->orbit_bound, 6 * rep->orbits.size(), rep->mu);
                checks.add("sum |Aut|/|Stab| = #subgroups", rep->orbit_stabilizer);
                r["checks"] = checks.list;
                ok = checks.ok;
            } else if (ec_kernels->parsed()) {
                cmd += " kernels";
                FiniteField F(p, 4);
                EllipticCurve E(F, a);
                auto kb = kernel_union_size(E, automorphisms(E, static_cast<std::uint64_t>(p) * p));
                json recs = json::array();
                for (const auto& x : kb.records)
                    recs.push_back(json{{"element", x.element}, {"order", x.order}, {"ker_minus", x.ker_minus}, {"ker_plus", x.ker_plus}, {"union", x.union_size}});
                r["field"] = F.size();
                r["records"] = recs;
                r["B"] = kb.bound;
            }
            return emit(cfg, cmd, r, ok);
        }

        if (x0->parsed()) {
            if (level_N < 1) throw InputError("--N must be positive");
            auto g = genus_x0(level_N);
            json r{{"N", level_N}, {"mu", g.mu}, {"eps2", g.eps2}, {"eps3", g.eps3}, {"eps_inf", g.eps_inf}, {"g", g.g}};
            if (x0_genus->parsed()) return emit(cfg, "x0 genus", r, true);
            if (x0_ram->parsed()) {
                auto c = ram_bound(level_N);
                r["two_g_minus_two"] = c.two_g_minus_two;
                r["middle"] = c.middle.to_string();
                r["mu_over_6"] = c.mu_over_6.to_string();
                r["applicable"] = c.applicable;
                r["strict"] = c.strict;
                r["reason"] = c.strictness_reason;
                Checks checks;
                checks.add("2g - 2 = mu/6 - e2/2 - 2e3/3 - einf", c.equality_holds, c.two_g_minus_two, c.middle.to_string());
                if (c.applicable) checks.add("2g - 2 < mu/6", c.strict, c.two_g_minus_two, c.mu_over_6.to_string());
                r["checks"] = checks.list;
                return emit(cfg, "x0 rambound", r, checks.ok);
            }
        }

        if (ns->parsed()) {
            if (count < 1) throw InputError("--count must be positive");
            json t = json::array();
            for (const auto& c : search_N(base, count, kbound)) {
                json ev = json::array();
                for (const auto& e : c.evidence)
                    ev.push_back(json{{"prime", e.prime}, {"exponent", e.exponent}, {"legendre", e.legendre}, {"square", e.square}});
                t.push_back(json{{"ell", c.ell},
                                 {"N", c.N},
                                 {"phi", c.phi},
                                 {"kernel_bound", c.kernel_bound},
                                 {"minus3_nonsquare", c.minus3_nonsquare},
                                 {"phi_exceeds_bound", c.phi_exceeds_bound},
                                 {"evidence", ev},
                                 {"hypothesis", c.hypothesis}});
            }
            return emit(cfg, "nsearch", json{{"base_conductor", base}, {"candidates", t}}, true);
        }

        if (va->parsed()) {
            bool ok = true;
            auto suites = verify_all(cfg, ok);
            return emit(cfg, "verify-all", json{{"suites", suites}}, ok);
        }
    } catch (const InputError& e) {
        std::cerr << "ltkit: " << e.what() << "\n";
        return 2;
    } catch (const InvalidArgument& e) {
        std::cerr << "ltkit: invalid input: " << e.what() << "\n";
        return 2;
    } catch (const ResourceLimit& e) {
        std::cerr << "ltkit: resource limit: " << e.what() << "\n";
        return 2;
    } catch (const PrecisionShortfall& e) {
        std::cerr << "ltkit: " << e.what() << " (raise --prec or --deg)\n";
        return 2;
    } catch (const IdentityViolation& e) {
        std::cerr << "ltkit: identity violation: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "ltkit: " << e.what() << "\n";
        return 2;
    }
    std::cerr << "ltkit: nothing to do\n";
    return 2;
}
