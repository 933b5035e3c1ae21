#pragma once

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "fgl/flop.hpp"
#include "fgl/genus.hpp"
#include "fgl/series_io.hpp"
#include "fgl/tower.hpp"
#include "fgl/weierstrass.hpp"
#include "fgl/wsigma.hpp"

namespace fgl::checks {

using nlohmann::json;

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CheckConfig {
    std::string name;
    int order = 0;       // truncation order / degree, check-specific
    std::vector<long> primes{2, 3, 5, 7};
    std::uint64_t seed = 1;
    double tol = 1e-8;
    int trials = 100;
    int n_lo = 4, n_hi = 10;  // sn-flop range
    long budget = 0;          // probe sampling budget (0 = check default)
    std::string fgl = "krichever";
    bool via_towers = false;
    std::string todd = "krichever";
    std::string target = "P1";
    int dim = 4;
    std::string z = "0.3", tau = "i", k = "0.1";

    json to_json() const {
        return {{"name", name},     {"order", order},   {"primes", primes},
                {"seed", seed},     {"tol", tol},       {"trials", trials},
                {"n_lo", n_lo},     {"n_hi", n_hi},     {"budget", budget},
                {"fgl", fgl},       {"via_towers", via_towers},
                {"todd", todd},     {"target", target}, {"dim", dim},
                {"z", z},           {"tau", tau},       {"k", k}};
    }
};

struct CheckReport {
    std::string name;
    std::string status;  // pass | fail | inconclusive
    double elapsed_ms = 0.0;
    json witnesses = json::array();
    json config;

    /// --json output is byte-stable for fixed config+seed, so the elapsed
    /// time only ever appears on the human-readable stream.
    json to_json(bool with_elapsed = false) const {
        json j{{"check", name}, {"status", status}, {"witnesses", witnesses}, {"config", config}};
        if (with_elapsed) j["elapsed_ms"] = elapsed_ms;
        return j;
    }
};

inline Cplx parse_complex(const std::string& s) {
    // accepts forms like "0.3", "i", "-i", "0.5+i", "0.5+0.25i", "1.5i"
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw ConfigError("empty complex literal");
    auto parse_part = [](const std::string& p) -> double {
        if (p.empty() || p == "+") return 1.0;
        if (p == "-") return -1.0;
        return std::stod(p);
    };
    auto ipos = t.find('i');
    try {
        if (ipos == std::string::npos) return {std::stod(t), 0.0};
        // split the imaginary part off: find the sign that separates
        for (std::size_t cut = t.size(); cut-- > 1;) {
            if ((t[cut] == '+' || t[cut] == '-') && t[cut - 1] != 'e' && t[cut - 1] != 'E') {
                std::string re = t.substr(0, cut);
                std::string im = t.substr(cut, t.size() - cut - 1);
                if (t.back() != 'i') break;
                return {std::stod(re), parse_part(im)};
            }
        }
        if (t.back() != 'i') throw ConfigError("bad complex literal: " + s);
        return {0.0, parse_part(t.substr(0, t.size() - 1))};
    } catch (const std::exception&) {
        throw ConfigError("bad complex literal: " + s);
    }
}

namespace detail {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

inline QFgl law_by_name(const std::string& which, int order) {
    if (which == "additive") return additive_fgl(order);
    if (which == "multiplicative") {
        auto tb = make_table({{"u", 1}, {"v", 1}});
        auto u = QSeries::variable(tb, order, 0, Rational(1));
        auto v = QSeries::variable(tb, order, 1, Rational(1));
        return QFgl::validate(u + v - u * v, std::min(8, order));
    }
    if (which == "universal") return universal_fgl(order, std::min(6, order));
    if (which == "krichever") return krichever_bb_fgl(order, std::min(6, order));
    if (which == "krichever-curve") return krichever_fgl(order, false, std::min(6, order));
    if (which == "weierstrass")
        return curve_formal_group(generic_weierstrass_curve(), order, std::min(6, order));
    throw ConfigError("unknown formal group law: " + which);
}

inline ToddData todd_by_name(const std::string& which, int order) {
    if (which == "todd") return todd_todd(order);
    if (which == "additive") return todd_additive(order);
    if (which == "krichever") return todd_krichever(order);
    if (which == "universal") return todd_universal(order);
    throw ConfigError("unknown genus: " + which);
}

}  // namespace detail

// ---- individual checks -------------------------------------------------------

/// Seeded exact property suite: series ring axioms, reversion round trips,
/// log/exp duality, the lambda_t twist identity, truncation coherence.
inline void seeded_kernel_suite(CheckReport& rep, const CheckConfig& c) {
    struct Rng {
        std::uint64_t s;
        std::uint64_t next() {
            std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
            return z ^ (z >> 31);
        }
        long range(long lo, long hi) { return lo + long(next() % std::uint64_t(hi - lo + 1)); }
    } rng{c.seed};
    int fails = 0;
    auto tb = make_table({{"u", 1}, {"v", 1}});
    auto tl = make_table({{"t", 1}});
    const int N = std::max(c.order, 6);
    auto rand_series = [&](const VarTablePtr& table, bool zero_const) {
        std::vector<QSeries::Term> terms;
        std::vector<Mono::Exp> exps(table->size(), 0);
        std::function<void(std::size_t, int)> walk = [&](std::size_t i, int left) {
            if (i == table->size()) {
                Mono m(table->size());
                m.e = exps;
                if (zero_const && m.is_constant()) return;
                if (rng.next() % 2) return;
                long num = rng.range(-9, 9);
                if (num) terms.emplace_back(m, Rational(num, rng.range(1, 6)));
                return;
            }
            for (int e = 0; e <= left; ++e) {
                exps[i] = Mono::Exp(e);
                walk(i + 1, left - e);
            }
            exps[i] = 0;
        };
        walk(0, N);
        return QSeries::from_terms(table, N, std::move(terms));
    };

    int triples = std::max(2, c.trials / 10);
    for (int i = 0; i < triples; ++i) {
        auto a = rand_series(tb, false), b = rand_series(tb, false), d = rand_series(tb, false);
        if (!((a + b) + d == a + (b + d)) || !(a * b == b * a) || !((a * b) * d == a * (b * d)) ||
            !(a * (b + d) == a * b + a * d))
            ++fails;
        const int M = N - 2;
        if (!((a * b).truncated(M) == a.truncated(M) * b.truncated(M))) ++fails;
    }
    int revs = std::max(5, c.trials / 5);
    auto t = QSeries::variable(tl, N, 0, Rational(1));
    for (int i = 0; i < revs; ++i) {
        std::vector<QSeries::Term> terms;
        Mono lin(1);
        lin.e[0] = 1;
        terms.emplace_back(lin, Rational(1));
        for (int kk = 2; kk <= N; ++kk) {
            long num = rng.range(-9, 9);
            if (!num) continue;
            Mono m(1);
            m.e[0] = Mono::Exp(kk);
            terms.emplace_back(m, Rational(num, rng.range(1, 6)));
        }
        auto f = QSeries::from_terms(tl, N, std::move(terms));
        auto g = SeriesOps::reversion(f, 0);
        if (!(SeriesOps::compose_univariate(f, 0, g) == t) ||
            !(SeriesOps::compose_univariate(g, 0, f) == t))
            ++fails;
    }
    {
        // log/exp duality for the multiplicative law, and the twist identity:
        // the additive law twisted by (1 - e^{-tx})/t is u + v - t u v
        auto u2 = QSeries::variable(tb, N, 0, Rational(1));
        auto v2 = QSeries::variable(tb, N, 1, Rational(1));
        auto mul1 = QFgl::validate(u2 + v2 - u2 * v2, std::min(8, N));
        if (!(fgl_from_exponential(mul1.log_exp(), std::min(8, N)).series() == mul1.series()))
            ++fails;

        auto tb3 = make_table({{"u", 1}, {"v", 1}, {"t", -1}});
        auto u3 = QSeries::variable(tb3, N, 0, Rational(1));
        auto v3 = QSeries::variable(tb3, N, 1, Rational(1));
        auto t3 = QSeries::variable(tb3, N, 2, Rational(1));
        auto add3 = QFgl::validate(u3 + v3, std::min(8, N));
        auto xt = make_table({{"x", 1}, {"t", -1}});
        std::vector<QSeries::Term> lam_terms;
        Rational fact(1);
        for (int n = 0; n + 1 <= N; ++n) {
            fact = fact.times_int(n + 1);
            Mono m(2);
            m.e[0] = Mono::Exp(n + 1);
            m.e[1] = Mono::Exp(n);
            lam_terms.emplace_back(m, Rational(n % 2 ? -1 : 1) * fact.inverse());
        }
        auto lam = QSeries::from_terms(xt, N, std::move(lam_terms));
        auto twisted = add3.twist({SeriesOps::reversion(lam, 0), lam, 0}, std::min(8, N));
        if (!(twisted.series() == u3 + v3 - t3 * u3 * v3)) ++fails;
    }

    rep.witnesses.push_back({{"random_triples", triples}, {"reversion_round_trips", revs}});
    if (fails) {
        rep.status = "fail";
        rep.witnesses.push_back({{"failures", fails}});
    }
}

inline CheckReport check_kernel(const CheckConfig& c) {
    CheckReport rep{c.name, "pass"};
    seeded_kernel_suite(rep, c);
    return rep;
}

inline CheckReport check_delta(const CheckConfig& c) {
    CheckReport rep{c.name, "pass"};
    auto r = delta_check();
    if (!r.pass) rep.status = "fail";
    rep.witnesses.push_back({{"polynomial_identity", r.difference.is_zero()},
                             {"b4_bracket", r.b4_matches},
                             {"point_evaluation", r.point_eval_matches}});
    if (!r.difference.is_zero())
        rep.witnesses.push_back({{"difference", series_to_json(r.difference)}});
    return rep;
}

inline CheckReport check_curve(const CheckConfig& c) {
    CheckReport rep{c.name, "pass"};
    int order = c.order > 0 ? c.order : 8;
    auto F = curve_formal_group(generic_weierstrass_curve(), order, order);
    bool integral = true;
    for (const auto& [m, cf] : F.series().terms())
        if (!cf.is_integer()) integral = false;
    auto hom = F.series().homogeneous_weight();
    bool homog = hom && *hom == 1;
    if (!integral || !homog) rep.status = "fail";
    rep.witnesses.push_back({{"validated_to_order", order},
                             {"integral_coefficients", integral},
                             {"weight_homogeneous", homog},
                             {"terms", F.series().num_terms()}});
    return rep;
}

inline CheckReport check_krichever(const CheckConfig& c) {
    CheckReport rep{c.name, "pass"};
    int order = c.order > 0 ? c.order : 8;
    auto Fc = krichever_fgl(order, true, std::min(8, order));
    auto Fb = krichever_bb_fgl(order, std::min(8, order));
    bool integral = true;
    for (const auto& [m, cf] : Fc.series().terms())
        if (!cf.is_integer()) integral = false;
    auto iso = krichever_iso_report(std::min(order, 8));
    bool homog = Fb.series().homogeneous_weight() && *Fb.series().homogeneous_weight() == 1;
    if (!integral || !homog || !iso.pass) rep.status = "fail";
    rep.witnesses.push_back({{"curve_chart_integral", integral},
                             {"weight_homogeneous", homog},
                             {"strict_iso_to_curve_chart", iso.pass},
                             {"iso_integral_in_half_chart", iso.integral_half_chart}});
    return rep;
}

inline CheckReport check_landweber(const CheckConfig& c) {
    CheckReport rep{c.name, "pass"};
    bool any_inconclusive = false;
    // v0 = l for the integral law
    {
        int order = 8;
        auto F = krichever_fgl(order, true, 6);
        json v0s = json::array();
        bool ok = true;
        for (long l : c.primes) {
            if (l > order) continue;
            auto r = F.l_series(l, 0);
            bool good = r.v[0] == QSeries::constant(r.v[0].table(), r.v[0].order(), Rational(l));
            ok &= good;
            v0s.push_back({{"l", l}, {"v0_equals_l", good}});
        }
        if (!ok) rep.status = "fail";
        rep.witnesses.push_back({{"v0", v0s}});
    }
    for (long l : c.primes) {
        auto sr = supersingular_probe(l);
        json entry{{"l", l}, {"pass", sr.pass}, {"notes", sr.notes}};
        if (!sr.witness.empty()) entry["witness"] = sr.witness;
        {
            // l-series coefficient dump {"l":…, "v":[…]} for the mod-l law
            int order = std::max<int>(int(l) + 1, 6);
            auto lrep = krichever_fgl(order, true, std::min(6, order))
                            .mod_prime(l, std::min(6, order))
                            .l_series(l, 1);
            json vs = json::array();
            for (const auto& v : lrep.v) vs.push_back(series_to_json(v));
            entry["l_series"] = {{"l", lrep.l}, {"v", vs}};
        }
        rep.witnesses.push_back(entry);
        if (!sr.pass) rep.status = "fail";
        if (l == 3 || l == 5 || l == 7) {
            auto v2 = v2_unit_probe(l, c.budget);
            json e2{{"check", "v2-unit"},
                    {"l", l},
                    {"points_scanned", v2.points_scanned},
                    {"supersingular_points", v2.supersingular_points},
                    {"v2_nonzero", v2.v2_nonzero},
                    {"v2_zero", v2.v2_zero}};
            if (v2.inconclusive) {
                e2["status"] = "inconclusive";
                any_inconclusive = true;
            } else if (!v2.pass) {
                rep.status = "fail";
            }
            rep.witnesses.push_back(e2);
        }
    }
    if (rep.status == "pass" && any_inconclusive) rep.status = "inconclusive";
    return rep;
}

inline CheckReport check_flop(const CheckConfig& c) {
    CheckReport rep{c.name, "pass"};
    int degree = c.order > 0 ? c.order : 8;
    auto law = detail::law_by_name(c.fgl, degree + 6);
    if (c.via_towers) {
        auto r = flop_via_towers(law, degree);
        bool ok = r.cancellation && r.matches_closed;
        if (!ok) rep.status = "fail";
        rep.witnesses.push_back({{"cancellation_lemma", r.cancellation},
                                 {"towers_match_closed_form", r.matches_closed},
                                 {"atoms", r.atom_count}});
        return rep;
    }
    auto out = flop_closed_form(law, degree);
    bool expect_zero = (c.fgl == "krichever" || c.fgl == "additive");
    json degs = json::array();
    for (const auto& d : out.report.degrees) {
        json e{{"degree", d.degree}, {"numerator_zero", d.numerator_zero}};
        if (!d.numerator_zero) e["nonzero_witness"] = d.nonzero_witness;
        degs.push_back(e);
    }
    rep.witnesses.push_back({{"fgl", c.fgl},
                             {"zero", out.report.zero},
                             {"certified_degree", out.report.certified_degree},
                             {"lowest_nonzero_degree", out.report.lowest_nonzero_degree},
                             {"degrees", degs}});
    bool ok = expect_zero ? out.report.zero
                          : (!out.report.zero && out.report.lowest_nonzero_degree <= degree);
    if (!ok) rep.status = "fail";
    return rep;
}

inline CheckReport check_sn_flop(const CheckConfig& c) {
    CheckReport rep{c.name, "pass"};
    json table = json::array();
    for (int n = c.n_lo; n <= c.n_hi; ++n) {
        auto engine = flop_sn_difference(n);
        Rational formula(n * n - 3 * n - 2 + (n % 2 == 1 ? 2 : -2), 2);
        bool match = engine == formula;
        if (!match) rep.status = "fail";
        table.push_back({{"n", n},
                         {"engine", engine.str()},
                         {"formula", formula.str()},
                         {"match", match}});
    }
    rep.witnesses.push_back({{"table", table}});
    return rep;
}

inline CheckReport check_genus(const CheckConfig& c) {
    CheckReport rep{c.name, "pass"};
    int order = std::max(c.order > 0 ? c.order : 8, 6);
    auto T = detail::todd_by_name(c.todd, order);
    QSeries value;
    if (c.target.size() > 1 && c.target[0] == 'P' && std::isdigit((unsigned char)c.target[1])) {
        value = genus_projective_space(T, std::stoi(c.target.substr(1)));
    } else if (c.target.size() == 2 && c.target[0] == 'W') {
        int i = c.target[1] - '0';
        if (i < 1 || i > 4) throw ConfigError("genus target must be W1..W4");
        value = genus_combo(T, w_classes()[std::size_t(i - 1)]);
    } else {
        // comma-separated product of projective space dimensions
        ProjProduct dims;
        std::string cur;
        for (char ch : c.target + ",") {
            if (ch == ',') {
                if (!cur.empty()) dims.push_back(std::stoi(cur));
                cur.clear();
            } else
                cur += ch;
        }
        if (dims.empty()) throw ConfigError("bad genus target: " + c.target);
        CobordismCombo combo{{{Rational(1), dims}}};
        value = genus_combo(T, combo);
    }
    rep.witnesses.push_back(
        {{"todd", c.todd}, {"target", c.target}, {"value", series_to_json(value)}});
    return rep;
}

inline CheckReport check_verify_abcd(const CheckConfig& c) {
    CheckReport rep{c.name, "pass"};
    auto r = krichever_abcd(std::max(c.order, 10));
    if (!r.pass) rep.status = "fail";
    rep.witnesses.push_back({{"phi_W1_is_minus_2a1", r.w1},
                             {"phi_W2_is_24a2", r.w2},
                             {"phi_W3_is_a3", r.w3},
                             {"phi_W4_is_6a2sq_minus_a4", r.w4},
                             {"abcd_jacobian_nonsingular", r.jacobian_nonsingular}});
    return rep;
}

inline CheckReport check_verify_k(const CheckConfig& c) {
    CheckReport rep{c.name, "pass"};
    std::vector<std::string> mismatches;
    bool wtable = verify_w_table(&mismatches);
    if (!wtable) rep.status = "fail";
    rep.witnesses.push_back({{"w_table_11_equations", wtable}, {"mismatches", mismatches}});

    // K_d vs the genus over every product of projective spaces of dimension
    // d, symbolically over the universal exponential and the Krichever one
    auto U = todd_universal(6);
    auto K = todd_krichever(6);
    json dims = json::array();
    int dmax = c.dim > 0 ? std::min(c.dim, 4) : 4;
    for (int d = 1; d <= dmax; ++d) {
        auto ru = k_formula_check(U, d);
        auto rk = k_formula_check(K, d);
        if (!ru.pass || !rk.pass) rep.status = "fail";
        dims.push_back({{"dim", d},
                        {"universal", ru.pass},
                        {"krichever", rk.pass},
                        {"mismatches", ru.mismatches}});
    }
    rep.witnesses.push_back({{"k_formulas", dims}});
    return rep;
}

inline CheckReport check_sigma_identity(const CheckConfig& c) {
    CheckReport rep{c.name, "pass"};
    SigmaEvaluator ev({parse_complex(c.tau), 40});
    struct Rng {
        std::uint64_t s;
        std::uint64_t next() {
            std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
            return z ^ (z >> 31);
        }
        double unit() { return double(next() % 1000000) / 500000.0 - 1.0; }
    } rng{c.seed};
    auto rand_c = [&](double s) { return Cplx(rng.unit() * s, rng.unit() * s); };

    double worst = 0.0;
    long done = 0;
    std::size_t max_n = std::min(std::size_t(c.n_hi > 0 ? c.n_hi : 4), std::size_t(4));
    for (std::size_t n = 2; n <= max_n; ++n) {
        for (int trial = 0; trial < c.trials; ++trial) {
            // constrained, well-separated points
            std::vector<Cplx> x, y;
            Cplx sx = 0, sy = 0;
            bool ok = true;
            for (std::size_t i = 0; i < n; ++i) {
                x.push_back(rand_c(0.22));
                sx += x.back();
            }
            for (std::size_t i = 0; i + 1 < n; ++i) {
                y.push_back(rand_c(0.22));
                sy += y.back();
            }
            y.push_back(sx - sy);
            if (std::abs(y.back()) > 0.7) ok = false;
            for (std::size_t r = 0; r < n && ok; ++r)
                for (std::size_t s = r + 1; s < n; ++s)
                    if (std::abs(x[r] - x[s]) < 0.05) ok = false;
            if (!ok) {
                --trial;
                continue;
            }
            worst = std::max(worst, ww_identity_residual(ev, x, y));
            ++done;
        }
    }
    // the flop substitution pattern
    for (int trial = 0; trial < c.trials / 2; ++trial) {
        Cplx A1 = rand_c(0.2), A2 = rand_c(0.2), B1 = rand_c(0.2), B2 = rand_c(0.2),
             zz = rand_c(0.2);
        std::vector<Cplx> x{-A1, B2, B1, -A2};
        std::vector<Cplx> y{B2 - zz, B1 - zz, -A2 + zz, -A1 + zz};
        bool ok = true;
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t s = r + 1; s < 4; ++s)
                if (std::abs(x[r] - x[s]) < 0.05) ok = false;
        if (!ok) continue;
        worst = std::max(worst, ww_identity_residual(ev, x, y));
        ++done;
    }
    if (!(worst < c.tol)) rep.status = "fail";
    rep.witnesses.push_back({{"trials", done}, {"worst_residual", worst}, {"tol", c.tol}});
    return rep;
}

inline CheckReport check_bridge(const CheckConfig& c) {
    CheckReport rep{c.name, "pass"};
    int order = c.order > 0 ? std::min(c.order, 6) : 4;
    auto r = analytic_algebraic_bridge(parse_complex(c.z), parse_complex(c.tau),
                                       parse_complex(c.k), order, 40, c.tol);
    if (!r.pass) rep.status = "fail";
    json residuals = json::array();
    for (std::size_t j = 0; j < r.residuals.size(); ++j)
        residuals.push_back({{"f", j + 2}, {"residual", r.residuals[j]}});
    rep.witnesses.push_back({{"normalization", r.normalization},
                             {"residuals", residuals},
                             {"tolerance", r.tolerance}});
    return rep;
}

// ---- registry ---------------------------------------------------------------

struct CheckDef {
    std::string name;
    CheckConfig full;   // acceptance-tier defaults
    CheckConfig fast;   // reduced profile
    std::function<CheckReport(const CheckConfig&)> run;
};

inline const std::vector<CheckDef>& registry() {
    static const std::vector<CheckDef> defs = [] {
        std::vector<CheckDef> v;
        auto add = [&](std::string name, auto fn, auto tweak_full, auto tweak_fast) {
            CheckConfig full, fast;
            full.name = fast.name = name;
            tweak_full(full);
            tweak_fast(fast);
            v.push_back({name, full, fast, fn});
        };
        add("kernel", check_kernel, [](CheckConfig& c) { c.order = 8; c.trials = 100; },
            [](CheckConfig& c) { c.order = 6; c.trials = 20; });
        add("delta-check", check_delta, [](CheckConfig&) {}, [](CheckConfig&) {});
        add("curve", check_curve, [](CheckConfig& c) { c.order = 8; },
            [](CheckConfig& c) { c.order = 6; });
        add("krichever", check_krichever, [](CheckConfig& c) { c.order = 8; },
            [](CheckConfig& c) { c.order = 6; });
        add("landweber", check_landweber, [](CheckConfig&) {},
            [](CheckConfig& c) { c.primes = {2, 3}; c.budget = 400; });
        add("flop-krichever", check_flop,
            [](CheckConfig& c) { c.order = 8; c.fgl = "krichever"; },
            [](CheckConfig& c) { c.order = 6; c.fgl = "krichever"; });
        add("flop-universal", check_flop,
            [](CheckConfig& c) { c.order = 6; c.fgl = "universal"; },
            [](CheckConfig& c) { c.order = 4; c.fgl = "universal"; });
        add("flop-multiplicative", check_flop,
            [](CheckConfig& c) { c.order = 6; c.fgl = "multiplicative"; },
            [](CheckConfig& c) { c.order = 4; c.fgl = "multiplicative"; });
        add("flop-towers", check_flop,
            [](CheckConfig& c) { c.order = 6; c.fgl = "universal"; c.via_towers = true; },
            [](CheckConfig& c) { c.order = 2; c.fgl = "universal"; c.via_towers = true; });
        add("sn-flop", check_sn_flop, [](CheckConfig& c) { c.n_lo = 4; c.n_hi = 10; },
            [](CheckConfig& c) { c.n_lo = 4; c.n_hi = 7; });
        add("genus", check_genus, [](CheckConfig& c) { c.order = 8; },
            [](CheckConfig& c) { c.order = 6; });
        add("verify-abcd", check_verify_abcd, [](CheckConfig& c) { c.order = 10; },
            [](CheckConfig& c) { c.order = 10; });
        add("verify-k", check_verify_k, [](CheckConfig& c) { c.dim = 4; },
            [](CheckConfig& c) { c.dim = 3; });
        add("sigma-identity", check_sigma_identity,
            [](CheckConfig& c) { c.trials = 100; c.tol = 1e-8; c.n_hi = 4; },
            [](CheckConfig& c) { c.trials = 20; c.tol = 1e-8; c.n_hi = 4; });
        add("bridge", check_bridge, [](CheckConfig& c) { c.order = 4; c.tol = 1e-5; },
            [](CheckConfig& c) { c.order = 3; c.tol = 1e-5; });
        return v;
    }();
    return defs;
}

inline const CheckDef& find_check(const std::string& name) {
    for (const auto& d : registry())
        if (d.name == name) return d;
    throw ConfigError("unknown check: " + name);
}

inline CheckReport run_check(const CheckConfig& c) {
    const auto& def = find_check(c.name);
    detail::Timer timer;
    CheckReport rep = def.run(c);
    rep.elapsed_ms = timer.ms();
    rep.config = c.to_json();
    return rep;
}

struct Summary {
    std::vector<CheckReport> reports;

    bool all_pass() const {
        for (const auto& r : reports)
            if (r.status != "pass") return false;
        return true;
    }
    bool any_fail() const {
        for (const auto& r : reports)
            if (r.status == "fail") return true;
        return false;
    }
    bool any_inconclusive() const {
        for (const auto& r : reports)
            if (r.status == "inconclusive") return true;
        return false;
    }
    int exit_code(bool strict) const {
        if (any_fail()) return 1;
        if (strict && any_inconclusive()) return 3;
        return 0;
    }
    json to_json(bool with_elapsed = false) const {
        json arr = json::array();
        for (const auto& r : reports) arr.push_back(r.to_json(with_elapsed));
        return arr;
    }
};

/// Runs every registered check under the named profile, up to `jobs` at a
/// time; reports come back ordered by registry position regardless of the
/// scheduling.
inline Summary run_all(const std::string& profile, int jobs, std::uint64_t seed = 1) {
    if (profile != "fast" && profile != "full")
        throw ConfigError("unknown profile: " + profile + " (use fast or full)");
    const auto& defs = registry();
    std::vector<CheckConfig> configs;
    for (const auto& d : defs) {
        auto c = profile == "fast" ? d.fast : d.full;
        c.seed = seed;
        configs.push_back(c);
    }
    Summary sum;
    sum.reports.resize(configs.size());
    if (jobs < 1) jobs = 1;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= configs.size()) break;
            try {
                sum.reports[i] = run_check(configs[i]);
            } catch (const std::exception& e) {
                CheckReport rep{configs[i].name, "fail"};
                rep.witnesses.push_back({{"exception", e.what()}});
                rep.config = configs[i].to_json();
                sum.reports[i] = rep;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return sum;
}

}  // namespace fgl::checks
