#include <catch2/catch_amalgamated.hpp>

#include "fgl/weierstrass.hpp"
#include "helpers.hpp"

using namespace fgl;

namespace {

QSeries qvar(const VarTablePtr& tb, const char* name, int order) {
    return QSeries::variable(tb, order, tb->require(name), Rational(1));
}

WeierstrassCurve<Rational> rational_curve(std::array<long, 5> mu) {
    auto tb = make_table({});
    WeierstrassCurve<Rational> E;
    E.coeff_table = tb;
    for (int i = 0; i < 5; ++i) E.mu[i] = QSeries::constant(tb, 0, Rational(mu[i]));
    return E;
}

}  // namespace

TEST_CASE("cuspidal cubic gives the additive law") {
    auto E = rational_curve({0, 0, 0, 0, 0});
    auto F = curve_formal_group(E, 9);
    auto tb = F.table();
    CHECK(F.series() == qvar(tb, "u", 9) + qvar(tb, "v", 9));
}

TEST_CASE("generic curve law is integral and valid") {
    auto F = curve_formal_group(generic_weierstrass_curve(), 8, 8);
    // integrality: no denominators anywhere
    for (const auto& [m, c] : F.series().terms()) CHECK(c.is_integer());
    // F(u,0) = u comes with validation; spot-check the first mixed term:
    // in the x/y uniformizer F = u + v + mu1 uv + ...
    auto tb = F.table();
    Mono uv(tb->size());
    uv.e[tb->require("u")] = 1;
    uv.e[tb->require("v")] = 1;
    Mono m1(tb->size());
    m1.e[tb->require("mu1")] = 1;
    CHECK(F.series().coeff(mono_add(uv, m1)) == Rational(1));
    REQUIRE(F.series().homogeneous_weight());
    CHECK(*F.series().homogeneous_weight() == 1);
}

TEST_CASE("curve invariants") {
    // y^2 = x^3 - x: Delta = 64, j = 1728
    auto E = rational_curve({0, 0, 0, -1, 0});
    auto inv = curve_invariants(E);
    auto tb = E.coeff_table;
    CHECK(inv.delta == QSeries::constant(tb, 0, Rational(64)));
    // j = c4^3/Delta = 110592/64 = 1728
    CHECK(inv.j_num == QSeries::constant(tb, 0, Rational(110592)));
    CHECK(Rational(110592, 64) == Rational(1728));
    // 1728 Delta = c4^3 - c6^2
    CHECK(inv.delta.scaled(Rational(1728)) == inv.c4 * inv.c4 * inv.c4 - inv.c6 * inv.c6);

    // cusp: Delta = 0
    CHECK(curve_invariants(rational_curve({0, 0, 0, 0, 0})).delta.is_zero());

    // 4 b8 = b2 b6 - b4^2 as a polynomial identity in the mu's
    auto G = generic_weierstrass_curve();
    auto gi = curve_invariants(G);
    CHECK(gi.b8.scaled(Rational(4)) == gi.b2 * gi.b6 - gi.b4 * gi.b4);
    CHECK(gi.delta.scaled(Rational(1728)) == gi.c4 * gi.c4 * gi.c4 - gi.c6 * gi.c6);
}

TEST_CASE("krichever law") {
    auto F = krichever_fgl(8, /*integral=*/false, 8);
    auto tb = F.table();
    REQUIRE(F.series().homogeneous_weight());
    CHECK(*F.series().homogeneous_weight() == 1);

    // cusp specialization a = 0 gives the additive law
    std::vector<std::optional<Rational>> zeros(tb->size());
    std::vector<int> map(tb->size(), 0);
    auto uv = make_table({{"u", 1}, {"v", 1}});
    for (std::size_t i = 0; i < tb->size(); ++i) {
        if (tb->name(i) == "u")
            map[i] = 0;
        else if (tb->name(i) == "v")
            map[i] = 1;
        else
            zeros[i] = Rational(0);
    }
    auto at_zero = SeriesOps::substitute_scalars(F.series(), zeros, uv, map);
    CHECK(at_zero == qvar(uv, "u", 8) + qvar(uv, "v", 8));

    // integral chart has integer coefficients
    auto Fi = krichever_fgl(8, /*integral=*/true, 8);
    for (const auto& [m, c] : Fi.series().terms()) CHECK(c.is_integer());

    // specialization commutes: the integral chart with ab4 -> a4/2 equals the
    // rational chart
    auto rt = F.table();
    std::vector<VarImage<Rational>> im(Fi.table()->size());
    QSeries half_a4 = qvar(rt, "a4", 8).scaled(Rational(1, 2));
    for (std::size_t i = 0; i < Fi.table()->size(); ++i) {
        const auto& n = Fi.table()->name(i);
        if (n == "ab4")
            im[i] = VarImage<Rational>::to_series(half_a4);
        else
            im[i] = VarImage<Rational>::to_var(rt->require(n));
    }
    CHECK(SeriesOps::substitute(Fi.series(), im, rt) == F.series());
}

TEST_CASE("krichever log satisfies the defining property") {
    auto F = krichever_fgl(10, false, 8);
    auto pair = F.log_exp();
    auto gF = SeriesOps::compose_univariate(pair.log, 0, F.series());
    auto tb = F.table();
    auto gu = SeriesOps::compose_univariate(pair.log, 0, qvar(tb, "u", 10));
    auto gv = SeriesOps::compose_univariate(pair.log, 0, qvar(tb, "v", 10));
    CHECK(gF == gu + gv);

    // invariant differential ties the log to the curve data
    auto ut = F.univariate_table();
    auto omega_inv = SeriesOps::compose_univariate(pair.log.derivative(0).with_order(9), 0,
                                                   qvar(ut, "t", 9));
    CHECK(omega_inv == pair.log.derivative(0));
}

TEST_CASE("specialization commutes with expansion") {
    // substituting mu -> phi(a) into the generic expansion equals expanding
    // the already-specialized curve
    auto via_subst = krichever_fgl(6, false, 6);
    auto direct = curve_formal_group(krichever_curve(false), 6, 6);
    CHECK(via_subst.series() == direct.series());
}

TEST_CASE("baker-akhiezer exponential") {
    auto lam = krichever_exponential(9);
    auto T = lam.table();
    auto a1 = QSeries::variable(T, 9, 1, Rational(1));
    auto a2 = QSeries::variable(T, 9, 2, Rational(1));
    auto a3 = QSeries::variable(T, 9, 3, Rational(1));
    auto a4 = QSeries::variable(T, 9, 4, Rational(1));
    // f-coefficients of Q = t/lambda, frozen from the expansion of
    // log Q = -a1 t - (a2/2) t^2 + (a3/6) t^3 + (a4/20 - a2^2/4) t^4 + ...
    auto unit = SeriesOps::exact_divide_linear(lam, 0, Rational(1), -1, Rational(0));
    auto Qs = unit.invert_unit();
    auto f = [&](int i) { return Qs.coefficient_of(0, i).with_order(9); };
    CHECK(f(1) == -a1);
    CHECK(f(2) == (a1 * a1 - a2).scaled(Rational(1, 2)));
    CHECK(f(3) == (-(a1 * a1 * a1) + (a1 * a2).scaled(Rational(3)) + a3).scaled(Rational(1, 6)));
    auto f4 = (a1 * a1 * a1 * a1).scaled(Rational(1, 24)) -
              (a1 * a1 * a2).scaled(Rational(1, 4)) - (a1 * a3).scaled(Rational(1, 6)) -
              (a2 * a2).scaled(Rational(1, 8)) + a4.scaled(Rational(1, 20));
    CHECK(f(4) == f4);

    // the law built from it validates, is weight homogeneous, and its
    // invariant-differential log matches the construction
    auto F = krichever_bb_fgl(8);
    REQUIRE(F.series().homogeneous_weight());
    CHECK(*F.series().homogeneous_weight() == 1);
    CHECK(F.log_exp().exp == krichever_exponential(8));
}

TEST_CASE("curve law and baker-akhiezer law are strictly isomorphic") {
    auto rep = krichever_iso_report(8);
    CHECK(rep.pass);
    // h = t + O(t^3): the quadratic terms of the two exponentials agree
    Mono t2(rep.h.table()->size());
    t2.e[0] = 2;
    t2.e[1] = 1;  // t^2 a1
    CHECK(rep.h.coeff(t2).is_zero());
    // the iso is rational but not integral, even in the half-a4 chart
    // (its t^3 coefficient is (3 a2 - a1^2)/2, the t^4 one has a 1/3)
    CHECK_FALSE(rep.integral_half_chart);
}

TEST_CASE("discriminant identity") {
    auto rep = delta_check();
    CHECK(rep.pass);
    CHECK(rep.b4_matches);
    CHECK(rep.point_eval_matches);
    CHECK(rep.difference.is_zero());
}

TEST_CASE("supersingular probe at 2") {
    auto rep = supersingular_probe(2);
    CHECK(rep.pass);
}

TEST_CASE("supersingular probe at 5 and 7") {
    for (long l : {5L, 7L}) {
        auto rep = supersingular_probe(l);
        CHECK(rep.pass);
        CHECK(rep.witness.size() == 4);
    }
}

TEST_CASE("the family is entirely supersingular mod 3") {
    // Under the a-substitution, b2 = 12 a2 and c4 = 24(4 a1 a3 + a4), so both
    // vanish mod 3: every smooth fiber has j = 0, the supersingular invariant
    // in characteristic 3, and v1 mod 3 is the zero polynomial. The probe
    // therefore cannot produce a nonvanishing specialization; it must report
    // the vanishing and the Hasse-invariant cross-check must agree on every
    // smooth fiber.
    auto inv = curve_invariants(krichever_curve(false));
    auto tb = krichever_table(false);
    auto a2 = QSeries::variable(tb, 0, 1, Rational(1));
    CHECK(inv.b2 == a2.scaled(Rational(12)));
    auto a1 = QSeries::variable(tb, 0, 0, Rational(1));
    auto a3 = QSeries::variable(tb, 0, 2, Rational(1));
    auto a4 = QSeries::variable(tb, 0, 3, Rational(1));
    CHECK(inv.c4 == (a1 * a3).scaled(Rational(96)) + a4.scaled(Rational(24)));

    auto rep = supersingular_probe(3);
    CHECK_FALSE(rep.pass);
    CHECK(rep.witness.empty());
    bool saw_vanishing = false, saw_cross = false;
    for (const auto& n : rep.notes) {
        if (n.find("vanishes identically") != std::string::npos) saw_vanishing = true;
        if (n.find("0 disagreements") != std::string::npos) saw_cross = true;
    }
    CHECK(saw_vanishing);
    CHECK(saw_cross);
}

TEST_CASE("v2 probe at 3") {
    auto rep = v2_unit_probe(3);
    CHECK(rep.pass);
    CHECK(!rep.inconclusive);
    CHECK(rep.supersingular_points >= 50);
    CHECK(rep.v2_zero == 0);
}
