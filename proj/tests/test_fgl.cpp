#include <catch2/catch_amalgamated.hpp>

#include "fgl/fgl.hpp"
#include "helpers.hpp"

using namespace fgl;
using testutil::Rng;

namespace {

QSeries qvar(const VarTablePtr& tb, const char* name, int order) {
    return QSeries::variable(tb, order, tb->require(name), Rational(1));
}

Mono tpow(const VarTablePtr& tb, int var, int k) {
    Mono m(tb->size());
    m.e[var] = Mono::Exp(k);
    return m;
}

/// lambda_t(x) = (1 - e^{-t x})/t = sum (-1)^n t^n x^{n+1}/(n+1)! over [x, t].
ExponentialPair<Rational> exp_mult(int order) {
    auto tb = make_table({{"x", 1}, {"t", -1}});
    std::vector<QSeries::Term> terms;
    Rational fact(1);
    for (int n = 0; n + 1 <= order; ++n) {
        fact = fact.times_int(n + 1);
        Mono m(2);
        m.e[0] = Mono::Exp(n + 1);
        m.e[1] = Mono::Exp(n);
        terms.emplace_back(m, Rational(n % 2 ? -1 : 1) * fact.inverse());
    }
    auto lambda = QSeries::from_terms(tb, order, std::move(terms));
    return {SeriesOps::reversion(lambda, 0), lambda, 0};
}

}  // namespace

TEST_CASE("validation accepts the classical laws") {
    CHECK_NOTHROW(additive_fgl(8));
    CHECK_NOTHROW(multiplicative_fgl(8));

    // u+v+u^2 is rejected with a certificate naming an axiom and a monomial
    auto tb = make_table({{"u", 1}, {"v", 1}});
    auto u = qvar(tb, "u", 6), v = qvar(tb, "v", 6);
    try {
        QFgl::validate(u + v + u * u);
        FAIL("expected a validation failure");
    } catch (const FglValidationError& e) {
        CHECK(!e.axiom().empty());
        CHECK(!e.monomial().empty());
    }
    // u+v+u^2*v passes unitality but breaks symmetry
    try {
        QFgl::validate(u + v + u * u * v);
        FAIL("expected a validation failure");
    } catch (const FglValidationError& e) {
        CHECK(e.axiom().find("symmetry") != std::string::npos);
    }
    // symmetric, unital, but not associative
    CHECK_THROWS_AS(QFgl::validate(u + v + u * u * v + u * v * v), FglValidationError);
}

TEST_CASE("formal inverse") {
    auto add = additive_fgl(8);
    auto t = qvar(add.univariate_table(), "t", 8);
    CHECK(add.inverse() == -t);

    auto mul = multiplicative_fgl(10);
    auto iota = mul.inverse();
    // iota(u) = -u/(1-tu): coefficient of u^{k+1} is -t^k
    auto ut = mul.univariate_table();
    for (int k = 0; k + 1 <= 10; ++k) {
        Mono m(ut->size());
        m.e[0] = Mono::Exp(k + 1);
        m.e[ut->require("t")] = Mono::Exp(k);
        CHECK(iota.coeff(m) == Rational(-1));
    }
    // F(u, iota(u)) = 0; index 0 is the companion variable (named tt here,
    // since the law's own coefficient ring already uses t)
    auto u = QSeries::variable(ut, 10, 0, Rational(1));
    CHECK(mul.sum(u, iota).is_zero());
    // involution
    CHECK(mul.apply_inverse(iota) == u);
}

TEST_CASE("sum and sub") {
    Rng rng(2024);
    auto mul = multiplicative_fgl(8);
    auto tb = make_table({{"x", 1}, {"y", 1}, {"t", -1}});
    auto x = qvar(tb, "x", 8), y = qvar(tb, "y", 8);
    auto t = qvar(tb, "t", 8);

    CHECK(mul.sum(x, y) == x + y - t * x * y);
    CHECK(mul.sub(x, x).is_zero());

    // multiplicative at t=1: x -_F y = (x-y)/(1-y)
    auto tb1 = make_table({{"x", 1}, {"y", 1}});
    auto mul1tb = make_table({{"u", 1}, {"v", 1}});
    auto u1 = qvar(mul1tb, "u", 8), v1 = qvar(mul1tb, "v", 8);
    auto mul1 = QFgl::validate(u1 + v1 - u1 * v1);
    auto x1 = qvar(tb1, "x", 8), y1 = qvar(tb1, "y", 8);
    auto one = QSeries::constant(tb1, 8, Rational(1));
    CHECK(mul1.sum(x1, y1) == x1 + y1 - x1 * y1);
    CHECK(mul1.sub(x1, y1) == (x1 - y1).divide_unit(one - y1));

    // additive law sums are plain sums of arbitrary arguments
    auto add = additive_fgl(8);
    auto a = testutil::rand_series(rng, tb1, 8, true);
    auto b = testutil::rand_series(rng, tb1, 8, true);
    CHECK(add.sum(a, b) == a + b);
}

TEST_CASE("logarithm and exponential") {
    auto add = additive_fgl(8);
    auto t = qvar(add.univariate_table(), "t", 8);
    auto pair_add = add.log_exp();
    CHECK(pair_add.log == t);
    CHECK(pair_add.exp == t);

    // multiplicative at t=1: g(t) = sum t^n/n
    auto tb = make_table({{"u", 1}, {"v", 1}});
    auto u = qvar(tb, "u", 10), v = qvar(tb, "v", 10);
    auto mul1 = QFgl::validate(u + v - u * v);
    auto pair = mul1.log_exp();
    auto ut = mul1.univariate_table();
    for (int n = 1; n <= 10; ++n)
        CHECK(pair.log.coeff(tpow(ut, 0, n)) == Rational(1, n));
    // defining property g(F(u,v)) = g(u) + g(v)
    auto gF = SeriesOps::compose_univariate(pair.log, 0, mul1.series());
    auto gu = SeriesOps::compose_univariate(pair.log, 0, u);
    auto gv = SeriesOps::compose_univariate(pair.log, 0, v);
    CHECK(gF == gu + gv);
    // exp/log are mutual reversions
    CHECK(SeriesOps::compose_univariate(pair.log, 0, pair.exp) == qvar(ut, "t", 10));
}

TEST_CASE("law from exponential") {
    // lambda = t gives the additive law
    auto tb = make_table({{"t", 1}});
    auto t = qvar(tb, "t", 8);
    auto F = fgl_from_exponential({SeriesOps::reversion(t, 0), t, 0});
    CHECK(F.series() == additive_fgl(8).series());

    // lambda_t(x) = (1 - e^{-tx})/t gives u + v - t u v
    auto pair = exp_mult(10);
    auto Fm = fgl_from_exponential(pair);
    CHECK(Fm.series() == multiplicative_fgl(10).series());

    // the universal exponential gives a valid law (validated to order 8 inside)
    CHECK_NOTHROW(universal_fgl(8));
}

TEST_CASE("log/exp duality") {
    // fgl_from_exponential(log_exp(F).exp) == F
    auto mul = multiplicative_fgl(8);
    auto back = fgl_from_exponential(mul.log_exp());
    CHECK(back.series() == mul.series());

    auto uni = universal_fgl(7);
    auto back2 = fgl_from_exponential(uni.log_exp(), 7);
    CHECK(back2.series() == uni.series());
}

TEST_CASE("twisting") {
    const int N = 8;
    // additive law over [u, v, t] so the twist parameter ring is available
    auto tb = make_table({{"u", 1}, {"v", 1}, {"t", -1}});
    auto u = qvar(tb, "u", N), v = qvar(tb, "v", N);
    auto add = QFgl::validate(u + v);

    // identity twist
    auto tt = make_table({{"x", 1}, {"t", -1}});
    auto x = qvar(tt, "x", N);
    auto ident = ExponentialPair<Rational>{SeriesOps::reversion(x, 0), x, 0};
    CHECK(add.twist(ident).series() == add.series());

    // additive twisted by lambda_t is the multiplicative law
    auto twisted = add.twist(exp_mult(N));
    CHECK(twisted.series() == multiplicative_fgl(N).series());

    // twist round trip: twisting by tau then by the inverse pair restores F
    Rng rng(55);
    for (int trial = 0; trial < 4; ++trial) {
        auto lam = testutil::rand_unit_linear(rng, make_table({{"x", 1}}), 0, 6);
        // lift lambda over [x,t] so it shares the law's coefficient ring
        auto lam2 = SeriesOps::relabel(lam, tt, {0});
        ExponentialPair<Rational> tau{SeriesOps::reversion(lam2, 0), lam2, 0};
        ExponentialPair<Rational> tau_inv{lam2, tau.log, 0};
        auto add6 = QFgl::validate((u + v).truncated(6), 6);
        auto once = add6.twist(tau, 6);
        auto back = once.twist(tau_inv, 6);
        CHECK(back.series() == add6.series());
    }
}

TEST_CASE("twist composition") {
    // twisting by tau then sigma equals one twist by the composite exponential
    Rng rng(77);
    const int N = 6;
    auto tb = make_table({{"u", 1}, {"v", 1}});
    auto u = qvar(tb, "u", N), v = qvar(tb, "v", N);
    auto xt = make_table({{"x", 1}});
    for (int trial = 0; trial < 4; ++trial) {
        auto lam_tau = testutil::rand_unit_linear(rng, xt, 0, N);
        auto lam_sigma = testutil::rand_unit_linear(rng, xt, 0, N);
        ExponentialPair<Rational> tau{SeriesOps::reversion(lam_tau, 0), lam_tau, 0};
        ExponentialPair<Rational> sigma{SeriesOps::reversion(lam_sigma, 0), lam_sigma, 0};
        auto add = QFgl::validate(u + v, N);
        auto two_step = add.twist(tau, N).twist(sigma, N);
        auto comp = SeriesOps::compose_univariate(lam_sigma, 0, lam_tau);
        ExponentialPair<Rational> both{SeriesOps::reversion(comp, 0), comp, 0};
        auto one_step = add.twist(both, N);
        CHECK(two_step.series() == one_step.series());
    }
}

TEST_CASE("mod-l reduction") {
    auto add = additive_fgl(6);
    auto a3 = add.mod_prime(3);
    CHECK(a3.series().num_terms() == 2);

    auto mul1tb = make_table({{"u", 1}, {"v", 1}});
    auto u = qvar(mul1tb, "u", 6), v = qvar(mul1tb, "v", 6);
    auto mul1 = QFgl::validate(u + v - u * v);
    auto m3 = mul1.mod_prime(3);
    const GFContext* f3 = GFContext::get(3, 1);
    Mono uv(2);
    uv.e[0] = uv.e[1] = 1;
    CHECK(m3.series().coeff(uv) == GFElem(f3, 2));  // -1 mod 3

    // denominators must be prime to l: the law of lambda = t + t^2/3 has
    // coefficients with 3-power denominators
    auto tl = make_table({{"t", 1}});
    auto t = QSeries::variable(tl, 6, 0, Rational(1));
    auto lam = t + (t * t).scaled(Rational(1, 3));
    auto third = fgl_from_exponential({SeriesOps::reversion(lam, 0), lam, 0}, 6);
    CHECK_THROWS_AS(third.mod_prime(3), std::domain_error);
    CHECK_NOTHROW(third.mod_prime(2));
}

TEST_CASE("l-series and Landweber coefficients") {
    // additive: [l](x) = l x, v1 = 0
    auto add = additive_fgl(10);
    auto r = add.l_series(3, 1);
    auto ut = add.univariate_table();
    CHECK(r.n_series == qvar(ut, "t", 10).scaled(Rational(3)));
    CHECK(r.v[0] == QSeries::constant(ut, 10, Rational(3)));
    CHECK(r.v[1].is_zero());

    // v0 = l for any integral law
    auto mul1tb = make_table({{"u", 1}, {"v", 1}});
    auto u = qvar(mul1tb, "u", 10), v = qvar(mul1tb, "v", 10);
    auto mul1 = QFgl::validate(u + v - u * v);
    for (long l : {2L, 3L, 5L}) {
        auto rep = mul1.l_series(l, 0);
        CHECK(rep.v[0].constant_term() == Rational(l));
    }

    // multiplicative mod l (odd): [l](x) = x^l exactly, so v1 = 1 (height 1)
    for (long l : {3L, 5L, 7L}) {
        auto ml = QFgl::validate((u + v - u * v).with_order(int(l))).mod_prime(l);
        auto rl = ml.l_series(l, 1);
        const GFContext* fl = GFContext::get(std::uint32_t(l), 1);
        // oracle: 1 - (1-x)^l = x^l mod l by the binomial theorem
        auto t = FSeries::variable(ml.univariate_table(), int(l), 0, GFElem(fl, 1));
        auto one = FSeries::constant(ml.univariate_table(), int(l), GFElem(fl, 1));
        auto pow = one;
        for (long i = 0; i < l; ++i) pow = pow * (one - t);
        CHECK(rl.n_series == one - pow);
        CHECK(rl.v[1] == FSeries::constant(ml.univariate_table(), int(l), GFElem(fl, 1)));
        CHECK(rl.v[0].is_zero());
    }

    CHECK_THROWS_AS(add.l_series(3, 3), std::invalid_argument);  // 27 > order
}

TEST_CASE("laws are weight homogeneous") {
    auto mul = multiplicative_fgl(8);
    REQUIRE(mul.series().homogeneous_weight());
    CHECK(*mul.series().homogeneous_weight() == 1);
    auto uni = universal_fgl(7);
    REQUIRE(uni.series().homogeneous_weight());
    CHECK(*uni.series().homogeneous_weight() == 1);
}
