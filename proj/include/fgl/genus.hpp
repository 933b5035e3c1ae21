#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "fgl/fgl.hpp"
#include "fgl/series.hpp"
#include "fgl/tower.hpp"
#include "fgl/weierstrass.hpp"

namespace fgl {

/// Characteristic data of a genus: the exponential lambda(t), the
/// characteristic series Q(t) = t/lambda(t) = 1 + f1 t + f2 t^2 + ..., and
/// the f_i as polynomials in the coefficient variables.
struct ToddData {
    QSeries lambda;
    QSeries Q;
    int var = 0;

    /// f_i (posdeg-0 polynomial over lambda's table).
    QSeries f(int i) const { return Q.coefficient_of(var, i).with_order(Q.order()); }
};

inline ToddData todd_from_exponential(const QSeries& lambda, int var) {
    // Q = t/lambda = 1/(lambda/t); lambda = t + higher is exactly divisible by t
    auto unit = SeriesOps::exact_divide_linear(lambda, var, Rational(1), -1, Rational(0));
    return ToddData{lambda, unit.invert_unit(), var};
}

/// lambda = t: Q = 1, the genus that kills every positive-dimensional class.
inline ToddData todd_additive(int order) {
    auto tb = make_table({{"t", 1}});
    return todd_from_exponential(QSeries::variable(tb, order, 0, Rational(1)), 0);
}

/// lambda = 1 - e^{-t}: the arithmetic-genus (Todd) normalization.
inline ToddData todd_todd(int order) {
    auto tb = make_table({{"t", 1}});
    std::vector<QSeries::Term> terms;
    Rational fact(1);
    for (int n = 1; n <= order; ++n) {
        fact = fact.times_int(n);
        Mono m(1);
        m.e[0] = Mono::Exp(n);
        terms.emplace_back(m, Rational(n % 2 ? 1 : -1) * fact.inverse());
    }
    return todd_from_exponential(QSeries::from_terms(tb, order, std::move(terms)), 0);
}

inline ToddData todd_universal(int order) {
    auto pair = universal_exponential(order);
    return todd_from_exponential(pair.exp, pair.var);
}

/// The Krichever genus data in the Baker-Akhiezer normalization (the one
/// under which phi(W_i) land on the a-generators).
inline ToddData todd_krichever(int order) {
    return todd_from_exponential(krichever_exponential(order), 0);
}

/// phi(P^n) = coefficient of h^n in Q(h)^{n+1}.
inline QSeries genus_projective_space(const ToddData& T, int n) {
    if (n > T.Q.order())
        throw std::invalid_argument("genus_projective_space: insufficient order");
    auto Qn = T.Q.truncated(n).pow(n + 1);
    return Qn.coefficient_of(T.var, n).with_order(T.Q.order());
}

/// A product of projective spaces, recorded by its factor dimensions.
using ProjProduct = std::vector<int>;

/// Rational combination of products of projective spaces, all of one total
/// dimension.
struct CobordismCombo {
    std::vector<std::pair<Rational, ProjProduct>> parts;

    int dimension() const {
        if (parts.empty()) return 0;
        int d = 0;
        for (int n : parts.front().second) d += n;
        return d;
    }
    void validate() const {
        int d = dimension();
        for (const auto& [c, p] : parts) {
            int pd = 0;
            for (int n : p) pd += n;
            if (pd != d) throw std::invalid_argument("CobordismCombo: mixed dimensions");
        }
    }
};

/// Chern numbers c^I indexed by partitions I of the dimension (descending).
struct ChernNumberVector {
    int dimension = 0;
    std::map<std::vector<int>, Rational> numbers;

    const Rational& at(std::vector<int> I) const {
        std::sort(I.begin(), I.end(), std::greater<int>());
        return numbers.at(I);
    }
};

inline std::vector<std::vector<int>> partitions_of(int d) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int, int)> walk = [&](int rest, int maxpart) {
        if (rest == 0) {
            out.push_back(cur);
            return;
        }
        for (int k = std::min(rest, maxpart); k >= 1; --k) {
            cur.push_back(k);
            walk(rest - k, k);
            cur.pop_back();
        }
    };
    walk(d, d);
    return out;
}

/// All Chern numbers of a product of projective spaces, through the total
/// Chern class of the tangent bundle in the capped polynomial ring.
inline ChernNumberVector chern_numbers(const ProjProduct& P) {
    int d = 0;
    for (int n : P) {
        if (n < 1) throw std::invalid_argument("chern_numbers: factor dimensions must be >= 1");
        d += n;
    }
    if (d > 8) throw std::invalid_argument("chern_numbers: dimension cap (8) exceeded");

    TowerRing R{ProjProduct(P)};
    // c(T) = prod_j (1 + h_j)^{n_j + 1}
    auto c_total = R.one();
    for (std::size_t j = 0; j < P.size(); ++j) {
        std::vector<int> coeffs(P.size(), 0);
        coeffs[j] = 1;
        auto f = R.one() + R.linear(coeffs);
        for (int i = 0; i <= P[j]; ++i) c_total = R.mul(c_total, f);
    }
    std::vector<QSeries> ck;
    for (int k = 0; k <= d; ++k) ck.push_back(c_total.graded_piece(k));

    ChernNumberVector v;
    v.dimension = d;
    for (auto& I : partitions_of(d)) {
        auto prod = R.one();
        for (int i : I) prod = R.mul(prod, ck[std::size_t(i)]);
        v.numbers.emplace(I, R.evaluate(prod));
    }
    return v;
}

/// Hoehn's four generators as combinations of products of projective spaces.
inline std::array<CobordismCombo, 4> w_classes() {
    std::array<CobordismCombo, 4> W;
    W[0].parts = {{Rational(1), {1}}};
    W[1].parts = {{Rational(-16), {2}}, {Rational(18), {1, 1}}};
    W[2].parts = {{Rational(3, 2), {3}}, {Rational(-4), {2, 1}}, {Rational(5, 2), {1, 1, 1}}};
    W[3].parts = {{Rational(-4), {4}},
                  {Rational(25, 2), {3, 1}},
                  {Rational(6), {2, 2}},
                  {Rational(-26), {2, 1, 1}},
                  {Rational(23, 2), {1, 1, 1, 1}}};
    return W;
}

inline ChernNumberVector chern_numbers(const CobordismCombo& X) {
    X.validate();
    ChernNumberVector v;
    v.dimension = X.dimension();
    for (auto& I : partitions_of(v.dimension)) v.numbers.emplace(I, Rational(0));
    for (const auto& [c, P] : X.parts) {
        auto cv = chern_numbers(P);
        for (auto& [I, val] : cv.numbers) v.numbers[I] += c * val;
    }
    return v;
}

/// The defining Chern-number table of W_1..W_4 (11 equations). Any mismatch
/// is a hard failure.
inline bool verify_w_table(std::vector<std::string>* mismatches = nullptr) {
    auto W = w_classes();
    auto expect = [&](int wi, std::vector<int> I, long value) {
        auto cv = chern_numbers(W[std::size_t(wi - 1)]);
        if (cv.at(I) == Rational(value)) return true;
        if (mismatches) {
            std::string s = "c^(";
            for (int i : I) s += std::to_string(i) + ",";
            s += ") [W" + std::to_string(wi) + "] = " + cv.at(I).str() + " expected " +
                 std::to_string(value);
            mismatches->push_back(s);
        }
        return false;
    };
    bool ok = true;
    ok &= expect(1, {1}, 2);
    ok &= expect(2, {1, 1}, 0);
    ok &= expect(2, {2}, 24);
    ok &= expect(3, {1, 1, 1}, 0);
    ok &= expect(3, {2, 1}, 0);
    ok &= expect(3, {3}, 2);
    ok &= expect(4, {1, 1, 1, 1}, 0);
    ok &= expect(4, {2, 1, 1}, 0);
    ok &= expect(4, {2, 2}, 2);
    ok &= expect(4, {3, 1}, 0);
    ok &= expect(4, {4}, 6);
    return ok;
}

/// Genus of a combination: sum of coefficients times products of
/// genus_projective_space values (a genus is a ring homomorphism).
inline QSeries genus_combo(const ToddData& T, const CobordismCombo& X) {
    X.validate();
    QSeries acc(T.Q.table(), T.Q.order());
    for (const auto& [c, P] : X.parts) {
        auto prod = QSeries::constant(T.Q.table(), T.Q.order(), Rational(1));
        for (int n : P) prod = prod * genus_projective_space(T, n);
        acc = acc + prod.scaled(c);
    }
    return acc;
}

/// A, B, C, D determined by f1..f4 through the triangular relations
/// f1 = A/2, f2 = (6A^2-B)/48, f3 = (2A^3-AB+16C)/96,
/// f4 = (60A^4-60A^2B+1920AC+7B^2-1152D)/23040.
struct HoehnABCD {
    QSeries A, B, C, D;
};

inline HoehnABCD abcd_from_f(const ToddData& T) {
    auto f1 = T.f(1), f2 = T.f(2), f3 = T.f(3), f4 = T.f(4);
    HoehnABCD r;
    r.A = f1.scaled(Rational(2));
    r.B = (r.A * r.A).scaled(Rational(6)) - f2.scaled(Rational(48));
    r.C = (f3.scaled(Rational(96)) - (r.A * r.A * r.A).scaled(Rational(2)) + r.A * r.B)
              .scaled(Rational(1, 16));
    r.D = ((r.A * r.A * r.A * r.A).scaled(Rational(60)) -
           (r.A * r.A * r.B).scaled(Rational(60)) + (r.A * r.C).scaled(Rational(1920)) +
           (r.B * r.B).scaled(Rational(7)) - f4.scaled(Rational(23040)))
              .scaled(Rational(1, 1152));
    return r;
}

inline std::array<QSeries, 4> f_from_abcd(const HoehnABCD& h) {
    std::array<QSeries, 4> f;
    f[0] = h.A.scaled(Rational(1, 2));
    f[1] = ((h.A * h.A).scaled(Rational(6)) - h.B).scaled(Rational(1, 48));
    f[2] = ((h.A * h.A * h.A).scaled(Rational(2)) - h.A * h.B + h.C.scaled(Rational(16)))
               .scaled(Rational(1, 96));
    f[3] = ((h.A * h.A * h.A * h.A).scaled(Rational(60)) -
            (h.A * h.A * h.B).scaled(Rational(60)) + (h.A * h.C).scaled(Rational(1920)) +
            (h.B * h.B).scaled(Rational(7)) - h.D.scaled(Rational(1152)))
               .scaled(Rational(1, 23040));
    return f;
}

/// K_d evaluated on a Chern-number vector, with (A,B,C,D) from the genus.
/// K_1 = (1/2) A c1
/// K_2 = (1/48) ((6A^2-B) c1^2 + 2B c2)
/// K_3 = (1/96) ((2A^3-AB+16C) c1^3 + (2AB-48C) c2c1 + 48C c3)
/// K_4 = (1/23040)((60A^4-60A^2B+1920AC+7B^2-1152D) c1^4 + (24B^2-2304D) c2^2
///       + (120A^2B-5760AC-28B^2+4608D) c1^2c2 + (5760AC+8B^2-4608D) c3c1
///       + (-8B^2+4608D) c4)
inline QSeries k_formula(const HoehnABCD& h, const ChernNumberVector& cn) {
    const auto& A = h.A;
    const auto& B = h.B;
    const auto& C = h.C;
    const auto& D = h.D;
    auto c = [&](std::vector<int> I) { return cn.at(std::move(I)); };
    switch (cn.dimension) {
        case 1:
            return A.scaled(c({1})).scaled(Rational(1, 2));
        case 2: {
            auto t = ((A * A).scaled(Rational(6)) - B).scaled(c({1, 1})) +
                     B.scaled(Rational(2)).scaled(c({2}));
            return t.scaled(Rational(1, 48));
        }
        case 3: {
            auto t = ((A * A * A).scaled(Rational(2)) - A * B + C.scaled(Rational(16)))
                         .scaled(c({1, 1, 1})) +
                     ((A * B).scaled(Rational(2)) - C.scaled(Rational(48))).scaled(c({2, 1})) +
                     C.scaled(Rational(48)).scaled(c({3}));
            return t.scaled(Rational(1, 96));
        }
        case 4: {
            auto A2 = A * A;
            auto t = (A2 * A2).scaled(Rational(60)) - (A2 * B).scaled(Rational(60)) +
                     (A * C).scaled(Rational(1920)) + (B * B).scaled(Rational(7)) -
                     D.scaled(Rational(1152));
            auto out = t.scaled(c({1, 1, 1, 1})) +
                       ((B * B).scaled(Rational(24)) - D.scaled(Rational(2304))).scaled(c({2, 2})) +
                       ((A2 * B).scaled(Rational(120)) - (A * C).scaled(Rational(5760)) -
                        (B * B).scaled(Rational(28)) + D.scaled(Rational(4608)))
                           .scaled(c({2, 1, 1})) +
                       ((A * C).scaled(Rational(5760)) + (B * B).scaled(Rational(8)) -
                        D.scaled(Rational(4608)))
                           .scaled(c({3, 1})) +
                       ((B * B).scaled(Rational(-8)) + D.scaled(Rational(4608))).scaled(c({4}));
            return out.scaled(Rational(1, 23040));
        }
        default:
            throw std::invalid_argument("k_formula: degree must be 1..4");
    }
}

struct KFormulaReport {
    int dimension = 0;
    bool pass = false;
    std::vector<std::string> mismatches;
};

/// For every product of projective spaces of total dimension d, K_d on its
/// Chern numbers must equal the genus exactly.
inline KFormulaReport k_formula_check(const ToddData& T, int d) {
    if (d < 1 || d > 4) throw std::invalid_argument("k_formula_check: d must be 1..4");
    KFormulaReport rep;
    rep.dimension = d;
    rep.pass = true;
    auto h = abcd_from_f(T);
    for (auto& I : partitions_of(d)) {
        ProjProduct P(I.begin(), I.end());
        CobordismCombo X{{{Rational(1), P}}};
        auto lhs = k_formula(h, chern_numbers(P));
        auto rhs = genus_combo(T, X);
        if (lhs != rhs) {
            rep.pass = false;
            std::string name = "P(";
            for (int n : P) name += std::to_string(n) + ",";
            name += ")";
            rep.mismatches.push_back(name);
        }
    }
    return rep;
}

struct KricheverGenusReport {
    bool pass = false;
    bool w1 = false, w2 = false, w3 = false, w4 = false;
    bool jacobian_nonsingular = false;
};

/// phi(W1) = -2a1, phi(W2) = 24a2, phi(W3) = a3, phi(W4) = 6a2^2 - a4 as
/// exact polynomial identities, plus a nonsingular-Jacobian witness for the
/// algebraic independence of (A,B,C,D).
inline KricheverGenusReport krichever_abcd(int order = 10) {
    auto T = todd_krichever(order);
    auto W = w_classes();
    auto tb = T.Q.table();
    auto a1 = QSeries::variable(tb, T.Q.order(), tb->require("a1"), Rational(1));
    auto a2 = QSeries::variable(tb, T.Q.order(), tb->require("a2"), Rational(1));
    auto a3 = QSeries::variable(tb, T.Q.order(), tb->require("a3"), Rational(1));
    auto a4 = QSeries::variable(tb, T.Q.order(), tb->require("a4"), Rational(1));

    KricheverGenusReport rep;
    auto phi1 = genus_combo(T, W[0]);
    auto phi2 = genus_combo(T, W[1]);
    auto phi3 = genus_combo(T, W[2]);
    auto phi4 = genus_combo(T, W[3]);
    rep.w1 = (phi1 == a1.scaled(Rational(-2)));
    rep.w2 = (phi2 == a2.scaled(Rational(24)));
    rep.w3 = (phi3 == a3);
    rep.w4 = (phi4 == (a2 * a2).scaled(Rational(6)) - a4);

    // Jacobian of (A,B,C,D) in (a1..a4) at a rational point
    auto h = abcd_from_f(T);
    std::array<QSeries, 4> fns{h.A, h.B, h.C, h.D};
    std::array<int, 4> vars{tb->require("a1"), tb->require("a2"), tb->require("a3"),
                            tb->require("a4")};
    std::vector<std::optional<Rational>> pt(tb->size());
    pt[std::size_t(vars[0])] = Rational(1);
    pt[std::size_t(vars[1])] = Rational(2);
    pt[std::size_t(vars[2])] = Rational(-1);
    pt[std::size_t(vars[3])] = Rational(3);
    auto empty = make_table({});
    std::vector<int> nomap(tb->size(), 0);
    Rational J[4][4];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            auto dij = fns[std::size_t(i)].derivative(vars[std::size_t(j)]);
            auto val = SeriesOps::substitute_scalars(dij, pt, empty, nomap);
            J[i][j] = val.constant_term();
        }
    // 4x4 determinant by expansion
    auto det3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) {
        return J[r0][c0] * (J[r1][c1] * J[r2][c2] - J[r1][c2] * J[r2][c1]) -
               J[r0][c1] * (J[r1][c0] * J[r2][c2] - J[r1][c2] * J[r2][c0]) +
               J[r0][c2] * (J[r1][c0] * J[r2][c1] - J[r1][c1] * J[r2][c0]);
    };
    Rational det = J[0][0] * det3(1, 2, 3, 1, 2, 3) - J[0][1] * det3(1, 2, 3, 0, 2, 3) +
                   J[0][2] * det3(1, 2, 3, 0, 1, 3) - J[0][3] * det3(1, 2, 3, 0, 1, 2);
    rep.jacobian_nonsingular = !det.is_zero();

    rep.pass = rep.w1 && rep.w2 && rep.w3 && rep.w4 && rep.jacobian_nonsingular;
    return rep;
}

}  // namespace fgl
