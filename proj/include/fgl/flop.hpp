#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fgl/fgl.hpp"
#include "fgl/series.hpp"

namespace fgl {

/// Localized elements over a formal-group-law root ring. A value is a sum of
/// fractions numerator / prod(atom_i^e_i), where every denominator atom is a
/// full formal-group combination (x +_F y or x -_F y) kept as the exact
/// truncated series itself; equality and vanishing are decided after clearing
/// denominators, which is sound for every law (no unprovable divisibility is
/// assumed). Atoms are interned by value, and S and iota(S) always share one
/// atom: iota(S) = -S * w(S) with w(S) a unit, so 1/iota(S) moves the unit
/// inverse into the numerator.
///
/// The algebra borrows the law; keep the law alive while using it.
template <class C>
class LocalizedAlgebra {
public:
    LocalizedAlgebra(const FormalGroupLaw<C>& law, VarTablePtr ring, int order)
        : law_(&law), ring_(std::move(ring)), order_(order) {
        // iota(t) = -t * w(t): w witnesses every iota-normalization
        auto iota = law_->inverse();
        iota_unit_ = SeriesOps::exact_divide_linear(iota, law_->t_index(),
                                                    C::int_like(one(), -1), -1,
                                                    C::int_like(one(), 0))
                         .with_order(law_->order());
    }

    struct Fraction {
        TruncatedSeries<C> num;
        std::vector<int> den;  // exponents, parallel to atoms()
    };

    const FormalGroupLaw<C>& law() const { return *law_; }
    const VarTablePtr& ring() const { return ring_; }
    int order() const { return order_; }
    const std::vector<TruncatedSeries<C>>& atoms() const { return atoms_; }

    C one() const { return C::one_like(law_->series().terms().front().second); }
    TruncatedSeries<C> ring_one() const {
        return TruncatedSeries<C>::constant(ring_, order_, one());
    }
    TruncatedSeries<C> ring_var(const std::string& name) const {
        return TruncatedSeries<C>::variable(ring_, order_, ring_->require(name), one());
    }

    TruncatedSeries<C> fsum(const TruncatedSeries<C>& x, const TruncatedSeries<C>& y) const {
        return law_->sum(x, y);
    }
    TruncatedSeries<C> fsub(const TruncatedSeries<C>& x, const TruncatedSeries<C>& y) const {
        return law_->sub(x, y);
    }
    TruncatedSeries<C> fneg(const TruncatedSeries<C>& x) const { return law_->apply_inverse(x); }

    /// Fraction 1/S: an existing atom, the iota of an existing atom (the unit
    /// multiplier moves into the numerator), or a freshly interned atom.
    Fraction invert(const TruncatedSeries<C>& S) {
        if (S.is_zero() || !S.constant_term().is_zero())
            throw std::invalid_argument("localized invert: atom must vanish at the origin");
        Fraction f;
        f.num = ring_one();
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            if (atoms_[i] == S) {
                f.den.assign(atoms_.size(), 0);
                f.den[i] = 1;
                return f;
            }
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            if (iota_atoms_[i] == S) {
                f.num = -unit_inverses_[i];
                f.den.assign(atoms_.size(), 0);
                f.den[i] = 1;
                return f;
            }
        atoms_.push_back(S);
        iota_atoms_.push_back(fneg(S));
        unit_inverses_.push_back(compose_unit(iota_unit_, S).invert_unit());
        f.den.assign(atoms_.size(), 0);
        f.den.back() = 1;
        return f;
    }

    Fraction from_series(TruncatedSeries<C> s) const {
        Fraction f;
        f.num = std::move(s);
        f.den.assign(atoms_.size(), 0);
        return f;
    }

    Fraction mul(const Fraction& a, const Fraction& b) const {
        Fraction f;
        f.num = a.num * b.num;
        f.den.assign(std::max(a.den.size(), b.den.size()), 0);
        for (std::size_t i = 0; i < f.den.size(); ++i)
            f.den[i] = (i < a.den.size() ? a.den[i] : 0) + (i < b.den.size() ? b.den[i] : 0);
        return f;
    }

    /// Clears a fraction list against the componentwise-max denominator.
    /// Returns the summed numerator and that denominator.
    std::pair<TruncatedSeries<C>, std::vector<int>> clear(const std::vector<Fraction>& fs) const {
        std::vector<int> den(atoms_.size(), 0);
        for (const auto& f : fs)
            for (std::size_t i = 0; i < f.den.size(); ++i) den[i] = std::max(den[i], f.den[i]);
        auto total = TruncatedSeries<C>(ring_, order_);
        for (const auto& f : fs) {
            auto t = f.num;
            for (std::size_t i = 0; i < den.size(); ++i) {
                int need = den[i] - (i < f.den.size() ? int(f.den[i]) : 0);
                for (int k = 0; k < need; ++k) t = t * atoms_[i];
            }
            total = total + t;
        }
        return {total, den};
    }

    bool equal(const std::vector<Fraction>& a, const std::vector<Fraction>& b) const {
        std::vector<Fraction> diff = a;
        for (auto f : b) {
            f.num = -f.num;
            diff.push_back(std::move(f));
        }
        return clear(diff).first.is_zero();
    }

private:
    TruncatedSeries<C> compose_unit(const TruncatedSeries<C>& unit,
                                    const TruncatedSeries<C>& S) const {
        std::vector<VarImage<C>> im(unit.table()->size());
        for (std::size_t i = 0; i < unit.table()->size(); ++i) {
            if (int(i) == law_->t_index())
                im[i] = VarImage<C>::to_series(S);
            else
                im[i] = VarImage<C>::to_var(ring_->require(unit.table()->name(i)));
        }
        return SeriesOps::substitute(unit, im, ring_);
    }

    const FormalGroupLaw<C>* law_;
    VarTablePtr ring_;
    int order_;
    TruncatedSeries<C> iota_unit_;
    std::vector<TruncatedSeries<C>> atoms_;
    std::vector<TruncatedSeries<C>> iota_atoms_;
    std::vector<TruncatedSeries<C>> unit_inverses_;  // 1/w(A) per atom
};

/// (L, unit) with x -_F y = L * unit for L = x - y; divisibility by the
/// difference is a theorem for every law. The sum direction is attempted only
/// on demand and throws when the division is not exact.
template <class C>
std::pair<TruncatedSeries<C>, TruncatedSeries<C>> fgl_linear_split(const FormalGroupLaw<C>& law,
                                                                   const TruncatedSeries<C>& combo,
                                                                   int xi, int yi,
                                                                   bool sum = false) {
    C one = C::one_like(combo.terms().front().second);
    C cy = sum ? one : C::int_like(one, -1);
    // the quotient is certified one order below the input
    auto unit = SeriesOps::exact_divide_linear(combo, xi, one, yi, cy);
    auto L = TruncatedSeries<C>::variable(combo.table(), combo.order(), xi, one) +
             TruncatedSeries<C>::variable(combo.table(), combo.order(), yi, one).scaled(cy);
    return {L, unit};
}

/// Quillen's pushforward sum_i f(-_F rho_i) / prod_{j != i}(rho_j -_F rho_i)
/// for a localized function f of the distinguished ring variable tvar.
/// Substitution runs through numerators and denominator atoms alike.
template <class C>
std::vector<typename LocalizedAlgebra<C>::Fraction> quillen_pushforward(
    LocalizedAlgebra<C>& alg, const std::vector<typename LocalizedAlgebra<C>::Fraction>& f,
    int tvar, const std::vector<TruncatedSeries<C>>& roots) {
    using Fraction = typename LocalizedAlgebra<C>::Fraction;
    std::vector<Fraction> out;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        auto arg = alg.fneg(roots[i]);
        auto subst = [&](const TruncatedSeries<C>& s) {
            std::vector<VarImage<C>> im(s.table()->size());
            for (std::size_t k = 0; k < s.table()->size(); ++k)
                im[k] = int(k) == tvar ? VarImage<C>::to_series(arg) : VarImage<C>::to_var(int(k));
            return SeriesOps::substitute(s, im, alg.ring());
        };
        Fraction denom = alg.from_series(alg.ring_one());
        for (std::size_t j = 0; j < roots.size(); ++j) {
            if (j == i) continue;
            denom = alg.mul(denom, alg.invert(alg.fsub(roots[j], roots[i])));
        }
        for (const auto& piece : f) {
            Fraction shifted = alg.mul(alg.from_series(subst(piece.num)), denom);
            for (std::size_t k = 0; k < piece.den.size(); ++k)
                for (int e = 0; e < piece.den[k]; ++e) {
                    auto moved = subst(alg.atoms()[k]);
                    shifted = alg.mul(shifted, alg.invert(moved));
                }
            out.push_back(std::move(shifted));
        }
    }
    return out;
}

/// Root ring [al1, al2, be1, be2] (+ the two tower stage classes when asked)
/// over the law's coefficient variables.
template <class C>
VarTablePtr flop_root_table(const FormalGroupLaw<C>& law, bool with_stage_vars = false) {
    std::vector<std::pair<std::string, int>> vars;
    if (with_stage_vars) {
        vars.emplace_back("sw", 1);
        vars.emplace_back("sv", 1);
    }
    vars.emplace_back("al1", 1);
    vars.emplace_back("al2", 1);
    vars.emplace_back("be1", 1);
    vars.emplace_back("be2", 1);
    const auto& ft = *law.table();
    for (std::size_t i = 0; i < ft.size(); ++i)
        if (int(i) != law.u_index() && int(i) != law.v_index())
            vars.emplace_back(ft.name(i), ft.weight(i));
    return make_table(std::move(vars));
}

/// The closed-form difference of the two flop sides:
///   1/((a1+b1)(b2+a1)(a2-a1)) + 1/((a2+b1)(b2+a2)(a1-a2))
/// - 1/((b1+a1)(a2+b1)(b2-b1)) - 1/((b2+a1)(a2+b2)(b1-b2)),
/// all combinations taken with +_F / -_F.
template <class C>
std::vector<typename LocalizedAlgebra<C>::Fraction> flop_closed_fractions(
    LocalizedAlgebra<C>& alg) {
    using Fraction = typename LocalizedAlgebra<C>::Fraction;
    auto a1 = alg.ring_var("al1"), a2 = alg.ring_var("al2");
    auto b1 = alg.ring_var("be1"), b2 = alg.ring_var("be2");
    auto term = [&](const TruncatedSeries<C>& x, const TruncatedSeries<C>& y,
                    const TruncatedSeries<C>& z, bool negate) {
        Fraction f = alg.mul(alg.mul(alg.invert(x), alg.invert(y)), alg.invert(z));
        if (negate) f.num = -f.num;
        return f;
    };
    std::vector<Fraction> out;
    out.push_back(term(alg.fsum(a1, b1), alg.fsum(a1, b2), alg.fsub(a2, a1), false));
    out.push_back(term(alg.fsum(a2, b1), alg.fsum(a2, b2), alg.fsub(a1, a2), false));
    out.push_back(term(alg.fsum(a1, b1), alg.fsum(a2, b1), alg.fsub(b2, b1), true));
    out.push_back(term(alg.fsum(a1, b2), alg.fsum(a2, b2), alg.fsub(b1, b2), true));
    return out;
}

/// Per-degree report of a cleared flop numerator.
struct FlopDegreeReport {
    int degree = 0;
    bool numerator_zero = true;
    std::string nonzero_witness;
};

struct FlopReport {
    bool zero = true;                // cleared numerator identically zero
    int certified_degree = 0;        // localized element certified through this root degree
    int lowest_nonzero_degree = -1;  // of the cleared numerator, when nonzero
    std::vector<FlopDegreeReport> degrees;
    std::size_t numerator_terms = 0;
};

template <class C>
struct FlopClosedForm {
    LocalizedAlgebra<C> alg;
    std::vector<typename LocalizedAlgebra<C>::Fraction> fractions;
    TruncatedSeries<C> numerator;
    std::vector<int> denominator;
    FlopReport report;
};

namespace detail {

/// Degrees are reported for the localized element itself: its degree-d piece
/// corresponds to the numerator piece of root degree d + den_degree (the
/// denominator is a product of den_degree combinations of valuation 1).
template <class C>
FlopReport analyze_numerator(const TruncatedSeries<C>& num, int order, int den_degree) {
    FlopReport rep;
    rep.certified_degree = order - den_degree;
    rep.numerator_terms = num.num_terms();
    rep.zero = num.is_zero();
    for (int d = -den_degree; d <= rep.certified_degree; ++d) {
        auto piece = num.graded_piece(d + den_degree);
        FlopDegreeReport dr;
        dr.degree = d;
        dr.numerator_zero = piece.is_zero();
        if (!dr.numerator_zero) {
            if (rep.lowest_nonzero_degree < 0 || d < rep.lowest_nonzero_degree)
                rep.lowest_nonzero_degree = d;
            dr.nonzero_witness = fgl::detail::mono_str(*num.table(), piece.terms().front().first);
        }
        rep.degrees.push_back(std::move(dr));
    }
    return rep;
}

}  // namespace detail

/// Closed form over the six-atom denominator; the cleared numerator vanishing
/// through order certifies the localized element through `degree` (the order
/// is degree + 6 and the denominator has total root-degree 6).
template <class C>
FlopClosedForm<C> flop_closed_form(const FormalGroupLaw<C>& law, int degree) {
    int order = degree + 6;
    if (law.order() < order)
        throw std::invalid_argument("flop_closed_form: law order must be >= degree + 6");
    FlopClosedForm<C> out{LocalizedAlgebra<C>(law, flop_root_table(law), order), {}, {}, {}, {}};
    out.fractions = flop_closed_fractions(out.alg);
    auto [num, den] = out.alg.clear(out.fractions);
    out.numerator = std::move(num);
    out.denominator = std::move(den);
    int den_degree = 0;
    for (int e : out.denominator) den_degree += e;
    out.report = detail::analyze_numerator(out.numerator, order, den_degree);
    return out;
}

/// The same difference computed through the double-point towers by iterated
/// Quillen pushforwards: T1(A,B) - T2(B side) - T1(B,A) + T2(A side), with
/// the middle towers' equality (the cancellation lemma) checked symbolically,
/// and the total compared against the closed form inside one algebra.
struct FlopTowersReport {
    bool cancellation = false;     // T2(B side) == T2(A side)
    bool matches_closed = false;   // total == closed form
    std::size_t atom_count = 0;
};

template <class C>
FlopTowersReport flop_via_towers(const FormalGroupLaw<C>& law, int degree) {
    int order = degree + 6;
    if (law.order() < order)
        throw std::invalid_argument("flop_via_towers: law order must be >= degree + 6");
    LocalizedAlgebra<C> alg(law, flop_root_table(law, /*with_stage_vars=*/true), order);
    using Fraction = typename LocalizedAlgebra<C>::Fraction;

    int iw = alg.ring()->require("sw"), iv = alg.ring()->require("sv");
    auto w = alg.ring_var("sw"), v = alg.ring_var("sv");
    auto zero = TruncatedSeries<C>(alg.ring(), order);

    // T1(X, Y): P_{P(X)}(Y (x) O(-1) (+) O) -> P(X) -> Z: stage-1 roots
    // {y1 -_F v, y2 -_F v, 0} with f = 1, stage-2 roots {x1, x2}
    auto tower1 = [&](const TruncatedSeries<C>& x1, const TruncatedSeries<C>& x2,
                      const TruncatedSeries<C>& y1, const TruncatedSeries<C>& y2) {
        std::vector<Fraction> f{alg.from_series(alg.ring_one())};
        auto g = quillen_pushforward(alg, f, iw,
                                     {alg.fsub(y1, v), alg.fsub(y2, v), zero});
        return quillen_pushforward(alg, g, iv, {x1, x2});
    };
    // T2: P(O_{P(Y (x) O(-1))}(1) (+) O) -> P(Y (x) O(-1)) -> P(X) -> Z:
    // stage-0 gives 1/t + 1/iota(t) in the tautological class t = sw
    auto tower2 = [&](const TruncatedSeries<C>& x1, const TruncatedSeries<C>& x2,
                      const TruncatedSeries<C>& y1, const TruncatedSeries<C>& y2) {
        std::vector<Fraction> f0;
        f0.push_back(alg.invert(w));
        f0.push_back(alg.invert(alg.fneg(w)));
        auto g = quillen_pushforward(alg, f0, iw, {alg.fsub(y1, v), alg.fsub(y2, v)});
        return quillen_pushforward(alg, g, iv, {x1, x2});
    };

    auto a1 = alg.ring_var("al1"), a2 = alg.ring_var("al2");
    auto b1 = alg.ring_var("be1"), b2 = alg.ring_var("be2");

    auto t1_ab = tower1(a1, a2, b1, b2);
    auto t2_b = tower2(a1, a2, b1, b2);
    auto t1_ba = tower1(b1, b2, a1, a2);
    auto t2_a = tower2(b1, b2, a1, a2);

    FlopTowersReport rep;
    rep.cancellation = alg.equal(t2_b, t2_a);

    auto total = t1_ab;
    for (auto f : t2_b) {
        f.num = -f.num;
        total.push_back(std::move(f));
    }
    for (auto f : t1_ba) {
        f.num = -f.num;
        total.push_back(std::move(f));
    }
    for (auto f : t2_a) total.push_back(std::move(f));

    rep.matches_closed = alg.equal(total, flop_closed_fractions(alg));
    rep.atom_count = alg.atoms().size();
    return rep;
}

}  // namespace fgl
