#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fgl/series.hpp"

namespace fgl {

/// Raised when a candidate F(u,v) fails one of the group-law axioms. Carries
/// which axiom failed and the first offending monomial.
class FglValidationError : public std::domain_error {
public:
    FglValidationError(std::string axiom, std::string monomial)
        : std::domain_error("formal group law: " + axiom + " fails at " + monomial),
          axiom_(std::move(axiom)),
          monomial_(std::move(monomial)) {}
    const std::string& axiom() const { return axiom_; }
    const std::string& monomial() const { return monomial_; }

private:
    std::string axiom_, monomial_;
};

/// Mutually inverse logarithm/exponential of a group law: g(F(u,v)) = g(u)+g(v),
/// exp = reversion(log). Both are univariate in `var` over their table.
template <class C>
struct ExponentialPair {
    TruncatedSeries<C> log;
    TruncatedSeries<C> exp;
    int var = 0;
};

template <class C>
struct LSeriesReport {
    long l = 0;
    TruncatedSeries<C> n_series;            // [l](t)
    std::vector<TruncatedSeries<C>> v;      // v_0..v_k as coefficient polynomials
};

namespace detail {

inline std::string mono_str(const VarTable& t, const Mono& m) {
    if (m.is_constant()) return "1";
    std::string s;
    for (std::size_t i = 0; i < m.e.size(); ++i)
        if (m.e[i]) {
            if (!s.empty()) s += "*";
            s += t.name(i);
            if (m.e[i] > 1) s += "^" + std::to_string(m.e[i]);
        }
    return s;
}

template <class C>
std::string first_mono(const TruncatedSeries<C>& s) {
    if (s.is_zero()) return "0";
    return mono_str(*s.table(), s.terms().front().first);
}

}  // namespace detail

/// A validated bivariate formal group law F(u,v) over a named coefficient
/// ring. Construction checks unitality and symmetry exactly and
/// associativity through `assoc_order` (default 8); failures carry a
/// certificate naming the axiom and monomial.
template <class C>
class FormalGroupLaw {
public:
    static constexpr int kDefaultAssocOrder = 8;

    static FormalGroupLaw validate(TruncatedSeries<C> F, int assoc_order = kDefaultAssocOrder) {
        FormalGroupLaw law(std::move(F));
        if (law.order() < 2) throw std::invalid_argument("formal group law: order must be >= 2");
        law.check_unitality();
        law.check_symmetry();
        law.check_associativity(std::min(assoc_order, law.order()));
        law.assoc_order_ = std::min(assoc_order, law.order());
        return law;
    }

    const TruncatedSeries<C>& series() const { return F_; }
    int order() const { return F_.order(); }
    int assoc_order() const { return assoc_order_; }
    int u_index() const { return iu_; }
    int v_index() const { return iv_; }
    const VarTablePtr& table() const { return F_.table(); }

    /// Companion table with one positive variable t and the same coefficient
    /// variables; home of iota, log and exp.
    const VarTablePtr& univariate_table() const { return t_table_; }
    int t_index() const { return 0; }

    /// F(x, y) for series with zero constant term over a common table. The
    /// coefficient variables of F are matched by name in the target table.
    TruncatedSeries<C> sum(const TruncatedSeries<C>& x, const TruncatedSeries<C>& y) const {
        if (!same_table(x.table(), y.table()))
            throw std::invalid_argument("fgl_sum: operand table mismatch");
        std::vector<VarImage<C>> images = coeff_images(x.table());
        images[iu_] = VarImage<C>::to_series(x);
        images[iv_] = VarImage<C>::to_series(y);
        return SeriesOps::substitute(F_, images, x.table());
    }

    /// x -_F y := F(x, iota(y)).
    TruncatedSeries<C> sub(const TruncatedSeries<C>& x, const TruncatedSeries<C>& y) const {
        return sum(x, apply_inverse(y));
    }

    /// iota(t) with F(t, iota(t)) = 0, as a univariate series.
    TruncatedSeries<C> inverse() const {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        if (!iota_) iota_ = compute_inverse();
        return *iota_;
    }

    /// iota composed with an arbitrary zero-constant-term argument.
    TruncatedSeries<C> apply_inverse(const TruncatedSeries<C>& y) const {
        auto iota = inverse();
        std::vector<VarImage<C>> images = coeff_images_from(*t_table_, y.table());
        images[0] = VarImage<C>::to_series(y);
        return SeriesOps::substitute(iota, images, y.table());
    }

    /// Logarithm/exponential via the invariant differential:
    /// g'(t) = 1/(dF/dv)(t,0), g(0)=0, exp = reversion(log). Rational
    /// coefficients only.
    ExponentialPair<C> log_exp() const {
        if constexpr (!CoeffTraits<C>::rational_like)
            throw std::domain_error("fgl_log: requires a Q-algebra coefficient ring");
        std::lock_guard<std::mutex> lock(cache_mutex_);
        if (!logexp_) {
            auto Fv = F_.derivative(iv_);
            // (dF/dv)(t, 0)
            std::vector<std::optional<C>> values(F_.table()->size());
            values[iv_] = C(0);
            std::vector<int> relabel(F_.table()->size(), 0);
            relabel[iu_] = 0;
            for (std::size_t i = 0; i < F_.table()->size(); ++i)
                if (int(i) != iu_ && int(i) != iv_)
                    relabel[i] = t_table_->require(F_.table()->name(i));
            auto slope = SeriesOps::substitute_scalars(Fv, values, t_table_, relabel);
            auto gprime = slope.invert_unit();
            auto g = gprime.integrate(0);
            auto lambda = SeriesOps::reversion(g, 0);
            logexp_ = ExponentialPair<C>{std::move(g), std::move(lambda), 0};
        }
        return *logexp_;
    }

    /// Twisted law lambda_tau(F(lambda_tau^{-1}(u), lambda_tau^{-1}(v))).
    /// tau.exp must be univariate over a table whose coefficient variables
    /// exist (by name) in this law's table.
    FormalGroupLaw twist(const ExponentialPair<C>& tau, int assoc_order = kDefaultAssocOrder) const {
        const auto& target = F_.table();
        auto lift = [&](const TruncatedSeries<C>& s, const TruncatedSeries<C>& arg) {
            std::vector<VarImage<C>> images = coeff_images_from(*s.table(), target);
            images[tau.var] = VarImage<C>::to_series(arg);
            return SeriesOps::substitute(s, images, target);
        };
        auto u = TruncatedSeries<C>::variable(target, order(), iu_, one());
        auto v = TruncatedSeries<C>::variable(target, order(), iv_, one());
        auto ginv_u = lift(tau.log, u);  // lambda^{-1} = log
        auto ginv_v = lift(tau.log, v);
        auto inner = sum(ginv_u, ginv_v);
        return validate(lift(tau.exp, inner), assoc_order);
    }

    /// Coefficientwise reduction mod l. Every denominator must be prime to l.
    FormalGroupLaw<GFElem> mod_prime(long l, int assoc_order = kDefaultAssocOrder) const {
        static_assert(CoeffTraits<C>::rational_like, "mod_prime starts from a Z-flavored ring");
        const GFContext* ctx = GFContext::get(std::uint32_t(l), 1);
        auto reduced = map_coeffs<GFElem>(F_, [&](const Rational& c) {
            return reduce_mod(c, ctx);
        });
        return FormalGroupLaw<GFElem>::validate(std::move(reduced), assoc_order);
    }

    /// [l](t) and the Landweber coefficients v_0..v_depth (v_n = coefficient
    /// of t^{l^n}).
    LSeriesReport<C> l_series(long l, int depth) const {
        long need = 1;
        for (int i = 0; i < depth; ++i) {
            need *= l;
            if (need > order())
                throw std::invalid_argument("l_series: truncation order too small for depth");
        }
        auto t = TruncatedSeries<C>::variable(t_table_, order(), 0, one());
        auto acc = t;
        for (long i = 1; i < l; ++i) acc = sum(acc, t);
        LSeriesReport<C> rep;
        rep.l = l;
        rep.n_series = acc;
        long power = 1;
        for (int n = 0; n <= depth; ++n) {
            rep.v.push_back(acc.coefficient_of(0, int(power)).with_order(acc.order()));
            power *= l;
        }
        return rep;
    }

    static GFElem reduce_mod(const Rational& c, const GFContext* ctx) {
        mpz_class den = c.den();
        unsigned long dl = mpz_fdiv_ui(den.get_mpz_t(), ctx->p);
        if (dl == 0)
            throw std::domain_error("mod reduction: denominator " + c.den_string() +
                                    " not prime to " + std::to_string(ctx->p));
        unsigned long nl = mpz_fdiv_ui(c.num().get_mpz_t(), ctx->p);
        return GFElem(ctx, long(nl)) * GFElem(ctx, long(dl)).inverse();
    }

private:
    explicit FormalGroupLaw(TruncatedSeries<C> F) : F_(std::move(F)) {
        iu_ = F_.table()->require("u");
        iv_ = F_.table()->require("v");
        std::string tname = "t";  // dodge coefficient variables named t
        while (F_.table()->index_of(tname) >= 0) tname += "t";
        std::vector<std::pair<std::string, int>> vars{{tname, 1}};
        for (std::size_t i = 0; i < F_.table()->size(); ++i)
            if (int(i) != iu_ && int(i) != iv_)
                vars.emplace_back(F_.table()->name(i), F_.table()->weight(i));
        t_table_ = make_table(std::move(vars));
    }

    C one() const {
        if (F_.is_zero()) throw std::domain_error("formal group law: empty series");
        return C::one_like(F_.terms().front().second);
    }

    std::vector<VarImage<C>> coeff_images(const VarTablePtr& target) const {
        return coeff_images_from(*F_.table(), target);
    }
    static std::vector<VarImage<C>> coeff_images_from(const VarTable& from,
                                                      const VarTablePtr& target) {
        std::vector<VarImage<C>> images(from.size());
        for (std::size_t i = 0; i < from.size(); ++i) {
            if (from.weight(i) > 0) continue;  // positive vars are overridden by the caller
            images[i] = VarImage<C>::to_var(target->require(from.name(i)));
        }
        return images;
    }

    void check_unitality() const {
        auto u_only = F_.coefficient_of(iv_, 0);
        auto expect = TruncatedSeries<C>::variable(F_.table(), u_only.order(), iu_, one());
        if (u_only != expect)
            throw FglValidationError("unitality F(u,0)=u", detail::first_mono(u_only - expect));
        auto v_only = F_.coefficient_of(iu_, 0);
        auto expect_v = TruncatedSeries<C>::variable(F_.table(), v_only.order(), iv_, one());
        if (v_only != expect_v)
            throw FglValidationError("unitality F(0,v)=v", detail::first_mono(v_only - expect_v));
    }

    void check_symmetry() const {
        std::vector<int> swap(F_.table()->size());
        for (std::size_t i = 0; i < swap.size(); ++i) swap[i] = int(i);
        swap[iu_] = iv_;
        swap[iv_] = iu_;
        auto flipped = SeriesOps::relabel(F_, F_.table(), swap);
        if (flipped != F_)
            throw FglValidationError("symmetry F(u,v)=F(v,u)", detail::first_mono(F_ - flipped));
    }

    void check_associativity(int through) const {
        std::string wname = "w";
        while (F_.table()->index_of(wname) >= 0) wname += "_";
        std::vector<std::pair<std::string, int>> vars;
        for (std::size_t i = 0; i < F_.table()->size(); ++i)
            vars.emplace_back(F_.table()->name(i), F_.table()->weight(i));
        vars.emplace_back(wname, 1);
        auto ext = make_table(std::move(vars));
        int iw = ext->require(wname);

        auto F3 = F_.truncated(through);
        auto u = TruncatedSeries<C>::variable(ext, through, iu_, one());
        auto v = TruncatedSeries<C>::variable(ext, through, iv_, one());
        auto w = TruncatedSeries<C>::variable(ext, through, iw, one());

        auto apply = [&](const TruncatedSeries<C>& x, const TruncatedSeries<C>& y) {
            std::vector<VarImage<C>> images(F_.table()->size());
            for (std::size_t i = 0; i < F_.table()->size(); ++i)
                images[i] = VarImage<C>::to_var(int(i));
            images[iu_] = VarImage<C>::to_series(x);
            images[iv_] = VarImage<C>::to_series(y);
            return SeriesOps::substitute(F3, images, ext);
        };
        auto left = apply(apply(u, v), w);
        auto right = apply(u, apply(v, w));
        if (left != right)
            throw FglValidationError("associativity F(F(u,v),w)=F(u,F(v,w))",
                                     detail::first_mono(left - right));
    }

    TruncatedSeries<C> compute_inverse() const {
        int N = order();
        auto t = TruncatedSeries<C>::variable(t_table_, N, 0, one());
        auto iota = -t;
        // Newton: iota <- iota - F(t, iota)/(dF/dv)(t, iota)
        auto Fv = F_.derivative(iv_);
        int correct = 1;
        while (correct < N) {
            correct = std::min(2 * correct + 1, N);
            auto ik = iota.with_order(correct);
            auto tk = t.truncated(correct);
            auto err = sum_univ(F_.truncated(correct), tk, ik);
            if (!err.is_zero()) {
                auto slope = sum_univ(Fv.with_order(correct), tk, ik);
                iota = ik - err * slope.invert_unit();
            } else {
                iota = ik;
            }
        }
        return iota.truncated(N);
    }

    // F-like series applied to a pair of univariate arguments.
    TruncatedSeries<C> sum_univ(const TruncatedSeries<C>& f, const TruncatedSeries<C>& x,
                                const TruncatedSeries<C>& y) const {
        std::vector<VarImage<C>> images = coeff_images(x.table());
        images[iu_] = VarImage<C>::to_series(x);
        images[iv_] = VarImage<C>::to_series(y);
        return SeriesOps::substitute(f, images, x.table());
    }

    TruncatedSeries<C> F_;
    int iu_ = 0, iv_ = 1;
    int assoc_order_ = kDefaultAssocOrder;
    VarTablePtr t_table_;

    mutable std::mutex cache_mutex_;
    mutable std::optional<TruncatedSeries<C>> iota_;
    mutable std::optional<ExponentialPair<C>> logexp_;

    template <class D>
    friend class FormalGroupLaw;

public:
    FormalGroupLaw(const FormalGroupLaw& o)
        : F_(o.F_), iu_(o.iu_), iv_(o.iv_), assoc_order_(o.assoc_order_), t_table_(o.t_table_) {
        std::lock_guard<std::mutex> lock(o.cache_mutex_);
        iota_ = o.iota_;
        logexp_ = o.logexp_;
    }
    FormalGroupLaw& operator=(const FormalGroupLaw& o) {
        if (this != &o) {
            std::scoped_lock lock(cache_mutex_, o.cache_mutex_);
            F_ = o.F_;
            iu_ = o.iu_;
            iv_ = o.iv_;
            assoc_order_ = o.assoc_order_;
            t_table_ = o.t_table_;
            iota_ = o.iota_;
            logexp_ = o.logexp_;
        }
        return *this;
    }
};

using QFgl = FormalGroupLaw<Rational>;
using FFgl = FormalGroupLaw<GFElem>;

/// F(u,v) = u + v over [u, v].
inline QFgl additive_fgl(int order) {
    auto tb = make_table({{"u", 1}, {"v", 1}});
    auto u = QSeries::variable(tb, order, 0, Rational(1));
    auto v = QSeries::variable(tb, order, 1, Rational(1));
    return QFgl::validate(u + v);
}

/// F(u,v) = u + v - t*u*v over [u, v, t], deg t = -1.
inline QFgl multiplicative_fgl(int order) {
    auto tb = make_table({{"u", 1}, {"v", 1}, {"t", -1}});
    auto u = QSeries::variable(tb, order, 0, Rational(1));
    auto v = QSeries::variable(tb, order, 1, Rational(1));
    auto t = QSeries::variable(tb, order, 2, Rational(1));
    return QFgl::validate(u + v - t * u * v);
}

/// The universal-exponential law F_b over Q[b_1..b_{order-1}]:
/// lambda_b(t) = t + sum b_n t^{n+1}; higher b's cannot appear below the
/// truncation order.
inline ExponentialPair<Rational> universal_exponential(int order) {
    std::vector<std::pair<std::string, int>> vars{{"t", 1}};
    for (int n = 1; n < order; ++n) vars.emplace_back("b" + std::to_string(n), -n);
    auto tb = make_table(std::move(vars));
    std::vector<QSeries::Term> terms;
    Mono lin(tb->size());
    lin.e[0] = 1;
    terms.emplace_back(lin, Rational(1));
    for (int n = 1; n < order; ++n) {
        Mono m(tb->size());
        m.e[0] = Mono::Exp(n + 1);
        m.e[n] = 1;
        terms.emplace_back(m, Rational(1));
    }
    auto lambda = QSeries::from_terms(tb, order, std::move(terms));
    return ExponentialPair<Rational>{SeriesOps::reversion(lambda, 0), lambda, 0};
}

/// Builds the law lambda(lambda^{-1}(u) + lambda^{-1}(v)) from an exponential
/// (univariate, linear coefficient 1).
inline QFgl fgl_from_exponential(const ExponentialPair<Rational>& pair,
                                 int assoc_order = QFgl::kDefaultAssocOrder) {
    const auto& lt = *pair.exp.table();
    int order = pair.exp.order();
    std::vector<std::pair<std::string, int>> vars{{"u", 1}, {"v", 1}};
    for (std::size_t i = 0; i < lt.size(); ++i)
        if (int(i) != pair.var) vars.emplace_back(lt.name(i), lt.weight(i));
    auto tb = make_table(std::move(vars));

    auto lift = [&](const QSeries& s, const QSeries& arg) {
        std::vector<VarImage<Rational>> images(lt.size());
        for (std::size_t i = 0; i < lt.size(); ++i)
            if (int(i) != pair.var) images[i] = VarImage<Rational>::to_var(tb->require(lt.name(i)));
        images[pair.var] = VarImage<Rational>::to_series(arg);
        return SeriesOps::substitute(s, images, tb);
    };
    auto u = QSeries::variable(tb, order, 0, Rational(1));
    auto v = QSeries::variable(tb, order, 1, Rational(1));
    auto inner = lift(pair.log, u) + lift(pair.log, v);
    return QFgl::validate(lift(pair.exp, inner), assoc_order);
}

inline QFgl universal_fgl(int order, int assoc_order = QFgl::kDefaultAssocOrder) {
    return fgl_from_exponential(universal_exponential(order), assoc_order);
}

}  // namespace fgl
