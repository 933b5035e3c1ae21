#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fgl/gf.hpp"
#include "fgl/rational.hpp"
#include "fgl/varset.hpp"

namespace fgl {

template <class C>
struct CoeffTraits;

template <>
struct CoeffTraits<Rational> {
    static constexpr bool rational_like = true;
};
template <>
struct CoeffTraits<GFElem> {
    static constexpr bool rational_like = false;
};

/// Exponent vector over a VarTable.
struct Mono {
    using Exp = std::uint16_t;
    std::vector<Exp> e;

    Mono() = default;
    explicit Mono(std::size_t n) : e(n, 0) {}

    friend bool operator==(const Mono& a, const Mono& b) { return a.e == b.e; }
    friend bool operator!=(const Mono& a, const Mono& b) { return a.e != b.e; }
    friend bool operator<(const Mono& a, const Mono& b) { return a.e < b.e; }  // lex

    bool is_constant() const {
        for (auto x : e)
            if (x) return false;
        return true;
    }
};

struct MonoHash {
    std::size_t operator()(const Mono& m) const {
        std::uint64_t h = 1469598103934665603ull;
        for (auto x : m.e) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return std::size_t(h);
    }
};

inline Mono mono_add(const Mono& a, const Mono& b) {
    Mono r(a.e.size());
    for (std::size_t i = 0; i < a.e.size(); ++i) r.e[i] = Mono::Exp(a.e[i] + b.e[i]);
    return r;
}

inline int posdeg(const VarTable& t, const Mono& m) {
    int d = 0;
    for (int i : t.positive_indices()) d += m.e[i];
    return d;
}

inline int weighted_deg(const VarTable& t, const Mono& m) {
    int d = 0;
    for (std::size_t i = 0; i < t.size(); ++i) d += t.weight(i) * int(m.e[i]);
    return d;
}

/// Sparse multivariate power series with exact coefficients, truncated by the
/// total degree in the positive-weight variables ("order"). Negative-weight
/// (coefficient) variables are not truncated; in the graded computations the
/// weight-homogeneity of the inputs keeps them finite. Values are immutable
/// in practice: every operation returns a fresh series.
template <class C>
class TruncatedSeries {
public:
    using Term = std::pair<Mono, C>;

    TruncatedSeries() : order_(0) {}
    TruncatedSeries(VarTablePtr table, int order) : table_(std::move(table)), order_(order) {
        if (order_ < 0) throw std::invalid_argument("series: negative order");
    }

    static TruncatedSeries constant(VarTablePtr table, int order, C v) {
        TruncatedSeries s(std::move(table), order);
        if (!v.is_zero()) s.terms_.emplace_back(Mono(s.table_->size()), std::move(v));
        return s;
    }
    static TruncatedSeries monomial(VarTablePtr table, int order, const Mono& m, C v) {
        TruncatedSeries s(std::move(table), order);
        if (posdeg(*s.table_, m) > order)
            throw std::invalid_argument("series: monomial exceeds truncation order");
        if (!v.is_zero()) s.terms_.emplace_back(m, std::move(v));
        return s;
    }
    static TruncatedSeries variable(VarTablePtr table, int order, int idx, C one) {
        Mono m(table->size());
        m.e.at(idx) = 1;
        return monomial(std::move(table), order, m, std::move(one));
    }

    const VarTablePtr& table() const { return table_; }
    int order() const { return order_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t num_terms() const { return terms_.size(); }

    C coeff(const Mono& m) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                                   [](const Term& t, const Mono& k) { return t.first < k; });
        if (it != terms_.end() && it->first == m) return it->second;
        return terms_.empty() ? C() : C::zero_like(terms_.front().second);
    }
    C constant_term() const { return coeff(Mono(table_->size())); }

    /// Largest positive-weight degree actually present.
    int max_posdeg() const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, posdeg(*table_, m));
        return d;
    }

    /// Common weighted degree of all monomials, if the series is homogeneous.
    std::optional<int> homogeneous_weight() const {
        std::optional<int> w;
        for (const auto& [m, c] : terms_) {
            int d = weighted_deg(*table_, m);
            if (!w)
                w = d;
            else if (*w != d)
                return std::nullopt;
        }
        return w;
    }

    TruncatedSeries truncated(int new_order) const {
        if (new_order >= order_) {
            TruncatedSeries s = *this;
            s.order_ = new_order < order_ ? new_order : order_;
            return s;
        }
        TruncatedSeries s(table_, new_order);
        for (const auto& [m, c] : terms_)
            if (posdeg(*table_, m) <= new_order) s.terms_.emplace_back(m, c);
        return s;
    }

    /// Asserts a (possibly higher) certification order. Only sound when the
    /// value is known exactly to that order, e.g. polynomials in the
    /// coefficient variables (positive-weight degree 0).
    TruncatedSeries with_order(int new_order) const {
        if (new_order <= order_) return truncated(new_order);
        TruncatedSeries s = *this;
        s.order_ = new_order;
        return s;
    }

    /// Terms of exact positive-weight degree d, as a series.
    TruncatedSeries graded_piece(int d) const {
        TruncatedSeries s(table_, order_);
        for (const auto& [m, c] : terms_)
            if (posdeg(*table_, m) == d) s.terms_.emplace_back(m, c);
        return s;
    }

    /// Coefficient of var^k as a series (the variable's exponent is zeroed).
    TruncatedSeries coefficient_of(int var, int k) const {
        int neworder = table_->weight(var) > 0 ? std::max(order_ - k, 0) : order_;
        TruncatedSeries s(table_, neworder);
        for (const auto& [m, c] : terms_)
            if (int(m.e[var]) == k) {
                Mono m2 = m;
                m2.e[var] = 0;
                s.terms_.emplace_back(std::move(m2), c);
            }
        std::sort(s.terms_.begin(), s.terms_.end(),
                  [](const Term& a, const Term& b) { return a.first < b.first; });
        return s;
    }

    TruncatedSeries operator-() const {
        TruncatedSeries s(table_, order_);
        s.terms_.reserve(terms_.size());
        for (const auto& [m, c] : terms_) s.terms_.emplace_back(m, -c);
        return s;
    }

    TruncatedSeries scaled(const C& k) const {
        TruncatedSeries s(table_, order_);
        if (k.is_zero()) return s;
        s.terms_.reserve(terms_.size());
        for (const auto& [m, c] : terms_) {
            C v = c * k;
            if (!v.is_zero()) s.terms_.emplace_back(m, std::move(v));
        }
        return s;
    }

    friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
        a.check_compatible(b);
        int order = std::min(a.order_, b.order_);
        TruncatedSeries s(a.table_ ? a.table_ : b.table_, order);
        s.terms_.reserve(a.terms_.size() + b.terms_.size());
        auto ia = a.terms_.begin(), ib = b.terms_.begin();
        while (ia != a.terms_.end() || ib != b.terms_.end()) {
            if (ib == b.terms_.end() || (ia != a.terms_.end() && ia->first < ib->first)) {
                if (posdeg(*s.table_, ia->first) <= order) s.terms_.push_back(*ia);
                ++ia;
            } else if (ia == a.terms_.end() || ib->first < ia->first) {
                if (posdeg(*s.table_, ib->first) <= order) s.terms_.push_back(*ib);
                ++ib;
            } else {
                C v = ia->second + ib->second;
                if (!v.is_zero() && posdeg(*s.table_, ia->first) <= order)
                    s.terms_.emplace_back(ia->first, std::move(v));
                ++ia;
                ++ib;
            }
        }
        return s;
    }
    friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
        return a + (-b);
    }

    friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
        a.check_compatible(b);
        int order = std::min(a.order_, b.order_);
        TruncatedSeries s(a.table_ ? a.table_ : b.table_, order);
        if (a.terms_.empty() || b.terms_.empty()) return s;

        // Bucket terms by positive-weight degree so the truncation prunes
        // whole blocks of products at once.
        auto bucket = [order](const TruncatedSeries& x) {
            std::vector<std::vector<const Term*>> bk(order + 1);
            for (const auto& t : x.terms_) {
                int d = posdeg(*x.table_, t.first);
                if (d <= order) bk[d].push_back(&t);
            }
            return bk;
        };
        auto ba = bucket(a), bb = bucket(b);

        std::unordered_map<Mono, C, MonoHash> acc;
        acc.reserve(a.terms_.size() + b.terms_.size());
        Mono scratch(a.table_->size());
        for (int da = 0; da <= order; ++da) {
            if (ba[da].empty()) continue;
            for (int db = 0; db + da <= order; ++db) {
                if (bb[db].empty()) continue;
                for (const Term* ta : ba[da]) {
                    for (const Term* tb : bb[db]) {
                        for (std::size_t i = 0; i < scratch.e.size(); ++i)
                            scratch.e[i] = Mono::Exp(ta->first.e[i] + tb->first.e[i]);
                        auto it = acc.find(scratch);
                        if (it == acc.end())
                            acc.emplace(scratch, ta->second * tb->second);
                        else
                            it->second += ta->second * tb->second;
                    }
                }
            }
        }
        s.terms_.reserve(acc.size());
        for (auto& [m, c] : acc)
            if (!c.is_zero()) s.terms_.emplace_back(m, std::move(c));
        std::sort(s.terms_.begin(), s.terms_.end(),
                  [](const Term& x, const Term& y) { return x.first < y.first; });
        return s;
    }

    TruncatedSeries& operator+=(const TruncatedSeries& o) { return *this = *this + o; }
    TruncatedSeries& operator-=(const TruncatedSeries& o) { return *this = *this - o; }
    TruncatedSeries& operator*=(const TruncatedSeries& o) { return *this = *this * o; }

    TruncatedSeries pow(int e) const {
        if (e < 0) throw std::invalid_argument("series: negative power");
        TruncatedSeries r = constant(table_, order_, exemplar_one());
        TruncatedSeries b = *this;
        while (e) {
            if (e & 1) r = r * b;
            if (e >>= 1) b = b * b;
        }
        return r;
    }

    /// Equality as truncated polynomials (orders may differ; both sides are
    /// compared through the smaller order).
    friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
        if (!same_table(a.table_, b.table_)) return false;
        int order = std::min(a.order_, b.order_);
        return a.truncated(order).terms_ == b.truncated(order).terms_;
    }
    friend bool operator!=(const TruncatedSeries& a, const TruncatedSeries& b) { return !(a == b); }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            if (!first) os << " + ";
            first = false;
            os << "(" << c.str() << ")";
            for (std::size_t i = 0; i < m.e.size(); ++i)
                if (m.e[i]) {
                    os << "*" << table_->name(i);
                    if (m.e[i] > 1) os << "^" << m.e[i];
                }
        }
        return os.str();
    }

    // --- calculus -----------------------------------------------------------

    TruncatedSeries derivative(int var) const {
        int neworder = table_->weight(var) > 0 ? std::max(order_ - 1, 0) : order_;
        TruncatedSeries s(table_, neworder);
        for (const auto& [m, c] : terms_) {
            if (m.e[var] == 0) continue;
            Mono m2 = m;
            m2.e[var] -= 1;
            C v = c.times_int(long(m.e[var]));
            if (!v.is_zero()) s.terms_.emplace_back(std::move(m2), std::move(v));
        }
        std::sort(s.terms_.begin(), s.terms_.end(),
                  [](const Term& a, const Term& b) { return a.first < b.first; });
        return s;
    }

    /// Term-by-term antiderivative with integration constant 0.
    TruncatedSeries integrate(int var) const {
        static_assert(std::is_same_v<C, C>);
        if (!CoeffTraits<C>::rational_like)
            throw std::domain_error("series: integration requires rational coefficients");
        int neworder = table_->weight(var) > 0 ? order_ + 1 : order_;
        TruncatedSeries s(table_, neworder);
        for (const auto& [m, c] : terms_) {
            Mono m2 = m;
            m2.e[var] += 1;
            s.terms_.emplace_back(std::move(m2), c.divided_by_int(long(m.e[var]) + 1));
        }
        std::sort(s.terms_.begin(), s.terms_.end(),
                  [](const Term& a, const Term& b) { return a.first < b.first; });
        return s;
    }

    // --- division -----------------------------------------------------------

    /// Multiplicative inverse of a unit. The degree-0 part (in the positive
    /// variables) must be a nonzero scalar constant.
    TruncatedSeries invert_unit() const {
        C c0 = unit_constant("invert_unit");
        TruncatedSeries x = constant(table_, 0, c0.inverse());
        C two = C::int_like(c0, 2);
        int prec = 0;
        while (prec < order_) {
            prec = std::min(2 * prec + 1, order_);
            // x <- x*(2 - u*x): one pass doubles the correct prefix
            auto xk = x.with_order(prec);
            x = xk * (constant(table_, prec, two) - truncated(prec) * xk);
        }
        return x;
    }

    /// this / u for a unit u (see invert_unit).
    TruncatedSeries divide_unit(const TruncatedSeries& u) const { return *this * u.invert_unit(); }

    // --- string/terms access helpers for building ---------------------------

    /// Builds a series from (mono, coeff) pairs; zero coefficients dropped.
    static TruncatedSeries from_terms(VarTablePtr table, int order, std::vector<Term> terms) {
        TruncatedSeries s(std::move(table), order);
        for (auto& [m, c] : terms) {
            if (c.is_zero()) continue;
            if (posdeg(*s.table_, m) > order) continue;
            s.terms_.emplace_back(std::move(m), std::move(c));
        }
        std::sort(s.terms_.begin(), s.terms_.end(),
                  [](const Term& a, const Term& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < s.terms_.size(); ++i)
            if (s.terms_[i].first == s.terms_[i - 1].first)
                throw std::invalid_argument("series: duplicate monomial in from_terms");
        return s;
    }

    friend class SeriesOps;

private:
    C exemplar_one() const {
        if (terms_.empty()) {
            if constexpr (CoeffTraits<C>::rational_like)
                return C(1);
            else
                throw std::domain_error("series: cannot synthesize 1 in an empty modular series");
        }
        return C::one_like(terms_.front().second);
    }

    C unit_constant(const char* who) const {
        Mono zero(table_->size());
        for (const auto& [m, c] : terms_) {
            int d = posdeg(*table_, m);
            if (d == 0 && m != zero)
                throw std::domain_error(std::string(who) +
                                        ": degree-0 part is not a scalar constant");
        }
        C c0 = constant_term();
        if (c0.is_zero())
            throw std::domain_error(std::string(who) + ": non-invertible constant term");
        return c0;
    }

    void check_compatible(const TruncatedSeries& o) const {
        if (!same_table(table_, o.table_))
            throw std::invalid_argument("series: variable-table mismatch");
    }

    VarTablePtr table_;
    int order_;
    std::vector<Term> terms_;  // lex-sorted, no zero coefficients
};

using QSeries = TruncatedSeries<Rational>;
using FSeries = TruncatedSeries<GFElem>;

/// Substitution image for one variable: either a plain relabel into the
/// target table or a full series (which must have zero constant term).
template <class C>
struct VarImage {
    int target = -1;
    const TruncatedSeries<C>* series = nullptr;

    static VarImage to_var(int idx) {
        VarImage v;
        v.target = idx;
        return v;
    }
    static VarImage to_series(const TruncatedSeries<C>& s) {
        VarImage v;
        v.series = &s;
        return v;
    }
};

class SeriesOps {
public:
    /// General substitution: every variable of f is either relabelled into
    /// `target` or replaced by a series over `target` with zero constant term.
    template <class C>
    static TruncatedSeries<C> substitute(const TruncatedSeries<C>& f,
                                         const std::vector<VarImage<C>>& images,
                                         VarTablePtr target) {
        const VarTable& ft = *f.table();
        if (images.size() != ft.size())
            throw std::invalid_argument("substitute: one image required per variable");

        int order = f.order();
        std::vector<int> subst;  // indices substituted by series
        for (std::size_t i = 0; i < images.size(); ++i) {
            if (images[i].series) {
                const auto& s = *images[i].series;
                if (!same_table(s.table(), target))
                    throw std::invalid_argument("substitute: image series over wrong table");
                if (!s.constant_term().is_zero())
                    throw std::invalid_argument("substitute: image has nonzero constant term");
                order = std::min(order, s.order());
                subst.push_back(int(i));
            } else if (images[i].target < 0 || images[i].target >= int(target->size())) {
                throw std::invalid_argument("substitute: bad relabel target");
            }
        }

        // Cache of products prod_i image_i^{e_i} keyed by the exponents of the
        // substituted variables.
        std::map<std::vector<Mono::Exp>, TruncatedSeries<C>> cache;
        std::function<const TruncatedSeries<C>&(const std::vector<Mono::Exp>&)> power =
            [&](const std::vector<Mono::Exp>& key) -> const TruncatedSeries<C>& {
            auto it = cache.find(key);
            if (it != cache.end()) return it->second;
            int k = -1;
            for (std::size_t i = 0; i < key.size(); ++i)
                if (key[i]) k = int(i);
            TruncatedSeries<C> val;
            if (k < 0) {
                val = TruncatedSeries<C>(target, order);  // empty: the caller treats {} as 1
            } else {
                std::vector<Mono::Exp> prev = key;
                prev[k] -= 1;
                const TruncatedSeries<C>& base = *images[subst[k]].series;
                const TruncatedSeries<C>& rest = power(prev);
                bool prev_trivial = true;
                for (auto x : prev)
                    if (x) prev_trivial = false;
                val = prev_trivial ? base.truncated(order) : (rest * base).truncated(order);
            }
            return cache.emplace(key, std::move(val)).first->second;
        };

        std::unordered_map<Mono, C, MonoHash> acc;
        for (const auto& [m, c] : f.terms()) {
            // Split the monomial into the relabelled part and the substituted part.
            Mono base(target->size());
            std::vector<Mono::Exp> key(subst.size(), 0);
            bool pure = true;
            for (std::size_t i = 0; i < ft.size(); ++i) {
                if (!m.e[i]) continue;
                if (images[i].series) {
                    key[std::lower_bound(subst.begin(), subst.end(), int(i)) - subst.begin()] =
                        m.e[i];
                    pure = false;
                } else {
                    base.e[images[i].target] = Mono::Exp(base.e[images[i].target] + m.e[i]);
                }
            }
            int dbase = posdeg(*target, base);
            if (dbase > order) continue;
            if (pure) {
                accumulate(acc, base, c);
                continue;
            }
            const TruncatedSeries<C>& p = power(key);
            for (const auto& [pm, pc] : p.terms()) {
                if (dbase + posdeg(*target, pm) > order) continue;
                accumulate(acc, mono_add(base, pm), c * pc);
            }
        }
        return collect(std::move(acc), target, order);
    }

    /// Substitutes scalar values for some variables; the remaining variables
    /// are relabelled into the target table.
    template <class C>
    static TruncatedSeries<C> substitute_scalars(const TruncatedSeries<C>& f,
                                                 const std::vector<std::optional<C>>& values,
                                                 VarTablePtr target,
                                                 const std::vector<int>& relabel) {
        const VarTable& ft = *f.table();
        if (values.size() != ft.size() || relabel.size() != ft.size())
            throw std::invalid_argument("substitute_scalars: size mismatch");
        std::unordered_map<Mono, C, MonoHash> acc;
        for (const auto& [m, c] : f.terms()) {
            Mono base(target->size());
            C v = c;
            bool dead = false;
            for (std::size_t i = 0; i < ft.size() && !dead; ++i) {
                if (!m.e[i]) continue;
                if (values[i]) {
                    if (values[i]->is_zero())
                        dead = true;
                    else
                        for (int k = 0; k < int(m.e[i]); ++k) v *= *values[i];
                } else {
                    base.e[relabel[i]] = Mono::Exp(base.e[relabel[i]] + m.e[i]);
                }
            }
            if (dead || v.is_zero()) continue;
            if (posdeg(*target, base) > f.order()) continue;
            accumulate(acc, base, v);
        }
        return collect(std::move(acc), target, f.order());
    }

    /// Relabel variables into a (possibly larger) table.
    template <class C>
    static TruncatedSeries<C> relabel(const TruncatedSeries<C>& f, VarTablePtr target,
                                      const std::vector<int>& map) {
        std::vector<VarImage<C>> images;
        images.reserve(map.size());
        for (int t : map) images.push_back(VarImage<C>::to_var(t));
        return substitute(f, images, std::move(target));
    }

    /// Composition f(arg) for f univariate in `var` (no other positive-weight
    /// variable may appear in f). Horner evaluation.
    template <class C>
    static TruncatedSeries<C> compose_univariate(const TruncatedSeries<C>& f, int var,
                                                 const TruncatedSeries<C>& arg) {
        const VarTable& ft = *f.table();
        for (const auto& [m, c] : f.terms())
            for (int i : ft.positive_indices())
                if (i != var && m.e[i])
                    throw std::invalid_argument("compose: series is not univariate");
        if (!arg.constant_term().is_zero())
            throw std::invalid_argument("compose: argument has nonzero constant term");

        int order = std::min(f.order(), arg.order());
        VarTablePtr target = arg.table();
        // Identity relabel for the non-substituted variables; requires name
        // match in the target table.
        std::vector<int> relmap(ft.size(), -1);
        for (std::size_t i = 0; i < ft.size(); ++i) {
            if (int(i) == var) continue;
            relmap[i] = target->require(ft.name(i));
        }

        int maxk = 0;
        for (const auto& [m, c] : f.terms()) maxk = std::max(maxk, int(m.e[var]));
        // a_k = coefficient series of var^k, relabelled into the target.
        std::vector<TruncatedSeries<C>> a;
        a.reserve(maxk + 1);
        for (int k = 0; k <= maxk; ++k) {
            // a_k is a polynomial in the coefficient variables, exact at any order.
            auto ck = f.coefficient_of(var, k).with_order(order);
            std::vector<VarImage<C>> images;
            for (std::size_t i = 0; i < ft.size(); ++i)
                images.push_back(VarImage<C>::to_var(int(i) == var ? 0 : relmap[i]));
            a.push_back(substitute(ck, images, target));
        }
        TruncatedSeries<C> acc(target, order);
        for (int k = maxk; k >= 1; --k) acc = (acc + a[k]) * arg.truncated(order);
        return (acc + a[0]).truncated(order);
    }

    /// Functional inverse of f = c1*x + O(x^2) in the variable `var`; c1 must
    /// be an invertible scalar and x the only positive-weight variable of f.
    template <class C>
    static TruncatedSeries<C> reversion(const TruncatedSeries<C>& f, int var) {
        const VarTable& ft = *f.table();
        if (ft.weight(var) <= 0) throw std::invalid_argument("reversion: not a positive variable");
        for (const auto& [m, c] : f.terms()) {
            for (int i : ft.positive_indices())
                if (i != var && m.e[i])
                    throw std::invalid_argument("reversion: series is not univariate");
            if (m.e[var] == 0)
                throw std::invalid_argument("reversion: nonzero constant term");
        }
        Mono lin(ft.size());
        lin.e[var] = 1;
        C c1 = f.coeff(lin);
        {
            // Linear coefficient must be exactly c1 * x (a scalar unit).
            auto l = f.coefficient_of(var, 1);
            if (l.num_terms() != 1 || !l.terms().front().first.is_constant() || c1.is_zero())
                throw std::domain_error("reversion: linear coefficient is not a unit scalar");
        }

        if constexpr (CoeffTraits<C>::rational_like)
            return reversion_newton(f, var, c1);
        else
            return reversion_triangular(f, var, c1);
    }

    /// exp(f) = sum f^j/j! for f with zero constant term, rational
    /// coefficients only.
    template <class C>
    static TruncatedSeries<C> exp_series(const TruncatedSeries<C>& f) {
        if constexpr (!CoeffTraits<C>::rational_like)
            static_assert(CoeffTraits<C>::rational_like, "exp_series requires Q coefficients");
        if (!f.constant_term().is_zero())
            throw std::invalid_argument("exp_series: nonzero constant term");
        auto r = TruncatedSeries<C>::constant(f.table(), f.order(), C(1));
        auto term = r;
        for (int j = 1; j <= f.order(); ++j) {
            term = (term * f).scaled(C(1, j));
            if (term.is_zero()) break;
            r = r + term;
        }
        return r;
    }

    /// Exact division by a linear form c_i*x_i + c_j*x_j (x_i, x_j positive
    /// weight, c_i invertible). Throws with the offending monomial when the
    /// division leaves a remainder.
    template <class C>
    static TruncatedSeries<C> exact_divide_linear(const TruncatedSeries<C>& a, int vi, const C& ci,
                                                  int vj, const C& cj) {
        const VarTable& t = *a.table();
        if (t.weight(vi) <= 0 || (vj >= 0 && t.weight(vj) <= 0))
            throw std::invalid_argument("exact_divide_linear: divisor must use positive variables");
        C ciinv = ci.inverse();

        int maxe = 0;
        for (const auto& [m, c] : a.terms()) maxe = std::max(maxe, int(m.e[vi]));
        // levels[e]: pending terms with x_i-exponent e
        std::vector<std::map<Mono, C>> levels(maxe + 1);
        for (const auto& [m, c] : a.terms()) levels[m.e[vi]].emplace(m, c);

        std::vector<typename TruncatedSeries<C>::Term> q;
        for (int e = maxe; e >= 1; --e) {
            for (const auto& [m, c] : levels[e]) {
                if (c.is_zero()) continue;
                C qc = c * ciinv;
                Mono qm = m;
                qm.e[vi] -= 1;
                q.emplace_back(qm, qc);
                if (vj >= 0 && !cj.is_zero()) {
                    Mono rm = qm;
                    rm.e[vj] += 1;
                    C delta = -(qc * cj);
                    auto [it, fresh] = levels[e - 1].emplace(rm, delta);
                    if (!fresh) it->second += delta;
                }
            }
        }
        for (const auto& [m, c] : levels[0])
            if (!c.is_zero()) {
                std::ostringstream os;
                os << "exact_divide_linear: not divisible, remainder at monomial";
                for (std::size_t i = 0; i < m.e.size(); ++i)
                    if (m.e[i]) os << " " << t.name(i) << "^" << m.e[i];
                throw std::domain_error(os.str());
            }
        return TruncatedSeries<C>::from_terms(a.table(), std::max(a.order() - 1, 0), std::move(q));
    }

private:
    template <class C>
    static void accumulate(std::unordered_map<Mono, C, MonoHash>& acc, const Mono& m, C v) {
        if (v.is_zero()) return;
        auto it = acc.find(m);
        if (it == acc.end())
            acc.emplace(m, std::move(v));
        else
            it->second += v;
    }

    template <class C>
    static TruncatedSeries<C> collect(std::unordered_map<Mono, C, MonoHash>&& acc,
                                      VarTablePtr table, int order) {
        std::vector<typename TruncatedSeries<C>::Term> terms;
        terms.reserve(acc.size());
        for (auto& [m, c] : acc)
            if (!c.is_zero()) terms.emplace_back(m, std::move(c));
        return TruncatedSeries<C>::from_terms(std::move(table), order, std::move(terms));
    }

    template <class C>
    static TruncatedSeries<C> reversion_newton(const TruncatedSeries<C>& f, int var, const C& c1) {
        int order = f.order();
        auto table = f.table();
        auto x = TruncatedSeries<C>::variable(table, order, var, C::one_like(c1));
        auto g = x.scaled(c1.inverse());
        if (order <= 1) return g;
        auto fp = f.derivative(var);
        int correct = 1;
        while (correct < order) {
            correct = std::min(2 * correct + 1, order);
            // g is exact through the previous precision; the update computes
            // at the doubled precision with the missing tail treated as 0.
            auto gk = g.with_order(correct);
            auto err = compose_univariate(f.truncated(correct), var, gk) - x.truncated(correct);
            if (!err.is_zero()) {
                auto slope = compose_univariate(fp.with_order(correct), var, gk);
                g = gk - err * slope.invert_unit();
            } else {
                g = gk;
            }
        }
        return g.truncated(order);
    }

    template <class C>
    static TruncatedSeries<C> reversion_triangular(const TruncatedSeries<C>& f, int var,
                                                   const C& c1) {
        int order = f.order();
        auto table = f.table();
        C c1inv = c1.inverse();
        auto g = TruncatedSeries<C>::variable(table, order, var, C::one_like(c1)).scaled(c1inv);
        for (int n = 2; n <= order; ++n) {
            auto h = compose_univariate(f.truncated(n), var, g.truncated(n));
            auto cn = h.coefficient_of(var, n).with_order(order);
            if (cn.is_zero()) continue;
            Mono xn(table->size());
            xn.e[var] = Mono::Exp(n);
            auto delta = TruncatedSeries<C>::monomial(table, order, xn, C::one_like(c1));
            g = g - delta * cn.scaled(c1inv);
        }
        return g;
    }
};

/// Applies fn to every coefficient, producing a series over a new coefficient
/// ring (zeros are dropped).
template <class D, class C, class F>
TruncatedSeries<D> map_coeffs(const TruncatedSeries<C>& s, F&& fn) {
    std::vector<typename TruncatedSeries<D>::Term> terms;
    terms.reserve(s.num_terms());
    for (const auto& [m, c] : s.terms()) {
        D v = fn(c);
        if (!v.is_zero()) terms.emplace_back(m, std::move(v));
    }
    return TruncatedSeries<D>::from_terms(s.table(), s.order(), std::move(terms));
}

}  // namespace fgl
