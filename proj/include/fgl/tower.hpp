#pragma once

#include <string>
#include <vector>

#include "fgl/series.hpp"

namespace fgl {

/// Finite graded ring of an iterated projective bundle over a product of
/// projective spaces. The base contributes hyperplane classes h_j with
/// h_j^{m_j+1} = 0; each stage P(V) -> (ring so far), with V of rank r given
/// by its Chern roots, contributes the class u = c1(O(1)) subject to
/// prod_i (u + rho_i) = 0, i.e. u^r = -(c1 u^{r-1} + ... + c_r). Elements are
/// kept in the capped normal-form monomial basis, so the ring is a free
/// module of rank prod(m_j+1) * prod(r_s).
class TowerRing {
public:
    /// Each stage is a list of Chern roots, every root a degree-1 class given
    /// by its coefficients over the variables defined so far
    /// (h_1..h_k, u_1..u_{s-1}); shorter vectors are zero-padded.
    TowerRing(std::vector<int> base_dims, std::vector<std::vector<std::vector<int>>> stages = {}) {
        base_dims_ = std::move(base_dims);
        dim_ = 0;
        std::vector<std::pair<std::string, int>> vars;
        for (std::size_t j = 0; j < base_dims_.size(); ++j) {
            if (base_dims_[j] < 1) throw std::invalid_argument("TowerRing: base dims must be >= 1");
            vars.emplace_back("h" + std::to_string(j + 1), 1);
            dim_ += base_dims_[j];
        }
        for (std::size_t s = 0; s < stages.size(); ++s) {
            int r = int(stages[s].size());
            if (r < 1) throw std::invalid_argument("TowerRing: stage rank must be >= 1");
            vars.emplace_back("q" + std::to_string(s + 1), 1);
            dim_ += r - 1;
        }
        table_ = make_table(std::move(vars));

        for (std::size_t s = 0; s < stages.size(); ++s) {
            StageData st;
            st.rank = int(stages[s].size());
            st.var = int(base_dims_.size() + s);
            // roots may only use variables below this stage
            std::size_t allowed = base_dims_.size() + s;
            for (const auto& coeffs : stages[s]) {
                if (coeffs.size() > allowed)
                    throw std::invalid_argument("TowerRing: stage root uses later variables");
                st.roots.push_back(linear(coeffs));
            }
            // elementary symmetric functions of the roots
            std::vector<QSeries> e(st.rank + 1, zero());
            e[0] = one();
            for (const auto& rho : st.roots)
                for (int k = st.rank; k >= 1; --k) e[k] = reduce(e[k] + e[k - 1] * rho);
            st.chern = e;
            // u^r = -(c1 u^{r-1} + ... + c_r)
            auto u = var_series(st.var);
            auto rhs = zero();
            auto upow = one();
            for (int i = st.rank; i >= 1; --i) {
                rhs = reduce(rhs + e[i] * upow);
                upow = reduce(upow * u);
            }
            st.relation = -rhs;
            stages_.push_back(std::move(st));
            // Segre classes s_k(V): s0 = 1, s_k = -sum_{i>=1} c_i s_{k-i}
            auto& seg = stages_.back().segre;
            seg.assign(std::size_t(dim_) + 1, zero());
            seg[0] = one();
            for (int k = 1; k <= dim_; ++k) {
                auto acc = zero();
                for (int i = 1; i <= std::min(k, stages_.back().rank); ++i)
                    acc = acc + stages_.back().chern[i] * seg[k - i];
                seg[k] = reduce(-acc);
            }
        }
    }

    const VarTablePtr& table() const { return table_; }
    int dim() const { return dim_; }
    std::size_t num_stages() const { return stages_.size(); }
    int stage_rank(std::size_t s) const { return stages_.at(s).rank; }
    int stage_var(std::size_t s) const { return stages_.at(s).var; }
    const std::vector<QSeries>& stage_chern(std::size_t s) const { return stages_.at(s).chern; }
    const std::vector<QSeries>& stage_segre(std::size_t s) const { return stages_.at(s).segre; }

    QSeries zero() const { return QSeries(table_, dim_); }
    QSeries one() const { return QSeries::constant(table_, dim_, Rational(1)); }
    QSeries var_series(int i) const { return QSeries::variable(table_, dim_, i, Rational(1)); }

    /// Degree-1 class from integer coefficients over the variables (zero-padded).
    QSeries linear(const std::vector<int>& coeffs) const {
        std::vector<QSeries::Term> terms;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            if (!coeffs[i]) continue;
            Mono m(table_->size());
            m.e[i] = 1;
            terms.emplace_back(m, Rational(coeffs[i]));
        }
        return QSeries::from_terms(table_, dim_, std::move(terms));
    }

    /// Normal form: h_j exponents capped by m_j (higher powers vanish), stage
    /// exponents rewritten through the Grothendieck relations. Relations are
    /// homogeneous, so degrees never grow.
    QSeries reduce(QSeries x) const {
        x = drop_high_h(std::move(x));
        for (int s = int(stages_.size()) - 1; s >= 0; --s) {
            const auto& st = stages_[std::size_t(s)];
            int cap = st.rank - 1;
            while (true) {
                std::vector<QSeries::Term> ok, over;
                for (const auto& t : x.terms())
                    (int(t.first.e[st.var]) > cap ? over : ok).push_back(t);
                if (over.empty()) break;
                auto acc = QSeries::from_terms(table_, dim_, std::move(ok));
                for (auto& [m, c] : over) {
                    Mono rest = m;
                    rest.e[st.var] = Mono::Exp(rest.e[st.var] - st.rank);
                    acc = acc + QSeries::monomial(table_, dim_, rest, c) * st.relation;
                }
                x = drop_high_h(std::move(acc));
            }
        }
        return x;
    }

    QSeries mul(const QSeries& a, const QSeries& b) const { return reduce(a * b); }
    QSeries pow(const QSeries& a, int e) const {
        auto r = one();
        for (int i = 0; i < e; ++i) r = mul(r, a);
        return r;
    }

    /// Pushforward along the stage-s projection: u^i |-> s_{i-(r-1)}(V),
    /// linear over the ring below. The element must not involve later stages.
    QSeries segre_pushforward(const QSeries& x, std::size_t s) const {
        const auto& st = stages_.at(s);
        for (const auto& [m, c] : x.terms())
            for (std::size_t t = s + 1; t < stages_.size(); ++t)
                if (m.e[stages_[t].var])
                    throw std::invalid_argument(
                        "segre_pushforward: element involves a later stage");
        auto acc = zero();
        for (const auto& [m, c] : x.terms()) {
            int i = int(m.e[st.var]);
            int k = i - (st.rank - 1);
            if (k < 0) continue;  // s_{negative} = 0
            Mono rest = m;
            rest.e[st.var] = 0;
            acc = acc + QSeries::monomial(table_, dim_, rest, c) * st.segre.at(std::size_t(k));
        }
        return reduce(acc);
    }

    /// Full pushforward to the base followed by evaluation against the
    /// fundamental class (coefficient of h1^m1 ... hk^mk).
    Rational evaluate(QSeries x) const {
        for (int s = int(stages_.size()) - 1; s >= 0; --s)
            x = segre_pushforward(x, std::size_t(s));
        Mono top(table_->size());
        for (std::size_t j = 0; j < base_dims_.size(); ++j)
            top.e[j] = Mono::Exp(base_dims_[j]);
        return x.coeff(top);
    }

    /// Coefficient of the canonical top monomial in normal form; agrees with
    /// evaluate() and serves as its cross-check.
    Rational top_coefficient(const QSeries& x) const {
        Mono top(table_->size());
        for (std::size_t j = 0; j < base_dims_.size(); ++j)
            top.e[j] = Mono::Exp(base_dims_[j]);
        for (std::size_t s = 0; s < stages_.size(); ++s)
            top.e[stages_[s].var] = Mono::Exp(stages_[s].rank - 1);
        return x.coeff(top);
    }

private:
    QSeries drop_high_h(QSeries x) const {
        std::vector<QSeries::Term> keep;
        for (const auto& t : x.terms()) {
            bool dead = false;
            for (std::size_t j = 0; j < base_dims_.size(); ++j)
                if (int(t.first.e[j]) > base_dims_[j]) dead = true;
            if (!dead) keep.push_back(t);
        }
        return QSeries::from_terms(table_, dim_, std::move(keep));
    }

    struct StageData {
        int rank = 0;
        int var = 0;
        std::vector<QSeries> roots;
        std::vector<QSeries> chern;  // c_0..c_r
        std::vector<QSeries> segre;  // s_0..s_dim
        QSeries relation;            // normal form of u^r
    };

    VarTablePtr table_;
    std::vector<int> base_dims_;
    std::vector<StageData> stages_;
    int dim_ = 0;
};

/// Multiset of degree-1 tangent Chern roots (stable: zero roots are free).
struct TangentRootList {
    std::vector<QSeries> roots;
};

/// s^n = <N_n(roots), [X]> with N_n the n-th Newton power sum; n must be the
/// total dimension of the tower.
inline Rational sn_number(const TowerRing& R, const TangentRootList& roots) {
    int n = R.dim();
    auto acc = R.zero();
    for (const auto& rho : roots.roots) acc = acc + R.pow(rho, n);
    return R.evaluate(acc);
}

/// The two halves of a rank-(2,2) flop modelled over Z = P^{n-3} with
/// A = O(1) (+) O and B = O (+) O: s^n of
/// P_{P(A)}(B (x) O(-1) (+) O) minus s^n of P_{P(B)}(A (x) O(-1) (+) O).
inline Rational flop_sn_difference(int n) {
    if (n < 4 || n > 12) throw std::invalid_argument("flop_sn_difference: need 4 <= n <= 12");
    const int m = n - 3;

    // side 1: stage P(A), roots {h, 0}; then P(B (x) O(-v) (+) O), roots {-v, -v, 0}
    TowerRing R1({m}, {{{1}, {0}}, {{0, -1}, {0, -1}, {0}}});
    // tangent roots: w - v (twice), w, h + v, v, and (n-2) copies of h
    TangentRootList T1;
    auto wv1 = R1.linear({0, -1, 1});
    T1.roots = {wv1, wv1, R1.linear({0, 0, 1}), R1.linear({1, 1}), R1.linear({0, 1})};
    for (int i = 0; i < m + 1; ++i) T1.roots.push_back(R1.linear({1}));
    auto s1 = sn_number(R1, T1);

    // side 2: stage P(B), roots {0, 0}; then P(A (x) O(-v) (+) O), roots {h-v, -v, 0}
    TowerRing R2({m}, {{{0}, {0}}, {{1, -1}, {0, -1}, {0}}});
    TangentRootList T2;
    T2.roots = {R2.linear({1, -1, 1}), R2.linear({0, -1, 1}), R2.linear({0, 0, 1}),
                R2.linear({0, 1}), R2.linear({0, 1})};
    for (int i = 0; i < m + 1; ++i) T2.roots.push_back(R2.linear({1}));
    auto s2 = sn_number(R2, T2);

    return s1 - s2;
}

}  // namespace fgl
