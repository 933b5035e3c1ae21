#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fgl/series.hpp"

namespace testutil {

// splitmix64: tiny, seedable, identical everywhere.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    long range(long lo, long hi) {  // inclusive
        return lo + long(next() % std::uint64_t(hi - lo + 1));
    }
};

inline fgl::Rational rand_rational(Rng& rng) {
    long num = rng.range(-9, 9);
    long den = rng.range(1, 6);
    return fgl::Rational(num, den);
}

/// Random series over the given table: every monomial of positive-weight
/// degree <= order with small exponents gets a coefficient with probability ~1/2.
inline fgl::QSeries rand_series(Rng& rng, const fgl::VarTablePtr& table, int order,
                                bool zero_const = false, int max_coeff_exp = 2) {
    std::vector<fgl::QSeries::Term> terms;
    std::vector<fgl::Mono::Exp> exps(table->size(), 0);
    // enumerate monomials with total exponent bounded per variable
    std::function<void(std::size_t)> walk = [&](std::size_t i) {
        if (i == table->size()) {
            fgl::Mono m(table->size());
            m.e = exps;
            int pd = posdeg(*table, m);
            if (pd > order) return;
            if (zero_const && m.is_constant()) return;
            if (rng.next() % 2 == 0) return;
            auto c = rand_rational(rng);
            if (!c.is_zero()) terms.emplace_back(m, c);
            return;
        }
        int cap = table->weight(i) > 0 ? order : max_coeff_exp;
        for (int e = 0; e <= cap; ++e) {
            exps[i] = fgl::Mono::Exp(e);
            walk(i + 1);
        }
        exps[i] = 0;
    };
    walk(0);
    return fgl::QSeries::from_terms(table, order, std::move(terms));
}

/// Random series of the form t + higher order terms in one positive variable.
inline fgl::QSeries rand_unit_linear(Rng& rng, const fgl::VarTablePtr& table, int var, int order) {
    std::vector<fgl::QSeries::Term> terms;
    fgl::Mono lin(table->size());
    lin.e[var] = 1;
    terms.emplace_back(lin, fgl::Rational(1));
    for (int k = 2; k <= order; ++k) {
        auto c = rand_rational(rng);
        if (c.is_zero()) continue;
        fgl::Mono m(table->size());
        m.e[var] = fgl::Mono::Exp(k);
        terms.emplace_back(m, c);
    }
    return fgl::QSeries::from_terms(table, order, std::move(terms));
}

}  // namespace testutil
