#pragma once

#include <json.hpp>

#include "fgl/series.hpp"

namespace fgl {

/// Interchange dump used by every CLI command:
/// {"vars":[{"name":..,"weight":..}],"order":N,
///  "terms":[{"exps":[..],"num":"..","den":".."}]},
/// terms sorted lexicographically by exponent vector.
inline nlohmann::json series_to_json(const QSeries& s) {
    nlohmann::json vars = nlohmann::json::array();
    for (std::size_t i = 0; i < s.table()->size(); ++i)
        vars.push_back({{"name", s.table()->name(i)}, {"weight", s.table()->weight(i)}});
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [m, c] : s.terms()) {
        nlohmann::json exps = nlohmann::json::array();
        for (auto e : m.e) exps.push_back(int(e));
        terms.push_back({{"exps", exps}, {"num", c.num_string()}, {"den", c.den_string()}});
    }
    return {{"vars", vars}, {"order", s.order()}, {"terms", terms}};
}

inline nlohmann::json series_to_json(const FSeries& s) {
    nlohmann::json vars = nlohmann::json::array();
    for (std::size_t i = 0; i < s.table()->size(); ++i)
        vars.push_back({{"name", s.table()->name(i)}, {"weight", s.table()->weight(i)}});
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [m, c] : s.terms()) {
        nlohmann::json exps = nlohmann::json::array();
        for (auto e : m.e) exps.push_back(int(e));
        terms.push_back({{"exps", exps}, {"num", c.str()}, {"den", "1"}});
    }
    return {{"vars", vars}, {"order", s.order()}, {"terms", terms}};
}

inline QSeries series_from_json(const nlohmann::json& j) {
    std::vector<std::pair<std::string, int>> vars;
    for (const auto& v : j.at("vars"))
        vars.emplace_back(v.at("name").get<std::string>(), v.at("weight").get<int>());
    auto table = make_table(std::move(vars));
    std::vector<QSeries::Term> terms;
    for (const auto& t : j.at("terms")) {
        Mono m(table->size());
        const auto& exps = t.at("exps");
        if (exps.size() != table->size())
            throw std::invalid_argument("series_from_json: exponent arity mismatch");
        for (std::size_t i = 0; i < table->size(); ++i) m.e[i] = Mono::Exp(exps[i].get<int>());
        terms.emplace_back(m, Rational::from_string(t.at("num").get<std::string>(),
                                                    t.at("den").get<std::string>()));
    }
    return QSeries::from_terms(table, j.at("order").get<int>(), std::move(terms));
}

}  // namespace fgl
