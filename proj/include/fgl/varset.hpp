#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fgl {

/// Ordered table of ring variables with their weights. Chern-root-like
/// variables carry weight +1; coefficient variables carry negative weights
/// (a_i has weight -i, mu_i has weight -i, t has weight -1). Truncation of a
/// series bounds the total degree in the positive-weight variables only.
class VarTable {
public:
    explicit VarTable(std::vector<std::pair<std::string, int>> vars) {
        names_.reserve(vars.size());
        weights_.reserve(vars.size());
        for (auto& [n, w] : vars) {
            for (const auto& seen : names_)
                if (seen == n) throw std::invalid_argument("VarTable: duplicate variable " + n);
            names_.push_back(n);
            weights_.push_back(w);
            if (w > 0) positive_.push_back(int(names_.size()) - 1);
        }
    }

    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_.at(i); }
    int weight(std::size_t i) const { return weights_.at(i); }
    const std::vector<int>& positive_indices() const { return positive_; }

    int index_of(const std::string& n) const {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == n) return int(i);
        return -1;
    }
    int require(const std::string& n) const {
        int i = index_of(n);
        if (i < 0) throw std::invalid_argument("VarTable: unknown variable " + n);
        return i;
    }

    friend bool operator==(const VarTable& a, const VarTable& b) {
        return a.names_ == b.names_ && a.weights_ == b.weights_;
    }
    friend bool operator!=(const VarTable& a, const VarTable& b) { return !(a == b); }

private:
    std::vector<std::string> names_;
    std::vector<int> weights_;
    std::vector<int> positive_;
};

using VarTablePtr = std::shared_ptr<const VarTable>;

inline VarTablePtr make_table(std::vector<std::pair<std::string, int>> vars) {
    return std::make_shared<const VarTable>(std::move(vars));
}

inline bool same_table(const VarTablePtr& a, const VarTablePtr& b) {
    return a == b || (a && b && *a == *b);
}

}  // namespace fgl
