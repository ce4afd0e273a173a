#pragma once

#include <cstdint>
#include <vector>

#include "lasagne/appr.hpp"
#include "lasagne/common.hpp"
#include "lasagne/rng.hpp"

namespace lasagne {

// Walker/Vose alias table: O(k) construction, O(1) draws.
class AliasTable {
public:
    static AliasTable from_weights(std::vector<NodeId> support, const std::vector<double>& weights);
    static AliasTable from_appr(const ApprVector& v);

    NodeId sample(Rng& rng) const {
        const auto i = rng.below(static_cast<std::uint32_t>(prob_.size()));
        return rng.uniform01() < prob_[i] ? support_[i] : support_[alias_[i]];
    }

    std::size_t size() const { return support_.size(); }
    NodeId seed() const { return seed_; }
    const std::vector<NodeId>& support() const { return support_; }
    const std::vector<double>& prob() const { return prob_; }
    const std::vector<std::uint32_t>& alias() const { return alias_; }

private:
    NodeId seed_ = kInvalidNode;
    std::vector<NodeId> support_;
    std::vector<double> prob_;        // acceptance probability per slot
    std::vector<std::uint32_t> alias_; // fallback slot index
};

inline AliasTable build_alias(const ApprVector& v) { return AliasTable::from_appr(v); }

std::vector<NodeId> sample(const AliasTable& t, std::size_t n, Rng& rng);

} // namespace lasagne
