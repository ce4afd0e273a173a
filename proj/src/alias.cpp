#include "lasagne/alias.hpp"

#include <cmath>

namespace lasagne {

AliasTable AliasTable::from_weights(std::vector<NodeId> support,
                                    const std::vector<double>& weights) {
    if (support.empty()) throw DataError("alias table: empty support");
    if (support.size() != weights.size())
        throw DataError("alias table: support/weight length mismatch");

    const std::size_t k = support.size();
    double total = 0;
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w))
            throw DataError("alias table: weights must be positive and finite");
        total += w;
    }

    AliasTable t;
    t.support_ = std::move(support);
    t.prob_.assign(k, 0.0);
    t.alias_.assign(k, 0);

    // Scaled weights average to 1; pair each underfull slot with an overfull one.
    std::vector<double> scaled(k);
    for (std::size_t i = 0; i < k; ++i) scaled[i] = weights[i] * static_cast<double>(k) / total;

    std::vector<std::uint32_t> small, large;
    small.reserve(k);
    large.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (scaled[i] < 1.0)
            small.push_back(static_cast<std::uint32_t>(i));
        else
            large.push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        const auto s = small.back();
        const auto l = large.back();
        small.pop_back();
        large.pop_back();
        t.prob_[s] = scaled[s];
        t.alias_[s] = l;
        scaled[l] -= 1.0 - scaled[s];
        if (scaled[l] < 1.0)
            small.push_back(l);
        else
            large.push_back(l);
    }
    for (auto l : large) t.prob_[l] = 1.0;
    for (auto s : small) t.prob_[s] = 1.0; // leftover of rounding, mass already correct
    return t;
}

AliasTable AliasTable::from_appr(const ApprVector& v) {
    std::vector<NodeId> support;
    std::vector<double> weights;
    support.reserve(v.entries.size());
    weights.reserve(v.entries.size());
    for (const auto& [node, mass] : v.entries) {
        support.push_back(node);
        weights.push_back(mass);
    }
    auto t = from_weights(std::move(support), weights);
    t.seed_ = v.seed;
    return t;
}

std::vector<NodeId> sample(const AliasTable& t, std::size_t n, Rng& rng) {
    std::vector<NodeId> out(n);
    for (auto& x : out) x = t.sample(rng);
    return out;
}

} // namespace lasagne
