#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "lasagne/alias.hpp"
#include "lasagne/appr.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace lasagne;

namespace {

// Reconstruct the exact distribution a finished table encodes: slot i is hit
// with probability 1/k, accepted with prob[i], otherwise diverted to alias[i].
std::map<NodeId, double> table_distribution(const AliasTable& t) {
    std::map<NodeId, double> dist;
    const double slot = 1.0 / static_cast<double>(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        dist[t.support()[i]] += slot * t.prob()[i];
        dist[t.support()[t.alias()[i]]] += slot * (1.0 - t.prob()[i]);
    }
    return dist;
}

} // namespace

TEST_CASE("table encodes the input distribution exactly") {
    const std::vector<NodeId> support = {3, 7, 9, 12, 40};
    const std::vector<double> weights = {0.4, 0.1, 0.25, 0.05, 0.2};
    const auto t = AliasTable::from_weights(support, weights);
    REQUIRE(t.size() == 5);
    const auto dist = table_distribution(t);
    for (std::size_t i = 0; i < support.size(); ++i)
        CHECK(dist.at(support[i]) == doctest::Approx(weights[i]).epsilon(1e-12));
}

TEST_CASE("unnormalized and skewed weights are handled") {
    const std::vector<NodeId> support = {0, 1, 2};
    const std::vector<double> weights = {1e-9, 5.0, 1.0};
    const double total = 1e-9 + 5.0 + 1.0;
    const auto dist = table_distribution(AliasTable::from_weights(support, weights));
    for (std::size_t i = 0; i < support.size(); ++i)
        CHECK(dist.at(support[i]) == doctest::Approx(weights[i] / total).epsilon(1e-9));
}

TEST_CASE("singleton support always returns its node") {
    const auto t = AliasTable::from_weights({42}, {3.0});
    auto rng = Rng::stream(1, 0, 0);
    for (int i = 0; i < 50; ++i) CHECK(t.sample(rng) == 42);
}

TEST_CASE("invalid weights are rejected") {
    CHECK_THROWS_AS(AliasTable::from_weights({}, {}), DataError);
    CHECK_THROWS_AS(AliasTable::from_weights({0, 1}, {1.0}), DataError);
    CHECK_THROWS_AS(AliasTable::from_weights({0, 1}, {1.0, 0.0}), DataError);
    CHECK_THROWS_AS(AliasTable::from_weights({0, 1}, {1.0, -2.0}), DataError);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(AliasTable::from_weights({0, 1}, {1.0, inf}), DataError);
}

TEST_CASE("tables built from APPR vectors reproduce the masses") {
    const auto g = testgraphs::two_triangles_bridge();
    ApprConfig cfg;
    cfg.delta = 1e-5;
    for (NodeId s = 0; s < g.num_nodes(); ++s) {
        const auto v = compute_appr(g, s, cfg);
        const auto t = build_alias(v);
        CHECK(t.seed() == s);
        REQUIRE(t.size() == v.entries.size());
        const auto dist = table_distribution(t);
        const double total = v.total_mass();
        for (const auto& [node, mass] : v.entries)
            CHECK(dist.at(node) == doctest::Approx(mass / total).epsilon(1e-12));
    }
}

TEST_CASE("empirical frequencies pass a chi-square flatness check") {
    // Frozen seed; the statistic is deterministic.
    const std::vector<NodeId> support = {0, 1, 2, 3, 4, 5, 6, 7};
    const std::vector<double> weights = {8, 1, 4, 2, 6, 3, 5, 7};
    const auto t = AliasTable::from_weights(support, weights);
    auto rng = Rng::stream(1234, 0xa1, 0);

    const int draws = 720000;
    std::vector<double> counts(support.size(), 0.0);
    for (int i = 0; i < draws; ++i) counts[t.sample(rng)] += 1;

    double wsum = 0;
    for (double w : weights) wsum += w;
    double stat = 0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        const double expected = draws * weights[i] / wsum;
        stat += (counts[i] - expected) * (counts[i] - expected) / expected;
    }
    CHECK(oracles::chi_squared_pvalue(stat, static_cast<double>(support.size() - 1)) > 1e-3);
}

TEST_CASE("batch sampling matches elementwise draws") {
    const auto t = AliasTable::from_weights({0, 1, 2}, {1, 2, 3});
    auto r1 = Rng::stream(7, 1, 2);
    auto r2 = Rng::stream(7, 1, 2);
    const auto batch = sample(t, 100, r1);
    REQUIRE(batch.size() == 100);
    for (NodeId v : batch) CHECK(v == t.sample(r2));
}
