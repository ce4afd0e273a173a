#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

#include "lasagne/appr.hpp"
#include "lasagne/graph.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace lasagne;

namespace {

Eigen::VectorXd dense_p(const ApprVector& v, NodeId n) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    for (const auto& [node, mass] : v.entries) p[node] = mass;
    return p;
}

} // namespace

TEST_CASE("config validation and derived constants") {
    ApprConfig cfg;
    cfg.alpha = 0.2;
    CHECK(cfg.beta() == doctest::Approx(1.0 / 3.0));
    cfg.delta = 1e-3;
    CHECK(cfg.push_budget() == 1000);
    cfg.delta = 3e-3;
    CHECK(cfg.push_budget() == 334);

    for (double bad : {0.0, 1.0, -0.5, 1.5}) {
        ApprConfig c;
        c.alpha = bad;
        CHECK_THROWS_AS(c.validate(), DataError);
        c = ApprConfig{};
        c.delta = bad;
        CHECK_THROWS_AS(c.validate(), DataError);
    }
}

TEST_CASE("push iterates satisfy the dense fixed-point identity") {
    // Whatever the stopping point, p plus the PPR of the residual must equal
    // the PPR of the seed indicator, and p must lower-bound the truth.
    const std::vector<CsrGraph> graphs = [] {
        std::vector<CsrGraph> gs;
        gs.push_back(testgraphs::path_graph(8));
        gs.push_back(testgraphs::cycle_graph(5));
        gs.push_back(testgraphs::two_triangles_bridge());
        gs.push_back(testgraphs::star_graph(6));
        gs.push_back(testgraphs::erdos_renyi(30, 0.2, 3));
        return gs;
    }();

    ApprConfig cfg;
    cfg.alpha = 0.2;
    cfg.delta = 1e-4;
    cfg.skip_seed_replacement = true;

    for (const auto& g : graphs) {
        ApprWorkspace ws;
        for (NodeId s = 0; s < g.num_nodes(); ++s) {
            if (g.degree(s) == 0) continue;
            std::vector<double> final_r;
            const auto v = compute_appr(g, s, cfg, &ws,
                                        [&](const std::vector<double>&,
                                            const std::vector<double>& r) { final_r = r; });
            REQUIRE_FALSE(final_r.empty());

            Eigen::VectorXd r_vec = Eigen::VectorXd::Zero(g.num_nodes());
            for (NodeId u = 0; u < g.num_nodes(); ++u) r_vec[u] = final_r[u];
            const Eigen::VectorXd truth = exact_ppr(g, s, cfg.beta());
            const Eigen::VectorXd reconstructed =
                dense_p(v, g.num_nodes()) + exact_ppr_dist(g, r_vec, cfg.beta());
            CHECK((reconstructed - truth).lpNorm<Eigen::Infinity>() <= 1e-8);

            const auto p = dense_p(v, g.num_nodes());
            for (NodeId u = 0; u < g.num_nodes(); ++u) CHECK(p[u] <= truth[u] + 1e-12);
        }
    }
}

TEST_CASE("probability mass is conserved after every push") {
    const auto g = testgraphs::erdos_renyi(40, 0.15, 11);
    ApprConfig cfg;
    cfg.skip_seed_replacement = true;
    for (NodeId s = 0; s < g.num_nodes(); s += 7) {
        if (g.degree(s) == 0) continue;
        std::size_t calls = 0;
        const auto v = compute_appr(g, s, cfg, nullptr,
                                    [&](const std::vector<double>& p, const std::vector<double>& r) {
                                        double total = 0;
                                        for (double x : p) total += x;
                                        for (double x : r) total += x;
                                        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
                                        ++calls;
                                    });
        CHECK(calls == v.num_pushes);
        CHECK(v.total_mass() + v.residual_l1 == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("exact solver agrees with power iteration") {
    const auto g = testgraphs::erdos_renyi(25, 0.2, 17);
    const double beta = 1.0 / 3.0;
    for (NodeId s : {NodeId(0), NodeId(5), NodeId(12)}) {
        if (g.degree(s) == 0) continue;
        const auto direct = exact_ppr(g, s, beta);
        const auto iterated = oracles::ppr_power_iteration(g, s, beta);
        for (NodeId u = 0; u < g.num_nodes(); ++u)
            CHECK(direct[u] == doctest::Approx(iterated[u]).epsilon(1e-9));
    }
}

TEST_CASE("seed mass is replaced by the best non-seed mass") {
    const auto g = testgraphs::two_triangles_bridge();
    ApprConfig raw;
    raw.skip_seed_replacement = true;
    const auto v_raw = compute_appr(g, 0, raw);

    ApprConfig cfg;
    const auto v = compute_appr(g, 0, cfg);
    double best = 0;
    for (const auto& [node, mass] : v.entries)
        if (node != 0) best = std::max(best, mass);
    CHECK(v.mass(0) == best);
    CHECK(v.seed_mass_pre_replacement == v_raw.mass(0));
    CHECK(v.seed_mass_pre_replacement > best); // the seed dominates its own PPR
}

TEST_CASE("non-seed push count respects the stopping budget") {
    const auto g = testgraphs::preferential_attachment(300, 3, 5);
    for (double delta : {1e-2, 1e-3}) {
        ApprConfig cfg;
        cfg.delta = delta;
        const auto batch = compute_all_appr(g, cfg);
        for (const auto& v : batch.vectors)
            CHECK(v.num_pushes - v.num_seed_pushes <= cfg.push_budget());
    }
}

TEST_CASE("clique masses are symmetric up to the residual") {
    const auto g = testgraphs::complete_graph(4);
    ApprConfig cfg;
    cfg.delta = 1e-7;
    cfg.skip_seed_replacement = true;
    const auto v = compute_appr(g, 0, cfg);
    std::vector<double> nonseed;
    for (const auto& [node, mass] : v.entries)
        if (node != 0) nonseed.push_back(mass);
    REQUIRE(nonseed.size() == 3);
    for (double m : nonseed)
        for (double m2 : nonseed) CHECK(std::abs(m - m2) <= 2 * v.residual_l1 + 1e-15);

    const auto truth = exact_ppr(g, 0, cfg.beta());
    for (const auto& [node, mass] : v.entries)
        if (node != 0) CHECK(mass == doctest::Approx(truth[node]).epsilon(1e-3));
}

TEST_CASE("sidecar file round trips exactly") {
    auto rng = Rng::stream(23, 0xe5, 0);
    // Edges only among 0..24, so node 25 stays isolated.
    const auto g = CsrGraph::from_edges(26, testgraphs::erdos_renyi_edges(25, 0.2, rng));
    REQUIRE(g.degree(25) == 0);

    ApprConfig cfg;
    cfg.alpha = 0.25;
    cfg.delta = 1e-3;
    const auto batch = compute_all_appr(g, cfg);
    REQUIRE_FALSE(batch.vectors.empty());
    REQUIRE(std::find(batch.skipped.begin(), batch.skipped.end(), NodeId(25)) !=
            batch.skipped.end());

    const auto path = std::filesystem::temp_directory_path() / "lasagne_t_appr_roundtrip.txt";
    save_appr(path.string(), batch, cfg, g);
    const auto file = load_appr(path.string(), g);
    std::filesystem::remove(path);

    CHECK(file.alpha == cfg.alpha);
    CHECK(file.delta == cfg.delta);
    CHECK(file.num_nodes == g.num_nodes());
    CHECK(file.batch.skipped == batch.skipped);
    REQUIRE(file.batch.vectors.size() == batch.vectors.size());
    for (std::size_t i = 0; i < batch.vectors.size(); ++i) {
        const auto& a = batch.vectors[i];
        const auto& b = file.batch.vectors[i];
        CHECK(a.seed == b.seed);
        CHECK(a.residual_l1 == b.residual_l1);
        CHECK(a.num_pushes == b.num_pushes);
        CHECK(a.num_seed_pushes == b.num_seed_pushes);
        CHECK(a.seed_mass_pre_replacement == b.seed_mass_pre_replacement);
        REQUIRE(a.entries.size() == b.entries.size());
        for (std::size_t k = 0; k < a.entries.size(); ++k) {
            CHECK(a.entries[k].first == b.entries[k].first);
            CHECK(a.entries[k].second == b.entries[k].second); // bitwise, %.17g round trip
        }
    }
}

TEST_CASE("batch results do not depend on the thread count") {
    const auto g = testgraphs::preferential_attachment(200, 2, 9);
    ApprConfig cfg;
    const auto serial = compute_all_appr(g, cfg, 1);
    const auto parallel = compute_all_appr(g, cfg, 3);
    REQUIRE(serial.vectors.size() == parallel.vectors.size());
    for (std::size_t i = 0; i < serial.vectors.size(); ++i) {
        CHECK(serial.vectors[i].seed == parallel.vectors[i].seed);
        REQUIRE(serial.vectors[i].entries.size() == parallel.vectors[i].entries.size());
        for (std::size_t k = 0; k < serial.vectors[i].entries.size(); ++k) {
            CHECK(serial.vectors[i].entries[k].first == parallel.vectors[i].entries[k].first);
            CHECK(serial.vectors[i].entries[k].second == parallel.vectors[i].entries[k].second);
        }
    }
    for (std::size_t i = 0; i + 1 < serial.vectors.size(); ++i)
        CHECK(serial.vectors[i].seed < serial.vectors[i + 1].seed);
}

TEST_CASE("isolated and out-of-range seeds are rejected") {
    const auto g = CsrGraph::from_edges(3, {{0, 1}});
    ApprConfig cfg;
    CHECK_THROWS_AS(compute_appr(g, 2, cfg), DataError);
    CHECK_THROWS_AS(compute_appr(g, 7, cfg), DataError);

    const auto batch = compute_all_appr(g, cfg);
    CHECK(batch.vectors.size() == 2);
    REQUIRE(batch.skipped.size() == 1);
    CHECK(batch.skipped[0] == 2);
}

TEST_CASE("mass lookup on sparse entries") {
    const auto g = testgraphs::path_graph(30);
    ApprConfig cfg;
    cfg.delta = 1e-2;
    const auto v = compute_appr(g, 0, cfg);
    double total = 0;
    for (const auto& [node, mass] : v.entries) {
        CHECK(v.mass(node) == mass);
        total += mass;
    }
    CHECK(v.total_mass() == doctest::Approx(total));
    CHECK(v.mass(29) == 0.0); // far end untouched at this delta
}
