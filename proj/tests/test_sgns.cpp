#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "lasagne/appr.hpp"
#include "lasagne/sgns.hpp"
#include "lasagne/walks.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace lasagne;

namespace {

double cosine(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
    return a.dot(b) / (a.norm() * b.norm());
}

} // namespace

TEST_CASE("training budget formula") {
    CHECK(training_budget(1, 80, 10, 10) == 8735);
    CHECK(training_budget(3890, 80, 10, 10) == 33979150ULL);
    CHECK(training_budget(100, 1, 1, 1) == 0); // boundary correction eats the whole budget
    CHECK(training_budget(2, 5, 3, 2) == 2 * (5 * 3 * 3 - 5));
    CHECK_THROWS_AS(training_budget(10, 0, 1, 1), DataError);
    CHECK_THROWS_AS(training_budget(10, 1, 1, 0), DataError);
}

TEST_CASE("batches give every seed an equal quota from its own distribution") {
    const auto g = testgraphs::two_triangles_bridge();
    ApprConfig acfg;
    acfg.delta = 1e-3;
    const auto appr = compute_all_appr(g, acfg);
    std::vector<AliasTable> samplers;
    std::map<NodeId, std::set<NodeId>> support;
    for (const auto& v : appr.vectors) {
        samplers.push_back(build_alias(v));
        for (const auto& [node, mass] : v.entries) support[v.seed].insert(node);
    }

    BatchRng rng(5, samplers);
    const auto batch = generate_batch(samplers, 20, rng);
    CHECK(batch.pairs.size() == 18); // floor(20/6) pairs for each of the 6 seeds

    std::map<NodeId, int> quota;
    for (const auto& [seed, ctx] : batch.pairs) {
        quota[seed] += 1;
        CHECK(support.at(seed).count(ctx) == 1); // contexts only from the seed's own vector
    }
    for (const auto& [seed, count] : quota) CHECK(count == 3);

    // Same construction, fresh streams: identical batch including permutation.
    BatchRng rng2(5, samplers);
    CHECK(generate_batch(samplers, 20, rng2).pairs == batch.pairs);

    // Streams advance between batches.
    CHECK(generate_batch(samplers, 20, rng).pairs != batch.pairs);

    CHECK_THROWS_AS(generate_batch(samplers, 3, rng), DataError);
}

TEST_CASE("noise distribution follows degree to the chosen exponent") {
    const auto g = CsrGraph::from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {1, 2}}); // node 4 isolated
    const auto weighted = noise_distribution(g, 0.75);
    CHECK(weighted.size() == 4); // zero-degree nodes excluded

    const auto uniform = noise_distribution(g, 0.0);
    CHECK(uniform.size() == 5); // uniform keeps every node

    auto rng = Rng::stream(3, 0, 0);
    for (int i = 0; i < 200; ++i) CHECK(weighted.sample(rng) != 4);
}

TEST_CASE("step update matches a finite-difference gradient") {
    const int d = 8;
    auto rng = Rng::stream(31, 0, 0);
    EmbeddingMatrix<double> emb;
    emb.input_vecs.resize(6, d);
    emb.context_vecs.resize(6, d);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < d; ++j) {
            emb.input_vecs(i, j) = rng.uniform01() - 0.5;
            emb.context_vecs(i, j) = 0.6 * (rng.uniform01() - 0.5);
        }

    const std::pair<NodeId, NodeId> pair{0, 2};
    const std::vector<NodeId> negs = {3, 4, 5};
    const double lr = 0.05;

    // Rows touched by the step: input 0, contexts 2,3,4,5. Everything else
    // must stay bitwise identical.
    const auto params_of = [&](const EmbeddingMatrix<double>& e) {
        std::vector<double> x;
        for (int j = 0; j < d; ++j) x.push_back(e.input_vecs(0, j));
        for (NodeId rowid : {2, 3, 4, 5})
            for (int j = 0; j < d; ++j) x.push_back(e.context_vecs(rowid, j));
        return x;
    };
    auto f = [&](const std::vector<double>& x) {
        EmbeddingMatrix<double> e = emb;
        std::size_t idx = 0;
        for (int j = 0; j < d; ++j) e.input_vecs(0, j) = x[idx++];
        for (NodeId rowid : {2, 3, 4, 5})
            for (int j = 0; j < d; ++j) e.context_vecs(rowid, j) = x[idx++];
        return static_cast<double>(
            sgns_pair_loss(e, pair, std::span<const NodeId>(negs.data(), negs.size())));
    };

    const auto x0 = params_of(emb);
    const double loss_before = f(x0);
    const auto grad = oracles::finite_difference_gradient(f, x0);

    EmbeddingMatrix<double> stepped = emb;
    const double returned =
        sgns_step(stepped, pair, std::span<const NodeId>(negs.data(), negs.size()), lr);
    CHECK(returned == doctest::Approx(loss_before).epsilon(1e-12));

    const auto x1 = params_of(stepped);
    double diff_sq = 0, expected_sq = 0;
    for (std::size_t i = 0; i < x0.size(); ++i) {
        const double expected_delta = -lr * grad[i];
        const double actual_delta = x1[i] - x0[i];
        diff_sq += (actual_delta - expected_delta) * (actual_delta - expected_delta);
        expected_sq += expected_delta * expected_delta;
    }
    REQUIRE(expected_sq > 0);
    CHECK(std::sqrt(diff_sq / expected_sq) <= 1e-4);

    // Untouched rows stay put.
    CHECK(stepped.input_vecs.row(1) == emb.input_vecs.row(1));
    CHECK(stepped.context_vecs.row(0) == emb.context_vecs.row(0));
    CHECK(stepped.context_vecs.row(1) == emb.context_vecs.row(1));
}

TEST_CASE("fresh embeddings start at the symmetric loss") {
    auto rng = Rng::stream(1, 0x1417, 0);
    const auto emb = EmbeddingMatrix<double>::init(10, 16, rng);
    const std::vector<NodeId> one_neg = {7};
    const double loss =
        sgns_pair_loss(emb, {0, 3}, std::span<const NodeId>(one_neg.data(), one_neg.size()));
    CHECK(loss == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));

    const std::vector<NodeId> five(5, 2);
    CHECK(sgns_pair_loss(emb, {1, 4}, std::span<const NodeId>(five.data(), five.size())) ==
          doctest::Approx(6.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("training separates two cliques") {
    const auto g = testgraphs::two_cliques(5);
    ApprConfig acfg;
    const auto appr = compute_all_appr(g, acfg);

    TrainConfig cfg;
    cfg.dim = 16;
    cfg.rng_seed = 3;
    TrainLog log;
    const auto emb = train<float>(g, appr.vectors, cfg, &log);
    CHECK(log.batches_run > 100);
    CHECK(log.steps == log.batches_run * 100); // batch defaults to 10|V|

    const Eigen::MatrixXd vecs = emb.input_vecs.cast<double>();
    double intra = 0, inter = 0;
    int n_intra = 0, n_inter = 0;
    for (NodeId u = 0; u < 10; ++u)
        for (NodeId v = u + 1; v < 10; ++v) {
            const double c = cosine(vecs.row(u), vecs.row(v));
            if ((u < 5) == (v < 5)) {
                intra += c;
                ++n_intra;
            } else {
                inter += c;
                ++n_inter;
            }
        }
    intra /= n_intra;
    inter /= n_inter;
    CHECK(intra > inter + 0.2);
}

TEST_CASE("training loss decreases and held-out pairs improve") {
    const auto g = testgraphs::two_cliques(6);
    ApprConfig acfg;
    const auto appr = compute_all_appr(g, acfg);

    TrainConfig cfg;
    cfg.dim = 16;
    cfg.rng_seed = 7;
    cfg.batch_size = 200;
    cfg.max_batches = 60;

    auto init_rng = Rng::stream(cfg.rng_seed, 0x1417, 0);
    const auto before = EmbeddingMatrix<float>::init(g.num_nodes(), cfg.dim, init_rng);

    TrainLog log;
    const auto after = train<float>(g, appr.vectors, cfg, &log);
    REQUIRE(log.batch_mean_loss.size() == 60);

    double first = 0, last = 0;
    for (int i = 0; i < 5; ++i) {
        first += log.batch_mean_loss[static_cast<std::size_t>(i)];
        last += log.batch_mean_loss[log.batch_mean_loss.size() - 1 - static_cast<std::size_t>(i)];
    }
    CHECK(last < first);

    // Held-out check: intra-clique pairs scored against cross-clique negatives.
    const std::vector<std::pair<NodeId, NodeId>> held = {{0, 1}, {2, 3}, {6, 7}, {8, 9}};
    double loss_before = 0, loss_after = 0;
    for (const auto& pr : held) {
        const std::vector<NodeId> negs = {static_cast<NodeId>((pr.first + 6) % 12),
                                          static_cast<NodeId>((pr.second + 6) % 12)};
        const std::span<const NodeId> span(negs.data(), negs.size());
        loss_before += sgns_pair_loss(before, pr, span);
        loss_after += sgns_pair_loss(after, pr, span);
    }
    CHECK(loss_after < loss_before);
}

TEST_CASE("training is deterministic for a fixed seed") {
    const auto g = testgraphs::karate_club().graph;
    ApprConfig acfg;
    const auto appr = compute_all_appr(g, acfg);

    TrainConfig cfg;
    cfg.dim = 8;
    cfg.batch_size = 340;
    cfg.max_batches = 10;
    cfg.rng_seed = 11;

    const auto a = train<float>(g, appr.vectors, cfg);
    const auto b = train<float>(g, appr.vectors, cfg);
    CHECK(a.input_vecs == b.input_vecs);
    CHECK(a.context_vecs == b.context_vecs);

    cfg.rng_seed = 12;
    const auto c = train<float>(g, appr.vectors, cfg);
    CHECK(a.input_vecs != c.input_vecs);
}

TEST_CASE("budget too small for one batch is an error") {
    const auto g = testgraphs::cycle_graph(5);
    ApprConfig acfg;
    const auto appr = compute_all_appr(g, acfg);
    TrainConfig cfg;
    cfg.budget_walk_len = 1;
    cfg.budget_walks_per_node = 1;
    cfg.budget_window = 1;
    CHECK_THROWS_WITH_AS(train<float>(g, appr.vectors, cfg),
                         "train: training budget smaller than one batch", DataError);

    TrainConfig tiny;
    tiny.batch_size = 2; // below the sampler count
    CHECK_THROWS_AS(train<float>(g, appr.vectors, tiny), DataError);
}

TEST_CASE("plateau detector can stop training early") {
    const auto g = testgraphs::cycle_graph(8);
    ApprConfig acfg;
    const auto appr = compute_all_appr(g, acfg);

    TrainConfig cfg;
    cfg.dim = 4;
    cfg.batch_size = 80;
    cfg.max_batches = 50;
    cfg.convergence_check = true;
    cfg.plateau_window = 2;
    cfg.plateau_rel_tol = 10.0; // everything counts as flat
    TrainLog log;
    train<float>(g, appr.vectors, cfg, &log);
    CHECK(log.stopped_on_plateau);
    CHECK(log.batches_run < 50);
}

TEST_CASE("single-pass pair training is deterministic and counts steps") {
    const auto g = testgraphs::two_cliques(4);
    WalkConfig wcfg;
    wcfg.walk_len = 12;
    wcfg.walks_per_node = 3;
    wcfg.window = 3;
    const auto pairs = walk_context_pairs(g, wcfg);
    REQUIRE_FALSE(pairs.empty());

    TrainConfig cfg;
    cfg.dim = 8;
    TrainLog log;
    const auto a = train_on_pairs<float>(g, pairs, cfg, &log);
    CHECK(log.steps == pairs.size());
    CHECK(log.batches_run == 1);

    const auto b = train_on_pairs<float>(g, pairs, cfg);
    CHECK(a.input_vecs == b.input_vecs);

    CHECK_THROWS_AS(train_on_pairs<float>(g, {}, cfg), DataError);
}
