#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lasagne/alias.hpp"
#include "lasagne/appr.hpp"
#include "lasagne/common.hpp"
#include "lasagne/graph.hpp"
#include "lasagne/rng.hpp"

namespace lasagne {

template <typename Scalar>
struct EmbeddingMatrix {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    Mat input_vecs;   // the embedding representation, returned to the user
    Mat context_vecs; // discarded after training

    Eigen::Index num_nodes() const { return input_vecs.rows(); }
    Eigen::Index dim() const { return input_vecs.cols(); }

    // word2vec-style init: inputs uniform in (-0.5/d, 0.5/d), contexts zero.
    static EmbeddingMatrix init(Eigen::Index n, Eigen::Index d, Rng& rng) {
        EmbeddingMatrix m;
        m.input_vecs.resize(n, d);
        m.context_vecs = Mat::Zero(n, d);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < d; ++j)
                m.input_vecs(i, j) = static_cast<Scalar>((rng.uniform01() - 0.5) / static_cast<double>(d));
        return m;
    }

    bool all_finite() const { return input_vecs.allFinite() && context_vecs.allFinite(); }
};

struct TrainConfig {
    int dim = 128;
    double alpha = 0.2; // forwarded to the APPR stage by the CLI
    double delta = 1e-4;
    int negatives_k = 5;
    std::uint64_t batch_size = 0;  // 0: 10 * |V|
    std::uint64_t max_batches = 0; // 0: training_budget / batch_size
    double lr_initial = 0.025;
    double lr_final = 1e-4;
    double noise_exponent = 0.75; // 0 selects the uniform noise distribution
    std::uint64_t rng_seed = 1;
    int threads = 1; // >1 trains lock-free and nondeterministically

    bool convergence_check = false; // plateau detector on top of the batch budget
    double plateau_rel_tol = 1e-4;
    int plateau_window = 50;

    // Walk-equivalent budget parameters feeding the default max_batches.
    int budget_walk_len = 80;
    int budget_walks_per_node = 10;
    int budget_window = 10;

    void validate() const {
        if (dim < 1) throw DataError("dim must be >= 1");
        if (negatives_k < 1) throw DataError("negatives_k must be >= 1");
        if (!(lr_initial >= lr_final && lr_final > 0)) throw DataError("need lr_initial >= lr_final > 0");
        if (noise_exponent < 0) throw DataError("noise_exponent must be >= 0");
        if (threads < 1) throw DataError("threads must be >= 1");
    }
};

// Expected number of (center, context) pairs the uniform-walk scheme would
// generate: per node, walk_len*walks_per_node*2*E[U(1,w)] minus the
// boundary-clipping correction 2*sum_{i=1..w} E[U(1,i)].
inline std::uint64_t training_budget(std::uint64_t num_nodes, int walk_len, int walks_per_node,
                                     int window) {
    if (walk_len < 1 || walks_per_node < 1 || window < 1)
        throw DataError("training_budget: all parameters must be >= 1");
    const auto g = static_cast<std::int64_t>(walk_len);
    const auto r = static_cast<std::int64_t>(walks_per_node);
    const auto w = static_cast<std::int64_t>(window);
    const std::int64_t per_node = g * r * (w + 1) - w * (w + 3) / 2;
    return num_nodes * static_cast<std::uint64_t>(std::max<std::int64_t>(per_node, 0));
}

struct TrainingBatch {
    std::vector<std::pair<NodeId, NodeId>> pairs; // (seed, sampled neighbor), permuted
};

// Owns one rng stream per sampler plus one for the batch permutation, so the
// pair sequence is independent of thread scheduling.
class BatchRng {
public:
    BatchRng(std::uint64_t seed, const std::vector<AliasTable>& samplers)
        : permute_rng_(Rng::stream(seed, 0x9e1c, 0)) {
        streams_.reserve(samplers.size());
        for (const auto& s : samplers) streams_.push_back(Rng::stream(seed, 0x5a3d, s.seed()));
    }

    Rng& sampler_stream(std::size_t i) { return streams_[i]; }
    Rng& permute_stream() { return permute_rng_; }

private:
    std::vector<Rng> streams_;
    Rng permute_rng_;
};

inline TrainingBatch generate_batch(const std::vector<AliasTable>& samplers,
                                    std::uint64_t batch_size, BatchRng& rng) {
    if (samplers.empty()) throw DataError("generate_batch: no samplers");
    if (batch_size < samplers.size())
        throw DataError("generate_batch: batch_size smaller than the sampler count");
    const std::uint64_t per_seed = batch_size / samplers.size();

    TrainingBatch batch;
    batch.pairs.reserve(per_seed * samplers.size());
    for (std::size_t i = 0; i < samplers.size(); ++i) {
        auto& stream = rng.sampler_stream(i);
        const NodeId seed = samplers[i].seed();
        for (std::uint64_t k = 0; k < per_seed; ++k)
            batch.pairs.emplace_back(seed, samplers[i].sample(stream));
    }
    // Fisher-Yates with the dedicated permutation stream.
    auto& prng = rng.permute_stream();
    for (std::size_t i = batch.pairs.size(); i > 1; --i)
        std::swap(batch.pairs[i - 1], batch.pairs[prng.below(static_cast<std::uint32_t>(i))]);
    return batch;
}

// Noise distribution for negative sampling, mass proportional to
// degree^exponent; exponent 0 gives the uniform distribution over all nodes.
inline AliasTable noise_distribution(const CsrGraph& g, double exponent) {
    std::vector<NodeId> support;
    std::vector<double> weights;
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        if (exponent == 0.0) {
            support.push_back(u);
            weights.push_back(1.0);
        } else if (g.degree(u) > 0) {
            support.push_back(u);
            weights.push_back(std::pow(static_cast<double>(g.degree(u)), exponent));
        }
    }
    return AliasTable::from_weights(std::move(support), weights);
}

namespace detail {

template <typename Scalar>
Scalar log_sigmoid(Scalar x) {
    if (x >= 0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
    if (x >= 0) return Scalar(1) / (Scalar(1) + std::exp(-x));
    const Scalar e = std::exp(x);
    return e / (Scalar(1) + e);
}

} // namespace detail

// One gradient-ascent step on L = log s(in_seed . ctx_pos) + sum_j log s(-in_seed . ctx_j).
// Context rows update with the pre-step seed vector and the seed with the
// pre-step context rows, so the step equals plain SGD at the current point.
// Returns -L evaluated before the update.
template <typename Scalar>
Scalar sgns_step(EmbeddingMatrix<Scalar>& emb, std::pair<NodeId, NodeId> pair,
                 std::span<const NodeId> negatives, Scalar lr) {
    auto seed_row = emb.input_vecs.row(pair.first);
    using RowVec = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
    RowVec seed_grad = RowVec::Zero(emb.dim());

    Scalar neg_loss = 0;
    {
        auto ctx = emb.context_vecs.row(pair.second);
        const Scalar score = seed_row.dot(ctx);
        neg_loss -= detail::log_sigmoid(score);
        const Scalar coef = lr * (Scalar(1) - detail::sigmoid(score));
        seed_grad += coef * ctx;
        ctx += coef * seed_row;
    }
    for (NodeId j : negatives) {
        auto ctx = emb.context_vecs.row(j);
        const Scalar score = seed_row.dot(ctx);
        neg_loss -= detail::log_sigmoid(-score);
        const Scalar coef = -lr * detail::sigmoid(score);
        seed_grad += coef * ctx;
        ctx += coef * seed_row;
    }
    seed_row += seed_grad;

    if (!std::isfinite(neg_loss))
        throw NumericalError("sgns_step: non-finite loss at seed " +
                             std::to_string(pair.first));
    return neg_loss;
}

// Loss of a pair without updating anything, for held-out monitoring.
template <typename Scalar>
Scalar sgns_pair_loss(const EmbeddingMatrix<Scalar>& emb, std::pair<NodeId, NodeId> pair,
                      std::span<const NodeId> negatives) {
    auto seed_row = emb.input_vecs.row(pair.first);
    Scalar neg_loss = -detail::log_sigmoid(seed_row.dot(emb.context_vecs.row(pair.second)));
    for (NodeId j : negatives) neg_loss -= detail::log_sigmoid(-seed_row.dot(emb.context_vecs.row(j)));
    return neg_loss;
}

struct TrainLog {
    std::vector<double> batch_mean_loss;
    std::uint64_t batches_run = 0;
    std::uint64_t steps = 0;
    bool stopped_on_plateau = false;
};

template <typename Scalar>
EmbeddingMatrix<Scalar> train(const CsrGraph& g, const std::vector<ApprVector>& apprs,
                              const TrainConfig& cfg, TrainLog* log = nullptr) {
    cfg.validate();
    if (apprs.empty()) throw DataError("train: no APPR vectors");

    std::vector<AliasTable> samplers;
    samplers.reserve(apprs.size());
    for (const auto& v : apprs) samplers.push_back(build_alias(v));

    const std::uint64_t batch_size = cfg.batch_size ? cfg.batch_size : 10ull * g.num_nodes();
    if (batch_size < samplers.size()) throw DataError("train: batch_size smaller than the sampler count");
    const std::uint64_t per_seed = batch_size / samplers.size();
    std::uint64_t max_batches = cfg.max_batches;
    if (max_batches == 0) {
        const auto budget = training_budget(g.num_nodes(), cfg.budget_walk_len,
                                            cfg.budget_walks_per_node, cfg.budget_window);
        max_batches = budget / batch_size;
        if (max_batches == 0)
            throw DataError("train: training budget smaller than one batch");
    }
    const std::uint64_t total_steps = max_batches * per_seed * samplers.size();

    auto init_rng = Rng::stream(cfg.rng_seed, 0x1417, 0);
    auto emb = EmbeddingMatrix<Scalar>::init(g.num_nodes(), cfg.dim, init_rng);
    const AliasTable noise = noise_distribution(g, cfg.noise_exponent);
    BatchRng batch_rng(cfg.rng_seed, samplers);

    const double lr0 = cfg.lr_initial, lr1 = cfg.lr_final;
    auto lr_at = [&](std::uint64_t step) {
        const double t = static_cast<double>(step) / static_cast<double>(total_steps);
        return lr0 + (lr1 - lr0) * t;
    };

    std::vector<Rng> neg_rngs;
    for (int t = 0; t < cfg.threads; ++t) neg_rngs.push_back(Rng::stream(cfg.rng_seed, 0x7e6a, t));

    std::uint64_t step = 0;
    std::vector<double> window_losses;
    double prev_window_avg = -1.0;

    auto run_range = [&](const TrainingBatch& batch, std::size_t begin, std::size_t end,
                         std::uint64_t step_base, Rng& neg_rng, double& loss_acc) {
        std::vector<NodeId> negs(cfg.negatives_k);
        for (std::size_t i = begin; i < end; ++i) {
            const auto& pr = batch.pairs[i];
            for (int k = 0; k < cfg.negatives_k; ++k) {
                NodeId cand = noise.sample(neg_rng);
                if (cand == pr.second) cand = noise.sample(neg_rng); // resample once, then accept
                negs[k] = cand;
            }
            const auto lr = static_cast<Scalar>(lr_at(step_base + i));
            loss_acc += sgns_step(emb, pr, std::span<const NodeId>(negs), lr);
        }
    };

    for (std::uint64_t b = 0; b < max_batches; ++b) {
        TrainingBatch batch = generate_batch(samplers, batch_size, batch_rng);
        double batch_loss = 0;
        if (cfg.threads == 1) {
            run_range(batch, 0, batch.pairs.size(), step, neg_rngs[0], batch_loss);
        } else {
            const std::size_t nt = cfg.threads;
            std::vector<std::thread> pool;
            std::vector<double> losses(nt, 0.0);
            const std::size_t chunk = (batch.pairs.size() + nt - 1) / nt;
            for (std::size_t t = 0; t < nt; ++t) {
                const std::size_t lo = t * chunk, hi = std::min(batch.pairs.size(), lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back([&, t, lo, hi] {
                    run_range(batch, lo, hi, step, neg_rngs[t], losses[t]);
                });
            }
            for (auto& th : pool) th.join();
            for (double l : losses) batch_loss += l;
        }
        step += batch.pairs.size();

        const double mean_loss = batch_loss / static_cast<double>(batch.pairs.size());
        if (!std::isfinite(mean_loss))
            throw NumericalError("train: non-finite mean loss in batch " + std::to_string(b));
        if (log) log->batch_mean_loss.push_back(mean_loss);

        if (cfg.convergence_check) {
            window_losses.push_back(mean_loss);
            if (window_losses.size() > static_cast<std::size_t>(cfg.plateau_window))
                window_losses.erase(window_losses.begin());
            if (window_losses.size() == static_cast<std::size_t>(cfg.plateau_window)) {
                double avg = 0;
                for (double l : window_losses) avg += l;
                avg /= static_cast<double>(window_losses.size());
                if (prev_window_avg > 0 &&
                    std::abs(avg - prev_window_avg) < cfg.plateau_rel_tol * prev_window_avg) {
                    if (log) {
                        log->stopped_on_plateau = true;
                        log->batches_run = b + 1;
                        log->steps = step;
                    }
                    return emb;
                }
                prev_window_avg = avg;
            }
        }
        if (log) {
            log->batches_run = b + 1;
            log->steps = step;
        }
    }
    return emb;
}

// Single pass over an externally generated pair corpus (walk baseline).
template <typename Scalar>
EmbeddingMatrix<Scalar> train_on_pairs(const CsrGraph& g,
                                       std::vector<std::pair<NodeId, NodeId>> pairs,
                                       const TrainConfig& cfg, TrainLog* log = nullptr) {
    cfg.validate();
    if (pairs.empty()) throw DataError("train_on_pairs: empty pair corpus");

    auto shuffle_rng = Rng::stream(cfg.rng_seed, 0x9e1c, 1);
    for (std::size_t i = pairs.size(); i > 1; --i)
        std::swap(pairs[i - 1], pairs[shuffle_rng.below(static_cast<std::uint32_t>(i))]);

    auto init_rng = Rng::stream(cfg.rng_seed, 0x1417, 0);
    auto emb = EmbeddingMatrix<Scalar>::init(g.num_nodes(), cfg.dim, init_rng);
    const AliasTable noise = noise_distribution(g, cfg.noise_exponent);
    auto neg_rng = Rng::stream(cfg.rng_seed, 0x7e6a, 0);

    const auto total = static_cast<double>(pairs.size());
    std::vector<NodeId> negs(cfg.negatives_k);
    double loss_acc = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        for (int k = 0; k < cfg.negatives_k; ++k) {
            NodeId cand = noise.sample(neg_rng);
            if (cand == pairs[i].second) cand = noise.sample(neg_rng);
            negs[k] = cand;
        }
        const auto lr = static_cast<Scalar>(cfg.lr_initial +
                                            (cfg.lr_final - cfg.lr_initial) * (static_cast<double>(i) / total));
        loss_acc += sgns_step(emb, pairs[i], std::span<const NodeId>(negs), lr);
    }
    if (log) {
        log->steps = pairs.size();
        log->batches_run = 1;
        log->batch_mean_loss.push_back(loss_acc / total);
    }
    return emb;
}

void save_embeddings(const std::string& path, const Eigen::MatrixXd& emb, const CsrGraph& g,
                     bool binary = false);
Eigen::MatrixXd load_embeddings(const std::string& path, const CsrGraph& g);

template <typename Scalar>
void save_embeddings(const std::string& path, const EmbeddingMatrix<Scalar>& emb,
                     const CsrGraph& g, bool binary = false) {
    save_embeddings(path, emb.input_vecs.template cast<double>().eval(), g, binary);
}

} // namespace lasagne
