#include "lasagne/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace lasagne {

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void shuffle_vec(std::vector<NodeId>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.below(static_cast<std::uint32_t>(i))]);
}

Eigen::MatrixXd maybe_normalize(const Eigen::MatrixXd& emb, bool normalize) {
    if (!normalize) return emb;
    Eigen::MatrixXd out = emb;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const double n = out.row(i).norm();
        if (n > 0) out.row(i) /= n;
    }
    return out;
}

double f1_of(const ClassCounts& c) {
    const double denom = static_cast<double>(2 * c.tp + c.fp + c.fn);
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / denom;
}

} // namespace

double LogRegModel::predict_proba(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    return sigmoid(decision(x));
}

LogRegModel logreg_fit(const Eigen::MatrixXd& X, const std::vector<int>& y, double l2,
                       int max_iter, double tol) {
    const Eigen::Index n = X.rows(), d = X.cols();
    if (n == 0 || static_cast<Eigen::Index>(y.size()) != n)
        throw DataError("logreg_fit: feature/label size mismatch");
    Eigen::VectorXd yv(n);
    std::uint64_t pos = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        yv(i) = y[i] ? 1.0 : 0.0;
        pos += y[i] ? 1 : 0;
    }
    if (pos == 0 || pos == static_cast<std::uint64_t>(n))
        throw DataError("logreg_fit: degenerate training set");

    const double inv_n = 1.0 / static_cast<double>(n);
    auto loss_at = [&](const Eigen::VectorXd& w) {
        Eigen::VectorXd z = (X * w.head(d)).array() + w(d);
        double loss = 0;
        for (Eigen::Index i = 0; i < n; ++i) loss += softplus(z(i)) - yv(i) * z(i);
        return loss * inv_n + 0.5 * l2 * inv_n * w.head(d).squaredNorm();
    };
    auto grad_at = [&](const Eigen::VectorXd& w, Eigen::VectorXd& g) {
        Eigen::VectorXd z = (X * w.head(d)).array() + w(d);
        Eigen::VectorXd p(n);
        for (Eigen::Index i = 0; i < n; ++i) p(i) = sigmoid(z(i));
        p -= yv;
        g.head(d) = (X.transpose() * p) * inv_n + (l2 * inv_n) * w.head(d);
        g(d) = p.sum() * inv_n;
    };

    // FISTA with backtracking and function-value restarts.
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
    Eigen::VectorXd v = w, g(d + 1), gw(d + 1), cand(d + 1);
    double t = 1.0, step = 1.0;
    double fw = loss_at(w);
    for (int iter = 0; iter < max_iter; ++iter) {
        grad_at(v, g);
        const double fv = loss_at(v);
        const double gnorm2 = g.squaredNorm();
        for (int ls = 0; ls < 60; ++ls) {
            cand = v - step * g;
            if (loss_at(cand) <= fv - 0.5 * step * gnorm2) break;
            step *= 0.5;
        }
        const double fcand = loss_at(cand);
        if (fcand > fw) { // momentum overshoot, restart from the best point
            t = 1.0;
            v = w;
            continue;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        v = cand + ((t - 1.0) / t_next) * (cand - w);
        w = cand;
        fw = fcand;
        t = t_next;
        step *= 1.1;

        grad_at(w, gw);
        if (gw.norm() <= tol) break;
    }

    LogRegModel model;
    model.weights = w;
    model.l2_penalty = l2;
    if (!model.weights.allFinite()) throw NumericalError("logreg_fit: non-finite weights");
    return model;
}

F1Scores metrics_f1(const std::vector<ClassCounts>& counts) {
    F1Scores out;
    out.per_class.reserve(counts.size());
    ClassCounts pooled;
    double sum = 0;
    for (const auto& c : counts) {
        const double f1 = f1_of(c);
        out.per_class.push_back(f1);
        sum += f1;
        pooled.tp += c.tp;
        pooled.fp += c.fp;
        pooled.fn += c.fn;
    }
    out.macro = counts.empty() ? 0.0 : sum / static_cast<double>(counts.size());
    out.micro = f1_of(pooled);
    return out;
}

double metrics_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw DataError("metrics_auc: size mismatch");
    const std::size_t n = scores.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0; // average of ranks i+1..j+1
        for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = mid;
        i = j + 1;
    }
    std::uint64_t npos = 0;
    double rank_sum = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (labels[k]) {
            ++npos;
            rank_sum += rank[k];
        }
    }
    const std::uint64_t nneg = n - npos;
    if (npos == 0 || nneg == 0) throw DataError("metrics_auc: both classes required");
    const double u = rank_sum - 0.5 * static_cast<double>(npos) * static_cast<double>(npos + 1);
    return u / (static_cast<double>(npos) * static_cast<double>(nneg));
}

EvalReport multilabel_realistic(const Eigen::MatrixXd& emb, const LabelSet& labels, int folds,
                                std::uint64_t rng_seed, double l2, bool normalize) {
    if (folds < 2) throw DataError("multilabel_realistic: folds must be >= 2");
    const auto universe = labels.labeled_nodes();
    if (universe.empty()) throw DataError("multilabel_realistic: no labeled nodes");
    const int num_classes = labels.num_classes();

    const Eigen::MatrixXd embn = maybe_normalize(emb, normalize);
    Eigen::MatrixXd Xall(universe.size(), embn.cols());
    for (std::size_t i = 0; i < universe.size(); ++i) Xall.row(i) = embn.row(universe[i]);

    EvalReport report;
    report.protocol = "realistic";
    report.num_classes = num_classes;
    report.per_class_f1.assign(num_classes, 0.0);

    std::vector<char> is_pos(universe.size());
    std::vector<std::vector<ClassCounts>> counts(num_classes,
                                                 std::vector<ClassCounts>(folds));
    std::vector<char> usable(num_classes, 0);

    for (int c = 0; c < num_classes; ++c) {
        std::vector<NodeId> pos_idx, neg_idx; // positions within universe
        for (std::size_t i = 0; i < universe.size(); ++i) {
            const auto& ls = labels.labels_of(universe[i]);
            const bool p = std::binary_search(ls.begin(), ls.end(), c);
            is_pos[i] = p;
            (p ? pos_idx : neg_idx).push_back(static_cast<NodeId>(i));
        }
        if (pos_idx.size() < static_cast<std::size_t>(folds) ||
            neg_idx.size() < static_cast<std::size_t>(folds)) {
            report.skipped_classes.push_back(c);
            continue;
        }
        usable[c] = 1;

        auto rng = Rng::stream(rng_seed, 0xf01d, static_cast<std::uint64_t>(c));
        shuffle_vec(pos_idx, rng);
        shuffle_vec(neg_idx, rng);
        std::vector<int> fold_of(universe.size());
        for (std::size_t i = 0; i < pos_idx.size(); ++i) fold_of[pos_idx[i]] = static_cast<int>(i % folds);
        for (std::size_t i = 0; i < neg_idx.size(); ++i) fold_of[neg_idx[i]] = static_cast<int>(i % folds);

        for (int f = 0; f < folds; ++f) {
            std::vector<Eigen::Index> train_rows, test_rows;
            for (std::size_t i = 0; i < universe.size(); ++i)
                (fold_of[i] == f ? test_rows : train_rows).push_back(static_cast<Eigen::Index>(i));
            Eigen::MatrixXd Xtr(train_rows.size(), Xall.cols());
            std::vector<int> ytr(train_rows.size());
            for (std::size_t i = 0; i < train_rows.size(); ++i) {
                Xtr.row(i) = Xall.row(train_rows[i]);
                ytr[i] = is_pos[train_rows[i]];
            }
            const auto model = logreg_fit(Xtr, ytr, l2);
            auto& cc = counts[c][f];
            for (auto row : test_rows) {
                const bool truth = is_pos[row];
                const bool pred = model.decision(Xall.row(row)) >= 0.0; // prob >= 0.5
                if (pred && truth)
                    ++cc.tp;
                else if (pred && !truth)
                    ++cc.fp;
                else if (!pred && truth)
                    ++cc.fn;
            }
        }
    }

    if (report.skipped_classes.size() == static_cast<std::size_t>(num_classes))
        throw DataError("multilabel_realistic: no usable classes");

    double macro_sum = 0;
    std::uint64_t usable_count = 0;
    ClassCounts global;
    for (int c = 0; c < num_classes; ++c) {
        if (!usable[c]) continue;
        ClassCounts pooled;
        for (int f = 0; f < folds; ++f) {
            pooled.tp += counts[c][f].tp;
            pooled.fp += counts[c][f].fp;
            pooled.fn += counts[c][f].fn;
        }
        report.per_class_f1[c] = f1_of(pooled);
        macro_sum += report.per_class_f1[c];
        ++usable_count;
        global.tp += pooled.tp;
        global.fp += pooled.fp;
        global.fn += pooled.fn;
    }
    report.macro_f1 = macro_sum / static_cast<double>(usable_count);
    report.micro_f1 = f1_of(global);

    for (int f = 0; f < folds; ++f) {
        double s = 0;
        ClassCounts pooled;
        for (int c = 0; c < num_classes; ++c) {
            if (!usable[c]) continue;
            s += f1_of(counts[c][f]);
            pooled.tp += counts[c][f].tp;
            pooled.fp += counts[c][f].fp;
            pooled.fn += counts[c][f].fn;
        }
        report.fold_macro_f1.push_back(s / static_cast<double>(usable_count));
        report.fold_micro_f1.push_back(f1_of(pooled));
    }

    report.config = {{"folds", std::to_string(folds)},
                     {"l2", std::to_string(l2)},
                     {"normalize", normalize ? "1" : "0"},
                     {"rng_seed", std::to_string(rng_seed)},
                     {"threshold", "0.5"}};
    return report;
}

EvalReport multilabel_former(const Eigen::MatrixXd& emb, const LabelSet& labels,
                             double train_fraction, int repetitions, std::uint64_t rng_seed,
                             double l2, bool normalize) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw DataError("multilabel_former: train_fraction must be in (0,1)");
    if (repetitions < 1) throw DataError("multilabel_former: repetitions must be >= 1");
    auto universe = labels.labeled_nodes();
    if (universe.size() < 2) throw DataError("multilabel_former: need at least 2 labeled nodes");
    const int num_classes = labels.num_classes();

    const Eigen::MatrixXd embn = maybe_normalize(emb, normalize);

    EvalReport report;
    report.protocol = "former";
    report.num_classes = num_classes;

    std::vector<ClassCounts> pooled_all(num_classes);
    std::vector<char> ever_skipped(num_classes, 0);
    double macro_acc = 0, micro_acc = 0;

    for (int rep = 0; rep < repetitions; ++rep) {
        auto rng = Rng::stream(rng_seed, 0xf04e, static_cast<std::uint64_t>(rep));
        shuffle_vec(universe, rng);
        auto train_n = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(universe.size())));
        train_n = std::clamp<std::size_t>(train_n, 1, universe.size() - 1);

        Eigen::MatrixXd Xtr(train_n, embn.cols());
        for (std::size_t i = 0; i < train_n; ++i) Xtr.row(i) = embn.row(universe[i]);
        const std::size_t test_n = universe.size() - train_n;

        std::vector<LogRegModel> models(num_classes);
        std::vector<char> trained(num_classes, 0);
        std::vector<int> ytr(train_n);
        for (int c = 0; c < num_classes; ++c) {
            std::size_t pos = 0;
            for (std::size_t i = 0; i < train_n; ++i) {
                const auto& ls = labels.labels_of(universe[i]);
                ytr[i] = std::binary_search(ls.begin(), ls.end(), c);
                pos += ytr[i];
            }
            if (pos == 0 || pos == train_n) {
                ever_skipped[c] = 1; // all-negative classifier for this repetition
                continue;
            }
            models[c] = logreg_fit(Xtr, ytr, l2);
            trained[c] = 1;
        }

        std::vector<ClassCounts> rep_counts(num_classes);
        std::vector<std::pair<double, int>> scored(num_classes);
        for (std::size_t i = 0; i < test_n; ++i) {
            const NodeId node = universe[train_n + i];
            const auto& truth = labels.labels_of(node);
            const auto k = truth.size();
            for (int c = 0; c < num_classes; ++c) {
                const double s = trained[c]
                                     ? models[c].decision(embn.row(node))
                                     : -std::numeric_limits<double>::infinity();
                scored[c] = {-s, c}; // sort ascending = score descending, ties to low class id
            }
            std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k),
                              scored.end());
            std::vector<int> predicted(k);
            for (std::size_t j = 0; j < k; ++j) predicted[j] = scored[j].second;
            std::sort(predicted.begin(), predicted.end());

            for (int c : predicted) {
                if (std::binary_search(truth.begin(), truth.end(), c))
                    ++rep_counts[c].tp;
                else
                    ++rep_counts[c].fp;
            }
            for (int c : truth)
                if (!std::binary_search(predicted.begin(), predicted.end(), c)) ++rep_counts[c].fn;
        }

        double macro_sum = 0;
        std::uint64_t present = 0;
        ClassCounts pooled;
        for (int c = 0; c < num_classes; ++c) {
            const auto& cc = rep_counts[c];
            pooled_all[c].tp += cc.tp;
            pooled_all[c].fp += cc.fp;
            pooled_all[c].fn += cc.fn;
            if (cc.tp + cc.fp + cc.fn > 0) {
                macro_sum += f1_of(cc);
                ++present;
            }
            pooled.tp += cc.tp;
            pooled.fp += cc.fp;
            pooled.fn += cc.fn;
        }
        const double rep_macro = present ? macro_sum / static_cast<double>(present) : 0.0;
        const double rep_micro = f1_of(pooled);
        report.fold_macro_f1.push_back(rep_macro);
        report.fold_micro_f1.push_back(rep_micro);
        macro_acc += rep_macro;
        micro_acc += rep_micro;
    }

    report.macro_f1 = macro_acc / repetitions;
    report.micro_f1 = micro_acc / repetitions;
    report.per_class_f1.resize(num_classes);
    for (int c = 0; c < num_classes; ++c) report.per_class_f1[c] = f1_of(pooled_all[c]);
    for (int c = 0; c < num_classes; ++c)
        if (ever_skipped[c]) report.skipped_classes.push_back(c);

    report.config = {{"train_fraction", std::to_string(train_fraction)},
                     {"repetitions", std::to_string(repetitions)},
                     {"l2", std::to_string(l2)},
                     {"normalize", normalize ? "1" : "0"},
                     {"rng_seed", std::to_string(rng_seed)},
                     {"selection", "top-k with known label count"}};
    return report;
}

const char* edge_op_name(EdgeOp op) {
    switch (op) {
        case EdgeOp::Average: return "average";
        case EdgeOp::Hadamard: return "hadamard";
        case EdgeOp::L1: return "l1";
        case EdgeOp::L2: return "l2";
    }
    return "?";
}

EdgeOp edge_op_from_string(const std::string& name) {
    if (name == "average") return EdgeOp::Average;
    if (name == "hadamard") return EdgeOp::Hadamard;
    if (name == "l1") return EdgeOp::L1;
    if (name == "l2") return EdgeOp::L2;
    throw DataError("unknown edge operator: " + name);
}

Eigen::VectorXd edge_embed(const Eigen::Ref<const Eigen::VectorXd>& u_vec,
                           const Eigen::Ref<const Eigen::VectorXd>& v_vec, EdgeOp op) {
    if (u_vec.size() != v_vec.size()) throw DataError("edge_embed: dimension mismatch");
    switch (op) {
        case EdgeOp::Average: return 0.5 * (u_vec + v_vec);
        case EdgeOp::Hadamard: return u_vec.cwiseProduct(v_vec);
        case EdgeOp::L1: return (u_vec - v_vec).cwiseAbs();
        case EdgeOp::L2: return (u_vec - v_vec).cwiseAbs2();
    }
    throw DataError("edge_embed: unknown operator");
}

LinkpredSplit linkpred_split(const CsrGraph& g, double holdout, std::uint64_t rng_seed) {
    if (!(holdout > 0.0 && holdout < 1.0)) throw DataError("linkpred: holdout must be in (0,1)");

    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(g.num_edges());
    for (NodeId u = 0; u < g.num_nodes(); ++u)
        for (NodeId v : g.neighbors(u))
            if (u < v) edges.emplace_back(u, v);

    const auto total = static_cast<std::uint64_t>(edges.size());
    const auto remove_target = static_cast<std::uint64_t>(
        std::floor(holdout * static_cast<double>(total)));
    if (remove_target == 0) throw DataError("linkpred: holdout removes no edges");

    auto rng = Rng::stream(rng_seed, 0x17e0, 0);
    for (std::size_t i = edges.size(); i > 1; --i)
        std::swap(edges[i - 1], edges[rng.below(static_cast<std::uint32_t>(i))]);

    std::vector<std::uint32_t> deg(g.num_nodes());
    for (NodeId u = 0; u < g.num_nodes(); ++u) deg[u] = g.degree(u);

    LinkpredSplit split;
    std::vector<char> removed_mark(edges.size(), 0);
    bool progress = true;
    while (split.removed.size() < remove_target && progress) {
        progress = false;
        for (std::size_t i = 0; i < edges.size() && split.removed.size() < remove_target; ++i) {
            if (removed_mark[i]) continue;
            auto [u, v] = edges[i];
            if (deg[u] > 1 && deg[v] > 1) {
                removed_mark[i] = 1;
                --deg[u];
                --deg[v];
                split.removed.push_back(edges[i]);
                progress = true;
            }
        }
    }
    if (split.removed.size() < remove_target)
        throw DataError("linkpred: holdout infeasible without isolating endpoints");

    std::vector<std::pair<NodeId, NodeId>> kept;
    kept.reserve(edges.size() - split.removed.size());
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (!removed_mark[i]) kept.push_back(edges[i]);

    std::vector<std::string> ext(g.num_nodes());
    for (NodeId u = 0; u < g.num_nodes(); ++u) ext[u] = g.external_id(u);
    split.residual = CsrGraph::from_edges(g.num_nodes(), kept, std::move(ext));

    // Non-edges of the original graph, unique across both negative sets.
    auto neg_rng = Rng::stream(rng_seed, 0x17e0, 1);
    std::unordered_set<std::uint64_t> taken;
    auto draw_negatives = [&](std::size_t count, std::vector<std::pair<NodeId, NodeId>>& out) {
        std::uint64_t attempts = 0;
        const std::uint64_t max_attempts = 1000ull * (count + 16);
        while (out.size() < count) {
            if (++attempts > max_attempts)
                throw DataError("linkpred: could not sample enough non-edges");
            NodeId u = neg_rng.below(g.num_nodes());
            NodeId v = neg_rng.below(g.num_nodes());
            if (u == v) continue;
            if (u > v) std::swap(u, v);
            if (g.has_edge(u, v)) continue;
            const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
            if (!taken.insert(key).second) continue;
            out.emplace_back(u, v);
        }
    };
    draw_negatives(kept.size(), split.train_neg);
    draw_negatives(split.removed.size(), split.test_neg);
    return split;
}

KnnIndex::KnnIndex(const Eigen::MatrixXd& emb, int k) : k_(k) {
    const Eigen::Index n = emb.rows();
    if (k < 1 || k >= n) throw DataError("knn index: need 1 <= k < num rows");
    Eigen::MatrixXd Xn = emb;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double nm = Xn.row(i).norm();
        if (nm > 0) Xn.row(i) /= nm;
    }
    const auto keep = static_cast<Eigen::Index>(std::min<Eigen::Index>(n - 1, k + 2));
    lists_.resize(n);

    const Eigen::Index block = 256;
    std::vector<std::pair<double, NodeId>> cand(n);
    for (Eigen::Index lo = 0; lo < n; lo += block) {
        const Eigen::Index hi = std::min(n, lo + block);
        Eigen::MatrixXd sims = Xn.middleRows(lo, hi - lo) * Xn.transpose();
        for (Eigen::Index i = lo; i < hi; ++i) {
            for (Eigen::Index j = 0; j < n; ++j)
                cand[j] = {-sims(i - lo, j), static_cast<NodeId>(j)}; // desc sim, asc id on ties
            cand[i] = {std::numeric_limits<double>::infinity(), static_cast<NodeId>(i)};
            std::partial_sort(cand.begin(), cand.begin() + keep, cand.end());
            auto& list = lists_[i];
            list.resize(keep);
            for (Eigen::Index j = 0; j < keep; ++j) list[j] = cand[j].second;
        }
    }
}

double KnnIndex::jaccard(NodeId u, NodeId v) const {
    auto take = [this](NodeId of, NodeId excl) {
        std::vector<NodeId> out;
        out.reserve(k_);
        for (NodeId x : lists_[of]) {
            if (x == excl) continue;
            out.push_back(x);
            if (out.size() == static_cast<std::size_t>(k_)) break;
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    const auto a = take(u, v);
    const auto b = take(v, u);
    std::size_t inter = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++inter;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double jaccard_knn_score(const Eigen::MatrixXd& emb, NodeId u, NodeId v, int k) {
    return KnnIndex(emb, k).jaccard(u, v);
}

EvalReport linkpred_eval(const CsrGraph& g, const EmbedFn& embed_fn,
                         const std::vector<EdgeOp>& ops, bool include_jaccard, double holdout,
                         std::uint64_t rng_seed, int knn_k, double l2) {
    auto split = linkpred_split(g, holdout, rng_seed);
    const Eigen::MatrixXd emb = embed_fn(split.residual);
    if (emb.rows() != static_cast<Eigen::Index>(g.num_nodes()))
        throw DataError("linkpred_eval: embedding row count mismatch");

    std::vector<std::pair<NodeId, NodeId>> train_pos;
    for (NodeId u = 0; u < split.residual.num_nodes(); ++u)
        for (NodeId v : split.residual.neighbors(u))
            if (u < v) train_pos.emplace_back(u, v);

    EvalReport report;
    report.protocol = "linkpred";

    auto features = [&](const std::vector<std::pair<NodeId, NodeId>>& pairs, EdgeOp op) {
        Eigen::MatrixXd X(pairs.size(), emb.cols());
        for (std::size_t i = 0; i < pairs.size(); ++i)
            X.row(i) = edge_embed(emb.row(pairs[i].first).transpose(),
                                  emb.row(pairs[i].second).transpose(), op);
        return X;
    };

    for (EdgeOp op : ops) {
        Eigen::MatrixXd Xtr(train_pos.size() + split.train_neg.size(), emb.cols());
        Xtr.topRows(train_pos.size()) = features(train_pos, op);
        Xtr.bottomRows(split.train_neg.size()) = features(split.train_neg, op);
        std::vector<int> ytr(Xtr.rows(), 0);
        std::fill(ytr.begin(), ytr.begin() + static_cast<std::ptrdiff_t>(train_pos.size()), 1);
        const auto model = logreg_fit(Xtr, ytr, l2);

        std::vector<double> scores;
        std::vector<int> ylab;
        auto score_pairs = [&](const std::vector<std::pair<NodeId, NodeId>>& pairs, int label) {
            const Eigen::MatrixXd X = features(pairs, op);
            const Eigen::VectorXd z = model.decisions(X);
            for (Eigen::Index i = 0; i < z.size(); ++i) {
                scores.push_back(z(i));
                ylab.push_back(label);
            }
        };
        score_pairs(split.removed, 1);
        score_pairs(split.test_neg, 0);
        report.op_auc.emplace_back(edge_op_name(op), metrics_auc(scores, ylab));
    }

    if (include_jaccard) {
        KnnIndex index(emb, knn_k);
        std::vector<double> scores;
        std::vector<int> ylab;
        for (const auto& [u, v] : split.removed) {
            scores.push_back(index.jaccard(u, v));
            ylab.push_back(1);
        }
        for (const auto& [u, v] : split.test_neg) {
            scores.push_back(index.jaccard(u, v));
            ylab.push_back(0);
        }
        report.op_auc.emplace_back("jac", metrics_auc(scores, ylab));
    }

    report.config = {{"holdout", std::to_string(holdout)},
                     {"removed_edges", std::to_string(split.removed.size())},
                     {"residual_edges", std::to_string(train_pos.size())},
                     {"train_negatives", std::to_string(split.train_neg.size())},
                     {"test_negatives", std::to_string(split.test_neg.size())},
                     {"removal_rule", "no isolated endpoints"},
                     {"knn_k", std::to_string(knn_k)},
                     {"l2", std::to_string(l2)},
                     {"rng_seed", std::to_string(rng_seed)}};
    return report;
}

void write_report_text(std::ostream& out, const EvalReport& report, const LabelSet* labels) {
    out << "protocol: " << report.protocol << "\n";
    for (const auto& [k, v] : report.config) out << "  " << k << ": " << v << "\n";
    if (report.num_classes > 0) {
        out << "classes: " << report.num_classes;
        if (!report.skipped_classes.empty())
            out << " (skipped: " << report.skipped_classes.size() << ")";
        out << "\n";
        char buf[160];
        std::snprintf(buf, sizeof(buf), "macro-F1: %.6f\nmicro-F1: %.6f\n", report.macro_f1,
                      report.micro_f1);
        out << buf;
        if (!report.fold_macro_f1.empty()) {
            out << "per-fold scores:\n  fold   macro-F1   micro-F1\n";
            for (std::size_t f = 0; f < report.fold_macro_f1.size(); ++f) {
                std::snprintf(buf, sizeof(buf), "  %4zu   %.6f   %.6f\n", f + 1,
                              report.fold_macro_f1[f], report.fold_micro_f1[f]);
                out << buf;
            }
        }
        out << "per-class F1:\n";
        for (int c = 0; c < report.num_classes; ++c) {
            const std::string name = labels ? labels->class_name(c) : std::to_string(c);
            std::snprintf(buf, sizeof(buf), "  %-12s %.6f\n", name.c_str(),
                          report.per_class_f1[c]);
            out << buf;
        }
    }
    if (!report.op_auc.empty()) {
        out << "AUC per operator:\n";
        char buf[160];
        for (const auto& [name, auc] : report.op_auc) {
            std::snprintf(buf, sizeof(buf), "  %-10s %.6f\n", name.c_str(), auc);
            out << buf;
        }
    }
}

void write_report_kv(const std::string& path, const EvalReport& report) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw DataError("cannot write report: " + path);
    std::fprintf(f, "protocol %s\n", report.protocol.c_str());
    for (const auto& [k, v] : report.config) std::fprintf(f, "config %s %s\n", k.c_str(), v.c_str());
    if (report.num_classes > 0) {
        std::fprintf(f, "num_classes %d\n", report.num_classes);
        std::fprintf(f, "macro_f1 %.17g\n", report.macro_f1);
        std::fprintf(f, "micro_f1 %.17g\n", report.micro_f1);
        for (std::size_t i = 0; i < report.fold_macro_f1.size(); ++i)
            std::fprintf(f, "fold_macro_f1 %zu %.17g\n", i, report.fold_macro_f1[i]);
        for (std::size_t i = 0; i < report.fold_micro_f1.size(); ++i)
            std::fprintf(f, "fold_micro_f1 %zu %.17g\n", i, report.fold_micro_f1[i]);
        for (int c = 0; c < report.num_classes; ++c)
            std::fprintf(f, "class_f1 %d %.17g\n", c, report.per_class_f1[c]);
        for (int c : report.skipped_classes) std::fprintf(f, "skipped_class %d\n", c);
    }
    for (const auto& [name, auc] : report.op_auc)
        std::fprintf(f, "op_auc %s %.17g\n", name.c_str(), auc);
    if (std::fclose(f) != 0) throw DataError("failed to flush report: " + path);
}

EvalReport load_report_kv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open report: " + path);
    EvalReport r;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "protocol") {
            ls >> r.protocol;
        } else if (key == "config") {
            std::string k;
            ls >> k;
            std::string v;
            std::getline(ls, v);
            if (!v.empty() && v.front() == ' ') v.erase(0, 1);
            r.config.emplace_back(k, v);
        } else if (key == "num_classes") {
            ls >> r.num_classes;
            r.per_class_f1.assign(r.num_classes, 0.0);
        } else if (key == "macro_f1") {
            ls >> r.macro_f1;
        } else if (key == "micro_f1") {
            ls >> r.micro_f1;
        } else if (key == "fold_macro_f1") {
            std::size_t i;
            double v;
            ls >> i >> v;
            r.fold_macro_f1.push_back(v);
        } else if (key == "fold_micro_f1") {
            std::size_t i;
            double v;
            ls >> i >> v;
            r.fold_micro_f1.push_back(v);
        } else if (key == "class_f1") {
            int c;
            double v;
            if ((ls >> c >> v) && c >= 0 && c < static_cast<int>(r.per_class_f1.size()))
                r.per_class_f1[c] = v;
            else
                throw DataError("report: malformed class_f1 line");
        } else if (key == "skipped_class") {
            int c;
            ls >> c;
            r.skipped_classes.push_back(c);
        } else if (key == "op_auc") {
            std::string name;
            double v;
            ls >> name >> v;
            r.op_auc.emplace_back(name, v);
        }
    }
    return r;
}

} // namespace lasagne
