#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lasagne/common.hpp"
#include "lasagne/graph.hpp"
#include "lasagne/rng.hpp"

namespace lasagne {

struct LogRegModel {
    Eigen::VectorXd weights; // d+1 entries, bias last
    double l2_penalty = 1.0;

    double decision(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
        return x.dot(weights.head(weights.size() - 1)) + weights(weights.size() - 1);
    }
    double predict_proba(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
    Eigen::VectorXd decisions(const Eigen::MatrixXd& X) const {
        return (X * weights.head(weights.size() - 1)).array() + weights(weights.size() - 1);
    }
};

// L2-regularized logistic regression, mean-scaled loss with unpenalized bias,
// accelerated batch gradient descent with backtracking. Stops at gradient
// norm <= tol or max_iter iterations.
LogRegModel logreg_fit(const Eigen::MatrixXd& X, const std::vector<int>& y, double l2 = 1.0,
                       int max_iter = 1000, double tol = 1e-6);

struct ClassCounts {
    std::uint64_t tp = 0, fp = 0, fn = 0;
};

struct F1Scores {
    std::vector<double> per_class;
    double macro = 0;
    double micro = 0;
};

// F1 = 2TP/(2TP+FP+FN), 0/0 counts as 0. Macro averages every entry given.
F1Scores metrics_f1(const std::vector<ClassCounts>& counts);

// Mann-Whitney AUC with midrank tie handling.
double metrics_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct EvalReport {
    std::string protocol;
    int num_classes = 0;
    std::vector<double> per_class_f1;   // length num_classes, skipped classes 0
    std::vector<int> skipped_classes;
    std::vector<double> fold_macro_f1;  // per fold or per repetition
    std::vector<double> fold_micro_f1;
    double macro_f1 = 0;
    double micro_f1 = 0;
    std::vector<std::pair<std::string, double>> op_auc; // link prediction only
    std::vector<std::pair<std::string, std::string>> config;
};

// Stratified k-fold one-vs-rest protocol, positive iff probability >= 0.5.
// Classes with fewer positives (or negatives) than folds are skipped and
// listed. Universe: labeled nodes.
EvalReport multilabel_realistic(const Eigen::MatrixXd& emb, const LabelSet& labels,
                                int folds = 10, std::uint64_t rng_seed = 1, double l2 = 1.0,
                                bool normalize = false);

// Uniform-split protocol: per repetition train on train_fraction of the
// labeled nodes, then assign each test node its top-k_i scored labels, where
// k_i is the node's true label count.
EvalReport multilabel_former(const Eigen::MatrixXd& emb, const LabelSet& labels,
                             double train_fraction = 0.9, int repetitions = 10,
                             std::uint64_t rng_seed = 1, double l2 = 1.0,
                             bool normalize = false);

enum class EdgeOp { Average, Hadamard, L1, L2 };

const char* edge_op_name(EdgeOp op);
EdgeOp edge_op_from_string(const std::string& name);

Eigen::VectorXd edge_embed(const Eigen::Ref<const Eigen::VectorXd>& u_vec,
                           const Eigen::Ref<const Eigen::VectorXd>& v_vec, EdgeOp op);

struct LinkpredSplit {
    CsrGraph residual;
    std::vector<std::pair<NodeId, NodeId>> removed;   // held-out positives
    std::vector<std::pair<NodeId, NodeId>> train_neg; // |residual edges| non-edges
    std::vector<std::pair<NodeId, NodeId>> test_neg;  // |removed| non-edges
};

// Removes floor(holdout*|E|) edges so that no endpoint becomes isolated;
// residual keeps the node set and external ids. Negatives are uniform
// non-edges of the original graph, disjoint across the two sets.
LinkpredSplit linkpred_split(const CsrGraph& g, double holdout, std::uint64_t rng_seed);

using EmbedFn = std::function<Eigen::MatrixXd(const CsrGraph&)>;

EvalReport linkpred_eval(const CsrGraph& g, const EmbedFn& embed_fn,
                         const std::vector<EdgeOp>& ops, bool include_jaccard = true,
                         double holdout = 0.5, std::uint64_t rng_seed = 1, int knn_k = 50,
                         double l2 = 1.0);

// Precomputed cosine k-NN lists (k+2 entries per node so pair scoring can
// drop the two query nodes).
class KnnIndex {
public:
    KnnIndex(const Eigen::MatrixXd& emb, int k);
    double jaccard(NodeId u, NodeId v) const;
    int k() const { return k_; }

private:
    int k_;
    std::vector<std::vector<NodeId>> lists_;
};

double jaccard_knn_score(const Eigen::MatrixXd& emb, NodeId u, NodeId v, int k = 50);

void write_report_text(std::ostream& out, const EvalReport& report, const LabelSet* labels = nullptr);
void write_report_kv(const std::string& path, const EvalReport& report);
EvalReport load_report_kv(const std::string& path);

} // namespace lasagne
