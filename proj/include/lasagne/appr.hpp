#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lasagne/common.hpp"
#include "lasagne/graph.hpp"

namespace lasagne {

struct ApprConfig {
    double alpha = 0.2;  // teleportation, in (0,1)
    double delta = 1e-4; // relative-update stopping threshold, in (0,1)
    bool skip_seed_replacement = false;

    // The push below is the textbook PPR push for this effective teleportation.
    double beta() const { return 2.0 * alpha / (1.0 + alpha); }
    std::uint64_t push_budget() const { return static_cast<std::uint64_t>(std::ceil(1.0 / delta)); }
    void validate() const;
};

struct ApprVector {
    NodeId seed = kInvalidNode;
    std::vector<std::pair<NodeId, double>> entries; // sorted by node id, mass > 0
    double residual_l1 = 0;
    std::uint64_t num_pushes = 0;      // pops processed in total
    std::uint64_t num_seed_pushes = 0; // how many of them were the seed
    double seed_mass_pre_replacement = 0;

    double mass(NodeId u) const;
    double total_mass() const;
};

// Dense p/r scratch reused across seeds; memory is O(n) once, resets touch
// only the entries the previous run dirtied.
class ApprWorkspace {
public:
    void ensure(NodeId n);

    std::vector<double> p, r;
    std::vector<double> heap_pri; // current priority per node, 0 when not queued
    std::vector<NodeId> touched;
    std::vector<char> is_touched;
};

// Called after every completed push with dense views of p and r.
using PushObserver = std::function<void(const std::vector<double>&, const std::vector<double>&)>;

ApprVector compute_appr(const CsrGraph& g, NodeId seed, const ApprConfig& cfg,
                        ApprWorkspace* ws = nullptr, const PushObserver& observer = {});

struct ApprBatch {
    std::vector<ApprVector> vectors; // sorted by seed
    std::vector<NodeId> skipped;     // isolated nodes
};

ApprBatch compute_all_appr(const CsrGraph& g, const ApprConfig& cfg, int threads = 1);

// Dense personalized-PageRank ground truth pr = beta * start + (1-beta) * W^T pr
// with W = D^-1 A, solved directly. Small graphs only.
Eigen::VectorXd exact_ppr(const CsrGraph& g, NodeId seed, double beta);
Eigen::VectorXd exact_ppr_dist(const CsrGraph& g, const Eigen::VectorXd& start, double beta);

// Text sidecar with full double precision so a save/load round trip is exact.
void save_appr(const std::string& path, const ApprBatch& batch, const ApprConfig& cfg,
               const CsrGraph& g);

struct ApprFile {
    ApprBatch batch;
    double alpha = 0;
    double delta = 0;
    NodeId num_nodes = 0;
};
ApprFile load_appr(const std::string& path, const CsrGraph& g);

} // namespace lasagne
