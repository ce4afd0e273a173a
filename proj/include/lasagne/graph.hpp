#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lasagne/common.hpp"

namespace lasagne {

struct LoadReport {
    std::size_t lines_parsed = 0;
    std::size_t self_loops_dropped = 0;
    std::size_t duplicate_edges_dropped = 0;
};

// Undirected unweighted graph in CSR form. Immutable once built. External
// node labels from the input file are kept so output files can use them;
// everything else works on dense internal IDs 0..n-1.
class CsrGraph {
public:
    CsrGraph() = default;

    static CsrGraph from_edges(NodeId num_nodes,
                               const std::vector<std::pair<NodeId, NodeId>>& edges,
                               std::vector<std::string> external_ids = {},
                               LoadReport* report = nullptr);

    NodeId num_nodes() const { return static_cast<NodeId>(offsets_.size()) - 1; }
    std::uint64_t num_edges() const { return neighbors_.size() / 2; }

    std::uint32_t degree(NodeId u) const {
        return static_cast<std::uint32_t>(offsets_[u + 1] - offsets_[u]);
    }
    std::span<const NodeId> neighbors(NodeId u) const {
        return {neighbors_.data() + offsets_[u], neighbors_.data() + offsets_[u + 1]};
    }
    bool has_edge(NodeId u, NodeId v) const;

    const std::string& external_id(NodeId u) const { return external_ids_[u]; }
    std::optional<NodeId> internal_id(const std::string& label) const;

    const std::vector<std::uint64_t>& offsets() const { return offsets_; }
    const std::vector<NodeId>& neighbor_array() const { return neighbors_; }

private:
    std::vector<std::uint64_t> offsets_{0};
    std::vector<NodeId> neighbors_;
    std::vector<std::string> external_ids_;
    std::unordered_map<std::string, NodeId> label_to_id_;
};

// Whitespace-separated "u v" pairs, '#' starts a comment line. Tokens are
// kept verbatim as external labels and mapped to dense IDs in first-appearance
// order. Self loops and repeated edges are dropped (counted in the report).
// With directed_input each line is one arc and the reverse listing of an edge
// is expected rather than a duplicate.
CsrGraph load_edge_list(const std::string& path, bool directed_input = false,
                        LoadReport* report = nullptr);

// Core number per node (Batagelj-Zaversnik bucket peeling).
std::vector<std::uint32_t> k_core_decomposition(const CsrGraph& g);

struct ConductanceValue {
    double standard;        // cut(S) / min(vol(S), vol(V\S))
    double cut_to_internal; // cut(S) / #edges inside S, +inf when S has no internal edges
};
ConductanceValue conductance(const CsrGraph& g, const std::vector<NodeId>& cluster);

struct BfsResult {
    std::unordered_map<NodeId, std::uint32_t> hops;
    std::vector<NodeId> unreachable;
};
BfsResult bfs_hops(const CsrGraph& g, NodeId seed, const std::vector<NodeId>& targets);

// Distance from seed to every node, -1 when unreachable.
std::vector<std::int64_t> bfs_all(const CsrGraph& g, NodeId seed);

std::vector<NodeId> connected_component_ids(const CsrGraph& g);

struct LccResult {
    CsrGraph graph;
    std::vector<NodeId> kept; // new internal id -> old internal id
};
LccResult largest_connected_component(const CsrGraph& g);

// Multi-label assignment, one "node label" pair per line; a node may appear
// on several lines. Label tokens are mapped to dense class IDs in
// first-appearance order.
class LabelSet {
public:
    static LabelSet load(const std::string& path, const CsrGraph& g);
    static LabelSet from_lists(std::vector<std::vector<int>> labels_per_node,
                               int num_classes, std::vector<std::string> class_names = {});

    int num_classes() const { return num_classes_; }
    const std::vector<int>& labels_of(NodeId u) const { return labels_per_node_[u]; }
    const std::string& class_name(int c) const { return class_names_[c]; }
    NodeId num_nodes() const { return static_cast<NodeId>(labels_per_node_.size()); }

    std::vector<NodeId> labeled_nodes() const;
    std::vector<std::uint64_t> class_sizes() const;

private:
    std::vector<std::vector<int>> labels_per_node_;
    std::vector<std::string> class_names_;
    int num_classes_ = 0;
};

} // namespace lasagne
