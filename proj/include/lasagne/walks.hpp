#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lasagne/common.hpp"
#include "lasagne/graph.hpp"
#include "lasagne/rng.hpp"

namespace lasagne {

struct WalkConfig {
    int walk_len = 80;
    int walks_per_node = 10;
    int window = 10;
    std::uint64_t rng_seed = 1;

    void validate() const {
        if (walk_len < 1 || walks_per_node < 1 || window < 1)
            throw DataError("walk parameters must be >= 1");
    }
};

// walks_per_node uniform walks from every node, walk index u*r+k. Isolated
// nodes contribute single-element walks. Per-walk rng streams keyed by
// (seed, node, walk index), so output is identical however work is scheduled.
std::vector<std::vector<NodeId>> simulate_walks(const CsrGraph& g, const WalkConfig& cfg);

// Skip-gram pair generation over one token sequence: per position the window
// extension to each side is drawn uniformly from [1, w] and clipped at the
// sequence ends.
template <typename Sink>
void window_contexts_stream(const std::vector<NodeId>& stream, int window, Rng& rng, Sink&& sink) {
    const std::int64_t n = static_cast<std::int64_t>(stream.size());
    for (std::int64_t i = 0; i < n; ++i) {
        const auto left = rng.uniform_int(1, window);
        const auto right = rng.uniform_int(1, window);
        const std::int64_t lo = std::max<std::int64_t>(0, i - left);
        const std::int64_t hi = std::min<std::int64_t>(n - 1, i + right);
        for (std::int64_t j = lo; j <= hi; ++j)
            if (j != i) sink(stream[i], stream[j]);
    }
}

template <typename Sink>
void window_contexts(const std::vector<std::vector<NodeId>>& walks, int window, Rng& rng,
                     Sink&& sink) {
    for (const auto& w : walks) window_contexts_stream(w, window, rng, sink);
}

std::vector<std::pair<NodeId, NodeId>> window_contexts(const std::vector<std::vector<NodeId>>& walks,
                                                       int window, Rng& rng);

inline constexpr std::uint64_t kWindowStreamSalt = 0x81d0;

// The walks_per_node walks of one start node concatenated into a single
// stream, windowed with that node's dedicated rng stream.
template <typename Sink>
void node_stream_pairs(const CsrGraph&, const WalkConfig& cfg,
                       const std::vector<std::vector<NodeId>>& walks, NodeId u, Sink&& sink) {
    const auto r = static_cast<std::size_t>(cfg.walks_per_node);
    std::vector<NodeId> stream;
    for (std::size_t k = 0; k < r; ++k) {
        const auto& w = walks[static_cast<std::size_t>(u) * r + k];
        stream.insert(stream.end(), w.begin(), w.end());
    }
    auto wrng = Rng::stream(cfg.rng_seed, kWindowStreamSalt, u);
    window_contexts_stream(stream, cfg.window, wrng, sink);
}

// Full corpus pipeline: the walks_per_node walks of each start node form one
// concatenated stream before windowing, which is what the training-budget
// formula counts.
template <typename Sink>
void walk_context_pairs(const CsrGraph& g, const WalkConfig& cfg, Sink&& sink) {
    cfg.validate();
    const auto walks = simulate_walks(g, cfg);
    for (NodeId u = 0; u < g.num_nodes(); ++u) node_stream_pairs(g, cfg, walks, u, sink);
}

std::vector<std::pair<NodeId, NodeId>> walk_context_pairs(const CsrGraph& g,
                                                          const WalkConfig& cfg);

void dump_walks(const std::string& path, const std::vector<std::vector<NodeId>>& walks,
                const CsrGraph& g);

} // namespace lasagne
