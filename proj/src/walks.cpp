#include "lasagne/walks.hpp"

#include <cstdio>

namespace lasagne {

std::vector<std::vector<NodeId>> simulate_walks(const CsrGraph& g, const WalkConfig& cfg) {
    cfg.validate();
    if (g.num_nodes() == 0) throw DataError("simulate_walks: empty graph");

    const auto r = static_cast<std::size_t>(cfg.walks_per_node);
    std::vector<std::vector<NodeId>> walks(static_cast<std::size_t>(g.num_nodes()) * r);
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        for (std::size_t k = 0; k < r; ++k) {
            auto& walk = walks[static_cast<std::size_t>(u) * r + k];
            if (g.degree(u) == 0) {
                walk.push_back(u);
                continue;
            }
            auto rng = Rng::stream(cfg.rng_seed, u, k);
            walk.reserve(cfg.walk_len);
            NodeId cur = u;
            walk.push_back(cur);
            for (int step = 1; step < cfg.walk_len; ++step) {
                const auto nb = g.neighbors(cur);
                cur = nb[rng.below(static_cast<std::uint32_t>(nb.size()))];
                walk.push_back(cur);
            }
        }
    }
    return walks;
}

std::vector<std::pair<NodeId, NodeId>> window_contexts(const std::vector<std::vector<NodeId>>& walks,
                                                       int window, Rng& rng) {
    std::vector<std::pair<NodeId, NodeId>> out;
    window_contexts(walks, window, rng,
                    [&out](NodeId c, NodeId ctx) { out.emplace_back(c, ctx); });
    return out;
}

std::vector<std::pair<NodeId, NodeId>> walk_context_pairs(const CsrGraph& g,
                                                          const WalkConfig& cfg) {
    std::vector<std::pair<NodeId, NodeId>> out;
    walk_context_pairs(g, cfg, [&out](NodeId c, NodeId ctx) { out.emplace_back(c, ctx); });
    return out;
}

void dump_walks(const std::string& path, const std::vector<std::vector<NodeId>>& walks,
                const CsrGraph& g) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw DataError("cannot write walk file: " + path);
    for (const auto& w : walks) {
        for (std::size_t i = 0; i < w.size(); ++i)
            std::fprintf(f, "%s%s", i ? " " : "", g.external_id(w[i]).c_str());
        std::fputc('\n', f);
    }
    if (std::fclose(f) != 0) throw DataError("failed to flush walk file: " + path);
}

} // namespace lasagne
