#include "lasagne/graph.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>

namespace lasagne {

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        const auto got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

CsrGraph CsrGraph::from_edges(NodeId num_nodes,
                              const std::vector<std::pair<NodeId, NodeId>>& edges,
                              std::vector<std::string> external_ids,
                              LoadReport* report) {
    LoadReport local;
    CsrGraph g;

    if (!external_ids.empty() && external_ids.size() != num_nodes)
        throw DataError("external_ids length does not match num_nodes");

    // Normalize, drop self loops, dedupe.
    std::vector<std::pair<NodeId, NodeId>> uniq;
    uniq.reserve(edges.size());
    for (auto [u, v] : edges) {
        if (u >= num_nodes || v >= num_nodes) throw DataError("edge endpoint out of range");
        if (u == v) {
            ++local.self_loops_dropped;
            continue;
        }
        uniq.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(uniq.begin(), uniq.end());
    auto last = std::unique(uniq.begin(), uniq.end());
    local.duplicate_edges_dropped = static_cast<std::size_t>(uniq.end() - last);
    uniq.erase(last, uniq.end());

    g.offsets_.assign(num_nodes + 1, 0);
    for (auto [u, v] : uniq) {
        ++g.offsets_[u + 1];
        ++g.offsets_[v + 1];
    }
    for (NodeId i = 0; i < num_nodes; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.neighbors_.resize(g.offsets_[num_nodes]);
    std::vector<std::uint64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (auto [u, v] : uniq) {
        g.neighbors_[cursor[u]++] = v;
        g.neighbors_[cursor[v]++] = u;
    }
    for (NodeId u = 0; u < num_nodes; ++u)
        std::sort(g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u]),
                  g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u + 1]));

    if (external_ids.empty()) {
        external_ids.resize(num_nodes);
        for (NodeId i = 0; i < num_nodes; ++i) external_ids[i] = std::to_string(i);
    }
    g.external_ids_ = std::move(external_ids);
    g.label_to_id_.reserve(num_nodes);
    for (NodeId i = 0; i < num_nodes; ++i) g.label_to_id_.emplace(g.external_ids_[i], i);

    if (report) {
        local.lines_parsed = edges.size();
        *report = local;
    }
    return g;
}

bool CsrGraph::has_edge(NodeId u, NodeId v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::optional<NodeId> CsrGraph::internal_id(const std::string& label) const {
    auto it = label_to_id_.find(label);
    if (it == label_to_id_.end()) return std::nullopt;
    return it->second;
}

namespace {

struct PairHash {
    std::size_t operator()(const std::pair<NodeId, NodeId>& p) const {
        return std::hash<std::uint64_t>()((static_cast<std::uint64_t>(p.first) << 32) | p.second);
    }
};

} // namespace

CsrGraph load_edge_list(const std::string& path, bool directed_input, LoadReport* report) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open edge list: " + path);

    LoadReport local;
    std::vector<std::string> labels;
    std::unordered_map<std::string, NodeId> ids;
    // Per normalized pair: total occurrences and which directions were seen
    // (bit 0: as written with lower label first, bit 1: reversed).
    std::unordered_map<std::pair<NodeId, NodeId>, std::pair<std::uint32_t, std::uint32_t>, PairHash> seen;
    std::vector<std::pair<NodeId, NodeId>> edges;

    auto intern = [&](const std::string& tok) {
        auto it = ids.find(tok);
        if (it != ids.end()) return it->second;
        auto id = static_cast<NodeId>(labels.size());
        labels.push_back(tok);
        ids.emplace(tok, id);
        return id;
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::string a, b, extra;
        if (!(ls >> a >> b))
            throw DataError("malformed edge at " + path + ":" + std::to_string(lineno));
        if (ls >> extra)
            throw DataError("trailing tokens at " + path + ":" + std::to_string(lineno));
        ++local.lines_parsed;
        NodeId u = intern(a), v = intern(b);
        if (u == v) {
            ++local.self_loops_dropped;
            continue;
        }
        auto key = std::make_pair(std::min(u, v), std::max(u, v));
        auto& entry = seen[key];
        ++entry.first;
        entry.second |= (u < v) ? 1u : 2u;
        if (entry.first == 1) edges.push_back(key);
    }
    if (labels.empty()) throw DataError("empty edge list: " + path);

    for (const auto& [key, entry] : seen) {
        const auto distinct = directed_input ? static_cast<std::uint32_t>((entry.second & 1) + (entry.second >> 1)) : 1u;
        if (entry.first > distinct) local.duplicate_edges_dropped += entry.first - distinct;
    }

    const auto num_nodes = static_cast<NodeId>(labels.size());
    auto g = CsrGraph::from_edges(num_nodes, edges, std::move(labels), nullptr);
    if (report) *report = local;
    return g;
}

std::vector<std::uint32_t> k_core_decomposition(const CsrGraph& g) {
    const NodeId n = g.num_nodes();
    std::vector<std::uint32_t> deg(n), core(n);
    std::uint32_t max_deg = 0;
    for (NodeId u = 0; u < n; ++u) {
        deg[u] = g.degree(u);
        max_deg = std::max(max_deg, deg[u]);
    }
    // Bucket sort nodes by degree, then peel in nondecreasing order.
    std::vector<std::uint32_t> bin(max_deg + 2, 0);
    for (NodeId u = 0; u < n; ++u) ++bin[deg[u]];
    std::uint32_t start = 0;
    for (std::uint32_t d = 0; d <= max_deg; ++d) {
        auto cnt = bin[d];
        bin[d] = start;
        start += cnt;
    }
    std::vector<NodeId> order(n);
    std::vector<std::uint32_t> pos(n);
    {
        std::vector<std::uint32_t> cursor(bin.begin(), bin.end());
        for (NodeId u = 0; u < n; ++u) {
            pos[u] = cursor[deg[u]];
            order[pos[u]] = u;
            ++cursor[deg[u]];
        }
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        NodeId u = order[i];
        core[u] = deg[u];
        for (NodeId v : g.neighbors(u)) {
            if (deg[v] > deg[u]) {
                // Swap v to the front of its degree bucket, then shrink its degree.
                auto dv = deg[v];
                auto pv = pos[v];
                auto pw = bin[dv];
                NodeId w = order[pw];
                if (v != w) {
                    std::swap(order[pv], order[pw]);
                    pos[v] = pw;
                    pos[w] = pv;
                }
                ++bin[dv];
                --deg[v];
            }
        }
    }
    return core;
}

ConductanceValue conductance(const CsrGraph& g, const std::vector<NodeId>& cluster) {
    const NodeId n = g.num_nodes();
    if (cluster.empty()) throw DataError("conductance: empty cluster");
    std::vector<char> in_s(n, 0);
    std::size_t cluster_size = 0;
    for (NodeId u : cluster) {
        if (u >= n) throw DataError("conductance: node out of range");
        if (!in_s[u]) {
            in_s[u] = 1;
            ++cluster_size;
        }
    }
    if (cluster_size == n) throw DataError("conductance: cluster covers the whole graph");

    std::uint64_t cut = 0, vol_s = 0, internal_twice = 0;
    for (NodeId u = 0; u < n; ++u) {
        if (!in_s[u]) continue;
        vol_s += g.degree(u);
        for (NodeId v : g.neighbors(u)) {
            if (in_s[v])
                ++internal_twice;
            else
                ++cut;
        }
    }
    const std::uint64_t vol_rest = 2 * g.num_edges() - vol_s;
    const std::uint64_t denom = std::min(vol_s, vol_rest);
    ConductanceValue cv{};
    cv.standard = denom == 0 ? (cut == 0 ? 0.0 : std::numeric_limits<double>::infinity())
                             : static_cast<double>(cut) / static_cast<double>(denom);
    const std::uint64_t internal = internal_twice / 2;
    cv.cut_to_internal = internal == 0 ? (cut == 0 ? 0.0 : std::numeric_limits<double>::infinity())
                                       : static_cast<double>(cut) / static_cast<double>(internal);
    return cv;
}

BfsResult bfs_hops(const CsrGraph& g, NodeId seed, const std::vector<NodeId>& targets) {
    if (seed >= g.num_nodes()) throw DataError("bfs_hops: seed out of range");
    auto dist = bfs_all(g, seed);
    BfsResult res;
    for (NodeId t : targets) {
        if (t >= g.num_nodes()) throw DataError("bfs_hops: target out of range");
        if (dist[t] >= 0)
            res.hops[t] = static_cast<std::uint32_t>(dist[t]);
        else
            res.unreachable.push_back(t);
    }
    return res;
}

std::vector<std::int64_t> bfs_all(const CsrGraph& g, NodeId seed) {
    std::vector<std::int64_t> dist(g.num_nodes(), -1);
    std::deque<NodeId> queue{seed};
    dist[seed] = 0;
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        for (NodeId v : g.neighbors(u)) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

std::vector<NodeId> connected_component_ids(const CsrGraph& g) {
    const NodeId n = g.num_nodes();
    std::vector<NodeId> comp(n, kInvalidNode);
    NodeId next = 0;
    std::vector<NodeId> stack;
    for (NodeId s = 0; s < n; ++s) {
        if (comp[s] != kInvalidNode) continue;
        comp[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            for (NodeId v : g.neighbors(u)) {
                if (comp[v] == kInvalidNode) {
                    comp[v] = next;
                    stack.push_back(v);
                }
            }
        }
        ++next;
    }
    return comp;
}

LccResult largest_connected_component(const CsrGraph& g) {
    auto comp = connected_component_ids(g);
    NodeId num_comp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    std::vector<std::uint64_t> sizes(num_comp, 0);
    for (auto c : comp) ++sizes[c];
    NodeId best = static_cast<NodeId>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());

    LccResult res;
    std::vector<NodeId> old_to_new(g.num_nodes(), kInvalidNode);
    std::vector<std::string> ext;
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        if (comp[u] == best) {
            old_to_new[u] = static_cast<NodeId>(res.kept.size());
            res.kept.push_back(u);
            ext.push_back(g.external_id(u));
        }
    }
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId u : res.kept)
        for (NodeId v : g.neighbors(u))
            if (u < v) edges.emplace_back(old_to_new[u], old_to_new[v]);
    res.graph = CsrGraph::from_edges(static_cast<NodeId>(res.kept.size()), edges, std::move(ext));
    return res;
}

LabelSet LabelSet::load(const std::string& path, const CsrGraph& g) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open label file: " + path);
    LabelSet ls;
    ls.labels_per_node_.resize(g.num_nodes());
    std::unordered_map<std::string, int> class_ids;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream lsm(line);
        std::string node_tok, label_tok, extra;
        if (!(lsm >> node_tok >> label_tok) || (lsm >> extra))
            throw DataError("malformed label line at " + path + ":" + std::to_string(lineno));
        auto nid = g.internal_id(node_tok);
        if (!nid)
            throw DataError("label for unknown node '" + node_tok + "' at " + path + ":" +
                            std::to_string(lineno));
        auto it = class_ids.find(label_tok);
        int cid;
        if (it == class_ids.end()) {
            cid = static_cast<int>(ls.class_names_.size());
            class_ids.emplace(label_tok, cid);
            ls.class_names_.push_back(label_tok);
        } else {
            cid = it->second;
        }
        ls.labels_per_node_[*nid].push_back(cid);
    }
    ls.num_classes_ = static_cast<int>(ls.class_names_.size());
    for (auto& v : ls.labels_per_node_) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return ls;
}

LabelSet LabelSet::from_lists(std::vector<std::vector<int>> labels_per_node, int num_classes,
                              std::vector<std::string> class_names) {
    LabelSet ls;
    for (auto& v : labels_per_node) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        for (int c : v)
            if (c < 0 || c >= num_classes) throw DataError("class id out of range");
    }
    ls.labels_per_node_ = std::move(labels_per_node);
    ls.num_classes_ = num_classes;
    if (class_names.empty()) {
        for (int c = 0; c < num_classes; ++c) class_names.push_back(std::to_string(c));
    }
    if (static_cast<int>(class_names.size()) != num_classes)
        throw DataError("class_names length does not match num_classes");
    ls.class_names_ = std::move(class_names);
    return ls;
}

std::vector<NodeId> LabelSet::labeled_nodes() const {
    std::vector<NodeId> out;
    for (NodeId u = 0; u < num_nodes(); ++u)
        if (!labels_per_node_[u].empty()) out.push_back(u);
    return out;
}

std::vector<std::uint64_t> LabelSet::class_sizes() const {
    std::vector<std::uint64_t> sizes(num_classes_, 0);
    for (const auto& v : labels_per_node_)
        for (int c : v) ++sizes[c];
    return sizes;
}

} // namespace lasagne
