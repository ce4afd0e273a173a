#include "lasagne/appr.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <queue>
#include <sstream>
#include <thread>

namespace lasagne {

void ApprConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DataError("alpha must be in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw DataError("delta must be in (0,1)");
}

double ApprVector::mass(NodeId u) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), u,
                               [](const auto& e, NodeId x) { return e.first < x; });
    return (it != entries.end() && it->first == u) ? it->second : 0.0;
}

double ApprVector::total_mass() const {
    double s = 0;
    for (const auto& [node, m] : entries) s += m;
    return s;
}

void ApprWorkspace::ensure(NodeId n) {
    if (p.size() < n) {
        p.assign(n, 0.0);
        r.assign(n, 0.0);
        heap_pri.assign(n, 0.0);
        is_touched.assign(n, 0);
        touched.clear();
    }
}

namespace {

struct HeapEntry {
    double pri;
    NodeId node;
    // Max-heap on priority; equal priorities pop the smaller node id first.
    bool operator<(const HeapEntry& o) const {
        if (pri != o.pri) return pri < o.pri;
        return node > o.node;
    }
};

} // namespace

ApprVector compute_appr(const CsrGraph& g, NodeId seed, const ApprConfig& cfg, ApprWorkspace* ws,
                        const PushObserver& observer) {
    cfg.validate();
    if (seed >= g.num_nodes()) throw DataError("compute_appr: seed out of range");
    if (g.degree(seed) == 0)
        throw DataError("compute_appr: seed " + g.external_id(seed) + " is isolated");

    ApprWorkspace local;
    ApprWorkspace& w = ws ? *ws : local;
    w.ensure(g.num_nodes());

    auto touch = [&w](NodeId u) {
        if (!w.is_touched[u]) {
            w.is_touched[u] = 1;
            w.touched.push_back(u);
        }
    };

    const double prob_coeff = cfg.beta();                        // 2a/(1+a)
    const double res_coeff = (1.0 - cfg.alpha) / (1.0 + cfg.alpha); // 1 - beta

    std::priority_queue<HeapEntry> heap;
    touch(seed);
    w.r[seed] = 1.0;
    w.heap_pri[seed] = 1.0;
    heap.push({1.0, seed});

    double sum_prob_updates = 0.0;
    double last_distr_update = 1.0;
    const std::uint64_t budget = cfg.push_budget();
    std::uint64_t nonseed_pushes = 0, seed_pushes = 0;

    while (last_distr_update > cfg.delta && nonseed_pushes < budget) {
        NodeId u = kInvalidNode;
        while (!heap.empty()) {
            auto e = heap.top();
            heap.pop();
            if (w.r[e.node] > 0.0 && e.pri == w.heap_pri[e.node]) {
                u = e.node;
                break;
            }
        }
        if (u == kInvalidNode) break; // residual exhausted

        const double ru = w.r[u];
        const double prob_update = prob_coeff * ru;
        if (u != seed) {
            sum_prob_updates += prob_update;
            last_distr_update = prob_update / sum_prob_updates;
            ++nonseed_pushes;
        } else {
            ++seed_pushes;
        }
        w.p[u] += prob_update;
        const double neigh_res_update = res_coeff * ru / g.degree(u);
        for (NodeId v : g.neighbors(u)) {
            touch(v);
            w.r[v] += neigh_res_update;
            w.heap_pri[v] = w.r[v] / g.degree(v);
            heap.push({w.heap_pri[v], v});
        }
        w.r[u] = 0.0;
        w.heap_pri[u] = 0.0;
        if (observer) observer(w.p, w.r);
    }

    ApprVector out;
    out.seed = seed;
    out.num_pushes = nonseed_pushes + seed_pushes;
    out.num_seed_pushes = seed_pushes;
    for (NodeId u : w.touched) {
        if (w.p[u] > 0.0) out.entries.emplace_back(u, w.p[u]);
        out.residual_l1 += w.r[u];
    }
    std::sort(out.entries.begin(), out.entries.end());

    out.seed_mass_pre_replacement = w.p[seed];
    if (!cfg.skip_seed_replacement) {
        double best = 0.0;
        bool any = false;
        for (const auto& [node, m] : out.entries) {
            if (node == seed) continue;
            any = true;
            best = std::max(best, m);
        }
        if (!any) throw DataError("compute_appr: vector for seed " + g.external_id(seed) +
                                  " has no non-seed entries");
        for (auto& [node, m] : out.entries)
            if (node == seed) m = best;
    }

    for (NodeId u : w.touched) {
        w.p[u] = 0.0;
        w.r[u] = 0.0;
        w.heap_pri[u] = 0.0;
        w.is_touched[u] = 0;
    }
    w.touched.clear();
    return out;
}

ApprBatch compute_all_appr(const CsrGraph& g, const ApprConfig& cfg, int threads) {
    cfg.validate();
    if (threads < 1) threads = 1;

    std::vector<NodeId> seeds;
    ApprBatch batch;
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        if (g.degree(u) > 0)
            seeds.push_back(u);
        else
            batch.skipped.push_back(u);
    }
    batch.vectors.resize(seeds.size());

    auto worker = [&](std::size_t begin, std::size_t end) {
        ApprWorkspace ws;
        for (std::size_t i = begin; i < end; ++i)
            batch.vectors[i] = compute_appr(g, seeds[i], cfg, &ws);
    };

    if (threads == 1 || seeds.size() < 2) {
        worker(0, seeds.size());
    } else {
        const std::size_t nt = std::min<std::size_t>(threads, seeds.size());
        std::vector<std::thread> pool;
        const std::size_t chunk = (seeds.size() + nt - 1) / nt;
        for (std::size_t t = 0; t < nt; ++t) {
            const std::size_t b = t * chunk;
            const std::size_t e = std::min(seeds.size(), b + chunk);
            if (b < e) pool.emplace_back(worker, b, e);
        }
        for (auto& th : pool) th.join();
    }
    return batch;
}

Eigen::VectorXd exact_ppr_dist(const CsrGraph& g, const Eigen::VectorXd& start, double beta) {
    const auto n = static_cast<Eigen::Index>(g.num_nodes());
    if (start.size() != n) throw DataError("exact_ppr: start vector size mismatch");
    if (!(beta > 0.0 && beta < 1.0)) throw DataError("exact_ppr: beta must be in (0,1)");
    if (n > 5000) throw DataError("exact_ppr: graph too large for the dense solver");

    // pr = beta*s + (1-beta) W^T pr  with  W = D^-1 A, solved as
    // (I - (1-beta) W^T) pr = beta*s.
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        const double d = g.degree(u);
        for (NodeId v : g.neighbors(u)) m(v, u) -= (1.0 - beta) / d;
    }
    Eigen::VectorXd pr = Eigen::PartialPivLU<Eigen::MatrixXd>(m).solve(beta * start);
    return pr;
}

Eigen::VectorXd exact_ppr(const CsrGraph& g, NodeId seed, double beta) {
    if (seed >= g.num_nodes()) throw DataError("exact_ppr: seed out of range");
    Eigen::VectorXd s = Eigen::VectorXd::Zero(g.num_nodes());
    s(seed) = 1.0;
    return exact_ppr_dist(g, s, beta);
}

void save_appr(const std::string& path, const ApprBatch& batch, const ApprConfig& cfg,
               const CsrGraph& g) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw DataError("cannot write appr file: " + path);
    std::fprintf(f, "appr 1\n");
    std::fprintf(f, "alpha %.17g\n", cfg.alpha);
    std::fprintf(f, "delta %.17g\n", cfg.delta);
    std::fprintf(f, "nodes %u\n", g.num_nodes());
    std::fprintf(f, "vectors %zu\n", batch.vectors.size());
    for (const auto& v : batch.vectors) {
        std::fprintf(f, "seed %s %zu %.17g %" PRIu64 " %" PRIu64 " %.17g\n",
                     g.external_id(v.seed).c_str(), v.entries.size(), v.residual_l1, v.num_pushes,
                     v.num_seed_pushes, v.seed_mass_pre_replacement);
        for (const auto& [node, mass] : v.entries)
            std::fprintf(f, "%s %.17g\n", g.external_id(node).c_str(), mass);
    }
    if (std::fclose(f) != 0) throw DataError("failed to flush appr file: " + path);
}

ApprFile load_appr(const std::string& path, const CsrGraph& g) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open appr file: " + path);
    ApprFile out;

    std::string tag;
    int version = 0;
    if (!(in >> tag >> version) || tag != "appr" || version != 1)
        throw DataError("not an appr file: " + path);
    std::size_t num_vectors = 0;
    NodeId nodes = 0;
    if (!(in >> tag >> out.alpha) || tag != "alpha") throw DataError("appr file: bad alpha line");
    if (!(in >> tag >> out.delta) || tag != "delta") throw DataError("appr file: bad delta line");
    if (!(in >> tag >> nodes) || tag != "nodes") throw DataError("appr file: bad nodes line");
    if (!(in >> tag >> num_vectors) || tag != "vectors")
        throw DataError("appr file: bad vectors line");
    if (nodes != g.num_nodes())
        throw DataError("appr file was computed on a graph with a different node count");
    out.num_nodes = nodes;

    auto resolve = [&](const std::string& label) {
        auto id = g.internal_id(label);
        if (!id) throw DataError("appr file references unknown node '" + label + "'");
        return *id;
    };

    out.batch.vectors.reserve(num_vectors);
    for (std::size_t i = 0; i < num_vectors; ++i) {
        std::string seed_label;
        std::size_t num_entries = 0;
        ApprVector v;
        if (!(in >> tag >> seed_label >> num_entries >> v.residual_l1 >> v.num_pushes >>
              v.num_seed_pushes >> v.seed_mass_pre_replacement) ||
            tag != "seed")
            throw DataError("appr file: bad seed header");
        v.seed = resolve(seed_label);
        v.entries.reserve(num_entries);
        for (std::size_t k = 0; k < num_entries; ++k) {
            std::string node_label;
            double mass;
            if (!(in >> node_label >> mass)) throw DataError("appr file: truncated entry list");
            v.entries.emplace_back(resolve(node_label), mass);
        }
        if (!std::is_sorted(v.entries.begin(), v.entries.end()))
            std::sort(v.entries.begin(), v.entries.end());
        out.batch.vectors.push_back(std::move(v));
    }
    std::sort(out.batch.vectors.begin(), out.batch.vectors.end(),
              [](const ApprVector& a, const ApprVector& b) { return a.seed < b.seed; });
    for (NodeId u = 0; u < g.num_nodes(); ++u)
        if (g.degree(u) == 0) out.batch.skipped.push_back(u);
    return out;
}

} // namespace lasagne
