#include "lasagne/diagnostics.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "lasagne/alias.hpp"
#include "lasagne/sgns.hpp"

namespace lasagne {

ContextSource context_source_from_string(const std::string& name) {
    if (name == "appr") return ContextSource::Appr;
    if (name == "walks") return ContextSource::Walks;
    throw DataError("unknown context source: " + name);
}

const char* context_source_name(ContextSource src) {
    return src == ContextSource::Appr ? "appr" : "walks";
}

std::vector<DegreeBucket> default_degree_buckets(const CsrGraph& g) {
    std::uint32_t max_deg = 0;
    for (NodeId u = 0; u < g.num_nodes(); ++u) max_deg = std::max(max_deg, g.degree(u));
    std::vector<DegreeBucket> buckets;
    for (std::uint32_t lo = 1; lo <= max_deg; lo *= 2) {
        const std::uint32_t hi = lo * 2;
        buckets.push_back({lo, hi, "[" + std::to_string(lo) + "," + std::to_string(hi) + ")"});
    }
    return buckets;
}

int bucket_of(const std::vector<DegreeBucket>& buckets, std::uint32_t degree) {
    for (std::size_t i = 0; i < buckets.size(); ++i)
        if (degree >= buckets[i].lo && degree < buckets[i].hi) return static_cast<int>(i);
    return -1;
}

namespace {

double percentile(const std::vector<std::uint32_t>& sorted, double q) {
    if (sorted.empty()) return 0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return static_cast<double>(sorted[lo]) * (1.0 - frac) +
           static_cast<double>(sorted[lo + 1]) * frac;
}

std::vector<std::vector<NodeId>> bucket_members(const CsrGraph& g,
                                                const std::vector<DegreeBucket>& buckets) {
    std::vector<std::vector<NodeId>> members(buckets.size());
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        if (g.degree(u) == 0) continue;
        const int b = bucket_of(buckets, g.degree(u));
        if (b >= 0) members[b].push_back(u);
    }
    return members;
}

std::vector<double> midranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = mid;
        i = j + 1;
    }
    return rank;
}

} // namespace

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw DataError("spearman: bad input sizes");
    const auto rx = midranks(xs);
    const auto ry = midranks(ys);
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0; // constant input has no rank correlation
    return sxy / std::sqrt(sxx * syy);
}

HopProfile hop_distance_profile(const CsrGraph& g, ContextSource source,
                                const DiagnosticsConfig& cfg) {
    const auto buckets = default_degree_buckets(g);
    auto members = bucket_members(g, buckets);
    HopProfile profile;

    std::vector<std::vector<NodeId>> walk_cache;
    if (source == ContextSource::Walks) walk_cache = simulate_walks(g, cfg.walks);

    ApprWorkspace ws;
    for (std::size_t b = 0; b < buckets.size(); ++b) {
        auto& nodes = members[b];
        if (nodes.empty()) {
            profile.notes.push_back("bucket " + buckets[b].label + " empty, omitted");
            continue;
        }
        auto rng = Rng::stream(cfg.rng_seed, 0xd1a6, b);
        for (std::size_t i = nodes.size(); i > 1; --i)
            std::swap(nodes[i - 1], nodes[rng.below(static_cast<std::uint32_t>(i))]);
        const std::size_t take = std::min<std::size_t>(nodes.size(), cfg.samples_per_bucket);

        std::vector<std::uint32_t> hops;
        for (std::size_t i = 0; i < take; ++i) {
            const NodeId seed = nodes[i];
            const auto dist = bfs_all(g, seed);
            if (source == ContextSource::Appr) {
                const auto vec = compute_appr(g, seed, cfg.appr, &ws);
                const auto table = build_alias(vec);
                auto crng = Rng::stream(cfg.rng_seed, 0xd1a7, seed);
                for (int c = 0; c < cfg.contexts_per_seed; ++c) {
                    const NodeId ctx = table.sample(crng);
                    if (ctx != seed && dist[ctx] >= 0)
                        hops.push_back(static_cast<std::uint32_t>(dist[ctx]));
                }
            } else {
                node_stream_pairs(g, cfg.walks, walk_cache, seed,
                                  [&](NodeId center, NodeId ctx) {
                                      if (center == seed && ctx != seed && dist[ctx] >= 0)
                                          hops.push_back(static_cast<std::uint32_t>(dist[ctx]));
                                  });
            }
        }
        std::sort(hops.begin(), hops.end());
        HopProfileRow row;
        row.bucket = buckets[b].label;
        row.lo = buckets[b].lo;
        row.hi = buckets[b].hi;
        row.seeds = take;
        row.samples = hops.size();
        row.p25 = percentile(hops, 0.25);
        row.p50 = percentile(hops, 0.50);
        row.p75 = percentile(hops, 0.75);
        row.p95 = percentile(hops, 0.95);
        profile.rows.push_back(row);
        if (cfg.keep_raw) profile.raw.push_back(hops);
    }
    return profile;
}

InstanceProfile instances_per_degree(const CsrGraph& g, ContextSource source,
                                     const DiagnosticsConfig& cfg) {
    InstanceProfile profile;
    profile.per_node.assign(g.num_nodes(), 0);

    if (source == ContextSource::Appr) {
        const auto batch = compute_all_appr(g, cfg.appr);
        if (batch.vectors.empty()) throw DataError("instances_per_degree: no APPR vectors");
        std::vector<AliasTable> samplers;
        samplers.reserve(batch.vectors.size());
        for (const auto& v : batch.vectors) samplers.push_back(build_alias(v));

        const std::uint64_t per_node =
            cfg.appr_pairs_per_node
                ? cfg.appr_pairs_per_node
                : training_budget(g.num_nodes(), cfg.walks.walk_len, cfg.walks.walks_per_node,
                                  cfg.walks.window) /
                      g.num_nodes();
        const std::uint64_t batch_size = 10ull * g.num_nodes();
        const std::uint64_t quota = batch_size / samplers.size();
        const std::uint64_t batches = per_node / quota;

        BatchRng rng(cfg.rng_seed, samplers);
        for (std::uint64_t b = 0; b < batches; ++b) {
            const auto batch_pairs = generate_batch(samplers, batch_size, rng);
            for (const auto& [seed, ctx] : batch_pairs.pairs) ++profile.per_node[seed];
        }
    } else {
        walk_context_pairs(g, cfg.walks,
                           [&](NodeId center, NodeId) { ++profile.per_node[center]; });
    }

    const auto buckets = default_degree_buckets(g);
    const auto members = bucket_members(g, buckets);
    for (std::size_t b = 0; b < buckets.size(); ++b) {
        if (members[b].empty()) {
            profile.notes.push_back("bucket " + buckets[b].label + " empty, omitted");
            continue;
        }
        InstanceCountRow row;
        row.bucket = buckets[b].label;
        row.lo = buckets[b].lo;
        row.hi = buckets[b].hi;
        row.nodes = members[b].size();
        double sum = 0, sq = 0;
        double mn = std::numeric_limits<double>::infinity(), mx = 0;
        for (NodeId u : members[b]) {
            const auto c = static_cast<double>(profile.per_node[u]);
            sum += c;
            sq += c * c;
            mn = std::min(mn, c);
            mx = std::max(mx, c);
        }
        const double n = static_cast<double>(row.nodes);
        row.mean = sum / n;
        row.min = mn;
        row.max = mx;
        row.stddev = std::sqrt(std::max(0.0, sq / n - row.mean * row.mean));
        profile.rows.push_back(row);
    }

    std::vector<double> counts, degrees;
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        if (g.degree(u) == 0) continue;
        counts.push_back(static_cast<double>(profile.per_node[u]));
        degrees.push_back(static_cast<double>(g.degree(u)));
    }
    profile.spearman_count_degree = counts.size() >= 2 ? spearman(counts, degrees) : 0.0;
    return profile;
}

std::vector<KcoreProfileRow> kcore_class_profile(const CsrGraph& g, const LabelSet& labels) {
    if (labels.num_classes() == 0) throw DataError("kcore_class_profile: no labels");
    const auto core = k_core_decomposition(g);
    std::vector<std::uint32_t> ks(core.begin(), core.end());
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    if (!ks.empty() && ks.front() == 0) ks.erase(ks.begin()); // isolated nodes form no core

    const double n_all = static_cast<double>(g.num_nodes());
    std::vector<double> global_frac(labels.num_classes(), 0);
    for (NodeId u = 0; u < g.num_nodes(); ++u)
        for (int c : labels.labels_of(u)) global_frac[c] += 1.0;
    for (auto& f : global_frac) f /= n_all;

    std::vector<KcoreProfileRow> rows;
    for (std::uint32_t k : ks) {
        std::uint64_t core_size = 0;
        std::vector<std::uint64_t> class_in_core(labels.num_classes(), 0);
        for (NodeId u = 0; u < g.num_nodes(); ++u) {
            if (core[u] < k) continue;
            ++core_size;
            for (int c : labels.labels_of(u)) ++class_in_core[c];
        }
        for (int c = 0; c < labels.num_classes(); ++c) {
            KcoreProfileRow row;
            row.k = k;
            row.class_id = c;
            row.core_fraction =
                core_size ? static_cast<double>(class_in_core[c]) / static_cast<double>(core_size) : 0.0;
            row.global_fraction = global_frac[c];
            if (row.core_fraction > 0 && row.global_fraction > 0) {
                row.ratio = row.core_fraction / row.global_fraction;
            } else {
                row.line_break = true;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<F1DeltaRow> per_class_f1_delta(const EvalReport& a, const EvalReport& b,
                                           const LabelSet& labels) {
    if (a.num_classes != b.num_classes || a.num_classes != labels.num_classes())
        throw DataError("per_class_f1_delta: class sets do not match");
    const auto sizes = labels.class_sizes();
    std::vector<F1DeltaRow> rows;
    for (int c = 0; c < a.num_classes; ++c) {
        F1DeltaRow row;
        row.class_id = c;
        row.class_size = sizes[c];
        row.f1_a = a.per_class_f1[c];
        row.f1_b = b.per_class_f1[c];
        row.delta = row.f1_a - row.f1_b;
        rows.push_back(row);
    }
    std::sort(rows.begin(), rows.end(), [](const F1DeltaRow& x, const F1DeltaRow& y) {
        if (x.class_size != y.class_size) return x.class_size < y.class_size;
        return x.class_id < y.class_id;
    });
    return rows;
}

namespace {

std::FILE* open_csv(const std::string& path, const ConfigPairs& config) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw DataError("cannot write csv: " + path);
    std::fputc('#', f);
    for (const auto& [k, v] : config) std::fprintf(f, " %s=%s", k.c_str(), v.c_str());
    std::fputc('\n', f);
    return f;
}

void close_csv(std::FILE* f, const std::string& path) {
    if (std::fclose(f) != 0) throw DataError("failed to flush csv: " + path);
}

} // namespace

void write_hop_profile_csv(const std::string& path, const HopProfile& profile,
                           const ConfigPairs& config) {
    std::FILE* f = open_csv(path, config);
    std::fprintf(f, "bucket_lo,bucket_hi,seeds,samples,p25,p50,p75,p95\n");
    for (const auto& r : profile.rows)
        std::fprintf(f, "%u,%u,%zu,%zu,%.6g,%.6g,%.6g,%.6g\n", r.lo, r.hi, r.seeds, r.samples,
                     r.p25, r.p50, r.p75, r.p95);
    for (const auto& n : profile.notes) std::fprintf(f, "# %s\n", n.c_str());
    close_csv(f, path);
}

void write_instances_csv(const std::string& path, const InstanceProfile& profile,
                         const ConfigPairs& config) {
    std::FILE* f = open_csv(path, config);
    std::fprintf(f, "bucket_lo,bucket_hi,nodes,mean,min,max,stddev\n");
    for (const auto& r : profile.rows)
        std::fprintf(f, "%u,%u,%zu,%.6g,%.6g,%.6g,%.6g\n", r.lo, r.hi, r.nodes, r.mean, r.min,
                     r.max, r.stddev);
    std::fprintf(f, "# spearman_count_degree=%.6g\n", profile.spearman_count_degree);
    for (const auto& n : profile.notes) std::fprintf(f, "# %s\n", n.c_str());
    close_csv(f, path);
}

void write_kcore_csv(const std::string& path, const std::vector<KcoreProfileRow>& rows,
                     const ConfigPairs& config) {
    std::FILE* f = open_csv(path, config);
    std::fprintf(f, "k,class,core_fraction,global_fraction,ratio,log_ratio\n");
    for (const auto& r : rows) {
        if (r.line_break)
            std::fprintf(f, "%u,%d,%.6g,%.6g,,break\n", r.k, r.class_id, r.core_fraction,
                         r.global_fraction);
        else
            std::fprintf(f, "%u,%d,%.6g,%.6g,%.6g,%.6g\n", r.k, r.class_id, r.core_fraction,
                         r.global_fraction, r.ratio, std::log(r.ratio));
    }
    close_csv(f, path);
}

void write_f1_delta_csv(const std::string& path, const std::vector<F1DeltaRow>& rows,
                        const ConfigPairs& config) {
    std::FILE* f = open_csv(path, config);
    std::fprintf(f, "class,class_size,f1_a,f1_b,delta\n");
    for (const auto& r : rows)
        std::fprintf(f, "%d,%" PRIu64 ",%.6g,%.6g,%.6g\n", r.class_id, r.class_size, r.f1_a,
                     r.f1_b, r.delta);
    close_csv(f, path);
}

} // namespace lasagne
