#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lasagne/appr.hpp"
#include "lasagne/common.hpp"
#include "lasagne/eval.hpp"
#include "lasagne/graph.hpp"
#include "lasagne/walks.hpp"

namespace lasagne {

enum class ContextSource { Appr, Walks };

ContextSource context_source_from_string(const std::string& name);
const char* context_source_name(ContextSource src);

struct DegreeBucket {
    std::uint32_t lo, hi; // [lo, hi)
    std::string label;
};

// Powers of two starting at [1,2), covering every observed degree >= 1.
std::vector<DegreeBucket> default_degree_buckets(const CsrGraph& g);
int bucket_of(const std::vector<DegreeBucket>& buckets, std::uint32_t degree);

struct DiagnosticsConfig {
    ApprConfig appr;
    WalkConfig walks;
    int samples_per_bucket = 100; // seeds sampled per degree bucket
    int contexts_per_seed = 1000; // context draws per seed (appr hop profile)
    std::uint64_t rng_seed = 1;
    bool keep_raw = false;
    std::uint64_t appr_pairs_per_node = 0; // 0: training-budget default
};

struct HopProfileRow {
    std::string bucket;
    std::uint32_t lo = 0, hi = 0;
    std::size_t seeds = 0;
    std::size_t samples = 0;
    double p25 = 0, p50 = 0, p75 = 0, p95 = 0;
};

struct HopProfile {
    std::vector<HopProfileRow> rows;
    std::vector<std::string> notes;             // omitted empty buckets etc.
    std::vector<std::vector<std::uint32_t>> raw; // per row, when keep_raw
};

HopProfile hop_distance_profile(const CsrGraph& g, ContextSource source,
                                const DiagnosticsConfig& cfg);

struct InstanceCountRow {
    std::string bucket;
    std::uint32_t lo = 0, hi = 0;
    std::size_t nodes = 0;
    double mean = 0, min = 0, max = 0, stddev = 0;
};

struct InstanceProfile {
    std::vector<InstanceCountRow> rows;
    double spearman_count_degree = 0;
    std::vector<std::uint64_t> per_node; // pair count per node
    std::vector<std::string> notes;
};

InstanceProfile instances_per_degree(const CsrGraph& g, ContextSource source,
                                     const DiagnosticsConfig& cfg);

struct KcoreProfileRow {
    std::uint32_t k = 0;
    int class_id = 0;
    double core_fraction = 0;   // share of k-core nodes carrying the class
    double global_fraction = 0; // share of all nodes carrying the class
    double ratio = 0;           // core_fraction / global_fraction, 0 on line break
    bool line_break = false;    // class absent from this core
};

std::vector<KcoreProfileRow> kcore_class_profile(const CsrGraph& g, const LabelSet& labels);

struct F1DeltaRow {
    int class_id = 0;
    std::uint64_t class_size = 0;
    double f1_a = 0, f1_b = 0;
    double delta = 0; // f1_a - f1_b
};

// Rows sorted by class size, then class id.
std::vector<F1DeltaRow> per_class_f1_delta(const EvalReport& a, const EvalReport& b,
                                           const LabelSet& labels);

// Spearman rank correlation with midrank ties.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

using ConfigPairs = std::vector<std::pair<std::string, std::string>>;

void write_hop_profile_csv(const std::string& path, const HopProfile& profile,
                           const ConfigPairs& config);
void write_instances_csv(const std::string& path, const InstanceProfile& profile,
                         const ConfigPairs& config);
void write_kcore_csv(const std::string& path, const std::vector<KcoreProfileRow>& rows,
                     const ConfigPairs& config);
void write_f1_delta_csv(const std::string& path, const std::vector<F1DeltaRow>& rows,
                        const ConfigPairs& config);

} // namespace lasagne
