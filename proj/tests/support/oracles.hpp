#pragma once

// Slow reference implementations used only to cross-check library results.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "lasagne/graph.hpp"

namespace oracles {

using lasagne::CsrGraph;
using lasagne::NodeId;

// k-core by literal repeated peeling: strip every vertex of degree < k until
// stable, then the survivors have core number >= k.
inline std::vector<std::uint32_t> kcore_by_peeling(const CsrGraph& g) {
    const NodeId n = g.num_nodes();
    std::vector<std::uint32_t> core(n, 0);
    for (std::uint32_t k = 1;; ++k) {
        std::vector<char> alive(n, 1);
        std::vector<std::uint32_t> deg(n);
        for (NodeId v = 0; v < n; ++v) deg[v] = g.degree(v);
        bool changed = true;
        while (changed) {
            changed = false;
            for (NodeId v = 0; v < n; ++v) {
                if (alive[v] && deg[v] < k) {
                    alive[v] = 0;
                    changed = true;
                    for (NodeId u : g.neighbors(v))
                        if (alive[u]) --deg[u];
                }
            }
        }
        bool any = false;
        for (NodeId v = 0; v < n; ++v)
            if (alive[v]) {
                core[v] = k;
                any = true;
            }
        if (!any) return core;
    }
}

inline double brute_cut(const CsrGraph& g, const std::vector<char>& in_cluster) {
    double cut = 0;
    for (NodeId u = 0; u < g.num_nodes(); ++u)
        for (NodeId v : g.neighbors(u))
            if (u < v && in_cluster[u] != in_cluster[v]) cut += 1;
    return cut;
}

inline double brute_volume(const CsrGraph& g, const std::vector<char>& in_cluster) {
    double vol = 0;
    for (NodeId u = 0; u < g.num_nodes(); ++u)
        if (in_cluster[u]) vol += g.degree(u);
    return vol;
}

inline double brute_internal_edges(const CsrGraph& g, const std::vector<char>& in_cluster) {
    double internal = 0;
    for (NodeId u = 0; u < g.num_nodes(); ++u)
        for (NodeId v : g.neighbors(u))
            if (u < v && in_cluster[u] && in_cluster[v]) internal += 1;
    return internal;
}

// Exact personalized PageRank with teleport probability beta by plain power
// iteration, independent of the linear solve used in the library.
inline std::vector<double> ppr_power_iteration(const CsrGraph& g, NodeId seed, double beta,
                                               int iters = 20000, double tol = 1e-15) {
    const NodeId n = g.num_nodes();
    std::vector<double> pr(n, 0.0), next(n, 0.0);
    pr[seed] = 1.0;
    for (int it = 0; it < iters; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        next[seed] += beta;
        for (NodeId u = 0; u < n; ++u) {
            if (pr[u] == 0.0 || g.degree(u) == 0) continue;
            const double share = (1.0 - beta) * pr[u] / g.degree(u);
            for (NodeId v : g.neighbors(u)) next[v] += share;
        }
        double diff = 0;
        for (NodeId v = 0; v < n; ++v) diff += std::abs(next[v] - pr[v]);
        pr.swap(next);
        if (diff < tol) break;
    }
    return pr;
}

// Upper-tail p-value for a chi-square statistic.
inline double chi_squared_pvalue(double statistic, double dof) {
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, statistic));
}

// Central-difference gradient of f at x.
inline std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
    double h = 1e-6) {
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = x[i];
        x[i] = orig + h;
        const double fp = f(x);
        x[i] = orig - h;
        const double fm = f(x);
        x[i] = orig;
        grad[i] = (fp - fm) / (2 * h);
    }
    return grad;
}

inline double linear_interp_percentile(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    if (xs.empty()) return 0;
    const double pos = q / 100.0 * (static_cast<double>(xs.size()) - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    if (lo == hi) return xs[lo];
    return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

} // namespace oracles
