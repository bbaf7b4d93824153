#pragma once

#include <cstdint>
#include <vector>

#include "zoolab/estimate.hpp"
#include "zoolab/zoo.hpp"

namespace zoolab {

// Disjoint-set forest with path halving and union by size.
class UnionFind {
public:
    explicit UnionFind(size_t n) : parent_(n), size_(n, 1) {
        for (size_t i = 0; i < n; ++i) parent_[i] = uint32_t(i);
    }
    uint32_t find(uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(uint32_t a, uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }
    uint32_t component_size(uint32_t x) { return size_[find(x)]; }

private:
    std::vector<uint32_t> parent_;
    std::vector<uint32_t> size_;
};

struct ClusterReport {
    std::vector<uint64_t> component_sizes; // descending
    bool origin_occupied = false;
    uint64_t origin_cluster_size = 0;
    bool crossing = false;               // origin cluster touches the boundary sphere
    uint64_t boundary_crossing_clusters = 0; // clusters linking ball(radius/4) to the sphere
    uint64_t occupied_count = 0;
    uint64_t animal_count = 0;
};

// Connected components of the occupied set induced inside the window.
ClusterReport clusters(Graph& g, const WindowSample& ws, const WindowSample::Filter& filter);
inline ClusterReport clusters(Graph& g, const WindowSample& ws) {
    return clusters(g, ws, WindowSample::Filter{});
}

// Fraction of seeds whose origin cluster crosses; Wilson CI in the estimate.
struct CrossingResult {
    Estimate estimate;
    Interval ci;
};
CrossingResult crossing_probability(const GraphSpec& spec, const AnimalLaw& law, double lambda,
                                    uint64_t volume_cap, int radius, uint64_t trials,
                                    uint64_t seed, unsigned threads = 1);

// Coupled lambda sweep: one realization per seed at the top intensity, graded
// filters below it, so per-seed crossing indicators are monotone by
// construction (and asserted).
struct SweepResult {
    std::vector<double> lambda_grid;
    std::vector<double> crossing_prob;
    std::vector<Interval> ci;
    uint64_t trials = 0;
    bool monotone = true;
};
SweepResult lambda_sweep(const GraphSpec& spec, const AnimalLaw& law, uint64_t volume_cap,
                         int radius, const std::vector<double>& lambda_grid, uint64_t trials,
                         uint64_t seed, unsigned threads = 1);

// Coupled volume-cap sweep at fixed lambda (shared sample, cap filters).
SweepResult cap_sweep(const GraphSpec& spec, const AnimalLaw& law, double lambda,
                      const std::vector<uint64_t>& caps, int radius, uint64_t trials,
                      uint64_t seed, unsigned threads = 1);

// CI-aware bisection of the crossing probability against `threshold`.
// threshold = 0 requests the critical-window calibration: the exact crossing
// probability of site percolation at p_c on the same window, from the
// branching recursion (trees only).
struct LambdaCResult {
    Interval interval;
    double threshold_used = 0.5;
    int evaluations = 0;
};
LambdaCResult estimate_lambda_c(const GraphSpec& spec, const AnimalLaw& law, uint64_t volume_cap,
                                int radius, double lambda_lo, double lambda_hi, double tol,
                                double threshold, uint64_t trials, uint64_t seed,
                                unsigned threads = 1);

// Exact crossing probability of Bernoulli(p) site percolation from the root
// of tree(d) to the sphere at `radius` (branching recursion).
double tree_site_crossing_probability(int degree, double p, int radius);

// Number of distinct clusters joining ball(radius/4) to the boundary sphere.
uint64_t uniqueness_probe(Graph& g, const WindowSample& ws, const WindowSample::Filter& filter);
inline uint64_t uniqueness_probe(Graph& g, const WindowSample& ws) {
    return uniqueness_probe(g, ws, WindowSample::Filter{});
}

} // namespace zoolab
