#include "zoolab/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "zoolab/util.hpp"

namespace zoolab {

ClusterReport clusters(Graph& g, const WindowSample& ws, const WindowSample::Filter& filter) {
    ClusterReport rep;
    auto mu = ws.occupation(filter);
    rep.occupied_count = mu.size();
    rep.animal_count = ws.animal_count(filter);
    if (mu.empty()) return rep;

    // dense indices over occupied vertices
    std::unordered_map<VId, uint32_t> index;
    std::vector<VId> occ;
    occ.reserve(mu.size());
    for (const auto& [v, m] : mu) {
        index.emplace(v, uint32_t(occ.size()));
        occ.push_back(v);
    }
    UnionFind uf(occ.size());
    std::vector<VId> nb;
    for (uint32_t i = 0; i < occ.size(); ++i) {
        g.neighbors(occ[i], nb);
        for (VId u : nb) {
            auto it = index.find(u);
            if (it != index.end() && ws.window.count(u)) uf.unite(i, it->second);
        }
    }

    std::unordered_map<uint32_t, uint64_t> comp_size;
    for (uint32_t i = 0; i < occ.size(); ++i) ++comp_size[uf.find(i)];
    rep.component_sizes.reserve(comp_size.size());
    for (const auto& [root, sz] : comp_size) rep.component_sizes.push_back(sz);
    std::sort(rep.component_sizes.rbegin(), rep.component_sizes.rend());

    auto oit = index.find(ws.center);
    rep.origin_occupied = oit != index.end();

    int inner_radius = ws.radius / 4;
    std::unordered_map<uint32_t, int> touches; // bit 1: inner ball, bit 2: sphere
    for (uint32_t i = 0; i < occ.size(); ++i) {
        int d = ws.window.at(occ[i]);
        int mask = 0;
        if (d <= inner_radius) mask |= 1;
        if (d == ws.radius) mask |= 2;
        if (mask) touches[uf.find(i)] |= mask;
    }
    for (const auto& [root, mask] : touches)
        if (mask == 3) ++rep.boundary_crossing_clusters;

    if (rep.origin_occupied) {
        uint32_t oroot = uf.find(oit->second);
        rep.origin_cluster_size = comp_size[oroot];
        rep.crossing = (touches.count(oroot) && (touches[oroot] & 2));
    }
    return rep;
}

CrossingResult crossing_probability(const GraphSpec& spec, const AnimalLaw& law, double lambda,
                                    uint64_t volume_cap, int radius, uint64_t trials,
                                    uint64_t seed, unsigned threads) {
    if (trials < 1) throw config_error("crossing_probability: trials must be >= 1");
    std::vector<uint8_t> crossed(trials, 0);
    Rng seeder = Rng::from(seed, "crossing");
    parallel_for(trials, threads, [&](uint64_t t) {
        ZooRealization z(spec, law, lambda, volume_cap, seeder.derive(t).key());
        const WindowSample& ws = z.window_sample(z.graph().origin(), radius);
        crossed[t] = clusters(z.graph(), ws).crossing ? 1 : 0;
    });
    uint64_t hits = 0;
    for (uint8_t c : crossed) hits += c;
    CrossingResult r;
    r.estimate.value = double(hits) / double(trials);
    r.estimate.stderr_ = binomial_stderr(r.estimate.value, trials);
    r.estimate.trials = int64_t(trials);
    r.estimate.method = "mc-origin-crossing";
    r.ci = wilson_interval(hits, trials);
    return r;
}

SweepResult lambda_sweep(const GraphSpec& spec, const AnimalLaw& law, uint64_t volume_cap,
                         int radius, const std::vector<double>& lambda_grid, uint64_t trials,
                         uint64_t seed, unsigned threads) {
    if (lambda_grid.empty()) throw config_error("lambda_sweep: empty grid");
    for (size_t i = 1; i < lambda_grid.size(); ++i)
        if (lambda_grid[i] < lambda_grid[i - 1])
            throw config_error("lambda_sweep: grid must be ascending");
    double lambda_hi = lambda_grid.back();

    std::vector<std::vector<uint8_t>> crossed(lambda_grid.size(),
                                              std::vector<uint8_t>(trials, 0));
    std::vector<uint8_t> violation(trials, 0);
    Rng seeder = Rng::from(seed, "sweep");
    parallel_for(trials, threads, [&](uint64_t t) {
        ZooRealization z(spec, law, lambda_hi, volume_cap, seeder.derive(t).key());
        const WindowSample& ws = z.window_sample(z.graph().origin(), radius);
        bool prev = false;
        for (size_t i = 0; i < lambda_grid.size(); ++i) {
            WindowSample::Filter f;
            f.level_max = lambda_grid[i] / lambda_hi;
            bool c = clusters(z.graph(), ws, f).crossing;
            if (prev && !c) violation[t] = 1; // cannot happen under the coupling
            crossed[i][t] = c ? 1 : 0;
            prev = c;
        }
    });

    SweepResult r;
    r.lambda_grid = lambda_grid;
    r.trials = trials;
    r.monotone = std::find(violation.begin(), violation.end(), uint8_t(1)) == violation.end();
    for (size_t i = 0; i < lambda_grid.size(); ++i) {
        uint64_t hits = 0;
        for (uint8_t c : crossed[i]) hits += c;
        r.crossing_prob.push_back(double(hits) / double(trials));
        r.ci.push_back(wilson_interval(hits, trials));
    }
    return r;
}

SweepResult cap_sweep(const GraphSpec& spec, const AnimalLaw& law, double lambda,
                      const std::vector<uint64_t>& caps, int radius, uint64_t trials,
                      uint64_t seed, unsigned threads) {
    if (caps.empty()) throw config_error("cap_sweep: empty cap list");
    for (size_t i = 1; i < caps.size(); ++i)
        if (caps[i] < caps[i - 1]) throw config_error("cap_sweep: caps must be ascending");
    uint64_t cap_hi = caps.back();

    std::vector<std::vector<uint8_t>> crossed(caps.size(), std::vector<uint8_t>(trials, 0));
    std::vector<uint8_t> violation(trials, 0);
    Rng seeder = Rng::from(seed, "capsweep");
    parallel_for(trials, threads, [&](uint64_t t) {
        ZooRealization z(spec, law, lambda, cap_hi, seeder.derive(t).key());
        const WindowSample& ws = z.window_sample(z.graph().origin(), radius);
        bool prev = false;
        for (size_t i = 0; i < caps.size(); ++i) {
            WindowSample::Filter f;
            f.volume_cap = caps[i];
            bool c = clusters(z.graph(), ws, f).crossing;
            if (prev && !c) violation[t] = 1;
            crossed[i][t] = c ? 1 : 0;
            prev = c;
        }
    });

    SweepResult r;
    for (uint64_t c : caps) r.lambda_grid.push_back(double(c)); // grid column reused for caps
    r.trials = trials;
    r.monotone = std::find(violation.begin(), violation.end(), uint8_t(1)) == violation.end();
    for (size_t i = 0; i < caps.size(); ++i) {
        uint64_t hits = 0;
        for (uint8_t c : crossed[i]) hits += c;
        r.crossing_prob.push_back(double(hits) / double(trials));
        r.ci.push_back(wilson_interval(hits, trials));
    }
    return r;
}

double tree_site_crossing_probability(int degree, double p, int radius) {
    if (radius < 0) throw config_error("tree_site_crossing_probability: radius must be >= 0");
    if (radius == 0) return p;
    // s_k: prob that one child subtree carries an open path of k more levels,
    // counting the child itself; branching factor degree-1 below the root.
    double s = p; // k = 1
    for (int k = 2; k <= radius; ++k) {
        double miss = 1.0 - s;
        s = p * (1.0 - std::pow(miss, degree - 1));
    }
    return p * (1.0 - std::pow(1.0 - s, degree));
}

LambdaCResult estimate_lambda_c(const GraphSpec& spec, const AnimalLaw& law, uint64_t volume_cap,
                                int radius, double lambda_lo, double lambda_hi, double tol,
                                double threshold, uint64_t trials, uint64_t seed,
                                unsigned threads) {
    if (!(tol > 0.0)) throw config_error("estimate_lambda_c: tol must be > 0");
    if (!(lambda_lo > 0.0) || lambda_lo >= lambda_hi)
        throw config_error("estimate_lambda_c: bad initial range");

    LambdaCResult out;
    if (threshold <= 0.0) {
        // critical-window calibration (trees): the crossing level at p_c
        if (spec.kind != GraphSpec::Kind::Tree)
            throw config_error("estimate_lambda_c: calibrated threshold needs a tree spec");
        double pc = 1.0 / double(spec.param - 1);
        threshold = tree_site_crossing_probability(spec.param, pc, radius);
    }
    out.threshold_used = threshold;

    Rng seeder = Rng::from(seed, "lambdac");
    uint64_t eval = 0;
    auto above = [&](double lambda) -> int {
        // returns +1 / -1 when decisive, 0 when within noise
        auto r = crossing_probability(spec, law, lambda, volume_cap, radius, trials,
                                      seeder.derive(eval++).key(), threads);
        ++out.evaluations;
        if (r.ci.lo > threshold) return +1;
        if (r.ci.hi < threshold) return -1;
        return 0;
    };

    int lo_side = above(lambda_lo);
    int hi_side = above(lambda_hi);
    if (lo_side > 0 || hi_side < 0)
        throw config_error("estimate_lambda_c: initial range does not bracket the threshold");

    double lo = lambda_lo, hi = lambda_hi;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        int side = above(mid);
        if (side == 0) {
            // undecided at this sample size: midpoint estimate is at the
            // threshold level; shrink both ends toward it conservatively
            double quarter = 0.25 * (hi - lo);
            lo = std::max(lo, mid - quarter);
            hi = std::min(hi, mid + quarter);
            continue;
        }
        if (side > 0)
            hi = mid;
        else
            lo = mid;
    }
    out.interval = {lo, hi};
    return out;
}

uint64_t uniqueness_probe(Graph& g, const WindowSample& ws, const WindowSample::Filter& filter) {
    return clusters(g, ws, filter).boundary_crossing_clusters;
}

} // namespace zoolab
