#include "zoolab/walk.hpp"

#include <algorithm>
#include <cmath>

namespace zoolab {

WalkPath simulate_walk(Graph& g, VId x, int64_t n_steps, Rng& rng) {
    WalkPath p;
    p.start = x;
    p.steps.reserve(size_t(n_steps) + 1);
    p.steps.push_back(x);
    std::vector<VId> buf;
    VId v = x;
    for (int64_t t = 0; t < n_steps; ++t) {
        v = walk_step(g, v, buf, rng);
        p.steps.push_back(v);
    }
    return p;
}

int64_t trace_size(const WalkPath& path, int64_t t0, int64_t t1) {
    if (t0 < 0 || t1 < t0 || t1 > path.length())
        throw config_error("trace_size: range out of bounds");
    VSet seen;
    for (int64_t t = t0; t <= t1; ++t) seen.insert(path.steps[size_t(t)]);
    return int64_t(seen.size());
}

// ---------------------------------------------------------------------------
// Spectral radius
// ---------------------------------------------------------------------------
std::vector<double> return_probability_series(const GraphSpec& spec, int64_t n_max) {
    using K = GraphSpec::Kind;
    std::vector<double> p0(size_t(n_max) + 1, 0.0);
    if (spec.kind == K::Tree || spec.kind == K::Line ||
        (spec.kind == K::Lattice && spec.param == 1)) {
        // distance chain: 0 -> 1 surely; k >= 1 goes up with (d-1)/d
        double d = double(spec.degree());
        double up = (d - 1.0) / d, down = 1.0 / d;
        std::vector<double> cur(size_t(n_max) + 2, 0.0), nxt(size_t(n_max) + 2, 0.0);
        cur[0] = 1.0;
        p0[0] = 1.0;
        for (int64_t n = 1; n <= n_max; ++n) {
            std::fill(nxt.begin(), nxt.begin() + n + 2, 0.0);
            for (int64_t k = 0; k <= n; ++k) {
                double m = cur[size_t(k)];
                if (m == 0.0) continue;
                if (k == 0) {
                    nxt[1] += m;
                } else {
                    nxt[size_t(k) + 1] += m * up;
                    nxt[size_t(k) - 1] += m * down;
                }
            }
            std::swap(cur, nxt);
            p0[size_t(n)] = cur[0];
        }
        return p0;
    }
    if (spec.kind == K::Cycle) {
        int n = spec.param;
        std::vector<double> cur(size_t(n), 0.0), nxt(size_t(n), 0.0);
        cur[0] = 1.0;
        p0[0] = 1.0;
        for (int64_t t = 1; t <= n_max; ++t) {
            std::fill(nxt.begin(), nxt.end(), 0.0);
            for (int i = 0; i < n; ++i) {
                if (cur[size_t(i)] == 0.0) continue;
                nxt[size_t((i + 1) % n)] += cur[size_t(i)] * 0.5;
                nxt[size_t((i + n - 1) % n)] += cur[size_t(i)] * 0.5;
            }
            std::swap(cur, nxt);
            p0[size_t(t)] = cur[0];
        }
        return p0;
    }
    throw config_error("return_probability_series: exact method only for tree/line/cycle");
}

Estimate estimate_spectral_radius(const GraphSpec& spec, int64_t n_max, uint64_t trials, Rng rng) {
    if (n_max < 2 || n_max % 2 != 0)
        throw config_error("estimate_spectral_radius: n_max must be even and >= 2");
    using K = GraphSpec::Kind;
    Estimate e;
    e.horizon = n_max;
    if (spec.kind == K::Tree || spec.kind == K::Line || spec.kind == K::Cycle ||
        (spec.kind == K::Lattice && spec.param == 1)) {
        auto series = return_probability_series(spec, n_max);
        e.value = std::pow(series[size_t(n_max)], 1.0 / double(n_max));
        e.stderr_ = 0.0;
        e.trials = 0;
        e.method = "exact-distance-chain";
        return e;
    }
    auto g = make_graph(spec);
    VId o = g->origin();
    uint64_t hits = 0;
    std::vector<VId> buf;
    for (uint64_t t = 0; t < trials; ++t) {
        Rng tr = rng.derive(t);
        VId v = o;
        for (int64_t s = 0; s < n_max; ++s) v = walk_step(*g, v, buf, tr);
        if (v == o) ++hits;
    }
    if (hits == 0) throw config_error("estimate_spectral_radius: underflow, use exact method");
    double p = double(hits) / double(trials);
    e.value = std::pow(p, 1.0 / double(n_max));
    e.stderr_ = binomial_stderr(p, trials) * e.value / (p * double(n_max));
    e.trials = int64_t(trials);
    e.method = "mc-return-counting";
    return e;
}

// ---------------------------------------------------------------------------
// Escape probabilities and capacity
// ---------------------------------------------------------------------------
namespace {

// Distance certificate used on regular trees: once the walk sits this far
// beyond anything it could still hit, the return probability is below
// |K| * (d-1)^-60 and the walk counts as escaped.
constexpr int kTreeEscapeMargin = 60;

struct TrialOutcome {
    bool escaped_half;
    bool escaped_full;
};

// One escape trial. On regular trees, the neighbor index is the edge colour,
// so dist(x, walk) is maintained by a letter stack.
TrialOutcome escape_trial(Graph& g, const VSet& k_set, VId x, int64_t horizon, Rng tr,
                          bool tree_cert, int cert_dist) {
    std::vector<VId> buf;
    std::vector<uint8_t> word;
    VId v = x;
    int64_t half = horizon / 2 > 0 ? horizon / 2 : 1;
    TrialOutcome out{true, true};
    for (int64_t s = 1; s <= horizon; ++s) {
        g.neighbors(v, buf);
        uint64_t c = tr.next_below(buf.size());
        v = buf[size_t(c)];
        if (tree_cert) {
            if (!word.empty() && word.back() == uint8_t(c))
                word.pop_back();
            else
                word.push_back(uint8_t(c));
        }
        if (k_set.count(v)) {
            out.escaped_full = false;
            if (s <= half) out.escaped_half = false;
            break;
        }
        if (tree_cert && int(word.size()) > cert_dist) break; // certified escape
    }
    return out;
}

} // namespace

Estimate escape_probability(Graph& g, const VSet& k_set, VId x, int64_t horizon, uint64_t trials,
                            Rng rng) {
    Estimate e;
    e.horizon = horizon;
    e.trials = int64_t(trials);
    if (k_set.empty()) {
        e.value = 1.0;
        e.method = "empty-set";
        return e;
    }
    if (horizon < 1) throw config_error("escape_probability: horizon must be >= 1");
    if (trials < 1) throw config_error("escape_probability: trials must be >= 1");

    bool tree_cert = g.is_regular_tree();
    // any connected superset of k_set containing x has diameter < |K|+2
    int cert_dist = int(k_set.size()) + 2 + kTreeEscapeMargin;

    uint64_t esc_half = 0, esc_full = 0;
    for (uint64_t t = 0; t < trials; ++t) {
        auto o = escape_trial(g, k_set, x, horizon, rng.derive(t), tree_cert, cert_dist);
        if (o.escaped_full) ++esc_full;
        if (o.escaped_half) ++esc_half;
    }
    double p_full = double(esc_full) / double(trials);
    double p_half = double(esc_half) / double(trials);
    e.value = p_full;
    e.stderr_ = binomial_stderr(p_full, trials);
    e.converged = std::abs(p_half - p_full) < 2.0 * std::max(e.stderr_, 1e-12);
    e.method = tree_cert ? "mc-tree-certified" : "mc-horizon";
    return e;
}

Estimate capacity(Graph& g, const VSet& k_set, int64_t horizon, uint64_t trials, Rng rng) {
    if (k_set.empty()) throw config_error("capacity: K must be nonempty");
    Estimate e;
    e.horizon = horizon;
    e.trials = int64_t(trials);
    double var = 0.0;
    bool conv = true;
    std::vector<VId> members(k_set.begin(), k_set.end());
    std::sort(members.begin(), members.end());
    uint64_t idx = 0;
    for (VId x : members) {
        Estimate ex = escape_probability(g, k_set, x, horizon, trials, rng.derive(idx++));
        e.value += ex.value;
        var += ex.stderr_ * ex.stderr_;
        conv = conv && ex.converged;
    }
    e.stderr_ = std::sqrt(var);
    e.converged = conv;
    e.method = "mc-sum-escape";
    return e;
}

RestrictedCapacity restricted_capacity_sum(Graph& g, const VSet& a, const std::vector<VId>& b,
                                           int64_t horizon, uint64_t trials, double rho, Rng rng) {
    VSet abar = closure(g, a);
    VSet bd = ext_boundary(g, a);
    for (VId y : b)
        if (!bd.count(y)) throw config_error("restricted_capacity_sum: B must lie in ext bd A");

    RestrictedCapacity out;
    out.rho_used = rho;
    out.bound = (1.0 - rho) * (1.0 - rho) * double(abar.size()) -
                (double(bd.size()) - double(b.size()));
    Estimate& e = out.sum;
    e.horizon = horizon;
    e.trials = int64_t(trials);
    double var = 0.0;
    uint64_t idx = 0;
    for (VId y : b) {
        // unbiased p^2 via the product of two independent halves
        Estimate e1 = escape_probability(g, abar, y, horizon, trials / 2, rng.derive(2 * idx));
        Estimate e2 = escape_probability(g, abar, y, horizon, trials / 2, rng.derive(2 * idx + 1));
        ++idx;
        e.value += e1.value * e2.value;
        var += e1.value * e1.value * e2.stderr_ * e2.stderr_ +
               e2.value * e2.value * e1.stderr_ * e1.stderr_;
    }
    e.stderr_ = std::sqrt(var);
    e.method = "mc-split-product";
    return out;
}

VSet random_connected_set(Graph& g, VId seed_vertex, size_t size, Rng& rng) {
    VSet a{seed_vertex};
    std::vector<VId> frontier = g.neighbors(seed_vertex);
    std::vector<VId> nb;
    while (a.size() < size && !frontier.empty()) {
        size_t i = size_t(rng.next_below(frontier.size()));
        VId v = frontier[i];
        frontier[i] = frontier.back();
        frontier.pop_back();
        if (a.count(v)) continue;
        a.insert(v);
        g.neighbors(v, nb);
        for (VId u : nb)
            if (!a.count(u)) frontier.push_back(u);
    }
    return a;
}

} // namespace zoolab
