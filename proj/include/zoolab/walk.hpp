#pragma once

#include <cstdint>
#include <vector>

#include "zoolab/estimate.hpp"
#include "zoolab/graph.hpp"
#include "zoolab/rng.hpp"

namespace zoolab {

struct WalkPath {
    VId start = kNoVertex;
    std::vector<VId> steps; // steps[0] == start
    int64_t length() const { return int64_t(steps.size()) - 1; }
};

WalkPath simulate_walk(Graph& g, VId x, int64_t n_steps, Rng& rng);

// |{X(t0),...,X(t1)}|; throws config_error on a bad range.
int64_t trace_size(const WalkPath& path, int64_t t0, int64_t t1);

inline VId walk_step(Graph& g, VId v, std::vector<VId>& buf, Rng& rng) {
    g.neighbors(v, buf);
    return buf[rng.next_below(buf.size())];
}

// rho via p_{n_max}(o,o)^{1/n_max}. Trees, line and cycles go through the
// exact distance-chain dynamic program; everything else is Monte Carlo return
// counting (throws config_error with "underflow, use exact method" when no
// returns were seen).
Estimate estimate_spectral_radius(const GraphSpec& spec, int64_t n_max, uint64_t trials, Rng rng);

// Exact p_n(o,o) for tree/line/cycle via the distance birth-death chain.
std::vector<double> return_probability_series(const GraphSpec& spec, int64_t n_max);

// Monte Carlo P_x(T_K^+ > horizon), an upper-bound estimator of e_K(x).
// Per-trial rng streams depend only on (rng, trial), so nested sets K sub K'
// couple exactly. converged: doubling the horizon moved the value < 2 stderr.
// On trees a distance certificate stops walks early (escape prob error
// below 2^-45).
Estimate escape_probability(Graph& g, const VSet& k_set, VId x, int64_t horizon, uint64_t trials,
                            Rng rng);

// cap(K) = sum over x in K of escape estimates; stderr combined in quadrature.
Estimate capacity(Graph& g, const VSet& k_set, int64_t horizon, uint64_t trials, Rng rng);

// Sum over y in B of P_y(T_closure(A)^+ = inf)^2, estimated without bias by a
// split-sample product, plus the lower bound it is checked against.
struct RestrictedCapacity {
    Estimate sum;                // sum of squared escape probabilities
    double bound = 0.0;          // (1-rho)^2 |closure(A)| - (|ext bd A| - |B|)
    double rho_used = 0.0;
};
RestrictedCapacity restricted_capacity_sum(Graph& g, const VSet& a, const std::vector<VId>& b,
                                           int64_t horizon, uint64_t trials, double rho, Rng rng);

// Uniformly grown random connected set of the given size (BFS-biased growth;
// used by tests and the capacity experiments).
VSet random_connected_set(Graph& g, VId seed_vertex, size_t size, Rng& rng);

} // namespace zoolab
