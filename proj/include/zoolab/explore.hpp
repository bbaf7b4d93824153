#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "zoolab/estimate.hpp"
#include "zoolab/zoo.hpp"

namespace zoolab {

// ---------------------------------------------------------------------------
// Fattening exploration (worms engine): E_{n+1} = E_n u Tr(restriction through
// B_n), B_{n+1} = ext bd E_{n+1} minus ext bd E_n. Restriction filters across
// steps are provably disjoint, so each step consumes an independent package.
// ---------------------------------------------------------------------------
struct ExplorationState {
    bool alive = false;
    uint64_t steps = 0; // completed fattening steps (excluding step 0)
    std::vector<uint64_t> e_sizes;
    std::vector<uint64_t> b_sizes;
    std::vector<uint64_t> c_sizes;
    std::vector<uint8_t> growth_ok; // |E_n| >= a |E_{n-1}|
    std::vector<uint64_t> animals_used;
    uint64_t duplicate_animals = 0;       // structural audit, must stay 0
    bool boundary_bound_ok = true;        // |bd E_n| - |B_n| <= d |E_{n-1}| after growth
    uint64_t final_cluster_size = 0;
};

ExplorationState worms_explore(ZooRealization& zoo, VId origin, uint64_t volume_cap, double a,
                               uint64_t max_steps, size_t e_guard = 2000000);

// Default growth factor a = d / (2 c2) with c2 = (1-rho)^2 (1+h) / 2.
double default_growth_a(const GraphSpec& spec, uint64_t seed);

// ---------------------------------------------------------------------------
// Free-product branching engine.
// ---------------------------------------------------------------------------

// Psi_i(x, A): x itself when its G_i-neighbourhood misses closure(A), else the
// first vertex of the other factor's neighbourhood in canonical order.
VId psi_map(Graph& g, VId x, const VSet& a, int i);
VId psi_inverse(Graph& g, VId y, const VSet& a, int i);

// Phi_i: Psi_i(x, A) if both x and Psi_i(x, A) carry at least one animal of
// the sprinkle view, else absent.
std::optional<VId> phi_map(Graph& g, VId x, const VSet& a, int i, ZooView& sprinkle);

struct BranchingState {
    bool alive = false;
    std::vector<uint64_t> generation_sizes; // |B_1|, |B_2|, ...
    uint64_t explored_size = 0;
    bool offspring_disjoint = true; // cutpoint structure audit
    uint64_t animals_used = 0;
    int direction = 1;
};

BranchingState free_product_explore(ZooRealization& zoo, uint64_t volume_cap, int direction,
                                    uint64_t max_gens, uint64_t sprinkle_seed,
                                    size_t gen_guard = 500000);

// Pilot comparison of the two directional fat means; picks the larger.
int favored_direction(const GraphSpec& spec, const AnimalLaw& law, double lambda,
                      uint64_t volume_cap, uint64_t pilot_trials, uint64_t seed);

// ---------------------------------------------------------------------------
// R-threshold of the branching engine:
// m2^R > ((1-e^{-l/2})^{-2} + (d+1)) * 2(l m1 + 2) / (l h^2).
// ---------------------------------------------------------------------------
struct RequiredR {
    bool attainable = false;
    uint64_t R = 0;
    double threshold = 0.0;
    double m1_estimate = 0.0;
    double m2R_estimate = 0.0; // at the returned R
    double tail_bias_bound = 0.0;
};
RequiredR required_R(const GraphSpec& spec, const AnimalLaw& law, double lambda, uint64_t trials,
                     uint64_t seed, uint64_t search_max = uint64_t(1) << 20);

// Importance-sampled E[vol^2 1{vol<=R}] for worm laws (plain MC is useless at
// large caps). Evaluates a whole ascending grid from one sample.
std::vector<Estimate> worm_m2R_curve(const GraphSpec& spec, const AnimalLaw& law,
                                     const std::vector<uint64_t>& caps, uint64_t samples,
                                     uint64_t seed);

// ---------------------------------------------------------------------------
// Reproduction mean of the branching step vs the claim's lower bound.
// ---------------------------------------------------------------------------
struct ReproductionReport {
    double mean_beta = 0.0; // max over the two directions
    double se_beta = 0.0;
    double mean_beta_dir[2] = {0.0, 0.0};
    double claim_bound_m1R = 0.0; // plug-in with truncated first moment
    double claim_bound_m1 = 0.0;  // plug-in with full first moment
    bool vacuous = false;         // bound <= 0
    uint64_t trials = 0;
};
ReproductionReport reproduction_mean_estimate(const GraphSpec& spec, const AnimalLaw& law,
                                              double lambda, uint64_t volume_cap, uint64_t trials,
                                              uint64_t seed, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Abstract growth-lemma harness.
// ---------------------------------------------------------------------------
struct GrowthParams {
    double a;
    double b;
    double c;
    GrowthParams(double a_, double b_, double c_) : a(a_), b(b_), c(c_) {
        if (!(a > 1.0)) throw config_error("growth params: a must be > 1");
        if (!(b > 0.0)) throw config_error("growth params: b must be > 0");
        if (!(c > 0.0) || !(c < b / 2.0))
            throw config_error("growth params: need 0 < C < b/2");
    }
};

enum class IncrementModel { PoissonCompliant, DeterministicDouble, Zero, AdversarialVariance };

struct GrowthHarnessResult {
    double survival_frequency = 0.0;
    double survival_se = 0.0;
    double product_bound = 0.0; // P(E_0) prod (1 - 2C/(b a^{n+1}))
    uint64_t trials = 0;
};
GrowthHarnessResult growth_lemma_harness(IncrementModel model, const GrowthParams& params,
                                         uint64_t trials, uint64_t max_steps, uint64_t seed,
                                         unsigned threads = 1);

} // namespace zoolab
