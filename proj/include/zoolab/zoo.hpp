#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "zoolab/estimate.hpp"
#include "zoolab/graph.hpp"
#include "zoolab/laws.hpp"
#include "zoolab/rng.hpp"

namespace zoolab {

// ---------------------------------------------------------------------------
// A placed animal inside a query result. `level` in [0,1) supports monotone
// intensity coupling (keep at lambda' <= lambda iff level < lambda'/lambda);
// `color` in [0,1) supports Bernoulli thinning into independent views.
// ---------------------------------------------------------------------------
struct PlacedAnimal {
    Animal animal;
    double level = 0.0; // intrinsic coupling uniform (fixed per realization)
};

// Colour of an animal under a given colouring seed (Bernoulli thinning).
inline double animal_color(uint64_t tag, uint64_t color_seed) {
    return double(hash_combine(color_seed, tag) >> 11) * 0x1.0p-53;
}

struct WindowSample {
    VId center = kNoVertex;
    int radius = 0;
    std::unordered_map<VId, int> window; // vertex -> distance from center
    std::vector<PlacedAnimal> animals;   // all animals meeting the window (full cap)

    // Occupation measure under a sub-cap / sub-intensity / colour filter.
    struct Filter {
        double level_max = 1.0; // lambda' / lambda
        uint64_t volume_cap = UINT64_MAX;
        int color_side = 0; // 0: all, 1: color < p, 2: color >= p
        uint64_t color_seed = 0;
        double color_p = 0.5;
        bool keeps(const PlacedAnimal& pa) const {
            if (pa.level >= level_max) return false;
            if (pa.animal.volume() > volume_cap) return false;
            if (color_side != 0) {
                double c = animal_color(pa.animal.tag, color_seed);
                if (color_side == 1 && !(c < color_p)) return false;
                if (color_side == 2 && !(c >= color_p)) return false;
            }
            return true;
        }
    };
    std::unordered_map<VId, uint32_t> occupation(const Filter& f) const;
    std::unordered_map<VId, uint32_t> occupation() const { return occupation(Filter{}); }
    uint64_t animal_count(const Filter& f) const;
    uint64_t animal_count() const { return animal_count(Filter{}); }
};

// Def of the restriction: animals of volume <= cap that hit B but avoid
// closure(A) \ B. An empty A is allowed and means "hit B" only.
struct RestrictionFilter {
    VSet a;
    std::vector<VId> b; // canonical (encode-sorted) inside the engine
    uint64_t volume_cap = 0;
    std::string purpose; // folded into the sampling stream key
};

// ---------------------------------------------------------------------------
// ZooRealization: seed-deterministic lazy Poisson zoo.
//
// Exactness routes, chosen per law:
//  - root-scan: iterate every root within the law's reach of the target and
//    replay its per-root stream (pure function of (seed, canonical vertex)).
//    Exact for the truncated zoo; pad balls are size-guarded.
//  - walk reversal (worm families): the restricted process is a thinned PPP
//    over (entry vertex, biased length, entry time, two free walks); exact at
//    any volume cap and independent of root distance.
// Per-query streams are keyed by the query's canonical content, so results
// depend only on (master_seed, query), never on query order. Queries are
// memoized; distinct overlapping queries are internally consistent only when
// their animal sets are disjoint (restriction filters of an exploration), as
// the reversal route re-realizes each query's subzoo.
// ---------------------------------------------------------------------------
class ZooRealization {
public:
    struct Options {
        size_t pad_guard = 5000000;      // max vertices in a scan pad
        uint64_t candidate_guard = 80000000; // max reversal candidates per query
    };

    ZooRealization(const GraphSpec& spec, AnimalLaw law, double lambda, uint64_t volume_cap,
                   uint64_t master_seed, Options opts);
    ZooRealization(const GraphSpec& spec, AnimalLaw law, double lambda, uint64_t volume_cap,
                   uint64_t master_seed)
        : ZooRealization(spec, std::move(law), lambda, volume_cap, master_seed, Options{}) {}

    Graph& graph() { return *graph_; }
    const AnimalLaw& law() const { return law_; }
    double lambda() const { return lambda_; }
    uint64_t volume_cap() const { return volume_cap_; }
    uint64_t master_seed() const { return master_seed_; }

    // Memoized per-root list (volume-capped), Def of the per-root counts.
    const std::vector<PlacedAnimal>& root_animals(VId x);
    // Poisson(lambda) count at x is positive (counts pre-discard animals).
    bool root_has_animal(VId x);
    // Same, restricted to a colour side (for the sprinkling checks).
    bool root_has_animal_colored(VId x, uint64_t color_seed, int side, double p = 0.5);

    // All animals meeting ball(center, radius), with multiplicities.
    const WindowSample& window_sample(VId center, int radius);

    // Animals passing the restriction filter (volume <= filter cap <= R).
    std::vector<PlacedAnimal> restricted_sample(const RestrictionFilter& filter,
                                                uint64_t color_seed = 0, int color_side = 0,
                                                double color_p = 0.5);

    uint64_t last_candidates() const { return last_candidates_; }

private:
    struct CompareByEncode;

    void generate_root_animals(VId x, std::vector<PlacedAnimal>& kept);
    std::vector<PlacedAnimal> sample_filter(const RestrictionFilter& filter);
    void sample_filter_component(const AnimalLaw& law, double lambda, uint64_t component_tag,
                                 const RestrictionFilter& filter, const VSet& b_set,
                                 std::vector<PlacedAnimal>& out);
    void scan_roots(const AnimalLaw& law, double lambda, uint64_t component_tag,
                    const std::vector<VId>& roots, const VSet& b_set, const VSet& avoid,
                    uint64_t cap, std::vector<PlacedAnimal>& out);
    void reversal_sample(const AnimalLaw& law, double lambda, uint64_t component_tag,
                         uint64_t filter_key, const std::vector<VId>& b_canonical,
                         const VSet& avoid_pre, const VSet& avoid_post, uint64_t cap,
                         std::vector<PlacedAnimal>& out);
    uint64_t filter_key(const RestrictionFilter& f) const;
    uint64_t vertex_key(VId v);
    std::vector<VId> canonical_sorted(const std::vector<VId>& vs);

    std::unique_ptr<Graph> graph_;
    AnimalLaw law_;
    double lambda_;
    uint64_t volume_cap_;
    uint64_t master_seed_;
    Options opts_;
    std::unordered_map<VId, std::vector<PlacedAnimal>> root_memo_;
    std::unordered_map<VId, uint64_t> vkey_memo_;
    std::map<std::pair<VId, int>, WindowSample> window_memo_;
    uint64_t last_candidates_ = 0;
};

// Bernoulli(p) thinning view; complementary views partition every query.
class ZooView {
public:
    ZooView() = default;
    ZooView(ZooRealization* z, uint64_t color_seed, int side, double p)
        : zoo_(z), color_seed_(color_seed), side_(side), p_(p) {}

    ZooRealization& realization() { return *zoo_; }
    double effective_lambda() const {
        return zoo_->lambda() * (side_ == 0 ? 1.0 : (side_ == 1 ? p_ : 1.0 - p_));
    }
    WindowSample::Filter filter(double level_max = 1.0, uint64_t cap = UINT64_MAX) const {
        return {level_max, cap, side_, color_seed_, p_};
    }
    std::vector<PlacedAnimal> restricted_sample(const RestrictionFilter& f) {
        return zoo_->restricted_sample(f, color_seed_, side_, p_);
    }
    bool root_has_animal(VId x) {
        if (side_ == 0) return zoo_->root_has_animal(x);
        return zoo_->root_has_animal_colored(x, color_seed_, side_, p_);
    }

private:
    ZooRealization* zoo_ = nullptr;
    uint64_t color_seed_ = 0;
    int side_ = 0;
    double p_ = 0.5;
};

// Colouring split (Bernoulli(p) keep-side first).
std::pair<ZooView, ZooView> thin(ZooRealization& zoo, double p, uint64_t color_seed);

// Monotone coupling: both views read one realization at lambda_hi; the first
// filters to level < lambda_lo/lambda_hi. Trace inclusion holds per seed.
struct CoupledPair {
    std::shared_ptr<ZooRealization> zoo;
    double lambda_lo = 0.0, lambda_hi = 0.0;
    WindowSample::Filter lo_filter() const {
        WindowSample::Filter f;
        f.level_max = lambda_lo / lambda_hi;
        return f;
    }
    WindowSample::Filter hi_filter() const { return {}; }
};
CoupledPair coupled_pair(const GraphSpec& spec, const AnimalLaw& law, uint64_t volume_cap,
                         uint64_t seed, double lambda_lo, double lambda_hi);

// ---------------------------------------------------------------------------
// Statistics of animals hitting one vertex (size-biasing probes).
// ---------------------------------------------------------------------------
struct HitStats {
    double mu = 0.0;    // number of animals covering the vertex
    double sigma = 0.0; // their total volume
};
HitStats hitting_stats(ZooRealization& zoo, VId x);

struct SizeBiasReport {
    double mean_mu = 0.0, se_mu = 0.0;
    double mean_sigma_hit = 0.0, se_sigma = 0.0;
    double pred_mu = 0.0, pred_mu_se = 0.0;       // lambda * m1^R
    double pred_sigma = 0.0, pred_sigma_se = 0.0; // lambda * m2^R
    uint64_t seeds = 0;
};
SizeBiasReport size_biasing_stats(const GraphSpec& spec, const AnimalLaw& law, double lambda,
                                  uint64_t volume_cap, uint64_t n_seeds, uint64_t seed,
                                  uint64_t oracle_samples, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Campbell formula probe: f summed over animals rooted in a region.
// ---------------------------------------------------------------------------
enum class AnimalFunctional { Count, Volume, VolumeSq };

struct CampbellReport {
    double empirical = 0.0, empirical_se = 0.0;
    double predicted = 0.0, predicted_se = 0.0;
    uint64_t seeds = 0;
};
CampbellReport campbell_check(const GraphSpec& spec, const AnimalLaw& law, double lambda,
                              uint64_t volume_cap, AnimalFunctional f, int region_radius,
                              uint64_t n_seeds, uint64_t seed, uint64_t oracle_samples,
                              unsigned threads = 1);

} // namespace zoolab
