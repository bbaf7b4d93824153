#include "zoolab/zoo.hpp"

#include <algorithm>
#include <cmath>

#include "zoolab/util.hpp"

namespace zoolab {

namespace {

double unit_from(uint64_t h) { return double(h >> 11) * 0x1.0p-53; }

// Flattened law component for window/restricted sampling: worm families go
// through the reversal route, everything else through root scans.
struct Component {
    const AnimalLaw* law;
    double weight;
    uint64_t tag;
    bool reversal;
    bool fiber;
    bool atom_of_fiberworm; // singleton piece split off a fiberworm
};

void flatten(const AnimalLaw& law, double weight, std::vector<Component>& out,
             std::vector<std::unique_ptr<AnimalLaw>>& owned) {
    switch (law.kind()) {
        case AnimalLaw::Kind::Mixture: {
            for (size_t i = 0; i < law.parts().size(); ++i)
                flatten(law.parts()[i], weight * law.weights()[i], out, owned);
            return;
        }
        case AnimalLaw::Kind::FiberWorm: {
            owned.push_back(std::make_unique<AnimalLaw>(AnimalLaw::singleton()));
            out.push_back({owned.back().get(), weight * law.atom_p(), 0, false, false, true});
            out.push_back({&law, weight * (1.0 - law.atom_p()), 0, true, true, false});
            return;
        }
        case AnimalLaw::Kind::Worm:
            out.push_back({&law, weight, 0, true, false, false});
            return;
        default: out.push_back({&law, weight, 0, false, false, false}); return;
    }
}

bool law_has_worm(const AnimalLaw& law) {
    if (law.is_worm_family()) return true;
    if (law.kind() == AnimalLaw::Kind::Mixture)
        for (const auto& p : law.parts())
            if (law_has_worm(p)) return true;
    return false;
}

} // namespace

// ---------------------------------------------------------------------------
// WindowSample
// ---------------------------------------------------------------------------
std::unordered_map<VId, uint32_t> WindowSample::occupation(const Filter& f) const {
    std::unordered_map<VId, uint32_t> mu;
    for (const auto& pa : animals) {
        if (!f.keeps(pa)) continue;
        for (VId v : pa.animal.members)
            if (window.count(v)) ++mu[v];
    }
    return mu;
}

uint64_t WindowSample::animal_count(const Filter& f) const {
    uint64_t n = 0;
    for (const auto& pa : animals)
        if (f.keeps(pa)) ++n;
    return n;
}

// ---------------------------------------------------------------------------
// ZooRealization
// ---------------------------------------------------------------------------
ZooRealization::ZooRealization(const GraphSpec& spec, AnimalLaw law, double lambda,
                               uint64_t volume_cap, uint64_t master_seed, Options opts)
    : graph_(make_graph(spec)),
      law_(std::move(law)),
      lambda_(lambda),
      volume_cap_(volume_cap),
      master_seed_(master_seed),
      opts_(opts) {
    if (!(lambda > 0.0)) throw config_error("zoo: lambda must be > 0");
    if (volume_cap < 1) throw config_error("zoo: volume cap must be >= 1");
    law_.validate(spec);
}

uint64_t ZooRealization::vertex_key(VId v) {
    auto it = vkey_memo_.find(v);
    if (it != vkey_memo_.end()) return it->second;
    uint64_t k = hash_bytes(0x5eedf00dULL, graph_->encode(v));
    vkey_memo_.emplace(v, k);
    return k;
}

void ZooRealization::generate_root_animals(VId x, std::vector<PlacedAnimal>& kept) {
    kept.clear();
    uint64_t vk = vertex_key(x);
    Rng stream = Rng::from(master_seed_, "root").derive(vk);
    uint64_t n = stream.next_poisson(lambda_);
    uint64_t level_seed = hash_combine(master_seed_, 0x11e7e1);
    for (uint64_t i = 0; i < n; ++i) {
        auto s = law_.sample_at(*graph_, x, stream, volume_cap_);
        if (s.oversize || s.members.size() > volume_cap_) continue; // discarded, > R
        PlacedAnimal pa;
        pa.animal.root = x;
        pa.animal.members = std::move(s.members);
        pa.animal.tag = hash_combine(vk, i);
        pa.level = unit_from(hash_combine(level_seed, pa.animal.tag));
        kept.push_back(std::move(pa));
    }
}

const std::vector<PlacedAnimal>& ZooRealization::root_animals(VId x) {
    auto it = root_memo_.find(x);
    if (it != root_memo_.end()) return it->second;
    std::vector<PlacedAnimal> kept;
    generate_root_animals(x, kept);
    return root_memo_.emplace(x, std::move(kept)).first->second;
}

bool ZooRealization::root_has_animal(VId x) {
    Rng stream = Rng::from(master_seed_, "root").derive(vertex_key(x));
    return stream.next_poisson(lambda_) > 0;
}

bool ZooRealization::root_has_animal_colored(VId x, uint64_t color_seed, int side, double p) {
    uint64_t vk = vertex_key(x);
    Rng stream = Rng::from(master_seed_, "root").derive(vk);
    uint64_t n = stream.next_poisson(lambda_);
    for (uint64_t i = 0; i < n; ++i) {
        double c = animal_color(hash_combine(vk, i), color_seed);
        if (side == 1 ? (c < p) : (c >= p)) return true;
    }
    return false;
}

std::vector<VId> ZooRealization::canonical_sorted(const std::vector<VId>& vs) {
    std::vector<std::pair<std::string, VId>> keyed;
    keyed.reserve(vs.size());
    for (VId v : vs) keyed.emplace_back(graph_->encode(v), v);
    std::sort(keyed.begin(), keyed.end());
    std::vector<VId> out;
    out.reserve(vs.size());
    for (auto& [k, v] : keyed) out.push_back(v);
    return out;
}

uint64_t ZooRealization::filter_key(const RestrictionFilter& f) const {
    uint64_t ha = 0, hb = 0;
    for (VId v : f.a) ha ^= const_cast<ZooRealization*>(this)->vertex_key(v);
    for (VId v : f.b) hb ^= const_cast<ZooRealization*>(this)->vertex_key(v);
    uint64_t h = hash_combine(hash_bytes(0xf117e6, f.purpose), ha);
    h = hash_combine(h, uint64_t(f.a.size()));
    h = hash_combine(h, hb);
    h = hash_combine(h, uint64_t(f.b.size()));
    h = hash_combine(h, f.volume_cap);
    return h;
}

const WindowSample& ZooRealization::window_sample(VId center, int radius) {
    auto key = std::make_pair(center, radius);
    auto it = window_memo_.find(key);
    if (it != window_memo_.end()) return it->second;

    WindowSample ws;
    ws.center = center;
    ws.radius = radius;
    ws.window = ball_with_dist(*graph_, center, radius, opts_.pad_guard);

    RestrictionFilter f;
    f.b.reserve(ws.window.size());
    for (const auto& [v, d] : ws.window) f.b.push_back(v);
    f.volume_cap = volume_cap_;
    f.purpose = "window";
    ws.animals = sample_filter(f);
    return window_memo_.emplace(key, std::move(ws)).first->second;
}

std::vector<PlacedAnimal> ZooRealization::restricted_sample(const RestrictionFilter& filter,
                                                            uint64_t color_seed, int color_side,
                                                            double color_p) {
    if (filter.volume_cap > volume_cap_)
        throw config_error("restricted_sample: filter cap exceeds zoo volume cap");
    if (!filter.a.empty()) {
        VSet bd = ext_boundary(*graph_, filter.a);
        for (VId v : filter.b)
            if (!bd.count(v))
                throw config_error("restricted_sample: B must lie in the exterior boundary of A");
    }
    auto all = sample_filter(filter);
    if (color_side == 0) return all;
    std::vector<PlacedAnimal> out;
    for (auto& pa : all) {
        double c = animal_color(pa.animal.tag, color_seed);
        if (color_side == 1 ? (c < color_p) : (c >= color_p)) out.push_back(std::move(pa));
    }
    return out;
}

std::vector<PlacedAnimal> ZooRealization::sample_filter(const RestrictionFilter& filter) {
    VSet b_set(filter.b.begin(), filter.b.end());
    std::vector<PlacedAnimal> out;

    if (!law_has_worm(law_)) {
        // one shared realization: the per-root memoized lists
        sample_filter_component(law_, lambda_, 0, filter, b_set, out);
    } else {
        std::vector<Component> comps;
        std::vector<std::unique_ptr<AnimalLaw>> owned;
        flatten(law_, 1.0, comps, owned);
        uint64_t fkey = filter_key(filter);
        for (size_t i = 0; i < comps.size(); ++i) {
            Component& c = comps[i];
            c.tag = hash_combine(0xc0317, i);
            if (c.reversal) {
                VSet avoid_pre, avoid_post;
                if (!filter.a.empty()) {
                    avoid_pre = closure(*graph_, filter.a); // includes B
                    avoid_post = avoid_pre;
                    for (VId v : filter.b) avoid_post.erase(v);
                } else {
                    avoid_pre = b_set; // first-entry constraint only
                }
                reversal_sample(*c.law, lambda_ * c.weight, c.tag, fkey,
                                canonical_sorted(filter.b), avoid_pre, avoid_post,
                                filter.volume_cap, out);
            } else {
                RestrictionFilter sub = filter;
                // per-component scan with its own stream family
                VSet avoid;
                if (!filter.a.empty()) {
                    avoid = closure(*graph_, filter.a);
                    for (VId v : filter.b) avoid.erase(v);
                }
                uint64_t reach = c.law->reach(*graph_, filter.volume_cap);
                std::vector<VId> roots;
                if (c.law->kind() == AnimalLaw::Kind::DownPath) {
                    VSet anc;
                    for (VId v : filter.b) {
                        VId cur = v;
                        for (uint64_t k = 0; k <= reach; ++k) {
                            if (!anc.insert(cur).second) break;
                            cur = graph_->tree_parent(cur);
                        }
                    }
                    roots.assign(anc.begin(), anc.end());
                } else {
                    // multi-source BFS pad around B
                    std::unordered_map<VId, int> dist;
                    std::vector<VId> frontier;
                    for (VId v : filter.b)
                        if (dist.emplace(v, 0).second) frontier.push_back(v);
                    std::vector<VId> nb;
                    for (size_t qi = 0; qi < frontier.size(); ++qi) {
                        VId v = frontier[qi];
                        int dv = dist[v];
                        if (uint64_t(dv) >= reach) continue;
                        graph_->neighbors(v, nb);
                        for (VId u : nb) {
                            if (dist.emplace(u, dv + 1).second) {
                                if (dist.size() > opts_.pad_guard)
                                    throw resource_error("restricted_sample: scan pad exceeds guard");
                                frontier.push_back(u);
                            }
                        }
                    }
                    roots.assign(frontier.begin(), frontier.end());
                }
                scan_roots(*c.law, lambda_ * c.weight, c.tag, roots, b_set, avoid,
                           filter.volume_cap, out);
            }
        }
    }

    // canonical output order: by tag (stable, content-derived)
    std::sort(out.begin(), out.end(),
              [](const PlacedAnimal& a, const PlacedAnimal& b) { return a.animal.tag < b.animal.tag; });
    return out;
}

void ZooRealization::sample_filter_component(const AnimalLaw& law, double lambda,
                                             uint64_t component_tag,
                                             const RestrictionFilter& filter, const VSet& b_set,
                                             std::vector<PlacedAnimal>& out) {
    // Shared root-list route (laws without worm components).
    (void)lambda;
    (void)component_tag;
    VSet avoid;
    if (!filter.a.empty()) {
        avoid = closure(*graph_, filter.a);
        for (VId v : filter.b) avoid.erase(v);
    }
    uint64_t reach = law.reach(*graph_, filter.volume_cap);
    std::vector<VId> roots;
    if (law.kind() == AnimalLaw::Kind::DownPath) {
        VSet anc;
        for (VId v : filter.b) {
            VId cur = v;
            for (uint64_t k = 0; k <= reach; ++k) {
                if (!anc.insert(cur).second) break;
                cur = graph_->tree_parent(cur);
            }
        }
        roots.assign(anc.begin(), anc.end());
    } else {
        std::unordered_map<VId, int> dist;
        std::vector<VId> frontier;
        for (VId v : filter.b)
            if (dist.emplace(v, 0).second) frontier.push_back(v);
        std::vector<VId> nb;
        for (size_t qi = 0; qi < frontier.size(); ++qi) {
            VId v = frontier[qi];
            int dv = dist[v];
            if (uint64_t(dv) >= reach) continue;
            graph_->neighbors(v, nb);
            for (VId u : nb) {
                if (dist.emplace(u, dv + 1).second) {
                    if (dist.size() > opts_.pad_guard)
                        throw resource_error("sample: scan pad exceeds guard");
                    frontier.push_back(u);
                }
            }
        }
        roots.assign(frontier.begin(), frontier.end());
    }

    std::vector<PlacedAnimal> kept;
    for (VId x : roots) {
        generate_root_animals(x, kept); // same stream as root_animals, no memo
        for (PlacedAnimal& pa : kept) {
            if (pa.animal.volume() > filter.volume_cap) continue;
            bool hits_b = false, hits_avoid = false;
            for (VId m : pa.animal.members) {
                if (b_set.count(m)) hits_b = true;
                if (!avoid.empty() && avoid.count(m)) {
                    hits_avoid = true;
                    break;
                }
            }
            if (hits_b && !hits_avoid) out.push_back(std::move(pa));
        }
    }
}

void ZooRealization::scan_roots(const AnimalLaw& law, double lambda, uint64_t component_tag,
                                const std::vector<VId>& roots, const VSet& b_set,
                                const VSet& avoid, uint64_t cap, std::vector<PlacedAnimal>& out) {
    // Component-tagged streams (mixtures containing worms split per component).
    uint64_t level_seed = hash_combine(master_seed_, 0x11e7e1);
    for (VId x : roots) {
        uint64_t vk = vertex_key(x);
        Rng stream = Rng::from(master_seed_, "rootc").derive(component_tag).derive(vk);
        uint64_t n = stream.next_poisson(lambda);
        for (uint64_t i = 0; i < n; ++i) {
            auto s = law.sample_at(*graph_, x, stream, cap);
            if (s.oversize || s.members.size() > cap) continue;
            bool hits_b = false, hits_avoid = false;
            for (VId m : s.members) {
                if (b_set.count(m)) hits_b = true;
                if (!avoid.empty() && avoid.count(m)) {
                    hits_avoid = true;
                    break;
                }
            }
            if (!hits_b || hits_avoid) continue;
            PlacedAnimal pa;
            pa.animal.root = x;
            pa.animal.members = std::move(s.members);
            pa.animal.tag = hash_combine(hash_combine(component_tag, vk), i);
            pa.level = unit_from(hash_combine(level_seed, pa.animal.tag));
            out.push_back(std::move(pa));
        }
    }
}

void ZooRealization::reversal_sample(const AnimalLaw& law, double lambda, uint64_t component_tag,
                                     uint64_t fkey, const std::vector<VId>& b_canonical,
                                     const VSet& avoid_pre, const VSet& avoid_post, uint64_t cap,
                                     std::vector<PlacedAnimal>& out) {
    // Exact sampler for the restricted worm subzoo. A worm hitting B first at
    // y after tau of its L-1 steps corresponds, by reversibility on a regular
    // graph, to two free walks from y (lengths tau and L-1-tau) with the
    // first-entry and avoidance constraints below; candidate (y, L, tau) mass
    // lambda * |B| * E[L] thinned by those constraints reproduces the
    // restriction exactly.
    if (b_canonical.empty()) return;
    const LengthLaw& len = law.length();
    bool fiber = law.kind() == AnimalLaw::Kind::FiberWorm;
    double atom_skip = fiber ? law.atom_p() : 0.0;
    (void)atom_skip; // fiberworm atom handled as its own component

    double mean = lambda * double(b_canonical.size()) * len.mean();
    Rng stream = Rng::from(master_seed_, "rev").derive(component_tag).derive(fkey);
    uint64_t n_cand = stream.next_poisson(mean);
    last_candidates_ = n_cand;
    if (n_cand > opts_.candidate_guard)
        throw resource_error("reversal sampler: candidate count exceeds guard");

    uint64_t level_seed = hash_combine(master_seed_, 0x11e7e1);
    std::vector<VId> buf;
    std::vector<VId> pre_path;
    for (uint64_t i = 0; i < n_cand; ++i) {
        VId y = b_canonical[stream.next_below(b_canonical.size())];
        uint64_t L = len.sample_biased(stream, 1);
        uint64_t tau = stream.next_below(L);

        VSet members{y};
        bool ok = true;
        pre_path.clear();
        VId v = y;
        for (uint64_t t = 1; t <= tau && ok; ++t) {
            if (fiber)
                graph_->fiber_neighbors(v, buf);
            else
                graph_->neighbors(v, buf);
            v = buf[stream.next_below(buf.size())];
            if (avoid_pre.count(v)) ok = false;
            if (ok) {
                members.insert(v);
                pre_path.push_back(v);
                if (members.size() > cap) ok = false;
            }
        }
        VId root = tau == 0 ? y : (ok && !pre_path.empty() ? pre_path.back() : y);
        if (ok) {
            VId w = y;
            for (uint64_t t = 1; t + tau <= L - 1 && ok; ++t) {
                if (fiber)
                    graph_->fiber_neighbors(w, buf);
                else
                    graph_->neighbors(w, buf);
                w = buf[stream.next_below(buf.size())];
                if (!avoid_post.empty() && avoid_post.count(w)) ok = false;
                if (ok) {
                    members.insert(w);
                    if (members.size() > cap) ok = false;
                }
            }
        }
        if (!ok) continue;
        PlacedAnimal pa;
        pa.animal.root = root;
        pa.animal.members.assign(members.begin(), members.end());
        std::sort(pa.animal.members.begin(), pa.animal.members.end());
        pa.animal.tag = hash_combine(hash_combine(component_tag, fkey), i);
        pa.level = unit_from(hash_combine(level_seed, pa.animal.tag));
        out.push_back(std::move(pa));
    }
}

// ---------------------------------------------------------------------------
// thin / coupled_pair
// ---------------------------------------------------------------------------
std::pair<ZooView, ZooView> thin(ZooRealization& zoo, double p, uint64_t color_seed) {
    if (p < 0.0 || p > 1.0) throw config_error("thin: p must be in [0,1]");
    return {ZooView(&zoo, color_seed, 1, p), ZooView(&zoo, color_seed, 2, p)};
}

CoupledPair coupled_pair(const GraphSpec& spec, const AnimalLaw& law, uint64_t volume_cap,
                         uint64_t seed, double lambda_lo, double lambda_hi) {
    if (!(lambda_lo > 0.0) || lambda_lo > lambda_hi)
        throw config_error("coupled_pair: need 0 < lambda_lo <= lambda_hi");
    CoupledPair cp;
    cp.zoo = std::make_shared<ZooRealization>(spec, law, lambda_hi, volume_cap, seed);
    cp.lambda_lo = lambda_lo;
    cp.lambda_hi = lambda_hi;
    return cp;
}

// ---------------------------------------------------------------------------
// Hitting statistics and size-biasing
// ---------------------------------------------------------------------------
HitStats hitting_stats(ZooRealization& zoo, VId x) {
    RestrictionFilter f;
    f.b = {x};
    f.volume_cap = zoo.volume_cap();
    f.purpose = "hit";
    auto animals = zoo.restricted_sample(f);
    HitStats hs;
    hs.mu = double(animals.size());
    for (const auto& pa : animals) hs.sigma += double(pa.animal.volume());
    return hs;
}

SizeBiasReport size_biasing_stats(const GraphSpec& spec, const AnimalLaw& law, double lambda,
                                  uint64_t volume_cap, uint64_t n_seeds, uint64_t seed,
                                  uint64_t oracle_samples, unsigned threads) {
    std::vector<HitStats> per_seed(n_seeds);
    Rng seeder = Rng::from(seed, "sizebias");
    parallel_for(n_seeds, threads, [&](uint64_t t) {
        ZooRealization z(spec, law, lambda, volume_cap, seeder.derive(t).key());
        per_seed[t] = hitting_stats(z, z.graph().origin());
    });
    MeanVar mu_acc, sg_acc;
    for (const auto& hs : per_seed) {
        mu_acc.add(hs.mu);
        sg_acc.add(hs.sigma);
    }
    SizeBiasReport r;
    r.seeds = n_seeds;
    r.mean_mu = mu_acc.mean;
    r.se_mu = mu_acc.stderr_of_mean();
    r.mean_sigma_hit = sg_acc.mean;
    r.se_sigma = sg_acc.stderr_of_mean();

    auto g = make_graph(spec);
    Estimate m1 = truncated_volume_moment(law, *g, 1, volume_cap, oracle_samples,
                                          Rng::from(seed, "oracle-m1"));
    Estimate m2 = truncated_volume_moment(law, *g, 2, volume_cap, oracle_samples,
                                          Rng::from(seed, "oracle-m2"));
    r.pred_mu = lambda * m1.value;
    r.pred_mu_se = lambda * m1.stderr_;
    r.pred_sigma = lambda * m2.value;
    r.pred_sigma_se = lambda * m2.stderr_;
    return r;
}

// ---------------------------------------------------------------------------
// Campbell formula probe
// ---------------------------------------------------------------------------
namespace {
double apply_functional(AnimalFunctional f, const Animal& a) {
    switch (f) {
        case AnimalFunctional::Count: return 1.0;
        case AnimalFunctional::Volume: return double(a.volume());
        case AnimalFunctional::VolumeSq: return double(a.volume()) * double(a.volume());
    }
    return 0.0;
}
} // namespace

CampbellReport campbell_check(const GraphSpec& spec, const AnimalLaw& law, double lambda,
                              uint64_t volume_cap, AnimalFunctional f, int region_radius,
                              uint64_t n_seeds, uint64_t seed, uint64_t oracle_samples,
                              unsigned threads) {
    std::vector<double> per_seed(n_seeds, 0.0);
    Rng seeder = Rng::from(seed, "campbell");
    parallel_for(n_seeds, threads, [&](uint64_t t) {
        ZooRealization z(spec, law, lambda, volume_cap, seeder.derive(t).key());
        auto region = ball(z.graph(), z.graph().origin(), region_radius);
        double total = 0.0;
        for (VId x : region)
            for (const auto& pa : z.root_animals(x)) total += apply_functional(f, pa.animal);
        per_seed[t] = total;
    });
    MeanVar acc;
    for (double v : per_seed) acc.add(v);

    CampbellReport r;
    r.seeds = n_seeds;
    r.empirical = acc.mean;
    r.empirical_se = acc.stderr_of_mean();

    // predicted = lambda * |region| * E_nu[f ; vol <= R], by transitivity
    auto g = make_graph(spec);
    size_t region_size = ball(*g, g->origin(), region_radius).size();
    MeanVar oracle;
    Rng orng = Rng::from(seed, "campbell-oracle");
    VId o = g->origin();
    for (uint64_t t = 0; t < oracle_samples; ++t) {
        Rng tr = orng.derive(t);
        auto s = law.sample_at(*g, o, tr, volume_cap);
        if (s.oversize || s.members.size() > volume_cap) {
            oracle.add(0.0);
            continue;
        }
        Animal a;
        a.members = std::move(s.members);
        oracle.add(apply_functional(f, a));
    }
    r.predicted = lambda * double(region_size) * oracle.mean;
    r.predicted_se = lambda * double(region_size) * oracle.stderr_of_mean();
    return r;
}

} // namespace zoolab
