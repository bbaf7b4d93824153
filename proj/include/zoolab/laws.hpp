#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zoolab/estimate.hpp"
#include "zoolab/graph.hpp"
#include "zoolab/rng.hpp"

namespace zoolab {

// ---------------------------------------------------------------------------
// LengthLaw: distribution of worm lengths / ball radii / downpath step counts.
// Support is {1, 2, ...}. Grammar: power(2.5) | const(3) | geom(0.25) |
// table(1:0.5,4:0.5).
// ---------------------------------------------------------------------------
class LengthLaw {
public:
    enum class Kind { Power, Det, Geom, Table };

    static LengthLaw power(double alpha);
    static LengthLaw det(uint64_t l0);
    static LengthLaw geom(double p);
    static LengthLaw table(std::vector<std::pair<uint64_t, double>> entries);

    static LengthLaw parse(const std::string& text);
    std::string print() const;

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }

    uint64_t sample(Rng& rng) const;
    // Sample from P(l) proportional to l^k * eta(l), k in {1,2}. When the
    // biased law has infinite mass (power alpha - k <= 1), a finite cap is
    // required; otherwise cap may be 0 (= none).
    uint64_t sample_biased(Rng& rng, int k, uint64_t cap = 0) const;

    // Exact E[L^k 1{L <= R}]; nullopt encodes the "infinite" sentinel
    // (untruncated request with a divergent moment).
    std::optional<double> moment(int k, std::optional<uint64_t> R) const;
    double mean() const; // always finite for valid laws (alpha > 2 enforced for worm use)
    double tail(uint64_t x) const; // P(L > x)
    bool moment_finite(int k) const;
    uint64_t max_support() const; // UINT64_MAX when unbounded

private:
    LengthLaw() = default;
    void build_power_tables();

    Kind kind_ = Kind::Det;
    double alpha_ = 0.0;
    uint64_t l0_ = 1;
    double p_ = 0.5;
    std::vector<std::pair<uint64_t, double>> entries_;
    // power-law internals
    double zeta_ = 1.0;
    std::shared_ptr<std::vector<double>> cdf_; // P(L <= l) for l = 1..N0
    // table internals
    std::shared_ptr<std::vector<double>> table_cdf_;
};

// Sum of l^(-s) for l = 1..R (R may be huge; Euler-Maclaurin past 2^20).
double partial_power_sum(double s, uint64_t R);
double riemann_zeta(double s); // s > 1

// ---------------------------------------------------------------------------
// Animal laws. Grammar: worm(power(2.5)) | ball(const(2)) | singleton |
// mix(0.1:singleton,0.9:worm(power(2.6))) | downpath(power(3.0)) |
// fiberworm(power(2.4),0.1).
// ---------------------------------------------------------------------------
struct Animal {
    VId root = kNoVertex;
    std::vector<VId> members; // distinct, sorted
    uint64_t tag = 0;         // stable basis for colouring/coupling hashes
    uint64_t volume() const { return members.size(); }
};

class AnimalLaw {
public:
    enum class Kind { Worm, Ball, Singleton, Mixture, DownPath, FiberWorm };

    static AnimalLaw worm(LengthLaw length);
    static AnimalLaw ball_law(LengthLaw radius);
    static AnimalLaw singleton();
    static AnimalLaw mixture(std::vector<double> weights, std::vector<AnimalLaw> parts);
    static AnimalLaw downpath(LengthLaw length);
    static AnimalLaw fiberworm(LengthLaw length, double atom_p);

    static AnimalLaw parse(const std::string& text);
    std::string print() const;

    Kind kind() const { return kind_; }
    const LengthLaw& length() const { return length_; }
    double atom_p() const { return atom_p_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<AnimalLaw>& parts() const { return parts_; }

    // Throws config_error when the law cannot live on the graph.
    void validate(const GraphSpec& spec) const;

    // One animal from nu_root, untruncated. Member collection stops once the
    // volume exceeds vol_abort; `oversize` is set and members are partial.
    struct Sampled {
        std::vector<VId> members;
        bool oversize = false;
    };
    Sampled sample_at(Graph& g, VId root, Rng& rng, uint64_t vol_abort) const;

    // Max distance from root to any member among animals of volume <= R.
    uint64_t reach(Graph& g, uint64_t R) const;

    // True when window/restricted sampling goes through the walk-reversal
    // route (worm confined to the full graph or to a product fiber).
    bool is_worm_family() const { return kind_ == Kind::Worm || kind_ == Kind::FiberWorm; }

    bool volume_second_moment_finite(const GraphSpec& spec) const;

private:
    AnimalLaw() = default;

    Kind kind_ = Kind::Singleton;
    LengthLaw length_ = LengthLaw::det(1);
    double atom_p_ = 0.0;
    std::vector<double> weights_;
    std::vector<AnimalLaw> parts_;
};

// Exact E[L^k 1{L<=R}] wrapper implementing the length_moment operation.
struct LengthMoment {
    bool infinite = false;
    double value = 0.0;
};
LengthMoment length_moment(const LengthLaw& law, int k, std::optional<uint64_t> R);

// Monte Carlo E[vol^k 1{vol<=R}] over animals sampled at the origin.
Estimate truncated_volume_moment(const AnimalLaw& law, Graph& g, int k, uint64_t R,
                                 uint64_t trials, Rng rng);

} // namespace zoolab
