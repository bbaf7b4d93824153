#include "zoolab/laws.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>

namespace zoolab {

namespace {
constexpr uint64_t kPowerTableSize = 1 << 16;
constexpr uint64_t kDirectSumLimit = 1 << 20;
} // namespace

// Euler-Maclaurin tail: sum_{l>N} l^(-s), s > 1.
static double power_tail_from(double s, double N) {
    double t = std::pow(N, 1.0 - s) / (s - 1.0);
    t -= 0.5 * std::pow(N, -s);
    t += s / 12.0 * std::pow(N, -s - 1.0);
    t -= s * (s + 1.0) * (s + 2.0) / 720.0 * std::pow(N, -s - 3.0);
    return t;
}

double riemann_zeta(double s) {
    if (s <= 1.0) throw config_error("zeta(s) requires s > 1");
    double acc = 0.0;
    uint64_t N = 100000;
    for (uint64_t n = 1; n <= N; ++n) acc += std::pow(double(n), -s);
    return acc + power_tail_from(s, double(N) + 0.5) +
           0.5 * std::pow(double(N) + 0.5, -s); // re-centre the EM cut at N+1/2
}

double partial_power_sum(double s, uint64_t R) {
    if (R == 0) return 0.0;
    if (R <= kDirectSumLimit) {
        double acc = 0.0;
        for (uint64_t n = 1; n <= R; ++n) acc += std::pow(double(n), -s);
        return acc;
    }
    double acc = partial_power_sum(s, kDirectSumLimit);
    // Euler-Maclaurin between the two endpoints.
    double a = double(kDirectSumLimit) + 1.0, b = double(R);
    double integral = (s == 1.0) ? std::log(b / a)
                                 : (std::pow(b, 1.0 - s) - std::pow(a, 1.0 - s)) / (1.0 - s);
    acc += integral + 0.5 * (std::pow(a, -s) + std::pow(b, -s));
    acc += s / 12.0 * (std::pow(a, -s - 1.0) - std::pow(b, -s - 1.0));
    return acc;
}

// ---------------------------------------------------------------------------
// LengthLaw
// ---------------------------------------------------------------------------
LengthLaw LengthLaw::power(double alpha) {
    if (!(alpha > 1.0)) throw config_error("power(alpha): alpha must be > 1");
    LengthLaw l;
    l.kind_ = Kind::Power;
    l.alpha_ = alpha;
    l.build_power_tables();
    return l;
}

LengthLaw LengthLaw::det(uint64_t l0) {
    if (l0 < 1) throw config_error("const(l): l must be >= 1");
    LengthLaw l;
    l.kind_ = Kind::Det;
    l.l0_ = l0;
    return l;
}

LengthLaw LengthLaw::geom(double p) {
    if (!(p > 0.0) || !(p <= 1.0)) throw config_error("geom(p): p must be in (0,1]");
    LengthLaw l;
    l.kind_ = Kind::Geom;
    l.p_ = p;
    return l;
}

LengthLaw LengthLaw::table(std::vector<std::pair<uint64_t, double>> entries) {
    if (entries.empty()) throw config_error("table law: no entries");
    double total = 0.0;
    for (auto& [v, p] : entries) {
        if (v < 1 || p < 0.0) throw config_error("table law: entries must be (l>=1, p>=0)");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw config_error("table law: probabilities must sum to 1");
    std::sort(entries.begin(), entries.end());
    LengthLaw l;
    l.kind_ = Kind::Table;
    l.entries_ = std::move(entries);
    auto cdf = std::make_shared<std::vector<double>>();
    double acc = 0.0;
    for (auto& [v, p] : l.entries_) {
        acc += p;
        cdf->push_back(acc);
    }
    cdf->back() = 1.0;
    l.table_cdf_ = cdf;
    return l;
}

void LengthLaw::build_power_tables() {
    zeta_ = riemann_zeta(alpha_);
    auto cdf = std::make_shared<std::vector<double>>();
    cdf->reserve(kPowerTableSize);
    double acc = 0.0;
    for (uint64_t l = 1; l <= kPowerTableSize; ++l) {
        acc += std::pow(double(l), -alpha_) / zeta_;
        cdf->push_back(acc);
    }
    cdf_ = cdf;
}

// Exact discrete power sampler for P(l) ~ l^(-s) on [lo, hi] (hi may be
// "infinite"): continuous proposal with density ~ x^(-s) on [lo-1/2, hi+1/2],
// rounded to the nearest integer; midpoint convexity makes the acceptance
// ratio l^(-s) / integral over [l-1/2, l+1/2] at most 1.
static uint64_t sample_power_range(Rng& rng, double s, uint64_t lo, uint64_t hi) {
    double a = double(lo) - 0.5;
    bool unbounded = (hi == UINT64_MAX);
    double b = unbounded ? 0.0 : double(hi) + 0.5;
    for (int iter = 0; iter < 10000; ++iter) {
        double u = rng.next_double();
        double x;
        if (s == 1.0) {
            x = unbounded ? a * std::exp(u * 700.0) : a * std::pow(b / a, u);
        } else if (s > 1.0 && unbounded) {
            x = a * std::pow(1.0 - u, -1.0 / (s - 1.0));
        } else {
            // finite range, any s != 1
            double pa = std::pow(a, 1.0 - s), pb = std::pow(b, 1.0 - s);
            x = std::pow(pa + u * (pb - pa), 1.0 / (1.0 - s));
        }
        double lf = std::floor(x + 0.5);
        if (lf < double(lo)) lf = double(lo);
        if (!unbounded && lf > double(hi)) lf = double(hi);
        uint64_t l = uint64_t(lf);
        double lo_edge = double(l) - 0.5, hi_edge = double(l) + 0.5;
        double cell = (s == 1.0) ? std::log(hi_edge / lo_edge)
                                 : (std::pow(hi_edge, 1.0 - s) - std::pow(lo_edge, 1.0 - s)) /
                                       (1.0 - s);
        double accept = std::pow(double(l), -s) / cell;
        if (rng.next_double() < accept) return l;
    }
    throw std::runtime_error("sample_power_range: rejection loop failed to terminate");
}

uint64_t LengthLaw::sample(Rng& rng) const {
    switch (kind_) {
        case Kind::Det: return l0_;
        case Kind::Geom: return rng.next_geometric(p_);
        case Kind::Table: {
            double u = rng.next_double();
            size_t i = size_t(std::lower_bound(table_cdf_->begin(), table_cdf_->end(), u) -
                              table_cdf_->begin());
            if (i >= entries_.size()) i = entries_.size() - 1;
            return entries_[i].first;
        }
        case Kind::Power: {
            double u = rng.next_double();
            const auto& cdf = *cdf_;
            if (u < cdf.back()) {
                size_t i = size_t(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
                return i + 1;
            }
            return sample_power_range(rng, alpha_, kPowerTableSize + 1, UINT64_MAX);
        }
    }
    return 1;
}

uint64_t LengthLaw::sample_biased(Rng& rng, int k, uint64_t cap) const {
    if (k < 1 || k > 2) throw config_error("sample_biased: k must be 1 or 2");
    switch (kind_) {
        case Kind::Det:
            if (cap && l0_ > cap) throw config_error("sample_biased: cap below det support");
            return l0_;
        case Kind::Geom: {
            // l^k-biased geometric: l = G1+..+G_{k+1} - k restricted suitably;
            // for k=2 mix the l(l-1) part (three geometrics) with the l part.
            for (int iter = 0; iter < 100000; ++iter) {
                uint64_t l;
                if (k == 1) {
                    l = rng.next_geometric(p_) + rng.next_geometric(p_) - 1;
                } else {
                    double EL = 1.0 / p_;
                    double EL2 = (2.0 - p_) / (p_ * p_);
                    double w_pair = (EL2 - EL) / EL2;
                    if (rng.next_bernoulli(w_pair))
                        l = rng.next_geometric(p_) + rng.next_geometric(p_) +
                            rng.next_geometric(p_) - 1;
                    else
                        l = rng.next_geometric(p_) + rng.next_geometric(p_) - 1;
                }
                if (!cap || l <= cap) return l;
            }
            throw std::runtime_error("sample_biased(geom): cap rejection failed");
        }
        case Kind::Table: {
            // small support: direct weighted choice
            double total = 0.0;
            for (auto& [v, p] : entries_)
                if (!cap || v <= cap) total += std::pow(double(v), k) * p;
            if (total <= 0.0) throw config_error("sample_biased(table): empty support under cap");
            double u = rng.next_double() * total;
            for (auto& [v, p] : entries_) {
                if (cap && v > cap) continue;
                u -= std::pow(double(v), k) * p;
                if (u <= 0.0) return v;
            }
            return entries_.back().first;
        }
        case Kind::Power: {
            double s = alpha_ - double(k);
            if (s <= 1.0 && cap == 0)
                throw config_error("sample_biased(power): divergent bias needs a cap");
            return sample_power_range(rng, s, 1, cap ? cap : UINT64_MAX);
        }
    }
    return 1;
}

std::optional<double> LengthLaw::moment(int k, std::optional<uint64_t> R) const {
    switch (kind_) {
        case Kind::Det: {
            if (R && l0_ > *R) return 0.0;
            return std::pow(double(l0_), k);
        }
        case Kind::Geom: {
            // terms die geometrically; direct summation with tail cutoff
            double acc = 0.0, q = 1.0 - p_;
            double term = p_;
            uint64_t limit = R ? *R : UINT64_MAX;
            for (uint64_t l = 1; l <= limit; ++l) {
                acc += std::pow(double(l), k) * term;
                term *= q;
                if (term * std::pow(double(l + 1), k) < 1e-18 * std::max(acc, 1.0)) break;
            }
            return acc;
        }
        case Kind::Table: {
            double acc = 0.0;
            for (auto& [v, p] : entries_)
                if (!R || v <= *R) acc += std::pow(double(v), k) * p;
            return acc;
        }
        case Kind::Power: {
            double s = alpha_ - double(k);
            if (!R) {
                if (s <= 1.0) return std::nullopt; // infinite
                return riemann_zeta(s) / zeta_;
            }
            return partial_power_sum(s, *R) / zeta_;
        }
    }
    return 0.0;
}

double LengthLaw::mean() const {
    auto m = moment(1, std::nullopt);
    if (!m) throw config_error("length law has infinite mean");
    return *m;
}

double LengthLaw::tail(uint64_t x) const {
    switch (kind_) {
        case Kind::Det: return l0_ > x ? 1.0 : 0.0;
        case Kind::Geom: return std::pow(1.0 - p_, double(x));
        case Kind::Table: {
            double acc = 0.0;
            for (auto& [v, p] : entries_)
                if (v > x) acc += p;
            return acc;
        }
        case Kind::Power: {
            if (x == 0) return 1.0;
            return 1.0 - partial_power_sum(alpha_, x) / zeta_;
        }
    }
    return 0.0;
}

bool LengthLaw::moment_finite(int k) const {
    if (kind_ == Kind::Power) return alpha_ - double(k) > 1.0;
    return true;
}

uint64_t LengthLaw::max_support() const {
    switch (kind_) {
        case Kind::Det: return l0_;
        case Kind::Table: return entries_.back().first;
        default: return UINT64_MAX;
    }
}

// --- parse/print -----------------------------------------------------------
namespace {

struct LawParser {
    const std::string& s;
    size_t pos = 0;
    explicit LawParser(const std::string& text) : s(text) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace(uint8_t(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c))
            throw config_error("law: expected '" + std::string(1, c) + "' at position " +
                               std::to_string(pos) + " in '" + s + "'");
    }
    std::string ident() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && (std::isalpha(uint8_t(s[pos])) || s[pos] == '_')) ++pos;
        if (start == pos)
            throw config_error("law: expected name at position " + std::to_string(pos) + " in '" +
                               s + "'");
        return s.substr(start, pos - start);
    }
    double number() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() &&
               (std::isdigit(uint8_t(s[pos])) || s[pos] == '.' || s[pos] == '-' || s[pos] == 'e' ||
                s[pos] == 'E' || s[pos] == '+'))
            ++pos;
        if (start == pos)
            throw config_error("law: expected number at position " + std::to_string(pos) +
                               " in '" + s + "'");
        return std::stod(s.substr(start, pos - start));
    }

    LengthLaw length() {
        std::string name = ident();
        if (name == "power") {
            expect('(');
            double a = number();
            expect(')');
            return LengthLaw::power(a);
        }
        if (name == "const") {
            expect('(');
            double v = number();
            expect(')');
            if (v < 1 || v != std::floor(v)) throw config_error("const(l): integer l >= 1");
            return LengthLaw::det(uint64_t(v));
        }
        if (name == "geom") {
            expect('(');
            double p = number();
            expect(')');
            return LengthLaw::geom(p);
        }
        if (name == "table") {
            expect('(');
            std::vector<std::pair<uint64_t, double>> entries;
            do {
                double v = number();
                expect(':');
                double p = number();
                if (v < 1 || v != std::floor(v)) throw config_error("table: integer values >= 1");
                entries.emplace_back(uint64_t(v), p);
            } while (eat(','));
            expect(')');
            return LengthLaw::table(std::move(entries));
        }
        throw config_error("law: unknown length law '" + name + "'");
    }

    AnimalLaw animal() {
        std::string name = ident();
        if (name == "singleton") return AnimalLaw::singleton();
        if (name == "worm") {
            expect('(');
            LengthLaw l = length();
            expect(')');
            return AnimalLaw::worm(std::move(l));
        }
        if (name == "ball") {
            expect('(');
            LengthLaw l = length();
            expect(')');
            return AnimalLaw::ball_law(std::move(l));
        }
        if (name == "downpath") {
            expect('(');
            LengthLaw l = length();
            expect(')');
            return AnimalLaw::downpath(std::move(l));
        }
        if (name == "fiberworm") {
            expect('(');
            LengthLaw l = length();
            expect(',');
            double ap = number();
            expect(')');
            return AnimalLaw::fiberworm(std::move(l), ap);
        }
        if (name == "mix") {
            expect('(');
            std::vector<double> ws;
            std::vector<AnimalLaw> parts;
            do {
                ws.push_back(number());
                expect(':');
                parts.push_back(animal());
            } while (eat(','));
            expect(')');
            return AnimalLaw::mixture(std::move(ws), std::move(parts));
        }
        throw config_error("law: unknown animal law '" + name + "'");
    }
};

std::string print_length(const LengthLaw& l) {
    char buf[64];
    switch (l.kind()) {
        case LengthLaw::Kind::Power:
            snprintf(buf, sizeof buf, "power(%.9g)", l.alpha());
            return buf;
        default: break;
    }
    return l.print();
}

} // namespace

LengthLaw LengthLaw::parse(const std::string& text) {
    LawParser p(text);
    LengthLaw l = p.length();
    p.skip_ws();
    if (p.pos != text.size()) throw config_error("length law: trailing input in '" + text + "'");
    return l;
}

std::string LengthLaw::print() const {
    char buf[64];
    switch (kind_) {
        case Kind::Power: snprintf(buf, sizeof buf, "power(%.9g)", alpha_); return buf;
        case Kind::Det: return "const(" + std::to_string(l0_) + ")";
        case Kind::Geom: snprintf(buf, sizeof buf, "geom(%.9g)", p_); return buf;
        case Kind::Table: {
            std::string out = "table(";
            for (size_t i = 0; i < entries_.size(); ++i) {
                if (i) out += ",";
                snprintf(buf, sizeof buf, "%llu:%.9g", (unsigned long long)entries_[i].first,
                         entries_[i].second);
                out += buf;
            }
            return out + ")";
        }
    }
    return "";
}

// ---------------------------------------------------------------------------
// AnimalLaw
// ---------------------------------------------------------------------------
AnimalLaw AnimalLaw::worm(LengthLaw length) {
    AnimalLaw a;
    a.kind_ = Kind::Worm;
    a.length_ = std::move(length);
    return a;
}
AnimalLaw AnimalLaw::ball_law(LengthLaw radius) {
    AnimalLaw a;
    a.kind_ = Kind::Ball;
    a.length_ = std::move(radius);
    return a;
}
AnimalLaw AnimalLaw::singleton() { return AnimalLaw(); }
AnimalLaw AnimalLaw::mixture(std::vector<double> weights, std::vector<AnimalLaw> parts) {
    if (weights.size() != parts.size() || parts.empty())
        throw config_error("mix: weights/parts mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw config_error("mix: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw config_error("mix: weights must sum to 1");
    for (const auto& p : parts)
        if (p.kind_ == Kind::Mixture) throw config_error("mix: no nested mixtures");
    AnimalLaw a;
    a.kind_ = Kind::Mixture;
    a.weights_ = std::move(weights);
    a.parts_ = std::move(parts);
    return a;
}
AnimalLaw AnimalLaw::downpath(LengthLaw length) {
    AnimalLaw a;
    a.kind_ = Kind::DownPath;
    a.length_ = std::move(length);
    return a;
}
AnimalLaw AnimalLaw::fiberworm(LengthLaw length, double atom_p) {
    if (!(atom_p > 0.0) || atom_p >= 1.0)
        throw config_error("fiberworm: atom probability must be in (0,1)");
    AnimalLaw a;
    a.kind_ = Kind::FiberWorm;
    a.length_ = std::move(length);
    a.atom_p_ = atom_p;
    return a;
}

AnimalLaw AnimalLaw::parse(const std::string& text) {
    LawParser p(text);
    AnimalLaw a = p.animal();
    p.skip_ws();
    if (p.pos != text.size()) throw config_error("animal law: trailing input in '" + text + "'");
    return a;
}

std::string AnimalLaw::print() const {
    switch (kind_) {
        case Kind::Worm: return "worm(" + length_.print() + ")";
        case Kind::Ball: return "ball(" + length_.print() + ")";
        case Kind::Singleton: return "singleton";
        case Kind::DownPath: return "downpath(" + length_.print() + ")";
        case Kind::FiberWorm: {
            char buf[32];
            snprintf(buf, sizeof buf, ",%.9g)", atom_p_);
            return "fiberworm(" + length_.print() + buf;
        }
        case Kind::Mixture: {
            std::string out = "mix(";
            char buf[32];
            for (size_t i = 0; i < parts_.size(); ++i) {
                if (i) out += ",";
                snprintf(buf, sizeof buf, "%.9g:", weights_[i]);
                out += buf;
                out += parts_[i].print();
            }
            return out + ")";
        }
    }
    return "";
}

void AnimalLaw::validate(const GraphSpec& spec) const {
    switch (kind_) {
        case Kind::DownPath:
            if (spec.kind != GraphSpec::Kind::Grandparent)
                throw config_error("downpath law requires a grandparent graph");
            break;
        case Kind::FiberWorm:
            if (spec.kind != GraphSpec::Kind::Prod)
                throw config_error("fiberworm law requires a direct product graph");
            break;
        case Kind::Mixture:
            for (const auto& p : parts_) p.validate(spec);
            break;
        default: break;
    }
}

AnimalLaw::Sampled AnimalLaw::sample_at(Graph& g, VId root, Rng& rng, uint64_t vol_abort) const {
    Sampled out;
    switch (kind_) {
        case Kind::Singleton: {
            out.members.push_back(root);
            return out;
        }
        case Kind::Worm:
        case Kind::FiberWorm: {
            if (kind_ == Kind::FiberWorm && rng.next_bernoulli(atom_p_)) {
                out.members.push_back(root);
                return out;
            }
            uint64_t L = length_.sample(rng);
            VSet seen{root};
            std::vector<VId> nb;
            VId v = root;
            for (uint64_t t = 1; t < L; ++t) {
                if (kind_ == Kind::FiberWorm)
                    g.fiber_neighbors(v, nb);
                else
                    g.neighbors(v, nb);
                v = nb[rng.next_below(nb.size())];
                seen.insert(v);
                if (seen.size() > vol_abort) {
                    out.oversize = true;
                    break;
                }
            }
            out.members.assign(seen.begin(), seen.end());
            std::sort(out.members.begin(), out.members.end());
            return out;
        }
        case Kind::Ball: {
            uint64_t r = length_.sample(rng);
            // volume of a radius-r ball blows past any desk-scale cap quickly;
            // bail out via the guard instead of materializing it
            try {
                out.members = ball(g, root, int(r), size_t(vol_abort));
            } catch (const resource_error&) {
                out.oversize = true;
            }
            return out;
        }
        case Kind::DownPath: {
            uint64_t r = length_.sample(rng);
            out.members.push_back(root);
            VId v = root;
            std::vector<VId> kids;
            for (uint64_t t = 0; t < r; ++t) {
                g.tree_children(v, kids);
                v = kids[rng.next_below(kids.size())];
                out.members.push_back(v);
                if (out.members.size() > vol_abort) {
                    out.oversize = true;
                    break;
                }
            }
            std::sort(out.members.begin(), out.members.end());
            return out;
        }
        case Kind::Mixture: {
            double u = rng.next_double();
            size_t i = 0;
            for (; i + 1 < weights_.size(); ++i) {
                if (u < weights_[i]) break;
                u -= weights_[i];
            }
            return parts_[i].sample_at(g, root, rng, vol_abort);
        }
    }
    return out;
}

uint64_t AnimalLaw::reach(Graph& g, uint64_t R) const {
    switch (kind_) {
        case Kind::Singleton: return 0;
        case Kind::Worm:
        case Kind::FiberWorm:
        case Kind::DownPath: return R > 0 ? R - 1 : 0;
        case Kind::Ball: {
            // largest radius whose ball still fits in the volume cap
            uint64_t r = 0;
            uint64_t rmax = std::min<uint64_t>(length_.max_support(), R);
            while (r < rmax) {
                try {
                    if (ball(g, g.origin(), int(r + 1), size_t(R)).size() > R) break;
                } catch (const resource_error&) {
                    break;
                }
                ++r;
            }
            return r;
        }
        case Kind::Mixture: {
            uint64_t m = 0;
            for (const auto& p : parts_) m = std::max(m, p.reach(g, R));
            return m;
        }
    }
    return R;
}

bool AnimalLaw::volume_second_moment_finite(const GraphSpec& spec) const {
    switch (kind_) {
        case Kind::Singleton: return true;
        case Kind::Worm:
            // time-versus-trace: on a nonamenable graph the trace is a
            // positive fraction of the length, so the moments agree
            return length_.moment_finite(2);
        case Kind::FiberWorm: return length_.moment_finite(2);
        case Kind::DownPath: return length_.moment_finite(2);
        case Kind::Ball:
            // volumes grow at least linearly in the radius
            return length_.moment_finite(2) && length_.max_support() != UINT64_MAX;
        case Kind::Mixture: {
            for (size_t i = 0; i < parts_.size(); ++i)
                if (weights_[i] > 0.0 && !parts_[i].volume_second_moment_finite(spec)) return false;
            return true;
        }
    }
    return true;
}

LengthMoment length_moment(const LengthLaw& law, int k, std::optional<uint64_t> R) {
    if (k < 1 || k > 2) throw config_error("length_moment: k must be 1 or 2");
    auto m = law.moment(k, R);
    LengthMoment out;
    if (!m) {
        out.infinite = true;
        return out;
    }
    out.value = *m;
    return out;
}

Estimate truncated_volume_moment(const AnimalLaw& law, Graph& g, int k, uint64_t R,
                                 uint64_t trials, Rng rng) {
    if (k < 1 || k > 2) throw config_error("truncated_volume_moment: k must be 1 or 2");
    MeanVar acc;
    VId o = g.origin();
    for (uint64_t t = 0; t < trials; ++t) {
        Rng tr = rng.derive(t);
        auto s = law.sample_at(g, o, tr, R);
        double v = (s.oversize || s.members.size() > R) ? 0.0
                                                        : std::pow(double(s.members.size()), k);
        acc.add(v);
    }
    Estimate e;
    e.value = acc.mean;
    e.stderr_ = acc.stderr_of_mean();
    e.trials = int64_t(trials);
    e.method = "plain-mc";
    return e;
}

} // namespace zoolab
