#include "zoolab/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <sstream>

namespace zoolab {

// ---------------------------------------------------------------------------
// GraphSpec grammar
// ---------------------------------------------------------------------------
namespace {

struct Parser {
    const std::string& s;
    size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

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
            throw config_error("graph spec: expected '" + std::string(1, c) + "' at position " +
                               std::to_string(pos) + " in '" + s + "'");
    }
    std::string ident() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && (std::isalpha(uint8_t(s[pos])) || s[pos] == '_')) ++pos;
        if (start == pos)
            throw config_error("graph spec: expected name at position " + std::to_string(pos) +
                               " in '" + s + "'");
        return s.substr(start, pos - start);
    }
    int integer() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && std::isdigit(uint8_t(s[pos]))) ++pos;
        if (start == pos)
            throw config_error("graph spec: expected integer at position " + std::to_string(pos) +
                               " in '" + s + "'");
        return std::stoi(s.substr(start, pos - start));
    }

    GraphSpec expr() {
        std::string name = ident();
        GraphSpec g;
        if (name == "lattice") {
            g.kind = GraphSpec::Kind::Lattice;
            expect('(');
            g.param = integer();
            expect(')');
            if (g.param < 1) throw config_error("lattice(dim): dim must be >= 1");
        } else if (name == "tree") {
            g.kind = GraphSpec::Kind::Tree;
            expect('(');
            g.param = integer();
            expect(')');
            if (g.param < 3) throw config_error("tree(d): d must be >= 3");
        } else if (name == "cycle") {
            g.kind = GraphSpec::Kind::Cycle;
            expect('(');
            g.param = integer();
            expect(')');
            if (g.param < 3) throw config_error("cycle(n): n must be >= 3");
        } else if (name == "line") {
            g.kind = GraphSpec::Kind::Line;
        } else if (name == "free") {
            g.kind = GraphSpec::Kind::Free;
            expect('(');
            g.factors.push_back(expr());
            expect(',');
            g.factors.push_back(expr());
            expect(')');
            for (const auto& f : g.factors)
                if (f.degree() < 1) throw config_error("free(): factors must have degree >= 1");
        } else if (name == "prod") {
            g.kind = GraphSpec::Kind::Prod;
            expect('(');
            g.factors.push_back(expr());
            expect(',');
            g.factors.push_back(expr());
            expect(')');
        } else if (name == "grandparent") {
            g.kind = GraphSpec::Kind::Grandparent;
            expect('(');
            g.param = integer();
            expect(')');
            if (g.param < 3) throw config_error("grandparent(d): d must be >= 3");
        } else {
            throw config_error("graph spec: unknown graph '" + name + "'");
        }
        return g;
    }
};

} // namespace

GraphSpec GraphSpec::parse(const std::string& text) {
    Parser p(text);
    GraphSpec g = p.expr();
    p.skip_ws();
    if (p.pos != text.size())
        throw config_error("graph spec: trailing input at position " + std::to_string(p.pos) +
                           " in '" + text + "'");
    return g;
}

std::string GraphSpec::print() const {
    switch (kind) {
        case Kind::Lattice: return "lattice(" + std::to_string(param) + ")";
        case Kind::Tree: return "tree(" + std::to_string(param) + ")";
        case Kind::Cycle: return "cycle(" + std::to_string(param) + ")";
        case Kind::Line: return "line";
        case Kind::Free: return "free(" + factors[0].print() + "," + factors[1].print() + ")";
        case Kind::Prod: return "prod(" + factors[0].print() + "," + factors[1].print() + ")";
        case Kind::Grandparent: return "grandparent(" + std::to_string(param) + ")";
    }
    return "";
}

int GraphSpec::degree() const {
    switch (kind) {
        case Kind::Lattice: return 2 * param;
        case Kind::Tree: return param;
        case Kind::Cycle: return 2;
        case Kind::Line: return 2;
        case Kind::Free: return factors[0].degree() + factors[1].degree();
        case Kind::Prod: return factors[0].degree() + factors[1].degree();
        case Kind::Grandparent: return param + 1 + (param - 1) * (param - 1);
    }
    return 0;
}

bool GraphSpec::is_finite() const { return kind == Kind::Cycle; }

bool GraphSpec::operator==(const GraphSpec& o) const {
    return kind == o.kind && param == o.param && factors == o.factors;
}

GraphConstants known_constants(const GraphSpec& spec) {
    GraphConstants c;
    c.degree = spec.degree();
    using K = GraphSpec::Kind;
    switch (spec.kind) {
        case K::Tree:
            c.cheeger = double(spec.param - 2);
            c.spectral_radius = 2.0 * std::sqrt(double(spec.param - 1)) / double(spec.param);
            break;
        case K::Lattice:
        case K::Line:
        case K::Cycle:
            c.cheeger = 0.0;
            c.spectral_radius = 1.0;
            break;
        case K::Free:
            // Certified lower bound, valid whenever both factors have degree
            // >= 2: pick per vertex two distinct neighbours inside its unique
            // child copy; the resulting descent relation is a forest with
            // out-degree 2 and in-degree <= 1, so 2|A| <= |A| + |bd A|.
            if (spec.factors[0].degree() >= 2 && spec.factors[1].degree() >= 2) c.cheeger = 1.0;
            break;
        default:
            break; // grandparent / prod: nonamenable but not tabulated
    }
    return c;
}

void Graph::factor_neighborhood(VId, int, std::vector<VId>&) {
    throw config_error("factor_neighborhood: graph is not a free product");
}
int Graph::last_letter_factor(VId) {
    throw config_error("last_letter_factor: graph is not a free product");
}
void Graph::fiber_neighbors(VId, std::vector<VId>&) {
    throw config_error("fiber_neighbors: graph is not a direct product");
}
VId Graph::tree_parent(VId) { throw config_error("tree_parent: graph is not a grandparent tree"); }
void Graph::tree_children(VId, std::vector<VId>&) {
    throw config_error("tree_children: graph is not a grandparent tree");
}

// ---------------------------------------------------------------------------
// Lattice Z^d (Line = Z^1)
// ---------------------------------------------------------------------------
namespace {

struct VecHash {
    size_t operator()(const std::vector<int32_t>& v) const {
        uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (int32_t x : v) h = (h ^ uint64_t(uint32_t(x))) * 0x100000001b3ULL;
        return size_t(h);
    }
};

class LatticeGraph final : public Graph {
public:
    explicit LatticeGraph(GraphSpec spec) : Graph(std::move(spec)) {
        dim_ = spec_.kind == GraphSpec::Kind::Line ? 1 : spec_.param;
        origin_ = intern(std::vector<int32_t>(dim_, 0));
    }

    VId origin() override { return origin_; }

    void neighbors(VId v, std::vector<VId>& out) override {
        out.clear();
        std::vector<int32_t> c = coords_[v];
        for (int a = 0; a < dim_; ++a) {
            for (int s : {+1, -1}) {
                c[a] += s;
                out.push_back(intern(c));
                c[a] -= s;
            }
        }
    }

    std::string encode(VId v) override {
        const auto& c = coords_[v];
        std::string out = "(";
        for (size_t i = 0; i < c.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(c[i]);
        }
        return out + ")";
    }

private:
    VId intern(const std::vector<int32_t>& c) {
        auto it = ids_.find(c);
        if (it != ids_.end()) return it->second;
        VId id = VId(coords_.size());
        coords_.push_back(c);
        ids_.emplace(c, id);
        return id;
    }

    int dim_;
    VId origin_;
    std::vector<std::vector<int32_t>> coords_;
    std::unordered_map<std::vector<int32_t>, VId, VecHash> ids_;
};

// ---------------------------------------------------------------------------
// Cycle Z_n
// ---------------------------------------------------------------------------
class CycleGraph final : public Graph {
public:
    explicit CycleGraph(GraphSpec spec) : Graph(std::move(spec)), n_(spec_.param) {}

    VId origin() override { return 0; }

    void neighbors(VId v, std::vector<VId>& out) override {
        out.clear();
        out.push_back((v + 1) % n_);
        out.push_back((v + n_ - 1) % n_);
    }

    std::string encode(VId v) override { return "c" + std::to_string(v); }

private:
    uint32_t n_;
};

// ---------------------------------------------------------------------------
// RegularTree T_d via proper edge colouring: a vertex is a word over the d
// edge colours with no two consecutive letters equal; traversing colour c
// from a word ending in c goes back up.
// ---------------------------------------------------------------------------
class TreeGraph final : public Graph {
public:
    explicit TreeGraph(GraphSpec spec) : Graph(std::move(spec)), d_(spec_.param) {
        nodes_.push_back({kNoVertex, 255});
    }

    VId origin() override { return 0; }

    bool is_regular_tree() const override { return true; }

    void neighbors(VId v, std::vector<VId>& out) override {
        out.clear();
        for (int c = 0; c < d_; ++c) {
            if (v != 0 && nodes_[v].letter == c)
                out.push_back(nodes_[v].parent);
            else
                out.push_back(child(v, uint8_t(c)));
        }
    }

    std::string encode(VId v) override {
        if (v == 0) return "e";
        std::string rev;
        for (VId cur = v; cur != 0; cur = nodes_[cur].parent) rev += char('0' + nodes_[cur].letter);
        return std::string(rev.rbegin(), rev.rend());
    }

private:
    struct Node {
        VId parent;
        uint8_t letter;
    };

    VId child(VId v, uint8_t c) {
        uint64_t key = (uint64_t(v) << 8) | c;
        auto it = children_.find(key);
        if (it != children_.end()) return it->second;
        VId id = VId(nodes_.size());
        nodes_.push_back({v, c});
        children_.emplace(key, id);
        return id;
    }

    int d_;
    std::vector<Node> nodes_;
    std::unordered_map<uint64_t, VId> children_;
};

// ---------------------------------------------------------------------------
// Free product G1 * G2: strictly alternating words of non-origin factor
// vertices (Def of the free product); the empty word is the origin.
// ---------------------------------------------------------------------------
class FreeProductGraph final : public Graph {
public:
    explicit FreeProductGraph(GraphSpec spec) : Graph(std::move(spec)) {
        f_[0] = make_graph(spec_.factors[0]);
        f_[1] = make_graph(spec_.factors[1]);
        nodes_.push_back({kNoVertex, 0, kNoVertex});
    }

    VId origin() override { return 0; }

    bool is_free_product() const override { return true; }

    int last_letter_factor(VId v) override { return v == 0 ? 0 : nodes_[v].factor; }

    void factor_neighborhood(VId v, int i, std::vector<VId>& out) override {
        if (i != 1 && i != 2) throw config_error("factor_neighborhood: i must be 1 or 2");
        out.clear();
        Graph& fg = *f_[i - 1];
        int lf = last_letter_factor(v);
        if (lf == i) {
            // inside the active copy of G_i: replace the last letter
            VId z = nodes_[v].parent;
            VId x = nodes_[v].fv;
            for (VId nx : fg.neighbors(x)) {
                if (nx == fg.origin())
                    out.push_back(z);
                else
                    out.push_back(intern(z, uint8_t(i), nx));
            }
        } else {
            // fresh copy of G_i hanging off v
            for (VId ny : fg.neighbors(fg.origin())) out.push_back(intern(v, uint8_t(i), ny));
        }
    }

    void neighbors(VId v, std::vector<VId>& out) override {
        out.clear();
        std::vector<VId> block;
        for (int i = 1; i <= 2; ++i) {
            factor_neighborhood(v, i, block);
            out.insert(out.end(), block.begin(), block.end());
        }
    }

    std::string encode(VId v) override {
        if (v == 0) return "e";
        std::vector<VId> chain;
        for (VId cur = v; cur != 0; cur = nodes_[cur].parent) chain.push_back(cur);
        std::string out = "[";
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            if (it != chain.rbegin()) out += "|";
            out += std::to_string(nodes_[*it].factor);
            out += ":";
            out += f_[nodes_[*it].factor - 1]->encode(nodes_[*it].fv);
        }
        return out + "]";
    }

private:
    struct Node {
        VId parent;
        uint8_t factor; // 1 or 2
        VId fv;         // vertex id in that factor, never the factor origin
    };

    VId intern(VId parent, uint8_t factor, VId fv) {
        uint64_t key = hash_key(parent, factor, fv);
        auto range = children_.equal_range(key);
        for (auto it = range.first; it != range.second; ++it) {
            const Node& n = nodes_[it->second];
            if (n.parent == parent && n.factor == factor && n.fv == fv) return it->second;
        }
        VId id = VId(nodes_.size());
        nodes_.push_back({parent, factor, fv});
        children_.emplace(key, id);
        return id;
    }

    static uint64_t hash_key(VId parent, uint8_t factor, VId fv) {
        uint64_t h = (uint64_t(parent) << 33) ^ (uint64_t(factor) << 32) ^ uint64_t(fv);
        h ^= h >> 29;
        h *= 0xbf58476d1ce4e5b9ULL;
        return h;
    }

    std::unique_ptr<Graph> f_[2];
    std::vector<Node> nodes_;
    std::unordered_multimap<uint64_t, VId> children_;
};

// ---------------------------------------------------------------------------
// Direct product G x H (one coordinate steps).
// ---------------------------------------------------------------------------
class DirectProductGraph final : public Graph {
public:
    explicit DirectProductGraph(GraphSpec spec) : Graph(std::move(spec)) {
        f_[0] = make_graph(spec_.factors[0]);
        f_[1] = make_graph(spec_.factors[1]);
        origin_ = intern(f_[0]->origin(), f_[1]->origin());
    }

    VId origin() override { return origin_; }
    bool is_direct_product() const override { return true; }

    void neighbors(VId v, std::vector<VId>& out) override {
        out.clear();
        auto [a, b] = pairs_[v];
        for (VId na : f_[0]->neighbors(a)) out.push_back(intern(na, b));
        for (VId nb : f_[1]->neighbors(b)) out.push_back(intern(a, nb));
    }

    // Steps within the second-factor fiber {a} x H.
    void fiber_neighbors(VId v, std::vector<VId>& out) override {
        out.clear();
        auto [a, b] = pairs_[v];
        for (VId nb : f_[1]->neighbors(b)) out.push_back(intern(a, nb));
    }

    std::string encode(VId v) override {
        auto [a, b] = pairs_[v];
        return "(" + f_[0]->encode(a) + "|" + f_[1]->encode(b) + ")";
    }

private:
    VId intern(VId a, VId b) {
        uint64_t key = (uint64_t(a) << 32) | uint64_t(b);
        auto it = ids_.find(key);
        if (it != ids_.end()) return it->second;
        VId id = VId(pairs_.size());
        pairs_.push_back({a, b});
        ids_.emplace(key, id);
        return id;
    }

    std::unique_ptr<Graph> f_[2];
    VId origin_ = 0;
    std::vector<std::pair<VId, VId>> pairs_;
    std::unordered_map<uint64_t, VId> ids_;
};

// ---------------------------------------------------------------------------
// Trofimov's grandparent graph over T_d with a distinguished end. Vertices:
// the spine is the all-zero ray (both ways), carried as integer levels; off-
// spine vertices hang below a spine vertex via a word whose first letter is
// nonzero. parent() truncates; the graph adds grandparent edges.
// ---------------------------------------------------------------------------
class GrandparentGraph final : public Graph {
public:
    explicit GrandparentGraph(GraphSpec spec) : Graph(std::move(spec)), d_(spec_.param) {
        origin_ = spine(0);
    }

    VId origin() override { return origin_; }
    bool is_grandparent() const override { return true; }

    VId tree_parent(VId v) override {
        const Node& n = nodes_[v];
        if (n.is_spine) return spine(n.level - 1);
        return n.parent;
    }

    void tree_children(VId v, std::vector<VId>& out) override {
        out.clear();
        for (int c = 0; c <= d_ - 2; ++c) out.push_back(child(v, uint8_t(c)));
    }

    void neighbors(VId v, std::vector<VId>& out) override {
        out.clear();
        out.push_back(tree_parent(v));
        std::vector<VId> kids;
        tree_children(v, kids);
        out.insert(out.end(), kids.begin(), kids.end());
        out.push_back(tree_parent(tree_parent(v))); // grandparent
        for (VId k : kids) {
            std::vector<VId> gk;
            tree_children(k, gk);
            out.insert(out.end(), gk.begin(), gk.end());
        }
    }

    std::string encode(VId v) override {
        const Node& n = nodes_[v];
        if (n.is_spine) return "g" + std::to_string(n.level) + ":";
        std::string rev;
        VId cur = v;
        while (!nodes_[cur].is_spine) {
            rev += char('0' + nodes_[cur].letter);
            cur = nodes_[cur].parent;
        }
        return "g" + std::to_string(nodes_[cur].level) + ":" +
               std::string(rev.rbegin(), rev.rend());
    }

private:
    struct Node {
        bool is_spine;
        int32_t level;  // spine only
        VId parent;     // off-spine only
        uint8_t letter; // off-spine only
    };

    VId spine(int32_t level) {
        auto it = spine_ids_.find(level);
        if (it != spine_ids_.end()) return it->second;
        VId id = VId(nodes_.size());
        nodes_.push_back({true, level, kNoVertex, 0});
        spine_ids_.emplace(level, id);
        return id;
    }

    VId child(VId v, uint8_t c) {
        const Node& n = nodes_[v];
        if (n.is_spine && c == 0) return spine(n.level + 1); // stay on the spine
        uint64_t key = (uint64_t(v) << 8) | c;
        auto it = children_.find(key);
        if (it != children_.end()) return it->second;
        VId id = VId(nodes_.size());
        nodes_.push_back({false, 0, v, c});
        children_.emplace(key, id);
        return id;
    }

    int d_;
    VId origin_ = 0;
    std::vector<Node> nodes_;
    std::unordered_map<int32_t, VId> spine_ids_;
    std::unordered_map<uint64_t, VId> children_;
};

} // namespace

std::unique_ptr<Graph> make_graph(const GraphSpec& spec) {
    using K = GraphSpec::Kind;
    switch (spec.kind) {
        case K::Lattice:
        case K::Line: return std::make_unique<LatticeGraph>(spec);
        case K::Cycle: return std::make_unique<CycleGraph>(spec);
        case K::Tree: return std::make_unique<TreeGraph>(spec);
        case K::Free: return std::make_unique<FreeProductGraph>(spec);
        case K::Prod: return std::make_unique<DirectProductGraph>(spec);
        case K::Grandparent: return std::make_unique<GrandparentGraph>(spec);
    }
    throw config_error("make_graph: bad spec");
}

// ---------------------------------------------------------------------------
// Geometry helpers
// ---------------------------------------------------------------------------
std::unordered_map<VId, int> ball_with_dist(Graph& g, VId center, int radius,
                                            size_t max_vertices) {
    std::unordered_map<VId, int> dist;
    dist.emplace(center, 0);
    std::deque<VId> frontier{center};
    std::vector<VId> nb;
    while (!frontier.empty()) {
        VId v = frontier.front();
        frontier.pop_front();
        int dv = dist[v];
        if (dv >= radius) continue;
        g.neighbors(v, nb);
        for (VId u : nb) {
            if (dist.emplace(u, dv + 1).second) {
                if (dist.size() > max_vertices)
                    throw resource_error("ball exceeds vertex guard (" +
                                         std::to_string(max_vertices) + ")");
                frontier.push_back(u);
            }
        }
    }
    return dist;
}

std::vector<VId> ball(Graph& g, VId center, int radius, size_t max_vertices) {
    auto dist = ball_with_dist(g, center, radius, max_vertices);
    std::vector<VId> out;
    out.reserve(dist.size());
    for (const auto& [v, d] : dist) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

VSet ext_boundary(Graph& g, const VSet& a) {
    VSet out;
    std::vector<VId> nb;
    for (VId v : a) {
        g.neighbors(v, nb);
        for (VId u : nb)
            if (!a.count(u)) out.insert(u);
    }
    return out;
}

VSet int_boundary(Graph& g, const VSet& a) {
    VSet out;
    std::vector<VId> nb;
    for (VId v : a) {
        g.neighbors(v, nb);
        for (VId u : nb)
            if (!a.count(u)) {
                out.insert(v);
                break;
            }
    }
    return out;
}

VSet closure(Graph& g, const VSet& a) {
    VSet out = ext_boundary(g, a);
    out.insert(a.begin(), a.end());
    return out;
}

std::optional<int> dist(Graph& g, VId u, VId v, int cap) {
    if (u == v) return 0;
    std::unordered_map<VId, int> seen{{u, 0}};
    std::deque<VId> frontier{u};
    std::vector<VId> nb;
    while (!frontier.empty()) {
        VId w = frontier.front();
        frontier.pop_front();
        int dw = seen[w];
        if (dw >= cap) continue;
        g.neighbors(w, nb);
        for (VId x : nb) {
            if (seen.emplace(x, dw + 1).second) {
                if (x == v) return dw + 1;
                frontier.push_back(x);
            }
        }
    }
    return std::nullopt;
}

} // namespace zoolab
