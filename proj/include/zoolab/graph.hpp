#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "zoolab/errors.hpp"

namespace zoolab {

// ---------------------------------------------------------------------------
// GraphSpec: parse/print grammar, e.g. "free(cycle(3),cycle(4))", "tree(3)",
// "prod(tree(3),lattice(5))", "grandparent(3)", "lattice(2)", "line".
// ---------------------------------------------------------------------------
struct GraphSpec {
    enum class Kind { Lattice, Tree, Cycle, Line, Free, Prod, Grandparent };
    Kind kind = Kind::Line;
    int param = 0; // dim / degree / n
    std::vector<GraphSpec> factors;

    static GraphSpec parse(const std::string& text);
    std::string print() const;
    int degree() const;
    bool is_finite() const; // only standalone cycles are
    bool operator==(const GraphSpec& o) const;
};

struct GraphConstants {
    int degree = 0;
    std::optional<double> cheeger;
    std::optional<double> spectral_radius;
};

// Tabulated constants: exact for trees (h = d-2, rho = 2*sqrt(d-1)/d), exact 0/1
// for amenable specs; free products of degree>=2 factors carry the certified
// lower bound h >= 1 (descent-forest injection; see known_cheeger in graph.cpp).
GraphConstants known_constants(const GraphSpec& spec);

// ---------------------------------------------------------------------------
// Graph: a lazily generated infinite transitive graph. Vertices are interned
// to dense 32-bit ids; canonical identity lives in encode(), which is a pure
// function of the abstract vertex (stable across instances and sessions).
//
// Instances are not thread-safe (interning tables grow on demand); create one
// per worker. All operations are logically pure: same query, same answer.
// ---------------------------------------------------------------------------
using VId = uint32_t;
inline constexpr VId kNoVertex = 0xffffffffu;

class Graph {
public:
    virtual ~Graph() = default;

    const GraphSpec& spec() const { return spec_; }
    int degree() const { return degree_; }
    virtual VId origin() = 0;
    // Exactly degree() distinct vertices in deterministic canonical order.
    virtual void neighbors(VId v, std::vector<VId>& out) = 0;
    // Canonical printable encoding; byte-equal iff same vertex.
    virtual std::string encode(VId v) = 0;

    // Regular tree: neighbor index doubles as the edge colour, so a walk can
    // track its distance to any anchor with a letter stack.
    virtual bool is_regular_tree() const { return false; }

    // Free-product structure (N_i of Def of factor neighbourhoods).
    virtual bool is_free_product() const { return false; }
    virtual void factor_neighborhood(VId v, int i, std::vector<VId>& out);
    // 1 or 2: which factor's copy the last letter of v lives in; 0 for origin.
    virtual int last_letter_factor(VId v);

    // Direct-product structure (fiber of the second factor through v).
    virtual bool is_direct_product() const { return false; }
    virtual void fiber_neighbors(VId v, std::vector<VId>& out);

    // Grandparent-tree structure (underlying-tree descent).
    virtual bool is_grandparent() const { return false; }
    virtual VId tree_parent(VId v);
    virtual void tree_children(VId v, std::vector<VId>& out);

    std::vector<VId> neighbors(VId v) {
        std::vector<VId> out;
        neighbors(v, out);
        return out;
    }

protected:
    explicit Graph(GraphSpec spec) : spec_(std::move(spec)), degree_(spec_.degree()) {}
    GraphSpec spec_;
    int degree_;
};

std::unique_ptr<Graph> make_graph(const GraphSpec& spec);
inline std::unique_ptr<Graph> make_graph(const std::string& text) {
    return make_graph(GraphSpec::parse(text));
}

// ---------------------------------------------------------------------------
// Set/geometry helpers over interned ids.
// ---------------------------------------------------------------------------
using VSet = std::unordered_set<VId>;

// BFS ball; throws resource_error if the ball would exceed max_vertices.
std::vector<VId> ball(Graph& g, VId center, int radius, size_t max_vertices = size_t(5000000));
// Ball together with distances from the center.
std::unordered_map<VId, int> ball_with_dist(Graph& g, VId center, int radius,
                                            size_t max_vertices = size_t(5000000));

VSet ext_boundary(Graph& g, const VSet& a);
VSet int_boundary(Graph& g, const VSet& a);
VSet closure(Graph& g, const VSet& a);

// Graph distance, breadth-first with a hard cap; nullopt when > cap.
std::optional<int> dist(Graph& g, VId u, VId v, int cap);

} // namespace zoolab
