#pragma once

#include "skeltrop/errors.hpp"
#include "skeltrop/rational.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace skeltrop {

struct Vertex {
    std::string id;
    int genus = 0;
    std::string label; // optional, purely cosmetic

    bool operator==(const Vertex&) const = default;
};

/// Finite edge with a fixed orientation (tail -> head). The orientation is
/// chosen at construction and never changes; cycle and cochain signs refer
/// to it. Self-loops are allowed.
struct Edge {
    std::string id;
    std::string tail;
    std::string head;
    Rational length;

    bool operator==(const Edge&) const = default;
};

/// Puncture, modelled as a combinatorial half-edge at a vertex rather than
/// an infinite-length edge.
struct Leg {
    std::string id;
    std::string at;

    bool operator==(const Leg&) const = default;
};

struct ValidationReport {
    std::vector<std::string> problems;
    bool ok() const { return problems.empty(); }
};

struct InvariantRecord {
    Int betti1 = 0;
    Int total_vertex_genus = 0;
    Int genus = 0;
    Int euler_char = 0;
    bool is_hyperbolic = false;
    bool is_stable = false;
};

/// A point of a graph: either a vertex, or a strictly interior point of an
/// edge at parameter t measured from the edge's tail, 0 < t < length.
struct PointOnGraph {
    std::string vertex; // set iff the point is a vertex
    std::string edge;   // set iff the point is interior
    Rational t;

    bool is_vertex() const { return !vertex.empty(); }

    static PointOnGraph at_vertex(std::string id) {
        PointOnGraph p;
        p.vertex = std::move(id);
        return p;
    }
    static PointOnGraph on_edge(std::string edge_id, Rational param) {
        PointOnGraph p;
        p.edge = std::move(edge_id);
        p.t = std::move(param);
        return p;
    }

    bool operator==(const PointOnGraph&) const = default;
    bool operator<(const PointOnGraph& o) const {
        if (vertex != o.vertex) return vertex < o.vertex;
        if (edge != o.edge) return edge < o.edge;
        return t < o.t;
    }
};

/// Metric graph with genus-decorated vertices and legs marking punctures.
/// Immutable once handed to consumers: every operation returns a new value.
class AugmentedMetricGraph {
public:
    AugmentedMetricGraph() = default;

    void add_vertex(Vertex v);
    void add_edge(Edge e);
    void add_leg(Leg l);

    const std::map<std::string, Vertex>& vertices() const { return vertices_; }
    const std::map<std::string, Edge>& edges() const { return edges_; }
    const std::map<std::string, Leg>& legs() const { return legs_; }

    bool has_vertex(const std::string& id) const { return vertices_.count(id) > 0; }
    bool has_edge(const std::string& id) const { return edges_.count(id) > 0; }
    bool has_leg(const std::string& id) const { return legs_.count(id) > 0; }

    const Vertex& vertex(const std::string& id) const;
    const Edge& edge(const std::string& id) const;
    const Leg& leg(const std::string& id) const;

    /// Edge-end count (loops count twice) plus legs.
    Int valency(const std::string& vertex_id) const;

    /// Legs attached at the vertex.
    std::vector<std::string> legs_at(const std::string& vertex_id) const;

    bool operator==(const AugmentedMetricGraph&) const = default;

private:
    std::map<std::string, Vertex> vertices_;
    std::map<std::string, Edge> edges_;
    std::map<std::string, Leg> legs_;
};

/// Lists every violated structural invariant; empty report iff valid.
ValidationReport validate_graph(const AugmentedMetricGraph& g);

void require_valid(const AugmentedMetricGraph& g);

/// betti1, genus, Euler characteristic, hyperbolicity and stability.
/// Throws ValidationError on invalid input.
InvariantRecord invariants(const AugmentedMetricGraph& g);

/// Checks that p lies on g (resolvable vertex id, or edge id with parameter
/// strictly inside (0, length)). Throws DomainError otherwise.
void require_point(const AugmentedMetricGraph& g, const PointOnGraph& p);

struct SubdivisionResult {
    AugmentedMetricGraph graph;
    std::string vertex_id; // the vertex realizing the given point
};

/// Deterministic id of the vertex created when subdividing `edge_id` at
/// parameter t (also used by refinement machinery elsewhere).
std::string subdivision_vertex_id(const std::string& edge_id, const Rational& t);

/// Splits an edge at one interior point through a fresh genus-0 vertex.
/// Subdividing at a vertex returns the graph unchanged with that vertex id.
SubdivisionResult subdivide(const AugmentedMetricGraph& g, const PointOnGraph& p);

/// Splits `edge_id` at all given interior parameters at once; segment ids are
/// derived deterministically from the edge id. Parameters outside (0, length)
/// raise DomainError.
AugmentedMetricGraph subdivide_edge(const AugmentedMetricGraph& g, const std::string& edge_id,
                                    const std::set<Rational>& params);

/// Removes every bare genus-0 valency-2 vertex (no legs) by merging its two
/// incident edges, summing lengths, until no such vertex remains. Requires a
/// valid hyperbolic graph; the result is a fixed point of the operation.
AugmentedMetricGraph contract_trivial(const AugmentedMetricGraph& g);

} // namespace skeltrop
