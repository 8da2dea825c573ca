#include "skeltrop/metric_graph.hpp"

#include <algorithm>
#include <queue>

namespace skeltrop {

void AugmentedMetricGraph::add_vertex(Vertex v) {
    if (vertices_.count(v.id)) throw DomainError("duplicate vertex id '" + v.id + "'");
    vertices_.emplace(v.id, std::move(v));
}

void AugmentedMetricGraph::add_edge(Edge e) {
    if (edges_.count(e.id)) throw DomainError("duplicate edge id '" + e.id + "'");
    edges_.emplace(e.id, std::move(e));
}

void AugmentedMetricGraph::add_leg(Leg l) {
    if (legs_.count(l.id)) throw DomainError("duplicate leg id '" + l.id + "'");
    legs_.emplace(l.id, std::move(l));
}

const Vertex& AugmentedMetricGraph::vertex(const std::string& id) const {
    auto it = vertices_.find(id);
    if (it == vertices_.end()) throw DomainError("unknown vertex '" + id + "'");
    return it->second;
}

const Edge& AugmentedMetricGraph::edge(const std::string& id) const {
    auto it = edges_.find(id);
    if (it == edges_.end()) throw DomainError("unknown edge '" + id + "'");
    return it->second;
}

const Leg& AugmentedMetricGraph::leg(const std::string& id) const {
    auto it = legs_.find(id);
    if (it == legs_.end()) throw DomainError("unknown leg '" + id + "'");
    return it->second;
}

Int AugmentedMetricGraph::valency(const std::string& vertex_id) const {
    Int v = 0;
    for (const auto& [id, e] : edges_) {
        if (e.tail == vertex_id) ++v;
        if (e.head == vertex_id) ++v;
    }
    for (const auto& [id, l] : legs_)
        if (l.at == vertex_id) ++v;
    return v;
}

std::vector<std::string> AugmentedMetricGraph::legs_at(const std::string& vertex_id) const {
    std::vector<std::string> out;
    for (const auto& [id, l] : legs_)
        if (l.at == vertex_id) out.push_back(id);
    return out;
}

ValidationReport validate_graph(const AugmentedMetricGraph& g) {
    ValidationReport report;
    auto& problems = report.problems;

    if (g.vertices().empty()) {
        problems.push_back("graph has no vertices");
        return report;
    }
    for (const auto& [id, v] : g.vertices())
        if (v.genus < 0) problems.push_back("vertex '" + id + "' has negative genus");
    for (const auto& [id, e] : g.edges()) {
        if (!g.has_vertex(e.tail)) problems.push_back("edge '" + id + "' has dangling tail '" + e.tail + "'");
        if (!g.has_vertex(e.head)) problems.push_back("edge '" + id + "' has dangling head '" + e.head + "'");
        if (!e.length.is_positive())
            problems.push_back("edge '" + id + "' has non-positive length " + e.length.str());
    }
    for (const auto& [id, l] : g.legs())
        if (!g.has_vertex(l.at)) problems.push_back("leg '" + id + "' attached to unknown vertex '" + l.at + "'");

    // Connectivity over resolvable edges only; dangling ids are reported above.
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& [id, e] : g.edges()) {
        if (g.has_vertex(e.tail) && g.has_vertex(e.head)) {
            adj[e.tail].push_back(e.head);
            adj[e.head].push_back(e.tail);
        }
    }
    std::set<std::string> seen;
    std::queue<std::string> work;
    work.push(g.vertices().begin()->first);
    seen.insert(g.vertices().begin()->first);
    while (!work.empty()) {
        auto v = work.front();
        work.pop();
        for (const auto& w : adj[v])
            if (seen.insert(w).second) work.push(w);
    }
    if (seen.size() != g.vertices().size()) problems.push_back("graph is disconnected");

    return report;
}

void require_valid(const AugmentedMetricGraph& g) {
    auto report = validate_graph(g);
    if (!report.ok()) throw ValidationError("invalid graph: " + report.problems.front());
}

InvariantRecord invariants(const AugmentedMetricGraph& g) {
    require_valid(g);
    InvariantRecord rec;
    rec.betti1 = Int(g.edges().size()) - Int(g.vertices().size()) + 1;
    for (const auto& [id, v] : g.vertices()) rec.total_vertex_genus += v.genus;
    rec.genus = rec.betti1 + rec.total_vertex_genus;
    rec.euler_char = 2 - 2 * rec.genus - Int(g.legs().size());
    rec.is_hyperbolic = rec.euler_char < 0;
    rec.is_stable = rec.is_hyperbolic;
    if (rec.is_hyperbolic) {
        for (const auto& [id, v] : g.vertices()) {
            if (v.genus == 0 && g.valency(id) < 3) {
                rec.is_stable = false;
                break;
            }
        }
    }
    return rec;
}

void require_point(const AugmentedMetricGraph& g, const PointOnGraph& p) {
    if (p.is_vertex()) {
        if (!g.has_vertex(p.vertex)) throw DomainError("point at unknown vertex '" + p.vertex + "'");
        return;
    }
    if (!g.has_edge(p.edge)) throw DomainError("point on unknown edge '" + p.edge + "'");
    const auto& e = g.edge(p.edge);
    if (!(p.t.is_positive() && p.t < e.length))
        throw DomainError("parameter " + p.t.str() + " outside (0, " + e.length.str() + ") on edge '" +
                          p.edge + "'");
}

std::string subdivision_vertex_id(const std::string& edge_id, const Rational& t) {
    return edge_id + "@" + t.str();
}

AugmentedMetricGraph subdivide_edge(const AugmentedMetricGraph& g, const std::string& edge_id,
                                    const std::set<Rational>& params) {
    if (params.empty()) return g;
    const Edge& e = g.edge(edge_id);
    for (const auto& t : params) require_point(g, PointOnGraph::on_edge(edge_id, t));

    AugmentedMetricGraph out;
    for (const auto& [id, v] : g.vertices()) out.add_vertex(v);
    for (const auto& [id, l] : g.legs()) out.add_leg(l);
    for (const auto& [id, other] : g.edges())
        if (id != edge_id) out.add_edge(other);

    std::vector<Rational> cuts(params.begin(), params.end());
    std::string prev_vertex = e.tail;
    Rational prev_t = Rational(0);
    for (std::size_t k = 0; k < cuts.size(); ++k) {
        std::string vid = subdivision_vertex_id(edge_id, cuts[k]);
        out.add_vertex(Vertex{vid, 0, ""});
        out.add_edge(Edge{edge_id + "#" + std::to_string(k), prev_vertex, vid, cuts[k] - prev_t});
        prev_vertex = vid;
        prev_t = cuts[k];
    }
    out.add_edge(
        Edge{edge_id + "#" + std::to_string(cuts.size()), prev_vertex, e.head, e.length - prev_t});
    return out;
}

SubdivisionResult subdivide(const AugmentedMetricGraph& g, const PointOnGraph& p) {
    require_valid(g);
    require_point(g, p);
    if (p.is_vertex()) return SubdivisionResult{g, p.vertex};
    auto refined = subdivide_edge(g, p.edge, {p.t});
    return SubdivisionResult{std::move(refined), subdivision_vertex_id(p.edge, p.t)};
}

namespace {

// A vertex is contractible when it has genus 0, no legs, and exactly two
// edge-ends belonging to two distinct edges (a lone loop is kept: a bare
// circle needs at least one vertex).
std::optional<std::string> find_contractible(const AugmentedMetricGraph& g) {
    for (const auto& [vid, v] : g.vertices()) {
        if (v.genus != 0) continue;
        if (!g.legs_at(vid).empty()) continue;
        std::vector<std::string> incident;
        bool loop = false;
        for (const auto& [eid, e] : g.edges()) {
            if (e.tail == vid && e.head == vid) loop = true;
            if (e.tail == vid) incident.push_back(eid);
            if (e.head == vid) incident.push_back(eid);
        }
        if (loop || incident.size() != 2) continue;
        if (incident[0] == incident[1]) continue;
        return vid;
    }
    return std::nullopt;
}

AugmentedMetricGraph contract_at(const AugmentedMetricGraph& g, const std::string& vid) {
    std::vector<Edge> at;
    for (const auto& [eid, e] : g.edges())
        if (e.tail == vid || e.head == vid) at.push_back(e);
    // Merged edge runs from the far end of the lexicographically first edge
    // to the far end of the second, reusing the first id.
    std::sort(at.begin(), at.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
    const Edge& e1 = at[0];
    const Edge& e2 = at[1];
    std::string from = e1.tail == vid ? e1.head : e1.tail;
    std::string to = e2.tail == vid ? e2.head : e2.tail;

    AugmentedMetricGraph out;
    for (const auto& [id, v] : g.vertices())
        if (id != vid) out.add_vertex(v);
    for (const auto& [id, l] : g.legs()) out.add_leg(l);
    for (const auto& [id, e] : g.edges())
        if (id != e1.id && id != e2.id) out.add_edge(e);
    out.add_edge(Edge{e1.id, from, to, e1.length + e2.length});
    return out;
}

} // namespace

AugmentedMetricGraph contract_trivial(const AugmentedMetricGraph& g) {
    auto rec = invariants(g);
    if (!rec.is_hyperbolic)
        throw UnsupportedError("contract_trivial requires a hyperbolic graph (minimal model not unique)");
    AugmentedMetricGraph cur = g;
    while (auto vid = find_contractible(cur)) cur = contract_at(cur, *vid);
    return cur;
}

} // namespace skeltrop
