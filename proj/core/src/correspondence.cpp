#include "skeltrop/correspondence.hpp"

#include <algorithm>

namespace skeltrop {

namespace {

// Proportional transport through the identification: vertices follow the
// declared maps, interior points keep their relative position along the
// identified edge (mirrored on reversal).
struct IdentTransport {
    const AugmentedMetricGraph* y1 = nullptr;
    const AugmentedMetricGraph* y2 = nullptr;
    std::map<std::string, std::string> vmap, vmap_inv;
    std::map<std::string, std::pair<std::string, bool>> emap, emap_inv; // edge -> (image, reversed)

    IdentTransport(const AugmentedMetricGraph& a, const AugmentedMetricGraph& b,
                   const MorphismData& ident)
        : y1(&a), y2(&b) {
        for (const auto& [v, w] : ident.vertex_map) {
            vmap[v] = w;
            vmap_inv[w] = v;
        }
        for (const auto& [e, img] : ident.edge_images) {
            if (!img.single()) throw ValidationError("identification must map edges to single edges");
            emap[e] = {img.path.front().edge, img.path.front().reversed};
            emap_inv[img.path.front().edge] = {e, img.path.front().reversed};
        }
    }

    PointOnGraph forward(const PointOnGraph& p) const {
        if (p.is_vertex()) return PointOnGraph::at_vertex(vmap.at(p.vertex));
        auto [img, rev] = emap.at(p.edge);
        Rational scaled = p.t * y2->edge(img).length / y1->edge(p.edge).length;
        return PointOnGraph::on_edge(img, rev ? y2->edge(img).length - scaled : scaled);
    }

    PointOnGraph backward(const PointOnGraph& p) const {
        if (p.is_vertex()) return PointOnGraph::at_vertex(vmap_inv.at(p.vertex));
        auto [pre, rev] = emap_inv.at(p.edge);
        Rational t = rev ? y2->edge(p.edge).length - p.t : p.t;
        return PointOnGraph::on_edge(pre, t * y1->edge(pre).length / y2->edge(p.edge).length);
    }
};

struct PointSets {
    std::set<PointOnGraph> v, w1, w2;
};

PointSets initial_sets(const Correspondence& c) {
    PointSets s;
    for (const auto& [id, vx] : c.x.vertices()) s.v.insert(PointOnGraph::at_vertex(id));
    for (const auto& [id, vx] : c.y1.vertices()) s.w1.insert(PointOnGraph::at_vertex(id));
    for (const auto& [id, vx] : c.y2.vertices()) s.w2.insert(PointOnGraph::at_vertex(id));
    return s;
}

Int insert_all(std::set<PointOnGraph>& into, const std::vector<PointOnGraph>& pts) {
    Int added = 0;
    for (const auto& p : pts)
        if (into.insert(p).second) ++added;
    return added;
}

Int pull_into(std::set<PointOnGraph>& v, const Correspondence& c, const MorphismData& data,
              const AugmentedMetricGraph& target, const std::set<PointOnGraph>& w) {
    Int added = 0;
    for (const auto& q : w) added += insert_all(v, pull_point(c.x, target, data, q));
    return added;
}

Int push_into(std::set<PointOnGraph>& w, const Correspondence& c, const MorphismData& data,
              const AugmentedMetricGraph& target, const std::set<PointOnGraph>& v) {
    Int added = 0;
    for (const auto& p : v)
        if (w.insert(push_point(c.x, target, data, p)).second) ++added;
    return added;
}

Int sync_sets(PointSets& s, const std::optional<IdentTransport>& ident) {
    if (!ident) return 0;
    Int added = 0;
    for (const auto& q : std::set<PointOnGraph>(s.w2))
        if (s.w1.insert(ident->backward(q)).second) ++added;
    for (const auto& p : std::set<PointOnGraph>(s.w1))
        if (s.w2.insert(ident->forward(p)).second) ++added;
    return added;
}

Rational min_spacing(const Correspondence& c, const PointSets& s) {
    Rational best(0);
    bool found = false;
    auto scan = [&](const AugmentedMetricGraph& g, const std::set<PointOnGraph>& pts) {
        std::map<std::string, std::vector<Rational>> per_edge;
        for (const auto& p : pts)
            if (!p.is_vertex()) per_edge[p.edge].push_back(p.t);
        for (const auto& [eid, e] : g.edges()) {
            std::vector<Rational> ts;
            auto it = per_edge.find(eid);
            if (it != per_edge.end()) ts = it->second;
            ts.push_back(Rational(0));
            ts.push_back(e.length);
            std::sort(ts.begin(), ts.end());
            for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
                Rational gap = ts[k + 1] - ts[k];
                if (gap.is_zero()) continue;
                if (!found || gap < best) {
                    best = gap;
                    found = true;
                }
            }
        }
    };
    scan(c.x, s.v);
    scan(c.y1, s.w1);
    scan(c.y2, s.w2);
    return best;
}

CutSet cuts_of(const std::set<PointOnGraph>& pts) {
    CutSet cuts;
    for (const auto& p : pts)
        if (!p.is_vertex()) cuts[p.edge].insert(p.t);
    return cuts;
}

Correspondence materialize_at(const Correspondence& c, const PointSets& s) {
    auto rx = refine_graph(c.x, cuts_of(s.v));
    auto r1 = refine_graph(c.y1, cuts_of(s.w1));
    auto r2 = refine_graph(c.y2, cuts_of(s.w2));

    Correspondence out;
    out.x = rx.graph;
    out.y1 = r1.graph;
    out.y2 = r2.graph;
    out.pi1 = materialize_morphism(c.x, c.y1, c.pi1, rx, r1);
    out.pi2 = materialize_morphism(c.x, c.y2, c.pi2, rx, r2);
    out.identify_targets = c.identify_targets;
    if (c.identify_targets && c.identification) {
        IdentTransport ident(c.y1, c.y2, *c.identification);
        MorphismData refined;
        refined.source = c.identification->source;
        refined.target = c.identification->target;
        refined.leg_map = c.identification->leg_map;
        // Vertices transport to vertices (both sides are sync-closed).
        std::map<std::string, std::map<Rational, std::string>> cut_vertex2;
        for (const auto& [vid, pos] : r2.vertex_pos)
            if (!pos.is_vertex()) cut_vertex2[pos.edge][pos.t] = vid;
        for (const auto& [vid, pos] : r1.vertex_pos) {
            auto q = ident.forward(pos);
            refined.vertex_map[vid] = q.is_vertex() ? q.vertex : cut_vertex2.at(q.edge).at(q.t);
        }
        // Refined segments of an identified edge pair correspond in order
        // (reversed order under an orientation flip).
        std::map<std::string, std::vector<std::pair<Rational, std::string>>> segs1, segs2;
        for (const auto& [sid, seg] : r1.segments) segs1[seg.coarse_edge].push_back({seg.from, sid});
        for (const auto& [sid, seg] : r2.segments) segs2[seg.coarse_edge].push_back({seg.from, sid});
        for (auto& [eid, v] : segs1) std::sort(v.begin(), v.end());
        for (auto& [eid, v] : segs2) std::sort(v.begin(), v.end());
        for (const auto& [eid, list1] : segs1) {
            auto [img, rev] = ident.emap.at(eid);
            auto list2 = segs2.at(img);
            if (list1.size() != list2.size())
                throw Error("internal: identification refinement mismatch on '" + eid + "'");
            for (std::size_t k = 0; k < list1.size(); ++k) {
                const auto& seg2 = rev ? list2[list2.size() - 1 - k] : list2[k];
                refined.edge_images[list1[k].second] =
                    EdgeImage{list1[k].second, {PathStep{seg2.second, rev}}, 1};
            }
        }
        out.identification = std::move(refined);
    }
    return out;
}

// One closure iteration; returns the number of points added.
Int iterate_once(const Correspondence& c, PointSets& s, const std::optional<IdentTransport>& ident) {
    Int added = 0;
    added += pull_into(s.v, c, c.pi1, c.y1, s.w1);
    added += pull_into(s.v, c, c.pi2, c.y2, s.w2);
    added += sync_sets(s, ident);
    added += push_into(s.w1, c, c.pi1, c.y1, s.v);
    added += push_into(s.w2, c, c.pi2, c.y2, s.v);
    added += sync_sets(s, ident);
    return added;
}

void check_identification(const Correspondence& c, CorrespondenceReport& rep) {
    if (!c.identify_targets) {
        rep.identification_ok = true;
        rep.identification_isometric = true;
        return;
    }
    if (!c.identification) {
        rep.failures.push_back("identify_targets set but no identification given");
        return;
    }
    const MorphismData& ident = *c.identification;
    auto fail = [&rep](const std::string& m) { rep.failures.push_back("identification: " + m); };

    std::set<std::string> hit_vertices, hit_edges, hit_legs;
    for (const auto& [v, w] : ident.vertex_map) {
        if (!c.y1.has_vertex(v) || !c.y2.has_vertex(w)) fail("dangling vertex pair " + v + "->" + w);
        else if (!hit_vertices.insert(w).second) fail("vertex '" + w + "' hit twice");
    }
    if (ident.vertex_map.size() != c.y1.vertices().size() ||
        hit_vertices.size() != c.y2.vertices().size())
        fail("vertex map is not a bijection");
    for (const auto& [eid, img] : ident.edge_images) {
        if (!img.single()) {
            fail("edge '" + eid + "' maps to a path");
            continue;
        }
        if (img.expansion != 1) fail("edge '" + eid + "' has expansion != 1");
        const auto& step = img.path.front();
        if (!c.y1.has_edge(eid) || !c.y2.has_edge(step.edge)) {
            fail("dangling edge pair " + eid + "->" + step.edge);
            continue;
        }
        if (!hit_edges.insert(step.edge).second) fail("edge '" + step.edge + "' hit twice");
        const auto& e1 = c.y1.edge(eid);
        const auto& e2 = c.y2.edge(step.edge);
        std::string want_tail = step.reversed ? e2.head : e2.tail;
        std::string want_head = step.reversed ? e2.tail : e2.head;
        auto vt = ident.vertex_map.find(e1.tail);
        auto vh = ident.vertex_map.find(e1.head);
        if (vt == ident.vertex_map.end() || vh == ident.vertex_map.end() ||
            vt->second != want_tail || vh->second != want_head)
            fail("edge '" + eid + "' endpoints incompatible with its image");
    }
    if (ident.edge_images.size() != c.y1.edges().size() || hit_edges.size() != c.y2.edges().size())
        fail("edge map is not a bijection");
    for (const auto& [lid, li] : ident.leg_map) {
        if (!c.y1.has_leg(lid) || !c.y2.has_leg(li.leg)) fail("dangling leg pair");
        else if (!hit_legs.insert(li.leg).second) fail("leg '" + li.leg + "' hit twice");
        if (li.expansion != 1) fail("leg '" + lid + "' has expansion != 1");
    }
    if (ident.leg_map.size() != c.y1.legs().size() || hit_legs.size() != c.y2.legs().size())
        fail("leg map is not a bijection");

    rep.identification_ok =
        std::none_of(rep.failures.begin(), rep.failures.end(),
                     [](const std::string& m) { return m.rfind("identification:", 0) == 0; });

    rep.identification_isometric = rep.identification_ok;
    if (rep.identification_ok) {
        for (const auto& [eid, img] : ident.edge_images) {
            if (c.y1.edge(eid).length != c.y2.edge(img.path.front().edge).length) {
                rep.identification_isometric = false;
                break;
            }
        }
    }
}

} // namespace

CorrespondenceViews materialize_views(const Correspondence& c) {
    // Validates path lengths up front; throws on mismatched totals.
    path_crossings(c.x, c.y1, c.pi1);
    path_crossings(c.x, c.y2, c.pi2);
    // All cuts forced on X by either morphism, plus the target cuts their
    // images force; the pull/push closure without synchronization is finite
    // for length-consistent data (relative positions along coarse edges are
    // preserved by every transport).
    PointSets s = initial_sets(c);
    for (unsigned round = 0;; ++round) {
        if (round > 4096 || s.v.size() > 200000)
            throw ValidationError("refinement closure does not terminate; inconsistent morphism data");
        Int added = 0;
        added += pull_into(s.v, c, c.pi1, c.y1, s.w1);
        added += pull_into(s.v, c, c.pi2, c.y2, s.w2);
        added += push_into(s.w1, c, c.pi1, c.y1, s.v);
        added += push_into(s.w2, c, c.pi2, c.y2, s.v);
        if (added == 0) break;
    }
    auto rx = refine_graph(c.x, cuts_of(s.v));
    auto r1 = refine_graph(c.y1, cuts_of(s.w1));
    auto r2 = refine_graph(c.y2, cuts_of(s.w2));
    return CorrespondenceViews{
        HarmonicMorphism(rx.graph, r1.graph, materialize_morphism(c.x, c.y1, c.pi1, rx, r1)),
        HarmonicMorphism(rx.graph, r2.graph, materialize_morphism(c.x, c.y2, c.pi2, rx, r2))};
}

CorrespondenceReport validate_correspondence(const Correspondence& c) {
    CorrespondenceReport rep;
    for (const auto& p : validate_graph(c.x).problems) rep.failures.push_back("x: " + p);
    for (const auto& p : validate_graph(c.y1).problems) rep.failures.push_back("y1: " + p);
    for (const auto& p : validate_graph(c.y2).problems) rep.failures.push_back("y2: " + p);
    if (!rep.failures.empty()) return rep;

    try {
        auto views = materialize_views(c);
        rep.pi1 = views.pi1.report();
        rep.pi2 = views.pi2.report();
    } catch (const Error& e) {
        rep.failures.push_back(e.what());
        // Keep whatever per-morphism diagnostics are available.
        try {
            auto f1 = normalize_morphism(c.x, c.y1, c.pi1);
            rep.pi1 = f1.report();
        } catch (const Error& e1) {
            rep.pi1.failures.push_back(e1.what());
        }
        try {
            auto f2 = normalize_morphism(c.x, c.y2, c.pi2);
            rep.pi2 = f2.report();
        } catch (const Error& e2) {
            rep.pi2.failures.push_back(e2.what());
        }
    }

    check_identification(c, rep);

    if (rep.pi1.valid() && rep.pi2.valid() && rep.identification_ok) {
        std::optional<IdentTransport> ident;
        if (c.identify_targets) ident.emplace(c.y1, c.y2, *c.identification);
        PointSets s = initial_sets(c);
        rep.is_skeletal = iterate_once(c, s, ident) == 0;
    }
    for (const auto& f : rep.pi1.failures) rep.failures.push_back("pi1: " + f);
    for (const auto& f : rep.pi2.failures) rep.failures.push_back("pi2: " + f);
    return rep;
}

StabilizationOutcome stabilize(const Correspondence& c, unsigned max_iter) {
    if (max_iter == 0) throw ParameterError("stabilize: max_iter must be positive");

    auto rep = validate_correspondence(c);
    if (!rep.ok()) {
        std::string msg = "stabilize: invalid correspondence";
        if (!rep.failures.empty()) msg += ": " + rep.failures.front();
        throw ValidationError(msg);
    }

    std::optional<IdentTransport> ident;
    if (c.identify_targets) ident.emplace(c.y1, c.y2, *c.identification);

    StabilizationOutcome outcome;
    PointSets s = initial_sets(c);
    for (unsigned iter = 1; iter <= max_iter; ++iter) {
        Int added = iterate_once(c, s, ident);
        outcome.added_points_per_iteration.push_back(added);
        outcome.min_spacing_per_iteration.push_back(min_spacing(c, s));
        outcome.iterations = iter;
        if (added == 0) {
            outcome.status = StabilizationStatus::Stabilized;
            outcome.result = materialize_at(c, s);
            return outcome;
        }
    }
    outcome.status = StabilizationStatus::Diverged;
    outcome.result = materialize_at(c, s);
    return outcome;
}

StabilizationOutcome skeletal_hull(const Correspondence& c, unsigned max_iter) {
    return stabilize(c, max_iter);
}

} // namespace skeltrop
