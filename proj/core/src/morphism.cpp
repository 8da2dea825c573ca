#include "skeltrop/morphism.hpp"

#include <algorithm>

namespace skeltrop {

namespace {

std::string dir_key_edge(const std::string& edge_id, bool tail_end) {
    return (tail_end ? "e+" : "e-") + edge_id;
}
std::string dir_key_leg(const std::string& leg_id) { return "l:" + leg_id; }

// Tangent direction at a vertex: an edge-end or a leg, with the expansion
// factor it carries and the direction it maps to.
struct Direction {
    std::string key;        // direction at the vertex itself
    std::string target_key; // direction at the image vertex
    Int expansion;
};

std::vector<Direction> directions_at(const AugmentedMetricGraph& g, const MorphismData& data,
                                     const std::string& v) {
    std::vector<Direction> out;
    for (const auto& [eid, e] : g.edges()) {
        auto img = data.edge_images.find(eid);
        bool have = img != data.edge_images.end() && img->second.single();
        if (e.tail == v) {
            Direction d;
            d.key = dir_key_edge(eid, true);
            if (have) {
                const auto& step = img->second.path.front();
                d.target_key = dir_key_edge(step.edge, !step.reversed);
                d.expansion = img->second.expansion;
            }
            out.push_back(d);
        }
        if (e.head == v) {
            Direction d;
            d.key = dir_key_edge(eid, false);
            if (have) {
                const auto& step = img->second.path.front();
                d.target_key = dir_key_edge(step.edge, step.reversed);
                d.expansion = img->second.expansion;
            }
            out.push_back(d);
        }
    }
    for (const auto& [lid, l] : g.legs()) {
        if (l.at != v) continue;
        Direction d;
        d.key = dir_key_leg(lid);
        auto it = data.leg_map.find(lid);
        if (it != data.leg_map.end()) {
            d.target_key = dir_key_leg(it->second.leg);
            d.expansion = it->second.expansion;
        }
        out.push_back(d);
    }
    return out;
}

std::vector<std::string> direction_keys_at(const AugmentedMetricGraph& g, const std::string& w) {
    std::vector<std::string> keys;
    for (const auto& [eid, e] : g.edges()) {
        if (e.tail == w) keys.push_back(dir_key_edge(eid, true));
        if (e.head == w) keys.push_back(dir_key_edge(eid, false));
    }
    for (const auto& [lid, l] : g.legs())
        if (l.at == w) keys.push_back(dir_key_leg(lid));
    return keys;
}

Rational path_total(const AugmentedMetricGraph& target, const EdgeImage& img) {
    Rational total(0);
    for (const auto& step : img.path) total += target.edge(step.edge).length;
    return total;
}

// End vertex of a step in walk direction.
std::string step_exit(const AugmentedMetricGraph& target, const PathStep& s) {
    const auto& e = target.edge(s.edge);
    return s.reversed ? e.tail : e.head;
}
std::string step_enter(const AugmentedMetricGraph& target, const PathStep& s) {
    const auto& e = target.edge(s.edge);
    return s.reversed ? e.head : e.tail;
}

} // namespace

MorphismReport validate_morphism(const AugmentedMetricGraph& source,
                                 const AugmentedMetricGraph& target, const MorphismData& data) {
    MorphismReport rep;
    auto fail = [&rep](const std::string& msg) { rep.failures.push_back(msg); };

    auto src_report = validate_graph(source);
    auto tgt_report = validate_graph(target);
    for (const auto& p : src_report.problems) fail("source: " + p);
    for (const auto& p : tgt_report.problems) fail("target: " + p);

    rep.structural_ok = rep.failures.empty();
    if (!rep.structural_ok) return rep;

    for (const auto& [vid, v] : source.vertices()) {
        auto it = data.vertex_map.find(vid);
        if (it == data.vertex_map.end())
            fail("vertex '" + vid + "' has no image");
        else if (!target.has_vertex(it->second))
            fail("vertex '" + vid + "' maps to unknown vertex '" + it->second + "'");
    }
    for (const auto& [eid, e] : source.edges()) {
        auto it = data.edge_images.find(eid);
        if (it == data.edge_images.end()) {
            fail("edge '" + eid + "' has no image");
            continue;
        }
        const EdgeImage& img = it->second;
        if (img.path.empty()) {
            fail("edge '" + eid + "' has empty image path");
            continue;
        }
        if (!img.single()) {
            fail("edge '" + eid + "' maps to an edge path; refine to edge-to-edge data first");
            continue;
        }
        if (img.expansion < 1) {
            fail("edge '" + eid + "' has expansion < 1");
            continue;
        }
        const auto& step = img.path.front();
        if (!target.has_edge(step.edge)) {
            fail("edge '" + eid + "' maps to unknown edge '" + step.edge + "'");
            continue;
        }
        auto vm_tail = data.vertex_map.count(e.tail) ? data.vertex_map.at(e.tail) : std::string();
        auto vm_head = data.vertex_map.count(e.head) ? data.vertex_map.at(e.head) : std::string();
        const auto& img_edge = target.edge(step.edge);
        std::string want_tail = step.reversed ? img_edge.head : img_edge.tail;
        std::string want_head = step.reversed ? img_edge.tail : img_edge.head;
        if (vm_tail != want_tail || vm_head != want_head)
            fail("edge '" + eid + "' endpoints are incompatible with its image");
    }
    for (const auto& [lid, l] : source.legs()) {
        auto it = data.leg_map.find(lid);
        if (it == data.leg_map.end()) {
            fail("leg '" + lid + "' has no image");
            continue;
        }
        if (!target.has_leg(it->second.leg)) {
            fail("leg '" + lid + "' maps to unknown leg '" + it->second.leg + "'");
            continue;
        }
        if (it->second.expansion < 1) {
            fail("leg '" + lid + "' has expansion < 1");
            continue;
        }
        auto vm_at = data.vertex_map.count(l.at) ? data.vertex_map.at(l.at) : std::string();
        if (target.leg(it->second.leg).at != vm_at)
            fail("leg '" + lid + "' maps to a leg at the wrong vertex");
    }

    rep.structural_ok = rep.failures.empty();
    if (!rep.structural_ok) return rep;

    // Length compatibility: l(f(e)) = d_e . l(e), exact.
    rep.length_ok = true;
    for (const auto& [eid, e] : source.edges()) {
        const EdgeImage& img = data.edge_images.at(eid);
        const auto& img_edge = target.edge(img.path.front().edge);
        if (img_edge.length != Rational(img.expansion) * e.length) {
            rep.length_ok = false;
            fail("edge '" + eid + "': image length " + img_edge.length.str() + " != " +
                 img.expansion.str() + " * " + e.length.str());
        }
    }

    // Harmonicity: at each vertex the expansion sum over directions mapping
    // to a fixed target direction is independent of that direction.
    rep.harmonic_ok = true;
    for (const auto& [vid, v] : source.vertices()) {
        const std::string& w = data.vertex_map.at(vid);
        std::map<std::string, Int> sums;
        for (const auto& key : direction_keys_at(target, w)) sums[key] = 0;
        auto dirs = directions_at(source, data, vid);
        bool bad = false;
        for (const auto& d : dirs) {
            auto it = sums.find(d.target_key);
            if (it == sums.end()) {
                fail("direction " + d.key + " at '" + vid + "' maps outside the star of '" + w + "'");
                bad = true;
                continue;
            }
            it->second += d.expansion;
        }
        if (bad) {
            rep.harmonic_ok = false;
            continue;
        }
        Int local = sums.empty() ? Int(1) : sums.begin()->second;
        for (const auto& [key, s] : sums) {
            if (s != local) {
                rep.harmonic_ok = false;
                fail("direction sums at '" + vid + "' differ (" + local.str() + " vs " + s.str() +
                     " over " + key + ")");
            }
        }
        if (local == 0) {
            rep.harmonic_ok = false;
            fail("vertex '" + vid + "' has local degree 0");
        }
        rep.local_degree[vid] = local;

        Int spread = 0;
        for (const auto& d : dirs) spread += d.expansion - 1;
        rep.rh_defect[vid] = (Int(2) * v.genus - 2) -
                             local * (Int(2) * target.vertex(w).genus - 2) - spread;
    }

    if (rep.harmonic_ok) {
        std::map<std::string, Int> fibre_sum;
        for (const auto& [wid, w] : target.vertices()) fibre_sum[wid] = 0;
        for (const auto& [vid, ld] : rep.local_degree) fibre_sum[data.vertex_map.at(vid)] += ld;
        Int degree = fibre_sum.begin()->second;
        for (const auto& [wid, s] : fibre_sum) {
            if (s == 0) {
                rep.harmonic_ok = false;
                fail("target vertex '" + wid + "' has empty fibre; degree undefined");
            } else if (s != degree) {
                rep.harmonic_ok = false;
                fail("fibre degree over '" + wid + "' is " + s.str() + ", expected " + degree.str());
            }
        }
        if (rep.harmonic_ok) rep.degree = degree;
    }
    return rep;
}

HarmonicMorphism::HarmonicMorphism(AugmentedMetricGraph source, AugmentedMetricGraph target,
                                   MorphismData data)
    : source_(std::move(source)), target_(std::move(target)), data_(std::move(data)) {
    report_ = validate_morphism(source_, target_, data_);
    if (!report_.valid()) {
        std::string msg = "invalid morphism";
        if (!report_.failures.empty()) msg += ": " + report_.failures.front();
        throw ValidationError(msg);
    }
}

PointOnGraph push_point(const AugmentedMetricGraph& source, const AugmentedMetricGraph& target,
                        const MorphismData& data, const PointOnGraph& p) {
    require_point(source, p);
    if (p.is_vertex()) {
        auto it = data.vertex_map.find(p.vertex);
        if (it == data.vertex_map.end()) throw DomainError("vertex '" + p.vertex + "' has no image");
        return PointOnGraph::at_vertex(it->second);
    }
    auto img_it = data.edge_images.find(p.edge);
    if (img_it == data.edge_images.end())
        throw DomainError("edge '" + p.edge + "' has no image");
    const EdgeImage& img = img_it->second;
    Rational arc = Rational(img.expansion) * p.t;
    Rational acc(0);
    for (std::size_t j = 0; j < img.path.size(); ++j) {
        const auto& step = img.path[j];
        Rational len = target.edge(step.edge).length;
        if (arc < acc + len) {
            Rational offset = arc - acc;
            if (offset.is_zero()) return PointOnGraph::at_vertex(step_enter(target, step));
            return PointOnGraph::on_edge(step.edge, step.reversed ? len - offset : offset);
        }
        acc += len;
        if (arc == acc) return PointOnGraph::at_vertex(step_exit(target, step));
    }
    throw DomainError("point parameter exceeds the image path of edge '" + p.edge + "'");
}

std::vector<PointOnGraph> pull_point(const AugmentedMetricGraph& source,
                                     const AugmentedMetricGraph& target, const MorphismData& data,
                                     const PointOnGraph& q) {
    require_point(target, q);
    std::set<PointOnGraph> out;
    if (q.is_vertex()) {
        for (const auto& [vid, w] : data.vertex_map)
            if (w == q.vertex) out.insert(PointOnGraph::at_vertex(vid));
        // Interior preimages at path joints.
        for (const auto& [eid, img] : data.edge_images) {
            if (img.single()) continue;
            Rational acc(0);
            for (std::size_t j = 0; j + 1 < img.path.size(); ++j) {
                acc += target.edge(img.path[j].edge).length;
                if (step_exit(target, img.path[j]) == q.vertex)
                    out.insert(PointOnGraph::on_edge(eid, acc / Rational(img.expansion)));
            }
        }
        return {out.begin(), out.end()};
    }
    for (const auto& [eid, img] : data.edge_images) {
        Rational acc(0);
        for (const auto& step : img.path) {
            Rational len = target.edge(step.edge).length;
            if (step.edge == q.edge) {
                Rational offset = step.reversed ? len - q.t : q.t;
                out.insert(PointOnGraph::on_edge(eid, (acc + offset) / Rational(img.expansion)));
            }
            acc += len;
        }
    }
    return {out.begin(), out.end()};
}

std::set<PointOnGraph> pushforward_points(const HarmonicMorphism& f,
                                          const std::set<PointOnGraph>& pts) {
    std::set<PointOnGraph> out;
    for (const auto& p : pts) out.insert(push_point(f.source(), f.target(), f.data(), p));
    return out;
}

std::set<PointOnGraph> pullback_points(const HarmonicMorphism& f, const std::set<PointOnGraph>& pts) {
    std::set<PointOnGraph> out;
    for (const auto& q : pts) {
        auto pre = pull_point(f.source(), f.target(), f.data(), q);
        out.insert(pre.begin(), pre.end());
    }
    return out;
}

RefinedGraph refine_graph(const AugmentedMetricGraph& g, const CutSet& cuts) {
    RefinedGraph out;
    AugmentedMetricGraph cur;
    for (const auto& [id, v] : g.vertices()) {
        cur.add_vertex(v);
        out.vertex_pos[id] = PointOnGraph::at_vertex(id);
    }
    for (const auto& [id, l] : g.legs()) cur.add_leg(l);
    for (const auto& [eid, e] : g.edges()) {
        auto it = cuts.find(eid);
        if (it == cuts.end() || it->second.empty()) {
            cur.add_edge(e);
            out.segments[eid] = RefinedGraph::Segment{eid, Rational(0), e.length};
            continue;
        }
        for (const auto& t : it->second)
            if (!(t.is_positive() && t < e.length))
                throw DomainError("cut parameter " + t.str() + " outside (0, " + e.length.str() +
                                  ") on edge '" + eid + "'");
        std::vector<Rational> ts(it->second.begin(), it->second.end());
        std::string prev = e.tail;
        Rational prev_t(0);
        for (std::size_t k = 0; k <= ts.size(); ++k) {
            Rational to = k < ts.size() ? ts[k] : e.length;
            std::string seg_id = eid + "#" + std::to_string(k);
            std::string next = k < ts.size() ? subdivision_vertex_id(eid, ts[k]) : e.head;
            if (k < ts.size()) {
                cur.add_vertex(Vertex{next, 0, ""});
                out.vertex_pos[next] = PointOnGraph::on_edge(eid, ts[k]);
            }
            cur.add_edge(Edge{seg_id, prev, next, to - prev_t});
            out.segments[seg_id] = RefinedGraph::Segment{eid, prev_t, to};
            prev = next;
            prev_t = to;
        }
    }
    out.graph = std::move(cur);
    return out;
}

namespace {

// Index of a refined target graph: coarse edge -> its refined segments in
// parameter order, and coarse positions -> refined vertex ids.
struct TargetIndex {
    std::map<std::string, std::vector<std::string>> segs_by_edge;
    std::map<std::string, std::map<Rational, std::string>> cut_vertex; // coarse edge -> t -> vertex

    explicit TargetIndex(const RefinedGraph& r) {
        std::map<std::string, std::vector<std::pair<Rational, std::string>>> tmp;
        for (const auto& [seg_id, seg] : r.segments) tmp[seg.coarse_edge].push_back({seg.from, seg_id});
        for (auto& [eid, v] : tmp) {
            std::sort(v.begin(), v.end());
            for (auto& [from, seg_id] : v) segs_by_edge[eid].push_back(seg_id);
        }
        for (const auto& [vid, pos] : r.vertex_pos)
            if (!pos.is_vertex()) cut_vertex[pos.edge][pos.t] = vid;
    }

    std::string vertex_at(const PointOnGraph& coarse_pos) const {
        if (coarse_pos.is_vertex()) return coarse_pos.vertex;
        auto e = cut_vertex.find(coarse_pos.edge);
        if (e != cut_vertex.end()) {
            auto t = e->second.find(coarse_pos.t);
            if (t != e->second.end()) return t->second;
        }
        throw Error("internal: no refined vertex at " + coarse_pos.edge + "@" + coarse_pos.t.str());
    }
};

} // namespace

MorphismData materialize_morphism(const AugmentedMetricGraph& coarse_source,
                                  const AugmentedMetricGraph& coarse_target, const MorphismData& data,
                                  const RefinedGraph& refined_source,
                                  const RefinedGraph& refined_target) {
    TargetIndex index(refined_target);
    MorphismData out;
    out.source = data.source;
    out.target = data.target;
    out.leg_map = data.leg_map;

    for (const auto& [vid, pos] : refined_source.vertex_pos) {
        if (pos.is_vertex())
            out.vertex_map[vid] = data.vertex_map.at(pos.vertex);
        else
            out.vertex_map[vid] = index.vertex_at(push_point(coarse_source, coarse_target, data, pos));
    }

    // Group refined source segments per coarse edge, in order.
    std::map<std::string, std::vector<std::pair<Rational, std::string>>> by_edge;
    for (const auto& [seg_id, seg] : refined_source.segments)
        by_edge[seg.coarse_edge].push_back({seg.from, seg_id});

    for (auto& [eid, segs] : by_edge) {
        std::sort(segs.begin(), segs.end());
        const EdgeImage& img = data.edge_images.at(eid);
        // Refined decomposition of the image path: walk target segments in
        // arc order, flipping per-step orientation as needed.
        struct Piece {
            std::string refined_edge;
            bool reversed;
            Rational from, to; // arc interval along the whole path
        };
        std::vector<Piece> pieces;
        Rational acc(0);
        for (const auto& step : img.path) {
            auto it = index.segs_by_edge.find(step.edge);
            if (it == index.segs_by_edge.end()) throw Error("internal: unindexed edge " + step.edge);
            auto ids = it->second;
            if (step.reversed) std::reverse(ids.begin(), ids.end());
            for (const auto& seg_id : ids) {
                Rational len = refined_target.graph.edge(seg_id).length;
                pieces.push_back(Piece{seg_id, step.reversed, acc, acc + len});
                acc += len;
            }
        }
        for (const auto& [from, seg_id] : segs) {
            const auto& seg = refined_source.segments.at(seg_id);
            Rational a = Rational(img.expansion) * seg.from;
            Rational b = Rational(img.expansion) * seg.to;
            EdgeImage refined_img;
            refined_img.edge = seg_id;
            refined_img.expansion = img.expansion;
            for (const auto& piece : pieces) {
                if (piece.to <= a || piece.from >= b) continue;
                if (piece.from < a || piece.to > b)
                    throw Error("internal: refinement cut misaligned on edge '" + eid + "'");
                refined_img.path.push_back(PathStep{piece.refined_edge, piece.reversed});
            }
            if (refined_img.path.empty()) throw Error("internal: empty refined image on '" + eid + "'");
            out.edge_images[seg_id] = std::move(refined_img);
        }
    }
    return out;
}

CutSet path_crossings(const AugmentedMetricGraph& source, const AugmentedMetricGraph& target,
                      const MorphismData& data) {
    CutSet cuts;
    for (const auto& [eid, img] : data.edge_images) {
        if (img.single()) continue;
        Rational total = path_total(target, img);
        if (total != Rational(img.expansion) * source.edge(eid).length)
            throw ValidationError("edge '" + eid + "': image path length " + total.str() +
                                  " != " + img.expansion.str() + " * " +
                                  source.edge(eid).length.str());
        Rational acc(0);
        for (std::size_t j = 0; j + 1 < img.path.size(); ++j) {
            acc += target.edge(img.path[j].edge).length;
            cuts[eid].insert(acc / Rational(img.expansion));
        }
    }
    return cuts;
}

HarmonicMorphism normalize_morphism(const AugmentedMetricGraph& source,
                                    const AugmentedMetricGraph& target, const MorphismData& data) {
    auto cuts = path_crossings(source, target, data);
    auto refined_source = refine_graph(source, cuts);
    auto refined_target = refine_graph(target, {});
    auto md = materialize_morphism(source, target, data, refined_source, refined_target);
    return HarmonicMorphism(refined_source.graph, target, md);
}

HarmonicMorphism refine_along(const HarmonicMorphism& f,
                              const std::set<PointOnGraph>& new_target_vertices) {
    CutSet target_cuts;
    for (const auto& q : new_target_vertices) {
        require_point(f.target(), q);
        if (!q.is_vertex()) target_cuts[q.edge].insert(q.t);
    }
    if (target_cuts.empty()) return f;

    CutSet source_cuts;
    for (const auto& [eid, ts] : target_cuts)
        for (const auto& t : ts)
            for (const auto& p : pull_point(f.source(), f.target(), f.data(), PointOnGraph::on_edge(eid, t)))
                if (!p.is_vertex()) source_cuts[p.edge].insert(p.t);

    auto refined_source = refine_graph(f.source(), source_cuts);
    auto refined_target = refine_graph(f.target(), target_cuts);
    auto md = materialize_morphism(f.source(), f.target(), f.data(), refined_source, refined_target);
    return HarmonicMorphism(refined_source.graph, refined_target.graph, md);
}

std::set<std::string> isomorphism_locus(const HarmonicMorphism& f) {
    std::set<std::string> out;
    for (const auto& [vid, ld] : f.report().local_degree)
        if (ld == 1) out.insert(vid);
    return out;
}

HarmonicMorphism compose(const HarmonicMorphism& f, const HarmonicMorphism& g) {
    if (!(f.target() == g.source()))
        throw DomainError("compose: middle graphs do not match");
    MorphismData out;
    out.source = f.data().source;
    out.target = g.data().target;
    for (const auto& [v, w] : f.data().vertex_map) out.vertex_map[v] = g.data().vertex_map.at(w);
    for (const auto& [eid, img] : f.data().edge_images) {
        const auto& step = img.path.front();
        const auto& gimg = g.data().edge_images.at(step.edge);
        const auto& gstep = gimg.path.front();
        EdgeImage composite;
        composite.edge = eid;
        composite.path = {PathStep{gstep.edge, step.reversed != gstep.reversed}};
        composite.expansion = img.expansion * gimg.expansion;
        out.edge_images[eid] = std::move(composite);
    }
    for (const auto& [lid, li] : f.data().leg_map) {
        const auto& gli = g.data().leg_map.at(li.leg);
        out.leg_map[lid] = LegImage{gli.leg, li.expansion * gli.expansion};
    }
    return HarmonicMorphism(f.source(), g.target(), out);
}

} // namespace skeltrop
