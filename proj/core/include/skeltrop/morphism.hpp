#pragma once

#include "skeltrop/metric_graph.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace skeltrop {

/// One traversal step of an edge path in the target graph.
struct PathStep {
    std::string edge;
    bool reversed = false;

    bool operator==(const PathStep&) const = default;
};

/// Image data of one source edge. Normalized morphisms have single-step
/// paths; serialized inputs may map an edge across a path of target edges
/// (traversed with one common expansion factor per step), which refinement
/// turns into edge-to-edge data.
struct EdgeImage {
    std::string edge;
    std::vector<PathStep> path;
    Int expansion = 1;

    bool single() const { return path.size() == 1; }
    bool operator==(const EdgeImage&) const = default;
};

struct LegImage {
    std::string leg; // target leg
    Int expansion = 1;

    bool operator==(const LegImage&) const = default;
};

/// Combinatorial data of a morphism between two graphs. The graphs
/// themselves are referenced by name inside bundles and carried alongside
/// in code.
struct MorphismData {
    std::string source; // graph name (bundle reference)
    std::string target;
    std::map<std::string, std::string> vertex_map;
    std::map<std::string, EdgeImage> edge_images;
    std::map<std::string, LegImage> leg_map;

    bool operator==(const MorphismData&) const = default;
};

struct MorphismReport {
    Int degree = 0; // 0 when undefined
    std::map<std::string, Int> local_degree;
    bool structural_ok = false;
    bool harmonic_ok = false;
    bool length_ok = false;
    std::map<std::string, Int> rh_defect; // reported, never enforced
    std::vector<std::string> failures;

    bool valid() const { return structural_ok && harmonic_ok && length_ok; }
};

/// A validated finite harmonic morphism: graphs plus edge-to-edge data.
/// Construction runs validation; invalid data throws ValidationError.
class HarmonicMorphism {
public:
    HarmonicMorphism(AugmentedMetricGraph source, AugmentedMetricGraph target, MorphismData data);

    const AugmentedMetricGraph& source() const { return source_; }
    const AugmentedMetricGraph& target() const { return target_; }
    const MorphismData& data() const { return data_; }
    const MorphismReport& report() const { return report_; }
    const Int& degree() const { return report_.degree; }

private:
    AugmentedMetricGraph source_;
    AugmentedMetricGraph target_;
    MorphismData data_;
    MorphismReport report_;
};

/// Full diagnostic pass: structural integrity, length compatibility,
/// direction-independence of expansion sums (local degrees), constancy of
/// the fibre-summed degree, and local Riemann-Hurwitz defects. Requires
/// edge-to-edge data (normalize path-form inputs first).
MorphismReport validate_morphism(const AugmentedMetricGraph& source,
                                 const AugmentedMetricGraph& target, const MorphismData& data);

/// --- piecewise-linear point transport (works on path-form data too) ---

/// Image of a point. Interior points move by arc length scaled with the
/// expansion factor; landing on a path joint yields that vertex.
PointOnGraph push_point(const AugmentedMetricGraph& source, const AugmentedMetricGraph& target,
                        const MorphismData& data, const PointOnGraph& p);

/// All preimages of a target point, exact parameters, no duplicates.
std::vector<PointOnGraph> pull_point(const AugmentedMetricGraph& source,
                                     const AugmentedMetricGraph& target, const MorphismData& data,
                                     const PointOnGraph& q);

std::set<PointOnGraph> pushforward_points(const HarmonicMorphism& f,
                                          const std::set<PointOnGraph>& pts);
std::set<PointOnGraph> pullback_points(const HarmonicMorphism& f, const std::set<PointOnGraph>& pts);

/// --- refinement ---

/// Subdivides the target at the given interior points, pulls the cuts back
/// to the source, and rebuilds edge-to-edge data on the refined graphs.
/// Degree and pre-existing local degrees are unchanged.
HarmonicMorphism refine_along(const HarmonicMorphism& f, const std::set<PointOnGraph>& new_target_vertices);

/// Cut sets addressed by coarse edge id.
using CutSet = std::map<std::string, std::set<Rational>>;

struct RefinedGraph {
    AugmentedMetricGraph graph;
    // anchor of every refined edge: (coarse edge, param interval start)
    struct Segment {
        std::string coarse_edge;
        Rational from;
        Rational to;
    };
    std::map<std::string, Segment> segments;        // refined edge -> interval
    std::map<std::string, PointOnGraph> vertex_pos; // refined vertex -> coarse position
};

/// Subdivides every edge of `g` at its listed parameters (deterministic ids).
RefinedGraph refine_graph(const AugmentedMetricGraph& g, const CutSet& cuts);

/// Rebuilds morphism data between two refinements of the coarse graphs the
/// data was written for. Source cut images that are not target cuts yield
/// multi-step paths (used for truncated stabilizations).
MorphismData materialize_morphism(const AugmentedMetricGraph& coarse_source,
                                  const AugmentedMetricGraph& coarse_target, const MorphismData& data,
                                  const RefinedGraph& refined_source, const RefinedGraph& refined_target);

/// Normalizes a single morphism: subdivides the source at all path joints
/// so every edge maps to a single target edge. (Target refinement is never
/// needed for one morphism on its own.)
HarmonicMorphism normalize_morphism(const AugmentedMetricGraph& source,
                                    const AugmentedMetricGraph& target, const MorphismData& data);

/// Interior source parameters at which edge paths cross target vertices.
CutSet path_crossings(const AugmentedMetricGraph& source, const AugmentedMetricGraph& target,
                      const MorphismData& data);

/// --- derived operations ---

/// Vertices of local degree 1. At each member every incident expansion is 1
/// and the morphism is injective on tangent directions there.
std::set<std::string> isomorphism_locus(const HarmonicMorphism& f);

/// Composite g . f; requires f.target() == g.source() componentwise.
HarmonicMorphism compose(const HarmonicMorphism& f, const HarmonicMorphism& g);

} // namespace skeltrop
