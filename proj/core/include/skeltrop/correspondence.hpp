#pragma once

#include "skeltrop/morphism.hpp"

#include <optional>

namespace skeltrop {

/// Diagram Y1 <- X -> Y2 of finite harmonic morphisms, kept in the form it
/// was built or parsed in: coarse graphs plus (possibly path-form) morphism
/// data. Edge-to-edge validated views are materialized on demand.
///
/// When identify_targets is set, the identification is a combinatorial
/// isomorphism Y1 -> Y2 (degree 1, all declared expansions 1). Its edges may
/// relate coarse edges of different lengths; interior points transport
/// proportionally along each identified edge. Stabilization synchronizes the
/// two target vertex sets through it, which is what feeds new points back
/// into the system.
struct Correspondence {
    AugmentedMetricGraph x;
    AugmentedMetricGraph y1;
    AugmentedMetricGraph y2;
    MorphismData pi1; // x -> y1
    MorphismData pi2; // x -> y2
    bool identify_targets = false;
    std::optional<MorphismData> identification; // y1 -> y2

    bool operator==(const Correspondence&) const = default;
};

struct CorrespondenceReport {
    MorphismReport pi1;
    MorphismReport pi2;
    bool identification_ok = false;
    bool identification_isometric = false;
    bool is_skeletal = false;
    std::vector<std::string> failures;

    bool ok() const { return pi1.valid() && pi2.valid() && identification_ok; }
};

enum class StabilizationStatus { Stabilized, Diverged };

struct StabilizationOutcome {
    StabilizationStatus status = StabilizationStatus::Stabilized;
    Correspondence result; // stabilized hull, or the truncation at abort
    Int iterations = 0;
    std::vector<Int> added_points_per_iteration;
    std::vector<Rational> min_spacing_per_iteration;
};

/// Validated edge-to-edge views of the two morphisms over a shared refined
/// source (target refinements included where images of refinement vertices
/// force them).
struct CorrespondenceViews {
    HarmonicMorphism pi1;
    HarmonicMorphism pi2;
};

CorrespondenceViews materialize_views(const Correspondence& c);

/// Validates both morphisms and the identification, and reports whether the
/// serialized vertex sets are already closed under pullback, pushforward and
/// synchronization (the skeletal condition).
CorrespondenceReport validate_correspondence(const Correspondence& c);

/// Vertex-set closure: V grows by preimages of target vertices, the target
/// sets by images of V, and identified targets are synchronized after each
/// half-step. Terminates with Stabilized when an iteration adds no points
/// (the minimal skeletal hull dominating the input models) or Diverged at
/// the iteration cap, with per-iteration point counts and minimum vertex
/// spacing for accumulation diagnosis.
StabilizationOutcome stabilize(const Correspondence& c, unsigned max_iter);

/// stabilize with the default cap; the result of a Stabilized outcome is the
/// minimal skeletal hull and is a fixed point of stabilize.
StabilizationOutcome skeletal_hull(const Correspondence& c, unsigned max_iter = 64);

} // namespace skeltrop
