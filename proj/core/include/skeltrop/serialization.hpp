#pragma once

#include "skeltrop/correspondence.hpp"
#include "skeltrop/linearization.hpp"

#include <optional>
#include <string>

namespace skeltrop {

/// Named collection of graph and morphism documents, optionally carrying a
/// correspondence that references them by name. The single interchange
/// format of the toolkit; rationals are serialized as exact "num/den"
/// strings, never floating point.
struct Bundle {
    std::map<std::string, AugmentedMetricGraph> graphs;
    std::map<std::string, MorphismData> morphisms;

    struct CorrespondenceRef {
        std::string x, y1, y2;
        std::string pi1, pi2;
        bool identify_targets = false;
        std::optional<std::string> identification;

        bool operator==(const CorrespondenceRef&) const = default;
    };
    std::optional<CorrespondenceRef> correspondence;

    bool operator==(const Bundle&) const = default;
};

std::string graph_to_json(const AugmentedMetricGraph& g);
AugmentedMetricGraph graph_from_json(const std::string& text);

std::string morphism_to_json(const MorphismData& m);
MorphismData morphism_from_json(const std::string& text);

std::string bundle_to_json(const Bundle& b);
Bundle bundle_from_json(const std::string& text);

/// Resolves the bundle's correspondence section. Throws ParseError when the
/// section or a referenced document is missing.
Correspondence assemble_correspondence(const Bundle& b);

Bundle bundle_of_graph(const std::string& name, const AugmentedMetricGraph& g);
Bundle bundle_of_morphism(const std::string& name, const AugmentedMetricGraph& source,
                          const AugmentedMetricGraph& target, const MorphismData& data);
Bundle bundle_of_correspondence(const Correspondence& c);

std::string invariants_to_json(const InvariantRecord& rec);

std::string matrix_to_json(const IntMat& m);
IntMat matrix_from_json(const std::string& text);

std::string operator_bundle_to_json(const OperatorBundle& b);
OperatorBundle operator_bundle_from_json(const std::string& text);

std::string outcome_to_json(const StabilizationOutcome& o);

std::string validation_report_to_json(const ValidationReport& r);
std::string morphism_report_to_json(const MorphismReport& r);
std::string correspondence_report_to_json(const CorrespondenceReport& r);

/// Cycle lattice, pairing, component group and weight dims of one graph;
/// raises IntegralityError for non-integer lengths.
std::string linearization_to_json(const AugmentedMetricGraph& g);

/// Deterministic DOT rendering. Vertices are labeled "id[g=genus]", edges
/// "len=..."; bundles with morphisms use one cluster per graph and annotate
/// source edges with their expansion factors.
std::string graph_to_dot(const std::string& name, const AugmentedMetricGraph& g);
std::string bundle_to_dot(const Bundle& b);

} // namespace skeltrop
