#include "skeltrop/serialization.hpp"

#include <json.hpp>

#include <sstream>

namespace skeltrop {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed JSON");
    return j;
}

Int int_from_json(const json& j, const std::string& what) {
    if (j.is_number_integer()) return Int(j.get<long long>());
    if (j.is_string()) {
        try {
            return Int(j.get<std::string>());
        } catch (const std::exception&) {
        }
    }
    throw ParseError("expected an integer for " + what);
}

json int_to_json(const Int& n) {
    if (n >= std::numeric_limits<long long>::min() && n <= std::numeric_limits<long long>::max())
        return json(static_cast<long long>(n));
    return json(n.str());
}

Rational rational_from_json(const json& j, const std::string& what) {
    if (j.is_string()) {
        try {
            return Rational::parse(j.get<std::string>());
        } catch (const std::exception&) {
        }
    }
    if (j.is_number_integer()) return Rational(Int(j.get<long long>()));
    throw ParseError("expected an exact fraction string for " + what);
}

json graph_json(const AugmentedMetricGraph& g) {
    json out;
    out["vertices"] = json::array();
    for (const auto& [id, v] : g.vertices()) {
        json jv{{"id", v.id}, {"genus", v.genus}};
        if (!v.label.empty()) jv["label"] = v.label;
        out["vertices"].push_back(jv);
    }
    out["edges"] = json::array();
    for (const auto& [id, e] : g.edges())
        out["edges"].push_back(json{{"id", e.id},
                                    {"tail", e.tail},
                                    {"head", e.head},
                                    {"length", e.length.fraction_str()}});
    out["legs"] = json::array();
    for (const auto& [id, l] : g.legs()) out["legs"].push_back(json{{"id", l.id}, {"at", l.at}});
    return out;
}

AugmentedMetricGraph graph_parse(const json& j) {
    if (!j.is_object() || !j.contains("vertices")) throw ParseError("graph document without vertices");
    AugmentedMetricGraph g;
    for (const auto& jv : j.at("vertices")) {
        Vertex v;
        v.id = jv.at("id").get<std::string>();
        v.genus = jv.value("genus", 0);
        v.label = jv.value("label", std::string());
        if (v.genus < 0) throw ParseError("vertex '" + v.id + "' has negative genus");
        g.add_vertex(std::move(v));
    }
    for (const auto& je : j.value("edges", json::array())) {
        Edge e;
        e.id = je.at("id").get<std::string>();
        e.tail = je.at("tail").get<std::string>();
        e.head = je.at("head").get<std::string>();
        e.length = rational_from_json(je.at("length"), "edge '" + e.id + "' length");
        g.add_edge(std::move(e));
    }
    for (const auto& jl : j.value("legs", json::array()))
        g.add_leg(Leg{jl.at("id").get<std::string>(), jl.at("at").get<std::string>()});
    return g;
}

json morphism_json(const MorphismData& m) {
    json out;
    out["source"] = m.source;
    out["target"] = m.target;
    out["vertex_map"] = json::object();
    for (const auto& [v, w] : m.vertex_map) out["vertex_map"][v] = w;
    out["edge_images"] = json::array();
    for (const auto& [eid, img] : m.edge_images) {
        json ji{{"edge", eid}, {"expansion", int_to_json(img.expansion)}};
        if (img.single()) {
            ji["image"] = img.path.front().edge;
            ji["reversed"] = img.path.front().reversed;
        } else {
            json steps = json::array();
            for (const auto& s : img.path) steps.push_back((s.reversed ? "~" : "") + s.edge);
            ji["image"] = steps;
        }
        out["edge_images"].push_back(ji);
    }
    out["leg_map"] = json::object();
    for (const auto& [lid, li] : m.leg_map)
        out["leg_map"][lid] = json{{"leg", li.leg}, {"expansion", int_to_json(li.expansion)}};
    return out;
}

MorphismData morphism_parse(const json& j) {
    if (!j.is_object() || !j.contains("vertex_map")) throw ParseError("morphism document without vertex_map");
    MorphismData m;
    m.source = j.value("source", std::string());
    m.target = j.value("target", std::string());
    for (const auto& [v, w] : j.at("vertex_map").items()) m.vertex_map[v] = w.get<std::string>();
    for (const auto& ji : j.value("edge_images", json::array())) {
        EdgeImage img;
        img.edge = ji.at("edge").get<std::string>();
        img.expansion = int_from_json(ji.at("expansion"), "expansion of '" + img.edge + "'");
        const auto& image = ji.at("image");
        if (image.is_string()) {
            img.path = {PathStep{image.get<std::string>(), ji.value("reversed", false)}};
        } else if (image.is_array()) {
            for (const auto& step : image) {
                std::string s = step.get<std::string>();
                bool reversed = !s.empty() && s[0] == '~';
                img.path.push_back(PathStep{reversed ? s.substr(1) : s, reversed});
            }
            if (img.path.empty()) throw ParseError("empty image path for edge '" + img.edge + "'");
        } else {
            throw ParseError("edge image must be an id or an array of ids");
        }
        m.edge_images[img.edge] = std::move(img);
    }
    const json leg_map = j.value("leg_map", json::object());
    for (const auto& [lid, jl] : leg_map.items()) {
        LegImage li;
        li.leg = jl.at("leg").get<std::string>();
        li.expansion = int_from_json(jl.at("expansion"), "expansion of leg '" + lid + "'");
        m.leg_map[lid] = std::move(li);
    }
    return m;
}

json bundle_json(const Bundle& b) {
    json out;
    out["graphs"] = json::object();
    for (const auto& [name, g] : b.graphs) out["graphs"][name] = graph_json(g);
    if (!b.morphisms.empty()) {
        out["morphisms"] = json::object();
        for (const auto& [name, m] : b.morphisms) out["morphisms"][name] = morphism_json(m);
    }
    if (b.correspondence) {
        const auto& c = *b.correspondence;
        json jc{{"x", c.x},     {"y1", c.y1},   {"y2", c.y2},
                {"pi1", c.pi1}, {"pi2", c.pi2}, {"identify_targets", c.identify_targets}};
        if (c.identification) jc["identification"] = *c.identification;
        out["correspondence"] = jc;
    }
    return out;
}

Bundle bundle_parse(const json& j) {
    if (!j.is_object() || !j.contains("graphs") || !j.at("graphs").is_object() ||
        j.at("graphs").empty())
        throw ParseError("bundle without graphs");
    Bundle b;
    for (const auto& [name, jg] : j.at("graphs").items()) b.graphs[name] = graph_parse(jg);
    const json morphisms = j.value("morphisms", json::object());
    for (const auto& [name, jm] : morphisms.items()) b.morphisms[name] = morphism_parse(jm);
    if (j.contains("correspondence")) {
        const auto& jc = j.at("correspondence");
        Bundle::CorrespondenceRef ref;
        ref.x = jc.at("x").get<std::string>();
        ref.y1 = jc.at("y1").get<std::string>();
        ref.y2 = jc.at("y2").get<std::string>();
        ref.pi1 = jc.at("pi1").get<std::string>();
        ref.pi2 = jc.at("pi2").get<std::string>();
        ref.identify_targets = jc.value("identify_targets", false);
        if (jc.contains("identification") && !jc.at("identification").is_null())
            ref.identification = jc.at("identification").get<std::string>();
        b.correspondence = std::move(ref);
    }
    return b;
}

json matrix_json(const IntMat& m) {
    json rows = json::array();
    for (const auto& row : m) {
        json jr = json::array();
        for (const auto& x : row) jr.push_back(x.str());
        rows.push_back(jr);
    }
    return rows;
}

IntMat matrix_parse(const json& j) {
    if (!j.is_array()) throw ParseError("matrix must be an array of arrays");
    IntMat m;
    for (const auto& jr : j) {
        std::vector<Int> row;
        for (const auto& x : jr) row.push_back(int_from_json(x, "matrix entry"));
        m.push_back(std::move(row));
    }
    return m;
}

json factors_json(const std::vector<Int>& fs) {
    json out = json::array();
    for (const auto& f : fs) out.push_back(int_to_json(f));
    return out;
}

} // namespace

std::string graph_to_json(const AugmentedMetricGraph& g) { return graph_json(g).dump(); }

AugmentedMetricGraph graph_from_json(const std::string& text) { return graph_parse(parse_json(text)); }

std::string morphism_to_json(const MorphismData& m) { return morphism_json(m).dump(); }

MorphismData morphism_from_json(const std::string& text) { return morphism_parse(parse_json(text)); }

std::string bundle_to_json(const Bundle& b) { return bundle_json(b).dump(); }

Bundle bundle_from_json(const std::string& text) { return bundle_parse(parse_json(text)); }

Correspondence assemble_correspondence(const Bundle& b) {
    if (!b.correspondence) throw ParseError("bundle has no correspondence section");
    const auto& ref = *b.correspondence;
    auto graph = [&](const std::string& name) {
        auto it = b.graphs.find(name);
        if (it == b.graphs.end()) throw ParseError("bundle references unknown graph '" + name + "'");
        return it->second;
    };
    auto morphism = [&](const std::string& name) {
        auto it = b.morphisms.find(name);
        if (it == b.morphisms.end()) throw ParseError("bundle references unknown morphism '" + name + "'");
        return it->second;
    };
    Correspondence c;
    c.x = graph(ref.x);
    c.y1 = graph(ref.y1);
    c.y2 = graph(ref.y2);
    c.pi1 = morphism(ref.pi1);
    c.pi2 = morphism(ref.pi2);
    c.identify_targets = ref.identify_targets;
    if (ref.identify_targets) {
        if (!ref.identification) throw ParseError("identify_targets without identification");
        c.identification = morphism(*ref.identification);
    }
    return c;
}

Bundle bundle_of_graph(const std::string& name, const AugmentedMetricGraph& g) {
    Bundle b;
    b.graphs[name] = g;
    return b;
}

Bundle bundle_of_morphism(const std::string& name, const AugmentedMetricGraph& source,
                          const AugmentedMetricGraph& target, const MorphismData& data) {
    Bundle b;
    MorphismData copy = data;
    if (copy.source.empty()) copy.source = "source";
    if (copy.target.empty()) copy.target = "target";
    b.graphs[copy.source] = source;
    b.graphs[copy.target] = target;
    b.morphisms[name] = std::move(copy);
    return b;
}

Bundle bundle_of_correspondence(const Correspondence& c) {
    Bundle b;
    b.graphs["x"] = c.x;
    b.graphs["y1"] = c.y1;
    b.graphs["y2"] = c.y2;
    MorphismData pi1 = c.pi1, pi2 = c.pi2;
    pi1.source = "x";
    pi1.target = "y1";
    pi2.source = "x";
    pi2.target = "y2";
    b.morphisms["pi1"] = std::move(pi1);
    b.morphisms["pi2"] = std::move(pi2);
    Bundle::CorrespondenceRef ref;
    ref.x = "x";
    ref.y1 = "y1";
    ref.y2 = "y2";
    ref.pi1 = "pi1";
    ref.pi2 = "pi2";
    ref.identify_targets = c.identify_targets;
    if (c.identification) {
        MorphismData ident = *c.identification;
        ident.source = "y1";
        ident.target = "y2";
        b.morphisms["identification"] = std::move(ident);
        ref.identification = "identification";
    }
    b.correspondence = std::move(ref);
    return b;
}

std::string invariants_to_json(const InvariantRecord& rec) {
    json out{{"betti1", int_to_json(rec.betti1)},
             {"total_vertex_genus", int_to_json(rec.total_vertex_genus)},
             {"genus", int_to_json(rec.genus)},
             {"euler_char", int_to_json(rec.euler_char)},
             {"is_hyperbolic", rec.is_hyperbolic},
             {"is_stable", rec.is_stable}};
    return out.dump();
}

std::string matrix_to_json(const IntMat& m) { return matrix_json(m).dump(); }

IntMat matrix_from_json(const std::string& text) { return matrix_parse(parse_json(text)); }

std::string operator_bundle_to_json(const OperatorBundle& b) {
    json out{{"h1_pullback_pi1", matrix_json(b.h1_pullback_pi1)},
             {"h1_pushforward_pi2", matrix_json(b.h1_pushforward_pi2)},
             {"operator", matrix_json(b.op)},
             {"adjoint", matrix_json(b.adjoint)},
             {"phi_map", matrix_json(b.phi_map)},
             {"phi1", json{{"invariant_factors", factors_json(b.phi1_factors)}}},
             {"phi2", json{{"invariant_factors", factors_json(b.phi2_factors)}}}};
    json wd;
    const char* names[3] = {"x", "y1", "y2"};
    for (int k = 0; k < 3; ++k)
        wd[names[k]] =
            json::array({int_to_json(b.weight_dims[k][0]), int_to_json(b.weight_dims[k][1]),
                         int_to_json(b.weight_dims[k][2])});
    out["weight_dims"] = wd;
    return out.dump();
}

OperatorBundle operator_bundle_from_json(const std::string& text) {
    json j = parse_json(text);
    OperatorBundle b;
    b.h1_pullback_pi1 = matrix_parse(j.at("h1_pullback_pi1"));
    b.h1_pushforward_pi2 = matrix_parse(j.at("h1_pushforward_pi2"));
    b.op = matrix_parse(j.at("operator"));
    b.adjoint = matrix_parse(j.at("adjoint"));
    b.phi_map = matrix_parse(j.at("phi_map"));
    for (const auto& f : j.at("phi1").at("invariant_factors"))
        b.phi1_factors.push_back(int_from_json(f, "invariant factor"));
    for (const auto& f : j.at("phi2").at("invariant_factors"))
        b.phi2_factors.push_back(int_from_json(f, "invariant factor"));
    const char* names[3] = {"x", "y1", "y2"};
    for (int k = 0; k < 3; ++k) {
        const auto& row = j.at("weight_dims").at(names[k]);
        for (int i = 0; i < 3; ++i) b.weight_dims[k][i] = int_from_json(row.at(i), "weight dim");
    }
    return b;
}

std::string outcome_to_json(const StabilizationOutcome& o) {
    json out;
    out["status"] = o.status == StabilizationStatus::Stabilized ? "stabilized" : "diverged";
    out["iterations"] = int_to_json(o.iterations);
    json added = json::array();
    for (const auto& a : o.added_points_per_iteration) added.push_back(int_to_json(a));
    out["added_points_per_iteration"] = added;
    json spacing = json::array();
    for (const auto& s : o.min_spacing_per_iteration) spacing.push_back(s.fraction_str());
    out["min_spacing_per_iteration"] = spacing;
    out["result"] = parse_json(bundle_to_json(bundle_of_correspondence(o.result)));
    return out.dump();
}

std::string validation_report_to_json(const ValidationReport& r) {
    json out{{"ok", r.ok()}, {"problems", r.problems}};
    return out.dump();
}

namespace {

json morphism_report_json(const MorphismReport& r) {
    json local = json::object();
    for (const auto& [v, d] : r.local_degree) local[v] = int_to_json(d);
    json defect = json::object();
    for (const auto& [v, d] : r.rh_defect) defect[v] = int_to_json(d);
    return json{{"valid", r.valid()},
                {"degree", int_to_json(r.degree)},
                {"harmonic_ok", r.harmonic_ok},
                {"length_ok", r.length_ok},
                {"local_degree", local},
                {"rh_defect", defect},
                {"failures", r.failures}};
}

} // namespace

std::string morphism_report_to_json(const MorphismReport& r) { return morphism_report_json(r).dump(); }

std::string correspondence_report_to_json(const CorrespondenceReport& r) {
    json out{{"ok", r.ok()},
             {"is_skeletal", r.is_skeletal},
             {"pi1", morphism_report_json(r.pi1)},
             {"pi2", morphism_report_json(r.pi2)},
             {"identification_ok", r.identification_ok},
             {"identification_isometric", r.identification_isometric},
             {"failures", r.failures}};
    return out.dump();
}

std::string linearization_to_json(const AugmentedMetricGraph& g) {
    auto lat = cycle_lattice(g);
    auto gram = monodromy_pairing(g, lat);
    auto cg = component_group(g);
    auto wd = weight_graded_dims(g);
    json basis = json::array();
    for (const auto& vec : lat.basis) {
        json row = json::array();
        for (const auto& x : vec) row.push_back(x.str());
        basis.push_back(row);
    }
    json factors = json::array();
    for (const auto& d : cg.nontrivial_factors()) factors.push_back(int_to_json(d));
    json out{{"rank", lat.rank},
             {"edge_order", lat.edge_order},
             {"spanning_tree", std::vector<std::string>(lat.spanning_tree.begin(), lat.spanning_tree.end())},
             {"basis", basis},
             {"gram", matrix_json(gram.m)},
             {"component_group", json{{"invariant_factors", factors}}},
             {"weight_dims", json::array({int_to_json(wd[0]), int_to_json(wd[1]), int_to_json(wd[2])})}};
    return out.dump();
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

void emit_graph_body(std::ostringstream& os, const AugmentedMetricGraph& g,
                     const std::string& prefix, const std::string& indent,
                     const std::map<std::string, std::string>& edge_extra) {
    for (const auto& [id, v] : g.vertices())
        os << indent << '"' << dot_escape(prefix + id) << "\" [label=\"" << dot_escape(id) << "[g="
           << v.genus << "]\"];\n";
    for (const auto& [id, e] : g.edges()) {
        std::string label = "len=" + e.length.str();
        auto extra = edge_extra.find(id);
        if (extra != edge_extra.end()) label += " " + extra->second;
        os << indent << '"' << dot_escape(prefix + e.tail) << "\" -- \"" << dot_escape(prefix + e.head)
           << "\" [label=\"" << dot_escape(label) << "\"];\n";
    }
    for (const auto& [id, l] : g.legs()) {
        os << indent << '"' << dot_escape(prefix + "leg:" + id) << "\" [shape=point,label=\"\"];\n";
        os << indent << '"' << dot_escape(prefix + l.at) << "\" -- \"" << dot_escape(prefix + "leg:" + id)
           << "\" [style=dashed,label=\"" << dot_escape(id) << "\"];\n";
    }
}

} // namespace

std::string graph_to_dot(const std::string& name, const AugmentedMetricGraph& g) {
    std::ostringstream os;
    os << "graph \"" << dot_escape(name) << "\" {\n";
    emit_graph_body(os, g, "", "  ", {});
    os << "}\n";
    return os.str();
}

std::string bundle_to_dot(const Bundle& b) {
    if (b.morphisms.empty() && b.graphs.size() == 1)
        return graph_to_dot(b.graphs.begin()->first, b.graphs.begin()->second);

    // Expansion annotations per source edge, in morphism-name order.
    std::map<std::string, std::map<std::string, std::string>> extra; // graph -> edge -> text
    for (const auto& [mname, m] : b.morphisms) {
        if (!b.graphs.count(m.source)) continue;
        for (const auto& [eid, img] : m.edge_images) {
            auto& slot = extra[m.source][eid];
            if (slot.empty())
                slot = "d=" + img.expansion.str();
            else
                slot += "," + img.expansion.str();
        }
    }

    std::ostringstream os;
    os << "graph \"bundle\" {\n";
    int cluster = 0;
    for (const auto& [gname, g] : b.graphs) {
        os << "  subgraph \"cluster_" << dot_escape(gname) << "\" {\n";
        os << "    label=\"" << dot_escape(gname) << "\";\n";
        auto it = extra.find(gname);
        emit_graph_body(os, g, gname + ".", "    ",
                        it == extra.end() ? std::map<std::string, std::string>{} : it->second);
        os << "  }\n";
        ++cluster;
    }
    for (const auto& [mname, m] : b.morphisms) {
        if (!b.graphs.count(m.source) || !b.graphs.count(m.target)) continue;
        for (const auto& [v, w] : m.vertex_map)
            os << "  \"" << dot_escape(m.source + "." + v) << "\" -- \""
               << dot_escape(m.target + "." + w) << "\" [style=dotted,label=\"" << dot_escape(mname)
               << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace skeltrop
