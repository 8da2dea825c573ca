#include "skeltrop/gallery.hpp"

namespace skeltrop {
namespace gallery {

namespace {

Rational rat(long long n, long long d = 1) { return Rational(Int(n), Int(d)); }

int genus_for(const std::optional<std::map<std::string, int>>& genera, const std::string& id) {
    if (!genera) return 0;
    auto it = genera->find(id);
    return it == genera->end() ? 0 : it->second;
}

} // namespace

AugmentedMetricGraph example_genus_one() {
    AugmentedMetricGraph g;
    g.add_vertex(Vertex{"A", 0, ""});
    g.add_vertex(Vertex{"B", 0, ""});
    g.add_edge(Edge{"loop", "A", "A", rat(3)});
    g.add_edge(Edge{"bridge", "A", "B", rat(1)});
    g.add_leg(Leg{"puncture", "B"});
    return g;
}

HarmonicMorphism tate_isogeny(unsigned n) {
    if (n < 2) throw ParameterError("tate_isogeny requires n >= 2");
    AugmentedMetricGraph source;
    source.add_vertex(Vertex{"s0", 0, ""});
    source.add_edge(Edge{"loop", "s0", "s0", rat(1)});
    AugmentedMetricGraph target;
    target.add_vertex(Vertex{"t0", 0, ""});
    target.add_edge(Edge{"loop", "t0", "t0", rat(n)});
    MorphismData data;
    data.source = "source";
    data.target = "target";
    data.vertex_map["s0"] = "t0";
    data.edge_images["loop"] = EdgeImage{"loop", {PathStep{"loop", false}}, Int(n)};
    return HarmonicMorphism(std::move(source), std::move(target), std::move(data));
}

Correspondence tate_pair() {
    auto loop3 = [](const std::string& v) {
        AugmentedMetricGraph g;
        g.add_vertex(Vertex{v, 0, ""});
        g.add_edge(Edge{"loop", v, v, rat(3)});
        return g;
    };
    Correspondence c;
    c.x = loop3("x0");
    c.y1 = loop3("u0");
    c.y2 = loop3("w0");
    c.pi1.source = "x";
    c.pi1.target = "y1";
    c.pi1.vertex_map["x0"] = "u0";
    c.pi1.edge_images["loop"] = EdgeImage{"loop", {PathStep{"loop", false}}, 1};
    c.pi2.source = "x";
    c.pi2.target = "y2";
    c.pi2.vertex_map["x0"] = "w0";
    c.pi2.edge_images["loop"] =
        EdgeImage{"loop", {PathStep{"loop", false}, PathStep{"loop", false}, PathStep{"loop", false}}, 3};
    return c;
}

Correspondence hecke_Tl(unsigned l, unsigned s, const std::vector<HeckeIncidence>& incidence) {
    if (l < 2) throw ParameterError("hecke_Tl requires l >= 2");
    if (s < 2) throw ParameterError("hecke_Tl requires s >= 2");
    if (incidence.empty()) throw ParameterError("hecke_Tl requires a nonempty incidence table");

    // Target edge lengths are forced by the table; inconsistent rows are a
    // validation error surfaced below.
    std::vector<Rational> len1(s, Rational(0)), len2(s, Rational(0));
    for (const auto& row : incidence) {
        if (row.pi1_target >= s || row.pi2_target >= s)
            throw ParameterError("hecke_Tl incidence references a target edge out of range");
        Rational l1 = Rational(row.d1) * row.length;
        Rational l2 = Rational(row.d2) * row.length;
        if (len1[row.pi1_target].is_zero())
            len1[row.pi1_target] = l1;
        else if (len1[row.pi1_target] != l1)
            throw ValidationError("hecke_Tl incidence forces conflicting lengths on a pi1 target edge");
        if (len2[row.pi2_target].is_zero())
            len2[row.pi2_target] = l2;
        else if (len2[row.pi2_target] != l2)
            throw ValidationError("hecke_Tl incidence forces conflicting lengths on a pi2 target edge");
    }
    for (unsigned j = 0; j < s; ++j)
        if (len1[j].is_zero() || len2[j].is_zero())
            throw ValidationError("hecke_Tl incidence leaves a target edge uncovered");

    Correspondence c;
    for (std::size_t k = 0; k < incidence.size(); ++k) {
        if (k == 0) {
            c.x.add_vertex(Vertex{"u", 0, ""});
            c.x.add_vertex(Vertex{"w", 0, ""});
        }
        c.x.add_edge(Edge{"e" + std::to_string(k), "u", "w", incidence[k].length});
    }
    c.y1.add_vertex(Vertex{"u1", 0, ""});
    c.y1.add_vertex(Vertex{"w1", 0, ""});
    c.y2.add_vertex(Vertex{"u2", 0, ""});
    c.y2.add_vertex(Vertex{"w2", 0, ""});
    for (unsigned j = 0; j < s; ++j) {
        c.y1.add_edge(Edge{"f" + std::to_string(j), "u1", "w1", len1[j]});
        c.y2.add_edge(Edge{"g" + std::to_string(j), "u2", "w2", len2[j]});
    }

    c.pi1.source = "x";
    c.pi1.target = "y1";
    c.pi1.vertex_map = {{"u", "u1"}, {"w", "w1"}};
    c.pi2.source = "x";
    c.pi2.target = "y2";
    c.pi2.vertex_map = {{"u", "u2"}, {"w", "w2"}};
    for (std::size_t k = 0; k < incidence.size(); ++k) {
        std::string eid = "e" + std::to_string(k);
        c.pi1.edge_images[eid] =
            EdgeImage{eid, {PathStep{"f" + std::to_string(incidence[k].pi1_target), false}}, incidence[k].d1};
        c.pi2.edge_images[eid] =
            EdgeImage{eid, {PathStep{"g" + std::to_string(incidence[k].pi2_target), false}}, incidence[k].d2};
    }

    c.identify_targets = true;
    MorphismData ident;
    ident.source = "y1";
    ident.target = "y2";
    ident.vertex_map = {{"u1", "u2"}, {"w1", "w2"}};
    for (unsigned j = 0; j < s; ++j)
        ident.edge_images["f" + std::to_string(j)] =
            EdgeImage{"f" + std::to_string(j), {PathStep{"g" + std::to_string(j), false}}, 1};
    c.identification = std::move(ident);

    auto rep = validate_correspondence(c);
    if (!rep.ok())
        throw ValidationError("hecke_Tl incidence fails validation: " +
                              (rep.failures.empty() ? std::string("unknown") : rep.failures.front()));
    if (rep.pi1.degree != Int(l) + 1 || rep.pi2.degree != Int(l) + 1)
        throw ValidationError("hecke_Tl incidence does not have degree l+1");
    return c;
}

std::vector<HeckeIncidence> hecke_Tl_synthetic_table(unsigned l, unsigned s) {
    std::vector<HeckeIncidence> table;
    for (unsigned k = 0; k < s * (l + 1); ++k)
        table.push_back(HeckeIncidence{k / (l + 1), 1, k % s, 1, rat(1)});
    return table;
}

Correspondence hecke_Tl_default() {
    std::vector<HeckeIncidence> table = {
        {0, 1, 0, 1, rat(1)}, // e0 -> f0, g0
        {0, 1, 0, 1, rat(1)}, // e1 -> f0, g0
        {0, 1, 1, 1, rat(1)}, // e2 -> f0, g1
        {1, 1, 0, 1, rat(1)}, // e3 -> f1, g0
        {1, 1, 1, 1, rat(1)}, // e4 -> f1, g1
        {1, 1, 1, 1, rat(1)}, // e5 -> f1, g1
    };
    return hecke_Tl(2, 2, table);
}

Correspondence hecke_Up(unsigned p, unsigned s,
                        const std::optional<std::map<std::string, int>>& genera) {
    if (p < 5) throw ParameterError("hecke_Up requires p >= 5");
    if (p % 2 == 0) throw ParameterError("hecke_Up requires odd p");
    if (s < 1) throw ParameterError("hecke_Up requires s >= 1");

    Rational half = rat(p - 1, 2);          // (p-1)/2
    Rational phalf = rat(p) * half;         // p(p-1)/2
    Int d_half = Int(p - 1) / 2;

    Correspondence c;
    auto add_vertex = [&](AugmentedMetricGraph& g, const std::string& id) {
        g.add_vertex(Vertex{id, genus_for(genera, id), ""});
    };

    add_vertex(c.x, "F");
    add_vertex(c.x, "V");
    add_vertex(c.x, "Xplus");
    add_vertex(c.x, "Xminus");
    c.x.add_leg(Leg{"cuspF", "F"});
    c.x.add_leg(Leg{"cuspV", "V"});
    c.x.add_leg(Leg{"cuspP", "Xplus"});
    c.x.add_leg(Leg{"cuspM", "Xminus"});

    add_vertex(c.y1, "F1");
    add_vertex(c.y1, "V1");
    c.y1.add_leg(Leg{"cuspF1", "F1"});
    c.y1.add_leg(Leg{"cuspV1", "V1"});
    add_vertex(c.y2, "F2");
    add_vertex(c.y2, "V2");
    c.y2.add_leg(Leg{"cuspF2", "F2"});
    c.y2.add_leg(Leg{"cuspV2", "V2"});

    c.pi1.source = "x";
    c.pi1.target = "y1";
    c.pi2.source = "x";
    c.pi2.target = "y2";
    c.pi1.vertex_map = {{"F", "F1"}, {"V", "V1"}, {"Xplus", "F1"}, {"Xminus", "F1"}};
    c.pi2.vertex_map = {{"F", "F2"}, {"V", "V2"}, {"Xplus", "V2"}, {"Xminus", "V2"}};
    c.pi1.leg_map = {{"cuspF", {"cuspF1", 1}},
                     {"cuspV", {"cuspV1", Int(p)}},
                     {"cuspP", {"cuspF1", d_half}},
                     {"cuspM", {"cuspF1", d_half}}};
    c.pi2.leg_map = {{"cuspF", {"cuspF2", Int(p)}},
                     {"cuspV", {"cuspV2", 1}},
                     {"cuspP", {"cuspV2", d_half}},
                     {"cuspM", {"cuspV2", d_half}}};

    for (unsigned k = 0; k < s; ++k) {
        std::string z = "Z" + std::to_string(k);
        add_vertex(c.x, z);
        add_vertex(c.y1, z + "_1");
        add_vertex(c.y2, z + "_2");
        c.x.add_edge(Edge{"eF" + std::to_string(k), "F", z, half});
        c.x.add_edge(Edge{"eV" + std::to_string(k), z, "V", half});
        c.x.add_edge(Edge{"ePlus" + std::to_string(k), "Xplus", z, rat(1)});
        c.x.add_edge(Edge{"eMinus" + std::to_string(k), "Xminus", z, rat(1)});
        c.y1.add_edge(Edge{"a1_" + std::to_string(k), "F1", z + "_1", half});
        c.y1.add_edge(Edge{"b1_" + std::to_string(k), z + "_1", "V1", phalf});
        c.y2.add_edge(Edge{"a2_" + std::to_string(k), "F2", z + "_2", phalf});
        c.y2.add_edge(Edge{"b2_" + std::to_string(k), z + "_2", "V2", half});

        c.pi1.vertex_map[z] = z + "_1";
        c.pi2.vertex_map[z] = z + "_2";
        std::string a1 = "a1_" + std::to_string(k), b1 = "b1_" + std::to_string(k);
        std::string a2 = "a2_" + std::to_string(k), b2 = "b2_" + std::to_string(k);
        std::string eF = "eF" + std::to_string(k), eV = "eV" + std::to_string(k);
        std::string eP = "ePlus" + std::to_string(k), eM = "eMinus" + std::to_string(k);
        c.pi1.edge_images[eF] = EdgeImage{eF, {PathStep{a1, false}}, 1};
        c.pi1.edge_images[eV] = EdgeImage{eV, {PathStep{b1, false}}, Int(p)};
        c.pi1.edge_images[eP] = EdgeImage{eP, {PathStep{a1, false}}, d_half};
        c.pi1.edge_images[eM] = EdgeImage{eM, {PathStep{a1, false}}, d_half};
        c.pi2.edge_images[eF] = EdgeImage{eF, {PathStep{a2, false}}, Int(p)};
        c.pi2.edge_images[eV] = EdgeImage{eV, {PathStep{b2, false}}, 1};
        c.pi2.edge_images[eP] = EdgeImage{eP, {PathStep{b2, true}}, d_half};
        c.pi2.edge_images[eM] = EdgeImage{eM, {PathStep{b2, true}}, d_half};
    }
    return c;
}

Correspondence divergent_demo(unsigned p, bool identify) {
    if (p < 2) throw ParameterError("divergent_demo requires p >= 2");

    Correspondence c;
    c.x.add_vertex(Vertex{"x0", 0, ""});
    c.x.add_vertex(Vertex{"x1", 0, ""});
    c.x.add_edge(Edge{"e", "x0", "x1", rat(p + 1)});
    c.x.add_leg(Leg{"l0", "x0"});
    c.x.add_leg(Leg{"l1", "x1"});

    c.y1.add_vertex(Vertex{"y0", 0, ""});
    c.y1.add_vertex(Vertex{"t", 0, ""});
    c.y1.add_vertex(Vertex{"y1", 0, ""});
    c.y1.add_edge(Edge{"B1", "y0", "t", rat(p)});
    c.y1.add_edge(Edge{"B2", "t", "y1", rat(1)});
    c.y1.add_leg(Leg{"n0", "y0"});
    c.y1.add_leg(Leg{"n1", "y1"});

    c.y2.add_vertex(Vertex{"z0", 0, ""});
    c.y2.add_vertex(Vertex{"s", 0, ""});
    c.y2.add_vertex(Vertex{"z1", 0, ""});
    c.y2.add_edge(Edge{"A1", "z0", "s", rat(p)});
    c.y2.add_edge(Edge{"A2", "s", "z1", rat(static_cast<long long>(p) * p)});
    c.y2.add_leg(Leg{"q0", "z0"});
    c.y2.add_leg(Leg{"q1", "z1"});

    c.pi1.source = "x";
    c.pi1.target = "y1";
    c.pi1.vertex_map = {{"x0", "y0"}, {"x1", "y1"}};
    c.pi1.edge_images["e"] = EdgeImage{"e", {PathStep{"B1", false}, PathStep{"B2", false}}, 1};
    c.pi1.leg_map = {{"l0", {"n0", 1}}, {"l1", {"n1", 1}}};

    c.pi2.source = "x";
    c.pi2.target = "y2";
    c.pi2.vertex_map = {{"x0", "z0"}, {"x1", "z1"}};
    c.pi2.edge_images["e"] = EdgeImage{"e", {PathStep{"A1", false}, PathStep{"A2", false}}, Int(p)};
    c.pi2.leg_map = {{"l0", {"q0", Int(p)}}, {"l1", {"q1", Int(p)}}};

    if (identify) {
        c.identify_targets = true;
        MorphismData ident;
        ident.source = "y1";
        ident.target = "y2";
        ident.vertex_map = {{"y0", "z0"}, {"t", "s"}, {"y1", "z1"}};
        ident.edge_images["B1"] = EdgeImage{"B1", {PathStep{"A1", false}}, 1};
        ident.edge_images["B2"] = EdgeImage{"B2", {PathStep{"A2", false}}, 1};
        ident.leg_map = {{"n0", {"q0", 1}}, {"n1", {"q1", 1}}};
        c.identification = std::move(ident);
    }
    return c;
}

} // namespace gallery
} // namespace skeltrop
