#include "skeltrop/linearization.hpp"

#include <algorithm>
#include <functional>
#include <queue>

namespace skeltrop {

IntMat identity_matrix(std::size_t n) {
    IntMat m(n, std::vector<Int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

IntMat scalar_matrix(std::size_t n, const Int& c) {
    IntMat m(n, std::vector<Int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = c;
    return m;
}

IntMat matmul(const IntMat& a, const IntMat& b) {
    std::size_t n = a.size();
    if (n == 0) return {};
    std::size_t k = a[0].size();
    std::size_t m = b.empty() ? 0 : b[0].size();
    if (b.size() != k) throw DomainError("matmul: shape mismatch");
    IntMat out(n, std::vector<Int>(m, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t t = 0; t < k; ++t) out[i][j] += a[i][t] * b[t][j];
    return out;
}

IntMat transpose(const IntMat& a) {
    std::size_t n = a.size();
    std::size_t m = n ? a[0].size() : 0;
    IntMat out(m, std::vector<Int>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) out[j][i] = a[i][j];
    return out;
}

bool matrices_equal(const IntMat& a, const IntMat& b) { return a == b; }

std::vector<Int> SmithResult::diagonal() const {
    std::vector<Int> out;
    std::size_t n = d.size();
    std::size_t m = n ? d[0].size() : 0;
    for (std::size_t i = 0; i < std::min(n, m); ++i) out.push_back(d[i][i]);
    return out;
}

namespace {

struct SmithWorker {
    IntMat a, u, u_inv, v, v_inv;
    std::size_t rows, cols;

    explicit SmithWorker(const IntMat& m) : a(m) {
        rows = a.size();
        cols = rows ? a[0].size() : 0;
        u = identity_matrix(rows);
        u_inv = identity_matrix(rows);
        v = identity_matrix(cols);
        v_inv = identity_matrix(cols);
    }

    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        std::swap(a[i], a[j]);
        std::swap(u[i], u[j]);
        for (std::size_t k = 0; k < rows; ++k) std::swap(u_inv[k][i], u_inv[k][j]);
    }
    void swap_cols(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t k = 0; k < rows; ++k) std::swap(a[k][i], a[k][j]);
        for (std::size_t k = 0; k < cols; ++k) std::swap(v[k][i], v[k][j]);
        std::swap(v_inv[i], v_inv[j]);
    }
    // row i += q * row j
    void add_row(std::size_t i, std::size_t j, const Int& q) {
        if (q == 0) return;
        for (std::size_t k = 0; k < cols; ++k) a[i][k] += q * a[j][k];
        for (std::size_t k = 0; k < rows; ++k) u[i][k] += q * u[j][k];
        for (std::size_t k = 0; k < rows; ++k) u_inv[k][j] -= q * u_inv[k][i];
    }
    // col i += q * col j
    void add_col(std::size_t i, std::size_t j, const Int& q) {
        if (q == 0) return;
        for (std::size_t k = 0; k < rows; ++k) a[k][i] += q * a[k][j];
        for (std::size_t k = 0; k < cols; ++k) v[k][i] += q * v[k][j];
        for (std::size_t k = 0; k < cols; ++k) v_inv[j][k] -= q * v_inv[i][k];
    }
    void negate_row(std::size_t i) {
        for (std::size_t k = 0; k < cols; ++k) a[i][k] = -a[i][k];
        for (std::size_t k = 0; k < rows; ++k) u[i][k] = -u[i][k];
        for (std::size_t k = 0; k < rows; ++k) u_inv[k][i] = -u_inv[k][i];
    }

    bool find_pivot(std::size_t s, std::size_t& pi, std::size_t& pj) const {
        bool found = false;
        Int best = 0;
        for (std::size_t i = s; i < rows; ++i) {
            for (std::size_t j = s; j < cols; ++j) {
                if (a[i][j] == 0) continue;
                Int mag = a[i][j] < 0 ? Int(-a[i][j]) : a[i][j];
                if (!found || mag < best) {
                    found = true;
                    best = mag;
                    pi = i;
                    pj = j;
                }
            }
        }
        return found;
    }

    // Quotient with a centered remainder: |a - q b| <= |b| / 2. Keeps the
    // coefficient growth of the elimination under control.
    static Int balanced_quotient(const Int& a, const Int& b) {
        Int q = a / b;
        Int r = a - q * b;
        Int half = b < 0 ? -b : b;
        if (2 * r > half) q += b > 0 ? 1 : -1;
        if (2 * r < -half) q += b > 0 ? -1 : 1;
        return q;
    }

    void run() {
        std::size_t n = std::min(rows, cols);
        for (std::size_t s = 0; s < n; ++s) {
            while (true) {
                // Re-select the globally smallest entry as the pivot on every
                // round; its magnitude never increases and drops strictly
                // whenever a reduction leaves a remainder.
                std::size_t pi = s, pj = s;
                if (!find_pivot(s, pi, pj)) {
                    if (a[s][s] < 0) negate_row(s);
                    return; // the remaining submatrix is zero
                }
                swap_rows(s, pi);
                swap_cols(s, pj);
                const Int pivot = a[s][s];

                bool reduced = false;
                for (std::size_t i = s + 1; i < rows && !reduced; ++i) {
                    if (a[i][s] % pivot != 0) {
                        add_row(i, s, -balanced_quotient(a[i][s], pivot));
                        reduced = true;
                    }
                }
                for (std::size_t j = s + 1; j < cols && !reduced; ++j) {
                    if (a[s][j] % pivot != 0) {
                        add_col(j, s, -balanced_quotient(a[s][j], pivot));
                        reduced = true;
                    }
                }
                if (reduced) continue; // smaller pivot now exists somewhere

                // Pivot divides its whole row and column: clear them exactly.
                for (std::size_t i = s + 1; i < rows; ++i)
                    if (a[i][s] != 0) add_row(i, s, -Int(a[i][s] / pivot));
                for (std::size_t j = s + 1; j < cols; ++j)
                    if (a[s][j] != 0) add_col(j, s, -Int(a[s][j] / pivot));

                // Divisibility chain: fold one offending row into row s and
                // redo the stage; the next pivot strictly divides this one.
                bool redo = false;
                for (std::size_t i = s + 1; i < rows && !redo; ++i)
                    for (std::size_t j = s + 1; j < cols && !redo; ++j)
                        if (a[i][j] % pivot != 0) {
                            add_row(s, i, 1);
                            redo = true;
                        }
                if (!redo) break;
            }
            if (a[s][s] < 0) negate_row(s);
        }
    }
};

Int length_lcm(const AugmentedMetricGraph& g) {
    Int l = 1;
    for (const auto& [id, e] : g.edges()) l = boost::multiprecision::lcm(l, e.length.den());
    return l;
}

void require_integer_lengths(const AugmentedMetricGraph& g, const std::string& what) {
    Int l = length_lcm(g);
    if (l != 1) throw IntegralityError(what + " requires integer edge lengths", l);
}

} // namespace

SmithResult smith_normal_form(const IntMat& m) {
    for (const auto& row : m)
        if (row.size() != (m.empty() ? 0 : m[0].size())) throw DomainError("ragged matrix");
    SmithWorker w(m);
    w.run();
    return SmithResult{w.u, w.u_inv, w.a, w.v, w.v_inv};
}

std::size_t CycleLattice::edge_index(const std::string& id) const {
    auto it = std::find(edge_order.begin(), edge_order.end(), id);
    if (it == edge_order.end()) throw DomainError("edge '" + id + "' not in lattice edge order");
    return static_cast<std::size_t>(it - edge_order.begin());
}

CycleLattice cycle_lattice(const AugmentedMetricGraph& g) {
    require_valid(g);
    CycleLattice lat;
    for (const auto& [id, e] : g.edges()) lat.edge_order.push_back(id);

    // Lexicographic-minimum spanning tree (edge ids are already sorted).
    std::map<std::string, std::string> parent;
    for (const auto& [id, v] : g.vertices()) parent[id] = id;
    std::function<std::string(const std::string&)> find = [&](const std::string& x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (const auto& id : lat.edge_order) {
        const Edge& e = g.edge(id);
        auto a = find(e.tail), b = find(e.head);
        if (a != b) {
            parent[a] = b;
            lat.spanning_tree.insert(id);
        } else {
            lat.co_edges.push_back(id);
        }
    }

    // Tree adjacency for path recovery.
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> adj; // v -> (edge, other)
    for (const auto& id : lat.spanning_tree) {
        const Edge& e = g.edge(id);
        adj[e.tail].push_back({id, e.head});
        adj[e.head].push_back({id, e.tail});
    }
    auto tree_path = [&](const std::string& from, const std::string& to) {
        // BFS; returns the traversed (edge, forward?) list.
        std::map<std::string, std::pair<std::string, std::string>> via; // vertex -> (edge, prev)
        std::queue<std::string> q;
        q.push(from);
        via[from] = {"", ""};
        while (!q.empty()) {
            auto cur = q.front();
            q.pop();
            if (cur == to) break;
            for (const auto& [eid, other] : adj[cur])
                if (!via.count(other)) {
                    via[other] = {eid, cur};
                    q.push(other);
                }
        }
        std::vector<std::pair<std::string, bool>> steps;
        std::string cur = to;
        while (cur != from) {
            auto [eid, prev] = via.at(cur);
            steps.push_back({eid, g.edge(eid).tail == prev}); // forward if traversed tail->head
            cur = prev;
        }
        std::reverse(steps.begin(), steps.end());
        return steps;
    };

    for (const auto& co : lat.co_edges) {
        const Edge& e = g.edge(co);
        std::vector<Int> vec(lat.edge_order.size(), 0);
        vec[lat.edge_index(co)] = 1;
        for (const auto& [eid, forward] : tree_path(e.head, e.tail))
            vec[lat.edge_index(eid)] += forward ? 1 : -1;
        lat.basis.push_back(std::move(vec));
    }
    lat.rank = lat.basis.size();
    return lat;
}

GramMatrix monodromy_pairing(const AugmentedMetricGraph& g, const CycleLattice& lat) {
    require_integer_lengths(g, "monodromy pairing");
    GramMatrix gram;
    gram.m.assign(lat.rank, std::vector<Int>(lat.rank, 0));
    for (std::size_t i = 0; i < lat.rank; ++i)
        for (std::size_t j = 0; j < lat.rank; ++j)
            for (std::size_t k = 0; k < lat.edge_order.size(); ++k)
                gram.m[i][j] += g.edge(lat.edge_order[k]).length.num() * lat.basis[i][k] * lat.basis[j][k];
    return gram;
}

std::vector<Int> ComponentGroup::nontrivial_factors() const {
    std::vector<Int> out;
    for (const auto& d : invariant_factors)
        if (d != 1) out.push_back(d);
    return out;
}

Int ComponentGroup::order() const {
    Int o = 1;
    for (const auto& d : invariant_factors) o *= d;
    return o;
}

ComponentGroup component_group(const AugmentedMetricGraph& g) {
    auto lat = cycle_lattice(g);
    auto gram = monodromy_pairing(g, lat);
    auto snf = smith_normal_form(gram.m);
    ComponentGroup out;
    out.invariant_factors = snf.diagonal();
    out.u = snf.u;
    out.u_inv = snf.u_inv;
    out.v = snf.v;
    out.v_inv = snf.v_inv;
    return out;
}

namespace {

// Expresses an integer edge cochain in the fundamental-cycle basis; throws
// if it is not in the lattice span (certifies functoriality of the maps).
std::vector<Int> coordinates_of(const CycleLattice& lat, const std::vector<Int>& vec,
                                const std::string& what) {
    std::vector<Int> coords(lat.rank, 0);
    for (std::size_t i = 0; i < lat.rank; ++i) coords[i] = vec[lat.edge_index(lat.co_edges[i])];
    std::vector<Int> recon(vec.size(), 0);
    for (std::size_t i = 0; i < lat.rank; ++i)
        for (std::size_t k = 0; k < vec.size(); ++k) recon[k] += coords[i] * lat.basis[i][k];
    if (recon != vec) throw Error("internal: " + what + " does not lie in the cycle lattice");
    return coords;
}

} // namespace

H1Maps h1_maps(const HarmonicMorphism& f, const CycleLattice& src, const CycleLattice& tgt) {
    H1Maps maps;
    maps.pullback.assign(src.rank, std::vector<Int>(tgt.rank, 0));
    maps.pushforward.assign(tgt.rank, std::vector<Int>(src.rank, 0));

    for (std::size_t j = 0; j < tgt.rank; ++j) {
        std::vector<Int> pulled(src.edge_order.size(), 0);
        for (std::size_t k = 0; k < src.edge_order.size(); ++k) {
            const EdgeImage& img = f.data().edge_images.at(src.edge_order[k]);
            const PathStep& step = img.path.front();
            Int sign = step.reversed ? -1 : 1;
            pulled[k] = sign * img.expansion * tgt.basis[j][tgt.edge_index(step.edge)];
        }
        auto coords = coordinates_of(src, pulled, "pullback of a basis cycle");
        for (std::size_t i = 0; i < src.rank; ++i) maps.pullback[i][j] = coords[i];
    }

    for (std::size_t j = 0; j < src.rank; ++j) {
        std::vector<Int> pushed(tgt.edge_order.size(), 0);
        for (std::size_t k = 0; k < src.edge_order.size(); ++k) {
            const EdgeImage& img = f.data().edge_images.at(src.edge_order[k]);
            const PathStep& step = img.path.front();
            Int sign = step.reversed ? -1 : 1;
            pushed[tgt.edge_index(step.edge)] += sign * src.basis[j][k];
        }
        auto coords = coordinates_of(tgt, pushed, "pushforward of a basis cycle");
        for (std::size_t i = 0; i < tgt.rank; ++i) maps.pushforward[i][j] = coords[i];
    }
    return maps;
}

H1Maps h1_maps(const HarmonicMorphism& f) {
    return h1_maps(f, cycle_lattice(f.source()), cycle_lattice(f.target()));
}

std::array<Int, 3> weight_graded_dims(const AugmentedMetricGraph& g) {
    auto rec = invariants(g);
    return {rec.betti1, Int(2) * rec.total_vertex_genus, rec.betti1};
}

OperatorBundle correspondence_operator(const HarmonicMorphism& pi1, const HarmonicMorphism& pi2,
                                       const AugmentedMetricGraph& x) {
    auto lat_x = cycle_lattice(x);
    auto lat_1 = cycle_lattice(pi1.target());
    auto lat_2 = cycle_lattice(pi2.target());
    auto maps_1 = h1_maps(pi1, lat_x, lat_1);
    auto maps_2 = h1_maps(pi2, lat_x, lat_2);

    OperatorBundle b;
    b.h1_pullback_pi1 = maps_1.pullback;
    b.h1_pushforward_pi2 = maps_2.pushforward;
    b.op = matmul(maps_2.pushforward, maps_1.pullback);
    b.adjoint = matmul(maps_1.pushforward, maps_2.pullback);
    b.weight_dims = {weight_graded_dims(x), weight_graded_dims(pi1.target()),
                     weight_graded_dims(pi2.target())};

    auto gram_x = monodromy_pairing(x, lat_x);
    auto gram_1 = monodromy_pairing(pi1.target(), lat_1);
    auto gram_2 = monodromy_pairing(pi2.target(), lat_2);

    // Pairing compatibility <f* c, a>_X = <c, f_* a>_Y for both legs; this is
    // what lets the adjoint descend to component groups.
    if (!matrices_equal(matmul(transpose(maps_1.pullback), gram_x.m), matmul(gram_1.m, maps_1.pushforward)))
        throw DescentError("pairing compatibility fails for the first leg");
    if (!matrices_equal(matmul(transpose(maps_2.pullback), gram_x.m), matmul(gram_2.m, maps_2.pushforward)))
        throw DescentError("pairing compatibility fails for the second leg");
    if (!matrices_equal(matmul(transpose(b.adjoint), gram_1.m), matmul(gram_2.m, b.op)))
        throw DescentError("adjoint does not intertwine the pairings");

    auto snf_1 = smith_normal_form(gram_1.m);
    auto snf_2 = smith_normal_form(gram_2.m);
    b.phi1_factors = snf_1.diagonal();
    b.phi2_factors = snf_2.diagonal();
    b.phi_map = matmul(snf_2.u, matmul(transpose(b.adjoint), snf_1.u_inv));

    // Well-definedness on cokernels: column j scaled by d1_j must vanish
    // against the d2 moduli.
    for (std::size_t i = 0; i < b.phi2_factors.size(); ++i)
        for (std::size_t j = 0; j < b.phi1_factors.size(); ++j)
            if (b.phi2_factors[i] != 0 && (b.phi_map[i][j] * b.phi1_factors[j]) % b.phi2_factors[i] != 0)
                throw DescentError("induced map on component groups is ill-defined");
    return b;
}

OperatorBundle correspondence_operator(const Correspondence& c) {
    auto rep = validate_correspondence(c);
    if (!rep.ok()) throw ValidationError("correspondence_operator: invalid correspondence");
    if (!rep.is_skeletal)
        throw ValidationError("correspondence_operator: correspondence is not skeletal; stabilize first");
    auto views = materialize_views(c);
    return correspondence_operator(views.pi1, views.pi2, views.pi1.source());
}

std::optional<Int> phi_scalar(const OperatorBundle& b) {
    std::vector<std::size_t> nt1, nt2;
    for (std::size_t j = 0; j < b.phi1_factors.size(); ++j)
        if (b.phi1_factors[j] != 1) nt1.push_back(j);
    for (std::size_t i = 0; i < b.phi2_factors.size(); ++i)
        if (b.phi2_factors[i] != 1) nt2.push_back(i);
    if (nt1.size() != 1 || nt2.size() != 1) return std::nullopt;
    const Int& d1 = b.phi1_factors[nt1[0]];
    const Int& d2 = b.phi2_factors[nt2[0]];
    if (d1 != d2 || d1 == 0) return std::nullopt;
    Int c = b.phi_map[nt2[0]][nt1[0]] % d1;
    if (c < 0) c += d1;
    return c;
}

} // namespace skeltrop
