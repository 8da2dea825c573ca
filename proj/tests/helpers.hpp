#pragma once

#include "skeltrop/gallery.hpp"
#include "skeltrop/linearization.hpp"
#include "skeltrop/serialization.hpp"

#include <numeric>
#include <random>

namespace testutil {

using namespace skeltrop;

inline Rational rat(long long n, long long d = 1) { return Rational(Int(n), Int(d)); }

// --- small builders -------------------------------------------------------

inline AugmentedMetricGraph loop_graph(const Rational& len, const std::string& v = "v",
                                       const std::string& e = "loop") {
    AugmentedMetricGraph g;
    g.add_vertex(Vertex{v, 0, ""});
    g.add_edge(Edge{e, v, v, len});
    return g;
}

inline AugmentedMetricGraph banana(unsigned n, const Rational& len = Rational(1)) {
    AugmentedMetricGraph g;
    g.add_vertex(Vertex{"u", 0, ""});
    g.add_vertex(Vertex{"w", 0, ""});
    for (unsigned k = 0; k < n; ++k) g.add_edge(Edge{"e" + std::to_string(k), "u", "w", len});
    return g;
}

inline HarmonicMorphism identity_morphism(const AugmentedMetricGraph& g) {
    MorphismData d;
    d.source = "g";
    d.target = "g";
    for (const auto& [id, v] : g.vertices()) d.vertex_map[id] = id;
    for (const auto& [id, e] : g.edges()) d.edge_images[id] = EdgeImage{id, {PathStep{id, false}}, 1};
    for (const auto& [id, l] : g.legs()) d.leg_map[id] = LegImage{id, 1};
    return HarmonicMorphism(g, g, d);
}

inline Correspondence identity_correspondence(const AugmentedMetricGraph& g) {
    Correspondence c;
    c.x = g;
    c.y1 = g;
    c.y2 = g;
    c.pi1 = identity_morphism(g).data();
    c.pi2 = c.pi1;
    return c;
}

// Correspondence whose target Y1 carries one mid-edge vertex with a single
// interior preimage: pi1 wraps a unit loop onto a twice-subdivided circle,
// pi2 is the identity onto an unsubdivided unit loop.
inline Correspondence one_interior_point_fixture() {
    Correspondence c;
    c.x = loop_graph(rat(1), "xi", "e");
    c.y1.add_vertex(Vertex{"y", 0, ""});
    c.y1.add_vertex(Vertex{"tau", 0, ""});
    c.y1.add_edge(Edge{"t0", "y", "tau", rat(1, 2)});
    c.y1.add_edge(Edge{"t1", "tau", "y", rat(1, 2)});
    c.y2 = loop_graph(rat(1), "z", "loop");
    c.pi1.source = "x";
    c.pi1.target = "y1";
    c.pi1.vertex_map = {{"xi", "y"}};
    c.pi1.edge_images["e"] = EdgeImage{"e", {PathStep{"t0", false}, PathStep{"t1", false}}, 1};
    c.pi2.source = "x";
    c.pi2.target = "y2";
    c.pi2.vertex_map = {{"xi", "z"}};
    c.pi2.edge_images["e"] = EdgeImage{"e", {PathStep{"loop", false}}, 1};
    return c;
}

// --- random generators (deterministic given the engine state) --------------

using Rng = std::mt19937_64;

inline unsigned pick(Rng& rng, unsigned lo, unsigned hi) {
    return std::uniform_int_distribution<unsigned>(lo, hi)(rng);
}

// Random connected graph: spanning tree plus a few extra edges and loops.
// Lengths are multiples of `length_unit` so expansions up to 5 keep all
// source lengths integral when used as a morphism target.
inline AugmentedMetricGraph random_graph(Rng& rng, unsigned max_vertices = 5, unsigned max_extra = 2,
                                         unsigned max_legs = 2, long long length_unit = 60,
                                         unsigned max_genus = 2) {
    AugmentedMetricGraph g;
    unsigned nv = pick(rng, 1, max_vertices);
    for (unsigned i = 0; i < nv; ++i)
        g.add_vertex(Vertex{"v" + std::to_string(i), static_cast<int>(pick(rng, 0, max_genus)), ""});
    unsigned edge_count = 0;
    auto add = [&](unsigned a, unsigned b) {
        g.add_edge(Edge{"e" + std::to_string(edge_count++), "v" + std::to_string(a),
                        "v" + std::to_string(b), rat(length_unit * pick(rng, 1, 4))});
    };
    for (unsigned i = 1; i < nv; ++i) add(pick(rng, 0, i - 1), i);
    unsigned extra = pick(rng, 0, max_extra);
    for (unsigned k = 0; k < extra; ++k) add(pick(rng, 0, nv - 1), pick(rng, 0, nv - 1));
    unsigned legs = pick(rng, 0, max_legs);
    for (unsigned k = 0; k < legs; ++k)
        g.add_leg(Leg{"l" + std::to_string(k), "v" + std::to_string(pick(rng, 0, nv - 1))});
    return g;
}

struct GeneratedMorphism {
    AugmentedMetricGraph source;
    AugmentedMetricGraph target;
    MorphismData data;
};

// Builds a random harmonic morphism onto a random target: local degrees are
// sampled as compositions of the degree at each target vertex, and each
// target edge is covered sheet by sheet with a transportation pairing of the
// per-end direction budgets (expansions <= 5).
inline GeneratedMorphism random_harmonic_morphism(Rng& rng, unsigned max_degree = 4) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        AugmentedMetricGraph target = random_graph(rng, 3, 1, 2, 60, 2);
        // a target with no directions anywhere is degenerate; resample
        if (target.edges().empty() && target.legs().empty()) continue;
        unsigned degree = pick(rng, 1, max_degree);

        // Fibres with local degrees composing the global degree.
        std::map<std::string, std::vector<Int>> fibre; // target vertex -> local degrees
        for (const auto& [wid, w] : target.vertices()) {
            unsigned left = degree;
            std::vector<Int> parts;
            while (left > 0) {
                unsigned part = pick(rng, 1, left);
                parts.push_back(part);
                left -= part;
            }
            fibre[wid] = parts;
        }

        AugmentedMetricGraph source;
        MorphismData data;
        data.source = "source";
        data.target = "target";
        std::map<std::string, std::vector<std::string>> fibre_ids;
        for (const auto& [wid, parts] : fibre) {
            for (std::size_t i = 0; i < parts.size(); ++i) {
                std::string vid = wid + "_" + std::to_string(i);
                source.add_vertex(Vertex{vid, static_cast<int>(pick(rng, 0, 2)), ""});
                data.vertex_map[vid] = wid;
                fibre_ids[wid].push_back(vid);
            }
        }

        unsigned edge_count = 0;
        bool ok = true;
        for (const auto& [eid, e] : target.edges()) {
            // Direction budgets at both ends.
            std::vector<std::pair<std::string, Int>> tails, heads;
            for (std::size_t i = 0; i < fibre_ids[e.tail].size(); ++i)
                tails.push_back({fibre_ids[e.tail][i], fibre[e.tail][i]});
            for (std::size_t i = 0; i < fibre_ids[e.head].size(); ++i)
                heads.push_back({fibre_ids[e.head][i], fibre[e.head][i]});
            std::size_t ti = 0, hi = 0;
            while (ti < tails.size() && hi < heads.size()) {
                Int cap = tails[ti].second < heads[hi].second ? tails[ti].second : heads[hi].second;
                if (cap > 5) cap = 5;
                Int d = Int(pick(rng, 1, static_cast<unsigned>(cap)));
                std::string sid = "s" + std::to_string(edge_count++);
                if (e.length.num() % d != 0) {
                    ok = false;
                    break;
                }
                source.add_edge(Edge{sid, tails[ti].first, heads[hi].first, e.length / Rational(d)});
                data.edge_images[sid] = EdgeImage{sid, {PathStep{eid, false}}, d};
                tails[ti].second -= d;
                heads[hi].second -= d;
                if (tails[ti].second == 0) ++ti;
                if (heads[hi].second == 0) ++hi;
            }
            if (!ok) break;
        }
        if (!ok) continue;

        unsigned leg_count = 0;
        for (const auto& [lid, l] : target.legs()) {
            for (std::size_t i = 0; i < fibre_ids[l.at].size(); ++i) {
                Int left = fibre[l.at][i];
                while (left > 0) {
                    Int cap = left < 5 ? left : Int(5);
                    Int d = Int(pick(rng, 1, static_cast<unsigned>(cap)));
                    std::string sid = "sl" + std::to_string(leg_count++);
                    source.add_leg(Leg{sid, fibre_ids[l.at][i]});
                    data.leg_map[sid] = LegImage{lid, d};
                    left -= d;
                }
            }
        }

        if (!validate_graph(source).ok()) continue; // disconnected sample; resample
        auto report = validate_morphism(source, target, data);
        if (!report.valid()) continue;
        return GeneratedMorphism{std::move(source), std::move(target), std::move(data)};
    }
    throw std::runtime_error("random_harmonic_morphism: no valid sample after 200 attempts");
}

// --- independent oracles ---------------------------------------------------

inline Int int_gcd(Int a, Int b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    return boost::multiprecision::gcd(a, b);
}

// Determinant by cofactor expansion (n <= 4 in the tests).
inline Int determinant(const IntMat& m) {
    std::size_t n = m.size();
    if (n == 0) return 1;
    if (n == 1) return m[0][0];
    Int det = 0;
    for (std::size_t j = 0; j < n; ++j) {
        IntMat minor;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<Int> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(m[i][k]);
            minor.push_back(row);
        }
        Int term = m[0][j] * determinant(minor);
        det += (j % 2 == 0) ? term : -term;
    }
    return det;
}

// Invariant factors through gcds of k x k minors: d_k = D_k / D_{k-1}. The
// classical characterization, independent of any elimination strategy.
inline std::vector<Int> invariant_factors_by_minors(const IntMat& m) {
    std::size_t rows = m.size();
    std::size_t cols = rows ? m[0].size() : 0;
    std::size_t n = std::min(rows, cols);
    std::vector<Int> dk(n + 1, 0);
    dk[0] = 1;
    for (std::size_t k = 1; k <= n; ++k) {
        Int g = 0;
        std::vector<std::size_t> ri(k), ci(k);
        std::function<void(std::size_t, std::size_t)> loop_rows = [&](std::size_t pos, std::size_t start) {
            if (pos == k) {
                std::function<void(std::size_t, std::size_t)> loop_cols = [&](std::size_t cpos,
                                                                              std::size_t cstart) {
                    if (cpos == k) {
                        IntMat sub(k, std::vector<Int>(k));
                        for (std::size_t i = 0; i < k; ++i)
                            for (std::size_t j = 0; j < k; ++j) sub[i][j] = m[ri[i]][ci[j]];
                        g = int_gcd(g, determinant(sub));
                        return;
                    }
                    for (std::size_t c = cstart; c < cols; ++c) {
                        ci[cpos] = c;
                        loop_cols(cpos + 1, c + 1);
                    }
                };
                loop_cols(0, 0);
                return;
            }
            for (std::size_t r = start; r < rows; ++r) {
                ri[pos] = r;
                loop_rows(pos + 1, r + 1);
            }
        };
        loop_rows(0, 0);
        dk[k] = g;
    }
    std::vector<Int> factors;
    for (std::size_t k = 1; k <= n; ++k) {
        if (dk[k] == 0) {
            factors.push_back(0);
        } else {
            factors.push_back(dk[k] / dk[k - 1]);
        }
    }
    return factors;
}

// Literal cokernel enumeration for nonsingular square matrices with small
// determinant: counts elements of order dividing m in Z^n / M Z^n via the
// adjugate (x is in the image lattice iff adj(M) x = 0 mod det).
inline bool cokernel_matches_factors(const IntMat& m, const std::vector<Int>& factors) {
    std::size_t n = m.size();
    Int det = determinant(m);
    if (det == 0) return true; // enumeration oracle only covers finite cokernels
    Int adet = det < 0 ? Int(-det) : det;
    if (n > 3 || adet > 40) return true; // keep the exhaustive search small

    IntMat adj(n, std::vector<Int>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            IntMat minor;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == j) continue;
                std::vector<Int> row;
                for (std::size_t c = 0; c < n; ++c)
                    if (c != i) row.push_back(m[r][c]);
                minor.push_back(row);
            }
            Int cof = determinant(minor);
            adj[i][j] = ((i + j) % 2 == 0) ? cof : -cof;
        }
    }

    auto order_divides = [&](const std::vector<Int>& x, const Int& k) {
        for (std::size_t i = 0; i < n; ++i) {
            Int acc = 0;
            for (std::size_t j = 0; j < n; ++j) acc += adj[i][j] * x[j] * k;
            if (acc % det != 0) return false;
        }
        return true;
    };

    // Count representatives in the fundamental box [0, |det|)^n of each
    // order-divides class; the class count per divisor must match the group
    // structure given by the claimed factors, scaled by box multiplicity.
    // Each cokernel class has the same number of representatives in the box
    // (|det|^n / |det| = |det|^(n-1)).
    Int box_per_class = 1;
    for (std::size_t i = 0; i + 1 < n; ++i) box_per_class *= adet;

    for (Int k = 1; k <= adet; ++k) {
        if (adet % k != 0) continue;
        Int expected = 1;
        for (const auto& d : factors) expected *= int_gcd(d, k);
        Int counted = 0;
        std::vector<Int> x(n, 0);
        std::function<void(std::size_t)> enumerate = [&](std::size_t pos) {
            if (pos == n) {
                if (order_divides(x, k)) ++counted;
                return;
            }
            for (Int v = 0; v < adet; ++v) {
                x[pos] = v;
                enumerate(pos + 1);
            }
        };
        enumerate(0);
        if (counted != expected * box_per_class) return false;
    }
    return true;
}

// Weighted spanning-tree sum: det of the length-weighted cycle pairing
// equals the sum over spanning trees of the product of non-tree lengths.
inline Int spanning_tree_weight_sum(const AugmentedMetricGraph& g) {
    std::vector<std::string> edges;
    for (const auto& [id, e] : g.edges()) edges.push_back(id);
    std::size_t nv = g.vertices().size();
    std::size_t ne = edges.size();
    Int total = 0;
    for (std::size_t mask = 0; mask < (std::size_t(1) << ne); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcountll(mask)) != nv - 1) continue;
        std::map<std::string, std::string> parent;
        for (const auto& [id, v] : g.vertices()) parent[id] = id;
        std::function<std::string(const std::string&)> find = [&](const std::string& x) {
            return parent[x] == x ? x : parent[x] = find(parent[x]);
        };
        bool acyclic = true;
        for (std::size_t k = 0; k < ne && acyclic; ++k) {
            if (!(mask & (std::size_t(1) << k))) continue;
            const Edge& e = g.edge(edges[k]);
            auto a = find(e.tail), b = find(e.head);
            if (a == b)
                acyclic = false;
            else
                parent[a] = b;
        }
        if (!acyclic) continue;
        std::set<std::string> roots;
        for (const auto& [id, v] : g.vertices()) roots.insert(find(id));
        if (roots.size() != 1) continue;
        Int product = 1;
        for (std::size_t k = 0; k < ne; ++k)
            if (!(mask & (std::size_t(1) << k))) product *= g.edge(edges[k]).length.num();
        total += product;
    }
    return total;
}

// --- arithmetic oracle for the pinned level-11 fixture ---------------------

struct TwoIsogenyCounts {
    // counts[a][b] = number of 2-isogenies from supersingular class a to b,
    // with classes ordered (j=0, j=1728 mod 11).
    int counts[2][2] = {{0, 0}, {0, 0}};
    std::vector<int> supersingular_j;
};

inline TwoIsogenyCounts two_isogeny_counts_mod_11() {
    const int p = 11;
    auto norm = [&](long long x) { return static_cast<int>(((x % p) + p) % p); };
    auto inv = [&](int a) {
        for (int b = 1; b < p; ++b)
            if (a * b % p == 1) return b;
        throw std::runtime_error("not invertible");
    };

    // Supersingular j-invariants by exhaustive point counts over F_11.
    std::set<int> ss;
    for (int a = 0; a < p; ++a) {
        for (int b = 0; b < p; ++b) {
            int disc = norm(4 * a * a * a + 27 * b * b);
            if (disc == 0) continue;
            int points = 1; // infinity
            for (int x = 0; x < p; ++x) {
                int rhs = norm(x * x * x + a * x + b);
                if (rhs == 0) {
                    points += 1;
                    continue;
                }
                bool square = false;
                for (int y = 1; y < p && !square; ++y) square = (y * y % p == rhs);
                points += square ? 2 : 0;
            }
            if (points == p + 1) {
                int j = norm(1728LL * norm(4 * a * a * a) % p * inv(disc));
                ss.insert(j);
            }
        }
    }

    TwoIsogenyCounts out;
    out.supersingular_j.assign(ss.begin(), ss.end());

    // Classical level-2 modular polynomial, reduced mod 11; the multiset of
    // roots of phi2(j, Y) lists the 2-isogeny targets of j with multiplicity.
    auto phi2 = [&](int xj, int yj) {
        long long x = xj, y = yj;
        long long acc = 0;
        acc += norm(x * x % p * x);            // x^3
        acc += norm(y * y % p * y);            // y^3
        acc -= norm(x * x % p * (y * y % p));  // -x^2 y^2
        acc += 1488 % p * norm(x * x % p * y); // 1488 x^2 y
        acc += 1488 % p * norm(y * y % p * x); // 1488 x y^2
        acc -= 162000 % p * norm(x * x);
        acc -= 162000 % p * norm(y * y);
        acc += norm(40773375LL) * norm(x * y);
        acc += norm(8748000000LL) * norm(x + y);
        acc -= norm(157464000000000LL);
        return norm(acc);
    };

    // 1728 mod 11 = 1: class index 0 <-> j=0, 1 <-> j=1.
    auto class_of = [&](int j) { return j == 0 ? 0 : 1; };
    for (int j : {0, 1}) {
        // root multiplicities of the cubic phi2(j, Y) over F_11
        std::vector<int> roots;
        for (int y = 0; y < p; ++y)
            if (phi2(j, y) == 0) roots.push_back(y);
        // multiplicity by synthetic division
        for (int y : roots) {
            // evaluate successive derivatives via finite differences over F_p
            // (cheap: divide out (Y - y) repeatedly on the coefficient list)
            // cubic coefficients of phi2(j, Y): c3 Y^3 + c2 Y^2 + c1 Y + c0
            int c3 = 1;
            int c2 = norm(-1LL * j * j + 1488LL * j - 162000LL);
            int c1 = norm(1488LL * j * j + 40773375LL * j + 8748000000LL);
            int c0 = norm(1LL * j * j % p * j - 162000LL * norm(1LL * j * j) + 8748000000LL * j -
                          157464000000000LL);
            std::vector<int> coeff = {c0, c1, c2, c3};
            int mult = 0;
            while (coeff.size() > 1) {
                // synthetic division by (Y - y)
                std::vector<int> q(coeff.size() - 1, 0);
                int carry = coeff.back();
                for (std::size_t k = coeff.size() - 1; k > 0; --k) {
                    q[k - 1] = carry;
                    carry = norm(coeff[k - 1] + 1LL * carry * y);
                }
                if (carry != 0) break;
                ++mult;
                coeff = q;
            }
            if (mult > 0) out.counts[class_of(j)][class_of(y)] += mult;
        }
    }
    return out;
}

// The arithmetic table for (p=11, norm-2 correspondence): three edge classes
// with stacky lengths from the automorphism orders (|Aut|/2 = 3 at j=0 and 2
// at j=1728) and expansions forced by length compatibility.
inline std::vector<gallery::HeckeIncidence> pinned_p11_l2_table() {
    return {
        gallery::HeckeIncidence{0, 3, 1, 2, rat(1)}, // the j=0 fibre orbit
        gallery::HeckeIncidence{1, 1, 1, 1, rat(2)}, // (j=1728, Aut-stable kernel)
        gallery::HeckeIncidence{1, 2, 0, 3, rat(1)}, // (j=1728, swapped kernels)
    };
}

} // namespace testutil
