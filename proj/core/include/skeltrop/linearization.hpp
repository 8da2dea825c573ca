#pragma once

#include "skeltrop/correspondence.hpp"
#include "skeltrop/morphism.hpp"

#include <array>
#include <vector>

namespace skeltrop {

/// Dense integer matrix, row major. Small sizes only (ranks of cycle
/// lattices), exact arithmetic throughout.
using IntMat = std::vector<std::vector<Int>>;

IntMat identity_matrix(std::size_t n);
IntMat matmul(const IntMat& a, const IntMat& b);
IntMat transpose(const IntMat& a);
bool matrices_equal(const IntMat& a, const IntMat& b);
IntMat scalar_matrix(std::size_t n, const Int& c);

/// Basis of the first homology lattice of a graph: one fundamental cycle per
/// non-tree edge of the lexicographic-minimum spanning tree, supported on
/// that edge plus the tree path closing it. Coordinates are indexed by
/// `edge_order`.
struct CycleLattice {
    std::vector<std::string> edge_order;
    std::set<std::string> spanning_tree;
    std::vector<std::string> co_edges;  // non-tree edges, one per basis vector
    std::vector<std::vector<Int>> basis; // basis[i][k] = coefficient on edge_order[k]
    std::size_t rank = 0;

    std::size_t edge_index(const std::string& id) const;
};

/// Length-weighted intersection pairing on the cycle lattice:
/// M_ij = sum_e l(e) b_i(e) b_j(e). Positive definite for positive lengths.
struct GramMatrix {
    IntMat m;
};

/// Invariant factors d1 | d2 | ... of an integer matrix, with unimodular
/// change-of-basis witnesses U M V = diag(d). Factors equal to 1 are kept
/// internally (display elides them).
struct ComponentGroup {
    std::vector<Int> invariant_factors;
    IntMat u, u_inv, v, v_inv;

    std::vector<Int> nontrivial_factors() const;
    Int order() const; // product of the factors
};

struct SmithResult {
    IntMat u, u_inv, d, v, v_inv; // u*m*v = d, divisibility chain on the diagonal
    std::vector<Int> diagonal() const;
};

/// Smith normal form with deterministic pivoting. Tracks both unimodular
/// transforms and their inverses.
SmithResult smith_normal_form(const IntMat& m);

CycleLattice cycle_lattice(const AugmentedMetricGraph& g);

/// Requires integer edge lengths; throws IntegralityError carrying the LCM
/// needed to rescale otherwise.
GramMatrix monodromy_pairing(const AugmentedMetricGraph& g, const CycleLattice& lattice);

ComponentGroup component_group(const AugmentedMetricGraph& g);

/// Cochain-level functoriality in the fundamental-cycle bases:
///   pullback (f* y)(e) = sign(e) d_e y(f(e)),
///   pushforward (f_* a)(E) = sum over f(e)=E of sign(e) a(e),
/// the unique pair satisfying the projection formula and adjointness under
/// the length pairings. Matrices act on coordinate columns.
struct H1Maps {
    IntMat pullback;    // H1(target) -> H1(source)
    IntMat pushforward; // H1(source) -> H1(target)
};

H1Maps h1_maps(const HarmonicMorphism& f);
H1Maps h1_maps(const HarmonicMorphism& f, const CycleLattice& source_lattice,
               const CycleLattice& target_lattice);

/// (betti1, 2 * total vertex genus, betti1); the three graded dimensions sum
/// to twice the genus.
std::array<Int, 3> weight_graded_dims(const AugmentedMetricGraph& g);

struct OperatorBundle {
    IntMat h1_pullback_pi1;
    IntMat h1_pushforward_pi2;
    IntMat op;      // pushforward(pi2) . pullback(pi1) : H1(Y1) -> H1(Y2)
    IntMat adjoint; // pushforward(pi1) . pullback(pi2) : H1(Y2) -> H1(Y1)
    IntMat phi_map; // induced map on component groups, in Smith coordinates
    std::vector<Int> phi1_factors;
    std::vector<Int> phi2_factors;
    std::array<std::array<Int, 3>, 3> weight_dims; // x, y1, y2
};

/// Linearization of a skeletal correspondence. Verifies the adjointness
/// identity op^T M2 = ... pairing compatibility that certifies descent to
/// component groups; throws DescentError when it fails and IntegralityError
/// on non-integer lengths.
OperatorBundle correspondence_operator(const Correspondence& skeletal);
OperatorBundle correspondence_operator(const HarmonicMorphism& pi1, const HarmonicMorphism& pi2,
                                       const AugmentedMetricGraph& x);

/// If the matrix acts on the nontrivial cyclic part of a component group as
/// multiplication by a scalar, returns that scalar (reduced mod the factor).
std::optional<Int> phi_scalar(const OperatorBundle& b);

} // namespace skeltrop
