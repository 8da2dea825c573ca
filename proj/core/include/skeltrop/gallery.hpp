#pragma once

#include "skeltrop/correspondence.hpp"

#include <optional>

namespace skeltrop {
namespace gallery {

/// Genus-1 fixture: vertex A with a self-loop of length 3 and a unit edge to
/// vertex B carrying one puncture. Hyperbolic, not stable (B has valency 2),
/// component group Z/3.
AugmentedMetricGraph example_genus_one();

/// Loop of length 1 mapping onto a loop of length n along a single edge with
/// expansion n; harmonic of degree n. Requires n >= 2.
HarmonicMorphism tate_isogeny(unsigned n);

/// Self-correspondence of a loop of length 3: pi1 the identity, pi2 the
/// threefold wrap built from expansion-3 data. Already skeletal after its
/// own refinement closure.
Correspondence tate_pair();

/// One row of the incidence table defining a two-pointed Hecke-type
/// correspondence between bananas: where the source edge goes under each
/// leg and with which expansion, plus its length.
struct HeckeIncidence {
    std::size_t pi1_target = 0;
    Int d1 = 1;
    std::size_t pi2_target = 0;
    Int d2 = 1;
    Rational length = Rational(1);
};

/// Banana-to-banana correspondence with identified targets: X a banana over
/// two vertices, Y1 = Y2 a banana with `s` edges, morphisms given by the
/// incidence table. Both morphisms must come out harmonic of degree l+1.
Correspondence hecke_Tl(unsigned l, unsigned s, const std::vector<HeckeIncidence>& incidence);

/// The fixed small instance: l=2, s=2, six source edges, all expansions 1,
/// with the mixing assignment {e1,e2,e3}->f1, {e4,e5,e6}->f2 under pi1 and
/// {e1,e2,e4}->g1, {e3,e5,e6}->g2 under pi2.
Correspondence hecke_Tl_default();

/// Round-robin synthetic incidence for general (l, s): s(l+1) unit edges,
/// consecutive blocks under pi1, residues mod s under pi2, all expansions 1.
std::vector<HeckeIncidence> hecke_Tl_synthetic_table(unsigned l, unsigned s);

/// Skeleton of the level-raising correspondence at p: source graph with two
/// inner vertices F, V, outer vertices X+, X-, and s four-valent cycle
/// vertices Z; each target adds one mid-edge vertex per Z. Expansion factors
/// are 1, p and (p-1)/2; both morphisms are harmonic of degree p and the
/// instance is a fixed point of stabilize. Requires p >= 5, s >= 1.
Correspondence hecke_Up(unsigned p, unsigned s,
                        const std::optional<std::map<std::string, int>>& genera = std::nullopt);

/// Identified-targets correspondence whose synchronization loop keeps
/// pulling fresh vertices back at 1/p of the previous scale: pi1 the
/// identity onto a two-edge chain, pi2 expansion-p onto a chain whose second
/// edge is p times too long for the identification. stabilize diverges with
/// min-spacing sequence 1/p, 1/p^2, ... Requires p >= 2.
Correspondence divergent_demo(unsigned p, bool identify = true);

} // namespace gallery
} // namespace skeltrop
