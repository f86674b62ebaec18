#pragma once

#include <optional>
#include <vector>

#include "k3fm/fm_count.hpp"
#include "k3fm/lattice.hpp"

namespace k3fm {

// An overlattice of S + T: basis rows in the coordinates of the S + T basis (S first).
struct Overlattice {
    RatMatrix ambient_basis;
    IntMatrix gram;
    mpz_class index;
};

// Builds the overlattice {(phi(a), a)} of S + T from an anti-isometry phi: A_T -> A_S
// (q_S o phi = -q_T). The forms of phi must be the discriminant forms of T and S as computed
// by DiscriminantGroup. Throws InvalidInput if phi is not such a map.
Overlattice glue(const IntegerLattice& s, const IntegerLattice& t, const FiniteFormMap& phi, const Limits& limits = {});

struct OverlatticeReport {
    bool even = false;
    bool unimodular = false;
    bool t_primitive = false;
    bool complement_is_s = false;
    std::optional<bool> map_recovered;  // set when a gluing map was supplied

    bool ok() const { return even && unimodular && t_primitive && complement_is_s && map_recovered.value_or(true); }
};

OverlatticeReport verify_overlattice(const Overlattice& l, const IntegerLattice& s, const IntegerLattice& t,
                                     const std::optional<FiniteFormMap>& phi = std::nullopt,
                                     const Limits& limits = {});

// The map A_T -> A_S read off from the projections of L to S* and T*.
FiniteFormMap recover_gluing_map(const Overlattice& l, const IntegerLattice& s, const IntegerLattice& t,
                                 const Limits& limits = {});

// Every anti-isometry A_T -> A_S, in lexicographic order.
std::vector<FiniteFormMap> anti_isometries(const IntegerLattice& s, const IntegerLattice& t, const Limits& limits = {});

struct GluingClasses {
    std::size_t anti_isometry_count = 0;
    std::vector<FiniteFormMap> representatives;  // one per class
    std::size_t count() const { return representatives.size(); }
};

// Classes of gluings of S and T up to O(S) on the left and G on T, computed on the glued
// lattices themselves. G needs its generator as a matrix on T when its order exceeds 2.
GluingClasses gluing_classes(const IntegerLattice& s, const IntegerLattice& t, const HodgeGroupSpec& g = {},
                             const Limits& limits = {});

// Double coset count |O(S) \ O(A_S) / G| with G carried over from T by the first anti-isometry.
std::size_t formula_count(const IntegerLattice& s, const IntegerLattice& t, const HodgeGroupSpec& g = {},
                          const Limits& limits = {});

// Isomorphism classes in the genus of S, S first. Rank 1, rank 2 and the rank >= 3 Nikulin range.
std::vector<IntegerLattice> genus_representatives(const IntegerLattice& s, const Limits& limits = {});

// A cyclic group of Hodge isometries of T of the given order, when T is definite of rank <= 2
// and has an isometry g of that order with g^(order/2) = -id. Throws Unsupported otherwise.
HodgeGroupSpec hodge_group_for_order(const IntegerLattice& t, long order, const Limits& limits = {});

struct CorrespondenceEntry {
    IntegerLattice s;
    std::size_t orbit_count = 0;
    std::size_t formula_count = 0;
    bool equal() const { return orbit_count == formula_count; }
};

struct CorrespondenceReport {
    std::vector<CorrespondenceEntry> entries;
    std::size_t orbit_total = 0;
    std::size_t formula_total = 0;
    bool all_equal() const;
};

// Orbit side vs double coset side for every S_j.
CorrespondenceReport verify_gluing_correspondence(const std::vector<IntegerLattice>& s_list, const IntegerLattice& t,
                                                  const HodgeGroupSpec& g = {}, const Limits& limits = {});

}  // namespace k3fm
