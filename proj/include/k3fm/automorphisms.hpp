#pragma once

#include <vector>

#include "k3fm/lattice.hpp"

namespace k3fm {

// Every isometry of a definite lattice of rank <= 2 (brute force over short vectors).
std::vector<IntMatrix> definite_isometries(const IntegerLattice& l);

// Generators of O(L) as integer matrices h with h^T G h = G:
//   rank 1                       -> {-1}
//   rank 2 indefinite, non-square disc  -> {-1, fundamental automorph, improper automorph if any}
//   rank <= 2 definite           -> all of O(L)
// Anything else throws Unsupported.
std::vector<IntMatrix> isometry_generators(const IntegerLattice& l);

bool is_isometry(const IntegerLattice& l, const IntMatrix& h);

}  // namespace k3fm
