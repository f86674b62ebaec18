#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "k3fm/finite_form.hpp"
#include "k3fm/matrix.hpp"

namespace k3fm {

struct Signature {
    std::size_t n_plus = 0;
    std::size_t n_minus = 0;

    friend bool operator==(const Signature&, const Signature&) = default;
};

// A free Z-module with a symmetric nondegenerate integral Gram matrix.
class IntegerLattice {
public:
    // Throws InvalidInput on a non-square, non-symmetric, empty or degenerate Gram matrix.
    explicit IntegerLattice(IntMatrix gram, std::string name = {});

    std::size_t rank() const { return gram_.rows(); }
    const IntMatrix& gram() const { return gram_; }
    const std::string& name() const { return name_; }
    const mpz_class& det() const { return det_; }
    bool is_even() const;

    // L(k): the Gram matrix scaled by k.
    IntegerLattice scaled(long k) const;

    friend bool operator==(const IntegerLattice& a, const IntegerLattice& b) { return a.gram_ == b.gram_; }

private:
    IntMatrix gram_;
    std::string name_;
    mpz_class det_;
};

// U * A * V = D with U, V unimodular and D diagonal, d_1 | d_2 | ... (d_i >= 0).
struct SmithDecomposition {
    IntMatrix U;
    IntMatrix D;
    IntMatrix V;

    std::vector<mpz_class> diagonal() const;
};

SmithDecomposition smith_normal_form(const IntMatrix& a);

// Throws InvalidInput("degenerate lattice") on singular input.
Signature signature(const IntMatrix& gram);
inline Signature signature(const IntegerLattice& l) { return signature(l.gram()); }

// The discriminant group A_L = L*/L in invariant-factor coordinates, together with the
// data needed to move between dual vectors and group coordinates.
class DiscriminantGroup {
public:
    explicit DiscriminantGroup(const IntegerLattice& lattice);

    const FiniteQuadraticForm& form() const { return form_; }
    std::size_t num_generators() const { return lifts_.rows(); }

    // Lift of an element to L* (coordinates in the lattice basis).
    std::vector<mpq_class> lift(const Element& x) const;
    // Class of a dual vector x in A_L; throws InvalidInput if x is not in L*.
    Element coordinates(const std::vector<mpq_class>& x) const;
    // Action on A_L induced by an isometry h of L (column convention: h^T G h = G).
    FiniteFormMap induced_action(const IntMatrix& h, const std::shared_ptr<const FiniteQuadraticForm>& self) const;

private:
    IntMatrix gram_;
    IntMatrix coord_rows_;  // rows of U for the nontrivial invariant factors
    std::vector<mpz_class> orders_;
    RatMatrix lifts_;       // generator i = row i, a vector of L*
    FiniteQuadraticForm form_;
};

// Throws InvalidInput("even lattice required") for odd lattices.
FiniteQuadraticForm discriminant_form(const IntegerLattice& l);

// l(A_L): number of invariant factors > 1.
std::size_t min_generators(const IntegerLattice& l);

IntegerLattice direct_sum(const IntegerLattice& a, const IntegerLattice& b);

IntegerLattice hyperbolic_plane();
IntegerLattice e8(bool negative = false);
// E8(-1)^2 + U^3: rank 22, signature (3,19), det -1.
IntegerLattice k3_lattice();

}  // namespace k3fm
