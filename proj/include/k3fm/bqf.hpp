#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "k3fm/finite_form.hpp"
#include "k3fm/lattice.hpp"

namespace k3fm {

// 2x2 integer matrix acting on column vectors; a form f transforms as M^T G_f M.
struct Mat2 {
    mpz_class a = 1, b = 0, c = 0, d = 1;  // [[a, b], [c, d]]

    static Mat2 identity() { return {}; }
    mpz_class det() const { return a * d - b * c; }
    Mat2 inverse() const;  // unimodular input only
    IntMatrix to_matrix() const;
    friend Mat2 operator*(const Mat2& x, const Mat2& y);
    friend bool operator==(const Mat2&, const Mat2&) = default;
    friend std::ostream& operator<<(std::ostream& os, const Mat2& m);
};

// a x^2 + b xy + c y^2.
struct BinaryQuadraticForm {
    mpz_class a, b, c;

    mpz_class disc() const { return b * b - 4 * a * c; }
    // Gram [[2a, b], [b, 2c]].
    IntMatrix gram() const;
    // The form with Gram M^T G M.
    BinaryQuadraticForm transformed(const Mat2& m) const;

    friend bool operator==(const BinaryQuadraticForm&, const BinaryQuadraticForm&) = default;
    friend auto operator<=>(const BinaryQuadraticForm& x, const BinaryQuadraticForm& y) {
        if (auto c = cmp(x.a, y.a); c != 0) return c <=> 0;
        if (auto c = cmp(x.b, y.b); c != 0) return c <=> 0;
        return cmp(x.c, y.c) <=> 0;
    }
    friend std::ostream& operator<<(std::ostream& os, const BinaryQuadraticForm& f);
};

std::string to_string(const BinaryQuadraticForm& f);

struct TransformedForm {
    BinaryQuadraticForm form;
    Mat2 transform;  // transform^T G_origin transform = G_form
    BinaryQuadraticForm origin;
};

struct Automorph {
    Mat2 matrix;
    int det = 1;
};

// Valid discriminant for the class machinery: D > 0, non-square, D = 0 or 1 mod 4.
bool is_valid_discriminant(const mpz_class& d);
// D = 1 mod 4 square-free, or D = 4m with m = 2, 3 mod 4 square-free.
bool is_fundamental_discriminant(const mpz_class& d);

// Even rank-2 lattice of signature (1,1) -> form. Throws InvalidInput on wrong
// rank/parity/signature and Unsupported("isotropic discriminant unsupported") on square D.
BinaryQuadraticForm lattice_to_form(const IntegerLattice& l);
IntegerLattice form_to_lattice(const BinaryQuadraticForm& f);

BinaryQuadraticForm opposite(const BinaryQuadraticForm& f);

// 0 < b < sqrt(D) and sqrt(D) - b < 2|a| < sqrt(D) + b, by exact integer comparisons.
bool is_reduced(const BinaryQuadraticForm& f);
// One neighbour step (a,b,c) -> (c, b', (b'^2 - D)/4c) with its SL2 matrix.
TransformedForm rho(const BinaryQuadraticForm& f);
TransformedForm reduce(const BinaryQuadraticForm& f);
// Cycle of reduced forms starting at f. Throws InvalidInput if f is not reduced.
std::vector<BinaryQuadraticForm> cycle(const BinaryQuadraticForm& f);

// SL2 witness W with W^T G_f W = G_g, or nullopt. Throws InvalidInput on D mismatch.
std::optional<Mat2> proper_equivalence(const BinaryQuadraticForm& f, const BinaryQuadraticForm& g);
bool is_properly_equivalent(const BinaryQuadraticForm& f, const BinaryQuadraticForm& g);

// Minimal t, u > 0 with t^2 - D u^2 = 4, via the continued fraction of sqrt(D) or (1 + sqrt(D))/2.
struct PellSolution {
    mpz_class t, u;
};
PellSolution pell_minimal(const mpz_class& d);

Automorph fundamental_automorph(const BinaryQuadraticForm& f);
std::optional<Automorph> improper_automorph(const BinaryQuadraticForm& f);

struct ClassGroupData {
    mpz_class D;
    std::vector<std::vector<BinaryQuadraticForm>> cycles;  // one per proper class, canonical start
    std::size_t h = 0;
    std::vector<std::vector<std::size_t>> genus_partition;  // class indices per genus
    std::vector<std::size_t> ambiguous_indices;
    std::vector<std::size_t> opposite_of;  // class index of the opposite class

    const BinaryQuadraticForm& representative(std::size_t i) const { return cycles[i].front(); }
    // Index of the proper class containing f.
    std::size_t class_of(const BinaryQuadraticForm& f) const;
};

// Enumerates reduced forms, partitions into cycles and folds under the opposite involution.
// The genus partition is filled only when with_genera is set (it needs discriminant forms).
ClassGroupData proper_classes(const mpz_class& d, bool with_genera = true, const Limits& limits = {});
std::size_t class_number(const mpz_class& d);
std::size_t improper_class_count(const mpz_class& d);
std::size_t improper_class_count(const ClassGroupData& data);

// Groups classes by isometry of their discriminant forms. For odd fundamental D asserts
// equal genus sizes and 2^(n-1) genera (throws InvariantViolation otherwise).
std::vector<std::vector<std::size_t>> genus_partition(const ClassGroupData& data, const Limits& limits = {});

// Number of distinct prime factors.
std::size_t distinct_prime_factors(mpz_class n);

}  // namespace k3fm
