#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "k3fm/bqf.hpp"
#include "k3fm/finite_form.hpp"
#include "k3fm/lattice.hpp"

namespace k3fm {

// An even hyperbolic lattice, signature (1, rank - 1).
class NeronSeveriSpec {
public:
    // Throws InvalidInput when the lattice is odd or not hyperbolic.
    explicit NeronSeveriSpec(IntegerLattice lattice);
    const IntegerLattice& lattice() const { return lattice_; }
    std::size_t rank() const { return lattice_.rank(); }

private:
    IntegerLattice lattice_;
};

// Cyclic group G of Hodge isometries of order 2I, with -id = g^I.
struct HodgeGroupSpec {
    long order = 2;
    // Generator action on the discriminant form of T; its source carries (A_T, q_T).
    std::optional<FiniteFormMap> action;
    // Generator as a matrix on a basis of T (column convention), when T is explicit.
    std::optional<IntMatrix> isometry;

    static HodgeGroupSpec generic() { return {}; }
    // From an explicit isometry g of T of the given order; derives the action on A_T.
    static HodgeGroupSpec from_isometry(const IntegerLattice& t, const IntMatrix& g, long order,
                                        const Limits& limits = {});

    // Order even and positive; when an action is present it is an isometry of A_T with
    // action^(order/2) = -id. Throws InvalidInput otherwise, and for order > 2 without action.
    void validate(const Limits& limits = {}) const;
};

enum class CountMethod { rank1, nikulin, rank2 };
std::string to_string(CountMethod m);

struct FMSummand {
    IntegerLattice representative;
    std::optional<BinaryQuadraticForm> form;  // rank-2 representatives
    std::size_t summand = 0;
    std::size_t orthogonal_group_order = 0;   // |O(A_S_j)|, 0 when not enumerated
};

struct FMCountResult {
    std::size_t total = 0;
    std::vector<FMSummand> breakdown;
    CountMethod method = CountMethod::rank1;
};

long euler_phi(long n);
// tau(1) = 1, otherwise the number of distinct prime factors.
std::size_t tau(long n);
bool is_prime(long n);

// Even 2I with phi(2I) | t, sorted.
std::vector<long> hodge_order_candidates(long t);

// NS = <2n>: 2^(tau(n)-1), cross-checked against the brute-force double coset count.
FMCountResult fm_number_rank1(long n, const Limits& limits = {});
// Rank >= 3 with rank >= l(NS) + 2: a single partner. nullopt otherwise.
std::optional<FMCountResult> fm_number_nikulin(const NeronSeveriSpec& ns);
FMCountResult fm_number_rank2(const NeronSeveriSpec& ns, const HodgeGroupSpec& g = {}, const Limits& limits = {});
// Dispatch on the Picard number. Throws Unsupported for rank >= 3 outside the Nikulin range.
FMCountResult fm_number(const NeronSeveriSpec& ns, const HodgeGroupSpec& g = {}, const Limits& limits = {});

// Unoriented isomorphism classes in the genus of an even rank-2 hyperbolic lattice, input first.
struct Rank2GenusMember {
    IntegerLattice lattice;
    BinaryQuadraticForm form;
};
std::vector<Rank2GenusMember> rank2_genus(const IntegerLattice& l, const Limits& limits = {});

// The K3 with NS = [[2, 1], [1, (1 - p) / 2]].
IntegerLattice principal_ns_lattice(long p);

struct TableRow {
    long p = 0;
    std::size_t h = 0;
    std::size_t fm = 0;
    std::string error;  // nonempty when the prime was rejected
};

// The fourteen primes printed by `k3fm table` without --list.
const std::vector<long>& default_table_primes();

// One row; validation failures land in TableRow::error, invariant failures throw.
TableRow table_row(long p, const Limits& limits = {});
// Serial reference implementations; see parallel.hpp for the OpenMP versions.
std::vector<TableRow> fm_table(const std::vector<long>& primes, const Limits& limits = {});

struct ScanReport {
    std::vector<std::pair<long, std::size_t>> rows;         // (p, |FM|)
    std::vector<long> unique_partner;                       // |FM| = 1
    std::vector<std::pair<long, std::size_t>> running_max;  // strictly increasing |FM|
};
std::vector<long> scan_primes(long bound);
ScanReport summarize_scan(std::vector<std::pair<long, std::size_t>> rows);
ScanReport gauss_scan(long bound, const Limits& limits = {});

}  // namespace k3fm
