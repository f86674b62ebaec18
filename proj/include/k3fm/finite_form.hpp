#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <gmpxx.h>

#include "k3fm/matrix.hpp"

namespace k3fm {

// Coefficient vector with respect to the generators of a finite abelian group.
using Element = std::vector<std::int64_t>;

// Brute-force enumeration limits. K3FM_CAP overrides the default in the CLI.
struct Limits {
    std::size_t max_group_order = 10000;
};

// Reduce a rational into the canonical representative of Q/2Z (0 <= r < 2) or Q/Z.
mpq_class mod2(const mpq_class& r);
mpq_class mod1(const mpq_class& r);

// A finite quadratic form (A, q): A = Z/d_1 x ... x Z/d_k with q valued in Q/2Z and the
// associated bilinear form b valued in Q/Z.
class FiniteQuadraticForm {
public:
    FiniteQuadraticForm() = default;  // the trivial group
    // Throws InvalidInput unless b is symmetric, b(g_i,g_i) = q(g_i) mod Z,
    // d_i b(g_i,g_j) = 0 mod Z and d_i^2 q(g_i) = 0 mod 2Z.
    FiniteQuadraticForm(std::vector<mpz_class> orders, std::vector<mpq_class> q, RatMatrix b);
    // Cyclic group Z/n with q(g) = q.
    static FiniteQuadraticForm cyclic(long n, const mpq_class& q);

    std::size_t num_generators() const { return orders_.size(); }
    const std::vector<mpz_class>& orders() const { return orders_; }
    const std::vector<mpq_class>& q_gens() const { return q_; }
    const RatMatrix& b_matrix() const { return b_; }
    // |A| (arbitrary precision).
    mpz_class order() const;

    mpq_class q(const Element& x) const;
    mpq_class b(const Element& x, const Element& y) const;

    // (A, -q).
    FiniteQuadraticForm negated() const;

    friend bool operator==(const FiniteQuadraticForm&, const FiniteQuadraticForm&) = default;

private:
    std::vector<mpz_class> orders_;
    std::vector<mpq_class> q_;
    RatMatrix b_;
};

// q(x) reduced into [0, 2). Throws InvalidInput on a length mismatch.
mpq_class evaluate_q(const FiniteQuadraticForm& a, const Element& x);

// Small-group view with all values over a common denominator; every element of A is
// addressable by a mixed-radix index (first generator most significant, so index order is
// lexicographic order of coefficient vectors).
class EnumeratedForm {
public:
    // Throws CapExceeded if |A| > limits.max_group_order.
    EnumeratedForm(std::shared_ptr<const FiniteQuadraticForm> form, const Limits& limits);

    const FiniteQuadraticForm& form() const { return *form_; }
    const std::shared_ptr<const FiniteQuadraticForm>& form_ptr() const { return form_; }
    std::size_t size() const { return size_; }
    std::size_t num_generators() const { return orders_.size(); }
    const std::vector<std::int64_t>& orders() const { return orders_; }
    std::int64_t denominator() const { return den_; }

    Element element(std::size_t index) const;
    std::size_t index(const Element& x) const;
    Element normalize(Element x) const;
    Element add(const Element& x, const Element& y) const;
    Element scale(const Element& x, std::int64_t k) const;
    Element generator(std::size_t i) const;

    // q(x) * den mod 2 den.
    std::int64_t q_num(const Element& x) const;
    // b(x,y) * den mod den.
    std::int64_t b_num(const Element& x, const Element& y) const;
    // Additive order of x.
    std::int64_t element_order(const Element& x) const;

private:
    std::shared_ptr<const FiniteQuadraticForm> form_;
    std::vector<std::int64_t> orders_;
    std::size_t size_ = 1;
    std::int64_t den_ = 1;
    std::vector<std::int64_t> qn_;                // per generator, mod 2 den
    std::vector<std::vector<std::int64_t>> bn_;   // per generator pair, mod den
};

// A group isomorphism between finite quadratic forms multiplying q by sign (+1 isometry,
// -1 anti-isometry). The map is fixed by the images of the source generators.
struct FiniteFormMap {
    std::shared_ptr<const FiniteQuadraticForm> source;
    std::shared_ptr<const FiniteQuadraticForm> target;
    std::vector<Element> images;
    int sign = 1;

    Element apply(const Element& x) const;
    friend bool operator==(const FiniteFormMap& a, const FiniteFormMap& b) {
        return a.sign == b.sign && a.images == b.images;
    }
};

// f o g (apply g first). Throws InvalidInput when g's target is not f's source.
FiniteFormMap compose(const FiniteFormMap& f, const FiniteFormMap& g);
FiniteFormMap identity_map(const std::shared_ptr<const FiniteQuadraticForm>& a);
FiniteFormMap negation_map(const std::shared_ptr<const FiniteQuadraticForm>& a);
// Inverse of a bijective map (enumerates the source; caps apply).
FiniteFormMap inverse(const FiniteFormMap& f, const Limits& limits = {});
// True when f is a bijective homomorphism with q_target o f = sign * q_source.
bool is_signed_isometry(const FiniteFormMap& f, const Limits& limits = {});

// All bijections A -> B with q_B(f(x)) = sign q_A(x), in lexicographic order of the
// generator images. Empty when none exist.
std::vector<FiniteFormMap> isometries_signed(const std::shared_ptr<const FiniteQuadraticForm>& a,
                                             const std::shared_ptr<const FiniteQuadraticForm>& b, int sign,
                                             const Limits& limits = {});
std::vector<FiniteFormMap> isometries_signed(const FiniteQuadraticForm& a, const FiniteQuadraticForm& b, int sign,
                                             const Limits& limits = {});
// The lexicographically first signed isometry, if any.
std::optional<FiniteFormMap> first_isometry(const std::shared_ptr<const FiniteQuadraticForm>& a,
                                            const std::shared_ptr<const FiniteQuadraticForm>& b, int sign,
                                            const Limits& limits = {});

bool are_isometric(const FiniteQuadraticForm& a, const FiniteQuadraticForm& b, const Limits& limits = {});

// O(A, q) as an explicit element list.
class FiniteOrthogonalGroup {
public:
    FiniteOrthogonalGroup(std::shared_ptr<const FiniteQuadraticForm> form, const Limits& limits = {});
    explicit FiniteOrthogonalGroup(const FiniteQuadraticForm& form, const Limits& limits = {})
        : FiniteOrthogonalGroup(std::make_shared<const FiniteQuadraticForm>(form), limits) {}

    const std::shared_ptr<const FiniteQuadraticForm>& form() const { return form_; }
    const std::vector<FiniteFormMap>& elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }
    // Position of f in elements(); nullopt when f is not an element.
    std::optional<std::size_t> find(const FiniteFormMap& f) const;
    const FiniteFormMap& identity() const { return elements_[*find(identity_map(form_))]; }

private:
    std::shared_ptr<const FiniteQuadraticForm> form_;
    std::vector<FiniteFormMap> elements_;
    std::unordered_map<std::string, std::size_t> index_;
};

FiniteOrthogonalGroup orthogonal_group(const FiniteQuadraticForm& a, const Limits& limits = {});

// Indices into O.elements() of the subgroup generated by gens (sorted ascending).
// Throws InvalidInput if a generator is not in O.
std::vector<std::size_t> subgroup_generated(const FiniteOrthogonalGroup& o, const std::vector<FiniteFormMap>& gens);

// Orbits of O under x -> h o x o k^-1 with h in <h_gens>, k in <k_gens>; each orbit is a
// sorted list of element indices, orbits ordered by smallest member.
std::vector<std::vector<std::size_t>> double_cosets(const FiniteOrthogonalGroup& o,
                                                    const std::vector<FiniteFormMap>& h_gens,
                                                    const std::vector<FiniteFormMap>& k_gens);
std::size_t double_coset_count(const FiniteOrthogonalGroup& o, const std::vector<FiniteFormMap>& h_gens,
                               const std::vector<FiniteFormMap>& k_gens);

// Conjugate c o f o c^-1 for c, f in the same orthogonal group.
FiniteFormMap conjugate(const FiniteFormMap& f, const FiniteFormMap& c, const Limits& limits = {});

std::string to_string(const mpq_class& q);
std::string to_string(const Element& x);

}  // namespace k3fm
