#include "k3fm/glue.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "k3fm/automorphisms.hpp"
#include "k3fm/bqf.hpp"
#include "k3fm/errors.hpp"

namespace k3fm {

namespace {

mpz_class common_denominator(const RatMatrix& m) {
    mpz_class den = 1;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), m(i, j).get_den_mpz_t());
    return den;
}

IntMatrix scaled_to_integer(const RatMatrix& m, const mpz_class& den) {
    IntMatrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const mpq_class v = m(i, j) * den;
            if (v.get_den() != 1) throw InvariantViolation("denominator does not clear");
            out(i, j) = v.get_num();
        }
    return out;
}

RatMatrix row_block(const RatMatrix& m, std::size_t first, std::size_t count) {
    RatMatrix out(m.rows(), count);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < count; ++j) out(i, j) = m(i, first + j);
    return out;
}

std::string lattice_key(const RatMatrix& basis, const mpz_class& den) {
    std::ostringstream os;
    os << hermite_normal_form(scaled_to_integer(basis, den));
    return os.str();
}

struct Dsu {
    std::vector<std::size_t> parent;
    explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

// Reduced positive definite binary forms of discriminant d < 0 up to GL2: |b| <= a <= c, b >= 0.
std::vector<BinaryQuadraticForm> definite_gl2_classes(const mpz_class& d) {
    std::vector<BinaryQuadraticForm> out;
    const mpz_class bound = isqrt(-d / 3) + 1;
    for (mpz_class a = 1; a <= bound; ++a)
        for (mpz_class b = 0; b <= a; ++b) {
            const mpz_class num = b * b - d;
            if (num % (4 * a) != 0) continue;
            const mpz_class c = num / (4 * a);
            if (c < a) continue;
            out.push_back({a, b, c});
        }
    return out;
}

BinaryQuadraticForm reduce_definite_gl2(BinaryQuadraticForm f) {
    for (;;) {
        // b into (-a, a]
        const mpz_class two_a = 2 * f.a;
        mpz_class k;
        mpz_fdiv_q(k.get_mpz_t(), mpz_class(f.a - f.b).get_mpz_t(), two_a.get_mpz_t());
        f = f.transformed(Mat2{1, k, 0, 1});
        if (f.c < f.a) {
            f = f.transformed(Mat2{0, -1, 1, 0});
            continue;
        }
        break;
    }
    f.b = abs(f.b);
    return f;
}

IntegerLattice definite_lattice(const BinaryQuadraticForm& f, bool negative) {
    return IntegerLattice(negative ? -f.gram() : f.gram());
}

std::vector<IntegerLattice> definite_rank2_genus(const IntegerLattice& s, const Limits& limits) {
    const bool negative = signature(s).n_plus == 0;
    const IntMatrix g = negative ? -s.gram() : s.gram();
    const BinaryQuadraticForm f{g(0, 0) / 2, g(0, 1), g(1, 1) / 2};
    const BinaryQuadraticForm own = reduce_definite_gl2(f);
    const FiniteQuadraticForm a = discriminant_form(s);

    std::vector<IntegerLattice> out{s};
    for (const auto& c : definite_gl2_classes(f.disc())) {
        if (c == own) continue;
        IntegerLattice candidate = definite_lattice(c, negative);
        if (are_isometric(discriminant_form(candidate), a, limits)) out.push_back(std::move(candidate));
    }
    return out;
}

IntMatrix hodge_generator_matrix(const IntegerLattice& t, const HodgeGroupSpec& g) {
    if (g.isometry) {
        if (!is_isometry(t, *g.isometry)) throw InvalidInput("Hodge isometry does not preserve T");
        return *g.isometry;
    }
    if (g.order > 2) throw Unsupported("lattice-level gluing classes need the Hodge generator as a matrix on T");
    return -IntMatrix::identity(t.rank());
}

}  // namespace

Overlattice glue(const IntegerLattice& s, const IntegerLattice& t, const FiniteFormMap& phi, const Limits& limits) {
    const DiscriminantGroup ds(s);
    const DiscriminantGroup dt(t);
    if (!phi.source || !phi.target || !(*phi.source == dt.form()) || !(*phi.target == ds.form()))
        throw InvalidInput("gluing map must go from A_T to A_S");
    if (phi.sign != -1 || !is_signed_isometry(phi, limits)) throw InvalidInput("gluing map is not an anti-isometry");

    const std::size_t rs = s.rank();
    const std::size_t n = rs + t.rank();
    const std::size_t k = dt.num_generators();
    RatMatrix gens(n + k, n);
    for (std::size_t i = 0; i < n; ++i) gens(i, i) = 1;
    for (std::size_t r = 0; r < k; ++r) {
        Element a(k, 0);
        a[r] = 1;
        const auto ls = ds.lift(phi.apply(a));
        const auto lt = dt.lift(a);
        for (std::size_t j = 0; j < rs; ++j) gens(n + r, j) = ls[j];
        for (std::size_t j = 0; j < t.rank(); ++j) gens(n + r, rs + j) = lt[j];
    }
    const mpz_class den = common_denominator(gens);
    const IntMatrix h = hermite_normal_form(scaled_to_integer(gens, den));
    if (h.rows() != n) throw InvariantViolation("glue generators lost rank");

    Overlattice l;
    l.ambient_basis = RatMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) l.ambient_basis(i, j) = fraction(h(i, j), den);

    const RatMatrix gram = l.ambient_basis * to_rational(block_diagonal(s.gram(), t.gram())) * l.ambient_basis.transpose();
    l.gram = IntMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (gram(i, j).get_den() != 1) throw InvariantViolation("glued lattice is not integral");
            l.gram(i, j) = gram(i, j).get_num();
        }
    for (std::size_t i = 0; i < n; ++i)
        if (l.gram(i, i) % 2 != 0) throw InvariantViolation("glued lattice is not even");

    mpz_class den_power = 1;
    for (std::size_t i = 0; i < n; ++i) den_power *= den;
    l.index = den_power / abs(determinant(h));
    return l;
}

FiniteFormMap recover_gluing_map(const Overlattice& l, const IntegerLattice& s, const IntegerLattice& t,
                                 const Limits& limits) {
    const DiscriminantGroup ds(s);
    const DiscriminantGroup dt(t);
    const auto as = std::make_shared<const FiniteQuadraticForm>(ds.form());
    const auto at = std::make_shared<const FiniteQuadraticForm>(dt.form());
    const EnumeratedForm et(at, limits);
    const std::size_t rs = s.rank();
    const std::size_t n = l.ambient_basis.rows();

    struct Step {
        Element t_class;
        Element s_class;
    };
    std::vector<Step> steps;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<mpq_class> ps(rs), pt(t.rank());
        for (std::size_t j = 0; j < rs; ++j) ps[j] = l.ambient_basis(i, j);
        for (std::size_t j = 0; j < t.rank(); ++j) pt[j] = l.ambient_basis(i, rs + j);
        steps.push_back({dt.coordinates(pt), ds.coordinates(ps)});
    }

    // BFS over A_T through the projections of the basis of L
    std::vector<std::optional<Element>> image(et.size());
    image[0] = Element(ds.num_generators(), 0);
    std::vector<std::size_t> queue{0};
    const EnumeratedForm es(as, limits);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const Element x = et.element(queue[head]);
        for (const auto& st : steps) {
            const std::size_t y = et.index(et.add(x, st.t_class));
            const Element sy = es.add(*image[queue[head]], st.s_class);
            if (image[y]) {
                if (*image[y] != sy) throw InvalidInput("projection to A_S is not well defined on A_T");
                continue;
            }
            image[y] = sy;
            queue.push_back(y);
        }
    }
    FiniteFormMap f{at, as, {}, -1};
    for (std::size_t i = 0; i < et.num_generators(); ++i) {
        const auto& img = image[et.index(et.generator(i))];
        if (!img) throw InvalidInput("projection of L to A_T is not surjective");
        f.images.push_back(*img);
    }
    return f;
}

OverlatticeReport verify_overlattice(const Overlattice& l, const IntegerLattice& s, const IntegerLattice& t,
                                     const std::optional<FiniteFormMap>& phi, const Limits& limits) {
    const std::size_t rs = s.rank();
    const std::size_t rt = t.rank();
    const std::size_t n = rs + rt;
    if (l.ambient_basis.rows() != n || l.ambient_basis.cols() != n || l.gram.rows() != n)
        throw InvalidInput("overlattice basis does not match rank S + rank T");

    OverlatticeReport rep;
    rep.even = true;
    for (std::size_t i = 0; i < n; ++i)
        if (l.gram(i, i) % 2 != 0) rep.even = false;
    rep.unimodular = abs(determinant(l.gram)) == 1;

    // T inside L: coordinates of the T basis in the basis of L
    const RatMatrix binv = inverse(l.ambient_basis);
    RatMatrix t_coords(rt, n);
    for (std::size_t i = 0; i < rt; ++i)
        for (std::size_t j = 0; j < n; ++j) t_coords(i, j) = binv(rs + i, j);
    if (common_denominator(t_coords) != 1) {
        rep.t_primitive = false;
    } else {
        const auto d = smith_normal_form(scaled_to_integer(t_coords, 1)).diagonal();
        rep.t_primitive = std::all_of(d.begin(), d.end(), [](const mpz_class& x) { return x == 1; });
    }

    // T^perp in L is the part of L with zero T component
    const RatMatrix tpart = row_block(l.ambient_basis, rs, rt);
    const mpz_class den = common_denominator(tpart);
    const SmithDecomposition snf = smith_normal_form(scaled_to_integer(tpart, den));
    std::size_t rank = 0;
    for (const auto& x : snf.diagonal())
        if (x != 0) ++rank;
    const std::size_t kernel = n - rank;
    if (kernel != rs) {
        rep.complement_is_s = false;
    } else {
        IntMatrix u_rows(kernel, n);
        for (std::size_t i = 0; i < kernel; ++i)
            for (std::size_t j = 0; j < n; ++j) u_rows(i, j) = snf.U(rank + i, j);
        const RatMatrix comp = row_block(to_rational(u_rows) * l.ambient_basis, 0, rs);
        rep.complement_is_s = common_denominator(comp) == 1 && abs(determinant(scaled_to_integer(comp, 1))) == 1;
    }

    if (phi) rep.map_recovered = recover_gluing_map(l, s, t, limits) == *phi;
    return rep;
}

std::vector<FiniteFormMap> anti_isometries(const IntegerLattice& s, const IntegerLattice& t, const Limits& limits) {
    const auto as = std::make_shared<const FiniteQuadraticForm>(discriminant_form(s));
    const auto at = std::make_shared<const FiniteQuadraticForm>(discriminant_form(t));
    return isometries_signed(at, as, -1, limits);
}

GluingClasses gluing_classes(const IntegerLattice& s, const IntegerLattice& t, const HodgeGroupSpec& g,
                             const Limits& limits) {
    g.validate(limits);
    const IntMatrix g_matrix = hodge_generator_matrix(t, g);
    const std::vector<FiniteFormMap> sigmas = anti_isometries(s, t, limits);

    GluingClasses out;
    out.anti_isometry_count = sigmas.size();
    if (sigmas.empty()) return out;

    const mpz_class den = discriminant_form(t).order();
    std::vector<RatMatrix> bases;
    std::map<std::string, std::size_t> by_key;
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        bases.push_back(glue(s, t, sigmas[i], limits).ambient_basis);
        if (!by_key.emplace(lattice_key(bases.back(), den), i).second)
            throw InvariantViolation("distinct gluing maps produced the same overlattice");
    }

    std::vector<IntMatrix> moves;
    const bool trivial_as = discriminant_form(s).order() == 1;
    if (!trivial_as)
        for (const auto& h : isometry_generators(s)) moves.push_back(block_diagonal(h, IntMatrix::identity(t.rank())));
    moves.push_back(block_diagonal(IntMatrix::identity(s.rank()), -IntMatrix::identity(t.rank())));
    moves.push_back(block_diagonal(IntMatrix::identity(s.rank()), g_matrix));

    Dsu dsu(sigmas.size());
    for (std::size_t i = 0; i < sigmas.size(); ++i)
        for (const auto& m : moves) {
            const RatMatrix moved = bases[i] * to_rational(m).transpose();
            const auto it = by_key.find(lattice_key(moved, den));
            if (it == by_key.end()) throw InvariantViolation("isometry image of a glued lattice is not a gluing");
            dsu.unite(i, it->second);
        }
    for (std::size_t i = 0; i < sigmas.size(); ++i)
        if (dsu.find(i) == i) out.representatives.push_back(sigmas[i]);
    return out;
}

std::size_t formula_count(const IntegerLattice& s, const IntegerLattice& t, const HodgeGroupSpec& g,
                          const Limits& limits) {
    g.validate(limits);
    const DiscriminantGroup ds(s);
    const DiscriminantGroup dt(t);
    const auto as = std::make_shared<const FiniteQuadraticForm>(ds.form());
    const auto at = std::make_shared<const FiniteQuadraticForm>(dt.form());
    const FiniteOrthogonalGroup o(as, limits);

    std::vector<FiniteFormMap> h_gens;
    if (s.rank() >= 3 && s.rank() >= min_generators(s) + 2 && signature(s).n_plus > 0 && signature(s).n_minus > 0) {
        // O(S) maps onto O(A_S) in this range
        h_gens = o.elements();
    } else if (as->order() > 1) {
        for (const auto& h : isometry_generators(s)) h_gens.push_back(ds.induced_action(h, as));
    }

    std::vector<FiniteFormMap> k_gens{negation_map(as)};
    std::optional<FiniteFormMap> action;
    if (g.isometry) action = dt.induced_action(*g.isometry, at);
    else if (g.action) action = g.action;
    if (action) {
        const auto phi = first_isometry(action->source, as, -1, limits);
        if (!phi) throw InvalidInput("A_T is not anti-isometric to A_S");
        k_gens.push_back(compose(compose(*phi, *action), inverse(*phi, limits)));
    }
    return double_coset_count(o, h_gens, k_gens);
}

std::vector<IntegerLattice> genus_representatives(const IntegerLattice& s, const Limits& limits) {
    if (!s.is_even()) throw InvalidInput("even lattice required");
    if (s.rank() == 1) return {s};
    const Signature sig = signature(s);
    const bool definite = sig.n_plus == 0 || sig.n_minus == 0;
    if (s.rank() == 2) {
        if (definite) return definite_rank2_genus(s, limits);
        std::vector<IntegerLattice> out;
        for (auto& m : rank2_genus(s, limits)) out.push_back(std::move(m.lattice));
        return out;
    }
    if (!definite && s.rank() >= min_generators(s) + 2) return {s};
    throw Unsupported("genus enumeration is limited to rank <= 2 and the indefinite rank >= l + 2 range");
}

HodgeGroupSpec hodge_group_for_order(const IntegerLattice& t, long order, const Limits& limits) {
    if (order <= 0 || order % 2 != 0) throw InvalidInput("Hodge group order must be even and positive");
    if (order == 2) return HodgeGroupSpec::from_isometry(t, -IntMatrix::identity(t.rank()), 2, limits);
    const Signature sig = signature(t);
    if (t.rank() > 2 || (sig.n_plus != 0 && sig.n_minus != 0))
        throw Unsupported("Hodge groups of order > 2 are only synthesized for definite T of rank <= 2");
    const IntMatrix minus = -IntMatrix::identity(t.rank());
    for (const auto& g : definite_isometries(t)) {
        IntMatrix p = IntMatrix::identity(t.rank());
        long k = 0;
        do {
            p = g * p;
            ++k;
        } while (!(p == IntMatrix::identity(t.rank())) && k <= order);
        if (k != order) continue;
        IntMatrix half = IntMatrix::identity(t.rank());
        for (long i = 0; i < order / 2; ++i) half = g * half;
        if (half == minus) return HodgeGroupSpec::from_isometry(t, g, order, limits);
    }
    throw Unsupported("T has no isometry of order " + std::to_string(order) + " squaring to -id at half order");
}

bool CorrespondenceReport::all_equal() const {
    return orbit_total == formula_total &&
           std::all_of(entries.begin(), entries.end(), [](const CorrespondenceEntry& e) { return e.equal(); });
}

CorrespondenceReport verify_gluing_correspondence(const std::vector<IntegerLattice>& s_list, const IntegerLattice& t,
                                                  const HodgeGroupSpec& g, const Limits& limits) {
    CorrespondenceReport rep;
    for (const auto& s : s_list) {
        CorrespondenceEntry e{s, gluing_classes(s, t, g, limits).count(), formula_count(s, t, g, limits)};
        rep.orbit_total += e.orbit_count;
        rep.formula_total += e.formula_count;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

}  // namespace k3fm
