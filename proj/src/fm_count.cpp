#include "k3fm/fm_count.hpp"

#include <algorithm>
#include <memory>

#include "k3fm/automorphisms.hpp"
#include "k3fm/errors.hpp"

namespace k3fm {

namespace {

FiniteFormMap power(const FiniteFormMap& f, long k) {
    FiniteFormMap out = identity_map(f.source);
    for (long i = 0; i < k; ++i) out = compose(f, out);
    return out;
}

bool is_identity(const FiniteFormMap& f) { return f == identity_map(f.source); }

mpz_class abs_det(const IntegerLattice& l) { return abs(l.det()); }

}  // namespace

NeronSeveriSpec::NeronSeveriSpec(IntegerLattice lattice) : lattice_(std::move(lattice)) {
    if (!lattice_.is_even()) throw InvalidInput("even lattice required");
    const Signature sig = signature(lattice_);
    if (sig.n_plus != 1) throw InvalidInput("Neron-Severi lattice must have signature (1, rank - 1)");
}

HodgeGroupSpec HodgeGroupSpec::from_isometry(const IntegerLattice& t, const IntMatrix& g, long order,
                                             const Limits& limits) {
    if (!is_isometry(t, g)) throw InvalidInput("matrix is not an isometry of the transcendental lattice");
    if (order <= 0 || order % 2 != 0) throw InvalidInput("Hodge group order must be even and positive");
    IntMatrix p = IntMatrix::identity(t.rank());
    for (long i = 0; i < order / 2; ++i) p = g * p;
    if (!(p == -IntMatrix::identity(t.rank())))
        throw InvalidInput("isometry power order/2 is not -id");
    const DiscriminantGroup dg(t);
    const auto form = std::make_shared<const FiniteQuadraticForm>(dg.form());
    HodgeGroupSpec spec;
    spec.order = order;
    spec.action = dg.induced_action(g, form);
    spec.isometry = g;
    spec.validate(limits);
    return spec;
}

void HodgeGroupSpec::validate(const Limits& limits) const {
    if (order <= 0 || order % 2 != 0) throw InvalidInput("Hodge group order must be even and positive");
    if (!action) {
        if (order > 2) throw InvalidInput("explicit Hodge action required");
        return;
    }
    const FiniteFormMap& a = *action;
    if (!a.source || !a.target || !(*a.source == *a.target))
        throw InvalidInput("Hodge action must map A_T to itself");
    if (a.sign != 1 || !is_signed_isometry(a, limits)) throw InvalidInput("Hodge action is not an isometry of A_T");
    if (!(power(a, order / 2) == negation_map(a.source)))
        throw InvalidInput("Hodge action: generator^(order/2) must act as -id");
    if (!is_identity(power(a, order))) throw InvalidInput("Hodge action order does not divide the group order");
}

std::string to_string(CountMethod m) {
    switch (m) {
        case CountMethod::rank1: return "rank1";
        case CountMethod::nikulin: return "nikulin";
        case CountMethod::rank2: return "rank2";
    }
    return "?";
}

long euler_phi(long n) {
    if (n <= 0) throw InvalidInput("phi needs a positive argument");
    long result = n;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        while (n % p == 0) n /= p;
        result -= result / p;
    }
    if (n > 1) result -= result / n;
    return result;
}

std::size_t tau(long n) {
    if (n <= 0) throw InvalidInput("tau needs a positive argument");
    if (n == 1) return 1;
    return distinct_prime_factors(mpz_class(n));
}

bool is_prime(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<long> hodge_order_candidates(long t) {
    if (t < 1) throw InvalidInput("rank of T must be positive");
    std::vector<long> out;
    const long bound = std::max<long>(2, 2 * t * t);
    for (long m = 2; m <= bound; m += 2)
        if (t % euler_phi(m) == 0) out.push_back(m);
    return out;
}

FMCountResult fm_number_rank1(long n, const Limits& limits) {
    if (n < 1) throw InvalidInput("rank-1 Neron-Severi lattice <2n> needs n >= 1");
    const auto a = std::make_shared<const FiniteQuadraticForm>(FiniteQuadraticForm::cyclic(2 * n, mpq_class(1, 2 * n)));
    const FiniteOrthogonalGroup o(a, limits);
    const auto neg = negation_map(a);
    const std::size_t count = double_coset_count(o, {neg}, {neg});
    const std::size_t expected = std::size_t{1} << (tau(n) - 1);
    if (count != expected)
        throw InvariantViolation("rank-1 count " + std::to_string(count) + " disagrees with 2^(tau(n)-1) = " +
                                 std::to_string(expected));
    FMCountResult r;
    r.method = CountMethod::rank1;
    r.total = count;
    r.breakdown.push_back({IntegerLattice(IntMatrix{{2 * n}}), std::nullopt, count, o.size()});
    return r;
}

std::optional<FMCountResult> fm_number_nikulin(const NeronSeveriSpec& ns) {
    if (ns.rank() < 3) return std::nullopt;
    if (ns.rank() < min_generators(ns.lattice()) + 2) return std::nullopt;
    FMCountResult r;
    r.method = CountMethod::nikulin;
    r.total = 1;
    r.breakdown.push_back({ns.lattice(), std::nullopt, 1, 0});
    return r;
}

std::vector<Rank2GenusMember> rank2_genus(const IntegerLattice& l, const Limits& limits) {
    const BinaryQuadraticForm input = lattice_to_form(l);
    const ClassGroupData data = proper_classes(input.disc(), false, limits);
    const FiniteQuadraticForm a = discriminant_form(l);
    const std::size_t own = data.class_of(input);

    std::vector<Rank2GenusMember> out;
    out.push_back({l, input});
    for (std::size_t i = 0; i < data.h; ++i) {
        const std::size_t j = data.opposite_of[i];
        if (j < i) continue;  // the GL2 orbit {i, j} is visited once
        if (i == own || j == own) continue;
        const BinaryQuadraticForm& f = data.representative(i);
        IntegerLattice candidate = form_to_lattice(f);
        if (are_isometric(discriminant_form(candidate), a, limits)) out.push_back({std::move(candidate), f});
    }
    return out;
}

FMCountResult fm_number_rank2(const NeronSeveriSpec& ns, const HodgeGroupSpec& g, const Limits& limits) {
    if (ns.rank() != 2) throw InvalidInput("rank-2 Neron-Severi lattice required");
    g.validate(limits);
    std::optional<FiniteFormMap> action = g.action;
    if (action && action->source->order() != abs_det(ns.lattice()))
        throw InvalidInput("Hodge action group order does not match |det NS|");

    FMCountResult r;
    r.method = CountMethod::rank2;
    for (auto& member : rank2_genus(ns.lattice(), limits)) {
        const DiscriminantGroup dg(member.lattice);
        const auto a = std::make_shared<const FiniteQuadraticForm>(dg.form());
        const FiniteOrthogonalGroup o(a, limits);

        std::vector<FiniteFormMap> h_gens;
        for (const auto& h : isometry_generators(member.lattice)) h_gens.push_back(dg.induced_action(h, a));

        std::vector<FiniteFormMap> k_gens{negation_map(a)};
        if (action) {
            const auto phi = first_isometry(action->source, a, -1, limits);
            if (!phi) throw InvalidInput("Hodge action: A_T is not anti-isometric to A_NS");
            k_gens.push_back(compose(compose(*phi, *action), inverse(*phi, limits)));
        }
        const std::size_t summand = double_coset_count(o, h_gens, k_gens);
        r.total += summand;
        r.breakdown.push_back({std::move(member.lattice), member.form, summand, o.size()});
    }
    return r;
}

FMCountResult fm_number(const NeronSeveriSpec& ns, const HodgeGroupSpec& g, const Limits& limits) {
    g.validate(limits);
    const long t = 22 - static_cast<long>(ns.rank());
    if (t < 2) throw InvalidInput("Picard number of a projective K3 is at most 20");
    if (t % euler_phi(g.order) != 0) throw InvalidInput("phi(Hodge group order) must divide rank T");

    if (ns.rank() == 1) {
        if (g.order != 2) throw InvalidInput("rank-1 Neron-Severi admits only the generic Hodge group");
        const mpz_class two_n = ns.lattice().gram()(0, 0);
        if (!two_n.fits_slong_p()) throw CapExceeded("finite group too large for rank-1 enumeration");
        return fm_number_rank1(two_n.get_si() / 2, limits);
    }
    if (ns.rank() == 2) return fm_number_rank2(ns, g, limits);
    if (auto r = fm_number_nikulin(ns)) return *r;
    throw Unsupported(
        "unsupported: rank >= 3 with l(S) > rank - 2 requires general indefinite genus enumeration (out of scope)");
}

IntegerLattice principal_ns_lattice(long p) {
    if (p % 4 != 1) throw InvalidInput("p must be 1 mod 4");
    return IntegerLattice(IntMatrix{{2, 1}, {1, (1 - p) / 2}}, "S0(" + std::to_string(p) + ")");
}

const std::vector<long>& default_table_primes() {
    static const std::vector<long> primes{229, 257, 401, 577, 733, 761, 1009, 1093, 1129, 1229, 1297, 1373, 1429, 1489};
    return primes;
}

TableRow table_row(long p, const Limits& limits) {
    TableRow row;
    row.p = p;
    if (!is_prime(p)) {
        row.error = std::to_string(p) + " is not prime";
        return row;
    }
    if (p % 4 != 1) {
        row.error = std::to_string(p) + " is not 1 mod 4";
        return row;
    }
    row.h = proper_classes(mpz_class(p), false, limits).h;
    row.fm = fm_number_rank2(NeronSeveriSpec(principal_ns_lattice(p)), {}, limits).total;
    if (2 * row.fm != row.h + 1)
        throw InvariantViolation("p = " + std::to_string(p) + ": |FM| = " + std::to_string(row.fm) +
                                 " but (h+1)/2 = " + std::to_string((row.h + 1) / 2));
    return row;
}

std::vector<TableRow> fm_table(const std::vector<long>& primes, const Limits& limits) {
    std::vector<TableRow> rows;
    rows.reserve(primes.size());
    for (long p : primes) rows.push_back(table_row(p, limits));
    return rows;
}

std::vector<long> scan_primes(long bound) {
    if (bound < 5) throw InvalidInput("scan bound must be at least 5");
    std::vector<long> out;
    for (long p = 5; p <= bound; p += 4)
        if (is_prime(p)) out.push_back(p);
    return out;
}

ScanReport summarize_scan(std::vector<std::pair<long, std::size_t>> rows) {
    ScanReport report;
    std::sort(rows.begin(), rows.end());
    std::size_t best = 0;
    for (const auto& [p, fm] : rows) {
        if (fm == 1) report.unique_partner.push_back(p);
        if (fm > best) {
            best = fm;
            report.running_max.emplace_back(p, fm);
        }
    }
    report.rows = std::move(rows);
    return report;
}

ScanReport gauss_scan(long bound, const Limits& limits) {
    std::vector<std::pair<long, std::size_t>> rows;
    for (long p : scan_primes(bound)) rows.emplace_back(p, table_row(p, limits).fm);
    return summarize_scan(std::move(rows));
}

}  // namespace k3fm
