#include "k3fm/bqf.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "k3fm/errors.hpp"

namespace k3fm {

namespace {

bool is_squarefree(mpz_class n) {
    if (n < 0) n = -n;
    for (mpz_class p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        n /= p;
        if (n % p == 0) return false;
    }
    return true;
}

void require_valid(const mpz_class& d) {
    if (!is_valid_discriminant(d))
        throw InvalidInput("invalid discriminant " + d.get_str() + ": need D > 0, non-square, D = 0 or 1 mod 4");
}

}  // namespace

Mat2 Mat2::inverse() const {
    const mpz_class det_ = det();
    if (det_ == 1) return {d, -b, -c, a};
    if (det_ == -1) return {-d, b, c, -a};
    throw InvalidInput("Mat2::inverse needs a unimodular matrix");
}

IntMatrix Mat2::to_matrix() const {
    IntMatrix m(2, 2);
    m(0, 0) = a;
    m(0, 1) = b;
    m(1, 0) = c;
    m(1, 1) = d;
    return m;
}

Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

std::ostream& operator<<(std::ostream& os, const Mat2& m) {
    return os << "[[" << m.a << ',' << m.b << "],[" << m.c << ',' << m.d << "]]";
}

IntMatrix BinaryQuadraticForm::gram() const {
    IntMatrix g(2, 2);
    g(0, 0) = 2 * a;
    g(0, 1) = g(1, 0) = b;
    g(1, 1) = 2 * c;
    return g;
}

BinaryQuadraticForm BinaryQuadraticForm::transformed(const Mat2& m) const {
    // f(m.a x + m.b y, m.c x + m.d y)
    return {a * m.a * m.a + b * m.a * m.c + c * m.c * m.c,
            2 * a * m.a * m.b + b * (m.a * m.d + m.b * m.c) + 2 * c * m.c * m.d,
            a * m.b * m.b + b * m.b * m.d + c * m.d * m.d};
}

std::ostream& operator<<(std::ostream& os, const BinaryQuadraticForm& f) {
    return os << '(' << f.a << ',' << f.b << ',' << f.c << ')';
}

std::string to_string(const BinaryQuadraticForm& f) {
    std::ostringstream os;
    os << f;
    return os.str();
}

bool is_valid_discriminant(const mpz_class& d) {
    if (d <= 0 || is_square(d)) return false;
    const mpz_class r = d % 4;
    return r == 0 || r == 1;
}

bool is_fundamental_discriminant(const mpz_class& d) {
    if (d % 4 == 1) return is_squarefree(d);
    if (d % 4 != 0) return false;
    const mpz_class m = d / 4;
    const mpz_class r = m % 4;
    return (r == 2 || r == 3) && is_squarefree(m);
}

BinaryQuadraticForm lattice_to_form(const IntegerLattice& l) {
    if (l.rank() != 2) throw InvalidInput("rank-2 lattice required");
    if (!l.is_even()) throw InvalidInput("even lattice required");
    if (signature(l) != Signature{1, 1}) throw InvalidInput("hyperbolic lattice of signature (1,1) required");
    const IntMatrix& g = l.gram();
    BinaryQuadraticForm f{g(0, 0) / 2, g(0, 1), g(1, 1) / 2};
    if (is_square(f.disc())) throw Unsupported("isotropic discriminant unsupported");
    return f;
}

IntegerLattice form_to_lattice(const BinaryQuadraticForm& f) { return IntegerLattice(f.gram()); }

BinaryQuadraticForm opposite(const BinaryQuadraticForm& f) { return {f.a, -f.b, f.c}; }

bool is_reduced(const BinaryQuadraticForm& f) {
    const mpz_class d = f.disc();
    if (f.b <= 0 || f.b * f.b >= d) return false;
    const mpz_class two_a = 2 * abs(f.a);
    const mpz_class upper = two_a + f.b;  // sqrt(D) - b < 2|a|  <=>  D < (2|a| + b)^2
    if (upper * upper <= d) return false;
    const mpz_class lower = two_a - f.b;  // 2|a| < sqrt(D) + b  <=>  2|a| - b < sqrt(D)
    return lower <= 0 || lower * lower < d;
}

TransformedForm rho(const BinaryQuadraticForm& f) {
    const mpz_class d = f.disc();
    if (f.c == 0) throw InvalidInput("rho step undefined for c = 0");
    const mpz_class ac = abs(f.c);
    const mpz_class mod = 2 * ac;
    mpz_class bp;
    if (f.c * f.c > d) {
        // b' in (-|c|, |c|]
        mpz_class neg_b = -f.b;
        mpz_fdiv_r(bp.get_mpz_t(), neg_b.get_mpz_t(), mod.get_mpz_t());
        if (bp > ac) bp -= mod;
    } else {
        // b' in (sqrt(D) - 2|c|, sqrt(D))
        const mpz_class r = isqrt(d);
        mpz_class t = r + f.b, rem;
        mpz_fdiv_r(rem.get_mpz_t(), t.get_mpz_t(), mod.get_mpz_t());
        bp = r - rem;
    }
    const mpz_class s = (bp + f.b) / (2 * f.c);
    const Mat2 m{0, -1, 1, s};
    BinaryQuadraticForm g{f.c, bp, (bp * bp - d) / (4 * f.c)};
    return {g, m, f};
}

TransformedForm reduce(const BinaryQuadraticForm& f) {
    require_valid(f.disc());
    TransformedForm out{f, Mat2::identity(), f};
    while (!is_reduced(out.form)) {
        const TransformedForm step = rho(out.form);
        out.form = step.form;
        out.transform = out.transform * step.transform;
    }
    return out;
}

std::vector<BinaryQuadraticForm> cycle(const BinaryQuadraticForm& f) {
    if (!is_reduced(f)) throw InvalidInput("cycle: form " + to_string(f) + " is not reduced");
    std::vector<BinaryQuadraticForm> out{f};
    for (BinaryQuadraticForm g = rho(f).form; !(g == f); g = rho(g).form) out.push_back(g);
    return out;
}

std::optional<Mat2> proper_equivalence(const BinaryQuadraticForm& f, const BinaryQuadraticForm& g) {
    if (f.disc() != g.disc()) throw InvalidInput("discriminant mismatch");
    const TransformedForm rf = reduce(f);
    const TransformedForm rg = reduce(g);
    BinaryQuadraticForm cur = rf.form;
    Mat2 walk = Mat2::identity();
    while (!(cur == rg.form)) {
        const TransformedForm step = rho(cur);
        cur = step.form;
        walk = walk * step.transform;
        if (cur == rf.form) return std::nullopt;
    }
    return rf.transform * walk * rg.transform.inverse();
}

bool is_properly_equivalent(const BinaryQuadraticForm& f, const BinaryQuadraticForm& g) {
    return proper_equivalence(f, g).has_value();
}

PellSolution pell_minimal(const mpz_class& d) {
    require_valid(d);
    const bool odd = d % 4 == 1;
    // continued fraction of (P + sqrt(N)) / Q
    const mpz_class n = odd ? d : d / 4;
    const mpz_class r = isqrt(n);
    mpz_class P = odd ? 1 : 0;
    mpz_class Q = odd ? 2 : 1;
    mpz_class p_prev = 1, p_prev2 = 0, q_prev = 0, q_prev2 = 1;
    while (true) {
        mpz_class a, num = P + r;
        if (Q > 0) {
            mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), Q.get_mpz_t());
        } else {
            mpz_class aq = -Q;
            mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), aq.get_mpz_t());
            a = -a - 1;
        }
        const mpz_class p = a * p_prev + p_prev2;
        const mpz_class q = a * q_prev + q_prev2;
        if (odd) {
            const mpz_class t = 2 * p - q;
            if (q > 0 && t > 0 && t * t - d * q * q == 4) return {t, q};
        } else if (q > 0 && p * p - n * q * q == 1) {
            return {2 * p, q};
        }
        p_prev2 = p_prev;
        p_prev = p;
        q_prev2 = q_prev;
        q_prev = q;
        P = a * Q - P;
        Q = (n - P * P) / Q;
    }
}

Automorph fundamental_automorph(const BinaryQuadraticForm& f) {
    const mpz_class d = f.disc();
    const PellSolution s = pell_minimal(d);
    const Mat2 m{(s.t - f.b * s.u) / 2, -f.c * s.u, f.a * s.u, (s.t + f.b * s.u) / 2};
    return {m, 1};
}

std::optional<Automorph> improper_automorph(const BinaryQuadraticForm& f) {
    const auto w = proper_equivalence(opposite(f), f);
    if (!w) return std::nullopt;
    const Mat2 flip{1, 0, 0, -1};
    return Automorph{flip * *w, -1};
}

std::size_t ClassGroupData::class_of(const BinaryQuadraticForm& f) const {
    const BinaryQuadraticForm r = reduce(f).form;
    for (std::size_t i = 0; i < cycles.size(); ++i)
        if (std::find(cycles[i].begin(), cycles[i].end(), r) != cycles[i].end()) return i;
    throw InvalidInput("form " + to_string(f) + " has discriminant " + f.disc().get_str() + ", expected " + D.get_str());
}

ClassGroupData proper_classes(const mpz_class& d, bool with_genera, const Limits& limits) {
    require_valid(d);
    const mpz_class r = isqrt(d);
    std::vector<BinaryQuadraticForm> reduced;
    for (mpz_class b = 1; b <= r; ++b) {
        if ((b * b - d) % 4 != 0) continue;
        const mpz_class n = (d - b * b) / 4;  // -ac
        for (mpz_class m = 1; m <= r; ++m) {
            if (n % m != 0) continue;
            const BinaryQuadraticForm pos{m, b, -n / m};
            if (is_reduced(pos)) {
                reduced.push_back(pos);
                reduced.push_back({-m, b, n / m});
            }
        }
    }
    std::sort(reduced.begin(), reduced.end());

    ClassGroupData data;
    data.D = d;
    std::map<BinaryQuadraticForm, std::size_t> owner;
    for (const auto& f : reduced) {
        if (owner.count(f)) continue;
        auto cyc = cycle(f);
        for (const auto& g : cyc) owner.emplace(g, data.cycles.size());
        data.cycles.push_back(std::move(cyc));
    }
    data.h = data.cycles.size();
    for (std::size_t i = 0; i < data.h; ++i) {
        const std::size_t j = owner.at(reduce(opposite(data.representative(i))).form);
        data.opposite_of.push_back(j);
        if (j == i) data.ambiguous_indices.push_back(i);
    }
    if (with_genera) data.genus_partition = genus_partition(data, limits);
    return data;
}

std::size_t class_number(const mpz_class& d) { return proper_classes(d, false).h; }

std::size_t improper_class_count(const ClassGroupData& data) {
    return (data.h + data.ambiguous_indices.size()) / 2;
}

std::size_t improper_class_count(const mpz_class& d) { return improper_class_count(proper_classes(d, false)); }

std::vector<std::vector<std::size_t>> genus_partition(const ClassGroupData& data, const Limits& limits) {
    std::vector<FiniteQuadraticForm> forms;
    for (std::size_t i = 0; i < data.h; ++i) forms.push_back(discriminant_form(form_to_lattice(data.representative(i))));
    std::vector<std::vector<std::size_t>> genera;
    for (std::size_t i = 0; i < data.h; ++i) {
        bool placed = false;
        for (auto& g : genera)
            if (are_isometric(forms[g.front()], forms[i], limits)) {
                g.push_back(i);
                placed = true;
                break;
            }
        if (!placed) genera.push_back({i});
    }
    if (data.D % 4 == 1 && is_fundamental_discriminant(data.D)) {
        const std::size_t expected = std::size_t{1} << (distinct_prime_factors(data.D) - 1);
        if (genera.size() != expected)
            throw InvariantViolation("D=" + data.D.get_str() + ": " + std::to_string(genera.size()) +
                                     " genera, expected " + std::to_string(expected));
        for (const auto& g : genera)
            if (g.size() != genera.front().size())
                throw InvariantViolation("D=" + data.D.get_str() + ": genera of unequal size");
    }
    return genera;
}

std::size_t distinct_prime_factors(mpz_class n) {
    if (n < 0) n = -n;
    std::size_t count = 0;
    for (mpz_class p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        ++count;
        while (n % p == 0) n /= p;
    }
    if (n > 1) ++count;
    return count;
}

}  // namespace k3fm
