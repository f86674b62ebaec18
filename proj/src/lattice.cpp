#include "k3fm/lattice.hpp"

#include <utility>

#include "k3fm/errors.hpp"

namespace k3fm {

IntegerLattice::IntegerLattice(IntMatrix gram, std::string name) : gram_(std::move(gram)), name_(std::move(name)) {
    if (gram_.rows() == 0) throw InvalidInput("gram must be nonempty");
    if (!gram_.square()) throw InvalidInput("gram must be square");
    for (std::size_t i = 0; i < gram_.rows(); ++i)
        for (std::size_t j = i + 1; j < gram_.cols(); ++j)
            if (gram_(i, j) != gram_(j, i)) throw InvalidInput("gram must be symmetric");
    det_ = determinant(gram_);
    if (det_ == 0) throw InvalidInput("degenerate lattice");
}

bool IntegerLattice::is_even() const {
    for (std::size_t i = 0; i < rank(); ++i)
        if (mpz_odd_p(gram_(i, i).get_mpz_t())) return false;
    return true;
}

IntegerLattice IntegerLattice::scaled(long k) const {
    IntMatrix g = gram_;
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) *= k;
    return IntegerLattice(std::move(g));
}

std::vector<mpz_class> SmithDecomposition::diagonal() const {
    std::vector<mpz_class> d;
    for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i) d.push_back(D(i, i));
    return d;
}

SmithDecomposition smith_normal_form(const IntMatrix& input) {
    const std::size_t m = input.rows();
    const std::size_t n = input.cols();
    IntMatrix a = input;
    IntMatrix u = IntMatrix::identity(m);
    IntMatrix v = IntMatrix::identity(n);

    for (std::size_t t = 0; t < std::min(m, n); ++t) {
        bool exhausted = false;
        while (true) {
            // smallest nonzero |entry| of the trailing block becomes the pivot
            std::size_t pi = m, pj = n;
            for (std::size_t i = t; i < m; ++i)
                for (std::size_t j = t; j < n; ++j)
                    if (a(i, j) != 0 && (pi == m || abs(a(i, j)) < abs(a(pi, pj)))) {
                        pi = i;
                        pj = j;
                    }
            if (pi == m) {
                exhausted = true;
                break;
            }
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (a(i, t) == 0) continue;
                mpz_class q;
                mpz_tdiv_q(q.get_mpz_t(), a(i, t).get_mpz_t(), a(t, t).get_mpz_t());
                a.add_row(i, t, -q);
                u.add_row(i, t, -q);
                if (a(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (a(t, j) == 0) continue;
                mpz_class q;
                mpz_tdiv_q(q.get_mpz_t(), a(t, j).get_mpz_t(), a(t, t).get_mpz_t());
                a.add_col(j, t, -q);
                v.add_col(j, t, -q);
                if (a(t, j) != 0) clean = false;
            }
            if (!clean) continue;

            bool divisible = true;
            for (std::size_t i = t + 1; i < m && divisible; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (!mpz_divisible_p(a(i, j).get_mpz_t(), a(t, t).get_mpz_t())) {
                        a.add_row(t, i, 1);
                        u.add_row(t, i, 1);
                        divisible = false;
                        break;
                    }
            if (divisible) break;
        }
        if (exhausted) break;
        if (a(t, t) < 0) {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    return {std::move(u), std::move(a), std::move(v)};
}

Signature signature(const IntMatrix& gram) {
    if (!gram.square()) throw InvalidInput("gram must be square");
    const std::size_t n = gram.rows();
    RatMatrix a = to_rational(gram);
    Signature sig;
    auto congruent_swap = [&a](std::size_t i, std::size_t j) {
        a.swap_rows(i, j);
        a.swap_cols(i, j);
    };
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && a(p, p) == 0) ++p;
        if (p < n) {
            congruent_swap(k, p);
        } else {
            // zero diagonal: a hyperbolic pair e_i, e_j becomes (e_i + e_j, e_j)
            std::size_t pi = n, pj = n;
            for (std::size_t i = k; i < n && pi == n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (a(i, j) != 0) {
                        pi = i;
                        pj = j;
                        break;
                    }
            if (pi == n) throw InvalidInput("degenerate lattice");
            a.add_row(pi, pj, 1);
            a.add_col(pi, pj, 1);
            congruent_swap(k, pi);
        }
        const mpq_class pivot = a(k, k);
        (pivot > 0 ? sig.n_plus : sig.n_minus) += 1;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a(i, k) == 0) continue;
            const mpq_class f = -a(i, k) / pivot;
            a.add_row(i, k, f);
            a.add_col(i, k, f);
        }
    }
    return sig;
}

DiscriminantGroup::DiscriminantGroup(const IntegerLattice& lattice) : gram_(lattice.gram()) {
    if (!lattice.is_even()) throw InvalidInput("even lattice required");
    const std::size_t n = lattice.rank();
    const SmithDecomposition snf = smith_normal_form(gram_);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
        if (snf.D(i, i) > 1) idx.push_back(i);

    const std::size_t k = idx.size();
    coord_rows_ = IntMatrix(k, n);
    lifts_ = RatMatrix(k, n);
    for (std::size_t r = 0; r < k; ++r) {
        const mpz_class& d = snf.D(idx[r], idx[r]);
        orders_.push_back(d);
        for (std::size_t j = 0; j < n; ++j) {
            coord_rows_(r, j) = snf.U(idx[r], j);
            lifts_(r, j) = fraction(snf.V(j, idx[r]), d);
        }
    }

    const RatMatrix g = to_rational(gram_);
    const RatMatrix pairings = lifts_ * g * lifts_.transpose();
    std::vector<mpq_class> q(k);
    RatMatrix b(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        q[i] = mod2(pairings(i, i));
        for (std::size_t j = 0; j < k; ++j) b(i, j) = mod1(pairings(i, j));
    }
    form_ = FiniteQuadraticForm(orders_, std::move(q), std::move(b));
}

std::vector<mpq_class> DiscriminantGroup::lift(const Element& x) const {
    if (x.size() != num_generators()) throw InvalidInput("coefficient vector length mismatch");
    std::vector<mpq_class> v(gram_.rows());
    for (std::size_t r = 0; r < x.size(); ++r)
        for (std::size_t j = 0; j < v.size(); ++j) v[j] += mpq_class(x[r]) * lifts_(r, j);
    return v;
}

Element DiscriminantGroup::coordinates(const std::vector<mpq_class>& x) const {
    const std::size_t n = gram_.rows();
    if (x.size() != n) throw InvalidInput("dual vector length mismatch");
    std::vector<mpz_class> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        mpq_class s = 0;
        for (std::size_t j = 0; j < n; ++j) s += mpq_class(gram_(i, j)) * x[j];
        if (s.get_den() != 1) throw InvalidInput("vector is not in the dual lattice");
        y[i] = s.get_num();
    }
    Element c(num_generators());
    for (std::size_t r = 0; r < c.size(); ++r) {
        mpz_class s = 0;
        for (std::size_t j = 0; j < n; ++j) s += coord_rows_(r, j) * y[j];
        mpz_class m;
        mpz_fdiv_r(m.get_mpz_t(), s.get_mpz_t(), orders_[r].get_mpz_t());
        if (!m.fits_slong_p()) throw CapExceeded("finite group too large");
        c[r] = m.get_si();
    }
    return c;
}

FiniteFormMap DiscriminantGroup::induced_action(const IntMatrix& h,
                                                const std::shared_ptr<const FiniteQuadraticForm>& self) const {
    const std::size_t n = gram_.rows();
    if (h.rows() != n || h.cols() != n) throw InvalidInput("isometry has the wrong shape");
    FiniteFormMap f{self, self, {}, 1};
    for (std::size_t r = 0; r < num_generators(); ++r) {
        std::vector<mpq_class> image(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) image[i] += mpq_class(h(i, j)) * lifts_(r, j);
        f.images.push_back(coordinates(image));
    }
    return f;
}

FiniteQuadraticForm discriminant_form(const IntegerLattice& l) { return DiscriminantGroup(l).form(); }

std::size_t min_generators(const IntegerLattice& l) {
    std::size_t count = 0;
    for (const auto& d : smith_normal_form(l.gram()).diagonal())
        if (d > 1) ++count;
    return count;
}

IntegerLattice direct_sum(const IntegerLattice& a, const IntegerLattice& b) {
    return IntegerLattice(block_diagonal(a.gram(), b.gram()));
}

IntegerLattice hyperbolic_plane() { return IntegerLattice(IntMatrix{{0, 1}, {1, 0}}, "U"); }

IntegerLattice e8(bool negative) {
    // chain 0-1-2-3-4-5-6 with node 7 attached to node 4
    IntMatrix g(8, 8);
    const long s = negative ? -1 : 1;
    for (std::size_t i = 0; i < 8; ++i) g(i, i) = 2 * s;
    auto edge = [&](std::size_t i, std::size_t j) { g(i, j) = g(j, i) = -s; };
    for (std::size_t i = 0; i + 1 < 7; ++i) edge(i, i + 1);
    edge(4, 7);
    return IntegerLattice(std::move(g), negative ? "E8(-1)" : "E8");
}

IntegerLattice k3_lattice() {
    const IntegerLattice u = hyperbolic_plane();
    IntegerLattice l = direct_sum(e8(true), e8(true));
    for (int i = 0; i < 3; ++i) l = direct_sum(l, u);
    return IntegerLattice(l.gram(), "K3");
}

}  // namespace k3fm
