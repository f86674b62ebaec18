#include <doctest.h>

#include <random>

#include "k3fm/errors.hpp"
#include "k3fm/lattice.hpp"
#include "oracles.hpp"

using namespace k3fm;

namespace {

void check_snf(const IntMatrix& g) {
    const SmithDecomposition s = smith_normal_form(g);
    CHECK(s.U * g * s.V == s.D);
    CHECK(abs(determinant(s.U)) == 1);
    CHECK(abs(determinant(s.V)) == 1);
    const auto d = s.diagonal();
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(d[i] >= 0);
        if (i + 1 < d.size() && d[i] != 0) CHECK(d[i + 1] % d[i] == 0);
    }
    for (std::size_t i = 0; i < s.D.rows(); ++i)
        for (std::size_t j = 0; j < s.D.cols(); ++j)
            if (i != j) CHECK(s.D(i, j) == 0);
    CHECK(d == oracle::invariant_factors(g));
}

}  // namespace

TEST_CASE("smith normal form of small Gram matrices") {
    CHECK(smith_normal_form(IntMatrix{{2}}).diagonal() == std::vector<mpz_class>{2});
    const IntMatrix u{{0, 1}, {1, 0}};
    check_snf(u);
    CHECK(smith_normal_form(u).diagonal() == std::vector<mpz_class>{1, 1});
    const IntMatrix g{{2, 1}, {1, -2}};
    check_snf(g);
    CHECK(smith_normal_form(g).diagonal() == std::vector<mpz_class>{1, 5});
}

TEST_CASE("smith normal form agrees with determinantal divisors on random matrices") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + trial % 4;
        check_snf(oracle::random_matrix(rng, n, n, 6));
    }
    for (int trial = 0; trial < 20; ++trial) check_snf(oracle::random_matrix(rng, 2 + trial % 2, 3, 5));
    const SmithDecomposition e = smith_normal_form(e8().gram());
    for (const auto& d : e.diagonal()) CHECK(d == 1);
}

TEST_CASE("lattice construction rejects malformed Gram matrices") {
    CHECK_THROWS_WITH_AS(IntegerLattice(IntMatrix(2, 3)), "gram must be square", InvalidInput);
    CHECK_THROWS_WITH_AS(IntegerLattice(IntMatrix{{2, 1}, {0, 2}}), "gram must be symmetric", InvalidInput);
    CHECK_THROWS_WITH_AS(IntegerLattice(IntMatrix{{2, 2}, {2, 2}}), "degenerate lattice", InvalidInput);
    CHECK_THROWS_AS(IntegerLattice{IntMatrix{}}, InvalidInput);
    CHECK_THROWS_WITH_AS(signature(IntMatrix{{0, 0}, {0, 1}}), "degenerate lattice", InvalidInput);
}

TEST_CASE("signature") {
    CHECK(signature(hyperbolic_plane()) == Signature{1, 1});
    for (long n = 1; n <= 10; ++n) CHECK(signature(IntMatrix{{2 * n}}) == Signature{1, 0});
    CHECK(signature(IntMatrix{{2, 1}, {1, -2}}) == Signature{1, 1});
    CHECK(signature(IntMatrix{{0, 3, 0}, {3, 0, 0}, {0, 0, 0 - 4}}) == Signature{1, 2});
    CHECK(signature(e8()) == Signature{8, 0});
    CHECK(signature(e8(true)) == Signature{0, 8});

    std::mt19937 rng(11);
    int compared = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const IntMatrix g = oracle::random_symmetric(rng, 1 + trial % 5, 4, false);
        if (determinant(g) == 0) continue;
        const auto [p, m] = oracle::jacobi_signature(g);
        if (p > g.rows()) continue;
        CHECK(signature(g) == Signature{p, m});
        ++compared;
    }
    CHECK(compared > 100);
}

TEST_CASE("signature is additive under direct sums") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const IntMatrix a = oracle::random_symmetric(rng, 1 + trial % 3, 3, true);
        const IntMatrix b = oracle::random_symmetric(rng, 1 + trial % 2, 3, true);
        if (determinant(a) == 0 || determinant(b) == 0) continue;
        const IntegerLattice la(a), lb(b);
        const Signature sa = signature(la), sb = signature(lb), s = signature(direct_sum(la, lb));
        CHECK(s == Signature{sa.n_plus + sb.n_plus, sa.n_minus + sb.n_minus});
    }
}

TEST_CASE("discriminant forms") {
    for (long n = 1; n <= 12; ++n) {
        const FiniteQuadraticForm a = discriminant_form(IntegerLattice(IntMatrix{{2 * n}}));
        REQUIRE(a.num_generators() == 1);
        CHECK(a.orders()[0] == 2 * n);
        CHECK(a.q_gens()[0] == mpq_class(1, 2 * n));
    }
    CHECK(discriminant_form(hyperbolic_plane()).num_generators() == 0);
    CHECK(discriminant_form(hyperbolic_plane()).order() == 1);

    // adj(G)/det for [[2,1],[1,-2]] gives the dual vector e_1* with square 2/5
    const FiniteQuadraticForm a5 = discriminant_form(IntegerLattice(IntMatrix{{2, 1}, {1, -2}}));
    CHECK(a5.orders() == std::vector<mpz_class>{5});
    CHECK(are_isometric(a5, FiniteQuadraticForm::cyclic(5, mpq_class(2, 5))));

    CHECK_THROWS_WITH_AS(discriminant_form(IntegerLattice(IntMatrix{{1}})), "even lattice required", InvalidInput);
}

TEST_CASE("discriminant group order equals |det|") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const IntMatrix g = oracle::random_symmetric(rng, 1 + trial % 3, 4, true);
        if (determinant(g) == 0) continue;
        const IntegerLattice l(g);
        CHECK(discriminant_form(l).order() == abs(l.det()));
    }
}

TEST_CASE("discriminant form of a direct sum is the orthogonal sum") {
    const IntegerLattice a(IntMatrix{{2}}), b(IntMatrix{{2, 1}, {1, -2}});
    const FiniteQuadraticForm fa = discriminant_form(a), fb = discriminant_form(b);
    RatMatrix bm(2, 2);
    bm(0, 0) = fa.b_matrix()(0, 0);
    bm(1, 1) = fb.b_matrix()(0, 0);
    const FiniteQuadraticForm sum({fa.orders()[0], fb.orders()[0]}, {fa.q_gens()[0], fb.q_gens()[0]}, bm);
    CHECK(are_isometric(discriminant_form(direct_sum(a, b)), sum));
}

TEST_CASE("discriminant form does not depend on the chosen basis") {
    const IntMatrix g{{2, 1}, {1, -4}};
    const IntMatrix p{{2, 1}, {1, 1}};  // unimodular change of basis
    const IntegerLattice l1(g), l2(p.transpose() * g * p);
    CHECK(are_isometric(discriminant_form(l1), discriminant_form(l2)));
}

TEST_CASE("induced action of -id is negation") {
    const IntegerLattice l(IntMatrix{{2, 1}, {1, -6}});
    const DiscriminantGroup dg(l);
    const auto a = std::make_shared<const FiniteQuadraticForm>(dg.form());
    CHECK(dg.induced_action(-IntMatrix::identity(2), a) == negation_map(a));
    CHECK(dg.induced_action(IntMatrix::identity(2), a) == identity_map(a));
}

TEST_CASE("min generators") {
    CHECK(min_generators(direct_sum(hyperbolic_plane(), IntegerLattice(IntMatrix{{2}}))) == 1);
    CHECK(min_generators(direct_sum(IntegerLattice(IntMatrix{{2}}), IntegerLattice(IntMatrix{{2}}))) == 2);
    CHECK(min_generators(hyperbolic_plane()) == 0);
    CHECK(min_generators(e8()) == 0);
    CHECK(min_generators(k3_lattice()) == 0);
}

TEST_CASE("direct sums") {
    const IntegerLattice s = direct_sum(IntegerLattice(IntMatrix{{2}}), IntegerLattice(IntMatrix{{-2}}));
    CHECK(s.gram() == IntMatrix{{2, 0}, {0, -2}});
    CHECK(direct_sum(IntegerLattice(IntMatrix{{2}}), hyperbolic_plane()).det() == -2);
    CHECK(determinant(direct_sum(IntegerLattice(IntMatrix{{2}}), hyperbolic_plane()).gram()) == -2);
    CHECK(direct_sum(hyperbolic_plane(), hyperbolic_plane()).rank() == 4);
}

TEST_CASE("E8 and the K3 lattice") {
    const IntegerLattice e = e8();
    CHECK(e.rank() == 8);
    CHECK(e.det() == 1);
    CHECK(e.is_even());
    CHECK(e8(true).gram() == -e.gram());

    const IntegerLattice k3 = k3_lattice();
    CHECK(k3.rank() == 22);
    CHECK(k3.is_even());
    CHECK(signature(k3) == Signature{3, 19});
    CHECK(k3.det() == -1);
}

TEST_CASE("hermite normal form") {
    CHECK(hermite_normal_form(IntMatrix{{2, 0}, {0, 2}, {1, 1}}) == IntMatrix{{1, 1}, {0, 2}});
    CHECK(hermite_normal_form(IntMatrix{{4, 6}, {6, 9}}) == IntMatrix{{2, 3}});
    std::mt19937 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const IntMatrix m = oracle::random_matrix(rng, 4, 3, 5);
        const IntMatrix p{{1, 2, 0, 0}, {0, 1, 0, 0}, {0, 3, 1, 0}, {0, 0, 0, -1}};
        CHECK(hermite_normal_form(m) == hermite_normal_form(p * m));
    }
}

TEST_CASE("integer square roots") {
    for (long n = 0; n < 2000; ++n) {
        const mpz_class r = isqrt(mpz_class(n));
        CHECK(r * r <= n);
        CHECK((r + 1) * (r + 1) > n);
        CHECK(is_square(mpz_class(n)) == (r * r == n));
    }
}
