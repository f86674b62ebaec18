#include "k3fm/matrix.hpp"

#include <stdexcept>
#include <utility>

namespace k3fm {

RatMatrix to_rational(const IntMatrix& m) {
    RatMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
    return r;
}

mpz_class determinant(const IntMatrix& m) {
    if (!m.square()) throw std::invalid_argument("determinant of a non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) return 1;
    IntMatrix a = m;
    mpz_class prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && a(p, k) == 0) ++p;
            if (p == n) return 0;
            a.swap_rows(k, p);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                mpz_class v = a(i, j) * a(k, k) - a(i, k) * a(k, j);
                mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
                a(i, j) = v;
            }
            a(i, k) = 0;
        }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

RatMatrix inverse(const RatMatrix& m) {
    if (!m.square()) throw std::invalid_argument("inverse of a non-square matrix");
    const std::size_t n = m.rows();
    RatMatrix a = m;
    RatMatrix inv = RatMatrix::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a(p, c) == 0) ++p;
        if (p == n) throw std::domain_error("singular matrix");
        a.swap_rows(c, p);
        inv.swap_rows(c, p);
        const mpq_class pivot = a(c, c);
        for (std::size_t j = 0; j < n; ++j) {
            a(c, j) /= pivot;
            inv(c, j) /= pivot;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a(i, c) == 0) continue;
            const mpq_class f = -a(i, c);
            a.add_row(i, c, f);
            inv.add_row(i, c, f);
        }
    }
    return inv;
}

IntMatrix block_diagonal(const IntMatrix& a, const IntMatrix& b) {
    IntMatrix m(a.rows() + b.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) m(a.rows() + i, a.cols() + j) = b(i, j);
    return m;
}

IntMatrix hermite_normal_form(const IntMatrix& m) {
    IntMatrix a = m;
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    std::size_t r = 0;
    for (std::size_t j = 0; j < cols && r < rows; ++j) {
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (a(i, j) == 0) continue;
            if (a(r, j) == 0) {
                a.swap_rows(r, i);
                continue;
            }
            mpz_class g, s, t;
            mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a(r, j).get_mpz_t(), a(i, j).get_mpz_t());
            const mpz_class x = a(r, j) / g;
            const mpz_class y = a(i, j) / g;
            for (std::size_t k = j; k < cols; ++k) {
                const mpz_class top = a(r, k);
                const mpz_class bottom = a(i, k);
                a(r, k) = s * top + t * bottom;
                a(i, k) = x * bottom - y * top;
            }
        }
        if (a(r, j) == 0) continue;
        if (a(r, j) < 0) a.negate_row(r);
        for (std::size_t k = 0; k < r; ++k) {
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), a(k, j).get_mpz_t(), a(r, j).get_mpz_t());
            if (q != 0) a.add_row(k, r, -q);
        }
        ++r;
    }
    IntMatrix h(r, cols);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < cols; ++j) h(i, j) = a(i, j);
    return h;
}

mpz_class isqrt(const mpz_class& n) {
    if (n < 0) throw std::domain_error("isqrt of a negative number");
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

bool is_square(const mpz_class& n) { return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0; }

}  // namespace k3fm
