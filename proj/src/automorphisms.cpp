#include "k3fm/automorphisms.hpp"

#include "k3fm/bqf.hpp"
#include "k3fm/errors.hpp"

namespace k3fm {

namespace {

struct Vec2 {
    mpz_class x, y;
};

// Vectors v with v^T G v = norm for positive definite rank-2 G.
std::vector<Vec2> vectors_of_norm(const IntMatrix& g, const mpz_class& norm) {
    const mpz_class det = g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1);
    const mpz_class bx = isqrt(norm * g(1, 1) / det) + 1;
    const mpz_class by = isqrt(norm * g(0, 0) / det) + 1;
    std::vector<Vec2> out;
    for (mpz_class x = -bx; x <= bx; ++x)
        for (mpz_class y = -by; y <= by; ++y)
            if (g(0, 0) * x * x + 2 * g(0, 1) * x * y + g(1, 1) * y * y == norm) out.push_back({x, y});
    return out;
}

}  // namespace

bool is_isometry(const IntegerLattice& l, const IntMatrix& h) {
    if (h.rows() != l.rank() || h.cols() != l.rank()) return false;
    return h.transpose() * l.gram() * h == l.gram();
}

std::vector<IntMatrix> definite_isometries(const IntegerLattice& l) {
    const Signature sig = signature(l);
    if (sig.n_plus != 0 && sig.n_minus != 0) throw InvalidInput("definite lattice required");
    IntMatrix g = sig.n_plus ? l.gram() : -l.gram();
    std::vector<IntMatrix> out;
    if (l.rank() == 1) {
        out.push_back(IntMatrix{{1}});
        out.push_back(IntMatrix{{-1}});
        return out;
    }
    if (l.rank() != 2) throw Unsupported("isometry enumeration is limited to rank <= 2");
    const auto first = vectors_of_norm(g, g(0, 0));
    const auto second = vectors_of_norm(g, g(1, 1));
    for (const auto& u : first)
        for (const auto& v : second) {
            const mpz_class pair = g(0, 0) * u.x * v.x + g(0, 1) * (u.x * v.y + u.y * v.x) + g(1, 1) * u.y * v.y;
            if (pair != g(0, 1)) continue;
            IntMatrix h(2, 2);
            h(0, 0) = u.x;
            h(1, 0) = u.y;
            h(0, 1) = v.x;
            h(1, 1) = v.y;
            out.push_back(std::move(h));
        }
    return out;
}

std::vector<IntMatrix> isometry_generators(const IntegerLattice& l) {
    if (l.rank() == 1) return {IntMatrix{{-1}}};
    if (l.rank() == 2) {
        const Signature sig = signature(l);
        if (sig.n_plus == 0 || sig.n_minus == 0) return definite_isometries(l);
        const BinaryQuadraticForm f = lattice_to_form(l);
        std::vector<IntMatrix> gens{-IntMatrix::identity(2), fundamental_automorph(f).matrix.to_matrix()};
        if (const auto imp = improper_automorph(f)) gens.push_back(imp->matrix.to_matrix());
        return gens;
    }
    throw Unsupported("isometry generators are only computed for rank <= 2");
}

}  // namespace k3fm
