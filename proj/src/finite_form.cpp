#include "k3fm/finite_form.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <utility>

#include "k3fm/errors.hpp"

namespace k3fm {

namespace {

mpq_class reduce_mod(const mpq_class& r, long modulus) {
    // r - modulus * floor(r / modulus)
    mpz_class num = r.get_num();
    mpz_class den = r.get_den() * modulus;
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    mpq_class out = r - mpq_class(fl * modulus);
    out.canonicalize();
    return out;
}

std::int64_t to_i64(const mpz_class& z) {
    if (!z.fits_slong_p()) throw CapExceeded("finite group too large");
    return z.get_si();
}

std::int64_t pos_mod(__int128 v, std::int64_t m) {
    __int128 r = v % m;
    if (r < 0) r += m;
    return static_cast<std::int64_t>(r);
}

std::vector<std::int64_t> orders64(const FiniteQuadraticForm& f) {
    std::vector<std::int64_t> out;
    out.reserve(f.num_generators());
    for (const auto& d : f.orders()) out.push_back(to_i64(d));
    return out;
}

std::string key_of(const FiniteFormMap& f) {
    std::string key;
    for (const auto& img : f.images) {
        for (auto c : img) {
            key += std::to_string(c);
            key += ',';
        }
        key += ';';
    }
    return key;
}

// Union-find over element indices.
class Partition {
public:
    explicit Partition(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

// Enumerates signed isometries A -> B by backtracking over generator images.
class IsometrySearch {
public:
    IsometrySearch(const std::shared_ptr<const FiniteQuadraticForm>& a,
                   const std::shared_ptr<const FiniteQuadraticForm>& b, int sign, const Limits& limits)
        : a_(a, limits), b_(b, limits), sign_(sign) {
        if (sign != 1 && sign != -1) throw InvalidInput("sign must be +1 or -1");
        den_ = std::lcm(a_.denominator(), b_.denominator());
        const std::int64_t sa = den_ / a_.denominator();
        const std::int64_t sb = den_ / b_.denominator();
        const std::size_t k = a_.num_generators();

        std::vector<std::int64_t> qb(b_.size()), ordb(b_.size());
        elements_.reserve(b_.size());
        for (std::size_t y = 0; y < b_.size(); ++y) {
            elements_.push_back(b_.element(y));
            qb[y] = pos_mod(static_cast<__int128>(b_.q_num(elements_[y])) * sb, 2 * den_);
            ordb[y] = b_.element_order(elements_[y]);
        }
        candidates_.resize(k);
        target_b_.assign(k, std::vector<std::int64_t>(k, 0));
        for (std::size_t i = 0; i < k; ++i) {
            const Element gi = a_.generator(i);
            const std::int64_t want = pos_mod(static_cast<__int128>(a_.q_num(gi)) * sa * sign_, 2 * den_);
            const std::int64_t di = a_.orders()[i];
            for (std::size_t y = 0; y < b_.size(); ++y)
                if (qb[y] == want && di % ordb[y] == 0) candidates_[i].push_back(y);
            for (std::size_t j = 0; j < i; ++j)
                target_b_[i][j] =
                    pos_mod(static_cast<__int128>(a_.b_num(gi, a_.generator(j))) * sa * sign_, den_);
        }
        sb_ = sb;
    }

    // Visits maps in lexicographic order; the visitor returns false to stop.
    template <class Visit>
    void run(Visit&& visit) {
        if (a_.size() != b_.size()) return;
        std::vector<std::size_t> chosen;
        recurse(chosen, visit);
    }

    FiniteFormMap make_map(const std::vector<std::size_t>& chosen) const {
        FiniteFormMap f{a_.form_ptr(), b_.form_ptr(), {}, sign_};
        for (auto y : chosen) f.images.push_back(elements_[y]);
        return f;
    }

private:
    template <class Visit>
    bool recurse(std::vector<std::size_t>& chosen, Visit& visit) {
        const std::size_t i = chosen.size();
        if (i == a_.num_generators()) {
            if (!generates(chosen)) return true;
            return visit(make_map(chosen));
        }
        for (auto y : candidates_[i]) {
            bool ok = true;
            for (std::size_t j = 0; j < i && ok; ++j) {
                const std::int64_t bv =
                    pos_mod(static_cast<__int128>(b_.b_num(elements_[y], elements_[chosen[j]])) * sb_, den_);
                ok = bv == target_b_[i][j];
            }
            if (!ok) continue;
            chosen.push_back(y);
            const bool more = recurse(chosen, visit);
            chosen.pop_back();
            if (!more) return false;
        }
        return true;
    }

    bool generates(const std::vector<std::size_t>& chosen) const {
        std::vector<char> seen(b_.size(), 0);
        std::vector<std::size_t> queue{0};
        seen[0] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const Element x = elements_[queue[head]];
            for (auto g : chosen) {
                const std::size_t z = b_.index(b_.add(x, elements_[g]));
                if (!seen[z]) {
                    seen[z] = 1;
                    queue.push_back(z);
                }
            }
        }
        return queue.size() == b_.size();
    }

    EnumeratedForm a_;
    EnumeratedForm b_;
    int sign_;
    std::int64_t den_ = 1;
    std::int64_t sb_ = 1;
    std::vector<Element> elements_;
    std::vector<std::vector<std::size_t>> candidates_;
    std::vector<std::vector<std::int64_t>> target_b_;
};

}  // namespace

mpq_class mod2(const mpq_class& r) { return reduce_mod(r, 2); }
mpq_class mod1(const mpq_class& r) { return reduce_mod(r, 1); }

FiniteQuadraticForm::FiniteQuadraticForm(std::vector<mpz_class> orders, std::vector<mpq_class> q, RatMatrix b)
    : orders_(std::move(orders)), q_(std::move(q)), b_(std::move(b)) {
    const std::size_t k = orders_.size();
    if (q_.size() != k || b_.rows() != k || b_.cols() != k)
        throw InvalidInput("finite form: orders, q and b sizes disagree");
    for (auto& d : orders_)
        if (d <= 1) throw InvalidInput("finite form: generator orders must exceed 1");
    for (auto& v : q_) v = mod2(v);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) b_(i, j) = mod1(b_(i, j));
    for (std::size_t i = 0; i < k; ++i) {
        if (mod1(q_[i]) != b_(i, i)) throw InvalidInput("finite form: b(g,g) must equal q(g) mod Z");
        if (mod2(mpq_class(orders_[i] * orders_[i]) * q_[i]) != 0)
            throw InvalidInput("finite form: d^2 q(g) must vanish mod 2Z");
        for (std::size_t j = 0; j < k; ++j) {
            if (b_(i, j) != b_(j, i)) throw InvalidInput("finite form: b must be symmetric");
            if (mod1(mpq_class(orders_[i]) * b_(i, j)) != 0)
                throw InvalidInput("finite form: d_i b(g_i,g_j) must vanish mod Z");
        }
    }
}

FiniteQuadraticForm FiniteQuadraticForm::cyclic(long n, const mpq_class& q) {
    if (n == 1) return {};
    RatMatrix b(1, 1);
    b(0, 0) = q;
    return FiniteQuadraticForm({mpz_class(n)}, {q}, std::move(b));
}

mpz_class FiniteQuadraticForm::order() const {
    mpz_class n = 1;
    for (const auto& d : orders_) n *= d;
    return n;
}

mpq_class FiniteQuadraticForm::q(const Element& x) const {
    if (x.size() != orders_.size()) throw InvalidInput("coefficient vector length mismatch");
    mpq_class s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const mpq_class ci(x[i]);
        s += ci * ci * q_[i];
        for (std::size_t j = i + 1; j < x.size(); ++j) s += 2 * ci * mpq_class(x[j]) * b_(i, j);
    }
    return mod2(s);
}

mpq_class FiniteQuadraticForm::b(const Element& x, const Element& y) const {
    if (x.size() != orders_.size() || y.size() != orders_.size())
        throw InvalidInput("coefficient vector length mismatch");
    mpq_class s = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) s += mpq_class(x[i]) * mpq_class(y[j]) * b_(i, j);
    return mod1(s);
}

FiniteQuadraticForm FiniteQuadraticForm::negated() const {
    std::vector<mpq_class> q;
    for (const auto& v : q_) q.push_back(-v);
    return FiniteQuadraticForm(orders_, std::move(q), -b_);
}

mpq_class evaluate_q(const FiniteQuadraticForm& a, const Element& x) { return a.q(x); }

EnumeratedForm::EnumeratedForm(std::shared_ptr<const FiniteQuadraticForm> form, const Limits& limits)
    : form_(std::move(form)) {
    if (form_->order() > mpz_class(static_cast<unsigned long>(limits.max_group_order)))
        throw CapExceeded("finite group too large (|A| = " + form_->order().get_str() + ", cap " +
                          std::to_string(limits.max_group_order) + ")");
    orders_ = orders64(*form_);
    for (auto d : orders_) size_ *= static_cast<std::size_t>(d);
    const std::size_t k = orders_.size();
    mpz_class den = 1;
    for (std::size_t i = 0; i < k; ++i) {
        den = lcm(den, form_->q_gens()[i].get_den());
        for (std::size_t j = 0; j < k; ++j) den = lcm(den, form_->b_matrix()(i, j).get_den());
    }
    den_ = to_i64(den);
    for (std::size_t i = 0; i < k; ++i) {
        qn_.push_back(to_i64(mpz_class(form_->q_gens()[i] * den)));
        bn_.emplace_back();
        for (std::size_t j = 0; j < k; ++j) bn_.back().push_back(to_i64(mpz_class(form_->b_matrix()(i, j) * den)));
    }
}

Element EnumeratedForm::element(std::size_t index) const {
    Element x(orders_.size());
    for (std::size_t i = orders_.size(); i-- > 0;) {
        x[i] = static_cast<std::int64_t>(index % static_cast<std::size_t>(orders_[i]));
        index /= static_cast<std::size_t>(orders_[i]);
    }
    return x;
}

std::size_t EnumeratedForm::index(const Element& x) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < orders_.size(); ++i)
        idx = idx * static_cast<std::size_t>(orders_[i]) + static_cast<std::size_t>(pos_mod(x[i], orders_[i]));
    return idx;
}

Element EnumeratedForm::normalize(Element x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = pos_mod(x[i], orders_[i]);
    return x;
}

Element EnumeratedForm::add(const Element& x, const Element& y) const {
    Element z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = pos_mod(static_cast<__int128>(x[i]) + y[i], orders_[i]);
    return z;
}

Element EnumeratedForm::scale(const Element& x, std::int64_t k) const {
    Element z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = pos_mod(static_cast<__int128>(x[i]) * k, orders_[i]);
    return z;
}

Element EnumeratedForm::generator(std::size_t i) const {
    Element g(orders_.size(), 0);
    g[i] = 1;
    return g;
}

std::int64_t EnumeratedForm::q_num(const Element& x) const {
    const std::int64_t m = 2 * den_;
    __int128 s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const __int128 xi = x[i];
        s = (s + pos_mod(xi * xi % m * qn_[i], m)) % m;
        for (std::size_t j = i + 1; j < x.size(); ++j) s = (s + pos_mod(2 * xi * x[j] % m * bn_[i][j], m)) % m;
    }
    return pos_mod(s, m);
}

std::int64_t EnumeratedForm::b_num(const Element& x, const Element& y) const {
    __int128 s = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j)
            s = (s + pos_mod(static_cast<__int128>(x[i]) * y[j] % den_ * bn_[i][j], den_)) % den_;
    return pos_mod(s, den_);
}

std::int64_t EnumeratedForm::element_order(const Element& x) const {
    std::int64_t ord = 1;
    for (std::size_t i = 0; i < x.size(); ++i) ord = std::lcm(ord, orders_[i] / std::gcd(orders_[i], pos_mod(x[i], orders_[i])));
    return ord;
}

Element FiniteFormMap::apply(const Element& x) const {
    if (x.size() != images.size()) throw InvalidInput("coefficient vector length mismatch");
    const auto ord = orders64(*target);
    Element y(ord.size(), 0);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < ord.size(); ++j)
            y[j] = pos_mod(static_cast<__int128>(y[j]) + static_cast<__int128>(x[i]) * images[i][j], ord[j]);
    return y;
}

FiniteFormMap compose(const FiniteFormMap& f, const FiniteFormMap& g) {
    if (g.target != f.source && !(*g.target == *f.source)) throw InvalidInput("compose: forms do not match");
    FiniteFormMap h{g.source, f.target, {}, f.sign * g.sign};
    h.images.reserve(g.images.size());
    for (const auto& img : g.images) h.images.push_back(f.apply(img));
    return h;
}

FiniteFormMap identity_map(const std::shared_ptr<const FiniteQuadraticForm>& a) {
    FiniteFormMap f{a, a, {}, 1};
    for (std::size_t i = 0; i < a->num_generators(); ++i) {
        Element g(a->num_generators(), 0);
        g[i] = 1;
        f.images.push_back(std::move(g));
    }
    return f;
}

FiniteFormMap negation_map(const std::shared_ptr<const FiniteQuadraticForm>& a) {
    FiniteFormMap f = identity_map(a);
    const auto ord = orders64(*a);
    for (std::size_t i = 0; i < f.images.size(); ++i) f.images[i][i] = pos_mod(-1, ord[i]);
    return f;
}

FiniteFormMap inverse(const FiniteFormMap& f, const Limits& limits) {
    const EnumeratedForm src(f.source, limits);
    const EnumeratedForm dst(f.target, limits);
    if (src.size() != dst.size()) throw InvalidInput("inverse: map is not bijective");
    std::vector<std::size_t> back(dst.size(), src.size());
    for (std::size_t x = 0; x < src.size(); ++x) {
        const std::size_t y = dst.index(f.apply(src.element(x)));
        if (back[y] != src.size()) throw InvalidInput("inverse: map is not bijective");
        back[y] = x;
    }
    FiniteFormMap g{f.target, f.source, {}, f.sign};
    for (std::size_t i = 0; i < dst.num_generators(); ++i) g.images.push_back(src.element(back[dst.index(dst.generator(i))]));
    return g;
}

bool is_signed_isometry(const FiniteFormMap& f, const Limits& limits) {
    const EnumeratedForm src(f.source, limits);
    const EnumeratedForm dst(f.target, limits);
    if (src.size() != dst.size() || f.images.size() != src.num_generators()) return false;
    for (std::size_t i = 0; i < f.images.size(); ++i) {
        if (f.images[i].size() != dst.num_generators()) return false;
        if (src.orders()[i] % dst.element_order(f.images[i]) != 0) return false;
    }
    std::vector<char> hit(dst.size(), 0);
    for (std::size_t x = 0; x < src.size(); ++x) {
        const Element ex = src.element(x);
        const Element fx = f.apply(ex);
        const std::size_t y = dst.index(fx);
        if (hit[y]) return false;
        hit[y] = 1;
        if (f.target->q(fx) != mod2(f.sign * f.source->q(ex))) return false;
    }
    return true;
}

std::vector<FiniteFormMap> isometries_signed(const std::shared_ptr<const FiniteQuadraticForm>& a,
                                             const std::shared_ptr<const FiniteQuadraticForm>& b, int sign,
                                             const Limits& limits) {
    std::vector<FiniteFormMap> out;
    if (a->order() != b->order()) return out;
    IsometrySearch search(a, b, sign, limits);
    search.run([&out](FiniteFormMap f) {
        out.push_back(std::move(f));
        return true;
    });
    return out;
}

std::vector<FiniteFormMap> isometries_signed(const FiniteQuadraticForm& a, const FiniteQuadraticForm& b, int sign,
                                             const Limits& limits) {
    return isometries_signed(std::make_shared<const FiniteQuadraticForm>(a),
                             std::make_shared<const FiniteQuadraticForm>(b), sign, limits);
}

std::optional<FiniteFormMap> first_isometry(const std::shared_ptr<const FiniteQuadraticForm>& a,
                                            const std::shared_ptr<const FiniteQuadraticForm>& b, int sign,
                                            const Limits& limits) {
    std::optional<FiniteFormMap> out;
    if (a->order() != b->order()) return out;
    IsometrySearch search(a, b, sign, limits);
    search.run([&out](FiniteFormMap f) {
        out = std::move(f);
        return false;
    });
    return out;
}

bool are_isometric(const FiniteQuadraticForm& a, const FiniteQuadraticForm& b, const Limits& limits) {
    return first_isometry(std::make_shared<const FiniteQuadraticForm>(a),
                          std::make_shared<const FiniteQuadraticForm>(b), 1, limits)
        .has_value();
}

FiniteOrthogonalGroup::FiniteOrthogonalGroup(std::shared_ptr<const FiniteQuadraticForm> form, const Limits& limits)
    : form_(std::move(form)) {
    elements_ = isometries_signed(form_, form_, 1, limits);
    for (std::size_t i = 0; i < elements_.size(); ++i) index_.emplace(key_of(elements_[i]), i);
}

std::optional<std::size_t> FiniteOrthogonalGroup::find(const FiniteFormMap& f) const {
    if (f.sign != 1) return std::nullopt;
    const auto it = index_.find(key_of(f));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

FiniteOrthogonalGroup orthogonal_group(const FiniteQuadraticForm& a, const Limits& limits) {
    return FiniteOrthogonalGroup(a, limits);
}

std::vector<std::size_t> subgroup_generated(const FiniteOrthogonalGroup& o, const std::vector<FiniteFormMap>& gens) {
    for (const auto& g : gens)
        if (!o.find(g)) throw InvalidInput("subgroup generator is not in the orthogonal group");
    std::vector<char> seen(o.size(), 0);
    const std::size_t id = *o.find(o.identity());
    std::vector<std::size_t> members{id};
    seen[id] = 1;
    for (std::size_t head = 0; head < members.size(); ++head) {
        const FiniteFormMap& x = o.elements()[members[head]];
        for (const auto& g : gens) {
            const std::size_t y = *o.find(compose(g, x));
            if (!seen[y]) {
                seen[y] = 1;
                members.push_back(y);
            }
        }
    }
    std::sort(members.begin(), members.end());
    return members;
}

std::vector<std::vector<std::size_t>> double_cosets(const FiniteOrthogonalGroup& o,
                                                    const std::vector<FiniteFormMap>& h_gens,
                                                    const std::vector<FiniteFormMap>& k_gens) {
    for (const auto& g : h_gens)
        if (!o.find(g)) throw InvalidInput("left generator is not in the orthogonal group");
    for (const auto& g : k_gens)
        if (!o.find(g)) throw InvalidInput("right generator is not in the orthogonal group");
    // <H> x <K> orbits coincide with orbits of the generators acting on both sides
    Partition part(o.size());
    for (std::size_t x = 0; x < o.size(); ++x) {
        const FiniteFormMap& ex = o.elements()[x];
        for (const auto& h : h_gens) part.unite(x, *o.find(compose(h, ex)));
        for (const auto& k : k_gens) part.unite(x, *o.find(compose(ex, k)));
    }
    std::vector<std::vector<std::size_t>> orbits;
    std::vector<std::size_t> slot(o.size(), o.size());
    for (std::size_t x = 0; x < o.size(); ++x) {
        const std::size_t r = part.find(x);
        if (slot[r] == o.size()) {
            slot[r] = orbits.size();
            orbits.emplace_back();
        }
        orbits[slot[r]].push_back(x);
    }
    return orbits;
}

std::size_t double_coset_count(const FiniteOrthogonalGroup& o, const std::vector<FiniteFormMap>& h_gens,
                               const std::vector<FiniteFormMap>& k_gens) {
    return double_cosets(o, h_gens, k_gens).size();
}

FiniteFormMap conjugate(const FiniteFormMap& f, const FiniteFormMap& c, const Limits& limits) {
    return compose(compose(c, f), inverse(c, limits));
}

std::string to_string(const mpq_class& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_string(const Element& x) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
    os << ')';
    return os.str();
}

}  // namespace k3fm
