#include "k3fm/parallel.hpp"

#include <exception>

namespace k3fm::parallel {

namespace {

template <class Out, class Fn>
std::vector<Out> ordered_map(const std::vector<long>& in, Fn fn) {
    std::vector<Out> out(in.size());
    std::vector<std::exception_ptr> errors(in.size());
    const long n = static_cast<long>(in.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        try {
            out[i] = fn(in[i]);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace

std::vector<TableRow> fm_table(const std::vector<long>& primes, const Limits& limits) {
    return ordered_map<TableRow>(primes, [&](long p) { return table_row(p, limits); });
}

ScanReport gauss_scan(long bound, const Limits& limits) {
    const auto primes = scan_primes(bound);
    const auto rows = parallel::fm_table(primes, limits);
    std::vector<std::pair<long, std::size_t>> pairs;
    pairs.reserve(rows.size());
    for (const auto& r : rows) pairs.emplace_back(r.p, r.fm);
    return summarize_scan(std::move(pairs));
}

std::vector<std::size_t> class_numbers(const std::vector<long>& discriminants) {
    return ordered_map<std::size_t>(discriminants, [](long d) { return class_number(mpz_class(d)); });
}

}  // namespace k3fm::parallel
