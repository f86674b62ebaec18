// Serial vs parallel timings for the table and the prime scan.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "k3fm/fm_count.hpp"
#include "k3fm/parallel.hpp"

using namespace k3fm;

namespace {

bool same_rows(const std::vector<TableRow>& a, const std::vector<TableRow>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].p != b[i].p || a[i].h != b[i].h || a[i].fm != b[i].fm) return false;
    return true;
}

double seconds(const std::function<void()>& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    const long bound = argc > 1 ? std::atol(argv[1]) : 3000;

    std::vector<TableRow> a, b;
    const double t_serial = seconds([&] { a = fm_table(default_table_primes()); });
    const double t_par = seconds([&] { b = parallel::fm_table(default_table_primes()); });
    std::printf("table (14 primes)   serial %8.3f s   parallel %8.3f s   equal=%s\n", t_serial, t_par,
                same_rows(a, b) ? "yes" : "no");

    ScanReport sa, sb;
    const double s_serial = seconds([&] { sa = gauss_scan(bound); });
    const double s_par = seconds([&] { sb = parallel::gauss_scan(bound); });
    std::printf("scan (p <= %ld)    serial %8.3f s   parallel %8.3f s   equal=%s\n", bound, s_serial, s_par,
                sa.rows == sb.rows ? "yes" : "no");
    return same_rows(a, b) && sa.rows == sb.rows ? 0 : 1;
}
