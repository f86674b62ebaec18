#pragma once

#include <vector>

#include "k3fm/fm_count.hpp"

// OpenMP versions of the prime sweeps. Results are identical to the serial functions in
// fm_count.hpp and come back in input order.
namespace k3fm::parallel {

std::vector<TableRow> fm_table(const std::vector<long>& primes, const Limits& limits = {});
ScanReport gauss_scan(long bound, const Limits& limits = {});
// h(D) for each D.
std::vector<std::size_t> class_numbers(const std::vector<long>& discriminants);

}  // namespace k3fm::parallel
