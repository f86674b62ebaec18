#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "k3fm/fm_count.hpp"
#include "k3fm/lattice.hpp"

namespace k3fm {

// {"name": "...", "gram": [[...], ...]} with JSON integers or decimal strings as entries.
// Throws InvalidInput naming the first violated constraint.
IntegerLattice parse_lattice(const nlohmann::json& j);
IntegerLattice parse_lattice_file(const std::string& path);
nlohmann::json read_json_file(const std::string& path);

IntMatrix parse_int_matrix(const nlohmann::json& j, const std::string& what);
mpz_class parse_integer(const nlohmann::json& j);
mpq_class parse_rational(const nlohmann::json& j);

// Hodge group generator, either as an isometry of T
//   {"transcendental": [[...]], "isometry": [[...]]}
// or as an explicit action on A_T
//   {"orders": [...], "q": [...], "b": [[...]], "images": [[...], ...]}.
// An "order" key, when present, must agree with the order argument.
HodgeGroupSpec parse_hodge_action(const nlohmann::json& j, long order, const Limits& limits = {});

nlohmann::json to_json(const IntMatrix& m);

}  // namespace k3fm
