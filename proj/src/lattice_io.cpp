#include "k3fm/lattice_io.hpp"

#include <fstream>
#include <memory>
#include <regex>

#include "k3fm/errors.hpp"

namespace k3fm {

mpz_class parse_integer(const nlohmann::json& j) {
    if (j.is_number_integer()) return mpz_class(j.dump());
    if (j.is_string()) {
        static const std::regex integer(R"(\s*[-+]?[0-9]+\s*)");
        const auto& s = j.get_ref<const std::string&>();
        if (!std::regex_match(s, integer)) throw InvalidInput("non-integer entry: " + s);
        std::string digits = s;
        digits.erase(0, digits.find_first_not_of(" \t+"));
        digits.erase(digits.find_last_not_of(" \t") + 1);
        return mpz_class(digits);
    }
    throw InvalidInput("non-integer entry: " + j.dump());
}

mpq_class parse_rational(const nlohmann::json& j) {
    if (j.is_number_integer()) return mpq_class(parse_integer(j));
    if (j.is_string()) {
        static const std::regex rational(R"(\s*[-+]?[0-9]+(/[0-9]+)?\s*)");
        std::string s = j.get<std::string>();
        if (!std::regex_match(s, rational)) throw InvalidInput("non-rational entry: " + s);
        s.erase(0, s.find_first_not_of(" \t+"));
        s.erase(s.find_last_not_of(" \t") + 1);
        mpq_class q(s);
        if (q.get_den() == 0) throw InvalidInput("zero denominator: " + s);
        q.canonicalize();
        return q;
    }
    throw InvalidInput("non-rational entry: " + j.dump());
}

IntMatrix parse_int_matrix(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw InvalidInput(what + " must be a nonempty array of rows");
    const std::size_t rows = j.size();
    if (!j[0].is_array()) throw InvalidInput(what + " must be a nonempty array of rows");
    const std::size_t cols = j[0].size();
    IntMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) throw InvalidInput(what + " rows must have equal length");
        for (std::size_t k = 0; k < cols; ++k) m(i, k) = parse_integer(j[i][k]);
    }
    return m;
}

IntegerLattice parse_lattice(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidInput("lattice file must hold a JSON object");
    if (!j.contains("gram")) throw InvalidInput("missing \"gram\"");
    const auto& g = j["gram"];
    if (!g.is_array() || g.empty()) throw InvalidInput("gram must be a nonempty array of rows");
    for (const auto& row : g)
        if (!row.is_array() || row.size() != g.size()) throw InvalidInput("gram must be square");
    std::string name;
    if (j.contains("name")) {
        if (!j["name"].is_string()) throw InvalidInput("name must be a string");
        name = j["name"].get<std::string>();
    }
    return IntegerLattice(parse_int_matrix(g, "gram"), name);
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

IntegerLattice parse_lattice_file(const std::string& path) { return parse_lattice(read_json_file(path)); }

HodgeGroupSpec parse_hodge_action(const nlohmann::json& j, long order, const Limits& limits) {
    if (!j.is_object()) throw InvalidInput("Hodge action file must hold a JSON object");
    if (j.contains("order")) {
        const mpz_class o = parse_integer(j["order"]);
        if (o != order) throw InvalidInput("Hodge action order disagrees with --hodge-order");
    }
    if (j.contains("isometry")) {
        if (!j.contains("transcendental")) throw InvalidInput("isometry given without \"transcendental\"");
        const IntegerLattice t(parse_int_matrix(j["transcendental"], "transcendental"));
        return HodgeGroupSpec::from_isometry(t, parse_int_matrix(j["isometry"], "isometry"), order, limits);
    }
    for (const char* key : {"orders", "q", "b", "images"})
        if (!j.contains(key)) throw InvalidInput(std::string("Hodge action needs \"") + key + "\"");
    std::vector<mpz_class> orders;
    for (const auto& o : j["orders"]) orders.push_back(parse_integer(o));
    std::vector<mpq_class> q;
    for (const auto& v : j["q"]) q.push_back(parse_rational(v));
    const std::size_t k = orders.size();
    if (q.size() != k || !j["b"].is_array() || j["b"].size() != k)
        throw InvalidInput("Hodge action: orders, q and b sizes differ");
    RatMatrix b(k, k);
    for (std::size_t r = 0; r < k; ++r) {
        if (!j["b"][r].is_array() || j["b"][r].size() != k) throw InvalidInput("Hodge action: b must be square");
        for (std::size_t c = 0; c < k; ++c) b(r, c) = parse_rational(j["b"][r][c]);
    }
    const auto form = std::make_shared<const FiniteQuadraticForm>(orders, q, b);
    FiniteFormMap action{form, form, {}, 1};
    if (!j["images"].is_array() || j["images"].size() != k)
        throw InvalidInput("Hodge action: one image per generator required");
    for (const auto& img : j["images"]) {
        if (!img.is_array() || img.size() != k) throw InvalidInput("Hodge action: image length mismatch");
        Element e;
        for (std::size_t c = 0; c < k; ++c) {
            const mpz_class v = parse_integer(img[c]);
            mpz_class m;
            mpz_fdiv_r(m.get_mpz_t(), v.get_mpz_t(), orders[c].get_mpz_t());
            e.push_back(m.get_si());
        }
        action.images.push_back(std::move(e));
    }
    HodgeGroupSpec spec;
    spec.order = order;
    spec.action = std::move(action);
    spec.validate(limits);
    return spec;
}

nlohmann::json to_json(const IntMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) {
            if (m(i, k).fits_slong_p()) row.push_back(m(i, k).get_si());
            else row.push_back(m(i, k).get_str());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace k3fm
