#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "k3fm/bqf.hpp"
#include "k3fm/errors.hpp"
#include "k3fm/fm_count.hpp"
#include "k3fm/glue.hpp"
#include "k3fm/lattice_io.hpp"
#include "k3fm/parallel.hpp"

using namespace k3fm;

namespace {

Limits limits_from_env() {
    Limits limits;
    if (const char* cap = std::getenv("K3FM_CAP")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(cap, &end, 10);
        if (end == cap || *end != '\0' || v == 0) throw InvalidInput("K3FM_CAP must be a positive integer");
        limits.max_group_order = v;
    }
    return limits;
}

mpz_class parse_discriminant(const std::string& s) { return parse_integer(nlohmann::json(s)); }

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

void print_form(std::ostream& os, const FiniteQuadraticForm& a) {
    os << "|A| = " << a.order() << "\n";
    if (a.num_generators() == 0) {
        os << "invariant factors: (trivial)\n";
        return;
    }
    std::vector<std::string> d, q;
    for (const auto& x : a.orders()) d.push_back(x.get_str());
    for (const auto& x : a.q_gens()) q.push_back(to_string(x));
    os << "invariant factors: " << join(d, " ") << "\n";
    os << "q: " << join(q, " ") << "\n";
    os << "b: [";
    for (std::size_t i = 0; i < a.num_generators(); ++i) {
        os << (i ? ",[" : "[");
        for (std::size_t j = 0; j < a.num_generators(); ++j) os << (j ? "," : "") << to_string(a.b_matrix()(i, j));
        os << "]";
    }
    os << "]\n";
}

void print_map(std::ostream& os, const FiniteFormMap& f) {
    std::vector<std::string> imgs;
    for (const auto& e : f.images) imgs.push_back(to_string(e));
    os << "g_i -> " << join(imgs, " ");
}

void print_result(const FMCountResult& r) {
    std::cout << "fm=" << r.total << "\n";
    std::cout << "method=" << to_string(r.method) << "\n";
    for (std::size_t j = 0; j < r.breakdown.size(); ++j) {
        const auto& s = r.breakdown[j];
        std::cout << "  S_" << j + 1 << " gram=" << s.representative.gram();
        if (s.form) std::cout << " form=" << *s.form;
        std::cout << " summand=" << s.summand;
        if (s.orthogonal_group_order) std::cout << " |O(A)|=" << s.orthogonal_group_order;
        std::cout << "\n";
    }
}

void print_table(const std::vector<TableRow>& rows, const std::string& format) {
    if (format == "csv") {
        std::cout << "p,h,fm\n";
        for (const auto& r : rows) {
            if (!r.error.empty()) std::cout << r.p << ",error," << r.error << "\n";
            else std::cout << r.p << "," << r.h << "," << r.fm << "\n";
        }
        return;
    }
    std::cout << std::setw(6) << "p" << std::setw(6) << "h" << std::setw(6) << "fm" << "\n";
    for (const auto& r : rows) {
        std::cout << std::setw(6) << r.p;
        if (!r.error.empty()) std::cout << "  error: " << r.error << "\n";
        else std::cout << std::setw(6) << r.h << std::setw(6) << r.fm << "\n";
    }
}

int run(int argc, char** argv) {
    CLI::App app{"Fourier-Mukai numbers of K3 surfaces from lattice data"};
    app.require_subcommand(1);

    std::string lattice_path;
    auto* discform = app.add_subcommand("discform", "discriminant form of an even lattice");
    discform->add_option("lattice", lattice_path, "lattice JSON file")->required();

    std::string fm_lattice, fm_action;
    long fm_rank1 = 0, fm_order = 2;
    auto* fm = app.add_subcommand("fm", "Fourier-Mukai number");
    auto* fm_lat_opt = fm->add_option("--lattice", fm_lattice, "Neron-Severi lattice JSON file");
    auto* fm_rank1_opt = fm->add_option("--rank1", fm_rank1, "NS = <2n>");
    fm_lat_opt->excludes(fm_rank1_opt);
    fm->add_option("--hodge-order", fm_order, "order of the Hodge isometry group");
    fm->add_option("--hodge-action", fm_action, "generator of the Hodge group (JSON)");

    std::string disc_arg;
    auto* classnum = app.add_subcommand("classnum", "number of proper classes of binary forms");
    classnum->add_option("D", disc_arg, "discriminant")->required();
    auto* genus = app.add_subcommand("genus", "cycles, genera and ambiguous classes");
    genus->add_option("D", disc_arg, "discriminant")->required();

    std::vector<long> table_list;
    std::string format = "text";
    auto* table = app.add_subcommand("table", "(p, h(p), |FM|) for primes p = 1 mod 4");
    table->add_option("--list", table_list, "primes")->delimiter(',');
    table->add_option("--format", format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

    long scan_max = 0;
    auto* scan = app.add_subcommand("scan", "unique-partner primes and record |FM| values");
    scan->add_option("--max", scan_max, "upper bound")->required();

    std::string s_path, t_path;
    bool glue_list = false;
    auto* gl = app.add_subcommand("glue", "gluings of S and T along anti-isometries");
    gl->add_option("--s", s_path, "S lattice JSON")->required();
    gl->add_option("--t", t_path, "T lattice JSON")->required();
    gl->add_flag("--list", glue_list, "print each glued lattice");

    long g_order = 2;
    auto* vt = app.add_subcommand("verify-t14", "gluing orbits against double cosets");
    vt->add_option("--s", s_path, "S lattice JSON")->required();
    vt->add_option("--t", t_path, "T lattice JSON")->required();
    vt->add_option("--g-order", g_order, "order of the cyclic group acting on T");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "k3fm: error: " << e.what() << "\n";
        return 2;
    }

    const Limits limits = limits_from_env();

    if (*discform) {
        print_form(std::cout, discriminant_form(parse_lattice_file(lattice_path)));
        return 0;
    }

    if (*fm) {
        if (*fm_rank1_opt) {
            if (fm_order != 2 || !fm_action.empty())
                throw InvalidInput("--rank1 uses the generic Hodge group");
            const FMCountResult r = fm_number_rank1(fm_rank1, limits);
            std::cout << "fm=" << r.total << "\n";
            std::cout << "|O(A)|=" << r.breakdown.front().orthogonal_group_order << " tau=" << tau(fm_rank1) << "\n";
            return 0;
        }
        if (!*fm_lat_opt) throw InvalidInput("fm needs --lattice or --rank1");
        const NeronSeveriSpec ns(parse_lattice_file(fm_lattice));
        HodgeGroupSpec g;
        g.order = fm_order;
        if (!fm_action.empty()) g = parse_hodge_action(read_json_file(fm_action), fm_order, limits);
        print_result(fm_number(ns, g, limits));
        return 0;
    }

    if (*classnum) {
        const mpz_class d = parse_discriminant(disc_arg);
        const std::size_t h = proper_classes(d, false, limits).h;
        std::cout << "h=" << h;
        if (!is_fundamental_discriminant(d)) std::cout << " (form class number)";
        std::cout << "\n";
        return 0;
    }

    if (*genus) {
        const mpz_class d = parse_discriminant(disc_arg);
        const ClassGroupData data = proper_classes(d, true, limits);
        std::cout << "D=" << d << " h=" << data.h;
        if (!is_fundamental_discriminant(d)) std::cout << " (form class number)";
        std::cout << "\n";
        for (std::size_t i = 0; i < data.h; ++i) {
            std::vector<std::string> forms;
            for (const auto& f : data.cycles[i]) forms.push_back(to_string(f));
            std::cout << "class " << i << ": " << join(forms, " ") << "\n";
        }
        for (std::size_t g = 0; g < data.genus_partition.size(); ++g) {
            std::vector<std::string> idx;
            for (auto i : data.genus_partition[g]) idx.push_back(std::to_string(i));
            std::cout << "genus " << g << ": " << join(idx, " ") << "\n";
        }
        std::vector<std::string> amb;
        for (auto i : data.ambiguous_indices) amb.push_back(std::to_string(i));
        std::cout << "ambiguous: " << join(amb, " ") << "\n";
        std::cout << "improper classes: " << improper_class_count(data) << "\n";
        return 0;
    }

    if (*table) {
        const auto& primes = table_list.empty() ? default_table_primes() : table_list;
        const auto rows = parallel::fm_table(primes, limits);
        print_table(rows, format);
        for (const auto& r : rows)
            if (!r.error.empty()) return 2;
        return 0;
    }

    if (*scan) {
        const ScanReport rep = parallel::gauss_scan(scan_max, limits);
        std::cout << "primes scanned: " << rep.rows.size() << "\n";
        std::vector<std::string> unique;
        for (long p : rep.unique_partner) unique.push_back(std::to_string(p));
        std::cout << "fm=1: " << join(unique, " ") << "\n";
        std::cout << "running max:";
        for (const auto& [p, f] : rep.running_max) std::cout << " (" << p << "," << f << ")";
        std::cout << "\n";
        return 0;
    }

    if (*gl) {
        const IntegerLattice s = parse_lattice_file(s_path);
        const IntegerLattice t = parse_lattice_file(t_path);
        const auto maps = anti_isometries(s, t, limits);
        std::cout << "anti-isometries: " << maps.size() << "\n";
        if (maps.empty()) return 0;
        bool ok = true;
        for (std::size_t i = 0; i < maps.size(); ++i) {
            const Overlattice l = glue(s, t, maps[i], limits);
            const OverlatticeReport rep = verify_overlattice(l, s, t, maps[i], limits);
            ok = ok && rep.ok();
            if (!glue_list) continue;
            std::cout << "gluing " << i << ": ";
            print_map(std::cout, maps[i]);
            std::cout << "\n  gram=" << l.gram << " index=" << l.index << " even=" << rep.even
                      << " unimodular=" << rep.unimodular << " t_primitive=" << rep.t_primitive
                      << " complement_is_s=" << rep.complement_is_s << " map_recovered=" << *rep.map_recovered << "\n";
        }
        std::cout << "all overlattices verified: " << (ok ? "yes" : "no") << "\n";
        return ok ? 0 : 1;
    }

    if (*vt) {
        const IntegerLattice s = parse_lattice_file(s_path);
        const IntegerLattice t = parse_lattice_file(t_path);
        const HodgeGroupSpec g = hodge_group_for_order(t, g_order, limits);
        const auto reps = genus_representatives(s, limits);
        const CorrespondenceReport rep = verify_gluing_correspondence(reps, t, g, limits);
        for (std::size_t j = 0; j < rep.entries.size(); ++j) {
            const auto& e = rep.entries[j];
            std::cout << "S_" << j + 1 << " gram=" << e.s.gram() << " orbits=" << e.orbit_count
                      << " double_cosets=" << e.formula_count << (e.equal() ? " equal" : " DIFFER") << "\n";
        }
        std::cout << "total orbits=" << rep.orbit_total << " double_cosets=" << rep.formula_total << "\n";
        return rep.all_equal() ? 0 : 1;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const InvalidInput& e) {
        std::cerr << "k3fm: error: " << e.what() << "\n";
        return 2;
    } catch (const Unsupported& e) {
        std::cerr << "k3fm: " << e.what() << "\n";
        return 3;
    } catch (const CapExceeded& e) {
        std::cerr << "k3fm: cap exceeded: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "k3fm: internal error: " << e.what() << "\n";
        return 1;
    }
}
