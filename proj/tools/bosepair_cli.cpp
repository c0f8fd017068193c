// bosepair: pair-correlation thermodynamics of a boson liquid.
// Subcommands: sweep, invert, mass, dm-lab, verify.
// Exit codes: 0 success, 1 validation, 2 numerical failure, 3 I/O.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>

#include "bosepair/density_matrix.hpp"
#include "bosepair/effective_mass.hpp"
#include "bosepair/io.hpp"
#include "bosepair/thermo.hpp"
#include "bosepair/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bosepair;

namespace {

const IntegrationSpec run_spec{1e-10, 1e-14, {}, 20000};

std::string resolve_outdir(const std::string& configured) {
    if (const char* env = std::getenv("BOSEPAIR_OUTDIR")) return env;
    return configured;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

void write_json(const std::string& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

SystemParams system_from_config(const KeyValueConfig& cfg) {
    SystemParams p = SystemParams::he4(1.0);
    if (cfg.get_or("system", "preset", "he4") != "he4")
        throw ValidationError("config: unknown [system] preset");
    if (cfg.has("system", "hbar2_over_m") || cfg.has("system", "density"))
        p = SystemParams::make(
            cfg.number_or("system", "hbar2_over_m", p.hbar2_over_m),
            cfg.number_or("system", "density", p.density), 1.0);
    const double lam = cfg.number_or("system", "hbar_scale", 1.0);
    if (lam != 1.0) p = p.with_hbar_scale(lam);
    return p;
}

QGrid grid_from_config(const KeyValueConfig& cfg) {
    return QGrid::log_spaced(
        cfg.number_or("grid", "q_min", 0.02), cfg.number_or("grid", "q_max", 8.0),
        static_cast<int>(cfg.integer_or("grid", "n", 512)));
}

struct PotentialSource {
    PairPotential pot;
    std::optional<TabulatedFunction> s_table; // set when inverted from S(q)
    json meta;
};

TabulatedFunction read_nu_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open potential table: " + path);
    std::vector<double> q, v;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t i = 0;
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i == line.size() || line[i] == '#') continue;
        std::istringstream row(line);
        double qi = 0.0, vi = 0.0;
        if (!(row >> qi >> vi)) throw DataError("malformed potential row", lineno);
        if (!(qi > 0.0)) throw DataError("wave number must be positive", lineno);
        if (!q.empty() && !(qi > q.back()))
            throw DataError("wave numbers must increase strictly", lineno);
        q.push_back(qi);
        v.push_back(vi);
    }
    if (q.size() < 2) throw DataError("potential table needs at least 2 rows", lineno);
    return TabulatedFunction(std::move(q), std::move(v), Extrapolation::constant(),
                             Extrapolation::constant());
}

PotentialSource potential_from_config(const KeyValueConfig& cfg,
                                      const SystemParams& p) {
    const std::string type = cfg.get("potential", "type");
    PotentialSource src;
    src.meta["type"] = type;
    if (type == "zero") {
        src.pot = PairPotential::zero();
    } else if (type == "gaussian") {
        const double nu0 = cfg.number("potential", "nu0");
        const double sigma = cfg.number("potential", "sigma");
        src.pot = PairPotential::gaussian(nu0, sigma);
        src.meta["nu0"] = nu0;
        src.meta["sigma"] = sigma;
    } else if (type == "screened") {
        const double nu0 = cfg.number("potential", "nu0");
        const double length = cfg.number("potential", "length");
        src.pot = PairPotential::screened(nu0, length);
        src.meta["nu0"] = nu0;
        src.meta["length"] = length;
    } else if (type == "table") {
        const std::string file = cfg.get("potential", "file");
        src.pot = PairPotential::tabulated(read_nu_table(file),
                                           cfg.number("potential", "nu0"));
        src.meta["file"] = file;
        src.meta["nu0"] = src.pot.nu0();
    } else if (type == "invert-sq") {
        const std::string file = cfg.get("potential", "file");
        const auto table = ingest_sq(file);
        src.pot = invert_structure_factor(table, p);
        src.s_table = table;
        src.meta["file"] = file;
        src.meta["nu0"] = src.pot.nu0();
    } else {
        throw ValidationError("config: unknown [potential] type '" + type + "'");
    }
    return src;
}

json units_block() {
    return json{{"energy", "K (k_B = 1)"},
                {"length", "Angstrom"},
                {"wave_number", "1/Angstrom"},
                {"potential", "K*Angstrom^3"},
                {"mass", "ratio to the bare particle mass"}};
}

// ----- sweep -----

struct SweepRow {
    double temperature = 0.0;
    bool instability = false;
    std::string message;
    ThermoReport report;
};

int cmd_sweep(const std::string& config_path) {
    const auto cfg = KeyValueConfig::parse_file(config_path);
    const auto base = system_from_config(cfg);
    const auto grid = grid_from_config(cfg);
    const auto src = potential_from_config(cfg, base);
    const auto temps = cfg.list("sweep", "temperatures");
    for (double t : temps)
        if (!(t > 0.0)) throw ValidationError("sweep: temperatures must be positive");
    const std::string method = cfg.get_or("mass", "method", "bare");
    const double tc_bare = critical_temperature(base, 1.0);
    const double t_ref = cfg.number_or("mass", "t_ref", tc_bare);
    const std::string outdir =
        resolve_outdir(cfg.get_or("sweep", "output", "bosepair_out"));
    ensure_dir(outdir);

    // effective-mass ratio per temperature
    std::vector<double> ratios(temps.size(), 1.0);
    for (std::size_t i = 0; i < temps.size(); ++i) {
        const auto p = base.with_temperature(temps[i]);
        if (method == "bare") {
            ratios[i] = 1.0;
        } else if (method == "zero_t") {
            ratios[i] = m_star_zero_t_alpha(src.pot, p, run_spec);
        } else if (method == "classical") {
            ratios[i] = impurity_mass(
                1.0, [&](double q) { return src.pot(q); }, src.pot, p,
                MassMethod::classical, run_spec);
        } else if (method == "sewed") {
            const double r0 = m_star_zero_t_alpha(src.pot, p, run_spec);
            const double rc = impurity_mass(
                1.0, [&](double q) { return src.pot(q); }, src.pot, p,
                MassMethod::classical, run_spec);
            ratios[i] = r0 + (rc - r0) * (1.0 - std::exp(-temps[i] / t_ref));
        } else if (method == "self_consistent") {
            if (!src.s_table)
                throw ValidationError(
                    "mass method self_consistent needs an invert-sq potential");
            const auto sol = m_star_self_consistent(*src.s_table, p);
            if (!sol.converged)
                throw NumericsError("self-consistent mass did not converge at T = " +
                                    fmt_g(temps[i]));
            ratios[i] = sol.m_star_ratio;
        } else {
            throw ValidationError("config: unknown [mass] method '" + method + "'");
        }
    }

    // m**: inverse-temperature derivative over the m*(T) table when m*
    // varies with temperature; otherwise m** = m*
    std::vector<double> ratios_ss = ratios;
    if (method == "self_consistent" && temps.size() >= 2) {
        for (std::size_t i = 0; i < temps.size(); ++i) {
            const std::size_t a = (i == 0) ? 0 : i - 1;
            const std::size_t b = (i + 1 == temps.size()) ? i : i + 1;
            const double beta_a = 1.0 / temps[a], beta_b = 1.0 / temps[b];
            if (beta_a == beta_b) continue;
            const double d_invr =
                (1.0 / ratios[b] - 1.0 / ratios[a]) / (beta_b - beta_a);
            const double be = 1.0 / temps[i];
            ratios_ss[i] = ratios[i] / (1.0 + be * ratios[i] * d_invr);
        }
    }

    auto run_one = [&](std::size_t i) -> SweepRow {
        SweepRow row;
        row.temperature = temps[i];
        try {
            const auto p = base.with_temperature(temps[i]);
            auto ideal = make_ideal_gas(p, ratios[i], run_spec);
            ideal.m_star_star_ratio = ratios_ss[i];
            row.report = make_report(src.pot, p, ideal, grid, run_spec);
        } catch (const ThermoInstability& e) {
            row.instability = true;
            row.message = e.what();
        }
        return row;
    };

    std::vector<std::future<SweepRow>> futures;
    futures.reserve(temps.size());
    for (std::size_t i = 0; i < temps.size(); ++i)
        futures.push_back(std::async(std::launch::async, run_one, i));
    std::vector<SweepRow> rows;
    rows.reserve(temps.size());
    for (auto& f : futures) rows.push_back(f.get());

    auto summary = open_out(outdir + "/sweep_summary.csv");
    summary << "temperature,ln_z_per_n,free_energy_per_n,energy_per_n,"
               "potential_per_n,kinetic_per_n,m_star_ratio,m_star_star_ratio,"
               "instability\n";
    bool any_instability = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.instability) {
            any_instability = true;
            summary << fmt_g(r.temperature) << ",nan,nan,nan,nan,nan,"
                    << fmt_g(ratios[i]) << "," << fmt_g(ratios_ss[i]) << ",1\n";
        } else {
            summary << fmt_g(r.temperature) << "," << fmt_g(r.report.ln_z_per_n)
                    << "," << fmt_g(r.report.free_energy_per_n) << ","
                    << fmt_g(r.report.energy_per_n) << ","
                    << fmt_g(r.report.potential_per_n) << ","
                    << fmt_g(r.report.kinetic_per_n) << ","
                    << fmt_g(r.report.m_star_ratio) << ","
                    << fmt_g(r.report.m_star_star_ratio) << ",0\n";
        }
    }

    auto sq = open_out(outdir + "/s_of_q.csv");
    sq << "temperature,q,s\n";
    for (const auto& r : rows) {
        if (r.instability) continue;
        const auto& t = r.report.s_of_q;
        for (std::size_t k = 0; k < t.size(); ++k)
            sq << fmt_g(r.temperature) << "," << fmt_g(t.grid().nodes[k]) << ","
               << fmt_g(t.values()[k]) << "\n";
    }

    json meta;
    meta["command"] = "sweep";
    meta["config"] = config_path;
    meta["units"] = units_block();
    meta["system"] = {{"hbar2_over_m", base.hbar2_over_m},
                      {"density", base.density}};
    meta["grid"] = {{"q_min", grid.nodes.front()},
                    {"q_max", grid.q_max},
                    {"n", grid.nodes.size()}};
    meta["potential"] = src.meta;
    meta["mass_method"] = method;
    meta["t_ref"] = t_ref;
    meta["temperatures"] = temps;
    meta["columns"] = {
        {"sweep_summary.csv",
         "temperature, ln Z_N/N, F/N, E/N, <Phi>/N, K/N, m*/m, m**/m, "
         "instability flag (all energies per particle, in K)"},
        {"s_of_q.csv", "temperature, wave number q, S(q,T)"}};
    json flagged = json::array();
    for (const auto& r : rows)
        if (r.instability)
            flagged.push_back({{"temperature", r.temperature}, {"error", r.message}});
    meta["instabilities"] = flagged;
    write_json(outdir + "/run_meta.json", meta);

    std::cout << "wrote " << outdir << "/sweep_summary.csv (" << rows.size()
              << " temperatures)\n";
    if (any_instability) {
        std::cerr << "pair approximation unstable at some state points "
                     "(flagged in output)\n";
        return 2;
    }
    return 0;
}

// ----- invert -----

int cmd_invert(const std::string& sq_path, const std::string& outdir_flag,
               double hbar2_over_m, double density) {
    const auto base = SystemParams::make(hbar2_over_m, density, 1.0);
    const auto table = ingest_sq(sq_path);
    const auto pot = invert_structure_factor(table, base);
    const std::string outdir = resolve_outdir(outdir_flag);
    ensure_dir(outdir);

    auto nu = open_out(outdir + "/nu_q.csv");
    nu << "q,nu_q\n";
    for (double q : table.grid().nodes)
        nu << fmt_g(q) << "," << fmt_g(pot(q)) << "\n";

    auto sp = open_out(outdir + "/spectrum.csv");
    sp << "q,alpha,energy\n";
    for (double q : table.grid().nodes)
        sp << fmt_g(q) << "," << fmt_g(alpha_q(q, pot, base)) << ","
           << fmt_g(excitation_energy(q, pot, base)) << "\n";

    json meta;
    meta["command"] = "invert";
    meta["input"] = sq_path;
    meta["units"] = units_block();
    meta["nu0"] = pot.nu0();
    meta["e0_per_n"] =
        ground_state_energy_per_n(pot, base, table.q_max(), run_spec);
    meta["system"] = {{"hbar2_over_m", base.hbar2_over_m},
                      {"density", base.density}};
    meta["columns"] = {{"nu_q.csv", "wave number q, Fourier potential nu_q"},
                       {"spectrum.csv", "wave number q, alpha_q, E(q) in K"}};
    write_json(outdir + "/invert_meta.json", meta);
    std::cout << "wrote " << outdir << "/nu_q.csv, spectrum.csv, invert_meta.json\n";
    return 0;
}

// ----- mass -----

int cmd_mass(const std::string& sq_path, const std::string& method,
             const std::string& temps_csv, double t_ref_flag,
             const std::string& outdir_flag) {
    const auto table = ingest_sq(sq_path);
    const auto base = SystemParams::he4(1.0);
    std::vector<double> temps;
    {
        std::istringstream in(temps_csv);
        std::string item;
        while (std::getline(in, item, ','))
            if (!item.empty()) temps.push_back(std::stod(item));
        if (temps.empty()) throw ValidationError("mass: empty temperature list");
    }
    const double t_ref =
        t_ref_flag > 0.0 ? t_ref_flag : critical_temperature(base, 1.0);
    const std::string outdir = resolve_outdir(outdir_flag);
    ensure_dir(outdir);
    auto out = open_out(outdir + "/mass.csv");
    out << "temperature,method,m_star_ratio,residual,iterations,converged\n";
    for (double t : temps) {
        const auto p = base.with_temperature(t);
        MassSolution sol;
        if (method == "zero_t") {
            sol.m_star_ratio = m_star_zero_t(table, p, run_spec);
        } else if (method == "classical") {
            sol.method = MassMethod::classical;
            sol.m_star_ratio = m_star_classical(table, p, run_spec);
        } else if (method == "sewed") {
            sol.method = MassMethod::sewed;
            sol.m_star_ratio = m_star_sewed(table, p, t_ref, run_spec);
        } else if (method == "self_consistent") {
            sol = m_star_self_consistent(table, p);
        } else {
            throw ValidationError("mass: unknown method '" + method + "'");
        }
        out << fmt_g(t) << "," << to_string(sol.method) << ","
            << fmt_g17(sol.m_star_ratio) << "," << fmt_g(sol.residual) << ","
            << sol.iterations << "," << (sol.converged ? 1 : 0) << "\n";
    }
    std::cout << "wrote " << outdir << "/mass.csv\n";
    return 0;
}

// ----- dm-lab -----

int cmd_dmlab(const std::string& config_path) {
    const auto cfg = KeyValueConfig::parse_file(config_path);
    const int n = static_cast<int>(cfg.integer_or("dm", "n_particles", 3));
    const double box = cfg.number_or("dm", "box_side", 8.0);
    const int n2max = static_cast<int>(cfg.integer_or("dm", "shell_n2_max", 1));
    const double temperature = cfg.number("dm", "temperature");
    if (!(temperature > 0.0))
        throw ValidationError("dm-lab: temperature must be positive");
    const double mratio = cfg.number_or("dm", "m_star_ratio", 1.0);
    const double lam = cfg.number_or("dm", "hbar_scale", 1.0);
    const int n_pairs = static_cast<int>(cfg.integer_or("dm", "n_pairs", 20));
    const std::uint64_t seed =
        static_cast<std::uint64_t>(cfg.integer_or("dm", "seed", 12345));
    const double h2m = he4_hbar2_over_m * lam;

    std::map<int, double> nu_by_n2;
    for (int k = 1; k <= n2max; ++k) {
        const std::string key = "nu_" + std::to_string(k);
        if (cfg.has("dm", key)) nu_by_n2[k] = cfg.number("dm", key);
    }
    const double nu0 = cfg.number_or("dm", "nu0", 0.0);
    const auto modes = BoxModes::shells(box, n2max);
    const auto spec = build_lab_spectrum(modes, nu_by_n2, nu0, h2m, n, mratio);
    const double beta = 1.0 / temperature;

    const std::string outdir =
        resolve_outdir(cfg.get_or("output", "dir", "bosepair_out"));
    ensure_dir(outdir);
    auto out = open_out(outdir + "/dm_lab.csv");
    out << "pair,log_r0,log_p,log_r,hermiticity_delta,ratio_identity_delta\n";

    std::mt19937_64 rng(seed);
    for (int i = 0; i < n_pairs; ++i) {
        const auto c = random_configuration(n, box, rng);
        const auto v = density_matrix_log(c, spec, beta);
        const auto w = density_matrix_log(c.swapped(), spec, beta);
        const double rebuilt = v.log_r0 + penrose_feenberg_log(c, spec, beta) -
                               ideal_rho_rep_log(c, spec, beta);
        out << i << "," << fmt_g17(v.log_r0) << "," << fmt_g17(v.log_p) << ","
            << fmt_g17(v.log_r) << "," << fmt_g(std::abs(v.log_r - w.log_r))
            << "," << fmt_g(std::abs(rebuilt - v.log_r)) << "\n";
    }

    json meta;
    meta["command"] = "dm-lab";
    meta["config"] = config_path;
    meta["units"] = units_block();
    meta["seed"] = seed;
    meta["n_particles"] = n;
    meta["box_side"] = box;
    meta["half_space_modes"] = spec.q.size();
    meta["e0_box"] = spec.e0_box;
    meta["temperature"] = temperature;
    meta["hbar_scale"] = lam;
    meta["columns"] = {
        {"dm_lab.csv",
         "pair index, ln R0, ln P, ln R = ln R0 + ln P, |ln R(x'|x) - ln "
         "R(x|x')|, ratio-identity residual"}};
    write_json(outdir + "/dm_meta.json", meta);
    std::cout << "wrote " << outdir << "/dm_lab.csv (" << n_pairs << " pairs)\n";
    return 0;
}

// ----- verify -----

int cmd_verify(const std::string& suite, std::uint64_t seed,
               const std::string& sq_path, const std::string& outdir_flag) {
    SuiteReport rep;
    if (suite == "limits") {
        rep = run_limits_suite();
    } else if (suite == "consistency") {
        rep = run_consistency_suite();
    } else if (suite == "density-matrix") {
        rep = run_density_matrix_suite(seed);
    } else if (suite == "mass") {
        if (sq_path.empty())
            throw ValidationError("verify --suite mass needs --sq <S(q) file>");
        rep = run_mass_suite(ingest_sq(sq_path));
    } else {
        throw ValidationError("verify: unknown suite '" + suite + "'");
    }

    const std::string outdir = resolve_outdir(outdir_flag);
    ensure_dir(outdir);
    json j;
    j["suite"] = rep.suite;
    j["seed"] = rep.seed;
    j["all_pass"] = rep.all_pass();
    json checks = json::array();
    for (const auto& c : rep.checks) {
        checks.push_back({{"name", c.name},
                          {"measured", c.measured},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass}});
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << rep.suite << "/" << c.name
                  << "  measured " << fmt_g(c.measured) << "  tolerance "
                  << fmt_g(c.tolerance) << "\n";
    }
    j["checks"] = checks;
    write_json(outdir + "/verify_" + rep.suite + ".json", j);
    return rep.all_pass() ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pair-correlation thermodynamics of a boson liquid"};
    app.require_subcommand(1);

    std::string config_path, sq_path, outdir = "bosepair_out";
    std::string method = "zero_t", temps, suite;
    double t_ref = 0.0, h2m = he4_hbar2_over_m, density = he4_density;
    std::uint64_t seed = 20240501;

    auto* sweep = app.add_subcommand("sweep", "temperature sweep from a config file");
    sweep->add_option("--config", config_path, "key=value config")->required();

    auto* invert = app.add_subcommand("invert", "invert a measured S(q) into nu_q");
    invert->add_option("--sq", sq_path, "two-column S(q) file")->required();
    invert->add_option("--out", outdir, "output directory");
    invert->add_option("--hbar2-over-m", h2m, "hbar^2/m in K*Angstrom^2");
    invert->add_option("--density", density, "number density in 1/Angstrom^3");

    auto* mass = app.add_subcommand("mass", "effective-mass prescriptions from S(q)");
    mass->add_option("--sq", sq_path, "two-column S(q) file")->required();
    mass->add_option("--method", method,
                     "zero_t | classical | sewed | self_consistent")
        ->required();
    mass->add_option("--temps", temps, "comma-separated temperatures in K")
        ->required();
    mass->add_option("--t-ref", t_ref, "sewing crossover scale (default T_c)");
    mass->add_option("--out", outdir, "output directory");

    auto* dmlab = app.add_subcommand("dm-lab", "finite-N density-matrix laboratory");
    dmlab->add_option("--config", config_path, "key=value config")->required();

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify
        ->add_option("--suite", suite,
                     "limits | consistency | density-matrix | mass")
        ->required();
    verify->add_option("--seed", seed, "seed for the density-matrix suite");
    verify->add_option("--sq", sq_path, "S(q) file (mass suite)");
    verify->add_option("--out", outdir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sweep->parsed()) return cmd_sweep(config_path);
        if (invert->parsed()) return cmd_invert(sq_path, outdir, h2m, density);
        if (mass->parsed()) return cmd_mass(sq_path, method, temps, t_ref, outdir);
        if (dmlab->parsed()) return cmd_dmlab(config_path);
        if (verify->parsed()) return cmd_verify(suite, seed, sq_path, outdir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
