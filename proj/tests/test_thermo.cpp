#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bosepair/thermo.hpp"

using namespace bosepair;

namespace {
const IntegrationSpec tight{1e-11, 1e-15, {}, 20000};
const IntegrationSpec strict{1e-12, 1e-15, {}, 40000};
}

TEST_CASE("switch-off reproduces the ideal gas across T_c") {
    const auto p0 = SystemParams::he4(1.0);
    const double tc = critical_temperature(p0, 1.0);
    const auto pot = PairPotential::zero();
    const auto grid = QGrid::log_spaced();
    for (double f : {0.1, 0.6, 1.1, 2.5}) {
        const auto p = p0.with_temperature(f * tc);
        const auto ideal = make_ideal_gas(p, 1.0, tight);
        for (double q : {0.05, 0.5, 2.0, 6.0})
            REQUIRE(structure_factor(q, pot, p, ideal) == s0(q, ideal));
        REQUIRE(ln_partition(pot, p, ideal, grid, tight) == ln_z0_ideal(ideal));
        const double e = energy_per_n(pot, p, ideal, grid, tight);

        // independent route: Simpson quadrature of p^2 eps_p n_p (the
        // defining occupation integral), not the polylog closed form
        const double be = p.beta(), h2 = ideal.hbar2_over_mstar();
        const double lnz = std::log(ideal.z0);
        const double pmax = std::sqrt(2.0 * 600.0 / (be * h2));
        const long n = 400000; // even
        const double h = pmax / n;
        auto g = [&](double pp) -> double {
            if (pp == 0.0) return 0.0;
            const double u = 0.5 * be * h2 * pp * pp - lnz;
            if (u > 600.0) return 0.0;
            return pp * pp * (0.5 * h2 * pp * pp) / std::expm1(u);
        };
        double acc = g(0.0) + g(pmax);
        for (long i = 1; i < n; ++i) acc += g(i * h) * (i % 2 ? 4.0 : 2.0);
        const double oracle = acc * h / 3.0 / (2.0 * pi * pi * p.density);

        REQUIRE(e == Catch::Approx(oracle).epsilon(1e-8));
        REQUIRE(e == Catch::Approx(ideal_energy_per_n(ideal)).epsilon(1e-8));
        REQUIRE(potential_energy_per_n(pot, p, ideal, tight) == 0.0);
    }
}

TEST_CASE("free energy reaches the ground-state energy as T -> 0") {
    const auto p0 = SystemParams::he4(0.01);
    const auto pot = PairPotential::gaussian(200.0, 1.0);
    const auto grid = QGrid::log_spaced();
    const auto ideal = make_ideal_gas(p0, 1.0, tight);
    const double f = -p0.temperature * ln_partition(pot, p0, ideal, grid, tight);
    const double e0 = ground_state_energy_per_n(pot, p0, grid.q_max, tight);
    REQUIRE(std::abs(f - e0) < 1e-6);
}

TEST_CASE("structure factor reaches the Bogoliubov form at low temperature") {
    const auto p0 = SystemParams::he4(1.0);
    const double tc = critical_temperature(p0, 1.0);
    const auto p = p0.with_temperature(1e-3 * tc);
    const auto pot = PairPotential::gaussian(200.0, 1.0);
    const auto ideal = make_ideal_gas(p, 1.0, tight);
    for (double q : {0.02, 0.1, 0.5, 1.0, 2.5, 6.0})
        REQUIRE(structure_factor(q, pot, p, ideal) ==
                Catch::Approx(1.0 / alpha_q(q, pot, p)).margin(1e-6));
}

TEST_CASE("energy equals ground state plus quasiparticle gas at low temperature") {
    const auto p0 = SystemParams::he4(1.0);
    const double tc = critical_temperature(p0, 1.0);
    const auto p = p0.with_temperature(1e-3 * tc);
    const auto pot = PairPotential::gaussian(200.0, 1.0);
    const auto grid = QGrid::log_spaced();
    const auto ideal = make_ideal_gas(p, 1.0, tight);
    const double e = energy_per_n(pot, p, ideal, grid, tight);
    const double e0 = ground_state_energy_per_n(pot, p, grid.q_max, tight);
    const double ph = phonon_gas_energy_per_n(pot, p, tight);
    REQUIRE(std::abs(e - e0 - ph) < 1e-9);
}

TEST_CASE("energy matches the inverse-temperature derivative of ln Z") {
    const auto p0 = SystemParams::he4(1.0);
    const double tc = critical_temperature(p0, 1.0);
    const auto pot = PairPotential::gaussian(200.0, 1.0);
    const auto grid = QGrid::log_spaced();
    for (double f : {0.85, 1.5}) { // one per phase; the full set runs in acceptance
        const auto p = p0.with_temperature(f * tc);
        const auto ideal = make_ideal_gas(p, 1.0, strict);
        const double e = energy_per_n(pot, p, ideal, grid, strict);
        const double be = p.beta(), db = 1e-5 * be;
        const auto pp = p0.with_temperature(1.0 / (be + db));
        const auto pm = p0.with_temperature(1.0 / (be - db));
        const double fd =
            -(ln_partition(pot, pp, make_ideal_gas(pp, 1.0, strict), grid, strict) -
              ln_partition(pot, pm, make_ideal_gas(pm, 1.0, strict), grid, strict)) /
            (2.0 * db);
        REQUIRE(e == Catch::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("potential energy at low temperature from the Bogoliubov form") {
    const auto p0 = SystemParams::he4(1.0);
    const double tc = critical_temperature(p0, 1.0);
    const auto p = p0.with_temperature(1e-3 * tc);
    const auto pot = PairPotential::gaussian(150.0, 1.0);
    const auto ideal = make_ideal_gas(p, 1.0, tight);
    const double phi = potential_energy_per_n(pot, p, ideal, tight);
    // substitute S -> 1/alpha analytically
    auto f = [&](double q) {
        return q * q * pot(q) * (1.0 / alpha_q(q, pot, p) - 1.0);
    };
    const double ref = 0.5 * p.density * pot.nu0() +
                       integrate_to_infinity(f, 1e-8, tight).value_or_throw("ref") /
                           (4.0 * pi * pi);
    REQUIRE(phi == Catch::Approx(ref).margin(1e-7));
}

TEST_CASE("potential energy at T_c matches a trapezoid oracle") {
    const auto p0 = SystemParams::he4(1.0);
    const double tc = critical_temperature(p0, 1.0);
    const auto p = p0.with_temperature(tc);
    const auto pot = PairPotential::gaussian(150.0, 1.0);
    const auto ideal = make_ideal_gas(p, 1.0, tight);
    const double phi = potential_energy_per_n(pot, p, ideal, tight);
    // oracle: trapezoid over the same structure-factor values
    const long n = 3000;
    const double qmax = 6.5, h = qmax / n;
    double acc = 0.0;
    for (long i = 1; i <= n; ++i) {
        const double q = i * h;
        const double w = (i == n) ? 0.5 : 1.0;
        acc += w * q * q * pot(q) * (structure_factor(q, pot, p, ideal) - 1.0);
    }
    const double oracle = 0.5 * p.density * pot.nu0() + acc * h / (4.0 * pi * pi);
    REQUIRE(phi == Catch::Approx(oracle).epsilon(2e-5));
}

TEST_CASE("classical limit under hbar scaling approaches the RPA forms") {
    const auto grid = QGrid::log_spaced();
    const auto pot = PairPotential::gaussian(40.0, 1.0);
    double prevS = 1e300, prevE = 1e300, prevZ = 1e300;
    for (double lam : {1.0, 0.1, 0.03}) { // full ladder in acceptance
        const auto p = SystemParams::he4(25.0).with_hbar_scale(lam);
        const auto ideal = make_ideal_gas(p, 1.0, tight);
        double devS = 0.0;
        for (double q : {0.3, 1.0, 2.0, 5.0}) {
            const double s = structure_factor(q, pot, p, ideal);
            const double sr = rpa_structure_factor(q, pot, p);
            devS = std::max(devS, std::abs(s - sr) / sr);
        }
        const double e = energy_per_n(pot, p, ideal, grid, tight);
        const double devE = std::abs(e - rpa_energy_per_n(pot, p, tight)) /
                            rpa_energy_per_n(pot, p, tight);
        const double xs =
            ln_partition(pot, p, ideal, grid, tight) - ln_z0_ideal(ideal);
        const double devZ = std::abs(xs - rpa_excess_ln_partition(pot, p, tight));
        REQUIRE(devS < prevS);
        REQUIRE(devE < prevE);
        REQUIRE(devZ < prevZ);
        prevS = devS;
        prevE = devE;
        prevZ = devZ;
    }
    REQUIRE(prevS < 1e-3);
    REQUIRE(prevE < 1e-3);
}

TEST_CASE("report bundles the identities exactly") {
    const auto p0 = SystemParams::he4(1.0);
    const double tc = critical_temperature(p0, 1.0);
    const auto p = p0.with_temperature(1.3 * tc);
    const auto pot = PairPotential::gaussian(80.0, 1.0);
    const auto grid = QGrid::log_spaced(0.02, 8.0, 48);
    const auto ideal = make_ideal_gas(p, 1.0, tight);
    const auto rep = make_report(pot, p, ideal, grid, tight);
    REQUIRE(rep.free_energy_per_n == -p.temperature * rep.ln_z_per_n);
    REQUIRE(rep.kinetic_per_n == rep.energy_per_n - rep.potential_per_n);
    REQUIRE(rep.s_of_q.size() == grid.nodes.size());
    REQUIRE(rep.temperature == p.temperature);
    REQUIRE(rep.s_of_q.values().back() == Catch::Approx(1.0).margin(1e-3));
}

TEST_CASE("pair-approximation breakdown is surfaced, not clamped") {
    // a near-critical attractive band just above T_c drives the
    // fluctuation-term logarithm argument negative
    const auto p0 = SystemParams::he4(1.0);
    const double tc = critical_temperature(p0, 1.0);
    auto pot = PairPotential::from_function(
        [&](double q) {
            const double w = std::exp(-std::pow((q - 2.2) / 0.8, 6.0));
            return -(1.0 - 1e-4) * w * p0.eps_free(q) / (2.0 * p0.density);
        },
        0.0, "band");
    const auto p = p0.with_temperature(1.001 * tc);
    const auto ideal = make_ideal_gas(p, 1.0, tight);
    try {
        (void)structure_factor(2.02, pot, p, ideal);
        FAIL("expected ThermoInstability");
    } catch (const ThermoInstability& e) {
        REQUIRE(e.q() == Catch::Approx(2.02));
        REQUIRE(e.temperature() == Catch::Approx(p.temperature));
    }
    REQUIRE_THROWS_AS(
        ln_partition(pot, p, ideal, QGrid::log_spaced(0.02, 8.0, 32), tight),
        ThermoInstability);
}

TEST_CASE("RPA reference forms validate their inputs") {
    const auto p = SystemParams::he4(2.0);
    auto bad = PairPotential::from_function(
        [&](double q) {
            return -2.0 / (p.beta() * p.density) * std::exp(-q * q);
        },
        0.0, "too-attractive");
    REQUIRE_THROWS_AS(rpa_structure_factor(0.1, bad, p), NumericsError);
}
